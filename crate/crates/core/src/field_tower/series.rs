//! Truncated Laurent series `sum a_i X^{v+i}` over a finite field.
//!
//! A series is known modulo `X^{v + len}`; an element that is zero to the
//! known precision has `coeffs` empty and `v` equal to its absolute precision.

use std::sync::Arc;

use super::fq::{Fe, FqField};

#[derive(Clone, Debug)]
pub struct Series {
    k: Arc<FqField>,
    v: i64,
    coeffs: Vec<Fe>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.v == other.v && self.coeffs == other.coeffs
    }
}
impl Eq for Series {}

impl Series {
    /// Builds and normalizes; the result is known modulo `X^{v + coeffs.len()}`.
    pub fn new(k: Arc<FqField>, v: i64, coeffs: Vec<Fe>) -> Series {
        let mut s = Series { k, v, coeffs };
        s.normalize();
        s
    }

    /// Zero known modulo `X^abs_prec`.
    pub fn zero(k: Arc<FqField>, abs_prec: i64) -> Series {
        Series {
            k,
            v: abs_prec,
            coeffs: Vec::new(),
        }
    }

    /// `a X^v` known to relative precision `rel`.
    pub fn monomial(k: Arc<FqField>, a: Fe, v: i64, rel: usize) -> Series {
        let mut coeffs = vec![Fe::ZERO; rel];
        if rel > 0 {
            coeffs[0] = a;
        }
        Series::new(k, v, coeffs)
    }

    /// Constant `a` known modulo `X^abs_prec`.
    pub fn constant(k: Arc<FqField>, a: Fe, abs_prec: i64) -> Series {
        if abs_prec <= 0 {
            return Series::zero(k, abs_prec);
        }
        Series::monomial(k, a, 0, abs_prec as usize)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(i) => {
                self.coeffs.drain(..i);
                self.v += i as i64;
            }
            None => {
                self.v += self.coeffs.len() as i64;
                self.coeffs.clear();
            }
        }
    }

    pub fn residue_field(&self) -> &Arc<FqField> {
        &self.k
    }

    /// Valuation if the series is nonzero to known precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.v)
        }
    }

    /// Lower bound on the valuation (exact when nonzero).
    pub fn v(&self) -> i64 {
        self.v
    }

    /// Relative precision: number of known coefficients from `v`.
    pub fn rel_prec(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent below which all coefficients are known.
    pub fn abs_prec(&self) -> i64 {
        self.v + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading term `(v, a)` with `a != 0`.
    pub fn leading(&self) -> Option<(i64, Fe)> {
        self.coeffs.first().map(|&a| (self.v, a))
    }

    /// Coefficient of `X^n`, or `None` if beyond the known precision.
    pub fn coeff(&self, n: i64) -> Option<Fe> {
        if n >= self.abs_prec() {
            None
        } else if n < self.v {
            Some(Fe::ZERO)
        } else {
            Some(self.coeffs[(n - self.v) as usize])
        }
    }

    /// Drops knowledge beyond `X^abs_prec`.
    pub fn truncate(&self, abs_prec: i64) -> Series {
        if abs_prec >= self.abs_prec() {
            return self.clone();
        }
        if abs_prec <= self.v {
            return Series::zero(self.k.clone(), abs_prec);
        }
        let keep = (abs_prec - self.v) as usize;
        Series::new(self.k.clone(), self.v, self.coeffs[..keep].to_vec())
    }

    pub fn add(&self, other: &Series) -> Series {
        let k = &self.k;
        let lo = self.v.min(other.v);
        let hi = self.abs_prec().min(other.abs_prec());
        if hi <= lo {
            return Series::zero(k.clone(), hi);
        }
        let mut out = Vec::with_capacity((hi - lo) as usize);
        for n in lo..hi {
            let a = self.coeff(n).unwrap_or(Fe::ZERO);
            let b = other.coeff(n).unwrap_or(Fe::ZERO);
            out.push(k.add(a, b));
        }
        Series::new(k.clone(), lo, out)
    }

    pub fn neg(&self) -> Series {
        Series {
            k: self.k.clone(),
            v: self.v,
            coeffs: self.coeffs.iter().map(|&a| self.k.neg(a)).collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Series {
        let k = &self.k;
        let v = self.v + other.v;
        let hi = (self.v + other.abs_prec()).min(other.v + self.abs_prec());
        if hi <= v {
            return Series::zero(k.clone(), hi);
        }
        let len = (hi - v) as usize;
        let mut out = vec![Fe::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        Series::new(k.clone(), v, out)
    }

    /// Multiplication by a residue constant.
    pub fn scale(&self, a: Fe) -> Series {
        Series::new(
            self.k.clone(),
            self.v,
            self.coeffs.iter().map(|&c| self.k.mul(a, c)).collect(),
        )
    }

    /// Multiplication by `X^n`.
    pub fn shift(&self, n: i64) -> Series {
        Series {
            k: self.k.clone(),
            v: self.v + n,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Inverse of a series with known nonzero leading coefficient; keeps the
    /// relative precision.
    pub fn inv(&self) -> Option<Series> {
        let k = &self.k;
        let (&a0, _) = self.coeffs.split_first()?;
        let a0_inv = k.inv(a0)?;
        let n = self.coeffs.len();
        let mut out = vec![Fe::ZERO; n];
        out[0] = a0_inv;
        for m in 1..n {
            let mut acc = Fe::ZERO;
            for i in 1..=m {
                acc = k.add(acc, k.mul(self.coeffs[i], out[m - i]));
            }
            out[m] = k.neg(k.mul(acc, a0_inv));
        }
        Some(Series::new(k.clone(), -self.v, out))
    }

    pub fn div(&self, other: &Series) -> Option<Series> {
        Some(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents need a known leading coefficient.
    pub fn pow(&self, n: i64) -> Option<Series> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        if n == 0 {
            return Some(Series::constant(
                self.k.clone(),
                Fe::ONE,
                (self.rel_prec() as i64).max(1),
            ));
        }
        let mut result = self.clone();
        let mut base = self.clone();
        let mut e = n;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Some(result)
    }

    /// Applies a coefficientwise map (a ring map on the residue field).
    pub fn map_coeffs(&self, target: Arc<FqField>, f: impl Fn(Fe) -> Fe) -> Series {
        Series::new(target, self.v, self.coeffs.iter().map(|&a| f(a)).collect())
    }

    /// Substitutes `X -> u X^e` for a residue unit `u` and `e >= 1`.
    pub fn substitute_power(&self, u: Fe, e: i64) -> Series {
        let k = &self.k;
        let lo = self.v * e;
        let hi = self.abs_prec() * e;
        if hi <= lo {
            return Series::zero(k.clone(), hi);
        }
        let mut out = vec![Fe::ZERO; (hi - lo) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            let n = self.v + i as i64;
            out[(i as i64 * e) as usize] = k.mul(a, k.pow(u, n));
        }
        Series::new(k.clone(), lo, out)
    }

    /// Equality of the parts both series know.
    pub fn agrees_with(&self, other: &Series) -> bool {
        let hi = self.abs_prec().min(other.abs_prec());
        let lo = self.v.min(other.v);
        (lo..hi).all(|n| self.coeff(n) == other.coeff(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FqField> {
        FqField::new(2, 2).unwrap()
    }

    #[test]
    fn geometric_series_inverse() {
        let k = f4();
        // (1 - X)^{-1} = 1 + X + X^2 + ...
        let s = Series::new(k.clone(), 0, vec![Fe::ONE, k.neg(Fe::ONE), Fe::ZERO, Fe::ZERO]);
        let inv = s.inv().unwrap();
        assert_eq!(inv.coeffs(), &[Fe::ONE; 4]);
        let prod = s.mul(&inv);
        assert_eq!(prod, Series::constant(k, Fe::ONE, 4));
    }

    #[test]
    fn precision_of_products() {
        let k = f4();
        let x = Series::new(k.clone(), -1, vec![Fe::ONE, Fe::ONE]); // known mod X^1
        let y = Series::new(k.clone(), 2, vec![Fe::ONE; 3]); // known mod X^5
        let p = x.mul(&y);
        assert_eq!(p.v(), 1);
        assert_eq!(p.abs_prec(), 2 + 1);
    }

    #[test]
    fn zero_tracks_absolute_precision() {
        let k = f4();
        let a = Series::new(k.clone(), 0, vec![Fe::ONE, Fe::ONE]);
        let d = a.sub(&a);
        assert!(d.is_zero());
        assert_eq!(d.abs_prec(), 2);
    }

    #[test]
    fn substitution_scales_exponents() {
        let k = f4();
        let g = k.generator();
        let s = Series::new(k.clone(), 1, vec![Fe::ONE, Fe::ONE]); // X + X^2
        let t = s.substitute_power(g, 3);
        assert_eq!(t.v(), 3);
        assert_eq!(t.coeff(3), Some(g));
        assert_eq!(t.coeff(6), Some(k.pow(g, 2)));
        assert_eq!(t.abs_prec(), 9);
    }
}
