//! Elements of `B = M_n(K)` as twisted Laurent series in the standard
//! monomial `Pi` (ones above the diagonal, `pi_K` in the corner).
//!
//! Every element is `sum_l D_l Pi^l` with `D_l` diagonal over `k_K`, and
//! `Pi D = sigma(D) Pi` where `sigma(D)_r = D_{r+1 mod n}`. Level `l` is the
//! `q`-adic level of the standard minimal hereditary order.

use std::sync::Arc;

use crate::field_tower::{Fe, FqField, Series};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BElem {
    k: Arc<FqField>,
    n: usize,
    v: i64,
    comps: Vec<Vec<Fe>>,
}

fn shift(d: &[Fe], a: i64) -> Vec<Fe> {
    let n = d.len() as i64;
    (0..n).map(|r| d[(r + a).rem_euclid(n) as usize]).collect()
}

impl BElem {
    /// Zero known on levels `[v, prec)`.
    pub fn zero(k: &Arc<FqField>, n: usize, v: i64, prec: i64) -> BElem {
        let len = (prec - v).max(0) as usize;
        BElem {
            k: k.clone(),
            n,
            v,
            comps: vec![vec![Fe::ZERO; n]; len],
        }
    }

    pub fn monomial(k: &Arc<FqField>, diag: Vec<Fe>, level: i64, prec: i64) -> BElem {
        let n = diag.len();
        let mut x = BElem::zero(k, n, level, prec);
        if let Some(c) = x.comps.first_mut() {
            *c = diag;
        }
        x
    }

    pub fn scalar(k: &Arc<FqField>, n: usize, a: Fe, level: i64, prec: i64) -> BElem {
        BElem::monomial(k, vec![a; n], level, prec)
    }

    pub fn one(k: &Arc<FqField>, n: usize, prec: i64) -> BElem {
        BElem::scalar(k, n, Fe::ONE, 0, prec)
    }

    pub fn residue_field(&self) -> &Arc<FqField> {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// First level carried.
    pub fn v(&self) -> i64 {
        self.v
    }

    /// Levels at and above `prec` are unknown.
    pub fn prec(&self) -> i64 {
        self.v + self.comps.len() as i64
    }

    /// Component at `level`: zero below `v`, `None` at or above `prec`.
    pub fn comp(&self, level: i64) -> Option<Vec<Fe>> {
        if level >= self.prec() {
            None
        } else if level < self.v {
            Some(vec![Fe::ZERO; self.n])
        } else {
            Some(self.comps[(level - self.v) as usize].clone())
        }
    }

    pub fn set_comp(&mut self, level: i64, d: Vec<Fe>) {
        assert!(level >= self.v && level < self.prec(), "level outside carried range");
        self.comps[(level - self.v) as usize] = d;
    }

    pub fn valuation(&self) -> Option<i64> {
        self.comps
            .iter()
            .position(|d| d.iter().any(|x| !x.is_zero()))
            .map(|i| self.v + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Lies in `KP` to known precision: every component is scalar.
    pub fn is_scalar(&self) -> bool {
        self.comps.iter().all(|d| d.iter().all(|&x| x == d[0]))
    }

    pub fn truncate(&self, prec: i64) -> BElem {
        let mut out = self.clone();
        let keep = (prec - self.v).max(0) as usize;
        out.comps.truncate(keep);
        out
    }

    /// Re-bases to start at `v`, padding with zeros.
    pub fn with_start(&self, v: i64) -> BElem {
        let mut out = BElem::zero(&self.k, self.n, v, self.prec());
        for l in v.max(self.v)..self.prec() {
            out.set_comp(l, self.comp(l).expect("in range"));
        }
        out
    }

    fn zip(&self, other: &BElem, f: impl Fn(Fe, Fe) -> Fe) -> BElem {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let v = self.v.min(other.v);
        let prec = self.prec().min(other.prec());
        let mut out = BElem::zero(&self.k, self.n, v, prec);
        for l in v..prec {
            let a = self.comp(l).expect("below prec");
            let b = other.comp(l).expect("below prec");
            out.set_comp(l, a.iter().zip(&b).map(|(&x, &y)| f(x, y)).collect());
        }
        out
    }

    pub fn add(&self, other: &BElem) -> BElem {
        self.zip(other, |x, y| self.k.add(x, y))
    }

    pub fn sub(&self, other: &BElem) -> BElem {
        self.zip(other, |x, y| self.k.sub(x, y))
    }

    pub fn neg(&self) -> BElem {
        self.scale(self.k.neg(Fe::ONE))
    }

    pub fn scale(&self, a: Fe) -> BElem {
        let mut out = self.clone();
        for d in out.comps.iter_mut() {
            for x in d.iter_mut() {
                *x = self.k.mul(*x, a);
            }
        }
        out
    }

    pub fn mul(&self, other: &BElem) -> BElem {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let v = self.v + other.v;
        let prec = (self.prec() + other.v).min(other.prec() + self.v);
        let mut out = BElem::zero(&self.k, self.n, v, prec);
        for (i, a) in self.comps.iter().enumerate() {
            let la = self.v + i as i64;
            if a.iter().all(|x| x.is_zero()) {
                continue;
            }
            for (j, b) in other.comps.iter().enumerate() {
                let l = la + other.v + j as i64;
                if l >= prec {
                    break;
                }
                let sb = shift(b, la);
                let idx = (l - v) as usize;
                for r in 0..self.n {
                    let t = self.k.mul(a[r], sb[r]);
                    out.comps[idx][r] = self.k.add(out.comps[idx][r], t);
                }
            }
        }
        out
    }

    /// Inverse, when the leading component is invertible on every row.
    pub fn inv(&self) -> Option<BElem> {
        let v0 = self.valuation()?;
        let lead = self.comp(v0)?;
        let lead_inv: Option<Vec<Fe>> = lead.iter().map(|&x| self.k.inv(x)).collect();
        let rel = self.prec() - v0;
        // L^{-1} = sigma^{-v0}(D^{-1}) Pi^{-v0}
        let linv = BElem::monomial(&self.k, shift(&lead_inv?, -v0), -v0, -v0 + rel);
        let w = linv.mul(&self.with_start(v0)).sub(&BElem::one(&self.k, self.n, rel));
        let mut sum = BElem::one(&self.k, self.n, rel);
        let mut term = BElem::one(&self.k, self.n, rel);
        let minus_w = w.neg();
        for _ in 1..rel {
            term = term.mul(&minus_w).truncate(rel);
            sum = sum.add(&term);
        }
        Some(sum.mul(&linv))
    }

    pub fn pow(&self, e: u32) -> BElem {
        if e == 0 {
            return BElem::one(&self.k, self.n, self.prec() - self.v);
        }
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }

    /// `Tr_B` as a series in `pi_K`: only levels divisible by `n` contribute.
    pub fn trace(&self) -> Series {
        let n = self.n as i64;
        let lo = self.v.div_euclid(n) + i64::from(self.v.rem_euclid(n) != 0);
        let hi = (self.prec() - 1).div_euclid(n);
        let coeffs: Vec<Fe> = (lo..=hi)
            .map(|m| {
                self.comp(m * n)
                    .expect("below prec")
                    .iter()
                    .fold(Fe::ZERO, |acc, &x| self.k.add(acc, x))
            })
            .collect();
        if coeffs.is_empty() {
            Series::zero(self.k.clone(), hi + 1)
        } else {
            Series::new(self.k.clone(), lo, coeffs)
        }
    }

    /// The `n x n` matrix over `k_K((pi_K))`, entry by entry.
    pub fn to_matrix(&self) -> Vec<Vec<Series>> {
        let n = self.n as i64;
        let mut m = vec![vec![Series::zero(self.k.clone(), 0); self.n]; self.n];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                let s = (c as i64 - r as i64).rem_euclid(n);
                let carry = i64::from(r as i64 + s >= n);
                let power = |l: i64| (l - s).div_euclid(n) + carry;
                let first = self.v + (s - self.v).rem_euclid(n);
                let levels: Vec<i64> = (0..)
                    .map(|t| first + t * n)
                    .take_while(|&l| l < self.prec())
                    .collect();
                *slot = match levels.first() {
                    None => Series::zero(self.k.clone(), power(first)),
                    Some(&l0) => Series::new(
                        self.k.clone(),
                        power(l0),
                        levels.iter().map(|&l| self.comp(l).expect("in range")[r]).collect(),
                    ),
                };
            }
        }
        m
    }

    /// Coordinates on `q^i / q^{i+j}`, level-major.
    pub fn coords(&self, i: i64, j: i64) -> Option<Vec<Fe>> {
        let mut out = Vec::with_capacity((j as usize) * self.n);
        for l in i..i + j {
            out.extend(self.comp(l)?);
        }
        Some(out)
    }

    /// The element of `q^i / q^{i+j}` with the given coordinates.
    pub fn from_coords(k: &Arc<FqField>, n: usize, i: i64, j: i64, xs: &[Fe]) -> BElem {
        let mut out = BElem::zero(k, n, i, i + j);
        for (t, chunk) in xs.chunks(n).enumerate() {
            out.set_comp(i + t as i64, chunk.to_vec());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_power_is_scalar() {
        let k = FqField::new(3, 1).unwrap();
        let pi = BElem::scalar(&k, 3, Fe::ONE, 1, 10);
        let p3 = pi.pow(3);
        assert_eq!(p3.valuation(), Some(3));
        assert!(p3.is_scalar());
        let m = p3.to_matrix();
        assert_eq!(m[0][0].leading(), Some((1, Fe::ONE)));
        assert!(m[0][1].is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let k = FqField::new(2, 2).unwrap();
        let g = k.generator();
        let mut x = BElem::monomial(&k, vec![g, Fe::ONE], -3, 6);
        x.set_comp(-1, vec![Fe::ONE, g]);
        let y = x.inv().unwrap();
        let one = x.mul(&y);
        assert_eq!(one.valuation(), Some(0));
        let prec = one.prec();
        assert!(one.sub(&BElem::one(&k, 2, prec)).is_zero());
    }
}
