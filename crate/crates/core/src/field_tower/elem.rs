use std::fmt;

use super::fq::Fe;
use super::series::Series;
use super::tower::{LocalFieldDesc, Step};
use super::FieldError;

/// An element `sum a_i pi^{v+i}` of a tower field, known modulo `p^{v+len}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LFElem {
    field: LocalFieldDesc,
    s: Series,
}

impl LFElem {
    pub fn new(field: &LocalFieldDesc, v: i64, coeffs: Vec<Fe>) -> LFElem {
        LFElem {
            s: Series::new(field.residue().clone(), v, coeffs),
            field: field.clone(),
        }
    }

    pub fn from_series(field: &LocalFieldDesc, s: Series) -> LFElem {
        debug_assert_eq!(**s.residue_field(), **field.residue());
        LFElem {
            field: field.clone(),
            s,
        }
    }

    pub fn zero(field: &LocalFieldDesc, abs_prec: i64) -> LFElem {
        LFElem::from_series(field, Series::zero(field.residue().clone(), abs_prec))
    }

    /// Teichmuller constant `a`, known modulo `p^abs_prec`.
    pub fn constant(field: &LocalFieldDesc, a: Fe, abs_prec: i64) -> LFElem {
        LFElem::from_series(field, Series::constant(field.residue().clone(), a, abs_prec))
    }

    pub fn one(field: &LocalFieldDesc, abs_prec: i64) -> LFElem {
        LFElem::constant(field, Fe::ONE, abs_prec)
    }

    /// `a pi^v` with relative precision `rel`.
    pub fn monomial(field: &LocalFieldDesc, a: Fe, v: i64, rel: usize) -> LFElem {
        LFElem::from_series(field, Series::monomial(field.residue().clone(), a, v, rel))
    }

    pub fn uniformizer(field: &LocalFieldDesc, rel: usize) -> LFElem {
        LFElem::monomial(field, Fe::ONE, 1, rel)
    }

    /// The base variable `t = U^{-1} pi^e`.
    pub fn base_variable(field: &LocalFieldDesc, rel: usize) -> LFElem {
        let k = field.residue();
        let u_inv = k.inv(field.abs_unit()).expect("unit is nonzero");
        LFElem::monomial(field, u_inv, field.e() as i64, rel)
    }

    pub fn field(&self) -> &LocalFieldDesc {
        &self.field
    }

    pub fn series(&self) -> &Series {
        &self.s
    }

    pub fn valuation(&self) -> Option<i64> {
        self.s.valuation()
    }

    pub fn v(&self) -> i64 {
        self.s.v()
    }

    pub fn abs_prec(&self) -> i64 {
        self.s.abs_prec()
    }

    pub fn rel_prec(&self) -> usize {
        self.s.rel_prec()
    }

    pub fn coeffs(&self) -> &[Fe] {
        self.s.coeffs()
    }

    /// Coefficient of `pi^n`, if known.
    pub fn coeff(&self, n: i64) -> Option<Fe> {
        self.s.coeff(n)
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero()
    }

    pub fn leading(&self) -> Option<(i64, Fe)> {
        self.s.leading()
    }

    pub fn truncate(&self, abs_prec: i64) -> LFElem {
        self.with(self.s.truncate(abs_prec))
    }

    fn with(&self, s: Series) -> LFElem {
        LFElem {
            field: self.field.clone(),
            s,
        }
    }

    fn same_field(&self, other: &LFElem) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &LFElem) -> Result<LFElem, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.s.add(&other.s)))
    }

    pub fn sub(&self, other: &LFElem) -> Result<LFElem, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.s.sub(&other.s)))
    }

    pub fn mul(&self, other: &LFElem) -> Result<LFElem, FieldError> {
        self.same_field(other)?;
        Ok(self.with(self.s.mul(&other.s)))
    }

    pub fn neg(&self) -> LFElem {
        self.with(self.s.neg())
    }

    pub fn scale(&self, a: Fe) -> LFElem {
        self.with(self.s.scale(a))
    }

    pub fn shift(&self, n: i64) -> LFElem {
        self.with(self.s.shift(n))
    }

    pub fn inv(&self) -> Result<LFElem, FieldError> {
        self.s
            .inv()
            .map(|s| self.with(s))
            .ok_or(FieldError::NotInvertible)
    }

    pub fn div(&self, other: &LFElem) -> Result<LFElem, FieldError> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, n: i64) -> Result<LFElem, FieldError> {
        self.s
            .pow(n)
            .map(|s| self.with(s))
            .ok_or(FieldError::NotInvertible)
    }

    /// Equality on the commonly known part.
    pub fn agrees_with(&self, other: &LFElem) -> bool {
        self.field == other.field && self.s.agrees_with(&other.s)
    }

    /// Writes `x = pi^v zeta w` with `zeta` Teichmuller and `w` in `U^1`.
    pub fn unit_decomposition(&self) -> Result<(i64, Fe, LFElem), FieldError> {
        let (v, a) = self.leading().ok_or(FieldError::NotInvertible)?;
        let k = self.field.residue();
        let a_inv = k.inv(a).ok_or(FieldError::NotInvertible)?;
        let w = self.with(self.s.shift(-v).scale(a_inv));
        Ok((v, a, w))
    }

    /// Image in a descendant field `target` of the same tower.
    pub fn embed(&self, target: &LocalFieldDesc) -> Result<LFElem, FieldError> {
        if !self.field.is_ancestor_of(target) {
            return Err(FieldError::NotAncestor);
        }
        let mut s = self.s.clone();
        for i in self.field.depth()..target.depth() {
            s = match target.steps()[i] {
                Step::Unramified { .. } => {
                    let emb = target.level(i).embed.as_ref().expect("unramified level");
                    s.map_coeffs(emb.big.clone(), |a| emb.apply(a))
                }
                Step::Tame { e, unit_log } => {
                    // pi_parent = u^{-1} pi^e
                    let k = target.level(i).residue.clone();
                    s.substitute_power(k.exp(-(unit_log as i64)), e as i64)
                }
                Step::Base { .. } => unreachable!("base is always the first step"),
            };
        }
        Ok(LFElem::from_series(target, s))
    }

    /// Inverse of [`LFElem::embed`] for one step: the preimage in the parent,
    /// if the element lies in its image.
    pub fn descend_one(&self) -> Option<LFElem> {
        let parent = self.field.parent()?;
        let level = self.field.top();
        match self.field.kind() {
            Step::Unramified { .. } => {
                let emb = level.embed.as_ref()?;
                let mut out = Vec::with_capacity(self.rel_prec());
                for &a in self.coeffs() {
                    out.push(emb.preimage(a)?);
                }
                Some(LFElem::new(&parent, self.v(), out))
            }
            Step::Tame { e, unit_log } => {
                let e = e as i64;
                let k = parent.residue();
                let u = k.exp(unit_log as i64);
                let lo = self.v().div_euclid(e) + i64::from(self.v().rem_euclid(e) != 0);
                // pi_parent^Q has last known index below abs_prec
                let hi = (self.abs_prec() + e - 1).div_euclid(e);
                let mut out = Vec::new();
                for n in self.v()..self.abs_prec() {
                    let a = self.coeff(n)?;
                    if n.rem_euclid(e) != 0 && !a.is_zero() {
                        return None;
                    }
                }
                for qq in lo..hi {
                    let a = self.coeff(qq * e).unwrap_or(Fe::ZERO);
                    out.push(k.mul(a, k.pow(u, qq)));
                }
                if out.is_empty() {
                    return Some(LFElem::zero(&parent, hi));
                }
                Some(LFElem::new(&parent, lo, out))
            }
            Step::Base { .. } => None,
        }
    }

    /// Descends to an ancestor through repeated [`LFElem::descend_one`].
    pub fn descend_to(&self, k: &LocalFieldDesc) -> Option<LFElem> {
        if !k.is_ancestor_of(&self.field) {
            return None;
        }
        let mut x = self.clone();
        while x.field.depth() > k.depth() {
            x = x.descend_one()?;
        }
        Some(x)
    }

    /// Canonical text form used in diagnostics.
    pub fn describe(&self) -> String {
        let k = self.field.residue();
        let cs: Vec<String> = self.coeffs().iter().map(|&a| k.format(a)).collect();
        format!("v={} [{}] prec={}", self.v(), cs.join(","), self.abs_prec())
    }
}

impl fmt::Display for LFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// The graded piece `U^k / U^{k+1}` identified with the residue field.
#[derive(Clone, Debug)]
pub struct UnitQuotient {
    field: LocalFieldDesc,
    level: i64,
}

impl UnitQuotient {
    pub(crate) fn new(field: &LocalFieldDesc, level: i64) -> Result<UnitQuotient, FieldError> {
        if level <= 0 {
            return Err(FieldError::NonPositiveLevel(level));
        }
        Ok(UnitQuotient {
            field: field.clone(),
            level,
        })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// `|U^k / U^{k+1}| = q`.
    pub fn size(&self) -> u32 {
        self.field.q()
    }

    /// `1 + a pi^k`, known modulo `p^{k+1}`.
    pub fn lift(&self, a: Fe) -> LFElem {
        let mut coeffs = vec![Fe::ZERO; self.level as usize + 1];
        coeffs[0] = Fe::ONE;
        coeffs[self.level as usize] = a;
        LFElem::new(&self.field, 0, coeffs)
    }

    /// `1 + a pi^k + ... -> a`.
    pub fn project(&self, x: &LFElem) -> Result<Fe, FieldError> {
        let not_in = FieldError::NotInUnitGroup(self.level);
        if x.abs_prec() <= self.level {
            return Err(FieldError::InsufficientPrecision {
                needed: self.level + 1,
            });
        }
        if x.coeff(0) != Some(Fe::ONE) || x.v() < 0 {
            return Err(not_in);
        }
        for n in 1..self.level {
            if x.coeff(n) != Some(Fe::ZERO) {
                return Err(not_in);
            }
        }
        x.coeff(self.level).ok_or(not_in)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_then_descend_round_trips() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let l = f.unramified(2).unwrap().tame(3, 1).unwrap();
        let x = LFElem::new(&f, -1, vec![Fe::ONE, Fe::ZERO, Fe::ONE, Fe::ONE]);
        let y = x.embed(&l).unwrap();
        assert_eq!(y.v(), -3);
        assert_eq!(y.abs_prec(), 9);
        assert_eq!(y.descend_to(&f).unwrap(), x);
    }

    #[test]
    fn base_variable_is_embedded_t() {
        let f = LocalFieldDesc::base(3, 1).unwrap();
        let l = f.tame(2, 1).unwrap().unramified(2).unwrap().tame(4, 3).unwrap();
        let t = LFElem::uniformizer(&f, 5).embed(&l).unwrap();
        assert_eq!(t, LFElem::base_variable(&l, 5 * l.e() as usize));
    }

    #[test]
    fn unit_decomposition_recovers_parts() {
        let f = LocalFieldDesc::base(3, 2).unwrap();
        let k = f.residue().clone();
        let g = k.generator();
        let x = LFElem::new(&f, -2, vec![g, Fe::ONE, Fe::ZERO]);
        let (v, z, w) = x.unit_decomposition().unwrap();
        assert_eq!((v, z), (-2, g));
        assert_eq!(w.coeffs(), &[Fe::ONE, k.inv(g).unwrap(), Fe::ZERO]);
    }
}
