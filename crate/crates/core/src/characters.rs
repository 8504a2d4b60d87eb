//! Characters with values in `Q/Z`: the standard additive character and
//! multiplicative characters of level at most one, plus norm pullbacks.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use crate::field_tower::{norm_trace, Fe, FieldError, LFElem, LocalFieldDesc};
use crate::ramification::transported_level;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("wild coefficient at level {i} must have valuation -{i}, got {got:?}")]
    WrongValuation { i: i64, got: Option<i64> },
    #[error("direct wild data above level 1 is not supported (level {0})")]
    UnsupportedLevel(i64),
    #[error("character is wildly ramified")]
    Wild,
    #[error("characters live on different fields")]
    FieldMismatch,
    #[error("operation needs directly stored data, not a pullback")]
    NotDirect,
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("cannot evaluate a character at zero")]
    Zero,
}

/// An exact element of `Q/Z`, stored reduced in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodZ(Ratio<i64>);

impl QmodZ {
    pub const ZERO: QmodZ = QmodZ(Ratio::new_raw(0, 1));

    pub fn new(num: i64, den: i64) -> QmodZ {
        QmodZ::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(r: Ratio<i64>) -> QmodZ {
        let fl = r.floor();
        QmodZ(r - fl)
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn is_zero(self) -> bool {
        *self.0.numer() == 0
    }

    pub fn add(self, o: QmodZ) -> QmodZ {
        QmodZ::from_ratio(self.0 + o.0)
    }

    pub fn neg(self) -> QmodZ {
        QmodZ::from_ratio(-self.0)
    }

    pub fn sub(self, o: QmodZ) -> QmodZ {
        self.add(o.neg())
    }

    pub fn times(self, n: i64) -> QmodZ {
        QmodZ::from_ratio(self.0 * n)
    }

    /// Additive order.
    pub fn order(self) -> i64 {
        *self.0.denom()
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for QmodZ {
    type Err = CharError;

    fn from_str(s: &str) -> Result<QmodZ, CharError> {
        let err = || CharError::ParseRational(s.to_string());
        let (a, b) = s.split_once('/').ok_or_else(err)?;
        let a: i64 = a.trim().parse().map_err(|_| err())?;
        let b: i64 = b.trim().parse().map_err(|_| err())?;
        if b <= 0 {
            return Err(err());
        }
        Ok(QmodZ::new(a, b))
    }
}

/// `psi_K = psi_F o Tr_{K/F}` with `psi_F(x) = Tr_{k_F/F_p}(x_0) / p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddChar {
    field: LocalFieldDesc,
    level: i64,
}

/// The standard additive character of `k`; its level is transported from the
/// base by `d + e c` with `d = e - 1` for a tame tower.
pub fn standard_addchar(k: &LocalFieldDesc) -> AddChar {
    let e = k.e() as i64;
    AddChar {
        field: k.clone(),
        level: transported_level(e - 1, e, -1),
    }
}

impl AddChar {
    pub fn field(&self) -> &LocalFieldDesc {
        &self.field
    }

    /// `c(psi)`: minus the least `m` with `psi` trivial on `p^m`.
    pub fn level(&self) -> i64 {
        self.level
    }

    /// Value on a residue constant.
    pub fn on_constant(&self, a: Fe) -> QmodZ {
        let k = self.field.residue();
        let ea = k.mul(k.from_int(self.field.e() as i64), a);
        QmodZ::new(k.abs_trace(ea) as i64, k.p() as i64)
    }

    /// Evaluates through the constant coefficient; traces of other powers of
    /// `pi` have no constant term in a tame tower.
    pub fn eval(&self, x: &LFElem) -> Result<QmodZ, CharError> {
        if x.field() != &self.field {
            return Err(CharError::FieldMismatch);
        }
        let a = x
            .coeff(0)
            .ok_or(FieldError::InsufficientPrecision { needed: 1 })?;
        Ok(self.on_constant(a))
    }

    /// Same value, computed through an explicit trace down to the base.
    pub fn eval_via_trace(&self, x: &LFElem) -> Result<QmodZ, CharError> {
        let base = self.field.base_field();
        let (_, tr) = norm_trace(x, &base, 1)?;
        let kf = base.residue();
        let a = tr.coeff(0).unwrap_or(Fe::ZERO);
        Ok(QmodZ::new(kf.abs_trace(a) as i64, kf.p() as i64))
    }

    /// Level found by scanning `psi(a pi^j)` over an `F_p`-basis of the
    /// residue field, for `|j| <= window`.
    pub fn level_by_scan(&self, window: i64) -> Result<i64, CharError> {
        let k = self.field.residue();
        let mut least_trivial = window + 1;
        for j in (-window..=window).rev() {
            let nontrivial = k.prime_basis().into_iter().any(|a| {
                let x = LFElem::monomial(&self.field, a, j, (window - j + 2) as usize);
                self.eval(&x).map(|v| !v.is_zero()).unwrap_or(true)
            });
            if nontrivial {
                break;
            }
            least_trivial = j;
        }
        Ok(-least_trivial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Direct {
        on_pi: QmodZ,
        /// `chi(g) = on_mu / (q - 1)`.
        on_mu: i64,
        /// Leading coefficient of `c` with `nu(c) = -1`.
        wild: Option<Fe>,
    },
    Pullback(Box<MultChar>),
}

/// A multiplicative character of `K^x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultChar {
    field: LocalFieldDesc,
    kind: Kind,
    sw: i64,
}

/// Builds a character from its values on `pi`, on `mu_K`, and on `U^1/U^2`.
pub fn build_multchar(
    k: &LocalFieldDesc,
    on_uniformizer: QmodZ,
    on_mu: i64,
    wild_coeffs: &[(i64, LFElem)],
) -> Result<MultChar, CharError> {
    let mut wild = None;
    for (i, c) in wild_coeffs {
        if c.field() != k {
            return Err(CharError::FieldMismatch);
        }
        if *i != 1 {
            return Err(CharError::UnsupportedLevel(*i));
        }
        match c.leading() {
            Some((-1, a)) => wild = Some(a),
            Some((v, _)) => {
                return Err(CharError::WrongValuation {
                    i: *i,
                    got: Some(v),
                })
            }
            None => return Err(CharError::WrongValuation { i: *i, got: None }),
        }
    }
    let order = k.residue().order() as i64;
    let mut chi = MultChar {
        field: k.clone(),
        kind: Kind::Direct {
            on_pi: on_uniformizer,
            on_mu: on_mu.rem_euclid(order),
            wild,
        },
        sw: 0,
    };
    chi.sw = chi.sw_by_search()?;
    Ok(chi)
}

/// `chi o N_{L/K}` for `L` above the field of `chi` in the same tower.
pub fn pullback_norm(chi: &MultChar, l: &LocalFieldDesc) -> Result<MultChar, CharError> {
    if !chi.field.is_ancestor_of(l) {
        return Err(FieldError::NotAncestor.into());
    }
    if chi.field == *l {
        return Ok(chi.clone());
    }
    let mut out = MultChar {
        field: l.clone(),
        kind: Kind::Pullback(Box::new(chi.clone())),
        sw: 0,
    };
    out.sw = out.sw_by_search()?;
    Ok(out)
}

impl MultChar {
    pub fn trivial(k: &LocalFieldDesc) -> MultChar {
        MultChar {
            field: k.clone(),
            kind: Kind::Direct {
                on_pi: QmodZ::ZERO,
                on_mu: 0,
                wild: None,
            },
            sw: 0,
        }
    }

    /// Unramified character with `chi(pi) = value`.
    pub fn unramified(k: &LocalFieldDesc, value: QmodZ) -> MultChar {
        let mut chi = MultChar::trivial(k);
        chi.kind = Kind::Direct {
            on_pi: value,
            on_mu: 0,
            wild: None,
        };
        chi
    }

    pub fn field(&self) -> &LocalFieldDesc {
        &self.field
    }

    pub fn sw(&self) -> i64 {
        self.sw
    }

    /// Artin exponent: `sw + 1` when ramified, else 0.
    pub fn artin(&self) -> Result<i64, CharError> {
        if self.sw > 0 || !self.on_mu_value(self.field.residue().generator())?.is_zero() {
            Ok(self.sw + 1)
        } else {
            Ok(0)
        }
    }

    pub fn is_tame(&self) -> bool {
        self.sw == 0
    }

    /// Stored data `(onPi, onMu, wild)` of a direct character.
    pub fn direct_data(&self) -> Option<(QmodZ, i64, Option<Fe>)> {
        match &self.kind {
            Kind::Direct { on_pi, on_mu, wild } => Some((*on_pi, *on_mu, *wild)),
            Kind::Pullback(_) => None,
        }
    }

    pub fn pullback_base(&self) -> Option<&MultChar> {
        match &self.kind {
            Kind::Pullback(b) => Some(b),
            Kind::Direct { .. } => None,
        }
    }

    pub fn eval(&self, x: &LFElem) -> Result<QmodZ, CharError> {
        if x.field() != &self.field {
            return Err(CharError::FieldMismatch);
        }
        if x.is_zero() {
            return Err(CharError::Zero);
        }
        match &self.kind {
            Kind::Direct { on_pi, on_mu, wild } => {
                let k = self.field.residue();
                let (v, zeta, w) = x.unit_decomposition()?;
                let mut out = on_pi.times(v).add(self.mu_value(*on_mu, zeta));
                if let Some(c) = wild {
                    let y1 = w
                        .coeff(1)
                        .ok_or(FieldError::InsufficientPrecision { needed: v + 2 })?;
                    out = out.add(standard_addchar(&self.field).on_constant(k.mul(*c, y1)));
                }
                Ok(out)
            }
            Kind::Pullback(base) => {
                let (v, zeta, w) = x.unit_decomposition()?;
                let kf = base.field();
                let (e, f) = self.field.relative_degrees(kf)?;
                let (e, f) = (e as i64, f as i64);
                let need = base.level_bound() + 1;
                let pi = LFElem::uniformizer(&self.field, (e * (f + need + 2)) as usize);
                let (n_pi, _) = norm_trace(&pi, kf, f + need)?;
                let zeta = LFElem::constant(&self.field, zeta, e * (need + 2));
                let (n_zeta, _) = norm_trace(&zeta, kf, need)?;
                let (n_w, _) = norm_trace(&w, kf, need)?;
                Ok(base
                    .eval(&n_pi)?
                    .times(v)
                    .add(base.eval(&n_zeta)?)
                    .add(base.eval(&n_w)?))
            }
        }
    }

    fn mu_value(&self, on_mu: i64, zeta: Fe) -> QmodZ {
        let k = self.field.residue();
        let lg = k.log(zeta).expect("nonzero") as i64;
        QmodZ::new(on_mu * lg, k.order() as i64)
    }

    /// Value on a Teichmuller constant.
    pub fn on_mu_value(&self, zeta: Fe) -> Result<QmodZ, CharError> {
        self.eval(&LFElem::constant(&self.field, zeta, self.test_precision()))
    }

    pub fn on_pi_value(&self) -> Result<QmodZ, CharError> {
        let rel = self.test_precision() as usize;
        self.eval(&LFElem::uniformizer(&self.field, rel))
    }

    /// Upper bound on the level, from the tower data.
    fn level_bound(&self) -> i64 {
        match &self.kind {
            Kind::Direct { wild, .. } => i64::from(wild.is_some()),
            Kind::Pullback(b) => {
                let e = self.field.relative_degrees(b.field()).map(|x| x.0).unwrap_or(1);
                b.level_bound() * e as i64
            }
        }
    }

    /// Product of the relative ramification indices down the pullback chain.
    fn e_chain(&self) -> i64 {
        match &self.kind {
            Kind::Direct { .. } => 1,
            Kind::Pullback(b) => {
                let e = self.field.relative_degrees(b.field()).map(|x| x.0).unwrap_or(1);
                e as i64 * b.e_chain()
            }
        }
    }

    /// Absolute precision carried by test units, enough for every norm taken
    /// during evaluation.
    fn test_precision(&self) -> i64 {
        self.level_bound() + 2 * self.e_chain() + 2
    }

    /// `1 + a pi^i` over an `F_p`-basis of the residue field.
    fn unit_generators(&self, i: i64) -> Vec<LFElem> {
        let k = self.field.residue();
        let top = self.test_precision().max(i + 2);
        k.prime_basis()
            .into_iter()
            .map(|a| {
                let mut cs = vec![Fe::ZERO; top as usize];
                cs[0] = Fe::ONE;
                cs[i as usize] = k.add(cs[i as usize], a);
                LFElem::new(&self.field, 0, cs)
            })
            .collect()
    }

    fn sw_by_search(&self) -> Result<i64, CharError> {
        for i in (1..=self.level_bound()).rev() {
            for x in self.unit_generators(i) {
                if !self.eval(&x)?.is_zero() {
                    return Ok(i);
                }
            }
        }
        Ok(0)
    }

    /// Triviality on the generators `pi`, `g` and `1 + a pi^i`.
    pub fn is_trivial(&self) -> Result<bool, CharError> {
        if !self.on_pi_value()?.is_zero() {
            return Ok(false);
        }
        if !self.on_mu_value(self.field.residue().generator())?.is_zero() {
            return Ok(false);
        }
        Ok(self.sw == 0)
    }

    /// Equality as characters, tested on generators.
    pub fn same_character(&self, other: &MultChar) -> Result<bool, CharError> {
        if self.field != other.field {
            return Err(CharError::FieldMismatch);
        }
        let g = self.field.residue().generator();
        if self.on_pi_value()? != other.on_pi_value()?
            || self.on_mu_value(g)? != other.on_mu_value(g)?
        {
            return Ok(false);
        }
        let top = self.level_bound().max(other.level_bound());
        for i in 1..=top {
            for x in self.unit_generators(i.max(1)) {
                if self.eval(&x)? != other.eval(&x)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Product of two directly stored characters.
    pub fn mul(&self, other: &MultChar) -> Result<MultChar, CharError> {
        if self.field != other.field {
            return Err(CharError::FieldMismatch);
        }
        let (p1, m1, w1) = self.direct_data().ok_or(CharError::NotDirect)?;
        let (p2, m2, w2) = other.direct_data().ok_or(CharError::NotDirect)?;
        let k = self.field.residue();
        let wild = match k.add(w1.unwrap_or(Fe::ZERO), w2.unwrap_or(Fe::ZERO)) {
            a if a.is_zero() => vec![],
            a => vec![(1, LFElem::monomial(&self.field, a, -1, 1))],
        };
        build_multchar(&self.field, p1.add(p2), m1 + m2, &wild)
    }

    pub fn pow(&self, n: i64) -> Result<MultChar, CharError> {
        let (p1, m1, w1) = self.direct_data().ok_or(CharError::NotDirect)?;
        let k = self.field.residue();
        let wild = match w1 {
            Some(a) => {
                let na = k.mul(k.from_int(n), a);
                if na.is_zero() {
                    vec![]
                } else {
                    vec![(1, LFElem::monomial(&self.field, na, -1, 1))]
                }
            }
            None => vec![],
        };
        build_multchar(&self.field, p1.times(n), m1 * n, &wild)
    }

    /// Exponent `gcd`-reduced order of the tame part on `mu_K`.
    pub fn mu_order(&self) -> Option<i64> {
        let (_, m, _) = self.direct_data()?;
        let order = self.field.residue().order() as i64;
        Some(order / m.gcd(&order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qmodz_canonical_forms() {
        assert_eq!(QmodZ::new(3, 2).to_string(), "1/2");
        assert_eq!(QmodZ::new(-1, 3).to_string(), "2/3");
        assert_eq!(QmodZ::new(4, 2).to_string(), "0/1");
        assert_eq!("5/10".parse::<QmodZ>().unwrap(), QmodZ::new(1, 2));
        assert!("1/0".parse::<QmodZ>().is_err());
    }

    #[test]
    fn base_character_values() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let psi = standard_addchar(&f);
        assert_eq!(psi.eval(&LFElem::one(&f, 3)).unwrap(), QmodZ::new(1, 2));
        assert_eq!(psi.eval(&LFElem::uniformizer(&f, 3)).unwrap(), QmodZ::ZERO);
        assert_eq!(psi.level(), -1);
        assert_eq!(psi.level_by_scan(4).unwrap(), -1);
    }

    #[test]
    fn level_one_character() {
        let f = LocalFieldDesc::base(3, 1).unwrap();
        let c = LFElem::monomial(&f, Fe::ONE, -1, 1);
        let chi = build_multchar(&f, QmodZ::ZERO, 0, &[(1, c)]).unwrap();
        assert_eq!(chi.sw(), 1);
        assert_eq!(chi.artin().unwrap(), 2);
        let bad = LFElem::monomial(&f, Fe::ONE, -2, 1);
        assert!(build_multchar(&f, QmodZ::ZERO, 0, &[(1, bad)]).is_err());
    }

    #[test]
    fn tame_pullback_is_nontrivial() {
        let f = LocalFieldDesc::base(3, 1).unwrap();
        let chi = build_multchar(&f, QmodZ::ZERO, 1, &[]).unwrap();
        assert_eq!(chi.sw(), 0);
        let l = f.tame(2, 0).unwrap();
        let pulled = pullback_norm(&chi, &l).unwrap();
        assert!(!pulled.is_trivial().unwrap());
    }
}
