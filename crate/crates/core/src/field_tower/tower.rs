//! Tower descriptors over a base `F_q((t))`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;

use super::fq::{Embedding, Fe, FqField};
use super::FieldError;

/// One step of a tower, as supplied by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Base { p: u32, f: u32 },
    Unramified { f: u32 },
    /// `pi_L^e = g_parent^unit_log * pi_parent`.
    Tame { e: u32, unit_log: u32 },
}

#[derive(Debug)]
pub(crate) struct Level {
    pub(crate) residue: Arc<FqField>,
    pub(crate) e_abs: u32,
    pub(crate) f_abs: u32,
    /// Residue embedding from the parent level (unramified steps only).
    pub(crate) embed: Option<Arc<Embedding>>,
    /// `pi^{e_abs} = abs_unit * t`.
    pub(crate) abs_unit: Fe,
    /// Coordinates of every `g^s` over the parent residue field in the basis
    /// `1, g, ..., g^{f'-1}` (unramified steps only, built on demand).
    pub(crate) coords: OnceLock<Vec<Vec<Fe>>>,
}

#[derive(Debug)]
struct Inner {
    steps: Vec<Step>,
    levels: Vec<Level>,
}

/// A field in a tame tower over `F_q((t))`; cheap to clone.
#[derive(Clone, Debug)]
pub struct LocalFieldDesc(Arc<Inner>);

impl PartialEq for LocalFieldDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.steps == other.0.steps
    }
}
impl Eq for LocalFieldDesc {}

impl fmt::Display for LocalFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .steps
            .iter()
            .map(|s| match s {
                Step::Base { p, f } => format!("F_{}^{}((t))", p, f),
                Step::Unramified { f } => format!("unr({f})"),
                Step::Tame { e, unit_log } => format!("tame({e}, g^{unit_log})"),
            })
            .collect();
        write!(f, "{}", parts.join(" / "))
    }
}

/// Builds a field from a full tower description.
pub fn make_field(spec: &[Step]) -> Result<LocalFieldDesc, FieldError> {
    let (first, rest) = spec.split_first().ok_or(FieldError::EmptyTower)?;
    let Step::Base { p, f } = *first else {
        return Err(FieldError::BaseFirst);
    };
    let mut field = LocalFieldDesc::base(p, f)?;
    for step in rest {
        field = match *step {
            Step::Base { .. } => return Err(FieldError::BaseFirst),
            Step::Unramified { f } => field.unramified(f)?,
            Step::Tame { e, unit_log } => field.tame(e, unit_log)?,
        };
    }
    Ok(field)
}

impl LocalFieldDesc {
    pub fn base(p: u32, f: u32) -> Result<LocalFieldDesc, FieldError> {
        let residue = FqField::new(p, f)?;
        Ok(LocalFieldDesc(Arc::new(Inner {
            steps: vec![Step::Base { p, f }],
            levels: vec![Level {
                residue,
                e_abs: 1,
                f_abs: f,
                embed: None,
                abs_unit: Fe::ONE,
                coords: OnceLock::new(),
            }],
        })))
    }

    fn push(&self, step: Step, level: Level) -> LocalFieldDesc {
        let mut steps = self.0.steps.clone();
        steps.push(step);
        // Rebuild the prefix levels by sharing residue data.
        let mut levels: Vec<Level> = self
            .0
            .levels
            .iter()
            .map(|l| Level {
                residue: l.residue.clone(),
                e_abs: l.e_abs,
                f_abs: l.f_abs,
                embed: l.embed.clone(),
                abs_unit: l.abs_unit,
                coords: match l.coords.get() {
                    Some(c) => {
                        let cell = OnceLock::new();
                        let _ = cell.set(c.clone());
                        cell
                    }
                    None => OnceLock::new(),
                },
            })
            .collect();
        levels.push(level);
        LocalFieldDesc(Arc::new(Inner { steps, levels }))
    }

    /// Unramified extension of relative degree `f`.
    pub fn unramified(&self, f: u32) -> Result<LocalFieldDesc, FieldError> {
        if f == 0 {
            return Err(FieldError::BadDegree(0));
        }
        let top = self.top();
        let big = FqField::new(self.p(), top.f_abs * f)?;
        let embed = Arc::new(Embedding::new(top.residue.clone(), big.clone())?);
        let abs_unit = embed.apply(top.abs_unit);
        Ok(self.push(
            Step::Unramified { f },
            Level {
                residue: big,
                e_abs: top.e_abs,
                f_abs: top.f_abs * f,
                embed: Some(embed),
                abs_unit,
                coords: OnceLock::new(),
            },
        ))
    }

    /// Tame step `pi_L^e = g^unit_log * pi`.
    pub fn tame(&self, e: u32, unit_log: u32) -> Result<LocalFieldDesc, FieldError> {
        if e == 0 {
            return Err(FieldError::BadDegree(0));
        }
        if e.gcd(&self.p()) != 1 {
            return Err(FieldError::WildStep { e, p: self.p() });
        }
        let top = self.top();
        let k = &top.residue;
        // pi_L^{e * e_abs} = (u pi)^{e_abs} = u^{e_abs} U t
        let u = k.exp(unit_log as i64);
        let abs_unit = k.mul(k.pow(u, top.e_abs as i64), top.abs_unit);
        Ok(self.push(
            Step::Tame {
                e,
                unit_log: unit_log % k.order(),
            },
            Level {
                residue: k.clone(),
                e_abs: top.e_abs * e,
                f_abs: top.f_abs,
                embed: None,
                abs_unit,
                coords: OnceLock::new(),
            },
        ))
    }

    pub(crate) fn top(&self) -> &Level {
        self.0.levels.last().expect("tower is nonempty")
    }

    pub(crate) fn level(&self, i: usize) -> &Level {
        &self.0.levels[i]
    }

    pub fn steps(&self) -> &[Step] {
        &self.0.steps
    }

    /// Number of steps including the base.
    pub fn depth(&self) -> usize {
        self.0.steps.len()
    }

    pub fn p(&self) -> u32 {
        self.0.levels[0].residue.p()
    }

    /// Absolute ramification index over the base.
    pub fn e(&self) -> u32 {
        self.top().e_abs
    }

    /// Absolute residue degree over the prime field.
    pub fn f(&self) -> u32 {
        self.top().f_abs
    }

    /// Residue degree over the base.
    pub fn f_over_base(&self) -> u32 {
        self.top().f_abs / self.0.levels[0].f_abs
    }

    pub fn q(&self) -> u32 {
        self.top().residue.q()
    }

    pub fn residue(&self) -> &Arc<FqField> {
        &self.top().residue
    }

    /// The unit `U` with `pi^e = U t`.
    pub fn abs_unit(&self) -> Fe {
        self.top().abs_unit
    }

    pub fn kind(&self) -> Step {
        *self.0.steps.last().expect("tower is nonempty")
    }

    pub fn parent(&self) -> Option<LocalFieldDesc> {
        self.prefix(self.depth().checked_sub(1)?)
    }

    /// The ancestor with `len` steps.
    pub fn prefix(&self, len: usize) -> Option<LocalFieldDesc> {
        if len == 0 || len > self.depth() {
            return None;
        }
        if len == self.depth() {
            return Some(self.clone());
        }
        let mut f = LocalFieldDesc::base(self.p(), self.0.levels[0].f_abs).ok()?;
        for s in &self.0.steps[1..len] {
            f = match *s {
                Step::Unramified { f: d } => f.unramified(d).ok()?,
                Step::Tame { e, unit_log } => f.tame(e, unit_log).ok()?,
                Step::Base { .. } => return None,
            };
        }
        Some(f)
    }

    pub fn base_field(&self) -> LocalFieldDesc {
        self.prefix(1).expect("base exists")
    }

    pub fn is_ancestor_of(&self, other: &LocalFieldDesc) -> bool {
        self.depth() <= other.depth() && other.0.steps[..self.depth()] == self.0.steps[..]
    }

    /// `(e(L|K), f(L|K))` for an ancestor `K`.
    pub fn relative_degrees(&self, k: &LocalFieldDesc) -> Result<(u32, u32), FieldError> {
        if !k.is_ancestor_of(self) {
            return Err(FieldError::NotAncestor);
        }
        Ok((self.e() / k.e(), self.f() / k.f()))
    }

    /// Residue constants in `mu` (the Teichmuller lifts) as field elements.
    pub fn teichmuller(&self, a: Fe) -> super::LFElem {
        super::LFElem::constant(self, a, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagship_tower_degrees() {
        let t = LocalFieldDesc::base(2, 1)
            .unwrap()
            .unramified(2)
            .unwrap()
            .tame(3, 0)
            .unwrap();
        assert_eq!((t.e(), t.f(), t.q()), (3, 2, 4));
    }

    #[test]
    fn wild_step_is_refused() {
        let err = LocalFieldDesc::base(2, 1).unwrap().tame(2, 0).unwrap_err();
        assert!(err.to_string().contains("wild step requested"));
    }

    #[test]
    fn identical_specs_give_equal_descriptors() {
        let spec = [
            Step::Base { p: 3, f: 1 },
            Step::Unramified { f: 2 },
            Step::Tame { e: 4, unit_log: 1 },
        ];
        let a = make_field(&spec).unwrap();
        let b = make_field(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.abs_unit(), b.abs_unit());
        assert_eq!(a.prefix(2).unwrap(), a.parent().unwrap());
        assert!(a.prefix(2).unwrap().is_ancestor_of(&a));
        assert_eq!(a.relative_degrees(&a.base_field()).unwrap(), (4, 2));
    }
}
