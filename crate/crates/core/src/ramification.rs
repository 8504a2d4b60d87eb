//! Lower-numbering filtrations, Herbrand functions, differents and Swan
//! conductors of induced representations.

use num_rational::Ratio;
use thiserror::Error;

pub type Rat = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamError {
    #[error("not a filtration: {0}")]
    NotAFiltration(String),
    #[error("invalid induction data: {0}")]
    BadInduction(String),
    #[error("negative Artin exponent {0}")]
    NegativeExponent(i64),
    #[error("argument {0} is outside the domain [0, oo)")]
    OutOfDomain(Rat),
}

/// `(i, |G_i|)` pairs: `G_j` has the order of the last break with `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamFiltration {
    breaks: Vec<(u32, u64)>,
}

impl RamFiltration {
    pub fn new(breaks: Vec<(u32, u64)>) -> Result<RamFiltration, RamError> {
        let bad = |m: String| Err(RamError::NotAFiltration(m));
        match breaks.first() {
            None => return bad("no breaks".into()),
            Some(&(0, _)) => {}
            Some(&(i, _)) => return bad(format!("first index is {i}, not 0")),
        }
        for w in breaks.windows(2) {
            let ((i0, o0), (i1, o1)) = (w[0], w[1]);
            if i1 <= i0 {
                return bad(format!("indices {i0}, {i1} are not increasing"));
            }
            if o1 > o0 {
                return bad(format!("order increases from {o0} to {o1} at i = {i1}"));
            }
        }
        if breaks.iter().any(|&(_, o)| o == 0) {
            return bad("zero group order".into());
        }
        if breaks.last().map(|b| b.1) != Some(1) {
            return bad("orders must end at 1".into());
        }
        Ok(RamFiltration { breaks })
    }

    pub fn breaks(&self) -> &[(u32, u64)] {
        &self.breaks
    }

    /// `|G_i|` for an integer index.
    pub fn order_at(&self, i: u32) -> u64 {
        self.breaks
            .iter()
            .take_while(|b| b.0 <= i)
            .last()
            .map(|b| b.1)
            .expect("first break is at 0")
    }

    /// Index past which every group is trivial.
    fn support_end(&self) -> u32 {
        self.breaks.last().expect("nonempty").0
    }

    /// The filtration of `L/F` when `L/K` carries `self` and `K/F` is tame of
    /// degree `e`: only `G_0` grows, since `G_1` is the `p`-part.
    pub fn under_tame(&self, e: u64) -> Result<RamFiltration, RamError> {
        let mut breaks = vec![(0, self.order_at(0) * e)];
        for (i, o) in std::iter::once((1, self.order_at(1))).chain(
            self.breaks.iter().copied().filter(|b| b.0 >= 2),
        ) {
            if breaks.last().map(|b| b.1) != Some(o) {
                breaks.push((i, o));
            }
        }
        RamFiltration::new(breaks)
    }
}

/// A continuous piecewise-linear function on `[0, oo)` with `f(0) = 0`.
///
/// `pieces[k] = (x_k, s_k)`: slope `s_k` on `[x_k, x_{k+1})`, with `x_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    pieces: Vec<(Rat, Rat)>,
}

impl PLFunction {
    pub fn identity() -> PLFunction {
        PLFunction {
            pieces: vec![(Rat::from(0), Rat::from(1))],
        }
    }

    fn from_pieces(raw: Vec<(Rat, Rat)>) -> PLFunction {
        let mut pieces: Vec<(Rat, Rat)> = Vec::with_capacity(raw.len());
        for (x, s) in raw {
            match pieces.last() {
                Some(&(_, prev)) if prev == s => {}
                _ => pieces.push((x, s)),
            }
        }
        PLFunction { pieces }
    }

    pub fn pieces(&self) -> &[(Rat, Rat)] {
        &self.pieces
    }

    pub fn eval(&self, x: Rat) -> Result<Rat, RamError> {
        if x < Rat::from(0) {
            return Err(RamError::OutOfDomain(x));
        }
        let mut acc = Rat::from(0);
        for (k, &(start, slope)) in self.pieces.iter().enumerate() {
            let end = self.pieces.get(k + 1).map(|p| p.0);
            match end {
                Some(end) if x > end => acc += slope * (end - start),
                _ => return Ok(acc + slope * (x - start)),
            }
        }
        unreachable!("last piece is unbounded")
    }

    pub fn inverse(&self) -> PLFunction {
        let mut raw = Vec::with_capacity(self.pieces.len());
        for &(start, slope) in &self.pieces {
            let y = self.eval(start).expect("breakpoints are in the domain");
            raw.push((y, Rat::from(1) / slope));
        }
        PLFunction::from_pieces(raw)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerbrandData {
    pub phi: PLFunction,
    pub psi: PLFunction,
    /// Different exponent `sum_{i >= 0} (|G_i| - 1)`.
    pub d: i64,
}

/// Herbrand `phi`, its inverse `psi`, and the different exponent.
pub fn herbrand_and_different(filt: &RamFiltration) -> HerbrandData {
    let g0 = filt.order_at(0) as i64;
    let end = filt.support_end();
    let mut d = 0i64;
    let mut raw = Vec::new();
    // slope on (i-1, i] is |G_i| / |G_0|
    for i in 1..=end.max(1) {
        raw.push((Rat::from(i as i64 - 1), Rat::new(filt.order_at(i) as i64, g0)));
    }
    raw.push((Rat::from(end.max(1) as i64), Rat::new(1, g0)));
    for i in 0..end {
        d += filt.order_at(i) as i64 - 1;
    }
    let phi = PLFunction::from_pieces(raw);
    let psi = phi.inverse();
    HerbrandData { phi, psi, d }
}

/// Data for the Swan conductor of a representation induced from `E/F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InductionData {
    pub sw_tau: i64,
    pub m: i64,
    pub e: i64,
    pub f: i64,
    pub d: i64,
}

/// `(sw(tau) + m (1 - e + d)) f`.
pub fn swan_induce(data: InductionData) -> Result<i64, RamError> {
    let InductionData { sw_tau, m, e, f, d } = data;
    let bad = |s: &str| Err(RamError::BadInduction(s.to_string()));
    if e < 1 || f < 1 || m < 1 {
        return bad("e, f and m must be positive");
    }
    if d < e - 1 {
        return bad("different exponent below e - 1");
    }
    if sw_tau < 0 {
        return bad("negative Swan conductor");
    }
    Ok((sw_tau + m * (1 - e + d)) * f)
}

/// Sum of Artin exponents over the characters of an abelian quotient.
pub fn conductor_discriminant(artin_exponents: &[i64]) -> Result<i64, RamError> {
    if let Some(&bad) = artin_exponents.iter().find(|&&a| a < 0) {
        return Err(RamError::NegativeExponent(bad));
    }
    Ok(artin_exponents.iter().sum())
}

/// `d(L|F) = d(L|K) + e(L|K) d(K|F)`.
pub fn different_in_tower(d_upper: i64, e_upper: i64, d_lower: i64) -> i64 {
    d_upper + e_upper * d_lower
}

/// Level of the transported additive character, `d + e c`.
pub fn transported_level(d: i64, e: i64, level: i64) -> i64 {
    d + e * level
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64) -> Rat {
        Rat::from(a)
    }

    #[test]
    fn wild_break_at_one() {
        let f = RamFiltration::new(vec![(0, 3), (1, 3), (2, 1)]).unwrap();
        let h = herbrand_and_different(&f);
        assert_eq!(h.d, 4);
        assert_eq!(h.psi.eval(r(2)).unwrap(), r(4));
        assert_eq!(h.phi.eval(r(4)).unwrap(), r(2));
        assert_eq!(h.phi.eval(r(1)).unwrap(), r(1));
    }

    #[test]
    fn tame_and_trivial() {
        let tame = RamFiltration::new(vec![(0, 5), (1, 1)]).unwrap();
        let h = herbrand_and_different(&tame);
        assert_eq!(h.d, 4);
        assert_eq!(h.phi.eval(r(10)).unwrap(), r(2));
        let triv = herbrand_and_different(&RamFiltration::new(vec![(0, 1)]).unwrap());
        assert_eq!(triv.d, 0);
        assert_eq!(triv.phi, PLFunction::identity());
        assert_eq!(triv.psi, PLFunction::identity());
    }

    #[test]
    fn increasing_orders_rejected() {
        let err = RamFiltration::new(vec![(0, 2), (1, 4), (2, 1)]).unwrap_err();
        assert!(err.to_string().starts_with("not a filtration"));
    }

    #[test]
    fn under_tame_matches_transitivity() {
        let wild = RamFiltration::new(vec![(0, 4), (1, 4), (2, 1)]).unwrap();
        let both = wild.under_tame(3).unwrap();
        assert_eq!(both.breaks(), &[(0, 12), (1, 4), (2, 1)]);
        let d_big = herbrand_and_different(&both).d;
        let d_wild = herbrand_and_different(&wild).d;
        assert_eq!(d_big, different_in_tower(d_wild, 4, 2));
        let tame = RamFiltration::new(vec![(0, 1)]).unwrap().under_tame(3).unwrap();
        assert_eq!(tame.breaks(), &[(0, 3), (1, 1)]);
    }

    #[test]
    fn induction_examples() {
        let run = |sw_tau, m, e, d, f| swan_induce(InductionData { sw_tau, m, e, f, d }).unwrap();
        assert_eq!(run(1, 1, 1, 0, 2), 2);
        assert_eq!(run(3, 1, 4, 6, 1), 6);
        assert_eq!(run(1, 1, 1, 0, 1), 1);
        assert!(swan_induce(InductionData { sw_tau: 1, m: 1, e: 3, f: 1, d: 0 }).is_err());
    }

    #[test]
    fn discriminant_sums() {
        assert_eq!(conductor_discriminant(&[0, 2, 2, 2]).unwrap(), 6);
        assert_eq!(conductor_discriminant(&[0, 0]).unwrap(), 0);
        assert!(conductor_discriminant(&[0, -1]).is_err());
    }
}
