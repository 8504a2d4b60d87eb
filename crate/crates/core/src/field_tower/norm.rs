//! Norms and traces down a tower, via the regular representation of each step.

use std::sync::Arc;

use super::elem::{LFElem, UnitQuotient};
use super::fq::{Fe, FqField};
use super::series::Series;
use super::tower::{LocalFieldDesc, Step};
use super::FieldError;

/// Determinant of a square matrix of series by pivoted elimination.
///
/// Returns `None` when some column has no entry known to be nonzero, i.e. the
/// input precision cannot decide the determinant.
pub fn series_det(k: &Arc<FqField>, mut m: Vec<Vec<Series>>) -> Option<Series> {
    let n = m.len();
    let mut det: Option<Series> = None;
    let mut negate = false;
    for col in 0..n {
        let pivot = (col..n)
            .filter_map(|r| m[r][col].valuation().map(|v| (v, r)))
            .min()?
            .1;
        if pivot != col {
            m.swap(pivot, col);
            negate = !negate;
        }
        let piv = m[col][col].clone();
        let piv_inv = piv.inv()?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul(&piv_inv);
            for c in col..n {
                let t = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&t);
            }
        }
        det = Some(match det {
            None => piv,
            Some(d) => d.mul(&piv),
        });
    }
    let det = det.unwrap_or_else(|| Series::constant(k.clone(), Fe::ONE, 1));
    Some(if negate { det.neg() } else { det })
}

/// Coordinates of `g_L^s` over the parent residue field for an unramified step.
fn unramified_coords(field: &LocalFieldDesc) -> &Vec<Vec<Fe>> {
    let level = field.top();
    level.coords.get_or_init(|| {
        let emb = level.embed.as_ref().expect("unramified level");
        let big = &emb.big;
        let small = &emb.small;
        let deg = (big.f() / small.f()) as usize;
        let qk = small.q() as i64;
        // minimal polynomial of g over k_K: prod (X - g^{q_K^j}), low degree first
        let mut poly = vec![Fe::ONE];
        let mut root = big.generator();
        for _ in 0..deg {
            let mut next = vec![Fe::ZERO; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] = big.add(next[i + 1], c);
                next[i] = big.sub(next[i], big.mul(c, root));
            }
            poly = next;
            root = big.pow(root, qk);
        }
        let mut cur = vec![Fe::ZERO; deg];
        cur[0] = Fe::ONE;
        let mut out = Vec::with_capacity(big.order() as usize);
        for _ in 0..big.order() {
            out.push(
                cur.iter()
                    .map(|&c| emb.preimage(c).expect("coefficient lies in the subfield"))
                    .collect(),
            );
            // multiply by X and reduce by the monic poly
            let top = cur[deg - 1];
            for i in (1..deg).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = Fe::ZERO;
            for i in 0..deg {
                cur[i] = big.sub(cur[i], big.mul(top, poly[i]));
            }
        }
        out
    })
}

/// Matrix of multiplication by `x` over the parent field of `x.field()`.
fn regular_matrix(x: &LFElem) -> Vec<Vec<Series>> {
    let field = x.field();
    let parent = field.parent().expect("not the base");
    let kk = parent.residue().clone();
    match field.kind() {
        Step::Tame { e, unit_log } => {
            let e = e as i64;
            let u = kk.exp(unit_log as i64);
            let (v, a) = (x.v(), x.abs_prec());
            let mut m = vec![Vec::with_capacity(e as usize); e as usize];
            for (r, row) in m.iter_mut().enumerate() {
                let r = r as i64;
                for j in 0..e {
                    // entry (r, j): coefficients of pi_K^Q with n + j = eQ + r
                    let lo = (v + j - r).div_euclid(e);
                    let hi = (a + j - r + e - 1).div_euclid(e);
                    let coeffs: Vec<Fe> = (lo..hi)
                        .map(|qq| {
                            let n = e * qq + r - j;
                            let c = x.coeff(n).unwrap_or(Fe::ZERO);
                            kk.mul(c, kk.pow(u, qq))
                        })
                        .collect();
                    row.push(if coeffs.is_empty() {
                        Series::zero(kk.clone(), hi)
                    } else {
                        Series::new(kk.clone(), lo, coeffs)
                    });
                }
            }
            m
        }
        Step::Unramified { f } => {
            let d = f as usize;
            let coords = unramified_coords(field);
            let big = field.residue();
            let order = big.order() as usize;
            let (v, a) = (x.v(), x.abs_prec());
            let mut m = vec![vec![Vec::<Fe>::new(); d]; d];
            for n in v..a {
                let c = x.coeff(n).unwrap_or(Fe::ZERO);
                for col in 0..d {
                    for (i, row) in m.iter_mut().enumerate() {
                        let val = match big.log(c) {
                            None => Fe::ZERO,
                            Some(l) => coords[(l as usize + col) % order][i],
                        };
                        row[col].push(val);
                    }
                }
            }
            m.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|cs| {
                            if cs.is_empty() {
                                Series::zero(kk.clone(), a)
                            } else {
                                Series::new(kk.clone(), v, cs)
                            }
                        })
                        .collect()
                })
                .collect()
        }
        Step::Base { .. } => unreachable!("checked above"),
    }
}

fn step_trace(x: &LFElem) -> Result<LFElem, FieldError> {
    let parent = x.field().parent().ok_or(FieldError::NotAncestor)?;
    let kk = parent.residue().clone();
    let m = regular_matrix(x);
    let mut trace = Series::zero(kk, i64::MAX / 4);
    for (i, row) in m.iter().enumerate() {
        trace = trace.add(&row[i]);
    }
    Ok(LFElem::from_series(&parent, trace))
}

fn step_norm(x: &LFElem) -> Result<LFElem, FieldError> {
    let parent = x.field().parent().ok_or(FieldError::NotAncestor)?;
    let kk = parent.residue().clone();
    let norm = if x.is_zero() {
        let (e, f) = x.field().relative_degrees(&parent)?;
        Series::zero(kk, (x.abs_prec() * f as i64).div_euclid(e as i64))
    } else {
        series_det(&kk, regular_matrix(x)).ok_or(FieldError::InsufficientPrecision {
            needed: x.abs_prec() + 1,
        })?
    };
    Ok(LFElem::from_series(&parent, norm))
}

fn down_to(x: &LFElem, k: &LocalFieldDesc) -> Result<(LFElem, LFElem), FieldError> {
    if !k.is_ancestor_of(x.field()) {
        return Err(FieldError::NotAncestor);
    }
    let mut nx = x.clone();
    let mut tx = x.clone();
    while nx.field().depth() > k.depth() {
        nx = step_norm(&nx)?;
        tx = step_trace(&tx)?;
    }
    Ok((nx, tx))
}

/// Norm and trace of `x` from its field down to the ancestor `k`, both known
/// modulo `p_K^out_abs_prec`.
///
/// Fails with the input precision that would be needed when either output
/// falls short.
pub fn norm_trace(
    x: &LFElem,
    k: &LocalFieldDesc,
    out_abs_prec: i64,
) -> Result<(LFElem, LFElem), FieldError> {
    let (e, _) = x.field().relative_degrees(k)?;
    let shortfall = |got: i64| FieldError::InsufficientPrecision {
        needed: x.abs_prec() + e as i64 * (out_abs_prec - got).max(1),
    };
    let (nx, tx) = down_to(x, k).map_err(|err| match err {
        FieldError::InsufficientPrecision { .. } => shortfall(x.abs_prec() / e as i64),
        other => other,
    })?;
    let got = nx.abs_prec().min(tx.abs_prec());
    if got < out_abs_prec {
        return Err(shortfall(got));
    }
    Ok((nx.truncate(out_abs_prec), tx.truncate(out_abs_prec)))
}

/// Norm and trace by explicit conjugates, available when `x.field() / k` is a
/// tower of cyclic steps visible in the model: unramified steps, and tame
/// steps whose degree-`e` roots of unity already lie in the parent.
///
/// Returns `None` when some step is not of that shape.
pub fn conjugate_norm_trace(x: &LFElem, k: &LocalFieldDesc) -> Option<(LFElem, LFElem)> {
    if !k.is_ancestor_of(x.field()) {
        return None;
    }
    let mut nx = x.clone();
    let mut tx = x.clone();
    while nx.field().depth() > k.depth() {
        let field = nx.field().clone();
        let kk = field.residue().clone();
        let conj: Box<dyn Fn(&LFElem, u32) -> LFElem> = match field.kind() {
            Step::Unramified { f } => {
                let parent_q = field.parent()?.q() as i64;
                let kk2 = kk.clone();
                let _ = f;
                Box::new(move |y: &LFElem, j: u32| {
                    let s = y
                        .series()
                        .map_coeffs(kk2.clone(), |a| kk2.pow(a, parent_q.pow(j)));
                    LFElem::from_series(y.field(), s)
                })
            }
            Step::Tame { e, .. } => {
                if !(kk.order()).is_multiple_of(e) {
                    return None;
                }
                let zeta = kk.exp((kk.order() / e) as i64);
                let kk2 = kk.clone();
                Box::new(move |y: &LFElem, j: u32| {
                    let z = kk2.pow(zeta, j as i64);
                    let coeffs: Vec<Fe> = y
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(i, &a)| kk2.mul(a, kk2.pow(z, y.v() + i as i64)))
                        .collect();
                    LFElem::new(y.field(), y.v(), coeffs)
                })
            }
            Step::Base { .. } => return None,
        };
        let deg = match field.kind() {
            Step::Unramified { f } => f,
            Step::Tame { e, .. } => e,
            Step::Base { .. } => return None,
        };
        let mut prod = nx.clone();
        let mut sum = tx.clone();
        for j in 1..deg {
            prod = prod.mul(&conj(&nx, j)).ok()?;
            sum = sum.add(&conj(&tx, j)).ok()?;
        }
        nx = prod.descend_one()?;
        tx = sum.descend_one()?;
    }
    Some((nx, tx))
}

/// The graded piece `U^level_K / U^{level+1}_K`.
pub fn unit_quotients(k: &LocalFieldDesc, level: i64) -> Result<UnitQuotient, FieldError> {
    UnitQuotient::new(k, level)
}

/// Whether `t` admits an embedding over the common base into `l`.
///
/// Both fields have the shape `k((pi))` with `pi^e = U t`; an embedding
/// exists iff the residue field embeds over the base residue field and, for
/// some such residue embedding, `iota(U_T) / U_L` is an `e_T`-th power in
/// `k_L` (principal units being `e_T`-th powers since `e_T` is prime to p).
pub fn embeds(t: &LocalFieldDesc, l: &LocalFieldDesc) -> bool {
    if t.base_field() != l.base_field() || !l.e().is_multiple_of(t.e()) || !l.f().is_multiple_of(t.f()) {
        return false;
    }
    let kt = t.residue();
    let kl = l.residue();
    let kf = t.base_field().residue().clone();
    let Ok(iota0) = kt.embedding_exponent(kl) else {
        return false;
    };
    let base_in = |field: &LocalFieldDesc| {
        LFElem::constant(&field.base_field(), kf.generator(), 1)
            .embed(field)
            .expect("base is an ancestor")
            .coeffs()[0]
    };
    let gf_t = base_in(t);
    let gf_l = base_in(l);
    let p = kt.p() as i64;
    let ratio_target = kl.order() as i64;
    for j in 0..kl.f() {
        // iota_j = Frob^j o iota_0 on generators
        let expo = iota0 as i64 * p.pow(j);
        let iota = |a: Fe| match kt.log(a) {
            None => Fe::ZERO,
            Some(lg) => kl.exp(expo * lg as i64),
        };
        if iota(gf_t) != gf_l {
            continue;
        }
        let ratio = kl.div(iota(t.abs_unit()), l.abs_unit()).expect("units");
        let lg = kl.log(ratio).expect("unit") as i64;
        let gcd = num_integer::gcd(t.e() as i64, ratio_target);
        if lg % gcd == 0 {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_of_one_plus_cube_root() {
        // s^3 = t over F_2((t)): N(1+s) = 1 + t
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let l = f.tame(3, 0).unwrap();
        let x = LFElem::new(&l, 0, vec![Fe::ONE, Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO]);
        let (n, t) = norm_trace(&x, &f, 2).unwrap();
        assert_eq!(n, LFElem::new(&f, 0, vec![Fe::ONE, Fe::ONE]));
        assert_eq!(t, LFElem::new(&f, 0, vec![Fe::ONE, Fe::ZERO]));
    }

    #[test]
    fn unramified_trace_is_coefficientwise() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let l = f.unramified(2).unwrap();
        let k = l.residue();
        let c = k.units().find(|&c| k.abs_trace(c) == 1).unwrap();
        let x = LFElem::monomial(&l, c, 1, 3);
        let (_, t) = norm_trace(&x, &f, 4).unwrap();
        assert_eq!(t, LFElem::new(&f, 1, vec![Fe::ONE, Fe::ZERO, Fe::ZERO]));
    }

    #[test]
    fn shortfall_names_needed_precision() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let l = f.tame(3, 0).unwrap();
        let x = LFElem::new(&l, 0, vec![Fe::ONE, Fe::ONE]);
        match norm_trace(&x, &f, 5) {
            Err(FieldError::InsufficientPrecision { needed }) => assert!(needed > 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn embedding_criterion_on_small_towers() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let t = f.unramified(2).unwrap().tame(3, 0).unwrap();
        assert!(embeds(&f, &t));
        assert!(embeds(&t, &t));
        assert!(!embeds(&t, &f.tame(3, 0).unwrap()));
        // a different unit class over F_4 gives a non-isomorphic field
        let t1 = f.unramified(2).unwrap().tame(3, 1).unwrap();
        assert!(!embeds(&t, &t1));
        // but both become isomorphic after a cubic unramified extension
        let big = t1.unramified(3).unwrap();
        assert!(embeds(&t, &big));
    }
}
