//! Galois-side parameter data for `n = p^r`: the imprimitivity field `T`, the
//! characters `Delta_c`, the p-kernel field `E` as a descriptor, the graded
//! p-central character, and unramified-twist resolution.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::characters::{build_multchar, standard_addchar, CharError, MultChar, QmodZ};
use crate::field_tower::{embeds, Fe, FieldError, FqField, LFElem, LocalFieldDesc, Series, Step};
use crate::gl_side::{twist_by_tame, wild_part, EpipelagicDatum, GlError};
use crate::ramification::{
    conductor_discriminant, different_in_tower, herbrand_and_different, swan_induce,
    transported_level, InductionData, RamError, RamFiltration,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Gl(#[from] GlError),
    #[error(transparent)]
    Ram(#[from] RamError),
    #[error("descend first: n = {0} is not a power of p")]
    DescendFirst(u32),
    #[error("field is not in the tame tower over the datum's base field")]
    NotInTower,
    #[error("no imprimitivity field found up to residue degree {0}")]
    SearchExhausted(u32),
    #[error("root set not subgroup")]
    NotSubgroup,
    #[error("inconsistent kernel descriptor: {0}")]
    Inconsistent(String),
    #[error("ramified twist candidate at index {0}")]
    RamifiedCandidate(usize),
    #[error("eps matching selects {0} candidates, expected exactly one")]
    NoUniqueTwist(usize),
}

/// `p^r` for a datum with `n = p^r`, or the descent error.
fn wild_degree(d: &EpipelagicDatum) -> Result<(u64, u32), GaloisError> {
    let p = d.field().p();
    let (e, r) = wild_part(d.n(), p);
    if e != 1 {
        return Err(GaloisError::DescendFirst(d.n()));
    }
    Ok(((p as u64).pow(r), r))
}

fn minus_one(k: &FqField, n: u64) -> Fe {
    if n.is_multiple_of(2) {
        Fe::ONE
    } else {
        k.neg(Fe::ONE)
    }
}

/// Residue parts `a` of the classes `c = a pi_L^{nu}` in `L^x / U^1_L` solving
/// `c^{p^{2r}-1} = (-1)^p det alpha^{p^r-1}`, in discrete-log order.
///
/// Both sides are evaluated as field elements at relative precision one; the
/// valuation is forced to `nu = -e(L|F) / (1 + p^r)`.
pub fn congruence_solutions(
    l: &LocalFieldDesc,
    d: &EpipelagicDatum,
) -> Result<Vec<Fe>, GaloisError> {
    if !d.field().is_ancestor_of(l) {
        return Err(GaloisError::NotInTower);
    }
    let (pr, _) = wild_degree(d)?;
    let big = (pr * pr - 1) as i64;
    let e_rel = (l.e() / d.field().e()) as u64;
    if !e_rel.is_multiple_of(pr + 1) {
        return Ok(Vec::new());
    }
    let nu = -((e_rel / (pr + 1)) as i64);
    let k = l.residue();
    let rhs = d
        .det_alpha(1)
        .embed(l)?
        .pow(pr as i64 - 1)?
        .scale(minus_one(k, k.p() as u64));
    let target = rhs.leading().ok_or(FieldError::NotInvertible)?;
    let mut out = Vec::new();
    for a in k.units() {
        let c = LFElem::monomial(l, a, nu, 1);
        if c.pow(big)?.leading() == Some(target) {
            out.push(a);
        }
    }
    Ok(out)
}

/// `|D(sigma_L)| = 1 + #solutions`.
pub fn twist_order(l: &LocalFieldDesc, d: &EpipelagicDatum) -> Result<u64, GaloisError> {
    Ok(1 + congruence_solutions(l, d)?.len() as u64)
}

/// The imprimitivity field with its root classes `c = a pi_T^{-1}`.
#[derive(Clone, Debug)]
pub struct ImprimitivityResult {
    pub t: LocalFieldDesc,
    /// Residue parts of the roots, by discrete log.
    pub roots: Vec<Fe>,
    /// `p^{2r} - 1`.
    pub exponent: u64,
    /// Leading term `(valuation, coefficient)` of `(-1)^p det alpha^{p^r-1}` in `T`.
    pub rhs: (i64, Fe),
    /// Proper subfields checked during the search, with their solution counts.
    pub subfield_counts: Vec<(LocalFieldDesc, usize)>,
    pub p_r: u64,
    pub r: u32,
}

fn extend_unramified(f: &LocalFieldDesc, deg: u32) -> Result<LocalFieldDesc, FieldError> {
    if deg == 1 {
        Ok(f.clone())
    } else {
        f.unramified(deg)
    }
}

/// Searches residue degrees `f' = 1, 2, ...` and, for each, units `u` by
/// discrete log, for `T = F_{f'}(pi_T)` with `pi_T^{1+p^r} = u pi_F` carrying
/// exactly `p^{2r} - 1` solutions.
pub fn imprimitivity_field(d: &EpipelagicDatum) -> Result<ImprimitivityResult, GaloisError> {
    let (pr, r) = wild_degree(d)?;
    let f = d.field();
    let e_t = (pr + 1) as u32;
    let want = (pr * pr - 1) as usize;
    let max_deg = 2 * r;
    for deg in 1..=max_deg {
        let fp = extend_unramified(f, deg)?;
        for u_log in 0..fp.residue().order() {
            let t = fp.tame(e_t, u_log)?;
            let roots = congruence_solutions(&t, d)?;
            if roots.len() == want {
                let subfield_counts = proper_subfields(f, deg, e_t, &t)?
                    .into_iter()
                    .map(|l| congruence_solutions(&l, d).map(|s| (l, s.len())))
                    .collect::<Result<Vec<_>, _>>()?;
                let k = t.residue();
                let rhs = d
                    .det_alpha(1)
                    .embed(&t)?
                    .pow(pr as i64 - 1)?
                    .scale(minus_one(k, k.p() as u64))
                    .leading()
                    .ok_or(FieldError::NotInvertible)?;
                return Ok(ImprimitivityResult {
                    t,
                    roots,
                    exponent: pr * pr - 1,
                    rhs,
                    subfield_counts,
                    p_r: pr,
                    r,
                });
            }
        }
    }
    Err(GaloisError::SearchExhausted(max_deg))
}

/// Proper subfields of `T = F_{deg}(pi_T)` expressible in the tower model:
/// `F_{d'}` and `F_{d'}(pi^{e'})` for `d' | deg`, `e' | e_t`, minus `T` itself.
fn proper_subfields(
    f: &LocalFieldDesc,
    deg: u32,
    e_t: u32,
    t: &LocalFieldDesc,
) -> Result<Vec<LocalFieldDesc>, FieldError> {
    let mut out = Vec::new();
    for dd in (1..=deg).filter(|x| deg.is_multiple_of(*x)) {
        let fd = extend_unramified(f, dd)?;
        out.push(fd.clone());
        for ee in (2..=e_t).filter(|x| e_t.is_multiple_of(*x)) {
            for u in 0..fd.residue().order() {
                let l = fd.tame(ee, u)?;
                if embeds(&l, t) && !embeds(t, &l) {
                    out.push(l);
                }
            }
        }
    }
    out.retain(|l| !embeds(t, l));
    Ok(out)
}

/// Closed form for the roots: `a^{p^{2r}-1} = (-1)^p (zeta U_T)^{p^r-1}`.
pub fn closed_form_roots(t: &LocalFieldDesc, d: &EpipelagicDatum) -> Result<Vec<Fe>, GaloisError> {
    let (pr, _) = wild_degree(d)?;
    let k = t.residue();
    let zeta = LFElem::constant(d.field(), d.det_mu(), 1).embed(t)?.coeffs()[0];
    let rhs = k.mul(
        minus_one(k, k.p() as u64),
        k.pow(k.mul(zeta, t.abs_unit()), pr as i64 - 1),
    );
    Ok(k.units()
        .filter(|&a| k.pow(a, (pr * pr - 1) as i64) == rhs)
        .collect())
}

/// `Gal(T/F')` acts by `pi_T -> w pi_T`, `w in mu_{1+p^r}`, hence `a -> a w^{-1}`.
/// Returns the orbits, or an error naming a fixed point or a non-root image.
pub fn galois_orbits(imp: &ImprimitivityResult) -> Result<Vec<Vec<Fe>>, GaloisError> {
    let k = imp.t.residue();
    let n = (imp.p_r + 1) as u32;
    let step = k.order() / n;
    let roots: BTreeSet<Fe> = imp.roots.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for &a in &imp.roots {
        if seen.contains(&a) {
            continue;
        }
        let mut orbit = Vec::new();
        for j in 0..n {
            let w = k.exp((step * j) as i64);
            let img = k.div(a, w).expect("unit");
            if !roots.contains(&img) {
                return Err(GaloisError::Inconsistent("automorphism moves a root off the set".into()));
            }
            if j > 0 && img == a {
                return Err(GaloisError::Inconsistent("automorphism fixes a root".into()));
            }
            seen.insert(img);
            orbit.push(img);
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Generators of the norm group `N_{E/T}(E^x)` inside `T^x / U^2_T`.
#[derive(Clone, Debug)]
pub struct NormSubgroup {
    /// `b` with `1 + b pi_T` in every kernel: an `F_p`-subspace of `k_T`.
    pub annihilator: Vec<Fe>,
    /// An `F_p`-basis of `annihilator`.
    pub annihilator_basis: Vec<Fe>,
    /// Index in `T^x / U^2_T`.
    pub index: u64,
}

/// The p-kernel field `E/T` through its norm group.
#[derive(Clone, Debug)]
pub struct KernelFieldDesc {
    pub t: LocalFieldDesc,
    pub roots: Vec<Fe>,
    pub deltas: Vec<MultChar>,
    /// `table[i][j] = k` means `D_i D_j = D_k`, index 0 the trivial character
    /// and `i >= 1` the character of `roots[i - 1]`.
    pub group_table: Vec<Vec<usize>>,
    pub norm_subgroup: NormSubgroup,
    pub e_et: u64,
    pub d_et: i64,
    pub c_psi_e: i64,
}

/// Builds `Delta_c` for each root and the group data.
pub fn delta_characters(
    imp: &ImprimitivityResult,
    d: &EpipelagicDatum,
) -> Result<KernelFieldDesc, GaloisError> {
    let t = &imp.t;
    let k = t.residue();
    let p = k.p() as i64;
    let det_t = d.det_alpha(2).embed(t)?;
    let mut deltas = Vec::with_capacity(imp.roots.len());
    for &a in &imp.roots {
        let c = LFElem::monomial(t, a, -1, 1);
        // on_pi is the unique value of order dividing p with Delta(det alpha) = 1
        let mut found = None;
        for j in 0..p {
            let chi = build_multchar(t, QmodZ::new(j, p), 0, &[(1, c.clone())])?;
            if chi.eval(&det_t)?.is_zero() {
                if found.is_some() {
                    return Err(GaloisError::Inconsistent("on_pi not unique".into()));
                }
                found = Some(chi);
            }
        }
        deltas.push(found.ok_or_else(|| GaloisError::Inconsistent("no on_pi".into()))?);
    }
    // group law: wild coefficients add
    let index_of = |b: Fe| -> Option<usize> {
        if b.is_zero() {
            Some(0)
        } else {
            imp.roots.iter().position(|&x| x == b).map(|i| i + 1)
        }
    };
    let elems: Vec<Fe> = std::iter::once(Fe::ZERO).chain(imp.roots.iter().copied()).collect();
    let mut table = vec![vec![0usize; elems.len()]; elems.len()];
    for (i, &x) in elems.iter().enumerate() {
        for (j, &y) in elems.iter().enumerate() {
            table[i][j] = index_of(k.add(x, y)).ok_or(GaloisError::NotSubgroup)?;
        }
    }
    let psi = standard_addchar(t);
    let annihilator: Vec<Fe> = k
        .elements()
        .filter(|&b| imp.roots.iter().all(|&a| psi.on_constant(k.mul(a, b)).is_zero()))
        .collect();
    let annihilator_basis = fp_basis(k, &annihilator);
    let index = k.q() as u64 / annihilator.len() as u64;
    let pr = imp.p_r;
    let e_et = pr * pr;
    let artin: Vec<i64> = std::iter::once(Ok::<i64, CharError>(0))
        .chain(deltas.iter().map(|x| x.artin()))
        .collect::<Result<_, _>>()?;
    let d_et = conductor_discriminant(&artin)?;
    let c_psi_e = transported_level(d_et, e_et as i64, psi.level());
    Ok(KernelFieldDesc {
        t: t.clone(),
        roots: imp.roots.clone(),
        deltas,
        group_table: table,
        norm_subgroup: NormSubgroup {
            annihilator,
            annihilator_basis,
            index,
        },
        e_et,
        d_et,
        c_psi_e,
    })
}

/// Greedy `F_p`-basis of a subset closed under addition.
fn fp_basis(k: &FqField, set: &[Fe]) -> Vec<Fe> {
    let mut basis = Vec::new();
    let mut span: BTreeSet<Fe> = [Fe::ZERO].into_iter().collect();
    for &x in set {
        if span.contains(&x) {
            continue;
        }
        basis.push(x);
        span = fp_span(k, &basis);
    }
    basis
}

fn fp_span(k: &FqField, gens: &[Fe]) -> BTreeSet<Fe> {
    let mut span: BTreeSet<Fe> = [Fe::ZERO].into_iter().collect();
    for &g in gens {
        let mut next = BTreeSet::new();
        for &s in &span {
            let mut x = s;
            for _ in 0..k.p() {
                next.insert(x);
                x = k.add(x, g);
            }
        }
        span = next;
    }
    span
}

/// Differents through a Lagrangian sublevel `T < K < E`: `d(E|K)` from the
/// Herbrand machinery on the filtration of `Gal(E/K)`, `d(K|T)` by
/// conductor-discriminant over an `r`-dimensional subspace of the Delta-group,
/// and `d(E|T)` by transitivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LagrangianDifferents {
    pub d_ek: i64,
    pub d_kt: i64,
    pub d_et: i64,
}

pub fn lagrangian_differents(kernel: &KernelFieldDesc, r: u32) -> Result<LagrangianDifferents, GaloisError> {
    let k = kernel.t.residue();
    let basis = fp_basis(k, &kernel.roots);
    if basis.len() != 2 * r as usize {
        return Err(GaloisError::Inconsistent(format!(
            "Delta-group has F_p-dimension {}, expected {}",
            basis.len(),
            2 * r
        )));
    }
    let sub = fp_span(k, &basis[..r as usize]);
    let mut artin = Vec::new();
    for b in sub {
        if b.is_zero() {
            artin.push(0);
            continue;
        }
        let i = kernel
            .roots
            .iter()
            .position(|&x| x == b)
            .ok_or(GaloisError::NotSubgroup)?;
        artin.push(kernel.deltas[i].artin()?);
    }
    let d_kt = conductor_discriminant(&artin)?;
    let pr = (k.p() as u64).pow(r);
    let filt = RamFiltration::new(vec![(0, pr), (1, pr), (2, 1)])?;
    let d_ek = herbrand_and_different(&filt).d;
    Ok(LagrangianDifferents {
        d_ek,
        d_kt,
        d_et: different_in_tower(d_ek, pr as i64, d_kt),
    })
}

/// The p-central character on `U^{1+p^r}_E / U^{2+p^r}_E = k_T`:
/// `a -> psi_T(tau_E b^{p^r} a)` with `beta_E = b pi_E^{-(1+p^r)}`.
#[derive(Clone, Debug)]
pub struct XiRestriction {
    pub t: LocalFieldDesc,
    /// `b` with `b^{p^{2r}} = zeta U_T`, i.e. `N_{E/T}(beta_E) = det alpha` mod `U^1_T`.
    pub beta_leading: Fe,
    /// The `T`-side coset `zeta U_T` fixed by the norm condition.
    pub beta_norm_coset: Fe,
    /// `tau_E b^{p^r}` with the symbolic `tau_E = 1`.
    pub graded_coeff: Fe,
    pub swan: i64,
    pub swan_by_induction: i64,
    pub artin: i64,
    pub c_psi_e: i64,
    pub hall_alt: HallAlt,
    pub p_r: u64,
}

/// Descriptor-level check of the Hall-subgroup reformulation:
/// `sw(tau) = (1 + p^r) sw(tau^H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HallAlt {
    pub sw_tau: i64,
    pub sw_tau_h: i64,
}

impl XiRestriction {
    /// Value on `1 + a pi_E^{1+p^r}`.
    pub fn graded_value(&self, a: Fe) -> QmodZ {
        let k = self.t.residue();
        standard_addchar(&self.t).on_constant(k.mul(self.graded_coeff, a))
    }

    /// `xi(1 + x) = psi_E(beta^{p^r} x)` evaluated in `E = k_T((pi_E))` for
    /// `x` of valuation at least `1 + p^r`: only the coefficient of
    /// `pi_E^{1 - p^{2r}}` survives `psi_E`.
    pub fn eval_series(&self, beta: &Series, x: &Series) -> Result<QmodZ, GaloisError> {
        let pr = self.p_r as i64;
        let bp = beta.pow(pr).ok_or(FieldError::NotInvertible)?;
        let z = bp.mul(x);
        let edge = 1 - pr * pr;
        if z.v() < edge {
            return Err(GaloisError::Inconsistent("argument below the graded level".into()));
        }
        let c = z
            .coeff(edge)
            .ok_or(FieldError::InsufficientPrecision { needed: edge + 1 })?;
        Ok(standard_addchar(&self.t).on_constant(c))
    }

    /// Leading coefficient of `beta_E` as a series in `pi_E`.
    pub fn beta_series(&self, rel: usize) -> Series {
        let pr = self.p_r as i64;
        Series::monomial(self.t.residue().clone(), self.beta_leading, -(1 + pr), rel)
    }

    /// Swan conductor by scanning `U^i_E` for `i` up to `bound`: the largest
    /// `i` on which the formula is nontrivial on some graded generator.
    pub fn swan_by_scan(&self, bound: i64) -> Result<i64, GaloisError> {
        let k = self.t.residue().clone();
        let pr = self.p_r as i64;
        let beta = self.beta_series(3 * (pr * pr + pr) as usize + 4);
        for i in (1 + pr..=bound).rev() {
            for a in k.prime_basis() {
                let x = Series::monomial(k.clone(), a, i, 2);
                if !self.eval_series(&beta, &x)?.is_zero() {
                    return Ok(i);
                }
            }
        }
        Ok(0)
    }
}

pub fn xi_restriction(
    kernel: &KernelFieldDesc,
    d: &EpipelagicDatum,
) -> Result<XiRestriction, GaloisError> {
    let (pr, r) = wild_degree(d)?;
    let t = &kernel.t;
    let k = t.residue();
    if kernel.e_et != pr * pr || kernel.d_et != 2 * (pr * pr) as i64 - 2 {
        return Err(GaloisError::Inconsistent(format!(
            "e(E|T) = {}, d(E|T) = {}",
            kernel.e_et, kernel.d_et
        )));
    }
    let zeta = LFElem::constant(d.field(), d.det_mu(), 1).embed(t)?.coeffs()[0];
    let coset = k.mul(zeta, t.abs_unit());
    let b = k.frobenius_inv(coset, 2 * r);
    debug_assert_eq!(k.pow(b, (pr * pr) as i64), coset);
    let graded_coeff = k.pow(b, pr as i64);
    // induction: sw(Ind xi) = p^r sw(sigma_T) = p^r (1 + p^r), solved for sw(xi)
    let target = (pr * (1 + pr)) as i64;
    let data = |s| InductionData {
        sw_tau: s,
        m: 1,
        e: kernel.e_et as i64,
        f: 1,
        d: kernel.d_et,
    };
    let base = swan_induce(data(0))?;
    let swan_by_induction = target - base;
    if swan_induce(data(swan_by_induction))? != target {
        return Err(GaloisError::Inconsistent("induction formula".into()));
    }
    let mut xi = XiRestriction {
        t: t.clone(),
        beta_leading: b,
        beta_norm_coset: coset,
        graded_coeff,
        swan: 0,
        swan_by_induction,
        artin: 0,
        c_psi_e: kernel.c_psi_e,
        hall_alt: HallAlt {
            sw_tau: 1 + pr as i64,
            sw_tau_h: 1,
        },
        p_r: pr,
    };
    xi.swan = xi.swan_by_scan(3 * (1 + pr as i64))?;
    xi.artin = xi.swan + 1;
    if xi.swan != swan_by_induction {
        return Err(GaloisError::Inconsistent(format!(
            "sw(xi) = {} by evaluation, {} by induction",
            xi.swan, swan_by_induction
        )));
    }
    if xi.hall_alt.sw_tau != (1 + pr as i64) * xi.hall_alt.sw_tau_h {
        return Err(GaloisError::Inconsistent("Hall-subgroup Swan relation".into()));
    }
    // xi^{p^r} and omega o N are both trivial on U^1_E at the graded level
    for a in k.prime_basis() {
        if !xi.graded_value(a).times(pr as i64).is_zero() {
            return Err(GaloisError::Inconsistent("xi^{p^r} nontrivial on U^1_E".into()));
        }
    }
    if !d.omega().is_tame() {
        return Err(GaloisError::Inconsistent("omega is wild".into()));
    }
    Ok(xi)
}

/// Unramified characters `chi_j(pi_F) = j / p^r`, `j = 0..p^r`.
pub fn unramified_candidates(d: &EpipelagicDatum) -> Result<Vec<MultChar>, GaloisError> {
    let (pr, _) = wild_degree(d)?;
    Ok((0..pr as i64)
        .map(|j| MultChar::unramified(d.field(), QmodZ::new(j, pr as i64)))
        .collect())
}

/// Picks the candidate `chi` with `chi (x) sigma_0` matching the datum's eps
/// label, where `sigma_0` has eps index 0.
pub fn resolve_unramified_twist(
    d: &EpipelagicDatum,
    candidates: &[MultChar],
) -> Result<usize, GaloisError> {
    let base = EpipelagicDatum::new(d.field(), d.n(), d.det_mu(), d.omega().clone(), 0)?;
    let det = d.det_alpha(2);
    let mut values = BTreeSet::new();
    let mut hits = Vec::new();
    for (i, chi) in candidates.iter().enumerate() {
        if chi.on_mu_value(d.field().residue().generator())? != QmodZ::ZERO || !chi.is_tame() {
            return Err(GaloisError::RamifiedCandidate(i));
        }
        values.insert(chi.eval(&det)?);
        if twist_by_tame(&base, chi)?.eps_value()? == d.eps_value()? {
            hits.push(i);
        }
    }
    if values.len() != candidates.len() {
        return Err(GaloisError::Inconsistent("chi -> chi(det alpha) is not injective".into()));
    }
    match hits.as_slice() {
        [i] => Ok(*i),
        other => Err(GaloisError::NoUniqueTwist(other.len())),
    }
}

/// Everything computed for one datum.
#[derive(Clone, Debug)]
pub struct ParameterRecord {
    pub input: EpipelagicDatum,
    pub imprimitivity: ImprimitivityResult,
    pub kernel: KernelFieldDesc,
    pub xi: XiRestriction,
    pub det_sigma: MultChar,
    pub eps: QmodZ,
    pub twist_resolution: usize,
}

pub fn parameter_record(d: &EpipelagicDatum) -> Result<ParameterRecord, GaloisError> {
    let imprimitivity = imprimitivity_field(d)?;
    let kernel = delta_characters(&imprimitivity, d)?;
    if kernel.norm_subgroup.index != imprimitivity.p_r.pow(2) {
        return Err(GaloisError::Inconsistent(format!(
            "norm subgroup index {}",
            kernel.norm_subgroup.index
        )));
    }
    let xi = xi_restriction(&kernel, d)?;
    let twist_resolution = resolve_unramified_twist(d, &unramified_candidates(d)?)?;
    Ok(ParameterRecord {
        input: d.clone(),
        imprimitivity,
        kernel,
        xi,
        det_sigma: d.omega().clone(),
        eps: d.eps_value()?,
        twist_resolution,
    })
}

/// Whether the field is of the shape `F_{f'}(pi)` with `pi^{1+p^r} = u pi_F`.
pub fn is_imprimitivity_shape(t: &LocalFieldDesc, p_r: u64) -> bool {
    matches!(t.kind(), Step::Tame { e, .. } if e as u64 == p_r + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flagship(zeta_log: i64) -> EpipelagicDatum {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let z = f.residue().exp(zeta_log);
        EpipelagicDatum::new(&f, 2, z, MultChar::trivial(&f), 0).unwrap()
    }

    #[test]
    fn flagship_field_and_roots() {
        let d = flagship(0);
        let imp = imprimitivity_field(&d).unwrap();
        assert_eq!((imp.t.e(), imp.t.f()), (3, 2));
        assert_eq!(imp.roots.len(), 3);
        assert_eq!(imp.roots, closed_form_roots(&imp.t, &d).unwrap());
        assert!(imp.subfield_counts.iter().all(|(_, n)| *n < 3));
    }

    #[test]
    fn descend_first_for_composite_n() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let d = EpipelagicDatum::new(&f, 6, Fe::ONE, MultChar::trivial(&f), 0).unwrap();
        assert!(matches!(imprimitivity_field(&d), Err(GaloisError::DescendFirst(6))));
    }

    #[test]
    fn records_for_small_cases() {
        for (p, f, r) in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (5, 1, 1), (2, 1, 2)] {
            let base = LocalFieldDesc::base(p, f).unwrap();
            let n = p.pow(r);
            for zl in 0..base.residue().order().min(3) {
                let z = base.residue().exp(zl as i64);
                let d = EpipelagicDatum::new(&base, n, z, MultChar::trivial(&base), 1 % n).unwrap();
                let rec = parameter_record(&d).unwrap();
                let pr = n as u64;
                assert_eq!(rec.imprimitivity.t.e() as u64, pr + 1, "{p} {f} {r}");
                assert_eq!(rec.kernel.norm_subgroup.index, pr * pr);
                assert_eq!(rec.xi.swan, pr as i64 + 1);
                assert_eq!(galois_orbits(&rec.imprimitivity).unwrap().len() as u64, pr - 1);
                let lag = lagrangian_differents(&rec.kernel, r).unwrap();
                assert_eq!(lag.d_et, rec.kernel.d_et);
                assert_eq!(rec.twist_resolution, 1 % n as usize);
            }
        }
    }
}
