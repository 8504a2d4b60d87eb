//! Matrix-level lab for minimal strata of period `p^r`: the map
//! `A(x) = alpha x alpha^{-1} - x` on graded quotients `q^i / q^{i+j}`, the
//! conjugator `x_c`, the character identities on `U^1_{KP}`, and a brute-force
//! root set computed without the closed-form congruence.
//!
//! Everything happens on graded quotients of `B = M_{p^r}(K)`; `KP` is never
//! formed as a field (it would be inseparable in characteristic `p`).

pub mod belem;
pub mod linalg;

use std::sync::Arc;

use thiserror::Error;

use crate::characters::{standard_addchar, AddChar, CharError, QmodZ};
use crate::field_tower::{series_det, Fe, FieldError, FqField, LFElem, LocalFieldDesc};
use belem::BElem;
use linalg::Mat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("graded quotient needs 1 <= j <= {max}, got j = {j}")]
    BadRange { j: i64, max: i64 },
    #[error("c must have valuation -1, got {0}")]
    WrongValuation(i64),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("no z with A^(p^r - 1) z = delta^-1")]
    NoConjugatorSeed,
    #[error("decomposition did not converge: {0}")]
    Decomposition(String),
    #[error("lab budget exceeded: {what} = {size}")]
    Budget { what: &'static str, size: u64 },
    #[error("unsupported lab configuration: {0}")]
    Unsupported(String),
    #[error("lab identity failed: {0}")]
    Inconsistent(String),
}

/// Levels carried beyond the leading term of `alpha`.
fn working_levels(n: usize) -> i64 {
    4 * n as i64 + 8
}

/// A minimal stratum in normal form: `alpha = a0 Pi^{-e}` with `gcd(e, p) = 1`,
/// inside the standard minimal hereditary order of period `n = p^r`.
#[derive(Clone, Debug)]
pub struct Stratum {
    k: LocalFieldDesc,
    n: usize,
    r: u32,
    e_rel: i64,
    a0: Fe,
    alpha: BElem,
    alpha_inv: BElem,
    psi: AddChar,
}

fn sign_power(k: &FqField, e: i64) -> Fe {
    if e.rem_euclid(2) == 0 {
        Fe::ONE
    } else {
        k.neg(Fe::ONE)
    }
}

impl Stratum {
    fn with_leading(k: &LocalFieldDesc, r: u32, e_rel: i64, a0: Fe) -> Stratum {
        let n = (k.p() as usize).pow(r);
        let kr = k.residue();
        let w = working_levels(n);
        let alpha = BElem::scalar(kr, n, a0, -e_rel, -e_rel + w);
        let alpha_inv = alpha.inv().expect("scalar leading term");
        Stratum {
            k: k.clone(),
            n,
            r,
            e_rel,
            a0,
            alpha,
            alpha_inv,
            psi: standard_addchar(k),
        }
    }

    pub fn field(&self) -> &LocalFieldDesc {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `alpha` lies at level `-e`.
    pub fn alpha_level(&self) -> i64 {
        -self.e_rel
    }

    /// Leading coefficient `a0` of `alpha = a0 Pi^{-e}`.
    pub fn leading(&self) -> Fe {
        self.a0
    }

    pub fn alpha(&self) -> &BElem {
        &self.alpha
    }

    pub fn alpha_inv(&self) -> &BElem {
        &self.alpha_inv
    }

    fn kr(&self) -> &Arc<FqField> {
        self.k.residue()
    }

    /// The generator `Pi` of the radical, carried on `[1, 1 + prec)`.
    pub fn radical_generator(&self, prec: i64) -> BElem {
        BElem::scalar(self.kr(), self.n, Fe::ONE, 1, 1 + prec)
    }

    /// `alpha u` for `u` in `U^{1+p^r}` of the order.
    pub fn perturbed(&self, u: &BElem) -> Result<Stratum, LabError> {
        let one = BElem::one(self.kr(), self.n, u.prec());
        if let Some(v) = u.sub(&one).valuation() {
            if v < 1 + self.n as i64 {
                return Err(LabError::Unsupported(format!(
                    "perturbation at level {v} is not in U^(1+p^r)"
                )));
            }
        }
        let alpha = self.alpha.mul(u);
        let alpha_inv = alpha
            .inv()
            .ok_or_else(|| LabError::Singular("perturbed alpha".into()))?;
        Ok(Stratum {
            alpha,
            alpha_inv,
            ..self.clone()
        })
    }

    /// `det_B alpha` from the explicit matrix.
    pub fn det_alpha(&self) -> Result<LFElem, LabError> {
        let m = self.alpha.to_matrix();
        let d = series_det(self.kr(), m).ok_or(FieldError::NotInvertible)?;
        Ok(LFElem::from_series(&self.k, d))
    }

    /// `psi_B = psi_K o tr_B`, read off the constant coefficient of the trace.
    pub fn psi_b(&self, b: &BElem) -> Result<QmodZ, LabError> {
        let tr = b.trace();
        let a = tr
            .coeff(0)
            .ok_or(FieldError::InsufficientPrecision { needed: 1 })?;
        Ok(self.psi.on_constant(a))
    }

    pub fn psi_k(&self, a: Fe) -> QmodZ {
        self.psi.on_constant(a)
    }

    /// `A(x) = alpha x alpha^{-1} - x`.
    pub fn big_a(&self, x: &BElem) -> BElem {
        self.alpha.mul(x).mul(&self.alpha_inv).sub(x)
    }

    /// Normal-form checks: `Pi^n = pi_K`, `alpha q^e = order`, `alpha^n`
    /// scalar at its leading levels, `tr alpha = 0`.
    pub fn invariants(&self) -> StratumChecks {
        let n = self.n;
        let pi_n = self.radical_generator(2 * n as i64).pow(n as u32);
        let m = pi_n.to_matrix();
        let radical_period = (0..n).all(|i| {
            (0..n).all(|j| match (i == j, m[i][j].leading()) {
                (true, Some((1, c))) => c == Fe::ONE && m[i][j].rel_prec() >= 1,
                (false, None) => true,
                _ => false,
            })
        });
        let lifted = self
            .alpha
            .mul(&BElem::scalar(self.kr(), n, Fe::ONE, self.e_rel, self.e_rel + 4));
        let alpha_level = lifted.valuation() == Some(0)
            && lifted.comp(0).is_some_and(|d| d.iter().all(|x| !x.is_zero()));
        let an = self.alpha.pow(n as u32);
        let top = -(self.e_rel * n as i64);
        let alpha_power_scalar = an.valuation() == Some(top)
            && (top..top + n as i64).all(|l| an.comp(l).is_some_and(|d| d.iter().all(|&x| x == d[0])));
        let trace_zero = n < 2 || self.alpha.trace().is_zero();
        StratumChecks {
            radical_period,
            alpha_level,
            alpha_power_scalar,
            trace_zero,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StratumChecks {
    pub radical_period: bool,
    pub alpha_level: bool,
    pub alpha_power_scalar: bool,
    pub trace_zero: bool,
}

impl StratumChecks {
    pub fn all(&self) -> bool {
        self.radical_period && self.alpha_level && self.alpha_power_scalar && self.trace_zero
    }
}

/// The stratum over `k` itself: `alpha = a0 Pi^{-1}` with `a0^{p^r} = zeta`,
/// so `det alpha = (-1)^{n-1} zeta pi_K^{-1}`.
pub fn build_stratum(k: &LocalFieldDesc, r: u32, zeta: Fe) -> Result<Stratum, LabError> {
    if zeta.is_zero() {
        return Err(FieldError::NotRootOfUnity.into());
    }
    if r == 0 {
        return Err(LabError::Unsupported("r must be positive".into()));
    }
    let a0 = k.residue().frobenius_inv(zeta, r);
    Ok(Stratum::with_leading(k, r, 1, a0))
}

/// The stratum of a datum over `f` with `det alpha = det_mu pi_F^{-1}`, viewed
/// in `M_{p^r}(K)`: `alpha = a0 Pi^{-e(K|F)}`.
pub fn lift_stratum(
    k: &LocalFieldDesc,
    f: &LocalFieldDesc,
    r: u32,
    det_mu: Fe,
) -> Result<Stratum, LabError> {
    if !f.is_ancestor_of(k) {
        return Err(FieldError::NotAncestor.into());
    }
    if det_mu.is_zero() {
        return Err(FieldError::NotRootOfUnity.into());
    }
    if r == 0 {
        return Err(LabError::Unsupported("r must be positive".into()));
    }
    let e_rel = (k.e() / f.e()) as i64;
    let n = (k.p() as i64).pow(r);
    let det_k = LFElem::monomial(f, det_mu, -1, 1).embed(k)?;
    let (v, c) = det_k.leading().ok_or(FieldError::NotInvertible)?;
    debug_assert_eq!(v, -e_rel);
    let kr = k.residue();
    // det(a0 Pi^{-e}) = a0^n (-1)^{(n-1)e} pi_K^{-e}
    let a0 = kr.frobenius_inv(kr.mul(sign_power(kr, (n - 1) * e_rel), c), r);
    Ok(Stratum::with_leading(k, r, e_rel, a0))
}

/// A `k_K`-linear endomorphism of `V_{i,j} = q^i / q^{i+j}`, level-major basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub i: i64,
    pub j: i64,
    pub matrix: Mat,
}

impl GradedMap {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }
}

/// Outcome of the graded analysis of `A` and `s_K` on one quotient.
#[derive(Clone, Debug)]
pub struct GradedAnalysis {
    pub a: GradedMap,
    pub s_k: GradedMap,
    /// `A^{p^r-1} = u s_K`.
    pub u: Fe,
    pub nilpotent: bool,
    pub kernel_dim: usize,
    /// `Im A^{p^r-1} = Ker A = image of KP`.
    pub top_image_is_kp_line: bool,
    /// `Ker s_K = Im A` and `Im s_K = Ker A`.
    pub exact: bool,
    /// `s_K` kills the `KP`-line, i.e. `s_K(p^t_KP) in p^{t+1+p^r}_KP` on `V`.
    pub containment: bool,
}

fn map_matrix(s: &Stratum, i: i64, j: i64, f: impl Fn(&BElem) -> BElem) -> Result<Mat, LabError> {
    let kr = s.kr();
    let dim = j as usize * s.n;
    let mut cols = Vec::with_capacity(dim);
    for t in 0..dim {
        let mut e = vec![Fe::ZERO; dim];
        e[t] = Fe::ONE;
        let x = BElem::from_coords(kr, s.n, i, j, &e);
        let y = f(&x);
        cols.push(
            y.coords(i, j)
                .ok_or(FieldError::InsufficientPrecision { needed: i + j })?,
        );
    }
    Ok((0..dim).map(|row| cols.iter().map(|c| c[row]).collect()).collect())
}

/// `s_K(x_l) = Pi^l tr(Pi^{-l} x_l)` on each level: the `KP`-linear map whose
/// kernel is `Im A` and whose image is the `KP`-line.
fn corestriction(s: &Stratum, x: &BElem) -> BElem {
    let kr = s.kr();
    let mut out = BElem::zero(kr, s.n, x.v(), x.prec());
    for l in x.v()..x.prec() {
        let d = x.comp(l).expect("in range");
        let sum = d.iter().fold(Fe::ZERO, |acc, &a| kr.add(acc, a));
        out.set_comp(l, vec![sum; s.n]);
    }
    out
}

fn kp_line(s: &Stratum, j: i64) -> Vec<Vec<Fe>> {
    let dim = j as usize * s.n;
    (0..j as usize)
        .map(|l| {
            let mut v = vec![Fe::ZERO; dim];
            for r in 0..s.n {
                v[l * s.n + r] = Fe::ONE;
            }
            v
        })
        .collect()
}

pub fn graded_map_analysis(s: &Stratum, i: i64, j: i64) -> Result<GradedAnalysis, LabError> {
    let n = s.n as i64;
    if !(1..=n).contains(&j) {
        return Err(LabError::BadRange { j, max: n });
    }
    let kr = s.kr().clone();
    let a = map_matrix(s, i, j, |x| s.big_a(x))?;
    let sk = map_matrix(s, i, j, |x| corestriction(s, x))?;
    let dim = a.len();
    let a_top = linalg::mat_pow(&kr, &a, n as u32 - 1);
    let nilpotent = linalg::is_zero(&linalg::mat_mul(&kr, &a, &a_top)) && !linalg::is_zero(&a_top);
    let rank_a = linalg::rank(&kr, &a);
    let kernel_dim = dim - rank_a;
    let line = kp_line(s, j);
    let ker_a = linalg::nullspace(&kr, &a);
    let top_image_is_kp_line = linalg::rank(&kr, &a_top) == j as usize
        && linalg::in_column_span(&kr, &a_top, &line)
        && ker_a.len() == line.len()
        && line
            .iter()
            .all(|v| linalg::mat_vec(&kr, &a, v).iter().all(|x| x.is_zero()));
    let rank_s = linalg::rank(&kr, &sk);
    let exact = linalg::is_zero(&linalg::mat_mul(&kr, &sk, &a))
        && linalg::is_zero(&linalg::mat_mul(&kr, &a, &sk))
        && rank_s + rank_a == dim
        && rank_s == kernel_dim;
    let containment = line
        .iter()
        .all(|v| linalg::mat_vec(&kr, &sk, v).iter().all(|x| x.is_zero()));
    // one linear equation for u from a vector with nonzero s_K image
    let (t, col) = (0..dim)
        .find_map(|t| {
            let col: Vec<Fe> = sk.iter().map(|row| row[t]).collect();
            col.iter().position(|x| !x.is_zero()).map(|pos| (t, (pos, col)))
        })
        .ok_or_else(|| LabError::Singular("s_K vanishes on V".into()))?;
    let (pos, s_col) = col;
    let u = kr
        .div(a_top[pos][t], s_col[pos])
        .ok_or_else(|| LabError::Singular("s_K pivot".into()))?;
    let scaled: Mat = sk.iter().map(|r| r.iter().map(|&x| kr.mul(u, x)).collect()).collect();
    if u.is_zero() || scaled != a_top {
        return Err(LabError::Singular(
            "A^(p^r - 1) is not a unit multiple of s_K".into(),
        ));
    }
    Ok(GradedAnalysis {
        a: GradedMap { i, j, matrix: a },
        s_k: GradedMap { i, j, matrix: sk },
        u,
        nilpotent,
        kernel_dim,
        top_image_is_kp_line,
        exact,
        containment,
    })
}

/// The solution `x_c` of `A(x) - x delta^{-1} = delta^{-1}` on `V_{1,p^r-1}`.
#[derive(Clone, Debug)]
pub struct Conjugator {
    pub c0: Fe,
    pub z: Vec<Fe>,
    /// Known modulo `q^{p^r}`.
    pub x: BElem,
    pub delta_inv: BElem,
    /// The congruence on `V_{1,p^r-1}`, by substitution.
    pub residual_zero: bool,
    /// `(1+x)^{-1} alpha (1+x) = alpha + c` modulo `q^{-1}`, the precision
    /// `x mod q^{p^r}` determines.
    pub conjugation_zero: bool,
}

fn require_lab_shape(s: &Stratum) -> Result<(), LabError> {
    if s.e_rel != s.n as i64 + 1 {
        return Err(LabError::Unsupported(format!(
            "alpha at level {} but the conjugator needs level -(1 + p^r)",
            -s.e_rel
        )));
    }
    Ok(())
}

/// `c = c0 pi_K^{-1}` as an element of `B`.
fn central(s: &Stratum, c0: Fe, prec_rel: i64) -> BElem {
    let n = s.n as i64;
    BElem::scalar(s.kr(), s.n, c0, -n, -n + prec_rel)
}

pub fn solve_conjugator(s: &Stratum, c: &LFElem) -> Result<Conjugator, LabError> {
    require_lab_shape(s)?;
    if c.field() != &s.k {
        return Err(FieldError::FieldMismatch.into());
    }
    let (v, c0) = c.leading().ok_or(LabError::WrongValuation(i64::MIN))?;
    if v != -1 {
        return Err(LabError::WrongValuation(v));
    }
    let kr = s.kr().clone();
    let n = s.n as i64;
    let (i, j) = (1, n - 1);
    let w = working_levels(s.n);
    let cb = central(s, c0, w);
    let delta_inv = s.alpha_inv.mul(&cb);
    let target = delta_inv
        .coords(i, j)
        .ok_or(FieldError::InsufficientPrecision { needed: n })?;
    let a = map_matrix(s, i, j, |x| s.big_a(x))?;
    let a_top = linalg::mat_pow(&kr, &a, n as u32 - 1);
    let z = linalg::solve(&kr, &a_top, &target).ok_or(LabError::NoConjugatorSeed)?;
    // X_c(z) = sum_{k=0}^{m} A^{m-k}(z) delta^{-k}, m = p^r - 2
    let m = n - 2;
    let mut x = BElem::zero(&kr, s.n, i, i + j);
    for kk in 0..=m {
        let az = linalg::mat_vec(&kr, &linalg::mat_pow(&kr, &a, (m - kk) as u32), &z);
        let term = BElem::from_coords(&kr, s.n, i, j, &az).mul(&delta_inv.pow(kk as u32));
        x = x.add(&term.with_start(i).truncate(i + j));
    }
    let x = x.with_start(i);
    let lhs = s.big_a(&x).sub(&x.mul(&delta_inv)).truncate(i + j);
    let residual_zero = lhs.coords(i, j) == Some(target);
    let prec = i + j;
    let one = BElem::one(&kr, s.n, prec);
    let ux = one.add(&x.with_start(0));
    let uxi = ux
        .inv()
        .ok_or_else(|| LabError::Singular("1 + x".into()))?;
    let conj = uxi.mul(&s.alpha).mul(&ux);
    let diff = conj.sub(&s.alpha.add(&cb));
    let conjugation_zero = (-s.e_rel..-1).all(|l| diff.comp(l).is_some_and(|d| d.iter().all(|x| x.is_zero())));
    Ok(Conjugator {
        c0,
        z,
        x,
        delta_inv,
        residual_zero,
        conjugation_zero,
    })
}

/// One sample `y = zeta c alpha^{-1}` of the identity checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySample {
    pub zeta: Fe,
    /// Conjugated simple character on `1 + y`, through `g = (1+v)(1+h)`.
    pub conjugated: QmodZ,
    /// `psi_B(-c x_c y)`.
    pub eta: QmodZ,
    /// `eps(-alpha^{1-p^r} c^{p^r} y)`.
    pub eta_by_eps: QmodZ,
    /// `psi_{K,c}(det(1+y))`.
    pub chi: QmodZ,
    /// `det(1+y)` and `1 + zeta^{p^r} c^{p^r} det alpha^{-1}` agree mod `U^2_K`.
    pub det_identity: bool,
    /// `eps(zeta) = psi_K(zeta)` through `A^{p^r-1}(zeta_0)`.
    pub eps_identity: bool,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub c0: Fe,
    pub samples: Vec<IdentitySample>,
}

impl IdentityReport {
    /// Identities (i), (ii), (iii) and the two forms of `eta_c`.
    pub fn all_hold(&self) -> bool {
        self.samples.iter().all(|x| {
            x.conjugated == x.eta && x.eta == x.eta_by_eps && x.det_identity && x.eps_identity
        })
    }

    /// Whether `eta_c = chi_c` on every sample.
    pub fn characters_agree(&self) -> bool {
        self.samples.iter().all(|x| x.eta == x.chi)
    }
}

/// `eps` on a level-0 element of `KP`: `psi_B(b)` for any `b` with
/// `A^{p^r-1}(b) = a`; the value does not depend on the choice of `b`.
fn eps_on_scalar(s: &Stratum, a_top0: &Mat, kernel: &[Vec<Fe>], a: Fe) -> Result<QmodZ, LabError> {
    let kr = s.kr();
    let b = linalg::solve(kr, a_top0, &vec![a; s.n])
        .ok_or_else(|| LabError::Singular("eps preimage".into()))?;
    let val = s.psi_b(&BElem::from_coords(kr, s.n, 0, 1, &b))?;
    for kv in kernel {
        let shifted: Vec<Fe> = b.iter().zip(kv).map(|(&x, &y)| kr.add(x, y)).collect();
        if s.psi_b(&BElem::from_coords(kr, s.n, 0, 1, &shifted))? != val {
            return Err(LabError::Inconsistent("psi_B is not constant on fibres of s".into()));
        }
    }
    Ok(val)
}

/// Splits `g` in `U^1_{KP} U^h_b` as `(1+v)(1+h)` by peeling scalar levels.
fn decompose(s: &Stratum, g: &BElem, h_level: i64) -> Result<(BElem, BElem), LabError> {
    let kr = s.kr();
    let prec = g.prec();
    let mut rem = g.clone();
    let mut v = BElem::one(kr, s.n, prec);
    for l in 1..h_level {
        let d = rem
            .comp(l)
            .ok_or_else(|| LabError::Decomposition(format!("level {l} beyond precision {prec}")))?;
        if d.iter().any(|&x| x != d[0]) {
            return Err(LabError::Decomposition(format!("level {l} is not in KP")));
        }
        if d[0].is_zero() {
            continue;
        }
        let f = BElem::one(kr, s.n, prec).add(&BElem::scalar(kr, s.n, d[0], l, prec));
        let fi = f.inv().expect("unit");
        rem = fi.mul(&rem).truncate(prec);
        v = v.mul(&f).truncate(prec);
    }
    let h = rem.sub(&BElem::one(kr, s.n, prec));
    if h.valuation().is_some_and(|x| x < h_level) {
        return Err(LabError::Decomposition("remainder below the H^1 level".into()));
    }
    Ok((v, h))
}

pub fn verify_conjugation_identities(
    s: &Stratum,
    conj: &Conjugator,
    zetas: &[Fe],
) -> Result<IdentityReport, LabError> {
    require_lab_shape(s)?;
    let kr = s.kr().clone();
    let n = s.n as i64;
    let c0 = conj.c0;
    let w = working_levels(s.n);
    let cb = central(s, c0, w);
    let c_el = LFElem::monomial(&s.k, c0, -1, 3);
    let det_a = s.det_alpha()?;
    let h_level = 1 + (1 + n) / 2;
    // precision budget: theta(1+h) = psi_B(alpha h) reads h on levels < 2 + p^r
    let g_prec = n + 2;
    let x_lift = pad(&conj.x.with_start(0), g_prec);
    let ux = BElem::one(&kr, s.n, g_prec).add(&x_lift);
    let uxi = ux.inv().ok_or_else(|| LabError::Singular("1 + x".into()))?;
    let a0m = map_matrix(s, 0, 1, |x| s.big_a(x))?;
    let a_top0 = linalg::mat_pow(&kr, &a0m, n as u32 - 1);
    let kernel0 = linalg::nullspace(&kr, &a_top0);
    let alpha_pow = s.alpha_inv.pow(n as u32 - 1);
    let mut samples = Vec::with_capacity(zetas.len());
    for &zeta in zetas {
        let y = s.alpha_inv.mul(&cb).scale(zeta);
        if y.valuation() != Some(1) || !y.is_scalar() {
            return Err(LabError::Inconsistent("y is not a prime element of KP".into()));
        }
        // (i)
        let uy = BElem::one(&kr, s.n, g_prec).add(&y.truncate(g_prec));
        let g = ux.mul(&uy).mul(&uxi).truncate(g_prec);
        let (v, h) = decompose(s, &g, h_level)?;
        if !v.mul(&BElem::one(&kr, s.n, g_prec).add(&h)).sub(&g).is_zero() {
            return Err(LabError::Decomposition("(1+v)(1+h) does not recover g".into()));
        }
        let conjugated = s.psi_b(&s.alpha.mul(&h))?;
        let eta = s.psi_b(&cb.mul(&conj.x.with_start(0)).mul(&y).neg())?;
        // eta again, through eps of a level-0 element of KP
        let arg = alpha_pow.mul(&cb.pow(n as u32)).mul(&y).neg();
        let lvl0 = arg
            .comp(0)
            .ok_or(FieldError::InsufficientPrecision { needed: 1 })?;
        if arg.valuation().is_some_and(|x| x < 0) || lvl0.iter().any(|&x| x != lvl0[0]) {
            return Err(LabError::Inconsistent("eps argument is not a level-0 scalar".into()));
        }
        let eta_by_eps = eps_on_scalar(s, &a_top0, &kernel0, lvl0[0])?;
        // (ii)
        let one_y = BElem::one(&kr, s.n, 2 * n + 2).add(&y.truncate(2 * n + 2));
        let det_y = LFElem::from_series(
            &s.k,
            series_det(&kr, one_y.to_matrix()).ok_or(FieldError::NotInvertible)?,
        )
        .truncate(2);
        let rhs = c_el
            .pow(n)?
            .scale(kr.pow(zeta, n))
            .div(&det_a)?
            .add(&LFElem::one(&s.k, 4))?
            .truncate(2);
        let det_identity = det_y.abs_prec() >= 2 && rhs.abs_prec() >= 2 && det_y.agrees_with(&rhs);
        let chi = s.psi.eval(&det_y.sub(&LFElem::one(&s.k, 2))?.mul(&c_el)?)?;
        // (iii)
        let mut zeta0 = vec![Fe::ZERO; s.n];
        zeta0[0] = zeta;
        let img = linalg::mat_vec(&kr, &a_top0, &zeta0);
        let eps_identity = img.iter().all(|&x| x == zeta)
            && eps_on_scalar(s, &a_top0, &kernel0, zeta)? == s.psi_k(zeta);
        samples.push(IdentitySample {
            zeta,
            conjugated,
            eta,
            eta_by_eps,
            chi,
            det_identity,
            eps_identity,
        });
    }
    Ok(IdentityReport { c0, samples })
}

/// Pads with zero components up to `prec` (one admissible lift).
fn pad(x: &BElem, prec: i64) -> BElem {
    if x.prec() >= prec {
        return x.truncate(prec);
    }
    let mut out = BElem::zero(x.residue_field(), x.n(), x.v(), prec);
    for l in x.v()..x.prec() {
        out.set_comp(l, x.comp(l).expect("in range"));
    }
    out
}

/// Lab-size limits for the brute-force root set.
pub const ORACLE_MAX_PR: u64 = 4;
pub const ORACLE_MAX_Q: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Residue parts `c0` of `c = c0 pi_K^{-1}` with `eta_c = chi_c`.
    pub solutions: Vec<Fe>,
    pub candidates: usize,
}

/// All `c` at valuation `-1` with `eta_c = chi_c` on `U^1_{KP} / U^2_{KP}`,
/// found by solving for `x_c` and evaluating both characters at every
/// `y = zeta c alpha^{-1}`.
pub fn oracle_root_set(
    f: &LocalFieldDesc,
    r: u32,
    det_mu: Fe,
    k: &LocalFieldDesc,
) -> Result<OracleResult, LabError> {
    let pr = (f.p() as u64).pow(r);
    if pr > ORACLE_MAX_PR {
        return Err(LabError::Budget { what: "p^r", size: pr });
    }
    if k.q() as u64 > ORACLE_MAX_Q {
        return Err(LabError::Budget { what: "q_K", size: k.q() as u64 });
    }
    if !f.is_ancestor_of(k) {
        return Err(FieldError::NotAncestor.into());
    }
    let e_rel = (k.e() / f.e()) as u64;
    if e_rel < pr + 1 {
        // a character with sw = 1 fixing sigma_K forces e(K|F) >= 1 + p^r
        return Ok(OracleResult {
            solutions: Vec::new(),
            candidates: 0,
        });
    }
    if e_rel > pr + 1 {
        return Err(LabError::Unsupported(format!(
            "e(K|F) = {e_rel}; the lab models e(K|F) = 1 + p^r"
        )));
    }
    let s = lift_stratum(k, f, r, det_mu)?;
    let units: Vec<Fe> = k.residue().units().collect();
    let mut solutions = Vec::new();
    for &c0 in &units {
        let c = LFElem::monomial(k, c0, -1, 1);
        let conj = solve_conjugator(&s, &c)?;
        if !conj.residual_zero || !conj.conjugation_zero {
            return Err(LabError::Inconsistent("conjugator residual".into()));
        }
        let report = verify_conjugation_identities(&s, &conj, &units)?;
        if !report.all_hold() {
            return Err(LabError::Inconsistent(format!(
                "identities fail at c0 = {}",
                k.residue().format(c0)
            )));
        }
        if report.characters_agree() {
            solutions.push(c0);
        }
    }
    Ok(OracleResult {
        solutions,
        candidates: units.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagship_oracle() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let t = f.unramified(2).unwrap().tame(3, 0).unwrap();
        let res = oracle_root_set(&f, 1, Fe::ONE, &t).unwrap();
        assert_eq!(res.solutions.len(), 3);
        assert!(oracle_root_set(&f, 1, Fe::ONE, &f).unwrap().solutions.is_empty());
    }

    #[test]
    fn small_n_two_stratum() {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let s = build_stratum(&f, 1, Fe::ONE).unwrap();
        assert!(s.invariants().all());
        let d = s.det_alpha().unwrap();
        assert_eq!(d.leading(), Some((-1, Fe::ONE)));
        let g = graded_map_analysis(&s, 1, 1).unwrap();
        assert_eq!(g.a.dim(), 2);
        assert_eq!(linalg::rank(f.residue(), &g.a.matrix), 1);
        assert!(g.nilpotent && g.exact && g.containment && g.top_image_is_kp_line);
    }
}
