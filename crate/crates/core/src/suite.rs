//! The invariant suite behind `epi verify`: named checks over fixed cases,
//! with optional fault injection on one computed coefficient.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characters::{build_multchar, MultChar, QmodZ};
use crate::field_tower::{embeds, Fe, LFElem, LocalFieldDesc, Series};
use crate::galois_side::{
    closed_form_roots, congruence_solutions, delta_characters, galois_orbits,
    imprimitivity_field, lagrangian_differents, resolve_unramified_twist, twist_order,
    unramified_candidates, xi_restriction, ImprimitivityResult, KernelFieldDesc, XiRestriction,
};
use crate::gl_side::{enumerate_datums, equivalent_datums, twist_by_tame, EpipelagicDatum};
use crate::ramification::{
    herbrand_and_different, swan_induce, InductionData, RamFiltration, Rat,
};
use crate::strata_lab::belem::BElem;
use crate::strata_lab::{graded_map_analysis, lift_stratum, oracle_root_set, solve_conjugator,
    verify_conjugation_identities};

/// A `(p, f, r)` verification case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Case {
    pub name: &'static str,
    pub p: u32,
    pub f: u32,
    pub r: u32,
    /// Whether the matrix-level oracle runs (lab budget permitting).
    pub oracle: bool,
}

pub const CASES: [Case; 5] = [
    Case { name: "p2r1", p: 2, f: 1, r: 1, oracle: true },
    Case { name: "p3r1", p: 3, f: 1, r: 1, oracle: true },
    Case { name: "p2f2r1", p: 2, f: 2, r: 1, oracle: true },
    Case { name: "p5r1", p: 5, f: 1, r: 1, oracle: false },
    Case { name: "p2r2", p: 2, f: 1, r: 2, oracle: false },
];

pub fn case_by_name(name: &str) -> Option<Case> {
    CASES.iter().copied().find(|c| c.name == name)
}

/// Single-coefficient perturbations of computed data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Multiply the first root by a generator of `k_T`.
    Root,
    /// Multiply the recorded right-hand side of the congruence by a generator.
    Det,
    /// Shift the first Delta character's value on `pi_T` by `1/p`.
    Delta,
    /// Multiply the graded coefficient of `xi` by a generator.
    Xi,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Fault, String> {
        match s {
            "root" => Ok(Fault::Root),
            "det" => Ok(Fault::Det),
            "delta" => Ok(Fault::Delta),
            "xi" => Ok(Fault::Xi),
            other => Err(format!("unknown fault {other:?}")),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Fault::Root => "root",
            Fault::Det => "det",
            Fault::Delta => "delta",
            Fault::Xi => "xi",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub criterion: u32,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseReport {
    pub case: Case,
    pub checks: Vec<CheckResult>,
}

impl CaseReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }
}

/// Pipeline output for one determinant coset.
struct Computed {
    datum: EpipelagicDatum,
    imp: ImprimitivityResult,
    kernel: KernelFieldDesc,
    xi: XiRestriction,
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn compute(case: &Case, base: &LocalFieldDesc, fault: Option<Fault>) -> Result<Vec<Computed>, String> {
    let n = case.p.pow(case.r);
    let mut out = Vec::new();
    for zeta in base.residue().units() {
        let datum = EpipelagicDatum::new(base, n, zeta, MultChar::trivial(base), 0)
            .map_err(|e| e.to_string())?;
        let mut imp = imprimitivity_field(&datum).map_err(|e| e.to_string())?;
        let kt = imp.t.residue().clone();
        let g = kt.generator();
        if fault == Some(Fault::Root) {
            imp.roots[0] = kt.mul(imp.roots[0], g);
        }
        if fault == Some(Fault::Det) {
            imp.rhs.1 = kt.mul(imp.rhs.1, g);
        }
        let mut kernel = match delta_characters(&imp, &datum) {
            Ok(k) => k,
            // a faulted root set may not be a group; rebuild from the clean one
            Err(_) if fault == Some(Fault::Root) => {
                let clean = imprimitivity_field(&datum).map_err(|e| e.to_string())?;
                let mut k = delta_characters(&clean, &datum).map_err(|e| e.to_string())?;
                k.roots = imp.roots.clone();
                k
            }
            Err(e) => return Err(e.to_string()),
        };
        if fault == Some(Fault::Delta) {
            let (on_pi, on_mu, wild) = kernel.deltas[0].direct_data().ok_or("pullback delta")?;
            let c = LFElem::monomial(&imp.t, wild.ok_or("tame delta")?, -1, 1);
            kernel.deltas[0] = build_multchar(
                &imp.t,
                on_pi.add(QmodZ::new(1, case.p as i64)),
                on_mu,
                &[(1, c)],
            )
            .map_err(|e| e.to_string())?;
        }
        let mut xi = xi_restriction(&kernel, &datum).map_err(|e| e.to_string())?;
        if fault == Some(Fault::Xi) {
            xi.graded_coeff = kt.mul(xi.graded_coeff, g);
        }
        out.push(Computed {
            datum,
            imp,
            kernel,
            xi,
        });
    }
    Ok(out)
}

fn check_root_count(case: &Case, data: &[Computed]) -> Outcome {
    let pr = (case.p as u64).pow(case.r);
    let want = pr * pr - 1;
    for c in data {
        let t = &c.imp.t;
        ensure(c.imp.roots.len() as u64 == want, || {
            format!("{} roots, expected {want}", c.imp.roots.len())
        })?;
        ensure(t.e() as u64 == pr + 1, || format!("e(T|F) = {}", t.e()))?;
        ensure((t.q() as u64 - 1).is_multiple_of(want), || format!("q_T = {}", t.q()))?;
        let closed = closed_form_roots(t, &c.datum).map_err(|e| e.to_string())?;
        ensure(closed == c.imp.roots, || "roots differ from the closed form".into())?;
        // every root satisfies the recorded congruence
        let k = t.residue();
        for &a in &c.imp.roots {
            let lead = LFElem::monomial(t, a, -1, 1)
                .pow(want as i64)
                .map_err(|e| e.to_string())?
                .leading();
            ensure(lead == Some(c.imp.rhs), || {
                format!("root {} misses the recorded right-hand side", k.format(a))
            })?;
        }
        for (l, count) in &c.imp.subfield_counts {
            ensure((*count as u64) < want, || format!("subfield {l} has {count} solutions"))?;
        }
    }
    Ok(format!("{} cosets, {want} roots each", data.len()))
}

fn check_oracle(case: &Case, base: &LocalFieldDesc, data: &[Computed]) -> Outcome {
    for c in data {
        let lab = oracle_root_set(base, case.r, c.datum.det_mu(), &c.imp.t).map_err(|e| e.to_string())?;
        ensure(lab.solutions == c.imp.roots, || {
            let k = c.imp.t.residue();
            format!("det {}: lab and polynomial root sets differ", k.format(c.datum.det_mu()))
        })?;
    }
    Ok(format!("{} cosets agree", data.len()))
}

/// Subfields and overfields of `T` inside the tame tower model.
pub fn lattice_fields(base: &LocalFieldDesc, t: &LocalFieldDesc, p: u32) -> Vec<LocalFieldDesc> {
    let mut out: Vec<LocalFieldDesc> = vec![base.clone()];
    let n_t = t.e() / base.e();
    let fp = t.parent().expect("T has a tame top step");
    let f_rel = t.f() / base.f();
    let mut push = |l: Option<LocalFieldDesc>| {
        if let Some(l) = l {
            if !out.contains(&l) && l.q() <= 1 << 14 {
                out.push(l);
            }
        }
    };
    push(Some(fp.clone()));
    push(Some(t.clone()));
    for deg in [2, 3] {
        push(t.unramified(deg).ok());
    }
    let m = (2..).find(|m| m % p != 0).expect("some m is prime to p");
    for u in 0..2 {
        push(t.tame(m, u).ok());
    }
    for dd in (1..f_rel).filter(|d| f_rel.is_multiple_of(*d)) {
        let fd = if dd == 1 { Some(base.clone()) } else { base.unramified(dd).ok() };
        if let Some(fd) = fd {
            for u in 0..fd.residue().order().min(3) {
                push(fd.tame(n_t, u).ok());
            }
        }
    }
    if let Ok(f2) = base.unramified(2 * f_rel) {
        for u in 0..4 {
            push(f2.tame(n_t, u).ok());
        }
        push(Some(f2));
    }
    if let Ok(ft) = fp.tame(n_t * m, 1) {
        push(Some(ft));
    }
    out
}

fn check_lattice(case: &Case, base: &LocalFieldDesc, data: &[Computed]) -> Outcome {
    let pr = (case.p as u64).pow(case.r);
    let full = pr * pr;
    let mut tested = 0;
    for c in data {
        let fields = lattice_fields(base, &c.imp.t, case.p);
        ensure(fields.len() >= 10, || format!("only {} lattice fields", fields.len()))?;
        for l in &fields {
            let order = twist_order(l, &c.datum).map_err(|e| e.to_string())?;
            let emb = embeds(&c.imp.t, l);
            ensure((order == full) == emb, || {
                format!("{l}: twist order {order}, T embeds: {emb}")
            })?;
            ensure(order <= full && is_power_of(order, case.p as u64), || {
                format!("{l}: twist order {order} is not a power of p up to p^2r")
            })?;
            tested += 1;
        }
        ensure(twist_order(base, &c.datum).map_err(|e| e.to_string())? == 1, || {
            "twist order over F is not 1".into()
        })?;
    }
    Ok(format!("{tested} field checks"))
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x > 1 && x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

fn check_delta_group(case: &Case, data: &[Computed]) -> Outcome {
    let pr = (case.p as u64).pow(case.r);
    for c in data {
        let kernel = &c.kernel;
        let t = &kernel.t;
        let k = t.residue();
        let size = kernel.group_table.len();
        ensure(size as u64 == pr * pr, || format!("group order {size}"))?;
        let elems: Vec<Fe> = std::iter::once(Fe::ZERO).chain(kernel.roots.iter().copied()).collect();
        let index: BTreeSet<Fe> = elems.iter().copied().collect();
        ensure(index.len() == size, || "repeated roots".into())?;
        // closure, recomputed from the roots themselves
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate() {
                let z = k.add(x, y);
                ensure(index.contains(&z), || "root set not closed under the group law".into())?;
                ensure(elems[kernel.group_table[i][j]] == z, || "group table disagrees".into())?;
            }
        }
        let det_t = c.datum.det_alpha(2).embed(t).map_err(|e| e.to_string())?;
        for (delta, &a) in kernel.deltas.iter().zip(&kernel.roots) {
            ensure(delta.sw() == 1, || format!("sw = {}", delta.sw()))?;
            let (_, _, wild) = delta.direct_data().ok_or("pullback delta")?;
            ensure(wild == Some(a), || "Delta does not extend psi_T(c y)".into())?;
            for z in k.units() {
                let v = delta
                    .eval(&LFElem::constant(t, z, 2))
                    .map_err(|e| e.to_string())?;
                ensure(v.is_zero(), || "Delta nontrivial on mu_T".into())?;
            }
            let at_det = delta.eval(&det_t).map_err(|e| e.to_string())?;
            ensure(at_det.is_zero(), || format!("Delta(det alpha) = {at_det}"))?;
            ensure(delta.pow(case.p as i64).map_err(|e| e.to_string())?.is_trivial().map_err(|e| e.to_string())?, || {
                "Delta^p is not trivial".into()
            })?;
        }
        ensure(kernel.norm_subgroup.index == pr * pr, || {
            format!("norm subgroup index {}", kernel.norm_subgroup.index)
        })?;
    }
    Ok(format!("elementary abelian of order {}", pr * pr))
}

fn check_conductors(case: &Case, data: &[Computed]) -> Outcome {
    let pr = (case.p as i64).pow(case.r);
    for c in data {
        let lag = lagrangian_differents(&c.kernel, case.r).map_err(|e| e.to_string())?;
        ensure(c.kernel.d_et == 2 * pr * pr - 2, || format!("d(E|T) = {}", c.kernel.d_et))?;
        ensure(lag.d_et == c.kernel.d_et, || {
            format!("Lagrangian path gives d(E|T) = {}", lag.d_et)
        })?;
        ensure(c.xi.swan == 1 + pr, || format!("sw(xi) = {}", c.xi.swan))?;
        ensure(c.xi.swan_by_induction == c.xi.swan, || "sw(xi) paths disagree".into())?;
        ensure(c.kernel.c_psi_e == pr * pr - 2, || format!("c(psi_E) = {}", c.kernel.c_psi_e))?;
        let induced = swan_induce(InductionData {
            sw_tau: c.xi.swan,
            m: 1,
            e: c.kernel.e_et as i64,
            f: 1,
            d: c.kernel.d_et,
        })
        .map_err(|e| e.to_string())?;
        ensure(induced == pr * (1 + pr), || format!("sw(Ind xi) = {induced}"))?;
    }
    Ok(format!("d(E|T) = {}, sw(xi) = {}", 2 * pr * pr - 2, 1 + pr))
}

fn check_herbrand(case: &Case) -> Outcome {
    let pr = (case.p as u64).pow(case.r);
    let filt = RamFiltration::new(vec![(0, pr), (1, pr), (2, 1)]).map_err(|e| e.to_string())?;
    let h = herbrand_and_different(&filt);
    ensure(h.d == 2 * pr as i64 - 2, || format!("d = {}", h.d))?;
    let psi2 = h.psi.eval(Rat::from(2)).map_err(|e| e.to_string())?;
    ensure(psi2 == Rat::from(1 + pr as i64), || format!("Psi(2) = {psi2}"))?;
    for i in 0..100 {
        let x = Ratio::new(i, 7);
        let back = h.phi.eval(h.psi.eval(x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(back == x, || format!("phi(Psi({x})) = {back}"))?;
    }
    Ok(format!("d = {}, Psi(2) = {psi2}", h.d))
}

fn check_classification(case: &Case, base: &LocalFieldDesc) -> Outcome {
    let n = case.p.pow(case.r);
    let omega = MultChar::trivial(base);
    let all = enumerate_datums(base, n, &omega).map_err(|e| e.to_string())?;
    let q = base.q();
    ensure(all.len() as u32 == n * (q - 1), || format!("{} datums", all.len()))?;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            ensure(!equivalent_datums(a, b).map_err(|e| e.to_string())?, || {
                "two enumerated datums are equivalent".into()
            })?;
        }
    }
    // unramified twists act freely and transitively on the eps labels
    let d = &all[0];
    let labels: BTreeSet<u32> = (0..n as i64)
        .map(|j| {
            let chi = MultChar::unramified(base, QmodZ::new(j, n as i64));
            twist_by_tame(d, &chi).map(|x| x.eps_index())
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(labels.len() as u32 == n, || format!("orbit of size {}", labels.len()))?;
    // a ramified tame twist moves omega by chi^n and eps by -chi(det alpha)
    let chi = build_multchar(base, QmodZ::new(1, 2 * n as i64), 1, &[]).map_err(|e| e.to_string())?;
    let tw = twist_by_tame(d, &chi).map_err(|e| e.to_string())?;
    let expect_eps = d
        .eps_value()
        .map_err(|e| e.to_string())?
        .sub(chi.eval(&d.det_alpha(2)).map_err(|e| e.to_string())?);
    ensure(tw.eps_value().map_err(|e| e.to_string())? == expect_eps, || "eps after twist".into())?;
    let expect_omega = chi.pow(n as i64).and_then(|x| x.mul(d.omega())).map_err(|e| e.to_string())?;
    ensure(tw.omega().same_character(&expect_omega).map_err(|e| e.to_string())?, || {
        "omega after twist".into()
    })?;
    Ok(format!("{} datums, eps orbit of size {n}", all.len()))
}

fn check_lab(case: &Case, base: &LocalFieldDesc, data: &[Computed]) -> Outcome {
    let n = case.p.pow(case.r) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut samples = 0;
    for c in data {
        let t = &c.imp.t;
        let s = lift_stratum(t, base, case.r, c.datum.det_mu()).map_err(|e| e.to_string())?;
        ensure(s.invariants().all(), || "stratum normal form".into())?;
        let kt = t.residue();
        let units: Vec<Fe> = kt.units().collect();
        for &c0 in &units {
            let cc = LFElem::monomial(t, c0, -1, 1);
            let conj = solve_conjugator(&s, &cc).map_err(|e| e.to_string())?;
            ensure(conj.residual_zero && conj.conjugation_zero, || "conjugator residual".into())?;
            let rep = verify_conjugation_identities(&s, &conj, &units).map_err(|e| e.to_string())?;
            ensure(rep.all_hold(), || format!("identities fail at c0 = {}", kt.format(c0)))?;
            samples += rep.samples.len();
        }
        // random perturbation of alpha inside U^{1+p^r}
        let prec = 4 * n + 8;
        let mut u = BElem::one(kt, n as usize, prec);
        for l in (1 + n)..prec {
            let d: Vec<Fe> = (0..n).map(|_| kt.exp(rng.gen_range(0..kt.q() as i64))).collect();
            u.set_comp(l, d);
        }
        let sp = s.perturbed(&u).map_err(|e| e.to_string())?;
        for i in 0..3 {
            for j in 1..=n {
                let g = graded_map_analysis(&s, i, j).map_err(|e| e.to_string())?;
                ensure(g.nilpotent && g.kernel_dim == j as usize, || {
                    format!("A on V_({i},{j}) is not nilpotent of type (j, .., j)")
                })?;
                ensure(g.exact && g.top_image_is_kp_line && g.containment, || {
                    format!("exactness on V_({i},{j})")
                })?;
                let gp = graded_map_analysis(&sp, i, j).map_err(|e| e.to_string())?;
                ensure(gp.a == g.a && gp.u == g.u, || format!("perturbed alpha changes A on V_({i},{j})"))?;
            }
        }
    }
    Ok(format!("{samples} identity samples"))
}

fn check_orbits(case: &Case, data: &[Computed]) -> Outcome {
    let pr = case.p.pow(case.r) as usize;
    for c in data {
        let orbits = galois_orbits(&c.imp).map_err(|e| e.to_string())?;
        ensure(orbits.len() == pr - 1, || format!("{} orbits", orbits.len()))?;
        ensure(orbits.iter().all(|o| o.len() == pr + 1), || "orbit sizes".into())?;
    }
    Ok(format!("{} orbits of size {}", pr - 1, pr + 1))
}

fn check_xi(case: &Case, base: &LocalFieldDesc, data: &[Computed]) -> Outcome {
    let n = case.p.pow(case.r);
    let pr = n as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe7a);
    for c in data {
        let xi = &c.xi;
        let k = xi.t.residue().clone();
        ensure(k.pow(xi.beta_leading, pr * pr) == xi.beta_norm_coset, || {
            "beta does not have norm det alpha".into()
        })?;
        ensure(xi.graded_coeff == k.pow(xi.beta_leading, pr), || {
            "graded coefficient is not tau b^(p^r)".into()
        })?;
        let rel = (3 * (pr * pr + pr) + 4) as usize;
        let beta = xi.beta_series(rel);
        for _ in 0..10 {
            let mut coeffs = vec![Fe::ONE];
            coeffs.extend((1..rel).map(|_| k.exp(rng.gen_range(0..k.q() as i64))));
            let u = Series::new(k.clone(), 0, coeffs);
            let beta2 = beta.mul(&u);
            for a in k.prime_basis() {
                let mut xs = vec![a];
                xs.extend((1..4).map(|_| k.exp(rng.gen_range(0..k.q() as i64))));
                let x = Series::new(k.clone(), 1 + pr, xs);
                let direct = xi.eval_series(&beta2, &x).map_err(|e| e.to_string())?;
                ensure(direct == xi.graded_value(a), || {
                    "xi changes under a perturbation of beta".into()
                })?;
            }
        }
        let cands = unramified_candidates(&c.datum).map_err(|e| e.to_string())?;
        for idx in 0..n {
            let d = EpipelagicDatum::new(base, n, c.datum.det_mu(), c.datum.omega().clone(), idx)
                .map_err(|e| e.to_string())?;
            let pick = resolve_unramified_twist(&d, &cands).map_err(|e| e.to_string())?;
            ensure(pick == idx as usize, || format!("eps index {idx} resolves to {pick}"))?;
        }
    }
    Ok(format!("10 perturbations per coset, {n} twist indices resolved"))
}

/// Runs every check for `case`.
pub fn run_case(case: &Case, fault: Option<Fault>) -> CaseReport {
    let mut checks = Vec::new();
    let mut push = |name: &'static str, criterion: u32, out: Outcome| {
        let (pass, detail) = match out {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(CheckResult {
            name,
            criterion,
            pass,
            detail,
        });
    };
    let base = match LocalFieldDesc::base(case.p, case.f) {
        Ok(b) => b,
        Err(e) => {
            push("setup", 0, Err(e.to_string()));
            return CaseReport { case: *case, checks };
        }
    };
    let data = match compute(case, &base, fault) {
        Ok(d) => d,
        Err(e) => {
            push("pipeline", 0, Err(e));
            return CaseReport { case: *case, checks };
        }
    };
    push("root_count", 2, check_root_count(case, &data));
    if case.oracle {
        push("oracle_equivalence", 1, check_oracle(case, &base, &data));
    }
    push("twist_lattice", 3, check_lattice(case, &base, &data));
    push("delta_group", 4, check_delta_group(case, &data));
    push("conductors", 5, check_conductors(case, &data));
    push("herbrand", 6, check_herbrand(case));
    push("classification", 7, check_classification(case, &base));
    if case.oracle {
        push("lab_identities", 8, check_lab(case, &base, &data));
    }
    push("galois_orbits", 9, check_orbits(case, &data));
    push("xi_uniqueness", 10, check_xi(case, &base, &data));
    CaseReport { case: *case, checks }
}

/// Solutions of the congruence over `l` for the case's flagship datum; used
/// by `epi twists`.
pub fn lattice_report(
    d: &EpipelagicDatum,
) -> Result<Vec<(LocalFieldDesc, u64, bool)>, String> {
    let imp = imprimitivity_field(d).map_err(|e| e.to_string())?;
    lattice_fields(d.field(), &imp.t, d.field().p())
        .into_iter()
        .map(|l| {
            let sols = congruence_solutions(&l, d).map_err(|e| e.to_string())?;
            Ok((l.clone(), 1 + sols.len() as u64, embeds(&imp.t, &l)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagship_passes_and_faults_are_caught() {
        let case = case_by_name("p2r1").unwrap();
        let clean = run_case(&case, None);
        assert!(clean.pass(), "{:?}", clean.checks);
        for fault in [Fault::Root, Fault::Det, Fault::Delta, Fault::Xi] {
            let rep = run_case(&case, Some(fault));
            assert!(!rep.pass(), "fault {fault} went unnoticed");
        }
    }
}
