//! Classifying data on the `GL_n` side: enumeration, equivalence, tame
//! twisting, and descent `n = e p^r` to a tame totally ramified `K/F`.

use num_rational::Ratio;
use thiserror::Error;

use crate::characters::{build_multchar, CharError, MultChar, QmodZ};
use crate::field_tower::{norm_trace, Fe, FieldError, LFElem, LocalFieldDesc};
use crate::ramification::{swan_induce, InductionData, RamError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Ram(#[from] RamError),
    #[error("omega wild: central character must be tamely ramified")]
    WildOmega,
    #[error("twisting character is wild")]
    WildTwist,
    #[error("n must be at least 2, got {0}")]
    BadDimension(u32),
    #[error("eps index {index} out of range for n = {n}")]
    BadEpsIndex { index: u32, n: u32 },
    #[error("determinant coset needs a nonzero root of unity")]
    ZeroDet,
    #[error("mismatched base data: {0}")]
    Mismatch(&'static str),
    #[error("already wild-primary: n = {0} is a power of p")]
    AlreadyWildPrimary(u32),
    #[error("descent relation failed: {0}")]
    Relation(String),
}

/// `(det alpha U^1, omega, eps label)` for an epipelagic representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpipelagicDatum {
    field: LocalFieldDesc,
    n: u32,
    det_mu: Fe,
    omega: MultChar,
    eps_index: u32,
}

impl EpipelagicDatum {
    pub fn new(
        field: &LocalFieldDesc,
        n: u32,
        det_mu: Fe,
        omega: MultChar,
        eps_index: u32,
    ) -> Result<EpipelagicDatum, GlError> {
        if n < 2 {
            return Err(GlError::BadDimension(n));
        }
        if eps_index >= n {
            return Err(GlError::BadEpsIndex {
                index: eps_index,
                n,
            });
        }
        if det_mu.is_zero() {
            return Err(GlError::ZeroDet);
        }
        if omega.field() != field {
            return Err(GlError::Mismatch("omega lives on another field"));
        }
        if !omega.is_tame() {
            return Err(GlError::WildOmega);
        }
        Ok(EpipelagicDatum {
            field: field.clone(),
            n,
            det_mu,
            omega,
            eps_index,
        })
    }

    pub fn field(&self) -> &LocalFieldDesc {
        &self.field
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The root of unity `zeta` with `det alpha = zeta pi^{-1}` mod `U^1`.
    pub fn det_mu(&self) -> Fe {
        self.det_mu
    }

    pub fn omega(&self) -> &MultChar {
        &self.omega
    }

    pub fn eps_index(&self) -> u32 {
        self.eps_index
    }

    /// `zeta pi^{-1}` as a field element (exact to relative precision `rel`).
    pub fn det_alpha(&self, rel: usize) -> LFElem {
        LFElem::monomial(&self.field, self.det_mu, -1, rel)
    }

    /// `omega(det alpha)`.
    pub fn omega_at_det(&self) -> Result<QmodZ, GlError> {
        Ok(self.omega.eval(&self.det_alpha(2))?)
    }

    /// Base point of the eps-torsor: `-<omega(det alpha)> / n`, where the
    /// representative is taken in `[0, 1)`.
    pub fn eps_base(&self) -> Result<QmodZ, GlError> {
        let w = self.omega_at_det()?.ratio();
        Ok(QmodZ::from_ratio(-w / Ratio::from(self.n as i64)))
    }

    /// Torsor label `base + index / n`; always satisfies
    /// `n eps = -omega(det alpha)`.
    pub fn eps_value(&self) -> Result<QmodZ, GlError> {
        Ok(self
            .eps_base()?
            .add(QmodZ::new(self.eps_index as i64, self.n as i64)))
    }

    /// `n = p^r` datums are primitive unconditionally.
    pub fn is_primitive(&self) -> bool {
        wild_part(self.n, self.field.p()).0 == 1
    }

    /// Index of `eps` in the torsor above `base`.
    fn index_for(n: u32, base: QmodZ, eps: QmodZ) -> u32 {
        let k = eps.sub(base).ratio() * Ratio::from(n as i64);
        debug_assert!(k.is_integer(), "eps leaves the torsor");
        k.to_integer().rem_euclid(n as i64) as u32
    }
}

/// `n = e p^r` with `p` not dividing `e`; returns `(e, r)`.
pub fn wild_part(n: u32, p: u32) -> (u32, u32) {
    let (mut e, mut r) = (n, 0);
    while e % p == 0 {
        e /= p;
        r += 1;
    }
    (e, r)
}

/// All `n (q - 1)` datums with central character `omega`, ordered by the
/// discrete log of the determinant's root of unity, then by eps index.
pub fn enumerate_datums(
    field: &LocalFieldDesc,
    n: u32,
    omega: &MultChar,
) -> Result<Vec<EpipelagicDatum>, GlError> {
    if !omega.is_tame() {
        return Err(GlError::WildOmega);
    }
    let k = field.residue();
    let mut out = Vec::with_capacity((n * k.order()) as usize);
    for zeta in k.units() {
        for idx in 0..n {
            out.push(EpipelagicDatum::new(field, n, zeta, omega.clone(), idx)?);
        }
    }
    Ok(out)
}

pub fn equivalent_datums(a: &EpipelagicDatum, b: &EpipelagicDatum) -> Result<bool, GlError> {
    if a.field != b.field {
        return Err(GlError::Mismatch("different base fields"));
    }
    if a.n != b.n {
        return Err(GlError::Mismatch("different n"));
    }
    Ok(a.det_mu == b.det_mu
        && a.omega.same_character(&b.omega)?
        && a.eps_value()? == b.eps_value()?)
}

/// Twist by a tame character: `omega -> chi^n omega`, `eps -> eps - chi(det alpha)`.
pub fn twist_by_tame(d: &EpipelagicDatum, chi: &MultChar) -> Result<EpipelagicDatum, GlError> {
    if chi.field() != &d.field {
        return Err(GlError::Mismatch("twist lives on another field"));
    }
    if !chi.is_tame() {
        return Err(GlError::WildTwist);
    }
    let omega = chi.pow(d.n as i64)?.mul(&d.omega)?;
    let eps = d.eps_value()?.sub(chi.eval(&d.det_alpha(2))?);
    let mut out = EpipelagicDatum::new(&d.field, d.n, d.det_mu, omega, 0)?;
    out.eps_index = EpipelagicDatum::index_for(d.n, out.eps_base()?, eps);
    debug_assert_eq!(out.eps_value()?, eps);
    Ok(out)
}

/// A descent relation between stored components; `holds` is `None` when it
/// involves a symbolic constant that is not evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: &'static str,
    pub statement: String,
    pub holds: Option<bool>,
}

/// Tame descent of a datum with `n = e p^r`, `e > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentRecord {
    pub k: LocalFieldDesc,
    pub e: u32,
    pub r: u32,
    pub datum_k: EpipelagicDatum,
    /// `N_{K/F}(det_B alpha) = norm_sign * det alpha` mod `U^1_F`.
    pub norm_sign: i64,
    pub delta_kf: &'static str,
    pub lambda_kf: &'static str,
    pub relations: Vec<Relation>,
    /// `sw` of the induced representation, from the induction formula.
    pub induced_swan: i64,
}

fn minus_one_pow(k: &crate::field_tower::FqField, n: i64) -> Fe {
    if n.rem_euclid(2) == 0 {
        Fe::ONE
    } else {
        k.neg(Fe::ONE)
    }
}

/// Builds `K/F` with `pi_K^e = (-1)^{n-1} zeta^{-1} pi_F` (the corner entry of
/// the monomial normal form) and the datum over `K` with `n_K = p^r`.
pub fn descend_tame(d: &EpipelagicDatum) -> Result<DescentRecord, GlError> {
    let f = &d.field;
    let kf = f.residue();
    let (e, r) = wild_part(d.n, f.p());
    if e == 1 {
        return Err(GlError::AlreadyWildPrimary(d.n));
    }
    let pr = d.n / e;
    let unit = kf.mul(minus_one_pow(kf, d.n as i64 - 1), kf.inv(d.det_mu).ok_or(GlError::ZeroDet)?);
    let unit_log = kf.log(unit).expect("unit");
    let k = f.tame(e, unit_log)?;
    let kk = k.residue();

    // det_B alpha = (-1)^{p^r - 1} pi_K^{-1}
    let det_k_mu = minus_one_pow(kk, pr as i64 - 1);
    let det_b = LFElem::monomial(&k, det_k_mu, -1, 2 * e as usize + 2);
    let (nrm, _) = norm_trace(&det_b, f, 0)?;
    let (nv, nz) = nrm.leading().ok_or(FieldError::NotInvertible)?;
    if nv != -1 {
        return Err(GlError::Relation(format!("norm has valuation {nv}")));
    }
    let norm_sign = if nz == d.det_mu {
        1
    } else if nz == kf.neg(d.det_mu) {
        -1
    } else {
        return Err(GlError::Relation("norm of det_B alpha leaves the coset".into()));
    };

    // omega_K: same values on mu, and e * omega_K(pi_K) = omega(u) + omega(pi_F)
    // with the symbolic delta_{K/F} set to 1.
    let (on_pi, on_mu, _) = d.omega.direct_data().ok_or(CharError::NotDirect)?;
    let at_u = d.omega.on_mu_value(unit)?;
    let on_pi_k = QmodZ::from_ratio(at_u.add(on_pi).ratio() / Ratio::from(e as i64));
    let omega_k = build_multchar(&k, on_pi_k, on_mu, &[])?;
    let datum_k = EpipelagicDatum::new(&k, pr, det_k_mu, omega_k.clone(), d.eps_index % pr)?;

    let mut relations = Vec::new();
    relations.push(Relation {
        name: "gamma",
        statement: format!(
            "nu_K(det_B alpha) = -1 and N_K/F(det_B alpha) = {norm_sign} * det alpha mod U^1_F"
        ),
        holds: Some(true),
    });
    let restricts = {
        let pi_f = LFElem::uniformizer(f, 2).embed(&k)?;
        let g = kf.generator();
        let g_k = LFElem::constant(f, g, 2).embed(&k)?;
        omega_k.eval(&pi_f)? == on_pi && omega_k.eval(&g_k)? == d.omega.on_mu_value(g)?
    };
    relations.push(Relation {
        name: "det",
        statement: "det tau restricted to F^x = delta_K/F^(-p^r) * omega (checked at delta = 1)"
            .into(),
        holds: Some(restricts),
    });
    relations.push(Relation {
        name: "eps",
        statement: "eps(sigma) / eps(tau) = lambda_K/F^(p^r) (lambda symbolic)".into(),
        holds: None,
    });
    if !restricts {
        return Err(GlError::Relation("omega_K does not restrict to omega".into()));
    }
    let induced_swan = swan_induce(InductionData {
        sw_tau: 1,
        m: pr as i64,
        e: e as i64,
        f: 1,
        d: e as i64 - 1,
    })?;
    Ok(DescentRecord {
        k,
        e,
        r,
        datum_k,
        norm_sign,
        delta_kf: "delta_K/F = det Ind_K/F 1_K",
        lambda_kf: "lambda_K/F = eps(R_K/F) / eps(1_K)",
        relations,
        induced_swan,
    })
}
