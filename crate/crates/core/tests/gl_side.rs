use epi_core::characters::{build_multchar, MultChar, QmodZ};
use epi_core::gl_side::{descend_tame, enumerate_datums, equivalent_datums, twist_by_tame, EpipelagicDatum};
use epi_core::strata_lab::build_stratum;
use epi_core::{norm_trace, LocalFieldDesc};
use proptest::prelude::*;

fn bases() -> Vec<LocalFieldDesc> {
    [(2, 1), (3, 1), (2, 2)]
        .into_iter()
        .map(|(p, f)| LocalFieldDesc::base(p, f).unwrap())
        .collect()
}

#[test]
fn enumeration_grid() {
    for f in bases() {
        for n in 2..=4u32 {
            for on_mu in 0..f.residue().order() as i64 {
                let omega = build_multchar(&f, QmodZ::new(1, 3), on_mu, &[]).unwrap();
                let all = enumerate_datums(&f, n, &omega).unwrap();
                assert_eq!(all.len() as u32, n * (f.q() - 1));
                for (i, a) in all.iter().enumerate() {
                    // the torsor identity n eps = -omega(det alpha)
                    let eps = a.eps_value().unwrap();
                    assert_eq!(eps.times(n as i64), a.omega_at_det().unwrap().neg());
                    for b in &all[i + 1..] {
                        assert!(!equivalent_datums(a, b).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn rejects_bad_datums() {
    let f = LocalFieldDesc::base(2, 1).unwrap();
    let triv = MultChar::trivial(&f);
    let one = f.residue().generator();
    assert!(EpipelagicDatum::new(&f, 1, one, triv.clone(), 0).is_err());
    assert!(EpipelagicDatum::new(&f, 2, one, triv.clone(), 2).is_err());
    assert!(EpipelagicDatum::new(&f, 2, epi_core::Fe::ZERO, triv, 0).is_err());
    let c = epi_core::LFElem::monomial(&f, one, -1, 1);
    let wild = build_multchar(&f, QmodZ::ZERO, 0, &[(1, c)]).unwrap();
    assert!(EpipelagicDatum::new(&f, 2, one, wild, 0).is_err());
}

proptest! {
    #[test]
    fn tame_twists_act_as_specified(
        fi in 0usize..3,
        n in 2u32..5,
        mu in 0u32..3,
        idx in 0u32..4,
        num in 0i64..24,
        on_mu in 0i64..3,
    ) {
        let f = &bases()[fi];
        let k = f.residue();
        let d = EpipelagicDatum::new(f, n, k.exp(mu as i64), MultChar::trivial(f), idx % n).unwrap();
        let chi = build_multchar(f, QmodZ::new(num, 24), on_mu, &[]).unwrap();
        let tw = twist_by_tame(&d, &chi).unwrap();
        let det = d.det_alpha(2);
        prop_assert_eq!(tw.det_mu(), d.det_mu());
        prop_assert_eq!(tw.eps_value().unwrap(), d.eps_value().unwrap().sub(chi.eval(&det).unwrap()));
        let omega = chi.pow(n as i64).unwrap().mul(d.omega()).unwrap();
        prop_assert!(tw.omega().same_character(&omega).unwrap());
        // twisting back by chi^-1 returns an equivalent datum
        let back = twist_by_tame(&tw, &chi.pow(-1).unwrap()).unwrap();
        prop_assert!(equivalent_datums(&back, &d).unwrap());
    }
}

#[test]
fn unramified_twists_permute_eps_labels() {
    for f in bases() {
        for n in 2..=4u32 {
            let d = EpipelagicDatum::new(&f, n, f.residue().generator(), MultChar::trivial(&f), 0).unwrap();
            let mut seen = Vec::new();
            for j in 0..n as i64 {
                let chi = MultChar::unramified(&f, QmodZ::new(j, n as i64));
                let tw = twist_by_tame(&d, &chi).unwrap();
                assert!(!seen.contains(&tw.eps_index()), "free action");
                seen.push(tw.eps_index());
            }
            assert_eq!(seen.len(), n as usize);
        }
    }
}

#[test]
fn descent_records() {
    // (p, f, n): n = e p^r with e > 1
    for (p, f, n) in [(2, 1, 6), (2, 1, 3), (3, 1, 6), (3, 1, 2), (2, 2, 6), (2, 1, 12)] {
        let base = LocalFieldDesc::base(p, f).unwrap();
        for zeta in base.residue().units() {
            let d = EpipelagicDatum::new(&base, n, zeta, MultChar::trivial(&base), 0).unwrap();
            if n % p != 0 {
                // n prime to p goes all the way down to GL_1
                assert!(descend_tame(&d).is_err());
                continue;
            }
            let rec = descend_tame(&d).unwrap();
            let pr = n / rec.e;
            assert_eq!(pr, p.pow(rec.r));
            assert_eq!(rec.k.e(), rec.e);
            assert_eq!(rec.datum_k.n(), pr);
            assert_eq!(rec.induced_swan, 1);
            assert!(rec.relations.iter().all(|r| r.holds != Some(false)), "{:?}", rec.relations);

            // the lab's explicit determinant over K, normed down to F, lands
            // on det alpha up to the recorded sign
            let s = build_stratum(&rec.k, rec.r, rec.datum_k.det_mu()).unwrap();
            let det_k = s.det_alpha().unwrap();
            assert_eq!(det_k.valuation(), Some(-1));
            let (nd, _) = norm_trace(&det_k, &base, 0).unwrap();
            let kf = base.residue();
            let want = if rec.norm_sign == 1 { zeta } else { kf.neg(zeta) };
            assert_eq!(nd.leading(), Some((-1, want)), "p = {p}, n = {n}");
        }
    }
}
