use epi_core::characters::{build_multchar, pullback_norm, standard_addchar, MultChar, QmodZ};
use epi_core::{norm_trace, Fe, LFElem, LocalFieldDesc};
use proptest::prelude::*;

fn towers() -> Vec<LocalFieldDesc> {
    let f2 = LocalFieldDesc::base(2, 1).unwrap();
    let f3 = LocalFieldDesc::base(3, 1).unwrap();
    vec![
        f2.clone(),
        f2.tame(3, 0).unwrap(),
        f2.unramified(2).unwrap().tame(3, 1).unwrap(),
        f3.tame(2, 1).unwrap(),
        f3.unramified(2).unwrap().tame(4, 3).unwrap(),
    ]
}

fn random_elem(l: &LocalFieldDesc, v: i64, seeds: &[u32]) -> LFElem {
    let k = l.residue();
    let mut cs: Vec<Fe> = seeds.iter().map(|&s| k.exp(s as i64)).collect();
    if seeds[0].is_multiple_of(5) {
        cs[1] = Fe::ZERO;
    }
    LFElem::new(l, v, cs)
}

proptest! {
    #[test]
    fn additive_character_two_paths(i in 0usize..5, v in -4i64..3, seeds in proptest::collection::vec(0u32..64, 14)) {
        let l = &towers()[i];
        // exact zeros beyond the random head, so the trace has room
        let mut cs = random_elem(l, v, &seeds).coeffs().to_vec();
        cs.resize(40, Fe::ZERO);
        let x = LFElem::new(l, v, cs);
        let psi = standard_addchar(l);
        prop_assert_eq!(psi.eval(&x).unwrap(), psi.eval_via_trace(&x).unwrap());
    }

    #[test]
    fn additive_character_is_additive(i in 0usize..5, a in proptest::collection::vec(0u32..64, 8), b in proptest::collection::vec(0u32..64, 8)) {
        let l = &towers()[i];
        let (x, y) = (random_elem(l, -2, &a), random_elem(l, -1, &b));
        let psi = standard_addchar(l);
        let lhs = psi.eval(&x.add(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, psi.eval(&x).unwrap().add(psi.eval(&y).unwrap()));
    }

    #[test]
    fn multiplicative_character_is_multiplicative(
        i in 0usize..5,
        on_pi in 0i64..12,
        on_mu in 0i64..8,
        wild in 0u32..16,
        a in proptest::collection::vec(0u32..64, 6),
        b in proptest::collection::vec(0u32..64, 6),
    ) {
        let l = &towers()[i];
        let k = l.residue();
        let c = LFElem::monomial(l, k.exp(wild as i64), -1, 1);
        let chi = build_multchar(l, QmodZ::new(on_pi, 12), on_mu, &[(1, c)]).unwrap();
        prop_assert_eq!(chi.sw(), 1);
        let (x, y) = (random_elem(l, 1, &a), random_elem(l, -3, &b));
        let lhs = chi.eval(&x.mul(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, chi.eval(&x).unwrap().add(chi.eval(&y).unwrap()));
        let sq = chi.pow(2).unwrap();
        prop_assert_eq!(sq.eval(&x).unwrap(), chi.eval(&x).unwrap().times(2));
    }

    #[test]
    fn rationals_round_trip(num in -50i64..50, den in 1i64..30) {
        let x = QmodZ::new(num, den);
        let back: QmodZ = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
        prop_assert!(x.ratio() >= 0.into() && x.ratio() < 1.into());
        prop_assert!(x.add(x.neg()).is_zero());
    }
}

#[test]
fn pullbacks_through_norms() {
    let f = LocalFieldDesc::base(2, 1).unwrap();
    let half = MultChar::unramified(&f, QmodZ::new(1, 2));
    // N(pi_L) has valuation f(L|F)
    let ram = f.tame(3, 0).unwrap();
    let mixed = f.unramified(2).unwrap().tame(3, 0).unwrap();
    assert_eq!(pullback_norm(&half, &ram).unwrap().on_pi_value().unwrap(), QmodZ::new(1, 2));
    assert_eq!(pullback_norm(&half, &mixed).unwrap().on_pi_value().unwrap(), QmodZ::ZERO);

    // a level-one character pulled back through a tame index e has Swan e
    let c = LFElem::monomial(&f, Fe::ONE, -1, 1);
    let chi = build_multchar(&f, QmodZ::ZERO, 0, &[(1, c)]).unwrap();
    let up = pullback_norm(&chi, &ram).unwrap();
    assert_eq!(up.sw(), 3);
    let x = LFElem::new(&ram, 0, vec![Fe::ONE, Fe::ONE, Fe::ONE, Fe::ZERO, Fe::ONE, Fe::ONE, Fe::ZERO, Fe::ONE, Fe::ONE, Fe::ONE]);
    let (nx, _) = norm_trace(&x, &f, 3).unwrap();
    assert_eq!(up.eval(&x).unwrap(), chi.eval(&nx).unwrap());
}

#[test]
fn character_levels_by_scan() {
    for l in towers() {
        let psi = standard_addchar(&l);
        assert_eq!(psi.level_by_scan(8).unwrap(), psi.level(), "{l}");
        // c(psi_K) = d(K|F) - e(K|F) for the transported character
        assert_eq!(psi.level(), l.e() as i64 - 1 - l.e() as i64);
    }
}
