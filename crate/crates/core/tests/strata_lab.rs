use epi_core::characters::MultChar;
use epi_core::galois_side::imprimitivity_field;
use epi_core::gl_side::EpipelagicDatum;
use epi_core::strata_lab::belem::BElem;
use epi_core::strata_lab::linalg::{self, mat_pow, rank};
use epi_core::strata_lab::{
    build_stratum, graded_map_analysis, lift_stratum, oracle_root_set, solve_conjugator,
    verify_conjugation_identities, LabError,
};
use epi_core::{Fe, LFElem, LocalFieldDesc};
use proptest::prelude::*;

const SHAPES: [(u32, u32, u32); 5] = [(2, 1, 1), (2, 2, 1), (3, 1, 1), (2, 1, 2), (5, 1, 1)];

#[test]
fn normal_form_determinants() {
    for (p, f, r) in SHAPES {
        let base = LocalFieldDesc::base(p, f).unwrap();
        for zeta in base.residue().units() {
            let s = build_stratum(&base, r, zeta).unwrap();
            assert!(s.invariants().all());
            assert_eq!(s.det_alpha().unwrap().leading(), Some((-1, zeta)));
        }
    }
}

#[test]
fn graded_maps_are_nilpotent_of_the_right_type() {
    for (p, f, r) in SHAPES {
        let base = LocalFieldDesc::base(p, f).unwrap();
        let k = base.residue();
        let s = build_stratum(&base, r, k.generator()).unwrap();
        let n = s.n() as i64;
        for i in -1..=2 {
            for j in 1..=n {
                let g = graded_map_analysis(&s, i, j).unwrap();
                let dim = g.a.dim();
                assert_eq!(dim as i64, j * n);
                // independent of the stored flags: rank and A^n computed here
                assert_eq!(rank(k, &g.a.matrix), dim - j as usize, "V_({i},{j})");
                assert!(linalg::is_zero(&mat_pow(k, &g.a.matrix, n as u32)));
                assert!(g.nilpotent && g.kernel_dim == j as usize && g.exact && g.containment);
            }
        }
        assert!(matches!(graded_map_analysis(&s, 0, n + 1), Err(LabError::BadRange { .. })));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]
    #[test]
    fn graded_map_ignores_deep_perturbations(shape in 0usize..3, seeds in proptest::collection::vec(0u32..64, 64)) {
        let (p, f, r) = SHAPES[shape];
        let base = LocalFieldDesc::base(p, f).unwrap();
        let k = base.residue();
        let s = build_stratum(&base, r, Fe::ONE).unwrap();
        let n = s.n();
        let prec = 4 * n as i64 + 8;
        let mut u = BElem::one(k, n, prec);
        let mut it = seeds.iter().cycle();
        for l in (1 + n as i64)..prec {
            u.set_comp(l, (0..n).map(|_| k.exp(*it.next().unwrap() as i64)).collect());
        }
        let sp = s.perturbed(&u).unwrap();
        for i in 0..2 {
            for j in 1..=n as i64 {
                prop_assert_eq!(graded_map_analysis(&sp, i, j).unwrap().a, graded_map_analysis(&s, i, j).unwrap().a);
            }
        }
    }

    #[test]
    fn conjugation_identities_for_random_c(case in 0usize..2, c_log in 0i64..80, z_logs in proptest::collection::vec(0i64..80, 3)) {
        let (p, f, r) = [(2, 1, 1), (3, 1, 1)][case];
        let base = LocalFieldDesc::base(p, f).unwrap();
        let d = EpipelagicDatum::new(&base, p.pow(r), Fe::ONE, MultChar::trivial(&base), 0).unwrap();
        let imp = imprimitivity_field(&d).unwrap();
        let t = &imp.t;
        let kt = t.residue();
        let s = lift_stratum(t, &base, r, Fe::ONE).unwrap();
        let c0 = kt.exp(c_log);
        let conj = solve_conjugator(&s, &LFElem::monomial(t, c0, -1, 1)).unwrap();
        prop_assert!(conj.residual_zero && conj.conjugation_zero);
        let zetas: Vec<Fe> = z_logs.iter().map(|&z| kt.exp(z)).collect();
        let rep = verify_conjugation_identities(&s, &conj, &zetas).unwrap();
        prop_assert!(rep.all_hold());
        prop_assert_eq!(rep.characters_agree(), imp.roots.contains(&c0));
    }
}

#[test]
fn oracle_scope() {
    let f2 = LocalFieldDesc::base(2, 1).unwrap();
    // residue field too large
    let big = f2.unramified(6).unwrap().tame(3, 0).unwrap();
    assert!(matches!(oracle_root_set(&f2, 1, Fe::ONE, &big), Err(LabError::Budget { .. })));
    // p^r too large
    let f5 = LocalFieldDesc::base(5, 1).unwrap();
    assert!(matches!(oracle_root_set(&f5, 1, Fe::ONE, &f5.tame(6, 0).unwrap()), Err(LabError::Budget { .. })));
    // e(K|F) below 1 + p^r: no solutions; above it: unsupported
    assert!(oracle_root_set(&f2, 1, Fe::ONE, &f2.unramified(2).unwrap()).unwrap().solutions.is_empty());
    assert!(matches!(
        oracle_root_set(&f2, 1, Fe::ONE, &f2.tame(9, 0).unwrap()),
        Err(LabError::Unsupported(_))
    ));
}
