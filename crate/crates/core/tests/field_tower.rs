use epi_core::{norm_trace, Fe, FqField, LFElem, LocalFieldDesc, Series};
use proptest::prelude::*;

const SMALL_FIELDS: [(u32, u32); 9] = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)];

/// Schoolbook product of digit vectors modulo the field's monic modulus.
fn poly_mul(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * f];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (f..2 * f).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let idx = deg - f + i;
            prod[idx] = (prod[idx] + p * p - c * m % p) % p;
        }
    }
    prod.truncate(f);
    prod
}

#[test]
fn frozen_moduli() {
    let cases: [((u32, u32), &[u32]); 4] = [
        ((2, 2), &[1, 1, 1]),
        ((2, 3), &[1, 1, 0, 1]),
        ((2, 4), &[1, 1, 0, 0, 1]),
        ((3, 2), &[2, 1, 1]),
    ];
    for ((p, f), want) in cases {
        assert_eq!(FqField::new(p, f).unwrap().modulus(), want, "F_{p}^{f}");
    }
}

#[test]
fn multiplication_matches_polynomial_oracle() {
    for (p, f) in SMALL_FIELDS {
        let k = FqField::new(p, f).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                let want = poly_mul(p, k.modulus(), &k.digits_of(a), &k.digits_of(b));
                assert_eq!(k.digits_of(k.mul(a, b)), want);
            }
        }
        // the generator is the class of X and has full order
        let g = k.generator();
        let mut x = Fe::ONE;
        for _ in 1..k.order() {
            x = k.mul(x, g);
            assert_ne!(x, Fe::ONE);
        }
        assert_eq!(k.mul(x, g), Fe::ONE);
    }
}

fn field_and_elems() -> impl Strategy<Value = (std::sync::Arc<FqField>, u32, u32, u32)> {
    (0..SMALL_FIELDS.len(), any::<u32>(), any::<u32>(), any::<u32>()).prop_map(|(i, a, b, c)| {
        let (p, f) = SMALL_FIELDS[i];
        let k = FqField::new(p, f).unwrap();
        let q = k.q();
        (k, a % q, b % q, c % q)
    })
}

fn elem(k: &FqField, digits_code: u32) -> Fe {
    let mut ds = Vec::new();
    let mut x = digits_code;
    for _ in 0..k.f() {
        ds.push(x % k.p());
        x /= k.p();
    }
    k.from_digits(&ds)
}

proptest! {
    #[test]
    fn field_axioms((k, a, b, c) in field_and_elems()) {
        let (a, b, c) = (elem(&k, a), elem(&k, b), elem(&k, c));
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.add(a, k.neg(a)), Fe::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), Fe::ONE);
            prop_assert_eq!(k.pow(a, k.order() as i64), Fe::ONE);
        }
        prop_assert_eq!(k.frobenius(k.add(a, b)), k.add(k.frobenius(a), k.frobenius(b)));
        prop_assert_eq!(k.frobenius_inv(k.pow(a, k.p() as i64), 1), a);
        prop_assert_eq!(k.parse(&k.format(a)).unwrap(), a);
    }

    #[test]
    fn series_ring_laws(seed in proptest::collection::vec(0u32..4, 12), v in -3i64..3) {
        let k = FqField::new(2, 2).unwrap();
        let to_fe = |xs: &[u32]| xs.iter().map(|&x| elem(&k, x)).collect::<Vec<_>>();
        let mut a = to_fe(&seed[..6]);
        a[0] = Fe::ONE;
        let s = Series::new(k.clone(), v, a);
        let t = Series::new(k.clone(), 1, to_fe(&seed[6..]));
        let inv = s.inv().unwrap();
        let one = s.mul(&inv);
        prop_assert!(one.agrees_with(&Series::constant(k.clone(), Fe::ONE, one.abs_prec())));
        let lhs = s.mul(&t.add(&s));
        let rhs = s.mul(&t).add(&s.mul(&s));
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn embedding_is_a_ring_map(xs in proptest::collection::vec(0u32..2, 6), ys in proptest::collection::vec(0u32..2, 6)) {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let t = f.unramified(2).unwrap().tame(3, 1).unwrap();
        let k = f.residue();
        let x = LFElem::new(&f, 0, xs.iter().map(|&d| k.from_int(d as i64)).collect());
        let y = LFElem::new(&f, 1, ys.iter().map(|&d| k.from_int(d as i64)).collect());
        let lhs = x.mul(&y).unwrap().embed(&t).unwrap();
        let rhs = x.embed(&t).unwrap().mul(&y.embed(&t).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
        let sum = x.add(&y).unwrap().embed(&t).unwrap();
        prop_assert!(sum.agrees_with(&x.embed(&t).unwrap().add(&y.embed(&t).unwrap()).unwrap()));
    }

    #[test]
    fn norm_is_multiplicative(xs in proptest::collection::vec(0u32..4, 8), ys in proptest::collection::vec(0u32..4, 8), unit in 0u32..3) {
        let f = LocalFieldDesc::base(2, 1).unwrap();
        let l = f.unramified(2).unwrap().tame(3, unit).unwrap();
        let k = l.residue();
        let mk = |ds: &[u32]| {
            let mut c: Vec<Fe> = ds.iter().map(|&d| elem(k, d)).collect();
            if c[0].is_zero() { c[0] = Fe::ONE; }
            LFElem::new(&l, 0, c)
        };
        let (x, y) = (mk(&xs), mk(&ys));
        let (nx, tx) = norm_trace(&x, &f, 2).unwrap();
        let (ny, ty) = norm_trace(&y, &f, 2).unwrap();
        let (nxy, _) = norm_trace(&x.mul(&y).unwrap(), &f, 2).unwrap();
        let (_, txy) = norm_trace(&x.add(&y).unwrap(), &f, 2).unwrap();
        prop_assert!(nxy.agrees_with(&nx.mul(&ny).unwrap()));
        prop_assert!(txy.agrees_with(&tx.add(&ty).unwrap()));
    }
}

#[test]
fn norm_of_base_element_is_its_power() {
    let f = LocalFieldDesc::base(3, 1).unwrap();
    let l = f.unramified(2).unwrap().tame(2, 1).unwrap();
    let k = f.residue();
    let x = LFElem::new(&f, -1, vec![k.from_int(2), Fe::ONE, k.from_int(2), Fe::ZERO, Fe::ONE, Fe::ONE]);
    let (n, t) = norm_trace(&x.embed(&l).unwrap(), &f, 1).unwrap();
    assert!(n.agrees_with(&x.pow(4).unwrap()));
    // [L:F] = 4 = 1 in characteristic 3
    assert!(t.agrees_with(&x));
}
