use fqslice::gf::{embedding, Elem, Field};
use proptest::prelude::*;

fn fields() -> Vec<(u64, u32)> {
    vec![(2, 1), (2, 4), (2, 11), (2, 16), (3, 3), (3, 7), (5, 4), (7, 2), (65_521, 1), (251, 2)]
}

fn elem(field: &Field, raw: u32) -> Elem {
    field.elem(raw % field.size()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(fi in 0..10usize, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let (p, k) = fields()[fi];
        let f = Field::new(p, k).unwrap();
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
    }

    #[test]
    fn inverses_and_frobenius(fi in 0..10usize, a in any::<u32>(), b in any::<u32>()) {
        let (p, k) = fields()[fi];
        let f = Field::new(p, k).unwrap();
        let (a, b) = (elem(&f, a), elem(&f, b));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            prop_assert_eq!(f.pow(a, f.size() as u64 - 1), Elem::ONE);
            prop_assert_eq!(f.mul(f.div(b, a).unwrap(), a), b);
        } else {
            prop_assert!(f.inv(a).is_err());
        }
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
    }

    #[test]
    fn embeddings_are_homomorphisms(a in any::<u32>(), b in any::<u32>(), which in 0..4usize) {
        let (p, s, t) = [(2u64, 3u32, 9u32), (3, 2, 8), (2, 8, 16), (5, 1, 5)][which];
        let src = Field::new(p, s).unwrap();
        let dst = Field::new(p, t).unwrap();
        let e = embedding(&src, &dst).unwrap();
        let (a, b) = (elem(&src, a), elem(&src, b));
        prop_assert_eq!(e.apply(src.add(a, b)), dst.add(e.apply(a), e.apply(b)));
        prop_assert_eq!(e.apply(src.mul(a, b)), dst.mul(e.apply(a), e.apply(b)));
        // the image is fixed by the q-power Frobenius of the subfield
        prop_assert_eq!(dst.pow(e.apply(a), src.size() as u64), e.apply(a));
    }
}

#[test]
fn exhaustive_small_fields() {
    for (p, k) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 5)] {
        let f = Field::new(p, k).unwrap();
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                }
            }
        }
    }
}
