use frobdet::afrob::{frob_product, potential_check, random_positive_point, AfrobError};
use frobdet::poly::rat;
use num_rational::BigRational;
use proptest::prelude::*;

fn nonzero() -> impl Strategy<Value = BigRational> {
    (prop_oneof![-9i64..=-1, 1i64..=9], 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_axioms(z in prop::collection::vec(nonzero(), 4), x in vector(4), y in vector(4), w in vector(4)) {
        let p = |a: &[BigRational], b: &[BigRational]| frob_product(&z, a, b).unwrap();
        prop_assert_eq!(p(&x, &y), p(&y, &x));
        prop_assert_eq!(p(&p(&x, &y), &w), p(&x, &p(&y, &w)));
        // the Euler field z is the identity
        prop_assert_eq!(p(&z, &x), x.clone());
    }

    #[test]
    fn potential_agrees(n in 1usize..=4, seed in 0u64..1000) {
        let r = potential_check(&random_positive_point(n, seed)).unwrap();
        prop_assert!(r.ok, "{:?}", r);
    }
}

#[test]
fn hyperplane_points_rejected() {
    let z = vec![rat(1, 1), rat(0, 1)];
    let x = vec![rat(1, 1), rat(1, 1)];
    assert!(matches!(frob_product(&z, &x, &x), Err(AfrobError::OnHyperplane { index: 2 })));
    assert!(matches!(potential_check(&[1.0, -0.5]), Err(AfrobError::NonPositiveCoordinate { index: 2, .. })));
}
