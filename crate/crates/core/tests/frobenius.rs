mod common;

use common::small_groups;
use frobdet::detfact::frobenius_matrix;
use frobdet::frobgroup::{bracket_identity_check, center_derived_dims, convolve, delta_e, frobenius_inverse, FrobError};
use frobdet::group::{named, FiniteGroup};
use frobdet::poly::rat;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type QMatrix = Vec<Vec<BigRational>>;

fn matmul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// M is a Frobenius matrix iff M[g][h] depends only on g h⁻¹.
fn frobenius_coeffs(g: &FiniteGroup, m: &QMatrix) -> Option<Vec<BigRational>> {
    let n = g.order();
    let mut coeffs: Vec<Option<BigRational>> = vec![None; n];
    for x in 0..n {
        for y in 0..n {
            let k = g.mul(x, g.inv(y));
            match &coeffs[k] {
                Some(c) if *c != m[x][y] => return None,
                Some(_) => {}
                None => coeffs[k] = Some(m[x][y].clone()),
            }
        }
    }
    coeffs.into_iter().collect()
}

fn draw(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect()
}

#[test]
fn closure_under_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(498);
    for (name, g) in small_groups() {
        let n = g.order();
        for _ in 0..500 {
            let (a, b) = (draw(&mut rng, n), draw(&mut rng, n));
            let prod = matmul(&frobenius_matrix(&g, &a), &frobenius_matrix(&g, &b));
            let c = frobenius_coeffs(&g, &prod).unwrap_or_else(|| panic!("{name}: product left the group"));
            assert_eq!(c, convolve(&g, &a, &b), "{name}");
        }
    }
}

#[test]
fn abelian_iff_brackets_vanish_iff_no_derived_part() {
    for (name, g) in small_groups() {
        let b = bracket_identity_check(&g);
        let s = center_derived_dims(&g);
        assert_eq!(g.is_abelian(), b.all_zero, "{name}");
        assert_eq!(g.is_abelian(), s.derived_dim == 0, "{name}");
    }
}

#[test]
fn singular_vectors_are_reported() {
    let g = named::cyclic(3);
    let a = vec![rat(1, 1), rat(1, 1), rat(1, 1)];
    assert!(matches!(frobenius_inverse(&g, &a), Err(FrobError::SingularFrobenius)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_roundtrip(which in 0usize..6, raw in prop::collection::vec((-20i64..=20, 1i64..=7), 6)) {
        let g = named::by_name(["z2", "z3", "z4", "klein", "z6", "s3"][which]).unwrap();
        let a: Vec<BigRational> = raw.iter().take(g.order()).map(|&(p, q)| rat(p, q)).collect();
        match frobenius_inverse(&g, &a) {
            Ok(u) => {
                prop_assert_eq!(convolve(&g, &a, &u), delta_e::<BigRational>(g.order()));
                prop_assert_eq!(frobenius_inverse(&g, &u).unwrap(), a);
            }
            Err(e) => prop_assert!(matches!(e, FrobError::SingularFrobenius)),
        }
    }

    #[test]
    fn convolution_is_associative(raw in prop::collection::vec(-5i64..=5, 24)) {
        let g = named::q8();
        let v = |k: usize| raw[k * 8..(k + 1) * 8].iter().map(|&x| rat(x, 1)).collect::<Vec<_>>();
        let (a, b, c) = (v(0), v(1), v(2));
        prop_assert_eq!(convolve(&g, &convolve(&g, &a, &b), &c), convolve(&g, &a, &convolve(&g, &b, &c)));
    }
}
