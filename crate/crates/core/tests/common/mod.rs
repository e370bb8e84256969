#![allow(dead_code)]

use frobdet::group::{named, FiniteGroup};

pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    let (na, nb) = (a.order(), b.order());
    let names = (0..na * nb).map(|k| format!("({},{})", a.names()[k / nb], b.names()[k % nb])).collect();
    let table = (0..na * nb)
        .map(|x| (0..na * nb).map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)).collect())
        .collect();
    FiniteGroup::from_table(names, table).unwrap()
}

/// Every group of order at most 8, up to isomorphism.
pub fn small_groups() -> Vec<(String, FiniteGroup)> {
    let mut v: Vec<(String, FiniteGroup)> = (1..=8).map(|n| (format!("z{n}"), named::cyclic(n))).collect();
    v.push(("klein".into(), named::klein()));
    v.push(("s3".into(), named::s3()));
    v.push(("z4xz2".into(), direct_product(&named::cyclic(4), &named::cyclic(2))));
    v.push(("z2^3".into(), direct_product(&named::klein(), &named::cyclic(2))));
    v.push(("d4".into(), named::d4()));
    v.push(("q8".into(), named::q8()));
    v
}
