//! Character tables: exact for abelian groups, numeric (class-algebra
//! method) for everything else.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;
use crate::group::{conjugacy_classes, ConjugacyClasses, FiniteGroup, GroupError};
use crate::linalg;

/// Snapping / validation tolerance for floating character values.
pub const CHAR_TOL: f64 = 1e-9;
pub const NUMERIC_MAX_ORDER: usize = 64;
pub const DEFAULT_SEED: u64 = 42;
const MAX_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum CharacterValues {
    /// `values[i][c]` = χ_i on class c, exactly.
    Exact(Vec<Vec<Cyclotomic>>),
    /// Floating values with the tolerance they were validated to.
    Numeric {
        values: Vec<Vec<Complex64>>,
        tol: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub classes: ConjugacyClasses,
    pub degrees: Vec<usize>,
    pub values: CharacterValues,
}

impl CharacterTable {
    pub fn is_exact(&self) -> bool {
        matches!(self.values, CharacterValues::Exact(_))
    }

    pub fn count(&self) -> usize {
        self.degrees.len()
    }

    /// χ_i on class c as a complex number.
    pub fn class_value(&self, i: usize, c: usize) -> Complex64 {
        match &self.values {
            CharacterValues::Exact(v) => v[i][c].to_complex(),
            CharacterValues::Numeric { values, .. } => values[i][c],
        }
    }

    /// χ_i(g) for an element index g.
    pub fn value(&self, i: usize, g: usize) -> Complex64 {
        self.class_value(i, self.classes.class_of[g])
    }

    pub fn exact_value(&self, i: usize, g: usize) -> Option<&Cyclotomic> {
        match &self.values {
            CharacterValues::Exact(v) => Some(&v[i][self.classes.class_of[g]]),
            CharacterValues::Numeric { .. } => None,
        }
    }

    /// Row χ_i over all group elements.
    pub fn element_row(&self, i: usize) -> Vec<Complex64> {
        (0..self.classes.class_of.len())
            .map(|g| self.value(i, g))
            .collect()
    }

    pub fn tolerance(&self) -> f64 {
        match &self.values {
            CharacterValues::Exact(_) => 0.0,
            CharacterValues::Numeric { tol, .. } => *tol,
        }
    }

    /// Largest deviation of Σ_g χ_i(g) conj(χ_j(g)) from n·δ_ij.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.classes.class_of.len();
        let rows: Vec<Vec<Complex64>> = (0..self.count()).map(|i| self.element_row(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                let ip: Complex64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b.conj()).sum();
                let target = if i == j { n as f64 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }

    /// Exact orthogonality check (abelian tables only).
    pub fn exact_orthogonality(&self) -> Option<bool> {
        let CharacterValues::Exact(v) = &self.values else {
            return None;
        };
        let n = self.classes.class_of.len();
        let sizes = self.classes.sizes();
        for i in 0..v.len() {
            for j in 0..v.len() {
                let mut acc = Cyclotomic::from_int(0);
                for (c, &size) in sizes.iter().enumerate() {
                    acc = acc + Cyclotomic::from_int(size as i64) * (&v[i][c] * &v[j][c].conj());
                }
                let target = if i == j { n as i64 } else { 0 };
                if acc != Cyclotomic::from_int(target) {
                    return Some(false);
                }
            }
        }
        Some(true)
    }

    pub fn to_file(&self) -> CharacterTableFile {
        CharacterTableFile {
            classes: self.classes.classes.clone(),
            degrees: self.degrees.clone(),
            values: (0..self.count())
                .map(|i| {
                    (0..self.classes.r())
                        .map(|c| {
                            let z = self.class_value(i, c);
                            ComplexJson { re: z.re, im: z.im }
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

/// User-supplied character table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTableFile {
    pub classes: Vec<Vec<usize>>,
    pub degrees: Vec<usize>,
    pub values: Vec<Vec<ComplexJson>>,
}

/// Sort key for value tuples: angle as a fraction of a turn, then modulus.
fn value_key(z: Complex64) -> (i64, i64) {
    let q = |x: f64| (x * 1e8).round() as i64;
    if z.norm() < CHAR_TOL {
        return (0, 0);
    }
    let frac = (z.arg() / std::f64::consts::TAU).rem_euclid(1.0);
    let frac = if q(frac) == q(1.0) { 0.0 } else { frac };
    (q(frac), q(z.norm()))
}

fn sort_irreducibles<T>(rows: &mut [(usize, Vec<Complex64>, T)]) {
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            let ka: Vec<_> = a.1.iter().map(|&z| value_key(z)).collect();
            let kb: Vec<_> = b.1.iter().map(|&z| value_key(z)).collect();
            ka.cmp(&kb)
        })
    });
}

/// Class multiplication constants a[j][k][l]: number of (x, y) in
/// K_j × K_k with x·y equal to a fixed representative of K_l.
fn class_constants(group: &FiniteGroup, cc: &ConjugacyClasses) -> Vec<Vec<Vec<f64>>> {
    let r = cc.r();
    let mut a = vec![vec![vec![0.0; r]; r]; r];
    for (l, kl) in cc.classes.iter().enumerate() {
        let rep = kl[0];
        for (j, kj) in cc.classes.iter().enumerate() {
            for &x in kj {
                let y = group.mul(group.inv(x), rep);
                a[j][cc.class_of[y]][l] += 1.0;
            }
        }
    }
    a
}

/// Floating character table via simultaneous eigenvectors of the class
/// multiplication matrices.
pub fn character_table_numeric(group: &FiniteGroup) -> Result<CharacterTable, GroupError> {
    character_table_numeric_seeded(group, DEFAULT_SEED)
}

pub fn character_table_numeric_seeded(
    group: &FiniteGroup,
    seed: u64,
) -> Result<CharacterTable, GroupError> {
    let n = group.order();
    if n > NUMERIC_MAX_ORDER {
        return Err(GroupError::OrderTooLarge {
            order: n,
            max: NUMERIC_MAX_ORDER,
        });
    }
    let cc = conjugacy_classes(group);
    let r = cc.r();
    let sizes = cc.sizes();
    let consts = class_constants(group, &cc);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _attempt in 0..MAX_ATTEMPTS {
        let weights: Vec<f64> = (0..r)
            .map(|_| rng.gen_range(1..=97) as f64 / rng.gen_range(1..=13) as f64)
            .collect();
        let combo: Vec<Vec<f64>> = (0..r)
            .map(|k| {
                (0..r)
                    .map(|l| (0..r).map(|j| weights[j] * consts[j][k][l]).sum())
                    .collect()
            })
            .collect();
        let eig = linalg::real_eigenvalues(&combo);
        let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let separated = eig.iter().enumerate().all(|(i, a)| {
            eig.iter()
                .skip(i + 1)
                .all(|b| (a - b).norm() > 1e-6 * scale)
        });
        if eig.len() != r || !separated {
            continue;
        }
        let combo_c: linalg::CMatrix = combo
            .iter()
            .map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        let mut rows: Vec<(usize, Vec<Complex64>, ())> = Vec::with_capacity(r);
        let mut ok = true;
        for &lambda in &eig {
            let Some(v) = linalg::eigenvector(&combo_c, lambda) else {
                ok = false;
                break;
            };
            if v[0].norm() < 1e-8 {
                ok = false;
                break;
            }
            let w: Vec<Complex64> = v.iter().map(|x| x / v[0]).collect();
            let denom: f64 = w
                .iter()
                .zip(&sizes)
                .map(|(x, &s)| x.norm_sqr() / s as f64)
                .sum();
            let f_est = (n as f64 / denom).sqrt();
            let f = f_est.round();
            if (f_est - f).abs() > 1e-6 || f < 1.0 {
                return Err(GroupError::ToleranceViolation(format!(
                    "character degree estimate {f_est} is not an integer"
                )));
            }
            let chi: Vec<Complex64> = w
                .iter()
                .zip(&sizes)
                .map(|(x, &s)| x * f / s as f64)
                .collect();
            rows.push((f as usize, chi, ()));
        }
        if !ok {
            continue;
        }
        sort_irreducibles(&mut rows);
        let degrees: Vec<usize> = rows.iter().map(|r| r.0).collect();
        let values: Vec<Vec<Complex64>> = rows.into_iter().map(|r| r.1).collect();
        let table = CharacterTable {
            classes: cc,
            degrees,
            values: CharacterValues::Numeric {
                values,
                tol: CHAR_TOL,
            },
        };
        validate_numeric(&table, n)?;
        return Ok(table);
    }
    Err(GroupError::DegenerateEigenspaces {
        attempts: MAX_ATTEMPTS,
    })
}

fn validate_numeric(table: &CharacterTable, n: usize) -> Result<(), GroupError> {
    let sq: usize = table.degrees.iter().map(|f| f * f).sum();
    if sq != n {
        return Err(GroupError::ToleranceViolation(format!(
            "sum of squared degrees {sq} != order {n}"
        )));
    }
    if table.count() != table.classes.r() {
        return Err(GroupError::ToleranceViolation(format!(
            "{} irreducibles for {} classes",
            table.count(),
            table.classes.r()
        )));
    }
    let defect = table.orthogonality_defect();
    if defect > CHAR_TOL * n as f64 {
        return Err(GroupError::ToleranceViolation(format!(
            "orthogonality defect {defect:e}"
        )));
    }
    for (i, &f) in table.degrees.iter().enumerate() {
        if (table.class_value(i, 0) - f as f64).norm() > CHAR_TOL {
            return Err(GroupError::ToleranceViolation(format!(
                "chi_{i}(e) != f_{i}"
            )));
        }
    }
    Ok(())
}

/// Exact linear characters of an abelian group, valued in Q(ζ_m) with
/// m the group exponent.
pub fn abelian_characters(group: &FiniteGroup) -> Result<CharacterTable, GroupError> {
    if let Some((a, b)) = group.commutator_witness() {
        return Err(GroupError::NotAbelian { a, b });
    }
    let numeric = character_table_numeric(group)?;
    let n = group.order();
    let m = group.exponent();
    let mut rows: Vec<(usize, Vec<Complex64>, Vec<i64>)> = Vec::with_capacity(n);
    for i in 0..n {
        // singleton classes: class c holds element c
        let mut exps = Vec::with_capacity(n);
        for g in 0..n {
            let z = numeric.value(i, g);
            let k = (z.arg() / std::f64::consts::TAU * m as f64).round() as i64;
            let k = k.rem_euclid(m as i64);
            let snapped = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64);
            if (z - snapped).norm() > CHAR_TOL {
                return Err(GroupError::ToleranceViolation(format!(
                    "character value {z} is not within {CHAR_TOL} of an {m}-th root of unity"
                )));
            }
            exps.push(k);
        }
        // exact multiplicativity on the exponents
        for g in 0..n {
            for h in 0..n {
                if exps[group.mul(g, h)] != (exps[g] + exps[h]).rem_euclid(m as i64) {
                    return Err(GroupError::ToleranceViolation(format!(
                        "snapped character {i} is not multiplicative at ({g}, {h})"
                    )));
                }
            }
        }
        let row = exps
            .iter()
            .map(|&k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64))
            .collect();
        rows.push((1, row, exps));
    }
    sort_irreducibles(&mut rows);
    for w in rows.windows(2) {
        if w[0].2 == w[1].2 {
            return Err(GroupError::ToleranceViolation(
                "duplicate characters after snapping".into(),
            ));
        }
    }
    let values: Vec<Vec<Cyclotomic>> = rows
        .iter()
        .map(|(_, _, exps)| {
            exps.iter()
                .map(|&k| Cyclotomic::root_of_unity(m, k))
                .collect()
        })
        .collect();
    let table = CharacterTable {
        classes: numeric.classes,
        degrees: vec![1; n],
        values: CharacterValues::Exact(values),
    };
    Ok(table)
}

/// Builds a character table from a user file, validated against `group`.
pub fn ingest_character_table(
    group: &FiniteGroup,
    file: &CharacterTableFile,
) -> Result<CharacterTable, GroupError> {
    let cc = conjugacy_classes(group);
    let mut given = file.classes.clone();
    for c in &mut given {
        c.sort_unstable();
    }
    // Reorder columns to the canonical class order.
    let perm: Vec<usize> = cc
        .classes
        .iter()
        .map(|c| {
            given.iter().position(|g| g == c).ok_or_else(|| {
                GroupError::BadFormat(format!("class {c:?} missing from character table file"))
            })
        })
        .collect::<Result<_, _>>()?;
    if file.values.len() != file.degrees.len() {
        return Err(GroupError::BadFormat(
            "values and degrees have different lengths".into(),
        ));
    }
    let mut rows: Vec<(usize, Vec<Complex64>, ())> = Vec::new();
    for (row, &f) in file.values.iter().zip(&file.degrees) {
        if row.len() != given.len() {
            return Err(GroupError::BadFormat("ragged character values".into()));
        }
        rows.push((f, perm.iter().map(|&p| row[p].into()).collect(), ()));
    }
    sort_irreducibles(&mut rows);
    let table = CharacterTable {
        classes: cc,
        degrees: rows.iter().map(|r| r.0).collect(),
        values: CharacterValues::Numeric {
            values: rows.into_iter().map(|r| r.1).collect(),
            tol: CHAR_TOL,
        },
    };
    validate_numeric(&table, group.order())?;
    Ok(table)
}

/// Exact table for abelian groups, numeric otherwise.
pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable, GroupError> {
    if group.is_abelian() {
        abelian_characters(group)
    } else {
        character_table_numeric(group)
    }
}

/// Determinant of the element-indexed character matrix (χ(g)), exactly.
pub fn character_matrix_det(table: &CharacterTable) -> Option<Cyclotomic> {
    let CharacterValues::Exact(v) = &table.values else {
        return None;
    };
    let n = v.len();
    let mut a: Vec<Vec<Cyclotomic>> = (0..n)
        .map(|i| (0..n).map(|g| v[i][table.classes.class_of[g]].clone()).collect())
        .collect();
    let mut det = Cyclotomic::from_int(1);
    for c in 0..n {
        let p = (c..n).find(|&i| !num_traits::Zero::is_zero(&a[i][c]))?;
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inverse()?;
        for i in c + 1..n {
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] = a[i][j].clone() - t;
            }
        }
    }
    Some(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named;

    fn ci(k: i64) -> Cyclotomic {
        Cyclotomic::root_of_unity(4, k)
    }

    #[test]
    fn z4_table_matches_display() {
        let t = abelian_characters(&named::cyclic(4)).unwrap();
        let CharacterValues::Exact(v) = &t.values else { panic!() };
        let expect = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 0, 2], [0, 3, 2, 1]];
        for (row, e) in v.iter().zip(expect) {
            let want: Vec<Cyclotomic> = e.iter().map(|&k| ci(k)).collect();
            assert_eq!(row, &want);
        }
        assert_eq!(t.exact_orthogonality(), Some(true));
    }

    #[test]
    fn klein_table_is_signs() {
        let t = abelian_characters(&named::klein()).unwrap();
        let CharacterValues::Exact(v) = &t.values else { panic!() };
        let expect = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];
        for (row, e) in v.iter().zip(expect) {
            let want: Vec<Cyclotomic> = e.iter().map(|&k| Cyclotomic::from_int(k)).collect();
            assert_eq!(row, &want);
        }
    }

    #[test]
    fn z2_rows() {
        let t = abelian_characters(&named::cyclic(2)).unwrap();
        let CharacterValues::Exact(v) = &t.values else { panic!() };
        assert_eq!(v[0], vec![Cyclotomic::from_int(1), Cyclotomic::from_int(1)]);
        assert_eq!(v[1], vec![Cyclotomic::from_int(1), Cyclotomic::from_int(-1)]);
    }

    #[test]
    fn nonabelian_rejected_by_exact_route() {
        let err = abelian_characters(&named::s3()).unwrap_err();
        assert_eq!(err.code(), "NotAbelian");
    }

    #[test]
    fn numeric_degrees() {
        assert_eq!(character_table_numeric(&named::s3()).unwrap().degrees, vec![1, 1, 2]);
        assert_eq!(
            character_table_numeric(&named::d4()).unwrap().degrees,
            vec![1, 1, 1, 1, 2]
        );
        assert_eq!(
            character_table_numeric(&named::q8()).unwrap().degrees,
            vec![1, 1, 1, 1, 2]
        );
    }

    #[test]
    fn z3_numeric_values_are_cube_roots() {
        let t = character_table_numeric(&named::cyclic(3)).unwrap();
        assert_eq!(t.degrees, vec![1, 1, 1]);
        for i in 0..3 {
            for g in 0..3 {
                assert!((t.value(i, g).powu(3) - 1.0).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn numeric_agrees_with_exact_for_abelian() {
        for g in [named::cyclic(6), named::klein(), named::cyclic(8)] {
            let e = abelian_characters(&g).unwrap();
            let f = character_table_numeric(&g).unwrap();
            for i in 0..g.order() {
                for x in 0..g.order() {
                    assert!((e.value(i, x) - f.value(i, x)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn character_matrix_is_invertible() {
        for g in [named::cyclic(2), named::cyclic(5), named::cyclic(6), named::klein()] {
            let t = abelian_characters(&g).unwrap();
            let d = character_matrix_det(&t).unwrap();
            assert!(!num_traits::Zero::is_zero(&d));
        }
    }

    #[test]
    fn deterministic_tables() {
        let a = character_table_numeric(&named::q8()).unwrap();
        let b = character_table_numeric(&named::q8()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ingestion_roundtrip() {
        let g = named::s3();
        let t = character_table_numeric(&g).unwrap();
        let file = t.to_file();
        let back = ingest_character_table(&g, &file).unwrap();
        assert_eq!(back.degrees, t.degrees);
        let mut bad = file.clone();
        bad.degrees[2] = 1;
        assert!(ingest_character_table(&g, &bad).is_err());
    }
}
