//! Finite groups given by Cayley tables, plus conjugacy classes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("BadFormat: {0}")]
    BadFormat(String),
    #[error("NonLatinSquare: {axis} {index} repeats value {value}")]
    NonLatinSquare {
        axis: &'static str,
        index: usize,
        value: usize,
    },
    #[error("NoIdentity: table[{row}][{col}] = {found}, identity must sit at index 0")]
    NoIdentity { row: usize, col: usize, found: usize },
    #[error("NonAssociative: ({i}*{j})*{k} != {i}*({j}*{k})")]
    NonAssociative { i: usize, j: usize, k: usize },
    #[error("NotAbelian: {a}*{b} != {b}*{a}")]
    NotAbelian { a: usize, b: usize },
    #[error("DegenerateEigenspaces: class-algebra eigenvalues stayed degenerate after {attempts} attempts")]
    DegenerateEigenspaces { attempts: usize },
    #[error("ToleranceViolation: {0}")]
    ToleranceViolation(String),
    #[error("OrderTooLarge: order {order} exceeds {max}")]
    OrderTooLarge { order: usize, max: usize },
}

impl GroupError {
    pub fn code(&self) -> &'static str {
        match self {
            GroupError::BadFormat(_) => "BadFormat",
            GroupError::NonLatinSquare { .. } => "NonLatinSquare",
            GroupError::NoIdentity { .. } => "NoIdentity",
            GroupError::NonAssociative { .. } => "NonAssociative",
            GroupError::NotAbelian { .. } => "NotAbelian",
            GroupError::DegenerateEigenspaces { .. } => "DegenerateEigenspaces",
            GroupError::ToleranceViolation(_) => "ToleranceViolation",
            GroupError::OrderTooLarge { .. } => "OrderTooLarge",
        }
    }
}

/// On-disk group description: `{"n": .., "names": [..], "table": [[..]..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub n: usize,
    pub names: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

/// A validated finite group. Element 0 is the identity and
/// `table[i][j]` is the index of `S_i * S_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    exponent: usize,
}

impl FiniteGroup {
    /// Validates a raw table (Latin square, identity at 0, associativity).
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::BadFormat("empty table".into()));
        }
        if names.len() != n {
            return Err(GroupError::BadFormat(format!(
                "{} names for a table of order {n}",
                names.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::BadFormat(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= n) {
                return Err(GroupError::BadFormat(format!(
                    "row {i} contains out-of-range index {v}"
                )));
            }
        }
        for i in 0..n {
            let mut seen = vec![false; n];
            for j in 0..n {
                let v = table[i][j];
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NonLatinSquare {
                        axis: "row",
                        index: i,
                        value: v,
                    });
                }
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                let v = row[j];
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NonLatinSquare {
                        axis: "column",
                        index: j,
                        value: v,
                    });
                }
            }
        }
        for k in 0..n {
            if table[0][k] != k {
                return Err(GroupError::NoIdentity {
                    row: 0,
                    col: k,
                    found: table[0][k],
                });
            }
            if table[k][0] != k {
                return Err(GroupError::NoIdentity {
                    row: k,
                    col: 0,
                    found: table[k][0],
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = table[i][j];
                for k in 0..n {
                    if table[ij][k] != table[i][table[j][k]] {
                        return Err(GroupError::NonAssociative { i, j, k });
                    }
                }
            }
        }
        // A Latin square with a two-sided identity has a unique 0 in every row.
        let inverse: Vec<usize> = (0..n)
            .map(|i| table[i].iter().position(|&v| v == 0).expect("latin row"))
            .collect();
        for (i, &inv) in inverse.iter().enumerate() {
            if table[inv][i] != 0 {
                return Err(GroupError::BadFormat(format!(
                    "element {i} has no two-sided inverse"
                )));
            }
        }
        let mut group = FiniteGroup {
            names,
            table,
            inverse,
            exponent: 1,
        };
        group.exponent = (0..n).fold(1, |acc, g| num_integer::lcm(acc, group.order_of(g)));
        Ok(group)
    }

    pub fn from_file(file: GroupFile) -> Result<Self, GroupError> {
        if file.n != file.table.len() {
            return Err(GroupError::BadFormat(format!(
                "n = {} but table has {} rows",
                file.n,
                file.table.len()
            )));
        }
        Self::from_table(file.names, file.table)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `t^{-1} g t`
    #[inline]
    pub fn conjugate(&self, g: usize, t: usize) -> usize {
        self.mul(self.mul(self.inv(t), g), t)
    }

    pub fn order_of(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// `g^k`, with negative k meaning powers of the inverse.
    pub fn pow(&self, g: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(g) } else { g };
        let mut acc = 0;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn is_abelian(&self) -> bool {
        self.commutator_witness().is_none()
    }

    pub fn commutator_witness(&self) -> Option<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .find(|&(a, b)| self.mul(a, b) != self.mul(b, a))
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            n: self.order(),
            names: self.names.clone(),
            table: self.table.clone(),
        }
    }
}

pub fn parse_group(text: &str) -> Result<FiniteGroup, GroupError> {
    let file: GroupFile =
        serde_json::from_str(text).map_err(|e| GroupError::BadFormat(e.to_string()))?;
    FiniteGroup::from_file(file)
}

/// Partition of the elements into conjugacy classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugacyClasses {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl ConjugacyClasses {
    /// Class count (written both `r` and `s` in the literature).
    pub fn r(&self) -> usize {
        self.classes.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// Orbits of `g -> t^{-1} g t`, sorted by (size, smallest element).
pub fn conjugacy_classes(group: &FiniteGroup) -> ConjugacyClasses {
    let n = group.order();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for g in 0..n {
        if assigned[g] {
            continue;
        }
        let mut orbit: Vec<usize> = (0..n).map(|t| group.conjugate(g, t)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &x in &orbit {
            assigned[x] = true;
        }
        classes.push(orbit);
    }
    classes.sort_by_key(|c| (c.len(), c[0]));
    let mut class_of = vec![0; n];
    for (ci, class) in classes.iter().enumerate() {
        for &x in class {
            class_of[x] = ci;
        }
    }
    ConjugacyClasses { classes, class_of }
}

/// Small groups used throughout the tests and shipped with the CLI.
pub mod named {
    use super::FiniteGroup;

    pub fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        let names = (0..n).map(|i| i.to_string()).collect();
        FiniteGroup::from_table(names, table).expect("cyclic group table")
    }

    /// Z/2 x Z/2 with (0,0)=0, (1,0)=1, (0,1)=2, (1,1)=3.
    pub fn klein() -> FiniteGroup {
        let table = (0..4)
            .map(|i| (0..4).map(|j| i ^ j).collect())
            .collect();
        let names = ["(0,0)", "(1,0)", "(0,1)", "(1,1)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        FiniteGroup::from_table(names, table).expect("klein table")
    }

    fn from_permutations(perms: &[Vec<usize>], names: &[&str]) -> FiniteGroup {
        // (p*q)(x) = p(q(x))
        let compose =
            |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&x| p[x]).collect() };
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| index(&compose(p, q))).collect())
            .collect();
        FiniteGroup::from_table(names.iter().map(|s| s.to_string()).collect(), table)
            .expect("permutation group table")
    }

    /// S_3 enumerated as (1), (123), (132), (23), (13), (12).
    pub fn s3() -> FiniteGroup {
        let perms = vec![
            vec![0, 1, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![0, 2, 1],
            vec![2, 1, 0],
            vec![1, 0, 2],
        ];
        from_permutations(&perms, &["(1)", "(123)", "(132)", "(23)", "(13)", "(12)"])
    }

    /// Dihedral group of the square as permutations of the vertices 0..4.
    pub fn d4() -> FiniteGroup {
        let rot = |k: usize| (0..4).map(|v| (v + k) % 4).collect::<Vec<_>>();
        let refl = |k: usize| (0..4).map(|v| (k + 4 - v) % 4).collect::<Vec<_>>();
        let perms = vec![rot(0), rot(1), rot(2), rot(3), refl(0), refl(1), refl(2), refl(3)];
        from_permutations(&perms, &["e", "r", "r2", "r3", "s", "sr", "sr2", "sr3"])
    }

    /// Quaternion group {±1, ±i, ±j, ±k}.
    pub fn q8() -> FiniteGroup {
        // unit quaternions as (sign, axis) with axis 0=1, 1=i, 2=j, 3=k
        let elems: [(i8, usize); 8] = [
            (1, 0),
            (-1, 0),
            (1, 1),
            (-1, 1),
            (1, 2),
            (-1, 2),
            (1, 3),
            (-1, 3),
        ];
        let unit = |a: usize, b: usize| -> (i8, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (1, x),
                (x, y) if x == y => (-1, 0),
                (1, 2) => (1, 3),
                (2, 1) => (-1, 3),
                (2, 3) => (1, 1),
                (3, 2) => (-1, 1),
                (3, 1) => (1, 2),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            }
        };
        let table = elems
            .iter()
            .map(|&(sa, a)| {
                elems
                    .iter()
                    .map(|&(sb, b)| {
                        let (s, c) = unit(a, b);
                        let sign = sa * sb * s;
                        elems.iter().position(|&e| e == (sign, c)).unwrap()
                    })
                    .collect()
            })
            .collect();
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        FiniteGroup::from_table(names, table).expect("q8 table")
    }

    /// Looks up a bundled group by name.
    pub fn by_name(name: &str) -> Option<FiniteGroup> {
        Some(match name {
            "z1" => cyclic(1),
            "z2" => cyclic(2),
            "z3" => cyclic(3),
            "z4" => cyclic(4),
            "z5" => cyclic(5),
            "z6" => cyclic(6),
            "z7" => cyclic(7),
            "z8" => cyclic(8),
            "klein" => klein(),
            "s3" => s3(),
            "d4" => d4(),
            "q8" => q8(),
            _ => return None,
        })
    }

    pub const BUNDLED: [&str; 8] = ["z2", "z3", "z4", "z6", "klein", "s3", "d4", "q8"];
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_classes(g: &FiniteGroup) -> Vec<Vec<usize>> {
        let n = g.order();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let mut cls: Vec<usize> = (0..n)
                .filter(|&y| (0..n).any(|t| g.mul(g.mul(g.inv(t), x), t) == y))
                .collect();
            cls.sort();
            if !out.contains(&cls) {
                out.push(cls);
            }
        }
        out.sort_by_key(|c| (c.len(), c[0]));
        out
    }

    #[test]
    fn z2_parses() {
        let g = parse_group(r#"{"n":2,"names":["e","a"],"table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.exponent(), 2);
    }

    #[test]
    fn duplicate_row_entries_rejected() {
        let err = parse_group(r#"{"n":2,"names":["e","a"],"table":[[0,1],[0,1]]}"#).unwrap_err();
        assert_eq!(err.code(), "NonLatinSquare");
    }

    #[test]
    fn identity_must_be_at_zero() {
        let err = parse_group(r#"{"n":2,"names":["a","e"],"table":[[1,0],[0,1]]}"#).unwrap_err();
        assert_eq!(err.code(), "NoIdentity");
    }

    #[test]
    fn non_associative_latin_square_rejected() {
        // Loop of order 5 with identity 0 that is not a group.
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let names = (0..5).map(|i| i.to_string()).collect();
        let err = FiniteGroup::from_table(names, table).unwrap_err();
        assert_eq!(err.code(), "NonAssociative");
    }

    #[test]
    fn bad_format_reports() {
        assert_eq!(parse_group("{").unwrap_err().code(), "BadFormat");
        let err = parse_group(r#"{"n":2,"names":["e","a"],"table":[[0,1],[1,2]]}"#).unwrap_err();
        assert_eq!(err.code(), "BadFormat");
    }

    #[test]
    fn s3_is_nonabelian_of_order_six() {
        let g = named::s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.exponent(), 6);
    }

    #[test]
    fn class_counts() {
        assert_eq!(conjugacy_classes(&named::cyclic(4)).r(), 4);
        let s3 = conjugacy_classes(&named::s3());
        assert_eq!(s3.classes, vec![vec![0], vec![1, 2], vec![3, 4, 5]]);
        assert_eq!(conjugacy_classes(&named::q8()).r(), 5);
        assert_eq!(conjugacy_classes(&named::d4()).r(), 5);
    }

    #[test]
    fn classes_match_brute_force() {
        for name in named::BUNDLED {
            let g = named::by_name(name).unwrap();
            let cc = conjugacy_classes(&g);
            assert_eq!(cc.classes, brute_force_classes(&g), "{name}");
            assert_eq!(cc.sizes().iter().sum::<usize>(), g.order());
            assert!(cc.sizes().iter().all(|s| g.order() % s == 0));
            assert_eq!(cc.classes[0], vec![0]);
        }
    }
}
