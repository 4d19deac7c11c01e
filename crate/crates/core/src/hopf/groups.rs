//! Finite groups given by Cayley tables.

use crate::{Error, Result};

/// A finite group with identity at index 0. `table[a][b]` is the index of `ab`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub name: String,
    pub labels: Vec<String>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(name: &str, labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let bad = |m: String| Err(Error::InvalidGroupTable(format!("{name}: {m}")));
        if n == 0 {
            return bad("empty table".into());
        }
        if labels.len() != n {
            return bad(format!("{} labels for {n} elements", labels.len()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {a} has length {}", row.len()));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return bad(format!("row {a} is not a permutation"));
                }
                seen[x] = true;
            }
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return bad("index 0 is not the identity".into());
            }
            let mut seen = vec![false; n];
            for row in &table {
                if seen[row[a]] {
                    return bad(format!("column {a} is not a permutation"));
                }
                seen[row[a]] = true;
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("associativity fails at ({a},{b},{c})"));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == 0).expect("latin square"))
            .collect();
        Ok(Self {
            name: name.to_string(),
            labels,
            table,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        self.commute_within(&(0..self.order()).collect::<Vec<_>>())
    }

    pub fn commute_within(&self, elems: &[usize]) -> bool {
        elems
            .iter()
            .all(|&a| elems.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        !elems.is_empty()
            && elems.iter().all(|&a| a < self.order())
            && elems.contains(&0)
            && elems
                .iter()
                .all(|&a| elems.iter().all(|&b| elems.contains(&self.mul(a, self.inv(b)))))
    }

    /// Conjugacy classes, each sorted, ordered by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let mut cls: Vec<usize> = (0..n)
                .map(|g| self.mul(self.mul(g, a), self.inv(g)))
                .collect();
            cls.sort_unstable();
            cls.dedup();
            for &x in &cls {
                class_of[x] = classes.len();
            }
            classes.push(cls);
        }
        classes
    }

    /// `A × B` with `(a, b) ↦ a·|B| + b`.
    pub fn direct_product(a: &Self, b: &Self) -> Result<Self> {
        let (na, nb) = (a.order(), b.order());
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        let labels = (0..na * nb)
            .map(|x| format!("({},{})", a.labels[x / nb], b.labels[x % nb]))
            .collect();
        Self::new(&format!("{}x{}", a.name, b.name), labels, table)
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|a| format!("g{a}")).collect();
        Self::new(&format!("Z{n}"), labels, table)
    }

    /// `Z2 × Z2` with `(s, t) ↦ 2s + t`.
    pub fn klein() -> Result<Self> {
        let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        let labels = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"].map(String::from).to_vec();
        Self::new("Z2xZ2", labels, table)
    }

    /// Permutations of three points, composed right to left.
    pub fn symmetric3() -> Result<Self> {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 0, 2],
            [2, 1, 0],
            [0, 2, 1],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let labels = ["e", "(01)", "(02)", "(12)", "(012)", "(021)"].map(String::from).to_vec();
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index([p[q[0]], p[q[1]], p[q[2]]]))
                    .collect()
            })
            .collect();
        Self::new("S3", labels, table)
    }

    /// Dihedral group of order 8; `r^k s^l` has index `k + 4l`.
    pub fn dihedral4() -> Result<Self> {
        let mut table = vec![vec![0; 8]; 8];
        for (x, row) in table.iter_mut().enumerate() {
            let (a, b) = (x % 4, x / 4);
            for (y, cell) in row.iter_mut().enumerate() {
                let (c, d) = (y % 4, y / 4);
                let k = if b == 0 { (a + c) % 4 } else { (a + 4 - c) % 4 };
                *cell = k + 4 * ((b + d) % 2);
            }
        }
        let labels = ["e", "r", "r2", "r3", "s", "rs", "r2s", "r3s"].map(String::from).to_vec();
        Self::new("D4", labels, table)
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Result<Self> {
        // (sign, unit) with unit 0 = 1, 1 = i, 2 = j, 3 = k
        let elems: Vec<(i8, usize)> = (0..8).map(|x| (if x % 2 == 0 { 1 } else { -1 }, x / 2)).collect();
        let unit_mul = |a: usize, b: usize| -> (i8, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (1, x),
                (x, y) if x == y => (-1, 0),
                (1, 2) => (1, 3),
                (2, 3) => (1, 1),
                (3, 1) => (1, 2),
                (2, 1) => (-1, 3),
                (3, 2) => (-1, 1),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            }
        };
        let table = elems
            .iter()
            .map(|&(sa, ua)| {
                elems
                    .iter()
                    .map(|&(sb, ub)| {
                        let (s, u) = unit_mul(ua, ub);
                        let sign = sa * sb * s;
                        2 * u + usize::from(sign < 0)
                    })
                    .collect()
            })
            .collect();
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].map(String::from).to_vec();
        Self::new("Q8", labels, table)
    }

    /// Resolves `Z1`, `Z2`, `Z3`, `Z4`, `Z2xZ2`, `S3`, `D4`, `Q8`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "Z2xZ2" => Self::klein(),
            "S3" => Self::symmetric3(),
            "D4" => Self::dihedral4(),
            "Q8" => Self::quaternion(),
            _ if name.contains('x') => {
                let (a, b) = name.split_once('x').expect("checked");
                Self::direct_product(&Self::builtin(a)?, &Self::builtin(b)?)
            }
            _ => match name.strip_prefix('Z').and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if (1..=12).contains(&n) => Self::cyclic(n),
                _ => Err(Error::UnknownBuiltin(name.to_string())),
            },
        }
    }
}

pub const BUILTIN_GROUPS: [&str; 7] = ["Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_groups() {
        for name in BUILTIN_GROUPS {
            let g = FiniteGroup::builtin(name).unwrap();
            assert_eq!(g.name, name);
        }
        assert_eq!(FiniteGroup::builtin("Z1").unwrap().order(), 1);
        assert!(FiniteGroup::builtin("A5").is_err());
        let p = FiniteGroup::builtin("Z3xS3").unwrap();
        assert_eq!(p.order(), 18);
        assert!(!p.is_abelian());
        assert!(p.is_subgroup(&[0, 4, 5, 6, 10, 11, 12, 16, 17]));
    }

    #[test]
    fn abelian_flags() {
        for (name, ab) in [("Z4", true), ("Z2xZ2", true), ("S3", false), ("D4", false), ("Q8", false)] {
            assert_eq!(FiniteGroup::builtin(name).unwrap().is_abelian(), ab, "{name}");
        }
    }

    #[test]
    fn class_counts() {
        for (name, k) in [("S3", 3), ("D4", 5), ("Q8", 5), ("Z3", 3)] {
            assert_eq!(FiniteGroup::builtin(name).unwrap().conjugacy_classes().len(), k, "{name}");
        }
    }

    #[test]
    fn dihedral_relations() {
        let g = FiniteGroup::dihedral4().unwrap();
        let (r, s) = (1, 4);
        // s r s = r^{-1}
        assert_eq!(g.mul(g.mul(s, r), s), 3);
        assert!(g.is_subgroup(&[0, 2, 4, 6]));
        assert!(g.commute_within(&[0, 2, 4, 6]));
        assert!(!g.is_subgroup(&[0, 1]));
    }

    #[test]
    fn quaternion_relations() {
        let g = FiniteGroup::quaternion().unwrap();
        let (i, j, k) = (2, 4, 6);
        assert_eq!(g.mul(i, j), k);
        assert_eq!(g.mul(j, i), 7);
        assert_eq!(g.mul(i, i), 1);
    }

    #[test]
    fn rejects_bad_tables() {
        let bad = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::new("x", vec!["a".into(), "b".into()], bad).is_err());
        let not_identity = vec![vec![1, 0], vec![0, 1]];
        assert!(FiniteGroup::new("x", vec!["a".into(), "b".into()], not_identity).is_err());
    }
}
