use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fingroup::abelian::invariant_factors_from_orders;

/// Default order up to which table groups are verified exhaustively.
pub const DEFAULT_TABLE_BOUND: usize = 256;

/// A finite group given by its multiplication table.
///
/// Elements are `0..order`, index 0 is the identity and `op(a, b)` is the
/// entry `table[a * order + b]`. Construction verifies the table is a Latin
/// square with identity row/column 0, that it is associative and that every
/// element has a two-sided inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
    element_orders: Vec<u64>,
    abelian_coords: Option<Vec<u64>>,
}

impl FinGroup {
    pub fn from_table(name: impl Into<String>, rows: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_table_with_bound(name, rows, DEFAULT_TABLE_BOUND)
    }

    /// Builds a table group, rejecting tables larger than `bound`.
    pub fn from_table_with_bound(
        name: impl Into<String>,
        rows: Vec<Vec<usize>>,
        bound: usize,
    ) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if n > bound {
            return Err(Error::Budget {
                what: "table group order",
                needed: n as u128,
                limit: bound as u128,
            });
        }
        let mut table = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!(
                    "row {a} has length {}, expected {n}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::InvalidTable(format!(
                        "entry {x} out of range in row {a}"
                    )));
                }
            }
            table.extend_from_slice(row);
        }
        Self::from_flat(name.into(), n, table)
    }

    pub(crate) fn from_flat(name: String, n: usize, table: Vec<usize>) -> Result<Self> {
        for a in 0..n {
            if table[a] != a || table[a * n] != a {
                return Err(Error::InvalidTable(format!(
                    "index 0 is not the identity (row/column {a})"
                )));
            }
        }
        let mut seen = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                let x = table[a * n + b];
                if seen[x] == a {
                    return Err(Error::InvalidTable(format!("row {a} repeats {x}")));
                }
                seen[x] = a;
            }
        }
        let mut seen = vec![usize::MAX; n];
        for b in 0..n {
            for a in 0..n {
                let x = table[a * n + b];
                if seen[x] == b {
                    return Err(Error::InvalidTable(format!("column {b} repeats {x}")));
                }
                seen[x] = b;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b];
                for c in 0..n {
                    if table[ab * n + c] != table[a * n + table[b * n + c]] {
                        return Err(Error::InvalidTable(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![0; n];
        for a in 0..n {
            let b = (0..n).find(|&b| table[a * n + b] == 0).expect("latin row");
            if table[b * n + a] != 0 {
                return Err(Error::InvalidTable(format!("{a} has no two-sided inverse")));
            }
            inverses[a] = b;
        }
        let element_orders = (0..n)
            .map(|a| {
                let mut x = a;
                let mut k = 1u64;
                while x != 0 {
                    x = table[x * n + a];
                    k += 1;
                }
                k
            })
            .collect();
        Ok(FinGroup {
            name,
            order: n,
            table,
            inverses,
            element_orders,
            abelian_coords: None,
        })
    }

    pub fn trivial() -> Self {
        Self::from_flat("1".into(), 1, vec![0]).expect("trivial table")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches the mixed-radix coordinate system the table indices use
    /// (first coordinate most significant).
    pub(crate) fn with_abelian_coords(mut self, factors: Vec<u64>) -> Self {
        debug_assert_eq!(factors.iter().product::<u64>() as usize, self.order);
        self.abelian_coords = Some(factors);
        self
    }

    /// The cyclic factors indexing this table, when it was built from a
    /// finite abelian group.
    pub fn abelian_coords(&self) -> Option<&[u64]> {
        self.abelian_coords.as_deref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.element_orders[a]
    }

    pub fn element_orders(&self) -> &[u64] {
        &self.element_orders
    }

    /// `a^k` for any integer `k`.
    pub fn pow(&self, a: usize, k: i64) -> usize {
        let ord = self.element_orders[a] as i64;
        let mut e = k.rem_euclid(ord);
        let mut base = a;
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(acc, base);
            }
            base = self.op(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.op(a, b) == self.op(b, a)))
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.op(a, b) == self.op(b, a)
    }

    pub fn exponent(&self) -> u64 {
        self.element_orders
            .iter()
            .fold(1, |acc, &o| num_integer::lcm(acc, o))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut stack = vec![0];
        while let Some(a) = stack.pop() {
            for &g in gens {
                let b = self.op(a, g);
                if !inside[b] {
                    inside[b] = true;
                    stack.push(b);
                }
            }
        }
        (0..self.order).filter(|&a| inside[a]).collect()
    }

    /// A small generating set, chosen greedily in index order.
    pub fn generators(&self) -> Vec<usize> {
        generators_of(self, &(0..self.order).collect::<Vec<_>>())
    }

    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        set.contains(&0)
            && set.iter().all(|&a| {
                set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.op(a, b)))
            })
    }

    pub fn is_normal(&self, sub: &[usize]) -> bool {
        let set: BTreeSet<usize> = sub.iter().copied().collect();
        (0..self.order).all(|g| {
            let gi = self.inv(g);
            set.iter()
                .all(|&h| set.contains(&self.op(self.op(g, h), gi)))
        })
    }

    /// Sorted elements of the smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut conj = BTreeSet::new();
        for &h in gens {
            for g in 0..self.order {
                conj.insert(self.op(self.op(g, h), self.inv(g)));
            }
        }
        self.closure(&conj.into_iter().collect::<Vec<_>>())
    }

    /// All normal subgroups, ordered by size and then lexicographically.
    pub fn normal_subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier = vec![vec![0]];
        found.insert(vec![0]);
        while let Some(n) = frontier.pop() {
            let inside: BTreeSet<usize> = n.iter().copied().collect();
            for g in 0..self.order {
                if inside.contains(&g) {
                    continue;
                }
                let mut gens = n.clone();
                gens.push(g);
                let m = self.normal_closure(&gens);
                if found.insert(m.clone()) {
                    frontier.push(m);
                }
            }
        }
        let mut all: Vec<_> = found.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    /// Quotient by a normal subgroup. Cosets are numbered by their smallest
    /// element, so the coset of the identity gets index 0. Returns the
    /// quotient table and the projection as an element map.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FinGroup, Vec<usize>)> {
        if !self.is_subgroup(normal) || !self.is_normal(normal) {
            return Err(Error::Invalid("quotient by a non-normal subset".into()));
        }
        let mut coset = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if coset[g] == usize::MAX {
                let idx = reps.len();
                reps.push(g);
                for &h in normal {
                    coset[self.op(g, h)] = idx;
                }
            }
        }
        let k = reps.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &reps {
            for &b in &reps {
                table.push(coset[self.op(a, b)]);
            }
        }
        let mut q = FinGroup::from_flat(String::new(), k, table)?;
        q.name = match q.abelian_invariants() {
            Some(f) => crate::fingroup::abelian::FinAbGroup::invariant_name(&f),
            None => format!("{}/N{}", self.name, normal.len()),
        };
        Ok((q, coset))
    }

    /// Invariant factors when the group is abelian.
    pub fn abelian_invariants(&self) -> Option<Vec<u64>> {
        if !self.is_abelian() {
            return None;
        }
        Some(invariant_factors_from_orders(
            self.element_orders.iter().copied(),
        ))
    }
}

/// Greedy generating set for the subgroup with the given sorted elements.
pub(crate) fn generators_of(group: &FinGroup, elements: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut current = vec![0usize];
    for &a in elements {
        if current.binary_search(&a).is_err() {
            gens.push(a);
            current = group.closure(&gens);
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::catalog;

    #[test]
    fn rejects_non_latin_table() {
        let err = FinGroup::from_table("bad", vec![vec![0, 1], vec![1, 1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }

    #[test]
    fn rejects_non_identity_first_row() {
        let err = FinGroup::from_table("bad", vec![vec![1, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }

    #[test]
    fn rejects_non_associative_loop() {
        // A Latin square with identity 0 that is not a group (order-5 loop).
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FinGroup::from_table("loop", rows).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }

    #[test]
    fn rejects_oversized_table() {
        let rows = catalog::s3().rows();
        let err = FinGroup::from_table_with_bound("s3", rows, 5).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn s3_normal_subgroups() {
        let s3 = catalog::s3();
        let normals = s3.normal_subgroups();
        let sizes: Vec<usize> = normals.iter().map(|n| n.len()).collect();
        assert_eq!(sizes, vec![1, 3, 6]);
        let (q, proj) = s3.quotient(&normals[1]).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(q.name(), "Z/2");
        assert_eq!(proj[0], 0);
    }

    #[test]
    fn d4_and_q8_have_the_expected_lattices() {
        // D4: 1, <r^2>, three of order 4, itself. Q8: 1, <-1>, three of order 4, itself.
        let d4 = catalog::d4();
        let q8 = catalog::q8();
        let sizes = |g: &FinGroup| {
            g.normal_subgroups()
                .iter()
                .map(|n| n.len())
                .collect::<Vec<_>>()
        };
        assert_eq!(sizes(&d4), vec![1, 2, 4, 4, 4, 8]);
        assert_eq!(sizes(&q8), vec![1, 2, 4, 4, 4, 8]);
        assert!(!d4.is_abelian());
        assert!(!q8.is_abelian());
        // Told apart by their involution counts.
        let involutions = |g: &FinGroup| g.element_orders().iter().filter(|&&o| o == 2).count();
        assert_eq!(involutions(&d4), 5);
        assert_eq!(involutions(&q8), 1);
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let z = crate::fingroup::FinAbGroup::cyclic(5)
            .to_fin_group()
            .unwrap();
        assert_eq!(z.pow(1, -1), 4);
        assert_eq!(z.pow(2, 7), 4);
        assert_eq!(z.pow(3, 0), 0);
    }

    #[test]
    fn greedy_generators_generate() {
        for g in [catalog::s3(), catalog::d4(), catalog::q8()] {
            let gens = g.generators();
            assert_eq!(g.closure(&gens).len(), g.order());
            assert!(gens.len() <= 3);
        }
    }
}
