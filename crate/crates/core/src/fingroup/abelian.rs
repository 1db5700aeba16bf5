use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::fingroup::intmat::{quotient_by_rows, smith_normal_form, IntMatrix};
use crate::fingroup::table::{FinGroup, DEFAULT_TABLE_BOUND};

/// Finite abelian group `Z/d1 x ... x Z/dk` in invariant-factor form
/// (`d1 | d2 | ... | dk`, every `di >= 2`; the empty list is the trivial
/// group).
///
/// Elements are residue tuples in those coordinates. The factor list the
/// group was built from is kept as a label only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    factors: Vec<u64>,
    label: Vec<u64>,
}

impl FinAbGroup {
    /// `Z/f1 x ... x Z/fk`, normalized through its Smith form. Factors equal
    /// to 1 are dropped; zero or negative factors are rejected.
    pub fn cyclic_product(factors: &[i64]) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&f| f <= 0) {
            return Err(Error::Invalid(format!(
                "cyclic factor {bad} must be positive"
            )));
        }
        let label: Vec<u64> = factors
            .iter()
            .filter(|&&f| f > 1)
            .map(|&f| f as u64)
            .collect();
        let diag: Vec<i64> = label.iter().map(|&f| f as i64).collect();
        let snf = smith_normal_form(&IntMatrix::diagonal(&diag));
        let factors = snf
            .diagonal()
            .iter()
            .map(|d| d.to_u64().expect("factor fits u64"))
            .filter(|&d| d > 1)
            .collect();
        Ok(FinAbGroup { factors, label })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::cyclic_product(&[n as i64]).expect("positive order")
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            factors: Vec::new(),
            label: Vec::new(),
        }
    }

    /// Wraps a list already known to be an invariant-factor chain.
    pub fn from_invariant(factors: Vec<u64>) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::Invalid(
                "invariant factors must be at least 2".into(),
            ));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Invalid(format!(
                "{factors:?} is not a divisibility chain"
            )));
        }
        Ok(Self::from_invariant_unchecked(factors))
    }

    pub(crate) fn from_invariant_unchecked(factors: Vec<u64>) -> Self {
        FinAbGroup {
            label: factors.clone(),
            factors,
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn label(&self) -> &[u64] {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn name(&self) -> String {
        Self::invariant_name(&self.factors)
    }

    pub(crate) fn invariant_name(factors: &[u64]) -> String {
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors
                .iter()
                .map(|d| format!("Z/{d}"))
                .collect::<Vec<_>>()
                .join(" x ")
        }
    }

    pub fn identity(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((x, y), m)| (x + y) % m)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(&self.factors)
            .map(|(x, m)| (m - x) % m)
            .collect()
    }

    /// Reduces an integer tuple into canonical residues.
    pub fn reduce(&self, a: &[i64]) -> Vec<u64> {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &m)| x.rem_euclid(m as i64) as u64)
            .collect()
    }

    /// Mixed-radix index of an element, first coordinate most significant.
    pub fn index_of(&self, a: &[u64]) -> usize {
        encode(&self.factors, a)
    }

    pub fn element(&self, index: usize) -> Vec<u64> {
        decode(&self.factors, index)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order() as usize).map(|i| self.element(i))
    }

    /// Multiplication table in index order; the table keeps the coordinate
    /// system so elements can be decoded again.
    pub fn to_fin_group(&self) -> Result<FinGroup> {
        let n = self.order();
        if n as usize > DEFAULT_TABLE_BOUND || n > u32::MAX as u64 {
            return Err(Error::Budget {
                what: "abelian group as a table",
                needed: n as u128,
                limit: DEFAULT_TABLE_BOUND as u128,
            });
        }
        let n = n as usize;
        let elems: Vec<Vec<u64>> = self.elements().collect();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                table.push(self.index_of(&self.add(a, b)));
            }
        }
        Ok(FinGroup::from_flat(self.name(), n, table)?.with_abelian_coords(self.factors.clone()))
    }

    /// `G / <h_1, ..., h_m>` with the canonical projection.
    pub fn quotient(&self, subgroup_gens: &[Vec<i64>]) -> Result<(FinAbGroup, AbelianHom)> {
        let k = self.rank();
        for h in subgroup_gens {
            if h.len() != k {
                return Err(Error::Dimension {
                    expected: k,
                    found: h.len(),
                });
            }
        }
        let mut rows: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let mut r = vec![0i64; k];
                r[i] = self.factors[i] as i64;
                r
            })
            .collect();
        rows.extend(subgroup_gens.iter().cloned());
        let (factors, images) = quotient_by_rows(&IntMatrix::from_rows(&rows, k));
        let target = FinAbGroup::from_invariant_unchecked(factors);
        let matrix = (0..target.rank())
            .map(|i| images.iter().map(|col| col[i] as i64).collect())
            .collect();
        let proj = AbelianHom::new(self.clone(), target.clone(), matrix)?;
        Ok((target, proj))
    }

    /// Equality of invariant factors.
    pub fn is_isomorphic(&self, other: &FinAbGroup) -> bool {
        self.factors == other.factors
    }
}

/// Isomorphism test for finite abelian groups (invariant factors agree).
pub fn are_isomorphic(a: &FinAbGroup, b: &FinAbGroup) -> bool {
    a.is_isomorphic(b)
}

pub(crate) fn encode(factors: &[u64], a: &[u64]) -> usize {
    a.iter()
        .zip(factors)
        .fold(0usize, |acc, (&x, &m)| acc * m as usize + x as usize)
}

pub(crate) fn decode(factors: &[u64], mut index: usize) -> Vec<u64> {
    let mut out = vec![0; factors.len()];
    for i in (0..factors.len()).rev() {
        let m = factors[i] as usize;
        out[i] = (index % m) as u64;
        index /= m;
    }
    out
}

/// Invariant factors of a finite abelian group from the multiset of its
/// element orders.
///
/// For each prime `p`, the number of elements killed by `p^k` is
/// `p^(sum_i min(λ_i, k))`, which recovers the partition `λ` of the
/// `p`-primary part.
pub fn invariant_factors_from_orders(orders: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let orders: Vec<u64> = orders.into_iter().collect();
    let n = orders.len() as u64;
    let mut primes = Vec::new();
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            primes.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    // parts[p] = partition of the p-primary component, largest first.
    let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &p in &primes {
        let mut prev_sum = 0u32;
        let mut at_least = Vec::new();
        let mut k = 1u32;
        loop {
            let pk = p.pow(k);
            let killed = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            let mut s = 0u32;
            let mut x = killed;
            while x > 1 {
                x /= p;
                s += 1;
            }
            if s == prev_sum {
                break;
            }
            at_least.push(s - prev_sum);
            prev_sum = s;
            k += 1;
        }
        // at_least[k-1] = number of cyclic factors of exponent >= k.
        let count = at_least.first().copied().unwrap_or(0) as usize;
        let mut lambda = vec![0u32; count];
        for (k, &c) in at_least.iter().enumerate() {
            for l in lambda.iter_mut().take(c as usize) {
                *l = k as u32 + 1;
            }
        }
        parts.insert(p, lambda);
    }
    let len = parts.values().map(|l| l.len()).max().unwrap_or(0);
    let mut factors = vec![1u64; len];
    for (&p, lambda) in &parts {
        for (i, &e) in lambda.iter().enumerate() {
            factors[len - 1 - i] *= p.pow(e);
        }
    }
    factors
}

/// Homomorphism between finite abelian groups given by an integer matrix:
/// column `j` holds the target coordinates of the image of generator `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianHom {
    source: FinAbGroup,
    target: FinAbGroup,
    matrix: Vec<Vec<i64>>,
}

impl AbelianHom {
    /// Checks that each source relation `d_j e_j` maps to zero.
    pub fn new(source: FinAbGroup, target: FinAbGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.rank() {
            return Err(Error::Dimension {
                expected: target.rank(),
                found: matrix.len(),
            });
        }
        for row in &matrix {
            if row.len() != source.rank() {
                return Err(Error::Dimension {
                    expected: source.rank(),
                    found: row.len(),
                });
            }
        }
        let matrix: Vec<Vec<i64>> = matrix
            .iter()
            .zip(target.factors())
            .map(|(row, &m)| row.iter().map(|x| x.rem_euclid(m as i64)).collect())
            .collect();
        for (j, &d) in source.factors().iter().enumerate() {
            for (i, &m) in target.factors().iter().enumerate() {
                if (matrix[i][j] as i128 * d as i128) % m as i128 != 0 {
                    return Err(Error::Invalid(format!(
                        "relation {d}·e{j} does not map to zero"
                    )));
                }
            }
        }
        Ok(AbelianHom {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        let k = g.rank();
        let matrix = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        AbelianHom::new(g.clone(), g.clone(), matrix).expect("identity is a homomorphism")
    }

    pub fn source(&self) -> &FinAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FinAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.matrix
            .iter()
            .zip(self.target.factors())
            .map(|(row, &m)| {
                let s: i128 = row
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                s.rem_euclid(m as i128) as u64
            })
            .collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &AbelianHom) -> Result<AbelianHom> {
        if self.target != *g.source() {
            return Err(Error::Mismatch(format!(
                "target {} is not source {}",
                self.target.name(),
                g.source().name()
            )));
        }
        let matrix = (0..g.target.rank())
            .map(|i| {
                (0..self.source.rank())
                    .map(|j| {
                        (0..self.target.rank())
                            .map(|k| g.matrix[i][k] as i128 * self.matrix[k][j] as i128)
                            .sum::<i128>()
                            .rem_euclid(g.target.factors()[i] as i128)
                            as i64
                    })
                    .collect()
            })
            .collect();
        AbelianHom::new(self.source.clone(), g.target.clone(), matrix)
    }

    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let zero = self.target.identity();
        self.source
            .elements()
            .filter(|x| self.apply(x) == zero)
            .collect()
    }

    pub fn image(&self) -> Vec<Vec<u64>> {
        let mut seen = vec![false; self.target.order() as usize];
        for x in self.source.elements() {
            seen[self.target.index_of(&self.apply(&x))] = true;
        }
        (0..seen.len())
            .filter(|&i| seen[i])
            .map(|i| self.target.element(i))
            .collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() as u64 == self.target.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_product_examples() {
        let t = FinAbGroup::cyclic_product(&[]).unwrap();
        assert_eq!(t.order(), 1);
        assert!(t.factors().is_empty());
        let k = FinAbGroup::cyclic_product(&[2, 2]).unwrap();
        assert_eq!(k.order(), 4);
        assert_eq!(k.exponent(), 2);
        let c = FinAbGroup::cyclic_product(&[2, 3]).unwrap();
        assert_eq!(c.factors(), &[6]);
        assert_eq!(c.label(), &[2, 3]);
        assert_eq!(
            FinAbGroup::cyclic_product(&[1, 4, 1]).unwrap().factors(),
            &[4]
        );
        assert!(FinAbGroup::cyclic_product(&[0]).is_err());
        assert!(FinAbGroup::cyclic_product(&[-3]).is_err());
    }

    #[test]
    fn z2_times_z3_is_cyclic_by_crt() {
        // Oracle: componentwise Z/2 x Z/3 has an element of order 6.
        let order = |a: u64, b: u64| {
            (1..=6)
                .find(|k| (a * k).is_multiple_of(2) && (b * k).is_multiple_of(3))
                .unwrap()
        };
        assert!((0..2).any(|a| (0..3).any(|b| order(a, b) == 6)));
        assert!(are_isomorphic(
            &FinAbGroup::cyclic_product(&[2, 3]).unwrap(),
            &FinAbGroup::cyclic(6)
        ));
    }

    #[test]
    fn isomorphism_examples() {
        assert!(!are_isomorphic(
            &FinAbGroup::cyclic(4),
            &FinAbGroup::cyclic_product(&[2, 2]).unwrap()
        ));
        assert!(are_isomorphic(
            &FinAbGroup::trivial(),
            &FinAbGroup::cyclic(1)
        ));
    }

    #[test]
    fn isomorphism_is_an_equivalence_on_small_groups() {
        let mut groups = Vec::new();
        for a in 1..=6i64 {
            for b in 1..=6i64 {
                groups.push(FinAbGroup::cyclic_product(&[a, b]).unwrap());
            }
        }
        for x in &groups {
            assert!(are_isomorphic(x, x));
            for y in &groups {
                assert_eq!(are_isomorphic(x, y), are_isomorphic(y, x));
                for z in &groups {
                    if are_isomorphic(x, y) && are_isomorphic(y, z) {
                        assert!(are_isomorphic(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn table_conversion_is_a_group() {
        for f in [vec![], vec![2i64, 2], vec![2, 4], vec![3, 3], vec![12]] {
            let g = FinAbGroup::cyclic_product(&f).unwrap();
            let t = g.to_fin_group().unwrap();
            assert_eq!(t.order() as u64, g.order());
            assert!(t.is_abelian());
            assert_eq!(t.abelian_invariants().unwrap(), g.factors());
        }
    }

    #[test]
    fn invariants_from_orders_examples() {
        let orders = |f: &[i64]| {
            let t = FinAbGroup::cyclic_product(f)
                .unwrap()
                .to_fin_group()
                .unwrap();
            invariant_factors_from_orders(t.element_orders().iter().copied())
        };
        assert_eq!(orders(&[2, 3]), vec![6]);
        assert_eq!(orders(&[2, 2, 4]), vec![2, 2, 4]);
        assert_eq!(orders(&[4, 6]), vec![2, 12]);
        assert_eq!(orders(&[]), Vec::<u64>::new());
    }

    #[test]
    fn quotient_examples() {
        let z4 = FinAbGroup::cyclic(4);
        let (q, proj) = z4.quotient(&[vec![2]]).unwrap();
        assert_eq!(q.factors(), &[2]);
        for x in 0..4u64 {
            assert_eq!(proj.apply(&[x]), vec![x % 2]);
        }
        assert_eq!(proj.kernel(), vec![vec![0], vec![2]]);

        let (q, proj) = z4.quotient(&[]).unwrap();
        assert_eq!(q, z4);
        assert!(proj.is_surjective());
        assert_eq!(proj.kernel().len(), 1);

        let f2_3 = FinAbGroup::cyclic_product(&[2, 2, 2]).unwrap();
        let (q, proj) = f2_3.quotient(&[vec![1, 1, 0]]).unwrap();
        assert_eq!(q.factors(), &[2, 2]);
        assert!(proj.is_surjective());
        assert_eq!(proj.kernel(), vec![vec![0, 0, 0], vec![1, 1, 0]]);
    }

    #[test]
    fn quotient_orders_multiply() {
        let g = FinAbGroup::cyclic_product(&[2, 4, 4]).unwrap();
        let subgroups: Vec<Vec<Vec<i64>>> = vec![
            vec![],
            vec![vec![0, 0, 2]],
            vec![vec![1, 1, 0]],
            vec![vec![0, 1, 1], vec![1, 0, 2]],
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        ];
        for h in subgroups {
            let (q, proj) = g.quotient(&h).unwrap();
            assert!(proj.is_surjective());
            let kernel = proj.kernel();
            assert_eq!(g.order(), q.order() * kernel.len() as u64);
            // Kernel is exactly the subgroup generated by h.
            let t = g.to_fin_group().unwrap();
            let gens: Vec<usize> = h.iter().map(|v| g.index_of(&g.reduce(v))).collect();
            let sub = t.closure(&gens);
            let ker_idx: Vec<usize> = kernel.iter().map(|x| g.index_of(x)).collect();
            assert_eq!(sub, ker_idx);
        }
    }

    #[test]
    fn compose_and_image() {
        let z4 = FinAbGroup::cyclic(4);
        let double = AbelianHom::new(z4.clone(), z4.clone(), vec![vec![2]]).unwrap();
        assert_eq!(double.image(), vec![vec![0], vec![2]]);
        assert!(!double.is_surjective());
        let id = AbelianHom::identity(&z4);
        assert_eq!(id.then(&double).unwrap(), double);
        assert_eq!(double.then(&double).unwrap().image(), vec![vec![0]]);
        let z2 = FinAbGroup::cyclic(2);
        let red = AbelianHom::new(z4.clone(), z2.clone(), vec![vec![1]]).unwrap();
        assert!(red.then(&double).is_err());
        assert!(AbelianHom::new(z2, z4, vec![vec![1]]).is_err());
    }
}
