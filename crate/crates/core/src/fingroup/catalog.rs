//! Small groups used as approximation targets.

use std::sync::Arc;

use crate::fingroup::{FinAbGroup, FinGroup};

/// Symmetric group on three letters: e, (12), (13), (23), (123), (132).
const S3_TABLE: [[usize; 6]; 6] = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 5, 4, 3, 2],
    [2, 4, 0, 5, 1, 3],
    [3, 5, 4, 0, 2, 1],
    [4, 2, 3, 1, 5, 0],
    [5, 3, 1, 2, 0, 4],
];

/// Dihedral group of the square: r^0..r^3 then s, sr, sr^2, sr^3.
const D4_TABLE: [[usize; 8]; 8] = [
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 2, 3, 0, 7, 4, 5, 6],
    [2, 3, 0, 1, 6, 7, 4, 5],
    [3, 0, 1, 2, 5, 6, 7, 4],
    [4, 5, 6, 7, 0, 1, 2, 3],
    [5, 6, 7, 4, 3, 0, 1, 2],
    [6, 7, 4, 5, 2, 3, 0, 1],
    [7, 4, 5, 6, 1, 2, 3, 0],
];

/// Quaternion group: 1, -1, i, -i, j, -j, k, -k.
const Q8_TABLE: [[usize; 8]; 8] = [
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 3, 2, 5, 4, 7, 6],
    [2, 3, 1, 0, 6, 7, 5, 4],
    [3, 2, 0, 1, 7, 6, 4, 5],
    [4, 5, 7, 6, 1, 0, 2, 3],
    [5, 4, 6, 7, 0, 1, 3, 2],
    [6, 7, 4, 5, 3, 2, 1, 0],
    [7, 6, 5, 4, 2, 3, 0, 1],
];

fn literal<const N: usize>(name: &str, rows: &[[usize; N]; N]) -> FinGroup {
    FinGroup::from_table(name, rows.iter().map(|r| r.to_vec()).collect())
        .expect("catalog table is a group")
}

pub fn s3() -> FinGroup {
    literal("S3", &S3_TABLE)
}

pub fn d4() -> FinGroup {
    literal("D4", &D4_TABLE)
}

pub fn q8() -> FinGroup {
    literal("Q8", &Q8_TABLE)
}

/// Every abelian group of order at most `max_order`, in invariant-factor
/// form, ordered by order and then by factor list.
pub fn abelian_up_to(max_order: u64) -> Vec<FinAbGroup> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        let mut chains = Vec::new();
        divisor_chains(n, 1, &mut Vec::new(), &mut chains);
        chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out.extend(chains.into_iter().map(FinAbGroup::from_invariant_unchecked));
    }
    out
}

// Chains d1 | d2 | ... | dk with every di >= 2 and product n.
fn divisor_chains(n: u64, prev: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if n == 1 {
        out.push(current.clone());
        return;
    }
    for d in 2..=n {
        if n.is_multiple_of(d) && d % prev == 0 {
            // Remaining cofactor must be a multiple of d for the chain to continue.
            let rest = n / d;
            if rest == 1 || rest.is_multiple_of(d) {
                current.push(d);
                divisor_chains(rest, d, current, out);
                current.pop();
            }
        }
    }
}

/// The default target catalog: abelian groups of order ≤ 8 plus S3, D4, Q8,
/// restricted to order ≤ `bound`.
pub fn default_catalog(bound: usize) -> Vec<Arc<FinGroup>> {
    let mut out: Vec<Arc<FinGroup>> = abelian_up_to(8)
        .into_iter()
        .filter(|a| a.order() as usize <= bound)
        .map(|a| Arc::new(a.to_fin_group().expect("small abelian table")))
        .collect();
    for g in [s3(), d4(), q8()] {
        if g.order() <= bound {
            out.push(Arc::new(g));
        }
    }
    out
}

/// `(F_p)^k` for `k = 0..=max_rank`, stopping once `p^k` exceeds `bound`.
pub fn elementary_catalog(p: u64, max_rank: usize, bound: usize) -> Vec<Arc<FinGroup>> {
    (0..=max_rank)
        .map(|k| FinAbGroup::from_invariant_unchecked(vec![p; k]))
        .take_while(|a| a.order() as usize <= bound)
        .map(|a| Arc::new(a.to_fin_group().expect("elementary abelian table")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        (0..a.len()).map(|i| a[b[i]]).collect()
    }

    // Independent construction from permutations; indices follow the
    // documented element orderings.
    fn perm_table(perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
        perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| perms.iter().position(|c| *c == compose(a, b)).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn s3_matches_permutation_composition() {
        let perms = vec![
            vec![0, 1, 2],
            vec![1, 0, 2],
            vec![2, 1, 0],
            vec![0, 2, 1],
            vec![1, 2, 0],
            vec![2, 0, 1],
        ];
        assert_eq!(s3().rows(), perm_table(&perms));
    }

    #[test]
    fn d4_matches_square_symmetries() {
        let r = |k: usize| (0..4).map(|i| (i + k) % 4).collect::<Vec<_>>();
        let s: Vec<usize> = (0..4).map(|i| (4 - i) % 4).collect();
        let mut perms: Vec<Vec<usize>> = (0..4).map(r).collect();
        perms.extend((0..4).map(|k| compose(&s, &r(k))));
        assert_eq!(d4().rows(), perm_table(&perms));
    }

    #[test]
    fn q8_matches_quaternion_units() {
        type Q = [i32; 4];
        let mul = |a: Q, b: Q| -> Q {
            [
                a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
            ]
        };
        let units: [Q; 8] = [
            [1, 0, 0, 0],
            [-1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, -1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, -1, 0],
            [0, 0, 0, 1],
            [0, 0, 0, -1],
        ];
        let rows: Vec<Vec<usize>> = units
            .iter()
            .map(|&a| {
                units
                    .iter()
                    .map(|&b| units.iter().position(|&c| c == mul(a, b)).unwrap())
                    .collect()
            })
            .collect();
        assert_eq!(q8().rows(), rows);
    }

    #[test]
    fn abelian_groups_up_to_eight() {
        let names: Vec<String> = abelian_up_to(8).iter().map(|a| a.name()).collect();
        assert_eq!(
            names,
            vec![
                "1",
                "Z/2",
                "Z/3",
                "Z/4",
                "Z/2 x Z/2",
                "Z/5",
                "Z/6",
                "Z/7",
                "Z/8",
                "Z/2 x Z/4",
                "Z/2 x Z/2 x Z/2"
            ]
        );
    }

    #[test]
    fn default_catalog_respects_bound() {
        assert_eq!(default_catalog(8).len(), 14);
        assert_eq!(default_catalog(4).len(), 5);
        assert_eq!(default_catalog(1).len(), 1);
    }
}
