//! Integer matrices: Smith and Hermite normal forms and finite-index
//! sublattices of `Z^m`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense integer matrix with arbitrary-size entries.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * n + i] = BigInt::from(x);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = -&self.data[idx];
        }
    }

    // row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    // col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }
}

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal, its diagonal
/// non-negative and forming a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

/// Smith normal form by row/column gcd elimination.
///
/// The pivot is the entry of least nonzero absolute value in the remaining
/// block, ties broken by lowest `(row, col)`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = min_abs_pivot(&a, t) else {
                return SmithForm { u, d: a, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            let pivot = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                let q = -a.get(i, t).div_floor(&pivot);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = -a.get(t, j).div_floor(&pivot);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender =
                (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
    }
    SmithForm { u, d: a, v }
}

fn min_abs_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Row-style Hermite normal form: the nonzero rows of the result form an
/// echelon basis of the row lattice, pivots positive, entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        loop {
            let mut best: Option<(usize, BigInt)> = None;
            for i in r..a.rows {
                let x = a.get(i, c);
                if !x.is_zero() && best.as_ref().is_none_or(|(_, b)| x.abs() < *b) {
                    best = Some((i, x.abs()));
                }
            }
            let Some((i, _)) = best else { break };
            a.swap_rows(r, i);
            if a.get(r, c).is_negative() {
                a.negate_row(r);
            }
            let pivot = a.get(r, c).clone();
            let mut done = true;
            for i in r + 1..a.rows {
                let q = -a.get(i, c).div_floor(&pivot);
                a.add_row_multiple(i, r, &q);
                done &= a.get(i, c).is_zero();
            }
            if done {
                break;
            }
        }
        if r < a.rows && !a.get(r, c).is_zero() {
            let pivot = a.get(r, c).clone();
            for i in 0..r {
                let q = -a.get(i, c).div_floor(&pivot);
                a.add_row_multiple(i, r, &q);
            }
            r += 1;
        }
    }
    let cols = a.cols;
    IntMatrix {
        rows: r,
        cols,
        data: a.data[..r * cols].to_vec(),
    }
}

/// A full-rank sublattice of `Z^m` held as an upper-triangular HNF basis
/// (pivot of row `i` in column `i`, entries above pivots reduced).
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    basis: Vec<Vec<BigInt>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.basis_i64())
    }
}

impl Lattice {
    /// `n * Z^m`.
    pub fn scaled_identity(dim: usize, n: u64) -> Self {
        assert!(n > 0, "lattice must have full rank");
        let basis = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            BigInt::from(n)
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Lattice { basis }
    }

    pub(crate) fn from_hnf_rows(rows: Vec<Vec<i64>>) -> Self {
        let basis = rows
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        Lattice { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `[Z^m : L]`, the product of the pivots.
    pub fn index(&self) -> BigInt {
        (0..self.dim()).map(|i| self.basis[i][i].clone()).product()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Basis entries as `i64`.
    ///
    /// Panics if an entry does not fit; entries are bounded by the index,
    /// which every caller keeps far below `i64::MAX`.
    pub fn basis_i64(&self) -> Vec<Vec<i64>> {
        self.basis
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_i64().expect("lattice entry fits i64"))
                    .collect()
            })
            .collect()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for i in 0..self.dim() {
            let (q, r) = w[i].div_mod_floor(&self.basis[i][i]);
            if !r.is_zero() {
                return false;
            }
            for j in i..self.dim() {
                w[j] -= &q * &self.basis[i][j];
            }
        }
        true
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_i64().iter().all(|r| self.contains(r))
    }

    /// Adds a vector to the lattice (the result is the lattice generated by
    /// the old basis and `v`).
    pub fn insert(&mut self, v: &[i64]) {
        let n = self.dim();
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for c in 0..n {
            if w[c].is_zero() {
                continue;
            }
            let a = self.basis[c][c].clone();
            let (q, rem) = w[c].div_mod_floor(&a);
            if rem.is_zero() {
                for j in c..n {
                    w[j] -= &q * &self.basis[c][j];
                }
                continue;
            }
            let b = w[c].clone();
            let eg = a.extended_gcd(&b);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let ag = &a / &g;
            let bg = &b / &g;
            let mut new_row = vec![BigInt::zero(); n];
            let mut rest = vec![BigInt::zero(); n];
            for j in c..n {
                new_row[j] = &s * &self.basis[c][j] + &t * &w[j];
                rest[j] = &bg * &self.basis[c][j] - &ag * &w[j];
            }
            self.basis[c] = new_row;
            w = rest;
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        let n = self.dim();
        for i in 0..n {
            if self.basis[i][i].is_negative() {
                for x in self.basis[i].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let q = self.basis[i][j].div_floor(&self.basis[j][j]);
                if q.is_zero() {
                    continue;
                }
                for k in j..n {
                    let d = &q * &self.basis[j][k];
                    self.basis[i][k] -= d;
                }
            }
        }
    }

    /// `Z^m / L` in invariant-factor form: the non-unit diagonal of the Smith
    /// form and, for each standard generator `e_j`, its image coordinates.
    pub fn quotient(&self) -> (Vec<u64>, Vec<Vec<u64>>) {
        let n = self.dim();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.basis[i][j].clone());
            }
        }
        quotient_by_rows(&m)
    }
}

/// `Z^k / rowspace(m)` for a relation matrix of full column rank, as
/// invariant factors plus generator image coordinates.
pub(crate) fn quotient_by_rows(m: &IntMatrix) -> (Vec<u64>, Vec<Vec<u64>>) {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    assert_eq!(
        diag.len(),
        m.cols(),
        "relation matrix must have full column rank"
    );
    let kept: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
    let factors: Vec<u64> = kept
        .iter()
        .map(|&i| {
            assert!(
                !diag[i].is_zero(),
                "relation matrix must have full column rank"
            );
            diag[i].to_u64().expect("quotient factor fits u64")
        })
        .collect();
    let images = (0..m.cols())
        .map(|j| {
            kept.iter()
                .map(|&i| {
                    snf.v
                        .get(j, i)
                        .mod_floor(&diag[i])
                        .to_u64()
                        .expect("residue fits u64")
                })
                .collect()
        })
        .collect();
    (factors, images)
}

/// All full-rank sublattices of `Z^dim` of index at most `max_index` that
/// contain every vector in `relations`, ordered by index and then by basis.
pub fn superlattices(dim: usize, relations: &[Vec<i64>], max_index: u64) -> Vec<Lattice> {
    let mut out = Vec::new();
    let mut diag = Vec::with_capacity(dim);
    diagonals(dim, max_index, &mut diag, &mut |d| {
        let mut rows = vec![vec![0i64; dim]; dim];
        for i in 0..dim {
            rows[i][i] = d[i] as i64;
        }
        fill_offdiagonal(&mut rows, d, 0, 1, &mut |rows| {
            let lat = Lattice::from_hnf_rows(rows.to_vec());
            if relations.iter().all(|r| lat.contains(r)) {
                out.push((d.iter().product::<u64>(), rows.to_vec(), lat));
            }
        });
    });
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out.into_iter().map(|(_, _, l)| l).collect()
}

/// Number of HNF bases the enumeration in [`superlattices`] visits.
pub fn superlattice_candidates(dim: usize, max_index: u64) -> u128 {
    let mut total = 0u128;
    let mut diag = Vec::with_capacity(dim);
    diagonals(dim, max_index, &mut diag, &mut |d| {
        total += d
            .iter()
            .enumerate()
            .map(|(j, &dj)| (dj as u128).pow(j as u32))
            .product::<u128>();
    });
    total
}

fn diagonals(dim: usize, budget: u64, d: &mut Vec<u64>, f: &mut dyn FnMut(&[u64])) {
    if d.len() == dim {
        f(d);
        return;
    }
    for x in 1..=budget {
        d.push(x);
        diagonals(dim, budget / x, d, f);
        d.pop();
    }
}

// Entries strictly above the diagonal in column j range over 0..d[j].
fn fill_offdiagonal(
    rows: &mut Vec<Vec<i64>>,
    d: &[u64],
    i: usize,
    j: usize,
    f: &mut dyn FnMut(&[Vec<i64>]),
) {
    let dim = d.len();
    if j >= dim {
        if i + 1 >= dim {
            f(rows);
        } else {
            fill_offdiagonal(rows, d, i + 1, i + 2, f);
        }
        return;
    }
    for x in 0..d[j] as i64 {
        rows[i][j] = x;
        fill_offdiagonal(rows, d, i, j + 1, f);
    }
    rows[i][j] = 0;
}
