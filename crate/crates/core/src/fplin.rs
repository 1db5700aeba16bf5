//! Linear algebra over prime fields `F_p`.
//!
//! Vectors are `Vec<u64>` of residues. `V*` is identified with `F_p^dim`
//! through the dual of the standard basis, so a form `f` acts by
//! `f(v) = sum f_i v_i`. Subspaces are always stored in canonical reduced
//! row echelon form, which makes equality of subspaces equality of values.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The field `Z/p` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }

    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// `a + lambda * b`, componentwise.
    pub fn axpy(&self, a: &[u64], lambda: u64, b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.add(x, self.mul(lambda, y)))
            .collect()
    }

    pub fn scale(&self, lambda: u64, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.mul(lambda, x)).collect()
    }
}

/// Index of `v` in `F_p^dim`, read as a base-`p` numeral with the first
/// coordinate most significant.
pub fn vector_index(p: u64, v: &[u64]) -> usize {
    v.iter()
        .fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

pub fn vector_at(p: u64, dim: usize, mut index: usize) -> Vec<u64> {
    let mut v = vec![0; dim];
    for x in v.iter_mut().rev() {
        *x = (index % p as usize) as u64;
        index /= p as usize;
    }
    v
}

/// All of `F_p^dim` in index order.
pub fn all_vectors(p: u64, dim: usize, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    let n = space_size(p, dim);
    Budget::check("vector space size", n, budget.fp_space)?;
    Ok((0..n as usize).map(|i| vector_at(p, dim, i)).collect())
}

fn space_size(p: u64, dim: usize) -> u128 {
    (0..dim).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

/// Dense matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Canonical reduced row echelon form with `transform * m == r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub r: FpMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub transform: FpMatrix,
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Entries are reduced mod `p`; `cols` is needed when there are no rows.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    found: r.len(),
                });
            }
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = field.reduce(x);
            }
        }
        Ok(m)
    }

    pub(crate) fn from_residue_rows(field: PrimeField, rows: &[Vec<u64>], cols: usize) -> Self {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = x % field.p;
            }
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.field.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: other.rows,
            });
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "row vector length");
        let f = self.field;
        let mut out = vec![0; self.cols];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = f.add(*o, f.mul(x, self.get(i, j)));
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply_col(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "column vector length");
        (0..self.rows)
            .map(|i| self.field.dot(self.row(i), v))
            .collect()
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let (n, c) = (self.rows, self.cols);
        let mut r = self.clone();
        let mut t = Self::identity(f, n);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..c {
            if row == n {
                break;
            }
            let Some(pr) = (row..n).find(|&i| r.get(i, col) != 0) else {
                continue;
            };
            r.swap_rows(row, pr);
            t.swap_rows(row, pr);
            let s = f.inv(r.get(row, col));
            r.scale_row(row, s);
            t.scale_row(row, s);
            for i in 0..n {
                let x = r.get(i, col);
                if i != row && x != 0 {
                    let k = f.neg(x);
                    r.add_row_multiple(i, row, k);
                    t.add_row_multiple(i, row, k);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            r,
            rank: pivots.len(),
            pivots,
            transform: t,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{x : self * x = 0}`, one vector per non-pivot column.
    pub fn right_kernel(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let rr = self.rref();
        (0..self.cols)
            .filter(|c| !rr.pivots.contains(c))
            .map(|free| {
                let mut x = vec![0; self.cols];
                x[free] = 1;
                for (i, &pc) in rr.pivots.iter().enumerate() {
                    x[pc] = f.neg(rr.r.get(i, free));
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let rr = self.rref();
        (rr.rank == self.rows).then_some(rr.transform)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: u64) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = self.field.mul(s, self.data[idx]);
        }
    }

    fn add_row_multiple(&mut self, dst: usize, src: usize, k: u64) {
        for j in 0..self.cols {
            let v = self.field.mul(k, self.data[src * self.cols + j]);
            let idx = dst * self.cols + j;
            self.data[idx] = self.field.add(self.data[idx], v);
        }
    }
}

impl Serialize for FpMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("p", &self.field.p)?;
        m.serialize_entry("rows", &self.to_rows())?;
        m.end()
    }
}

/// A subspace of `F_p^ambient_dim`, stored by its canonical RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: FpMatrix::zeros(field, 0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: FpMatrix::identity(field, ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span(field: PrimeField, ambient_dim: usize, vectors: &[Vec<u64>]) -> Self {
        let rr = FpMatrix::from_residue_rows(field, vectors, ambient_dim).rref();
        let mut basis = FpMatrix::zeros(field, rr.rank, ambient_dim);
        basis.data = rr.r.data[..rr.rank * ambient_dim].to_vec();
        Subspace {
            ambient_dim,
            basis,
            pivots: rr.pivots,
        }
    }

    pub fn span_i64(field: PrimeField, ambient_dim: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let m = FpMatrix::from_rows(field, vectors, ambient_dim)?;
        Ok(Self::span(field, ambient_dim, &m.to_rows()))
    }

    pub fn field(&self) -> PrimeField {
        self.basis.field
    }

    pub fn p(&self) -> u64 {
        self.basis.field.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<u64>> {
        self.basis.to_rows()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the RREF basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        let c: Vec<u64> = self.pivots.iter().map(|&j| v[j] % self.p()).collect();
        (self.basis.apply_row(&c) == v).then_some(c)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && (0..self.dim()).all(|i| other.contains(self.basis.row(i)))
    }

    /// Every element, in the order of their coordinate vectors.
    pub fn elements(&self, budget: &Budget) -> Result<Vec<Vec<u64>>> {
        Ok(all_vectors(self.p(), self.dim(), budget)?
            .iter()
            .map(|c| self.basis.apply_row(c))
            .collect())
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("p", &self.p())?;
        m.serialize_entry("ambient_dim", &self.ambient_dim)?;
        m.serialize_entry("basis", &self.basis_rows())?;
        m.end()
    }
}

/// `{v : f(v) = 0 for all f in y}`. The same routine maps subspaces of `V`
/// back to subspaces of `V*`.
pub fn annihilator(y: &Subspace) -> Subspace {
    Subspace::span(y.field(), y.ambient_dim, &y.basis.right_kernel())
}

/// `annihilator` with an explicit check that `y` lives in `V*` for
/// `V = F_p^dim`.
pub fn annihilator_in(dim: usize, y: &Subspace) -> Result<Subspace> {
    if y.ambient_dim != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: y.ambient_dim,
        });
    }
    Ok(annihilator(y))
}

/// `V/Z` with coordinates read off the non-pivot columns of `Z`'s RREF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSpace {
    sub: Subspace,
    complement: Vec<usize>,
}

impl QuotientSpace {
    pub fn subspace(&self) -> &Subspace {
        &self.sub
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sub.ambient_dim
    }

    /// Coordinates of `v` that index the section `V/Z -> V`.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn project(&self, v: &[u64]) -> Vec<u64> {
        let f = self.sub.field();
        let mut w = v.to_vec();
        for (i, &pc) in self.sub.pivots.iter().enumerate() {
            let k = f.neg(w[pc]);
            if k != 0 {
                w = f.axpy(&w, k, self.sub.basis.row(i));
            }
        }
        self.complement.iter().map(|&j| w[j]).collect()
    }

    /// The lift of quotient coordinates supported on the complement.
    pub fn lift(&self, q: &[u64]) -> Vec<u64> {
        let mut v = vec![0; self.ambient_dim()];
        for (&j, &x) in self.complement.iter().zip(q) {
            v[j] = x;
        }
        v
    }

    /// `dim × dim(V/Z)` matrix with `v * matrix == project(v)`.
    pub fn matrix(&self) -> FpMatrix {
        let f = self.sub.field();
        let n = self.ambient_dim();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                self.project(&e)
            })
            .collect();
        FpMatrix::from_residue_rows(f, &rows, self.dim())
    }
}

pub fn quotient_space(dim: usize, z: &Subspace) -> Result<QuotientSpace> {
    if z.ambient_dim != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: z.ambient_dim,
        });
    }
    let complement = (0..dim).filter(|c| !z.pivots.contains(c)).collect();
    Ok(QuotientSpace {
        sub: z.clone(),
        complement,
    })
}

/// The natural isomorphism `Y* -> V/Y⊥` for a subspace `Y` of `V*`.
///
/// `Y*` carries the basis dual to the RREF basis `y_1..y_k` of `Y`. The
/// evaluation matrix sends a quotient class `[v]` to `(y_i(v))_i` and
/// `matrix` is its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualQuotientIso {
    y: Subspace,
    quotient: QuotientSpace,
    evaluation: FpMatrix,
    matrix: FpMatrix,
}

impl DualQuotientIso {
    pub fn subspace(&self) -> &Subspace {
        &self.y
    }

    pub fn quotient(&self) -> &QuotientSpace {
        &self.quotient
    }

    /// Row-vector matrix `V/Y⊥ -> Y*`.
    pub fn evaluation(&self) -> &FpMatrix {
        &self.evaluation
    }

    /// Row-vector matrix `Y* -> V/Y⊥`.
    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn apply(&self, theta: &[u64]) -> Vec<u64> {
        self.matrix.apply_row(theta)
    }
}

pub fn dual_quotient_iso(y: &Subspace) -> Result<DualQuotientIso> {
    let f = y.field();
    let quotient = quotient_space(y.ambient_dim, &annihilator(y))?;
    let k = y.dim();
    if quotient.dim() != k {
        return Err(Error::Dimension {
            expected: k,
            found: quotient.dim(),
        });
    }
    let rows: Vec<Vec<u64>> = (0..k)
        .map(|c| {
            let v = quotient.lift(&unit(k, c));
            (0..k).map(|i| f.dot(y.basis.row(i), &v)).collect()
        })
        .collect();
    let evaluation = FpMatrix::from_residue_rows(f, &rows, k);
    let matrix = evaluation
        .inverse()
        .ok_or_else(|| Error::Invalid("evaluation pairing is singular".into()))?;
    Ok(DualQuotientIso {
        y: y.clone(),
        quotient,
        evaluation,
        matrix,
    })
}

fn unit(n: usize, i: usize) -> Vec<u64> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

/// Restriction `Y'* -> Y*` for `Y ⊆ Y'`, as a row-vector matrix in the
/// RREF dual bases.
pub fn restriction_matrix(small: &Subspace, large: &Subspace) -> Result<FpMatrix> {
    if !small.is_subspace_of(large) {
        return Err(Error::Invalid("restriction needs Y ⊆ Y'".into()));
    }
    // Column i holds the coordinates of y_i in the basis of Y'.
    let cols: Vec<Vec<u64>> = (0..small.dim())
        .map(|i| large.coordinates(small.basis.row(i)).expect("contained"))
        .collect();
    Ok(FpMatrix::from_residue_rows(small.field(), &cols, large.dim()).transpose())
}

/// Commuting square for `Y ⊆ Y'`: going `Y'* -> V/Y'⊥ -> V/Y⊥` agrees with
/// `Y'* -> Y* -> V/Y⊥`, checked on every element of `Y'*`.
pub fn check_naturality(small: &Subspace, large: &Subspace, budget: &Budget) -> Result<bool> {
    let iso_s = dual_quotient_iso(small)?;
    let iso_l = dual_quotient_iso(large)?;
    let restrict = restriction_matrix(small, large)?;
    for theta in all_vectors(large.p(), large.dim(), budget)? {
        let top = iso_s
            .quotient
            .project(&iso_l.quotient.lift(&iso_l.apply(&theta)));
        let bottom = iso_s.apply(&restrict.apply_row(&theta));
        if top != bottom {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Number of `k`-dimensional subspaces of `F_p^n`.
pub fn gaussian_binomial(p: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let p = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= p.pow((n - i) as u32) - 1;
        den *= p.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// All `k`-dimensional subspaces of `F_p^dim`, ordered by pivot columns
/// and then by the free entries read row by row.
pub fn enumerate_subspaces(p: u64, dim: usize, k: usize, budget: &Budget) -> Result<Vec<Subspace>> {
    let field = PrimeField::new(p)?;
    Budget::check("vector space size", space_size(p, dim), budget.fp_space)?;
    if k > dim {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for pivots in combinations(dim, k) {
        // Free slots: row i, columns after its pivot that are not pivots.
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| {
                (pc + 1..dim)
                    .filter(|c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        for fill in 0..(p as usize).pow(slots.len() as u32) {
            let mut basis = FpMatrix::zeros(field, k, dim);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(i, pc, 1);
            }
            let values = vector_at(p, slots.len(), fill);
            for (&(i, c), &x) in slots.iter().zip(&values) {
                basis.set(i, c, x);
            }
            out.push(Subspace {
                ambient_dim: dim,
                basis,
                pivots: pivots.clone(),
            });
        }
    }
    Ok(out)
}

/// Every subspace of `F_p^dim`, by dimension and then as in
/// [`enumerate_subspaces`].
pub fn all_subspaces(p: u64, dim: usize, budget: &Budget) -> Result<Vec<Subspace>> {
    let mut out = Vec::new();
    for k in 0..=dim {
        out.extend(enumerate_subspaces(p, dim, k, budget)?);
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A linear form on `F_p^dim` in the standard dual basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DualVector {
    p: u64,
    coords: Vec<u64>,
}

impl DualVector {
    pub fn new(field: PrimeField, coords: Vec<u64>) -> Self {
        let coords = coords.into_iter().map(|x| x % field.p).collect();
        DualVector { p: field.p, coords }
    }

    pub fn coordinate(field: PrimeField, dim: usize, i: usize) -> Self {
        Self::new(field, unit(dim, i))
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn eval(&self, v: &[u64]) -> u64 {
        self.field().dot(&self.coords, v)
    }

    /// `self + lambda * other`.
    pub fn plus_scaled(&self, lambda: u64, other: &DualVector) -> DualVector {
        DualVector {
            p: self.p,
            coords: self.field().axpy(&self.coords, lambda, &other.coords),
        }
    }
}

/// An element of `V**` stored by its values on the standard dual basis,
/// `theta_i = Θ(e_i*)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DoubleDualElement {
    p: u64,
    coords: Vec<u64>,
}

impl DoubleDualElement {
    pub fn new(field: PrimeField, coords: Vec<u64>) -> Self {
        let coords = coords.into_iter().map(|x| x % field.p).collect();
        DoubleDualElement { p: field.p, coords }
    }

    pub fn zero(field: PrimeField, dim: usize) -> Self {
        Self::new(field, vec![0; dim])
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `Θ(f)` through the dual basis expansion of `f`.
    pub fn eval(&self, f: &DualVector) -> u64 {
        self.field().dot(&self.coords, &f.coords)
    }

    pub fn add(&self, other: &DoubleDualElement) -> DoubleDualElement {
        DoubleDualElement {
            p: self.p,
            coords: self.field().axpy(&self.coords, 1, &other.coords),
        }
    }

    /// Every element of `V**` for `V = F_p^dim`.
    pub fn all(field: PrimeField, dim: usize, budget: &Budget) -> Result<Vec<Self>> {
        Ok(all_vectors(field.p, dim, budget)?
            .into_iter()
            .map(|c| DoubleDualElement {
                p: field.p,
                coords: c,
            })
            .collect())
    }
}

/// `i(v)(f) = f(v)`.
pub fn double_dual_injection(field: PrimeField, v: &[u64]) -> DoubleDualElement {
    DoubleDualElement::new(field, v.to_vec())
}

/// All forms on `F_p^dim`, in index order of their coordinates.
pub fn all_forms(field: PrimeField, dim: usize, budget: &Budget) -> Result<Vec<DualVector>> {
    Ok(all_vectors(field.p, dim, budget)?
        .into_iter()
        .map(|c| DualVector {
            p: field.p,
            coords: c,
        })
        .collect())
}
