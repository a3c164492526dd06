//! Sparse exact linear algebra: ranks, reduced kernel bases and particular
//! solutions over Q or F_p. This is the engine behind every Z/B/H dimension
//! and every prolongation solve.
//!
//! Elimination is fraction-preserving (rationals are reduced eagerly by the
//! scalar type) with pivot rows chosen by sparsity, lowest row index on ties.
//! The reduced row-echelon form of a matrix is unique, so ranks, kernel bases
//! and particular solutions are reproducible across runs regardless of the
//! pivoting heuristics.

use std::collections::BTreeMap;

use crate::scalars::{FieldSpec, Scalar};
use crate::{Error, Result};

/// Dense coordinate vector over one field.
pub type Coeffs = Vec<Scalar>;

pub fn zero_vec(field: FieldSpec, dim: usize) -> Coeffs {
    vec![field.zero(); dim]
}

pub fn unit_vec(field: FieldSpec, dim: usize, i: usize) -> Coeffs {
    let mut v = zero_vec(field, dim);
    v[i] = field.one();
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_assign(dst: &mut [Scalar], src: &[Scalar]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = &*d + s;
    }
}

pub fn sub_assign(dst: &mut [Scalar], src: &[Scalar]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = &*d - s;
    }
}

/// dst += c * src
pub fn add_scaled(dst: &mut [Scalar], c: &Scalar, src: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = &*d + &(c * s);
        }
    }
}

pub fn scale_vec(v: &[Scalar], c: &Scalar) -> Coeffs {
    v.iter().map(|x| c * x).collect()
}

pub fn neg_vec(v: &[Scalar]) -> Coeffs {
    v.iter().map(|x| -x).collect()
}

/// A sparse linear map stored column-wise: `cols[j]` is the image of the
/// j-th input basis vector. Used for module action matrices, derivations and
/// the other small operators the homological machinery is built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub dim_out: usize,
    pub dim_in: usize,
    field: FieldSpec,
    cols: Vec<BTreeMap<usize, Scalar>>,
}

impl LinearMap {
    pub fn zero(field: FieldSpec, dim_out: usize, dim_in: usize) -> Self {
        LinearMap { dim_out, dim_in, field, cols: vec![BTreeMap::new(); dim_in] }
    }

    pub fn identity(field: FieldSpec, dim: usize) -> Self {
        let mut m = Self::zero(field, dim, dim);
        for j in 0..dim {
            m.cols[j].insert(j, field.one());
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.dim_out && j < self.dim_in);
        if v.is_zero() {
            self.cols[j].remove(&i);
        } else {
            self.cols[j].insert(i, v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let cur = self.cols[j].remove(&i).unwrap_or_else(|| self.field.zero());
        let next = &cur + v;
        if !next.is_zero() {
            self.cols[j].insert(i, next);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.cols[j].get(&i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn column(&self, j: usize) -> &BTreeMap<usize, Scalar> {
        &self.cols[j]
    }

    pub fn column_dense(&self, j: usize) -> Coeffs {
        let mut v = zero_vec(self.field, self.dim_out);
        for (&i, c) in &self.cols[j] {
            v[i] = c.clone();
        }
        v
    }

    pub fn apply(&self, v: &[Scalar]) -> Coeffs {
        assert_eq!(v.len(), self.dim_in);
        let mut out = zero_vec(self.field, self.dim_out);
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (&i, c) in &self.cols[j] {
                out[i] = &out[i] + &(c * x);
            }
        }
        out
    }

    /// out += scale * self(v)
    pub fn apply_into(&self, v: &[Scalar], scale: &Scalar, out: &mut [Scalar]) {
        if scale.is_zero() {
            return;
        }
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let sx = scale * x;
            for (&i, c) in &self.cols[j] {
                out[i] = &out[i] + &(c * &sx);
            }
        }
    }

    /// self ∘ other
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.dim_in, other.dim_out);
        let mut m = LinearMap::zero(self.field, self.dim_out, other.dim_in);
        for j in 0..other.dim_in {
            for (&k, c) in &other.cols[j] {
                for (&i, d) in &self.cols[k] {
                    m.add_to(i, j, &(c * d));
                }
            }
        }
        m
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        assert_eq!((self.dim_out, self.dim_in), (other.dim_out, other.dim_in));
        let mut m = self.clone();
        for j in 0..other.dim_in {
            for (&i, c) in &other.cols[j] {
                m.add_to(i, j, c);
            }
        }
        m
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        let mut m = self.clone();
        for j in 0..other.dim_in {
            for (&i, c) in &other.cols[j] {
                m.add_to(i, j, &c.neg());
            }
        }
        m
    }

    pub fn neg(&self) -> LinearMap {
        let mut m = self.clone();
        for col in &mut m.cols {
            for v in col.values_mut() {
                *v = v.neg();
            }
        }
        m
    }

    pub fn transpose(&self) -> LinearMap {
        let mut m = LinearMap::zero(self.field, self.dim_in, self.dim_out);
        for j in 0..self.dim_in {
            for (&i, c) in &self.cols[j] {
                m.set(j, i, c.clone());
            }
        }
        m
    }

    pub fn pow(&self, k: u64) -> LinearMap {
        assert_eq!(self.dim_in, self.dim_out);
        let mut acc = LinearMap::identity(self.field, self.dim_in);
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(BTreeMap::is_empty)
    }
}

/// Sparse matrix over an exact field; no zero entries are stored.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    row_data: Vec<BTreeMap<usize, Scalar>>,
}

impl SparseMatrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, field, row_data: vec![BTreeMap::new(); rows] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols);
        if v.is_zero() {
            self.row_data[r].remove(&c);
        } else {
            self.row_data[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        let cur = self.row_data[r].remove(&c).unwrap_or_else(|| self.field.zero());
        let next = &cur + v;
        if !next.is_zero() {
            self.row_data[r].insert(c, next);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.row_data[r].get(&c).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn set_row(&mut self, r: usize, v: &[Scalar]) {
        assert_eq!(v.len(), self.cols);
        let mut row = BTreeMap::new();
        for (c, x) in v.iter().enumerate() {
            if !x.is_zero() {
                row.insert(c, x.clone());
            }
        }
        self.row_data[r] = row;
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.cols);
        let mut m = self.clone();
        m.rows += other.rows;
        m.row_data.extend(other.row_data.iter().cloned());
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zero(self.field, self.cols, self.rows);
        for (r, row) in self.row_data.iter().enumerate() {
            for (&c, v) in row {
                t.row_data[c].insert(r, v.clone());
            }
        }
        t
    }

    pub fn mat_vec(&self, v: &[Scalar]) -> Coeffs {
        assert_eq!(v.len(), self.cols);
        let mut out = zero_vec(self.field, self.rows);
        for (r, row) in self.row_data.iter().enumerate() {
            for (&c, x) in row {
                if !v[c].is_zero() {
                    out[r] = &out[r] + &(x * &v[c]);
                }
            }
        }
        out
    }

    /// Reduced row echelon form of `[self | rhs]`, never pivoting on the
    /// augmented columns. Returns (reduced rows, reduced rhs, pivot columns).
    fn rref_aug(&self, rhs: Option<&[Coeffs]>) -> (Vec<BTreeMap<usize, Scalar>>, Vec<Coeffs>, Vec<usize>) {
        let mut a = self.row_data.clone();
        let mut b: Vec<Coeffs> = match rhs {
            Some(r) => {
                assert!(r.iter().all(|v| v.len() == self.rows));
                (0..self.rows).map(|i| r.iter().map(|v| v[i].clone()).collect()).collect()
            }
            None => vec![Vec::new(); self.rows],
        };
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..self.cols {
            if next_row >= self.rows {
                break;
            }
            // Sparsest candidate row wins; lowest index breaks ties.
            let cand = (next_row..self.rows)
                .filter(|&r| a[r].contains_key(&col))
                .min_by_key(|&r| (a[r].len(), r));
            let Some(pr) = cand else { continue };
            a.swap(next_row, pr);
            b.swap(next_row, pr);
            let inv = a[next_row][&col].inv().expect("pivot is nonzero");
            if !inv.is_one() {
                let row = std::mem::take(&mut a[next_row]);
                a[next_row] = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                for v in b[next_row].iter_mut() {
                    *v = &*v * &inv;
                }
            }
            let pivot_row = a[next_row].clone();
            let pivot_rhs = b[next_row].clone();
            for r in 0..self.rows {
                if r == next_row {
                    continue;
                }
                let Some(f) = a[r].get(&col).cloned() else { continue };
                for (&c, v) in &pivot_row {
                    let cur = a[r].remove(&c).unwrap_or_else(|| self.field.zero());
                    let next = &cur - &(&f * v);
                    if !next.is_zero() {
                        a[r].insert(c, next);
                    }
                }
                for (dst, src) in b[r].iter_mut().zip(&pivot_rhs) {
                    *dst = &*dst - &(&f * src);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        (a, b, pivots)
    }

    /// Rank and a reduced-echelon basis of the kernel.
    pub fn rank_nullspace(&self) -> (usize, SubspaceBasis) {
        let (a, _, pivots) = self.rref_aug(None);
        let rank = pivots.len();
        let kernel = kernel_from_rref(self.field, self.cols, &a, &pivots);
        (rank, kernel)
    }

    /// Particular solution of `M x = b` plus the kernel, or `None` when `b`
    /// is outside the column space.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<(Coeffs, SubspaceBasis)>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let rhs = vec![b.to_vec()];
        let (a, br, pivots) = self.rref_aug(Some(&rhs));
        for r in pivots.len()..self.rows {
            debug_assert!(a[r].is_empty());
            if !br[r][0].is_zero() {
                return Ok(None);
            }
        }
        let mut x = zero_vec(self.field, self.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = br[r][0].clone();
        }
        let kernel = kernel_from_rref(self.field, self.cols, &a, &pivots);
        Ok(Some((x, kernel)))
    }
}

fn kernel_from_rref(
    field: FieldSpec,
    cols: usize,
    a: &[BTreeMap<usize, Scalar>],
    pivots: &[usize],
) -> SubspaceBasis {
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut vectors = Vec::new();
    for fc in (0..cols).filter(|c| !pivot_set.contains(c)) {
        let mut v = zero_vec(field, cols);
        v[fc] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            if let Some(c) = a[r].get(&fc) {
                v[pc] = c.neg();
            }
        }
        vectors.push(v);
    }
    SubspaceBasis::from_vectors(field, cols, vectors)
}

/// A subspace given by a reduced-echelon basis: vectors are independent,
/// pivot entries are 1 and pivot columns strictly increase.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    field: FieldSpec,
    vectors: Vec<Coeffs>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(field: FieldSpec, ambient_dim: usize) -> Self {
        SubspaceBasis { ambient_dim, field, vectors: Vec::new(), pivots: Vec::new() }
    }

    /// Canonicalizes arbitrary spanning vectors into a reduced-echelon basis.
    pub fn from_vectors(field: FieldSpec, ambient_dim: usize, vecs: Vec<Coeffs>) -> Self {
        let mut m = SparseMatrix::zero(field, vecs.len(), ambient_dim);
        for (r, v) in vecs.iter().enumerate() {
            m.set_row(r, v);
        }
        let (a, _, pivots) = m.rref_aug(None);
        let mut vectors = Vec::new();
        for r in 0..pivots.len() {
            let mut v = zero_vec(field, ambient_dim);
            for (&c, x) in &a[r] {
                v[c] = x.clone();
            }
            vectors.push(v);
        }
        SubspaceBasis { ambient_dim, field, vectors, pivots }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn vectors(&self) -> &[Coeffs] {
        &self.vectors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        let mut w = v.to_vec();
        for (bv, &p) in self.vectors.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for (d, s) in w.iter_mut().zip(bv) {
                    *d = &*d - &(&f * s);
                }
            }
        }
        is_zero_vec(&w)
    }

    /// Coordinates of `v` in this basis, if it lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Coeffs> {
        let mut w = v.to_vec();
        let mut coords = Vec::with_capacity(self.vectors.len());
        for (bv, &p) in self.vectors.iter().zip(&self.pivots) {
            let f = w[p].clone();
            coords.push(f.clone());
            if !f.is_zero() {
                for (d, s) in w.iter_mut().zip(bv) {
                    *d = &*d - &(&f * s);
                }
            }
        }
        is_zero_vec(&w).then_some(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qs(n: i64) -> Scalar {
        FieldSpec::Rationals.integer(n)
    }

    #[test]
    fn identity_and_zero() {
        let field = FieldSpec::Rationals;
        let mut id = SparseMatrix::zero(field, 4, 4);
        for i in 0..4 {
            id.set(i, i, field.one());
        }
        let (rank, ker) = id.rank_nullspace();
        assert_eq!((rank, ker.dim()), (4, 0));

        let z = SparseMatrix::zero(field, 3, 5);
        let (rank, ker) = z.rank_nullspace();
        assert_eq!((rank, ker.dim()), (0, 5));
    }

    fn rank_two_by_two() -> SparseMatrix {
        // [[1,2],[2,4]]
        let field = FieldSpec::Rationals;
        let mut m = SparseMatrix::zero(field, 2, 2);
        m.set_row(0, &[qs(1), qs(2)]);
        m.set_row(1, &[qs(2), qs(4)]);
        m
    }

    #[test]
    fn proportional_rows() {
        let m = rank_two_by_two();
        let (rank, ker) = m.rank_nullspace();
        assert_eq!(rank, 1);
        assert_eq!(ker.dim(), 1);
        assert!(ker.contains(&[qs(-2), qs(1)]));
        assert!(is_zero_vec(&m.mat_vec(&ker.vectors()[0])));
    }

    #[test]
    fn solve_examples() {
        let field = FieldSpec::Rationals;
        let mut id = SparseMatrix::zero(field, 3, 3);
        for i in 0..3 {
            id.set(i, i, field.one());
        }
        let b = [qs(5), qs(-1), qs(7)];
        let (x, ker) = id.solve(&b).unwrap().unwrap();
        assert_eq!(x, b.to_vec());
        assert_eq!(ker.dim(), 0);

        let m = rank_two_by_two();
        assert!(m.solve(&[qs(1), qs(3)]).unwrap().is_none());
        let (x, ker) = m.solve(&[qs(1), qs(2)]).unwrap().unwrap();
        assert_eq!(x, vec![qs(1), qs(0)]);
        assert_eq!(ker.dim(), 1);
        assert!(matches!(
            m.solve(&[qs(1)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    fn random_sparse(rng: &mut ChaCha8Rng, field: FieldSpec) -> SparseMatrix {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let mut m = SparseMatrix::zero(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(0.35) {
                    let v = match field {
                        FieldSpec::Rationals => qs(rng.gen_range(-5..=5)),
                        FieldSpec::PrimeField(p) => field.integer(rng.gen_range(0..p) as i64),
                    };
                    m.set(r, c, v);
                }
            }
        }
        m
    }

    #[test]
    fn rank_equals_transpose_rank_and_solve_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for field in [FieldSpec::Rationals, FieldSpec::PrimeField(5)] {
            for _ in 0..200 {
                let m = random_sparse(&mut rng, field);
                let (rank, ker) = m.rank_nullspace();
                let (rank_t, _) = m.transpose().rank_nullspace();
                assert_eq!(rank, rank_t);
                assert_eq!(rank + ker.dim(), m.cols());
                for v in ker.vectors() {
                    assert!(is_zero_vec(&m.mat_vec(v)));
                }

                // solve returns Some iff augmenting does not raise the rank
                let b: Coeffs = (0..m.rows())
                    .map(|_| match field {
                        FieldSpec::Rationals => qs(rng.gen_range(-4..=4)),
                        FieldSpec::PrimeField(p) => field.integer(rng.gen_range(0..p) as i64),
                    })
                    .collect();
                let mut aug = SparseMatrix::zero(field, m.rows(), m.cols() + 1);
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        aug.set(r, c, m.get(r, c));
                    }
                    aug.set(r, m.cols(), b[r].clone());
                }
                let (aug_rank, _) = aug.rank_nullspace();
                match m.solve(&b).unwrap() {
                    Some((x, _)) => {
                        assert_eq!(aug_rank, rank);
                        assert_eq!(m.mat_vec(&x), b);
                    }
                    None => assert_eq!(aug_rank, rank + 1),
                }
            }
        }
    }

    #[test]
    fn echelon_basis_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_sparse(&mut rng, FieldSpec::PrimeField(7));
            let (_, ker) = m.rank_nullspace();
            let pivots = ker.pivots();
            assert!(pivots.windows(2).all(|w| w[0] < w[1]));
            for (v, &p) in ker.vectors().iter().zip(pivots) {
                assert!(v[p].is_one());
                // pivot column is zero in every other basis vector
                for (w, &q) in ker.vectors().iter().zip(pivots) {
                    if p != q {
                        assert!(w[p].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn linear_map_basics() {
        let field = FieldSpec::PrimeField(5);
        let mut d = LinearMap::zero(field, 3, 3);
        d.set(0, 1, field.one()); // e1 -> e0
        d.set(1, 2, field.one()); // e2 -> e1
        let v = vec![field.integer(1), field.integer(2), field.integer(3)];
        assert_eq!(d.apply(&v), vec![field.integer(2), field.integer(3), field.integer(0)]);
        assert!(d.pow(3).is_zero());
        assert_eq!(d.transpose().transpose(), d);
        assert_eq!(d.add(&d.neg()), LinearMap::zero(field, 3, 3));
    }
}
