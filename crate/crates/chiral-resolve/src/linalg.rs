//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (quotient dimensions, homology defects, character
//! comparisons) reduces to rank / kernel / complement computations on small
//! sparse matrices with rational entries. All pivoting is deterministic
//! (lexicographically smallest pivot column, smallest row), so chosen bases
//! are reproducible across runs and platforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar. `BigRational` keeps values in lowest terms with a
/// positive denominator, which is exactly the canonical form we need.
pub type Scalar = BigRational;

/// Integer as a scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Fraction n/d as a scalar.
pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} rows, got {got}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

/// Sparse matrix over the rationals. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        if v.is_zero() {
            return;
        }
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        let slot = self.entries.entry((r, c)).or_insert_with(Scalar::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            m.set(c, r, v.clone());
        }
        m
    }

    /// Horizontal concatenation; all blocks must have the same row count.
    pub fn hstack(blocks: &[&SparseMatrix]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zero(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "row count mismatch in hstack");
            for (r, c, v) in b.iter() {
                m.set(r, c + offset, v.clone());
            }
            offset += b.cols;
        }
        m
    }

    /// Vertical concatenation; all blocks must have the same column count.
    pub fn vstack(blocks: &[&SparseMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zero(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "column count mismatch in vstack");
            for (r, c, v) in b.iter() {
                m.set(r + offset, c, v.clone());
            }
            offset += b.rows;
        }
        m
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (r, c, v) in rhs.iter() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let mut out = self.clone();
        for (r, c, v) in rhs.iter() {
            out.add_to(r, c, &-v.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Scalar) -> SparseMatrix {
        let mut out = SparseMatrix::zero(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out.set(r, c, v.clone() * factor.clone());
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        // group rhs by row for sparse traversal
        let mut rhs_rows: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (r, c, v) in rhs.iter() {
            rhs_rows.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMatrix::zero(self.rows, rhs.cols);
        for (r, k, v) in self.iter() {
            if let Some(row) = rhs_rows.get(&k) {
                for (c, w) in row {
                    out.add_to(r, *c, &(v.clone() * (*w).clone()));
                }
            }
        }
        out
    }

    /// Apply to a dense column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for (r, c, w) in self.iter() {
            if !v[c].is_zero() {
                out[r] += w.clone() * v[c].clone();
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.rows];
        for (r, cc, v) in self.iter() {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    /// All columns as dense vectors, in one pass.
    pub fn columns_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.rows]; self.cols];
        for (r, c, v) in self.iter() {
            out[c][r] = v.clone();
        }
        out
    }

    fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            d[r][c] = v.clone();
        }
        d
    }

    /// Rank over the rationals, via fraction-free (Bareiss) elimination on a
    /// denominator-cleared integer copy. Pivots are chosen in ascending
    /// (column, row) order, so the computation is deterministic.
    pub fn rank(&self) -> usize {
        // clear denominators row by row; this does not change the rank
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut lcm = BigInt::one();
            for c in 0..self.cols {
                if let Some(v) = self.entries.get(&(r, c)) {
                    lcm = lcm.lcm(v.denom());
                }
            }
            let row: Vec<BigInt> = (0..self.cols)
                .map(|c| match self.entries.get(&(r, c)) {
                    Some(v) => v.numer() * (&lcm / v.denom()),
                    None => BigInt::zero(),
                })
                .collect();
            a.push(row);
        }
        bareiss_rank(a, self.rows, self.cols)
    }

    /// Reduced row echelon form. Returns the dense echelon rows together with
    /// the pivot columns (ascending). Pivot selection: scan columns left to
    /// right, take the first row (smallest index) with a nonzero entry.
    pub fn rref(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut a = self.to_dense();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let pivot_row = (row..self.rows).find(|&r| !a[r][col].is_zero());
            let Some(pr) = pivot_row else { continue };
            a.swap(row, pr);
            let inv = a[row][col].clone();
            for c in col..self.cols {
                let v = std::mem::replace(&mut a[row][c], Scalar::zero());
                a[row][c] = v / inv.clone();
            }
            for r in 0..self.rows {
                if r != row && !a[r][col].is_zero() {
                    let factor = a[r][col].clone();
                    for c in col..self.cols {
                        let delta = factor.clone() * a[row][c].clone();
                        a[r][c] -= delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    /// Basis of the null space `{x : self * x = 0}`. One vector per free
    /// column, emitted in ascending free-column order; the vector for free
    /// column f has entry 1 at f and minus the echelon coefficients at the
    /// pivot columns.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (ech, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_set.contains(&f) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -ech[i][f].clone();
            }
            basis.push(v);
        }
        basis
    }
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot_row = (rank..rows).find(|&r| !a[r][col].is_zero());
        let Some(pr) = pivot_row else { continue };
        a.swap(rank, pr);
        let pivot = a[rank][col].clone();
        for r in rank + 1..rows {
            let head = a[r][col].clone();
            for c in col + 1..cols {
                let num = &pivot * &a[r][c] - &head * &a[rank][c];
                // Bareiss: division by the previous pivot is exact
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Dimension of `ambient / column-span(generators)`.
pub fn quotient_dim(ambient_dim: usize, generators: &SparseMatrix) -> Result<usize, LinalgError> {
    if generators.rows() != ambient_dim {
        return Err(LinalgError::DimensionMismatch { expected: ambient_dim, got: generators.rows() });
    }
    Ok(ambient_dim - generators.rank())
}

/// Incremental elimination structure: vectors reduced against each other,
/// keyed by leading index. Used for greedy complement selection.
struct Eliminator {
    // leading index -> vector normalized to leading coefficient 1
    rows: BTreeMap<usize, Vec<Scalar>>,
}

impl Eliminator {
    fn new() -> Self {
        Eliminator { rows: BTreeMap::new() }
    }

    /// Reduce `v` against the stored rows; if a nonzero remainder survives,
    /// store it and return true.
    fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        loop {
            let lead = match v.iter().position(|x| !x.is_zero()) {
                Some(i) => i,
                None => return false,
            };
            match self.rows.get(&lead) {
                Some(row) => {
                    let factor = v[lead].clone();
                    for (x, y) in v.iter_mut().zip(row.iter()) {
                        *x -= factor.clone() * y.clone();
                    }
                }
                None => {
                    let inv = v[lead].clone();
                    for x in v.iter_mut() {
                        let t = std::mem::replace(x, Scalar::zero());
                        *x = t / inv.clone();
                    }
                    self.rows.insert(lead, v);
                    return true;
                }
            }
        }
    }

}

/// Indices of standard basis vectors spanning a complement of the column
/// space of `image` inside an ambient space of dimension `ambient_dim`.
/// Greedy: ascending index, keep an index when its basis vector is
/// independent of the image plus the indices already kept.
pub fn complement_basis(ambient_dim: usize, image: &SparseMatrix) -> Vec<usize> {
    complement_basis_in_order(ambient_dim, image, (0..ambient_dim).collect::<Vec<_>>().as_slice())
}

/// Same greedy rule, but scanning candidate indices in the given order.
/// Dimension statements downstream must not depend on the order; tests
/// exercise this by re-running with the order reversed.
pub fn complement_basis_in_order(
    ambient_dim: usize,
    image: &SparseMatrix,
    order: &[usize],
) -> Vec<usize> {
    assert_eq!(image.rows(), ambient_dim, "image must have ambient_dim rows");
    let mut elim = Eliminator::new();
    for col in image.columns_dense() {
        elim.insert(col);
    }
    let mut kept = Vec::new();
    for &i in order {
        let mut e = vec![Scalar::zero(); ambient_dim];
        e[i] = Scalar::one();
        if elim.insert(e) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

/// Representative data for a quotient `ambient / span(image columns)`:
/// the kept standard-basis indices and the projection matrix `P`
/// (|kept| x ambient) with `P * image = 0` and `P * e_k = e_k` for kept `k`.
/// `P v` gives the coordinates of `v mod image` in the representative basis.
pub struct QuotientMap {
    pub rep_indices: Vec<usize>,
    pub projector: SparseMatrix,
}

pub fn quotient_map(ambient_dim: usize, image: &SparseMatrix) -> QuotientMap {
    quotient_map_in_order(ambient_dim, image, (0..ambient_dim).collect::<Vec<_>>().as_slice())
}

/// `quotient_map` with the representative scan order chosen by the caller.
/// All dimension statements downstream are order-independent; tests re-run
/// tables with the order reversed.
pub fn quotient_map_in_order(ambient_dim: usize, image: &SparseMatrix, order: &[usize]) -> QuotientMap {
    assert_eq!(image.rows(), ambient_dim, "image must have ambient_dim rows");
    // a column basis of the image, reduced greedily in column order
    let mut elim = Eliminator::new();
    let mut span_cols: Vec<Vec<Scalar>> = Vec::new();
    for col in image.columns_dense() {
        if elim.insert(col.clone()) {
            span_cols.push(col);
        }
    }
    let mut reps = Vec::new();
    for &i in order {
        let mut e = vec![Scalar::zero(); ambient_dim];
        e[i] = Scalar::one();
        if elim.insert(e) {
            reps.push(i);
        }
    }
    reps.sort_unstable();
    // invert [span | e_reps] and read off the representative rows
    let n = ambient_dim;
    let k = span_cols.len();
    assert_eq!(k + reps.len(), n, "span + complement must fill the ambient space");
    let mut aug: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); 2 * n]; n];
    for (j, col) in span_cols.iter().enumerate() {
        for i in 0..n {
            aug[i][j] = col[i].clone();
        }
    }
    for (j, &r) in reps.iter().enumerate() {
        aug[r][k + j] = Scalar::one();
    }
    for i in 0..n {
        aug[i][n + i] = Scalar::one();
    }
    // Gauss-Jordan on the left block
    let mut row = 0;
    for col in 0..n {
        let pr = (row..n).find(|&r| !aug[r][col].is_zero()).expect("square block is invertible");
        aug.swap(row, pr);
        let inv = aug[row][col].clone();
        for c in 0..2 * n {
            let v = std::mem::replace(&mut aug[row][c], Scalar::zero());
            aug[row][c] = v / inv.clone();
        }
        for r in 0..n {
            if r != row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in 0..2 * n {
                    let delta = factor.clone() * aug[row][c].clone();
                    aug[r][c] -= delta;
                }
            }
        }
        row += 1;
    }
    let mut projector = SparseMatrix::zero(reps.len(), n);
    for (out_row, _) in reps.iter().enumerate() {
        for c in 0..n {
            let v = aug[k + out_row][n + c].clone();
            projector.set(out_row, c, v);
        }
    }
    QuotientMap { rep_indices: reps, projector }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(SparseMatrix::identity(2).rank(), 2);
        assert_eq!(SparseMatrix::zero(3, 4).rank(), 0);
        let m = SparseMatrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_basics() {
        assert!(SparseMatrix::identity(3).kernel_basis().is_empty());
        let z = SparseMatrix::zero(2, 3);
        let kb = z.kernel_basis();
        assert_eq!(kb.len(), 3);
        for (i, v) in kb.iter().enumerate() {
            assert_eq!(v[i], Scalar::one());
        }
        let m = SparseMatrix::from_int_rows(&[&[1, 1]]);
        let kb = m.kernel_basis();
        assert_eq!(kb.len(), 1);
        // proportional to (1, -1)
        assert_eq!(kb[0][0].clone() + kb[0][1].clone(), Scalar::zero());
        assert!(!kb[0][0].is_zero());
    }

    #[test]
    fn quotient_dim_cases() {
        assert_eq!(quotient_dim(5, &SparseMatrix::zero(5, 2)).unwrap(), 5);
        assert_eq!(quotient_dim(3, &SparseMatrix::identity(3)).unwrap(), 0);
        let mut m = SparseMatrix::zero(4, 2);
        m.set(0, 0, int(1));
        m.set(1, 0, int(2));
        m.set(0, 1, int(3));
        m.set(1, 1, int(6));
        assert_eq!(quotient_dim(4, &m).unwrap(), 3);
        assert!(quotient_dim(3, &SparseMatrix::zero(4, 1)).is_err());
    }

    #[test]
    fn complement_cases() {
        let mut e1 = SparseMatrix::zero(3, 1);
        e1.set(0, 0, int(1));
        assert_eq!(complement_basis(3, &e1), vec![1, 2]);

        assert_eq!(complement_basis(2, &SparseMatrix::identity(2)), Vec::<usize>::new());

        let mut diag = SparseMatrix::zero(2, 1);
        diag.set(0, 0, int(1));
        diag.set(1, 0, int(1));
        assert_eq!(complement_basis(2, &diag), vec![0]);
    }

    #[test]
    fn quotient_map_projects_image_to_zero() {
        let image = SparseMatrix::from_int_rows(&[&[1, 0], &[1, 1], &[0, 2], &[3, 1]]);
        let q = quotient_map(4, &image);
        assert_eq!(q.rep_indices.len(), 2);
        let proj_image = q.projector.mul(&image);
        assert!(proj_image.is_zero());
        for (j, &r) in q.rep_indices.iter().enumerate() {
            let mut e = vec![Scalar::zero(); 4];
            e[r] = Scalar::one();
            let coords = q.projector.apply(&e);
            for (i, v) in coords.iter().enumerate() {
                assert_eq!(*v == Scalar::one(), i == j);
            }
        }
    }

    fn arbitrary_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-4i64..5, r * c).prop_map(move |vals| {
                let rows: Vec<Vec<Scalar>> =
                    vals.chunks(c).map(|ch| ch.iter().map(|&v| int(v)).collect()).collect();
                SparseMatrix::from_rows(rows)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in arbitrary_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_nullity(m in arbitrary_matrix()) {
            prop_assert_eq!(m.cols(), m.rank() + m.kernel_basis().len());
        }

        #[test]
        fn bareiss_agrees_with_rref(m in arbitrary_matrix()) {
            let (_, pivots) = m.rref();
            prop_assert_eq!(m.rank(), pivots.len());
        }

        #[test]
        fn complement_completes_image(m in arbitrary_matrix()) {
            let n = m.rows();
            let comp = complement_basis(n, &m);
            prop_assert_eq!(comp.len() + m.rank(), n);
            let mut full = SparseMatrix::zero(n, m.cols() + comp.len());
            for (r, c, v) in m.iter() {
                full.set(r, c, v.clone());
            }
            for (j, &i) in comp.iter().enumerate() {
                full.set(i, m.cols() + j, Scalar::one());
            }
            prop_assert_eq!(full.rank(), n);
        }

        #[test]
        fn quotient_dim_complements_rank(m in arbitrary_matrix()) {
            let n = m.rows();
            prop_assert_eq!(quotient_dim(n, &m).unwrap() + m.rank(), n);
        }
    }
}
