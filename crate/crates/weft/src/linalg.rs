//! Exact rational linear algebra.
//!
//! All downstream modules reduce their questions to the operations here:
//! reduced row echelon forms, kernels and images, subspace lattices, and
//! cohomology of chain complexes. Subspaces are kept in canonical RREF so
//! that syntactic equality of bases is the working notion of equality.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::fmt;

pub type Rat = BigRational;

/// Shorthand for an integer-valued rational.
pub fn qi(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `p/q` from integers; panics if `q == 0`.
pub fn qr(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Dense matrix over arbitrary-precision rationals, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rat>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        RatMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    /// Integer literal matrix, handy in tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        RatMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn neg(&self) -> Self {
        let entries = self.entries.iter().map(|a| -a.clone()).collect();
        RatMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let entries = self.entries.iter().map(|a| a * c).collect();
        RatMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    /// Matrix power; `pow(0)` is the identity.
    pub fn pow(&self, e: usize) -> Self {
        assert!(self.is_square(), "pow needs a square matrix");
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|i| {
                let mut s = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        s += &self[(i, j)] * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Self::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack col mismatch");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, entries }
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Kronecker product, blocks ordered row-major by `self`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = &other[(k, l)];
                        if !b.is_zero() {
                            out[(i * other.rows + k, j * other.cols + l)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn submatrix(&self, row_range: std::ops::Range<usize>, col_range: std::ops::Range<usize>) -> Self {
        let mut out = Self::zero(row_range.len(), col_range.len());
        for (oi, i) in row_range.clone().enumerate() {
            for (oj, j) in col_range.clone().enumerate() {
                out[(oi, oj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            // Choose the entry with smallest "size" to keep numbers tame.
            let mut best: Option<usize> = None;
            for r in pivot_row..self.rows {
                if !self[(r, col)].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => entry_size(&self[(r, col)]) < entry_size(&self[(b, col)]),
                    };
                    if better {
                        best = Some(r);
                    }
                }
            }
            let Some(r) = best else { continue };
            self.swap_rows(pivot_row, r);
            let inv = {
                let p = &self[(pivot_row, col)];
                Rat::one() / p.clone()
            };
            for j in col..self.cols {
                let v = &self[(pivot_row, j)] * &inv;
                self[(pivot_row, j)] = v;
            }
            for r2 in 0..self.rows {
                if r2 != pivot_row && !self[(r2, col)].is_zero() {
                    let factor = self[(r2, col)].clone();
                    for j in col..self.cols {
                        let v = &self[(r2, j)] - &(&factor * &self[(pivot_row, j)]);
                        self[(r2, j)] = v;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Kernel of the matrix as a map from column space, i.e. `{x : Mx = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let mut basis: Vec<Vec<Rat>> = Vec::new();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            pivot_of_col[pcol] = Some(prow);
        }
        for free_col in 0..self.cols {
            if pivot_of_col[free_col].is_some() {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free_col] = Rat::one();
            for (col, slot) in pivot_of_col.iter().enumerate() {
                if let Some(prow) = slot {
                    v[col] = -r[(*prow, free_col)].clone();
                }
            }
            basis.push(v);
        }
        let out = Subspace::from_rows(self.cols, basis);
        // rank-nullity is structural; a violation means broken elimination
        assert_eq!(out.dim() + pivots.len(), self.cols, "rank-nullity violated");
        out
    }

    /// Column span of the matrix.
    pub fn image(&self) -> Subspace {
        let rows: Vec<Vec<Rat>> = (0..self.cols).map(|j| self.col(j)).collect();
        Subspace::from_rows(self.rows, rows)
    }

    /// Solve `self * x = b` for one column vector; `None` if inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len(), "rhs length mismatch");
        let bmat = RatMatrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect());
        let aug = self.hstack(&bmat);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p == self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = r[(prow, self.cols)].clone();
        }
        Some(x)
    }

    /// Solve `self * X = B` columnwise; `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &RatMatrix) -> Option<RatMatrix> {
        assert_eq!(self.rows, b.rows, "rhs shape mismatch");
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(b.cols);
        for j in 0..b.cols {
            cols.push(self.solve(&b.col(j))?);
        }
        let mut out = RatMatrix::zero(self.cols, b.cols);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..self.cols {
                out[(i, j)] = c[i].clone();
            }
        }
        Some(out)
    }

    /// Inverse of a square invertible matrix; panics otherwise.
    pub fn inverse(&self) -> Self {
        assert!(self.is_square(), "inverse needs a square matrix");
        self.solve_matrix(&Self::identity(self.rows))
            .expect("matrix not invertible")
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

fn entry_size(r: &Rat) -> u64 {
    (r.numer().abs().bits() + r.denom().bits()) as u64
}

/// Subspace of `Q^n` stored as a canonical RREF basis (rows are basis
/// vectors, zero rows dropped). Two subspaces are equal iff their stored
/// bases are identical, which RREF canonicality guarantees.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: RatMatrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of Q^{}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: RatMatrix::zero(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: RatMatrix::identity(ambient) }
    }

    /// Span of the given row vectors, canonicalized.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rat>>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ambient, "vector length must match ambient dimension");
        }
        if rows.is_empty() {
            return Self::zero(ambient);
        }
        let m = RatMatrix::from_rows(rows);
        Self::from_span_matrix(m)
    }

    /// Span of the rows of `m`, canonicalized.
    pub fn from_span_matrix(m: RatMatrix) -> Self {
        let ambient = m.cols();
        let (r, pivots) = m.rref();
        let basis = r.submatrix(0..pivots.len(), 0..ambient);
        Subspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        (0..self.dim()).map(|i| self.basis.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` lies outside.
    pub fn coords_of(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        // RREF structure: coefficient on basis row i is v[pivot_i].
        let mut coords = Vec::with_capacity(self.dim());
        let mut residue: Vec<Rat> = v.to_vec();
        for i in 0..self.dim() {
            let pcol = (0..self.ambient)
                .find(|&j| self.basis[(i, j)].is_one())
                .expect("canonical basis row without pivot");
            let c = residue[pcol].clone();
            if !c.is_zero() {
                for j in 0..self.ambient {
                    let v2 = &residue[j] - &(&c * &self.basis[(i, j)]);
                    residue[j] = v2;
                }
            }
            coords.push(c);
        }
        if residue.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        self.coords_of(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        (0..other.dim()).all(|i| self.contains_vector(&other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        Subspace::from_span_matrix(self.basis.vstack(&other.basis))
    }

    /// Intersection via the kernel of `[A^T | -B^T]`.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient);
        }
        let at = self.basis.transpose();
        let bt = other.basis.transpose().neg();
        let m = at.hstack(&bt);
        let ker = m.kernel();
        let mut rows = Vec::new();
        for i in 0..ker.dim() {
            let k = ker.basis.row(i);
            let coeffs = &k[0..self.dim()];
            let mut v = vec![Rat::zero(); self.ambient];
            for (bi, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    for j in 0..self.ambient {
                        let v2 = &v[j] + &(c * &self.basis[(bi, j)]);
                        v[j] = v2;
                    }
                }
            }
            rows.push(v);
        }
        Subspace::from_rows(self.ambient, rows)
    }

    /// Image of this subspace under a linear map (matrix applied to column
    /// vectors; the subspace lives in the map's column space).
    pub fn map_by(&self, m: &RatMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient, "map domain mismatch");
        let rows: Vec<Vec<Rat>> = (0..self.dim()).map(|i| m.apply(&self.basis.row(i))).collect();
        Subspace::from_rows(m.rows(), rows)
    }

    /// Preimage `{x : Mx in self}` for a map into this subspace's ambient.
    pub fn preimage_under(&self, m: &RatMatrix) -> Subspace {
        assert_eq!(m.rows(), self.ambient, "map codomain mismatch");
        if self.is_full() {
            return Subspace::full(m.cols());
        }
        // x with Mx in span(B): equivalently [M | -B^T] has solution; take
        // kernel of the stacked system and project to x-part.
        let bt = self.basis.transpose().neg();
        let aug = m.hstack(&bt);
        let ker = aug.kernel();
        let rows: Vec<Vec<Rat>> = (0..ker.dim())
            .map(|i| ker.basis.row(i)[0..m.cols()].to_vec())
            .collect();
        Subspace::from_rows(m.cols(), rows)
    }

    /// Rows extending `sub`'s basis to a basis of `self`; `sub` must be
    /// contained in `self`.
    pub fn complement_of(&self, sub: &Subspace) -> RatMatrix {
        assert!(self.contains(sub), "complement_of needs sub inside self");
        let mut picked: Vec<Vec<Rat>> = Vec::new();
        let mut current = sub.clone();
        for i in 0..self.dim() {
            if current.dim() == self.dim() {
                break;
            }
            let cand = self.basis.row(i);
            if !current.contains_vector(&cand) {
                picked.push(cand.clone());
                current = current.sum(&Subspace::from_rows(self.ambient, vec![cand]));
            }
        }
        assert_eq!(current.dim(), self.dim(), "failed to complete basis");
        if picked.is_empty() {
            RatMatrix::zero(0, self.ambient)
        } else {
            RatMatrix::from_rows(picked)
        }
    }

    /// Quotient `self / sub` with an explicit projection and section.
    pub fn quotient(&self, sub: &Subspace) -> QuotientSpace {
        QuotientSpace::new(self.clone(), sub.clone())
    }

    /// Span of all `u (x) v` in Kronecker coordinates (row-major pairing).
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        Subspace::from_span_matrix(self.basis.kronecker(&other.basis))
    }
}

/// The quotient `space / sub` with chosen coordinates.
///
/// `proj` is a `(dim space - dim sub) x n` matrix; restricted to `space` it
/// is surjective with kernel exactly `sub`. `section` embeds quotient
/// coordinates back into the ambient space; `proj * section = id`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    pub space: Subspace,
    pub sub: Subspace,
    pub proj: RatMatrix,
    pub section: RatMatrix,
}

impl QuotientSpace {
    pub fn new(space: Subspace, sub: Subspace) -> Self {
        assert!(space.contains(&sub), "quotient needs sub inside space");
        let n = space.ambient_dim();
        let comp = space.complement_of(&sub); // q x n rows
        let q = comp.rows();
        // Full basis of Q^n: [sub; comp; outside], then read off the comp
        // coordinates of a vector via the inverse transpose.
        let inside = if sub.dim() == 0 {
            comp.clone()
        } else if q == 0 {
            sub.basis().clone()
        } else {
            sub.basis().vstack(&comp)
        };
        let outside = Subspace::full(n).complement_of(&Subspace::from_span_matrix(inside.clone()));
        let full = if outside.rows() == 0 { inside } else { inside.vstack(&outside) };
        debug_assert_eq!(full.rows(), n);
        let inv_t = full.inverse().transpose();
        let proj = inv_t.submatrix(sub.dim()..sub.dim() + q, 0..n);
        let section = comp.transpose();
        QuotientSpace { space, sub, proj, section }
    }

    pub fn dim(&self) -> usize {
        self.proj.rows()
    }

    /// Class of an ambient vector (must lie in `space`).
    pub fn project_vector(&self, v: &[Rat]) -> Vec<Rat> {
        debug_assert!(self.space.contains_vector(v), "vector outside the space being quotiented");
        self.proj.apply(v)
    }

    /// Image in quotient coordinates of a subspace of `space`.
    pub fn project_subspace(&self, s: &Subspace) -> Subspace {
        debug_assert!(self.space.contains(s), "subspace outside the space being quotiented");
        s.map_by(&self.proj)
    }

    /// Matrix induced on the quotient by an ambient operator that preserves
    /// both `space` and `sub`.
    pub fn induced_map(&self, op: &RatMatrix) -> RatMatrix {
        self.proj.mul(&op.mul(&self.section))
    }

    /// Preimage in `space` of a subspace of the quotient.
    pub fn lift_subspace(&self, s: &Subspace) -> Subspace {
        assert_eq!(s.ambient_dim(), self.dim());
        let lifted = s.map_by(&self.section);
        lifted.sum(&self.sub)
    }
}

/// A cochain complex of rational vector spaces in consecutive degrees.
///
/// `maps[i]` is the differential from degree `min_degree + i` to the next
/// degree; `d . d = 0` is enforced at construction.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    min_degree: i64,
    dims: Vec<usize>,
    maps: Vec<RatMatrix>,
}

/// Cohomology of one degree: dimension plus a matrix whose rows are
/// representative cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyPiece {
    pub degree: i64,
    pub dim: usize,
    pub representatives: RatMatrix,
}

impl ChainComplex {
    pub fn new(min_degree: i64, dims: Vec<usize>, maps: Vec<RatMatrix>) -> Self {
        assert!(!dims.is_empty(), "complex needs at least one space");
        assert_eq!(maps.len() + 1, dims.len(), "need one map per adjacent pair");
        for (i, m) in maps.iter().enumerate() {
            assert_eq!(m.cols(), dims[i], "map {} domain mismatch", i);
            assert_eq!(m.rows(), dims[i + 1], "map {} codomain mismatch", i);
        }
        for i in 0..maps.len().saturating_sub(1) {
            assert!(
                maps[i + 1].mul(&maps[i]).is_zero(),
                "d.d != 0 between degrees {} and {}",
                min_degree + i as i64,
                min_degree + i as i64 + 2
            );
        }
        ChainComplex { min_degree, dims, maps }
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.dims.len() as i64 - 1
    }

    pub fn dim_at(&self, degree: i64) -> usize {
        if degree < self.min_degree || degree > self.max_degree() {
            0
        } else {
            self.dims[(degree - self.min_degree) as usize]
        }
    }

    pub fn map_at(&self, degree: i64) -> Option<&RatMatrix> {
        if degree < self.min_degree || degree >= self.max_degree() {
            None
        } else {
            Some(&self.maps[(degree - self.min_degree) as usize])
        }
    }

    pub fn cohomology(&self) -> Vec<CohomologyPiece> {
        let mut out = Vec::new();
        for idx in 0..self.dims.len() {
            let degree = self.min_degree + idx as i64;
            let n = self.dims[idx];
            let cycles = if idx < self.maps.len() {
                self.maps[idx].kernel()
            } else {
                Subspace::full(n)
            };
            let boundaries = if idx > 0 {
                self.maps[idx - 1].image()
            } else {
                Subspace::zero(n)
            };
            debug_assert!(cycles.contains(&boundaries), "boundaries not cycles");
            let reps = cycles.complement_of(&boundaries);
            out.push(CohomologyPiece { degree, dim: reps.rows(), representatives: reps });
        }
        out
    }

    pub fn cohomology_dims(&self) -> Vec<(i64, usize)> {
        self.cohomology().iter().map(|p| (p.degree, p.dim)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for idx in 0..self.dims.len() {
            let sign = if (self.min_degree + idx as i64).rem_euclid(2) == 0 { 1 } else { -1 };
            chi += sign * self.dims[idx] as i64;
        }
        chi
    }
}

/// Matrix of the map a cochain operator induces on one cohomology piece.
///
/// The operator must commute with the differentials so that it sends cocycles
/// to cocycles and coboundaries to coboundaries. Columns hold coordinates in
/// the basis of stored representatives. Returns None when some transported
/// representative leaves the span of representatives and coboundaries, which
/// means the operator does not descend to this piece.
pub fn induced_on_cohomology(
    complex: &ChainComplex,
    piece: &CohomologyPiece,
    operator: &RatMatrix,
) -> Option<RatMatrix> {
    let h = piece.dim;
    if h == 0 {
        return Some(RatMatrix::zero(0, 0));
    }
    let mut span_rows: Vec<Vec<Rat>> = Vec::new();
    for r in 0..piece.representatives.rows() {
        span_rows.push(piece.representatives.row(r));
    }
    if let Some(incoming) = complex.map_at(piece.degree - 1) {
        let image = incoming.image();
        for r in 0..image.dim() {
            span_rows.push(image.basis().row(r));
        }
    }
    let span = RatMatrix::from_rows(span_rows).transpose();
    let mut transported_rows = Vec::new();
    for r in 0..piece.representatives.rows() {
        transported_rows.push(operator.apply(&piece.representatives.row(r)));
    }
    let transported = RatMatrix::from_rows(transported_rows).transpose();
    let coords = span.solve_matrix(&transported)?;
    Some(coords.submatrix(0..h, 0..h))
}

/// Exact exponential of a nilpotent matrix (the series terminates).
pub fn nilpotent_exp(m: &RatMatrix) -> RatMatrix {
    assert!(m.is_square());
    let n = m.rows();
    let mut acc = RatMatrix::identity(n);
    let mut term = RatMatrix::identity(n);
    let mut k: u64 = 1;
    loop {
        term = term.mul(m);
        if term.is_zero() {
            break;
        }
        term = term.scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
        acc = acc.add(&term);
        // re-multiply factor accumulates 1/k!, so keep term as m^k / k!
        k += 1;
        assert!(k <= n as u64 + 1, "matrix is not nilpotent");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_canonicalizes_spans() {
        let a = Subspace::from_rows(3, vec![vec![qi(2), qi(0), qi(2)], vec![qi(1), qi(1), qi(0)]]);
        let b = Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(1)], vec![qi(0), qi(1), qi(-1)]]);
        assert_eq!(a, b, "different spanning sets of the same plane must agree syntactically");
    }

    #[test]
    fn kernel_of_jordan_block() {
        let m = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains_vector(&[qi(1), qi(0)]));
    }

    #[test]
    fn rank_nullity_random_shapes() {
        let m = RatMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank() + m.kernel().dim(), 3);
        assert_eq!(m.image().dim(), m.rank());
    }

    #[test]
    fn intersect_and_sum_are_lattice_ops() {
        let e1 = Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(0)]]);
        let plane = Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(0)], vec![qi(0), qi(1), qi(0)]]);
        let diag = Subspace::from_rows(3, vec![vec![qi(1), qi(1), qi(1)]]);
        assert_eq!(plane.intersect(&e1), e1);
        assert_eq!(e1.sum(&diag).dim(), 2);
        assert!(plane.sum(&diag).is_full());
        assert!(plane.intersect(&diag).is_zero());
    }

    #[test]
    fn quotient_projection_kernel_is_sub() {
        let full = Subspace::full(2);
        let e1 = Subspace::from_rows(2, vec![vec![qi(1), qi(0)]]);
        let q = full.quotient(&e1);
        assert_eq!(q.dim(), 1);
        assert_eq!(q.proj.kernel(), e1);
        // proj . section = id on quotient coordinates
        assert_eq!(q.proj.mul(&q.section), RatMatrix::identity(1));
    }

    #[test]
    fn solve_and_inverse_round_trip() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse();
        assert_eq!(m.mul(&inv), RatMatrix::identity(2));
        let x = m.solve(&[qi(3), qi(2)]).unwrap();
        assert_eq!(x, vec![qi(1), qi(1)]);
    }

    #[test]
    fn chain_complex_rejects_nonzero_d_squared() {
        let d0 = RatMatrix::from_i64(&[&[1]]);
        let d1 = RatMatrix::from_i64(&[&[1]]);
        let result = std::panic::catch_unwind(|| {
            ChainComplex::new(0, vec![1, 1, 1], vec![d0, d1])
        });
        assert!(result.is_err(), "d.d != 0 must be rejected at construction");
    }

    #[test]
    fn cone_of_identity_is_exact() {
        // 0 -> V --id--> V -> 0 has no cohomology.
        let d = RatMatrix::identity(3);
        let c = ChainComplex::new(0, vec![3, 3], vec![d]);
        let h = c.cohomology_dims();
        assert_eq!(h, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn two_step_koszul_like_complex() {
        // Q -> Q^2 -> Q with zero maps: cohomology dims (1, 2, 1).
        let c = ChainComplex::new(
            0,
            vec![1, 2, 1],
            vec![RatMatrix::zero(2, 1), RatMatrix::zero(1, 2)],
        );
        assert_eq!(c.cohomology_dims(), vec![(0, 1), (1, 2), (2, 1)]);
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn preimage_matches_direct_computation() {
        let m = RatMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        let target = Subspace::from_rows(2, vec![vec![qi(1), qi(0)]]);
        let pre = target.preimage_under(&m);
        assert!(pre.is_full(), "everything maps into span(e1)");
        let zero_target = Subspace::zero(2);
        assert_eq!(zero_target.preimage_under(&m), m.kernel());
    }

    #[test]
    fn nilpotent_exp_of_raising_operator() {
        let n = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let e = nilpotent_exp(&n);
        assert_eq!(e, RatMatrix::from_i64(&[&[1, 1], &[0, 1]]));
    }

    #[test]
    fn kronecker_shapes_and_values() {
        let a = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let id = RatMatrix::identity(2);
        let k = a.kronecker(&id);
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k[(0, 2)], qi(1));
        assert_eq!(k[(1, 3)], qi(1));
        assert!(k.pow(2).is_zero());
    }

    #[test]
    fn tensor_of_lines_is_a_line() {
        let a = Subspace::from_rows(2, vec![vec![qi(1), qi(2)]]);
        let b = Subspace::from_rows(2, vec![vec![qi(3), qi(0)]]);
        let t = a.tensor(&b);
        assert_eq!(t.ambient_dim(), 4);
        assert_eq!(t.dim(), 1);
        assert!(t.contains_vector(&[qi(3), qi(0), qi(6), qi(0)]));
    }

    #[test]
    fn coords_of_uses_canonical_pivots() {
        let s = Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(2)], vec![qi(0), qi(1), qi(3)]]);
        let c = s.coords_of(&[qi(2), qi(1), qi(7)]).unwrap();
        assert_eq!(c, vec![qi(2), qi(1)]);
        assert!(s.coords_of(&[qi(0), qi(0), qi(1)]).is_none());
    }
}
