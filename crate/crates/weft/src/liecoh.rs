//! Cohomology of nilpotent Lie algebras with exact weight bookkeeping.
//!
//! Algebras are given by rational structure constants and validated for
//! antisymmetry, the Jacobi identity, and nilpotency. Modules are matrix
//! actions validated against the bracket. When algebra and module both carry
//! integer gradings the cochain complex splits by weight; the grading is
//! transported to cohomology and eigen-split there, and an independent route
//! block-diagonalizes the whole complex first and takes cohomology per block.
//! A highest-weight checker compares dimensions and weights against hardcoded
//! rank-one and rank-two reflection data, and a lattice comparison
//! exponentiates the action and matches group cohomology degree by degree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};

use crate::groupcoh::{
    cohomology_of_group, heisenberg_resolution, koszul_resolution, Group, GroupAction, GroupError,
};
use crate::linalg::{
    induced_on_cohomology, nilpotent_exp, qi, ChainComplex, CohomologyPiece, Rat, RatMatrix,
    Subspace,
};

/// Eigenvalues of grading operators are searched in this window.
pub(crate) const EIGENVALUE_WINDOW: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieError {
    Shape(String),
    NotAntisymmetric { i: usize, j: usize },
    Jacobi { i: usize, j: usize, k: usize },
    NotNilpotent,
    GradingBracket { i: usize, j: usize },
    NotHomomorphism { i: usize, j: usize },
    GradingAction { generator: usize },
    NotSemisimple,
    NotUnipotent { generator: usize },
    Group(GroupError),
}

impl fmt::Display for LieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieError::Shape(msg) => write!(f, "shape error: {msg}"),
            LieError::NotAntisymmetric { i, j } => {
                write!(f, "bracket of basis vectors {i} and {j} is not antisymmetric")
            }
            LieError::Jacobi { i, j, k } => {
                write!(f, "Jacobi identity fails on basis vectors {i}, {j}, {k}")
            }
            LieError::NotNilpotent => write!(f, "lower central series does not reach zero"),
            LieError::GradingBracket { i, j } => {
                write!(f, "bracket of basis vectors {i} and {j} leaves its weight space")
            }
            LieError::NotHomomorphism { i, j } => {
                write!(f, "action does not respect the bracket of basis vectors {i} and {j}")
            }
            LieError::GradingAction { generator } => {
                write!(f, "grading operator fails to shift generator {generator} by its weight")
            }
            LieError::NotSemisimple => write!(
                f,
                "grading operator is not semisimple with integer eigenvalues in [-{w}, {w}]",
                w = EIGENVALUE_WINDOW
            ),
            LieError::NotUnipotent { generator } => {
                write!(f, "generator {generator} does not exponentiate to a unipotent matrix")
            }
            LieError::Group(e) => write!(f, "group layer: {e}"),
        }
    }
}

impl std::error::Error for LieError {}

impl From<GroupError> for LieError {
    fn from(e: GroupError) -> Self {
        LieError::Group(e)
    }
}

/// Finite-dimensional nilpotent Lie algebra over the rationals, described by
/// structure constants and optionally graded by integer weights per basis
/// vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentLieAlgebra {
    dim: usize,
    // bracket[i][j] holds the coordinates of [x_i, x_j] in the basis
    bracket: Vec<Vec<Vec<Rat>>>,
    grading: Option<Vec<i64>>,
}

impl NilpotentLieAlgebra {
    pub fn new(
        bracket: Vec<Vec<Vec<Rat>>>,
        grading: Option<Vec<i64>>,
    ) -> Result<Self, LieError> {
        let dim = bracket.len();
        for row in &bracket {
            if row.len() != dim || row.iter().any(|v| v.len() != dim) {
                return Err(LieError::Shape(format!(
                    "structure constants must form a {dim} by {dim} table of coordinate vectors"
                )));
            }
        }
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    if bracket[i][j][k] != -bracket[j][i][k].clone() {
                        return Err(LieError::NotAntisymmetric { i, j });
                    }
                }
            }
        }
        let algebra = NilpotentLieAlgebra { dim, bracket, grading: None };
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    let mut sum = algebra.bracket_vector_basis(&algebra.bracket[i][j], k);
                    let t2 = algebra.bracket_vector_basis(&algebra.bracket[j][k], i);
                    let t3 = algebra.bracket_vector_basis(&algebra.bracket[k][i], j);
                    for a in 0..dim {
                        sum[a] += &t2[a] + &t3[a];
                    }
                    if sum.iter().any(|x| !x.is_zero()) {
                        return Err(LieError::Jacobi { i, j, k });
                    }
                }
            }
        }
        // lower central series must terminate
        let mut current = Subspace::from_rows(
            dim,
            (0..dim)
                .map(|i| {
                    let mut e = vec![Rat::zero(); dim];
                    e[i] = Rat::one();
                    e
                })
                .collect(),
        );
        loop {
            let mut next_rows = Vec::new();
            for i in 0..dim {
                for r in 0..current.dim() {
                    next_rows.push(algebra.bracket_vector_basis(&current.basis().row(r), i));
                }
            }
            let next = Subspace::from_rows(dim, next_rows);
            if next.dim() == current.dim() {
                if next.dim() > 0 {
                    return Err(LieError::NotNilpotent);
                }
                break;
            }
            if next.dim() == 0 {
                break;
            }
            current = next;
        }
        if let Some(w) = &grading {
            if w.len() != dim {
                return Err(LieError::Shape("grading must assign a weight per basis vector".into()));
            }
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        if !algebra.bracket[i][j][k].is_zero() && w[k] != w[i] + w[j] {
                            return Err(LieError::GradingBracket { i, j });
                        }
                    }
                }
            }
        }
        Ok(NilpotentLieAlgebra { grading, ..algebra })
    }

    /// Commutative algebra of the given dimension, without a grading.
    pub fn abelian(dim: usize) -> Self {
        let zero = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        NilpotentLieAlgebra::new(zero, None).expect("zero bracket is always valid")
    }

    /// Commutative algebra graded by the given weights.
    pub fn abelian_graded(weights: &[i64]) -> Self {
        let dim = weights.len();
        let zero = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        NilpotentLieAlgebra::new(zero, Some(weights.to_vec()))
            .expect("zero bracket satisfies any grading")
    }

    /// Three-dimensional two-step algebra with [x0, x1] = x2.
    pub fn heisenberg() -> Self {
        let mut bracket = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
        bracket[0][1][2] = Rat::one();
        bracket[1][0][2] = -Rat::one();
        NilpotentLieAlgebra::new(bracket, None).expect("two-step table is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grading(&self) -> Option<&[i64]> {
        self.grading.as_deref()
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[Rat] {
        &self.bracket[i][j]
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket
            .iter()
            .all(|row| row.iter().all(|v| v.iter().all(|x| x.is_zero())))
    }

    // coordinates of [v, x_k] for a coordinate vector v
    fn bracket_vector_basis(&self, v: &[Rat], k: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for (a, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for t in 0..self.dim {
                out[t] += coeff * &self.bracket[a][k][t];
            }
        }
        out
    }
}

/// Matrix action of a nilpotent Lie algebra, optionally graded by a
/// semisimple operator with integer eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct LieModule {
    dim: usize,
    actions: Vec<RatMatrix>,
    grading: Option<RatMatrix>,
    grading_eigenvalues: Option<Vec<i64>>,
}

impl LieModule {
    pub fn new(
        algebra: &NilpotentLieAlgebra,
        actions: Vec<RatMatrix>,
        grading: Option<RatMatrix>,
    ) -> Result<Self, LieError> {
        if actions.len() != algebra.dim() {
            return Err(LieError::Shape(format!(
                "expected one action matrix per basis vector, got {} for dimension {}",
                actions.len(),
                algebra.dim()
            )));
        }
        // a zero-dimensional algebra leaves the size to the grading operator
        let dim = match actions.first() {
            Some(a) => a.rows(),
            None => grading.as_ref().map(|y| y.rows()).ok_or_else(|| {
                LieError::Shape("module size needs an action matrix or a grading".into())
            })?,
        };
        if dim == 0 {
            return Err(LieError::Shape("module dimension must be positive".into()));
        }
        for a in &actions {
            if a.rows() != dim || a.cols() != dim {
                return Err(LieError::Shape("action matrices must be square of equal size".into()));
            }
        }
        for i in 0..actions.len() {
            for j in i + 1..actions.len() {
                let commutator = actions[i].mul(&actions[j]).sub(&actions[j].mul(&actions[i]));
                let mut expected = RatMatrix::zero(dim, dim);
                for (k, coeff) in algebra.bracket(i, j).iter().enumerate() {
                    if !coeff.is_zero() {
                        expected = expected.add(&actions[k].scale(coeff));
                    }
                }
                if commutator != expected {
                    return Err(LieError::NotHomomorphism { i, j });
                }
            }
        }
        let mut eigenvalues = None;
        if let Some(y) = &grading {
            if y.rows() != dim || y.cols() != dim {
                return Err(LieError::Shape("grading operator must be square of module size".into()));
            }
            let weights = algebra.grading().ok_or_else(|| {
                LieError::Shape("a graded module needs a graded algebra".into())
            })?;
            for (i, a) in actions.iter().enumerate() {
                let shift = y.mul(a).sub(&a.mul(y));
                if shift != a.scale(&qi(weights[i])) {
                    return Err(LieError::GradingAction { generator: i });
                }
            }
            let mut found = Vec::new();
            let mut total = 0usize;
            for lambda in -EIGENVALUE_WINDOW..=EIGENVALUE_WINDOW {
                let shifted = y.sub(&RatMatrix::identity(dim).scale(&qi(lambda)));
                let space = shifted.kernel();
                if space.dim() > 0 {
                    total += space.dim();
                    found.push(lambda);
                }
            }
            if total != dim {
                return Err(LieError::NotSemisimple);
            }
            eigenvalues = Some(found);
        }
        Ok(LieModule { dim, actions, grading, grading_eigenvalues: eigenvalues })
    }

    /// One-dimensional module with zero action; graded by zero when the
    /// algebra is graded.
    pub fn trivial(algebra: &NilpotentLieAlgebra) -> Self {
        let actions = vec![RatMatrix::zero(1, 1); algebra.dim()];
        let grading = algebra.grading().map(|_| RatMatrix::zero(1, 1));
        LieModule::new(algebra, actions, grading).expect("zero action is always a module")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[RatMatrix] {
        &self.actions
    }

    pub fn action(&self, i: usize) -> &RatMatrix {
        &self.actions[i]
    }

    pub fn grading(&self) -> Option<&RatMatrix> {
        self.grading.as_ref()
    }

    pub fn grading_eigenvalues(&self) -> Option<&[i64]> {
        self.grading_eigenvalues.as_deref()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut out = 1usize;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

// subsets of {0..n-1} of the given size, ordered by increasing bitmask
pub(crate) fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize == size {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Cochain complex of a module over a nilpotent Lie algebra, in degrees zero
/// through the algebra dimension. Degree q has one module copy per size-q
/// subset of the basis, and the differential combines the action with the
/// structure constants.
pub fn chevalley_eilenberg(
    algebra: &NilpotentLieAlgebra,
    module: &LieModule,
) -> Result<ChainComplex, LieError> {
    if module.actions().len() != algebra.dim() {
        return Err(LieError::Shape("module and algebra dimensions disagree".into()));
    }
    let n = algebra.dim();
    let d = module.dim();
    let levels: Vec<Vec<Vec<usize>>> = (0..=n).map(|q| subsets_of_size(n, q)).collect();
    let index: Vec<BTreeMap<Vec<usize>, usize>> = levels
        .iter()
        .map(|level| {
            level
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect()
        })
        .collect();
    let dims: Vec<usize> = levels.iter().map(|level| level.len() * d).collect();
    let mut maps = Vec::new();
    for q in 0..n {
        let rows = dims[q + 1];
        let cols = dims[q];
        let mut entries = vec![vec![Rat::zero(); cols]; rows];
        for (ti, target) in levels[q + 1].iter().enumerate() {
            // single-argument terms apply the action of the omitted vector
            for (a, &g) in target.iter().enumerate() {
                let mut source = target.clone();
                source.remove(a);
                let si = index[q][&source];
                let action = module.action(g);
                let negate = a % 2 == 1;
                for r in 0..d {
                    for c in 0..d {
                        let v = &action[(r, c)];
                        if v.is_zero() {
                            continue;
                        }
                        let slot = &mut entries[ti * d + r][si * d + c];
                        if negate {
                            *slot -= v;
                        } else {
                            *slot += v;
                        }
                    }
                }
            }
            // pair terms contract two arguments through the bracket
            for a in 0..=q {
                for b in a + 1..=q {
                    let mut rest = target.clone();
                    rest.remove(b);
                    rest.remove(a);
                    for (k, coeff) in algebra.bracket(target[a], target[b]).iter().enumerate() {
                        if coeff.is_zero() || rest.contains(&k) {
                            continue;
                        }
                        let mut source = rest.clone();
                        let pos = source.iter().take_while(|&&x| x < k).count();
                        source.insert(pos, k);
                        let si = index[q][&source];
                        let mut sign = coeff.clone();
                        if (a + b + pos) % 2 == 1 {
                            sign = -sign;
                        }
                        for t in 0..d {
                            entries[ti * d + t][si * d + t] += &sign;
                        }
                    }
                }
            }
        }
        maps.push(RatMatrix::from_rows(entries));
    }
    Ok(ChainComplex::new(0, dims, maps))
}

/// Cohomology of a Lie algebra module with the transported grading.
#[derive(Clone, Debug)]
pub struct LieCohomology {
    pub complex: ChainComplex,
    pub pieces: Vec<CohomologyPiece>,
    /// grading operator induced on each degree, when both gradings exist
    pub grading_on_cohomology: Option<Vec<RatMatrix>>,
    /// weight multiplicity per degree; None when the transported grading
    /// refuses to split or no grading was supplied
    pub weights: Option<Vec<BTreeMap<i64, usize>>>,
}

impl LieCohomology {
    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.dim).collect()
    }
}

// weight of a subset of dual basis vectors: duals carry negated weights
fn subset_weight(weights: &[i64], subset: &[usize]) -> i64 {
    subset.iter().map(|&i| weights[i]).sum()
}

pub fn lie_cohomology(
    algebra: &NilpotentLieAlgebra,
    module: &LieModule,
) -> Result<LieCohomology, LieError> {
    let complex = chevalley_eilenberg(algebra, module)?;
    let pieces = complex.cohomology();
    let (weights_alg, y) = match (algebra.grading(), module.grading()) {
        (Some(w), Some(y)) => (w, y),
        _ => {
            return Ok(LieCohomology {
                complex,
                pieces,
                grading_on_cohomology: None,
                weights: None,
            })
        }
    };
    let n = algebra.dim();
    let d = module.dim();
    // grading operator on cochains: the module grading shifted down by the
    // total weight of each dual subset
    let mut cochain_grading = Vec::new();
    for q in 0..=n {
        let level = subsets_of_size(n, q);
        let mut op = RatMatrix::zero(0, 0);
        for subset in &level {
            let shift = qi(subset_weight(weights_alg, subset));
            let block = y.sub(&RatMatrix::identity(d).scale(&shift));
            op = if op.rows() == 0 { block } else { op.direct_sum(&block) };
        }
        cochain_grading.push(op);
    }
    for q in 0..n {
        let dmap = complex.map_at(q as i64).expect("differential exists below top degree");
        assert!(
            dmap.mul(&cochain_grading[q]) == cochain_grading[q + 1].mul(dmap),
            "grading must commute with the differential"
        );
    }
    let mut transported = Vec::new();
    for piece in &pieces {
        let q = piece.degree as usize;
        let op = induced_on_cohomology(&complex, piece, &cochain_grading[q])
            .expect("grading preserves cocycles and coboundaries");
        transported.push(op);
    }
    let eigenvalues = module
        .grading_eigenvalues()
        .expect("validated grading has eigenvalues");
    let mut split: Vec<BTreeMap<i64, usize>> = Vec::new();
    let mut refused = false;
    for (piece, op) in pieces.iter().zip(&transported) {
        let q = piece.degree as usize;
        let mut candidates = BTreeSet::new();
        for subset in subsets_of_size(n, q) {
            let shift = subset_weight(weights_alg, &subset);
            for mu in eigenvalues {
                candidates.insert(mu - shift);
            }
        }
        let mut level = BTreeMap::new();
        let mut total = 0usize;
        for lambda in candidates {
            let shifted = op.sub(&RatMatrix::identity(piece.dim).scale(&qi(lambda)));
            let dim = shifted.kernel().dim();
            if dim > 0 {
                level.insert(lambda, dim);
                total += dim;
            }
        }
        if total != piece.dim {
            refused = true;
            break;
        }
        split.push(level);
    }
    Ok(LieCohomology {
        complex,
        pieces,
        grading_on_cohomology: Some(transported),
        weights: if refused { None } else { Some(split) },
    })
}

fn select_submatrix(m: &RatMatrix, rows: &[usize], cols: &[usize]) -> RatMatrix {
    let mut entries = Vec::with_capacity(rows.len() * cols.len());
    for &r in rows {
        for &c in cols {
            entries.push(m[(r, c)].clone());
        }
    }
    RatMatrix::from_entries(rows.len(), cols.len(), entries)
}

/// Independent route to the weight split: change basis so the grading is
/// diagonal on every cochain space, check the differential is block diagonal
/// across weights, and take cohomology block by block. Returns cohomology
/// dimensions per weight, indexed by degree.
pub fn weight_split_dims(
    algebra: &NilpotentLieAlgebra,
    module: &LieModule,
) -> Result<BTreeMap<i64, Vec<usize>>, LieError> {
    let weights_alg = algebra
        .grading()
        .ok_or_else(|| LieError::Shape("weight split needs a graded algebra".into()))?;
    let y = module
        .grading()
        .ok_or_else(|| LieError::Shape("weight split needs a graded module".into()))?;
    let eigenvalues = module.grading_eigenvalues().expect("validated grading has eigenvalues");
    let n = algebra.dim();
    let d = module.dim();
    // eigenbasis of the module grading, one column block per eigenvalue
    let mut columns: Vec<Vec<Rat>> = Vec::new();
    let mut column_weights: Vec<i64> = Vec::new();
    for &mu in eigenvalues {
        let shifted = y.sub(&RatMatrix::identity(d).scale(&qi(mu)));
        let space = shifted.kernel();
        for r in 0..space.dim() {
            columns.push(space.basis().row(r));
            column_weights.push(mu);
        }
    }
    let p = RatMatrix::from_rows(columns).transpose();
    assert!(p.is_invertible(), "semisimple grading yields a full eigenbasis");
    let p_inv = p.inverse();
    let complex = chevalley_eilenberg(algebra, module)?;
    // weights per coordinate of each conjugated cochain space
    let mut coord_weights: Vec<Vec<i64>> = Vec::new();
    let mut conjugated: Vec<RatMatrix> = Vec::new();
    for q in 0..=n {
        let level = subsets_of_size(n, q);
        let mut w = Vec::with_capacity(level.len() * d);
        for subset in &level {
            let shift = subset_weight(weights_alg, subset);
            for &cw in &column_weights {
                w.push(cw - shift);
            }
        }
        coord_weights.push(w);
    }
    let block = |m: &RatMatrix, copies: usize| -> RatMatrix {
        let mut out = m.clone();
        for _ in 1..copies {
            out = out.direct_sum(m);
        }
        out
    };
    for q in 0..n {
        let dmap = complex.map_at(q as i64).expect("differential exists below top degree");
        let left = block(&p_inv, binomial(n, q + 1));
        let right = block(&p, binomial(n, q));
        conjugated.push(left.mul(dmap).mul(&right));
    }
    let all_weights: BTreeSet<i64> = coord_weights.iter().flatten().copied().collect();
    // off-block entries must vanish, which is the split made executable
    for (q, m) in conjugated.iter().enumerate() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if coord_weights[q + 1][r] != coord_weights[q][c] {
                    assert!(
                        m[(r, c)].is_zero(),
                        "differential must preserve the weight decomposition"
                    );
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for &w in &all_weights {
        let picks: Vec<Vec<usize>> = coord_weights
            .iter()
            .map(|cw| {
                cw.iter()
                    .enumerate()
                    .filter(|(_, &x)| x == w)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let dims: Vec<usize> = picks.iter().map(|p| p.len()).collect();
        let maps: Vec<RatMatrix> = (0..n)
            .map(|q| select_submatrix(&conjugated[q], &picks[q + 1], &picks[q]))
            .collect();
        let sub = ChainComplex::new(0, dims, maps);
        out.insert(w, sub.cohomology_dims().into_iter().map(|(_, dim)| dim).collect());
    }
    Ok(out)
}

/// Rank-one or rank-two reflection data for the highest-weight check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSystem {
    A1,
    A2,
}

/// Outcome of the highest-weight comparison: computed cohomology of the
/// nilradical module against dimensions counted by reflection length and
/// weights read off the shifted orbit.
#[derive(Clone, Debug)]
pub struct KostantReport {
    pub passed: bool,
    pub dims: Vec<usize>,
    pub expected_dims: Vec<usize>,
    pub weights: Vec<BTreeMap<i64, usize>>,
    pub expected_weights: Vec<BTreeMap<i64, usize>>,
}

// symmetric power of the two-dimensional module: raising operator plus the
// standard grading, over a one-dimensional algebra of weight two
pub(crate) fn sym_power(m: usize) -> (NilpotentLieAlgebra, LieModule) {
    let algebra = NilpotentLieAlgebra::abelian_graded(&[2]);
    let dim = m + 1;
    let mut e = RatMatrix::zero(dim, dim);
    let mut y = RatMatrix::zero(dim, dim);
    for i in 0..dim {
        if i > 0 {
            e[(i - 1, i)] = qi((i * (m + 1 - i)) as i64);
        }
        y[(i, i)] = qi(m as i64 - 2 * i as i64);
    }
    let module = LieModule::new(&algebra, vec![e], Some(y)).expect("raising action is a module");
    (algebra, module)
}

fn mat3_mul(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut out = [[0i64; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = (0..3).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

fn mat3_commutator(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let ab = mat3_mul(a, b);
    let ba = mat3_mul(b, a);
    let mut out = [[0i64; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = ab[r][c] - ba[r][c];
        }
    }
    out
}

// coordinates of a traceless 3 by 3 matrix in the basis
// (e12, e23, e13, h1, h2, e21, e32, e31)
fn sl3_coords(m: &[[i64; 3]; 3]) -> Vec<i64> {
    vec![
        m[0][1],
        m[1][2],
        m[0][2],
        m[0][0],
        m[0][0] + m[1][1],
        m[1][0],
        m[2][1],
        m[2][0],
    ]
}

fn elementary3(r: usize, c: usize) -> [[i64; 3]; 3] {
    let mut out = [[0i64; 3]; 3];
    out[r][c] = 1;
    out
}

// nilradical of the rank-two algebra: two simple raising operators and their
// bracket, graded by evaluation against the dual of the half-sum coweight
fn rank_two_nilradical() -> NilpotentLieAlgebra {
    let mut bracket = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
    bracket[0][1][2] = Rat::one();
    bracket[1][0][2] = -Rat::one();
    NilpotentLieAlgebra::new(bracket, Some(vec![1, 1, 2])).expect("graded two-step table is valid")
}

fn rank_two_module(algebra: &NilpotentLieAlgebra, lambda: [i64; 2]) -> Option<LieModule> {
    match lambda {
        [0, 0] => Some(LieModule::trivial(algebra)),
        [1, 0] | [0, 1] => {
            let raw = [elementary3(0, 1), elementary3(1, 2), elementary3(0, 2)];
            let dualize = lambda == [0, 1];
            let actions: Vec<RatMatrix> = raw
                .iter()
                .map(|m| {
                    let mat = RatMatrix::from_i64(&[&m[0], &m[1], &m[2]]);
                    if dualize {
                        mat.transpose().scale(&-Rat::one())
                    } else {
                        mat
                    }
                })
                .collect();
            let sign = if dualize { -1 } else { 1 };
            let mut y = RatMatrix::zero(3, 3);
            y[(0, 0)] = qi(sign);
            y[(2, 2)] = qi(-sign);
            Some(LieModule::new(algebra, actions, Some(y)).expect("matrix module is valid"))
        }
        [1, 1] => {
            let basis = [
                elementary3(0, 1),
                elementary3(1, 2),
                elementary3(0, 2),
                [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
                [[0, 0, 0], [0, 1, 0], [0, 0, -1]],
                elementary3(1, 0),
                elementary3(2, 1),
                elementary3(2, 0),
            ];
            let ad = |x: &[[i64; 3]; 3]| -> RatMatrix {
                let mut rows = vec![vec![Rat::zero(); 8]; 8];
                for (j, b) in basis.iter().enumerate() {
                    let coords = sl3_coords(&mat3_commutator(x, b));
                    for (i, v) in coords.iter().enumerate() {
                        rows[i][j] = qi(*v);
                    }
                }
                RatMatrix::from_rows(rows)
            };
            let actions = vec![ad(&basis[0]), ad(&basis[1]), ad(&basis[2])];
            let coweight = [[1, 0, 0], [0, 0, 0], [0, 0, -1]];
            let y = ad(&coweight);
            Some(LieModule::new(algebra, actions, Some(y)).expect("adjoint module is valid"))
        }
        _ => None,
    }
}

fn a2_reflect(i: usize, v: (i64, i64)) -> (i64, i64) {
    if i == 0 {
        (-v.0, v.0 + v.1)
    } else {
        (v.0 + v.1, -v.1)
    }
}

fn a2_apply(word: &[usize], v: (i64, i64)) -> (i64, i64) {
    // leftmost letter acts last
    word.iter().rev().fold(v, |acc, &i| a2_reflect(i, acc))
}

/// Check the cohomology of the nilradical module against reflection data:
/// the dimension in each degree counts reflections of that length, and the
/// weights are the shifted orbit of the highest weight, evaluated on the
/// half-sum coweight.
pub fn kostant_check(system: RootSystem, lambda: &[i64]) -> Result<KostantReport, LieError> {
    let (cohomology, expected_dims, expected_weights) = match system {
        RootSystem::A1 => {
            if lambda.len() != 1 || lambda[0] < 0 {
                return Err(LieError::Shape(
                    "rank-one check needs a single nonnegative weight".into(),
                ));
            }
            let m = lambda[0];
            let (algebra, module) = sym_power(m as usize);
            let cohomology = lie_cohomology(&algebra, &module)?;
            let expected_weights = vec![
                BTreeMap::from([(m, 1)]),
                BTreeMap::from([(-m - 2, 1)]),
            ];
            (cohomology, vec![1, 1], expected_weights)
        }
        RootSystem::A2 => {
            if lambda.len() != 2 {
                return Err(LieError::Shape("rank-two check needs two coordinates".into()));
            }
            let algebra = rank_two_nilradical();
            let module = rank_two_module(&algebra, [lambda[0], lambda[1]]).ok_or_else(|| {
                LieError::Shape(
                    "rank-two check supports the trivial, standard, dual, and adjoint modules"
                        .into(),
                )
            })?;
            let cohomology = lie_cohomology(&algebra, &module)?;
            let words: [(usize, &[usize]); 6] = [
                (0, &[]),
                (1, &[0]),
                (1, &[1]),
                (2, &[0, 1]),
                (2, &[1, 0]),
                (3, &[0, 1, 0]),
            ];
            let shifted = (lambda[0] + 1, lambda[1] + 1);
            let mut expected_dims = vec![0usize; 4];
            let mut expected_weights = vec![BTreeMap::new(); 4];
            for (len, word) in words {
                let moved = a2_apply(word, shifted);
                let dotted = (moved.0 - 1, moved.1 - 1);
                let eval = dotted.0 + dotted.1;
                expected_dims[len] += 1;
                *expected_weights[len].entry(eval).or_insert(0) += 1;
            }
            (cohomology, expected_dims, expected_weights)
        }
    };
    let dims = cohomology.dims();
    let weights = cohomology
        .weights
        .clone()
        .expect("graded fixtures split by weight");
    let passed = dims == expected_dims && weights == expected_weights;
    Ok(KostantReport { passed, dims, expected_dims, weights, expected_weights })
}

/// Outcome of comparing Lie algebra cohomology with the cohomology of the
/// exponentiated lattice.
#[derive(Clone, Debug)]
pub struct LatticeLieReport {
    pub passed: bool,
    pub lie_dims: Vec<usize>,
    pub lattice_dims: Vec<usize>,
}

fn exponentials(module: &LieModule) -> Result<Vec<RatMatrix>, LieError> {
    let d = module.dim();
    let mut out = Vec::new();
    for (i, a) in module.actions().iter().enumerate() {
        if !a.pow(d).is_zero() {
            return Err(LieError::NotUnipotent { generator: i });
        }
        out.push(nilpotent_exp(a));
    }
    Ok(out)
}

fn is_two_step_normal_form(algebra: &NilpotentLieAlgebra) -> bool {
    if algebra.dim() != 3 {
        return false;
    }
    let b01 = algebra.bracket(0, 1);
    let unit = b01[0].is_zero() && b01[1].is_zero() && b01[2].is_one();
    let central = algebra.bracket(0, 2).iter().all(|x| x.is_zero())
        && algebra.bracket(1, 2).iter().all(|x| x.is_zero());
    unit && central
}

/// Compare the cohomology of a module with the group cohomology of the
/// lattice obtained by exponentiating each action matrix. Supported shapes
/// are commutative algebras, which exponentiate to a free abelian lattice,
/// and the three-dimensional two-step algebra with [x0, x1] = x2, whose
/// exponentials satisfy the discrete relations exactly.
pub fn lattice_vs_lie_check(
    algebra: &NilpotentLieAlgebra,
    module: &LieModule,
) -> Result<LatticeLieReport, LieError> {
    let lie = lie_cohomology(algebra, module)?;
    let lie_dims = lie.dims();
    let exps = exponentials(module)?;
    let (group, resolution) = if algebra.is_abelian() {
        (Group::FreeAbelian(algebra.dim()), koszul_resolution(algebra.dim()))
    } else if is_two_step_normal_form(algebra) {
        (Group::Heisenberg, heisenberg_resolution())
    } else {
        return Err(LieError::Shape(
            "lattice comparison supports commutative algebras and the two-step normal form"
                .into(),
        ));
    };
    let action = GroupAction::new(group, exps)?;
    let lattice_dims = cohomology_of_group(&resolution, &action)?.dims();
    let passed = lie_dims == lattice_dims;
    Ok(LatticeLieReport { passed, lie_dims, lattice_dims })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor_pair_module() -> (NilpotentLieAlgebra, LieModule) {
        let algebra = NilpotentLieAlgebra::abelian_graded(&[-2, -2]);
        let lower = RatMatrix::from_i64(&[&[0, 0], &[1, 0]]);
        let id = RatMatrix::identity(2);
        let y2 = RatMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        let x1 = lower.kronecker(&id);
        let x2 = id.kronecker(&lower);
        let y = y2.kronecker(&id).add(&id.kronecker(&y2));
        let module = LieModule::new(&algebra, vec![x1, x2], Some(y)).expect("tensor module");
        (algebra, module)
    }

    #[test]
    fn abelian_trivial_counts_subsets() {
        for n in 1..=4 {
            let algebra = NilpotentLieAlgebra::abelian(n);
            let module = LieModule::trivial(&algebra);
            let dims = lie_cohomology(&algebra, &module).unwrap().dims();
            let expected: Vec<usize> = (0..=n).map(|q| binomial(n, q)).collect();
            assert_eq!(dims, expected);
        }
    }

    #[test]
    fn two_step_trivial_has_classical_betti_numbers() {
        let algebra = NilpotentLieAlgebra::heisenberg();
        let module = LieModule::trivial(&algebra);
        let cohomology = lie_cohomology(&algebra, &module).unwrap();
        assert_eq!(cohomology.dims(), vec![1, 2, 2, 1]);
        assert_eq!(cohomology.complex.euler_characteristic(), 0);
        assert!(cohomology.weights.is_none());
    }

    #[test]
    fn raising_action_pins_edge_weights() {
        let (algebra, module) = sym_power(3);
        let cohomology = lie_cohomology(&algebra, &module).unwrap();
        assert_eq!(cohomology.dims(), vec![1, 1]);
        let weights = cohomology.weights.unwrap();
        assert_eq!(weights[0], BTreeMap::from([(3, 1)]));
        assert_eq!(weights[1], BTreeMap::from([(-5, 1)]));
    }

    #[test]
    fn tensor_pair_splits_with_kuenneth_dims() {
        let (algebra, module) = tensor_pair_module();
        let cohomology = lie_cohomology(&algebra, &module).unwrap();
        assert_eq!(cohomology.dims(), vec![1, 2, 1]);
        assert_eq!(cohomology.complex.euler_characteristic(), 0);
        let weights = cohomology.weights.unwrap();
        assert_eq!(weights[0], BTreeMap::from([(-2, 1)]));
        assert_eq!(weights[1], BTreeMap::from([(2, 2)]));
        assert_eq!(weights[2], BTreeMap::from([(6, 1)]));
    }

    #[test]
    fn split_complex_route_agrees_with_transport() {
        for fixture in [tensor_pair_module(), sym_power(4)] {
            let (algebra, module) = fixture;
            let cohomology = lie_cohomology(&algebra, &module).unwrap();
            let transported = cohomology.weights.unwrap();
            let split = weight_split_dims(&algebra, &module).unwrap();
            let degrees = algebra.dim() + 1;
            for (w, dims) in &split {
                for q in 0..degrees {
                    let from_transport = transported[q].get(w).copied().unwrap_or(0);
                    assert_eq!(dims[q], from_transport, "weight {w} degree {q}");
                }
            }
            // every transported weight appears in the split route too
            for (q, level) in transported.iter().enumerate() {
                for (w, mult) in level {
                    assert_eq!(split[w][q], *mult);
                }
            }
        }
    }

    #[test]
    fn weights_partition_dims_and_stay_in_cochain_range() {
        let algebra = rank_two_nilradical();
        let module = rank_two_module(&algebra, [1, 0]).unwrap();
        let cohomology = lie_cohomology(&algebra, &module).unwrap();
        let weights = cohomology.weights.unwrap();
        let alg_weights = algebra.grading().unwrap();
        let eigenvalues = module.grading_eigenvalues().unwrap();
        for (q, piece) in cohomology.pieces.iter().enumerate() {
            let total: usize = weights[q].values().sum();
            assert_eq!(total, piece.dim);
            let mut cochain: BTreeSet<i64> = BTreeSet::new();
            for subset in subsets_of_size(algebra.dim(), q) {
                for mu in eigenvalues {
                    cochain.insert(mu - subset_weight(alg_weights, &subset));
                }
            }
            for w in weights[q].keys() {
                assert!(cochain.contains(w), "weight {w} escapes the cochain range");
            }
        }
    }

    #[test]
    fn rank_one_check_passes_small_weights() {
        for m in 0..=6 {
            let report = kostant_check(RootSystem::A1, &[m]).unwrap();
            assert!(report.passed, "weight {m}: {:?} vs {:?}", report.weights, report.expected_weights);
        }
    }

    #[test]
    fn rank_two_check_passes_small_modules() {
        for lambda in [[0, 0], [1, 0], [0, 1], [1, 1]] {
            let report = kostant_check(RootSystem::A2, &lambda).unwrap();
            assert_eq!(report.dims, vec![1, 2, 2, 1]);
            assert!(
                report.passed,
                "weight {lambda:?}: {:?} vs {:?}",
                report.weights, report.expected_weights
            );
        }
    }

    #[test]
    fn rank_two_trivial_weights_follow_the_shifted_orbit() {
        let report = kostant_check(RootSystem::A2, &[0, 0]).unwrap();
        let expected = vec![
            BTreeMap::from([(0, 1)]),
            BTreeMap::from([(-1, 2)]),
            BTreeMap::from([(-3, 2)]),
            BTreeMap::from([(-4, 1)]),
        ];
        assert_eq!(report.weights, expected);
    }

    #[test]
    fn rank_two_check_rejects_unknown_modules() {
        let err = kostant_check(RootSystem::A2, &[2, 0]).unwrap_err();
        assert!(matches!(err, LieError::Shape(_)));
    }

    #[test]
    fn lattice_comparison_matches_abelian_shapes() {
        let algebra = NilpotentLieAlgebra::abelian(2);
        let trivial = LieModule::trivial(&algebra);
        let report = lattice_vs_lie_check(&algebra, &trivial).unwrap();
        assert!(report.passed);
        assert_eq!(report.lie_dims, vec![1, 2, 1]);

        let (graded_algebra, tensor) = tensor_pair_module();
        let report = lattice_vs_lie_check(&graded_algebra, &tensor).unwrap();
        assert!(report.passed);
        assert_eq!(report.lattice_dims, vec![1, 2, 1]);
    }

    #[test]
    fn lattice_comparison_matches_two_step_trivial() {
        let algebra = NilpotentLieAlgebra::heisenberg();
        let module = LieModule::trivial(&algebra);
        let report = lattice_vs_lie_check(&algebra, &module).unwrap();
        assert!(report.passed);
        assert_eq!(report.lie_dims, vec![1, 2, 2, 1]);
    }

    #[test]
    fn lattice_comparison_rejects_non_nilpotent_actions() {
        let algebra = NilpotentLieAlgebra::abelian(1);
        let module =
            LieModule::new(&algebra, vec![RatMatrix::identity(1)], None).unwrap();
        let err = lattice_vs_lie_check(&algebra, &module).unwrap_err();
        assert_eq!(err, LieError::NotUnipotent { generator: 0 });
    }

    #[test]
    fn constructor_rejects_broken_tables() {
        // bracket violating antisymmetry on the diagonal
        let mut bad = vec![vec![vec![Rat::zero(); 2]; 2]; 2];
        bad[0][0][1] = Rat::one();
        assert_eq!(
            NilpotentLieAlgebra::new(bad, None).unwrap_err(),
            LieError::NotAntisymmetric { i: 0, j: 0 }
        );

        // solvable but not nilpotent: [x0, x1] = x1
        let mut solvable = vec![vec![vec![Rat::zero(); 2]; 2]; 2];
        solvable[0][1][1] = Rat::one();
        solvable[1][0][1] = -Rat::one();
        assert_eq!(NilpotentLieAlgebra::new(solvable, None).unwrap_err(), LieError::NotNilpotent);

        // graded table whose bracket lands in the wrong weight
        let mut bracket = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
        bracket[0][1][2] = Rat::one();
        bracket[1][0][2] = -Rat::one();
        assert_eq!(
            NilpotentLieAlgebra::new(bracket, Some(vec![1, 1, 3])).unwrap_err(),
            LieError::GradingBracket { i: 0, j: 1 }
        );
    }

    #[test]
    fn module_constructor_rejects_broken_actions() {
        let algebra = NilpotentLieAlgebra::heisenberg();
        // commutator of the first two actions must equal the third
        let bad = vec![
            RatMatrix::from_i64(&[&[0, 1], &[0, 0]]),
            RatMatrix::from_i64(&[&[0, 0], &[1, 0]]),
            RatMatrix::zero(2, 2),
        ];
        assert_eq!(
            LieModule::new(&algebra, bad, None).unwrap_err(),
            LieError::NotHomomorphism { i: 0, j: 1 }
        );

        // grading operator must shift the action by the generator weight
        let graded = NilpotentLieAlgebra::abelian_graded(&[2]);
        let e = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let wrong_y = RatMatrix::identity(2);
        assert_eq!(
            LieModule::new(&graded, vec![e.clone()], Some(wrong_y)).unwrap_err(),
            LieError::GradingAction { generator: 0 }
        );

        // grading operator must be semisimple over the integers
        let nilpotent_y = RatMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(
            LieModule::new(&graded, vec![RatMatrix::zero(2, 2)], Some(nilpotent_y)).unwrap_err(),
            LieError::NotSemisimple
        );
    }

    #[test]
    fn euler_characteristic_vanishes_for_positive_dimension() {
        let fixtures = [
            (NilpotentLieAlgebra::abelian(3), None),
            (NilpotentLieAlgebra::heisenberg(), None),
            (rank_two_nilradical(), Some([1, 1])),
        ];
        for (algebra, lambda) in fixtures {
            let module = match lambda {
                Some(l) => rank_two_module(&algebra, l).unwrap(),
                None => LieModule::trivial(&algebra),
            };
            let cohomology = lie_cohomology(&algebra, &module).unwrap();
            assert_eq!(cohomology.complex.euler_characteristic(), 0);
        }
    }
}
