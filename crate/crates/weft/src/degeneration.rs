//! Boundary degeneration tables assembled end to end: cohomology of a
//! nilpotent fiber algebra, a lattice action transported to representatives
//! and split by weight, then lattice cohomology per weight block. The table
//! E^{p,q} carries dimensions and weight multisets, totals collect the
//! antidiagonals after a codimension shift, and three checkers confirm the
//! splitting, the weight commutation, and the factor containment that make
//! the assembly trustworthy.

use std::collections::BTreeMap;
use std::fmt;

use crate::fan::{cech_chain_complex, PeriodicFan2D};
use crate::groupcoh::{cohomology_of_group, FreeResolution, Group, GroupAction, GroupError};
use crate::liecoh::{
    lie_cohomology, subsets_of_size, LieError, LieModule, NilpotentLieAlgebra,
};
use crate::linalg::{
    induced_on_cohomology, qi, ChainComplex, CohomologyPiece, Rat, RatMatrix,
};
use num::Zero;

#[derive(Clone, Debug, PartialEq)]
pub enum DegenerationError {
    Shape(String),
    UngradedModule,
    TwistNotAutomorphism { generator: usize },
    NotNormalizing { generator: usize, basis: usize },
    GradingNotCentral { generator: usize },
    WeightSplitRefused,
    EquivarianceViolation { degree: i64 },
    Lie(LieError),
    Group(GroupError),
}

impl fmt::Display for DegenerationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegenerationError::Shape(msg) => write!(f, "shape error: {msg}"),
            DegenerationError::UngradedModule => {
                write!(f, "the fiber module needs a grading operator")
            }
            DegenerationError::TwistNotAutomorphism { generator } => {
                write!(f, "twist {generator} is not a graded algebra automorphism")
            }
            DegenerationError::NotNormalizing { generator, basis } => write!(
                f,
                "generator {generator} conjugates the action of basis vector {basis} outside the declared twist"
            ),
            DegenerationError::GradingNotCentral { generator } => {
                write!(f, "generator {generator} does not commute with the grading")
            }
            DegenerationError::WeightSplitRefused => {
                write!(f, "fiber cohomology did not split into integer weights")
            }
            DegenerationError::EquivarianceViolation { degree } => write!(
                f,
                "lattice action fails to descend to cohomology in degree {degree}"
            ),
            DegenerationError::Lie(e) => write!(f, "{e}"),
            DegenerationError::Group(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DegenerationError {}

impl From<LieError> for DegenerationError {
    fn from(e: LieError) -> Self {
        DegenerationError::Lie(e)
    }
}

impl From<GroupError> for DegenerationError {
    fn from(e: GroupError) -> Self {
        DegenerationError::Group(e)
    }
}

/// One table slot: a dimension and the weight multiset that fills it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TableCell {
    pub dim: usize,
    pub weights: BTreeMap<i64, usize>,
}

impl TableCell {
    fn absorb(&mut self, weight: i64, multiplicity: usize) {
        if multiplicity == 0 {
            return;
        }
        self.dim += multiplicity;
        *self.weights.entry(weight).or_insert(0) += multiplicity;
    }

    fn merge(&mut self, other: &TableCell) {
        self.dim += other.dim;
        for (&k, &m) in &other.weights {
            *self.weights.entry(k).or_insert(0) += m;
        }
    }

    fn consistent(&self) -> bool {
        self.weights.values().sum::<usize>() == self.dim
    }
}

/// Two-parameter table of lattice cohomology of fiber cohomology, with
/// totals along p + q = n + codimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerationTable {
    pub entries: BTreeMap<(usize, usize), TableCell>,
    pub totals: BTreeMap<i64, TableCell>,
    pub codimension: i64,
}

impl DegenerationTable {
    fn assemble(
        entries: BTreeMap<(usize, usize), TableCell>,
        codimension: i64,
    ) -> DegenerationTable {
        assert!(
            entries.values().all(TableCell::consistent),
            "weight multisets must fill cell dimensions"
        );
        let mut totals: BTreeMap<i64, TableCell> = BTreeMap::new();
        for (&(p, q), cell) in &entries {
            let n = p as i64 + q as i64 - codimension;
            totals.entry(n).or_default().merge(cell);
        }
        DegenerationTable { entries, totals, codimension }
    }

    pub fn entry(&self, p: usize, q: usize) -> Option<&TableCell> {
        self.entries.get(&(p, q))
    }

    pub fn total(&self, n: i64) -> Option<&TableCell> {
        self.totals.get(&n)
    }
}

/// Inputs of the boundary pipeline: a graded nilpotent fiber algebra, a
/// graded module carrying both the algebra action and a lattice action, the
/// declared twist of the algebra under each lattice generator, a free
/// resolution for the lattice, and the codimension shift.
#[derive(Clone, Debug)]
pub struct BoundaryDatum {
    w1: NilpotentLieAlgebra,
    module: LieModule,
    hc: GroupAction,
    twists: Vec<RatMatrix>,
    resolution: FreeResolution,
    codimension: i64,
}

impl BoundaryDatum {
    pub fn new(
        w1: NilpotentLieAlgebra,
        module: LieModule,
        hc: GroupAction,
        twists: Vec<RatMatrix>,
        resolution: FreeResolution,
        codimension: i64,
    ) -> Result<Self, DegenerationError> {
        if module.actions().len() != w1.dim() {
            return Err(DegenerationError::Shape(
                "module must act for every algebra basis vector".into(),
            ));
        }
        let grading = module.grading().ok_or(DegenerationError::UngradedModule)?;
        if hc.dim() != module.dim() {
            return Err(DegenerationError::Shape(
                "lattice generators must act on the module space".into(),
            ));
        }
        if hc.group() != resolution.group() {
            return Err(DegenerationError::Shape(
                "resolution and lattice action must share a group".into(),
            ));
        }
        if twists.len() != hc.generators().len() {
            return Err(DegenerationError::Shape(
                "one algebra twist per lattice generator".into(),
            ));
        }
        let n = w1.dim();
        let weights = w1.grading().ok_or_else(|| {
            DegenerationError::Shape("the fiber algebra needs a grading".into())
        })?;
        for (g, u) in twists.iter().enumerate() {
            if u.rows() != n || u.cols() != n || !u.is_invertible() {
                return Err(DegenerationError::TwistNotAutomorphism { generator: g });
            }
            // graded: nonzero entries only between equal-weight basis vectors
            for a in 0..n {
                for i in 0..n {
                    if !u[(a, i)].is_zero() && weights[a] != weights[i] {
                        return Err(DegenerationError::TwistNotAutomorphism { generator: g });
                    }
                }
            }
            // bracket preservation: u[x_i, x_j] = [u x_i, u x_j]
            for i in 0..n {
                for j in 0..n {
                    let lhs = u.apply(w1.bracket(i, j));
                    let mut rhs = vec![Rat::zero(); n];
                    for a in 0..n {
                        for b in 0..n {
                            let coeff = &u[(a, i)] * &u[(b, j)];
                            if coeff.is_zero() {
                                continue;
                            }
                            for (t, c) in w1.bracket(a, b).iter().enumerate() {
                                rhs[t] += &coeff * c;
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(DegenerationError::TwistNotAutomorphism { generator: g });
                    }
                }
            }
        }
        for (g, t) in hc.generators().iter().enumerate() {
            let t_inv = t.inverse();
            // conjugation realizes the twist on the algebra action
            for i in 0..n {
                let conjugated = t.mul(module.action(i)).mul(&t_inv);
                let mut expected = RatMatrix::zero(module.dim(), module.dim());
                for k in 0..n {
                    let coeff = &twists[g][(k, i)];
                    if !coeff.is_zero() {
                        expected = expected.add(&module.action(k).scale(coeff));
                    }
                }
                if conjugated != expected {
                    return Err(DegenerationError::NotNormalizing { generator: g, basis: i });
                }
            }
            if t.mul(grading) != grading.mul(t) {
                return Err(DegenerationError::GradingNotCentral { generator: g });
            }
        }
        Ok(BoundaryDatum { w1, module, hc, twists, resolution, codimension })
    }

    pub fn fiber_algebra(&self) -> &NilpotentLieAlgebra {
        &self.w1
    }

    pub fn module(&self) -> &LieModule {
        &self.module
    }

    pub fn lattice_action(&self) -> &GroupAction {
        &self.hc
    }

    pub fn twists(&self) -> &[RatMatrix] {
        &self.twists
    }

    pub fn resolution(&self) -> &FreeResolution {
        &self.resolution
    }

    pub fn codimension(&self) -> i64 {
        self.codimension
    }

    /// Same datum with a different shift.
    pub fn with_codimension(&self, codimension: i64) -> Self {
        let mut out = self.clone();
        out.codimension = codimension;
        out
    }

    /// Same datum computing through another resolution of the same group.
    pub fn with_resolution(&self, resolution: FreeResolution) -> Result<Self, DegenerationError> {
        if resolution.group() != self.hc.group() {
            return Err(DegenerationError::Shape(
                "resolution and lattice action must share a group".into(),
            ));
        }
        let mut out = self.clone();
        out.resolution = resolution;
        Ok(out)
    }
}

// determinant by Laplace expansion; the minors here are at most the fiber
// algebra dimension on a side
fn small_det(m: &RatMatrix) -> Rat {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 0 {
        return qi(1);
    }
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut out = Rat::zero();
    for c in 0..n {
        if m[(0, c)].is_zero() {
            continue;
        }
        let mut sub = Vec::new();
        for r in 1..n {
            let mut row = Vec::new();
            for cc in 0..n {
                if cc != c {
                    row.push(m[(r, cc)].clone());
                }
            }
            sub.push(row);
        }
        let cofactor = small_det(&RatMatrix::from_rows(sub));
        let term = &m[(0, c)] * &cofactor;
        if c % 2 == 0 {
            out += term;
        } else {
            out -= term;
        }
    }
    out
}

fn minor(m: &RatMatrix, rows: &[usize], cols: &[usize]) -> Rat {
    let entries: Vec<Rat> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| m[(r, c)].clone()))
        .collect();
    small_det(&RatMatrix::from_entries(rows.len(), cols.len(), entries))
}

// action of one lattice generator on degree-q cochains: the twist inverse
// acts on argument slots, so its exterior minors weight the subset blocks
// while the generator matrix acts on values
fn cochain_operator(
    algebra_dim: usize,
    module_dim: usize,
    generator: &RatMatrix,
    twist: &RatMatrix,
    q: usize,
) -> RatMatrix {
    let subsets = subsets_of_size(algebra_dim, q);
    let u_inv = twist.inverse();
    let d = module_dim;
    let size = subsets.len() * d;
    let mut out = RatMatrix::zero(size, size);
    for (si, s) in subsets.iter().enumerate() {
        for (ti, t) in subsets.iter().enumerate() {
            let scale = minor(&u_inv, s, t);
            if scale.is_zero() {
                continue;
            }
            for r in 0..d {
                for c in 0..d {
                    let v = &generator[(r, c)];
                    if !v.is_zero() {
                        out[(ti * d + r, si * d + c)] = &scale * v;
                    }
                }
            }
        }
    }
    out
}

// grading operator on degree-q cochains: module grading minus the subset
// weight on each block
fn cochain_grading(
    algebra_weights: &[i64],
    grading: &RatMatrix,
    q: usize,
) -> RatMatrix {
    let subsets = subsets_of_size(algebra_weights.len(), q);
    let d = grading.rows();
    let size = subsets.len() * d;
    let mut out = RatMatrix::zero(size, size);
    for (si, s) in subsets.iter().enumerate() {
        let shift: i64 = s.iter().map(|&i| algebra_weights[i]).sum();
        for r in 0..d {
            for c in 0..d {
                let mut v = grading[(r, c)].clone();
                if r == c {
                    v -= qi(shift);
                }
                out[(si * d + r, si * d + c)] = v;
            }
        }
    }
    out
}

// transport a differential-commuting operator to a cohomology piece and
// confirm the answer is independent of the chosen representative lift
fn transport_to_piece(
    complex: &ChainComplex,
    piece: &CohomologyPiece,
    operator: &RatMatrix,
) -> Result<RatMatrix, DegenerationError> {
    let first = induced_on_cohomology(complex, piece, operator)
        .ok_or(DegenerationError::EquivarianceViolation { degree: piece.degree })?;
    if piece.dim > 0 {
        if let Some(incoming) = complex.map_at(piece.degree - 1) {
            let image = incoming.image();
            if image.dim() > 0 {
                let mut rows = Vec::new();
                for r in 0..piece.dim {
                    let mut row = piece.representatives.row(r);
                    let boundary = image.basis().row(r % image.dim());
                    for (slot, b) in row.iter_mut().zip(boundary.iter()) {
                        *slot += b;
                    }
                    rows.push(row);
                }
                let shifted = CohomologyPiece {
                    degree: piece.degree,
                    dim: piece.dim,
                    representatives: RatMatrix::from_rows(rows),
                };
                let second = induced_on_cohomology(complex, &shifted, operator)
                    .ok_or(DegenerationError::EquivarianceViolation { degree: piece.degree })?;
                assert_eq!(
                    first, second,
                    "transported operator must not depend on the representative lift"
                );
            }
        }
    }
    Ok(first)
}

// lattice generators and grading carried down to one fiber cohomology piece
struct TransportedPiece {
    dim: usize,
    generators: Vec<RatMatrix>,
    grading: RatMatrix,
}

fn transport_stage(d: &BoundaryDatum) -> Result<Vec<TransportedPiece>, DegenerationError> {
    let lie = lie_cohomology(&d.w1, &d.module)?;
    if lie.weights.is_none() {
        return Err(DegenerationError::WeightSplitRefused);
    }
    let n = d.w1.dim();
    let algebra_weights = d.w1.grading().expect("validated at construction");
    let module_grading = d.module.grading().expect("validated at construction");
    let mut out = Vec::new();
    for piece in &lie.pieces {
        let q = piece.degree as usize;
        let mut generators = Vec::new();
        for (g, t) in d.hc.generators().iter().enumerate() {
            let op = cochain_operator(n, d.module.dim(), t, &d.twists[g], q);
            // descent condition: the cochain operator must chain-commute
            if let Some(dn) = lie.complex.map_at(piece.degree) {
                let next =
                    cochain_operator(n, d.module.dim(), t, &d.twists[g], q + 1);
                if dn.mul(&op) != next.mul(dn) {
                    return Err(DegenerationError::EquivarianceViolation {
                        degree: piece.degree,
                    });
                }
            }
            let y = cochain_grading(algebra_weights, module_grading, q);
            assert!(
                op.mul(&y) == y.mul(&op),
                "graded twists keep the cochain grading central"
            );
            generators.push(transport_to_piece(&lie.complex, piece, &op)?);
        }
        let y = cochain_grading(algebra_weights, module_grading, q);
        let grading = transport_to_piece(&lie.complex, piece, &y)?;
        for g in &generators {
            assert!(
                g.mul(&grading) == grading.mul(g),
                "transport preserves commutation with the grading"
            );
        }
        out.push(TransportedPiece { dim: piece.dim, generators, grading });
    }
    Ok(out)
}

// integer eigenvalues exhausting the space, with their eigenbases
fn eigen_split(y: &RatMatrix) -> Option<Vec<(i64, RatMatrix)>> {
    let h = y.rows();
    if h == 0 {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let mut total = 0usize;
    for k in -crate::liecoh::EIGENVALUE_WINDOW..=crate::liecoh::EIGENVALUE_WINDOW {
        let space = y.sub(&RatMatrix::identity(h).scale(&qi(k))).kernel();
        if space.dim() > 0 {
            total += space.dim();
            out.push((k, space.basis().clone()));
        }
    }
    if total == h {
        Some(out)
    } else {
        None
    }
}

// restriction of an operator to an invariant row-span basis
fn restrict_to_span(basis: &RatMatrix, operator: &RatMatrix) -> Option<RatMatrix> {
    let span = basis.transpose();
    let moved = operator.mul(&span);
    span.solve_matrix(&moved)
}

// group action on a module of known size; the trivial group has no
// generators to infer the size from
fn action_on(
    group: &Group,
    dim: usize,
    generators: Vec<RatMatrix>,
) -> Result<GroupAction, GroupError> {
    if generators.is_empty() {
        Ok(GroupAction::trivial(dim))
    } else {
        GroupAction::new(group.clone(), generators)
    }
}

/// Run the pipeline: fiber cohomology, transported lattice action split by
/// weight, lattice cohomology per weight block, and the shifted totals.
pub fn degenerate(d: &BoundaryDatum) -> Result<DegenerationTable, DegenerationError> {
    let stage = transport_stage(d)?;
    let mut entries: BTreeMap<(usize, usize), TableCell> = BTreeMap::new();
    for p in 0..=d.resolution.length() {
        for q in 0..stage.len() {
            entries.insert((p, q), TableCell::default());
        }
    }
    for (q, piece) in stage.iter().enumerate() {
        if piece.dim == 0 {
            continue;
        }
        let blocks = eigen_split(&piece.grading)
            .ok_or(DegenerationError::WeightSplitRefused)?;
        for (weight, basis) in blocks {
            let restricted: Vec<RatMatrix> = piece
                .generators
                .iter()
                .map(|g| {
                    restrict_to_span(&basis, g)
                        .expect("generators commute with the grading, so blocks are invariant")
                })
                .collect();
            let action = action_on(d.hc.group(), basis.rows(), restricted)?;
            let gc = cohomology_of_group(&d.resolution, &action)?;
            for (p, dim) in gc.dims().into_iter().enumerate() {
                entries
                    .get_mut(&(p, q))
                    .expect("table initialized over all slots")
                    .absorb(weight, dim);
            }
        }
    }
    Ok(DegenerationTable::assemble(entries, d.codimension))
}

/// Splitting verdict: the totals must be the sums of their antidiagonals,
/// and an independently computed total can be matched degree by degree.
#[derive(Clone, Debug)]
pub struct SplittingReport {
    pub sum_identity: bool,
    /// (total degree, table dimension, supplied dimension) per compared slot
    pub comparison: Vec<(i64, usize, usize)>,
    pub passed: bool,
}

/// The independent total, when given, lists dims of the unshifted composite
/// starting at degree zero; slot m is compared against the table total at
/// m - codimension.
pub fn check_splitting(
    table: &DegenerationTable,
    independent_total: Option<&[usize]>,
) -> SplittingReport {
    let mut recomputed: BTreeMap<i64, TableCell> = BTreeMap::new();
    for (&(p, q), cell) in &table.entries {
        let n = p as i64 + q as i64 - table.codimension;
        recomputed.entry(n).or_default().merge(cell);
    }
    let sum_identity = recomputed == table.totals;
    let mut comparison = Vec::new();
    let mut matched = true;
    if let Some(supplied) = independent_total {
        let top = supplied.len() as i64 - table.codimension;
        let low = -table.codimension;
        for n in low..top.max(
            table.totals.keys().next_back().map_or(low, |k| k + 1),
        ) {
            let here = table.total(n).map_or(0, |c| c.dim);
            let m = n + table.codimension;
            let there = if m >= 0 { supplied.get(m as usize).copied().unwrap_or(0) } else { 0 };
            comparison.push((n, here, there));
            if here != there {
                matched = false;
            }
        }
    }
    SplittingReport { sum_identity, comparison, passed: sum_identity && matched }
}

/// Per-cell verdicts for weight commutation: computing lattice cohomology
/// before or after the weight split must give the same graded dimensions.
#[derive(Clone, Debug)]
pub struct WeightCommutationReport {
    pub cells: Vec<((usize, usize), bool)>,
    pub passed: bool,
}

pub fn check_weight_commutation(
    d: &BoundaryDatum,
) -> Result<WeightCommutationReport, DegenerationError> {
    let split_table = degenerate(d)?;
    let stage = transport_stage(d)?;
    let mut cells = Vec::new();
    let mut passed = true;
    for (q, piece) in stage.iter().enumerate() {
        // unsplit route: lattice cohomology of the whole fiber piece, then
        // the grading transported onto it
        let mut graded_dims: Vec<BTreeMap<i64, usize>> =
            vec![BTreeMap::new(); d.resolution.length() + 1];
        if piece.dim > 0 {
            let action = action_on(d.hc.group(), piece.dim, piece.generators.clone())?;
            let gc = cohomology_of_group(&d.resolution, &action)?;
            let ranks = d.resolution.ranks();
            for (p, group_piece) in gc.pieces.iter().enumerate() {
                if group_piece.dim == 0 {
                    continue;
                }
                // grading acts slotwise on the lattice cochains
                let mut y_cochain = piece.grading.clone();
                for _ in 1..ranks[p] {
                    y_cochain = y_cochain.direct_sum(&piece.grading);
                }
                if let Some(dmap) = gc.complex.map_at(group_piece.degree) {
                    let mut y_next = piece.grading.clone();
                    for _ in 1..ranks[p + 1] {
                        y_next = y_next.direct_sum(&piece.grading);
                    }
                    assert!(
                        dmap.mul(&y_cochain) == y_next.mul(dmap),
                        "grading commutes with the lattice differential"
                    );
                }
                let y_p = transport_to_piece(&gc.complex, group_piece, &y_cochain)?;
                let blocks =
                    eigen_split(&y_p).ok_or(DegenerationError::WeightSplitRefused)?;
                for (k, basis) in blocks {
                    *graded_dims[p].entry(k).or_insert(0) += basis.rows();
                }
            }
        }
        for (p, unsplit) in graded_dims.iter().enumerate() {
            let split = split_table
                .entry(p, q)
                .map(|c| c.weights.clone())
                .unwrap_or_default();
            let ok = *unsplit == split;
            if !ok {
                passed = false;
            }
            cells.push(((p, q), ok));
        }
    }
    Ok(WeightCommutationReport { cells, passed })
}

/// Per-cell verdicts for factor containment: every weight of E^{p,q} must
/// occur in the fiber cohomology H^q with at least that multiplicity.
#[derive(Clone, Debug)]
pub struct FactorContainmentReport {
    pub cells: Vec<((usize, usize), bool)>,
    pub passed: bool,
}

pub fn check_factor_containment(
    d: &BoundaryDatum,
) -> Result<FactorContainmentReport, DegenerationError> {
    let table = degenerate(d)?;
    let lie = lie_cohomology(&d.w1, &d.module)?;
    let fiber_weights = lie.weights.ok_or(DegenerationError::WeightSplitRefused)?;
    let mut cells = Vec::new();
    let mut passed = true;
    for (&(p, q), cell) in &table.entries {
        let fiber = fiber_weights.get(q).cloned().unwrap_or_default();
        let ok = cell
            .weights
            .iter()
            .all(|(k, &m)| fiber.get(k).copied().unwrap_or(0) >= m);
        if !ok {
            passed = false;
        }
        cells.push(((p, q), ok));
    }
    Ok(FactorContainmentReport { cells, passed })
}

/// Canned rank-one boundary datum: a two-dimensional abelian fiber algebra
/// acting as the pair of lowering operators on a four-dimensional tensor
/// square, the lattice acting by the factor swap, and the flagship periodic
/// fan supplying the resolution.
///
/// The fan's own period transfer cannot act here: conjugation permutes the
/// square-zero directions of the fiber action, so only monomial twists are
/// realizable on this module, and the swap is the canonical nontrivial one.
pub fn hilbert_example() -> BoundaryDatum {
    let w1 = NilpotentLieAlgebra::abelian_graded(&[-2, -2]);
    let lower = RatMatrix::from_i64(&[&[0, 0], &[1, 0]]);
    let eye = RatMatrix::identity(2);
    let x1 = lower.kronecker(&eye);
    let x2 = eye.kronecker(&lower);
    let semi = RatMatrix::from_i64(&[&[1, 0], &[0, -1]]);
    let y = semi.kronecker(&eye).add(&eye.kronecker(&semi));
    let module =
        LieModule::new(&w1, vec![x1, x2], Some(y)).expect("the tensor square is a module");
    let swap = RatMatrix::from_i64(&[
        &[1, 0, 0, 0],
        &[0, 0, 1, 0],
        &[0, 1, 0, 0],
        &[0, 0, 0, 1],
    ]);
    let hc = GroupAction::new(Group::FreeAbelian(1), vec![swap])
        .expect("the factor swap is invertible");
    let twist = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
    let fan = PeriodicFan2D::standard(3).expect("the flagship fan is well formed");
    let report = cech_chain_complex(&fan).expect("the flagship fan certifies");
    assert!(report.passed, "fan resolution certificate must pass");
    BoundaryDatum::new(w1, module, hc, vec![twist], report.resolution, 1)
        .expect("the swap normalizes the lowering pair")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcoh::{koszul_resolution, semidirect_resolution};
    use crate::linalg::nilpotent_exp;

    fn cell(dim: usize, weights: &[(i64, usize)]) -> TableCell {
        TableCell { dim, weights: weights.iter().copied().collect() }
    }

    fn trivial_lattice_datum(module_grading: RatMatrix) -> BoundaryDatum {
        let w1 = NilpotentLieAlgebra::abelian_graded(&[]);
        let dim = module_grading.rows();
        let module = LieModule::new(&w1, Vec::new(), Some(module_grading))
            .expect("a grading alone is a module over the zero algebra");
        BoundaryDatum::new(
            w1,
            module,
            GroupAction::trivial(dim),
            Vec::new(),
            koszul_resolution(0),
            1,
        )
        .expect("no generators, nothing to violate")
    }

    #[test]
    fn zero_fiber_and_trivial_lattice_return_the_module() {
        let grading = RatMatrix::from_i64(&[&[2, 0], &[0, 0]]);
        let datum = trivial_lattice_datum(grading);
        let table = degenerate(&datum).unwrap();
        assert_eq!(table.entry(0, 0), Some(&cell(2, &[(0, 1), (2, 1)])));
        assert_eq!(table.totals.len(), 1);
        assert_eq!(table.total(-1), Some(&cell(2, &[(0, 1), (2, 1)])));
    }

    #[test]
    fn rank_one_fiber_matches_the_raising_oracle() {
        let m = 3usize;
        let (algebra, module) = crate::liecoh::sym_power(m);
        let datum = BoundaryDatum::new(
            algebra,
            module,
            GroupAction::trivial(m + 1),
            Vec::new(),
            koszul_resolution(0),
            0,
        )
        .unwrap();
        let table = degenerate(&datum).unwrap();
        assert_eq!(table.entry(0, 0), Some(&cell(1, &[(m as i64, 1)])));
        assert_eq!(table.entry(0, 1), Some(&cell(1, &[(-(m as i64) - 2, 1)])));
    }

    #[test]
    fn hilbert_table_is_frozen() {
        let datum = hilbert_example();
        let table = degenerate(&datum).unwrap();
        assert_eq!(table.entry(0, 0), Some(&cell(1, &[(-2, 1)])));
        assert_eq!(table.entry(1, 0), Some(&cell(1, &[(-2, 1)])));
        assert_eq!(table.entry(0, 1), Some(&cell(1, &[(2, 1)])));
        assert_eq!(table.entry(1, 1), Some(&cell(1, &[(2, 1)])));
        assert_eq!(table.entry(0, 2), Some(&cell(0, &[])));
        assert_eq!(table.entry(1, 2), Some(&cell(0, &[])));
        assert_eq!(table.total(-1), Some(&cell(1, &[(-2, 1)])));
        assert_eq!(table.total(0), Some(&cell(2, &[(-2, 1), (2, 1)])));
        assert_eq!(table.total(1), Some(&cell(1, &[(2, 1)])));
        assert_eq!(table.total(2), Some(&cell(0, &[])));
    }

    #[test]
    fn hilbert_checkers_pass() {
        let datum = hilbert_example();
        let table = degenerate(&datum).unwrap();
        assert!(check_splitting(&table, None).passed);
        assert!(check_weight_commutation(&datum).unwrap().passed);
        let containment = check_factor_containment(&datum).unwrap();
        assert!(containment.passed);
        // the top fiber weight is killed by the lattice, so containment is
        // strict there
        assert_eq!(table.entry(0, 2), Some(&cell(0, &[])));
    }

    #[test]
    fn independent_semidirect_route_matches_totals() {
        let datum = hilbert_example();
        let table = degenerate(&datum).unwrap();
        let swap = [[0, 1], [1, 0]];
        let res = semidirect_resolution(swap).unwrap();
        let x1 = datum.module().action(0);
        let x2 = datum.module().action(1);
        let t = datum.lattice_action().generator(0).clone();
        let action = GroupAction::new(
            Group::LatticeSemidirect { u: swap },
            vec![nilpotent_exp(x1), nilpotent_exp(x2), t],
        )
        .unwrap();
        let gc = cohomology_of_group(&res, &action).unwrap();
        let report = check_splitting(&table, Some(&gc.dims()));
        assert!(report.passed, "comparison rows: {:?}", report.comparison);
    }

    #[test]
    fn table_survives_a_basis_change() {
        let datum = hilbert_example();
        let p = RatMatrix::from_i64(&[
            &[1, 1, 0, 0],
            &[0, 1, 0, 2],
            &[0, 0, 1, 1],
            &[1, 0, 0, 1],
        ]);
        assert!(p.is_invertible());
        let p_inv = p.inverse();
        let conj = |m: &RatMatrix| p.mul(m).mul(&p_inv);
        let module = LieModule::new(
            datum.fiber_algebra(),
            datum.module().actions().iter().map(&conj).collect(),
            datum.module().grading().map(&conj),
        )
        .unwrap();
        let hc = GroupAction::new(
            datum.lattice_action().group().clone(),
            datum.lattice_action().generators().iter().map(&conj).collect(),
        )
        .unwrap();
        let moved = BoundaryDatum::new(
            datum.fiber_algebra().clone(),
            module,
            hc,
            datum.twists().to_vec(),
            datum.resolution().clone(),
            datum.codimension(),
        )
        .unwrap();
        assert_eq!(degenerate(&datum).unwrap(), degenerate(&moved).unwrap());
    }

    #[test]
    fn codimension_shift_reindexes_totals() {
        let datum = hilbert_example();
        let table = degenerate(&datum).unwrap();
        let shifted = degenerate(&datum.with_codimension(2)).unwrap();
        assert_eq!(table.entries, shifted.entries);
        for (&n, cell) in &table.totals {
            assert_eq!(shifted.total(n - 1), Some(cell));
        }
    }

    #[test]
    fn lattice_resolution_swap_changes_nothing() {
        let datum = hilbert_example();
        let table = degenerate(&datum).unwrap();
        let via_koszul = datum.with_resolution(koszul_resolution(1)).unwrap();
        assert_eq!(table, degenerate(&via_koszul).unwrap());
        // rank-one lattices carry nothing above degree one
        assert!(table.entries.keys().all(|&(p, _)| p <= 1));
    }

    #[test]
    fn constructor_rejects_undeclared_conjugation() {
        let good = hilbert_example();
        // identity twist contradicts the swap conjugation
        let err = BoundaryDatum::new(
            good.fiber_algebra().clone(),
            good.module().clone(),
            good.lattice_action().clone(),
            vec![RatMatrix::identity(2)],
            good.resolution().clone(),
            1,
        )
        .unwrap_err();
        assert_eq!(err, DegenerationError::NotNormalizing { generator: 0, basis: 0 });
        // singular twist is no automorphism
        let err = BoundaryDatum::new(
            good.fiber_algebra().clone(),
            good.module().clone(),
            good.lattice_action().clone(),
            vec![RatMatrix::zero(2, 2)],
            good.resolution().clone(),
            1,
        )
        .unwrap_err();
        assert_eq!(err, DegenerationError::TwistNotAutomorphism { generator: 0 });
        // a generator moving weights cannot commute with the grading
        let unipotent = GroupAction::new(
            Group::FreeAbelian(1),
            vec![nilpotent_exp(good.module().action(0))],
        )
        .unwrap();
        let err = BoundaryDatum::new(
            good.fiber_algebra().clone(),
            good.module().clone(),
            unipotent,
            vec![RatMatrix::identity(2)],
            good.resolution().clone(),
            1,
        )
        .unwrap_err();
        assert_eq!(err, DegenerationError::GradingNotCentral { generator: 0 });
    }

    #[test]
    fn weight_commutation_holds_for_block_diagonal_actions() {
        let w1 = NilpotentLieAlgebra::abelian_graded(&[-2]);
        let module = LieModule::new(
            &w1,
            vec![RatMatrix::zero(2, 2)],
            Some(RatMatrix::from_i64(&[&[0, 0], &[0, 2]])),
        )
        .unwrap();
        let hc = GroupAction::new(
            Group::FreeAbelian(1),
            vec![RatMatrix::from_i64(&[&[1, 0], &[0, -1]])],
        )
        .unwrap();
        let datum = BoundaryDatum::new(
            w1,
            module,
            hc,
            vec![RatMatrix::identity(1)],
            koszul_resolution(1),
            0,
        )
        .unwrap();
        let report = check_weight_commutation(&datum).unwrap();
        assert!(report.passed);
        let containment = check_factor_containment(&datum).unwrap();
        assert!(containment.passed);
    }
}
