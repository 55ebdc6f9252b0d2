//! Finite increasing filtrations and monodromy weight filtrations.
//!
//! The two workhorses are `weight_filtration`, which evaluates the closed
//! form built from kernels and images of powers of a nilpotent operator and
//! re-verifies it against the defining axioms, and
//! `relative_weight_filtration`, which either produces the filtration
//! compatible with a given one on every graded piece or certifies that no
//! such filtration exists.

use crate::linalg::{qi, QuotientSpace, Rat, RatMatrix, Subspace};
use num::traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiltrationError {
    /// The operator is not nilpotent.
    NotNilpotent,
    /// The operator moves some filtration step out of itself.
    NotPreserved { step: i64 },
    /// The filtration does not start at the zero subspace.
    NotSeparated,
}

impl fmt::Display for FiltrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationError::NotNilpotent => write!(f, "operator is not nilpotent"),
            FiltrationError::NotPreserved { step } => {
                write!(f, "operator does not preserve filtration step {}", step)
            }
            FiltrationError::NotSeparated => {
                write!(f, "filtration must start at the zero subspace")
            }
        }
    }
}

impl std::error::Error for FiltrationError {}

/// A nilpotent operator together with its nilpotency index
/// (the least e with matrix^e = 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentOp {
    dim: usize,
    matrix: RatMatrix,
    nilpotency_index: usize,
}

impl NilpotentOp {
    pub fn new(matrix: RatMatrix) -> Result<Self, FiltrationError> {
        assert!(matrix.is_square(), "nilpotent operator must be square");
        let dim = matrix.rows();
        let mut p = RatMatrix::identity(dim);
        let mut index = 0;
        while !p.is_zero() {
            if index > dim {
                return Err(FiltrationError::NotNilpotent);
            }
            p = p.mul(&matrix);
            index += 1;
        }
        Ok(NilpotentOp { dim, matrix, nilpotency_index: index })
    }

    pub fn zero(dim: usize) -> Self {
        NilpotentOp { dim, matrix: RatMatrix::zero(dim, dim), nilpotency_index: usize::from(dim > 0) }
    }

    /// Single Jordan block on basis v_0..v_{m-1} with v_i mapped to v_{i+1}.
    pub fn jordan_block(m: usize) -> Self {
        let mut mat = RatMatrix::zero(m, m);
        for i in 0..m.saturating_sub(1) {
            mat[(i + 1, i)] = qi(1);
        }
        NilpotentOp { dim: m, matrix: mat, nilpotency_index: m.max(usize::from(m > 0)) }
    }

    /// Block-diagonal nilpotent with the given Jordan block sizes.
    pub fn from_block_sizes(sizes: &[usize]) -> Self {
        let mut mat = RatMatrix::zero(0, 0);
        for &s in sizes {
            mat = mat.direct_sum(&Self::jordan_block(s).matrix);
        }
        Self::new(mat).expect("block-diagonal of Jordan blocks is nilpotent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn nilpotency_index(&self) -> usize {
        self.nilpotency_index
    }

    /// Powers id, n, n², …, n^e with e the nilpotency index.
    pub fn powers(&self) -> Vec<RatMatrix> {
        let mut out = vec![RatMatrix::identity(self.dim)];
        for _ in 0..self.nilpotency_index {
            out.push(out.last().unwrap().mul(&self.matrix));
        }
        out
    }
}

/// Finite increasing filtration of `Q^n` by subspaces.
///
/// Listed steps are canonical: the lowest listed index carries the starting
/// value (usually zero) one slot below the first jump, every later listed
/// index is a genuine jump, and the highest listed value is the full space.
/// Indices outside the listed window clamp to the nearest endpoint, so two
/// filtrations are equal as step functions exactly when their canonical
/// forms coincide, which lets `PartialEq` be syntactic.
#[derive(Clone, PartialEq, Eq)]
pub struct Filtration {
    ambient_dim: usize,
    steps: BTreeMap<i64, Subspace>,
}

impl fmt::Debug for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self
            .steps
            .iter()
            .map(|(k, s)| format!("{} -> dim {}", k, s.dim()))
            .collect();
        write!(f, "Filtration(Q^{}; {})", self.ambient_dim, dims.join(", "))
    }
}

impl Filtration {
    /// Build from listed steps; validates monotonicity and that the top
    /// listed step is the full space, then canonicalizes the listing.
    pub fn new(ambient_dim: usize, steps: BTreeMap<i64, Subspace>) -> Self {
        assert!(!steps.is_empty(), "filtration needs at least one step");
        for s in steps.values() {
            assert_eq!(s.ambient_dim(), ambient_dim, "step has wrong ambient dimension");
        }
        let listed: Vec<(&i64, &Subspace)> = steps.iter().collect();
        for w in listed.windows(2) {
            assert!(
                w[1].1.contains(w[0].1),
                "filtration must be increasing (step {} does not contain step {})",
                w[1].0,
                w[0].0
            );
        }
        assert!(
            listed.last().unwrap().1.is_full(),
            "highest listed step must be the full space"
        );
        let canon = canonicalize(steps);
        Filtration { ambient_dim, steps: canon }
    }

    /// The filtration that jumps from zero to everything at index `k`.
    pub fn pure(ambient_dim: usize, k: i64) -> Self {
        let mut steps = BTreeMap::new();
        steps.insert(k - 1, Subspace::zero(ambient_dim));
        steps.insert(k, Subspace::full(ambient_dim));
        Filtration::new(ambient_dim, steps)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Listed steps in canonical form.
    pub fn steps(&self) -> &BTreeMap<i64, Subspace> {
        &self.steps
    }

    pub fn min_index(&self) -> i64 {
        *self.steps.keys().next().unwrap()
    }

    pub fn max_index(&self) -> i64 {
        *self.steps.keys().next_back().unwrap()
    }

    /// Value at `k`: the largest listed index ≤ k, clamped to the window.
    pub fn step(&self, k: i64) -> &Subspace {
        match self.steps.range(..=k).next_back() {
            Some((_, s)) => s,
            None => self.steps.values().next().unwrap(),
        }
    }

    pub fn graded_dim(&self, k: i64) -> usize {
        self.step(k).dim() - self.step(k - 1).dim()
    }

    /// Indices with nonzero graded piece, with their dimensions.
    pub fn graded_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &k in self.steps.keys() {
            let d = self.graded_dim(k);
            if d > 0 {
                out.insert(k, d);
            }
        }
        out
    }

    /// Shifted filtration: the new value at index i is the old value at k + i.
    pub fn shift(&self, k: i64) -> Filtration {
        let steps = self.steps.iter().map(|(&i, s)| (i - k, s.clone())).collect();
        Filtration { ambient_dim: self.ambient_dim, steps }
    }

    /// Transport along an invertible matrix: step k becomes g · W_k.
    pub fn map_by(&self, g: &RatMatrix) -> Filtration {
        assert!(g.is_invertible(), "transport needs an invertible matrix");
        let steps = self.steps.iter().map(|(&k, s)| (k, s.map_by(g))).collect();
        Filtration::new(g.rows(), steps)
    }

    /// Filtration induced on `q.space / q.sub` by intersecting with the space
    /// and projecting.
    pub fn induced_on_quotient(&self, q: &QuotientSpace) -> Filtration {
        let steps = self
            .steps
            .iter()
            .map(|(&k, s)| (k, q.project_subspace(&s.intersect(&q.space))))
            .collect();
        Filtration::new(q.dim(), steps)
    }

    /// Convolution on the tensor product: step k is the span of all
    /// step_a (x) step_b with a + b = k, in Kronecker coordinates.
    pub fn convolve(&self, other: &Filtration) -> Filtration {
        let d = self.ambient_dim * other.ambient_dim;
        let (amin, amax) = (self.min_index(), self.max_index());
        let (bmin, bmax) = (other.min_index(), other.max_index());
        let mut steps = BTreeMap::new();
        for k in (amin + bmin - 1)..=(amax + bmax) {
            // terms with a outside both windows are dominated by the
            // endpoints included here
            let a_lo = (amin - 1).min(k - bmax);
            let a_hi = amax.max(k - bmin + 1);
            let mut acc = Subspace::zero(d);
            for a in a_lo..=a_hi {
                let t = self.step(a).tensor(other.step(k - a));
                acc = acc.sum(&t);
            }
            steps.insert(k, acc);
        }
        Filtration::new(d, steps)
    }
}

fn canonicalize(steps: BTreeMap<i64, Subspace>) -> BTreeMap<i64, Subspace> {
    // keep the first index of each run of equal values
    let mut runs: Vec<(i64, Subspace)> = Vec::new();
    for (k, s) in steps {
        match runs.last() {
            Some((_, prev)) if *prev == s => {}
            _ => runs.push((k, s)),
        }
    }
    // re-anchor the base immediately below the first jump
    if runs.len() >= 2 {
        runs[0].0 = runs[1].0 - 1;
    } else {
        runs[0].0 = 0;
    }
    runs.into_iter().collect()
}

/// Failure evidence from an axiom check.
#[derive(Clone, Debug)]
pub struct AxiomWitness {
    pub axiom: &'static str,
    pub step: i64,
    pub power: i64,
    pub subspace: Subspace,
}

/// Result of checking the two weight-filtration axioms.
#[derive(Clone, Debug)]
pub struct WeightAxiomReport {
    pub step_compatibility: bool,
    pub graded_symmetry: bool,
    pub witness: Option<AxiomWitness>,
}

impl WeightAxiomReport {
    pub fn passed(&self) -> bool {
        self.step_compatibility && self.graded_symmetry
    }
}

/// Result of checking the two relative-filtration axioms.
#[derive(Clone, Debug)]
pub struct RelativeAxiomReport {
    pub step_compatibility: bool,
    pub graded_weights: bool,
    pub witness: Option<AxiomWitness>,
}

impl RelativeAxiomReport {
    pub fn passed(&self) -> bool {
        self.step_compatibility && self.graded_weights
    }
}

/// Monodromy weight filtration of `n` centered at `center`: the unique
/// filtration M with n·M_k ⊆ M_{k-2} whose graded pieces are exchanged
/// symmetrically around the center by powers of n. Evaluated by the closed
/// form M_{center+k} = Σ_j ker(n^{k+j+1}) ∩ im(n^j) and then re-checked
/// against both axioms.
pub fn weight_filtration(n: &NilpotentOp, center: i64) -> Filtration {
    let e = n.nilpotency_index().max(1);
    let powers = n.powers();
    let pow = |j: usize| -> &RatMatrix {
        if j >= powers.len() {
            powers.last().unwrap()
        } else {
            &powers[j]
        }
    };
    let kernels: Vec<Subspace> = (0..=e).map(|j| pow(j).kernel()).collect();
    let images: Vec<Subspace> = (0..=e).map(|j| pow(j).image()).collect();
    let mut steps = BTreeMap::new();
    for k in -(e as i64)..=(e as i64 - 1) {
        let mut m = Subspace::zero(n.dim());
        for j in 0..e as i64 {
            let a = k + j + 1;
            if a <= 0 {
                continue;
            }
            let ker = &kernels[(a as usize).min(e)];
            let term = ker.intersect(&images[j as usize]);
            m = m.sum(&term);
        }
        steps.insert(center + k, m);
    }
    if steps.is_empty() {
        steps.insert(center, Subspace::full(n.dim()));
    }
    let out = Filtration::new(n.dim(), steps);
    let report = verify_weight_axioms(n, &out, center);
    assert!(report.passed(), "closed-form filtration failed its axioms: {:?}", report.witness);
    out
}

/// Check n·M_k ⊆ M_{k-2} for all k and that n^l induces isomorphisms
/// between the graded pieces at center+l and center-l.
pub fn verify_weight_axioms(n: &NilpotentOp, m: &Filtration, center: i64) -> WeightAxiomReport {
    assert_eq!(n.dim(), m.ambient_dim(), "operator and filtration sizes differ");
    let mut report = WeightAxiomReport {
        step_compatibility: true,
        graded_symmetry: true,
        witness: None,
    };
    for (&k, s) in m.steps() {
        let image = s.map_by(n.matrix());
        if !m.step(k - 2).contains(&image) {
            report.step_compatibility = false;
            report.witness = Some(AxiomWitness {
                axiom: "step-compatibility",
                step: k,
                power: 1,
                subspace: image,
            });
            return report;
        }
    }
    let reach = (m.max_index() - center).max(center - m.min_index()).max(0);
    for l in 1..=reach {
        let hi = QuotientSpace::new(m.step(center + l).clone(), m.step(center + l - 1).clone());
        let lo = QuotientSpace::new(m.step(center - l).clone(), m.step(center - l - 1).clone());
        if hi.dim() == 0 && lo.dim() == 0 {
            continue;
        }
        let p = n.matrix().pow(l as usize);
        let top_mapped = m.step(center + l).map_by(&p);
        let sub_mapped = m.step(center + l - 1).map_by(&p);
        let filtered = m.step(center - l).contains(&top_mapped)
            && m.step(center - l - 1).contains(&sub_mapped);
        let iso = filtered && hi.dim() == lo.dim() && {
            let induced = lo.proj.mul(&p.mul(&hi.section));
            induced.rank() == hi.dim()
        };
        if !iso {
            report.graded_symmetry = false;
            report.witness = Some(AxiomWitness {
                axiom: "graded-symmetry",
                step: center + l,
                power: l,
                subspace: Subspace::from_span_matrix(top_mapped.basis().clone()),
            });
            return report;
        }
    }
    report
}

/// Check the axioms for `m` being the weight filtration of `n` relative to
/// `w`: step compatibility of n with m, preservation of w by n, and on each
/// graded piece of w the filtration induced by m equals the weight
/// filtration of the induced operator centered at that index.
pub fn verify_relative_axioms(n: &NilpotentOp, w: &Filtration, m: &Filtration) -> RelativeAxiomReport {
    assert_eq!(n.dim(), w.ambient_dim(), "operator and filtration sizes differ");
    assert_eq!(n.dim(), m.ambient_dim(), "operator and filtration sizes differ");
    let mut report = RelativeAxiomReport {
        step_compatibility: true,
        graded_weights: true,
        witness: None,
    };
    for (&k, s) in m.steps() {
        let image = s.map_by(n.matrix());
        if !m.step(k - 2).contains(&image) {
            report.step_compatibility = false;
            report.witness = Some(AxiomWitness {
                axiom: "step-compatibility",
                step: k,
                power: 1,
                subspace: image,
            });
            return report;
        }
    }
    for (&j, s) in w.steps() {
        let image = s.map_by(n.matrix());
        if !s.contains(&image) {
            report.graded_weights = false;
            report.witness = Some(AxiomWitness {
                axiom: "w-preservation",
                step: j,
                power: 1,
                subspace: image,
            });
            return report;
        }
    }
    for &j in w.steps().keys() {
        if w.graded_dim(j) == 0 {
            continue;
        }
        let q = QuotientSpace::new(w.step(j).clone(), w.step(j - 1).clone());
        let induced_n = NilpotentOp::new(q.induced_map(n.matrix()))
            .expect("operator induced on a graded piece stays nilpotent");
        let induced_m = m.induced_on_quotient(&q);
        let expected = weight_filtration(&induced_n, j);
        if induced_m != expected {
            report.graded_weights = false;
            report.witness = Some(AxiomWitness {
                axiom: "graded-weights",
                step: j,
                power: 0,
                subspace: w.step(j).clone(),
            });
            return report;
        }
    }
    report
}

/// Outcome of the relative weight filtration computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelativeFiltration {
    Exists(Filtration),
    NonExistent,
}

impl RelativeFiltration {
    pub fn exists(&self) -> Option<&Filtration> {
        match self {
            RelativeFiltration::Exists(f) => Some(f),
            RelativeFiltration::NonExistent => None,
        }
    }

    pub fn is_existent(&self) -> bool {
        self.exists().is_some()
    }
}

/// Weight filtration of `n` relative to `w`, or a certificate that none
/// exists. Requires n to preserve every step of w and w to start at zero.
///
/// The listed steps of w are peeled from the top: the restriction of any
/// solution to the next-lower step is forced (it solves the truncated
/// problem), and what remains is a finite linear system for lifts of Jordan
/// chain vectors of the operator induced on the top graded piece. The
/// assembled candidate is re-verified against the axioms before returning.
pub fn relative_weight_filtration(
    n: &NilpotentOp,
    w: &Filtration,
) -> Result<RelativeFiltration, FiltrationError> {
    assert_eq!(n.dim(), w.ambient_dim(), "operator and filtration sizes differ");
    for (&k, s) in w.steps() {
        if !s.contains(&s.map_by(n.matrix())) {
            return Err(FiltrationError::NotPreserved { step: k });
        }
    }
    let listing: Vec<(i64, Subspace)> = w.steps().iter().map(|(&k, s)| (k, s.clone())).collect();
    if !listing[0].1.is_zero() {
        return Err(FiltrationError::NotSeparated);
    }
    match relative_listing(n.matrix(), &listing) {
        None => Ok(RelativeFiltration::NonExistent),
        Some(m_listing) => {
            let steps: BTreeMap<i64, Subspace> = m_listing.into_iter().collect();
            let m = Filtration::new(n.dim(), steps);
            let report = verify_relative_axioms(n, w, &m);
            assert!(
                report.passed(),
                "constructed relative filtration failed verification: {:?}",
                report.witness
            );
            Ok(RelativeFiltration::Exists(m))
        }
    }
}

fn listing_step<'a>(listing: &'a [(i64, Subspace)], k: i64) -> &'a Subspace {
    let mut current = &listing[0].1;
    for (idx, s) in listing {
        if *idx <= k {
            current = s;
        } else {
            break;
        }
    }
    current
}

// Core recursion: listing is the canonical (index, step) list of w on the
// space given by its top entry; returns the listed steps of the relative
// filtration on that space, or None when it does not exist.
fn relative_listing(
    n: &RatMatrix,
    listing: &[(i64, Subspace)],
) -> Option<Vec<(i64, Subspace)>> {
    let ambient = n.rows();
    let space = &listing.last().unwrap().1;
    if space.is_zero() {
        return Some(vec![(listing[0].0, Subspace::zero(ambient))]);
    }
    if listing.len() == 2 {
        // single graded piece: the relative filtration is the plain weight
        // filtration of the restriction, centered at the jump index
        let center = listing[1].0;
        let coords = QuotientSpace::new(space.clone(), Subspace::zero(ambient));
        let restricted = NilpotentOp::new(coords.induced_map(n))
            .expect("restriction of a nilpotent operator is nilpotent");
        let m = weight_filtration(&restricted, center);
        let out = m
            .steps()
            .iter()
            .map(|(&k, s)| (k, s.map_by(&coords.section)))
            .collect();
        return Some(out);
    }
    let inner = &listing[..listing.len() - 1];
    let m_prime = relative_listing(n, inner)?;
    let wall = &inner.last().unwrap().1; // next-lower step of w
    let jmax = listing.last().unwrap().0;
    let q = QuotientSpace::new(space.clone(), wall.clone());
    let nbar = q.induced_map(n);
    let chains = jordan_chains(
        &NilpotentOp::new(nbar.clone()).expect("induced operator on graded piece is nilpotent"),
    );
    let wall_basis_t = wall.basis().transpose(); // ambient x w' columns span the wall
    let wdim = wall.dim();
    let mut lifted: Vec<(i64, Vec<Rat>)> = Vec::new(); // (weight, vector)
    for chain in &chains {
        let s = chain.len();
        let tilde: Vec<Vec<Rat>> = chain.iter().map(|u| q.section.apply(u)).collect();
        // tau_i = n(tilde_i) - tilde_{i+1} lies in the wall; tail uses 0
        let taus: Vec<Vec<Rat>> = (0..s)
            .map(|i| {
                let mut t = n.apply(&tilde[i]);
                if i + 1 < s {
                    for (a, b) in t.iter_mut().zip(&tilde[i + 1]) {
                        *a -= b;
                    }
                }
                t
            })
            .collect();
        let weights: Vec<i64> = (0..s).map(|i| jmax + (s as i64 - 1) - 2 * i as i64).collect();
        // unknowns: one wall vector per chain slot; constraints say the
        // defect at slot i dies in the quotient by M'_{wt(i)-2}
        let mut row_blocks: Vec<RatMatrix> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        for i in 0..s {
            let target = listing_step(&m_prime, weights[i] - 2);
            let quo = QuotientSpace::new(wall.clone(), target.clone());
            if quo.dim() == 0 {
                continue;
            }
            let pn = quo.proj.mul(&n.mul(&wall_basis_t));
            let pw = quo.proj.mul(&wall_basis_t).neg();
            let mut row = RatMatrix::zero(quo.dim(), s * wdim);
            for r in 0..quo.dim() {
                for c in 0..wdim {
                    row[(r, i * wdim + c)] = pn[(r, c)].clone();
                    if i + 1 < s {
                        row[(r, (i + 1) * wdim + c)] = pw[(r, c)].clone();
                    }
                }
            }
            row_blocks.push(row);
            for v in quo.proj.apply(&taus[i]) {
                rhs.push(-v);
            }
        }
        let solution = if row_blocks.is_empty() {
            vec![Rat::zero(); s * wdim]
        } else {
            let mut a = row_blocks[0].clone();
            for b in &row_blocks[1..] {
                a = a.vstack(b);
            }
            a.solve(&rhs)?
        };
        for i in 0..s {
            let xi = &solution[i * wdim..(i + 1) * wdim];
            let correction = wall_basis_t.apply(xi);
            let mut r = tilde[i].clone();
            for (a, b) in r.iter_mut().zip(&correction) {
                *a += b;
            }
            lifted.push((weights[i], r));
        }
    }
    // assemble: M_k = M'_k + span of lifts with weight at most k
    let mut keys: Vec<i64> = m_prime.iter().map(|(k, _)| *k).collect();
    keys.extend(lifted.iter().map(|(wt, _)| *wt));
    keys.sort_unstable();
    keys.dedup();
    if let Some(min_wt) = lifted.iter().map(|(wt, _)| *wt).min() {
        if min_wt <= keys[0] {
            keys.insert(0, min_wt - 1);
        }
    }
    let mut out = Vec::new();
    for &k in &keys {
        let mut step = listing_step(&m_prime, k).clone();
        let rows: Vec<Vec<Rat>> = lifted
            .iter()
            .filter(|(wt, _)| *wt <= k)
            .map(|(_, v)| v.clone())
            .collect();
        if !rows.is_empty() {
            step = step.sum(&Subspace::from_rows(ambient, rows));
        }
        out.push((k, step));
    }
    debug_assert_eq!(&out.last().unwrap().1, space, "assembled filtration must exhaust the space");
    Some(out)
}

/// First index at which two filtrations differ as step functions, with the
/// left-hand step there. `None` means they are equal.
pub fn first_difference(a: &Filtration, b: &Filtration) -> Option<(i64, Subspace)> {
    assert_eq!(a.ambient_dim(), b.ambient_dim(), "ambient mismatch");
    let mut keys: Vec<i64> = a.steps().keys().chain(b.steps().keys()).cloned().collect();
    keys.sort_unstable();
    keys.dedup();
    let probe = keys[0] - 1;
    for k in std::iter::once(probe).chain(keys) {
        if a.step(k) != b.step(k) {
            return Some((k, a.step(k).clone()));
        }
    }
    None
}

/// Direct sum of `copies` copies of a filtration, block `s` of the larger
/// space holding the `s`-th copy of each step.
pub fn block_diagonal(f: &Filtration, copies: usize) -> Filtration {
    let d = f.ambient_dim();
    let total = d * copies;
    let mut steps = BTreeMap::new();
    for (&k, s) in f.steps() {
        let mut rows = Vec::new();
        for b in 0..copies {
            for v in s.basis_vectors() {
                let mut row = vec![Rat::zero(); total];
                row[b * d..(b + 1) * d].clone_from_slice(&v);
                rows.push(row);
            }
        }
        steps.insert(k, Subspace::from_rows(total, rows));
    }
    Filtration::new(total, steps)
}

/// Jordan chains of a nilpotent operator: each chain lists v, n·v, n²·v, …
/// down to the last nonzero vector. The union of all chain vectors is a
/// basis.
pub fn jordan_chains(n: &NilpotentOp) -> Vec<Vec<Vec<Rat>>> {
    let e = n.nilpotency_index().max(1);
    let powers = n.powers();
    let kernels: Vec<Subspace> = (0..=e).map(|j| powers[j.min(powers.len() - 1)].kernel()).collect();
    let mut starts: Vec<(Vec<Rat>, usize)> = Vec::new();
    for h in (1..=e).rev() {
        let mut covered = kernels[h - 1].clone();
        for (start, height) in &starts {
            if *height > h {
                let v = powers[height - h].apply(start);
                covered = covered.sum(&Subspace::from_rows(n.dim(), vec![v]));
            }
        }
        for row in kernels[h].basis_vectors() {
            if !covered.contains_vector(&row) {
                covered = covered.sum(&Subspace::from_rows(n.dim(), vec![row.clone()]));
                starts.push((row, h));
            }
        }
    }
    let chains: Vec<Vec<Vec<Rat>>> = starts
        .iter()
        .map(|(start, h)| (0..*h).map(|i| powers[i].apply(start)).collect())
        .collect();
    let total: usize = chains.iter().map(|c| c.len()).sum();
    assert_eq!(total, n.dim(), "chain vectors must form a basis");
    chains
}

/// Count the filtrations built from canonical invariant subspaces (the
/// lattice generated by all ker(n^a) ∩ im(n^b) under sums and
/// intersections) that satisfy both weight axioms. Uniqueness predicts
/// exactly one.
pub fn count_weight_filtrations_in_lattice(n: &NilpotentOp, center: i64) -> usize {
    let e = n.nilpotency_index().max(1) as i64;
    let powers = n.powers();
    let mut lattice: Vec<Subspace> = Vec::new();
    let push = |s: Subspace, lat: &mut Vec<Subspace>| {
        if !lat.contains(&s) {
            lat.push(s);
        }
    };
    for a in 0..powers.len() {
        for b in 0..powers.len() {
            let s = powers[a].kernel().intersect(&powers[b].image());
            push(s, &mut lattice);
        }
    }
    loop {
        let mut grew = false;
        let snapshot = lattice.clone();
        for i in 0..snapshot.len() {
            for j in (i + 1)..snapshot.len() {
                for s in [snapshot[i].sum(&snapshot[j]), snapshot[i].intersect(&snapshot[j])] {
                    if !lattice.contains(&s) {
                        lattice.push(s);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    // any filtration passing graded symmetry has all jumps inside the window
    let window: Vec<i64> = ((center - e + 1)..=(center + e - 1)).collect();
    let mut count = 0;
    let mut chosen: Vec<Subspace> = Vec::new();
    search_chains(n, center, &window, &lattice, &mut chosen, &mut count);
    count
}

fn search_chains(
    n: &NilpotentOp,
    center: i64,
    window: &[i64],
    lattice: &[Subspace],
    chosen: &mut Vec<Subspace>,
    count: &mut usize,
) {
    let pos = chosen.len();
    if pos == window.len() {
        if !chosen.last().unwrap().is_full() {
            return;
        }
        let steps: BTreeMap<i64, Subspace> = window
            .iter()
            .cloned()
            .zip(chosen.iter().cloned())
            .chain(std::iter::once((window[0] - 1, Subspace::zero(n.dim()))))
            .collect();
        let f = Filtration::new(n.dim(), steps);
        if verify_weight_axioms(n, &f, center).passed() {
            *count += 1;
        }
        return;
    }
    for cand in lattice {
        let increasing = pos == 0 || cand.contains(&chosen[pos - 1]);
        if !increasing {
            continue;
        }
        // step compatibility against the step two slots down is decided
        // already; prune on it
        let lower = if pos >= 2 { chosen[pos - 2].clone() } else { Subspace::zero(n.dim()) };
        if !lower.contains(&cand.map_by(n.matrix())) {
            continue;
        }
        chosen.push(cand.clone());
        search_chains(n, center, window, lattice, chosen, count);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jordan_graded_oracle(sizes: &[usize], center: i64) -> BTreeMap<i64, usize> {
        // block of size m contributes one dimension at weights
        // m-1, m-3, ..., -(m-1) around the center
        let mut out = BTreeMap::new();
        for &m in sizes {
            let mut wt = m as i64 - 1;
            for _ in 0..m {
                *out.entry(center + wt).or_insert(0) += 1;
                wt -= 2;
            }
        }
        out
    }

    #[test]
    fn zero_operator_gives_pure_filtration() {
        let n = NilpotentOp::zero(3);
        let m = weight_filtration(&n, 0);
        assert_eq!(m, Filtration::pure(3, 0));
        assert_eq!(m.step(-1).dim(), 0);
        assert!(m.step(0).is_full());
    }

    #[test]
    fn jordan_block_graded_dims_match_oracle() {
        for m in 1..=6usize {
            let n = NilpotentOp::jordan_block(m);
            let f = weight_filtration(&n, 0);
            assert_eq!(f.graded_dims(), jordan_graded_oracle(&[m], 0), "block size {}", m);
        }
    }

    #[test]
    fn mixed_jordan_types_match_oracle() {
        for sizes in [vec![2usize, 1], vec![3, 2], vec![4, 2, 1], vec![3, 3]] {
            let n = NilpotentOp::from_block_sizes(&sizes);
            let f = weight_filtration(&n, 5);
            assert_eq!(f.graded_dims(), jordan_graded_oracle(&sizes, 5), "sizes {:?}", sizes);
        }
    }

    #[test]
    fn shifted_filtration_fails_symmetry() {
        let n = NilpotentOp::jordan_block(2);
        let f = weight_filtration(&n, 0).shift(-1);
        let report = verify_weight_axioms(&n, &f, 0);
        assert!(!report.passed());
        assert!(!report.graded_symmetry);
        assert!(report.witness.is_some());
    }

    #[test]
    fn functoriality_under_conjugation() {
        let n = NilpotentOp::from_block_sizes(&[3, 1]);
        let g = RatMatrix::from_i64(&[
            &[1, 2, 0, 1],
            &[0, 1, 1, 0],
            &[0, 0, 1, 3],
            &[0, 0, 0, 1],
        ]);
        let conj = NilpotentOp::new(g.mul(n.matrix()).mul(&g.inverse())).unwrap();
        let left = weight_filtration(&conj, 2);
        let right = weight_filtration(&n, 2).map_by(&g);
        assert_eq!(left, right);
    }

    #[test]
    fn shift_composition_and_reindexing() {
        let n = NilpotentOp::jordan_block(3);
        let f = weight_filtration(&n, 0);
        assert_eq!(f.shift(0), f);
        assert_eq!(f.shift(4).shift(-4), f);
        let shifted = f.shift(-5);
        assert_eq!(shifted.max_index(), 5 + 2);
        assert_eq!(shifted.graded_dim(5 + 2), 1);
        assert_eq!(shifted.graded_dim(5 - 2), 1);
    }

    #[test]
    fn tensor_weight_filtration_is_convolution() {
        for (a, b) in [(2usize, 2usize), (3, 2), (4, 3), (1, 4)] {
            let na = NilpotentOp::jordan_block(a);
            let nb = NilpotentOp::jordan_block(b);
            let fa = weight_filtration(&na, 0);
            let fb = weight_filtration(&nb, 0);
            let big = na
                .matrix()
                .kronecker(&RatMatrix::identity(b))
                .add(&RatMatrix::identity(a).kronecker(nb.matrix()));
            let nt = NilpotentOp::new(big).unwrap();
            assert_eq!(weight_filtration(&nt, 0), fa.convolve(&fb), "blocks {} {}", a, b);
        }
    }

    #[test]
    fn relative_of_zero_operator_returns_w() {
        let mut steps = BTreeMap::new();
        steps.insert(-1, Subspace::zero(3));
        steps.insert(0, Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(0)]]));
        steps.insert(2, Subspace::full(3));
        let w = Filtration::new(3, steps);
        let n = NilpotentOp::zero(3);
        let rel = relative_weight_filtration(&n, &w).unwrap();
        assert_eq!(rel.exists().unwrap(), &w);
    }

    #[test]
    fn two_step_obstruction_is_detected() {
        // e spans step 0, everything is step 1, n sends f to e: no
        // filtration can put e at weight -1 and keep it at weight 0
        let mut steps = BTreeMap::new();
        steps.insert(-1, Subspace::zero(2));
        steps.insert(0, Subspace::from_rows(2, vec![vec![qi(1), qi(0)]]));
        steps.insert(1, Subspace::full(2));
        let w = Filtration::new(2, steps);
        let n = NilpotentOp::new(RatMatrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
        let rel = relative_weight_filtration(&n, &w).unwrap();
        assert!(!rel.is_existent());
    }

    #[test]
    fn self_relative_returns_w() {
        for sizes in [vec![2usize], vec![3, 1], vec![2, 2]] {
            let n = NilpotentOp::from_block_sizes(&sizes);
            let w = weight_filtration(&n, 3);
            let rel = relative_weight_filtration(&n, &w).unwrap();
            assert_eq!(rel.exists().unwrap(), &w, "sizes {:?}", sizes);
        }
    }

    #[test]
    fn relative_to_pure_filtration_is_weight_filtration() {
        let n = NilpotentOp::from_block_sizes(&[3, 2]);
        let w = Filtration::pure(5, 4);
        let rel = relative_weight_filtration(&n, &w).unwrap();
        assert_eq!(rel.exists().unwrap(), &weight_filtration(&n, 4));
    }

    #[test]
    fn mixed_weights_relative_filtration_frozen() {
        // W jumps at 0 (line e1) and 2 (everything); n kills e1, e2 and
        // sends e3 to e2, so gr_0 is pure and gr_2 splits into weights 1, 3
        let mut steps = BTreeMap::new();
        steps.insert(-1, Subspace::zero(3));
        steps.insert(0, Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(0)]]));
        steps.insert(2, Subspace::full(3));
        let w = Filtration::new(3, steps);
        let n = NilpotentOp::new(RatMatrix::from_i64(&[
            &[0, 0, 0],
            &[0, 0, 1],
            &[0, 0, 0],
        ]))
        .unwrap();
        let rel = relative_weight_filtration(&n, &w).unwrap();
        let m = rel.exists().unwrap();
        let mut expected = BTreeMap::new();
        expected.insert(-1, Subspace::zero(3));
        expected.insert(0, Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(0)]]));
        expected.insert(
            1,
            Subspace::from_rows(3, vec![vec![qi(1), qi(0), qi(0)], vec![qi(0), qi(1), qi(0)]]),
        );
        expected.insert(3, Subspace::full(3));
        assert_eq!(m, &Filtration::new(3, expected));
    }

    #[test]
    fn relative_rejects_nonpreserving_operator() {
        let mut steps = BTreeMap::new();
        steps.insert(-1, Subspace::zero(2));
        steps.insert(0, Subspace::from_rows(2, vec![vec![qi(0), qi(1)]]));
        steps.insert(1, Subspace::full(2));
        let w = Filtration::new(2, steps);
        // sends e2 to e1, leaving step 0
        let n = NilpotentOp::new(RatMatrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap();
        assert_eq!(
            relative_weight_filtration(&n, &w),
            Err(FiltrationError::NotPreserved { step: 0 })
        );
    }

    #[test]
    fn jordan_chains_recover_block_structure() {
        let n = NilpotentOp::from_block_sizes(&[3, 2, 2, 1]);
        let chains = jordan_chains(&n);
        let mut lengths: Vec<usize> = chains.iter().map(|c| c.len()).collect();
        lengths.sort_unstable();
        assert_eq!(lengths, vec![1, 2, 2, 3]);
        for c in &chains {
            let last = c.last().unwrap();
            assert!(n.matrix().apply(last).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn lattice_search_finds_single_solution() {
        for sizes in [vec![2usize], vec![2, 1], vec![3, 2]] {
            let n = NilpotentOp::from_block_sizes(&sizes);
            assert_eq!(count_weight_filtrations_in_lattice(&n, 0), 1, "sizes {:?}", sizes);
        }
    }

    #[test]
    fn non_nilpotent_is_rejected() {
        assert_eq!(
            NilpotentOp::new(RatMatrix::identity(2)),
            Err(FiltrationError::NotNilpotent)
        );
    }

    #[test]
    fn canonical_form_reanchors_base() {
        let mut a = BTreeMap::new();
        a.insert(-7, Subspace::zero(2));
        a.insert(1, Subspace::full(2));
        let mut b = BTreeMap::new();
        b.insert(0, Subspace::zero(2));
        b.insert(1, Subspace::full(2));
        assert_eq!(Filtration::new(2, a), Filtration::new(2, b));
    }
}
