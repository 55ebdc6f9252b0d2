//! Desk-scale nilpotent orbit data and the filtration comparison theorems
//! attached to them.
//!
//! An `OrbitDatum` packages a space with a descending Hodge filtration, a
//! weight filtration, several commuting nilpotent operators, and a pairing
//! each operator is infinitesimally skew for. Generators are deliberately
//! restricted to symmetric-power blocks, Tate twists, tensor products, and
//! direct sums; every construction is re-validated against the finite
//! invariant list, and the two comparison checkers
//! (`check_cattani_kaplan`, `kashiwara_tilde`) compute both sides of their
//! statements independently.

use crate::filtration::{
    first_difference, relative_weight_filtration, weight_filtration, FiltrationError,
    Filtration, NilpotentOp, RelativeFiltration,
};
use crate::linalg::{qi, Rat, RatMatrix, Subspace};
use num::Zero;
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitError {
    EmptyBlock,
    DimensionMismatch(String),
    NilpotentsDoNotCommute { i: usize, j: usize },
    GriffithsFails { variable: usize, step: i64 },
    WeightFiltrationMismatch { step: i64 },
    PairingDegenerate,
    PairingNotSkew { variable: usize },
    PairingParity,
    WeightMismatch,
    BadAssignment(String),
    BadIndexSet(String),
    EmptyIndexSet,
    OverlappingIndexSets,
    TheoremCheck { name: &'static str, step: i64 },
    Filtration(FiltrationError),
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitError::EmptyBlock => write!(f, "block size must be at least 1"),
            OrbitError::DimensionMismatch(s) => write!(f, "dimension mismatch: {}", s),
            OrbitError::NilpotentsDoNotCommute { i, j } => {
                write!(f, "nilpotents {} and {} do not commute", i, j)
            }
            OrbitError::GriffithsFails { variable, step } => {
                write!(f, "operator {} does not shift the Hodge step at index {}", variable, step)
            }
            OrbitError::WeightFiltrationMismatch { step } => {
                write!(f, "stored weight filtration differs from the recomputed one at {}", step)
            }
            OrbitError::PairingDegenerate => write!(f, "pairing is degenerate"),
            OrbitError::PairingNotSkew { variable } => {
                write!(f, "operator {} is not infinitesimally skew for the pairing", variable)
            }
            OrbitError::PairingParity => write!(f, "pairing parity does not match the weight"),
            OrbitError::WeightMismatch => write!(f, "direct summands must share the weight"),
            OrbitError::BadAssignment(s) => write!(f, "bad variable assignment: {}", s),
            OrbitError::BadIndexSet(s) => write!(f, "bad index set: {}", s),
            OrbitError::EmptyIndexSet => write!(f, "index set must be nonempty"),
            OrbitError::OverlappingIndexSets => write!(f, "index sets must be disjoint"),
            OrbitError::TheoremCheck { name, step } => {
                write!(f, "{} comparison fails at index {}", name, step)
            }
            OrbitError::Filtration(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for OrbitError {}

impl From<FiltrationError> for OrbitError {
    fn from(e: FiltrationError) -> Self {
        OrbitError::Filtration(e)
    }
}

/// Embed a subspace of one block into `blocks` equal-sized blocks.
fn embed(s: &Subspace, block: usize, blocks: usize) -> Subspace {
    let d = s.ambient_dim();
    let total = d * blocks;
    let rows: Vec<Vec<Rat>> = s
        .basis_vectors()
        .into_iter()
        .map(|row| {
            let mut v = vec![Rat::from_integer(0.into()); total];
            v[block * d..(block + 1) * d].clone_from_slice(&row);
            v
        })
        .collect();
    Subspace::from_rows(total, rows)
}

fn direct_sum_filtration(a: &Filtration, b: &Filtration) -> Filtration {
    let d = a.ambient_dim() + b.ambient_dim();
    let mut keys: Vec<i64> = a.steps().keys().chain(b.steps().keys()).cloned().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut steps = BTreeMap::new();
    for k in keys {
        let left = pad_right(a.step(k), b.ambient_dim());
        let right = pad_left(b.step(k), a.ambient_dim());
        steps.insert(k, left.sum(&right));
    }
    Filtration::new(d, steps)
}

fn pad_right(s: &Subspace, extra: usize) -> Subspace {
    let total = s.ambient_dim() + extra;
    let rows = s
        .basis_vectors()
        .into_iter()
        .map(|mut row| {
            row.extend(std::iter::repeat(Rat::from_integer(0.into())).take(extra));
            row
        })
        .collect();
    Subspace::from_rows(total, rows)
}

fn pad_left(s: &Subspace, extra: usize) -> Subspace {
    let total = s.ambient_dim() + extra;
    let rows = s
        .basis_vectors()
        .into_iter()
        .map(|row| {
            let mut v = vec![Rat::from_integer(0.into()); extra];
            v.extend(row);
            v
        })
        .collect();
    Subspace::from_rows(total, rows)
}

/// A weight-k structure: descending Hodge filtration, weight filtration,
/// commuting nilpotent operators, and a nondegenerate pairing.
///
/// Descending indices are stored reversed: the stored increasing filtration
/// has F^p at index -p, so `hodge_piece(p)` is the only place the
/// convention lives.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDatum {
    dim: usize,
    hodge: Filtration,
    weight_filt: Filtration,
    nilpotents: Vec<NilpotentOp>,
    pairing: RatMatrix,
    weight: i64,
}

impl OrbitDatum {
    /// Assemble and validate. Every public constructor funnels through here,
    /// so no datum with a broken invariant escapes.
    pub fn new(
        hodge: Filtration,
        weight_filt: Filtration,
        nilpotents: Vec<NilpotentOp>,
        pairing: RatMatrix,
        weight: i64,
    ) -> Result<Self, OrbitError> {
        let datum = OrbitDatum { dim: hodge.ambient_dim(), hodge, weight_filt, nilpotents, pairing, weight };
        datum.verify_invariants()?;
        Ok(datum)
    }

    pub fn verify_invariants(&self) -> Result<(), OrbitError> {
        let d = self.dim;
        if self.weight_filt.ambient_dim() != d {
            return Err(OrbitError::DimensionMismatch("weight filtration".into()));
        }
        if self.pairing.rows() != d || self.pairing.cols() != d {
            return Err(OrbitError::DimensionMismatch("pairing".into()));
        }
        for (i, n) in self.nilpotents.iter().enumerate() {
            if n.dim() != d {
                return Err(OrbitError::DimensionMismatch(format!("operator {}", i)));
            }
            for (j, m) in self.nilpotents.iter().enumerate().skip(i + 1) {
                let nm = n.matrix().mul(m.matrix());
                let mn = m.matrix().mul(n.matrix());
                if nm != mn {
                    return Err(OrbitError::NilpotentsDoNotCommute { i, j });
                }
            }
            // Griffiths transversality in stored coordinates: N G_j ⊆ G_{j+1}
            for (&j, s) in self.hodge.steps() {
                let image = s.map_by(n.matrix());
                if !self.hodge.step(j + 1).contains(&image) {
                    return Err(OrbitError::GriffithsFails { variable: i, step: j });
                }
            }
            let skew = n.matrix().transpose().mul(&self.pairing).add(&self.pairing.mul(n.matrix()));
            if !skew.is_zero() {
                return Err(OrbitError::PairingNotSkew { variable: i });
            }
        }
        if !self.pairing.is_invertible() {
            return Err(OrbitError::PairingDegenerate);
        }
        let signed = if self.weight.rem_euclid(2) == 0 {
            self.pairing.clone()
        } else {
            self.pairing.neg()
        };
        if self.pairing.transpose() != signed {
            return Err(OrbitError::PairingParity);
        }
        let recomputed = weight_filtration(&self.total_nilpotent(), self.weight);
        if let Some((step, _)) = first_difference(&self.weight_filt, &recomputed) {
            return Err(OrbitError::WeightFiltrationMismatch { step });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn variables(&self) -> usize {
        self.nilpotents.len()
    }

    pub fn nilpotents(&self) -> &[NilpotentOp] {
        &self.nilpotents
    }

    pub fn nilpotent(&self, i: usize) -> &NilpotentOp {
        &self.nilpotents[i]
    }

    pub fn pairing(&self) -> &RatMatrix {
        &self.pairing
    }

    /// Stored increasing form of the descending Hodge filtration.
    pub fn hodge(&self) -> &Filtration {
        &self.hodge
    }

    /// F^p in the descending convention.
    pub fn hodge_piece(&self, p: i64) -> &Subspace {
        self.hodge.step(-p)
    }

    pub fn weight_filt(&self) -> &Filtration {
        &self.weight_filt
    }

    /// Sum of the chosen operators (all of them when `indices` is empty is
    /// NOT intended; pass the full range explicitly or use
    /// `total_nilpotent`).
    pub fn sum_nilpotent(&self, indices: &[usize]) -> NilpotentOp {
        let mut m = RatMatrix::zero(self.dim, self.dim);
        for &i in indices {
            m = m.add(self.nilpotents[i].matrix());
        }
        NilpotentOp::new(m).expect("sum of commuting nilpotents is nilpotent")
    }

    pub fn total_nilpotent(&self) -> NilpotentOp {
        let all: Vec<usize> = (0..self.variables()).collect();
        self.sum_nilpotent(&all)
    }

    /// One-dimensional pure weight-zero datum carrying `vars` zero operators.
    pub fn trivial(vars: usize) -> Self {
        let hodge = Filtration::pure(1, 0);
        let weight_filt = Filtration::pure(1, 0);
        let nilpotents = vec![NilpotentOp::zero(1); vars];
        OrbitDatum::new(hodge, weight_filt, nilpotents, RatMatrix::identity(1), 0)
            .expect("trivial datum satisfies all invariants")
    }

    /// The m-dimensional structure of the (m-1)-st symmetric power of the
    /// standard weight-one block, Tate twisted: weight (m-1) - 2·twist,
    /// basis v_0..v_{m-1}, N v_i = v_{i+1}, F^p spanned by the v_i with
    /// i ≤ m-1-twist-p, and S(v_i, v_{m-1-i}) = (-1)^i.
    pub fn sl2_block(m: usize, twist: i64) -> Result<Self, OrbitError> {
        if m == 0 {
            return Err(OrbitError::EmptyBlock);
        }
        let n = NilpotentOp::jordan_block(m);
        let k = (m as i64 - 1) - 2 * twist;
        let mut hodge_steps = BTreeMap::new();
        for j in (twist - m as i64)..=twist {
            let count = (m as i64 - twist + j).clamp(0, m as i64) as usize;
            let rows: Vec<Vec<Rat>> = (0..count)
                .map(|i| {
                    let mut v = vec![Rat::from_integer(0.into()); m];
                    v[i] = qi(1);
                    v
                })
                .collect();
            hodge_steps.insert(j, Subspace::from_rows(m, rows));
        }
        let hodge = Filtration::new(m, hodge_steps);
        let weight_filt = weight_filtration(&n, k);
        let mut s = RatMatrix::zero(m, m);
        for i in 0..m {
            s[(i, m - 1 - i)] = if i % 2 == 0 { qi(1) } else { qi(-1) };
        }
        OrbitDatum::new(hodge, weight_filt, vec![n], s, k)
    }

    /// Tensor product. Each variable of each factor is assigned an output
    /// slot; an output operator is the sum of its assigned factor operators
    /// acting on their side. The Hodge filtration is the convolution, the
    /// pairing the Kronecker product, and the weight filtration is assembled
    /// by convolution and then re-verified against the closed form by the
    /// invariant checker.
    pub fn tensor(
        a: &OrbitDatum,
        b: &OrbitDatum,
        assign_a: &[usize],
        assign_b: &[usize],
        out_vars: usize,
    ) -> Result<Self, OrbitError> {
        if assign_a.len() != a.variables() || assign_b.len() != b.variables() {
            return Err(OrbitError::BadAssignment(
                "one output slot per factor variable is required".into(),
            ));
        }
        if assign_a.iter().chain(assign_b).any(|&s| s >= out_vars) {
            return Err(OrbitError::BadAssignment("slot out of range".into()));
        }
        let (da, db) = (a.dim, b.dim);
        let d = da * db;
        let ida = RatMatrix::identity(da);
        let idb = RatMatrix::identity(db);
        let mut mats = vec![RatMatrix::zero(d, d); out_vars];
        for (i, &slot) in assign_a.iter().enumerate() {
            mats[slot] = mats[slot].add(&a.nilpotents[i].matrix().kronecker(&idb));
        }
        for (i, &slot) in assign_b.iter().enumerate() {
            mats[slot] = mats[slot].add(&ida.kronecker(b.nilpotents[i].matrix()));
        }
        let nilpotents: Vec<NilpotentOp> = mats
            .into_iter()
            .map(|m| NilpotentOp::new(m).expect("tensor of nilpotents is nilpotent"))
            .collect();
        let hodge = a.hodge.convolve(&b.hodge);
        let weight_filt = a.weight_filt.convolve(&b.weight_filt);
        let pairing = a.pairing.kronecker(&b.pairing);
        OrbitDatum::new(hodge, weight_filt, nilpotents, pairing, a.weight + b.weight)
    }

    /// Direct sum of two data of the same weight and variable count.
    pub fn direct_sum(a: &OrbitDatum, b: &OrbitDatum) -> Result<Self, OrbitError> {
        if a.weight != b.weight {
            return Err(OrbitError::WeightMismatch);
        }
        if a.variables() != b.variables() {
            return Err(OrbitError::BadAssignment(
                "direct summands must declare the same variables".into(),
            ));
        }
        let nilpotents: Vec<NilpotentOp> = a
            .nilpotents
            .iter()
            .zip(&b.nilpotents)
            .map(|(x, y)| {
                NilpotentOp::new(x.matrix().direct_sum(y.matrix()))
                    .expect("direct sum of nilpotents is nilpotent")
            })
            .collect();
        let hodge = direct_sum_filtration(&a.hodge, &b.hodge);
        let weight_filt = direct_sum_filtration(&a.weight_filt, &b.weight_filt);
        let pairing = a.pairing.direct_sum(&b.pairing);
        OrbitDatum::new(hodge, weight_filt, nilpotents, pairing, a.weight)
    }
}

/// Outcome of a filtration comparison checker: pass/fail, a short
/// explanation, and on failure the first offending index with the step seen
/// there.
#[derive(Clone, Debug)]
pub struct OrbitCheckReport {
    pub passed: bool,
    pub detail: String,
    pub witness: Option<(i64, Subspace)>,
}

impl OrbitCheckReport {
    fn pass(detail: &str) -> Self {
        OrbitCheckReport { passed: true, detail: detail.into(), witness: None }
    }

    fn fail(detail: &str, witness: Option<(i64, Subspace)>) -> Self {
        OrbitCheckReport { passed: false, detail: detail.into(), witness }
    }
}

fn validate_index_set(o: &OrbitDatum, set: &[usize]) -> Result<(), OrbitError> {
    let mut seen = vec![false; o.variables()];
    for &i in set {
        if i >= o.variables() {
            return Err(OrbitError::BadIndexSet(format!("variable {} out of range", i)));
        }
        if seen[i] {
            return Err(OrbitError::BadIndexSet(format!("variable {} repeated", i)));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Compare the weight filtration of the combined operators against the
/// relative filtration route: W(Σ_{I1∪I2} N) centered at the weight must
/// equal the weight filtration of Σ_{I2} N relative to W(Σ_{I1} N).
pub fn check_cattani_kaplan(
    o: &OrbitDatum,
    i1: &[usize],
    i2: &[usize],
) -> Result<OrbitCheckReport, OrbitError> {
    validate_index_set(o, i1)?;
    validate_index_set(o, i2)?;
    if i1.iter().any(|i| i2.contains(i)) {
        return Err(OrbitError::OverlappingIndexSets);
    }
    let w1 = weight_filtration(&o.sum_nilpotent(i1), o.weight());
    let n2 = o.sum_nilpotent(i2);
    let mut both: Vec<usize> = i1.to_vec();
    both.extend_from_slice(i2);
    let expected = weight_filtration(&o.sum_nilpotent(&both), o.weight());
    match relative_weight_filtration(&n2, &w1)? {
        RelativeFiltration::NonExistent => Ok(OrbitCheckReport::fail(
            "relative weight filtration does not exist",
            None,
        )),
        RelativeFiltration::Exists(m) => match first_difference(&m, &expected) {
            None => Ok(OrbitCheckReport::pass(
                "relative filtration agrees with the combined weight filtration",
            )),
            Some((k, s)) => Ok(OrbitCheckReport::fail(
                &format!("filtrations differ at index {}", k),
                Some((k, s)),
            )),
        },
    }
}

/// An orbit datum produced by the cokernel construction, with the extra
/// monodromy operator singled out.
#[derive(Clone, Debug)]
pub struct OrbitTilde {
    pub datum: OrbitDatum,
    /// Position of the distinguished operator among the datum's variables.
    pub monodromy_index: usize,
    pub index_set: Vec<usize>,
}

impl OrbitTilde {
    pub fn monodromy(&self) -> &NilpotentOp {
        self.datum.nilpotent(self.monodromy_index)
    }
}

/// Realize the cokernel of ∏_{i∈I}(N_i - N) on polynomials in N as
/// H^{⊕|I|} with basis 1, N, …, N^{|I|-1}, N acting by shift-and-reduce via
/// the monic relation, and the original operators acting coefficientwise.
/// Attaches the shifted Hodge filtration, a residue pairing, and the weight
/// filtration of the new total operator, then asserts the two comparison
/// statements: the new weight filtration equals that of N alone (centered
/// k+1-|I|), and the weight filtration of N centered k equals its
/// filtration relative to the blockwise-induced one.
pub fn kashiwara_tilde(o: &OrbitDatum, index_set: &[usize]) -> Result<OrbitTilde, OrbitError> {
    if index_set.is_empty() {
        return Err(OrbitError::EmptyIndexSet);
    }
    validate_index_set(o, index_set)?;
    let r = index_set.len();
    let d = o.dim();
    let total = r * d;
    // elementary symmetric polynomials in the chosen commuting operators
    let mut elem: Vec<RatMatrix> = vec![RatMatrix::zero(d, d); r + 1];
    elem[0] = RatMatrix::identity(d);
    for (count, &i) in index_set.iter().enumerate() {
        let a = o.nilpotent(i).matrix();
        for j in (1..=count + 1).rev() {
            elem[j] = elem[j].add(&elem[j - 1].mul(a));
        }
    }
    // relation N^r = Σ_s C_s N^s
    let coeffs: Vec<RatMatrix> = (0..r)
        .map(|s| {
            let e = &elem[r - s];
            if (r - 1 - s) % 2 == 0 {
                e.clone()
            } else {
                e.neg()
            }
        })
        .collect();
    let mut monodromy = RatMatrix::zero(total, total);
    for s in 0..r.saturating_sub(1) {
        for i in 0..d {
            monodromy[((s + 1) * d + i, s * d + i)] = qi(1);
        }
    }
    for (t, c) in coeffs.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                if !c[(i, j)].is_zero() {
                    monodromy[(t * d + i, (r - 1) * d + j)] = c[(i, j)].clone();
                }
            }
        }
    }
    let monodromy = NilpotentOp::new(monodromy).map_err(OrbitError::Filtration)?;
    let mut nilpotents: Vec<NilpotentOp> = o
        .nilpotents()
        .iter()
        .map(|n| {
            let mut m = n.matrix().clone();
            for _ in 1..r {
                m = m.direct_sum(n.matrix());
            }
            NilpotentOp::new(m).expect("blockwise nilpotent")
        })
        .collect();
    nilpotents.push(monodromy.clone());
    let new_weight = o.weight() + 1 - r as i64;
    // block s carries F^{p+s}: in stored increasing indices, block s of
    // step j is the factor's step j - s
    let mut hodge_steps = BTreeMap::new();
    for j in o.hodge().min_index()..=(o.hodge().max_index() + r as i64 - 1) {
        let mut acc = Subspace::zero(total);
        for s in 0..r {
            acc = acc.sum(&embed(o.hodge().step(j - s as i64), s, r));
        }
        hodge_steps.insert(j, acc);
    }
    let hodge = Filtration::new(total, hodge_steps);
    // residue pairing: block (a, b) is (-1)^a S T_{a+b}, where T_m is the
    // top coefficient of N^m reduced modulo the relation
    let mut reduction: Vec<RatMatrix> = vec![RatMatrix::zero(d, d); r];
    reduction[0] = RatMatrix::identity(d);
    let mut tops: Vec<RatMatrix> = Vec::with_capacity(2 * r - 1);
    tops.push(reduction[r - 1].clone());
    for _ in 1..(2 * r - 1) {
        let carry = reduction[r - 1].clone();
        for s in (1..r).rev() {
            reduction[s] = reduction[s - 1].add(&carry.mul(&coeffs[s]));
        }
        reduction[0] = carry.mul(&coeffs[0]);
        tops.push(reduction[r - 1].clone());
    }
    let mut pairing = RatMatrix::zero(total, total);
    for a in 0..r {
        for b in 0..r {
            let block = o.pairing().mul(&tops[a + b]);
            for i in 0..d {
                for j in 0..d {
                    let v = if a % 2 == 0 { block[(i, j)].clone() } else { -block[(i, j)].clone() };
                    if !v.is_zero() {
                        pairing[(a * d + i, b * d + j)] = v;
                    }
                }
            }
        }
    }
    let mut sum = RatMatrix::zero(total, total);
    for n in &nilpotents {
        sum = sum.add(n.matrix());
    }
    let total_op = NilpotentOp::new(sum).expect("commuting nilpotents sum to a nilpotent");
    let weight_filt = weight_filtration(&total_op, new_weight);
    let datum = OrbitDatum::new(hodge, weight_filt.clone(), nilpotents, pairing, new_weight)?;
    // purity: the total-operator filtration must agree with the one of the
    // distinguished operator alone
    let pure = weight_filtration(&monodromy, new_weight);
    if let Some((step, _)) = first_difference(&weight_filt, &pure) {
        return Err(OrbitError::TheoremCheck { name: "monodromy purity", step });
    }
    // relative comparison: W(N) centered at the old weight equals the
    // filtration of N relative to the blockwise-induced weight filtration
    let mut induced_steps = BTreeMap::new();
    for (&k, s) in o.weight_filt().steps() {
        let mut acc = Subspace::zero(total);
        for b in 0..r {
            acc = acc.sum(&embed(s, b, r));
        }
        induced_steps.insert(k, acc);
    }
    let induced = Filtration::new(total, induced_steps);
    let old_centered = weight_filtration(&monodromy, o.weight());
    match relative_weight_filtration(&monodromy, &induced)? {
        RelativeFiltration::NonExistent => {
            return Err(OrbitError::TheoremCheck { name: "relative comparison", step: 0 });
        }
        RelativeFiltration::Exists(m) => {
            if let Some((step, _)) = first_difference(&m, &old_centered) {
                return Err(OrbitError::TheoremCheck { name: "relative comparison", step });
            }
        }
    }
    Ok(OrbitTilde {
        monodromy_index: datum.variables() - 1,
        datum,
        index_set: index_set.to_vec(),
    })
}

/// Seeded generator of valid orbit data: random symmetric-power blocks with
/// random twists, tensored together with random slot assignments, sometimes
/// doubled by a direct sum. Every result has passed the invariant checker.
pub fn random_orbit<R: Rng>(rng: &mut R, vars: usize, max_dim: usize) -> OrbitDatum {
    assert!(vars >= 1 && max_dim >= 2);
    let mut acc = OrbitDatum::trivial(vars);
    let identity: Vec<usize> = (0..vars).collect();
    loop {
        let m = rng.gen_range(2..=3.min(max_dim));
        if acc.dim() * m > max_dim {
            break;
        }
        let twist = rng.gen_range(-1..=1);
        let block = OrbitDatum::sl2_block(m, twist).expect("m >= 2");
        let slot = rng.gen_range(0..vars);
        acc = OrbitDatum::tensor(&acc, &block, &identity, &[slot], vars)
            .expect("tensor of valid data is valid");
        if acc.dim() >= max_dim / 2 || rng.gen_bool(0.25) {
            break;
        }
    }
    if acc.dim() * 2 <= max_dim && rng.gen_bool(0.3) {
        acc = OrbitDatum::direct_sum(&acc, &acc).expect("self sum shares the weight");
    }
    acc
}
