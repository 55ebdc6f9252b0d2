//! Combinatorial models of unipotent normal-crossing perverse structures on
//! a polydisk.
//!
//! An `NCObject` assigns a space to every subset of the coordinate
//! directions, connected by can/Var/N maps subject to the factorization and
//! commutation axioms. `nearby_cycles` realizes the limit construction along
//! the product of the first `m` coordinates through an explicit cokernel
//! presentation, and `check_nearby_weight_comparison` compares its monodromy
//! weight filtration against the relative route, refusing inputs whose logs
//! fail the cone condition `check_monodromy_condition` tests.

use crate::filtration::{
    block_diagonal, first_difference, relative_weight_filtration, weight_filtration,
    Filtration, FiltrationError, NilpotentOp, RelativeFiltration,
};
use crate::linalg::{RatMatrix, Subspace};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NCError {
    ShapeMismatch(String),
    LogsDoNotCommute { i: usize, j: usize },
    MOutOfRange { m: usize, n: usize },
    InvalidObject(String),
    NotLocalSystemShape(String),
    IncompatibleFiltration { component: usize, detail: String },
    MonViolated { subset: Vec<usize> },
    Filtration(FiltrationError),
}

impl fmt::Display for NCError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NCError::ShapeMismatch(s) => write!(f, "shape mismatch: {}", s),
            NCError::LogsDoNotCommute { i, j } => {
                write!(f, "logs {} and {} do not commute", i, j)
            }
            NCError::MOutOfRange { m, n } => {
                write!(f, "nearby-cycle count {} out of range 1..={}", m, n)
            }
            NCError::InvalidObject(s) => write!(f, "object fails validation: {}", s),
            NCError::NotLocalSystemShape(s) => {
                write!(f, "object is not in local-system form: {}", s)
            }
            NCError::IncompatibleFiltration { component, detail } => {
                write!(f, "filtration on component {:#b} incompatible: {}", component, detail)
            }
            NCError::MonViolated { subset } => {
                write!(f, "monodromy cone condition fails for subset {:?}", subset)
            }
            NCError::Filtration(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for NCError {}

impl From<FiltrationError> for NCError {
    fn from(e: FiltrationError) -> Self {
        NCError::Filtration(e)
    }
}

fn mask_to_set(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).collect()
}

/// A tuple of spaces indexed by subsets of {0..n-1} (as bitmasks) with
/// structure maps can_i into larger subsets, Var_i into smaller ones, and
/// endomorphisms N_i, all rational matrices in column convention.
#[derive(Clone, Debug, PartialEq)]
pub struct NCObject {
    n: usize,
    dims: Vec<usize>,
    can: BTreeMap<(usize, usize), RatMatrix>,
    var: BTreeMap<(usize, usize), RatMatrix>,
    nop: BTreeMap<(usize, usize), RatMatrix>,
}

impl NCObject {
    /// Shape-check and assemble; axioms are the business of `validate`.
    /// Keys are (variable, component bitmask): `can` holds exactly the pairs
    /// with the variable outside the component, `var` exactly those inside,
    /// `nop` all of them.
    pub fn new(
        n: usize,
        dims: Vec<usize>,
        can: BTreeMap<(usize, usize), RatMatrix>,
        var: BTreeMap<(usize, usize), RatMatrix>,
        nop: BTreeMap<(usize, usize), RatMatrix>,
    ) -> Result<Self, NCError> {
        let size = 1usize << n;
        if dims.len() != size {
            return Err(NCError::ShapeMismatch(format!(
                "expected {} components, got {}",
                size,
                dims.len()
            )));
        }
        let mut expected_can = 0usize;
        let mut expected_var = 0usize;
        for mask in 0..size {
            for i in 0..n {
                let bit = 1usize << i;
                if mask & bit == 0 {
                    expected_can += 1;
                    let m = can.get(&(i, mask)).ok_or_else(|| {
                        NCError::ShapeMismatch(format!("missing can_{} on {:#b}", i, mask))
                    })?;
                    if m.rows() != dims[mask | bit] || m.cols() != dims[mask] {
                        return Err(NCError::ShapeMismatch(format!(
                            "can_{} on {:#b} has shape {}x{}",
                            i,
                            mask,
                            m.rows(),
                            m.cols()
                        )));
                    }
                } else {
                    expected_var += 1;
                    let m = var.get(&(i, mask)).ok_or_else(|| {
                        NCError::ShapeMismatch(format!("missing var_{} on {:#b}", i, mask))
                    })?;
                    if m.rows() != dims[mask & !bit] || m.cols() != dims[mask] {
                        return Err(NCError::ShapeMismatch(format!(
                            "var_{} on {:#b} has shape {}x{}",
                            i,
                            mask,
                            m.rows(),
                            m.cols()
                        )));
                    }
                }
                let m = nop.get(&(i, mask)).ok_or_else(|| {
                    NCError::ShapeMismatch(format!("missing N_{} on {:#b}", i, mask))
                })?;
                if m.rows() != dims[mask] || m.cols() != dims[mask] {
                    return Err(NCError::ShapeMismatch(format!(
                        "N_{} on {:#b} is not an endomorphism",
                        i, mask
                    )));
                }
            }
        }
        if can.len() != expected_can || var.len() != expected_var || nop.len() != size * n {
            return Err(NCError::ShapeMismatch("stray map keys".into()));
        }
        Ok(NCObject { n, dims, can, var, nop })
    }

    pub fn zero(n: usize) -> Self {
        let size = 1usize << n;
        let mut can = BTreeMap::new();
        let mut var = BTreeMap::new();
        let mut nop = BTreeMap::new();
        for mask in 0..size {
            for i in 0..n {
                if mask >> i & 1 == 0 {
                    can.insert((i, mask), RatMatrix::zero(0, 0));
                } else {
                    var.insert((i, mask), RatMatrix::zero(0, 0));
                }
                nop.insert((i, mask), RatMatrix::zero(0, 0));
            }
        }
        NCObject::new(n, vec![0; size], can, var, nop).expect("zero object shapes")
    }

    /// All components equal to one space H, Var the identity, can and N the
    /// given commuting logs.
    pub fn from_local_system(h_dim: usize, logs: &[NilpotentOp]) -> Result<Self, NCError> {
        let n = logs.len();
        for (i, l) in logs.iter().enumerate() {
            if l.dim() != h_dim {
                return Err(NCError::ShapeMismatch(format!(
                    "log {} acts on dimension {}, expected {}",
                    i,
                    l.dim(),
                    h_dim
                )));
            }
            for (j, k) in logs.iter().enumerate().skip(i + 1) {
                if l.matrix().mul(k.matrix()) != k.matrix().mul(l.matrix()) {
                    return Err(NCError::LogsDoNotCommute { i, j });
                }
            }
        }
        let size = 1usize << n;
        let id = RatMatrix::identity(h_dim);
        let mut can = BTreeMap::new();
        let mut var = BTreeMap::new();
        let mut nop = BTreeMap::new();
        for mask in 0..size {
            for (i, l) in logs.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    can.insert((i, mask), l.matrix().clone());
                } else {
                    var.insert((i, mask), id.clone());
                }
                nop.insert((i, mask), l.matrix().clone());
            }
        }
        NCObject::new(n, vec![h_dim; size], can, var, nop)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_of(&self, mask: usize) -> usize {
        self.dims[mask]
    }

    pub fn can(&self, i: usize, mask: usize) -> &RatMatrix {
        &self.can[&(i, mask)]
    }

    pub fn var(&self, i: usize, mask: usize) -> &RatMatrix {
        &self.var[&(i, mask)]
    }

    pub fn nop(&self, i: usize, mask: usize) -> &RatMatrix {
        &self.nop[&(i, mask)]
    }

    /// Check every axiom, collecting all failures in a fixed order:
    /// nilpotency, then the two factorizations of N, then commutation of
    /// every composable pair with distinct variables.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let size = 1usize << self.n;
        for mask in 0..size {
            for i in 0..self.n {
                let nm = self.nop(i, mask);
                if !nm.pow(self.dims[mask]).is_zero() {
                    failures.push(format!(
                        "N_{} is not nilpotent on component {:?}",
                        i,
                        mask_to_set(mask)
                    ));
                }
            }
        }
        for mask in 0..size {
            for i in 0..self.n {
                let bit = 1usize << i;
                if mask & bit == 0 {
                    let round = self.var(i, mask | bit).mul(self.can(i, mask));
                    if &round != self.nop(i, mask) {
                        failures.push(format!(
                            "Var_{0} after can_{0} differs from N_{0} on component {1:?}",
                            i,
                            mask_to_set(mask)
                        ));
                    }
                } else {
                    let round = self.can(i, mask & !bit).mul(self.var(i, mask));
                    if &round != self.nop(i, mask) {
                        failures.push(format!(
                            "can_{0} after Var_{0} differs from N_{0} on component {1:?}",
                            i,
                            mask_to_set(mask)
                        ));
                    }
                }
            }
        }
        for mask in 0..size {
            for i in 0..self.n {
                for j in 0..self.n {
                    if i == j {
                        continue;
                    }
                    let (bi, bj) = (1usize << i, 1usize << j);
                    // can_i with can_j, i < j to avoid double reporting
                    if i < j && mask & bi == 0 && mask & bj == 0 {
                        let a = self.can(j, mask | bi).mul(self.can(i, mask));
                        let b = self.can(i, mask | bj).mul(self.can(j, mask));
                        if a != b {
                            failures.push(format!(
                                "can_{} and can_{} do not commute on component {:?}",
                                i,
                                j,
                                mask_to_set(mask)
                            ));
                        }
                    }
                    if i < j && mask & bi != 0 && mask & bj != 0 {
                        let a = self.var(j, mask & !bi).mul(self.var(i, mask));
                        let b = self.var(i, mask & !bj).mul(self.var(j, mask));
                        if a != b {
                            failures.push(format!(
                                "Var_{} and Var_{} do not commute on component {:?}",
                                i,
                                j,
                                mask_to_set(mask)
                            ));
                        }
                    }
                    if mask & bi == 0 && mask & bj != 0 {
                        let a = self.var(j, mask | bi).mul(self.can(i, mask));
                        let b = self.can(i, mask & !bj).mul(self.var(j, mask));
                        if a != b {
                            failures.push(format!(
                                "can_{} and Var_{} do not commute on component {:?}",
                                i,
                                j,
                                mask_to_set(mask)
                            ));
                        }
                    }
                    if mask & bi == 0 {
                        let a = self.nop(j, mask | bi).mul(self.can(i, mask));
                        let b = self.can(i, mask).mul(self.nop(j, mask));
                        if a != b {
                            failures.push(format!(
                                "can_{} and N_{} do not commute on component {:?}",
                                i,
                                j,
                                mask_to_set(mask)
                            ));
                        }
                    } else {
                        let a = self.nop(j, mask & !bi).mul(self.var(i, mask));
                        let b = self.var(i, mask).mul(self.nop(j, mask));
                        if a != b {
                            failures.push(format!(
                                "Var_{} and N_{} do not commute on component {:?}",
                                i,
                                j,
                                mask_to_set(mask)
                            ));
                        }
                    }
                    if i < j {
                        let a = self.nop(i, mask).mul(self.nop(j, mask));
                        let b = self.nop(j, mask).mul(self.nop(i, mask));
                        if a != b {
                            failures.push(format!(
                                "N_{} and N_{} do not commute on component {:?}",
                                i,
                                j,
                                mask_to_set(mask)
                            ));
                        }
                    }
                }
            }
        }
        ValidationReport { failures }
    }

    /// Componentwise direct sum; maps become block diagonal.
    pub fn direct_sum(a: &NCObject, b: &NCObject) -> Result<Self, NCError> {
        if a.n != b.n {
            return Err(NCError::ShapeMismatch("coordinate counts differ".into()));
        }
        let size = 1usize << a.n;
        let dims: Vec<usize> = (0..size).map(|m| a.dims[m] + b.dims[m]).collect();
        let mut can = BTreeMap::new();
        let mut var = BTreeMap::new();
        let mut nop = BTreeMap::new();
        for mask in 0..size {
            for i in 0..a.n {
                if mask >> i & 1 == 0 {
                    can.insert((i, mask), a.can(i, mask).direct_sum(b.can(i, mask)));
                } else {
                    var.insert((i, mask), a.var(i, mask).direct_sum(b.var(i, mask)));
                }
                nop.insert((i, mask), a.nop(i, mask).direct_sum(b.nop(i, mask)));
            }
        }
        NCObject::new(a.n, dims, can, var, nop)
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.failures.first().map(|s| s.as_str())
    }
}

fn add_block(m: &mut RatMatrix, row0: usize, col0: usize, b: &RatMatrix) {
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            let v = m[(row0 + i, col0 + j)].clone() + b[(i, j)].clone();
            m[(row0 + i, col0 + j)] = v;
        }
    }
}

/// Reduction coefficients of the monic relation prod_{i in ile}(N_i - N) = 0
/// over component `igt`: N^r = sum_s C_s N^s with C_s a polynomial in the
/// commuting N_i.
fn reduction_coeffs(x: &NCObject, ile: usize, igt: usize) -> Vec<RatMatrix> {
    let d = x.dim_of(igt);
    let r = ile.count_ones() as usize;
    let mut elem = vec![RatMatrix::zero(d, d); r + 1];
    elem[0] = RatMatrix::identity(d);
    let mut count = 0usize;
    for i in mask_to_set(ile) {
        let a = x.nop(i, igt);
        for j in (1..=count + 1).rev() {
            elem[j] = elem[j].add(&elem[j - 1].mul(a));
        }
        count += 1;
    }
    (0..r)
        .map(|s| if (r - 1 - s) % 2 == 0 { elem[r - s].clone() } else { elem[r - s].neg() })
        .collect()
}

/// Multiplication by (ni - N) from r slots into r+1 slots, no reduction.
fn mult_extend(ni: &RatMatrix, r: usize) -> RatMatrix {
    let d = ni.rows();
    let mut m = RatMatrix::zero((r + 1) * d, r * d);
    let neg_id = RatMatrix::identity(d).neg();
    for s in 0..r {
        add_block(&mut m, s * d, s * d, ni);
        add_block(&mut m, (s + 1) * d, s * d, &neg_id);
    }
    m
}

/// Multiplication by (ni - N) on r slots, top power reduced via `coeffs`.
fn mult_reduce(ni: &RatMatrix, r: usize, coeffs: &[RatMatrix]) -> RatMatrix {
    let d = ni.rows();
    let mut m = RatMatrix::zero(r * d, r * d);
    let neg_id = RatMatrix::identity(d).neg();
    for s in 0..r {
        add_block(&mut m, s * d, s * d, ni);
        if s + 1 < r {
            add_block(&mut m, (s + 1) * d, s * d, &neg_id);
        }
    }
    for (t, c) in coeffs.iter().enumerate() {
        add_block(&mut m, t * d, (r - 1) * d, &c.neg());
    }
    m
}

/// The induced identity map from r slots to r-1 slots: the top power is
/// rewritten through the smaller relation's coefficients.
fn reduce_identity(d: usize, r: usize, small_coeffs: &[RatMatrix]) -> RatMatrix {
    let mut m = RatMatrix::zero((r - 1) * d, r * d);
    let id = RatMatrix::identity(d);
    for s in 0..r - 1 {
        add_block(&mut m, s * d, s * d, &id);
    }
    for (t, c) in small_coeffs.iter().enumerate() {
        add_block(&mut m, t * d, (r - 1) * d, c);
    }
    m
}

/// Multiplication by N on r slots with top-power reduction.
fn mult_monodromy(d: usize, r: usize, coeffs: &[RatMatrix]) -> RatMatrix {
    let mut m = RatMatrix::zero(r * d, r * d);
    let id = RatMatrix::identity(d);
    for s in 0..r.saturating_sub(1) {
        add_block(&mut m, (s + 1) * d, s * d, &id);
    }
    for (t, c) in coeffs.iter().enumerate() {
        add_block(&mut m, t * d, (r - 1) * d, c);
    }
    m
}

/// Blockwise application of one map to each of r slots.
fn blockwise(map: &RatMatrix, r: usize) -> RatMatrix {
    let mut m = RatMatrix::zero(r * map.rows(), r * map.cols());
    for s in 0..r {
        add_block(&mut m, s * map.rows(), s * map.cols(), map);
    }
    m
}

/// The limit object along the first m coordinates together with its
/// monodromy endomorphism on each component.
#[derive(Clone, Debug)]
pub struct PsiObject {
    pub object: NCObject,
    /// One endomorphism per component bitmask.
    pub monodromy: Vec<RatMatrix>,
    pub m: usize,
}

impl PsiObject {
    /// First failure of the intertwining of the monodromy with any
    /// structure map, or of its nilpotency.
    pub fn monodromy_commutes(&self) -> Option<String> {
        let n = self.object.n();
        for mask in 0..1usize << n {
            let mon = &self.monodromy[mask];
            if !mon.pow(mon.rows()).is_zero() {
                return Some(format!(
                    "monodromy not nilpotent on component {:?}",
                    mask_to_set(mask)
                ));
            }
            for i in 0..n {
                let bit = 1usize << i;
                if mask & bit == 0 {
                    let map = self.object.can(i, mask);
                    if self.monodromy[mask | bit].mul(map) != map.mul(mon) {
                        return Some(format!(
                            "monodromy does not commute with can_{} on component {:?}",
                            i,
                            mask_to_set(mask)
                        ));
                    }
                } else {
                    let map = self.object.var(i, mask);
                    if self.monodromy[mask & !bit].mul(map) != map.mul(mon) {
                        return Some(format!(
                            "monodromy does not commute with Var_{} on component {:?}",
                            i,
                            mask_to_set(mask)
                        ));
                    }
                }
                let map = self.object.nop(i, mask);
                if mon.mul(map) != map.mul(mon) {
                    return Some(format!(
                        "monodromy does not commute with N_{} on component {:?}",
                        i,
                        mask_to_set(mask)
                    ));
                }
            }
        }
        None
    }
}

/// Limit construction along the product of the first m coordinates. Each
/// component I is replaced by r = |I ∩ {0..m-1}| stacked copies of the
/// component at I∖{0..m-1}, carrying the basis 1, N, …, N^{r-1} modulo the
/// relation prod(N_i - N) = 0; structure maps become multiplication by
/// (N_i - N), relation-induced reductions of the identity, or blockwise
/// copies of the originals, and the monodromy is multiplication by N.
pub fn nearby_cycles(x: &NCObject, m: usize) -> Result<PsiObject, NCError> {
    if m < 1 || m > x.n() {
        return Err(NCError::MOutOfRange { m, n: x.n() });
    }
    let report = x.validate();
    if let Some(first) = report.first_failure() {
        return Err(NCError::InvalidObject(first.to_string()));
    }
    let n = x.n();
    let size = 1usize << n;
    let low = (1usize << m) - 1;
    let comp = |mask: usize| (mask & low, mask & !low);
    let mut dims = vec![0usize; size];
    for mask in 0..size {
        let (ile, igt) = comp(mask);
        dims[mask] = ile.count_ones() as usize * x.dim_of(igt);
    }
    let mut can = BTreeMap::new();
    let mut var = BTreeMap::new();
    let mut nop = BTreeMap::new();
    let mut monodromy = Vec::with_capacity(size);
    for mask in 0..size {
        let (ile, igt) = comp(mask);
        let r = ile.count_ones() as usize;
        let d = x.dim_of(igt);
        let coeffs = reduction_coeffs(x, ile, igt);
        for i in 0..n {
            let bit = 1usize << i;
            if mask & bit == 0 {
                if i < m {
                    can.insert((i, mask), mult_extend(x.nop(i, igt), r));
                } else {
                    can.insert((i, mask), blockwise(x.can(i, igt), r));
                }
            } else if i < m {
                let small = reduction_coeffs(x, ile & !bit, igt);
                var.insert((i, mask), reduce_identity(d, r, &small));
            } else {
                var.insert((i, mask), blockwise(x.var(i, igt), r));
            }
            if i < m {
                nop.insert((i, mask), mult_reduce(x.nop(i, igt), r, &coeffs));
            } else {
                nop.insert((i, mask), blockwise(x.nop(i, igt), r));
            }
        }
        monodromy.push(mult_monodromy(d, r, &coeffs));
    }
    let object = NCObject::new(n, dims, can, var, nop)?;
    let out_report = object.validate();
    assert!(
        out_report.passed(),
        "limit object fails validation: {}",
        out_report.first_failure().unwrap_or("")
    );
    let psi = PsiObject { object, monodromy, m };
    if let Some(fail) = psi.monodromy_commutes() {
        panic!("limit monodromy breaks an invariant: {}", fail);
    }
    Ok(psi)
}

/// An `NCObject` with a filtration on each component which every structure
/// map respects degree-zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredNCObject {
    object: NCObject,
    filtrations: Vec<Filtration>,
}

impl FilteredNCObject {
    pub fn new(object: NCObject, filtrations: Vec<Filtration>) -> Result<Self, NCError> {
        let n = object.n();
        let size = 1usize << n;
        if filtrations.len() != size {
            return Err(NCError::ShapeMismatch(format!(
                "expected {} filtrations, got {}",
                size,
                filtrations.len()
            )));
        }
        for (mask, f) in filtrations.iter().enumerate() {
            if f.ambient_dim() != object.dim_of(mask) {
                return Err(NCError::ShapeMismatch(format!(
                    "filtration on component {:?} has ambient {}",
                    mask_to_set(mask),
                    f.ambient_dim()
                )));
            }
        }
        let check = |map: &RatMatrix, src: usize, tgt: usize| -> Option<i64> {
            for (&k, s) in filtrations[src].steps() {
                if !filtrations[tgt].step(k).contains(&s.map_by(map)) {
                    return Some(k);
                }
            }
            None
        };
        for mask in 0..size {
            for i in 0..n {
                let bit = 1usize << i;
                let bad = if mask & bit == 0 {
                    check(object.can(i, mask), mask, mask | bit).map(|k| ("can", k))
                } else {
                    check(object.var(i, mask), mask, mask & !bit).map(|k| ("Var", k))
                };
                if let Some((kind, k)) = bad {
                    return Err(NCError::IncompatibleFiltration {
                        component: mask,
                        detail: format!("{}_{} moves step {} out", kind, i, k),
                    });
                }
                if let Some(k) = check(object.nop(i, mask), mask, mask) {
                    return Err(NCError::IncompatibleFiltration {
                        component: mask,
                        detail: format!("N_{} moves step {} out", i, k),
                    });
                }
            }
        }
        Ok(FilteredNCObject { object, filtrations })
    }

    /// Local system of the orbit datum's own variables, every component
    /// filtered by the datum's weight filtration.
    pub fn from_orbit(o: &crate::orbit::OrbitDatum) -> Self {
        let object = NCObject::from_local_system(o.dim(), o.nilpotents())
            .expect("orbit operators commute");
        let size = 1usize << o.variables();
        FilteredNCObject::new(object, vec![o.weight_filt().clone(); size])
            .expect("weight filtration is preserved by the orbit operators")
    }

    /// Pullback shape: n coordinates all acting through the datum's total
    /// operator. This is the diagonal situation in which every nonempty
    /// subset of logs shares one weight filtration.
    pub fn from_orbit_pullback(o: &crate::orbit::OrbitDatum, n: usize) -> Self {
        let logs = vec![o.total_nilpotent(); n];
        let object =
            NCObject::from_local_system(o.dim(), &logs).expect("equal logs commute");
        FilteredNCObject::new(object, vec![o.weight_filt().clone(); 1 << n])
            .expect("weight filtration is preserved by the total operator")
    }

    pub fn object(&self) -> &NCObject {
        &self.object
    }

    pub fn filtration(&self, mask: usize) -> &Filtration {
        &self.filtrations[mask]
    }
}

/// One subset's verdict in the cone condition check.
#[derive(Clone, Debug)]
pub struct MonSubsetReport {
    pub subset: Vec<usize>,
    pub passed: bool,
    pub witness: Option<(i64, Subspace)>,
}

#[derive(Clone, Debug)]
pub struct MonReport {
    pub passed: bool,
    pub subsets: Vec<MonSubsetReport>,
}

impl MonReport {
    pub fn first_failing_subset(&self) -> Option<&MonSubsetReport> {
        self.subsets.iter().find(|s| !s.passed)
    }
}

/// For every nonempty subset S of the logs: the weight filtration of
/// sum_{i in S} N_i centered at zero must equal w shifted by k.
pub fn check_monodromy_condition(logs: &[NilpotentOp], k: i64, w: &Filtration) -> MonReport {
    let n = logs.len();
    let expected = w.shift(k);
    let mut subsets = Vec::new();
    for mask in 1..1usize << n {
        let mut sum = RatMatrix::zero(w.ambient_dim(), w.ambient_dim());
        for i in mask_to_set(mask) {
            sum = sum.add(logs[i].matrix());
        }
        let op = NilpotentOp::new(sum).expect("sum of commuting nilpotents");
        let cand = weight_filtration(&op, 0);
        let witness = first_difference(&cand, &expected);
        subsets.push(MonSubsetReport {
            subset: mask_to_set(mask),
            passed: witness.is_none(),
            witness,
        });
    }
    MonReport { passed: subsets.iter().all(|s| s.passed), subsets }
}

/// One limit component's verdict in the weight comparison.
#[derive(Clone, Debug)]
pub struct PsiComponentReport {
    pub component: Vec<usize>,
    pub dim: usize,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<(i64, Subspace)>,
}

#[derive(Clone, Debug)]
pub struct PsiWeightReport {
    pub passed: bool,
    pub components: Vec<PsiComponentReport>,
}

/// The flagship dual-route comparison. On each nonzero component of the
/// limit object, the weight filtration of the monodromy centered at k must
/// equal the filtration of the monodromy relative to the blockwise-induced
/// input filtration. The input must be in local-system form and its logs
/// must pass the cone condition, otherwise the check refuses with a
/// diagnostic.
pub fn check_nearby_weight_comparison(
    v: &FilteredNCObject,
    k: i64,
    m: usize,
) -> Result<PsiWeightReport, NCError> {
    let x = v.object();
    let n = x.n();
    if m < 1 || m > n {
        return Err(NCError::MOutOfRange { m, n });
    }
    let report = x.validate();
    if let Some(first) = report.first_failure() {
        return Err(NCError::InvalidObject(first.to_string()));
    }
    let h = x.dim_of(0);
    let id = RatMatrix::identity(h);
    for mask in 0..1usize << n {
        if x.dim_of(mask) != h {
            return Err(NCError::NotLocalSystemShape(format!(
                "component {:?} has dimension {}",
                mask_to_set(mask),
                x.dim_of(mask)
            )));
        }
        for i in 0..n {
            if mask >> i & 1 == 0 {
                if x.can(i, mask) != x.nop(i, 0) {
                    return Err(NCError::NotLocalSystemShape(format!(
                        "can_{} on {:?} is not the log",
                        i,
                        mask_to_set(mask)
                    )));
                }
            } else if x.var(i, mask) != &id {
                return Err(NCError::NotLocalSystemShape(format!(
                    "Var_{} on {:?} is not the identity",
                    i,
                    mask_to_set(mask)
                )));
            }
            if x.nop(i, mask) != x.nop(i, 0) {
                return Err(NCError::NotLocalSystemShape(format!(
                    "N_{} varies across components",
                    i
                )));
            }
        }
        if v.filtration(mask) != v.filtration(0) {
            return Err(NCError::NotLocalSystemShape(format!(
                "filtration varies on component {:?}",
                mask_to_set(mask)
            )));
        }
    }
    let logs: Vec<NilpotentOp> = (0..n)
        .map(|i| NilpotentOp::new(x.nop(i, 0).clone()).expect("validated logs are nilpotent"))
        .collect();
    let w = v.filtration(0);
    let mon = check_monodromy_condition(&logs, k, w);
    if let Some(bad) = mon.first_failing_subset() {
        return Err(NCError::MonViolated { subset: bad.subset.clone() });
    }
    let psi = nearby_cycles(x, m)?;
    let low = (1usize << m) - 1;
    let mut components = Vec::new();
    for mask in 0..1usize << n {
        let dim = psi.object.dim_of(mask);
        if dim == 0 {
            continue;
        }
        let r = (mask & low).count_ones() as usize;
        let op = NilpotentOp::new(psi.monodromy[mask].clone())
            .expect("monodromy is nilpotent by construction");
        let lhs = weight_filtration(&op, k);
        let induced = block_diagonal(w, r);
        let (passed, detail, witness) = match relative_weight_filtration(&op, &induced)? {
            RelativeFiltration::NonExistent => (
                false,
                "relative filtration does not exist".to_string(),
                None,
            ),
            RelativeFiltration::Exists(rel) => match first_difference(&lhs, &rel) {
                None => (true, "both routes agree".to_string(), None),
                Some((step, s)) => (
                    false,
                    format!("routes differ at index {}", step),
                    Some((step, s)),
                ),
            },
        };
        components.push(PsiComponentReport {
            component: mask_to_set(mask),
            dim,
            passed,
            detail,
            witness,
        });
    }
    Ok(PsiWeightReport { passed: components.iter().all(|c| c.passed), components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::OrbitDatum;

    fn jordan(m: usize) -> NilpotentOp {
        NilpotentOp::jordan_block(m)
    }

    #[test]
    fn zero_object_is_valid() {
        assert!(NCObject::zero(2).validate().passed());
    }

    #[test]
    fn rank_one_local_system_shape() {
        let x = NCObject::from_local_system(1, &[NilpotentOp::zero(1)]).unwrap();
        assert_eq!(x.dims(), &[1, 1]);
        assert!(x.can(0, 0).is_zero());
        assert_eq!(x.var(0, 1), &RatMatrix::identity(1));
        assert!(x.validate().passed());
    }

    #[test]
    fn identity_n_fails_nilpotency_first() {
        let mut can = BTreeMap::new();
        let mut var = BTreeMap::new();
        let mut nop = BTreeMap::new();
        can.insert((0, 0), RatMatrix::zero(1, 1));
        var.insert((0, 1), RatMatrix::zero(1, 1));
        nop.insert((0, 0), RatMatrix::identity(1));
        nop.insert((0, 1), RatMatrix::identity(1));
        let x = NCObject::new(1, vec![1, 1], can, var, nop).unwrap();
        let report = x.validate();
        assert!(!report.passed());
        assert!(report.first_failure().unwrap().contains("not nilpotent"));
    }

    #[test]
    fn local_system_with_jordan_log_is_valid() {
        let x = NCObject::from_local_system(2, &[jordan(2)]).unwrap();
        assert!(x.validate().passed());
        assert_eq!(x.nop(0, 1), jordan(2).matrix());
    }

    #[test]
    fn noncommuting_logs_are_rejected() {
        let a = NilpotentOp::new(RatMatrix::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]))
            .unwrap();
        let b = NilpotentOp::new(RatMatrix::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]]))
            .unwrap();
        assert_eq!(
            NCObject::from_local_system(3, &[a, b]),
            Err(NCError::LogsDoNotCommute { i: 0, j: 1 })
        );
    }

    #[test]
    fn psi_of_constant_rank_one() {
        let x = NCObject::from_local_system(1, &[NilpotentOp::zero(1)]).unwrap();
        let psi = nearby_cycles(&x, 1).unwrap();
        assert_eq!(psi.object.dim_of(0), 0);
        assert_eq!(psi.object.dim_of(1), 1);
        assert!(psi.monodromy[1].is_zero());
        assert!(psi.object.validate().passed());
    }

    #[test]
    fn psi_single_variable_reproduces_the_log() {
        let x = NCObject::from_local_system(3, &[jordan(3)]).unwrap();
        let psi = nearby_cycles(&x, 1).unwrap();
        assert_eq!(psi.object.dim_of(1), 3);
        assert_eq!(&psi.monodromy[1], jordan(3).matrix());
        assert!(psi.monodromy_commutes().is_none());
    }

    #[test]
    fn psi_dimension_formula_two_variables() {
        let logs = [jordan(2), NilpotentOp::new(jordan(2).matrix().scale(&crate::linalg::qi(2))).unwrap()];
        let x = NCObject::from_local_system(2, &logs).unwrap();
        for m in 1..=2 {
            let psi = nearby_cycles(&x, m).unwrap();
            let low = (1usize << m) - 1;
            for mask in 0..4usize {
                let r = (mask & low).count_ones() as usize;
                let base = x.dim_of(mask & !low);
                assert_eq!(psi.object.dim_of(mask), r * base);
            }
            assert!(psi.object.validate().passed());
            assert!(psi.monodromy_commutes().is_none());
        }
    }

    #[test]
    fn psi_respects_direct_sums_up_to_slot_reordering() {
        let a = NCObject::from_local_system(2, &[jordan(2), jordan(2)]).unwrap();
        let b = NCObject::from_local_system(1, &[NilpotentOp::zero(1), NilpotentOp::zero(1)])
            .unwrap();
        let sum = NCObject::direct_sum(&a, &b).unwrap();
        let psi_sum = nearby_cycles(&sum, 2).unwrap();
        let psi_a = nearby_cycles(&a, 2).unwrap();
        let psi_b = nearby_cycles(&b, 2).unwrap();
        let split = NCObject::direct_sum(&psi_a.object, &psi_b.object).unwrap();
        // permutation sending slot-major over E+F to the E-blocks then
        // F-blocks layout
        let (da, db) = (2usize, 1usize);
        for mask in 0..4usize {
            let r = mask.count_ones() as usize;
            let dim = psi_sum.object.dim_of(mask);
            assert_eq!(dim, split.dim_of(mask));
            let mut p = RatMatrix::zero(dim, dim);
            for s in 0..r {
                for i in 0..da {
                    p[(s * da + i, s * (da + db) + i)] = crate::linalg::qi(1);
                }
                for j in 0..db {
                    p[(r * da + s * db + j, s * (da + db) + da + j)] = crate::linalg::qi(1);
                }
            }
            let lhs = p.mul(&psi_sum.monodromy[mask]);
            let split_mon = psi_a.monodromy[mask].direct_sum(&psi_b.monodromy[mask]);
            assert_eq!(lhs, split_mon.mul(&p), "monodromy mismatch on {:#b}", mask);
            for i in 0..2usize {
                if mask >> i & 1 == 0 {
                    let tgt = mask | 1 << i;
                    let rt = tgt.count_ones() as usize;
                    let dt = psi_sum.object.dim_of(tgt);
                    let mut pt = RatMatrix::zero(dt, dt);
                    for s in 0..rt {
                        for ii in 0..da {
                            pt[(s * da + ii, s * (da + db) + ii)] = crate::linalg::qi(1);
                        }
                        for j in 0..db {
                            pt[(rt * da + s * db + j, s * (da + db) + da + j)] =
                                crate::linalg::qi(1);
                        }
                    }
                    let split_can = psi_a.object.can(i, mask).direct_sum(psi_b.object.can(i, mask));
                    assert_eq!(
                        pt.mul(psi_sum.object.can(i, mask)),
                        split_can.mul(&p),
                        "can_{} mismatch on {:#b}",
                        i,
                        mask
                    );
                }
            }
        }
    }

    #[test]
    fn mon_condition_trivial_logs_pass() {
        let logs = [NilpotentOp::zero(2), NilpotentOp::zero(2)];
        let w = Filtration::pure(2, 5);
        let report = check_monodromy_condition(&logs, 5, &w);
        assert!(report.passed);
        assert_eq!(report.subsets.len(), 3);
    }

    #[test]
    fn mon_condition_single_variable_is_definitional() {
        let o = OrbitDatum::sl2_block(3, 0).unwrap();
        let report =
            check_monodromy_condition(&[o.total_nilpotent()], o.weight(), o.weight_filt());
        assert!(report.passed);
    }

    #[test]
    fn mon_condition_detects_mismatched_variable() {
        let logs = [jordan(2), NilpotentOp::zero(2)];
        let w = weight_filtration(&jordan(2), 1);
        let report = check_monodromy_condition(&logs, 1, &w);
        assert!(!report.passed);
        assert_eq!(report.first_failing_subset().unwrap().subset, vec![1]);
    }

    #[test]
    fn weight_comparison_on_trivial_rank_one() {
        let v = FilteredNCObject::from_orbit(&OrbitDatum::trivial(1));
        let report = check_nearby_weight_comparison(&v, 0, 1).unwrap();
        assert!(report.passed);
        assert_eq!(report.components.len(), 1);
        assert_eq!(report.components[0].dim, 1);
    }

    #[test]
    fn weight_comparison_on_weight_one_block() {
        let o = OrbitDatum::sl2_block(2, 0).unwrap();
        let v = FilteredNCObject::from_orbit(&o);
        let report = check_nearby_weight_comparison(&v, 1, 1).unwrap();
        assert!(report.passed, "{:?}", report.components);
    }

    #[test]
    fn weight_comparison_on_diagonal_pullback() {
        let o = OrbitDatum::sl2_block(3, 0).unwrap();
        let v = FilteredNCObject::from_orbit_pullback(&o, 2);
        let report = check_nearby_weight_comparison(&v, o.weight(), 2).unwrap();
        assert!(report.passed, "{:?}", report.components);
        let deep = report.components.iter().find(|c| c.component == vec![0, 1]).unwrap();
        assert_eq!(deep.dim, 6);
    }

    #[test]
    fn weight_comparison_refuses_mon_violation() {
        let logs = [jordan(2), NilpotentOp::zero(2)];
        let x = NCObject::from_local_system(2, &logs).unwrap();
        let w = weight_filtration(&jordan(2), 1);
        let v = FilteredNCObject::new(x, vec![w; 4]).unwrap();
        match check_nearby_weight_comparison(&v, 1, 2) {
            Err(NCError::MonViolated { subset }) => assert_eq!(subset, vec![1]),
            other => panic!("expected a cone-condition refusal, got {:?}", other),
        }
    }

    #[test]
    fn filtered_object_rejects_incompatible_steps() {
        let x = NCObject::from_local_system(2, &[jordan(2)]).unwrap();
        let lower = Filtration::pure(2, 0);
        let higher = Filtration::pure(2, 1);
        // Var maps the full step at 0 into a component whose step 0 is zero
        let res = FilteredNCObject::new(x, vec![higher, lower]);
        assert!(matches!(res, Err(NCError::IncompatibleFiltration { .. })));
    }

    #[test]
    fn psi_rejects_out_of_range_m() {
        let x = NCObject::from_local_system(2, &[jordan(2)]).unwrap();
        assert!(matches!(nearby_cycles(&x, 0), Err(NCError::MOutOfRange { .. })));
        assert!(matches!(nearby_cycles(&x, 2), Err(NCError::MOutOfRange { .. })));
    }
}
