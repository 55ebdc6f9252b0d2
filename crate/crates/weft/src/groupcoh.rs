//! Cohomology of discrete groups from finite free resolutions.
//!
//! A group here is one of four built-in kinds with a decidable normal form:
//! lattices, free groups, the integral Heisenberg group, and unimodular
//! semidirect products of a lattice by Z. Resolutions are finite complexes of
//! free modules over the integral group ring, checked to square to zero on
//! construction; evaluating a resolution against a matrix action of the group
//! produces an explicit rational cochain complex whose cohomology is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, One, Zero};

use crate::linalg::{ChainComplex, CohomologyPiece, Rat, RatMatrix, Subspace};

/// Group element in the normal form of its [`Group`] kind.
///
/// Lattices store exponent vectors, free groups store reduced letter strings
/// (letter `k+1` is generator `k`, negated for inverses), and the Heisenberg
/// and semidirect kinds store the three exponents of their normal forms.
pub type Word = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    /// Z^n with commuting generators.
    FreeAbelian(usize),
    /// Free group on the given number of letters.
    Free(usize),
    /// Integral Heisenberg group: x, y and a central z with xy = yxz.
    /// Words are the exponents (a, b, c) of the normal form x^a y^b z^c.
    Heisenberg,
    /// Z acting on Z^2 through a unimodular integer matrix `u`:
    /// generators x, y commute and t x^v t^{-1} = x^{u v}. Words are the
    /// exponents (a, b, c) of the normal form x^a y^b t^c.
    LatticeSemidirect { u: [[i64; 2]; 2] },
}

fn mat2_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat2_det(u: [[i64; 2]; 2]) -> i64 {
    u[0][0] * u[1][1] - u[0][1] * u[1][0]
}

// inverse of a determinant +-1 integer matrix, exact over the integers
fn mat2_unimodular_inverse(u: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let d = mat2_det(u);
    debug_assert!(d == 1 || d == -1);
    [[d * u[1][1], -d * u[0][1]], [-d * u[1][0], d * u[0][0]]]
}

fn mat2_pow(u: [[i64; 2]; 2], e: i64) -> [[i64; 2]; 2] {
    let base = if e >= 0 { u } else { mat2_unimodular_inverse(u) };
    let mut out = [[1, 0], [0, 1]];
    for _ in 0..e.unsigned_abs() {
        out = mat2_mul(out, base);
    }
    out
}

impl Group {
    pub fn generator_count(&self) -> usize {
        match self {
            Group::FreeAbelian(n) | Group::Free(n) => *n,
            Group::Heisenberg | Group::LatticeSemidirect { .. } => 3,
        }
    }

    pub fn identity_word(&self) -> Word {
        match self {
            Group::FreeAbelian(n) => vec![0; *n],
            Group::Free(_) => Vec::new(),
            Group::Heisenberg | Group::LatticeSemidirect { .. } => vec![0; 3],
        }
    }

    pub fn generator_word(&self, i: usize) -> Word {
        assert!(i < self.generator_count(), "generator index out of range");
        match self {
            Group::Free(_) => vec![i as i64 + 1],
            _ => {
                let mut w = self.identity_word();
                w[i] = 1;
                w
            }
        }
    }

    pub fn word_mul(&self, a: &Word, b: &Word) -> Word {
        match self {
            Group::FreeAbelian(n) => {
                assert!(a.len() == *n && b.len() == *n, "word length mismatch");
                a.iter().zip(b).map(|(x, y)| x + y).collect()
            }
            Group::Free(_) => {
                let mut out = a.clone();
                for &letter in b {
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                out
            }
            Group::Heisenberg => {
                // y^b x^d = x^d y^b z^{-bd}, with z central
                vec![a[0] + b[0], a[1] + b[1], a[2] + b[2] - a[1] * b[0]]
            }
            Group::LatticeSemidirect { u } => {
                let p = mat2_pow(*u, a[2]);
                vec![
                    a[0] + p[0][0] * b[0] + p[0][1] * b[1],
                    a[1] + p[1][0] * b[0] + p[1][1] * b[1],
                    a[2] + b[2],
                ]
            }
        }
    }

    pub fn word_inv(&self, a: &Word) -> Word {
        match self {
            Group::FreeAbelian(_) => a.iter().map(|x| -x).collect(),
            Group::Free(_) => a.iter().rev().map(|x| -x).collect(),
            Group::Heisenberg => vec![-a[0], -a[1], -a[2] - a[0] * a[1]],
            Group::LatticeSemidirect { u } => {
                let p = mat2_pow(*u, -a[2]);
                vec![
                    -(p[0][0] * a[0] + p[0][1] * a[1]),
                    -(p[1][0] * a[0] + p[1][1] * a[1]),
                    -a[2],
                ]
            }
        }
    }

    pub fn one(&self) -> GroupRingElement {
        GroupRingElement::monomial(self.identity_word(), 1)
    }

    pub fn generator(&self, i: usize) -> GroupRingElement {
        GroupRingElement::monomial(self.generator_word(i), 1)
    }

    pub fn ring_mul(&self, a: &GroupRingElement, b: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (wa, ca) in a.terms() {
            for (wb, cb) in b.terms() {
                out.accumulate(self.word_mul(wa, wb), ca * cb);
            }
        }
        out
    }
}

/// Finite integer combination of group elements in normal form.
///
/// Terms with zero coefficient are never stored, so structural equality
/// decides equality in the group ring.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement { terms: BTreeMap::new() }
    }

    pub fn monomial(word: Word, coeff: i64) -> Self {
        let mut e = GroupRingElement::zero();
        e.accumulate(word, BigInt::from(coeff));
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Word, BigInt> {
        &self.terms
    }

    fn accumulate(&mut self, word: Word, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(word.clone()).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.accumulate(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GroupRingElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    /// Image under the augmentation map that sends every group element to 1.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupError {
    GroupMismatch,
    GeneratorCount { expected: usize, got: usize },
    NotInvertible { generator: usize },
    RelationViolated { detail: String },
    Shape(String),
    NotAResolution(String),
    UnimodularRequired,
    WindowUnsupported,
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::GroupMismatch => write!(f, "resolution and action have different groups"),
            GroupError::GeneratorCount { expected, got } => {
                write!(f, "expected {} generator matrices, got {}", expected, got)
            }
            GroupError::NotInvertible { generator } => {
                write!(f, "generator {} is not invertible", generator)
            }
            GroupError::RelationViolated { detail } => write!(f, "relation violated: {}", detail),
            GroupError::Shape(detail) => write!(f, "{}", detail),
            GroupError::NotAResolution(detail) => write!(f, "not a resolution: {}", detail),
            GroupError::UnimodularRequired => {
                write!(f, "semidirect twist matrix must have determinant 1 or -1")
            }
            GroupError::WindowUnsupported => {
                write!(f, "no word window is defined for this group kind")
            }
        }
    }
}

impl std::error::Error for GroupError {}

/// Matrix representation of a built-in group on a rational vector space.
///
/// Construction checks that every generator is invertible and that the
/// defining relations of the group kind hold, so any word can be evaluated
/// through the homomorphism property afterwards.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: Group,
    generators: Vec<RatMatrix>,
    inverses: Vec<RatMatrix>,
    dim: usize,
}

impl GroupAction {
    pub fn new(group: Group, generators: Vec<RatMatrix>) -> Result<Self, GroupError> {
        let expected = group.generator_count();
        if generators.len() != expected {
            return Err(GroupError::GeneratorCount { expected, got: generators.len() });
        }
        let dim = generators.first().map(|m| m.rows()).unwrap_or(0);
        for (i, m) in generators.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(GroupError::Shape(format!(
                    "generator {} is {}x{}, expected {}x{}",
                    i,
                    m.rows(),
                    m.cols(),
                    dim,
                    dim
                )));
            }
        }
        let mut inverses = Vec::with_capacity(generators.len());
        for (i, m) in generators.iter().enumerate() {
            if !m.is_invertible() {
                return Err(GroupError::NotInvertible { generator: i });
            }
            inverses.push(m.inverse());
        }
        let action = GroupAction { group, generators, inverses, dim };
        action.check_relations()?;
        Ok(action)
    }

    /// Trivial group acting on a space of the given dimension.
    pub fn trivial(dim: usize) -> Self {
        GroupAction {
            group: Group::FreeAbelian(0),
            generators: Vec::new(),
            inverses: Vec::new(),
            dim,
        }
    }

    fn check_relations(&self) -> Result<(), GroupError> {
        let g = &self.generators;
        match &self.group {
            Group::FreeAbelian(n) => {
                for i in 0..*n {
                    for j in i + 1..*n {
                        if g[i].mul(&g[j]) != g[j].mul(&g[i]) {
                            return Err(GroupError::RelationViolated {
                                detail: format!("generators {} and {} do not commute", i, j),
                            });
                        }
                    }
                }
            }
            Group::Free(_) => {}
            Group::Heisenberg => {
                let (x, y, z) = (&g[0], &g[1], &g[2]);
                if x.mul(y) != y.mul(x).mul(z) {
                    return Err(GroupError::RelationViolated {
                        detail: "xy = yxz fails".into(),
                    });
                }
                if x.mul(z) != z.mul(x) || y.mul(z) != z.mul(y) {
                    return Err(GroupError::RelationViolated {
                        detail: "z is not central".into(),
                    });
                }
            }
            Group::LatticeSemidirect { u } => {
                let (x, y, t) = (&g[0], &g[1], &g[2]);
                if x.mul(y) != y.mul(x) {
                    return Err(GroupError::RelationViolated {
                        detail: "lattice generators do not commute".into(),
                    });
                }
                let phi_x = self.generator_power(0, u[0][0]).mul(&self.generator_power(1, u[1][0]));
                let phi_y = self.generator_power(0, u[0][1]).mul(&self.generator_power(1, u[1][1]));
                if t.mul(x) != phi_x.mul(t) || t.mul(y) != phi_y.mul(t) {
                    return Err(GroupError::RelationViolated {
                        detail: "conjugation by t does not twist the lattice by u".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &RatMatrix {
        &self.generators[i]
    }

    fn generator_power(&self, i: usize, e: i64) -> RatMatrix {
        if e >= 0 {
            self.generators[i].pow(e as usize)
        } else {
            self.inverses[i].pow((-e) as usize)
        }
    }

    pub fn eval_word(&self, w: &Word) -> RatMatrix {
        match &self.group {
            Group::FreeAbelian(n) => {
                assert_eq!(w.len(), *n, "word length mismatch");
                let mut out = RatMatrix::identity(self.dim);
                for (i, &e) in w.iter().enumerate() {
                    if e != 0 {
                        out = out.mul(&self.generator_power(i, e));
                    }
                }
                out
            }
            Group::Free(_) => {
                let mut out = RatMatrix::identity(self.dim);
                for &letter in w {
                    let m = if letter > 0 {
                        &self.generators[(letter - 1) as usize]
                    } else {
                        &self.inverses[(-letter - 1) as usize]
                    };
                    out = out.mul(m);
                }
                out
            }
            Group::Heisenberg | Group::LatticeSemidirect { .. } => self
                .generator_power(0, w[0])
                .mul(&self.generator_power(1, w[1]))
                .mul(&self.generator_power(2, w[2])),
        }
    }

    pub fn eval(&self, e: &GroupRingElement) -> RatMatrix {
        let mut out = RatMatrix::zero(self.dim, self.dim);
        for (w, c) in e.terms() {
            let coeff = Rat::from_integer(c.clone());
            out = out.add(&self.eval_word(w).scale(&coeff));
        }
        out
    }
}

/// Common fixed space of all generators.
pub fn invariants(a: &GroupAction) -> Subspace {
    let eye = RatMatrix::identity(a.dim());
    let mut inv = Subspace::full(a.dim());
    for g in a.generators() {
        inv = inv.intersect(&g.sub(&eye).kernel());
    }
    inv
}

/// Finite free resolution of the trivial module over an integral group ring.
///
/// `boundary(i)` is the matrix of the map from the rank `ranks[i]` free
/// module to the rank `ranks[i-1]` one, stored row-per-source-generator, and
/// the augmentation records the integer image of each bottom generator.
/// Construction verifies that consecutive boundaries compose to zero and
/// that the augmentation kills the first boundary; exactness is the
/// caller's obligation for hand-supplied data and can be probed on a window
/// of the group through [`check_windowed_exactness`].
#[derive(Clone, Debug)]
pub struct FreeResolution {
    group: Group,
    ranks: Vec<usize>,
    boundaries: Vec<Vec<Vec<GroupRingElement>>>,
    augmentation: Vec<i64>,
}

impl FreeResolution {
    pub fn new(
        group: Group,
        ranks: Vec<usize>,
        boundaries: Vec<Vec<Vec<GroupRingElement>>>,
        augmentation: Vec<i64>,
    ) -> Result<Self, GroupError> {
        if ranks.is_empty() {
            return Err(GroupError::Shape("resolution needs at least one module".into()));
        }
        if boundaries.len() + 1 != ranks.len() {
            return Err(GroupError::Shape(format!(
                "{} ranks need {} boundary maps, got {}",
                ranks.len(),
                ranks.len() - 1,
                boundaries.len()
            )));
        }
        if augmentation.len() != ranks[0] {
            return Err(GroupError::Shape(format!(
                "augmentation has {} entries for a rank {} bottom module",
                augmentation.len(),
                ranks[0]
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            if b.len() != ranks[i + 1] || b.iter().any(|row| row.len() != ranks[i]) {
                return Err(GroupError::Shape(format!(
                    "boundary {} is not {} x {}",
                    i + 1,
                    ranks[i + 1],
                    ranks[i]
                )));
            }
        }
        // augmentation composed with the first boundary must vanish
        if let Some(b1) = boundaries.first() {
            for (r, row) in b1.iter().enumerate() {
                let mut total = BigInt::zero();
                for (j, entry) in row.iter().enumerate() {
                    total += entry.coefficient_sum() * BigInt::from(augmentation[j]);
                }
                if !total.is_zero() {
                    return Err(GroupError::NotAResolution(format!(
                        "augmentation does not kill boundary of generator {} in degree 1",
                        r
                    )));
                }
            }
        }
        // consecutive boundaries must compose to zero in the group ring
        for i in 1..boundaries.len() {
            let (hi, lo) = (&boundaries[i], &boundaries[i - 1]);
            for (r, row) in hi.iter().enumerate() {
                for c in 0..ranks[i - 1] {
                    let mut acc = GroupRingElement::zero();
                    for (j, entry) in row.iter().enumerate() {
                        if !entry.is_zero() && !lo[j][c].is_zero() {
                            acc = acc.add(&group.ring_mul(entry, &lo[j][c]));
                        }
                    }
                    if !acc.is_zero() {
                        return Err(GroupError::NotAResolution(format!(
                            "boundaries {} and {} do not compose to zero at entry ({}, {})",
                            i + 1,
                            i,
                            r,
                            c
                        )));
                    }
                }
            }
        }
        Ok(FreeResolution { group, ranks, boundaries, augmentation })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Index of the top module.
    pub fn length(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Boundary from degree `i` to degree `i - 1`, for `1 <= i <= length`.
    pub fn boundary(&self, i: usize) -> &Vec<Vec<GroupRingElement>> {
        &self.boundaries[i - 1]
    }

    pub fn augmentation(&self) -> &[i64] {
        &self.augmentation
    }
}

// subsets of {0, .., n-1} of each size, in increasing bitmask order
fn subset_levels(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut levels = vec![Vec::new(); n + 1];
    for mask in 0u32..(1u32 << n) {
        let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        levels[set.len()].push(set);
    }
    levels
}

/// Standard exterior-algebra resolution of the trivial module over Z^rank.
pub fn koszul_resolution(rank: usize) -> FreeResolution {
    // rank zero resolves over the trivial group by a single free module
    let group = Group::FreeAbelian(rank);
    let levels = subset_levels(rank);
    let mut boundaries = Vec::new();
    for i in 1..=rank {
        let src = &levels[i];
        let tgt = &levels[i - 1];
        let index: BTreeMap<&Vec<usize>, usize> =
            tgt.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let mut b = vec![vec![GroupRingElement::zero(); tgt.len()]; src.len()];
        for (r, s) in src.iter().enumerate() {
            for (pos, &g) in s.iter().enumerate() {
                let mut rest = s.clone();
                rest.remove(pos);
                let c = index[&rest];
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                let step = GroupRingElement::monomial(group.generator_word(g), sign)
                    .sub(&GroupRingElement::monomial(group.identity_word(), sign));
                b[r][c] = b[r][c].add(&step);
            }
        }
        boundaries.push(b);
    }
    let ranks = levels.iter().map(|l| l.len()).collect();
    FreeResolution::new(group, ranks, boundaries, vec![1])
        .expect("koszul boundaries square to zero")
}

/// Length-one resolution of the trivial module over a free group.
pub fn free_group_resolution(rank: usize) -> FreeResolution {
    assert!(rank >= 1, "free group resolution needs at least one letter");
    let group = Group::Free(rank);
    let b1 = (0..rank)
        .map(|i| {
            vec![GroupRingElement::monomial(group.generator_word(i), 1)
                .sub(&GroupRingElement::monomial(group.identity_word(), 1))]
        })
        .collect();
    FreeResolution::new(group, vec![1, rank], vec![b1], vec![1])
        .expect("free group boundary is augmentation-compatible")
}

/// Length-three resolution of the trivial module over the Heisenberg group.
pub fn heisenberg_resolution() -> FreeResolution {
    let g = Group::Heisenberg;
    let one = g.one();
    let m = |a, b, c| GroupRingElement::monomial(vec![a, b, c], 1);
    let (x, y, z) = (m(1, 0, 0), m(0, 1, 0), m(0, 0, 1));
    let zy = m(0, 1, 1);
    let zero = GroupRingElement::zero();
    let b1 = vec![vec![x.sub(&one)], vec![y.sub(&one)], vec![z.sub(&one)]];
    // rows e_xz, e_yz, e_xy over columns e_x, e_y, e_z
    let b2 = vec![
        vec![one.sub(&z), zero.clone(), x.sub(&one)],
        vec![zero.clone(), one.sub(&z), y.sub(&one)],
        vec![one.sub(&zy), x.sub(&z), one.neg()],
    ];
    // row e_xyz over columns e_xz, e_yz, e_xy
    let b3 = vec![vec![zy.sub(&one), z.sub(&x), one.sub(&z)]];
    FreeResolution::new(g, vec![1, 3, 3, 1], vec![b1, b2, b3], vec![1])
        .expect("heisenberg boundaries square to zero")
}

// sum of the first m powers along one lattice axis: 1 + x + .. + x^{m-1},
// with the usual Laurent continuation -(x^{-1} + .. + x^m) for negative m
fn power_sum(group: &Group, axis: usize, m: i64) -> GroupRingElement {
    let mut word = group.identity_word();
    let mut out = GroupRingElement::zero();
    if m >= 0 {
        for e in 0..m {
            word[axis] = e;
            out = out.add(&GroupRingElement::monomial(word.clone(), 1));
        }
    } else {
        for e in m..0 {
            word[axis] = e;
            out = out.sub(&GroupRingElement::monomial(word.clone(), 1));
        }
    }
    out
}

// exact division by (x - 1) inside the lattice subring, sliced per y-power
fn divide_by_x_minus_one(e: &GroupRingElement) -> Option<GroupRingElement> {
    let mut slices: BTreeMap<i64, BTreeMap<i64, BigInt>> = BTreeMap::new();
    for (w, c) in e.terms() {
        debug_assert_eq!(w[2], 0, "division happens in the lattice subring");
        slices.entry(w[1]).or_default().insert(w[0], c.clone());
    }
    let mut out = GroupRingElement::zero();
    for (b, slice) in slices {
        let lo = *slice.keys().next().unwrap();
        let hi = *slice.keys().last().unwrap();
        let mut run = BigInt::zero();
        for a in lo..=hi {
            if let Some(c) = slice.get(&a) {
                run += c;
            }
            if a < hi {
                out.accumulate(vec![a, b, 0], -run.clone());
            }
        }
        if !run.is_zero() {
            return None;
        }
    }
    Some(out)
}

/// Length-three resolution of the trivial module over Z acting on Z^2 by a
/// unimodular matrix, assembled as the cone of a twisted lift over the
/// two-variable exterior resolution.
pub fn semidirect_resolution(u: [[i64; 2]; 2]) -> Result<FreeResolution, GroupError> {
    if mat2_det(u).abs() != 1 {
        return Err(GroupError::UnimodularRequired);
    }
    let g = Group::LatticeSemidirect { u };
    let one = g.one();
    let lat = |a: i64, b: i64| GroupRingElement::monomial(vec![a, b, 0], 1);
    let t = GroupRingElement::monomial(vec![0, 0, 1], 1);
    let (x, y) = (lat(1, 0), lat(0, 1));
    // images of the lattice generators under conjugation by t
    let (p, q) = (u[0][0], u[1][0]);
    let (r, s) = (u[0][1], u[1][1]);
    let wx = lat(p, q);
    let wy = lat(r, s);
    // free-difference expansions of those images
    let pxx = power_sum(&g, 0, p);
    let pxy = g.ring_mul(&lat(p, 0), &power_sum(&g, 1, q));
    let pyx = power_sum(&g, 0, r);
    let pyy = g.ring_mul(&lat(r, 0), &power_sum(&g, 1, s));
    // the induced lift on the top exterior generator, pinned down by two
    // independent identities; solving one and checking the other guards the
    // whole construction
    let rhs = g
        .ring_mul(&one.sub(&wy), &pxy)
        .add(&g.ring_mul(&wx.sub(&one), &pyy));
    let d_top = divide_by_x_minus_one(&rhs)
        .ok_or_else(|| GroupError::NotAResolution("top lift is not divisible".into()))?;
    let check_lhs = g.ring_mul(&d_top, &y.sub(&one));
    let check_rhs = g
        .ring_mul(&wy.sub(&one), &pxx)
        .add(&g.ring_mul(&one.sub(&wx), &pyx));
    if check_lhs != check_rhs {
        return Err(GroupError::NotAResolution("top lift fails its second identity".into()));
    }
    let zero = GroupRingElement::zero();
    let b1 = vec![vec![x.sub(&one)], vec![y.sub(&one)], vec![t.sub(&one)]];
    // rows e_xy, e_tx, e_ty over columns e_x, e_y, e_t
    let b2 = vec![
        vec![one.sub(&y), x.sub(&one), zero],
        vec![t.sub(&pxx), pxy.neg(), one.sub(&wx)],
        vec![pyx.neg(), t.sub(&pyy), one.sub(&wy)],
    ];
    // row of the top generator over columns e_xy, e_tx, e_ty
    let b3 = vec![vec![t.sub(&d_top), wy.sub(&one), one.sub(&wx)]];
    FreeResolution::new(g, vec![1, 3, 3, 1], vec![b1, b2, b3], vec![1])
}

/// Cochain complex of a resolution evaluated on an action, with its
/// cohomology spaces.
#[derive(Clone, Debug)]
pub struct GroupCohomology {
    pub complex: ChainComplex,
    pub pieces: Vec<CohomologyPiece>,
}

impl GroupCohomology {
    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.dim).collect()
    }
}

fn block_at(m: &mut RatMatrix, row: usize, col: usize, blk: &RatMatrix) {
    for i in 0..blk.rows() {
        for j in 0..blk.cols() {
            m[(row + i, col + j)] = blk[(i, j)].clone();
        }
    }
}

fn block_diagonal_matrix(blk: &RatMatrix, copies: usize) -> RatMatrix {
    let mut out = RatMatrix::zero(blk.rows() * copies, blk.cols() * copies);
    for c in 0..copies {
        block_at(&mut out, c * blk.rows(), c * blk.cols(), blk);
    }
    out
}

/// Cohomology of the group through a free resolution and a matrix action.
///
/// The cochain space in degree i is one copy of the module per generator of
/// the degree-i free module, and the differential evaluates the next
/// boundary matrix entrywise through the action.
pub fn cohomology_of_group(
    res: &FreeResolution,
    a: &GroupAction,
) -> Result<GroupCohomology, GroupError> {
    if res.group() != a.group() {
        return Err(GroupError::GroupMismatch);
    }
    let d = a.dim();
    let dims: Vec<usize> = res.ranks().iter().map(|&r| r * d).collect();
    let mut maps = Vec::new();
    for i in 1..=res.length() {
        let b = res.boundary(i);
        let mut m = RatMatrix::zero(res.ranks()[i] * d, res.ranks()[i - 1] * d);
        for (rb, row) in b.iter().enumerate() {
            for (cb, entry) in row.iter().enumerate() {
                if !entry.is_zero() {
                    block_at(&mut m, rb * d, cb * d, &a.eval(entry));
                }
            }
        }
        maps.push(m);
    }
    let complex = ChainComplex::new(0, dims, maps);
    let pieces = complex.cohomology();
    // the bottom of any resolution expresses the fixed-vector condition
    let inv = invariants(a);
    assert_eq!(pieces[0].dim, inv.dim(), "degree zero must match the invariants");
    if res.ranks()[0] == 1 {
        let h0 = Subspace::from_rows(
            d,
            (0..pieces[0].representatives.rows())
                .map(|r| pieces[0].representatives.row(r))
                .collect(),
        );
        assert!(h0 == inv, "degree zero representatives must span the invariants");
    }
    Ok(GroupCohomology { complex, pieces })
}

// evaluated exterior cochain complex on a commuting generator family,
// built directly from subset combinatorics
fn exterior_cochain(gens: &[RatMatrix], d: usize) -> (Vec<usize>, Vec<RatMatrix>) {
    let n = gens.len();
    let levels = subset_levels(n);
    let dims: Vec<usize> = levels.iter().map(|l| l.len() * d).collect();
    let eye = RatMatrix::identity(d);
    let mut maps = Vec::new();
    for i in 0..n {
        let src = &levels[i];
        let tgt = &levels[i + 1];
        let index: BTreeMap<&Vec<usize>, usize> =
            tgt.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let mut m = RatMatrix::zero(dims[i + 1], dims[i]);
        for (c, s) in src.iter().enumerate() {
            for g in 0..n {
                if s.contains(&g) {
                    continue;
                }
                let mut bigger = s.clone();
                let pos = bigger.iter().position(|&h| h > g).unwrap_or(bigger.len());
                bigger.insert(pos, g);
                let r = index[&bigger];
                let step = gens[g].sub(&eye);
                let signed = if pos % 2 == 0 { step } else { step.scale(&-Rat::one()) };
                block_at(&mut m, r * d, c * d, &signed);
            }
        }
        maps.push(m);
    }
    (dims, maps)
}

/// Subgroup cohomology of a lattice action together with the action of the
/// remaining generators on it.
///
/// The subgroup is spanned by the first `k` lattice generators. Its cochain
/// complex is finite, the other generators act on it level by level, and the
/// induced maps on cohomology are returned per degree; dimensions are also
/// recomputed along the plain route and compared.
pub struct EquivariantCohomology {
    pub pieces: Vec<CohomologyPiece>,
    /// residual[p][j] is the action of lattice generator k + j on degree p.
    pub residual: Vec<Vec<RatMatrix>>,
    pub forgetful_dims_match: bool,
}

pub fn equivariant_cohomology(
    a: &GroupAction,
    k: usize,
) -> Result<EquivariantCohomology, GroupError> {
    let n = match a.group() {
        Group::FreeAbelian(n) => *n,
        _ => return Err(GroupError::Shape("equivariant model needs a lattice action".into())),
    };
    if k > n {
        return Err(GroupError::Shape(format!("subgroup rank {} exceeds lattice rank {}", k, n)));
    }
    let d = a.dim();
    if k == 0 {
        // trivial subgroup: everything sits in degree zero with the full action
        let pieces = vec![CohomologyPiece {
            degree: 0,
            dim: d,
            representatives: RatMatrix::identity(d),
        }];
        return Ok(EquivariantCohomology {
            pieces,
            residual: vec![a.generators().to_vec()],
            forgetful_dims_match: true,
        });
    }
    let inner: Vec<RatMatrix> = a.generators()[..k].to_vec();
    let (dims, maps) = exterior_cochain(&inner, d);
    let complex = ChainComplex::new(0, dims.clone(), maps);
    let pieces = complex.cohomology();
    let mut residual: Vec<Vec<RatMatrix>> = vec![Vec::new(); pieces.len()];
    for j in k..n {
        let level_actions: Vec<RatMatrix> = dims
            .iter()
            .map(|&dd| block_diagonal_matrix(a.generator(j), dd / d))
            .collect();
        // the residual generator must commute with the whole differential
        for p in 0..dims.len() {
            if let Some(dmap) = complex.map_at(p as i64) {
                assert!(
                    dmap.mul(&level_actions[p]) == level_actions[p + 1].mul(dmap),
                    "residual action does not commute with the differential"
                );
            }
        }
        for (p, piece) in pieces.iter().enumerate() {
            if piece.dim == 0 {
                residual[p].push(RatMatrix::zero(0, 0));
                continue;
            }
            // transported representatives are cocycles again; express them in
            // the representative basis modulo coboundaries
            let mut span_rows: Vec<Vec<Rat>> = Vec::new();
            for r in 0..piece.representatives.rows() {
                span_rows.push(piece.representatives.row(r));
            }
            let h = span_rows.len();
            if p > 0 {
                let boundary_basis = complex.map_at(p as i64 - 1).unwrap().image();
                for r in 0..boundary_basis.dim() {
                    span_rows.push(boundary_basis.basis().row(r));
                }
            }
            let span = RatMatrix::from_rows(span_rows).transpose();
            let mut transported_cols = Vec::new();
            for r in 0..piece.representatives.rows() {
                transported_cols.push(level_actions[p].apply(&piece.representatives.row(r)));
            }
            let transported = RatMatrix::from_rows(transported_cols).transpose();
            let coords = span
                .solve_matrix(&transported)
                .expect("transported class must stay in the cocycle space");
            residual[p].push(coords.submatrix(0..h, 0..h));
        }
    }
    // induced maps on cohomology inherit commutativity of the lattice
    for level in &residual {
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                assert!(
                    level[i].mul(&level[j]) == level[j].mul(&level[i]),
                    "residual generators must commute on cohomology"
                );
            }
        }
    }
    let restricted = GroupAction::new(Group::FreeAbelian(k), inner)?;
    let plain = cohomology_of_group(&koszul_resolution(k), &restricted)?;
    let forgetful_dims_match =
        plain.dims() == pieces.iter().map(|p| p.dim).collect::<Vec<_>>();
    Ok(EquivariantCohomology { pieces, residual, forgetful_dims_match })
}

/// Outcome of comparing direct lattice cohomology against the two-stage
/// route through a factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationReport {
    pub passed: bool,
    pub direct: Vec<usize>,
    pub factored: Vec<usize>,
}

/// Compare the cohomology of a rank-n lattice action computed directly with
/// the total complex that resolves the first k generators inside and the
/// remaining ones outside.
pub fn lattice_factorization_check(
    n: usize,
    k: usize,
    a: &GroupAction,
) -> Result<FactorizationReport, GroupError> {
    match a.group() {
        Group::FreeAbelian(m) if *m == n => {}
        _ => return Err(GroupError::Shape("factorization check needs a rank-n lattice".into())),
    }
    if k < 1 || k > n {
        return Err(GroupError::Shape(format!("factor rank {} out of range 1..={}", k, n)));
    }
    let d = a.dim();
    let direct = cohomology_of_group(&koszul_resolution(n), a)?.dims();
    let (in_dims, in_maps) = exterior_cochain(&a.generators()[..k], d);
    let outer = n - k;
    let levels = subset_levels(outer);
    let eye = RatMatrix::identity(d);
    let size = |p: usize, q: usize| levels[p].len() * in_dims[q];
    let valid = |p: usize, q: usize| p <= outer && q <= k;
    let total_dims: Vec<usize> = (0..=n)
        .map(|m| (0..=m).filter(|&p| valid(p, m - p)).map(|p| size(p, m - p)).sum())
        .collect();
    let offset = |m: usize, p: usize| -> usize {
        (0..p).filter(|&pp| valid(pp, m - pp)).map(|pp| size(pp, m - pp)).sum()
    };
    let mut total_maps = Vec::new();
    for m in 0..n {
        let mut mat = RatMatrix::zero(total_dims[m + 1], total_dims[m]);
        for p in 0..=m {
            let q = m - p;
            if !valid(p, q) {
                continue;
            }
            let src_off = offset(m, p);
            // inner differential, with the alternating sign of the outer level
            if q + 1 <= k {
                let tgt_off = offset(m + 1, p);
                let signed = if p % 2 == 0 {
                    in_maps[q].clone()
                } else {
                    in_maps[q].scale(&-Rat::one())
                };
                for o in 0..levels[p].len() {
                    block_at(
                        &mut mat,
                        tgt_off + o * in_dims[q + 1],
                        src_off + o * in_dims[q],
                        &signed,
                    );
                }
            }
            // outer differential, acting blockwise over the inner level
            if p + 1 <= outer {
                let tgt_off = offset(m + 1, p + 1);
                let index: BTreeMap<&Vec<usize>, usize> =
                    levels[p + 1].iter().enumerate().map(|(idx, s)| (s, idx)).collect();
                for (os, s) in levels[p].iter().enumerate() {
                    for g in 0..outer {
                        if s.contains(&g) {
                            continue;
                        }
                        let mut bigger = s.clone();
                        let pos = bigger.iter().position(|&h| h > g).unwrap_or(bigger.len());
                        bigger.insert(pos, g);
                        let ot = index[&bigger];
                        let step = a.generator(k + g).sub(&eye);
                        let signed =
                            if pos % 2 == 0 { step } else { step.scale(&-Rat::one()) };
                        let blk = block_diagonal_matrix(&signed, in_dims[q] / d);
                        block_at(
                            &mut mat,
                            tgt_off + ot * in_dims[q],
                            src_off + os * in_dims[q],
                            &blk,
                        );
                    }
                }
            }
        }
        total_maps.push(mat);
    }
    let total = ChainComplex::new(0, total_dims, total_maps);
    let factored: Vec<usize> = total.cohomology().iter().map(|p| p.dim).collect();
    Ok(FactorizationReport { passed: direct == factored, direct, factored })
}

/// Per-position outcome of the finite-window exactness probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    /// Position 0 is the augmentation step, position i is the degree-i
    /// module, and the top position demands an injective top boundary.
    pub positions: Vec<(usize, bool)>,
    pub passed: bool,
}

fn window_words(group: &Group, radius: i64) -> Result<Vec<Word>, GroupError> {
    match group {
        Group::FreeAbelian(n) => {
            let mut words = vec![Vec::new()];
            for _ in 0..*n {
                let mut next = Vec::new();
                for w in &words {
                    for e in -radius..=radius {
                        let mut v = w.clone();
                        v.push(e);
                        next.push(v);
                    }
                }
                words = next;
            }
            Ok(words)
        }
        Group::Free(n) => {
            let mut words: Vec<Word> = vec![Vec::new()];
            let mut frontier: Vec<Word> = vec![Vec::new()];
            for _ in 0..radius {
                let mut next = Vec::new();
                for w in &frontier {
                    for g in 1..=(*n as i64) {
                        for letter in [g, -g] {
                            if w.last() == Some(&-letter) {
                                continue;
                            }
                            let mut v = w.clone();
                            v.push(letter);
                            next.push(v);
                        }
                    }
                }
                words.extend(next.iter().cloned());
                frontier = next;
            }
            Ok(words)
        }
        Group::Heisenberg => {
            // central exponents grow quadratically under multiplication
            let central = radius * radius + radius;
            let mut words = Vec::new();
            for a in -radius..=radius {
                for b in -radius..=radius {
                    for c in -central..=central {
                        words.push(vec![a, b, c]);
                    }
                }
            }
            Ok(words)
        }
        Group::LatticeSemidirect { .. } => Err(GroupError::WindowUnsupported),
    }
}


// matrix of the boundary out of degree `deg` on chains supported by `words`.
// rows are indexed by the union of the images' support and `extra_rows`,
// returned alongside the matrix so callers share a coordinate system
fn window_boundary_matrix(
    group: &Group,
    res: &FreeResolution,
    deg: usize,
    words: &[Word],
    extra_rows: &[Word],
) -> (RatMatrix, Vec<Word>) {
    let b = res.boundary(deg);
    let src_rank = res.ranks()[deg];
    let tgt_rank = res.ranks()[deg - 1];
    let mut support: BTreeSet<Word> = extra_rows.iter().cloned().collect();
    for w in words {
        for row in b.iter() {
            for entry in row.iter() {
                for (ew, _) in entry.terms() {
                    support.insert(group.word_mul(w, ew));
                }
            }
        }
    }
    let support: Vec<Word> = support.into_iter().collect();
    let index: BTreeMap<&Word, usize> = support.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut m = RatMatrix::zero(support.len() * tgt_rank, words.len() * src_rank);
    for (wi, w) in words.iter().enumerate() {
        for (sb, row) in b.iter().enumerate() {
            let col = wi * src_rank + sb;
            for (tb, entry) in row.iter().enumerate() {
                for (ew, c) in entry.terms() {
                    let prod = group.word_mul(w, ew);
                    let r = index[&prod] * tgt_rank + tb;
                    m[(r, col)] = m[(r, col)].clone() + Rat::from_integer(c.clone());
                }
            }
        }
    }
    (m, support)
}

/// Probe exactness of a resolution on a finite window of the group: every
/// cycle supported on the inner window must be a boundary of a chain
/// supported on the outer window, and the top boundary must be injective on
/// the inner window.
pub fn check_windowed_exactness(
    res: &FreeResolution,
    inner_radius: i64,
    outer_radius: i64,
) -> Result<ExactnessReport, GroupError> {
    let group = res.group().clone();
    let inner_words = window_words(&group, inner_radius)?;
    let outer_words = window_words(&group, outer_radius)?;
    let mut positions = Vec::new();
    for pos in 0..=res.length() {
        let rank = res.ranks()[pos];
        let outgoing = if pos == 0 {
            let mut m = RatMatrix::zero(1, inner_words.len() * rank);
            for wi in 0..inner_words.len() {
                for b in 0..rank {
                    m[(0, wi * rank + b)] = Rat::from_integer(res.augmentation()[b].into());
                }
            }
            m
        } else {
            window_boundary_matrix(&group, res, pos, &inner_words, &[]).0
        };
        let cycles = outgoing.kernel();
        if pos == res.length() {
            positions.push((pos, cycles.is_zero()));
            continue;
        }
        if cycles.is_zero() {
            positions.push((pos, true));
            continue;
        }
        let (bmat, support) =
            window_boundary_matrix(&group, res, pos + 1, &outer_words, &inner_words);
        let word_index: BTreeMap<&Word, usize> =
            support.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let ambient = support.len() * rank;
        let mut embedded_rows = Vec::new();
        for r in 0..cycles.dim() {
            let small = cycles.basis().row(r);
            let mut big = vec![Rat::zero(); ambient];
            for (wi, w) in inner_words.iter().enumerate() {
                let base = word_index[w] * rank;
                for b in 0..rank {
                    big[base + b] = small[wi * rank + b].clone();
                }
            }
            embedded_rows.push(big);
        }
        let embedded = Subspace::from_rows(ambient, embedded_rows);
        positions.push((pos, bmat.image().contains(&embedded)));
    }
    let passed = positions.iter().all(|&(_, ok)| ok);
    Ok(ExactnessReport { positions, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qi;

    fn trivial_line(group: Group) -> GroupAction {
        let n = group.generator_count();
        GroupAction::new(group, vec![RatMatrix::identity(1); n]).unwrap()
    }

    fn unipotent_pair() -> GroupAction {
        GroupAction::new(
            Group::FreeAbelian(2),
            vec![
                RatMatrix::from_i64(&[&[1, 1], &[0, 1]]),
                RatMatrix::from_i64(&[&[1, 2], &[0, 1]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ring_addition_cancels_opposite_terms() {
        let g = Group::FreeAbelian(1);
        let x = g.generator(0);
        let diff = x.sub(&g.one());
        assert!(diff.add(&g.one().sub(&x)).is_zero());
    }

    #[test]
    fn lattice_ring_multiplication_expands_products() {
        let g = Group::FreeAbelian(2);
        let (x, y) = (g.generator(0), g.generator(1));
        let product = g.ring_mul(&x.sub(&g.one()), &y.sub(&g.one()));
        let mut expected = GroupRingElement::monomial(vec![1, 1], 1);
        expected = expected.sub(&x).sub(&y).add(&g.one());
        assert_eq!(product, expected);
    }

    #[test]
    fn heisenberg_normal_form_multiplication() {
        let g = Group::Heisenberg;
        let x = vec![1, 0, 0];
        let y = vec![0, 1, 0];
        let z = vec![0, 0, 1];
        assert_eq!(g.word_mul(&x, &y), vec![1, 1, 0]);
        assert_eq!(g.word_mul(&y, &x), vec![1, 1, -1]);
        // xy = yxz
        assert_eq!(g.word_mul(&g.word_mul(&y, &x), &z), vec![1, 1, 0]);
        let w = vec![2, -1, 3];
        assert_eq!(g.word_mul(&w, &g.word_inv(&w)), g.identity_word());
        assert_eq!(g.word_mul(&g.word_inv(&w), &w), g.identity_word());
    }

    #[test]
    fn free_word_reduction_cancels_inverses() {
        let g = Group::Free(2);
        let ab = vec![1, 2];
        let binv_ainv = vec![-2, -1];
        assert_eq!(g.word_mul(&ab, &binv_ainv), Vec::<i64>::new());
        assert_eq!(g.word_inv(&ab), binv_ainv);
        assert_eq!(g.word_mul(&vec![1, -2], &vec![2, 2]), vec![1, 2]);
    }

    #[test]
    fn semidirect_conjugation_twists_the_lattice() {
        let u = [[0, -1], [1, 3]];
        let g = Group::LatticeSemidirect { u };
        let t = vec![0, 0, 1];
        let x = vec![1, 0, 0];
        let y = vec![0, 1, 0];
        // t x = y t and t y = x^{-1} y^3 t
        assert_eq!(g.word_mul(&t, &x), vec![0, 1, 1]);
        assert_eq!(g.word_mul(&t, &y), vec![-1, 3, 1]);
        for w in [vec![2, -1, 1], vec![0, 1, -2], vec![-1, 2, 3]] {
            assert_eq!(g.word_mul(&w, &g.word_inv(&w)), g.identity_word());
        }
    }

    #[test]
    fn koszul_ranks_are_binomial() {
        let res = koszul_resolution(4);
        assert_eq!(res.ranks(), &[1, 4, 6, 4, 1]);
        assert_eq!(res.length(), 4);
    }

    #[test]
    fn lattice_trivial_line_counts_subsets() {
        for n in 1..=4usize {
            let res = koszul_resolution(n);
            let a = trivial_line(Group::FreeAbelian(n));
            let dims = cohomology_of_group(&res, &a).unwrap().dims();
            let expected: Vec<usize> =
                (0..=n).map(|p| binomial(n, p)).collect();
            assert_eq!(dims, expected, "rank {}", n);
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

    #[test]
    fn invariants_cut_out_the_common_fixed_space() {
        let full = trivial_line(Group::FreeAbelian(1));
        assert!(invariants(&full).is_full());

        let unipotent = GroupAction::new(
            Group::FreeAbelian(1),
            vec![RatMatrix::from_i64(&[&[1, 1], &[0, 1]])],
        )
        .unwrap();
        let inv = invariants(&unipotent);
        assert_eq!(inv.dim(), 1);
        assert!(inv.contains_vector(&[qi(1), qi(0)]));

        let split = GroupAction::new(
            Group::FreeAbelian(2),
            vec![
                RatMatrix::from_i64(&[&[2, 0], &[0, 1]]),
                RatMatrix::from_i64(&[&[1, 0], &[0, 2]]),
            ],
        )
        .unwrap();
        assert!(invariants(&split).is_zero());
    }

    #[test]
    fn unipotent_line_has_one_class_in_each_degree() {
        let a = GroupAction::new(
            Group::FreeAbelian(1),
            vec![RatMatrix::from_i64(&[&[1, 1], &[0, 1]])],
        )
        .unwrap();
        let dims = cohomology_of_group(&koszul_resolution(1), &a).unwrap().dims();
        assert_eq!(dims, vec![1, 1]);
    }

    #[test]
    fn free_rank_two_trivial_line_dims() {
        let a = trivial_line(Group::Free(2));
        let dims = cohomology_of_group(&free_group_resolution(2), &a).unwrap().dims();
        assert_eq!(dims, vec![1, 2]);
    }

    #[test]
    fn heisenberg_resolution_has_classical_betti_numbers() {
        let res = heisenberg_resolution();
        assert_eq!(res.ranks(), &[1, 3, 3, 1]);
        let a = trivial_line(Group::Heisenberg);
        let dims = cohomology_of_group(&res, &a).unwrap().dims();
        assert_eq!(dims, vec![1, 2, 2, 1]);
    }

    #[test]
    fn heisenberg_matrix_action_evaluates_consistently() {
        let e = |r: usize, c: usize| {
            let mut m = RatMatrix::identity(3);
            m[(r, c)] = qi(1);
            m
        };
        let a = GroupAction::new(Group::Heisenberg, vec![e(0, 1), e(1, 2), e(0, 2)]).unwrap();
        let xy = a.eval_word(&vec![1, 1, 0]);
        assert_eq!(xy, a.generator(0).mul(a.generator(1)));
        let gc = cohomology_of_group(&heisenberg_resolution(), &a).unwrap();
        let dims = gc.dims();
        assert_eq!(dims[0], 1);
        let signed: i64 = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        assert_eq!(signed, 0);
    }

    #[test]
    fn semidirect_identity_twist_matches_rank_three_lattice() {
        let res = semidirect_resolution([[1, 0], [0, 1]]).unwrap();
        let a = trivial_line(Group::LatticeSemidirect { u: [[1, 0], [0, 1]] });
        let dims = cohomology_of_group(&res, &a).unwrap().dims();
        assert_eq!(dims, vec![1, 3, 3, 1]);
    }

    #[test]
    fn semidirect_hyperbolic_twist_betti_numbers() {
        let u = [[0, -1], [1, 3]];
        let res = semidirect_resolution(u).unwrap();
        let a = trivial_line(Group::LatticeSemidirect { u });
        let dims = cohomology_of_group(&res, &a).unwrap().dims();
        assert_eq!(dims, vec![1, 1, 1, 1]);
    }

    #[test]
    fn semidirect_swap_twist_betti_numbers() {
        let u = [[0, 1], [1, 0]];
        let res = semidirect_resolution(u).unwrap();
        let a = trivial_line(Group::LatticeSemidirect { u });
        let dims = cohomology_of_group(&res, &a).unwrap().dims();
        assert_eq!(dims, vec![1, 2, 1, 0]);
    }

    #[test]
    fn semidirect_top_lift_values_are_pinned() {
        let g = Group::LatticeSemidirect { u: [[0, -1], [1, 3]] };
        let res = semidirect_resolution([[0, -1], [1, 3]]).unwrap();
        let t = GroupRingElement::monomial(vec![0, 0, 1], 1);
        let x_inv = GroupRingElement::monomial(vec![-1, 0, 0], 1);
        assert_eq!(res.boundary(3)[0][0], t.sub(&x_inv));
        let _ = g;

        let res_swap = semidirect_resolution([[0, 1], [1, 0]]).unwrap();
        let swap_g = Group::LatticeSemidirect { u: [[0, 1], [1, 0]] };
        assert_eq!(res_swap.boundary(3)[0][0], t.add(&swap_g.one()));
    }

    #[test]
    fn semidirect_rejects_non_unimodular_twist() {
        assert_eq!(
            semidirect_resolution([[2, 0], [0, 1]]).unwrap_err(),
            GroupError::UnimodularRequired
        );
    }

    #[test]
    fn cohomology_splits_over_block_sums() {
        let jordan = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let stretch = RatMatrix::from_i64(&[&[2]]);
        let a = GroupAction::new(Group::FreeAbelian(1), vec![jordan.clone()]).unwrap();
        let b = GroupAction::new(Group::FreeAbelian(1), vec![stretch.clone()]).unwrap();
        let ab = GroupAction::new(Group::FreeAbelian(1), vec![jordan.direct_sum(&stretch)]).unwrap();
        let res = koszul_resolution(1);
        let da = cohomology_of_group(&res, &a).unwrap().dims();
        let db = cohomology_of_group(&res, &b).unwrap().dims();
        let dab = cohomology_of_group(&res, &ab).unwrap().dims();
        let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
        assert_eq!(dab, sum);
    }

    #[test]
    fn equivariant_residual_action_scales_both_degrees() {
        let a = GroupAction::new(
            Group::FreeAbelian(2),
            vec![
                RatMatrix::from_i64(&[&[1, 1], &[0, 1]]),
                RatMatrix::from_i64(&[&[2, 0], &[0, 2]]),
            ],
        )
        .unwrap();
        let eq = equivariant_cohomology(&a, 1).unwrap();
        assert!(eq.forgetful_dims_match);
        let dims: Vec<usize> = eq.pieces.iter().map(|p| p.dim).collect();
        assert_eq!(dims, vec![1, 1]);
        let two = RatMatrix::from_i64(&[&[2]]);
        assert_eq!(eq.residual[0][0], two);
        assert_eq!(eq.residual[1][0], two);
    }

    #[test]
    fn equivariant_edge_subgroups() {
        let a = unipotent_pair();
        let full = equivariant_cohomology(&a, 2).unwrap();
        assert!(full.forgetful_dims_match);
        assert!(full.residual.iter().all(|level| level.is_empty()));

        let trivial = equivariant_cohomology(&a, 0).unwrap();
        assert_eq!(trivial.pieces.len(), 1);
        assert_eq!(trivial.pieces[0].dim, 2);
        assert_eq!(trivial.residual[0].len(), 2);
        assert_eq!(trivial.residual[0][0], *a.generator(0));
    }

    #[test]
    fn lattice_factorization_matches_direct_route() {
        let trivial = trivial_line(Group::FreeAbelian(2));
        let r1 = lattice_factorization_check(2, 1, &trivial).unwrap();
        assert!(r1.passed);
        assert_eq!(r1.direct, vec![1, 2, 1]);
        assert_eq!(r1.factored, vec![1, 2, 1]);

        let r2 = lattice_factorization_check(2, 2, &trivial).unwrap();
        assert!(r2.passed);

        let up = unipotent_pair();
        let r3 = lattice_factorization_check(2, 1, &up).unwrap();
        assert!(r3.passed, "direct {:?} vs factored {:?}", r3.direct, r3.factored);
    }

    #[test]
    fn windowed_exactness_accepts_builtin_resolutions() {
        assert!(check_windowed_exactness(&koszul_resolution(1), 2, 4).unwrap().passed);
        assert!(check_windowed_exactness(&koszul_resolution(2), 1, 3).unwrap().passed);
        assert!(check_windowed_exactness(&free_group_resolution(2), 2, 3).unwrap().passed);
    }

    #[test]
    fn windowed_exactness_flags_padded_complex() {
        let g = Group::FreeAbelian(1);
        let res = FreeResolution::new(
            g,
            vec![1, 1],
            vec![vec![vec![GroupRingElement::zero()]]],
            vec![1],
        )
        .unwrap();
        let report = check_windowed_exactness(&res, 2, 3).unwrap();
        assert!(!report.passed);
        assert_eq!(report.positions[0], (0, false));
    }

    #[test]
    fn resolution_constructor_rejects_nonzero_composite() {
        let g = Group::FreeAbelian(1);
        let step = g.generator(0).sub(&g.one());
        let bad = FreeResolution::new(
            g,
            vec![1, 1, 1],
            vec![vec![vec![step.clone()]], vec![vec![step]]],
            vec![1],
        );
        assert!(matches!(bad, Err(GroupError::NotAResolution(_))));
    }

    #[test]
    fn resolution_constructor_rejects_bad_augmentation() {
        let g = Group::FreeAbelian(1);
        let bad = FreeResolution::new(
            g.clone(),
            vec![1, 1],
            vec![vec![vec![g.generator(0)]]],
            vec![1],
        );
        assert!(matches!(bad, Err(GroupError::NotAResolution(_))));
    }

    #[test]
    fn group_mismatch_is_rejected() {
        let a = trivial_line(Group::FreeAbelian(1));
        assert_eq!(
            cohomology_of_group(&koszul_resolution(2), &a).unwrap_err(),
            GroupError::GroupMismatch
        );
    }

    #[test]
    fn relation_checks_reject_bad_actions() {
        let noncommuting = GroupAction::new(
            Group::FreeAbelian(2),
            vec![
                RatMatrix::from_i64(&[&[1, 1], &[0, 1]]),
                RatMatrix::from_i64(&[&[1, 0], &[1, 1]]),
            ],
        );
        assert!(matches!(noncommuting, Err(GroupError::RelationViolated { .. })));

        let e = |r: usize, c: usize, v: i64| {
            let mut m = RatMatrix::identity(3);
            m[(r, c)] = qi(v);
            m
        };
        let bad_center = GroupAction::new(
            Group::Heisenberg,
            vec![e(0, 1, 1), e(1, 2, 1), e(0, 2, 2)],
        );
        assert!(matches!(bad_center, Err(GroupError::RelationViolated { .. })));

        let singular = GroupAction::new(
            Group::FreeAbelian(1),
            vec![RatMatrix::from_i64(&[&[0]])],
        );
        assert_eq!(singular.unwrap_err(), GroupError::NotInvertible { generator: 0 });
    }
}
