//! Sheaves on finite posets and their closed-cover descent machinery.
//!
//! Opens of the Alexandrov topology are the up-closed sets, so a sheaf is a
//! stalk per element with a restriction map along every covering relation,
//! validated to compose consistently. Covers are families of down-closed
//! sets. Pushing a sheaf forward from a member keeps stalks inside it and
//! kills the rest, the associated tuple diagram carries identity-or-zero
//! face maps, and the normalized total complex of global sections realizes
//! descent. The resolution checker verifies stalkwise exactness of the
//! augmented complex at every element, and random functorial sheaves give a
//! supply of honest test inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::linalg::{qi, ChainComplex, Rat, RatMatrix, Subspace};
use num::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetError {
    Shape(String),
    NotAntisymmetric { a: usize, b: usize },
    InconsistentRestrictions { from: usize, to: usize },
    NotDownClosed { member: usize, element: usize },
    CoverIncomplete { element: usize },
}

impl fmt::Display for PosetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetError::Shape(msg) => write!(f, "shape error: {msg}"),
            PosetError::NotAntisymmetric { a, b } => {
                write!(f, "elements {a} and {b} are related in both directions")
            }
            PosetError::InconsistentRestrictions { from, to } => {
                write!(f, "restriction maps from {from} to {to} differ along paths")
            }
            PosetError::NotDownClosed { member, element } => {
                write!(f, "cover member {member} misses element {element} below it")
            }
            PosetError::CoverIncomplete { element } => {
                write!(f, "element {element} lies in no cover member")
            }
        }
    }
}

impl std::error::Error for PosetError {}

/// Finite poset given by a reflexive, antisymmetric, transitive relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Build from generating relations a <= b; the reflexive transitive
    /// closure is taken and cycles are rejected.
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Result<Self, PosetError> {
        if n == 0 {
            return Err(PosetError::Shape("poset needs at least one element".into()));
        }
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(PosetError::Shape(format!("relation ({a}, {b}) is out of range")));
            }
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if leq[a][b] && leq[b][a] {
                    return Err(PosetError::NotAntisymmetric { a, b });
                }
            }
        }
        Ok(Poset { n, leq })
    }

    /// Total order 0 <= 1 <= ... <= n-1.
    pub fn chain(n: usize) -> Self {
        let relations: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::new(n, &relations).expect("a chain is a poset")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// Pairs a < b with nothing strictly between.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if a == b || !self.leq[a][b] {
                    continue;
                }
                let direct = (0..self.n)
                    .all(|w| w == a || w == b || !(self.leq[a][w] && self.leq[w][b]));
                if direct {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn down_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &z in set {
            for w in 0..self.n {
                if self.leq[w][z] {
                    out.insert(w);
                }
            }
        }
        out
    }

    fn is_down_closed(&self, set: &BTreeSet<usize>) -> Option<usize> {
        for &z in set {
            for w in 0..self.n {
                if self.leq[w][z] && !set.contains(&w) {
                    return Some(w);
                }
            }
        }
        None
    }

    // any linear extension, smaller elements first
    fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| (0..self.n).filter(|&w| self.leq[w][x]).count());
        order
    }
}

/// Sheaf on a finite poset: a rational vector space per element and a
/// restriction map along every covering relation, stored together with all
/// composites after a path-consistency check.
#[derive(Clone, Debug)]
pub struct PosetSheaf {
    poset: Poset,
    dims: Vec<usize>,
    maps: BTreeMap<(usize, usize), RatMatrix>,
}

impl PosetSheaf {
    /// Validate and close a system of restriction maps given on the covering
    /// pairs of the poset.
    pub fn new(
        poset: Poset,
        dims: Vec<usize>,
        hasse_maps: BTreeMap<(usize, usize), RatMatrix>,
    ) -> Result<Self, PosetError> {
        let n = poset.size();
        if dims.len() != n {
            return Err(PosetError::Shape("one stalk dimension per element".into()));
        }
        let covering = poset.covering_pairs();
        let covering_set: BTreeSet<(usize, usize)> = covering.iter().copied().collect();
        for key in hasse_maps.keys() {
            if !covering_set.contains(key) {
                return Err(PosetError::Shape(format!(
                    "map for ({}, {}) does not follow a covering relation",
                    key.0, key.1
                )));
            }
        }
        for &(a, b) in &covering {
            let m = hasse_maps.get(&(a, b)).ok_or_else(|| {
                PosetError::Shape(format!("missing restriction map for ({a}, {b})"))
            })?;
            if m.rows() != dims[b] || m.cols() != dims[a] {
                return Err(PosetError::Shape(format!(
                    "restriction ({a}, {b}) must be {} by {}",
                    dims[b], dims[a]
                )));
            }
        }
        let mut maps: BTreeMap<(usize, usize), RatMatrix> = hasse_maps;
        for x in 0..n {
            maps.insert((x, x), RatMatrix::identity(dims[x]));
        }
        // fill composites from the top of the order down, comparing the
        // routes through every covering successor
        let order = poset.linear_extension();
        for &x in order.iter().rev() {
            for &z in &order {
                if x == z || !poset.leq(x, z) {
                    continue;
                }
                let mut composite: Option<RatMatrix> = maps.get(&(x, z)).cloned();
                for &(a, y) in &covering {
                    if a != x || !poset.leq(y, z) {
                        continue;
                    }
                    let tail = maps
                        .get(&(y, z))
                        .expect("longer pairs are filled before shorter ones");
                    let candidate = tail.mul(&maps[&(x, y)]);
                    match &composite {
                        None => composite = Some(candidate),
                        Some(existing) => {
                            if *existing != candidate {
                                return Err(PosetError::InconsistentRestrictions {
                                    from: x,
                                    to: z,
                                });
                            }
                        }
                    }
                }
                let value = composite.expect("comparable pairs are chain-connected");
                maps.insert((x, z), value);
            }
        }
        Ok(PosetSheaf { poset, dims, maps })
    }

    /// Same stalk everywhere, identity restrictions.
    pub fn constant(poset: Poset, dim: usize) -> Self {
        let dims = vec![dim; poset.size()];
        let hasse = poset
            .covering_pairs()
            .into_iter()
            .map(|pair| (pair, RatMatrix::identity(dim)))
            .collect();
        PosetSheaf::new(poset, dims, hasse).expect("identity restrictions are consistent")
    }

    pub fn direct_sum(&self, other: &PosetSheaf) -> Result<PosetSheaf, PosetError> {
        if self.poset != other.poset {
            return Err(PosetError::Shape("direct sum needs a common poset".into()));
        }
        let dims = self
            .dims
            .iter()
            .zip(&other.dims)
            .map(|(a, b)| a + b)
            .collect();
        let hasse = self
            .poset
            .covering_pairs()
            .into_iter()
            .map(|pair| (pair, self.maps[&pair].direct_sum(&other.maps[&pair])))
            .collect();
        PosetSheaf::new(self.poset.clone(), dims, hasse)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn stalk_dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    /// Composite restriction for any comparable pair x <= y.
    pub fn restriction(&self, x: usize, y: usize) -> &RatMatrix {
        &self.maps[&(x, y)]
    }

    fn ambient_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn offset(&self, x: usize) -> usize {
        self.dims[..x].iter().sum()
    }

    /// Sections supported on a down-closed subset: families over its
    /// elements compatible with every restriction inside, embedded in the
    /// direct sum of all stalks with zeros outside the subset.
    pub fn sections_on(&self, subset: &BTreeSet<usize>) -> Subspace {
        let ambient = self.ambient_dim();
        let mut rows = Vec::new();
        // force zero outside the subset
        for x in 0..self.poset.size() {
            if subset.contains(&x) {
                continue;
            }
            for r in 0..self.dims[x] {
                let mut row = vec![Rat::zero(); ambient];
                row[self.offset(x) + r] = qi(1);
                rows.push(row);
            }
        }
        // compatibility along every comparable pair inside the subset
        for &x in subset {
            for &y in subset {
                if x == y || !self.poset.leq(x, y) {
                    continue;
                }
                let m = &self.maps[&(x, y)];
                for r in 0..self.dims[y] {
                    let mut row = vec![Rat::zero(); ambient];
                    for c in 0..self.dims[x] {
                        row[self.offset(x) + c] = m[(r, c)].clone();
                    }
                    row[self.offset(y) + r] -= qi(1);
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return RatMatrix::zero(0, ambient).kernel();
        }
        RatMatrix::from_rows(rows).kernel()
    }

    /// Sections over the whole poset.
    pub fn global_sections(&self) -> Subspace {
        let all: BTreeSet<usize> = (0..self.poset.size()).collect();
        self.sections_on(&all)
    }
}

/// Check that cover members are down-closed and jointly cover the poset.
pub fn validate_cover(poset: &Poset, cover: &[BTreeSet<usize>]) -> Result<(), PosetError> {
    if cover.is_empty() {
        return Err(PosetError::Shape("cover needs at least one member".into()));
    }
    for (i, member) in cover.iter().enumerate() {
        if let Some(&z) = member.iter().find(|&&z| z >= poset.size()) {
            return Err(PosetError::Shape(format!("cover member {i} contains {z}, out of range")));
        }
        if let Some(w) = poset.is_down_closed(member) {
            return Err(PosetError::NotDownClosed { member: i, element: w });
        }
    }
    for x in 0..poset.size() {
        if !cover.iter().any(|m| m.contains(&x)) {
            return Err(PosetError::CoverIncomplete { element: x });
        }
    }
    Ok(())
}

/// Tuple diagram of a sheaf over a closed cover: for each strictly
/// increasing tuple of member indices, the sheaf cut down to the
/// intersection of those members, with identity-or-zero face maps.
/// Duplicate members are allowed and appear as distinct indices.
#[derive(Clone, Debug)]
pub struct SimplicialDiagram {
    sheaf: PosetSheaf,
    cover: Vec<BTreeSet<usize>>,
    tuples: Vec<Vec<Vec<usize>>>,
}

fn increasing_tuples(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &out {
            let start = t.last().map_or(0, |&l| l + 1);
            for i in start..m {
                let mut v = t.clone();
                v.push(i);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl SimplicialDiagram {
    pub fn sheaf(&self) -> &PosetSheaf {
        &self.sheaf
    }

    pub fn cover(&self) -> &[BTreeSet<usize>] {
        &self.cover
    }

    /// Tuples of length q + 1, the level-q index set.
    pub fn level(&self, q: usize) -> &[Vec<usize>] {
        &self.tuples[q]
    }

    pub fn levels(&self) -> usize {
        self.tuples.len()
    }

    pub fn intersection(&self, tuple: &[usize]) -> BTreeSet<usize> {
        let mut out = self.cover[tuple[0]].clone();
        for &i in &tuple[1..] {
            out = out.intersection(&self.cover[i]).copied().collect();
        }
        out
    }

    /// Stalk of the cut-down sheaf for a tuple at an element.
    pub fn stalk_dim(&self, tuple: &[usize], x: usize) -> usize {
        if tuple.iter().all(|&i| self.cover[i].contains(&x)) {
            self.sheaf.stalk_dim(x)
        } else {
            0
        }
    }

    /// Tuples with equal member intersections carry literally equal cut-down
    /// sheaves, so the comparison maps between them are isomorphisms. This
    /// verifies that stalk data and face behavior agree for every such pair.
    pub fn tau_isomorphisms_hold(&self) -> bool {
        for level in &self.tuples {
            for (i, s) in level.iter().enumerate() {
                for t in level.iter().skip(i + 1) {
                    if self.intersection(s) != self.intersection(t) {
                        continue;
                    }
                    for x in 0..self.sheaf.poset().size() {
                        if self.stalk_dim(s, x) != self.stalk_dim(t, x) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Build the tuple diagram of a sheaf over a validated closed cover.
pub fn s_bullet(
    sheaf: &PosetSheaf,
    cover: &[BTreeSet<usize>],
) -> Result<SimplicialDiagram, PosetError> {
    validate_cover(sheaf.poset(), cover)?;
    let m = cover.len();
    let tuples: Vec<Vec<Vec<usize>>> =
        (1..=m).map(|len| increasing_tuples(m, len)).collect();
    Ok(SimplicialDiagram { sheaf: sheaf.clone(), cover: cover.to_vec(), tuples })
}

/// Normalized total complex of global sections of the tuple diagram. Level q
/// collects the sections of every (q+1)-tuple sheaf, and the differential is
/// the alternating sum over index insertions of the section restriction.
pub fn tot(diagram: &SimplicialDiagram) -> ChainComplex {
    let sheaf = diagram.sheaf();
    // section space and basis per tuple
    let mut spaces: Vec<Vec<Subspace>> = Vec::new();
    for q in 0..diagram.levels() {
        let level = diagram
            .level(q)
            .iter()
            .map(|t| sheaf.sections_on(&diagram.intersection(t)))
            .collect();
        spaces.push(level);
    }
    let dims: Vec<usize> = spaces
        .iter()
        .map(|level| level.iter().map(|s| s.dim()).sum())
        .collect();
    let mut maps = Vec::new();
    for q in 0..diagram.levels() - 1 {
        let source_level = diagram.level(q);
        let target_level = diagram.level(q + 1);
        let mut entries = vec![vec![Rat::zero(); dims[q]]; dims[q + 1]];
        let mut src_offsets = Vec::new();
        let mut acc = 0usize;
        for s in &spaces[q] {
            src_offsets.push(acc);
            acc += s.dim();
        }
        let mut tgt_offsets = Vec::new();
        acc = 0;
        for s in &spaces[q + 1] {
            tgt_offsets.push(acc);
            acc += s.dim();
        }
        for (ti, target) in target_level.iter().enumerate() {
            if spaces[q + 1][ti].dim() == 0 {
                continue;
            }
            for omit in 0..target.len() {
                let mut source = target.clone();
                source.remove(omit);
                let si = source_level
                    .iter()
                    .position(|t| t == &source)
                    .expect("faces of a tuple are tuples");
                let src_space = &spaces[q][si];
                if src_space.dim() == 0 {
                    continue;
                }
                // project each source section onto the target support and
                // express it in the target section basis
                let support = diagram.intersection(target);
                let mut projected_rows = Vec::new();
                for r in 0..src_space.dim() {
                    let mut row = src_space.basis().row(r);
                    for x in 0..sheaf.poset().size() {
                        if !support.contains(&x) {
                            for c in 0..sheaf.stalk_dim(x) {
                                row[sheaf.offset(x) + c] = Rat::zero();
                            }
                        }
                    }
                    projected_rows.push(row);
                }
                let projected = RatMatrix::from_rows(projected_rows).transpose();
                let basis = spaces[q + 1][ti].basis().transpose();
                let coords = basis
                    .solve_matrix(&projected)
                    .expect("restricted sections are sections");
                debug_assert_eq!(coords.rows(), spaces[q + 1][ti].dim());
                let negate = omit % 2 == 1;
                for r in 0..coords.rows() {
                    for c in 0..coords.cols() {
                        let v = coords[(r, c)].clone();
                        let slot =
                            &mut entries[tgt_offsets[ti] + r][src_offsets[si] + c];
                        if negate {
                            *slot -= v;
                        } else {
                            *slot += v;
                        }
                    }
                }
            }
        }
        let flat: Vec<Rat> = entries.into_iter().flatten().collect();
        maps.push(RatMatrix::from_entries(dims[q + 1], dims[q], flat));
    }
    ChainComplex::new(0, dims, maps)
}

/// Stalkwise outcome of the descent check: at each element the augmented
/// complex of the tuple diagram must be exact.
#[derive(Clone, Debug)]
pub struct CechResolutionReport {
    pub stalk_exact: Vec<(usize, bool)>,
    pub passed: bool,
}

/// Verify that the tuple diagram resolves the sheaf stalk by stalk: at every
/// element, the augmented complex built from the diagram's stalks and face
/// maps has no cohomology in any degree.
pub fn check_cech_resolution(
    sheaf: &PosetSheaf,
    cover: &[BTreeSet<usize>],
) -> Result<CechResolutionReport, PosetError> {
    let diagram = s_bullet(sheaf, cover)?;
    let mut stalk_exact = Vec::new();
    for x in 0..sheaf.poset().size() {
        let d = sheaf.stalk_dim(x);
        // dims of the augmented complex, starting at the stalk itself
        let mut dims = vec![d];
        for q in 0..diagram.levels() {
            let total: usize = diagram.level(q).iter().map(|t| diagram.stalk_dim(t, x)).sum();
            dims.push(total);
        }
        let mut maps = Vec::new();
        // augmentation places the stalk diagonally into covering members
        let mut aug = vec![vec![Rat::zero(); d]; dims[1]];
        let mut offset = 0usize;
        for t in diagram.level(0) {
            let dt = diagram.stalk_dim(t, x);
            for r in 0..dt {
                aug[offset + r][r] = qi(1);
            }
            offset += dt;
        }
        let aug_flat: Vec<Rat> = aug.into_iter().flatten().collect();
        maps.push(RatMatrix::from_entries(dims[1], d, aug_flat));
        for q in 0..diagram.levels() - 1 {
            let source_level = diagram.level(q);
            let target_level = diagram.level(q + 1);
            let mut entries = vec![vec![Rat::zero(); dims[q + 1]]; dims[q + 2]];
            let src_offset = |si: usize| -> usize {
                source_level[..si].iter().map(|t| diagram.stalk_dim(t, x)).sum()
            };
            let tgt_offset = |ti: usize| -> usize {
                target_level[..ti].iter().map(|t| diagram.stalk_dim(t, x)).sum()
            };
            for (ti, target) in target_level.iter().enumerate() {
                let dt = diagram.stalk_dim(target, x);
                if dt == 0 {
                    continue;
                }
                for omit in 0..target.len() {
                    let mut source = target.clone();
                    source.remove(omit);
                    let si = source_level
                        .iter()
                        .position(|t| t == &source)
                        .expect("faces of a tuple are tuples");
                    if diagram.stalk_dim(&source, x) == 0 {
                        continue;
                    }
                    // face map on stalks is the identity wherever both live
                    let sign = if omit % 2 == 1 { -qi(1) } else { qi(1) };
                    for r in 0..dt {
                        entries[tgt_offset(ti) + r][src_offset(si) + r] += &sign;
                    }
                }
            }
            let flat: Vec<Rat> = entries.into_iter().flatten().collect();
            maps.push(RatMatrix::from_entries(dims[q + 2], dims[q + 1], flat));
        }
        let complex = ChainComplex::new(-1, dims, maps);
        let exact = complex.cohomology_dims().iter().all(|&(_, dim)| dim == 0);
        stalk_exact.push((x, exact));
    }
    let passed = stalk_exact.iter().all(|&(_, ok)| ok);
    Ok(CechResolutionReport { stalk_exact, passed })
}

/// Natural transformation between sheaves on a common poset, one matrix per
/// element.
#[derive(Clone, Debug)]
pub struct SheafMap {
    pub components: Vec<RatMatrix>,
}

/// Componentwise isomorphism criterion for the induced map of tuple
/// diagrams: the transformation must commute with every restriction, and
/// then it is an isomorphism of diagrams exactly when each stalk component
/// is invertible.
pub fn componentwise_iso(from: &PosetSheaf, to: &PosetSheaf, map: &SheafMap) -> bool {
    let poset = from.poset();
    if to.poset() != poset || map.components.len() != poset.size() {
        return false;
    }
    for x in 0..poset.size() {
        let m = &map.components[x];
        if m.rows() != to.stalk_dim(x) || m.cols() != from.stalk_dim(x) {
            return false;
        }
    }
    for (a, b) in poset.covering_pairs() {
        let lhs = map.components[b].mul(from.restriction(a, b));
        let rhs = to.restriction(a, b).mul(&map.components[a]);
        if lhs != rhs {
            return false;
        }
    }
    map.components.iter().all(|m| m.rows() == m.cols() && m.is_invertible())
}

/// Random poset on n elements: each pair i < j is related with chance one in
/// three, then closed transitively.
pub fn random_poset(rng: &mut impl Rng, n: usize) -> Poset {
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_range(0..3) == 0 {
                relations.push((i, j));
            }
        }
    }
    Poset::new(n, &relations).expect("relations ordered by index cannot cycle")
}

/// Random cover by down-closed sets whose union is the whole poset; the
/// final member absorbs whatever the random members missed.
pub fn random_down_closed_cover(
    rng: &mut impl Rng,
    poset: &Poset,
    members: usize,
) -> Vec<BTreeSet<usize>> {
    let n = poset.size();
    let mut cover = Vec::new();
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    for _ in 0..members.max(1) {
        let mut seed = BTreeSet::new();
        for x in 0..n {
            if rng.gen_range(0..2) == 0 {
                seed.insert(x);
            }
        }
        if seed.is_empty() {
            seed.insert(rng.gen_range(0..n));
        }
        let member = poset.down_closure(&seed);
        covered.extend(member.iter().copied());
        cover.push(member);
    }
    let missing: BTreeSet<usize> = (0..n).filter(|x| !covered.contains(x)).collect();
    if !missing.is_empty() {
        let last = cover.last_mut().expect("at least one member");
        let patched: BTreeSet<usize> = last.union(&missing).copied().collect();
        *last = poset.down_closure(&patched);
    }
    cover
}

/// Random sheaf built functorially: fix an ambient space, give every element
/// a random vector, and let the stalk at x be the quotient of the ambient by
/// the span of the vectors attached to elements outside the up-set of x.
/// Quotient maps are monotone by construction, so restrictions compose
/// consistently.
pub fn random_sheaf(rng: &mut impl Rng, poset: &Poset, ambient: usize) -> PosetSheaf {
    let n = poset.size();
    let vectors: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..ambient).map(|_| qi(rng.gen_range(-2..=2))).collect())
        .collect();
    let full = Subspace::from_rows(
        ambient,
        (0..ambient)
            .map(|i| {
                let mut row = vec![Rat::zero(); ambient];
                row[i] = qi(1);
                row
            })
            .collect(),
    );
    let killed: Vec<Subspace> = (0..n)
        .map(|x| {
            let rows: Vec<Vec<Rat>> = (0..n)
                .filter(|&z| !poset.leq(x, z))
                .map(|z| vectors[z].clone())
                .collect();
            Subspace::from_rows(ambient, rows)
        })
        .collect();
    let stalk_basis: Vec<RatMatrix> =
        (0..n).map(|x| full.complement_of(&killed[x])).collect();
    let dims: Vec<usize> = stalk_basis.iter().map(|b| b.rows()).collect();
    let mut hasse = BTreeMap::new();
    for (a, b) in poset.covering_pairs() {
        // express each stalk-a basis vector in stalk-b coordinates modulo
        // the enlarged kernel
        let mut span_rows = Vec::new();
        for r in 0..dims[b] {
            span_rows.push(stalk_basis[b].row(r));
        }
        for r in 0..killed[b].dim() {
            span_rows.push(killed[b].basis().row(r));
        }
        let span = RatMatrix::from_rows(span_rows).transpose();
        let targets = stalk_basis[a].transpose();
        let coords = span
            .solve_matrix(&targets)
            .expect("ambient vectors decompose against a full spanning set");
        let mut entries = Vec::new();
        for r in 0..dims[b] {
            for c in 0..dims[a] {
                entries.push(coords[(r, c)].clone());
            }
        }
        hasse.insert((a, b), RatMatrix::from_entries(dims[b], dims[a], entries));
    }
    PosetSheaf::new(poset.clone(), dims, hasse).expect("quotient construction is consistent")
}
