//! Periodic two-dimensional cone decompositions with a free shift action.
//!
//! Ray generators follow a three-term recurrence whose transfer matrix is
//! hyperbolic, so consecutive rays span unimodular cones and the period
//! action shifts the fan freely. Star covers and their nerve are derived
//! from integer cone-containment arithmetic, and the chain complex of the
//! nerve becomes a finite free resolution over the group ring of the shift
//! lattice, certified by orbit counting and a windowed exactness probe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::groupcoh::{
    check_windowed_exactness, FreeResolution, Group, GroupError, GroupRingElement,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanError {
    CoefficientTooSmall(i64),
    SeedsNotUnimodular(i64),
    PeriodZero,
    EmptyWindow,
    NotFree(String),
    Group(GroupError),
}

impl fmt::Display for FanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanError::CoefficientTooSmall(a) => {
                write!(f, "recurrence coefficient {a} is below the hyperbolic threshold 3")
            }
            FanError::SeedsNotUnimodular(d) => {
                write!(f, "seed rays span determinant {d}, expected 1")
            }
            FanError::PeriodZero => write!(f, "period must be at least one"),
            FanError::EmptyWindow => write!(f, "window must contain at least one ray"),
            FanError::NotFree(msg) => write!(f, "shift action is not free: {msg}"),
            FanError::Group(e) => write!(f, "group layer: {e}"),
        }
    }
}

impl std::error::Error for FanError {}

impl From<GroupError> for FanError {
    fn from(e: GroupError) -> Self {
        FanError::Group(e)
    }
}

fn det2(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

fn mat2_apply(m: [[i64; 2]; 2], v: [i64; 2]) -> [i64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn mat2_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Fan of rays v_k in the plane generated by v_{k+1} = a v_k - v_{k-1} from
/// two seed rays spanning determinant one, together with the shift of the
/// indices by a fixed period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicFan2D {
    a: i64,
    seeds: [[i64; 2]; 2],
    period: usize,
}

impl PeriodicFan2D {
    pub fn new(a: i64, v0: [i64; 2], v1: [i64; 2], period: usize) -> Result<Self, FanError> {
        if a < 3 {
            return Err(FanError::CoefficientTooSmall(a));
        }
        let d = det2(v0, v1);
        if d != 1 {
            return Err(FanError::SeedsNotUnimodular(d));
        }
        if period == 0 {
            return Err(FanError::PeriodZero);
        }
        Ok(PeriodicFan2D { a, seeds: [v0, v1], period })
    }

    /// Seeds (1, 0) and (1, 1) with period one.
    pub fn standard(a: i64) -> Result<Self, FanError> {
        PeriodicFan2D::new(a, [1, 0], [1, 1], 1)
    }

    pub fn coefficient(&self) -> i64 {
        self.a
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Ray generator at any index, following the recurrence both ways.
    pub fn ray(&self, k: i64) -> [i64; 2] {
        let (mut lo, mut hi) = (self.seeds[0], self.seeds[1]);
        if k >= 0 {
            let mut i = 0i64;
            while i < k {
                let next = [self.a * hi[0] - lo[0], self.a * hi[1] - lo[1]];
                lo = hi;
                hi = next;
                i += 1;
            }
            lo
        } else {
            let mut i = 0i64;
            while i > k {
                let prev = [self.a * lo[0] - hi[0], self.a * lo[1] - hi[1]];
                hi = lo;
                lo = prev;
                i -= 1;
            }
            lo
        }
    }

    /// Integral matrix sending every v_k to v_{k+1}; determinant one, trace
    /// equal to the recurrence coefficient.
    pub fn transfer(&self) -> [[i64; 2]; 2] {
        let [v0, v1] = self.seeds;
        let v2 = [self.a * v1[0] - v0[0], self.a * v1[1] - v0[1]];
        // inverse of the unimodular column matrix (v0 v1) is its adjugate
        let inv = [[v1[1], -v1[0]], [-v0[1], v0[0]]];
        let cols = [[v1[0], v2[0]], [v1[1], v2[1]]];
        mat2_mul(cols, inv)
    }

    /// Matrix of the period action, sending v_k to v_{k+period}.
    pub fn period_action(&self) -> [[i64; 2]; 2] {
        let u = self.transfer();
        let mut out = u;
        for _ in 1..self.period {
            out = mat2_mul(out, u);
        }
        out
    }
}

/// Cell of the fan: a ray by index, or the two-dimensional cone spanned by
/// rays k and k+1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    Ray(i64),
    Cone(i64),
}

// closure containment of a point in the cone spanned by u and w, which must
// form a determinant-one basis
fn cone_contains(u: [i64; 2], w: [i64; 2], point: [i64; 2]) -> bool {
    debug_assert_eq!(det2(u, w), 1);
    det2(point, w) >= 0 && det2(u, point) >= 0
}

/// Star cover of a finite window of the fan: for every cell, the cells whose
/// interiors meet its star, derived from cone-containment arithmetic.
#[derive(Clone, Debug)]
pub struct StarCover {
    pub cells: Vec<Cell>,
    pub star_incidence: BTreeMap<Cell, BTreeSet<Cell>>,
    /// every star meets at most three cell interiors
    pub locally_finite: bool,
    /// ray stars intersect exactly along consecutive indices
    pub ray_graph_is_path: bool,
}

/// Compute the star cover over the rays with indices in the given range.
/// Cones are included when both spanning rays lie in the window.
pub fn star_cover(
    fan: &PeriodicFan2D,
    rays: std::ops::Range<i64>,
) -> Result<StarCover, FanError> {
    if rays.is_empty() {
        return Err(FanError::EmptyWindow);
    }
    let ray_indices: Vec<i64> = rays.clone().collect();
    let mut cells: Vec<Cell> = ray_indices.iter().map(|&k| Cell::Ray(k)).collect();
    for &k in &ray_indices {
        if rays.contains(&(k + 1)) {
            cells.push(Cell::Cone(k));
        }
    }
    // geometric containment of one cell in the closure of another
    let contains = |outer: Cell, inner: Cell| -> bool {
        match (outer, inner) {
            (Cell::Ray(a), Cell::Ray(b)) => fan.ray(a) == fan.ray(b),
            (Cell::Cone(c), Cell::Ray(b)) => {
                cone_contains(fan.ray(c), fan.ray(c + 1), fan.ray(b))
            }
            (Cell::Cone(c), Cell::Cone(d)) => {
                cone_contains(fan.ray(c), fan.ray(c + 1), fan.ray(d))
                    && cone_contains(fan.ray(c), fan.ray(c + 1), fan.ray(d + 1))
            }
            (Cell::Ray(_), Cell::Cone(_)) => false,
        }
    };
    let mut star_incidence = BTreeMap::new();
    for &c in &cells {
        // the interior of a cell lies inside the star exactly when the cell
        // contains the one whose star is taken
        let meets: BTreeSet<Cell> = cells.iter().copied().filter(|&t| contains(t, c)).collect();
        star_incidence.insert(c, meets);
    }
    let locally_finite = star_incidence.values().all(|s| !s.is_empty() && s.len() <= 3);
    // two ray stars intersect exactly when some window cone contains both
    let mut ray_graph_is_path = true;
    for (i, &a) in ray_indices.iter().enumerate() {
        for &b in ray_indices.iter().skip(i + 1) {
            let meet = cells.iter().any(|&t| {
                matches!(t, Cell::Cone(_)) && contains(t, Cell::Ray(a)) && contains(t, Cell::Ray(b))
            });
            let consecutive = (a - b).abs() == 1;
            if meet != consecutive {
                ray_graph_is_path = false;
            }
        }
    }
    Ok(StarCover { cells, star_incidence, locally_finite, ray_graph_is_path })
}

/// Free resolution extracted from the nerve of the ray-star cover, with its
/// freeness certificate and windowed exactness outcomes.
#[derive(Clone, Debug)]
pub struct CechReport {
    pub resolution: FreeResolution,
    /// ranks per degree over the group ring, one per index orbit
    pub ranks: Vec<usize>,
    /// the period action moves every window ray
    pub fixed_point_free: bool,
    /// window cell counts equal rank times the number of covered periods
    pub window_counts_match: bool,
    /// (inner window radius, exactness verdict) for nested probes
    pub exactness: Vec<(i64, bool)>,
    pub passed: bool,
}

/// Chain complex of the nerve of the ray-star cover as a free resolution of
/// the integers over the group ring of the shift lattice.
///
/// Stars of two-dimensional cones lie inside the stars of their spanning
/// rays, so the maximal members of the star cover are the ray stars; their
/// nerve is the path graph on the rays, giving a two-term complex with one
/// orbit of vertices and one orbit of edges per period index.
pub fn cech_chain_complex(fan: &PeriodicFan2D) -> Result<CechReport, FanError> {
    let p = fan.period();
    let action = fan.period_action();
    let trace = action[0][0] + action[1][1];
    if trace.abs() <= 2 {
        return Err(FanError::NotFree(format!(
            "period action has trace {trace}, so some power could fix a cone"
        )));
    }
    // the nerve must be a path before its chain complex means anything
    let window = star_cover(fan, -1..(3 * p as i64 + 1))?;
    if !window.ray_graph_is_path || !window.locally_finite {
        return Err(FanError::NotFree("ray stars do not form a path nerve".into()));
    }
    let mut fixed_point_free = true;
    for k in 0..(3 * p as i64) {
        let moved = mat2_apply(action, fan.ray(k));
        if moved == fan.ray(k) {
            fixed_point_free = false;
        }
        // orbit structure: the action must realize the index shift
        if moved != fan.ray(k + p as i64) {
            return Err(FanError::NotFree(format!(
                "period action does not shift ray {k} by the period"
            )));
        }
    }
    // orbit counting on truncated windows: W covered periods hold W p rays
    // and W p - 1 interior cones, one edge orbit per ray orbit
    let mut window_counts_match = true;
    for w in 1..=3usize {
        let cover = star_cover(fan, 0..(w * p) as i64)?;
        let rays = cover.cells.iter().filter(|c| matches!(c, Cell::Ray(_))).count();
        let cones = cover.cells.iter().filter(|c| matches!(c, Cell::Cone(_))).count();
        if rays != p * w || cones != p * w - 1 {
            window_counts_match = false;
        }
    }
    // boundary of the edge joining rays j and j+1; crossing the period seam
    // picks up the shift generator
    let group = Group::FreeAbelian(1);
    let mut boundary = vec![vec![GroupRingElement::zero(); p]; p];
    for j in 0..p {
        boundary[j][j] = boundary[j][j].add(&GroupRingElement::monomial(vec![0], -1));
        if j + 1 < p {
            boundary[j][j + 1] =
                boundary[j][j + 1].add(&GroupRingElement::monomial(vec![0], 1));
        } else {
            boundary[j][0] = boundary[j][0].add(&GroupRingElement::monomial(vec![1], 1));
        }
    }
    let resolution =
        FreeResolution::new(group, vec![p, p], vec![boundary], vec![1; p])?;
    let mut exactness = Vec::new();
    for (inner, outer) in [(2i64, 5i64), (3, 7)] {
        let report = check_windowed_exactness(&resolution, inner, outer)?;
        exactness.push((inner, report.passed));
    }
    let stable = exactness.iter().all(|&(_, ok)| ok);
    let passed = fixed_point_free && window_counts_match && stable;
    Ok(CechReport {
        resolution,
        ranks: vec![p, p],
        fixed_point_free,
        window_counts_match,
        exactness,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcoh::{cohomology_of_group, koszul_resolution, GroupAction};
    use crate::linalg::RatMatrix;

    #[test]
    fn recurrence_extends_both_directions() {
        let fan = PeriodicFan2D::standard(3).unwrap();
        assert_eq!(fan.ray(0), [1, 0]);
        assert_eq!(fan.ray(1), [1, 1]);
        assert_eq!(fan.ray(2), [2, 3]);
        assert_eq!(fan.ray(3), [5, 8]);
        assert_eq!(fan.ray(-1), [2, -1]);
        // consecutive rays always span determinant one
        for k in -3..4 {
            assert_eq!(det2(fan.ray(k), fan.ray(k + 1)), 1);
        }
    }

    #[test]
    fn transfer_matrix_shifts_rays() {
        let fan = PeriodicFan2D::standard(3).unwrap();
        let u = fan.transfer();
        assert_eq!(u[0][0] + u[1][1], 3);
        assert_eq!(u[0][0] * u[1][1] - u[0][1] * u[1][0], 1);
        for k in -2..4 {
            assert_eq!(mat2_apply(u, fan.ray(k)), fan.ray(k + 1));
        }
        let two = PeriodicFan2D::new(3, [1, 0], [1, 1], 2).unwrap();
        for k in -2..3 {
            assert_eq!(mat2_apply(two.period_action(), two.ray(k)), two.ray(k + 2));
        }
    }

    #[test]
    fn constructor_rejects_malformed_fans() {
        assert_eq!(
            PeriodicFan2D::standard(2).unwrap_err(),
            FanError::CoefficientTooSmall(2)
        );
        assert_eq!(
            PeriodicFan2D::new(3, [1, 0], [3, 2], 1).unwrap_err(),
            FanError::SeedsNotUnimodular(2)
        );
        assert_eq!(PeriodicFan2D::new(3, [1, 0], [1, 1], 0).unwrap_err(), FanError::PeriodZero);
    }

    #[test]
    fn ray_stars_meet_their_neighboring_cones() {
        let fan = PeriodicFan2D::standard(3).unwrap();
        let cover = star_cover(&fan, 0..3).unwrap();
        assert!(cover.locally_finite);
        assert!(cover.ray_graph_is_path);
        // the middle ray sees itself and both neighboring cones
        let middle = &cover.star_incidence[&Cell::Ray(1)];
        let expected: BTreeSet<Cell> =
            [Cell::Ray(1), Cell::Cone(0), Cell::Cone(1)].into_iter().collect();
        assert_eq!(middle, &expected);
        // a cone star is the cone interior alone
        let cone_star: BTreeSet<Cell> = [Cell::Cone(0)].into_iter().collect();
        assert_eq!(cover.star_incidence[&Cell::Cone(0)], cone_star);
    }

    #[test]
    fn degenerate_window_star_is_itself() {
        let fan = PeriodicFan2D::standard(4).unwrap();
        let cover = star_cover(&fan, 0..1).unwrap();
        assert_eq!(cover.cells, vec![Cell::Ray(0)]);
        let own_star: BTreeSet<Cell> = [Cell::Ray(0)].into_iter().collect();
        assert_eq!(cover.star_incidence[&Cell::Ray(0)], own_star);
    }

    #[test]
    fn nerve_resolution_is_two_term_and_exact() {
        let fan = PeriodicFan2D::standard(3).unwrap();
        let report = cech_chain_complex(&fan).unwrap();
        assert!(report.passed);
        assert_eq!(report.ranks, vec![1, 1]);
        assert!(report.fixed_point_free);
        assert!(report.exactness.iter().all(|&(_, ok)| ok));
    }

    #[test]
    fn fan_resolution_reproduces_lattice_cohomology() {
        let fan = PeriodicFan2D::standard(3).unwrap();
        let report = cech_chain_complex(&fan).unwrap();
        let trivial = GroupAction::new(Group::FreeAbelian(1), vec![RatMatrix::identity(1)]).unwrap();
        let dims = cohomology_of_group(&report.resolution, &trivial).unwrap().dims();
        assert_eq!(dims, vec![1, 1]);
    }

    #[test]
    fn fan_and_subset_resolutions_agree_on_modules() {
        let fan = PeriodicFan2D::standard(3).unwrap();
        let report = cech_chain_complex(&fan).unwrap();
        let koszul = koszul_resolution(1);
        let unipotent =
            GroupAction::new(Group::FreeAbelian(1), vec![RatMatrix::from_i64(&[&[1, 1], &[0, 1]])])
                .unwrap();
        let via_fan = cohomology_of_group(&report.resolution, &unipotent).unwrap().dims();
        let via_koszul = cohomology_of_group(&koszul, &unipotent).unwrap().dims();
        assert_eq!(via_fan, via_koszul);
        assert_eq!(via_fan, vec![1, 1]);
    }

    #[test]
    fn longer_periods_keep_lattice_cohomology() {
        let fan = PeriodicFan2D::new(3, [1, 0], [1, 1], 2).unwrap();
        let report = cech_chain_complex(&fan).unwrap();
        assert!(report.passed);
        assert_eq!(report.ranks, vec![2, 2]);
        let trivial = GroupAction::new(Group::FreeAbelian(1), vec![RatMatrix::identity(1)]).unwrap();
        let dims = cohomology_of_group(&report.resolution, &trivial).unwrap().dims();
        assert_eq!(dims, vec![1, 1]);
    }
}
