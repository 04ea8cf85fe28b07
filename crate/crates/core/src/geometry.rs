//! Annular sectors in per-dimension polar coordinates.
//!
//! A sector is stored through its modulus center `c`, modulus size `s`,
//! phase center `θ` and extra arc `a`, all per dimension, plus the global
//! offset `β`. The derived quantities are
//!
//! ```text
//! u = c + s/2      l = c - s/2      w = u - l + 1 = s + 1
//! δ = a + βπ       phase boundaries θ ± a/2
//! ```
//!
//! Distances are piecewise: a shallow slope (`1/w`, `1/δ`) while the point is
//! inside the part being measured and a steep one (`w`, `δ`) outside, with
//! constant offsets chosen so both pieces meet at the boundary. The modulus
//! piece switches at `|m - c| = s/2`; the phase piece switches at
//! `|sin((p - θ)/2)| = 1/2`, the only point where the two phase pieces meet.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarVector {
    pub modulus: Vec<f64>,
    pub phase: Vec<f64>,
}

impl PolarVector {
    pub fn new(modulus: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        if modulus.len() != phase.len() {
            return Err(Error::DimensionMismatch(format!(
                "modulus has {} entries, phase has {}",
                modulus.len(),
                phase.len()
            )));
        }
        if let Some(m) = modulus.iter().find(|m| !(**m >= 0.0)) {
            return Err(Error::DimensionMismatch(format!("negative modulus {m}")));
        }
        let phase = phase.into_iter().map(wrap_phase).collect();
        Ok(PolarVector { modulus, phase })
    }

    pub fn dim(&self) -> usize {
        self.modulus.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnularSector {
    pub center: Vec<f64>,
    pub size: Vec<f64>,
    pub phase_center: Vec<f64>,
    pub arc_extra: Vec<f64>,
    pub beta: f64,
}

impl AnnularSector {
    /// Map unconstrained parameters onto a valid sector: absolute value for
    /// `c`, `s`, `a` and a wrap into `[0, 2π)` for `θ`.
    ///
    /// Panics if the slices differ in length.
    pub fn from_raw(raw_c: &[f64], raw_s: &[f64], raw_theta: &[f64], raw_a: &[f64], beta: f64) -> Self {
        let d = raw_c.len();
        assert!(
            raw_s.len() == d && raw_theta.len() == d && raw_a.len() == d,
            "sector raw vectors must share one length"
        );
        AnnularSector {
            center: raw_c.iter().map(|x| x.abs()).collect(),
            size: raw_s.iter().map(|x| x.abs()).collect(),
            phase_center: raw_theta.iter().copied().map(wrap_phase).collect(),
            arc_extra: raw_a.iter().map(|x| x.abs()).collect(),
            beta,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.center[i] + 0.5 * self.size[i]
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.center[i] - 0.5 * self.size[i]
    }

    /// Lower modulus bound clamped at the origin (membership and area only).
    pub fn lower_clamped(&self, i: usize) -> f64 {
        self.lower(i).max(0.0)
    }

    pub fn depth(&self, i: usize) -> f64 {
        self.size[i] + 1.0
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.arc_extra[i] + self.beta * PI
    }

    /// Upper and lower phase boundaries `θ ± a/2` (not wrapped).
    pub fn phase_bounds(&self, i: usize) -> (f64, f64) {
        let half = 0.5 * self.arc_extra[i];
        (self.phase_center[i] + half, self.phase_center[i] - half)
    }

    /// Half-width of the geometric arc, `min(δ, 2π)/2`.
    pub fn arc_half_width(&self, i: usize) -> f64 {
        0.5 * self.angle(i).min(TAU)
    }

    pub fn contains_modulus(&self, i: usize, m: f64) -> bool {
        m >= self.lower_clamped(i) && m <= self.upper(i)
    }

    pub fn contains_phase(&self, i: usize, p: f64) -> bool {
        circular_distance(p, self.phase_center[i]) <= self.arc_half_width(i)
    }

    pub fn contains(&self, point: &PolarVector) -> bool {
        (0..self.dim()).all(|i| self.contains_modulus(i, point.modulus[i]) && self.contains_phase(i, point.phase[i]))
    }
}

/// Smallest angular separation of two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d)
}

/// One per-dimension distance piece with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub value: f64,
    /// Derivative with respect to the offset (`|m - c|` or `σ`).
    pub d_offset: f64,
    /// Derivative with respect to the slope parameter (`w` or `δ`).
    pub d_scale: f64,
    pub inside: bool,
}

/// Modulus piece for offset `|m - c|` in a sector of size `s`.
pub fn modulus_term(offset: f64, size: f64) -> Term {
    let w = size + 1.0;
    if offset <= 0.5 * size {
        Term {
            value: offset / w,
            d_offset: 1.0 / w,
            d_scale: -offset / (w * w),
            inside: true,
        }
    } else {
        let k = 0.5 * (w - 1.0) * (w - 1.0 / w);
        Term {
            value: offset * w - k,
            d_offset: w,
            d_scale: offset - 0.5 * ((w - 1.0 / w) + (w - 1.0) * (1.0 + 1.0 / (w * w))),
            inside: false,
        }
    }
}

/// Phase piece for `σ = |sin((p - θ)/2)|` in a sector of angle `δ`.
pub fn phase_term(sigma: f64, angle: f64) -> Term {
    if sigma <= 0.5 {
        Term {
            value: sigma / angle,
            d_offset: 1.0 / angle,
            d_scale: -sigma / (angle * angle),
            inside: true,
        }
    } else {
        Term {
            value: sigma * angle - 0.5 * (angle - 1.0 / angle),
            d_offset: angle,
            d_scale: sigma - 0.5 * (1.0 + 1.0 / (angle * angle)),
            inside: false,
        }
    }
}

/// Evaluate one named modulus piece regardless of which one applies.
pub fn modulus_branch(offset: f64, size: f64, inside: bool) -> f64 {
    let w = size + 1.0;
    if inside {
        offset / w
    } else {
        offset * w - 0.5 * (w - 1.0) * (w - 1.0 / w)
    }
}

/// Evaluate one named phase piece regardless of which one applies.
pub fn phase_branch(sigma: f64, angle: f64, inside: bool) -> f64 {
    if inside {
        sigma / angle
    } else {
        sigma * angle - 0.5 * (angle - 1.0 / angle)
    }
}

pub fn phase_offset(phase: f64, center: f64) -> f64 {
    (0.5 * (phase - center)).sin().abs()
}

pub fn dist_mod(point_modulus: &[f64], sector: &AnnularSector) -> Vec<f64> {
    assert_eq!(point_modulus.len(), sector.dim());
    point_modulus
        .iter()
        .enumerate()
        .map(|(i, m)| modulus_term((m - sector.center[i]).abs(), sector.size[i]).value)
        .collect()
}

pub fn dist_phase(point_phase: &[f64], sector: &AnnularSector) -> Vec<f64> {
    assert_eq!(point_phase.len(), sector.dim());
    point_phase
        .iter()
        .enumerate()
        .map(|(i, p)| phase_term(phase_offset(*p, sector.phase_center[i]), sector.angle(i)).value)
        .collect()
}

/// Closed interval used for both modulus ranges and unwrapped arc pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Span {
    lo: f64,
    hi: f64,
}

impl Span {
    fn intersect(self, other: Span, eps: f64) -> Option<Span> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi - lo < -eps {
            None
        } else if hi < lo {
            let mid = 0.5 * (lo + hi);
            Some(Span { lo: mid, hi: mid })
        } else {
            Some(Span { lo, hi })
        }
    }

    fn within(self, other: Span, eps: f64) -> bool {
        self.lo >= other.lo - eps && self.hi <= other.hi + eps
    }
}

/// A subset of one polar plane, as a modulus range times a union of arc
/// pieces laid out on `[0, 2π]`. An empty piece list is the empty set.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PlaneRegion {
    modulus: Option<Span>,
    arcs: Vec<Span>,
}

impl PlaneRegion {
    /// Arcs reaching within `eps` of the seam at `0 ≡ 2π` carry a piece on
    /// both sides of it, so touching across the seam is still detected.
    pub(crate) fn of(sector: &AnnularSector, i: usize, eps: f64) -> Self {
        let modulus = Span {
            lo: sector.lower_clamped(i),
            hi: sector.upper(i),
        };
        let half = sector.arc_half_width(i);
        let theta = sector.phase_center[i];
        let arcs = if half >= PI {
            vec![Span { lo: 0.0, hi: TAU }]
        } else {
            let (lo, hi) = (theta - half, theta + half);
            if lo < eps {
                vec![
                    Span { lo: 0.0, hi },
                    Span {
                        lo: (lo + TAU).min(TAU),
                        hi: TAU,
                    },
                ]
            } else if hi > TAU - eps {
                vec![
                    Span {
                        lo: 0.0,
                        hi: (hi - TAU).max(0.0),
                    },
                    Span { lo, hi: TAU },
                ]
            } else {
                vec![Span { lo, hi }]
            }
        };
        PlaneRegion {
            modulus: Some(modulus),
            arcs,
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.modulus.is_none() || self.arcs.is_empty()
    }

    pub(crate) fn intersect(&self, other: &PlaneRegion, eps: f64) -> PlaneRegion {
        let modulus = match (self.modulus, other.modulus) {
            (Some(a), Some(b)) => a.intersect(b, eps),
            _ => None,
        };
        let arcs = self
            .arcs
            .iter()
            .flat_map(|a| other.arcs.iter().filter_map(move |b| a.intersect(*b, eps)))
            .collect();
        PlaneRegion { modulus, arcs }
    }

    pub(crate) fn within(&self, other: &PlaneRegion, eps: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let (a, b) = (self.modulus.unwrap(), other.modulus.unwrap());
        if !a.within(b, eps) {
            return false;
        }
        if other.arcs.iter().any(|b| b.lo <= eps && b.hi >= TAU - eps) {
            return true;
        }
        // a piece reaching across the seam is covered by the two end pieces
        self.arcs.iter().all(|x| other.arcs.iter().any(|y| x.within(*y, eps)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorRelation {
    pub equal: bool,
    pub a_subset_b: bool,
    pub b_subset_a: bool,
    pub disjoint: bool,
    pub overlapping: bool,
}

fn check_same_shape(a: &AnnularSector, b: &AnnularSector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "sectors have {} and {} dimensions",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Set relation between two sectors, dimension by dimension.
///
/// Containment and equality must hold in every dimension; the sectors are
/// disjoint as soon as one dimension separates them in modulus or phase.
pub fn sector_relation(a: &AnnularSector, b: &AnnularSector, eps: f64) -> Result<SectorRelation> {
    check_same_shape(a, b)?;
    let mut a_subset_b = true;
    let mut b_subset_a = true;
    let mut disjoint = false;
    for i in 0..a.dim() {
        let (ra, rb) = (PlaneRegion::of(a, i, eps), PlaneRegion::of(b, i, eps));
        a_subset_b &= ra.within(&rb, eps);
        b_subset_a &= rb.within(&ra, eps);
        disjoint |= ra.intersect(&rb, eps).is_empty();
    }
    Ok(SectorRelation {
        equal: a_subset_b && b_subset_a,
        a_subset_b,
        b_subset_a,
        disjoint,
        overlapping: !disjoint,
    })
}

/// Whether `a ∩ b ⊆ c` as sets.
pub fn intersection_within(a: &AnnularSector, b: &AnnularSector, c: &AnnularSector, eps: f64) -> Result<bool> {
    check_same_shape(a, b)?;
    check_same_shape(a, c)?;
    let pieces: Vec<PlaneRegion> = (0..a.dim())
        .map(|i| PlaneRegion::of(a, i, eps).intersect(&PlaneRegion::of(b, i, eps), eps))
        .collect();
    if pieces.iter().any(PlaneRegion::is_empty) {
        return Ok(true);
    }
    Ok(pieces
        .iter()
        .enumerate()
        .all(|(i, p)| p.within(&PlaneRegion::of(c, i, eps), eps)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorArea {
    pub per_dim: Vec<f64>,
    pub geometric_mean: f64,
}

pub fn sector_area(sector: &AnnularSector) -> SectorArea {
    let per_dim: Vec<f64> = (0..sector.dim())
        .map(|i| {
            let u = sector.upper(i);
            let l = sector.lower_clamped(i);
            0.5 * sector.angle(i).min(TAU) * (u * u - l * l)
        })
        .collect();
    let geometric_mean = if per_dim.is_empty() || per_dim.iter().any(|a| *a <= 0.0) {
        0.0
    } else {
        (per_dim.iter().map(|a| a.ln()).sum::<f64>() / per_dim.len() as f64).exp()
    };
    SectorArea {
        per_dim,
        geometric_mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn one_dim(c: f64, s: f64, theta: f64, a: f64, beta: f64) -> AnnularSector {
        AnnularSector::from_raw(&[c], &[s], &[theta], &[a], beta)
    }

    #[test]
    fn zero_raws_give_unit_depth() {
        let s = one_dim(0.0, 0.0, 0.0, 0.0, 0.5);
        assert_eq!(s.center[0], 0.0);
        assert_eq!(s.size[0], 0.0);
        assert_eq!(s.depth(0), 1.0);
        assert_abs_diff_eq!(s.angle(0), PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn bounds_from_center_and_size() {
        let s = one_dim(2.0, 2.0, 0.0, 0.0, 0.5);
        assert_eq!(s.upper(0), 3.0);
        assert_eq!(s.lower(0), 1.0);
        assert_eq!(s.depth(0), 3.0);
        let neg = one_dim(-2.0, -2.0, 0.0, -0.3, 0.5);
        assert_eq!(neg.upper(0), 3.0);
        assert_eq!(neg.arc_extra[0], 0.3);
    }

    #[test]
    fn phase_center_wraps() {
        let s = one_dim(0.0, 0.0, -PI / 2.0, 0.0, 0.5);
        assert_abs_diff_eq!(s.phase_center[0], 1.5 * PI, epsilon = 1e-15);
        assert_eq!(wrap_phase(-1e-18), 0.0);
    }

    #[test]
    fn phase_bounds_recover_boundaries() {
        let s = one_dim(1.0, 1.0, 1.0, 0.4, 0.25);
        let (phi, psi) = s.phase_bounds(0);
        assert_abs_diff_eq!(phi - psi + s.beta * PI, s.angle(0), epsilon = 1e-15);
        assert_abs_diff_eq!(0.5 * (phi + psi), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn modulus_distance_examples() {
        let s = one_dim(2.0, 2.0, 0.0, 0.0, 0.5);
        assert_abs_diff_eq!(dist_mod(&[2.5], &s)[0], 0.5 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_mod(&[4.0], &s)[0], 6.0 - 8.0 / 3.0, epsilon = 1e-12);
        assert_eq!(dist_mod(&[2.0], &s)[0], 0.0);
    }

    #[test]
    fn phase_distance_examples() {
        // δ = 2 with β = 0: a = 2
        let s = one_dim(1.0, 0.0, 0.0, 2.0, 0.0);
        assert_eq!(dist_phase(&[0.0], &s)[0], 0.0);
        assert_abs_diff_eq!(dist_phase(&[PI / 6.0], &s)[0], (PI / 12.0).sin() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dist_phase(&[PI], &s)[0], 1.25, epsilon = 1e-12);
    }

    #[test]
    fn identical_sectors_are_equal() {
        let a = AnnularSector::from_raw(&[1.0, 2.0], &[0.5, 1.0], &[0.3, 6.0], &[0.2, 0.1], 0.5);
        let rel = sector_relation(&a, &a, DEFAULT_TOLERANCE).unwrap();
        assert!(rel.equal && rel.a_subset_b && rel.b_subset_a && !rel.disjoint && rel.overlapping);
    }

    #[test]
    fn separated_modulus_is_disjoint() {
        let a = one_dim(1.5, 1.0, 0.0, 0.0, 0.5);
        let b = one_dim(3.5, 1.0, 0.0, 0.0, 0.5);
        let rel = sector_relation(&a, &b, DEFAULT_TOLERANCE).unwrap();
        assert!(rel.disjoint && !rel.overlapping && !rel.a_subset_b && !rel.equal);
    }

    #[test]
    fn wrap_around_arc_containment() {
        // A covers [7π/4, π/4]; B covers [0, π/8]
        let a = one_dim(1.0, 1.0, 0.0, PI / 2.0, 0.0);
        let b = one_dim(1.0, 1.0, PI / 16.0, PI / 8.0, 0.0);
        let rel = sector_relation(&a, &b, DEFAULT_TOLERANCE).unwrap();
        assert!(rel.b_subset_a);
        assert!(!rel.a_subset_b);
        assert!(!rel.disjoint);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = one_dim(1.0, 1.0, 0.0, 0.0, 0.5);
        let b = AnnularSector::from_raw(&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0], 0.5);
        assert!(sector_relation(&a, &b, 1e-6).is_err());
    }

    #[test]
    fn area_examples() {
        // c=2, s=2, δ=2
        let s = one_dim(2.0, 2.0, 0.0, 2.0, 0.0);
        let area = sector_area(&s);
        assert_abs_diff_eq!(area.per_dim[0], 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(area.geometric_mean, 8.0, epsilon = 1e-12);

        let ring = sector_area(&one_dim(2.0, 0.0, 0.0, 1.0, 0.5));
        assert_eq!(ring.per_dim[0], 0.0);
        assert_eq!(ring.geometric_mean, 0.0);

        let full = sector_area(&one_dim(2.0, 2.0, 0.0, TAU, 0.0));
        let over = sector_area(&one_dim(2.0, 2.0, 0.0, 3.0 * PI, 0.0));
        assert_eq!(full, over);
    }

    #[test]
    fn clamped_lower_bound_in_area() {
        // c=0.5, s=2: l=-0.5 clamps to 0, u=1.5
        let s = one_dim(0.5, 2.0, 0.0, 2.0, 0.0);
        assert_abs_diff_eq!(sector_area(&s).per_dim[0], 2.25, epsilon = 1e-12);
    }

    #[test]
    fn geometric_mean_of_two_and_eight() {
        // δ=2 makes the area u² - l²: [0.5, 1.5] gives 2, [1, 3] gives 8
        let s = AnnularSector::from_raw(&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0], &[2.0, 2.0], 0.0);
        let area = sector_area(&s);
        assert_abs_diff_eq!(area.per_dim[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(area.per_dim[1], 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(area.geometric_mean, 4.0, epsilon = 1e-12);
    }

    fn sector_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
        (0.0..5.0f64, 0.0..4.0f64, 0.0..TAU, 0.0..3.0f64, 0.05..1.5f64)
    }

    proptest! {
        #[test]
        fn distances_are_nonnegative(
            (c, s, th, a, beta) in sector_strategy(),
            m in 0.0..10.0f64,
            p in -10.0..10.0f64,
        ) {
            let sec = one_dim(c, s, th, a, beta);
            prop_assert!(dist_mod(&[m], &sec)[0] >= 0.0);
            prop_assert!(dist_phase(&[p], &sec)[0] >= 0.0);
        }

        #[test]
        fn branches_meet_at_boundary((c, s, th, a, beta) in sector_strategy()) {
            let sec = one_dim(c, s, th, a, beta);
            let half = 0.5 * sec.size[0];
            let gap_m = modulus_branch(half, sec.size[0], true) - modulus_branch(half, sec.size[0], false);
            prop_assert!(gap_m.abs() <= 1e-9);
            let gap_p = phase_branch(0.5, sec.angle(0), true) - phase_branch(0.5, sec.angle(0), false);
            prop_assert!(gap_p.abs() <= 1e-9);
        }

        #[test]
        fn distances_are_monotone(
            (_c, s, _th, a, beta) in sector_strategy(),
            x in 0.0..5.0f64,
            dx in 0.0..5.0f64,
            sig in 0.0..1.0f64,
            dsig in 0.0..1.0f64,
        ) {
            let sec = one_dim(1.0, s, 0.0, a, beta);
            prop_assert!(modulus_term(x + dx, s).value >= modulus_term(x, s).value);
            let hi = (sig + dsig).min(1.0);
            prop_assert!(phase_term(hi, sec.angle(0)).value >= phase_term(sig, sec.angle(0)).value);
        }

        #[test]
        fn phase_distance_is_periodic_and_mirrored((c, s, th, a, beta) in sector_strategy(), p in 0.0..TAU) {
            let sec = one_dim(c, s, th, a, beta);
            let base = dist_phase(&[p], &sec)[0];
            let shifted = dist_phase(&[p + TAU], &sec)[0];
            let mirrored = dist_phase(&[2.0 * sec.phase_center[0] - p], &sec)[0];
            prop_assert!((base - shifted).abs() <= 1e-12);
            prop_assert!((base - mirrored).abs() <= 1e-12);
        }

        #[test]
        fn sector_center_is_at_zero_distance((c, s, th, a, beta) in sector_strategy()) {
            let sec = one_dim(c, s, th, a, beta);
            prop_assert_eq!(dist_mod(&sec.center, &sec)[0], 0.0);
            prop_assert_eq!(dist_phase(&sec.phase_center, &sec)[0], 0.0);
        }
    }
}
