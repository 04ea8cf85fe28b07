mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use sectore::geometry::{
    dist_mod, dist_phase, intersection_within, sector_area, sector_relation, AnnularSector, DEFAULT_TOLERANCE,
};
use sectore::rng;

use common::{lattice_neighbor, lattice_sector, oracle_intersection_within, oracle_relation};

#[test]
fn sector_relation_matches_grid_oracle() {
    let mut rng = rng::seeded(31);
    let mut seen = [0usize; 3];
    for k in 0..600 {
        let d = 1 + k % 3;
        let a = lattice_sector(&mut rng, d);
        let b = match k % 3 {
            0 => a.clone(),
            1 => lattice_neighbor(&mut rng, &a),
            _ => lattice_sector(&mut rng, d),
        };
        let got = sector_relation(&a, &b, DEFAULT_TOLERANCE).unwrap();
        let want = oracle_relation(&a, &b);
        assert_eq!(got.a_subset_b, want.a_subset_b, "{a:?} {b:?}");
        assert_eq!(got.b_subset_a, want.b_subset_a, "{a:?} {b:?}");
        assert_eq!(got.disjoint, want.disjoint, "{a:?} {b:?}");
        assert_eq!(got.overlapping, !want.disjoint);
        seen[0] += got.equal as usize;
        seen[1] += (got.a_subset_b && !got.equal) as usize;
        seen[2] += got.disjoint as usize;
    }
    // every outcome shows up
    assert!(seen.iter().all(|&n| n > 10), "{seen:?}");
}

#[test]
fn intersection_within_matches_grid_oracle() {
    let mut rng = rng::seeded(32);
    let mut holds = 0;
    for k in 0..400 {
        let d = 1 + k % 3;
        let a = lattice_sector(&mut rng, d);
        let b = lattice_neighbor(&mut rng, &a);
        let c = if k % 2 == 0 {
            lattice_neighbor(&mut rng, &b)
        } else {
            lattice_sector(&mut rng, d)
        };
        let got = intersection_within(&a, &b, &c, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(got, oracle_intersection_within(&a, &b, &c), "{a:?} {b:?} {c:?}");
        holds += got as usize;
    }
    assert!(holds > 20 && holds < 380, "{holds}");
}

#[test]
fn wrap_around_arcs() {
    // arcs centred just either side of the seam
    let a = AnnularSector::from_raw(&[1.0], &[1.0], &[0.1], &[0.0], 0.5);
    let b = AnnularSector::from_raw(&[1.0], &[1.0], &[2.0 * PI - 0.1], &[0.0], 0.5);
    let rel = sector_relation(&a, &b, DEFAULT_TOLERANCE).unwrap();
    assert!(rel.overlapping && !rel.a_subset_b && !rel.b_subset_a);
    let wide = AnnularSector::from_raw(&[1.0], &[1.0], &[0.0], &[0.2], 0.5);
    assert!(sector_relation(&a, &wide, DEFAULT_TOLERANCE).unwrap().a_subset_b);
    assert!(sector_relation(&b, &wide, DEFAULT_TOLERANCE).unwrap().a_subset_b);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let a = AnnularSector::from_raw(&[1.0], &[1.0], &[0.0], &[0.0], 0.5);
    let b = AnnularSector::from_raw(&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0], 0.5);
    assert!(sector_relation(&a, &b, DEFAULT_TOLERANCE).is_err());
}

fn sector_strategy(d: usize) -> impl Strategy<Value = AnnularSector> {
    (
        prop::collection::vec(-3.0..3.0f64, d),
        prop::collection::vec(-2.0..2.0f64, d),
        prop::collection::vec(-10.0..10.0f64, d),
        prop::collection::vec(-4.0..4.0f64, d),
        0.01..1.5f64,
    )
        .prop_map(|(c, s, t, a, beta)| AnnularSector::from_raw(&c, &s, &t, &a, beta))
}

proptest! {
    #[test]
    fn every_sector_contains_itself(s in sector_strategy(3)) {
        let rel = sector_relation(&s, &s, DEFAULT_TOLERANCE).unwrap();
        prop_assert!(rel.equal && rel.overlapping);
    }

    #[test]
    fn relation_is_symmetric_in_its_arguments(a in sector_strategy(2), b in sector_strategy(2)) {
        let ab = sector_relation(&a, &b, DEFAULT_TOLERANCE).unwrap();
        let ba = sector_relation(&b, &a, DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(ab.a_subset_b, ba.b_subset_a);
        prop_assert_eq!(ab.disjoint, ba.disjoint);
        prop_assert!(!(ab.disjoint && ab.a_subset_b));
    }

    #[test]
    fn area_ignores_rotation(s in sector_strategy(4), shift in -20.0..20.0f64) {
        let mut turned = s.clone();
        for t in &mut turned.phase_center {
            *t = sectore::geometry::wrap_phase(*t + shift);
        }
        prop_assert_eq!(sector_area(&s), sector_area(&turned));
    }

    #[test]
    fn distances_vanish_only_at_the_center(s in sector_strategy(3)) {
        let dm = dist_mod(&s.center, &s);
        let dp = dist_phase(&s.phase_center, &s);
        prop_assert!(dm.iter().chain(&dp).all(|x| *x == 0.0));
    }
}
