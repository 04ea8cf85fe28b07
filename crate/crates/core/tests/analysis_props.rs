use proptest::prelude::*;
use sectore::analysis::{area_report, check_pattern, classify_cardinality, export_polar_csv};
use sectore::data::{Interner, Vocabulary};
use sectore::geometry::DEFAULT_TOLERANCE;
use sectore::model::init_params;
use sectore::selftest::pattern_fixture;
use sectore::Pattern;

fn vocab(n_relations: usize) -> Vocabulary {
    Vocabulary {
        entities: Interner::default(),
        relations: (0..n_relations).map(|r| format!("rel{r:02}")).collect(),
    }
}

#[test]
fn fixtures_satisfy_and_violate() {
    for pattern in Pattern::ALL {
        let ids: Vec<usize> = (0..pattern.arity()).collect();
        let yes = check_pattern(&pattern_fixture(pattern, true), pattern, &ids, DEFAULT_TOLERANCE).unwrap();
        let no = check_pattern(&pattern_fixture(pattern, false), pattern, &ids, DEFAULT_TOLERANCE).unwrap();
        assert!(yes.holds, "{pattern}: {yes:?}");
        assert!(!no.holds, "{pattern}: {no:?}");
    }
}

proptest! {
    #[test]
    fn copied_sides_are_symmetric(seed in any::<u64>(), dim in 1..6usize) {
        let mut p = init_params(2, 2, dim, 0.5, seed);
        p.arrays.tail = p.arrays.head.clone();
        for r in 0..2 {
            prop_assert!(check_pattern(&p, Pattern::Symmetry, &[r], DEFAULT_TOLERANCE).unwrap().holds);
        }
    }

    #[test]
    fn subsumption_implies_intersection(seed in any::<u64>(), dim in 1..4usize) {
        let p = init_params(2, 3, dim, 0.5, seed);
        let sub = check_pattern(&p, Pattern::Subsumption, &[0, 2], DEFAULT_TOLERANCE).unwrap();
        let both = check_pattern(&p, Pattern::Intersection, &[0, 1, 2], DEFAULT_TOLERANCE).unwrap();
        prop_assert!(!sub.holds || both.holds);
        // a relation always subsumes itself, so the weakening is exercised
        let own = check_pattern(&p, Pattern::Intersection, &[0, 1, 0], DEFAULT_TOLERANCE).unwrap();
        prop_assert!(own.holds);
    }

    #[test]
    fn cardinality_is_scale_free(h in 0.01..10.0f64, t in 0.01..10.0f64, k in 0.01..100.0f64) {
        // scaling moves the ratio by at most rounding; stay off the thresholds
        let ratio = h / t;
        prop_assume!((ratio - 1.2).abs() > 1e-9 && (ratio - 1.0 / 1.2).abs() > 1e-9);
        prop_assert_eq!(
            classify_cardinality(h, t, 1.2).unwrap(),
            classify_cardinality(h * k, t * k, 1.2).unwrap()
        );
    }

    #[test]
    fn areas_ignore_phase_rotation(seed in any::<u64>(), shift in -10.0..10.0f64) {
        let p = init_params(1, 4, 3, 0.5, seed);
        let mut q = p.clone();
        for x in q.arrays.head.phase.as_mut_slice().iter_mut().chain(q.arrays.tail.phase.as_mut_slice()) {
            *x += shift;
        }
        let a = area_report(&p, &vocab(4)).unwrap();
        let b = area_report(&q, &vocab(4)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exported_phases_are_wrapped(seed in any::<u64>()) {
        let mut p = init_params(4, 1, 3, 0.5, seed);
        for x in p.arrays.base_phase.as_mut_slice() {
            *x *= 7.0;
        }
        let csv = export_polar_csv(&p, &[0, 1, 3], &[2, 2, 0], None).unwrap();
        for line in csv.lines().skip(1) {
            let phase: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
            prop_assert!((0.0..std::f64::consts::TAU).contains(&phase));
        }
        prop_assert_eq!(csv.lines().count(), 1 + 3 * 3);
    }
}
