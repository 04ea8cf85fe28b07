use sectore_web::{PatternTrainer, SectorView};

#[test]
fn trainer_learns_inversion_in_browser_budget() {
    let mut t = PatternTrainer::try_new("inversion", 100, 200, 7, 8).unwrap();
    let before = t.try_metrics().unwrap()[0];
    let loss = t.try_step(1000).unwrap();
    let after = t.try_metrics().unwrap();
    assert!(loss.is_finite());
    assert_eq!(t.steps_done(), 1000);
    assert!(
        after[0] > before && after[0] > 0.9,
        "valid MRR {before} -> {}",
        after[0]
    );
    assert_eq!(t.relation_count(), 2);
}

#[test]
fn sector_bounds_cover_each_relation_side() {
    let t = PatternTrainer::try_new("symmetry", 60, 100, 1, 4).unwrap();
    for r in 0..t.relation_count() {
        for head in [true, false] {
            let b = t.sector_bounds(r, head, 3);
            assert_eq!(b.len(), 4);
            assert!(b[0] <= b[1] && b[2] <= b[3]);
        }
    }
    assert!(t.sector_bounds(t.relation_count(), true, 0).is_empty());
    assert!(t.sector_bounds(0, true, 4).is_empty());
}

#[test]
fn field_is_zero_only_inside_region() {
    let v = SectorView::new(2.0, 1.0, 0.0, 0.2, 0.25);
    let b = v.bounds();
    let field = v.distance_field(101, 4.0);
    // the middle pixel of the right half lies on the positive x axis
    let row = 50;
    for col in 51..101 {
        let x = -4.0 + (col as f64 + 0.5) * 8.0 / 101.0;
        let d = field[row * 101 + col];
        assert_eq!(d < 1e-2, (x - 2.0).abs() < 0.05, "x={x} d={d} bounds={b:?}");
    }
}
