use proptest::prelude::*;
use sectore::model::{init_params, AblationConfig, Norm};
use sectore::selftest::{gradient_check, loss_value};
use sectore::training::adversarial_weights;
use sectore::Triple;

#[test]
fn analytic_gradients_match_central_differences() {
    let report = gradient_check(40, 101);
    assert!(
        report.failures.is_empty(),
        "{:#?}",
        &report.failures[..report.failures.len().min(10)]
    );
    assert_eq!(report.configs, 40);
    assert!(report.coordinates > 4000);
}

#[test]
fn weights_do_not_carry_gradient() {
    // moving a negative changes its weight, but the gradient with the weights
    // frozen equals the difference quotient with the same frozen weights
    let mut params = init_params(5, 2, 4, 0.5, 17);
    params.arrays.head.size.as_mut_slice().fill(0.3);
    let pos = Triple::new(0, 1, 2);
    let negs = [Triple::new(0, 1, 3), Triple::new(4, 1, 2)];
    let abl = AblationConfig::default();
    let scores: Vec<f64> = negs.iter().map(|n| params.score_triple(n, abl, Norm::L1)).collect();
    let weights = adversarial_weights(&scores, 1.0);
    let (_, grads) = params.loss_gradients(&pos, &negs, &weights, 6.0, abl, Norm::L1);
    let dense = grads.to_dense(&params);
    let h = 1e-6;
    let j = 3 * 4 + 1; // entity 3, dimension 1
    let mut up = params.clone();
    up.arrays.base_phase.as_mut_slice()[j] += h;
    let mut down = params.clone();
    down.arrays.base_phase.as_mut_slice()[j] -= h;
    let frozen = (loss_value(&up, &pos, &negs, &weights, 6.0, abl, Norm::L1)
        - loss_value(&down, &pos, &negs, &weights, 6.0, abl, Norm::L1))
        / (2.0 * h);
    assert!((dense.base_phase.as_slice()[j] - frozen).abs() < 1e-6);

    let live = |p: &sectore::ModelParams| {
        let s: Vec<f64> = negs.iter().map(|n| p.score_triple(n, abl, Norm::L1)).collect();
        loss_value(p, &pos, &negs, &adversarial_weights(&s, 1.0), 6.0, abl, Norm::L1)
    };
    let through_weights = (live(&up) - live(&down)) / (2.0 * h);
    assert!(
        (through_weights - frozen).abs() > 1e-6,
        "weights should matter for the live loss"
    );
}

proptest! {
    #[test]
    fn weights_sum_to_one_and_ignore_shifts(
        scores in prop::collection::vec(-50.0..0.0f64, 1..40),
        alpha in 0.0..2.0f64,
        shift in -100.0..100.0f64,
    ) {
        let w = adversarial_weights(&scores, alpha);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let moved: Vec<f64> = scores.iter().map(|s| s + shift).collect();
        let v = adversarial_weights(&moved, alpha);
        for (a, b) in w.iter().zip(&v) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn weights_follow_permutations(scores in prop::collection::vec(-10.0..0.0f64, 2..12), alpha in 0.0..2.0f64) {
        let w = adversarial_weights(&scores, alpha);
        let rev: Vec<f64> = scores.iter().rev().copied().collect();
        let v = adversarial_weights(&rev, alpha);
        // equal up to the order of the normalizing sum
        for (a, b) in w.iter().zip(v.iter().rev()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn small_gradient_batches(seed in 0u64..10_000) {
        let report = gradient_check(2, seed);
        prop_assert!(report.failures.is_empty(), "{:?}", report.failures);
    }
}
