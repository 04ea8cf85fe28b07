use std::fs;

use sectore::checkpoint::load_checkpoint;
use sectore::eval::evaluate_split;
use sectore::training::{fit, run_training, RunOptions, Trainer, METRICS_HEADER};
use sectore::{generate_pattern_kg, Pattern, PatternSpec, Split, TrainConfig, Workers};

fn symmetry() -> sectore::Dataset {
    generate_pattern_kg(&PatternSpec {
        pattern: Pattern::Symmetry,
        n_entities: 100,
        n_facts: 200,
        holdout: 0.2,
        seed: 7,
    })
    .unwrap()
    .dataset
}

#[test]
fn moving_average_loss_decreases() {
    let ds = symmetry();
    let mut trainer = Trainer::new(&ds, TrainConfig::default(), Workers::new(1)).unwrap();
    let losses: Vec<f64> = (0..200).map(|_| trainer.train_step().unwrap()).collect();
    let averages: Vec<f64> = losses.windows(100).map(|w| w.iter().sum::<f64>() / 100.0).collect();
    for pair in averages.windows(2) {
        assert!(pair[1] < pair[0], "{} then {}", pair[0], pair[1]);
    }
}

#[test]
fn same_seed_same_parameters() {
    let ds = symmetry();
    let config = TrainConfig {
        max_steps: 60,
        validation_interval: 30,
        ..Default::default()
    };
    let a = fit(&ds, &config, None, Workers::new(1), |_, _, _| Ok(())).unwrap();
    let b = fit(&ds, &config, None, Workers::new(4), |_, _, _| Ok(())).unwrap();
    assert_eq!(a.last, b.last);
    assert_eq!(a.best, b.best);
    let other = fit(
        &ds,
        &TrainConfig { seed: 1, ..config },
        None,
        Workers::new(1),
        |_, _, _| Ok(()),
    )
    .unwrap();
    assert_ne!(a.last, other.last);
}

#[test]
fn run_outputs_and_resume() {
    let ds = symmetry();
    let dir = tempfile::tempdir().unwrap();
    let config = TrainConfig {
        max_steps: 50,
        validation_interval: 20,
        ..Default::default()
    };
    let out = run_training(&ds, &config, dir.path(), &RunOptions::default()).unwrap();
    let log = fs::read_to_string(&out.metrics_log).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines[0], METRICS_HEADER);
    let steps: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(steps, ["20", "40", "50"]);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 6));

    let echoed: TrainConfig = TrainConfig::load(&dir.path().join("config.json")).unwrap();
    assert_eq!(echoed, config);

    let (best, meta) = load_checkpoint(&out.best_checkpoint).unwrap();
    assert_eq!(meta.step, out.run.best_step);
    assert_eq!(best, out.run.best);
    let (last, meta) = load_checkpoint(&out.final_checkpoint).unwrap();
    assert_eq!(meta.step, 50);

    // zero further steps from the final checkpoint evaluate identically
    let again = tempfile::tempdir().unwrap();
    let resume = RunOptions {
        threads: 1,
        resume: Some(out.final_checkpoint.clone()),
    };
    let zero = TrainConfig { max_steps: 0, ..config };
    let out2 = run_training(&ds, &zero, again.path(), &resume).unwrap();
    let (reloaded, meta) = load_checkpoint(&out2.final_checkpoint).unwrap();
    assert_eq!(meta.step, 50);
    let opts = config.eval_options();
    let w = Workers::new(1);
    assert_eq!(
        evaluate_split(&last, &ds, Split::Test, opts, true, &w).unwrap(),
        evaluate_split(&reloaded, &ds, Split::Test, opts, true, &w).unwrap()
    );
}

#[test]
fn invalid_configs_are_refused() {
    let ds = symmetry();
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        TrainConfig {
            batch_size: 0,
            ..Default::default()
        },
        TrainConfig {
            beta: 0.0,
            ..Default::default()
        },
        TrainConfig {
            alpha: -1.0,
            ..Default::default()
        },
    ] {
        assert!(run_training(&ds, &bad, dir.path(), &RunOptions::default()).is_err());
    }
}
