//! Train on a synthetic pattern graph and report held-out test metrics.
//!
//! ```text
//! cargo run --release --example pattern_run -- symmetry '{"learning_rate": 0.01}' 7
//! ```

use std::time::Instant;

use sectore::eval::evaluate_split;
use sectore::training::fit;
use sectore::{generate_pattern_kg, Pattern, PatternSpec, Split, TrainConfig, Workers};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let pattern: Pattern = args.next().as_deref().unwrap_or("symmetry").parse()?;
    let config = match args.next() {
        Some(json) => TrainConfig::from_json(&json)?,
        None => TrainConfig::default(),
    };
    let data_seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let kg = generate_pattern_kg(&PatternSpec {
        pattern,
        n_entities: 100,
        n_facts: 200,
        holdout: 0.2,
        seed: data_seed,
    })?;
    let start = Instant::now();
    let run = fit(&kg.dataset, &config, None, Workers::new(1), |row, _, _| {
        if let Some(v) = &row.valid {
            println!(
                "step {:>5} loss {:.4} valid mrr {:.3} h1 {:.3}",
                row.step, row.loss, v.mrr, v.hits.at1
            );
        }
        Ok(())
    })?;
    let test = evaluate_split(
        &run.best,
        &kg.dataset,
        Split::Test,
        config.eval_options(),
        false,
        &Workers::new(1),
    )?;
    println!(
        "{pattern}: best step {} test mrr {:.3} h1 {:.3} h10 {:.3} in {:.1}s",
        run.best_step,
        test.mrr,
        test.hits.at1,
        test.hits.at10,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
