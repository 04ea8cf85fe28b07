use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sectore::analysis::{area_report, check_pattern, classify_cardinality, export_polar_csv, format_area_table};
use sectore::checkpoint::load_checkpoint;
use sectore::data::Interner;
use sectore::eval::{check_compatible, evaluate_split, EvalOptions};
use sectore::training::{run_training, RunOptions};
use sectore::{generate_pattern_kg, selftest, Dataset, ModelParams, PatternSpec, TrainConfig, Workers};

use crate::{AnalyzeCommand, Cli, Command, ConfigOverrides, EvalArgs, GenArgs, TrainArgs};

pub fn run(cli: Cli) -> Result<()> {
    let threads = usize::try_from(cli.threads).context("--threads out of range")?;
    match cli.command {
        Command::Train(args) => train(args, threads),
        Command::Eval(args) => eval(args, threads),
        Command::Analyze(cmd) => analyze(cmd),
        Command::Gen(args) => gen(args),
        Command::Selftest => run_selftest(),
    }
}

fn load_dataset(dir: &Path) -> Result<Dataset> {
    Dataset::load_dir(dir).with_context(|| format!("loading dataset from {}", dir.display()))
}

fn load_params(path: &Path) -> Result<(ModelParams, sectore::checkpoint::CheckpointMeta)> {
    load_checkpoint(path).with_context(|| format!("loading checkpoint {}", path.display()))
}

/// Built-in defaults, then the config file, then explicit flags.
pub fn effective_config(file: Option<&Path>, flags: &ConfigOverrides) -> Result<TrainConfig> {
    let mut config = match file {
        Some(path) => TrainConfig::load(path)?,
        None => TrainConfig::default(),
    };
    macro_rules! apply {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = flags.$flag { config.$field = v; })*
        };
    }
    apply!(dim => dim, batch_size => batch_size, negatives => n_negatives, gamma => gamma, alpha => alpha,
           beta => beta, lr => learning_rate, steps => max_steps, valid_every => validation_interval,
           seed => seed, norm => norm);
    if flags.no_modulus {
        config.ablation.use_modulus = false;
    }
    if flags.no_phase {
        config.ablation.use_phase = false;
    }
    if flags.no_bump {
        config.ablation.use_bump = false;
    }
    config.validate()?;
    Ok(config)
}

fn train(args: TrainArgs, threads: usize) -> Result<()> {
    let config = effective_config(args.config.as_deref(), &args.overrides)?;
    let dataset = load_dataset(&args.data)?;
    println!("{}", serde_json::to_string_pretty(&config)?);
    let outcome = run_training(
        &dataset,
        &config,
        &args.out,
        &RunOptions {
            threads,
            resume: args.resume,
        },
    )?;
    let run = &outcome.run;
    match &run.best_valid {
        Some(valid) => println!(
            "best step {}: valid MRR {:.4} H@1 {:.4} H@10 {:.4}",
            run.best_step, valid.mrr, valid.hits.at1, valid.hits.at10
        ),
        None => println!("no validation split; kept final parameters"),
    }
    println!("best checkpoint: {}", outcome.best_checkpoint.display());
    println!("final checkpoint: {}", outcome.final_checkpoint.display());
    println!("metrics: {}", outcome.metrics_log.display());
    Ok(())
}

fn eval(args: EvalArgs, threads: usize) -> Result<()> {
    let (params, meta) = load_params(&args.checkpoint)?;
    let dataset = load_dataset(&args.data)?;
    check_compatible(&params, &dataset)?;
    let options = EvalOptions {
        ablation: meta.ablation,
        norm: meta.norm,
    };
    let report = evaluate_split(
        &params,
        &dataset,
        args.split,
        options,
        args.per_relation,
        &Workers::new(threads),
    )?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

/// Resolve names through `names` when given, otherwise parse numeric ids.
fn resolve_ids(items: &[String], names: Option<&Interner>, kind: &str, limit: usize) -> Result<Vec<usize>> {
    items
        .iter()
        .map(|item| {
            let id = match names.and_then(|n| n.id(item)) {
                Some(id) => id,
                None => item.parse::<usize>().map_err(|_| match names {
                    Some(_) => anyhow::anyhow!("unknown {kind} `{item}`"),
                    None => anyhow::anyhow!("{kind} `{item}` is not a numeric id; pass --data to use names"),
                })?,
            };
            if id >= limit {
                bail!("{kind} id {id} out of range (model has {limit})");
            }
            Ok(id)
        })
        .collect()
}

fn analyze(cmd: AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Areas {
            checkpoint,
            data,
            threshold,
            json,
        } => {
            let (params, _) = load_params(&checkpoint)?;
            let dataset = load_dataset(&data)?;
            check_compatible(&params, &dataset)?;
            let rows = area_report(&params, dataset.vocab())?;
            let labels = rows
                .iter()
                .map(|r| classify_cardinality(r.head_area, r.tail_area, threshold))
                .collect::<sectore::Result<Vec<_>>>()?;
            if json {
                let value: Vec<_> = rows
                    .iter()
                    .zip(&labels)
                    .map(|(r, c)| serde_json::json!({"relation": r.relation, "head_area": r.head_area, "tail_area": r.tail_area, "cardinality": c}))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                print!("{}", format_area_table(&rows));
                println!();
                for (row, label) in rows.iter().zip(&labels) {
                    println!(
                        "{:<32} {}",
                        row.relation,
                        serde_json::to_value(label)?.as_str().unwrap_or("?")
                    );
                }
            }
        }
        AnalyzeCommand::Patterns {
            checkpoint,
            pattern,
            relations,
            data,
            eps,
            json,
        } => {
            let (params, _) = load_params(&checkpoint)?;
            let dataset = data.as_deref().map(load_dataset).transpose()?;
            let names = dataset.as_ref().map(|d| &d.vocab().relations);
            let ids = resolve_ids(&relations, names, "relation", params.n_relations())?;
            let report = check_pattern(&params, pattern, &ids, eps)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "{pattern} over {}: {}",
                    relations.join(", "),
                    if report.holds { "holds" } else { "does not hold" }
                );
                for c in &report.conditions {
                    println!("  [{}] {}", if c.holds { "x" } else { " " }, c.description);
                }
            }
        }
        AnalyzeCommand::Export {
            checkpoint,
            entities,
            contexts,
            data,
            out,
        } => {
            let (params, _) = load_params(&checkpoint)?;
            let dataset = data.as_deref().map(load_dataset).transpose()?;
            let names = dataset.as_ref().map(|d| &d.vocab().entities);
            let entity_ids = resolve_ids(&entities, names, "entity", params.n_entities())?;
            let context_ids = resolve_ids(&contexts, names, "entity", params.n_entities())?;
            let csv = export_polar_csv(&params, &entity_ids, &context_ids, dataset.as_ref().map(|d| d.vocab()))?;
            match out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(csv.as_bytes())?,
            }
        }
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let kg = generate_pattern_kg(&PatternSpec {
        pattern: args.pattern,
        n_entities: args.entities,
        n_facts: args.facts,
        holdout: args.holdout,
        seed: args.seed,
    })?;
    kg.write_dir(&args.out)
        .with_context(|| format!("writing dataset to {}", args.out.display()))?;
    print!("{}", kg.manifest());
    Ok(())
}

fn run_selftest() -> Result<()> {
    let outcomes = selftest::run_all();
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "ok  " } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        bail!("{failed} of {} self-checks failed", outcomes.len());
    }
    println!("all {} self-checks passed", outcomes.len());
    Ok(())
}
