//! Negative sampling, self-adversarial weighting, Adam and the training loop.

use std::borrow::Borrow;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
use crate::data::{Dataset, FilterIndex, Split, Triple};
use crate::error::{Error, Result};
use crate::eval::{evaluate_split, EvalOptions, MetricsReport};
use crate::model::{init_params, AblationConfig, Gradients, ModelParams, Norm, ParamArrays};
use crate::parallel::Workers;
use crate::rng::{self, Rng};

/// Resampling attempts before falling back to an exact draw.
pub const MAX_NEGATIVE_RETRIES: usize = 100;

const EPOCH_TAG: u64 = 0x45_50_4F_43_48;
const NEGATIVE_TAG: u64 = 0x4E_45_47;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub dim: usize,
    pub batch_size: usize,
    pub n_negatives: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub learning_rate: f64,
    pub max_steps: u64,
    pub validation_interval: u64,
    pub seed: u64,
    pub norm: Norm,
    pub ablation: AblationConfig,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 50,
            batch_size: 16,
            n_negatives: 8,
            gamma: 6.0,
            alpha: 1.0,
            beta: 0.5,
            learning_rate: 0.02,
            max_steps: 2000,
            validation_interval: 200,
            seed: 0,
            norm: Norm::L1,
            ablation: AblationConfig::default(),
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
        }
    }
}

/// The grid searched for benchmark runs.
pub mod grid {
    pub const BATCH_SIZE: [usize; 3] = [256, 512, 1024];
    pub const DIM: [usize; 5] = [50, 100, 200, 500, 1000];
    pub const N_NEGATIVES: [usize; 3] = [256, 512, 1024];
    pub const GAMMA: [f64; 7] = [3.0, 6.0, 9.0, 12.0, 18.0, 24.0, 30.0];
    pub const ALPHA: [f64; 2] = [0.5, 1.0];
    pub const BETA: [f64; 3] = [0.25, 0.5, 1.0];
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.dim == 0 || self.batch_size == 0 || self.n_negatives == 0 || self.validation_interval == 0 {
            return bad("dim, batch_size, n_negatives and validation_interval must be positive".into());
        }
        if !(self.gamma > 0.0) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha must be nonnegative, got {}", self.alpha));
        }
        if !(self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.learning_rate > 0.0) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {b}"));
            }
        }
        if !(self.adam_epsilon > 0.0) {
            return bad(format!("adam_epsilon must be positive, got {}", self.adam_epsilon));
        }
        self.ablation.validate()
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Json {
            path: path.to_owned(),
            source: e,
        })
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            ablation: self.ablation,
            norm: self.norm,
        }
    }
}

/// Corrupts one entity slot of a positive, rejecting known training facts.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    train: FilterIndex,
    n_entities: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Negatives {
    pub triples: Vec<Triple>,
    /// Slots where no corruption outside the training facts existed.
    pub unfiltered: usize,
}

impl NegativeSampler {
    pub fn new(dataset: &Dataset) -> Self {
        NegativeSampler {
            train: FilterIndex::build(&[dataset.train()]),
            n_entities: dataset.n_entities(),
        }
    }

    pub fn from_index(train: FilterIndex, n_entities: usize) -> Self {
        NegativeSampler { train, n_entities }
    }

    /// Draw `n` negatives. Each flips a fair coin for the head or tail slot
    /// and draws a uniform entity, resampling while the result is a training
    /// fact. After [`MAX_NEGATIVE_RETRIES`] rejections the entity is drawn
    /// uniformly from the complement of the true set instead; if that set is
    /// empty the last candidate is kept and counted in `unfiltered`.
    pub fn sample(&self, positive: &Triple, n: usize, rng: &mut Rng) -> Negatives {
        let mut triples = Vec::with_capacity(n);
        let mut unfiltered = 0;
        for _ in 0..n {
            let corrupt_head = rng.gen_bool(0.5);
            let build = |e: usize| {
                if corrupt_head {
                    Triple::new(e, positive.relation, positive.tail)
                } else {
                    Triple::new(positive.head, positive.relation, e)
                }
            };
            let mut chosen = None;
            let mut last = build(rng.gen_range(0..self.n_entities));
            for attempt in 0..MAX_NEGATIVE_RETRIES {
                if attempt > 0 {
                    last = build(rng.gen_range(0..self.n_entities));
                }
                if !self.train.contains(&last) {
                    chosen = Some(last);
                    break;
                }
            }
            let triple = match chosen {
                Some(t) => t,
                None => {
                    let known = if corrupt_head {
                        self.train.heads(positive.relation, positive.tail)
                    } else {
                        self.train.tails(positive.head, positive.relation)
                    };
                    let free = self.n_entities - known.len();
                    if free == 0 {
                        unfiltered += 1;
                        last
                    } else {
                        // k-th entity not in the sorted `known` list
                        let mut k = rng.gen_range(0..free);
                        let mut e = 0;
                        for &taken in known {
                            if taken - e > k {
                                break;
                            }
                            k -= taken - e;
                            e = taken + 1;
                        }
                        build(e + k)
                    }
                }
            };
            triples.push(triple);
        }
        if unfiltered > 0 {
            log::debug!("{unfiltered} negatives for {positive:?} could not avoid training facts");
        }
        Negatives { triples, unfiltered }
    }
}

/// Softmax of `alpha * scores`, computed relative to the maximum score.
pub fn adversarial_weights(scores: &[f64], alpha: f64) -> Vec<f64> {
    assert!(!scores.is_empty(), "adversarial weights need at least one score");
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (alpha * (s - max)).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub first_moment: ParamArrays,
    pub second_moment: ParamArrays,
    pub step: u64,
}

impl OptimizerState {
    pub fn new(params: &ModelParams) -> Self {
        OptimizerState {
            first_moment: params.arrays.zeros_like(),
            second_moment: params.arrays.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam step over every raw parameter.
pub fn adam_update(params: &mut ModelParams, grads: &ParamArrays, state: &mut OptimizerState, config: &TrainConfig) {
    state.step += 1;
    let (b1, b2, eps, lr) = (
        config.adam_beta1,
        config.adam_beta2,
        config.adam_epsilon,
        config.learning_rate,
    );
    let t = state.step as i32;
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let groups = params
        .arrays
        .slices_mut()
        .into_iter()
        .zip(grads.slices())
        .zip(state.first_moment.slices_mut())
        .zip(state.second_moment.slices_mut());
    for (((p, g), m), v) in groups {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

/// Per-positive loss and gradient, with the negatives used.
pub struct PositiveContribution {
    pub loss: f64,
    pub grads: Gradients,
    pub negatives: Vec<Triple>,
}

pub fn positive_contribution(
    params: &ModelParams,
    positive: &Triple,
    sampler: &NegativeSampler,
    config: &TrainConfig,
    rng: &mut Rng,
) -> PositiveContribution {
    let negatives = sampler.sample(positive, config.n_negatives, rng).triples;
    let scores: Vec<f64> = negatives
        .iter()
        .map(|n| params.score_triple(n, config.ablation, config.norm))
        .collect();
    let weights = adversarial_weights(&scores, config.alpha);
    let (loss, grads) = params.loss_gradients(
        positive,
        &negatives,
        &weights,
        config.gamma,
        config.ablation,
        config.norm,
    );
    PositiveContribution { loss, grads, negatives }
}

/// Stateful optimizer loop over one dataset, borrowed or owned.
pub struct Trainer<D: Borrow<Dataset>> {
    dataset: D,
    config: TrainConfig,
    params: ModelParams,
    optimizer: OptimizerState,
    sampler: NegativeSampler,
    grad_buffer: ParamArrays,
    order: Vec<usize>,
    cursor: usize,
    epoch: u64,
    step: u64,
    workers: Workers,
}

impl<D: Borrow<Dataset>> Trainer<D> {
    pub fn new(dataset: D, config: TrainConfig, workers: Workers) -> Result<Self> {
        let ds = dataset.borrow();
        let params = init_params(ds.n_entities(), ds.n_relations(), config.dim, config.beta, config.seed);
        Trainer::with_params(dataset, config, params, workers)
    }

    pub fn with_params(dataset: D, config: TrainConfig, params: ModelParams, workers: Workers) -> Result<Self> {
        config.validate()?;
        let ds = dataset.borrow();
        crate::eval::check_compatible(&params, ds)?;
        if params.dim() != config.dim {
            return Err(Error::DimensionMismatch(format!(
                "parameters have d={}, config has d={}",
                params.dim(),
                config.dim
            )));
        }
        if ds.train().is_empty() {
            return Err(Error::Config("training split is empty".into()));
        }
        let sampler = NegativeSampler::new(ds);
        Ok(Trainer {
            dataset,
            optimizer: OptimizerState::new(&params),
            sampler,
            grad_buffer: params.arrays.zeros_like(),
            order: Vec::new(),
            cursor: 0,
            epoch: 0,
            step: 0,
            params,
            config,
            workers,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn into_params(self) -> ModelParams {
        self.params
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset.borrow()
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn steps_done(&self) -> u64 {
        self.step
    }

    /// Next batch of training triples; the order is reshuffled per epoch.
    fn next_batch(&mut self) -> Vec<Triple> {
        let train = self.dataset.borrow().train();
        let mut batch = Vec::with_capacity(self.config.batch_size);
        while batch.len() < self.config.batch_size {
            if self.cursor >= self.order.len() {
                self.order = (0..train.len()).collect();
                let mut rng = rng::stream(self.config.seed, &[EPOCH_TAG, self.epoch]);
                self.order.shuffle(&mut rng);
                self.epoch += 1;
                self.cursor = 0;
            }
            batch.push(train[self.order[self.cursor]]);
            self.cursor += 1;
        }
        batch
    }

    /// One optimizer step on the next batch; returns the mean batch loss.
    pub fn train_step(&mut self) -> Result<f64> {
        let batch = self.next_batch();
        self.train_step_on(&batch)
    }

    /// One optimizer step on an explicit batch.
    pub fn train_step_on(&mut self, batch: &[Triple]) -> Result<f64> {
        assert!(!batch.is_empty(), "batch must be nonempty");
        let step = self.step;
        let indexed: Vec<(usize, Triple)> = batch.iter().copied().enumerate().collect();
        let params = &self.params;
        let sampler = &self.sampler;
        let config = &self.config;
        let contributions = self.workers.map_ordered(&indexed, |(k, positive)| {
            let mut rng = rng::stream(config.seed, &[NEGATIVE_TAG, step, *k as u64]);
            positive_contribution(params, positive, sampler, config, &mut rng)
        });

        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        self.grad_buffer.fill_zero();
        for c in &contributions {
            loss += c.loss;
            c.grads.add_to(&mut self.grad_buffer, scale);
        }
        loss *= scale;
        if !loss.is_finite() {
            let mut detail = String::new();
            for (positive, c) in batch.iter().zip(&contributions) {
                let _ = writeln!(detail, "{positive:?} loss={} negatives={:?}", c.loss, c.negatives);
            }
            return Err(Error::NonFiniteLoss { step, detail });
        }
        adam_update(&mut self.params, &self.grad_buffer, &mut self.optimizer, &self.config);
        self.step += 1;
        Ok(loss)
    }
}

/// One row of the metrics log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub step: u64,
    pub loss: f64,
    pub valid: Option<MetricsReport>,
}

pub const METRICS_HEADER: &str = "step,loss,valid_mrr,valid_h1,valid_h3,valid_h10";

impl MetricsRow {
    pub fn csv_line(&self) -> String {
        match &self.valid {
            Some(v) => format!(
                "{},{},{},{},{},{}",
                self.step, self.loss, v.mrr, v.hits.at1, v.hits.at3, v.hits.at10
            ),
            None => format!("{},{},,,,", self.step, self.loss),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    /// Parameters with the best validation MRR (the final ones when no
    /// validation split is available).
    pub best: ModelParams,
    pub best_step: u64,
    pub best_valid: Option<MetricsReport>,
    pub last: ModelParams,
    pub history: Vec<MetricsRow>,
}

/// Train for `config.max_steps` steps, validating every
/// `validation_interval` steps and at the last step.
///
/// `observe` sees each metrics row, the current parameters and whether
/// they are a new best.
pub fn fit(
    dataset: &Dataset,
    config: &TrainConfig,
    initial: Option<ModelParams>,
    workers: Workers,
    mut observe: impl FnMut(&MetricsRow, &ModelParams, bool) -> Result<()>,
) -> Result<TrainingRun> {
    let eval_workers = Workers::new(workers.threads());
    let mut trainer = match initial {
        Some(params) => Trainer::with_params(dataset, config.clone(), params, workers)?,
        None => Trainer::new(dataset, config.clone(), workers)?,
    };
    let can_validate = !dataset.valid().is_empty();
    let mut best = trainer.params().clone();
    let mut best_step = 0;
    let mut best_valid: Option<MetricsReport> = None;
    let mut history = Vec::new();
    let mut loss_sum = 0.0;
    let mut loss_count = 0u64;

    for step in 1..=config.max_steps {
        loss_sum += trainer.train_step()?;
        loss_count += 1;
        if step % config.validation_interval != 0 && step != config.max_steps {
            continue;
        }
        let valid = if can_validate {
            Some(evaluate_split(
                trainer.params(),
                dataset,
                Split::Valid,
                config.eval_options(),
                false,
                &eval_workers,
            )?)
        } else {
            None
        };
        let improved = match (&valid, &best_valid) {
            (Some(v), Some(b)) => v.mrr > b.mrr,
            (Some(_), None) => true,
            (None, _) => true,
        };
        if improved {
            best = trainer.params().clone();
            best_step = step;
            best_valid = valid.clone();
        }
        let row = MetricsRow {
            step,
            loss: loss_sum / loss_count as f64,
            valid,
        };
        match &row.valid {
            Some(v) => log::info!(
                "step {:>6}  loss {:.5}  valid MRR {:.4}  H@1 {:.4}  H@10 {:.4}",
                row.step,
                row.loss,
                v.mrr,
                v.hits.at1,
                v.hits.at10
            ),
            None => log::info!("step {:>6}  loss {:.5}", row.step, row.loss),
        }
        observe(&row, trainer.params(), improved)?;
        history.push(row);
        loss_sum = 0.0;
        loss_count = 0;
    }
    Ok(TrainingRun {
        best,
        best_step,
        best_valid,
        last: trainer.into_params(),
        history,
    })
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub threads: usize,
    /// Start from this checkpoint instead of a fresh initialization.
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best_checkpoint: PathBuf,
    pub final_checkpoint: PathBuf,
    pub metrics_log: PathBuf,
    pub run: TrainingRun,
}

/// Train with file outputs under `out_dir`: `config.json` (effective
/// config), `metrics.csv`, `best.json`/`best.bin` and `final.json`/`final.bin`.
pub fn run_training(
    dataset: &Dataset,
    config: &TrainConfig,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<RunOutcome> {
    config.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let config_path = out_dir.join("config.json");
    let echoed = serde_json::to_string_pretty(config).map_err(|e| Error::Json {
        path: config_path.clone(),
        source: e,
    })?;
    fs::write(&config_path, echoed + "\n").map_err(|e| Error::io(&config_path, e))?;

    let (initial, start_step) = match &options.resume {
        Some(path) => {
            let (params, meta) = load_checkpoint(path)?;
            (Some(params), meta.step)
        }
        None => (None, 0),
    };
    let initial = match initial {
        Some(p) => p,
        None => init_params(
            dataset.n_entities(),
            dataset.n_relations(),
            config.dim,
            config.beta,
            config.seed,
        ),
    };

    let metrics_log = out_dir.join("metrics.csv");
    let mut log_file = fs::File::create(&metrics_log).map_err(|e| Error::io(&metrics_log, e))?;
    writeln!(log_file, "{METRICS_HEADER}").map_err(|e| Error::io(&metrics_log, e))?;

    let best_checkpoint = out_dir.join("best.json");
    let final_checkpoint = out_dir.join("final.json");
    let meta_at = |params: &ModelParams, step: u64| {
        CheckpointMeta::describe(params, config.norm, config.ablation, start_step + step)
    };
    save_checkpoint(&best_checkpoint, &initial, &meta_at(&initial, 0))?;

    let result = fit(
        dataset,
        config,
        Some(initial),
        Workers::new(options.threads),
        |row, params, improved| {
            let mut line = row.csv_line();
            line.push('\n');
            log_file
                .write_all(line.as_bytes())
                .and_then(|_| log_file.flush())
                .map_err(|e| Error::io(&metrics_log, e))?;
            if improved {
                save_checkpoint(&best_checkpoint, params, &meta_at(params, row.step))?;
            }
            Ok(())
        },
    );
    let run = match result {
        Ok(run) => run,
        Err(err @ Error::NonFiniteLoss { .. }) => {
            let dump = out_dir.join("nonfinite_batch.txt");
            let _ = fs::write(&dump, err.to_string());
            return Err(err);
        }
        Err(err) => return Err(err),
    };
    save_checkpoint(&final_checkpoint, &run.last, &meta_at(&run.last, config.max_steps))?;
    Ok(RunOutcome {
        best_checkpoint,
        final_checkpoint,
        metrics_log,
        run,
    })
}
