//! WebAssembly bindings for the demo page in `www/`.
//!
//! Everything is one-dimensional on the JS side: a single sector drawn in
//! the polar plane, and per-relation sectors of a small trained model
//! projected onto one embedding dimension.

use sectore::data::Split;
use sectore::eval::evaluate_split;
use sectore::geometry::{dist_mod, dist_phase, sector_area, AnnularSector};
use sectore::model::Side;
use sectore::training::Trainer;
use sectore::{generate_pattern_kg, Dataset, Pattern, PatternSpec, TrainConfig, Workers};
use wasm_bindgen::prelude::*;

/// One annular sector built from raw (unconstrained) parameters.
#[wasm_bindgen]
pub struct SectorView {
    sector: AnnularSector,
}

#[wasm_bindgen]
impl SectorView {
    #[wasm_bindgen(constructor)]
    pub fn new(raw_center: f64, raw_size: f64, raw_phase: f64, raw_arc: f64, beta: f64) -> SectorView {
        SectorView {
            sector: AnnularSector::from_raw(&[raw_center], &[raw_size], &[raw_phase], &[raw_arc], beta),
        }
    }

    /// `[lower modulus, upper modulus, phase start, phase end]` of the
    /// region; the phase runs counterclockwise from start to end, which are
    /// not wrapped.
    pub fn bounds(&self) -> Vec<f64> {
        region_bounds(&self.sector, 0)
    }

    pub fn area(&self) -> f64 {
        sector_area(&self.sector).geometric_mean
    }

    /// Modulus distance plus phase distance for a point in polar form.
    pub fn distance(&self, modulus: f64, phase: f64) -> f64 {
        dist_mod(&[modulus], &self.sector)[0] + dist_phase(&[phase], &self.sector)[0]
    }

    /// Row-major `size x size` grid of distances over the square
    /// `[-extent, extent]^2`, with y pointing up.
    pub fn distance_field(&self, size: usize, extent: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(size * size);
        let step = 2.0 * extent / size.max(1) as f64;
        for row in 0..size {
            let y = extent - (row as f64 + 0.5) * step;
            for col in 0..size {
                let x = -extent + (col as f64 + 0.5) * step;
                out.push(self.distance(x.hypot(y), y.atan2(x)));
            }
        }
        out
    }

    /// Modulus distance at `samples` evenly spaced moduli in `[0, max_modulus]`.
    pub fn modulus_profile(&self, max_modulus: f64, samples: usize) -> Vec<f64> {
        let n = samples.max(2);
        let points: Vec<f64> = (0..n).map(|k| max_modulus * k as f64 / (n - 1) as f64).collect();
        points.iter().map(|&m| dist_mod(&[m], &self.sector)[0]).collect()
    }

    /// Phase distance at `samples` evenly spaced phases in `[0, 2π]`.
    pub fn phase_profile(&self, samples: usize) -> Vec<f64> {
        let n = samples.max(2);
        (0..n)
            .map(|k| dist_phase(&[std::f64::consts::TAU * k as f64 / (n - 1) as f64], &self.sector)[0])
            .collect()
    }
}

/// A small model trained step by step on a generated pattern graph.
#[wasm_bindgen]
pub struct PatternTrainer {
    trainer: Trainer<Dataset>,
}

impl PatternTrainer {
    pub fn try_new(pattern: &str, n_entities: usize, n_facts: usize, seed: u64, dim: usize) -> Result<Self, String> {
        let pattern: Pattern = pattern.parse().map_err(|e: sectore::Error| e.to_string())?;
        let kg = generate_pattern_kg(&PatternSpec {
            pattern,
            n_entities,
            n_facts,
            holdout: 0.2,
            seed,
        })
        .map_err(|e| e.to_string())?;
        let config = TrainConfig {
            dim,
            seed,
            ..TrainConfig::default()
        };
        let trainer = Trainer::new(kg.dataset, config, Workers::new(1)).map_err(|e| e.to_string())?;
        Ok(PatternTrainer { trainer })
    }

    pub fn try_step(&mut self, steps: usize) -> Result<f64, String> {
        let mut loss = f64::NAN;
        for _ in 0..steps {
            loss = self.trainer.train_step().map_err(|e| e.to_string())?;
        }
        Ok(loss)
    }

    pub fn try_metrics(&self) -> Result<Vec<f64>, String> {
        let report = evaluate_split(
            self.trainer.params(),
            self.trainer.dataset(),
            Split::Valid,
            self.trainer.config().eval_options(),
            false,
            &Workers::new(1),
        )
        .map_err(|e| e.to_string())?;
        Ok(vec![report.mrr, report.hits.at1, report.hits.at10])
    }
}

#[wasm_bindgen]
impl PatternTrainer {
    /// `pattern` is one of the kebab-case pattern names, e.g. `inversion`.
    #[wasm_bindgen(constructor)]
    pub fn new(
        pattern: &str,
        n_entities: usize,
        n_facts: usize,
        seed: u64,
        dim: usize,
    ) -> Result<PatternTrainer, JsError> {
        Self::try_new(pattern, n_entities, n_facts, seed, dim).map_err(|e| JsError::new(&e))
    }

    /// Run `steps` optimizer steps; returns the last batch loss.
    pub fn step(&mut self, steps: usize) -> Result<f64, JsError> {
        self.try_step(steps).map_err(|e| JsError::new(&e))
    }

    /// Validation `[MRR, Hits@1, Hits@10]`.
    pub fn metrics(&self) -> Result<Vec<f64>, JsError> {
        self.try_metrics().map_err(|e| JsError::new(&e))
    }

    pub fn steps_done(&self) -> u64 {
        self.trainer.steps_done()
    }

    pub fn relation_count(&self) -> usize {
        self.trainer.dataset().n_relations()
    }

    pub fn relation_name(&self, relation: usize) -> String {
        self.trainer.dataset().vocab().relation_name(relation).to_owned()
    }

    /// Bounds of one relation sector in one dimension, as in
    /// [`SectorView::bounds`]; empty when an index is out of range.
    pub fn sector_bounds(&self, relation: usize, head: bool, dim: usize) -> Vec<f64> {
        let params = self.trainer.params();
        if relation >= params.n_relations() || dim >= params.dim() {
            return Vec::new();
        }
        region_bounds(
            &params.sector(relation, if head { Side::Head } else { Side::Tail }),
            dim,
        )
    }
}

fn region_bounds(sector: &AnnularSector, i: usize) -> Vec<f64> {
    let half = sector.arc_half_width(i);
    let theta = sector.phase_center[i];
    vec![sector.lower_clamped(i), sector.upper(i), theta - half, theta + half]
}
