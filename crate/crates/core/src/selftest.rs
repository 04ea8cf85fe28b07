//! Numerical property checks that can run against any build.
//!
//! Each check draws its inputs from a fixed seed and compares the library
//! against a slower, independent computation: finite differences for
//! gradients, candidate-by-candidate scoring for ranks, and hand-built
//! parameters for the pattern conditions.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use rand::Rng as _;
use serde::Serialize;

use crate::analysis::check_pattern;
use crate::checkpoint::{decode_params, encode_params};
use crate::data::{Dataset, Split, Triple};
use crate::error::Result;
use crate::eval::{evaluate_split, rank_split, EvalOptions};
use crate::geometry::{modulus_branch, phase_branch, phase_offset, DEFAULT_TOLERANCE};
use crate::model::{init_params, AblationConfig, ModelParams, Norm, Side};
use crate::parallel::Workers;
use crate::rng;
use crate::synthetic::Pattern;
use crate::training::adversarial_weights;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.to_owned(),
            passed,
            detail,
        }
    }
}

/// Largest gap between the two pieces of each distance at its switch point,
/// over `n` random sectors.
pub fn continuity_gap(n: usize, seed: u64) -> f64 {
    let mut rng = rng::seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let size = rng.gen_range(0.0..10.0);
        let angle = rng.gen_range(1e-3..4.0 * PI);
        let half = 0.5 * size;
        worst = worst.max((modulus_branch(half, size, true) - modulus_branch(half, size, false)).abs());
        worst = worst.max((phase_branch(0.5, angle, true) - phase_branch(0.5, angle, false)).abs());
    }
    worst
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// The training loss with the weights held fixed, from scores alone.
pub fn loss_value(
    params: &ModelParams,
    positive: &Triple,
    negatives: &[Triple],
    weights: &[f64],
    gamma: f64,
    ablation: AblationConfig,
    norm: Norm,
) -> f64 {
    let mut loss = softplus(-(gamma + params.score_triple(positive, ablation, norm)));
    for (n, w) in negatives.iter().zip(weights) {
        loss += w * softplus(params.score_triple(n, ablation, norm) + gamma);
    }
    loss
}

/// Whether any piecewise switch or absolute-value kink lies within `margin`
/// of the inputs of `triple`.
pub fn near_kink(params: &ModelParams, triple: &Triple, ablation: AblationConfig, norm: Norm, margin: f64) -> bool {
    let a = &params.arrays;
    let r = triple.relation;
    for (side, entity, partner) in [
        (Side::Head, triple.head, triple.tail),
        (Side::Tail, triple.tail, triple.head),
    ] {
        let raws = match side {
            Side::Head => &a.head,
            Side::Tail => &a.tail,
        };
        let sector = params.sector(r, side);
        let point = params.embed_entity(entity, partner, ablation);
        let mut raw_values: Vec<f64> = a.base_modulus.row(entity).to_vec();
        if ablation.use_bump {
            raw_values.extend_from_slice(a.bump_modulus.row(partner));
        }
        raw_values.extend_from_slice(raws.center.row(r));
        raw_values.extend_from_slice(raws.size.row(r));
        raw_values.extend_from_slice(raws.arc.row(r));
        if raw_values.iter().any(|x| x.abs() < margin) {
            return true;
        }
        let mut sq_m = 0.0;
        let mut sq_p = 0.0;
        for i in 0..params.dim() {
            let offset = (point.modulus[i] - sector.center[i]).abs();
            if ablation.use_modulus && (offset < margin || (offset - 0.5 * sector.size[i]).abs() < margin) {
                return true;
            }
            let sigma = phase_offset(point.phase[i], sector.phase_center[i]);
            if ablation.use_phase && (sigma < margin || (sigma - 0.5).abs() < margin) {
                return true;
            }
            sq_m += offset * offset;
            sq_p += sigma * sigma;
        }
        if norm == Norm::L2
            && ((ablation.use_modulus && sq_m.sqrt() < margin) || (ablation.use_phase && sq_p.sqrt() < margin))
        {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GradientCheck {
    pub configs: usize,
    pub skipped: usize,
    pub coordinates: usize,
    /// Largest relative error among coordinates with gradient magnitude at least 1e-3.
    pub worst_relative: f64,
    pub worst_absolute: f64,
    pub failures: Vec<String>,
}

/// Compare analytic gradients with central differences on `n_configs`
/// random configurations of dimension at most 8. Configurations with a kink
/// within `1e-4` of any input are redrawn and counted in `skipped`.
pub fn gradient_check(n_configs: usize, seed: u64) -> GradientCheck {
    const STEP: f64 = 1e-5;
    const REL_TOL: f64 = 1e-4;
    const ABS_TOL: f64 = 1e-7;
    let mut rng = rng::seeded(seed);
    let mut out = GradientCheck::default();
    while out.configs < n_configs {
        let dim = rng.gen_range(1..=8);
        let n_entities = rng.gen_range(3..7);
        let n_relations = rng.gen_range(1..4);
        let beta = rng.gen_range(0.1..1.0);
        let mut params = init_params(n_entities, n_relations, dim, beta, rng.gen());
        // spread the points so both branches of each piece get exercised
        for x in params.arrays.base_modulus.as_mut_slice() {
            *x = rng.gen_range(0.2..2.5) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 };
        }
        for x in params
            .arrays
            .head
            .size
            .as_mut_slice()
            .iter_mut()
            .chain(params.arrays.tail.size.as_mut_slice())
        {
            *x = rng.gen_range(0.05..1.5);
        }
        for x in params
            .arrays
            .head
            .arc
            .as_mut_slice()
            .iter_mut()
            .chain(params.arrays.tail.arc.as_mut_slice())
        {
            *x = rng.gen_range(0.05..3.0);
        }
        params.arrays.lambda = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let ablation = match rng.gen_range(0..4) {
            0 => AblationConfig {
                use_bump: false,
                ..Default::default()
            },
            1 => AblationConfig {
                use_phase: false,
                ..Default::default()
            },
            2 => AblationConfig {
                use_modulus: false,
                ..Default::default()
            },
            _ => AblationConfig::default(),
        };
        let norm = if rng.gen_bool(0.5) { Norm::L1 } else { Norm::L2 };
        let gamma = rng.gen_range(0.5..6.0);
        let random_triple = |rng: &mut rng::Rng| {
            Triple::new(
                rng.gen_range(0..n_entities),
                rng.gen_range(0..n_relations),
                rng.gen_range(0..n_entities),
            )
        };
        let positive = random_triple(&mut rng);
        let negatives: Vec<Triple> = (0..rng.gen_range(1..5)).map(|_| random_triple(&mut rng)).collect();
        if std::iter::once(&positive)
            .chain(&negatives)
            .any(|t| near_kink(&params, t, ablation, norm, 1e-4))
        {
            out.skipped += 1;
            continue;
        }
        let raw: Vec<f64> = (0..negatives.len()).map(|_| rng.gen_range(-3.0..0.0)).collect();
        let weights = adversarial_weights(&raw, 1.0);
        out.configs += 1;

        let (_, grads) = params.loss_gradients(&positive, &negatives, &weights, gamma, ablation, norm);
        let analytic = grads.to_dense(&params);
        let analytic: Vec<f64> = analytic.slices().concat();
        let mut probe = params.clone();
        let mut k = 0;
        let n_slices = probe.arrays.slices().len();
        for s in 0..n_slices {
            let len = probe.arrays.slices()[s].len();
            for j in 0..len {
                let original = probe.arrays.slices()[s][j];
                probe.arrays.slices_mut()[s][j] = original + STEP;
                let up = loss_value(&probe, &positive, &negatives, &weights, gamma, ablation, norm);
                probe.arrays.slices_mut()[s][j] = original - STEP;
                let down = loss_value(&probe, &positive, &negatives, &weights, gamma, ablation, norm);
                probe.arrays.slices_mut()[s][j] = original;
                let numeric = (up - down) / (2.0 * STEP);
                let a = analytic[k];
                let err = (a - numeric).abs();
                let scale = a.abs().max(numeric.abs());
                out.worst_absolute = out.worst_absolute.max(err);
                if scale >= 1e-3 {
                    out.worst_relative = out.worst_relative.max(err / scale);
                }
                if err > ABS_TOL && err > REL_TOL * scale {
                    out.failures.push(format!(
                        "config {} array {s} index {j}: analytic {a:e}, numeric {numeric:e}",
                        out.configs
                    ));
                }
                out.coordinates += 1;
                k += 1;
            }
        }
    }
    out
}

/// Filtered ranks computed one candidate triple at a time.
pub fn brute_force_ranks(
    params: &ModelParams,
    dataset: &Dataset,
    split: Split,
    options: EvalOptions,
) -> Vec<(f64, f64)> {
    let known: HashSet<Triple> = dataset
        .train()
        .iter()
        .chain(dataset.valid())
        .chain(dataset.test())
        .copied()
        .collect();
    let rank = |truth: &Triple, corrupt: &dyn Fn(usize) -> Triple| {
        let target = params.score_triple(truth, options.ablation, options.norm);
        let mut rank = 1.0;
        for e in 0..dataset.n_entities() {
            let candidate = corrupt(e);
            if candidate == *truth || known.contains(&candidate) {
                continue;
            }
            let s = params.score_triple(&candidate, options.ablation, options.norm);
            if s > target {
                rank += 1.0;
            } else if s == target {
                rank += 0.5;
            }
        }
        rank
    };
    dataset
        .split(split)
        .iter()
        .map(|t| {
            let head = rank(t, &|e| Triple::new(e, t.relation, t.tail));
            let tail = rank(t, &|e| Triple::new(t.head, t.relation, e));
            (head, tail)
        })
        .collect()
}

/// A random graph over `n_entities` and `n_relations` with every split
/// nonempty.
pub fn random_dataset(n_entities: usize, n_relations: usize, n_triples: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::seeded(seed);
    let mut seen = HashSet::new();
    let mut splits: [Vec<(String, String, String)>; 3] = Default::default();
    let mut k = 0;
    while k < n_triples {
        let t = (
            rng.gen_range(0..n_entities),
            rng.gen_range(0..n_relations),
            rng.gen_range(0..n_entities),
        );
        if !seen.insert(t) {
            continue;
        }
        let slot = match k % 5 {
            0 => 2,
            1 => 1,
            _ => 0,
        };
        splits[slot].push((format!("e{}", t.0), format!("r{}", t.1), format!("e{}", t.2)));
        k += 1;
    }
    Dataset::from_named([&splits[0], &splits[1], &splits[2]])
}

fn set_sector(params: &mut ModelParams, r: usize, side: Side, c: f64, s: f64, theta: f64, a: f64) {
    let raws = match side {
        Side::Head => &mut params.arrays.head,
        Side::Tail => &mut params.arrays.tail,
    };
    raws.center.row_mut(r).fill(c);
    raws.size.row_mut(r).fill(s);
    raws.phase.row_mut(r).fill(theta);
    raws.arc.row_mut(r).fill(a);
}

/// Parameters over three relations and two dimensions that satisfy (or,
/// with `satisfy = false`, violate) the condition for `pattern` on
/// relations `0..arity`. The angle offset β is zero so each arc is exactly
/// `a` wide.
pub fn pattern_fixture(pattern: Pattern, satisfy: bool) -> ModelParams {
    let mut p = init_params(2, 3, 2, 0.0, 0);
    p.beta = 0.0;
    for r in 0..3 {
        for side in [Side::Head, Side::Tail] {
            set_sector(&mut p, r, side, 1.0, 0.5, 1.0, 0.8);
        }
    }
    use Side::{Head, Tail};
    match (pattern, satisfy) {
        (Pattern::Symmetry, true) => {}
        (Pattern::Symmetry, false) => set_sector(&mut p, 0, Tail, 1.1, 0.5, 1.0, 0.8),
        (Pattern::AntiSymmetry, true) => set_sector(&mut p, 0, Tail, 3.0, 0.5, 1.0, 0.8),
        (Pattern::AntiSymmetry, false) => set_sector(&mut p, 0, Tail, 1.2, 0.5, 1.3, 0.8),
        (Pattern::Inversion, true) => {
            set_sector(&mut p, 0, Head, 2.0, 0.4, 0.5, 0.6);
            set_sector(&mut p, 1, Tail, 2.0, 0.4, 0.5 + TAU, 0.6);
            set_sector(&mut p, 0, Tail, 1.0, 0.2, 5.0, 1.0);
            set_sector(&mut p, 1, Head, -1.0, -0.2, 5.0, -1.0);
        }
        (Pattern::Inversion, false) => {
            set_sector(&mut p, 0, Head, 2.0, 0.4, 0.5, 0.6);
            set_sector(&mut p, 1, Tail, 2.0, 0.4, 0.5, 0.6);
            set_sector(&mut p, 1, Head, 1.0, 0.5, 2.0, 0.8);
        }
        (Pattern::Subsumption, true) => {
            set_sector(&mut p, 1, Head, 1.0, 1.0, 1.0, 1.6);
            set_sector(&mut p, 1, Tail, 1.1, 1.0, 0.9, 1.6);
        }
        (Pattern::Subsumption, false) => {
            set_sector(&mut p, 1, Head, 1.0, 1.0, 1.0, 1.6);
            set_sector(&mut p, 0, Tail, 1.0, 2.0, 1.0, 0.8);
        }
        (Pattern::Intersection, true) => {
            set_sector(&mut p, 0, Head, 1.0, 1.0, 0.6, 1.0);
            set_sector(&mut p, 1, Head, 1.4, 1.0, 1.2, 1.0);
            set_sector(&mut p, 2, Head, 1.2, 0.6, 0.9, 0.4);
            set_sector(&mut p, 0, Tail, 1.0, 0.5, 1.0, 0.8);
            set_sector(&mut p, 1, Tail, 4.0, 0.5, 1.0, 0.8);
        }
        (Pattern::Intersection, false) => {
            set_sector(&mut p, 0, Head, 1.0, 1.0, 0.6, 1.0);
            set_sector(&mut p, 1, Head, 1.4, 1.0, 1.2, 1.0);
            set_sector(&mut p, 2, Head, 1.2, 0.2, 0.9, 0.2);
        }
        (Pattern::MutualExclusion, true) => {
            set_sector(&mut p, 1, Head, 1.0, 0.5, 1.0 + PI, 0.8);
        }
        (Pattern::MutualExclusion, false) => {
            set_sector(&mut p, 1, Head, 1.1, 0.5, 1.1, 0.8);
            set_sector(&mut p, 1, Tail, 0.9, 0.5, 0.9, 0.8);
        }
    }
    p
}

/// Run every quick check and report one outcome each.
pub fn run_all() -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let gap = continuity_gap(10_000, 1);
    out.push(CheckOutcome::new(
        "distance continuity",
        gap <= 1e-9,
        format!("largest branch gap {gap:.3e} over 10000 sectors"),
    ));

    let g = gradient_check(25, 2);
    out.push(CheckOutcome::new(
        "gradients vs finite differences",
        g.failures.is_empty(),
        format!(
            "{} configs, {} coordinates, {} mismatches, worst relative error {:.2e}",
            g.configs,
            g.coordinates,
            g.failures.len(),
            g.worst_relative
        ),
    ));

    out.push(ranking_check());

    let w = adversarial_weights(&[-0.3, -2.0, -7.5, -1.25], 1.0);
    let shifted = adversarial_weights(&[-0.3 + 4.0, -2.0 + 4.0, -7.5 + 4.0, -1.25 + 4.0], 1.0);
    let uniform = adversarial_weights(&[-0.3, -2.0, -7.5], 0.0);
    let sum: f64 = w.iter().sum();
    let shift_gap = w.iter().zip(&shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(CheckOutcome::new(
        "adversarial weights",
        (sum - 1.0).abs() <= 1e-12 && uniform.iter().all(|u| (u - 1.0 / 3.0).abs() <= 1e-15) && shift_gap <= 1e-15,
        format!("sum {sum}, shift gap {shift_gap:.1e}"),
    ));

    let mut wrong = Vec::new();
    for pattern in Pattern::ALL {
        for satisfy in [true, false] {
            let params = pattern_fixture(pattern, satisfy);
            let relations: Vec<usize> = (0..pattern.arity()).collect();
            match check_pattern(&params, pattern, &relations, DEFAULT_TOLERANCE) {
                Ok(r) if r.holds == satisfy => {}
                Ok(r) => wrong.push(format!("{pattern} expected {satisfy}, got {}", r.holds)),
                Err(e) => wrong.push(format!("{pattern}: {e}")),
            }
        }
    }
    out.push(CheckOutcome::new(
        "pattern conditions",
        wrong.is_empty(),
        if wrong.is_empty() {
            "12 hand-built cases".to_owned()
        } else {
            wrong.join("; ")
        },
    ));

    let params = init_params(9, 2, 5, 0.5, 4);
    let bytes = encode_params(&params.arrays);
    let same = decode_params(&bytes, 9, 2, 5)
        .map(|a| {
            let x: Vec<u64> = a.slices().concat().iter().map(|v| v.to_bits()).collect();
            let y: Vec<u64> = params.arrays.slices().concat().iter().map(|v| v.to_bits()).collect();
            x == y
        })
        .unwrap_or(false);
    out.push(CheckOutcome::new(
        "parameter encoding round trip",
        same,
        format!("{} bytes", bytes.len()),
    ));

    out
}

fn ranking_check() -> CheckOutcome {
    let name = "filtered ranks vs brute force";
    let run = || -> Result<(bool, usize, bool)> {
        let dataset = random_dataset(30, 3, 150, 3)?;
        let params = init_params(dataset.n_entities(), dataset.n_relations(), 6, 0.5, 5);
        let options = EvalOptions {
            ablation: AblationConfig::default(),
            norm: Norm::L1,
        };
        let fast = rank_split(&params, &dataset, Split::Test, options, &Workers::new(1))?;
        let slow = brute_force_ranks(&params, &dataset, Split::Test, options);
        let matches = fast
            .head_ranks
            .iter()
            .zip(&fast.tail_ranks)
            .zip(&slow)
            .all(|((h, t), (bh, bt))| h == bh && t == bt);
        let one = evaluate_split(&params, &dataset, Split::Test, options, true, &Workers::new(1))?;
        let many = evaluate_split(&params, &dataset, Split::Test, options, true, &Workers::new(4))?;
        Ok((matches, slow.len(), one == many))
    };
    match run() {
        Ok((matches, n, same)) => CheckOutcome::new(
            name,
            matches && same,
            format!("{n} test triples, ranks equal: {matches}, 1 vs 4 threads equal: {same}"),
        ),
        Err(e) => CheckOutcome::new(name, false, e.to_string()),
    }
}
