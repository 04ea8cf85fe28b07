//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use sectore::geometry::AnnularSector;
use sectore::model::{AblationConfig, ModelParams, Norm};
use sectore::rng::Rng as ChaCha;
use sectore::{Dataset, Split, Triple};

/// Score of one triple straight from the raw arrays.
pub fn oracle_score(p: &ModelParams, t: &Triple, abl: AblationConfig, norm: Norm) -> f64 {
    let a = &p.arrays;
    let d = p.dim();
    let lam1 = a.lambda[0].exp();
    let lam2 = a.lambda[1].exp();
    let side = |e: usize, other: usize, raws: &sectore::model::SectorRaws| -> (f64, f64) {
        let mut dm = Vec::new();
        let mut dp = Vec::new();
        for i in 0..d {
            let mut m = a.base_modulus.row(e)[i].abs();
            let mut ph = a.base_phase.row(e)[i];
            if abl.use_bump {
                m *= a.bump_modulus.row(other)[i].abs();
                ph += a.bump_phase.row(other)[i];
            }
            let c = raws.center.row(t.relation)[i].abs();
            let s = raws.size.row(t.relation)[i].abs();
            let theta = raws.phase.row(t.relation)[i].rem_euclid(TAU);
            let delta = raws.arc.row(t.relation)[i].abs() + p.beta * PI;
            let w = s + 1.0;
            let gap = (m - c).abs();
            dm.push(if gap <= s / 2.0 {
                gap / w
            } else {
                gap * w - 0.5 * (w - 1.0) * (w - 1.0 / w)
            });
            let sigma = ((ph.rem_euclid(TAU) - theta) / 2.0).sin().abs();
            dp.push(if sigma <= 0.5 {
                sigma / delta
            } else {
                sigma * delta - 0.5 * (delta - 1.0 / delta)
            });
        }
        let n = |v: &[f64]| match norm {
            Norm::L1 => v.iter().sum::<f64>(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        };
        (n(&dm), n(&dp))
    };
    let (hm, hp) = side(t.head, t.tail, &a.head);
    let (tm, tp) = side(t.tail, t.head, &a.tail);
    let mut total = 0.0;
    if abl.use_modulus {
        total += lam1 * (hm + tm);
    }
    if abl.use_phase {
        total += lam2 * (hp + tp);
    }
    -total
}

/// Filtered mid-ranks, one candidate triple at a time.
pub fn brute_force_ranks(
    p: &ModelParams,
    ds: &Dataset,
    split: Split,
    abl: AblationConfig,
    norm: Norm,
) -> Vec<(f64, f64)> {
    let known: HashSet<Triple> = ds.train().iter().chain(ds.valid()).chain(ds.test()).copied().collect();
    let rank_of = |truth: Triple, make: &dyn Fn(usize) -> Triple| {
        let target = p.score_triple(&truth, abl, norm);
        let mut greater = 0u32;
        let mut ties = 0u32;
        for e in 0..ds.n_entities() {
            let cand = make(e);
            if cand == truth || known.contains(&cand) {
                continue;
            }
            let s = p.score_triple(&cand, abl, norm);
            if s > target {
                greater += 1;
            } else if s == target {
                ties += 1;
            }
        }
        1.0 + f64::from(greater) + f64::from(ties) / 2.0
    };
    ds.split(split)
        .iter()
        .map(|&t| {
            (
                rank_of(t, &|e| Triple::new(e, t.relation, t.tail)),
                rank_of(t, &|e| Triple::new(t.head, t.relation, e)),
            )
        })
        .collect()
}

pub const BETA: f64 = 0.25;
const MOD_STEP: f64 = 1.0 / 64.0;
const MOD_MAX: f64 = 4.0;
const PHASE_CELLS: usize = 128;

/// A sector whose boundaries sit on a coarse lattice: moduli on multiples
/// of 1/8 and arc ends on multiples of π/16 (with β = 1/4).
pub fn lattice_sector(rng: &mut ChaCha, d: usize) -> AnnularSector {
    let c: Vec<f64> = (0..d).map(|_| rng.gen_range(2..=12) as f64 * 0.125).collect();
    let s: Vec<f64> = (0..d).map(|_| rng.gen_range(0..=8) as f64 * 0.25).collect();
    let theta: Vec<f64> = (0..d).map(|_| rng.gen_range(0..16) as f64 * PI / 8.0).collect();
    let a: Vec<f64> = (0..d).map(|_| rng.gen_range(0..=14) as f64 * PI / 8.0).collect();
    AnnularSector::from_raw(&c, &s, &theta, &a, BETA)
}

/// Nudge one lattice coordinate of `base` by one step.
pub fn lattice_neighbor(rng: &mut ChaCha, base: &AnnularSector) -> AnnularSector {
    let mut c = base.center.clone();
    let mut s = base.size.clone();
    let mut theta = base.phase_center.clone();
    let mut a = base.arc_extra.clone();
    let i = rng.gen_range(0..base.dim());
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    match rng.gen_range(0..4) {
        0 => c[i] = (c[i] + sign * 0.125).max(0.25),
        1 => s[i] = (s[i] + sign * 0.25).max(0.0),
        2 => theta[i] += sign * PI / 8.0,
        _ => a[i] = (a[i] + sign * PI / 8.0).max(0.0),
    }
    AnnularSector::from_raw(&c, &s, &theta, &a, base.beta)
}

/// Grid points of dimension `i` that fall in the sector, as (modulus index,
/// phase index) pairs. The grid contains every lattice boundary.
pub fn grid_members(sector: &AnnularSector, i: usize) -> HashSet<(usize, usize)> {
    let slack = 1e-9;
    let c = sector.center[i];
    let s = sector.size[i];
    let lo = (c - s / 2.0).max(0.0);
    let hi = c + s / 2.0;
    let half = (sector.arc_extra[i] + sector.beta * PI).min(TAU) / 2.0;
    let theta = sector.phase_center[i];
    let n_mod = (MOD_MAX / MOD_STEP) as usize;
    let mut out = HashSet::new();
    for j in 0..=n_mod {
        let m = j as f64 * MOD_STEP;
        if m < lo - slack || m > hi + slack {
            continue;
        }
        for k in 0..PHASE_CELLS {
            let ph = k as f64 * TAU / PHASE_CELLS as f64;
            let diff = (ph - theta).rem_euclid(TAU);
            let dist = diff.min(TAU - diff);
            if dist <= half + slack {
                out.insert((j, k));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleRelation {
    pub a_subset_b: bool,
    pub b_subset_a: bool,
    pub disjoint: bool,
}

pub fn oracle_relation(a: &AnnularSector, b: &AnnularSector) -> OracleRelation {
    let mut rel = OracleRelation {
        a_subset_b: true,
        b_subset_a: true,
        disjoint: false,
    };
    for i in 0..a.dim() {
        let ga = grid_members(a, i);
        let gb = grid_members(b, i);
        rel.a_subset_b &= ga.is_subset(&gb);
        rel.b_subset_a &= gb.is_subset(&ga);
        rel.disjoint |= ga.is_disjoint(&gb);
    }
    rel
}

/// Whether a ∩ b ⊆ c on the grid.
pub fn oracle_intersection_within(a: &AnnularSector, b: &AnnularSector, c: &AnnularSector) -> bool {
    let pieces: Vec<HashSet<(usize, usize)>> = (0..a.dim())
        .map(|i| grid_members(a, i).intersection(&grid_members(b, i)).copied().collect())
        .collect();
    if pieces.iter().any(HashSet::is_empty) {
        return true;
    }
    pieces.iter().enumerate().all(|(i, p)| p.is_subset(&grid_members(c, i)))
}
