//! Trainable parameters, entity composition, triple scoring and gradients.
//!
//! Every stored array is unconstrained ("raw"). Constrained quantities are
//! derived on the fly:
//!
//! * composed modulus of entity `i` bumped by `j`: `|base_m(i)| ⊙ |bump_m(j)|`
//! * composed phase: `(base_p(i) + bump_p(j)) mod 2π`
//! * sectors via [`AnnularSector::from_raw`]
//! * loss weights `λ = exp(raw_λ)`
//!
//! The score of `r(h, t)` is
//!
//! ```text
//! -Σ_{x ∈ {h, t}} ( λ1 ‖dist_mod(x, r^x)‖ + λ2 ‖dist_phase(x, r^x)‖ )
//! ```
//!
//! where the head point is `h` bumped by `t` and the tail point is `t`
//! bumped by `h`.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::Triple;
use crate::error::{Error, Result};
use crate::geometry::{modulus_term, phase_offset, phase_term, wrap_phase, AnnularSector, PolarVector};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Norm {
    #[default]
    L1,
    L2,
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Ok(Norm::L1),
            "L2" => Ok(Norm::L2),
            _ => Err(format!("unknown norm `{s}` (expected L1 or L2)")),
        }
    }
}

/// Which parts of the score are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AblationConfig {
    pub use_modulus: bool,
    pub use_phase: bool,
    pub use_bump: bool,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            use_modulus: true,
            use_phase: true,
            use_bump: true,
        }
    }
}

impl AblationConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.use_modulus && !self.use_phase {
            return Err(Error::Config(
                "ablation must keep at least one of the modulus and phase parts".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Head,
    Tail,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Raw parameters of one sector side for every relation (`|R| × d` each).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorRaws {
    pub center: Matrix,
    pub size: Matrix,
    pub phase: Matrix,
    pub arc: Matrix,
}

impl SectorRaws {
    fn zeros(rows: usize, cols: usize) -> Self {
        SectorRaws {
            center: Matrix::zeros(rows, cols),
            size: Matrix::zeros(rows, cols),
            phase: Matrix::zeros(rows, cols),
            arc: Matrix::zeros(rows, cols),
        }
    }

    pub fn sector(&self, relation: usize, beta: f64) -> AnnularSector {
        AnnularSector::from_raw(
            self.center.row(relation),
            self.size.row(relation),
            self.phase.row(relation),
            self.arc.row(relation),
            beta,
        )
    }
}

/// Every trainable array. Also used as the dense gradient and optimizer
/// moment container.
///
/// The fixed array order (used by checkpoints and the optimizer) is: entity
/// base modulus, base phase, bump modulus, bump phase; head-sector center,
/// size, phase, arc; tail-sector center, size, phase, arc; then the two raw
/// loss weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamArrays {
    pub base_modulus: Matrix,
    pub base_phase: Matrix,
    pub bump_modulus: Matrix,
    pub bump_phase: Matrix,
    pub head: SectorRaws,
    pub tail: SectorRaws,
    pub lambda: [f64; 2],
}

impl ParamArrays {
    pub fn zeros(n_entities: usize, n_relations: usize, dim: usize) -> Self {
        ParamArrays {
            base_modulus: Matrix::zeros(n_entities, dim),
            base_phase: Matrix::zeros(n_entities, dim),
            bump_modulus: Matrix::zeros(n_entities, dim),
            bump_phase: Matrix::zeros(n_entities, dim),
            head: SectorRaws::zeros(n_relations, dim),
            tail: SectorRaws::zeros(n_relations, dim),
            lambda: [0.0; 2],
        }
    }

    pub fn zeros_like(&self) -> Self {
        ParamArrays::zeros(
            self.base_modulus.rows(),
            self.head.center.rows(),
            self.base_modulus.cols(),
        )
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        vec![
            self.base_modulus.as_slice(),
            self.base_phase.as_slice(),
            self.bump_modulus.as_slice(),
            self.bump_phase.as_slice(),
            self.head.center.as_slice(),
            self.head.size.as_slice(),
            self.head.phase.as_slice(),
            self.head.arc.as_slice(),
            self.tail.center.as_slice(),
            self.tail.size.as_slice(),
            self.tail.phase.as_slice(),
            self.tail.arc.as_slice(),
            &self.lambda,
        ]
    }

    pub fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.base_modulus.as_mut_slice(),
            self.base_phase.as_mut_slice(),
            self.bump_modulus.as_mut_slice(),
            self.bump_phase.as_mut_slice(),
            self.head.center.as_mut_slice(),
            self.head.size.as_mut_slice(),
            self.head.phase.as_mut_slice(),
            self.head.arc.as_mut_slice(),
            self.tail.center.as_mut_slice(),
            self.tail.size.as_mut_slice(),
            self.tail.phase.as_mut_slice(),
            self.tail.arc.as_mut_slice(),
            &mut self.lambda,
        ]
    }

    pub fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fill_zero(&mut self) {
        for s in self.slices_mut() {
            s.fill(0.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub arrays: ParamArrays,
    pub beta: f64,
}

/// A link-prediction query with one open slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    /// `(head, relation, ?)`
    Tail { head: usize, relation: usize },
    /// `(?, relation, tail)`
    Head { relation: usize, tail: usize },
}

impl Query {
    pub fn relation(&self) -> usize {
        match *self {
            Query::Tail { relation, .. } | Query::Head { relation, .. } => relation,
        }
    }

    /// The triple obtained by filling the open slot with `entity`.
    pub fn fill(&self, entity: usize) -> Triple {
        match *self {
            Query::Tail { head, relation } => Triple::new(head, relation, entity),
            Query::Head { relation, tail } => Triple::new(entity, relation, tail),
        }
    }
}

/// Subgradient of `|x|`, taking `+1` at zero.
fn abs_slope(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Per-entity gradient rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityGrad {
    pub base_modulus: Vec<f64>,
    pub base_phase: Vec<f64>,
    pub bump_modulus: Vec<f64>,
    pub bump_phase: Vec<f64>,
}

impl EntityGrad {
    fn zeros(d: usize) -> Self {
        EntityGrad {
            base_modulus: vec![0.0; d],
            base_phase: vec![0.0; d],
            bump_modulus: vec![0.0; d],
            bump_phase: vec![0.0; d],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorGrad {
    pub center: Vec<f64>,
    pub size: Vec<f64>,
    pub phase: Vec<f64>,
    pub arc: Vec<f64>,
}

impl SectorGrad {
    fn zeros(d: usize) -> Self {
        SectorGrad {
            center: vec![0.0; d],
            size: vec![0.0; d],
            phase: vec![0.0; d],
            arc: vec![0.0; d],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationGrad {
    pub head: SectorGrad,
    pub tail: SectorGrad,
}

/// Gradient with respect to every raw parameter, stored sparsely: rows
/// that are absent are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    dim: usize,
    pub entities: HashMap<usize, EntityGrad>,
    pub relations: HashMap<usize, RelationGrad>,
    pub lambda: [f64; 2],
}

impl Gradients {
    pub fn new(dim: usize) -> Self {
        Gradients {
            dim,
            entities: HashMap::new(),
            relations: HashMap::new(),
            lambda: [0.0; 2],
        }
    }

    fn entity(&mut self, id: usize) -> &mut EntityGrad {
        let d = self.dim;
        self.entities.entry(id).or_insert_with(|| EntityGrad::zeros(d))
    }

    fn sector(&mut self, relation: usize, side: Side) -> &mut SectorGrad {
        let d = self.dim;
        let rel = self.relations.entry(relation).or_insert_with(|| RelationGrad {
            head: SectorGrad::zeros(d),
            tail: SectorGrad::zeros(d),
        });
        match side {
            Side::Head => &mut rel.head,
            Side::Tail => &mut rel.tail,
        }
    }

    /// `dense += scale * self`.
    pub fn add_to(&self, dense: &mut ParamArrays, scale: f64) {
        fn axpy(dst: &mut [f64], src: &[f64], scale: f64) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
        for (&id, g) in &self.entities {
            axpy(dense.base_modulus.row_mut(id), &g.base_modulus, scale);
            axpy(dense.base_phase.row_mut(id), &g.base_phase, scale);
            axpy(dense.bump_modulus.row_mut(id), &g.bump_modulus, scale);
            axpy(dense.bump_phase.row_mut(id), &g.bump_phase, scale);
        }
        for (&id, g) in &self.relations {
            for (raws, sg) in [(&mut dense.head, &g.head), (&mut dense.tail, &g.tail)] {
                axpy(raws.center.row_mut(id), &sg.center, scale);
                axpy(raws.size.row_mut(id), &sg.size, scale);
                axpy(raws.phase.row_mut(id), &sg.phase, scale);
                axpy(raws.arc.row_mut(id), &sg.arc, scale);
            }
        }
        dense.lambda[0] += scale * self.lambda[0];
        dense.lambda[1] += scale * self.lambda[1];
    }

    pub fn to_dense(&self, params: &ModelParams) -> ParamArrays {
        let mut dense = params.arrays.zeros_like();
        self.add_to(&mut dense, 1.0);
        dense
    }
}

/// Per-side norms of the distance vectors, kept for the backward pass.
struct SideTerms {
    modulus: f64,
    phase: f64,
}

pub fn init_params(n_entities: usize, n_relations: usize, dim: usize, beta: f64, seed: u64) -> ModelParams {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut rng = rng::seeded(seed);
    let mut arrays = ParamArrays::zeros(n_entities, n_relations, dim);
    let mut fill = |m: &mut Matrix, lo: f64, hi: f64| {
        let dist = Uniform::new(lo, hi);
        for x in m.as_mut_slice() {
            *x = dist.sample(&mut rng);
        }
    };
    fill(&mut arrays.base_modulus, 0.5, 1.5);
    fill(&mut arrays.base_phase, 0.0, TAU);
    fill(&mut arrays.bump_modulus, 0.9, 1.1);
    fill(&mut arrays.bump_phase, 0.0, TAU);
    for side in [&mut arrays.head, &mut arrays.tail] {
        fill(&mut side.center, 0.5, 1.5);
        fill(&mut side.size, 0.0, 0.5);
        fill(&mut side.phase, 0.0, TAU);
        fill(&mut side.arc, 0.0, 0.5);
    }
    ModelParams { arrays, beta }
}

impl ModelParams {
    pub fn dim(&self) -> usize {
        self.arrays.base_modulus.cols()
    }

    pub fn n_entities(&self) -> usize {
        self.arrays.base_modulus.rows()
    }

    pub fn n_relations(&self) -> usize {
        self.arrays.head.center.rows()
    }

    pub fn lambda(&self) -> [f64; 2] {
        [self.arrays.lambda[0].exp(), self.arrays.lambda[1].exp()]
    }

    pub fn sector(&self, relation: usize, side: Side) -> AnnularSector {
        match side {
            Side::Head => self.arrays.head.sector(relation, self.beta),
            Side::Tail => self.arrays.tail.sector(relation, self.beta),
        }
    }

    /// Composed point of `entity` inside a triple whose other entity is
    /// `partner`.
    pub fn embed_entity(&self, entity: usize, partner: usize, ablation: AblationConfig) -> PolarVector {
        let a = &self.arrays;
        let base_m = a.base_modulus.row(entity);
        let base_p = a.base_phase.row(entity);
        let (modulus, phase) = if ablation.use_bump {
            let bump_m = a.bump_modulus.row(partner);
            let bump_p = a.bump_phase.row(partner);
            (
                base_m.iter().zip(bump_m).map(|(b, u)| b.abs() * u.abs()).collect(),
                base_p.iter().zip(bump_p).map(|(b, u)| wrap_phase(b + u)).collect(),
            )
        } else {
            (
                base_m.iter().map(|b| b.abs()).collect(),
                base_p.iter().copied().map(wrap_phase).collect(),
            )
        };
        PolarVector { modulus, phase }
    }

    /// Forward pass for one side of a triple.
    fn side_forward(
        &self,
        entity: usize,
        partner: usize,
        sector: &AnnularSector,
        ablation: AblationConfig,
        norm: Norm,
    ) -> SideTerms {
        let a = &self.arrays;
        let base_m = a.base_modulus.row(entity);
        let base_p = a.base_phase.row(entity);
        let bump_m = a.bump_modulus.row(partner);
        let bump_p = a.bump_phase.row(partner);
        let mut acc_m = 0.0;
        let mut acc_p = 0.0;
        for i in 0..self.dim() {
            if ablation.use_modulus {
                let m = if ablation.use_bump {
                    base_m[i].abs() * bump_m[i].abs()
                } else {
                    base_m[i].abs()
                };
                let v = modulus_term((m - sector.center[i]).abs(), sector.size[i]).value;
                acc_m += match norm {
                    Norm::L1 => v,
                    Norm::L2 => v * v,
                };
            }
            if ablation.use_phase {
                let p = if ablation.use_bump {
                    wrap_phase(base_p[i] + bump_p[i])
                } else {
                    wrap_phase(base_p[i])
                };
                let v = phase_term(phase_offset(p, sector.phase_center[i]), sector.angle(i)).value;
                acc_p += match norm {
                    Norm::L1 => v,
                    Norm::L2 => v * v,
                };
            }
        }
        match norm {
            Norm::L1 => SideTerms {
                modulus: acc_m,
                phase: acc_p,
            },
            Norm::L2 => SideTerms {
                modulus: acc_m.sqrt(),
                phase: acc_p.sqrt(),
            },
        }
    }

    fn score_with(
        &self,
        triple: &Triple,
        head_sector: &AnnularSector,
        tail_sector: &AnnularSector,
        ablation: AblationConfig,
        norm: Norm,
    ) -> f64 {
        let [l1, l2] = self.lambda();
        let h = self.side_forward(triple.head, triple.tail, head_sector, ablation, norm);
        let t = self.side_forward(triple.tail, triple.head, tail_sector, ablation, norm);
        let mut total = 0.0;
        if ablation.use_modulus {
            total += l1 * (h.modulus + t.modulus);
        }
        if ablation.use_phase {
            total += l2 * (h.phase + t.phase);
        }
        -total
    }

    pub fn score_triple(&self, triple: &Triple, ablation: AblationConfig, norm: Norm) -> f64 {
        let hs = self.sector(triple.relation, Side::Head);
        let ts = self.sector(triple.relation, Side::Tail);
        self.score_with(triple, &hs, &ts, ablation, norm)
    }

    /// Score every entity in the open slot of `query`.
    pub fn score_candidates(&self, query: Query, ablation: AblationConfig, norm: Norm) -> Vec<f64> {
        let hs = self.sector(query.relation(), Side::Head);
        let ts = self.sector(query.relation(), Side::Tail);
        (0..self.n_entities())
            .map(|e| self.score_with(&query.fill(e), &hs, &ts, ablation, norm))
            .collect()
    }

    /// Accumulate `upstream * d score / d raw` for one side into `grads`.
    #[allow(clippy::too_many_arguments)]
    fn side_backward(
        &self,
        entity: usize,
        partner: usize,
        relation: usize,
        side: Side,
        sector: &AnnularSector,
        terms: &SideTerms,
        upstream: f64,
        ablation: AblationConfig,
        norm: Norm,
        grads: &mut Gradients,
    ) {
        let a = &self.arrays;
        let raws = match side {
            Side::Head => &a.head,
            Side::Tail => &a.tail,
        };
        let d = self.dim();
        let [l1, l2] = self.lambda();
        let base_m = a.base_modulus.row(entity);
        let base_p = a.base_phase.row(entity);
        let bump_m = a.bump_modulus.row(partner);
        let bump_p = a.bump_phase.row(partner);
        let raw_c = raws.center.row(relation);
        let raw_s = raws.size.row(relation);
        let raw_a = raws.arc.row(relation);

        let mut g_base_m = vec![0.0; d];
        let mut g_base_p = vec![0.0; d];
        let mut g_bump_m = vec![0.0; d];
        let mut g_bump_p = vec![0.0; d];
        let mut g_c = vec![0.0; d];
        let mut g_s = vec![0.0; d];
        let mut g_theta = vec![0.0; d];
        let mut g_a = vec![0.0; d];

        for i in 0..d {
            if ablation.use_modulus {
                let bump = if ablation.use_bump { bump_m[i].abs() } else { 1.0 };
                let m = base_m[i].abs() * bump;
                let diff = m - sector.center[i];
                let term = modulus_term(diff.abs(), sector.size[i]);
                let d_norm = match norm {
                    Norm::L1 => 1.0,
                    Norm::L2 if terms.modulus > 0.0 => term.value / terms.modulus,
                    Norm::L2 => 0.0,
                };
                // score = -λ1 ‖·‖
                let gv = -upstream * l1 * d_norm;
                let g_offset = gv * term.d_offset * sign(diff);
                g_base_m[i] += g_offset * abs_slope(base_m[i]) * bump;
                if ablation.use_bump {
                    g_bump_m[i] += g_offset * base_m[i].abs() * abs_slope(bump_m[i]);
                }
                g_c[i] -= g_offset * abs_slope(raw_c[i]);
                g_s[i] += gv * term.d_scale * abs_slope(raw_s[i]);
            }
            if ablation.use_phase {
                let p = if ablation.use_bump {
                    base_p[i] + bump_p[i]
                } else {
                    base_p[i]
                };
                let half = 0.5 * (wrap_phase(p) - sector.phase_center[i]);
                let sigma = half.sin().abs();
                let angle = sector.angle(i);
                let term = phase_term(sigma, angle);
                let d_norm = match norm {
                    Norm::L1 => 1.0,
                    Norm::L2 if terms.phase > 0.0 => term.value / terms.phase,
                    Norm::L2 => 0.0,
                };
                let gv = -upstream * l2 * d_norm;
                let d_sigma_dp = 0.5 * sign(half.sin()) * half.cos();
                let g_p = gv * term.d_offset * d_sigma_dp;
                g_base_p[i] += g_p;
                if ablation.use_bump {
                    g_bump_p[i] += g_p;
                }
                g_theta[i] -= g_p;
                g_a[i] += gv * term.d_scale * abs_slope(raw_a[i]);
            }
        }

        let eg = grads.entity(entity);
        add_into(&mut eg.base_modulus, &g_base_m);
        add_into(&mut eg.base_phase, &g_base_p);
        if ablation.use_bump {
            let pg = grads.entity(partner);
            add_into(&mut pg.bump_modulus, &g_bump_m);
            add_into(&mut pg.bump_phase, &g_bump_p);
        }
        let sg = grads.sector(relation, side);
        add_into(&mut sg.center, &g_c);
        add_into(&mut sg.size, &g_s);
        add_into(&mut sg.phase, &g_theta);
        add_into(&mut sg.arc, &g_a);

        if ablation.use_modulus {
            grads.lambda[0] += -upstream * l1 * terms.modulus;
        }
        if ablation.use_phase {
            grads.lambda[1] += -upstream * l2 * terms.phase;
        }
    }

    /// Score `triple` and add `upstream * d score / d raw` into `grads`.
    pub fn score_backward(
        &self,
        triple: &Triple,
        upstream: f64,
        ablation: AblationConfig,
        norm: Norm,
        grads: &mut Gradients,
    ) -> f64 {
        let r = triple.relation;
        let hs = self.sector(r, Side::Head);
        let ts = self.sector(r, Side::Tail);
        let h_terms = self.side_forward(triple.head, triple.tail, &hs, ablation, norm);
        let t_terms = self.side_forward(triple.tail, triple.head, &ts, ablation, norm);
        self.side_backward(
            triple.head,
            triple.tail,
            r,
            Side::Head,
            &hs,
            &h_terms,
            upstream,
            ablation,
            norm,
            grads,
        );
        self.side_backward(
            triple.tail,
            triple.head,
            r,
            Side::Tail,
            &ts,
            &t_terms,
            upstream,
            ablation,
            norm,
            grads,
        );
        self.score_with(triple, &hs, &ts, ablation, norm)
    }

    /// Self-adversarial negative-sampling loss for one positive and its
    /// gradient.
    ///
    /// ```text
    /// L = -log σ(γ + score(pos)) - Σ_i w_i log σ(-score(neg_i) - γ)
    /// ```
    ///
    /// The weights are treated as constants.
    pub fn loss_gradients(
        &self,
        positive: &Triple,
        negatives: &[Triple],
        weights: &[f64],
        gamma: f64,
        ablation: AblationConfig,
        norm: Norm,
    ) -> (f64, Gradients) {
        assert!(!negatives.is_empty(), "at least one negative is required");
        assert_eq!(negatives.len(), weights.len(), "one weight per negative");
        let mut grads = Gradients::new(self.dim());

        let pos_score = self.score_triple(positive, ablation, norm);
        let mut loss = softplus(-(gamma + pos_score));
        self.score_backward(positive, -sigmoid(-(gamma + pos_score)), ablation, norm, &mut grads);

        for (neg, &w) in negatives.iter().zip(weights) {
            let s = self.score_triple(neg, ablation, norm);
            loss += w * softplus(s + gamma);
            self.score_backward(neg, w * sigmoid(s + gamma), ablation, norm, &mut grads);
        }
        (loss, grads)
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}
