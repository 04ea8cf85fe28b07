//! Inspection of learned regions: areas, cardinality labels, pattern
//! conditions and coordinate export.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::data::Vocabulary;
use crate::error::{Error, Result};
use crate::geometry::{intersection_within, sector_area, sector_relation};
use crate::model::{AblationConfig, ModelParams, Side};
use crate::synthetic::Pattern;

pub const DEFAULT_CARDINALITY_THRESHOLD: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaRow {
    pub relation: String,
    pub head_area: f64,
    pub tail_area: f64,
}

/// Geometric-mean sector areas per relation, sorted by relation name.
pub fn area_report(params: &ModelParams, vocab: &Vocabulary) -> Result<Vec<AreaRow>> {
    if vocab.n_relations() != params.n_relations() {
        return Err(Error::DimensionMismatch(format!(
            "vocabulary has {} relations, parameters have {}",
            vocab.n_relations(),
            params.n_relations()
        )));
    }
    let mut rows: Vec<AreaRow> = (0..params.n_relations())
        .map(|r| AreaRow {
            relation: vocab.relation_name(r).to_owned(),
            head_area: sector_area(&params.sector(r, Side::Head)).geometric_mean,
            tail_area: sector_area(&params.sector(r, Side::Tail)).geometric_mean,
        })
        .collect();
    rows.sort_by(|a, b| a.relation.cmp(&b.relation));
    Ok(rows)
}

/// Fixed-width table: a header line, then one line per row with the name
/// left-aligned in 32 columns and each area as `{:>14.6}`.
pub fn format_area_table(rows: &[AreaRow]) -> String {
    let mut out = format!("{:<32} {:>14} {:>14}\n", "relation", "head_area", "tail_area");
    for row in rows {
        let _ = writeln!(
            out,
            "{:<32} {:>14.6} {:>14.6}",
            row.relation, row.head_area, row.tail_area
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cardinality {
    OneToMany,
    ManyToOne,
    Balanced,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cardinality::OneToMany => "one-to-many",
            Cardinality::ManyToOne => "many-to-one",
            Cardinality::Balanced => "balanced",
        })
    }
}

/// Label a relation by the ratio of its head and tail areas.
pub fn classify_cardinality(head_area: f64, tail_area: f64, threshold: f64) -> Result<Cardinality> {
    if !(head_area > 0.0 && tail_area > 0.0) {
        return Err(Error::Config(format!(
            "areas must be positive, got head {head_area} and tail {tail_area}"
        )));
    }
    if !(threshold >= 1.0) {
        return Err(Error::Config(format!("threshold must be at least 1, got {threshold}")));
    }
    let ratio = head_area / tail_area;
    Ok(if ratio < 1.0 / threshold {
        Cardinality::OneToMany
    } else if ratio > threshold {
        Cardinality::ManyToOne
    } else {
        Cardinality::Balanced
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub description: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub pattern: Pattern,
    pub relations: Vec<usize>,
    pub holds: bool,
    pub conditions: Vec<Condition>,
}

/// Evaluate the region condition for `pattern` over `relations`.
///
/// | pattern          | condition                                  |
/// |------------------|--------------------------------------------|
/// | symmetry         | r^h = r^t                                  |
/// | anti-symmetry    | r^h ∩ r^t = ∅                              |
/// | inversion        | r1^h = r2^t and r1^t = r2^h                |
/// | subsumption      | r1^h ⊆ r2^h and r1^t ⊆ r2^t                |
/// | intersection     | r1^h ∩ r2^h ⊆ r3^h and r1^t ∩ r2^t ⊆ r3^t  |
/// | mutual-exclusion | r1^h ∩ r2^h = ∅ or r1^t ∩ r2^t = ∅         |
///
/// The report holds if all conditions hold, except for mutual exclusion
/// where one suffices.
pub fn check_pattern(params: &ModelParams, pattern: Pattern, relations: &[usize], eps: f64) -> Result<PatternReport> {
    if relations.len() != pattern.arity() {
        return Err(Error::Config(format!(
            "{pattern} takes {} relation(s), got {}",
            pattern.arity(),
            relations.len()
        )));
    }
    if let Some(&bad) = relations.iter().find(|&&r| r >= params.n_relations()) {
        return Err(Error::Config(format!(
            "relation id {bad} out of range for {} relations",
            params.n_relations()
        )));
    }
    let h = |i: usize| params.sector(relations[i], Side::Head);
    let t = |i: usize| params.sector(relations[i], Side::Tail);
    let cond = |description: &str, holds: bool| Condition {
        description: description.to_owned(),
        holds,
    };
    let conditions = match pattern {
        Pattern::Symmetry => vec![cond("r^h = r^t", sector_relation(&h(0), &t(0), eps)?.equal)],
        Pattern::AntiSymmetry => vec![cond("r^h ∩ r^t = ∅", sector_relation(&h(0), &t(0), eps)?.disjoint)],
        Pattern::Inversion => vec![
            cond("r1^h = r2^t", sector_relation(&h(0), &t(1), eps)?.equal),
            cond("r1^t = r2^h", sector_relation(&t(0), &h(1), eps)?.equal),
        ],
        Pattern::Subsumption => vec![
            cond("r1^h ⊆ r2^h", sector_relation(&h(0), &h(1), eps)?.a_subset_b),
            cond("r1^t ⊆ r2^t", sector_relation(&t(0), &t(1), eps)?.a_subset_b),
        ],
        Pattern::Intersection => vec![
            cond("r1^h ∩ r2^h ⊆ r3^h", intersection_within(&h(0), &h(1), &h(2), eps)?),
            cond("r1^t ∩ r2^t ⊆ r3^t", intersection_within(&t(0), &t(1), &t(2), eps)?),
        ],
        Pattern::MutualExclusion => vec![
            cond("r1^h ∩ r2^h = ∅", sector_relation(&h(0), &h(1), eps)?.disjoint),
            cond("r1^t ∩ r2^t = ∅", sector_relation(&t(0), &t(1), eps)?.disjoint),
        ],
    };
    let holds = match pattern {
        Pattern::MutualExclusion => conditions.iter().any(|c| c.holds),
        _ => conditions.iter().all(|c| c.holds),
    };
    Ok(PatternReport {
        pattern,
        relations: relations.to_vec(),
        holds,
        conditions,
    })
}

pub const POLAR_CSV_HEADER: &str = "entity,dim,modulus,phase";

/// Polar coordinates of entities as CSV rows `entity,dim,modulus,phase`.
///
/// With a nonempty `contexts` list (same length as `entities`), each entity
/// is composed with the bump of its paired context entity; otherwise the
/// base point is written. Entities are named through `vocab` when given.
pub fn export_polar_csv(
    params: &ModelParams,
    entities: &[usize],
    contexts: &[usize],
    vocab: Option<&Vocabulary>,
) -> Result<String> {
    if !contexts.is_empty() && contexts.len() != entities.len() {
        return Err(Error::Config(format!(
            "{} entities but {} context entities",
            entities.len(),
            contexts.len()
        )));
    }
    if let Some(&bad) = entities.iter().chain(contexts).find(|&&e| e >= params.n_entities()) {
        return Err(Error::Config(format!(
            "entity id {bad} out of range for {} entities",
            params.n_entities()
        )));
    }
    let mut out = format!("{POLAR_CSV_HEADER}\n");
    for (k, &e) in entities.iter().enumerate() {
        let point = match contexts.get(k) {
            Some(&c) => params.embed_entity(e, c, AblationConfig::default()),
            None => params.embed_entity(
                e,
                e,
                AblationConfig {
                    use_bump: false,
                    ..Default::default()
                },
            ),
        };
        let name = match vocab {
            Some(v) => v.entity_name(e).to_owned(),
            None => e.to_string(),
        };
        for (i, (m, p)) in point.modulus.iter().zip(&point.phase).enumerate() {
            let _ = writeln!(out, "{name},{i},{m},{p}");
        }
    }
    Ok(out)
}
