//! Filtered link-prediction evaluation.
//!
//! Each evaluated triple yields a head query `(?, r, t)` and a tail query
//! `(h, r, ?)`. Every entity is scored in the open slot; candidates that
//! form another known triple (train ∪ valid ∪ test) are removed, and the
//! true answer's rank is taken with mid-rank tie handling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Split, Triple};
use crate::error::{Error, Result};
use crate::model::{AblationConfig, ModelParams, Norm, Query};
use crate::parallel::Workers;

/// Rank of `true_entity` among candidates not in `filtered`.
///
/// `filtered` must be sorted ascending; the true entity itself is never
/// filtered. Ties count half: `1 + #greater + #equal / 2`.
pub fn filtered_rank(scores: &[f64], true_entity: usize, filtered: &[usize]) -> Result<f64> {
    let target = *scores.get(true_entity).ok_or_else(|| {
        Error::Evaluation(format!(
            "true entity {true_entity} out of range for {} candidates",
            scores.len()
        ))
    })?;
    let mut greater = 0usize;
    let mut equal = 0usize;
    let mut next_filtered = filtered.iter().copied().peekable();
    for (e, &s) in scores.iter().enumerate() {
        while next_filtered.next_if(|&f| f < e).is_some() {}
        if next_filtered.next_if_eq(&e).is_some() || e == true_entity {
            continue;
        }
        if s > target {
            greater += 1;
        } else if s == target {
            equal += 1;
        }
    }
    Ok(1.0 + greater as f64 + 0.5 * equal as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankSide {
    Head,
    Tail,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hits {
    #[serde(rename = "1")]
    pub at1: f64,
    #[serde(rename = "3")]
    pub at3: f64,
    #[serde(rename = "10")]
    pub at10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationMetrics {
    pub mrr: f64,
    pub hits: Hits,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mrr: f64,
    pub hits: Hits,
    pub side: RankSide,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_relation: Option<BTreeMap<String, RelationMetrics>>,
}

fn summarize(ranks: &[f64]) -> (f64, Hits) {
    let n = ranks.len() as f64;
    let mut rr = 0.0;
    let mut h = [0usize; 3];
    for &r in ranks {
        rr += 1.0 / r;
        for (slot, cut) in h.iter_mut().zip([1.0, 3.0, 10.0]) {
            if r <= cut {
                *slot += 1;
            }
        }
    }
    (
        rr / n,
        Hits {
            at1: h[0] as f64 / n,
            at3: h[1] as f64 / n,
            at10: h[2] as f64 / n,
        },
    )
}

/// Ranks for every triple of a split, in split order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub triples: Vec<Triple>,
    pub head_ranks: Vec<f64>,
    pub tail_ranks: Vec<f64>,
}

impl Ranking {
    pub fn ranks(&self, side: RankSide) -> Vec<f64> {
        match side {
            RankSide::Head => self.head_ranks.clone(),
            RankSide::Tail => self.tail_ranks.clone(),
            RankSide::Both => self
                .head_ranks
                .iter()
                .zip(&self.tail_ranks)
                .flat_map(|(h, t)| [*h, *t])
                .collect(),
        }
    }

    /// Aggregate into a report; per-relation rows are keyed by `relation_name`.
    pub fn report(&self, side: RankSide, relation_name: Option<&dyn Fn(usize) -> String>) -> MetricsReport {
        let ranks = self.ranks(side);
        let (mrr, hits) = summarize(&ranks);
        let per_relation = relation_name.map(|name| {
            let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for (i, t) in self.triples.iter().enumerate() {
                let bucket = groups.entry(t.relation).or_default();
                match side {
                    RankSide::Head => bucket.push(self.head_ranks[i]),
                    RankSide::Tail => bucket.push(self.tail_ranks[i]),
                    RankSide::Both => bucket.extend([self.head_ranks[i], self.tail_ranks[i]]),
                }
            }
            groups
                .into_iter()
                .map(|(r, ranks)| {
                    let (mrr, hits) = summarize(&ranks);
                    (
                        name(r),
                        RelationMetrics {
                            mrr,
                            hits,
                            count: ranks.len(),
                        },
                    )
                })
                .collect()
        });
        MetricsReport {
            mrr,
            hits,
            side,
            count: ranks.len(),
            per_relation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub ablation: AblationConfig,
    pub norm: Norm,
}

/// Check that `params` was built for `dataset`'s vocabulary.
pub fn check_compatible(params: &ModelParams, dataset: &Dataset) -> Result<()> {
    if params.n_entities() != dataset.n_entities() || params.n_relations() != dataset.n_relations() {
        return Err(Error::DimensionMismatch(format!(
            "checkpoint has {} entities and {} relations, dataset has {} entities and {} relations",
            params.n_entities(),
            params.n_relations(),
            dataset.n_entities(),
            dataset.n_relations()
        )));
    }
    Ok(())
}

pub fn rank_split(
    params: &ModelParams,
    dataset: &Dataset,
    split: Split,
    options: EvalOptions,
    workers: &Workers,
) -> Result<Ranking> {
    check_compatible(params, dataset)?;
    let triples = dataset.split(split);
    if triples.is_empty() {
        return Err(Error::Evaluation(format!("{split:?} split is empty")));
    }
    let filter = dataset.filter();
    let ranks = workers.map_ordered(triples, |t| -> Result<(f64, f64)> {
        let head_scores = params.score_candidates(
            Query::Head {
                relation: t.relation,
                tail: t.tail,
            },
            options.ablation,
            options.norm,
        );
        let head = filtered_rank(&head_scores, t.head, filter.heads(t.relation, t.tail))?;
        let tail_scores = params.score_candidates(
            Query::Tail {
                head: t.head,
                relation: t.relation,
            },
            options.ablation,
            options.norm,
        );
        let tail = filtered_rank(&tail_scores, t.tail, filter.tails(t.head, t.relation))?;
        Ok((head, tail))
    });
    let mut head_ranks = Vec::with_capacity(triples.len());
    let mut tail_ranks = Vec::with_capacity(triples.len());
    for r in ranks {
        let (h, t) = r?;
        head_ranks.push(h);
        tail_ranks.push(t);
    }
    Ok(Ranking {
        triples: triples.to_vec(),
        head_ranks,
        tail_ranks,
    })
}

/// Filtered metrics over both query sides of a split.
pub fn evaluate_split(
    params: &ModelParams,
    dataset: &Dataset,
    split: Split,
    options: EvalOptions,
    per_relation: bool,
    workers: &Workers,
) -> Result<MetricsReport> {
    let ranking = rank_split(params, dataset, split, options, workers)?;
    let vocab = dataset.vocab();
    let name = |r: usize| vocab.relation_name(r).to_owned();
    Ok(ranking.report(
        RankSide::Both,
        per_relation.then_some(&name as &dyn Fn(usize) -> String),
    ))
}

impl MetricsReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "scope", "MRR", "H@1", "H@3", "H@10", "count"
        );
        let row = |out: &mut String, label: &str, mrr: f64, h: &Hits, count: usize| {
            let _ = writeln!(
                out,
                "{:<24} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8}",
                label, mrr, h.at1, h.at3, h.at10, count
            );
        };
        let label = format!("all ({:?})", self.side).to_lowercase();
        row(&mut out, &label, self.mrr, &self.hits, self.count);
        if let Some(per) = &self.per_relation {
            for (name, m) in per {
                row(&mut out, name, m.mrr, &m.hits, m.count);
            }
        }
        out
    }
}
