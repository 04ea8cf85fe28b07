//! Small knowledge graphs built around a single relation pattern.
//!
//! A generator draws `n_facts` distinct unordered entity pairs `{a, b}` from
//! entities `e0 .. e{n-1}`, orients each with a fair coin, and lays down
//! facts so that a fraction of rule conclusions are withheld from training.
//! The withheld conclusions alternate between test (even positions) and
//! valid (odd positions). Every withheld triple follows from the training
//! split by one application of the pattern's rules, listed in [`rules`].
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64(seed)`:
//! pairs are drawn by rejection (`gen_range` for each endpoint, then one
//! `gen_bool(0.5)` for the orientation), then the eligible pair indices are
//! shuffled with `SliceRandom::shuffle` and the first
//! `round(holdout * eligible)` of them are withheld.
//!
//! Relation names per pattern:
//!
//! | pattern          | relations                                        |
//! |------------------|--------------------------------------------------|
//! | symmetry         | `sym`                                            |
//! | inversion        | `fwd`, `inv`                                     |
//! | subsumption      | `sub`, `sup`                                     |
//! | intersection     | `left`, `right`, `both`                          |
//! | anti-symmetry    | `anti`, `anti_inv`                               |
//! | mutual-exclusion | `excl_a`, `excl_b`, `excl_a_inv`, `excl_b_inv`   |
//!
//! Anti-symmetry and mutual exclusion forbid facts rather than imply them,
//! so their withheld triples come from companion inverse relations, and the
//! forbidden triples are listed separately in `false.txt`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::{format_triples, Dataset, Triple, Vocabulary};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    Symmetry,
    AntiSymmetry,
    Inversion,
    Subsumption,
    Intersection,
    MutualExclusion,
}

impl Pattern {
    pub const ALL: [Pattern; 6] = [
        Pattern::Symmetry,
        Pattern::AntiSymmetry,
        Pattern::Inversion,
        Pattern::Subsumption,
        Pattern::Intersection,
        Pattern::MutualExclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Symmetry => "symmetry",
            Pattern::AntiSymmetry => "anti-symmetry",
            Pattern::Inversion => "inversion",
            Pattern::Subsumption => "subsumption",
            Pattern::Intersection => "intersection",
            Pattern::MutualExclusion => "mutual-exclusion",
        }
    }

    /// Number of relations the region condition talks about.
    pub fn arity(self) -> usize {
        match self {
            Pattern::Symmetry | Pattern::AntiSymmetry => 1,
            Pattern::Inversion | Pattern::Subsumption | Pattern::MutualExclusion => 2,
            Pattern::Intersection => 3,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Pattern::ALL.iter().map(|p| p.name()).collect();
            Error::Config(format!("unknown pattern `{s}`, expected one of {}", names.join(", ")))
        })
    }
}

/// Horn rules `body ⇒ head` over relation names, with `Swap` meaning the
/// conclusion has head and tail exchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Swap {
        from: &'static str,
        to: &'static str,
    },
    Same {
        from: &'static str,
        to: &'static str,
    },
    Both {
        left: &'static str,
        right: &'static str,
        to: &'static str,
    },
}

pub fn rules(pattern: Pattern) -> &'static [Rule] {
    match pattern {
        Pattern::Symmetry => &[Rule::Swap { from: "sym", to: "sym" }],
        Pattern::Inversion => &[Rule::Swap { from: "fwd", to: "inv" }],
        Pattern::Subsumption => &[Rule::Same { from: "sub", to: "sup" }],
        Pattern::Intersection => &[Rule::Both {
            left: "left",
            right: "right",
            to: "both",
        }],
        Pattern::AntiSymmetry => &[Rule::Swap {
            from: "anti",
            to: "anti_inv",
        }],
        Pattern::MutualExclusion => &[
            Rule::Swap {
                from: "excl_a",
                to: "excl_a_inv",
            },
            Rule::Swap {
                from: "excl_b",
                to: "excl_b_inv",
            },
        ],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpec {
    pub pattern: Pattern,
    pub n_entities: usize,
    pub n_facts: usize,
    pub holdout: f64,
    pub seed: u64,
}

/// A generated graph with its contrast triples.
#[derive(Debug, Clone)]
pub struct PatternKg {
    pub spec: PatternSpec,
    pub dataset: Dataset,
    /// Triples the pattern forbids (anti-symmetry and mutual exclusion only).
    pub false_triples: Vec<Triple>,
}

type Named = (String, String, String);

fn named(rel: &str, a: usize, b: usize) -> Named {
    (format!("e{a}"), rel.to_owned(), format!("e{b}"))
}

fn draw_pairs(spec: &PatternSpec, rng: &mut rng::Rng) -> Result<Vec<(usize, usize)>> {
    let n = spec.n_entities;
    let capacity = n * (n - 1) / 2;
    if spec.n_facts > capacity {
        return Err(Error::Generation(format!(
            "{} facts requested but {n} entities only have {capacity} distinct pairs",
            spec.n_facts
        )));
    }
    let mut seen = HashSet::with_capacity(spec.n_facts);
    let mut pairs = Vec::with_capacity(spec.n_facts);
    while pairs.len() < spec.n_facts {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        pairs.push(if rng.gen_bool(0.5) { (a, b) } else { (b, a) });
    }
    Ok(pairs)
}

/// Pick the withheld subset of `0..eligible`, returned sorted.
fn withheld(eligible: usize, holdout: f64, rng: &mut rng::Rng) -> Result<Vec<usize>> {
    let k = (holdout * eligible as f64).round() as usize;
    if k < 2 {
        return Err(Error::Generation(format!(
            "holdout {holdout} of {eligible} eligible facts withholds {k}; need at least 2 for valid and test"
        )));
    }
    let mut order: Vec<usize> = (0..eligible).collect();
    order.shuffle(rng);
    let mut picked = order[..k].to_vec();
    picked.sort_unstable();
    Ok(picked)
}

struct Builder {
    train: Vec<Named>,
    held: Vec<Named>,
    false_triples: Vec<Named>,
}

pub fn generate_pattern_kg(spec: &PatternSpec) -> Result<PatternKg> {
    if spec.n_entities < 4 {
        return Err(Error::Generation(format!(
            "need at least 4 entities, got {}",
            spec.n_entities
        )));
    }
    if !(spec.holdout > 0.0 && spec.holdout < 1.0) {
        return Err(Error::Generation(format!(
            "holdout must lie in (0, 1), got {}",
            spec.holdout
        )));
    }
    let mut rng = rng::seeded(spec.seed);
    let pairs = draw_pairs(spec, &mut rng)?;
    let mut out = Builder {
        train: Vec::new(),
        held: Vec::new(),
        false_triples: Vec::new(),
    };

    // from(a, b) always trains; some swapped conclusions to(b, a) are withheld
    let swap_rule =
        |out: &mut Builder, from: &str, to: &str, subset: &[(usize, usize)], rng: &mut rng::Rng| -> Result<()> {
            for &(a, b) in subset {
                out.train.push(named(from, a, b));
            }
            let held: HashSet<usize> = withheld(subset.len(), spec.holdout, rng)?.into_iter().collect();
            for (i, &(a, b)) in subset.iter().enumerate() {
                let t = named(to, b, a);
                if held.contains(&i) {
                    out.held.push(t);
                } else {
                    out.train.push(t);
                }
            }
            Ok(())
        };

    match spec.pattern {
        Pattern::Symmetry => {
            let held: HashSet<usize> = withheld(pairs.len(), spec.holdout, &mut rng)?.into_iter().collect();
            for (i, &(a, b)) in pairs.iter().enumerate() {
                out.train.push(named("sym", a, b));
                let reverse = named("sym", b, a);
                if held.contains(&i) {
                    out.held.push(reverse);
                } else {
                    out.train.push(reverse);
                }
            }
        }
        Pattern::Inversion => swap_rule(&mut out, "fwd", "inv", &pairs, &mut rng)?,
        Pattern::AntiSymmetry => {
            swap_rule(&mut out, "anti", "anti_inv", &pairs, &mut rng)?;
            out.false_triples = pairs.iter().map(|&(a, b)| named("anti", b, a)).collect();
        }
        Pattern::MutualExclusion => {
            let (first, second) = pairs.split_at(pairs.len() / 2);
            swap_rule(&mut out, "excl_a", "excl_a_inv", first, &mut rng)?;
            swap_rule(&mut out, "excl_b", "excl_b_inv", second, &mut rng)?;
            out.false_triples = first
                .iter()
                .map(|&(a, b)| named("excl_b", a, b))
                .chain(second.iter().map(|&(a, b)| named("excl_a", a, b)))
                .collect();
        }
        Pattern::Subsumption => {
            let core = pairs.len() * 3 / 4;
            let held: HashSet<usize> = withheld(core, spec.holdout, &mut rng)?.into_iter().collect();
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if i < core {
                    out.train.push(named("sub", a, b));
                    if held.contains(&i) {
                        out.held.push(named("sup", a, b));
                        continue;
                    }
                }
                out.train.push(named("sup", a, b));
            }
        }
        Pattern::Intersection => {
            let core = pairs.len() / 2;
            let left_only = core + pairs.len() / 4;
            let held: HashSet<usize> = withheld(core, spec.holdout, &mut rng)?.into_iter().collect();
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if i < core {
                    out.train.push(named("left", a, b));
                    out.train.push(named("right", a, b));
                    let t = named("both", a, b);
                    if held.contains(&i) {
                        out.held.push(t);
                    } else {
                        out.train.push(t);
                    }
                } else if i < left_only {
                    out.train.push(named("left", a, b));
                } else {
                    out.train.push(named("right", a, b));
                }
            }
        }
    }

    let mut test = Vec::new();
    let mut valid = Vec::new();
    for (i, t) in out.held.into_iter().enumerate() {
        if i % 2 == 0 {
            test.push(t);
        } else {
            valid.push(t);
        }
    }
    let dataset = Dataset::from_named([&out.train, &valid, &test])?;
    let vocab = dataset.vocab();
    let false_triples =
        out.false_triples
            .iter()
            .map(|(h, r, t)| {
                let lookup = |name: &str| vocab.entities.id(name).expect("false triples reuse generated entities");
                let rel = vocab.relations.id(r).ok_or_else(|| {
                    Error::Generation(format!("relation `{r}` has no training facts; increase n_facts"))
                })?;
                Ok(Triple::new(lookup(h), rel, lookup(t)))
            })
            .collect::<Result<Vec<_>>>()?;
    Ok(PatternKg {
        spec: spec.clone(),
        dataset,
        false_triples,
    })
}

/// Whether `triple` follows from `train` by one rule application.
pub fn entailed(pattern: Pattern, train: &HashSet<Triple>, vocab: &Vocabulary, triple: &Triple) -> bool {
    let rel = |name: &str| vocab.relations.id(name);
    let has = |r: Option<usize>, h: usize, t: usize| r.is_some_and(|r| train.contains(&Triple::new(h, r, t)));
    rules(pattern).iter().any(|rule| match *rule {
        Rule::Swap { from, to } => rel(to) == Some(triple.relation) && has(rel(from), triple.tail, triple.head),
        Rule::Same { from, to } => rel(to) == Some(triple.relation) && has(rel(from), triple.head, triple.tail),
        Rule::Both { left, right, to } => {
            rel(to) == Some(triple.relation)
                && has(rel(left), triple.head, triple.tail)
                && has(rel(right), triple.head, triple.tail)
        }
    })
}

/// Check that every valid and test triple is entailed by the training split.
pub fn verify_entailment(pattern: Pattern, dataset: &Dataset) -> Result<()> {
    let train: HashSet<Triple> = dataset.train().iter().copied().collect();
    for t in dataset.valid().iter().chain(dataset.test()) {
        if !entailed(pattern, &train, dataset.vocab(), t) {
            let v = dataset.vocab();
            return Err(Error::Generation(format!(
                "{}({}, {}) is not entailed under {pattern}",
                v.relation_name(t.relation),
                v.entity_name(t.head),
                v.entity_name(t.tail)
            )));
        }
    }
    Ok(())
}

impl PatternKg {
    pub fn manifest(&self) -> String {
        let d = &self.dataset;
        format!(
            "pattern={}\nseed={}\nn_entities={}\nn_facts={}\nholdout={}\nrng=ChaCha8Rng/seed_from_u64\n\
             entities={}\nrelations={}\ntrain={}\nvalid={}\ntest={}\nfalse={}\n",
            self.spec.pattern,
            self.spec.seed,
            self.spec.n_entities,
            self.spec.n_facts,
            self.spec.holdout,
            d.n_entities(),
            d.n_relations(),
            d.train().len(),
            d.valid().len(),
            d.test().len(),
            self.false_triples.len(),
        )
    }

    /// Write the three splits, `manifest.txt`, and `false.txt` when the
    /// pattern forbids triples.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        self.dataset.write_dir(dir)?;
        let manifest = dir.join("manifest.txt");
        fs::write(&manifest, self.manifest()).map_err(|e| Error::io(&manifest, e))?;
        if !self.false_triples.is_empty() {
            let path = dir.join("false.txt");
            fs::write(&path, format_triples(&self.false_triples, self.dataset.vocab()))
                .map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(pattern: Pattern) -> PatternSpec {
        PatternSpec {
            pattern,
            n_entities: 100,
            n_facts: 200,
            holdout: 0.2,
            seed: 7,
        }
    }

    #[test]
    fn every_pattern_entails_its_holdout() {
        for p in Pattern::ALL {
            let kg = generate_pattern_kg(&spec(p)).unwrap();
            assert!(!kg.dataset.test().is_empty(), "{p}");
            assert!(!kg.dataset.valid().is_empty(), "{p}");
            verify_entailment(p, &kg.dataset).unwrap();
            let has_false = matches!(p, Pattern::AntiSymmetry | Pattern::MutualExclusion);
            assert_eq!(!kg.false_triples.is_empty(), has_false, "{p}");
        }
    }

    #[test]
    fn symmetry_test_reverses_train() {
        let kg = generate_pattern_kg(&spec(Pattern::Symmetry)).unwrap();
        let ds = &kg.dataset;
        let train: HashSet<_> = ds.train().iter().copied().collect();
        for t in ds.test() {
            assert!(train.contains(&Triple::new(t.tail, t.relation, t.head)));
            assert!(!train.contains(t));
        }
        assert_eq!(ds.test().len() + ds.valid().len(), 40);
        assert_eq!(ds.train().len(), 360);
    }

    #[test]
    fn inversion_uses_two_relations() {
        let kg = generate_pattern_kg(&spec(Pattern::Inversion)).unwrap();
        let v = kg.dataset.vocab();
        assert_eq!(v.n_relations(), 2);
        let inv = v.relations.id("inv").unwrap();
        assert!(kg.dataset.test().iter().all(|t| t.relation == inv));
    }

    #[test]
    fn false_triples_are_absent_and_not_entailed() {
        for p in [Pattern::AntiSymmetry, Pattern::MutualExclusion] {
            let kg = generate_pattern_kg(&spec(p)).unwrap();
            let f = kg.dataset.filter();
            for t in &kg.false_triples {
                assert!(!f.contains(t), "{p}: {t:?}");
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_pattern_kg(&spec(Pattern::Intersection)).unwrap();
        let b = generate_pattern_kg(&spec(Pattern::Intersection)).unwrap();
        assert_eq!(a.dataset.train(), b.dataset.train());
        assert_eq!(a.dataset.test(), b.dataset.test());
        let mut other = spec(Pattern::Intersection);
        other.seed = 8;
        let c = generate_pattern_kg(&other).unwrap();
        assert_ne!(a.dataset.train(), c.dataset.train());
    }

    #[test]
    fn too_many_facts() {
        let s = PatternSpec {
            n_entities: 4,
            n_facts: 7,
            ..spec(Pattern::Symmetry)
        };
        assert!(matches!(generate_pattern_kg(&s), Err(Error::Generation(_))));
        let s = PatternSpec {
            n_entities: 4,
            n_facts: 6,
            holdout: 0.5,
            ..spec(Pattern::Symmetry)
        };
        assert!(generate_pattern_kg(&s).is_ok());
    }

    #[test]
    fn bad_arguments() {
        let s = PatternSpec {
            n_entities: 3,
            n_facts: 1,
            ..spec(Pattern::Symmetry)
        };
        assert!(generate_pattern_kg(&s).is_err());
        let s = PatternSpec {
            holdout: 1.0,
            ..spec(Pattern::Symmetry)
        };
        assert!(generate_pattern_kg(&s).is_err());
        assert!("sym".parse::<Pattern>().is_err());
        assert_eq!("mutual-exclusion".parse::<Pattern>().unwrap(), Pattern::MutualExclusion);
    }

    #[test]
    fn directory_round_trip() {
        let kg = generate_pattern_kg(&spec(Pattern::MutualExclusion)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        kg.write_dir(dir.path()).unwrap();
        let back = Dataset::load_dir(dir.path()).unwrap();
        assert_eq!(back.train(), kg.dataset.train());
        assert_eq!(back.valid(), kg.dataset.valid());
        assert_eq!(back.test(), kg.dataset.test());
        let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert!(manifest.starts_with("pattern=mutual-exclusion\nseed=7\n"));
        assert!(dir.path().join("false.txt").exists());
    }
}
