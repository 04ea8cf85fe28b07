//! Triple datasets: TSV loading, vocabularies and the filter index.
//!
//! Files hold one fact per line as `head<TAB>relation<TAB>tail`, UTF-8, no
//! header and no escaping. Ids are assigned by first appearance, scanning
//! `train.txt`, then `valid.txt`, then `test.txt`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPLIT_FILES: [&str; 3] = ["train.txt", "valid.txt", "test.txt"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub const fn new(head: usize, relation: usize, tail: usize) -> Self {
        Triple { head, relation, tail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}` (expected train, valid or test)")),
        }
    }
}

/// Bijective name <-> id table with contiguous ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Interner {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }
}

impl<S: AsRef<str>> FromIterator<S> for Interner {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut interner = Interner::default();
        for name in iter {
            interner.intern(name.as_ref());
        }
        interner
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub entities: Interner,
    pub relations: Interner,
}

impl Vocabulary {
    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn entity_name(&self, id: usize) -> &str {
        self.entities.name(id).unwrap_or("?")
    }

    pub fn relation_name(&self, id: usize) -> &str {
        self.relations.name(id).unwrap_or("?")
    }
}

fn parse_into(path: &Path, text: &str, vocab: &mut Vocabulary, growable: bool) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: path.to_owned(),
                line: line_no,
                found: fields.len(),
            });
        }
        let mut resolve = |name: &str, relation: bool| -> Result<usize> {
            let table = if relation {
                &mut vocab.relations
            } else {
                &mut vocab.entities
            };
            if growable {
                Ok(table.intern(name))
            } else {
                table.id(name).ok_or_else(|| Error::UnknownName {
                    path: path.to_owned(),
                    line: line_no,
                    kind: if relation { "relation" } else { "entity" },
                    name: name.to_owned(),
                })
            }
        };
        let head = resolve(fields[0], false)?;
        let relation = resolve(fields[1], true)?;
        let tail = resolve(fields[2], false)?;
        let triple = Triple::new(head, relation, tail);
        if !seen.insert(triple) {
            return Err(Error::DuplicateTriple {
                path: path.to_owned(),
                line: line_no,
            });
        }
        triples.push(triple);
    }
    Ok(triples)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Load one split file.
///
/// Without a vocabulary, ids are assigned by first appearance in this file.
/// With one, every name must already be present in it.
pub fn load_triples(path: &Path, vocab: Option<&Vocabulary>) -> Result<(Vec<Triple>, Vocabulary)> {
    let text = read_text(path)?;
    match vocab {
        Some(fixed) => {
            let mut vocab = fixed.clone();
            let triples = parse_into(path, &text, &mut vocab, false)?;
            Ok((triples, vocab))
        }
        None => {
            let mut vocab = Vocabulary::default();
            let triples = parse_into(path, &text, &mut vocab, true)?;
            Ok((triples, vocab))
        }
    }
}

pub fn format_triples(triples: &[Triple], vocab: &Vocabulary) -> String {
    let mut out = String::new();
    for t in triples {
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            vocab.entity_name(t.head),
            vocab.relation_name(t.relation),
            vocab.entity_name(t.tail)
        );
    }
    out
}

pub fn write_triples(path: &Path, triples: &[Triple], vocab: &Vocabulary) -> Result<()> {
    fs::write(path, format_triples(triples, vocab)).map_err(|e| Error::io(path, e))
}

/// True-answer sets over a collection of splits.
///
/// Sets are stored as sorted, deduplicated id lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterIndex {
    tails: HashMap<(usize, usize), Vec<usize>>,
    heads: HashMap<(usize, usize), Vec<usize>>,
}

impl FilterIndex {
    pub fn build(splits: &[&[Triple]]) -> Self {
        let mut tails: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut heads: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for split in splits {
            for t in split.iter() {
                tails.entry((t.head, t.relation)).or_default().push(t.tail);
                heads.entry((t.relation, t.tail)).or_default().push(t.head);
            }
        }
        for set in tails.values_mut().chain(heads.values_mut()) {
            set.sort_unstable();
            set.dedup();
        }
        FilterIndex { tails, heads }
    }

    /// All `t` with `(head, relation, t)` indexed.
    pub fn tails(&self, head: usize, relation: usize) -> &[usize] {
        self.tails.get(&(head, relation)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All `h` with `(h, relation, tail)` indexed.
    pub fn heads(&self, relation: usize, tail: usize) -> &[usize] {
        self.heads.get(&(relation, tail)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.tails(triple.head, triple.relation)
            .binary_search(&triple.tail)
            .is_ok()
    }

    /// Number of distinct indexed triples.
    pub fn len(&self) -> usize {
        self.tails.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn tail_keys(&self) -> impl Iterator<Item = (&(usize, usize), &[usize])> {
        self.tails.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn head_keys(&self) -> impl Iterator<Item = (&(usize, usize), &[usize])> {
        self.heads.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

/// A vocabulary with its three splits and the all-splits filter index.
///
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct Dataset {
    vocab: Vocabulary,
    train: Vec<Triple>,
    valid: Vec<Triple>,
    test: Vec<Triple>,
    filter: FilterIndex,
}

impl Dataset {
    pub fn new(vocab: Vocabulary, train: Vec<Triple>, valid: Vec<Triple>, test: Vec<Triple>) -> Result<Self> {
        let (ne, nr) = (vocab.n_entities(), vocab.n_relations());
        for t in train.iter().chain(&valid).chain(&test) {
            if t.head >= ne || t.tail >= ne || t.relation >= nr {
                return Err(Error::InvalidTriple {
                    head: t.head,
                    relation: t.relation,
                    tail: t.tail,
                    n_entities: ne,
                    n_relations: nr,
                });
            }
        }
        let filter = FilterIndex::build(&[&train, &valid, &test]);
        Ok(Dataset {
            vocab,
            train,
            valid,
            test,
            filter,
        })
    }

    /// Build from named splits, assigning ids by first appearance.
    pub fn from_named<S: AsRef<str>>(splits: [&[(S, S, S)]; 3]) -> Result<Self> {
        let mut vocab = Vocabulary::default();
        let mut coded: [Vec<Triple>; 3] = Default::default();
        for (out, split) in coded.iter_mut().zip(splits) {
            let mut seen = HashSet::new();
            for (line, (h, r, t)) in split.iter().enumerate() {
                let triple = Triple::new(
                    vocab.entities.intern(h.as_ref()),
                    vocab.relations.intern(r.as_ref()),
                    vocab.entities.intern(t.as_ref()),
                );
                if !seen.insert(triple) {
                    return Err(Error::DuplicateTriple {
                        path: PathBuf::from("<memory>"),
                        line: line + 1,
                    });
                }
                out.push(triple);
            }
        }
        let [train, valid, test] = coded;
        Dataset::new(vocab, train, valid, test)
    }

    /// Load `train.txt`, `valid.txt` and `test.txt` from a directory.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut vocab = Vocabulary::default();
        let mut splits: [Vec<Triple>; 3] = Default::default();
        for (out, name) in splits.iter_mut().zip(SPLIT_FILES) {
            let path = dir.join(name);
            let text = read_text(&path)?;
            *out = parse_into(&path, &text, &mut vocab, true)?;
        }
        let [train, valid, test] = splits;
        Dataset::new(vocab, train, valid, test)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, split) in SPLIT_FILES.iter().zip([&self.train, &self.valid, &self.test]) {
            write_triples(&dir.join(name), split, &self.vocab)?;
        }
        Ok(())
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn n_entities(&self) -> usize {
        self.vocab.n_entities()
    }

    pub fn n_relations(&self) -> usize {
        self.vocab.n_relations()
    }

    pub fn train(&self) -> &[Triple] {
        &self.train
    }

    pub fn valid(&self) -> &[Triple] {
        &self.valid
    }

    pub fn test(&self) -> &[Triple] {
        &self.test
    }

    pub fn split(&self, split: Split) -> &[Triple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    pub fn filter(&self) -> &FilterIndex {
        &self.filter
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_file_gives_empty_vocab() {
        let f = temp_file("");
        let (triples, vocab) = load_triples(f.path(), None).unwrap();
        assert!(triples.is_empty());
        assert_eq!(vocab.n_entities(), 0);
        assert_eq!(vocab.n_relations(), 0);
    }

    #[test]
    fn two_field_line_is_a_parse_error_on_line_one() {
        let f = temp_file("a\tb\n");
        match load_triples(f.path(), None) {
            Err(Error::Parse { line, found, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(found, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ids_follow_first_appearance() {
        let f = temp_file("x\tr\ty\ny\ts\tz\n");
        let (triples, vocab) = load_triples(f.path(), None).unwrap();
        assert_eq!(triples, vec![Triple::new(0, 0, 1), Triple::new(1, 1, 2)]);
        assert_eq!(vocab.entities.names(), ["x", "y", "z"]);
        assert_eq!(vocab.relations.names(), ["r", "s"]);
    }

    #[test]
    fn fixed_vocab_rejects_unknown_names() {
        let f = temp_file("x\tr\ty\n");
        let (_, vocab) = load_triples(f.path(), None).unwrap();
        let g = temp_file("x\tr\tq\n");
        match load_triples(g.path(), Some(&vocab)) {
            Err(Error::UnknownName { name, kind, .. }) => {
                assert_eq!(name, "q");
                assert_eq!(kind, "entity");
            }
            other => panic!("expected lookup error, got {other:?}"),
        }
        let h = temp_file("y\tr\tx\n");
        let (triples, same) = load_triples(h.path(), Some(&vocab)).unwrap();
        assert_eq!(triples, vec![Triple::new(1, 0, 0)]);
        assert_eq!(same, vocab);
    }

    #[test]
    fn duplicate_within_split_is_rejected() {
        let f = temp_file("x\tr\ty\nx\tr\ty\n");
        assert!(matches!(
            load_triples(f.path(), None),
            Err(Error::DuplicateTriple { line: 2, .. })
        ));
    }

    #[test]
    fn filter_index_small_example() {
        let split = [Triple::new(0, 0, 1), Triple::new(0, 0, 2)];
        let index = FilterIndex::build(&[&split]);
        assert_eq!(index.tails(0, 0), &[1, 2]);
        assert_eq!(index.heads(0, 1), &[0]);
        assert_eq!(index.heads(0, 2), &[0]);
        assert_eq!(index.len(), 2);
    }

    #[test]
    fn duplicates_across_splits_appear_once() {
        let a = [Triple::new(0, 0, 1)];
        let b = [Triple::new(0, 0, 1), Triple::new(1, 0, 0)];
        let index = FilterIndex::build(&[&a, &b]);
        assert_eq!(index.tails(0, 0), &[1]);
        assert_eq!(index.len(), 2);
    }

    #[test]
    fn dataset_rejects_out_of_range_ids() {
        let vocab = Vocabulary {
            entities: ["a", "b"].into_iter().collect(),
            relations: ["r"].into_iter().collect(),
        };
        let err = Dataset::new(vocab, vec![Triple::new(0, 1, 1)], vec![], vec![]);
        assert!(matches!(err, Err(Error::InvalidTriple { .. })));
    }

    #[test]
    fn vocab_order_spans_train_valid_test() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("train.txt"), "a\tr\tb\n").unwrap();
        fs::write(dir.path().join("valid.txt"), "c\ts\ta\n").unwrap();
        fs::write(dir.path().join("test.txt"), "d\tr\tc\n").unwrap();
        let ds = Dataset::load_dir(dir.path()).unwrap();
        assert_eq!(ds.vocab().entities.names(), ["a", "b", "c", "d"]);
        assert_eq!(ds.vocab().relations.names(), ["r", "s"]);
        assert_eq!(ds.test(), &[Triple::new(3, 0, 2)]);
        assert!(ds.filter().contains(&Triple::new(2, 1, 0)));
    }
}
