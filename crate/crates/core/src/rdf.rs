//! RDF triple-pattern frontend.
//!
//! Subjects and objects share one dictionary so the index is a square
//! `|SO| × |P| × |SO|` relation with predicates as the partitioning dimension.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::format::{self, IndexMode};
use crate::ik2tree::{Constraint, IK2Tree, Strategy, Triple, TriplePattern};
use crate::schedule::LevelSchedule;

/// Default `|P|` from which multi-branch unbounded-predicate patterns go lazy.
pub const DEFAULT_LAZY_THRESHOLD: u32 = 512;

/// Sorted, duplicate-free terms; a term's id is its rank.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    terms: Vec<String>,
}

impl Dictionary {
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut terms: Vec<String> = terms.into_iter().map(Into::into).collect();
        terms.sort_unstable();
        terms.dedup();
        Dictionary { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.terms
            .binary_search_by(|t| t.as_str().cmp(term))
            .ok()
            .map(|i| i as u32)
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// One term per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(t);
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let terms: Vec<String> = text.lines().map(str::to_owned).collect();
        if let Some(w) = terms.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::format(format!(
                "dictionary not strictly sorted at {:?}",
                w[1]
            )));
        }
        Ok(Dictionary { terms })
    }
}

/// A triple pattern over terms; `None` is an unbound (`?`) slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RdfPattern {
    pub s: Option<String>,
    pub p: Option<String>,
    pub o: Option<String>,
}

impl RdfPattern {
    /// Parses three whitespace-separated slots, `?` (optionally followed by a
    /// variable name) being unbound.
    pub fn parse(text: &str) -> Result<Self> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::input(format!(
                "pattern needs 3 slots, found {}",
                toks.len()
            )));
        }
        Ok(Self::from_slots(toks[0], toks[1], toks[2]))
    }

    pub fn from_slots(s: &str, p: &str, o: &str) -> Self {
        let slot = |t: &str| (!t.starts_with('?')).then(|| t.to_owned());
        RdfPattern {
            s: slot(s),
            p: slot(p),
            o: slot(o),
        }
    }

    /// Shape such as `(S,?,O)`.
    pub fn shape(&self) -> String {
        format!(
            "({},{},{})",
            if self.s.is_some() { "S" } else { "?" },
            if self.p.is_some() { "P" } else { "?" },
            if self.o.is_some() { "O" } else { "?" }
        )
    }
}

/// Strategy request; `Lazy` on a bound predicate falls back to eager since the
/// lazy traversal is defined only for unbounded partition values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StrategyChoice {
    #[default]
    Auto,
    Eager,
    Lazy,
}

/// Lazy only for an unbound predicate whose pattern expands several branches
/// (subject or object unbound) over a large predicate set.
pub fn choose_strategy(pattern: &RdfPattern, ysize: u32, threshold: u32) -> Strategy {
    let multi_branch = pattern.s.is_none() || pattern.o.is_none();
    if pattern.p.is_none() && multi_branch && ysize >= threshold {
        Strategy::Lazy
    } else {
        Strategy::Eager
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfDataset {
    so: Dictionary,
    p: Dictionary,
    index: IK2Tree,
    lazy_threshold: u32,
}

impl RdfDataset {
    /// Parses and indexes triple text with the default schedule.
    pub fn ingest(text: &str) -> Result<Self> {
        Self::from_terms(&parse_triples(text)?, None)
    }

    /// `ks`: branching factors for the top levels, the last one repeated as
    /// needed; `None` uses the hybrid K=4/K=2 schedule.
    pub fn from_terms<S: AsRef<str>>(triples: &[[S; 3]], ks: Option<&[u32]>) -> Result<Self> {
        let so = Dictionary::from_terms(
            triples
                .iter()
                .flat_map(|[s, _, o]| [s.as_ref(), o.as_ref()]),
        );
        let p = Dictionary::from_terms(triples.iter().map(|[_, p, _]| p.as_ref()));
        let ids: Vec<Triple> = triples
            .iter()
            .map(|[s, pr, o]| {
                Triple::new(
                    so.id(s.as_ref()).unwrap(),
                    p.id(pr.as_ref()).unwrap(),
                    so.id(o.as_ref()).unwrap(),
                )
            })
            .collect();
        let n = so.len() as u32;
        let schedule = match ks {
            Some(ks) => LevelSchedule::extend(ks, n as u64)?,
            None => LevelSchedule::hybrid(n as u64)?,
        };
        let index = IK2Tree::build(&ids, n, p.len() as u32, n, schedule, false)?;
        Self::from_parts(so, p, index)
    }

    pub fn from_parts(so: Dictionary, p: Dictionary, index: IK2Tree) -> Result<Self> {
        if index.nx() as usize != so.len() || index.nz() as usize != so.len() {
            return Err(Error::format("subject/object dictionary size mismatch"));
        }
        if index.ysize() as usize != p.len() {
            return Err(Error::format("predicate dictionary size mismatch"));
        }
        Ok(RdfDataset {
            so,
            p,
            index,
            lazy_threshold: DEFAULT_LAZY_THRESHOLD,
        })
    }

    pub fn with_lazy_threshold(mut self, threshold: u32) -> Self {
        self.lazy_threshold = threshold;
        self
    }

    pub fn so_dict(&self) -> &Dictionary {
        &self.so
    }

    pub fn p_dict(&self) -> &Dictionary {
        &self.p
    }

    pub fn index(&self) -> &IK2Tree {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn choose_strategy(&self, pattern: &RdfPattern) -> Strategy {
        choose_strategy(pattern, self.index.ysize(), self.lazy_threshold)
    }

    /// Id-level pattern, or `None` when a bound term is not in the dictionaries.
    pub fn encode(&self, pattern: &RdfPattern) -> Option<TriplePattern> {
        let slot = |term: &Option<String>, dict: &Dictionary| match term {
            None => Some(Constraint::Any),
            Some(t) => dict.id(t).map(Constraint::Fixed),
        };
        Some(TriplePattern::new(
            slot(&pattern.s, &self.so)?,
            slot(&pattern.p, &self.p)?,
            slot(&pattern.o, &self.so)?,
        ))
    }

    /// Matching id triples sorted `(s, p, o)`, plus the strategy used.
    pub fn evaluate_ids(
        &self,
        pattern: &RdfPattern,
        choice: StrategyChoice,
    ) -> Result<(Vec<Triple>, Strategy)> {
        let bound_p = pattern.p.is_some();
        let strategy = match choice {
            StrategyChoice::Auto => self.choose_strategy(pattern),
            StrategyChoice::Lazy if !bound_p => Strategy::Lazy,
            _ => Strategy::Eager,
        };
        let Some(ids) = self.encode(pattern) else {
            return Ok((Vec::new(), strategy));
        };
        let mut out = self.index.query(&ids, strategy)?;
        out.sort_unstable();
        Ok((out, strategy))
    }

    /// Matching term triples sorted by `(s, p, o)` term order.
    pub fn evaluate(
        &self,
        pattern: &RdfPattern,
        choice: StrategyChoice,
    ) -> Result<Vec<[&str; 3]>> {
        let (ids, _) = self.evaluate_ids(pattern, choice)?;
        Ok(ids.iter().map(|t| self.decode(t)).collect())
    }

    pub fn decode(&self, t: &Triple) -> [&str; 3] {
        [
            self.so.term(t.x).expect("subject id in dictionary"),
            self.p.term(t.y).expect("predicate id in dictionary"),
            self.so.term(t.z).expect("object id in dictionary"),
        ]
    }

    /// Index bytes (mode `Rdf`) and both dictionaries as text.
    pub fn to_files(&self) -> (Vec<u8>, String, String) {
        (
            format::encode(IndexMode::Rdf, &self.index),
            self.so.to_text(),
            self.p.to_text(),
        )
    }

    pub fn from_files(index: &[u8], so_text: &str, p_text: &str) -> Result<Self> {
        let (mode, tree) = format::decode(index)?;
        if mode != IndexMode::Rdf {
            return Err(Error::format(format!("expected an RDF index, found {mode:?}")));
        }
        Self::from_parts(Dictionary::from_text(so_text)?, Dictionary::from_text(p_text)?, tree)
    }

    /// Writes `path` plus `path.so.dict` and `path.p.dict`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let (idx, so, p) = self.to_files();
        fs::write(path, idx)?;
        fs::write(dict_path(path, "so"), so)?;
        fs::write(dict_path(path, "p"), p)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let idx = fs::read(path)?;
        let so = fs::read_to_string(dict_path(path, "so"))?;
        let p = fs::read_to_string(dict_path(path, "p"))?;
        Self::from_files(&idx, &so, &p)
    }
}

/// Dictionary file stored next to an index file.
pub fn dict_path(index: &Path, which: &str) -> PathBuf {
    let mut name = index.as_os_str().to_owned();
    name.push(format!(".{which}.dict"));
    PathBuf::from(name)
}

/// One triple per line as three whitespace-separated tokens. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_triples(text: &str) -> Result<Vec<[String; 3]>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 3 terms, found {}", toks.len()),
            });
        }
        out.push([toks[0].to_owned(), toks[1].to_owned(), toks[2].to_owned()]);
    }
    Ok(out)
}
