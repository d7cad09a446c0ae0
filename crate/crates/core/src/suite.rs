//! Benchmark suites comparing the interleaved tree with the multiple-k²-tree
//! baselines. Each query class runs a fixed, seeded query set per backend.

use std::fmt;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::baseline::{DifferentialK2Trees, MultiK2Tree};
use crate::error::Result;
use crate::ik2tree::{Constraint, IK2Tree, Strategy, Triple, TriplePattern};
use crate::rdf::{choose_strategy, RdfPattern, DEFAULT_LAZY_THRESHOLD};
use crate::schedule::LevelSchedule;
use crate::temporal::{ChangeRecord, TemporalIndex, TimeQuery};

pub const MIN_QUERIES_PER_CLASS: usize = 500;

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub query_class: String,
    pub backend: &'static str,
    pub queries: usize,
    pub results: usize,
    pub elapsed: Duration,
}

impl BenchRow {
    pub fn us_per_query(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e6 / self.queries.max(1) as f64
    }

    /// `None` when the class produced no results.
    pub fn us_per_result(&self) -> Option<f64> {
        (self.results > 0).then(|| self.elapsed.as_secs_f64() * 1e6 / self.results as f64)
    }

    pub const CSV_HEADER: &'static str = "query_class,backend,queries,results,us_per_query,us_per_result";
}

impl fmt::Display for BenchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = if self.query_class.contains(',') {
            format!("\"{}\"", self.query_class)
        } else {
            self.query_class.clone()
        };
        write!(
            f,
            "{},{},{},{},{:.4},",
            class,
            self.backend,
            self.queries,
            self.results,
            self.us_per_query()
        )?;
        match self.us_per_result() {
            Some(v) => write!(f, "{v:.4}"),
            None => Ok(()),
        }
    }
}

/// Runs `f` over every query, returning the wall time and total result count.
pub fn time_queries<Q, F>(queries: &[Q], mut f: F) -> (Duration, usize)
where
    F: FnMut(&Q) -> usize,
{
    let start = Instant::now();
    let mut results = 0;
    for q in queries {
        results += black_box(f(black_box(q)));
    }
    (start.elapsed(), results)
}

/// The seven bound/unbound shapes over `(S, P, O)`; the all-unbound scan is
/// not a per-query workload and is left out.
pub const RDF_SHAPES: [&str; 7] = [
    "(S,P,O)", "(S,P,?)", "(S,?,O)", "(S,?,?)", "(?,P,O)", "(?,P,?)", "(?,?,O)",
];

/// Patterns of one shape instantiated from randomly chosen stored triples,
/// so every query has at least one result.
pub fn rdf_queries(triples: &[Triple], shape: &str, n: usize, seed: u64) -> Vec<TriplePattern> {
    let mut rng = StdRng::seed_from_u64(seed);
    let b: Vec<bool> = shape.chars().filter(|c| matches!(c, 'S' | 'P' | 'O' | '?')).map(|c| c != '?').collect();
    assert_eq!(b.len(), 3, "bad shape {shape}");
    if triples.is_empty() {
        return Vec::new();
    }
    let slot = |bound: bool, v: u32| if bound { Constraint::Fixed(v) } else { Constraint::Any };
    (0..n)
        .map(|_| {
            let t = triples[rng.gen_range(0..triples.len())];
            TriplePattern::new(slot(b[0], t.x), slot(b[1], t.y), slot(b[2], t.z))
        })
        .collect()
}

/// Strategy the RDF layer would pick for an id-level pattern.
pub fn auto_strategy(p: &TriplePattern, ysize: u32) -> Strategy {
    let slot = |c: Constraint| match c {
        Constraint::Any => "?",
        _ => "b",
    };
    let rp = RdfPattern::from_slots(slot(p.x), slot(p.y), slot(p.z));
    choose_strategy(&rp, ysize, DEFAULT_LAZY_THRESHOLD)
}

pub struct RdfBackends {
    pub ik2: IK2Tree,
    pub multi: MultiK2Tree,
}

impl RdfBackends {
    pub fn build(triples: &[Triple], n_nodes: u32, n_preds: u32) -> Result<Self> {
        let sched = LevelSchedule::hybrid(n_nodes as u64)?;
        Ok(RdfBackends {
            ik2: IK2Tree::build(triples, n_nodes, n_preds, n_nodes, sched.clone(), false)?,
            multi: MultiK2Tree::build(triples, n_nodes, n_preds, n_nodes, sched)?,
        })
    }
}

/// One row per (shape × backend).
pub fn run_rdf_suite(
    triples: &[Triple],
    backends: &RdfBackends,
    queries_per_class: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    let ysize = backends.ik2.ysize();
    let mut rows = Vec::new();
    for (i, shape) in RDF_SHAPES.iter().enumerate() {
        let qs = rdf_queries(triples, shape, queries_per_class, seed.wrapping_add(i as u64));
        let (el, res) = time_queries(&qs, |p| {
            backends.ik2.query(p, auto_strategy(p, ysize)).map(|v| v.len()).unwrap_or(0)
        });
        rows.push(BenchRow { query_class: shape.to_string(), backend: "ik2tree", queries: qs.len(), results: res, elapsed: el });
        let (el, res) = time_queries(&qs, |p| backends.multi.query(p).map(|v| v.len()).unwrap_or(0));
        rows.push(BenchRow { query_class: shape.to_string(), backend: "mk2tree", queries: qs.len(), results: res, elapsed: el });
    }
    Ok(rows)
}

/// A temporal neighbour query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalQuery {
    pub x: Constraint,
    pub z: Constraint,
    pub when: TimeQuery,
}

pub const TEMPORAL_CLASSES: [&str; 6] = [
    "direct-instant",
    "direct-weak",
    "direct-strong",
    "reverse-instant",
    "reverse-weak",
    "reverse-strong",
];

/// Random neighbour queries of one class; intervals span at most
/// `max_interval` instants.
pub fn temporal_queries(
    class: &str,
    n_nodes: u32,
    n_instants: u32,
    max_interval: u32,
    n: usize,
    seed: u64,
) -> Vec<TemporalQuery> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (dir, kind) = class.split_once('-').expect("class is direction-kind");
    (0..n)
        .map(|_| {
            let v = Constraint::Fixed(rng.gen_range(0..n_nodes));
            let (x, z) = if dir == "direct" { (v, Constraint::Any) } else { (Constraint::Any, v) };
            let from = rng.gen_range(0..n_instants);
            let to = (from + rng.gen_range(0..=max_interval)).min(n_instants - 1);
            let when = match kind {
                "instant" => TimeQuery::Instant(from),
                "weak" => TimeQuery::weak(from, to),
                _ => TimeQuery::strong(from, to),
            };
            TemporalQuery { x, z, when }
        })
        .collect()
}

pub struct TemporalBackends {
    pub ik2: TemporalIndex,
    pub diff: DifferentialK2Trees,
}

impl TemporalBackends {
    pub fn build(changes: &[ChangeRecord], n_nodes: u32, n_instants: u32) -> Result<Self> {
        let sched = LevelSchedule::uniform(2, n_nodes as u64)?;
        Ok(TemporalBackends {
            ik2: TemporalIndex::build(changes, n_nodes, n_instants, sched.clone())?,
            diff: DifferentialK2Trees::build(changes, n_nodes, n_instants, sched)?,
        })
    }
}

/// One row per (class × backend).
pub fn run_temporal_suite(
    backends: &TemporalBackends,
    max_interval: u32,
    queries_per_class: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    let n_nodes = backends.ik2.n_nodes();
    let n_instants = backends.ik2.n_instants();
    let mut rows = Vec::new();
    for (i, class) in TEMPORAL_CLASSES.iter().enumerate() {
        let qs = temporal_queries(class, n_nodes, n_instants, max_interval, queries_per_class, seed.wrapping_add(i as u64));
        let (el, res) = time_queries(&qs, |q| backends.ik2.query(q.x, q.z, q.when).map(|v| v.len()).unwrap_or(0));
        rows.push(BenchRow { query_class: class.to_string(), backend: "ik2tree", queries: qs.len(), results: res, elapsed: el });
        let (el, res) = time_queries(&qs, |q| backends.diff.query(q.x, q.z, q.when).map(|v| v.len()).unwrap_or(0));
        rows.push(BenchRow { query_class: class.to_string(), backend: "mk2tree", queries: qs.len(), results: res, elapsed: el });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{random_evolving, synthetic_rdf};

    #[test]
    fn rdf_suite_rows_well_formed() {
        let triples = synthetic_rdf(1000, 100, 16, 5);
        let b = RdfBackends::build(&triples, 100, 16).unwrap();
        let rows = run_rdf_suite(&triples, &b, MIN_QUERIES_PER_CLASS, 5).unwrap();
        assert_eq!(rows.len(), RDF_SHAPES.len() * 2);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].results, pair[1].results, "{}", pair[0].query_class);
            assert!(pair.iter().all(|r| r.queries == MIN_QUERIES_PER_CLASS && r.elapsed > Duration::ZERO));
        }
        assert!(rows[0].to_string().starts_with("\"(S,P,O)\",ik2tree,500,500,"));
    }

    #[test]
    fn temporal_suite_backends_agree() {
        let ch = random_evolving(60, 80, 100, 0.1, 6);
        let b = TemporalBackends::build(&ch, 60, 80).unwrap();
        let rows = run_temporal_suite(&b, 10, 50, 6).unwrap();
        assert_eq!(rows.len(), 12);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].results, pair[1].results, "{}", pair[0].query_class);
        }
    }
}
