//! Brute-force references for triple patterns and temporal queries.
//!
//! Everything here is a linear scan or a literal replay; nothing is indexed.

use std::collections::{BTreeMap, BTreeSet};

use crate::ik2tree::{Constraint, Triple, TriplePattern};
use crate::temporal::{ChangeRecord, IntervalSemantics, TimeQuery};

/// Sorted `(x, z, y)`, duplicate-free triple list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainTripleStore {
    triples: Vec<Triple>,
    pub nx: u32,
    pub ysize: u32,
    pub nz: u32,
}

impl PlainTripleStore {
    pub fn new(triples: &[Triple], nx: u32, ysize: u32, nz: u32) -> Self {
        let mut v: Vec<Triple> = triples.to_vec();
        v.sort_by_key(Triple::xzy);
        v.dedup();
        PlainTripleStore {
            triples: v,
            nx,
            ysize,
            nz,
        }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn eval(&self, pattern: &TriplePattern) -> Vec<Triple> {
        oracle_eval(self, pattern)
    }
}

pub fn oracle_eval(store: &PlainTripleStore, pattern: &TriplePattern) -> Vec<Triple> {
    store
        .triples
        .iter()
        .filter(|t| pattern.matches(t))
        .copied()
        .collect()
}

/// Replays toggles per cell and applies the instant / weak / strong
/// definitions literally over the per-instant states.
pub fn oracle_temporal(
    changes: &[ChangeRecord],
    n_instants: u32,
    x: Constraint,
    z: Constraint,
    when: TimeQuery,
) -> Vec<(u32, u32)> {
    TemporalOracle::new(changes, n_instants).query(x, z, when)
}

/// Per-cell state timelines, materialized once for repeated queries.
#[derive(Debug, Clone)]
pub struct TemporalOracle {
    states: BTreeMap<(u32, u32), Vec<bool>>,
}

impl TemporalOracle {
    pub fn new(changes: &[ChangeRecord], n_instants: u32) -> Self {
        let mut per_cell: BTreeMap<(u32, u32), BTreeSet<u32>> = BTreeMap::new();
        for c in changes {
            per_cell.entry((c.x, c.z)).or_default().insert(c.t);
        }
        let states = per_cell
            .into_iter()
            .map(|(cell, times)| {
                let mut on = false;
                let timeline = (0..n_instants)
                    .map(|t| {
                        if times.contains(&t) {
                            on = !on;
                        }
                        on
                    })
                    .collect();
                (cell, timeline)
            })
            .collect();
        TemporalOracle { states }
    }

    pub fn query(&self, x: Constraint, z: Constraint, when: TimeQuery) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (&(cx, cz), state) in &self.states {
            if !x.matches(cx) || !z.matches(cz) {
                continue;
            }
            let hit = match when {
                TimeQuery::Instant(t) => state[t as usize],
                TimeQuery::Interval { from, to, semantics } => {
                    let window = &state[from as usize..=to as usize];
                    match semantics {
                        IntervalSemantics::Weak => window.iter().any(|&s| s),
                        IntervalSemantics::Strong => window.iter().all(|&s| s),
                    }
                }
            };
            if hit {
                out.push((cx, cz));
            }
        }
        out
    }
}
