//! Seeded synthetic datasets for tests and benchmarks.

use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{rngs::StdRng, Rng, SeedableRng};

use crate::ik2tree::Triple;
use crate::temporal::ChangeRecord;

/// Random triples with a skewed predicate distribution (weight of predicate
/// `i` proportional to `1 / (i + 1)`), deduplicated and sorted.
pub fn synthetic_rdf(n_triples: usize, n_nodes: u32, n_preds: u32, seed: u64) -> Vec<Triple> {
    let mut rng = StdRng::seed_from_u64(seed);
    if n_nodes == 0 || n_preds == 0 {
        return Vec::new();
    }
    let weights: Vec<f64> = (0..n_preds).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let preds = WeightedIndex::new(&weights).expect("positive weights");
    let mut out: Vec<Triple> = (0..n_triples)
        .map(|_| {
            Triple::new(
                rng.gen_range(0..n_nodes),
                preds.sample(&mut rng) as u32,
                rng.gen_range(0..n_nodes),
            )
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Evolving graph: a random initial snapshot at instant 0, then at every
/// later instant about `change_rate × pool` cells of a fixed candidate pool
/// toggle.
pub fn random_evolving(
    n_nodes: u32,
    n_instants: u32,
    initial_edges: usize,
    change_rate: f64,
    seed: u64,
) -> Vec<ChangeRecord> {
    let mut rng = StdRng::seed_from_u64(seed);
    if n_nodes == 0 || n_instants == 0 {
        return Vec::new();
    }
    let pool_size = (initial_edges * 2).max(1);
    let pool: Vec<(u32, u32)> = (0..pool_size)
        .map(|_| (rng.gen_range(0..n_nodes), rng.gen_range(0..n_nodes)))
        .collect();
    let mut out = Vec::new();
    for &(x, z) in pool.iter().take(initial_edges) {
        out.push(ChangeRecord::new(x, z, 0));
    }
    let per_instant = ((pool_size as f64 * change_rate).round() as usize).max(1);
    for t in 1..n_instants {
        for _ in 0..per_instant {
            let (x, z) = pool[rng.gen_range(0..pool_size)];
            out.push(ChangeRecord::new(x, z, t));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Short-lived contacts in the style of a communication network: each
/// contact switches a cell on at a random instant and off again after at most
/// `max_lifetime` instants. Toggles that coincide on a cell cancel out.
pub fn commnet_like(
    n_nodes: u32,
    n_instants: u32,
    n_contacts: usize,
    max_lifetime: u32,
    seed: u64,
) -> Vec<ChangeRecord> {
    let mut rng = StdRng::seed_from_u64(seed);
    if n_nodes == 0 || n_instants == 0 {
        return Vec::new();
    }
    let mut toggles: HashMap<ChangeRecord, u32> = HashMap::new();
    for _ in 0..n_contacts {
        let x = rng.gen_range(0..n_nodes);
        let z = rng.gen_range(0..n_nodes);
        let start = rng.gen_range(0..n_instants);
        let end = start + rng.gen_range(1..=max_lifetime.max(1));
        *toggles.entry(ChangeRecord::new(x, z, start)).or_default() += 1;
        if end < n_instants {
            *toggles.entry(ChangeRecord::new(x, z, end)).or_default() += 1;
        }
    }
    let mut out: Vec<ChangeRecord> = toggles
        .into_iter()
        .filter(|&(_, n)| n % 2 == 1)
        .map(|(c, _)| c)
        .collect();
    out.sort_unstable();
    out
}
