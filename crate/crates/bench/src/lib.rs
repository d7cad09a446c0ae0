//! Seeded datasets shared by the criterion benches.

use ik2_core::suite::{rdf_queries, temporal_queries, TemporalQuery};
use ik2_core::workload::{commnet_like, synthetic_rdf};
use ik2_core::{LevelSchedule, TemporalIndex, Triple, TriplePattern};
use ik2_core::baseline::{DifferentialK2Trees, MultiK2Tree};
use ik2_core::IK2Tree;

pub const QUERIES: usize = 500;

pub struct RdfFixture {
    pub triples: Vec<Triple>,
    pub ik2: IK2Tree,
    pub multi: Option<MultiK2Tree>,
}

impl RdfFixture {
    pub fn new(n_triples: usize, n_nodes: u32, n_preds: u32, with_baseline: bool) -> Self {
        let triples = synthetic_rdf(n_triples, n_nodes, n_preds, 42);
        let sched = LevelSchedule::hybrid(n_nodes as u64).expect("schedule");
        let ik2 = IK2Tree::build(&triples, n_nodes, n_preds, n_nodes, sched.clone(), false)
            .expect("build");
        let multi = with_baseline.then(|| {
            MultiK2Tree::build(&triples, n_nodes, n_preds, n_nodes, sched).expect("build baseline")
        });
        RdfFixture { triples, ik2, multi }
    }

    pub fn queries(&self, shape: &str) -> Vec<TriplePattern> {
        rdf_queries(&self.triples, shape, QUERIES, 43)
    }
}

pub struct TemporalFixture {
    pub ik2: TemporalIndex,
    pub diff: DifferentialK2Trees,
    pub n_nodes: u32,
    pub n_instants: u32,
}

impl TemporalFixture {
    pub fn commnet(n_nodes: u32, n_instants: u32, contacts: usize) -> Self {
        let changes = commnet_like(n_nodes, n_instants, contacts, 50, 44);
        let sched = LevelSchedule::uniform(2, n_nodes as u64).expect("schedule");
        TemporalFixture {
            ik2: TemporalIndex::build(&changes, n_nodes, n_instants, sched.clone()).expect("build"),
            diff: DifferentialK2Trees::build(&changes, n_nodes, n_instants, sched).expect("build baseline"),
            n_nodes,
            n_instants,
        }
    }

    pub fn queries(&self, class: &str) -> Vec<TemporalQuery> {
        temporal_queries(class, self.n_nodes, self.n_instants, 100, QUERIES, 45)
    }
}
