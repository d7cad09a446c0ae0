//! Multiple-k²-tree baselines: one independent k²-tree per partition value.
//!
//! Used only as benchmark comparators. Queries over several partition values
//! probe every corresponding tree.

use std::collections::HashMap;

use crate::error::Result;
use crate::ik2tree::{Constraint, Triple, TriplePattern};
use crate::schedule::LevelSchedule;
use crate::k2tree::K2Tree;
use crate::temporal::{ChangeRecord, IntervalSemantics, TimeQuery};

#[derive(Debug, Clone)]
pub struct MultiK2Tree {
    trees: Vec<K2Tree>,
    nx: u32,
    nz: u32,
}

impl MultiK2Tree {
    pub fn build(
        triples: &[Triple],
        nx: u32,
        ysize: u32,
        nz: u32,
        schedule: LevelSchedule,
    ) -> Result<MultiK2Tree> {
        let mut per_y: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ysize as usize];
        for t in triples {
            if t.y >= ysize {
                return Err(crate::error::Error::input(format!(
                    "partition value {} outside [0, {ysize})",
                    t.y
                )));
            }
            per_y[t.y as usize].push((t.x, t.z));
        }
        let trees = per_y
            .iter()
            .map(|pairs| K2Tree::build(pairs, nx, nz, schedule.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiK2Tree { trees, nx, nz })
    }

    pub fn trees(&self) -> &[K2Tree] {
        &self.trees
    }

    pub fn size_bits(&self) -> usize {
        self.trees.iter().map(K2Tree::size_bits).sum()
    }

    /// Results sorted `(x, z, y)`, same as the interleaved tree.
    pub fn query(&self, pattern: &TriplePattern) -> Result<Vec<Triple>> {
        let ysize = self.trees.len() as u32;
        pattern.x.validate(self.nx, "x")?;
        pattern.y.validate(ysize, "y")?;
        pattern.z.validate(self.nz, "z")?;
        let (Some(x), Some(y), Some(z)) = (
            pattern.x.bounds(self.nx),
            pattern.y.bounds(ysize),
            pattern.z.bounds(self.nz),
        ) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let mut pairs = Vec::new();
        for yv in y.0..=y.1 {
            pairs.clear();
            self.trees[yv as usize].query_into(x.0..=x.1, z.0..=z.1, &mut pairs)?;
            out.extend(pairs.iter().map(|&(a, c)| Triple::new(a, yv, c)));
        }
        out.sort_unstable_by_key(Triple::xzy);
        Ok(out)
    }
}

/// One k²-tree of changed cells per instant.
#[derive(Debug, Clone)]
pub struct DifferentialK2Trees {
    trees: Vec<K2Tree>,
    n_nodes: u32,
}

impl DifferentialK2Trees {
    pub fn build(
        changes: &[ChangeRecord],
        n_nodes: u32,
        n_instants: u32,
        schedule: LevelSchedule,
    ) -> Result<DifferentialK2Trees> {
        let triples: Vec<Triple> = changes.iter().map(|c| Triple::new(c.x, c.t, c.z)).collect();
        let multi = MultiK2Tree::build(&triples, n_nodes, n_instants, n_nodes, schedule)?;
        Ok(DifferentialK2Trees {
            trees: multi.trees,
            n_nodes,
        })
    }

    pub fn size_bits(&self) -> usize {
        self.trees.iter().map(K2Tree::size_bits).sum()
    }

    /// Same contract as the temporal index query: cells sorted row-major.
    pub fn query(&self, x: Constraint, z: Constraint, when: TimeQuery) -> Result<Vec<(u32, u32)>> {
        x.validate(self.n_nodes, "x")?;
        z.validate(self.n_nodes, "z")?;
        let (from, to) = match when {
            TimeQuery::Instant(t) => (t, t),
            TimeQuery::Interval { from, to, .. } => (from, to),
        };
        let n_instants = self.trees.len() as u32;
        if from > to || to >= n_instants {
            return Err(crate::error::Error::input(format!(
                "bad time window [{from}, {to}] for {n_instants} instants"
            )));
        }
        let (Some(xb), Some(zb)) = (x.bounds(self.n_nodes), z.bounds(self.n_nodes)) else {
            return Ok(Vec::new());
        };
        // (changes in [0, from], changes in (from, to])
        let mut counts: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
        let mut pairs = Vec::new();
        for t in 0..=to {
            pairs.clear();
            self.trees[t as usize].query_into(xb.0..=xb.1, zb.0..=zb.1, &mut pairs)?;
            for &cell in &pairs {
                let e = counts.entry(cell).or_default();
                if t <= from {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let mut out: Vec<(u32, u32)> = counts
            .into_iter()
            .filter(|&(_, (before, within))| {
                let odd = before % 2 == 1;
                match when {
                    TimeQuery::Instant(_) => odd,
                    TimeQuery::Interval { semantics: IntervalSemantics::Weak, .. } => odd || within > 0,
                    TimeQuery::Interval { semantics: IntervalSemantics::Strong, .. } => odd && within == 0,
                }
            })
            .map(|(cell, _)| cell)
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ik2tree::{IK2Tree, Strategy};
    use crate::temporal::TemporalIndex;
    use rand::{rngs::StdRng, Rng, SeedableRng};
    use Constraint::{Any, Fixed, Range};

    #[test]
    fn multi_matches_interleaved() {
        let mut rng = StdRng::seed_from_u64(41);
        let triples: Vec<Triple> = (0..3000)
            .map(|_| Triple::new(rng.gen_range(0..50), rng.gen_range(0..30), rng.gen_range(0..50)))
            .collect();
        let sched = LevelSchedule::uniform(2, 50).unwrap();
        let multi = MultiK2Tree::build(&triples, 50, 30, 50, sched.clone()).unwrap();
        let ik2 = IK2Tree::build(&triples, 50, 30, 50, sched, false).unwrap();
        for _ in 0..300 {
            let p = TriplePattern::new(
                Fixed(rng.gen_range(0..50)),
                if rng.gen_bool(0.5) { Any } else { Range(3, 20) },
                if rng.gen_bool(0.5) { Any } else { Fixed(rng.gen_range(0..50)) },
            );
            assert_eq!(multi.query(&p).unwrap(), ik2.query(&p, Strategy::Eager).unwrap());
        }
    }

    #[test]
    fn differential_matches_temporal_index() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut changes: Vec<ChangeRecord> = (0..2000)
            .map(|_| ChangeRecord::new(rng.gen_range(0..40), rng.gen_range(0..40), rng.gen_range(0..60)))
            .collect();
        changes.sort_unstable();
        changes.dedup();
        let sched = LevelSchedule::uniform(2, 40).unwrap();
        let diff = DifferentialK2Trees::build(&changes, 40, 60, sched.clone()).unwrap();
        let idx = TemporalIndex::build(&changes, 40, 60, sched).unwrap();
        for _ in 0..300 {
            let a = rng.gen_range(0..60);
            let b = rng.gen_range(a..60);
            let x = if rng.gen_bool(0.5) { Fixed(rng.gen_range(0..40)) } else { Any };
            for when in [TimeQuery::Instant(a), TimeQuery::weak(a, b), TimeQuery::strong(a, b)] {
                assert_eq!(diff.query(x, Any, when).unwrap(), idx.query(x, Any, when).unwrap());
            }
        }
    }
}
