//! Differential representation of a time-evolving binary relation.
//!
//! Time is the partitioning dimension. Instant 0 stores the initial snapshot
//! and every later instant stores the cells that toggled, so a cell is active
//! at `t` iff it has an odd number of change bits in `[0, t]`. Leaf change
//! bits of a cell are consecutive in L, so each count is a rank difference.

use std::fmt;

use crate::error::{Error, Result};
use crate::ik2tree::{Constraint, IK2Tree, Triple};
use crate::schedule::LevelSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChangeRecord {
    pub x: u32,
    pub z: u32,
    pub t: u32,
}

impl ChangeRecord {
    pub const fn new(x: u32, z: u32, t: u32) -> Self {
        ChangeRecord { x, z, t }
    }
}

impl fmt::Display for ChangeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.x, self.z, self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalSemantics {
    /// Active at some instant of the interval.
    Weak,
    /// Active at every instant of the interval.
    Strong,
}

/// Closed time constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeQuery {
    Instant(u32),
    Interval {
        from: u32,
        to: u32,
        semantics: IntervalSemantics,
    },
}

impl TimeQuery {
    pub fn weak(from: u32, to: u32) -> Self {
        TimeQuery::Interval {
            from,
            to,
            semantics: IntervalSemantics::Weak,
        }
    }

    pub fn strong(from: u32, to: u32) -> Self {
        TimeQuery::Interval {
            from,
            to,
            semantics: IntervalSemantics::Strong,
        }
    }

    /// Last instant the query looks at.
    pub fn horizon(&self) -> u32 {
        match *self {
            TimeQuery::Instant(t) => t,
            TimeQuery::Interval { to, .. } => to,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalIndex {
    inner: IK2Tree,
    n_nodes: u32,
    n_instants: u32,
}

#[derive(Clone, Copy)]
enum Kind {
    Instant,
    Weak,
    Strong,
}

struct Ctx {
    x: (u64, u64),
    z: (u64, u64),
    kind: Kind,
    prune: bool,
}

impl TemporalIndex {
    pub fn build(
        changes: &[ChangeRecord],
        n_nodes: u32,
        n_instants: u32,
        schedule: LevelSchedule,
    ) -> Result<TemporalIndex> {
        let mut triples: Vec<Triple> = changes.iter().map(|c| Triple::new(c.x, c.t, c.z)).collect();
        triples.sort_unstable();
        if let Some(w) = triples.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "duplicate change record ({}, {}, {})",
                w[0].x, w[0].z, w[0].y
            )));
        }
        let inner = IK2Tree::build(&triples, n_nodes, n_instants, n_nodes, schedule, true)?;
        Ok(TemporalIndex {
            inner,
            n_nodes,
            n_instants,
        })
    }

    /// Wraps a tree whose partitioning dimension is time.
    pub fn from_tree(inner: IK2Tree) -> Result<TemporalIndex> {
        if !inner.l_rank_enabled() {
            return Err(Error::format("temporal index requires rank support on L"));
        }
        if inner.nx() != inner.nz() {
            return Err(Error::format("temporal index must be square"));
        }
        Ok(TemporalIndex {
            n_nodes: inner.nx(),
            n_instants: inner.ysize(),
            inner,
        })
    }

    pub fn inner(&self) -> &IK2Tree {
        &self.inner
    }

    pub fn into_inner(self) -> IK2Tree {
        self.inner
    }

    pub fn n_nodes(&self) -> u32 {
        self.n_nodes
    }

    pub fn n_instants(&self) -> u32 {
        self.n_instants
    }

    /// Stored change records, sorted by `(x, z, t)`.
    pub fn changes(&self) -> Vec<ChangeRecord> {
        self.inner
            .triples()
            .into_iter()
            .map(|t| ChangeRecord::new(t.x, t.z, t.y))
            .collect()
    }

    pub fn active_at(&self, x: u32, z: u32, t: u32) -> Result<bool> {
        Ok(!self
            .query(Constraint::Fixed(x), Constraint::Fixed(z), TimeQuery::Instant(t))?
            .is_empty())
    }

    /// Cells `(x, z)` satisfying the constraints, sorted row-major.
    pub fn query(&self, x: Constraint, z: Constraint, when: TimeQuery) -> Result<Vec<(u32, u32)>> {
        self.run(x, z, when, true)
    }

    fn run(&self, x: Constraint, z: Constraint, when: TimeQuery, prune: bool) -> Result<Vec<(u32, u32)>> {
        x.validate(self.n_nodes, "x")?;
        z.validate(self.n_nodes, "z")?;
        let (a, b, kind) = match when {
            TimeQuery::Instant(t) => (t, t, Kind::Instant),
            TimeQuery::Interval { from, to, semantics } => {
                if from > to {
                    return Err(Error::input(format!("inverted interval [{from}, {to}]")));
                }
                let kind = match semantics {
                    IntervalSemantics::Weak => Kind::Weak,
                    IntervalSemantics::Strong => Kind::Strong,
                };
                (from, to, kind)
            }
        };
        if b >= self.n_instants {
            return Err(Error::input(format!(
                "instant {b} outside [0, {})",
                self.n_instants
            )));
        }
        let mut out = Vec::new();
        let (Some(xb), Some(zb)) = (x.bounds(self.n_nodes), z.bounds(self.n_nodes)) else {
            return Ok(out);
        };
        let ctx = Ctx {
            x: (xb.0 as u64, xb.1 as u64),
            z: (zb.0 as u64, zb.1 as u64),
            kind,
            prune,
        };
        let width = self.n_instants as usize;
        self.descend(0, 0, width, 0, 0, a as usize + 1, b as usize + 1, &ctx, &mut out);
        out.sort_unstable();
        Ok(out)
    }

    /// Visits a sibling block. `a` / `b` are the node-local bit counts covering
    /// instants `[0, from]` / `[0, to]`.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        level: usize,
        base: usize,
        width: usize,
        r0: u64,
        c0: u64,
        a: usize,
        b: usize,
        ctx: &Ctx,
        out: &mut Vec<(u32, u32)>,
    ) {
        let tree = &self.inner;
        let s = tree.schedule();
        let k = s.k(level) as u64;
        let cs = s.cell_side(level);
        let (dr0, dr1) = s.digit_span(level, r0, ctx.x.0, ctx.x.1);
        let (dc0, dc1) = s.digit_span(level, c0, ctx.z.0, ctx.z.1);
        let last = level + 1 == s.levels();
        let t = tree.t();
        let l = tree.l();
        for dr in dr0..=dr1 {
            for dc in dc0..=dc1 {
                let start = base + (dr * k + dc) as usize * width;
                let (r, c) = (r0 + dr * cs, c0 + dc * cs);
                if last {
                    let s0 = start - t.len();
                    let ra = l.rank(s0 + a);
                    let before = ra - l.rank(s0);
                    let odd = before % 2 == 1;
                    let hit = match ctx.kind {
                        Kind::Instant => odd,
                        Kind::Weak => odd || l.rank(s0 + b) > ra,
                        Kind::Strong => odd && l.rank(s0 + b) == ra,
                    };
                    if hit {
                        out.push((r as u32, c as u32));
                    }
                    continue;
                }
                let rs = t.rank(start);
                let ra = t.rank(start + a);
                let rb = if b == a { ra } else { t.rank(start + b) };
                if ctx.prune {
                    // weak needs some change up to `to`; instant and strong
                    // need the cell active at `from`, hence a change up to `from`
                    let window_ones = match ctx.kind {
                        Kind::Weak => rb - rs,
                        Kind::Instant | Kind::Strong => ra - rs,
                    };
                    if window_ones == 0 {
                        continue;
                    }
                }
                let m = t.rank(start + width) - rs;
                if m == 0 {
                    continue;
                }
                let child = tree.child_start(level, rs);
                self.descend(level + 1, child, m, r, c, ra - rs, rb - rs, ctx, out);
            }
        }
    }
}

/// Parses `x z t` lines; blank lines and lines starting with `#` are skipped.
pub fn parse_change_log(text: &str) -> Result<Vec<ChangeRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums = parse_ints(line, i + 1)?;
        out.push(ChangeRecord::new(nums[0], nums[1], nums[2]));
    }
    Ok(out)
}

pub(crate) fn parse_ints(line: &str, lineno: usize) -> Result<[u32; 3]> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected 3 fields, found {}", toks.len()),
        });
    }
    let mut v = [0u32; 3];
    for (slot, tok) in v.iter_mut().zip(&toks) {
        *slot = tok.parse().map_err(|e| Error::Parse {
            line: lineno,
            msg: format!("bad integer {tok:?}: {e}"),
        })?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ik2tree::Constraint::{Any, Fixed, Range};
    use crate::oracle::oracle_temporal;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    /// 8×8 graph over three instants. (6,5) is active from t0 on; (7,5) is
    /// active at t0 and drops at t2. Nothing else in rows 6-7 / columns 4-5
    /// changes at t1.
    fn change_log() -> Vec<ChangeRecord> {
        [
            (6, 5, 0),
            (7, 5, 0),
            (7, 5, 2),
            (0, 1, 0),
            (0, 1, 1),
            (2, 3, 1),
            (4, 0, 0),
            (3, 6, 2),
        ]
        .into_iter()
        .map(|(x, z, t)| ChangeRecord::new(x, z, t))
        .collect()
    }

    fn log_index() -> TemporalIndex {
        TemporalIndex::build(&change_log(), 8, 3, LevelSchedule::uniform(2, 8).unwrap()).unwrap()
    }

    #[test]
    fn log_node_bitmaps() {
        let idx = log_index();
        let tree = idx.inner();
        let root = tree.root_cursors()[3];
        assert_eq!(tree.node_bits(&root), "101");
        let n0 = tree.children(&root).unwrap()[2];
        assert_eq!((n0.row, n0.col), (6, 4));
        assert_eq!(tree.node_bits(&n0), "11");
        let leaves = tree.children(&n0).unwrap();
        assert_eq!(tree.node_bits(&leaves[1]), "10"); // row 6, col 5
        assert_eq!(tree.node_bits(&leaves[3]), "11"); // row 7, col 5
        assert!(tree.l().has_rank_support());
    }

    #[test]
    fn log_histories() {
        let idx = log_index();
        for t in 0..3 {
            assert!(idx.active_at(6, 5, t).unwrap());
        }
        assert!(idx.active_at(7, 5, 1).unwrap());
        assert!(!idx.active_at(7, 5, 2).unwrap());
        assert!(idx.active_at(3, 3, 0).is_ok_and(|a| !a));
        assert!(idx.active_at(8, 0, 0).is_err());
        assert!(idx.active_at(0, 0, 3).is_err());
    }

    #[test]
    fn log_neighbors_by_semantics() {
        let idx = log_index();
        let weak = idx.query(Fixed(7), Any, TimeQuery::weak(1, 2)).unwrap();
        let strong = idx.query(Fixed(7), Any, TimeQuery::strong(1, 2)).unwrap();
        assert_eq!(weak, vec![(7, 5)]);
        assert!(strong.is_empty());
        let reverse = idx.query(Any, Fixed(5), TimeQuery::Instant(1)).unwrap();
        assert_eq!(reverse, vec![(6, 5), (7, 5)]);
        assert!(idx.query(Any, Any, TimeQuery::weak(2, 1)).is_err());
    }

    #[test]
    fn empty_index() {
        let idx = TemporalIndex::build(&[], 8, 4, LevelSchedule::uniform(2, 8).unwrap()).unwrap();
        assert!(!idx.active_at(1, 1, 3).unwrap());
        assert!(idx.query(Any, Any, TimeQuery::weak(0, 3)).unwrap().is_empty());
    }

    #[test]
    fn duplicate_changes_rejected() {
        let ch = [ChangeRecord::new(1, 1, 0), ChangeRecord::new(1, 1, 0)];
        let err = TemporalIndex::build(&ch, 4, 2, LevelSchedule::uniform(2, 4).unwrap());
        assert!(matches!(err, Err(Error::Input(_))));
    }

    fn random_log(rng: &mut StdRng, nodes: u32, instants: u32, rate: f64) -> Vec<ChangeRecord> {
        let mut out = Vec::new();
        for x in 0..nodes {
            for z in 0..nodes {
                if !rng.gen_bool(0.05) {
                    continue;
                }
                for t in 0..instants {
                    if rng.gen_bool(rate) {
                        out.push(ChangeRecord::new(x, z, t));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn parity_matches_replay() {
        let mut rng = StdRng::seed_from_u64(4);
        let log = random_log(&mut rng, 100, 50, 0.02);
        let idx = TemporalIndex::build(&log, 100, 50, LevelSchedule::hybrid(100).unwrap()).unwrap();
        let mut state = std::collections::HashMap::new();
        let mut by_t: Vec<Vec<(u32, u32)>> = vec![Vec::new(); 50];
        for c in &log {
            by_t[c.t as usize].push((c.x, c.z));
        }
        for (t, toggles) in by_t.iter().enumerate() {
            for &cell in toggles {
                *state.entry(cell).or_insert(false) ^= true;
            }
            for x in 0..100 {
                for z in 0..100 {
                    let expect = state.get(&(x, z)).copied().unwrap_or(false);
                    assert_eq!(idx.active_at(x, z, t as u32).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn degenerate_intervals_equal_instant() {
        let mut rng = StdRng::seed_from_u64(9);
        let log = random_log(&mut rng, 40, 30, 0.1);
        let idx = TemporalIndex::build(&log, 40, 30, LevelSchedule::uniform(2, 40).unwrap()).unwrap();
        for t in 0..30 {
            let i = idx.query(Any, Any, TimeQuery::Instant(t)).unwrap();
            assert_eq!(idx.query(Any, Any, TimeQuery::weak(t, t)).unwrap(), i);
            assert_eq!(idx.query(Any, Any, TimeQuery::strong(t, t)).unwrap(), i);
        }
    }

    #[test]
    fn random_queries_match_oracle_and_pruning_is_sound() {
        let mut rng = StdRng::seed_from_u64(12);
        let log = random_log(&mut rng, 60, 40, 0.08);
        let idx = TemporalIndex::build(&log, 60, 40, LevelSchedule::new(vec![4, 2, 2, 2, 2]).unwrap()).unwrap();
        for i in 0..1500 {
            let x = match i % 3 {
                0 => Fixed(rng.gen_range(0..60)),
                1 => Any,
                _ => Range(10, 30),
            };
            let z = match i % 4 {
                0 => Fixed(rng.gen_range(0..60)),
                1 => Range(0, 20),
                _ => Any,
            };
            let (a, b) = (rng.gen_range(0..40), rng.gen_range(0..40));
            let when = match i % 3 {
                0 => TimeQuery::Instant(a),
                1 => TimeQuery::weak(a.min(b), a.max(b)),
                _ => TimeQuery::strong(a.min(b), a.max(b)),
            };
            let got = idx.query(x, z, when).unwrap();
            assert_eq!(got, oracle_temporal(&log, 40, x, z, when), "{x:?} {z:?} {when:?}");
            assert_eq!(got, idx.run(x, z, when, false).unwrap());
        }
    }

    #[test]
    fn change_log_parsing() {
        let log = parse_change_log("# header\n1 2 0\n\n 3 4 5 \n").unwrap();
        assert_eq!(log, vec![ChangeRecord::new(1, 2, 0), ChangeRecord::new(3, 4, 5)]);
        assert!(matches!(parse_change_log("1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_change_log("0 0 0\n1 x 2"), Err(Error::Parse { line: 2, .. })));
    }
}
