//! Interleaved k²-tree over a ternary relation `X × Y × Z`.
//!
//! The `X × Z` matrix is subdivided as in a k²-tree, and every node carries
//! one bit per value of the partitioning dimension `Y` that is still active
//! on its path. Level 0 holds `K₀²` nodes of `|Y|` bits each; a node with `m`
//! set bits has `K²` children of `m` bits each, stored consecutively.

mod eager;
mod lazy;

use std::fmt;

use crate::bitvector::{BitVecBuilder, BitVector, DEFAULT_RANK_SAMPLE};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::schedule::LevelSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Triple {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Triple { x, y, z }
    }

    /// Result ordering key: `(x, z, y)`.
    #[inline]
    pub fn xzy(&self) -> (u32, u32, u32) {
        (self.x, self.z, self.y)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.x, self.y, self.z)
    }
}

/// Constraint on one dimension of a pattern. Ranges are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    Fixed(u32),
    Range(u32, u32),
    Any,
}

impl Constraint {
    pub fn matches(&self, v: u32) -> bool {
        match *self {
            Constraint::Fixed(f) => v == f,
            Constraint::Range(lo, hi) => lo <= v && v <= hi,
            Constraint::Any => true,
        }
    }

    /// Inclusive bounds within a dimension of size `dim`; `None` when nothing
    /// can match (empty dimension).
    pub(crate) fn bounds(&self, dim: u32) -> Option<(u32, u32)> {
        if dim == 0 {
            return None;
        }
        Some(match *self {
            Constraint::Fixed(v) => (v, v),
            Constraint::Range(lo, hi) => (lo, hi),
            Constraint::Any => (0, dim - 1),
        })
    }

    pub(crate) fn validate(&self, dim: u32, what: &str) -> Result<()> {
        match *self {
            Constraint::Fixed(v) if v >= dim => Err(Error::input(format!(
                "{what} value {v} outside dimension {dim}"
            ))),
            Constraint::Range(lo, hi) if lo > hi => Err(Error::input(format!(
                "inverted {what} range {lo}-{hi}"
            ))),
            Constraint::Range(_, hi) if hi >= dim => Err(Error::input(format!(
                "{what} range end {hi} outside dimension {dim}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub x: Constraint,
    pub y: Constraint,
    pub z: Constraint,
}

impl TriplePattern {
    pub const fn new(x: Constraint, y: Constraint, z: Constraint) -> Self {
        TriplePattern { x, y, z }
    }

    pub const fn all() -> Self {
        TriplePattern::new(Constraint::Any, Constraint::Any, Constraint::Any)
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.x.matches(t.x) && self.y.matches(t.y) && self.z.matches(t.z)
    }
}

/// A node of the conceptual tree: its bits occupy `[start, start + width)` in T:L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCursor {
    pub start: usize,
    pub width: usize,
    pub level: usize,
    pub row: u64,
    pub col: u64,
}

#[derive(Clone, PartialEq, Eq)]
pub struct IK2Tree {
    schedule: LevelSchedule,
    ysize: u32,
    nx: u32,
    nz: u32,
    t: BitVector,
    l: BitVector,
    l_rank: bool,
    layout: Layout,
}

impl fmt::Debug for IK2Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IK2Tree")
            .field("ks", &self.schedule.ks())
            .field("nx", &self.nx)
            .field("ysize", &self.ysize)
            .field("nz", &self.nz)
            .field("t", &self.t)
            .field("l", &self.l)
            .field("l_rank", &self.l_rank)
            .finish()
    }
}

impl IK2Tree {
    /// Builds the tree bottom-up from sorted cell paths. Duplicate triples are
    /// ignored.
    pub fn build(
        triples: &[Triple],
        nx: u32,
        ysize: u32,
        nz: u32,
        schedule: LevelSchedule,
        l_rank: bool,
    ) -> Result<IK2Tree> {
        if schedule.side() < nx.max(nz) as u64 {
            return Err(Error::input(format!(
                "schedule side {} smaller than {nx}x{nz}",
                schedule.side()
            )));
        }
        let mut keyed = Vec::with_capacity(triples.len());
        for t in triples {
            if t.x >= nx || t.y >= ysize || t.z >= nz {
                return Err(Error::input(format!(
                    "triple ({}, {}, {}) outside {nx}x{ysize}x{nz}",
                    t.x, t.y, t.z
                )));
            }
            keyed.push((schedule.path_key(t.x as u64, t.z as u64), t.y));
        }
        keyed.sort_unstable();
        keyed.dedup();

        let h = schedule.levels();
        let mut tb = BitVecBuilder::new();
        let mut lb = BitVecBuilder::new();
        let mut active: Vec<u32> = Vec::new();
        for level in 0..h {
            let out = if level + 1 < h { &mut tb } else { &mut lb };
            let k2 = schedule.k2(level);
            if level == 0 {
                let width = ysize as usize;
                let base = out.len();
                out.push_zeros(k2 * width);
                for &(key, y) in &keyed {
                    out.set(base + schedule.key_digit(key, 0) * width + y as usize);
                }
                continue;
            }
            let mut i = 0;
            while i < keyed.len() {
                let parent = schedule.key_prefix(keyed[i].0, level - 1);
                let mut j = i;
                while j < keyed.len() && schedule.key_prefix(keyed[j].0, level - 1) == parent {
                    j += 1;
                }
                let group = &keyed[i..j];
                active.clear();
                active.extend(group.iter().map(|&(_, y)| y));
                active.sort_unstable();
                active.dedup();
                let width = active.len();
                let base = out.len();
                out.push_zeros(k2 * width);
                for &(key, y) in group {
                    let idx = active.binary_search(&y).expect("y is active in its parent");
                    out.set(base + schedule.key_digit(key, level) * width + idx);
                }
                i = j;
            }
        }
        let t = tb.finish();
        let l = lb.finish_with(l_rank.then_some(DEFAULT_RANK_SAMPLE));
        Self::from_parts(schedule, nx, ysize, nz, t, l)
    }

    /// Assembles a tree from raw bitmaps, checking the level structure. The
    /// rank flag is taken from whether `l` carries a rank directory.
    pub fn from_parts(
        schedule: LevelSchedule,
        nx: u32,
        ysize: u32,
        nz: u32,
        t: BitVector,
        l: BitVector,
    ) -> Result<IK2Tree> {
        if schedule.side() < nx.max(nz) as u64 {
            return Err(Error::format(format!(
                "schedule side {} smaller than {nx}x{nz}",
                schedule.side()
            )));
        }
        if !t.has_rank_support() {
            return Err(Error::Logic("T requires rank support".into()));
        }
        let layout = Layout::compute(&schedule, ysize as usize, &t, l.len())?;
        let l_rank = l.has_rank_support();
        Ok(IK2Tree {
            schedule,
            ysize,
            nx,
            nz,
            t,
            l,
            l_rank,
            layout,
        })
    }

    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    pub fn ysize(&self) -> u32 {
        self.ysize
    }

    pub fn nx(&self) -> u32 {
        self.nx
    }

    pub fn nz(&self) -> u32 {
        self.nz
    }

    pub fn t(&self) -> &BitVector {
        &self.t
    }

    pub fn l(&self) -> &BitVector {
        &self.l
    }

    pub fn l_rank_enabled(&self) -> bool {
        self.l_rank
    }

    /// Number of stored triples (set bits in the last level).
    pub fn len(&self) -> usize {
        self.l.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn size_bits(&self) -> usize {
        self.t.len() + self.l.len()
    }

    /// Set bits over T:L.
    pub fn total_ones(&self) -> usize {
        self.t.count_ones() + self.l.count_ones()
    }

    pub fn level_bit_counts(&self) -> Vec<usize> {
        self.layout.starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    #[inline]
    fn is_last(&self, level: usize) -> bool {
        level + 1 == self.schedule.levels()
    }

    #[inline]
    pub(crate) fn t_bits(&self) -> &BitVector {
        &self.t
    }

    #[inline]
    pub(crate) fn child_start(&self, level: usize, rank_at_start: usize) -> usize {
        self.layout
            .child_base(&self.schedule, level, rank_at_start)
    }

    /// `(rank(T, start), ones in [start, start + width))` for an internal node.
    #[inline]
    pub(crate) fn node_count(&self, start: usize, width: usize) -> (usize, usize) {
        let rs = self.t.rank(start);
        let m = if width <= 256 {
            self.t.count_range(start, start + width)
        } else {
            self.t.rank(start + width) - rs
        };
        (rs, m)
    }

    /// Offset of the last level within T:L.
    #[inline]
    pub(crate) fn l_offset(&self) -> usize {
        self.t.len()
    }

    /// The `K₀²` level-0 nodes, left to right, top to bottom.
    pub fn root_cursors(&self) -> Vec<NodeCursor> {
        self.block_cursors(0, 0, self.ysize as usize, 0, 0)
    }

    fn block_cursors(&self, level: usize, base: usize, width: usize, r0: u64, c0: u64) -> Vec<NodeCursor> {
        let k = self.schedule.k(level) as u64;
        let cs = self.schedule.cell_side(level);
        (0..k * k)
            .map(|d| NodeCursor {
                start: base + d as usize * width,
                width,
                level,
                row: r0 + (d / k) * cs,
                col: c0 + (d % k) * cs,
            })
            .collect()
    }

    /// Set bits of a node.
    pub fn node_ones(&self, node: &NodeCursor) -> usize {
        if self.is_last(node.level) {
            let s = node.start - self.l_offset();
            self.l.count_range(s, s + node.width)
        } else {
            self.t.rank(node.start + node.width) - self.t.rank(node.start)
        }
    }

    /// The node's bits as a `0`/`1` string.
    pub fn node_bits(&self, node: &NodeCursor) -> String {
        (node.start..node.start + node.width)
            .map(|p| if self.bit(p) { '1' } else { '0' })
            .collect()
    }

    #[inline]
    fn bit(&self, pos: usize) -> bool {
        if pos < self.t.len() {
            self.t.bit(pos)
        } else {
            self.l.bit(pos - self.t.len())
        }
    }

    /// Start of the first child of `node`; its `K²` children follow as
    /// consecutive blocks of `m` bits, `m` being the node's set-bit count.
    pub fn child_base(&self, node: &NodeCursor) -> Result<usize> {
        if self.is_last(node.level) {
            return Err(Error::Logic("leaf nodes have no children".into()));
        }
        if self.node_ones(node) == 0 {
            return Err(Error::Logic(format!(
                "node at {} has no set bits and no children",
                node.start
            )));
        }
        Ok(self.child_start(node.level, self.t.rank(node.start)))
    }

    pub fn children(&self, node: &NodeCursor) -> Result<Vec<NodeCursor>> {
        let base = self.child_base(node)?;
        let m = self.node_ones(node);
        Ok(self.block_cursors(node.level + 1, base, m, node.row, node.col))
    }

    pub fn contains(&self, t: &Triple) -> Result<bool> {
        if t.x >= self.nx || t.y >= self.ysize || t.z >= self.nz {
            return Err(Error::input(format!(
                "triple ({}, {}, {}) out of bounds",
                t.x, t.y, t.z
            )));
        }
        let (r, c) = (t.x as u64, t.z as u64);
        let mut width = self.ysize as usize;
        let mut offset = t.y as usize;
        let mut start = self.schedule.digit(0, r, c) as usize * width;
        for level in 0..self.schedule.levels() - 1 {
            if !self.t.bit(start + offset) {
                return Ok(false);
            }
            let rs = self.t.rank(start);
            let m = self.t.rank(start + width) - rs;
            offset = self.t.rank(start + offset) - rs;
            start = self.child_start(level, rs) + self.schedule.digit(level + 1, r, c) as usize * m;
            width = m;
        }
        Ok(self.l.bit(start - self.l_offset() + offset))
    }

    /// Every stored triple, sorted `(x, z, y)`.
    pub fn triples(&self) -> Vec<Triple> {
        self.query_eager(&TriplePattern::all())
            .expect("unconstrained pattern is valid")
    }

    pub fn validate_pattern(&self, p: &TriplePattern) -> Result<()> {
        p.x.validate(self.nx, "x")?;
        p.y.validate(self.ysize, "y")?;
        p.z.validate(self.nz, "z")
    }
}

/// Evaluation strategy for patterns over the partitioning dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Eager,
    Lazy,
}

impl IK2Tree {
    pub fn query(&self, pattern: &TriplePattern, strategy: Strategy) -> Result<Vec<Triple>> {
        match strategy {
            Strategy::Eager => self.query_eager(pattern),
            Strategy::Lazy => self.query_lazy(pattern),
        }
    }
}

/// Parses integer triples `x y z`, one per line, with the same comment and
/// blank-line rules as change logs.
pub fn parse_id_triples(text: &str) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let [x, y, z] = crate::temporal::parse_ints(line, i + 1)?;
        out.push(Triple::new(x, y, z));
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn t(x: u32, y: u32, z: u32) -> Triple {
        Triple::new(x, y, z)
    }

    /// Three 8×8 layers (|Y| = 3) consistent with the worked navigation
    /// examples: N₀ = 011, N₃ = 10, N₅ = 011 with N₆ = 10 and N₇ = 1.
    pub fn sample() -> Vec<Triple> {
        vec![
            t(1, 0, 5),
            t(5, 0, 6),
            t(2, 1, 2),
            t(6, 1, 0),
            t(3, 1, 1),
            t(0, 2, 1),
            t(6, 2, 3),
            t(7, 2, 7),
        ]
    }

    /// Relation of the lazy-evaluation walk-through (|Y| = 3, 8×8).
    pub fn lazy_walkthrough() -> Vec<Triple> {
        vec![t(2, 1, 3), t(0, 2, 0), t(2, 2, 2), t(2, 2, 3)]
    }

    pub fn k2_8() -> LevelSchedule {
        LevelSchedule::uniform(2, 8).unwrap()
    }

    pub fn bits(s: &str) -> BitVector {
        BitVector::build(s.chars().map(|c| c == '1'))
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::k2tree::K2Tree;
    use proptest::prelude::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn sample_tree() -> IK2Tree {
        IK2Tree::build(&sample(), 8, 3, 8, k2_8(), false).unwrap()
    }

    #[test]
    fn empty_tree() {
        let tree = IK2Tree::build(&[], 8, 5, 8, k2_8(), false).unwrap();
        assert_eq!(tree.t(), &bits(&"0".repeat(20)));
        assert!(tree.l().is_empty());
        assert!(tree.is_empty());
        assert!(tree.triples().is_empty());
    }

    #[test]
    fn sample_bitmaps() {
        let tree = sample_tree();
        // frozen from an independent brute-force builder
        assert_eq!(tree.t(), &bits("0111000111010100101010000000100100100001"));
        assert_eq!(tree.l(), &bits("01000001100000011000010000100001"));

        let roots = tree.root_cursors();
        let n0 = roots[0];
        let n5 = roots[2];
        assert_eq!(tree.node_bits(&n0), "011");
        assert_eq!(tree.node_bits(&roots[1]), "100");
        assert_eq!(tree.node_bits(&n5), "011");
        assert_eq!(tree.node_bits(&roots[3]), "101");

        let n3 = tree.children(&n0).unwrap()[3];
        assert_eq!((n3.row, n3.col), (2, 2));
        assert_eq!(tree.node_bits(&n3), "10");
        let n4 = tree.children(&n3).unwrap()[0];
        assert_eq!((n4.row, n4.col), (2, 2));
        assert_eq!(tree.node_bits(&n4), "1");

        let n6 = tree.children(&n5).unwrap()[2];
        assert_eq!((n6.row, n6.col), (6, 0));
        assert_eq!(tree.node_bits(&n6), "10");
        let n7 = tree.children(&n6).unwrap()[0];
        assert_eq!(tree.node_bits(&n7), "1");
    }

    #[test]
    fn child_base_follows_root_level() {
        let tree = sample_tree();
        let roots = tree.root_cursors();
        // first node holding a set bit: rank prefix 0, children right after 3·4 root bits
        assert_eq!(tree.child_base(&roots[0]).unwrap(), 3 * 4);
        let leaf = tree.children(&tree.children(&roots[0]).unwrap()[3]).unwrap()[0];
        assert!(tree.child_base(&leaf).is_err());
        let empty = tree.children(&roots[0]).unwrap()[1];
        assert_eq!(tree.node_bits(&empty), "00");
        assert!(matches!(tree.child_base(&empty), Err(Error::Logic(_))));
    }

    #[test]
    fn contains_examples() {
        let tree = sample_tree();
        assert!(tree.contains(&t(6, 1, 0)).unwrap());
        assert!(!tree.contains(&t(6, 0, 0)).unwrap());
        assert!(tree.contains(&t(9, 0, 0)).is_err());
        let empty = IK2Tree::build(&[], 8, 3, 8, k2_8(), false).unwrap();
        assert!(!empty.contains(&t(6, 1, 0)).unwrap());
    }

    #[test]
    fn rejects_out_of_bounds_build() {
        assert!(IK2Tree::build(&[t(0, 3, 0)], 8, 3, 8, k2_8(), false).is_err());
        assert!(IK2Tree::build(&[], 9, 3, 8, k2_8(), false).is_err());
    }

    fn random_triples(rng: &mut StdRng, n: usize, nx: u32, ny: u32, nz: u32) -> Vec<Triple> {
        (0..n)
            .map(|_| t(rng.gen_range(0..nx), rng.gen_range(0..ny), rng.gen_range(0..nz)))
            .collect()
    }

    #[test]
    fn bit_count_equals_per_y_trees() {
        let mut rng = StdRng::seed_from_u64(5);
        let triples = random_triples(&mut rng, 300, 32, 8, 32);
        let sched = LevelSchedule::uniform(2, 32).unwrap();
        let tree = IK2Tree::build(&triples, 32, 8, 32, sched.clone(), false).unwrap();
        let (mut bits, mut ones) = (0, 0);
        for y in 0..8 {
            let pairs: Vec<_> = triples.iter().filter(|tr| tr.y == y).map(|tr| (tr.x, tr.z)).collect();
            let k = K2Tree::build(&pairs, 32, 32, sched.clone()).unwrap();
            bits += k.size_bits();
            ones += k.t().count_ones() + k.l().count_ones();
        }
        assert_eq!(tree.size_bits(), bits);
        assert_eq!(tree.total_ones(), ones);
    }

    /// Replays `A_child[i] = A_parent[rank(N_parent, i)]` from the roots and
    /// checks each node's active list against the per-value region occupancy.
    #[test]
    fn active_lists_match_region_occupancy() {
        let mut rng = StdRng::seed_from_u64(21);
        let triples = random_triples(&mut rng, 400, 40, 12, 40);
        let sched = LevelSchedule::new(vec![4, 2, 2, 2, 2]).unwrap();
        let tree = IK2Tree::build(&triples, 40, 12, 40, sched.clone(), false).unwrap();
        let set: BTreeSet<Triple> = triples.iter().copied().collect();
        let occupied = |y: u32, n: &NodeCursor| {
            let s = sched.cell_side(n.level);
            set.iter().any(|tr| {
                tr.y == y
                    && (n.row..n.row + s).contains(&(tr.x as u64))
                    && (n.col..n.col + s).contains(&(tr.z as u64))
            })
        };
        let mut stack: Vec<(NodeCursor, Vec<u32>)> = tree
            .root_cursors()
            .into_iter()
            .map(|n| (n, (0..12).collect()))
            .collect();
        let mut leaves = 0;
        while let Some((node, active)) = stack.pop() {
            assert_eq!(active.len(), node.width);
            let bits = tree.node_bits(&node);
            for (i, ch) in bits.chars().enumerate() {
                assert_eq!(ch == '1', occupied(active[i], &node));
            }
            if node.level + 1 == sched.levels() {
                leaves += 1;
                continue;
            }
            if tree.node_ones(&node) == 0 {
                continue;
            }
            let ones: Vec<usize> = bits.char_indices().filter(|c| c.1 == '1').map(|c| c.0).collect();
            let child_active: Vec<u32> = (0..ones.len()).map(|i| active[ones[i]]).collect();
            for child in tree.children(&node).unwrap() {
                assert_eq!(child.width, ones.len());
                stack.push((child, child_active.clone()));
            }
        }
        assert!(leaves > 0);
    }

    proptest! {
        #[test]
        fn round_trip_triples(
            raw in proptest::collection::vec((0u32..20, 0u32..6, 0u32..20), 0..150),
        ) {
            let triples: Vec<Triple> = raw.iter().map(|&(x, y, z)| t(x, y, z)).collect();
            let tree = IK2Tree::build(&triples, 20, 6, 20, LevelSchedule::uniform(2, 20).unwrap(), true).unwrap();
            let mut expect: Vec<Triple> = triples.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            expect.sort_by_key(Triple::xzy);
            prop_assert_eq!(tree.triples(), expect.clone());
            prop_assert_eq!(tree.len(), expect.len());
            for tr in &expect {
                prop_assert!(tree.contains(tr).unwrap());
            }
        }
    }
}
