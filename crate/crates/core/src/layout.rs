//! Level boundaries of a T:L bitmap pair.
//!
//! Level 0 holds `K₀² · root_width` bits; every set bit at level `l` owns
//! `K_{l+1}²` bits at level `l+1`. All levels but the last live in T.

use crate::bitvector::BitVector;
use crate::error::{Error, Result};
use crate::schedule::LevelSchedule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout {
    /// Start of each level in T:L, plus the end of L.
    pub starts: Vec<usize>,
    /// `rank1(T, starts[l])` for every level.
    pub ranks: Vec<usize>,
}

impl Layout {
    pub fn compute(
        schedule: &LevelSchedule,
        root_width: usize,
        t: &BitVector,
        l_len: usize,
    ) -> Result<Layout> {
        let h = schedule.levels();
        let mut starts = Vec::with_capacity(h + 1);
        let mut ranks = Vec::with_capacity(h);
        let mut start = 0usize;
        let mut size = schedule
            .k2(0)
            .checked_mul(root_width)
            .ok_or_else(|| Error::format("level 0 size overflows"))?;
        for level in 0..h - 1 {
            let end = start + size;
            if end > t.len() {
                return Err(Error::format(format!(
                    "level {level} ends at bit {end} past |T| = {}",
                    t.len()
                )));
            }
            let (r0, r1) = (t.rank(start), t.rank(end));
            starts.push(start);
            ranks.push(r0);
            start = end;
            size = schedule.k2(level + 1) * (r1 - r0);
        }
        if start != t.len() {
            return Err(Error::format(format!(
                "internal levels span {start} bits but |T| = {}",
                t.len()
            )));
        }
        if size != l_len {
            return Err(Error::format(format!(
                "last level needs {size} bits but |L| = {l_len}"
            )));
        }
        starts.push(start);
        ranks.push(t.count_ones());
        starts.push(start + l_len);
        Ok(Layout { starts, ranks })
    }

    /// Start in T:L of the child block owned by the set bit at `pos`, which
    /// lies in internal level `level`.
    #[inline]
    pub fn child_base(&self, schedule: &LevelSchedule, level: usize, rank_at_pos: usize) -> usize {
        self.starts[level + 1] + schedule.k2(level + 1) * (rank_at_pos - self.ranks[level])
    }

    /// Level containing T:L position `pos`.
    pub fn level_of(&self, pos: usize) -> Option<usize> {
        let h = self.ranks.len();
        (0..h).find(|&l| pos >= self.starts[l] && pos < self.starts[l + 1])
    }
}
