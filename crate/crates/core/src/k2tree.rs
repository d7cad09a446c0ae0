//! Classic k²-tree over a single binary relation.

use std::ops::RangeInclusive;

use crate::bitvector::{BitVecBuilder, BitVector};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::schedule::LevelSchedule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K2Tree {
    schedule: LevelSchedule,
    t: BitVector,
    l: BitVector,
    nrows: u32,
    ncols: u32,
    ones: usize,
    layout: Layout,
}

impl K2Tree {
    /// Builds level by level from the sorted cell paths; no dense matrix is
    /// materialized. Duplicate pairs are ignored.
    pub fn build(
        pairs: &[(u32, u32)],
        nrows: u32,
        ncols: u32,
        schedule: LevelSchedule,
    ) -> Result<K2Tree> {
        if schedule.side() < nrows.max(ncols) as u64 {
            return Err(Error::input(format!(
                "schedule side {} smaller than {nrows}x{ncols}",
                schedule.side()
            )));
        }
        let mut keys = Vec::with_capacity(pairs.len());
        for &(r, c) in pairs {
            if r >= nrows || c >= ncols {
                return Err(Error::input(format!(
                    "pair ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            keys.push(schedule.path_key(r as u64, c as u64));
        }
        keys.sort_unstable();
        keys.dedup();

        let h = schedule.levels();
        let mut t = BitVecBuilder::new();
        let mut l = BitVecBuilder::new();
        for level in 0..h {
            let out = if level + 1 < h { &mut t } else { &mut l };
            let k2 = schedule.k2(level);
            if level == 0 {
                let base = out.len();
                out.push_zeros(k2);
                for &key in &keys {
                    out.set(base + schedule.key_digit(key, 0));
                }
                continue;
            }
            let mut i = 0;
            while i < keys.len() {
                let parent = schedule.key_prefix(keys[i], level - 1);
                let base = out.len();
                out.push_zeros(k2);
                while i < keys.len() && schedule.key_prefix(keys[i], level - 1) == parent {
                    out.set(base + schedule.key_digit(keys[i], level));
                    i += 1;
                }
            }
        }
        let t = t.finish();
        let l = l.finish_with(None);
        let layout = Layout::compute(&schedule, 1, &t, l.len())?;
        Ok(K2Tree {
            schedule,
            t,
            l,
            nrows,
            ncols,
            ones: keys.len(),
            layout,
        })
    }

    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    pub fn t(&self) -> &BitVector {
        &self.t
    }

    pub fn l(&self) -> &BitVector {
        &self.l
    }

    pub fn nrows(&self) -> u32 {
        self.nrows
    }

    pub fn ncols(&self) -> u32 {
        self.ncols
    }

    /// Number of ones in the relation.
    pub fn len(&self) -> usize {
        self.ones
    }

    pub fn is_empty(&self) -> bool {
        self.ones == 0
    }

    /// |T| + |L| in bits.
    pub fn size_bits(&self) -> usize {
        self.t.len() + self.l.len()
    }

    /// Bits per level, root first.
    pub fn level_bit_counts(&self) -> Vec<usize> {
        self.layout.starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Set bits per level, root first.
    pub fn level_ones(&self) -> Vec<usize> {
        let h = self.schedule.levels();
        (0..h)
            .map(|lv| {
                let (s, e) = (self.layout.starts[lv], self.layout.starts[lv + 1]);
                if lv + 1 < h {
                    self.t.rank(e) - self.t.rank(s)
                } else {
                    self.l.count_ones()
                }
            })
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

    /// Start (in T:L) of the child block of the set bit at `pos` in T.
    pub fn child_base(&self, pos: usize) -> Result<usize> {
        if pos >= self.t.len() {
            return Err(Error::IndexOutOfBounds {
                index: pos,
                len: self.t.len(),
            });
        }
        if !self.t.bit(pos) {
            return Err(Error::Logic(format!("bit {pos} is 0 and has no children")));
        }
        let level = self
            .layout
            .level_of(pos)
            .expect("position inside T belongs to a level");
        Ok(self
            .layout
            .child_base(&self.schedule, level, self.t.rank(pos)))
    }

    pub fn cell(&self, row: u32, col: u32) -> Result<bool> {
        if row >= self.nrows || col >= self.ncols {
            return Err(Error::input(format!("cell ({row}, {col}) out of bounds")));
        }
        let (r, c) = (row as u64, col as u64);
        let mut pos = self.schedule.digit(0, r, c) as usize;
        for level in 0..self.schedule.levels() - 1 {
            if !self.t.bit(pos) {
                return Ok(false);
            }
            let base = self
                .layout
                .child_base(&self.schedule, level, self.t.rank(pos));
            pos = base + self.schedule.digit(level + 1, r, c) as usize;
        }
        Ok(self.bit(pos))
    }

    /// Ones inside `rows × cols`, sorted row-major.
    pub fn query(
        &self,
        rows: RangeInclusive<u32>,
        cols: RangeInclusive<u32>,
    ) -> Result<Vec<(u32, u32)>> {
        let mut out = Vec::new();
        self.query_into(rows, cols, &mut out)?;
        out.sort_unstable();
        Ok(out)
    }

    /// Like [`query`](Self::query) but appends in traversal order without sorting.
    pub fn query_into(
        &self,
        rows: RangeInclusive<u32>,
        cols: RangeInclusive<u32>,
        out: &mut Vec<(u32, u32)>,
    ) -> Result<()> {
        check_span(&rows, self.nrows, "row")?;
        check_span(&cols, self.ncols, "column")?;
        let rect = Rect {
            r: (*rows.start() as u64, *rows.end() as u64),
            c: (*cols.start() as u64, *cols.end() as u64),
        };
        self.visit(0, 0, 0, 0, &rect, true, out);
        Ok(())
    }

    pub fn pairs(&self) -> Vec<(u32, u32)> {
        if self.nrows == 0 || self.ncols == 0 {
            return Vec::new();
        }
        self.query(0..=self.nrows - 1, 0..=self.ncols - 1)
            .expect("full rectangle is valid")
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &self,
        level: usize,
        base: usize,
        r0: u64,
        c0: u64,
        rect: &Rect,
        prune: bool,
        out: &mut Vec<(u32, u32)>,
    ) {
        let k = self.schedule.k(level) as u64;
        let cs = self.schedule.cell_side(level);
        let last = level + 1 == self.schedule.levels();
        let ((dr0, dr1), (dc0, dc1)) = if prune {
            (
                self.schedule.digit_span(level, r0, rect.r.0, rect.r.1),
                self.schedule.digit_span(level, c0, rect.c.0, rect.c.1),
            )
        } else {
            ((0, k - 1), (0, k - 1))
        };
        for dr in dr0..=dr1 {
            for dc in dc0..=dc1 {
                let pos = base + (dr * k + dc) as usize;
                let (r, c) = (r0 + dr * cs, c0 + dc * cs);
                if last {
                    if self.l.bit(pos - self.t.len()) && rect.contains(r, c) {
                        out.push((r as u32, c as u32));
                    }
                } else if self.t.bit(pos) {
                    let child = self
                        .layout
                        .child_base(&self.schedule, level, self.t.rank(pos));
                    self.visit(level + 1, child, r, c, rect, prune, out);
                }
            }
        }
    }
}

struct Rect {
    r: (u64, u64),
    c: (u64, u64),
}

impl Rect {
    fn contains(&self, r: u64, c: u64) -> bool {
        (self.r.0..=self.r.1).contains(&r) && (self.c.0..=self.c.1).contains(&c)
    }
}

pub(crate) fn check_span(span: &RangeInclusive<u32>, dim: u32, what: &str) -> Result<()> {
    if span.start() > span.end() {
        return Err(Error::input(format!(
            "inverted {what} range {}..={}",
            span.start(),
            span.end()
        )));
    }
    if *span.end() >= dim {
        return Err(Error::input(format!(
            "{what} range {}..={} outside dimension {dim}",
            span.start(),
            span.end()
        )));
    }
    Ok(())
}
