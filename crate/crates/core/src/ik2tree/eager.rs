//! Top-down evaluation that tracks partition values at every node.

use super::{Constraint, IK2Tree, Triple, TriplePattern};
use crate::error::Result;

struct Rect {
    x: (u64, u64),
    z: (u64, u64),
}

impl IK2Tree {
    /// Triples matching `pattern`, sorted `(x, z, y)`.
    pub fn query_eager(&self, pattern: &TriplePattern) -> Result<Vec<Triple>> {
        self.validate_pattern(pattern)?;
        let mut out = Vec::new();
        let (Some(x), Some(z), Some(y)) = (
            pattern.x.bounds(self.nx),
            pattern.z.bounds(self.nz),
            pattern.y.bounds(self.ysize),
        ) else {
            return Ok(out);
        };
        let rect = Rect {
            x: (x.0 as u64, x.1 as u64),
            z: (z.0 as u64, z.1 as u64),
        };
        let width = self.ysize as usize;
        match pattern.y {
            Constraint::Fixed(v) => self.fixed(0, 0, width, 0, 0, v as usize, v, &rect, &mut out),
            _ => {
                let active: Vec<u32> = (y.0..=y.1).collect();
                self.window(0, 0, width, 0, 0, y.0 as usize, &active, &rect, &mut out)
            }
        }
        out.sort_unstable_by_key(Triple::xzy);
        Ok(out)
    }

    /// Visits a block of sibling nodes of `width` bits starting at `base`,
    /// following the single bit at `offset` in each.
    #[allow(clippy::too_many_arguments)]
    fn fixed(
        &self,
        level: usize,
        base: usize,
        width: usize,
        r0: u64,
        c0: u64,
        offset: usize,
        y: u32,
        rect: &Rect,
        out: &mut Vec<Triple>,
    ) {
        let s = &self.schedule;
        let k = s.k(level) as u64;
        let cs = s.cell_side(level);
        let (dr0, dr1) = s.digit_span(level, r0, rect.x.0, rect.x.1);
        let (dc0, dc1) = s.digit_span(level, c0, rect.z.0, rect.z.1);
        let last = self.is_last(level);
        let t = self.t_bits();
        for dr in dr0..=dr1 {
            for dc in dc0..=dc1 {
                let start = base + (dr * k + dc) as usize * width;
                let (r, c) = (r0 + dr * cs, c0 + dc * cs);
                if last {
                    if self.l.bit(start - self.l_offset() + offset) {
                        out.push(Triple::new(r as u32, y, c as u32));
                    }
                } else if t.bit(start + offset) {
                    let (rs, m) = self.node_count(start, width);
                    let child_offset = t.rank(start + offset) - rs;
                    let child = self.child_start(level, rs);
                    self.fixed(level + 1, child, m, r, c, child_offset, y, rect, out);
                }
            }
        }
    }

    /// Visits a block of sibling nodes following the bit window
    /// `[lo, lo + active.len())`; `active[i]` is the value of window bit `i`.
    #[allow(clippy::too_many_arguments)]
    fn window(
        &self,
        level: usize,
        base: usize,
        width: usize,
        r0: u64,
        c0: u64,
        lo: usize,
        active: &[u32],
        rect: &Rect,
        out: &mut Vec<Triple>,
    ) {
        let s = &self.schedule;
        let k = s.k(level) as u64;
        let cs = s.cell_side(level);
        let (dr0, dr1) = s.digit_span(level, r0, rect.x.0, rect.x.1);
        let (dc0, dc1) = s.digit_span(level, c0, rect.z.0, rect.z.1);
        let hi = lo + active.len();
        let t = self.t_bits();
        if self.is_last(level) {
            let off = self.l_offset();
            for dr in dr0..=dr1 {
                for dc in dc0..=dc1 {
                    let start = base + (dr * k + dc) as usize * width - off;
                    let (r, c) = ((r0 + dr * cs) as u32, (c0 + dc * cs) as u32);
                    for p in self.l.ones_in(start + lo, start + hi) {
                        out.push(Triple::new(r, active[p - start - lo], c));
                    }
                }
            }
            return;
        }
        let mut child_active = Vec::new();
        for dr in dr0..=dr1 {
            for dc in dc0..=dc1 {
                let start = base + (dr * k + dc) as usize * width;
                child_active.clear();
                child_active.extend(t.ones_in(start + lo, start + hi).map(|p| active[p - start - lo]));
                if child_active.is_empty() {
                    continue;
                }
                let (rs, m) = if hi - lo == width {
                    (t.rank(start), child_active.len())
                } else {
                    self.node_count(start, width)
                };
                let child_lo = if lo == 0 { 0 } else { t.rank(start + lo) - rs };
                let child = self.child_start(level, rs);
                let (r, c) = (r0 + dr * cs, c0 + dc * cs);
                self.window(level + 1, child, m, r, c, child_lo, &child_active, rect, out);
            }
        }
    }
}
