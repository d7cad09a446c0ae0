//! Two-phase evaluation for unbounded partition values.
//!
//! Going down, a node only needs its set-bit count (two ranks) to size its
//! children. Results are found at the leaves with a *relative* value: the bit
//! position inside the leaf. On the way back up, sibling result lists are
//! combined in relative-value order and each relative value `j` is mapped to the
//! position of the `j`-th set bit of the parent. Lists are sorted by `j`, so
//! this is a single forward select pass per node. At level 0 the position is
//! the actual partition value.

use super::{Constraint, IK2Tree, Triple, TriplePattern};
use crate::error::{Error, Result};

/// `(relative value, x, z)`; lists are kept sorted in this order.
type Rel = (u32, u32, u32);

struct Rect {
    x: (u64, u64),
    z: (u64, u64),
}

impl IK2Tree {
    /// Same results as [`query_eager`](Self::query_eager) for patterns whose
    /// `y` is `Any` or a range. Ranges are evaluated unbounded and filtered.
    pub fn query_lazy(&self, pattern: &TriplePattern) -> Result<Vec<Triple>> {
        if let Constraint::Fixed(_) = pattern.y {
            return Err(Error::UnsupportedStrategy("a fixed partition value"));
        }
        self.validate_pattern(pattern)?;
        let (Some(x), Some(z), Some(_)) = (
            pattern.x.bounds(self.nx),
            pattern.z.bounds(self.nz),
            pattern.y.bounds(self.ysize),
        ) else {
            return Ok(Vec::new());
        };
        let rect = Rect {
            x: (x.0 as u64, x.1 as u64),
            z: (z.0 as u64, z.1 as u64),
        };
        let width = self.ysize as usize;
        let s = &self.schedule;
        let k = s.k(0) as u64;
        let cs = s.cell_side(0);
        let (dr0, dr1) = s.digit_span(0, 0, rect.x.0, rect.x.1);
        let (dc0, dc1) = s.digit_span(0, 0, rect.z.0, rect.z.1);
        let mut buf = Vec::new();
        let mut out = Vec::new();
        for dr in dr0..=dr1 {
            for dc in dc0..=dc1 {
                let start = (dr * k + dc) as usize * width;
                buf.clear();
                self.lazy_node(0, start, width, dr * cs, dc * cs, &rect, &mut buf);
                // positions within a level-0 node are the partition values
                for &(y, x, z) in &buf {
                    if pattern.y.matches(y) {
                        out.push(Triple::new(x, y, z));
                    }
                }
            }
        }
        out.sort_unstable_by_key(Triple::xzy);
        Ok(out)
    }

    /// Appends the results under one node to `buf`, sorted, as bit positions
    /// within that node.
    #[allow(clippy::too_many_arguments)]
    fn lazy_node(&self, level: usize, start: usize, width: usize, r: u64, c: u64, rect: &Rect, buf: &mut Vec<Rel>) {
        if self.is_last(level) {
            let s = start - self.l_offset();
            buf.extend(self.l.ones_in(s, s + width).map(|p| ((p - s) as u32, r as u32, c as u32)));
            return;
        }
        let (rs, m) = self.node_count(start, width);
        if m == 0 {
            return;
        }
        let base = self.child_start(level, rs);
        let s = &self.schedule;
        let next = level + 1;
        let k = s.k(next) as u64;
        let cs = s.cell_side(next);
        let (dr0, dr1) = s.digit_span(next, r, rect.x.0, rect.x.1);
        let (dc0, dc1) = s.digit_span(next, c, rect.z.0, rect.z.1);
        let mark = buf.len();
        let mut runs = 0;
        for dr in dr0..=dr1 {
            for dc in dc0..=dc1 {
                let child = base + (dr * k + dc) as usize * m;
                let before = buf.len();
                self.lazy_node(next, child, m, r + dr * cs, c + dc * cs, rect, buf);
                runs += (buf.len() > before) as usize;
            }
        }
        let mine = &mut buf[mark..];
        if runs > 1 {
            mine.sort_unstable();
        }
        // relative value j (0-based) -> position of the (j+1)-th set bit here
        let mut sel = self.t_bits().select_from(start);
        for rel in mine {
            rel.0 = (sel.nth(rel.0 as usize) - start) as u32;
        }
    }
}
