use crate::error::{Error, Result};

/// Largest padded side accepted; keeps cell path keys within a `u64`.
pub const MAX_SIDE: u64 = 1 << 32;

/// Per-level branching factors of a k²-tree. Level 0 is the root level.
///
/// The matrix is virtually padded to `side = ∏ K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelSchedule {
    ks: Vec<u32>,
    side: u64,
    /// `cell_sides[l]` = side of the submatrix covered by one node at level `l`.
    cell_sides: Vec<u64>,
    /// `digit_weights[l]` = ∏_{m>l} K_m², the weight of level `l` in a path key.
    digit_weights: Vec<u64>,
}

impl LevelSchedule {
    pub fn new(ks: Vec<u32>) -> Result<Self> {
        if ks.len() < 2 {
            return Err(Error::input("a schedule needs at least two levels"));
        }
        if let Some(k) = ks.iter().find(|&&k| k < 2) {
            return Err(Error::input(format!("branching factor {k} < 2")));
        }
        let mut side: u64 = 1;
        for &k in &ks {
            side = side
                .checked_mul(k as u64)
                .filter(|&s| s <= MAX_SIDE)
                .ok_or_else(|| Error::input(format!("schedule side exceeds {MAX_SIDE}")))?;
        }
        let h = ks.len();
        let mut cell_sides = vec![1u64; h];
        let mut digit_weights = vec![1u64; h];
        for l in (0..h - 1).rev() {
            let k = ks[l + 1] as u64;
            cell_sides[l] = cell_sides[l + 1] * k;
            digit_weights[l] = digit_weights[l + 1] * k * k;
        }
        Ok(LevelSchedule {
            ks,
            side,
            cell_sides,
            digit_weights,
        })
    }

    /// Smallest uniform schedule (at least two levels) whose side covers `n`.
    pub fn uniform(k: u32, n: u64) -> Result<Self> {
        Self::extend(&[k], n)
    }

    /// Uses `prefix` for the first levels and repeats its last factor until the
    /// side covers `n`.
    pub fn extend(prefix: &[u32], n: u64) -> Result<Self> {
        let last = *prefix
            .last()
            .ok_or_else(|| Error::input("empty branching-factor list"))?;
        if last < 2 {
            return Err(Error::input(format!("branching factor {last} < 2")));
        }
        let mut ks = prefix.to_vec();
        let mut side: u64 = ks.iter().map(|&k| k as u64).product();
        while ks.len() < 2 || side < n {
            ks.push(last);
            side = side.saturating_mul(last as u64);
        }
        Self::new(ks)
    }

    /// K=4 for the first five levels and K=2 below, when `n` is large enough to
    /// need five K=4 levels; uniform K=2 otherwise.
    pub fn hybrid(n: u64) -> Result<Self> {
        const TOP: [u32; 5] = [4; 5];
        if n < 4u64.pow(5) {
            return Self::uniform(2, n);
        }
        let mut ks = TOP.to_vec();
        let mut side = 4u64.pow(5);
        while side < n {
            ks.push(2);
            side *= 2;
        }
        Self::new(ks)
    }

    pub fn ks(&self) -> &[u32] {
        &self.ks
    }

    #[inline]
    pub fn k(&self, level: usize) -> u32 {
        self.ks[level]
    }

    #[inline]
    pub fn k2(&self, level: usize) -> usize {
        let k = self.ks[level] as usize;
        k * k
    }

    pub fn levels(&self) -> usize {
        self.ks.len()
    }

    pub fn side(&self) -> u64 {
        self.side
    }

    #[inline]
    pub fn cell_side(&self, level: usize) -> u64 {
        self.cell_sides[level]
    }

    /// Child index of cell `(row, col)` within its level-`level` block,
    /// numbered left to right, top to bottom.
    #[inline]
    pub fn digit(&self, level: usize, row: u64, col: u64) -> u64 {
        let k = self.ks[level] as u64;
        let s = self.cell_sides[level];
        ((row / s) % k) * k + (col / s) % k
    }

    /// Mixed-radix path of a cell; sorting by key gives level order at every depth.
    pub fn path_key(&self, row: u64, col: u64) -> u64 {
        (0..self.ks.len())
            .map(|l| self.digit(l, row, col) * self.digit_weights[l])
            .sum()
    }

    /// Digit of `key` at `level`.
    #[inline]
    pub(crate) fn key_digit(&self, key: u64, level: usize) -> usize {
        ((key / self.digit_weights[level]) % self.k2(level) as u64) as usize
    }

    /// Path prefix through `level` inclusive.
    #[inline]
    pub(crate) fn key_prefix(&self, key: u64, level: usize) -> u64 {
        key / self.digit_weights[level]
    }

    /// Row or column digits of a child block intersecting `[lo, hi]`, given the
    /// parent origin coordinate.
    #[inline]
    pub(crate) fn digit_span(&self, level: usize, origin: u64, lo: u64, hi: u64) -> (u64, u64) {
        let s = self.cell_sides[level];
        let k = self.ks[level] as u64;
        let first = lo.saturating_sub(origin) / s;
        let last = ((hi - origin) / s).min(k - 1);
        (first, last)
    }
}
