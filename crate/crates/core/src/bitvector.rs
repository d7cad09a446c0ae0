//! Plain bit sequence with a sampled rank directory.
//!
//! Ranks are half-open: `rank1(i)` counts the set bits in `[0, i)`. Select is
//! one-based: `select1(j)` returns the position of the `j`-th set bit.
//! Select is answered by binary search over the rank samples followed by an
//! in-word scan; there is no separate select directory.

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Default rank sampling rate in bits: one absolute count per 512-bit block.
pub const DEFAULT_RANK_SAMPLE: usize = 512;

#[derive(Clone)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    /// Words per rank block, 0 when no directory is kept.
    block_words: usize,
    /// `ranks[b]` = set bits before block `b`; one trailing sentinel.
    ranks: Vec<u64>,
}

impl BitVector {
    /// Builds a bitvector with the default rank directory.
    pub fn build<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitVecBuilder::new();
        for bit in bits {
            b.push(bit);
        }
        b.finish()
    }

    /// Wraps packed words (LSB-first) holding `len` bits. Bits past `len` in the
    /// last word must be zero.
    pub fn from_words(words: Vec<u64>, len: usize, rank_sample: Option<usize>) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(WORD_BITS));
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        let mut bv = BitVector {
            words,
            len,
            ones,
            block_words: 0,
            ranks: Vec::new(),
        };
        if let Some(sample) = rank_sample {
            bv.build_directory(sample);
        }
        bv
    }

    fn build_directory(&mut self, sample: usize) {
        assert!(
            sample >= WORD_BITS && sample.is_multiple_of(WORD_BITS),
            "rank sample must be a positive multiple of {WORD_BITS} bits"
        );
        let block_words = sample / WORD_BITS;
        let nblocks = self.words.len().div_ceil(block_words);
        let mut ranks = Vec::with_capacity(nblocks + 1);
        let mut acc = 0u64;
        for chunk in self.words.chunks(block_words) {
            ranks.push(acc);
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        ranks.push(acc);
        self.block_words = block_words;
        self.ranks = ranks;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total number of set bits.
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn has_rank_support(&self) -> bool {
        self.block_words != 0
    }

    /// Size of the rank directory in bits.
    pub fn directory_bits(&self) -> usize {
        self.ranks.len() * 64
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> Result<bool> {
        if i >= self.len {
            return Err(Error::IndexOutOfBounds {
                index: i,
                len: self.len,
            });
        }
        Ok(self.bit(i))
    }

    #[inline]
    pub(crate) fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// Number of set bits in `[0, i)`.
    pub fn rank1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::IndexOutOfBounds {
                index: i,
                len: self.len,
            });
        }
        Ok(self.rank(i))
    }

    #[inline]
    pub(crate) fn rank(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        if self.block_words == 0 {
            return self.count_range(0, i);
        }
        let word = i / WORD_BITS;
        let block = word / self.block_words;
        let mut r = self.ranks[block] as usize;
        for w in &self.words[block * self.block_words..word] {
            r += w.count_ones() as usize;
        }
        let rem = i % WORD_BITS;
        if rem != 0 {
            r += (self.words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    /// Position of the `j`-th set bit (`j` is one-based).
    pub fn select1(&self, j: usize) -> Result<usize> {
        if j == 0 || j > self.ones {
            return Err(Error::NotFound {
                ordinal: j,
                ones: self.ones,
            });
        }
        Ok(self.select(j))
    }

    pub(crate) fn select(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.ones);
        let (mut word, mut remaining) = if self.block_words == 0 {
            (0, j)
        } else {
            // last block whose preceding count is < j
            let nblocks = self.ranks.len() - 1;
            let (mut lo, mut hi) = (0usize, nblocks);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if (self.ranks[mid] as usize) < j {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo * self.block_words, j - self.ranks[lo] as usize)
        };
        loop {
            let pc = self.words[word].count_ones() as usize;
            if remaining <= pc {
                return word * WORD_BITS + select_in_word(self.words[word], remaining);
            }
            remaining -= pc;
            word += 1;
        }
    }

    /// Set bits in `[start, end)` by direct popcount, independent of the directory.
    pub(crate) fn count_range(&self, start: usize, end: usize) -> usize {
        debug_assert!(start <= end && end <= self.len);
        if start == end {
            return 0;
        }
        let (sw, ew) = (start / WORD_BITS, (end - 1) / WORD_BITS);
        let head = !0u64 << (start % WORD_BITS);
        let tail = !0u64 >> (WORD_BITS - 1 - (end - 1) % WORD_BITS);
        if sw == ew {
            return (self.words[sw] & head & tail).count_ones() as usize;
        }
        let mut c = (self.words[sw] & head).count_ones() as usize;
        for w in &self.words[sw + 1..ew] {
            c += w.count_ones() as usize;
        }
        c + (self.words[ew] & tail).count_ones() as usize
    }

    /// Positions of set bits in `[start, end)`, ascending.
    pub(crate) fn ones_in(&self, start: usize, end: usize) -> OnesIter<'_> {
        debug_assert!(start <= end && end <= self.len);
        let word_idx = start / WORD_BITS;
        let current = if start < end {
            self.words[word_idx] & (!0u64 << (start % WORD_BITS))
        } else {
            0
        };
        OnesIter {
            words: &self.words,
            word_idx,
            current,
            end,
        }
    }

    /// Cursor answering "position of the `j`-th set bit at or after `start`"
    /// for non-decreasing `j`.
    pub(crate) fn select_from(&self, start: usize) -> SelectCursor<'_> {
        let word = start / WORD_BITS;
        let first = if start < self.len {
            self.words[word] & (!0u64 << (start % WORD_BITS))
        } else {
            0
        };
        SelectCursor {
            words: &self.words,
            word,
            current: first,
            before: 0,
        }
    }

    /// Bits packed least-significant-bit first, zero padded to a byte boundary.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect()
    }

    /// Inverse of [`to_packed_bytes`](Self::to_packed_bytes). Rejects payloads
    /// of the wrong size or with non-zero padding.
    pub fn from_packed_bytes(bytes: &[u8], len: usize, rank_sample: Option<usize>) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::format(format!(
                "bit payload of {} bytes does not hold {len} bits",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; len.div_ceil(WORD_BITS)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if !len.is_multiple_of(WORD_BITS) {
            if let Some(last) = words.last() {
                if last >> (len % WORD_BITS) != 0 {
                    return Err(Error::format("non-zero padding bits"));
                }
            }
        }
        Ok(BitVector::from_words(words, len, rank_sample))
    }
}

impl PartialEq for BitVector {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for BitVector {}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len <= 256 {
            let s: String = (0..self.len)
                .map(|i| if self.bit(i) { '1' } else { '0' })
                .collect();
            write!(f, "BitVector({s})")
        } else {
            write!(f, "BitVector(len={}, ones={})", self.len, self.ones)
        }
    }
}

#[inline]
fn select_in_word(mut w: u64, mut r: usize) -> usize {
    while r > 1 {
        w &= w - 1;
        r -= 1;
    }
    w.trailing_zeros() as usize
}

pub(crate) struct SelectCursor<'a> {
    words: &'a [u64],
    word: usize,
    /// current word, bits before the cursor start masked off
    current: u64,
    /// set bits counted in earlier words
    before: usize,
}

impl SelectCursor<'_> {
    /// Position of the set bit with 0-based ordinal `j` counted from the
    /// cursor start. Successive calls must not decrease `j`.
    #[inline]
    pub(crate) fn nth(&mut self, j: usize) -> usize {
        loop {
            let pc = self.current.count_ones() as usize;
            if j < self.before + pc {
                return self.word * WORD_BITS + select_in_word(self.current, j - self.before + 1);
            }
            self.before += pc;
            self.word += 1;
            self.current = self.words[self.word];
        }
    }
}

pub(crate) struct OnesIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
    end: usize,
}

impl Iterator for OnesIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let pos = self.word_idx * WORD_BITS + self.current.trailing_zeros() as usize;
                if pos >= self.end {
                    return None;
                }
                self.current &= self.current - 1;
                return Some(pos);
            }
            self.word_idx += 1;
            if self.word_idx * WORD_BITS >= self.end {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

/// Append-only construction buffer.
#[derive(Debug, Default, Clone)]
pub struct BitVecBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVecBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % WORD_BITS);
        }
        self.len += 1;
    }

    pub fn push_zeros(&mut self, n: usize) {
        self.len += n;
        self.words.resize(self.len.div_ceil(WORD_BITS), 0);
    }

    /// Sets an already pushed bit.
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "set({i}) past builder length {}", self.len);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    pub fn finish(self) -> BitVector {
        self.finish_with(Some(DEFAULT_RANK_SAMPLE))
    }

    pub fn finish_with(self, rank_sample: Option<usize>) -> BitVector {
        BitVector::from_words(self.words, self.len, rank_sample)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn scan_rank(bits: &[bool], i: usize) -> usize {
        bits[..i].iter().filter(|&&b| b).count()
    }

    #[test]
    fn select_cursor_matches_select() {
        let mut rng = StdRng::seed_from_u64(77);
        let bv = BitVector::build((0..5000).map(|_| rng.gen_bool(0.2)));
        for start in [0usize, 1, 63, 64, 700, 2049] {
            let base = bv.rank(start);
            let total = bv.count_ones() - base;
            let mut cur = bv.select_from(start);
            let mut j = 0;
            while j < total {
                assert_eq!(cur.nth(j), bv.select(base + j + 1), "start {start}, j {j}");
                j += rng.gen_range(0..4);
            }
        }
    }

    #[test]
    fn empty() {
        let bv = BitVector::build([]);
        assert_eq!(bv.len(), 0);
        assert_eq!(bv.count_ones(), 0);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert!(bv.get(0).is_err());
        assert!(matches!(bv.select1(1), Err(Error::NotFound { .. })));
    }

    #[test]
    fn small_examples() {
        let bv = BitVector::build([true, false, true, true]);
        assert_eq!(bv.len(), 4);
        assert_eq!(bv.rank1(4).unwrap(), 3);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert!(!bv.get(1).unwrap());
        assert!(bv.get(3).unwrap());
        assert!(matches!(
            bv.get(4),
            Err(Error::IndexOutOfBounds { index: 4, len: 4 })
        ));
        assert!(bv.rank1(5).is_err());
        assert_eq!(bv.select1(2).unwrap(), 2);
        assert!(matches!(bv.select1(4), Err(Error::NotFound { .. })));
        assert!(bv.select1(0).is_err());
    }

    #[test]
    fn random_10k_matches_scan() {
        let mut rng = StdRng::seed_from_u64(7);
        let bits: Vec<bool> = (0..10_000).map(|_| rng.gen_bool(0.3)).collect();
        let bv = BitVector::build(bits.iter().copied());
        let mut r = 0;
        for i in 0..=bits.len() {
            assert_eq!(bv.rank1(i).unwrap(), r, "rank1({i})");
            if i < bits.len() {
                assert_eq!(bv.get(i).unwrap(), bits[i]);
                if bits[i] {
                    r += 1;
                    assert_eq!(bv.select1(r).unwrap(), i);
                }
            }
        }
        assert_eq!(r, bv.count_ones());
    }

    #[test]
    fn large_random_against_scan() {
        let mut rng = StdRng::seed_from_u64(99);
        let n = 1_000_000;
        let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.05)).collect();
        let bv = BitVector::build(bits.iter().copied());
        let mut r = 0;
        for (i, &b) in bits.iter().enumerate() {
            if i % 997 == 0 {
                assert_eq!(bv.rank(i), r);
            }
            if b {
                r += 1;
                if r % 13 == 0 {
                    assert_eq!(bv.select(r), i);
                }
            }
        }
        assert_eq!(bv.rank(n), r);
    }

    #[test]
    fn directory_overhead_at_default_rate() {
        let bv = BitVector::from_words(vec![0; 1 << 14], 1 << 20, Some(DEFAULT_RANK_SAMPLE));
        assert!(bv.directory_bits() * 4 <= bv.len());
    }

    #[test]
    fn no_directory_still_answers() {
        let bits: Vec<bool> = (0..300).map(|i| i % 7 == 0).collect();
        let b = {
            let mut b = BitVecBuilder::new();
            bits.iter().for_each(|&x| b.push(x));
            b.finish_with(None)
        };
        assert!(!b.has_rank_support());
        assert_eq!(b.rank1(300).unwrap(), scan_rank(&bits, 300));
        assert_eq!(b.select1(3).unwrap(), 14);
    }

    #[test]
    fn packed_bytes_reject_padding() {
        assert!(BitVector::from_packed_bytes(&[0b1111_0000], 4, None).is_err());
        assert!(BitVector::from_packed_bytes(&[0, 0], 4, None).is_err());
        let bv = BitVector::from_packed_bytes(&[0b0000_1101], 4, None).unwrap();
        assert_eq!(bv, BitVector::build([true, false, true, true]));
    }

    proptest! {
        #[test]
        fn rank_select_agree_with_scan(
            bits in proptest::collection::vec(any::<bool>(), 0..3000),
            sample in 1usize..5,
        ) {
            let mut b = BitVecBuilder::new();
            bits.iter().for_each(|&x| b.push(x));
            let bv = b.finish_with(Some(sample * 64));
            for i in 0..=bits.len() {
                prop_assert_eq!(bv.rank1(i).unwrap(), scan_rank(&bits, i));
            }
            for (p, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
                prop_assert_eq!(bv.select1(bv.rank(p) + 1).unwrap(), p);
            }
            for i in 0..bits.len() {
                prop_assert_eq!(bv.get(i).unwrap() as usize, bv.rank(i + 1) - bv.rank(i));
            }
        }

        #[test]
        fn range_counts_and_ones_iter(
            bits in proptest::collection::vec(any::<bool>(), 1..700),
            a in 0usize..700, b in 0usize..700,
        ) {
            let bv = BitVector::build(bits.iter().copied());
            let (lo, hi) = (a.min(b) % (bits.len() + 1), a.max(b) % (bits.len() + 1));
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            let expect: Vec<usize> = (lo..hi).filter(|&i| bits[i]).collect();
            prop_assert_eq!(bv.count_range(lo, hi), expect.len());
            prop_assert_eq!(bv.ones_in(lo, hi).collect::<Vec<_>>(), expect);
        }

        #[test]
        fn packed_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..500)) {
            let bv = BitVector::build(bits.iter().copied());
            let back = BitVector::from_packed_bytes(&bv.to_packed_bytes(), bv.len(), Some(512)).unwrap();
            prop_assert_eq!(back, bv);
        }
    }
}
