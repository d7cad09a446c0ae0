//! `IK2X` index file format.
//!
//! ```text
//! "IK2X" | version: u8 | mode: u8
//! nx, ysize, nz, levels, K × levels, l_rank (0/1), |T| bits, |L| bits   (u64 LE each)
//! T payload | L payload   (LSB-first packed bits, zero padded to a byte)
//! ```
//!
//! Rank directories are rebuilt on load.

use std::io::{Read, Write};

use crate::bitvector::{BitVector, DEFAULT_RANK_SAMPLE};
use crate::error::{Error, Result};
use crate::ik2tree::IK2Tree;
use crate::schedule::LevelSchedule;

pub const MAGIC: &[u8; 4] = b"IK2X";
pub const VERSION: u8 = 1;

/// What the stored tree represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexMode {
    Plain = 0,
    Rdf = 1,
    Temporal = 2,
}

impl IndexMode {
    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(IndexMode::Plain),
            1 => Ok(IndexMode::Rdf),
            2 => Ok(IndexMode::Temporal),
            _ => Err(Error::format(format!("unknown index mode {b}"))),
        }
    }
}

pub fn encode(mode: IndexMode, tree: &IK2Tree) -> Vec<u8> {
    let ks = tree.schedule().ks();
    let mut out = Vec::with_capacity(64 + tree.size_bits() / 8);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(mode as u8);
    let mut put = |v: u64| out.extend_from_slice(&v.to_le_bytes());
    put(tree.nx() as u64);
    put(tree.ysize() as u64);
    put(tree.nz() as u64);
    put(ks.len() as u64);
    for &k in ks {
        put(k as u64);
    }
    put(tree.l_rank_enabled() as u64);
    put(tree.t().len() as u64);
    put(tree.l().len() as u64);
    out.extend_from_slice(&tree.t().to_packed_bytes());
    out.extend_from_slice(&tree.l().to_packed_bytes());
    out
}

pub fn write_to<W: Write>(mut w: W, mode: IndexMode, tree: &IK2Tree) -> Result<()> {
    w.write_all(&encode(mode, tree))?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32_field(&mut self, what: &str) -> Result<u32> {
        let v = self.u64()?;
        u32::try_from(v).map_err(|_| Error::format(format!("{what} {v} too large")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<(IndexMode, IK2Tree)> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::format("bad magic"));
    }
    let version = c.take(1)?[0];
    if version != VERSION {
        return Err(Error::format(format!("unsupported version {version}")));
    }
    let mode = IndexMode::from_byte(c.take(1)?[0])?;
    let nx = c.u32_field("nx")?;
    let ysize = c.u32_field("ysize")?;
    let nz = c.u32_field("nz")?;
    let levels = c.u64()?;
    if !(2..=64).contains(&levels) {
        return Err(Error::format(format!("implausible level count {levels}")));
    }
    let ks = (0..levels)
        .map(|_| c.u32_field("K"))
        .collect::<Result<Vec<_>>>()?;
    let schedule = LevelSchedule::new(ks).map_err(|e| Error::format(e.to_string()))?;
    let l_rank = match c.u64()? {
        0 => false,
        1 => true,
        v => return Err(Error::format(format!("rank flag {v} is not 0/1"))),
    };
    let t_len = c.u64()? as usize;
    let l_len = c.u64()? as usize;
    let t = BitVector::from_packed_bytes(c.take(t_len.div_ceil(8))?, t_len, Some(DEFAULT_RANK_SAMPLE))?;
    let l = BitVector::from_packed_bytes(
        c.take(l_len.div_ceil(8))?,
        l_len,
        l_rank.then_some(DEFAULT_RANK_SAMPLE),
    )?;
    if c.pos != bytes.len() {
        return Err(Error::format(format!(
            "{} trailing bytes",
            bytes.len() - c.pos
        )));
    }
    if mode == IndexMode::Temporal && !l_rank {
        return Err(Error::format("temporal index without rank support on L"));
    }
    let tree = IK2Tree::from_parts(schedule, nx, ysize, nz, t, l)?;
    Ok((mode, tree))
}

pub fn read_from<R: Read>(mut r: R) -> Result<(IndexMode, IK2Tree)> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    decode(&buf)
}

impl IK2Tree {
    /// `IK2X` bytes in plain mode.
    pub fn to_bytes(&self) -> Vec<u8> {
        encode(IndexMode::Plain, self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<IK2Tree> {
        decode(bytes).map(|(_, t)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ik2tree::fixtures::{sample, k2_8};
    use crate::ik2tree::{Triple, TriplePattern};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    #[test]
    fn empty_round_trip() {
        let tree = IK2Tree::build(&[], 8, 3, 8, k2_8(), false).unwrap();
        assert_eq!(IK2Tree::from_bytes(&tree.to_bytes()).unwrap(), tree);
    }

    #[test]
    fn sample_round_trip_and_layout() {
        let tree = IK2Tree::build(&sample(), 8, 3, 8, k2_8(), false).unwrap();
        let bytes = tree.to_bytes();
        assert_eq!(&bytes[..6], b"IK2X\x01\x00");
        // header: 6 + 8 × (3 dims + level count + 3 K + flag + 2 lengths)
        assert_eq!(bytes.len(), 6 + 8 * 10 + 40 / 8 + 32 / 8);
        let back = IK2Tree::from_bytes(&bytes).unwrap();
        assert_eq!(back.t(), tree.t());
        assert_eq!(back.l(), tree.l());
        assert_eq!(back, tree);
    }

    #[test]
    fn large_round_trip_queries() {
        let mut rng = StdRng::seed_from_u64(2);
        let triples: Vec<Triple> = (0..100_000)
            .map(|_| Triple::new(rng.gen_range(0..3000), rng.gen_range(0..40), rng.gen_range(0..3000)))
            .collect();
        let sched = LevelSchedule::hybrid(3000).unwrap();
        let tree = IK2Tree::build(&triples, 3000, 40, 3000, sched, true).unwrap();
        let back = IK2Tree::from_bytes(&tree.to_bytes()).unwrap();
        assert!(back.l_rank_enabled());
        assert_eq!(back.triples(), tree.triples());
        let p = TriplePattern::new(
            crate::ik2tree::Constraint::Range(100, 900),
            crate::ik2tree::Constraint::Any,
            crate::ik2tree::Constraint::Fixed(17),
        );
        assert_eq!(back.query_eager(&p).unwrap(), tree.query_eager(&p).unwrap());
    }

    #[test]
    fn rejects_corruption() {
        let tree = IK2Tree::build(&sample(), 8, 3, 8, k2_8(), false).unwrap();
        let good = tree.to_bytes();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(IK2Tree::from_bytes(&bad), Err(Error::Format(_))));

        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(IK2Tree::from_bytes(&bad), Err(Error::Format(_))));

        for cut in [3, 10, good.len() - 1] {
            assert!(matches!(IK2Tree::from_bytes(&good[..cut]), Err(Error::Format(_))));
        }

        let mut bad = good.clone();
        bad.push(0);
        assert!(matches!(IK2Tree::from_bytes(&bad), Err(Error::Format(_))));

        // flip a T bit: level sizes no longer add up
        let mut bad = good.clone();
        let t_at = 6 + 80;
        bad[t_at] ^= 0b10;
        assert!(matches!(IK2Tree::from_bytes(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn temporal_mode_requires_rank() {
        let tree = IK2Tree::build(&sample(), 8, 3, 8, k2_8(), false).unwrap();
        let bytes = encode(IndexMode::Temporal, &tree);
        assert!(decode(&bytes).is_err());
    }
}
