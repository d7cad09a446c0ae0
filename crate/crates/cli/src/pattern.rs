//! Positional query tokens.

use anyhow::{bail, Context, Result};
use ik2_core::{Constraint, TimeQuery};

/// `?` (any), `?lo-hi` (inclusive range) or a literal id.
pub fn parse_constraint(tok: &str) -> Result<Constraint> {
    if tok == "?" {
        return Ok(Constraint::Any);
    }
    if let Some(range) = tok.strip_prefix('?') {
        let (lo, hi) = range
            .split_once('-')
            .with_context(|| format!("range token {tok:?} is not ?lo-hi"))?;
        let lo: u32 = lo.parse().with_context(|| format!("bad range start in {tok:?}"))?;
        let hi: u32 = hi.parse().with_context(|| format!("bad range end in {tok:?}"))?;
        if lo > hi {
            bail!("inverted range {tok:?}");
        }
        return Ok(Constraint::Range(lo, hi));
    }
    Ok(Constraint::Fixed(
        tok.parse().with_context(|| format!("bad id {tok:?}"))?,
    ))
}

/// `t` (instant), `w:tl-tr` (weak interval) or `s:tl-tr` (strong interval).
pub fn parse_time(tok: &str) -> Result<TimeQuery> {
    let interval = |body: &str| -> Result<(u32, u32)> {
        let (a, b) = body
            .split_once('-')
            .with_context(|| format!("interval {tok:?} is not tl-tr"))?;
        Ok((a.parse()?, b.parse()?))
    };
    if let Some(body) = tok.strip_prefix("w:") {
        let (a, b) = interval(body)?;
        Ok(TimeQuery::weak(a, b))
    } else if let Some(body) = tok.strip_prefix("s:") {
        let (a, b) = interval(body)?;
        Ok(TimeQuery::strong(a, b))
    } else {
        Ok(TimeQuery::Instant(
            tok.parse().with_context(|| format!("bad time token {tok:?}"))?,
        ))
    }
}
