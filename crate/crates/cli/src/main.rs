//! `ik2`: build, query and benchmark interleaved k²-tree indexes.

mod pattern;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ik2_core::format::{self, IndexMode};
use ik2_core::ik2tree::parse_id_triples;
use ik2_core::rdf::dict_path;
use ik2_core::suite::{self, BenchRow, RdfBackends, TemporalBackends, MIN_QUERIES_PER_CLASS};
use ik2_core::temporal::parse_change_log;
use ik2_core::workload::{commnet_like, synthetic_rdf};
use ik2_core::{
    Constraint, IK2Tree, LevelSchedule, RdfDataset, RdfPattern, Strategy, StrategyChoice,
    TemporalIndex, Triple, TriplePattern,
};

#[derive(Parser)]
#[command(name = "ik2", version, about = "Interleaved k2-tree indexes for ternary relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from a text input.
    Build {
        /// Triples `x y z` (plain), `subject predicate object` (rdf) or
        /// change records `x z t` (temporal), one per line.
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Plain)]
        mode: Mode,
        /// Branching factor per level, comma separated; the last value repeats
        /// until the matrix is covered. Defaults to K=4 on the top levels and
        /// K=2 below for large inputs.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<u32>>,
    },
    /// Evaluate one pattern against an index.
    ///
    /// Plain: `x y z`, each `?`, `?lo-hi` or an id. RDF: `s p o`, each `?` or a
    /// term. Temporal: `x z when`, where `when` is `t`, `w:tl-tr` or `s:tl-tr`.
    Query {
        index: PathBuf,
        #[arg(num_args = 3)]
        pattern: Vec<String>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Print header fields and sizes of an index.
    Stats { index: PathBuf },
    /// Time a query suite against the interleaved tree and the
    /// multiple-k2-tree baseline; CSV on stdout.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Use a text input instead of the synthetic generator.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        triples: usize,
        /// Node count; 10000 for rdf-patterns, 1000 for temporal.
        #[arg(long)]
        nodes: Option<u32>,
        #[arg(long, default_value_t = 256)]
        preds: u32,
        #[arg(long, default_value_t = 10_000)]
        instants: u32,
        #[arg(long, default_value_t = 200_000)]
        contacts: usize,
        /// Longest contact, in instants.
        #[arg(long, default_value_t = 50)]
        lifetime: u32,
        /// Longest interval of weak/strong queries, in instants.
        #[arg(long, default_value_t = 100)]
        max_interval: u32,
        #[arg(long, default_value_t = MIN_QUERIES_PER_CLASS)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Plain,
    Rdf,
    Temporal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Auto,
    Eager,
    Lazy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    RdfPatterns,
    Temporal,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build { input, output, mode, k } => build(&input, &output, mode, k.as_deref()),
        Command::Query { index, pattern, strategy } => query(&index, &pattern, strategy),
        Command::Stats { index } => stats(&index),
        Command::Bench {
            suite,
            input,
            triples,
            nodes,
            preds,
            instants,
            contacts,
            lifetime,
            max_interval,
            queries,
            seed,
        } => {
            if queries < MIN_QUERIES_PER_CLASS {
                eprintln!("note: fewer than {MIN_QUERIES_PER_CLASS} queries per class");
            }
            match suite {
                Suite::RdfPatterns => {
                    bench_rdf(input.as_deref(), triples, nodes.unwrap_or(10_000), preds, queries, seed)
                }
                Suite::Temporal => bench_temporal(
                    input.as_deref(),
                    nodes.unwrap_or(1_000),
                    instants,
                    contacts,
                    lifetime,
                    max_interval,
                    queries,
                    seed,
                ),
            }
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn schedule(k: Option<&[u32]>, side: u32) -> Result<LevelSchedule> {
    Ok(match k {
        Some(ks) => LevelSchedule::extend(ks, side as u64)?,
        None => LevelSchedule::hybrid(side as u64)?,
    })
}

fn dims(triples: &[Triple]) -> (u32, u32, u32) {
    triples.iter().fold((0, 0, 0), |(x, y, z), t| {
        (x.max(t.x + 1), y.max(t.y + 1), z.max(t.z + 1))
    })
}

fn stats_line(mode: IndexMode, tree: &IK2Tree) -> String {
    let n = tree.len();
    let bits = tree.size_bits();
    let per = if n == 0 { 0.0 } else { bits as f64 / n as f64 };
    format!(
        "mode={mode:?} triples={n} nx={} ysize={} nz={} |T|={} |L|={} bits/triple={per:.3}",
        tree.nx(),
        tree.ysize(),
        tree.nz(),
        tree.t().len(),
        tree.l().len()
    )
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn build(input: &Path, output: &Path, mode: Mode, k: Option<&[u32]>) -> Result<()> {
    let text = read_text(input)?;
    let context = || format!("parsing {}", input.display());
    let (mode, tree) = match mode {
        Mode::Plain => {
            let triples = parse_id_triples(&text).with_context(context)?;
            let (nx, ysize, nz) = dims(&triples);
            let sched = schedule(k, nx.max(nz))?;
            (IndexMode::Plain, IK2Tree::build(&triples, nx, ysize, nz, sched, false)?)
        }
        Mode::Rdf => {
            let terms = ik2_core::rdf::parse_triples(&text).with_context(context)?;
            let ds = RdfDataset::from_terms(&terms, k)?;
            ds.save(output)
                .with_context(|| format!("writing {}", output.display()))?;
            println!("{}", stats_line(IndexMode::Rdf, ds.index()));
            return Ok(());
        }
        Mode::Temporal => {
            let mut changes = parse_change_log(&text).with_context(context)?;
            changes.sort_unstable();
            changes.dedup();
            let n_nodes = changes.iter().map(|c| c.x.max(c.z) + 1).max().unwrap_or(0);
            let n_instants = changes.iter().map(|c| c.t + 1).max().unwrap_or(0);
            let sched = schedule(k, n_nodes)?;
            let idx = TemporalIndex::build(&changes, n_nodes, n_instants, sched)?;
            (IndexMode::Temporal, idx.into_inner())
        }
    };
    fs::write(output, format::encode(mode, &tree))
        .with_context(|| format!("writing {}", output.display()))?;
    println!("{}", stats_line(mode, &tree));
    Ok(())
}

fn load(path: &Path) -> Result<(IndexMode, IK2Tree)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    format::decode(&bytes).with_context(|| format!("loading {}", path.display()))
}

fn query(index: &Path, toks: &[String], strategy: StrategyArg) -> Result<()> {
    if toks.len() != 3 {
        bail!("a pattern has exactly 3 tokens");
    }
    let (mode, tree) = load(index)?;
    let mut lines = String::new();
    let count = match mode {
        IndexMode::Plain => {
            let p = TriplePattern::new(
                pattern::parse_constraint(&toks[0])?,
                pattern::parse_constraint(&toks[1])?,
                pattern::parse_constraint(&toks[2])?,
            );
            let bound_y = matches!(p.y, Constraint::Fixed(_));
            let strat = match strategy {
                StrategyArg::Auto => suite::auto_strategy(&p, tree.ysize()),
                StrategyArg::Lazy if !bound_y => Strategy::Lazy,
                _ => Strategy::Eager,
            };
            let mut out = tree.query(&p, strat)?;
            out.sort_unstable();
            for t in &out {
                writeln!(lines, "{t}")?;
            }
            out.len()
        }
        IndexMode::Rdf => {
            let so = read_text(&dict_path(index, "so"))?;
            let p = read_text(&dict_path(index, "p"))?;
            let ds = RdfDataset::from_parts(
                ik2_core::Dictionary::from_text(&so)?,
                ik2_core::Dictionary::from_text(&p)?,
                tree,
            )?;
            let pat = RdfPattern::from_slots(&toks[0], &toks[1], &toks[2]);
            let choice = match strategy {
                StrategyArg::Auto => StrategyChoice::Auto,
                StrategyArg::Eager => StrategyChoice::Eager,
                StrategyArg::Lazy => StrategyChoice::Lazy,
            };
            let out = ds.evaluate(&pat, choice)?;
            for [s, p, o] in &out {
                writeln!(lines, "{s} {p} {o}")?;
            }
            out.len()
        }
        IndexMode::Temporal => {
            let idx = TemporalIndex::from_tree(tree)?;
            let out = idx.query(
                pattern::parse_constraint(&toks[0])?,
                pattern::parse_constraint(&toks[1])?,
                pattern::parse_time(&toks[2])?,
            )?;
            for (x, z) in &out {
                writeln!(lines, "{x} {z}")?;
            }
            out.len()
        }
    };
    let mut stdout = BufWriter::new(io::stdout().lock());
    stdout.write_all(lines.as_bytes())?;
    stdout.flush()?;
    eprintln!("# {count} results");
    Ok(())
}

fn stats(index: &Path) -> Result<()> {
    let (mode, tree) = load(index)?;
    println!("{}", stats_line(mode, &tree));
    println!("schedule={:?} side={}", tree.schedule().ks(), tree.schedule().side());
    println!("level_bits={:?}", tree.level_bit_counts());
    println!("ones={} l_rank={}", tree.total_ones(), tree.l_rank_enabled());
    Ok(())
}

fn print_rows(rows: &[BenchRow]) -> Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "{}", BenchRow::CSV_HEADER)?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    Ok(())
}

fn bench_rdf(input: Option<&Path>, n: usize, nodes: u32, preds: u32, queries: usize, seed: u64) -> Result<()> {
    let (triples, nodes, preds) = match input {
        Some(path) => {
            let terms = ik2_core::rdf::parse_triples(&read_text(path)?)?;
            let ds = RdfDataset::from_terms(&terms, None)?;
            let ids = ds.index().triples();
            (ids, ds.so_dict().len() as u32, ds.p_dict().len() as u32)
        }
        None => {
            if nodes == 0 || preds == 0 {
                bail!("--nodes and --preds must be positive");
            }
            (synthetic_rdf(n, nodes, preds, seed), nodes, preds)
        }
    };
    let backends = RdfBackends::build(&triples, nodes, preds)?;
    eprintln!(
        "# {} triples, {nodes} nodes, {preds} predicates; ik2tree {} bits, mk2tree {} bits",
        triples.len(),
        backends.ik2.size_bits(),
        backends.multi.size_bits()
    );
    print_rows(&suite::run_rdf_suite(&triples, &backends, queries, seed)?)
}

#[allow(clippy::too_many_arguments)]
fn bench_temporal(
    input: Option<&Path>,
    nodes: u32,
    instants: u32,
    contacts: usize,
    lifetime: u32,
    max_interval: u32,
    queries: usize,
    seed: u64,
) -> Result<()> {
    let (changes, nodes, instants) = match input {
        Some(path) => {
            let mut ch = parse_change_log(&read_text(path)?)?;
            ch.sort_unstable();
            ch.dedup();
            let n = ch.iter().map(|c| c.x.max(c.z) + 1).max().unwrap_or(0);
            let t = ch.iter().map(|c| c.t + 1).max().unwrap_or(0);
            (ch, n, t)
        }
        None => (commnet_like(nodes, instants, contacts, lifetime, seed), nodes, instants),
    };
    if nodes == 0 || instants == 0 {
        bail!("temporal benchmark needs at least one node and one instant");
    }
    let backends = TemporalBackends::build(&changes, nodes, instants)?;
    eprintln!(
        "# {} changes, {nodes} nodes, {instants} instants; ik2tree {} bits, mk2tree {} bits",
        changes.len(),
        backends.ik2.inner().size_bits(),
        backends.diff.size_bits()
    );
    print_rows(&suite::run_temporal_suite(&backends, max_interval, queries, seed)?)
}
