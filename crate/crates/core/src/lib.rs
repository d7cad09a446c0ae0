//! Interleaved k²-trees: a compressed self-index for ternary relations.
//!
//! A ternary relation `X × Y × Z` is split along its partitioning dimension
//! `Y` into `|Y|` binary relations. Instead of one k²-tree per value, the
//! [`IK2Tree`] stores all of them in a single tree whose nodes carry one bit
//! per partition value still present below them. The same structure backs an
//! RDF store ([`rdf`], predicates as `Y`) and a time-evolving graph
//! ([`temporal`], time instants as `Y`).
//!
//! ```
//! use ik2_core::{Constraint, IK2Tree, LevelSchedule, Strategy, Triple, TriplePattern};
//!
//! let triples = [Triple::new(6, 1, 0), Triple::new(2, 1, 2), Triple::new(2, 0, 5)];
//! let tree = IK2Tree::build(&triples, 8, 3, 8, LevelSchedule::uniform(2, 8)?, false)?;
//! let p = TriplePattern::new(Constraint::Fixed(2), Constraint::Any, Constraint::Any);
//! assert_eq!(tree.query(&p, Strategy::Lazy)?, vec![Triple::new(2, 1, 2), Triple::new(2, 0, 5)]);
//! # Ok::<(), ik2_core::Error>(())
//! ```

pub mod baseline;
pub mod bitvector;
pub mod error;
pub mod format;
pub mod ik2tree;
pub mod k2tree;
mod layout;
pub mod oracle;
pub mod rdf;
pub mod schedule;
pub mod suite;
pub mod temporal;
pub mod workload;

pub use bitvector::{BitVecBuilder, BitVector};
pub use error::{Error, Result};
pub use format::IndexMode;
pub use ik2tree::{Constraint, IK2Tree, NodeCursor, Strategy, Triple, TriplePattern};
pub use k2tree::K2Tree;
pub use rdf::{Dictionary, RdfDataset, RdfPattern, StrategyChoice};
pub use schedule::LevelSchedule;
pub use temporal::{ChangeRecord, IntervalSemantics, TemporalIndex, TimeQuery};
