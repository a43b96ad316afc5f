//! Approximate subset counting and sampling over weighted downward-closed
//! set collections.
//!
//! Given a collection of weighted subsets of a ground set and a query set
//! `Q`, a counting query asks for `W(Q)`, the total weight of the members
//! contained in `Q`; a sampling query asks for a member `S ⊆ Q` drawn with
//! probability `w(S) / W(Q)`. The engines in [`engines`] answer counting
//! queries to within relative error `d`, and [`sampling`] turns any of them
//! into a sampler at total variation distance at most `d`.
//!
//! ```
//! use subsetq::{fixtures, EngineKind, IndexedCollection, Subset};
//!
//! let idx = IndexedCollection::new(fixtures::worked_example());
//! let q: Subset = "1,2,3".parse().unwrap();
//! let r = idx.count(EngineKind::Treedy, q, 0.2).unwrap();
//! assert!((r.log_total.exp() - 200.0).abs() < 1e-9);
//! ```

pub mod bench;
pub mod collection;
pub mod engines;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod oracle;
pub mod ordering;
pub mod sampling;
pub mod subset;
pub mod table_file;

pub use collection::WeightedCollection;
pub use engines::{CountResult, EngineKind, GreedyTree, IndexedCollection, Probe, SortedIndex};
pub use error::{Error, Result};
pub use subset::Subset;
