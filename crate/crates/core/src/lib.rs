//! Tight linear forests in uniform hypergraphs: exact solvers, closed-form
//! bounds, exact Turán search at small sizes and r-partite path covers.

pub mod binom;
pub mod canon;
pub mod cli;
pub mod cover;
pub mod error;
pub mod formulas;
pub mod hypergraph;
pub mod limits;
pub mod par;
pub mod search;
pub mod solvers;

pub use canon::{canonical_form, count_nonisomorphic, CanonicalForm};
pub use error::{CoverError, FormulaError, GraphError, ParseError, SearchError};
pub use hypergraph::{EdgeMask, Hypergraph};
pub use limits::Limits;
pub use search::{turan_exact, SearchConfig, SearchRecord, Target};
