//! Order-preserving pattern matching over indeterminate strings.
//!
//! Strings are sequences of character sets over `i64`. Two strings
//! op-match when some choice of one character per position makes them
//! order-isomorphic. The crate provides:
//!
//! - [`verify`]: polynomial verification when one string is determinate;
//! - [`satencode`] and [`cnf`]: CNF encodings and solvers for the general case;
//! - [`alternate`]: a 2SAT encoding for strings that are never indeterminate
//!   at the same position;
//! - [`hardness`]: the 3CNF-SAT reduction and its solution translations;
//! - [`filtration`]: full-text search with a rise/fall/wildcard filter;
//! - [`oracle`]: brute-force ground truth and instance generators.

pub mod alternate;
pub mod cnf;
pub mod corestr;
pub mod error;
pub mod filtration;
pub mod hardness;
pub mod oracle;
pub mod orderctx;
pub mod satencode;
pub mod verify;

pub use corestr::{op_iso, parse_string, serialize_string, Assignment, CharSet, IndetString};
pub use error::{Error, Result};
pub use oracle::Witness;
