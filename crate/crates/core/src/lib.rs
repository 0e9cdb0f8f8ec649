//! Exact computational group theory for lawlessness growth.

pub mod cert;
pub mod config;
pub mod delta;
pub mod error;
pub mod group;
pub mod laws;
pub mod psl2;
pub mod schedule;
pub mod suite;
pub mod words;

pub use config::Budget;
pub use error::{Error, Result};
pub use group::Group;
pub use psl2::{Psl2, Psl2Elem, WitnessBank};
pub use schedule::{FunctionSpec, Mode, Schedule};
pub use words::{FreeGroup, Word};
pub mod wreath;
pub use wreath::{SparseWreath, WreathGroup, WreathNormalForm};
