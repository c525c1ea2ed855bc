//! Alternating-pattern covering lemmas, made checkable.
//!
//! The crate models finite antipodal-free covers of discretized spheres, the
//! samples they induce, the single- and multi-order pattern maps out of the
//! sample poset, and the antichain rank calculus those maps land in. The
//! [`harness`] module ties everything to the numeric bounds of the covering
//! theorems and drives the `kfcl` command-line tool.

pub mod error;
pub mod harness;
pub mod poset;
pub mod samples;
pub mod sharpness;
pub mod sphere;

pub use error::{Error, Result};
pub use poset::{Antichain, GridVector, Pattern, PatternPoset, Sign, SignedAntichain};
pub use samples::{IndexSet, LinearOrder, Sample, SignFunction};
