//! Random multi-wordnet generation and machine checking of the theorems
//! relating translation and sense assumptions.

mod fuzz;
mod generate;
mod rng;
mod verify;

pub use fuzz::{fuzz, fuzz_with, DirectionStats, FuzzFailure, FuzzOptions, FuzzReport, FuzzTemplate};
pub use generate::{generate, synthetic_bitext, GenError, GenParams, LanguageParams};
pub use rng::SplitMix64;
pub use verify::{verify, TheoremId, ViolationReport};
