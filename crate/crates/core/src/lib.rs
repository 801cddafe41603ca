//! Multi-wordnet modelling of word senses and their translations.
//!
//! * [`model`]: languages, words, multi-synsets and the indexed [`MultiWordnet`]
//! * [`ingest`]: JSON Lines / TSV readers and writers, lexicon statistics
//! * [`assumptions`]: per-word translation/sense assumption flags
//! * [`reports`]: aggregate tables over eligible words
//! * [`annotate`]: sense tagging of word-aligned bitext, evaluation
//! * [`lab`]: random instances, theorem verification and fuzzing

pub mod annotate;
pub mod assumptions;
pub mod ingest;
pub mod lab;
pub mod model;
pub mod reports;

pub use assumptions::{profile, Assumption, AssumptionFlags, AssumptionProfile, Direction};
pub use model::{LanguageCode, ModelError, MultiSynset, MultiWordnet, Pos, WordKey};
