//! Soft-biometric verification toolkit.
//!
//! The crate covers the full experimental pipeline for matching people by
//! soft traits (gender, age, ethnicity, glasses, beard, moustache):
//!
//! * [`profiles`]: trait taxonomy, label parsing, per-trait distances and the
//!   soft matcher score.
//! * [`ingestion`]: annotation, pairs, score and COTS file formats, and the
//!   join that produces evaluation-ready pairs.
//! * [`evaluation`]: ROC/EER/accuracy metrics and fold-wise cross validation.
//! * [`fusion`]: score normalization and weighted score-level fusion.
//! * [`selection`]: sequential floating forward selection with an exhaustive
//!   oracle.
//! * [`analysis`]: demographics, Pearson correlations, COTS accuracy and age
//!   stability tables.
//! * [`synthgen`]: seeded synthetic populations, pairs and face scores.
//! * [`experiment`]: end-to-end soft-only, face-only and fused evaluations.

pub mod analysis;
pub mod evaluation;
pub mod experiment;
pub mod fusion;
pub mod ingestion;
pub mod profiles;
pub mod selection;
pub mod synthgen;

pub use evaluation::{FoldReport, RocCurve, ScoreSet};
pub use fusion::{FusionConfig, NormMethod, Normalizer};
pub use ingestion::{AnnotationRecord, CotsRecord, JoinedPair, PairLabel, PairRecord, ScoreRecord};
pub use profiles::{
    AgeCuts, MatchConfig, SoftProfile, TraitKind, TraitSet, TraitValue,
};
pub use selection::{SelectionTrace, Subset};
pub use synthgen::{FaceScoreModel, SynthSpec};
