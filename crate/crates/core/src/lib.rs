//! Variability-aware engine for the data-analysis modeling phase.
//!
//! The crate is organized around a small number of cooperating modules:
//!
//! - [`feature_model`] — feature trees with group decompositions and
//!   cross-tree constraints, configuration validation, enumeration,
//!   counting, dead-feature detection, and propositional export.
//! - [`fmdsl`] — the textual DSL (`.fm` models, `.cfg` configurations)
//!   with a canonical serializer.
//! - [`crispdm`] — the built-in CRISP-DM modeling-phase reference model,
//!   bundled golden configurations, and the registry that binds
//!   executable leaf features to variant implementations.
//! - [`variants`] — the executable variants themselves: data splitters,
//!   quality metrics, reference learners, stop policies, and the
//!   parameter revision proposer.
//! - [`engine`] — the four-stage pipeline controller (technique
//!   selection, test design, model building, model evaluation) driving
//!   an iterative, stop-policy-governed loop.
//! - [`provenance`] — the append-only run ledger, JSON export, and the
//!   automation gap report.

pub mod crispdm;
pub mod engine;
pub mod feature_model;
pub mod fmdsl;
pub mod provenance;
pub mod variants;
