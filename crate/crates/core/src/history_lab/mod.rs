//! Lower-bound laboratory: a family of trees that short labels cannot tell
//! apart, node histories under arbitrary deterministic automata, patterns,
//! and the exact pattern count.

pub mod family;
pub mod history;
pub mod lemmas;
pub mod pattern;

pub use family::{build_family, family_tree, FamilyError, FamilyTree};
pub use history::{compute_histories, DigestAutomaton, Event, HistNode, HistoryArena, HistoryAutomaton, HistoryId};
pub use lemmas::{check_lemmas, LemmaConfig, LemmaReport, Violation};
pub use pattern::{crossover, pattern_bound, pattern_bound_alt, pattern_of, Crossover, Pattern};
