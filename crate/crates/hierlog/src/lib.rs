//! Layered hybrid modal logic: signatures, models, satisfaction, standard
//! translation into many-sorted first-order logic, and (bi)simulation-based
//! refinement checking.
//!
//! A layered model stacks `depth + 1` Kripke-style layers. Worlds at level
//! `k > 0` refine worlds at level `k - 1`; the domain collects the admissible
//! refinement chains `(w0, ..., wn)` and every relation at level `k` moves
//! whole chains of length `k + 1`, so a step may stay inside the current
//! parent or escape to a different one. Formulas carry levels too: a level-k
//! formula talks about chains of length `k + 1`.

pub mod document;
pub mod equiv;
pub mod fol;
pub mod formula;
pub mod model;
pub mod semantics;
pub mod signature;

pub use document::{FamilyDocument, ModelDocument};
pub use equiv::{
    check_bisimulation, check_simulation, h_simulates, l_simulates, largest_bisimulation,
    largest_simulation, refines, ClauseViolation, EquivError, FamilyKind, RelationFamily,
    SimVerdict, Verdict,
};
pub use fol::{
    eval_fol, export_smtlib, point_vars, standard_translation, translate_model,
    translate_signature, FolError, FolFormula, FolModel, FolSignature, FolTerm, FolVar,
};
pub use formula::{Atom, Classification, Formula, ParseError};
pub use model::{Hierarchy, LayeredModel, ModelError, Violation, World, WorldTuple};
pub use semantics::{satisfies, satisfying_points, valid_in_model, SemanticsError};
pub use signature::{Signature, SignatureError, SymbolKind};
