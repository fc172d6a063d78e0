//! Vocabularies, the formula AST, its concrete syntax, and closure sets.

mod closure;
mod formula;
mod parser;
mod vocab;

pub use closure::{closure, ClosureSet};
pub use formula::{Formula, Printed};
pub use parser::{parse_formula, parse_formula_infer};
pub use vocab::{PredId, Vocabulary};
