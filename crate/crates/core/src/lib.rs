//! Termination analysis for higher-order rewrite systems over dependent
//! types. The pipeline parses a system of symbol declarations and rewrite
//! rules, extracts dependency pairs, builds size-change matrices over a
//! symbol precedence, closes the call graph, and checks each rule's
//! right-hand side against a restricted typing discipline.

pub mod analysis;
pub mod deppairs;
pub mod dot;
pub mod fuzz;
pub mod rewrite;
pub mod sct;
pub mod signature;
pub mod syntax;
pub mod typecheck;
