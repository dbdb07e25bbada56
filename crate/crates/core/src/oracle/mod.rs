//! An executable, bounded version of the set-based semantics, used as ground
//! truth by the test suites.

pub mod calculus;
pub mod denotation;
pub mod domination;
pub mod reach;
pub mod sexp;

pub use calculus::{derivable, derivable_from, Budget, Prover, Verdict};
pub use denotation::{denotation, Denotation};
pub use domination::dominates;
pub use reach::{
    extra_var_pool, extra_var_pool_with, ground_cterms, reach, rewrites_to, successors, terms_over,
    Reach,
};
pub use sexp::{apply_scsubst, etose, etose_total, flat, setoe, ESExp, SExp, SSubst};
