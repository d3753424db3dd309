//! Brownian shifts on truncated vector-valued Hardy spaces.
//!
//! The crate models `H²_E(T) ⊕ E` by truncated Taylor coefficients and builds
//! the operator `B = [S_E, σ i_E; 0, e^{iθ} I_E]` together with:
//!
//! * rational inner functions (Blaschke-Potapov products) and their
//!   multiplication operators ([`inner`]),
//! * Type I / Type II invariant subspaces, their verification, classification
//!   and canonical decomposition ([`subspace`]),
//! * unitary-equivalence decisions with explicit intertwining unitaries
//!   ([`equivalence`]),
//! * reducing subspaces and the scalar irreducibility scan ([`structure`]).
//!
//! All values are immutable after construction and every operation is a pure
//! function, so independent calls may run on different threads.

pub mod brownian;
pub mod equivalence;
pub mod error;
pub mod hardy;
pub mod inner;
pub mod linalg;
pub mod operator;
pub mod sampling;
pub mod structure;
pub mod subspace;
pub mod tolerance;

pub use brownian::BrownianParams;
pub use error::{Error, Result};
pub use hardy::{AmbientSpec, BrownianElement, HardyElement};
pub use inner::{Factor, InnerSpec};
pub use linalg::{CMat, CVec, C64};
pub use operator::{Basis, OperatorMatrix};
pub use subspace::SubspaceBasis;
pub use tolerance::Tolerance;
