//! Tolerance policy.

use crate::hardy::AmbientSpec;

/// Default tolerance per unit of truncation degree.
pub const TAU_PER_DEGREE: f64 = 1e-9;

/// An absolute tolerance for residual checks.
///
/// The default policy scales with the truncation degree: `τ = 1e-9 · N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub fn for_ambient(ambient: &AmbientSpec) -> Self {
        Tolerance(TAU_PER_DEGREE * ambient.max_degree() as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn accepts(self, residual: f64) -> bool {
        residual < self.0
    }
}
