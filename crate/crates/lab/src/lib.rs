//! Scenario runner, report writer and built-in suites for `brownian-core`.

pub mod report;
pub mod runner;
pub mod scenario;
pub mod suite;

/// Bundled scenarios as `(name, json)`.
pub const BUNDLED_SCENARIOS: &[(&str, &str)] = &[
    ("equivalence_grid", include_str!("../scenarios/equivalence_grid.json")),
    ("potapov_type2", include_str!("../scenarios/potapov_type2.json")),
    ("reducing_product", include_str!("../scenarios/reducing_product.json")),
    ("scalar_z_squared", include_str!("../scenarios/scalar_z_squared.json")),
    ("scalar_structure", include_str!("../scenarios/scalar_structure.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED_SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Unreadable, unparsable or invalid scenario; every problem is listed.
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Input(Vec<String>),
    #[error("{0}")]
    Io(String),
}

impl LabError {
    /// Process exit code: 2 for input problems.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
