//! Scenario files: parsing, validation and conversion into core types.
//!
//! Validation collects every problem before anything is computed so a bad
//! scenario never produces a partial report.

use std::collections::{BTreeMap, BTreeSet};

use brownian_core::hardy::AmbientSpec;
use brownian_core::inner::{Factor, InnerSpec};
use brownian_core::linalg::{CMat, CVec, C64};
use brownian_core::BrownianParams;
use serde::{Deserialize, Serialize};

use crate::LabError;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Complex number written as `[re, im]`.
pub type ComplexDef = [f64; 2];
/// Vector written as a list of complex entries.
pub type VectorDef = Vec<ComplexDef>;
/// Matrix written as a list of rows.
pub type MatrixDef = Vec<Vec<ComplexDef>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub ambient: AmbientDef,
    pub brownian: BrownianDef,
    #[serde(default)]
    pub inner_specs: BTreeMap<String, InnerSpecDef>,
    #[serde(default)]
    pub subspace_jobs: Vec<JobDef>,
    #[serde(default)]
    pub analyses: Vec<AnalysisDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientDef {
    pub fiber_dim: usize,
    pub max_degree: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianDef {
    pub sigma: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSpecDef {
    /// Isometric constant `V`; the identity of size `fiber_dim` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_factor: Option<MatrixDef>,
    #[serde(default)]
    pub factors: Vec<FactorDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Scalar,
    Potapov,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDef {
    pub kind: FactorKind,
    pub zero_re: f64,
    pub zero_im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<MatrixDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Type1,
    Type2,
    Reducing,
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomColumns {
    pub count: usize,
    /// Highest analytic degree of the random columns.
    pub support: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDef {
    pub name: String,
    pub kind: JobKind,
    /// Inner function name (`type1`, `type2`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<String>,
    /// Spanning vectors of `X ⊆ E₂` (`type2`) or of `G ⊆ E` (`reducing`);
    /// everything when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<VectorDef>>,
    /// Seeded random columns (`custom`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomColumns>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateDef {
    pub ug: MatrixDef,
    pub ue: MatrixDef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisDef {
    Verify {
        job: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Classify {
        job: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Canonical {
        job: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_defect_dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Equivalence {
        first: String,
        second: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        candidate: Option<CandidateDef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    NormSeparation {
        first: String,
        second: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Reducing {
        job: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    C00 {
        /// Degree of the random polynomial test vector.
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_max: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    PowerGrowth {
        /// Fiber vector `x`; a seeded random vector when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<VectorDef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_max: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Irreducibility {
        trials: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

impl AnalysisDef {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisDef::Verify { .. } => "verify",
            AnalysisDef::Classify { .. } => "classify",
            AnalysisDef::Canonical { .. } => "canonical",
            AnalysisDef::Equivalence { .. } => "equivalence",
            AnalysisDef::NormSeparation { .. } => "norm_separation",
            AnalysisDef::Reducing { .. } => "reducing",
            AnalysisDef::C00 { .. } => "c00",
            AnalysisDef::PowerGrowth { .. } => "power_growth",
            AnalysisDef::Irreducibility { .. } => "irreducibility",
        }
    }

    pub fn tolerance(&self) -> Option<f64> {
        match self {
            AnalysisDef::Verify { tolerance, .. }
            | AnalysisDef::Classify { tolerance, .. }
            | AnalysisDef::Canonical { tolerance, .. }
            | AnalysisDef::Equivalence { tolerance, .. }
            | AnalysisDef::NormSeparation { tolerance, .. }
            | AnalysisDef::Reducing { tolerance, .. }
            | AnalysisDef::C00 { tolerance, .. }
            | AnalysisDef::PowerGrowth { tolerance, .. }
            | AnalysisDef::Irreducibility { tolerance, .. } => *tolerance,
        }
    }

    /// Job names the analysis refers to.
    pub fn jobs(&self) -> Vec<&str> {
        match self {
            AnalysisDef::Verify { job, .. }
            | AnalysisDef::Classify { job, .. }
            | AnalysisDef::Canonical { job, .. }
            | AnalysisDef::Reducing { job, .. } => vec![job.as_str()],
            AnalysisDef::Equivalence { first, second, .. }
            | AnalysisDef::NormSeparation { first, second, .. } => vec![first.as_str(), second.as_str()],
            _ => Vec::new(),
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        let jobs = self.jobs();
        if jobs.is_empty() {
            self.kind().to_string()
        } else {
            format!("{}({})", self.kind(), jobs.join(", "))
        }
    }
}

impl Scenario {
    /// Parses JSON, reporting the line and column of syntax or field errors.
    pub fn parse(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| {
            LabError::Input(vec![format!(
                "line {} column {}: {}",
                e.line(),
                e.column(),
                e
            )])
        })
    }

    /// Checks every field and cross-reference and converts into core types.
    pub fn validate(&self) -> Result<Prepared, LabError> {
        let mut errors = Vec::new();
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            errors.push(format!(
                "schema_version: expected {SCENARIO_SCHEMA_VERSION}, found {}",
                self.schema_version
            ));
        }
        let ambient = match AmbientSpec::new(self.ambient.fiber_dim, self.ambient.max_degree) {
            Ok(a) => Some(a),
            Err(e) => {
                errors.push(format!("ambient: {e}"));
                None
            }
        };
        let params = ambient.and_then(|a| {
            BrownianParams::new(self.brownian.sigma, self.brownian.theta, a)
                .map_err(|e| errors.push(format!("brownian: {e}")))
                .ok()
        });

        let mut specs = BTreeMap::new();
        for (name, def) in &self.inner_specs {
            match def.to_spec(self.ambient.fiber_dim) {
                Ok(spec) => {
                    if spec.codomain_dim() != self.ambient.fiber_dim {
                        errors.push(format!(
                            "inner_specs.{name}: codomain dimension {} differs from fiber_dim {}",
                            spec.codomain_dim(),
                            self.ambient.fiber_dim
                        ));
                    }
                    specs.insert(name.clone(), spec);
                }
                Err(e) => errors.push(format!("inner_specs.{name}: {e}")),
            }
        }

        let mut names = BTreeSet::new();
        let mut jobs = BTreeMap::new();
        for (i, job) in self.subspace_jobs.iter().enumerate() {
            let at = format!("subspace_jobs[{i}] ({})", job.name);
            if !names.insert(job.name.clone()) {
                errors.push(format!("{at}: duplicate job name"));
            }
            if let Some(s) = job.sigma {
                if !(s.is_finite() && s > 0.0) {
                    errors.push(format!("{at}: sigma must be positive and finite"));
                }
            }
            if job.theta.is_some_and(|t| !t.is_finite()) {
                errors.push(format!("{at}: theta must be finite"));
            }
            match job.kind {
                JobKind::Type1 | JobKind::Type2 => match &job.inner {
                    None => errors.push(format!("{at}: `inner` is required")),
                    Some(inner) => match specs.get(inner) {
                        None if !self.inner_specs.contains_key(inner) => {
                            errors.push(format!("{at}: unknown inner spec `{inner}`"))
                        }
                        None => {}
                        Some(spec) => {
                            if job.kind == JobKind::Type2 {
                                check_vectors(&job.parameters, spec.domain_dim(), &at, &mut errors);
                            }
                        }
                    },
                },
                JobKind::Reducing => {
                    check_vectors(&job.parameters, self.ambient.fiber_dim, &at, &mut errors)
                }
                JobKind::Custom => match &job.random {
                    None => errors.push(format!("{at}: `random` is required for custom jobs")),
                    Some(r) => {
                        if r.count == 0 {
                            errors.push(format!("{at}: random.count must be positive"));
                        }
                        if r.support + 1 > self.ambient.max_degree {
                            errors.push(format!(
                                "{at}: random.support must be at most max_degree - 1"
                            ));
                        }
                    }
                },
            }
            if job.kind != JobKind::Custom && job.random.is_some() {
                errors.push(format!("{at}: `random` only applies to custom jobs"));
            }
            jobs.insert(job.name.clone(), job.clone());
        }

        for (i, analysis) in self.analyses.iter().enumerate() {
            let at = format!("analyses[{i}] ({})", analysis.kind());
            if let Some(t) = analysis.tolerance() {
                if !(t.is_finite() && t > 0.0) {
                    errors.push(format!("{at}: tolerance must be positive"));
                }
            }
            for job in analysis.jobs() {
                if !jobs.contains_key(job) {
                    errors.push(format!("{at}: unknown job `{job}`"));
                }
            }
            match analysis {
                AnalysisDef::Classify { expect: Some(e), .. }
                    if !["type1", "type2", "not_invariant"].contains(&e.as_str()) =>
                {
                    errors.push(format!("{at}: expect must be type1, type2 or not_invariant"))
                }
                AnalysisDef::C00 { m_max: Some(m), .. } | AnalysisDef::PowerGrowth { n_max: Some(m), .. }
                    if *m > self.ambient.max_degree =>
                {
                    errors.push(format!("{at}: step count exceeds max_degree"))
                }
                AnalysisDef::C00 { degree, .. } if *degree >= self.ambient.max_degree => {
                    errors.push(format!("{at}: degree must be below max_degree"))
                }
                AnalysisDef::PowerGrowth { x: Some(x), .. } if x.len() != self.ambient.fiber_dim => {
                    errors.push(format!("{at}: x must have fiber_dim entries"))
                }
                AnalysisDef::Irreducibility { .. } if self.ambient.fiber_dim != 1 => {
                    errors.push(format!("{at}: irreducibility scans need fiber_dim = 1"))
                }
                AnalysisDef::Equivalence {
                    candidate: Some(c), ..
                } => {
                    for (label, m) in [("ug", &c.ug), ("ue", &c.ue)] {
                        if let Err(e) = matrix(m) {
                            errors.push(format!("{at}: candidate.{label}: {e}"));
                        }
                    }
                }
                _ => {}
            }
        }

        if !errors.is_empty() {
            return Err(LabError::Input(errors));
        }
        Ok(Prepared {
            scenario: self.clone(),
            params: params.expect("validated"),
            specs,
            jobs,
        })
    }
}

fn check_vectors(vectors: &Option<Vec<VectorDef>>, dim: usize, at: &str, errors: &mut Vec<String>) {
    if let Some(vs) = vectors {
        if vs.is_empty() {
            errors.push(format!("{at}: parameters must not be empty"));
        }
        for (k, v) in vs.iter().enumerate() {
            if v.len() != dim {
                errors.push(format!(
                    "{at}: parameters[{k}] has {} entries, expected {dim}",
                    v.len()
                ));
            }
        }
    }
}

pub fn complex(c: &ComplexDef) -> C64 {
    C64::new(c[0], c[1])
}

pub fn vector(v: &VectorDef) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(complex))
}

/// Columns built from a list of vectors of equal length.
pub fn columns(vs: &[VectorDef], rows: usize) -> CMat {
    let mut m = CMat::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, &vector(v));
    }
    m
}

pub fn matrix(rows: &MatrixDef) -> Result<CMat, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err("matrix must be nonempty".into());
    }
    if rows.iter().any(|row| row.len() != c) {
        return Err("matrix rows differ in length".into());
    }
    Ok(CMat::from_fn(r, c, |i, j| complex(&rows[i][j])))
}

pub fn matrix_def(m: &CMat) -> MatrixDef {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl InnerSpecDef {
    pub fn to_spec(&self, fiber_dim: usize) -> Result<InnerSpec, String> {
        let constant = match &self.constant_factor {
            Some(rows) => matrix(rows)?,
            None => CMat::identity(fiber_dim, fiber_dim),
        };
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let zero = C64::new(f.zero_re, f.zero_im);
                match (f.kind, &f.projection) {
                    (FactorKind::Scalar, None) => Ok(Factor::Scalar { zero }),
                    (FactorKind::Scalar, Some(_)) => Err("scalar factors take no projection".to_string()),
                    (FactorKind::Potapov, Some(p)) => Ok(Factor::Potapov {
                        zero,
                        projection: matrix(p)?,
                    }),
                    (FactorKind::Potapov, None) => Err("potapov factors need a projection".to_string()),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        InnerSpec::new(constant, factors).map_err(|e| e.to_string())
    }

    pub fn from_spec(spec: &InnerSpec) -> Self {
        let factors = spec
            .factors()
            .iter()
            .map(|f| match f {
                Factor::Scalar { zero } => FactorDef {
                    kind: FactorKind::Scalar,
                    zero_re: zero.re,
                    zero_im: zero.im,
                    projection: None,
                },
                Factor::Potapov { zero, projection } => FactorDef {
                    kind: FactorKind::Potapov,
                    zero_re: zero.re,
                    zero_im: zero.im,
                    projection: Some(matrix_def(projection)),
                },
            })
            .collect();
        Self {
            constant_factor: Some(matrix_def(spec.constant_factor())),
            factors,
        }
    }
}

/// A validated scenario with its core objects.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub params: BrownianParams,
    pub specs: BTreeMap<String, InnerSpec>,
    pub jobs: BTreeMap<String, JobDef>,
}

impl Prepared {
    /// Parameters for a job, honouring its sigma/theta overrides.
    pub fn job_params(&self, job: &JobDef) -> BrownianParams {
        BrownianParams::new(
            job.sigma.unwrap_or(self.params.sigma()),
            job.theta.unwrap_or(self.params.theta()),
            self.params.ambient(),
        )
        .expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "ambient": {"fiber_dim": 1, "max_degree": 16},
        "brownian": {"sigma": 1.0, "theta": 0.0},
        "inner_specs": {"z2": {"factors": [
            {"kind": "scalar", "zero_re": 0.0, "zero_im": 0.0},
            {"kind": "scalar", "zero_re": 0.0, "zero_im": 0.0}
        ]}},
        "subspace_jobs": [{"name": "m", "kind": "type2", "inner": "z2"}],
        "analyses": [{"kind": "verify", "job": "m"}]
    }"#;

    #[test]
    fn minimal_scenario_validates() {
        let p = Scenario::parse(MINIMAL).unwrap().validate().unwrap();
        assert_eq!(p.specs["z2"].effective_degree().unwrap(), 2);
    }

    #[test]
    fn missing_sigma_reports_position() {
        let text = MINIMAL.replace("\"sigma\": 1.0, ", "");
        match Scenario::parse(&text) {
            Err(LabError::Input(errs)) => assert!(errs[0].contains("sigma") && errs[0].starts_with("line")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_reference_errors_are_listed() {
        let mut s = Scenario::parse(MINIMAL).unwrap();
        s.brownian.sigma = -1.0;
        s.subspace_jobs[0].inner = Some("nope".into());
        s.analyses.push(AnalysisDef::Reducing {
            job: "missing".into(),
            expect: None,
            tolerance: Some(0.0),
        });
        match s.validate() {
            Err(LabError::Input(errs)) => assert_eq!(errs.len(), 4, "{errs:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inner_spec_round_trips() {
        let s = Scenario::parse(MINIMAL).unwrap();
        let spec = s.inner_specs["z2"].to_spec(1).unwrap();
        let back = InnerSpecDef::from_spec(&spec).to_spec(1).unwrap();
        assert_eq!(spec, back);
    }
}
