//! Executes a validated scenario and assembles its report.

use std::collections::BTreeMap;

use brownian_core::brownian::{c00_decay, power_growth};
use brownian_core::equivalence::{
    certify_type2, decide_scalar_type2, decide_type1, decide_types, norm_separation,
    CanonicalTypeII, EquivalenceVerdict, NormSide,
};
use brownian_core::hardy::BrownianElement;
use brownian_core::linalg::{principal_angles, vec_norm, CMat};
use brownian_core::sampling::{ambient_columns, gaussian_vector};
use brownian_core::structure::{
    build_reducing, converse_check, irreducibility_scan, verify_reducing, ReducingCandidate,
};
use brownian_core::subspace::{
    build_type1, build_type2_parts, canonical_decomposition, classify, verify_invariance,
    TypeIIConstruction,
};
use brownian_core::{BrownianParams, InnerSpec, SubspaceBasis, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{num, nums, timestamp, AnalysisResult, Environment, Report, Summary, REPORT_SCHEMA_VERSION};
use crate::scenario::{columns, matrix, vector, AnalysisDef, JobDef, JobKind, Prepared, Scenario};
use crate::LabError;

/// Relative tolerance for the 2-isometry growth law.
pub const POWER_GROWTH_REL_TOL: f64 = 1e-10;
/// Required decay of the normalized adjoint powers.
pub const C00_DECAY_RATIO: f64 = 1e-3;
/// Slack allowed in monotonicity checks.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Principal-angle and parameter agreement for canonical round trips.
pub const ROUND_TRIP_TOL: f64 = 1e-7;
/// Relative agreement of `‖x‖` and `σ‖y‖`.
pub const NORM_IDENTITY_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub degree: Option<usize>,
}

struct BuiltJob {
    def: JobDef,
    params: BrownianParams,
    basis: SubspaceBasis,
    spec: Option<InnerSpec>,
    construction: Option<TypeIIConstruction>,
}

/// Applies overrides, validates and runs every analysis.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<Report, LabError> {
    let mut scenario = scenario.clone();
    if let Some(seed) = options.seed {
        scenario.seed = seed;
    }
    if let Some(n) = options.degree {
        scenario.ambient.max_degree = n;
    }
    let prepared = scenario.validate()?;
    Ok(execute(&prepared))
}

fn execute(prepared: &Prepared) -> Report {
    let scenario = &prepared.scenario;
    let ambient = prepared.params.ambient();
    let default_tol = Tolerance::for_ambient(&ambient);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    let mut built: BTreeMap<String, Result<BuiltJob, String>> = BTreeMap::new();
    for job in &scenario.subspace_jobs {
        built.insert(job.name.clone(), build_job(prepared, job, &mut rng).map_err(|e| e.to_string()));
    }

    let mut results = Vec::with_capacity(scenario.analyses.len());
    for (index, analysis) in scenario.analyses.iter().enumerate() {
        let tol = Tolerance(analysis.tolerance().unwrap_or(default_tol.value()));
        let outcome = run_analysis(prepared, analysis, &built, tol, &mut rng);
        let (passed, details, error) = match outcome {
            Ok((passed, details)) => (passed, details, None),
            Err(e) => (false, Value::Null, Some(e)),
        };
        results.push(AnalysisResult {
            index,
            label: analysis.label(),
            kind: analysis.kind(),
            passed,
            tolerance: tol.value(),
            details,
            error,
        });
    }
    let summary = Summary::from_flags(results.iter().map(|r| r.passed));
    Report {
        schema_version: REPORT_SCHEMA_VERSION,
        timestamp: timestamp(),
        scenario: serde_json::to_value(scenario).expect("scenario serializes"),
        environment: Environment {
            precision: "complex double (f64)",
            fiber_dim: ambient.fiber_dim(),
            max_degree: ambient.max_degree(),
            seed: scenario.seed,
            rng: "ChaCha8",
            default_tolerance: default_tol.value(),
        },
        results,
        summary,
    }
}

fn build_job(prepared: &Prepared, job: &JobDef, rng: &mut ChaCha8Rng) -> brownian_core::Result<BuiltJob> {
    let params = prepared.job_params(job);
    let ambient = params.ambient();
    let spec = job.inner.as_ref().map(|n| prepared.specs[n].clone());
    let mut construction = None;
    let basis = match job.kind {
        JobKind::Type1 => build_type1(spec.as_ref().expect("validated"), ambient)?,
        JobKind::Type2 => {
            let spec = spec.as_ref().expect("validated");
            let x = match &job.parameters {
                Some(vs) => columns(vs, spec.domain_dim()),
                None => CMat::identity(spec.domain_dim(), spec.domain_dim()),
            };
            let parts = build_type2_parts(spec, &params, &x)?;
            let basis = parts.basis.clone();
            construction = Some(parts);
            basis
        }
        JobKind::Reducing => {
            let d = ambient.fiber_dim();
            let g = match &job.parameters {
                Some(vs) => ReducingCandidate::new(&columns(vs, d)),
                None => ReducingCandidate::whole(d),
            };
            build_reducing(&g, ambient)?
        }
        JobKind::Custom => {
            let r = job.random.as_ref().expect("validated");
            let cols = ambient_columns(rng, ambient, r.count, r.support);
            SubspaceBasis::custom(ambient, &cols, "custom")?
        }
    };
    Ok(BuiltJob {
        def: job.clone(),
        params,
        basis: basis.with_label(job.name.clone()),
        spec,
        construction,
    })
}

fn job<'a>(built: &'a BTreeMap<String, Result<BuiltJob, String>>, name: &str) -> Result<&'a BuiltJob, String> {
    built[name]
        .as_ref()
        .map_err(|e| format!("job `{name}` failed to build: {e}"))
}

type Outcome = Result<(bool, Value), String>;

fn run_analysis(
    prepared: &Prepared,
    analysis: &AnalysisDef,
    built: &BTreeMap<String, Result<BuiltJob, String>>,
    tol: Tolerance,
    rng: &mut ChaCha8Rng,
) -> Outcome {
    let s = |e: brownian_core::Error| e.to_string();
    match analysis {
        AnalysisDef::Verify { job: name, expect, .. } => {
            let j = job(built, name)?;
            let rep = verify_invariance(&j.basis, &j.params).map_err(s)?;
            let invariant = rep.is_invariant(tol);
            Ok((
                expect.unwrap_or(true) == invariant,
                json!({
                    "dim": j.basis.dim(),
                    "tested_columns": rep.per_column.len(),
                    "boundary_columns": rep.boundary_columns,
                    "max_residual": num(rep.max_residual),
                    "invariant": invariant,
                }),
            ))
        }
        AnalysisDef::Classify { job: name, expect, .. } => {
            let j = job(built, name)?;
            let c = classify(&j.basis, &j.params, tol).map_err(s)?;
            let kind = c.kind.as_str();
            let passed = match expect {
                Some(e) => e == kind,
                None => kind != "not_invariant",
            };
            Ok((
                passed,
                json!({
                    "kind": kind,
                    "max_residual": num(c.invariance.max_residual),
                    "max_fiber_norm": num(c.max_fiber_norm),
                }),
            ))
        }
        AnalysisDef::Canonical {
            job: name,
            expect_defect_dim,
            ..
        } => canonical(job(built, name)?, *expect_defect_dim, tol),
        AnalysisDef::Equivalence {
            first,
            second,
            candidate,
            expect,
        ..
        } => {
            let (a, b) = (job(built, first)?, job(built, second)?);
            let cand = match candidate {
                Some(c) => Some((matrix(&c.ug)?, matrix(&c.ue)?)),
                None => None,
            };
            let v = equivalence(a, b, cand, tol)?;
            let certified_ok = !v.equivalent
                || (v.residual.is_some_and(|r| tol.accepts(r))
                    && v.isometry_defect.is_some_and(|r| tol.accepts(r)));
            let passed = certified_ok && expect.is_none_or(|e| e == v.equivalent);
            Ok((
                passed,
                json!({
                    "equivalent": v.equivalent,
                    "reason": v.reason.as_str(),
                    "residual": v.residual.map(num),
                    "isometry_defect": v.isometry_defect.map(num),
                }),
            ))
        }
        AnalysisDef::NormSeparation { first, second, .. } => {
            let (a, b) = (job(built, first)?, job(built, second)?);
            let rep = norm_separation((&a.basis, &a.params), (&b.basis, &b.params), tol).map_err(s)?;
            let side = |n: &NormSide| {
                json!({
                    "kind": n.kind.as_str(),
                    "norm": num(n.norm),
                    "bound": num(n.bound),
                    "mu": n.mu.map(num),
                    "within_bound": n.within_bound,
                })
            };
            Ok((
                rep.first.within_bound && rep.second.within_bound,
                json!({
                    "first": side(&rep.first),
                    "second": side(&rep.second),
                    "non_equivalent": rep.non_equivalent,
                }),
            ))
        }
        AnalysisDef::Reducing { job: name, expect, .. } => {
            let j = job(built, name)?;
            let rep = verify_reducing(&j.basis, &j.params).map_err(s)?;
            let reducing = rep.is_reducing(tol);
            let converse = if reducing {
                let c = converse_check(&j.basis).map_err(s)?;
                json!({"extracted_dim": c.extracted.dim(), "max_angle": num(c.max_angle)})
            } else {
                Value::Null
            };
            let converse_ok = !reducing
                || converse["max_angle"].as_f64().is_some_and(|a| a < ROUND_TRIP_TOL);
            Ok((
                expect.unwrap_or(true) == reducing && converse_ok,
                json!({
                    "fwd_residual": num(rep.fwd_residual),
                    "adj_residual": num(rep.adj_residual),
                    "reducing": reducing,
                    "converse": converse,
                }),
            ))
        }
        AnalysisDef::C00 { degree, m_max, .. } => {
            let params = prepared.params;
            let ambient = params.ambient();
            let m = m_max.unwrap_or(ambient.max_degree());
            let cols = ambient_columns(rng, ambient, 1, *degree);
            let v = BrownianElement::from_vector(ambient, &cols.column(0).into_owned()).map_err(s)?;
            let prof = c00_decay(&params, &v, m).map_err(s)?;
            let ratio = prof.adjoint.last().unwrap() / prof.adjoint[0];
            let monotone = prof.adjoint_non_increasing(MONOTONE_SLACK);
            Ok((
                monotone && ratio < C00_DECAY_RATIO,
                json!({
                    "operator_norm": num(prof.norm),
                    "adjoint_non_increasing": monotone,
                    "forward_non_increasing": prof.forward_non_increasing(MONOTONE_SLACK),
                    "adjoint_ratio": num(ratio),
                    "adjoint": nums(&prof.adjoint),
                    "forward": nums(&prof.forward),
                }),
            ))
        }
        AnalysisDef::PowerGrowth { x, n_max, tolerance } => {
            let params = prepared.params;
            let d = params.ambient().fiber_dim();
            let n = n_max.unwrap_or(params.ambient().max_degree());
            let x = match x {
                Some(v) => vector(v),
                None => gaussian_vector(rng, d),
            };
            let seq = power_growth(&params, &x, n).map_err(s)?;
            let x2 = vec_norm(&x).powi(2);
            let sig2 = params.sigma().powi(2);
            let max_rel = seq
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let want = (1.0 + k as f64 * sig2) * x2;
                    (v - want).abs() / want
                })
                .fold(0.0, f64::max);
            let limit = tolerance.unwrap_or(POWER_GROWTH_REL_TOL);
            Ok((
                max_rel < limit,
                json!({"max_relative_error": num(max_rel), "limit": limit, "norms_squared": nums(&seq)}),
            ))
        }
        AnalysisDef::Irreducibility { trials, .. } => {
            let rep = irreducibility_scan(&prepared.params, *trials, tol, rng).map_err(s)?;
            let trivial_ok = rep.trivial.iter().all(|r| r.is_reducing(tol));
            Ok((
                trivial_ok && rep.nontrivial_found == 0,
                json!({
                    "trials": rep.trials,
                    "trivial_reducing": trivial_ok,
                    "random_passing": rep.random_passing,
                    "nontrivial_found": rep.nontrivial_found,
                    "min_random_residual": num(rep.min_random_residual),
                }),
            ))
        }
    }
}

fn canonical(j: &BuiltJob, expect_defect_dim: Option<usize>, tol: Tolerance) -> Outcome {
    let s = |e: brownian_core::Error| e.to_string();
    let dec = canonical_decomposition(&j.basis, &j.params, j.spec.as_ref(), tol).map_err(s)?;
    let max_identity = dec.elements.iter().map(|e| e.identity_residual).fold(0.0, f64::max);
    let max_gap = dec
        .elements
        .iter()
        .map(|e| e.norm_gap / vec_norm(&e.element.x).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let mut passed = tol.accepts(max_identity) && max_gap < NORM_IDENTITY_REL_TOL;
    let mut details = json!({
        "m0_dim": dec.m0.dim(),
        "defect_dim": dec.defect.dim(),
        "kind": dec.kind().as_str(),
        "fiber_singular_values": nums(&dec.fiber_singular_values),
        "max_identity_residual": num(max_identity),
        "max_norm_gap_relative": num(max_gap),
    });
    if let Some(parts) = &j.construction {
        let m0_angle = max_angle(dec.m0.columns(), parts.type1.columns());
        let mut elems = CMat::zeros(j.params.ambient().total_dim(), parts.elements.len());
        for (k, e) in parts.elements.iter().enumerate() {
            elems.set_column(k, &e.to_vector());
        }
        let defect_angle = max_angle(dec.defect.columns(), &elems);
        passed &= m0_angle < ROUND_TRIP_TOL && defect_angle < ROUND_TRIP_TOL;
        details["m0_angle"] = num(m0_angle);
        details["defect_angle"] = num(defect_angle);
    }
    if let Some(want) = expect_defect_dim {
        passed &= dec.defect.dim() == want;
    }
    Ok((passed, details))
}

fn max_angle(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

fn equivalence(
    a: &BuiltJob,
    b: &BuiltJob,
    candidate: Option<(CMat, CMat)>,
    tol: Tolerance,
) -> Result<EquivalenceVerdict, String> {
    let s = |e: brownian_core::Error| e.to_string();
    let ka = classify(&a.basis, &a.params, tol).map_err(s)?.kind;
    let kb = classify(&b.basis, &b.params, tol).map_err(s)?.kind;
    if let Some(v) = decide_types(ka, kb) {
        return Ok(v);
    }
    use brownian_core::subspace::SubspaceType::*;
    match (ka, a.spec.as_ref(), b.spec.as_ref()) {
        (NotInvariant, _, _) => Err("equivalence needs invariant subspaces".into()),
        (TypeI, Some(sa), Some(sb)) => decide_type1(&a.basis, sa, &a.params, &b.basis, sb, &b.params, tol).map_err(s),
        (TypeII, Some(sa), Some(sb)) => match candidate {
            Some((ug, ue)) => {
                let ca = CanonicalTypeII::from_subspace(&a.basis, sa, &a.params, tol).map_err(s)?;
                let cb = CanonicalTypeII::from_subspace(&b.basis, sb, &b.params, tol).map_err(s)?;
                certify_type2(&ca, &cb, &ug, &ue, tol).map_err(s)
            }
            None if a.def.kind == JobKind::Type2
                && b.def.kind == JobKind::Type2
                && a.params.ambient().fiber_dim() == 1 =>
            {
                decide_scalar_type2(&a.params, sa, &b.params, sb, tol).map_err(s)
            }
            None => Err("vector Type II equivalence needs a candidate {ug, ue}".into()),
        },
        _ => Err("equivalence needs jobs built from inner functions".into()),
    }
}
