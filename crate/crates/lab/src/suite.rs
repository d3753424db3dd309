//! Built-in suites: the numbered acceptance criteria and a set of randomized
//! property checks. Every random draw comes from one seed, with a separate
//! ChaCha stream per criterion so criteria do not perturb each other.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use brownian_core::brownian::{
    apply_adjoint_vector, apply_vector, c00_decay, operator_norm, power_growth,
};
use brownian_core::equivalence::{
    decide_scalar_built, decide_scalar_type2, norm_separation, restricted_norm,
    scalar_certificate_search, ScalarTypeII,
};
use brownian_core::hardy::{divide_by_zeta, shift, BrownianElement, HardyElement};
use brownian_core::linalg::{inner, principal_angles, vec_norm, CMat, C64};
use brownian_core::sampling::{
    ambient_columns, gaussian, gaussian_vector, inner_spec, isometry, InnerDraw,
};
use brownian_core::structure::{
    build_reducing, converse_check, irreducibility_scan, verify_reducing, ReducingCandidate,
};
use brownian_core::subspace::{
    build_gphi_element, build_type1, build_type2, build_type2_parts, canonical_decomposition,
    classify, SubspaceType,
};
use brownian_core::{AmbientSpec, BrownianParams, InnerSpec, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::report::{num, timestamp, without_timestamp, Summary, REPORT_SCHEMA_VERSION};

// Pinned thresholds.
pub const TYPE2_NORM_REL_TOL: f64 = 1e-8;
pub const TYPE2_BOUNDARY_TOL: f64 = 1e-8;
pub const ROUND_TRIP_TOL: f64 = 1e-7;
pub const CLOSED_FORM_TOL: f64 = 1e-12;
pub const INTERTWINING_TOL: f64 = 1e-8;
pub const TYPE1_NORM_TOL: f64 = 1e-8;
pub const TYPE2_NORM_SLACK: f64 = 1e-6;
pub const CONVERSE_ANGLE_TOL: f64 = 1e-7;
pub const POWER_GROWTH_TOL: f64 = 1e-10;
pub const C00_RATIO: f64 = 1e-3;
pub const MONOTONE_SLACK: f64 = 1e-12;
pub const DIVISION_COEFF_TOL: f64 = 1e-10;
pub const PERTURBATION_FLOOR: f64 = 1e-3;
pub const ADJOINT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    Acceptance,
    Properties,
    All,
}

impl SuiteName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Acceptance => "acceptance",
            SuiteName::Properties => "properties",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "acceptance" => Ok(SuiteName::Acceptance),
            "properties" => Ok(SuiteName::Properties),
            "all" => Ok(SuiteName::All),
            other => Err(format!("unknown suite `{other}` (acceptance, properties, all)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces every residual tolerance `τ` when set.
    pub tolerance: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: None,
        }
    }
}

impl SuiteOptions {
    fn tau(&self, max_degree: usize) -> Tolerance {
        match self.tolerance {
            Some(t) => Tolerance(t),
            None => Tolerance::for_ambient(&AmbientSpec::new(1, max_degree).expect("positive degree")),
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CriterionResult {
    pub id: String,
    pub title: &'static str,
    pub passed: bool,
    pub metrics: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CriterionResult {
    fn new(id: impl Into<String>, title: &'static str) -> Self {
        Self {
            id: id.into(),
            title,
            passed: true,
            metrics: BTreeMap::new(),
            failure: None,
        }
    }

    fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.to_string(), value.into());
    }

    fn real(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), num(value));
    }

    /// Records a failed check; the first message is kept.
    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.passed = false;
            if self.failure.is_none() {
                self.failure = Some(message());
            }
        }
    }

    fn error(id: impl Into<String>, title: &'static str, e: impl std::fmt::Display) -> Self {
        let mut c = Self::new(id, title);
        c.check(false, || e.to_string());
        c
    }

    /// One-line summary for terminal tables.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let metrics: Vec<String> = self
            .metrics
            .iter()
            .filter(|(_, v)| !v.is_array() && !v.is_object())
            .map(|(k, v)| format!("{k}={}", fmt_value(v)))
            .collect();
        let mut s = format!("[{status}] criterion {:<3} {}: {}", self.id, self.title, metrics.join(" "));
        if let Some(f) = &self.failure {
            s.push_str(&format!(" -- {f}"));
        }
        s
    }
}

fn fmt_value(v: &Value) -> String {
    match v.as_f64() {
        Some(x) if !v.is_u64() && !v.is_i64() => format!("{x:.3e}"),
        _ => v.to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub timestamp: String,
    pub suite: &'static str,
    pub seed: u64,
    pub tolerance_override: Option<f64>,
    pub criteria: Vec<CriterionResult>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn table(&self) -> String {
        let mut out: Vec<String> = self.criteria.iter().map(CriterionResult::line).collect();
        out.push(format!(
            "{} suite: {}/{} passed",
            self.suite, self.summary.passed, self.summary.total
        ));
        out.join("\n")
    }
}

pub fn run_suite(name: SuiteName, opts: SuiteOptions) -> SuiteReport {
    let criteria = match name {
        SuiteName::Acceptance => acceptance(opts),
        SuiteName::Properties => properties(opts),
        SuiteName::All => {
            let mut c = acceptance(opts);
            c.extend(properties(opts));
            c
        }
    };
    let summary = Summary::from_flags(criteria.iter().map(|c| c.passed));
    SuiteReport {
        schema_version: REPORT_SCHEMA_VERSION,
        timestamp: timestamp(),
        suite: name.as_str(),
        seed: opts.seed,
        tolerance_override: opts.tolerance,
        criteria,
        summary,
    }
}

/// Criteria 1 to 10.
pub fn acceptance(opts: SuiteOptions) -> Vec<CriterionResult> {
    let mut out = acceptance_body(opts);
    out.push(determinism(opts, &out));
    out
}

fn acceptance_body(opts: SuiteOptions) -> Vec<CriterionResult> {
    let (c2, c3) = type2_sweep(opts);
    vec![
        type1_sweep(opts),
        c2,
        c3,
        closed_form(opts),
        equivalence_grid(opts),
        norm_separation_check(opts),
        reducing(opts),
        growth_and_decay(opts),
        division_oracle(opts),
    ]
}

fn determinism(opts: SuiteOptions, first: &[CriterionResult]) -> CriterionResult {
    let mut c = CriterionResult::new("10", "determinism");
    let second = acceptance_body(opts);
    let a = serde_json::to_string(first).expect("serializes");
    let b = serde_json::to_string(&second).expect("serializes");
    c.metric("rerun_identical", a == b);
    c.metric("bytes", a.len() as u64);
    c.check(a == b, || "rerun with the same seed produced a different report".into());
    c
}

/// Compares two serialized reports modulo their timestamps.
pub fn reports_match<T: Serialize>(a: &T, b: &T) -> bool {
    without_timestamp(a) == without_timestamp(b)
}

fn draw(d: usize, d2: usize) -> InnerDraw {
    InnerDraw {
        codomain_dim: d,
        domain_dim: d2,
        max_factors: 4,
        max_zero_modulus: 0.6,
    }
}

fn random_shape<R: Rng>(rng: &mut R) -> (usize, usize) {
    let d = rng.random_range(1..=3);
    (d, rng.random_range(1..=d))
}

fn params(sigma: f64, theta: f64, d: usize, n: usize) -> BrownianParams {
    BrownianParams::new(sigma, theta, AmbientSpec::new(d, n).expect("valid")).expect("valid")
}

const SWEEP: usize = 20;
const SWEEP_DEGREE: usize = 128;

fn type1_sweep(opts: SuiteOptions) -> CriterionResult {
    let title = "Type I construction and verification";
    let mut c = CriterionResult::new("1", title);
    let mut rng = opts.rng(1);
    let tau = opts.tau(SWEEP_DEGREE);
    let (mut max_res, mut typed) = (0.0f64, 0usize);
    for case in 0..SWEEP {
        let (d, d2) = random_shape(&mut rng);
        let spec = inner_spec(&mut rng, draw(d, d2));
        let p = params(1.0, rng.random::<f64>() * TAU, d, SWEEP_DEGREE);
        let m = match build_type1(&spec, p.ambient()) {
            Ok(m) => m,
            Err(e) => return CriterionResult::error("1", title, format!("case {case}: {e}")),
        };
        match classify(&m, &p, tau) {
            Ok(cls) => {
                max_res = max_res.max(cls.invariance.max_residual);
                typed += usize::from(cls.kind == SubspaceType::TypeI);
                c.check(cls.kind == SubspaceType::TypeI, || {
                    format!("case {case}: classified {}", cls.kind.as_str())
                });
            }
            Err(e) => return CriterionResult::error("1", title, format!("case {case}: {e}")),
        }
    }
    c.metric("cases", SWEEP as u64);
    c.metric("classified_type1", typed as u64);
    c.real("max_residual", max_res);
    c.real("tau", tau.value());
    c.check(tau.accepts(max_res), || format!("residual {max_res:e} exceeds tau"));
    c
}

fn type2_sweep(opts: SuiteOptions) -> (CriterionResult, CriterionResult) {
    let t2 = "Type II construction and verification";
    let t3 = "canonical round trip";
    let mut c2 = CriterionResult::new("2", t2);
    let mut c3 = CriterionResult::new("3", t3);
    let mut rng = opts.rng(2);
    let tau = opts.tau(SWEEP_DEGREE);
    let mut max_res = 0.0f64;
    let (mut max_gap, mut max_boundary) = (0.0f64, 0.0f64);
    let (mut max_m0, mut max_defect, mut max_x) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..SWEEP {
        let (d, d2) = random_shape(&mut rng);
        let spec = inner_spec(&mut rng, draw(d, d2));
        let sigma = 0.5 + 1.5 * rng.random::<f64>();
        let p = params(sigma, rng.random::<f64>() * TAU, d, SWEEP_DEGREE);
        let r = rng.random_range(1..=d2);
        let x = isometry(&mut rng, d2, r);
        let fail = |e: &dyn std::fmt::Display| format!("case {case}: {e}");
        let parts = match build_type2_parts(&spec, &p, &x) {
            Ok(parts) => parts,
            Err(e) => {
                return (CriterionResult::error("2", t2, fail(&e)), CriterionResult::error("3", t3, fail(&e)))
            }
        };
        match classify(&parts.basis, &p, tau) {
            Ok(cls) => {
                max_res = max_res.max(cls.invariance.max_residual);
                c2.check(cls.kind == SubspaceType::TypeII, || {
                    format!("case {case}: classified {}", cls.kind.as_str())
                });
            }
            Err(e) => return (CriterionResult::error("2", t2, fail(&e)), CriterionResult::error("3", t3, fail(&e))),
        }
        let dec = match canonical_decomposition(&parts.basis, &p, Some(&spec), tau) {
            Ok(dec) => dec,
            Err(e) => return (CriterionResult::error("2", t2, fail(&e)), CriterionResult::error("3", t3, fail(&e))),
        };
        let built = parts.elements.iter().cloned();
        let recovered = dec.elements.iter().map(|e| e.element.clone());
        for e in built.chain(recovered) {
            let xn = vec_norm(&e.x);
            max_gap = max_gap.max(e.norm_gap(&p) / xn);
            max_boundary = max_boundary.max(e.boundary_residual(&spec, &p).unwrap_or(f64::INFINITY));
        }
        // round trip against the construction
        let mut elems = CMat::zeros(p.ambient().total_dim(), parts.elements.len());
        for (k, e) in parts.elements.iter().enumerate() {
            elems.set_column(k, &e.to_vector());
        }
        let m0_angle = largest_angle(dec.m0.columns(), parts.type1.columns());
        let defect_angle = largest_angle(dec.defect.columns(), &elems);
        max_m0 = max_m0.max(m0_angle);
        max_defect = max_defect.max(defect_angle);
        // defect basis = elements · A, so its parameters must equal X · A
        if dec.defect.dim() == elems.ncols() {
            let a = match elems.ad_mul(&elems).try_inverse() {
                Some(inv) => inv * elems.ad_mul(dec.defect.columns()),
                None => return (c2, CriterionResult::error("3", t3, "singular element Gram matrix")),
            };
            let want = &parts.parameters * a;
            let mut got = CMat::zeros(want.nrows(), want.ncols());
            for (k, e) in dec.elements.iter().enumerate() {
                got.set_column(k, &e.element.x);
            }
            max_x = max_x.max((got - &want).norm() / want.norm());
        } else {
            max_x = f64::INFINITY;
        }
    }
    c2.metric("cases", SWEEP as u64);
    c2.real("max_residual", max_res);
    c2.real("tau", tau.value());
    c2.real("max_norm_gap_relative", max_gap);
    c2.real("max_boundary_residual", max_boundary);
    c2.check(tau.accepts(max_res), || format!("residual {max_res:e} exceeds tau"));
    c2.check(max_gap < TYPE2_NORM_REL_TOL, || format!("norm identity off by {max_gap:e}"));
    c2.check(max_boundary < TYPE2_BOUNDARY_TOL, || format!("boundary residual {max_boundary:e}"));

    c3.metric("cases", SWEEP as u64);
    c3.real("max_m0_angle", max_m0);
    c3.real("max_defect_angle", max_defect);
    c3.real("max_parameter_error_relative", max_x);
    c3.check(max_m0 < ROUND_TRIP_TOL, || format!("M0 angle {max_m0:e}"));
    c3.check(max_defect < ROUND_TRIP_TOL, || format!("defect angle {max_defect:e}"));
    c3.check(max_x < ROUND_TRIP_TOL, || format!("parameter error {max_x:e}"));
    (c2, c3)
}

fn largest_angle(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return PI / 2.0;
    }
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

fn closed_form(_opts: SuiteOptions) -> CriterionResult {
    let title = "scalar closed form for z^k";
    let mut c = CriterionResult::new("4", title);
    let (mut max_coeff, mut max_norm) = (0.0f64, 0.0f64);
    let mut cases = 0u64;
    for k in 1..=5usize {
        for sigma in [0.5, 1.0, 2.0] {
            let p = params(sigma, 0.0, 1, 64);
            let x = brownian_core::linalg::CVec::from_element(1, C64::new(sigma, 0.0));
            let e = match build_gphi_element(&InnerSpec::monomial(k), &p, &x) {
                Ok(e) => e,
                Err(err) => return CriterionResult::error("4", title, err),
            };
            for n in 0..=64 {
                let want = if n < k { sigma } else { 0.0 };
                max_coeff = max_coeff.max((e.g.coeff(n)[0] - C64::new(want, 0.0)).norm());
            }
            let kn = k as f64 * sigma * sigma;
            max_norm = max_norm.max((e.g.norm().powi(2) - kn).abs() / kn);
            cases += 1;
        }
    }
    c.metric("cases", cases);
    c.real("max_coefficient_error", max_coeff);
    c.real("max_norm_error_relative", max_norm);
    c.check(max_coeff < CLOSED_FORM_TOL, || format!("coefficient error {max_coeff:e}"));
    c.check(max_norm < CLOSED_FORM_TOL, || format!("norm error {max_norm:e}"));
    c
}

/// `σ₁² / (1 + (k₁ - k₂) σ₁²)` when positive.
fn predicted_sigma2_sq(k1: usize, k2: usize, s1: f64) -> Option<f64> {
    let denom = 1.0 + (k1 as f64 - k2 as f64) * s1 * s1;
    (denom > 0.0).then(|| s1 * s1 / denom)
}

fn equivalence_grid(opts: SuiteOptions) -> CriterionResult {
    let title = "scalar equivalence criterion";
    let mut c = CriterionResult::new("5", title);
    let n = 128;
    let tau = opts.tau(n);
    let (mut pairs, mut equivalent, mut max_res) = (0u64, 0u64, 0.0f64);
    // built subspaces keyed by (k, sigma bits)
    let mut cache: BTreeMap<(usize, u64), Result<ScalarTypeII, String>> = BTreeMap::new();
    let mut get = |k: usize, s: f64| {
        cache
            .entry((k, s.to_bits()))
            .or_insert_with(|| {
                ScalarTypeII::build(&params(s, 0.0, 1, n), &InnerSpec::monomial(k), tau).map_err(|e| e.to_string())
            })
            .clone()
    };
    for k1 in 1..=3usize {
        for k2 in 1..=3usize {
            for s1 in [0.5, 1.0, 2.0] {
                let predicted = predicted_sigma2_sq(k1, k2, s1);
                let mut candidates: Vec<f64> = vec![0.5, 1.0, 2.0];
                if let Some(p2) = predicted {
                    candidates.push(p2.sqrt());
                }
                candidates.sort_by(f64::total_cmp);
                candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                for s2 in candidates {
                    let expect = predicted.is_some_and(|p2| (s2 * s2 - p2).abs() <= 1e-9 * p2);
                    let v = match (get(k1, s1), get(k2, s2)) {
                        (Ok(a), Ok(b)) => decide_scalar_built(&a, &b, tau).map_err(|e| e.to_string()),
                        (Err(e), _) | (_, Err(e)) => Err(e),
                    };
                    pairs += 1;
                    match v {
                        Ok(v) => {
                            c.check(v.equivalent == expect, || {
                                format!("k1={k1} k2={k2} s1={s1} s2={s2}: verdict {}", v.reason.as_str())
                            });
                            if v.equivalent {
                                equivalent += 1;
                                let r = v.residual.unwrap_or(f64::INFINITY);
                                max_res = max_res.max(r);
                            }
                        }
                        Err(e) => c.check(false, || format!("k1={k1} k2={k2} s1={s1} s2={s2}: {e}")),
                    }
                }
            }
        }
    }
    c.metric("pairs", pairs);
    c.metric("equivalent", equivalent);
    c.real("max_intertwining_residual", max_res);
    c.check(max_res < INTERTWINING_TOL, || format!("intertwining residual {max_res:e}"));
    c
}

fn norm_separation_check(opts: SuiteOptions) -> CriterionResult {
    let title = "cross-type norm separation";
    let mut c = CriterionResult::new("6", title);
    let mut rng = opts.rng(6);
    let n = 96;
    let tau = opts.tau(n);
    let mut max_type1 = 0.0f64;
    let mut min_margin = f64::INFINITY;
    for case in 0..10 {
        let (d, d2) = random_shape(&mut rng);
        let spec = inner_spec(&mut rng, draw(d, d2));
        let sigma = 0.5 + 1.5 * rng.random::<f64>();
        let p = params(sigma, rng.random::<f64>() * TAU, d, n);
        let t1 = build_type1(&spec, p.ambient());
        let t2 = build_type2(&spec, &p, &isometry(&mut rng, d2, 1));
        let (t1, t2) = match (t1, t2) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return CriterionResult::error("6", title, format!("case {case}: {e}")),
        };
        match norm_separation((&t1, &p), (&t2, &p), tau) {
            Ok(rep) => {
                max_type1 = max_type1.max((rep.first.norm - 1.0).abs());
                min_margin = min_margin.min(rep.second.norm - rep.second.bound);
                c.check(rep.non_equivalent == Some(true), || format!("case {case}: no separation"));
            }
            Err(e) => return CriterionResult::error("6", title, format!("case {case}: {e}")),
        }
    }
    let p = params(1.0, 0.0, 1, 128);
    let z = InnerSpec::monomial(1);
    let m = match build_type2(&z, &p, &CMat::identity(1, 1)) {
        Ok(m) => m,
        Err(e) => return CriterionResult::error("6", title, e),
    };
    let norm_z = restricted_norm(&m, &p);
    let floor = (1.5 - TYPE2_NORM_SLACK).sqrt();
    c.real("max_type1_deviation", max_type1);
    c.real("min_type2_margin", min_margin);
    c.real("scalar_z_norm", norm_z);
    c.real("scalar_z_floor", floor);
    c.check(max_type1 < TYPE1_NORM_TOL, || format!("Type I norm off by {max_type1:e}"));
    c.check(min_margin > -TYPE1_NORM_TOL, || format!("Type II norm below bound by {:e}", -min_margin));
    c.check(norm_z >= floor, || format!("scalar Type II norm {norm_z}"));
    c
}

fn reducing(opts: SuiteOptions) -> CriterionResult {
    let title = "reducing subspaces";
    let mut c = CriterionResult::new("7", title);
    let mut rng = opts.rng(7);
    let n = 64;
    let tau = opts.tau(n);
    let (mut max_fwd, mut max_adj, mut max_angle) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..20 {
        let d = rng.random_range(1..=3);
        let rank = rng.random_range(1..=d);
        let g = ReducingCandidate::new(&isometry(&mut rng, d, rank));
        let p = params(0.5 + 1.5 * rng.random::<f64>(), rng.random::<f64>() * TAU, d, n);
        let result = build_reducing(&g, p.ambient()).and_then(|m| {
            let rep = verify_reducing(&m, &p)?;
            let conv = converse_check(&m)?;
            Ok((rep, conv))
        });
        match result {
            Ok((rep, conv)) => {
                max_fwd = max_fwd.max(rep.fwd_residual);
                max_adj = max_adj.max(rep.adj_residual);
                let g_angle = largest_angle(conv.extracted.basis(), g.basis());
                max_angle = max_angle.max(conv.max_angle).max(g_angle);
            }
            Err(e) => return CriterionResult::error("7", title, format!("case {case}: {e}")),
        }
    }
    let p = params(1.0, 0.3, 2, 32);
    let mut random_passing = 0u64;
    let mut min_random = f64::INFINITY;
    for _ in 0..100 {
        let k = rng.random_range(1..=16);
        let support = rng.random_range(0..32);
        let cols = ambient_columns(&mut rng, p.ambient(), k, support);
        let rep = brownian_core::SubspaceBasis::custom(p.ambient(), &cols, "random")
            .and_then(|m| verify_reducing(&m, &p));
        match rep {
            Ok(rep) => {
                min_random = min_random.min(rep.fwd_residual.max(rep.adj_residual));
                random_passing += u64::from(rep.is_reducing(opts.tau(32)));
            }
            Err(e) => return CriterionResult::error("7", title, e),
        }
    }
    c.real("max_fwd_residual", max_fwd);
    c.real("max_adj_residual", max_adj);
    c.real("max_converse_angle", max_angle);
    c.metric("random_trials", 100u64);
    c.metric("random_passing", random_passing);
    c.real("min_random_residual", min_random);
    c.check(tau.accepts(max_fwd) && tau.accepts(max_adj), || {
        format!("product residuals {max_fwd:e} / {max_adj:e}")
    });
    c.check(max_angle < CONVERSE_ANGLE_TOL, || format!("converse angle {max_angle:e}"));
    c.check(random_passing == 0, || format!("{random_passing} random subspaces reduce"));
    c
}

fn growth_and_decay(opts: SuiteOptions) -> CriterionResult {
    let title = "2-isometry growth and C00 decay";
    let mut c = CriterionResult::new("8", title);
    let mut rng = opts.rng(8);
    let n = 128;
    let mut max_rel = 0.0f64;
    for sigma in [0.5, 1.0, 2.0] {
        let p = params(sigma, rng.random::<f64>() * TAU, 2, n);
        let x = gaussian_vector(&mut rng, 2);
        let seq = match power_growth(&p, &x, n) {
            Ok(s) => s,
            Err(e) => return CriterionResult::error("8", title, e),
        };
        let x2 = vec_norm(&x).powi(2);
        for (k, v) in seq.iter().enumerate() {
            let want = (1.0 + k as f64 * sigma * sigma) * x2;
            max_rel = max_rel.max((v - want).abs() / want);
        }
    }
    let (mut worst_ratio, mut monotone) = (0.0f64, true);
    for sigma in [0.75, 1.0, 2.0] {
        let p = params(sigma, rng.random::<f64>() * TAU, 2, n);
        for _ in 0..3 {
            let cols = ambient_columns(&mut rng, p.ambient(), 1, 8);
            let v = BrownianElement::from_vector(p.ambient(), &cols.column(0).into_owned()).expect("layout");
            match c00_decay(&p, &v, n) {
                Ok(prof) => {
                    monotone &= prof.adjoint_non_increasing(MONOTONE_SLACK);
                    worst_ratio = worst_ratio.max(prof.adjoint[n] / prof.adjoint[0]);
                }
                Err(e) => return CriterionResult::error("8", title, e),
            }
        }
    }
    c.real("max_growth_error_relative", max_rel);
    c.metric("adjoint_non_increasing", monotone);
    c.real("worst_adjoint_ratio", worst_ratio);
    c.check(max_rel < POWER_GROWTH_TOL, || format!("growth error {max_rel:e}"));
    c.check(monotone, || "adjoint powers increased".into());
    c.check(worst_ratio < C00_RATIO, || format!("adjoint ratio {worst_ratio:e}"));
    c
}

fn division_oracle(opts: SuiteOptions) -> CriterionResult {
    let title = "division oracle";
    let mut c = CriterionResult::new("9", title);
    let mut rng = opts.rng(9);
    let amb = AmbientSpec::new(1, 32).expect("valid");
    let coeff_tol = opts.tolerance.unwrap_or(DIVISION_COEFF_TOL);
    let tau = opts.tau(32);
    let (mut max_err, mut max_res, mut flagged, mut min_boundary) = (0.0f64, 0.0f64, 0u64, f64::INFINITY);
    for _ in 0..50 {
        let theta = rng.random::<f64>() * TAU;
        let lambda = C64::from_polar(1.0, theta);
        let deg = rng.random_range(1..=20);
        let q: Vec<C64> = (0..deg).map(|_| gaussian(&mut rng)).collect();
        let q = HardyElement::scalar(amb, &q).expect("fits");
        let (zq, _) = shift(&q);
        let h = &zq - &q.scale(lambda);
        let div = divide_by_zeta(&h, theta);
        for k in 0..=32 {
            max_err = max_err.max((div.quotient.coeff(k)[0] - q.coeff(k)[0]).norm());
        }
        max_res = max_res.max(div.residual);
        let delta = C64::from_polar(PERTURBATION_FLOOR * (1.0 + 999.0 * rng.random::<f64>()), rng.random::<f64>() * TAU);
        let bumped = &h + &HardyElement::scalar(amb, &[delta]).expect("fits");
        let div = divide_by_zeta(&bumped, theta);
        min_boundary = min_boundary.min(div.boundary_value);
        flagged += u64::from(div.is_flagged(tau.value()));
    }
    c.real("max_coefficient_error", max_err);
    c.real("max_division_residual", max_res);
    c.real("coefficient_tolerance", coeff_tol);
    c.metric("perturbed_flagged", flagged);
    c.real("min_perturbed_boundary_value", min_boundary);
    c.check(max_err < coeff_tol, || format!("coefficient error {max_err:e}"));
    c.check(tau.accepts(max_res), || format!("division residual {max_res:e} exceeds tau"));
    c.check(flagged == 50, || format!("only {flagged}/50 perturbed numerators flagged"));
    c
}

/// Randomized property checks.
pub fn properties(opts: SuiteOptions) -> Vec<CriterionResult> {
    vec![
        adjoint_consistency(opts),
        gphi_properties(opts),
        criterion_certificate_agreement(opts),
        reflexive_symmetric(opts),
        cross_type_exclusion(opts),
        scalar_irreducibility(opts),
        norm_formula(opts),
    ]
}

fn adjoint_consistency(opts: SuiteOptions) -> CriterionResult {
    let mut c = CriterionResult::new("P1", "adjoint consistency and B*B");
    let mut rng = opts.rng(101);
    let (mut max_adj, mut max_gram) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let sigma = 0.1 + 2.9 * rng.random::<f64>();
        let p = params(sigma, rng.random::<f64>() * TAU, d, 24);
        let cols = ambient_columns(&mut rng, p.ambient(), 2, 23);
        let (u, v) = (cols.column(0).into_owned(), cols.column(1).into_owned());
        let lhs = inner(&apply_vector(&p, &u), &v);
        let rhs = inner(&u, &apply_adjoint_vector(&p, &v));
        max_adj = max_adj.max((lhs - rhs).norm() / (vec_norm(&u) * vec_norm(&v)));
        let w = apply_adjoint_vector(&p, &apply_vector(&p, &u));
        let mut want = u.clone();
        let a = p.ambient().analytic_dim();
        for j in 0..d {
            want[a + j] *= C64::new(1.0 + sigma * sigma, 0.0);
        }
        max_gram = max_gram.max(vec_norm(&(w - want)) / vec_norm(&u));
    }
    c.real("max_adjoint_error_relative", max_adj);
    c.real("max_gram_error_relative", max_gram);
    c.check(max_adj < ADJOINT_REL_TOL, || format!("adjoint error {max_adj:e}"));
    c.check(max_gram < ADJOINT_REL_TOL * 10.0, || format!("B*B error {max_gram:e}"));
    c
}

fn gphi_properties(opts: SuiteOptions) -> CriterionResult {
    let title = "G_Phi linearity and identities";
    let mut c = CriterionResult::new("P2", title);
    let mut rng = opts.rng(102);
    let n = 96;
    let tau = opts.tau(n);
    let (mut lin, mut ident, mut model) = (0.0f64, 0.0f64, 0.0f64);
    for case in 0..20 {
        let (d, d2) = random_shape(&mut rng);
        let spec = inner_spec(&mut rng, draw(d, d2));
        let p = params(0.3 + 1.7 * rng.random::<f64>(), rng.random::<f64>() * TAU, d, n);
        let x1 = gaussian_vector(&mut rng, d2);
        let x2 = gaussian_vector(&mut rng, d2);
        let k = gaussian(&mut rng);
        let built = (|| {
            let e1 = build_gphi_element(&spec, &p, &x1)?;
            let e2 = build_gphi_element(&spec, &p, &x2)?;
            let e12 = build_gphi_element(&spec, &p, &(&x1 + &x2 * k))?;
            let r = e1.identity_residual(&spec, &p)?.max(e2.identity_residual(&spec, &p)?);
            let m = e1.model_space_defect(&spec)?;
            Ok::<_, brownian_core::Error>((e1, e2, e12, r, m))
        })();
        match built {
            Ok((e1, e2, e12, r, m)) => {
                let combo = e1.to_vector() + e2.to_vector() * k;
                lin = lin.max(vec_norm(&(combo - e12.to_vector())) / (1.0 + vec_norm(&e12.to_vector())));
                ident = ident.max(r);
                model = model.max(m);
            }
            Err(e) => return CriterionResult::error("P2", title, format!("case {case}: {e}")),
        }
    }
    c.real("max_linearity_error", lin);
    c.real("max_identity_residual", ident);
    c.real("max_model_space_defect", model);
    c.check(tau.accepts(lin), || format!("linearity error {lin:e}"));
    c.check(tau.accepts(ident), || format!("identity residual {ident:e}"));
    c.check(tau.accepts(model), || format!("model space defect {model:e}"));
    c
}

fn criterion_certificate_agreement(opts: SuiteOptions) -> CriterionResult {
    let title = "criterion and certificate search agree";
    let mut c = CriterionResult::new("P3", title);
    let mut rng = opts.rng(103);
    let n = 64;
    let tau = opts.tau(n);
    let (mut equivalent, mut agree) = (0u64, 0u64);
    for case in 0..50 {
        let k1 = rng.random_range(1..=3);
        let k2 = rng.random_range(1..=3);
        let s1 = [0.5, 1.0, 2.0][rng.random_range(0..3)];
        let theta1 = [0.0, PI / 3.0][rng.random_range(0..2)];
        let theta2 = if rng.random_bool(0.2) { theta1 + 0.5 } else { theta1 };
        let s2 = match predicted_sigma2_sq(k1, k2, s1) {
            Some(p2) if rng.random_bool(0.5) => p2.sqrt(),
            _ => [0.5, 1.0, 2.0][rng.random_range(0..3)],
        };
        let (p1, p2) = (params(s1, theta1, 1, n), params(s2, theta2, 1, n));
        let (psi1, psi2) = (InnerSpec::monomial(k1), InnerSpec::monomial(k2));
        let decided = decide_scalar_type2(&p1, &psi1, &p2, &psi2, tau);
        let searched = scalar_certificate_search(&p1, &psi1, &p2, &psi2, 16, tau);
        match (decided, searched) {
            (Ok(v), Ok(found)) => {
                equivalent += u64::from(v.equivalent);
                let same = v.equivalent == found.is_some();
                agree += u64::from(same);
                c.check(same, || format!("case {case}: criterion {} vs search {}", v.equivalent, found.is_some()));
            }
            (Err(e), _) | (_, Err(e)) => c.check(false, || format!("case {case}: {e}")),
        }
    }
    c.metric("pairs", 50u64);
    c.metric("equivalent", equivalent);
    c.metric("agreements", agree);
    c
}

fn reflexive_symmetric(opts: SuiteOptions) -> CriterionResult {
    let title = "reflexivity and symmetry";
    let mut c = CriterionResult::new("P4", title);
    let n = 64;
    let tau = opts.tau(n);
    let mut max_self = 0.0f64;
    let mut checked = 0u64;
    for k1 in 1..=3usize {
        for s1 in [0.5, 1.0] {
            let p1 = params(s1, 0.7, 1, n);
            let psi1 = InnerSpec::monomial(k1);
            match decide_scalar_type2(&p1, &psi1, &p1, &psi1, tau) {
                Ok(v) => {
                    c.check(v.equivalent, || format!("k={k1} s={s1} not self-equivalent"));
                    max_self = max_self.max(v.residual.unwrap_or(f64::INFINITY));
                }
                Err(e) => c.check(false, || e.to_string()),
            }
            for k2 in 1..=3usize {
                let s2 = predicted_sigma2_sq(k1, k2, s1).map_or(1.0, f64::sqrt);
                let p2 = params(s2, 0.7, 1, n);
                let psi2 = InnerSpec::monomial(k2);
                let ab = decide_scalar_type2(&p1, &psi1, &p2, &psi2, tau).map(|v| v.equivalent);
                let ba = decide_scalar_type2(&p2, &psi2, &p1, &psi1, tau).map(|v| v.equivalent);
                checked += 1;
                c.check(ab.is_ok() && ab == ba, || format!("asymmetric verdict k1={k1} k2={k2} s1={s1}"));
            }
        }
    }
    c.real("max_self_residual", max_self);
    c.metric("swapped_pairs", checked);
    c.check(max_self < INTERTWINING_TOL, || format!("self residual {max_self:e}"));
    c
}

fn cross_type_exclusion(opts: SuiteOptions) -> CriterionResult {
    let title = "Type II subspaces never reduce";
    let mut c = CriterionResult::new("P5", title);
    let mut rng = opts.rng(105);
    let n = 128;
    let tau = opts.tau(n);
    let (mut min_adj, mut product_form) = (f64::INFINITY, 0u64);
    for case in 0..10 {
        let (d, d2) = random_shape(&mut rng);
        let spec = inner_spec(&mut rng, draw(d, d2));
        let p = params(0.5 + 1.5 * rng.random::<f64>(), rng.random::<f64>() * TAU, d, n);
        let x = isometry(&mut rng, d2, 1);
        let checked = build_type2(&spec, &p, &x)
            .and_then(|m| verify_reducing(&m, &p).map(|rep| (m, rep)));
        match checked {
            Ok((m, rep)) if rep.is_reducing(tau) => {
                // only a product space H^2_G + G may reduce
                product_form += 1;
                match converse_check(&m) {
                    Ok(conv) => c.check(conv.max_angle < CONVERSE_ANGLE_TOL, || {
                        format!("case {case}: reducing Type II without product form")
                    }),
                    Err(e) => c.check(false, || format!("case {case}: {e}")),
                }
            }
            Ok((_, rep)) => min_adj = min_adj.min(rep.adj_residual),
            Err(e) => return CriterionResult::error("P5", title, format!("case {case}: {e}")),
        }
    }
    c.real("min_adjoint_residual", min_adj);
    c.metric("product_form_cases", product_form);
    c
}

fn scalar_irreducibility(opts: SuiteOptions) -> CriterionResult {
    let title = "scalar irreducibility scan";
    let mut c = CriterionResult::new("P6", title);
    let mut rng = opts.rng(106);
    let p = params(1.0, 0.0, 1, 64);
    let tau = opts.tau(64);
    match irreducibility_scan(&p, 100, tau, &mut rng) {
        Ok(rep) => {
            c.metric("trials", rep.trials as u64);
            c.metric("nontrivial_found", rep.nontrivial_found as u64);
            c.real("min_random_residual", rep.min_random_residual);
            c.check(rep.trivial.iter().all(|r| r.is_reducing(tau)), || "trivial candidates fail".into());
            c.check(rep.nontrivial_found == 0, || format!("{} nontrivial reducing subspaces", rep.nontrivial_found));
        }
        Err(e) => c.check(false, || e.to_string()),
    }
    c
}

fn norm_formula(opts: SuiteOptions) -> CriterionResult {
    let title = "operator norm sqrt(1 + sigma^2)";
    let mut c = CriterionResult::new("P7", title);
    let mut rng = opts.rng(107);
    let mut max_err = 0.0f64;
    for _ in 0..10 {
        let sigma = 0.1 + 2.9 * rng.random::<f64>();
        let p = params(sigma, rng.random::<f64>() * TAU, 2, 32);
        match operator_norm(&p) {
            Ok(est) => max_err = max_err.max((est.value() - (1.0 + sigma * sigma).sqrt()).abs()),
            Err(e) => return CriterionResult::error("P7", title, e),
        }
    }
    c.real("max_error", max_err);
    c.check(max_err < 1e-12, || format!("norm error {max_err:e}"));
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction_arithmetic() {
        assert_eq!(predicted_sigma2_sq(2, 1, 1.0), Some(0.5));
        assert_eq!(predicted_sigma2_sq(1, 2, 1.0), None);
        assert_eq!(predicted_sigma2_sq(2, 2, 2.0), Some(4.0));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<SuiteName>().unwrap(), SuiteName::All);
        assert!("bogus".parse::<SuiteName>().is_err());
    }
}
