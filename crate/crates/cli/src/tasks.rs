//! Task execution: each task produces a machine-readable detail document
//! and a pass/fail/error status.

use serde::Serialize;
use serde_json::{json, Value};

use atlift::bundle::{lie_bracket_numeric, verify_basis_brackets, PhasePoint};
use atlift::lifts::{atl_bracket, atl_combine, classical_bracket_table};
use atlift::sample::{
    random_atl, rng_from_seed, sample_base_points, sample_phase_points, SampleSpec,
};
use atlift::symmetry::{
    atl_dynamical_conditions, classify_vector_field, coincidence_check, dynamical_residual,
    matter_spray_bracket,
};
use atlift::transport::{
    covariant_rate_residual, integrate_atl, integrate_geodesic, norm_drift, IntegratorConfig,
};
use atlift::Error as CoreError;

use crate::config::{ConfigError, ResolvedConfig, TaskSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pass,
    Fail,
    Error,
}

pub struct TaskResult {
    pub status: TaskStatus,
    pub error: Option<String>,
    pub details: Value,
    /// CSV payloads to write next to the report (name, contents).
    pub artifacts: Vec<(String, String)>,
}

impl TaskResult {
    fn new(status: TaskStatus, details: Value) -> Self {
        TaskResult {
            status,
            error: None,
            details,
            artifacts: Vec::new(),
        }
    }

    fn from_flag(pass: bool, details: Value) -> Self {
        TaskResult::new(if pass { TaskStatus::Pass } else { TaskStatus::Fail }, details)
    }
}

/// Numerical failure during task execution (exit code 3 territory).
pub struct NumericalError(pub String);

impl From<CoreError> for NumericalError {
    fn from(e: CoreError) -> Self {
        NumericalError(e.to_string())
    }
}

pub enum TaskError {
    Config(ConfigError),
    Numerical(NumericalError),
}

impl From<ConfigError> for TaskError {
    fn from(e: ConfigError) -> Self {
        TaskError::Config(e)
    }
}

impl From<CoreError> for TaskError {
    fn from(e: CoreError) -> Self {
        TaskError::Numerical(e.into())
    }
}

fn spec_for(rc: &ResolvedConfig, default_count: usize) -> SampleSpec {
    let mut spec = SampleSpec::for_metric(&rc.metric, rc.seed, rc.count.unwrap_or(default_count));
    if let Some(b) = &rc.x_box {
        spec = spec.with_x_box(b.clone());
    }
    if let Some(b) = &rc.p_box {
        spec = spec.with_p_box(b.clone());
    }
    spec.min_p_norm = rc.min_p_norm;
    spec
}

pub fn run_task(rc: &ResolvedConfig, task: &TaskSpec, index: usize) -> Result<TaskResult, TaskError> {
    match task {
        TaskSpec::VerifyBrackets {} => verify_brackets(rc),
        TaskSpec::VerifyAtlAlgebra { pairs, vectors } => {
            verify_atl_algebra(rc, pairs.unwrap_or(100), vectors.as_ref())
        }
        TaskSpec::Classify { field } => classify(rc, field),
        TaskSpec::CheckDynamical { lift, psi } => check_dynamical(rc, lift, psi.as_deref()),
        TaskSpec::CheckMatter { vector, tensor } => check_matter(rc, vector, tensor.as_deref()),
        TaskSpec::Integrate {
            lift,
            start,
            span,
            step,
            output,
        } => integrate(rc, lift, start, *span, *step, output.as_deref(), index),
    }
}

fn verify_brackets(rc: &ResolvedConfig) -> Result<TaskResult, TaskError> {
    let pts = sample_phase_points(&rc.metric, &spec_for(rc, 100))?;
    let mut vv: f64 = 0.0;
    let mut hv: f64 = 0.0;
    let mut hh: f64 = 0.0;
    let mut worst_point: Option<&PhasePoint> = None;
    for pt in &pts {
        let report = verify_basis_brackets(&rc.metric, pt)?;
        if worst_point.is_none()
            || report.max() > vv.max(hv).max(hh)
        {
            worst_point = Some(pt);
        }
        vv = vv.max(report.vertical_vertical);
        hv = hv.max(report.horizontal_vertical);
        hh = hh.max(report.horizontal_horizontal);
    }
    let tol = rc.tolerances.identity;
    let pass = vv < tol && hv < tol && hh < tol;
    let details = json!({
        "points": pts.len(),
        "tolerance": tol,
        "max_residuals": {
            "vertical_vertical": vv,
            "horizontal_vertical": hv,
            "horizontal_horizontal": hh,
        },
        "worst_point": worst_point.map(|pt| json!({"x": pt.x, "p": pt.p})),
    });
    Ok(TaskResult::from_flag(pass, details))
}

fn verify_atl_algebra(
    rc: &ResolvedConfig,
    pairs: usize,
    vectors: Option<&(String, String)>,
) -> Result<TaskResult, TaskError> {
    let pts = sample_phase_points(&rc.metric, &spec_for(rc, 10))?;
    let mut rng = rng_from_seed(rc.seed);
    let mut worst_bracket: f64 = 0.0;
    let mut worst_linear: f64 = 0.0;
    for i in 0..pairs {
        let l1 = random_atl(&mut rng, &rc.metric, 0.7);
        let l2 = random_atl(&mut rng, &rc.metric, 0.7);
        let f1 = l1.induced_field(&rc.metric);
        let f2 = l2.induced_field(&rc.metric);
        let pt = &pts[i % pts.len()];
        let numeric = lie_bracket_numeric(&f1, &f2, pt)?;
        let geo = rc.metric.geometry_at(&pt.x)?;
        let closed = atl_bracket(&rc.metric, &l1, &l2, &pt.x)?.field_value(&geo, pt);
        for j in 0..numeric.len() {
            worst_bracket = worst_bracket.max((numeric[j] - closed[j]).abs());
        }

        let alpha = 1.0 - 0.01 * i as f64;
        let beta = -0.4 + 0.01 * i as f64;
        let combined = atl_combine(alpha, &l1, beta, &l2)?;
        let vc = combined.induced_field(&rc.metric).value(pt)?;
        let v1 = f1.value(pt)?;
        let v2 = f2.value(pt)?;
        for j in 0..vc.len() {
            let expect = alpha * v1[j] + beta * v2[j];
            worst_linear = worst_linear.max((vc[j] - expect).abs() / expect.abs().max(1.0));
        }
    }

    let mut table = None;
    let mut worst_table: f64 = 0.0;
    if let Some((yname, zname)) = vectors {
        let y = rc.vector(yname)?;
        let z = rc.vector(zname)?;
        for pt in &pts {
            let report = classical_bracket_table(&rc.metric, &y, &z, pt)?;
            worst_table = worst_table.max(report.max());
        }
        table = Some(json!({
            "fields": [yname, zname],
            "max_residual": worst_table,
        }));
    }

    let tol = rc.tolerances.algebra;
    let pass = worst_bracket < tol && worst_linear < 1e-12 && worst_table < tol;
    let details = json!({
        "pairs": pairs,
        "tolerance": tol,
        "max_bracket_residual": worst_bracket,
        "max_linearity_residual": worst_linear,
        "classical_table": table,
    });
    Ok(TaskResult::from_flag(pass, details))
}

fn classify(rc: &ResolvedConfig, field: &str) -> Result<TaskResult, TaskError> {
    let y = rc.vector(field)?;
    let samples = sample_base_points(&rc.metric, &spec_for(rc, 64))?;
    let report = classify_vector_field(&rc.metric, &y, &samples, rc.tolerances.classify)?;
    let details = json!({
        "field": field,
        "samples": samples.len(),
        "worst_residual": report.worst(),
        "report": serde_json::to_value(&report).expect("report serializes"),
    });
    // classification is informational: it reports flags, it does not fail
    Ok(TaskResult::new(TaskStatus::Pass, details))
}

fn check_dynamical(
    rc: &ResolvedConfig,
    lift_decl: &crate::config::LiftDecl,
    psi_name: Option<&str>,
) -> Result<TaskResult, TaskError> {
    let base = sample_base_points(&rc.metric, &spec_for(rc, 64))?;
    let lift = rc.build_lift(lift_decl, &base)?;
    let psi = match psi_name {
        Some(name) => rc.scalar(name)?,
        None => atlift::geometry::ScalarFieldSpec::zero(rc.metric.dim()),
    };

    let mut worst_conditions: f64 = 0.0;
    let mut worst_cond_point: Option<Vec<f64>> = None;
    for x in &base {
        let cond = atl_dynamical_conditions(&rc.metric, &lift, x, &psi)?;
        if cond.max() > worst_conditions {
            worst_conditions = cond.max();
            worst_cond_point = Some(x.clone());
        }
    }

    let field = lift.induced_field(&rc.metric);
    let pts = sample_phase_points(&rc.metric, &spec_for(rc, 64))?;
    let mut worst_bracket: f64 = 0.0;
    let mut worst_psi_err: f64 = 0.0;
    let mut worst_point: Option<&PhasePoint> = None;
    for pt in &pts {
        let r = dynamical_residual(&rc.metric, &field, pt)?;
        if r.residual > worst_bracket {
            worst_bracket = r.residual;
            worst_point = Some(pt);
        }
        let expected = psi.eval(&pt.x)?;
        worst_psi_err = worst_psi_err.max((r.psi_hat - expected).abs());
    }

    let tol = rc.tolerances.algebra;
    let pass = worst_conditions < tol && worst_bracket < tol && worst_psi_err < 10.0 * tol;
    let details = json!({
        "lift": lift_decl.kind,
        "tolerance": tol,
        "max_condition_residual": worst_conditions,
        "worst_condition_point": worst_cond_point,
        "max_bracket_residual": worst_bracket,
        "max_psi_error": worst_psi_err,
        "worst_point": worst_point.map(|pt| json!({"x": pt.x, "p": pt.p})),
    });
    Ok(TaskResult::from_flag(pass, details))
}

fn check_matter(
    rc: &ResolvedConfig,
    vector: &str,
    tensor: Option<&str>,
) -> Result<TaskResult, TaskError> {
    let y = rc.vector(vector)?;
    let base = sample_base_points(&rc.metric, &spec_for(rc, 64))?;
    let a = match tensor {
        Some(name) => atlift::geometry::Tensor2Field::expressions(rc.tensor2(name)?),
        None => atlift::geometry::Tensor2Field::SkewGradOf(y.clone()),
    };

    // skewness is a verification, not a config error
    let lift = match atlift::lifts::matter_lift(&rc.metric, y.clone(), a, &base) {
        Ok(lift) => lift,
        Err(CoreError::SkewnessViolation { max_violation }) => {
            return Ok(TaskResult::from_flag(
                false,
                json!({
                    "field": vector,
                    "skew_violation": max_violation,
                    "note": "transport generator is not skew; not a matter symmetry",
                }),
            ));
        }
        Err(e) => return Err(e.into()),
    };

    let pts = sample_phase_points(&rc.metric, &spec_for(rc, 64))?;
    let field = lift.induced_field(&rc.metric);
    let spray = atlift::bundle::BundleField::spray(rc.metric.clone());
    let mut worst_bracket: f64 = 0.0;
    for pt in &pts {
        let closed = matter_spray_bracket(&rc.metric, &lift, pt)?;
        let numeric = lie_bracket_numeric(&field, &spray, pt)?;
        for j in 0..closed.len() {
            worst_bracket = worst_bracket.max((closed[j] - numeric[j]).abs());
        }
    }

    let coincidence = coincidence_check(&rc.metric, &y, &pts, rc.tolerances.classify)?;
    let tol = rc.tolerances.algebra;
    let pass = worst_bracket < tol && coincidence.consistent;
    let details = json!({
        "field": vector,
        "tolerance": tol,
        "max_spray_bracket_residual": worst_bracket,
        "coincidence": serde_json::to_value(&coincidence).expect("report serializes"),
    });
    Ok(TaskResult::from_flag(pass, details))
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    rc: &ResolvedConfig,
    lift_decl: &crate::config::LiftDecl,
    start: &crate::config::StartPoint,
    span: (f64, f64),
    step: Option<f64>,
    output: Option<&str>,
    index: usize,
) -> Result<TaskResult, TaskError> {
    let n = rc.metric.dim();
    if start.x.len() != n || start.p.len() != n {
        return Err(TaskError::Config(ConfigError(format!(
            "start point must have {n} coordinates and {n} momentum components"
        ))));
    }
    let start_pt = PhasePoint::new(start.x.clone(), start.p.clone());
    let cfg = IntegratorConfig::default().with_step(step.unwrap_or(1e-3));

    let (traj, lift) = if lift_decl.kind == "geodesic" {
        (integrate_geodesic(&rc.metric, &start_pt, span, &cfg)?, None)
    } else {
        let base = sample_base_points(&rc.metric, &spec_for(rc, 32))?;
        let lift = rc.build_lift(lift_decl, &base)?;
        (
            integrate_atl(&rc.metric, &lift, &start_pt, span, &cfg)?,
            Some(lift),
        )
    };

    let drift = norm_drift(&rc.metric, &traj)?;
    let mut worst_rate: f64 = 0.0;
    if let Some(lift) = &lift {
        for (i, s) in traj.samples.iter().enumerate() {
            if i % cfg.check_every == 0 {
                worst_rate = worst_rate.max(covariant_rate_residual(&rc.metric, lift, s)?);
            }
        }
    }

    // rotation of p relative to the start, measured with the endpoint metric
    let end = traj.end();
    let rotation_angle = {
        let g_end = rc.metric.inner(&end.x, &end.p, &end.p)?;
        let g_start = rc.metric.inner(&end.x, &start_pt.p, &start_pt.p)?;
        let cross = rc.metric.inner(&end.x, &end.p, &start_pt.p)?;
        let denom = (g_end.abs() * g_start.abs()).sqrt();
        if denom > 0.0 {
            Some((cross / denom).clamp(-1.0, 1.0).acos())
        } else {
            None
        }
    };

    let csv_name = output
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("trajectory-{index:02}.csv"));
    let csv = traj.to_csv();

    let details = json!({
        "lift": lift_decl.kind,
        "span": span,
        "step": cfg.step,
        "samples": traj.samples.len(),
        "completed": traj.completed,
        "exit_reason": traj.exit_reason,
        "endpoint": {"sigma": end.sigma, "x": end.x, "p": end.p, "gpp": end.gpp},
        "norm_drift_max": drift.max_drift,
        "covariant_rate_residual_max": worst_rate,
        "rotation_angle": rotation_angle,
        "csv": csv_name,
    });

    let mut result = if traj.completed {
        TaskResult::new(TaskStatus::Pass, details)
    } else {
        let mut r = TaskResult::new(TaskStatus::Error, details);
        r.error = Some(format!(
            "trajectory left the admitted region before the span end: {}",
            traj.exit_reason.clone().unwrap_or_default()
        ));
        r
    };
    result.artifacts.push((csv_name, csv));
    Ok(result)
}
