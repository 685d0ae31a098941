//! JSON run-configuration schema and resolution into engine objects.
//!
//! Expressions inside the config use the engine grammar; manifold
//! parameters (e.g. `M`) are substituted into both metric and field
//! expressions at parse time.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use atlift::catalog;
use atlift::expr::Params;
use atlift::geometry::{
    DomainConstraint, MetricSpec, ScalarFieldSpec, Tensor2Field, Tensor2FieldSpec,
    VectorFieldSpec,
};
use atlift::lifts::{
    complete_lift, dynamical_atl, euler_field, horizontal_lift, iwai_lift, matter_lift,
    vertical_lift_tensor, vertical_lift_vector, AtlSpec,
};

/// Error in the configuration itself (exit code 2 territory).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldRef,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldDecl>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ManifoldRef {
    Catalog(String),
    Inline(InlineManifold),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineManifold {
    pub dimension: usize,
    pub coordinates: Vec<String>,
    /// Upper triangle of g_ab, row-major: (0,0), (0,1), .., (1,1), ..
    pub metric: Vec<String>,
    #[serde(default)]
    pub domain: Vec<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub sample_box: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldDecl {
    Vector { components: Vec<String> },
    Tensor2 { components: Vec<Vec<String>> },
    Scalar { expression: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    VerifyBrackets {},
    VerifyAtlAlgebra {
        #[serde(default)]
        pairs: Option<usize>,
        /// Optional named vector pair for the classical bracket table.
        #[serde(default)]
        vectors: Option<(String, String)>,
    },
    Classify {
        field: String,
    },
    CheckDynamical {
        lift: LiftDecl,
        /// Name of a declared scalar field; defaults to zero rescaling.
        #[serde(default)]
        psi: Option<String>,
    },
    CheckMatter {
        vector: String,
        /// Transport generator; omitted means the bivector part of ∇Y.
        #[serde(default)]
        tensor: Option<String>,
    },
    Integrate {
        lift: LiftDecl,
        start: StartPoint,
        span: (f64, f64),
        #[serde(default)]
        step: Option<f64>,
        /// CSV file name inside the output directory.
        #[serde(default)]
        output: Option<String>,
    },
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::VerifyBrackets {} => "verify-brackets",
            TaskSpec::VerifyAtlAlgebra { .. } => "verify-atl-algebra",
            TaskSpec::Classify { .. } => "classify",
            TaskSpec::CheckDynamical { .. } => "check-dynamical",
            TaskSpec::CheckMatter { .. } => "check-matter",
            TaskSpec::Integrate { .. } => "integrate",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftDecl {
    pub kind: String,
    #[serde(default)]
    pub vector: Option<String>,
    #[serde(default)]
    pub tensor: Option<String>,
    #[serde(default)]
    pub scalar: Option<String>,
    #[serde(default)]
    pub k: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartPoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub x_box: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub p_box: Option<Vec<(f64, f64)>>,
    #[serde(default = "default_min_p_norm")]
    pub min_p_norm: f64,
}

fn default_seed() -> u64 {
    42
}

fn default_min_p_norm() -> f64 {
    0.1
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            seed: default_seed(),
            count: None,
            x_box: None,
            p_box: None,
            min_p_norm: default_min_p_norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Basis-bracket and exact geometric identities.
    #[serde(default = "default_identity_tol")]
    pub identity: f64,
    /// Algebraic residuals (closed form vs numeric oracle).
    #[serde(default = "default_algebra_tol")]
    pub algebra: f64,
    /// Classification flags.
    #[serde(default = "default_classify_tol")]
    pub classify: f64,
}

fn default_identity_tol() -> f64 {
    1e-10
}

fn default_algebra_tol() -> f64 {
    1e-9
}

fn default_classify_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: default_identity_tol(),
            algebra: default_algebra_tol(),
            classify: default_classify_tol(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_out_dir() -> String {
    "atlift-out".to_string()
}

fn default_format() -> String {
    "text".to_string()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            format: default_format(),
        }
    }
}

/// A declared field resolved against the manifold.
#[derive(Debug, Clone)]
pub enum ResolvedField {
    Vector(VectorFieldSpec),
    Tensor2(Tensor2FieldSpec),
    Scalar(ScalarFieldSpec),
}

/// Everything a task needs, built once from the configuration.
pub struct ResolvedConfig {
    pub metric: Arc<MetricSpec>,
    pub fields: BTreeMap<String, ResolvedField>,
    pub seed: u64,
    pub count: Option<usize>,
    pub x_box: Option<Vec<(f64, f64)>>,
    pub p_box: Option<Vec<(f64, f64)>>,
    pub min_p_norm: f64,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<ResolvedConfig, ConfigError> {
        let metric = match &self.manifold {
            ManifoldRef::Catalog(name) => {
                let mut overrides = Params::new();
                for (k, v) in &self.parameters {
                    overrides.insert(k.clone(), *v);
                }
                catalog::build(name, &overrides).map_err(|e| ConfigError(e.to_string()))?
            }
            ManifoldRef::Inline(inline) => build_inline(inline)?,
        };
        let metric = Arc::new(metric);
        let params = metric.params().clone();
        let dim = metric.dim();

        let mut fields = BTreeMap::new();
        for (name, decl) in &self.fields {
            let resolved = match decl {
                FieldDecl::Vector { components } => {
                    if components.len() != dim {
                        return cfg_err(format!(
                            "field `{name}`: expected {dim} components, got {}",
                            components.len()
                        ));
                    }
                    let texts: Vec<&str> = components.iter().map(|s| s.as_str()).collect();
                    ResolvedField::Vector(
                        VectorFieldSpec::parse(&texts, &params)
                            .map_err(|e| ConfigError(format!("field `{name}`: {e}")))?,
                    )
                }
                FieldDecl::Tensor2 { components } => {
                    if components.len() != dim || components.iter().any(|row| row.len() != dim) {
                        return cfg_err(format!("field `{name}`: expected {dim}x{dim} components"));
                    }
                    let flat: Vec<&str> = components
                        .iter()
                        .flat_map(|row| row.iter().map(|s| s.as_str()))
                        .collect();
                    ResolvedField::Tensor2(
                        Tensor2FieldSpec::parse(dim, &flat, &params)
                            .map_err(|e| ConfigError(format!("field `{name}`: {e}")))?,
                    )
                }
                FieldDecl::Scalar { expression } => ResolvedField::Scalar(
                    ScalarFieldSpec::parse(expression, dim, &params)
                        .map_err(|e| ConfigError(format!("field `{name}`: {e}")))?,
                ),
            };
            fields.insert(name.clone(), resolved);
        }

        if self.tasks.is_empty() {
            return cfg_err("no tasks declared");
        }

        Ok(ResolvedConfig {
            metric,
            fields,
            seed: self.sampling.seed,
            count: self.sampling.count,
            x_box: self.sampling.x_box.clone(),
            p_box: self.sampling.p_box.clone(),
            min_p_norm: self.sampling.min_p_norm,
            tolerances: self.tolerances,
        })
    }
}

fn build_inline(inline: &InlineManifold) -> Result<MetricSpec, ConfigError> {
    let dim = inline.dimension;
    let expected = dim * (dim + 1) / 2;
    if inline.metric.len() != expected {
        return cfg_err(format!(
            "inline manifold: expected {expected} upper-triangle metric entries for dimension {dim}, got {}",
            inline.metric.len()
        ));
    }
    let mut params = Params::new();
    for (k, v) in &inline.parameters {
        params.insert(k.clone(), *v);
    }
    let g_upper = inline
        .metric
        .iter()
        .map(|t| atlift::expr::parse_with_params(t, dim, &params))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ConfigError(format!("inline metric: {e}")))?;
    let domain = inline
        .domain
        .iter()
        .map(|t| DomainConstraint::parse(t, dim, &params))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ConfigError(format!("inline domain: {e}")))?;
    let mut m = MetricSpec::new(dim, inline.coordinates.clone(), g_upper, domain)
        .map_err(|e| ConfigError(format!("inline manifold: {e}")))?
        .with_name("inline")
        .with_params(params);
    if let Some(sample_box) = &inline.sample_box {
        if sample_box.len() != dim {
            return cfg_err("inline manifold: sample_box length must equal dimension");
        }
        m = m.with_sample_box(sample_box.clone());
    }
    Ok(m)
}

impl ResolvedConfig {
    pub fn vector(&self, name: &str) -> Result<VectorFieldSpec, ConfigError> {
        match self.fields.get(name) {
            Some(ResolvedField::Vector(v)) => Ok(v.clone()),
            Some(_) => cfg_err(format!("field `{name}` is not a vector field")),
            None => cfg_err(format!("vector field `{name}` not declared")),
        }
    }

    pub fn tensor2(&self, name: &str) -> Result<Tensor2FieldSpec, ConfigError> {
        match self.fields.get(name) {
            Some(ResolvedField::Tensor2(t)) => Ok(t.clone()),
            Some(_) => cfg_err(format!("field `{name}` is not a rank-2 tensor field")),
            None => cfg_err(format!("tensor field `{name}` not declared")),
        }
    }

    pub fn scalar(&self, name: &str) -> Result<ScalarFieldSpec, ConfigError> {
        match self.fields.get(name) {
            Some(ResolvedField::Scalar(s)) => Ok(s.clone()),
            Some(_) => cfg_err(format!("field `{name}` is not a scalar field")),
            None => cfg_err(format!("scalar field `{name}` not declared")),
        }
    }

    /// Build the lift described by a declaration. `geodesic` is handled by
    /// the integrate task directly and rejected here.
    pub fn build_lift(
        &self,
        decl: &LiftDecl,
        validation_samples: &[Vec<f64>],
    ) -> Result<AtlSpec, ConfigError> {
        let dim = self.metric.dim();
        let need_vector = |opt: &Option<String>| -> Result<VectorFieldSpec, ConfigError> {
            match opt {
                Some(name) => self.vector(name),
                None => cfg_err(format!("lift kind `{}` requires `vector`", decl.kind)),
            }
        };
        match decl.kind.as_str() {
            "horizontal" => Ok(horizontal_lift(need_vector(&decl.vector)?)),
            "vertical" => Ok(vertical_lift_vector(need_vector(&decl.vector)?)),
            "vertical-tensor" => {
                let name = decl.tensor.as_ref().ok_or_else(|| {
                    ConfigError("lift kind `vertical-tensor` requires `tensor`".into())
                })?;
                Ok(vertical_lift_tensor(Tensor2Field::expressions(
                    self.tensor2(name)?,
                )))
            }
            "euler" => Ok(euler_field(dim)),
            "complete" => complete_lift(&self.metric, need_vector(&decl.vector)?)
                .map_err(|e| ConfigError(e.to_string())),
            "iwai" | "dynamical" => {
                let y = need_vector(&decl.vector)?;
                let psi = match &decl.scalar {
                    Some(name) => self.scalar(name)?,
                    None => ScalarFieldSpec::zero(dim),
                };
                let built = if decl.kind == "iwai" {
                    iwai_lift(&self.metric, y, psi)
                } else {
                    dynamical_atl(&self.metric, y, psi)
                };
                built.map_err(|e| ConfigError(e.to_string()))
            }
            "matter" => {
                let y = need_vector(&decl.vector)?;
                let a = match &decl.tensor {
                    Some(name) => Tensor2Field::expressions(self.tensor2(name)?),
                    None => Tensor2Field::SkewGradOf(y.clone()),
                };
                matter_lift(&self.metric, y, a, validation_samples)
                    .map_err(|e| ConfigError(format!("matter lift rejected: {e}")))
            }
            "general" => {
                let y = need_vector(&decl.vector)?;
                let a = match &decl.tensor {
                    Some(name) => Tensor2Field::expressions(self.tensor2(name)?),
                    None => Tensor2Field::zero(dim),
                };
                let k = match &decl.k {
                    Some(name) => self.vector(name)?,
                    None => VectorFieldSpec::zero(dim),
                };
                AtlSpec::general(y, a, k).map_err(|e| ConfigError(e.to_string()))
            }
            other => cfg_err(format!(
                "unknown lift kind `{other}` (expected horizontal, vertical, vertical-tensor, \
                 euler, complete, iwai, dynamical, matter, general)"
            )),
        }
    }
}
