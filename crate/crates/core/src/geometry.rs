//! Metric geometry at a point: g, its inverse, Christoffel symbols, the
//! Riemann tensor and covariant derivatives of declared fields.
//!
//! Index conventions for stored tensors:
//! * `dg[(a,b,c)]      = ∂_c g_ab`
//! * `d2g[(a,b,c,d)]   = ∂_d ∂_c g_ab`
//! * `gamma[(a,b,c)]   = Γ^a_bc`
//! * `dgamma[(a,b,c,d)] = ∂_d Γ^a_bc`
//! * `riemann[(a,b,c,d)] = R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`
//!
//! The Riemann sign convention is the one that makes the horizontal basis
//! bracket identity `[H_a,H_b] = −R^d_cab p^c V_d` hold; this is asserted
//! numerically in the bundle tests rather than trusted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse_with_params, Expression, Jet2, Params};
use crate::tensor::{Mat, Ten3, Ten4};

pub const DEFAULT_SINGULAR_TOL: f64 = 1e-12;

/// Supported comparison operators in domain constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

/// One inequality between two coordinate expressions; a point is admitted
/// when every constraint of the metric holds.
#[derive(Debug, Clone)]
pub struct DomainConstraint {
    lhs: Expression,
    op: CmpOp,
    rhs: Expression,
    source: String,
}

impl DomainConstraint {
    pub fn parse(text: &str, dim: usize, params: &Params) -> Result<Self> {
        let ops = [(">=", CmpOp::Ge), ("<=", CmpOp::Le), (">", CmpOp::Gt), ("<", CmpOp::Lt)];
        for (pat, op) in ops {
            if let Some(pos) = text.find(pat) {
                let lhs = parse_with_params(&text[..pos], dim, params)?;
                let rhs = parse_with_params(&text[pos + pat.len()..], dim, params)?;
                return Ok(DomainConstraint {
                    lhs,
                    op,
                    rhs,
                    source: text.to_string(),
                });
            }
        }
        Err(Error::Syntax {
            offset: 0,
            message: format!("no comparison operator in constraint `{text}`"),
        })
    }

    /// Evaluation failures (e.g. log outside its domain) count as violations.
    pub fn holds(&self, x: &[f64]) -> bool {
        let (Ok(l), Ok(r)) = (self.lhs.eval(x), self.rhs.eval(x)) else {
            return false;
        };
        match self.op {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// A vector field Y^a(x) given by one expression per component.
#[derive(Debug, Clone)]
pub struct VectorFieldSpec {
    comps: Vec<Expression>,
}

impl VectorFieldSpec {
    pub fn new(comps: Vec<Expression>) -> Result<Self> {
        let dim = comps.len();
        for c in &comps {
            c.check_dimension(dim)?;
        }
        Ok(VectorFieldSpec { comps })
    }

    pub fn zero(dim: usize) -> Self {
        VectorFieldSpec {
            comps: vec![Expression::constant(0.0); dim],
        }
    }

    /// Parse component expression strings.
    pub fn parse(texts: &[&str], params: &Params) -> Result<Self> {
        let dim = texts.len();
        let comps = texts
            .iter()
            .map(|t| parse_with_params(t, dim, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorFieldSpec { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, a: usize) -> &Expression {
        &self.comps[a]
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_jets(&self, x: &[f64]) -> Result<Vec<Jet2>> {
        self.comps.iter().map(|c| c.eval_jet2(x)).collect()
    }

    /// αY + βZ, built structurally so the result is again expression-backed.
    pub fn combine(alpha: f64, y: &VectorFieldSpec, beta: f64, z: &VectorFieldSpec) -> Result<Self> {
        if y.dim() != z.dim() {
            return Err(Error::DimensionMismatch {
                expected: y.dim(),
                got: z.dim(),
            });
        }
        let comps = y
            .comps
            .iter()
            .zip(&z.comps)
            .map(|(a, b)| a.clone().scaled(alpha) + b.clone().scaled(beta))
            .collect();
        Ok(VectorFieldSpec { comps })
    }
}

/// A rank-(1,1) tensor field A^a_b(x) with one expression per component,
/// row-major in (a, b).
#[derive(Debug, Clone)]
pub struct Tensor2FieldSpec {
    dim: usize,
    comps: Vec<Expression>,
}

impl Tensor2FieldSpec {
    pub fn new(dim: usize, comps: Vec<Expression>) -> Result<Self> {
        if comps.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: comps.len(),
            });
        }
        for c in &comps {
            c.check_dimension(dim)?;
        }
        Ok(Tensor2FieldSpec { dim, comps })
    }

    pub fn zero(dim: usize) -> Self {
        Tensor2FieldSpec {
            dim,
            comps: vec![Expression::constant(0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut comps = vec![Expression::constant(0.0); dim * dim];
        for a in 0..dim {
            comps[a * dim + a] = Expression::constant(1.0);
        }
        Tensor2FieldSpec { dim, comps }
    }

    pub fn parse(dim: usize, texts: &[&str], params: &Params) -> Result<Self> {
        if texts.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: texts.len(),
            });
        }
        let comps = texts
            .iter()
            .map(|t| parse_with_params(t, dim, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tensor2FieldSpec { dim, comps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, a: usize, b: usize) -> &Expression {
        &self.comps[a * self.dim + b]
    }

    pub fn eval(&self, x: &[f64]) -> Result<Mat> {
        let mut m = Mat::zeros(self.dim);
        for a in 0..self.dim {
            for b in 0..self.dim {
                m[(a, b)] = self.component(a, b).eval(x)?;
            }
        }
        Ok(m)
    }
}

/// A scalar field ψ(x).
#[derive(Debug, Clone)]
pub struct ScalarFieldSpec {
    dim: usize,
    expr: Expression,
}

impl ScalarFieldSpec {
    pub fn new(dim: usize, expr: Expression) -> Result<Self> {
        expr.check_dimension(dim)?;
        Ok(ScalarFieldSpec { dim, expr })
    }

    pub fn zero(dim: usize) -> Self {
        ScalarFieldSpec {
            dim,
            expr: Expression::constant(0.0),
        }
    }

    pub fn parse(text: &str, dim: usize, params: &Params) -> Result<Self> {
        Ok(ScalarFieldSpec {
            dim,
            expr: parse_with_params(text, dim, params)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expression {
        &self.expr
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.expr.eval(x)
    }

    pub fn eval_jet(&self, x: &[f64]) -> Result<Jet2> {
        self.expr.eval_jet2(x)
    }
}

fn sym_index(a: usize, b: usize, n: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo * n - lo * (lo + 1) / 2 + hi
}

/// Metric declaration: dimension, coordinate names, symmetric expression
/// array for g_ab (only a <= b stored), admitted-region constraints and
/// resolved parameter values.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    name: Option<String>,
    dim: usize,
    coords: Vec<String>,
    g_upper: Vec<Expression>,
    domain: Vec<DomainConstraint>,
    params: Params,
    singular_tol: f64,
    sample_box: Vec<(f64, f64)>,
}

impl MetricSpec {
    pub fn new(
        dim: usize,
        coords: Vec<String>,
        g_upper: Vec<Expression>,
        domain: Vec<DomainConstraint>,
    ) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} unsupported (2 to 4)"
            )));
        }
        if coords.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        let expected = dim * (dim + 1) / 2;
        if g_upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: g_upper.len(),
            });
        }
        for e in &g_upper {
            e.check_dimension(dim)?;
        }
        Ok(MetricSpec {
            name: None,
            dim,
            coords,
            g_upper,
            domain,
            params: Params::new(),
            singular_tol: DEFAULT_SINGULAR_TOL,
            sample_box: vec![(-1.0, 1.0); dim],
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_sample_box(mut self, sample_box: Vec<(f64, f64)>) -> Self {
        self.sample_box = sample_box;
        self
    }

    pub fn with_singular_tol(mut self, tol: f64) -> Self {
        self.singular_tol = tol;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn domain(&self) -> &[DomainConstraint] {
        &self.domain
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn g_expr(&self, a: usize, b: usize) -> &Expression {
        &self.g_upper[sym_index(a, b, self.dim)]
    }

    pub fn is_admitted(&self, x: &[f64]) -> bool {
        x.len() == self.dim && self.domain.iter().all(|c| c.holds(x))
    }

    pub fn check_admitted(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !self.is_admitted(x) {
            return Err(Error::ExcludedRegion { point: x.to_vec() });
        }
        Ok(())
    }

    /// Metric components only (with the singularity check).
    pub fn metric_at(&self, x: &[f64]) -> Result<Mat> {
        self.check_admitted(x)?;
        let n = self.dim;
        let mut g = Mat::zeros(n);
        for a in 0..n {
            for b in a..n {
                let v = self.g_expr(a, b).eval(x)?;
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        let det = g.det();
        if det.abs() <= self.singular_tol {
            return Err(Error::SingularMetric {
                det,
                point: x.to_vec(),
            });
        }
        Ok(g)
    }

    /// g_ab u^a v^b at x.
    pub fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let g = self.metric_at(x)?;
        let mut s = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                s += g[(a, b)] * u[a] * v[b];
            }
        }
        Ok(s)
    }

    /// Full geometric data at an admitted point.
    pub fn geometry_at(&self, x: &[f64]) -> Result<GeometryPoint> {
        self.check_admitted(x)?;
        let n = self.dim;

        let mut g = Mat::zeros(n);
        let mut dg = Ten3::zeros(n);
        let mut d2g = Ten4::zeros(n);
        for a in 0..n {
            for b in a..n {
                let jet = self.g_expr(a, b).eval_jet2(x)?;
                g[(a, b)] = jet.value;
                g[(b, a)] = jet.value;
                for c in 0..n {
                    dg[(a, b, c)] = jet.grad(c);
                    dg[(b, a, c)] = jet.grad(c);
                    for d in 0..n {
                        d2g[(a, b, c, d)] = jet.hess(c, d);
                        d2g[(b, a, c, d)] = jet.hess(c, d);
                    }
                }
            }
        }

        let det = g.det();
        if det.abs() <= self.singular_tol {
            return Err(Error::SingularMetric {
                det,
                point: x.to_vec(),
            });
        }
        let g_inv = g.inverse()?;

        // ∂_c g^{ab} = −g^{am} (∂_c g_mn) g^{nb}
        let dg_inv = Ten3::from_fn(n, |a, b, c| {
            let mut s = 0.0;
            for m in 0..n {
                for nn in 0..n {
                    s -= g_inv[(a, m)] * dg[(m, nn, c)] * g_inv[(nn, b)];
                }
            }
            s
        });

        let gamma = Ten3::from_fn(n, |a, b, c| {
            let mut s = 0.0;
            for d in 0..n {
                s += 0.5 * g_inv[(a, d)] * (dg[(d, c, b)] + dg[(d, b, c)] - dg[(b, c, d)]);
            }
            s
        });

        let dgamma = Ten4::from_fn(n, |a, b, c, e| {
            let mut s = 0.0;
            for d in 0..n {
                s += 0.5 * dg_inv[(a, d, e)] * (dg[(d, c, b)] + dg[(d, b, c)] - dg[(b, c, d)]);
                s += 0.5
                    * g_inv[(a, d)]
                    * (d2g[(d, c, b, e)] + d2g[(d, b, c, e)] - d2g[(b, c, d, e)]);
            }
            s
        });

        let riemann = Ten4::from_fn(n, |a, b, c, d| {
            let mut s = dgamma[(a, d, b, c)] - dgamma[(a, c, b, d)];
            for e in 0..n {
                s += gamma[(a, c, e)] * gamma[(e, d, b)] - gamma[(a, d, e)] * gamma[(e, c, b)];
            }
            s
        });

        Ok(GeometryPoint {
            x: x.to_vec(),
            g,
            g_inv,
            det,
            dg,
            d2g,
            gamma,
            dgamma,
            riemann,
        })
    }
}

/// Evaluated geometry at one admitted point. Immutable.
#[derive(Debug, Clone)]
pub struct GeometryPoint {
    pub x: Vec<f64>,
    pub g: Mat,
    pub g_inv: Mat,
    pub det: f64,
    pub dg: Ten3,
    pub d2g: Ten4,
    pub gamma: Ten3,
    pub dgamma: Ten4,
    pub riemann: Ten4,
}

impl GeometryPoint {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += self.g[(a, b)] * u[a] * v[b];
            }
        }
        s
    }

    /// Lower the index of a vector: u_a = g_ab u^b.
    pub fn lower_vec(&self, u: &[f64]) -> Vec<f64> {
        self.g.apply(u)
    }

    /// Lower the first index of a rank-(1,1) tensor: A_ab = g_ac A^c_b.
    pub fn lower_first(&self, a: &Mat) -> Mat {
        self.g.matmul(a)
    }

    /// Raise the first index: A^a_b = g^{ac} W_cb.
    pub fn raise_first(&self, w: &Mat) -> Mat {
        self.g_inv.matmul(w)
    }

    /// R(Y,Z)^a_b = R^a_bcd Y^c Z^d.
    pub fn riemann_yz(&self, y: &[f64], z: &[f64]) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, |a, b| {
            let mut s = 0.0;
            for c in 0..n {
                for d in 0..n {
                    s += self.riemann[(a, b, c, d)] * y[c] * z[d];
                }
            }
            s
        })
    }
}

/// ∇_b Y^a = ∂_b Y^a + Γ^a_bc Y^c, indexed `(a, b)`.
pub fn cov_deriv_vector_at(geo: &GeometryPoint, y_jets: &[Jet2]) -> Mat {
    let n = geo.dim();
    Mat::from_fn(n, |a, b| {
        let mut s = y_jets[a].grad(b);
        for c in 0..n {
            s += geo.gamma[(a, b, c)] * y_jets[c].value;
        }
        s
    })
}

pub fn cov_deriv_vector(m: &MetricSpec, y: &VectorFieldSpec, x: &[f64]) -> Result<Mat> {
    let geo = m.geometry_at(x)?;
    Ok(cov_deriv_vector_at(&geo, &y.eval_jets(x)?))
}

/// ∂_c (∇_b Y^a), assembled from second derivatives of Y and ∂Γ; `(a, b, c)`.
fn partials_of_cov_deriv(geo: &GeometryPoint, y_jets: &[Jet2]) -> Ten3 {
    let n = geo.dim();
    Ten3::from_fn(n, |a, b, c| {
        let mut s = y_jets[a].hess(b, c);
        for d in 0..n {
            s += geo.dgamma[(a, b, d, c)] * y_jets[d].value + geo.gamma[(a, b, d)] * y_jets[d].grad(c);
        }
        s
    })
}

/// ∇_c A^a_b for a tensor given by value and partials at a point; `(a, b, c)`.
pub fn cov_deriv_tensor2_at(geo: &GeometryPoint, value: &Mat, partials: &Ten3) -> Ten3 {
    let n = geo.dim();
    Ten3::from_fn(n, |a, b, c| {
        let mut s = partials[(a, b, c)];
        for d in 0..n {
            s += geo.gamma[(a, c, d)] * value[(d, b)] - geo.gamma[(d, c, b)] * value[(a, d)];
        }
        s
    })
}

pub fn cov_deriv_tensor2(m: &MetricSpec, a: &Tensor2FieldSpec, x: &[f64]) -> Result<Ten3> {
    let geo = m.geometry_at(x)?;
    let field = Tensor2Field::expressions(a.clone());
    let (value, partials) = field.value_and_partials(&geo)?;
    Ok(cov_deriv_tensor2_at(&geo, &value, &partials))
}

/// ∇_c ∇_b Y^a, indexed `(a, b, c)` with c the outer derivative.
pub fn second_cov_deriv_vector_at(geo: &GeometryPoint, y_jets: &[Jet2]) -> Ten3 {
    let w = cov_deriv_vector_at(geo, y_jets);
    let dw = partials_of_cov_deriv(geo, y_jets);
    cov_deriv_tensor2_at(geo, &w, &dw)
}

pub fn second_cov_deriv_vector(m: &MetricSpec, y: &VectorFieldSpec, x: &[f64]) -> Result<Ten3> {
    let geo = m.geometry_at(x)?;
    Ok(second_cov_deriv_vector_at(&geo, &y.eval_jets(x)?))
}

/// L_Y Γ^a_bc = ∇_c ∇_b Y^a − R^a_bcd Y^d, indexed `(a, b, c)`.
///
/// The result must already be symmetric in (b, c); this is asserted and the
/// symmetrized tensor is returned.
pub fn lie_deriv_connection_at(geo: &GeometryPoint, y_jets: &[Jet2]) -> Ten3 {
    let n = geo.dim();
    let ddy = second_cov_deriv_vector_at(geo, y_jets);
    let raw = Ten3::from_fn(n, |a, b, c| {
        let mut s = ddy[(a, b, c)];
        for d in 0..n {
            s -= geo.riemann[(a, b, c, d)] * y_jets[d].value;
        }
        s
    });
    let mut asym: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                asym = asym.max((raw[(a, b, c)] - raw[(a, c, b)]).abs());
                scale = scale.max(raw[(a, b, c)].abs());
            }
        }
    }
    assert!(
        asym <= 1e-10 * scale,
        "Lie derivative of the connection not symmetric: asymmetry {asym:.3e} (scale {scale:.3e})"
    );
    Ten3::from_fn(n, |a, b, c| 0.5 * (raw[(a, b, c)] + raw[(a, c, b)]))
}

pub fn lie_deriv_connection(m: &MetricSpec, y: &VectorFieldSpec, x: &[f64]) -> Result<Ten3> {
    let geo = m.geometry_at(x)?;
    Ok(lie_deriv_connection_at(&geo, &y.eval_jets(x)?))
}

/// S(Y,Z)^a_b = (L_Z Γ^a_cb) Y^c.
pub fn s_tensor(m: &MetricSpec, y: &VectorFieldSpec, z: &VectorFieldSpec, x: &[f64]) -> Result<Mat> {
    let geo = m.geometry_at(x)?;
    let lz = lie_deriv_connection_at(&geo, &z.eval_jets(x)?);
    let yv = y.eval(x)?;
    let n = geo.dim();
    Ok(Mat::from_fn(n, |a, b| {
        let mut s = 0.0;
        for c in 0..n {
            s += lz[(a, c, b)] * yv[c];
        }
        s
    }))
}

/// A rank-(1,1) tensor field in one of several representations, each of
/// which can produce its value and exact partial derivatives at a point.
///
/// Derived representations (covariant derivatives of a base field, index
/// raising against the metric) exist because those fields are not
/// expressible as closed-form component expressions without symbolic
/// differentiation, which this crate does not do.
#[derive(Debug, Clone)]
pub enum Tensor2Field {
    /// A^a_b given directly by expressions.
    Expressions(Tensor2FieldSpec),
    /// A^a_b = g^{ac} W_cb for expression-backed W with both indices down.
    RaisedLower(Tensor2FieldSpec),
    /// A^a_b = ∇_b Y^a.
    GradOf(VectorFieldSpec),
    /// A^a_b = g^{ac} ∇_[b Y_c].
    SkewGradOf(VectorFieldSpec),
    /// A^a_b = factor · ψ(x) · δ^a_b.
    ScaledIdentity(f64, ScalarFieldSpec),
    Scale(f64, Box<Tensor2Field>),
    Sum(Box<Tensor2Field>, Box<Tensor2Field>),
}

impl Tensor2Field {
    pub fn expressions(spec: Tensor2FieldSpec) -> Self {
        Tensor2Field::Expressions(spec)
    }

    pub fn zero(dim: usize) -> Self {
        Tensor2Field::Expressions(Tensor2FieldSpec::zero(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Tensor2Field::Expressions(Tensor2FieldSpec::identity(dim))
    }

    pub fn grad_of(y: VectorFieldSpec) -> Self {
        Tensor2Field::GradOf(y)
    }

    pub fn dim(&self) -> usize {
        match self {
            Tensor2Field::Expressions(s) | Tensor2Field::RaisedLower(s) => s.dim(),
            Tensor2Field::GradOf(y) | Tensor2Field::SkewGradOf(y) => y.dim(),
            Tensor2Field::ScaledIdentity(_, psi) => psi.dim(),
            Tensor2Field::Scale(_, inner) => inner.dim(),
            Tensor2Field::Sum(a, _) => a.dim(),
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Tensor2Field::Scale(factor, Box::new(self))
    }

    pub fn sum(self, other: Tensor2Field) -> Self {
        Tensor2Field::Sum(Box::new(self), Box::new(other))
    }

    /// Is this structurally the zero field (all components literal zero)?
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            Tensor2Field::Expressions(s) | Tensor2Field::RaisedLower(s) => (0..s.dim())
                .all(|a| (0..s.dim()).all(|b| *s.component(a, b) == Expression::Const(0.0))),
            _ => false,
        }
    }

    pub fn value(&self, geo: &GeometryPoint) -> Result<Mat> {
        Ok(self.value_and_partials(geo)?.0)
    }

    /// Value and plain partial derivatives; partials indexed `(a, b, c)` for
    /// `∂_c A^a_b`.
    pub fn value_and_partials(&self, geo: &GeometryPoint) -> Result<(Mat, Ten3)> {
        let n = geo.dim();
        match self {
            Tensor2Field::Expressions(spec) => {
                let mut value = Mat::zeros(n);
                let mut partials = Ten3::zeros(n);
                for a in 0..n {
                    for b in 0..n {
                        let jet = spec.component(a, b).eval_jet2(&geo.x)?;
                        value[(a, b)] = jet.value;
                        for c in 0..n {
                            partials[(a, b, c)] = jet.grad(c);
                        }
                    }
                }
                Ok((value, partials))
            }
            Tensor2Field::RaisedLower(spec) => {
                let mut w = Mat::zeros(n);
                let mut dw = Ten3::zeros(n);
                for a in 0..n {
                    for b in 0..n {
                        let jet = spec.component(a, b).eval_jet2(&geo.x)?;
                        w[(a, b)] = jet.value;
                        for c in 0..n {
                            dw[(a, b, c)] = jet.grad(c);
                        }
                    }
                }
                Ok(raise_first_with_partials(geo, &w, &dw))
            }
            Tensor2Field::GradOf(y) => {
                let jets = y.eval_jets(&geo.x)?;
                Ok((
                    cov_deriv_vector_at(geo, &jets),
                    partials_of_cov_deriv(geo, &jets),
                ))
            }
            Tensor2Field::SkewGradOf(y) => {
                let jets = y.eval_jets(&geo.x)?;
                let nabla = cov_deriv_vector_at(geo, &jets);
                let dnabla = partials_of_cov_deriv(geo, &jets);
                // W_cb = ∇_[b Y_c] = ½ (g_cd ∇_b Y^d − g_bd ∇_c Y^d)
                let w = Mat::from_fn(n, |c, b| {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += 0.5 * (geo.g[(c, d)] * nabla[(d, b)] - geo.g[(b, d)] * nabla[(d, c)]);
                    }
                    s
                });
                let dw = Ten3::from_fn(n, |c, b, e| {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += 0.5
                            * (geo.dg[(c, d, e)] * nabla[(d, b)] + geo.g[(c, d)] * dnabla[(d, b, e)]
                                - geo.dg[(b, d, e)] * nabla[(d, c)]
                                - geo.g[(b, d)] * dnabla[(d, c, e)]);
                    }
                    s
                });
                Ok(raise_first_with_partials(geo, &w, &dw))
            }
            Tensor2Field::ScaledIdentity(factor, psi) => {
                let jet = psi.eval_jet(&geo.x)?;
                let value = Mat::from_fn(n, |a, b| if a == b { factor * jet.value } else { 0.0 });
                let partials = Ten3::from_fn(n, |a, b, c| {
                    if a == b {
                        factor * jet.grad(c)
                    } else {
                        0.0
                    }
                });
                Ok((value, partials))
            }
            Tensor2Field::Scale(factor, inner) => {
                let (v, d) = inner.value_and_partials(geo)?;
                let value = v.scale(*factor);
                let partials = Ten3::from_fn(n, |a, b, c| factor * d[(a, b, c)]);
                Ok((value, partials))
            }
            Tensor2Field::Sum(lhs, rhs) => {
                let (va, da) = lhs.value_and_partials(geo)?;
                let (vb, db) = rhs.value_and_partials(geo)?;
                let value = va.add(&vb);
                let partials = Ten3::from_fn(n, |a, b, c| da[(a, b, c)] + db[(a, b, c)]);
                Ok((value, partials))
            }
        }
    }

    /// ∇_c A^a_b with exact partials.
    pub fn cov_deriv(&self, geo: &GeometryPoint) -> Result<Ten3> {
        let (value, partials) = self.value_and_partials(geo)?;
        Ok(cov_deriv_tensor2_at(geo, &value, &partials))
    }
}

/// Given W_cb and ∂W, produce A^a_b = g^{ac} W_cb and its partials.
fn raise_first_with_partials(geo: &GeometryPoint, w: &Mat, dw: &Ten3) -> (Mat, Ten3) {
    let n = geo.dim();
    // ∂_e g^{ac} = −g^{am} ∂_e g_mn g^{nc}
    let dg_inv = Ten3::from_fn(n, |a, b, e| {
        let mut s = 0.0;
        for m in 0..n {
            for nn in 0..n {
                s -= geo.g_inv[(a, m)] * geo.dg[(m, nn, e)] * geo.g_inv[(nn, b)];
            }
        }
        s
    });
    let value = Mat::from_fn(n, |a, b| {
        let mut s = 0.0;
        for c in 0..n {
            s += geo.g_inv[(a, c)] * w[(c, b)];
        }
        s
    });
    let partials = Ten3::from_fn(n, |a, b, e| {
        let mut s = 0.0;
        for c in 0..n {
            s += dg_inv[(a, c, e)] * w[(c, b)] + geo.g_inv[(a, c)] * dw[(c, b, e)];
        }
        s
    });
    (value, partials)
}
