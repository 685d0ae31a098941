//! Lifts of base-manifold data to the tangent bundle, all expressed as the
//! triple (Y, A, k): the induced bundle field is
//! `Y^a H_a + (A^a_b p^b + k^a) V_a`.
//!
//! The non-tensorial connection part of a transport rule is never stored;
//! the transport generator A is the covariant object, and the rule can be
//! recovered pointwise as `ω = A − ΓY` when needed.

use std::sync::Arc;

use serde::Serialize;

use crate::bundle::{BundleField, PhasePoint};
use crate::error::{Error, Result};
use crate::expr::Jet2;
use crate::geometry::{
    cov_deriv_tensor2_at, cov_deriv_vector_at, GeometryPoint, MetricSpec, ScalarFieldSpec,
    Tensor2Field, VectorFieldSpec,
};
use crate::tensor::Mat;

/// Skewness tolerance for matter-lift validation.
pub const MATTER_SKEW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    Horizontal,
    VerticalVec,
    VerticalTensor,
    Euler,
    Complete,
    Iwai,
    Matter,
    General,
}

/// An affine transport lift, specified by the base vector field Y, the
/// transport generator A and the inhomogeneous part k.
#[derive(Debug, Clone)]
pub struct AtlSpec {
    y: VectorFieldSpec,
    a: Tensor2Field,
    k: VectorFieldSpec,
    kind: LiftKind,
}

impl AtlSpec {
    pub fn general(y: VectorFieldSpec, a: Tensor2Field, k: VectorFieldSpec) -> Result<Self> {
        if y.dim() != a.dim() || y.dim() != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: y.dim(),
                got: a.dim().max(k.dim()),
            });
        }
        Ok(AtlSpec {
            y,
            a,
            k,
            kind: LiftKind::General,
        })
    }

    fn with_kind(mut self, kind: LiftKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn y(&self) -> &VectorFieldSpec {
        &self.y
    }

    pub fn a(&self) -> &Tensor2Field {
        &self.a
    }

    pub fn k(&self) -> &VectorFieldSpec {
        &self.k
    }

    pub fn kind(&self) -> LiftKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.y.dim()
    }

    /// The induced vector field on the tangent bundle.
    pub fn induced_field(&self, metric: &Arc<MetricSpec>) -> BundleField {
        BundleField::affine(
            metric.clone(),
            self.y.clone(),
            self.a.clone(),
            self.k.clone(),
        )
    }

    /// Closed-form coordinate-basis value of the induced field at a phase
    /// point with precomputed geometry.
    pub fn value_at(&self, geo: &GeometryPoint, pt: &PhasePoint) -> Result<Vec<f64>> {
        let yv = self.y.eval(&pt.x)?;
        let av = self.a.value(geo)?;
        let kv = self.k.eval(&pt.x)?;
        Ok(affine_coordinate_value(geo, pt, &yv, &av, &kv))
    }
}

/// Coordinate components (X, P) of Y^a H_a + (A p + k)^a V_a.
pub(crate) fn affine_coordinate_value(
    geo: &GeometryPoint,
    pt: &PhasePoint,
    y: &[f64],
    a: &Mat,
    k: &[f64],
) -> Vec<f64> {
    let n = geo.dim();
    let mut out = vec![0.0; 2 * n];
    out[..n].copy_from_slice(y);
    for i in 0..n {
        let mut s = k[i];
        for b in 0..n {
            s += a[(i, b)] * pt.p[b];
            for c in 0..n {
                s -= geo.gamma[(i, b, c)] * pt.p[b] * y[c];
            }
        }
        out[n + i] = s;
    }
    out
}

/// Parallel-transport lift: (Y, 0, 0).
pub fn horizontal_lift(y: VectorFieldSpec) -> AtlSpec {
    let n = y.dim();
    AtlSpec {
        a: Tensor2Field::zero(n),
        k: VectorFieldSpec::zero(n),
        y,
        kind: LiftKind::Horizontal,
    }
}

/// Vertical lift of a vector field: (0, 0, Z).
pub fn vertical_lift_vector(z: VectorFieldSpec) -> AtlSpec {
    let n = z.dim();
    AtlSpec {
        y: VectorFieldSpec::zero(n),
        a: Tensor2Field::zero(n),
        k: z,
        kind: LiftKind::VerticalVec,
    }
}

/// Vertical lift of a rank-(1,1) tensor field: (0, A, 0).
pub fn vertical_lift_tensor(a: Tensor2Field) -> AtlSpec {
    let n = a.dim();
    AtlSpec {
        y: VectorFieldSpec::zero(n),
        a,
        k: VectorFieldSpec::zero(n),
        kind: LiftKind::VerticalTensor,
    }
}

/// The Euler field p^a V_a = vertical lift of the identity.
pub fn euler_field(dim: usize) -> AtlSpec {
    AtlSpec {
        y: VectorFieldSpec::zero(dim),
        a: Tensor2Field::identity(dim),
        k: VectorFieldSpec::zero(dim),
        kind: LiftKind::Euler,
    }
}

/// Lie-transport lift: (Y, ∇Y, 0).
pub fn complete_lift(m: &MetricSpec, y: VectorFieldSpec) -> Result<AtlSpec> {
    check_dim(m, y.dim())?;
    let n = y.dim();
    Ok(AtlSpec {
        a: Tensor2Field::grad_of(y.clone()),
        k: VectorFieldSpec::zero(n),
        y,
        kind: LiftKind::Complete,
    })
}

/// Conformal Lie-transport lift: (Y, ∇Y − 2ψδ, 0).
pub fn iwai_lift(m: &MetricSpec, y: VectorFieldSpec, psi: ScalarFieldSpec) -> Result<AtlSpec> {
    check_dim(m, y.dim())?;
    check_dim(m, psi.dim())?;
    let n = y.dim();
    let a = Tensor2Field::grad_of(y.clone()).sum(Tensor2Field::ScaledIdentity(-2.0, psi));
    Ok(AtlSpec {
        a,
        k: VectorFieldSpec::zero(n),
        y,
        kind: LiftKind::Iwai,
    })
}

/// The lift (Y, ∇Y − ψδ, 0), the affine form a dynamical symmetry must take.
///
/// This differs from [`iwai_lift`] by a factor of two in the ψ term; the two
/// rescaling conventions are both in use, so both constructors are provided
/// and callers choose explicitly.
pub fn dynamical_atl(m: &MetricSpec, y: VectorFieldSpec, psi: ScalarFieldSpec) -> Result<AtlSpec> {
    check_dim(m, y.dim())?;
    check_dim(m, psi.dim())?;
    let n = y.dim();
    let a = Tensor2Field::grad_of(y.clone()).sum(Tensor2Field::ScaledIdentity(-1.0, psi));
    Ok(AtlSpec {
        a,
        k: VectorFieldSpec::zero(n),
        y,
        kind: LiftKind::Iwai,
    })
}

/// Lorentz-transport lift (Y, A, 0) with skew transport generator.
///
/// Skewness `A_(ab) = g_c(a A^c_b) = 0` is validated numerically at the given
/// sample points (tolerance [`MATTER_SKEW_TOL`]), not symbolically.
pub fn matter_lift(
    m: &MetricSpec,
    y: VectorFieldSpec,
    a: Tensor2Field,
    samples: &[Vec<f64>],
) -> Result<AtlSpec> {
    check_dim(m, y.dim())?;
    check_dim(m, a.dim())?;
    let mut worst: f64 = 0.0;
    for x in samples {
        let geo = m.geometry_at(x)?;
        worst = worst.max(skew_violation(&geo, &a)?);
    }
    if worst > MATTER_SKEW_TOL {
        return Err(Error::SkewnessViolation {
            max_violation: worst,
        });
    }
    let n = y.dim();
    Ok(AtlSpec {
        y,
        a,
        k: VectorFieldSpec::zero(n),
        kind: LiftKind::Matter,
    })
}

/// Max |A_(ab)| with indices lowered by g.
pub fn skew_violation(geo: &GeometryPoint, a: &Tensor2Field) -> Result<f64> {
    let n = geo.dim();
    let av = a.value(geo)?;
    let lowered = geo.lower_first(&av);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(0.5 * (lowered[(i, j)] + lowered[(j, i)]).abs());
        }
    }
    Ok(worst)
}

/// α L1 + β L2 = (αY+βZ, αA+βB, αk+βℓ).
pub fn atl_combine(alpha: f64, l1: &AtlSpec, beta: f64, l2: &AtlSpec) -> Result<AtlSpec> {
    if l1.dim() != l2.dim() {
        return Err(Error::DimensionMismatch {
            expected: l1.dim(),
            got: l2.dim(),
        });
    }
    let y = VectorFieldSpec::combine(alpha, &l1.y, beta, &l2.y)?;
    let a = l1
        .a
        .clone()
        .scale(alpha)
        .sum(l2.a.clone().scale(beta));
    let k = VectorFieldSpec::combine(alpha, &l1.k, beta, &l2.k)?;
    AtlSpec::general(y, a, k).map(|l| l.with_kind(LiftKind::General))
}

/// The closed-form bracket data of two lifts at a base point:
/// `[L1, L2] = ([Y,Z], C, m)` with
/// `C = ∇_Y B − ∇_Z A − [A,B] − R(Y,Z)` and
/// `m = ∇_Y ℓ − ∇_Z k − A(ℓ) + B(k)`.
#[derive(Debug, Clone)]
pub struct AtlBracket {
    /// [Y,Z]^a at the point.
    pub yz: Vec<f64>,
    /// C^a_b at the point.
    pub c: Mat,
    /// m^a at the point.
    pub m_vec: Vec<f64>,
}

impl AtlBracket {
    /// Coordinate-basis value of the bracket field at (x, p) for the same
    /// base point the bracket was evaluated at.
    pub fn field_value(&self, geo: &GeometryPoint, pt: &PhasePoint) -> Vec<f64> {
        affine_coordinate_value(geo, pt, &self.yz, &self.c, &self.m_vec)
    }
}

pub fn atl_bracket(m: &MetricSpec, l1: &AtlSpec, l2: &AtlSpec, x: &[f64]) -> Result<AtlBracket> {
    if l1.dim() != l2.dim() {
        return Err(Error::DimensionMismatch {
            expected: l1.dim(),
            got: l2.dim(),
        });
    }
    let geo = m.geometry_at(x)?;
    let n = geo.dim();

    let y_jets = l1.y.eval_jets(x)?;
    let z_jets = l2.y.eval_jets(x)?;
    let yv: Vec<f64> = y_jets.iter().map(|j| j.value).collect();
    let zv: Vec<f64> = z_jets.iter().map(|j| j.value).collect();

    let (yz, _) = bracket_value_and_partials(&y_jets, &z_jets);

    let (a_val, a_part) = l1.a.value_and_partials(&geo)?;
    let (b_val, b_part) = l2.a.value_and_partials(&geo)?;
    let nabla_a = cov_deriv_tensor2_at(&geo, &a_val, &a_part);
    let nabla_b = cov_deriv_tensor2_at(&geo, &b_val, &b_part);

    let commutator = a_val.matmul(&b_val).sub(&b_val.matmul(&a_val));
    let r_yz = geo.riemann_yz(&yv, &zv);

    let c = Mat::from_fn(n, |a, b| {
        let mut s = 0.0;
        for e in 0..n {
            s += yv[e] * nabla_b[(a, b, e)] - zv[e] * nabla_a[(a, b, e)];
        }
        s - commutator[(a, b)] - r_yz[(a, b)]
    });

    let k_jets = l1.k.eval_jets(x)?;
    let l_jets = l2.k.eval_jets(x)?;
    let nabla_k = cov_deriv_vector_at(&geo, &k_jets);
    let nabla_l = cov_deriv_vector_at(&geo, &l_jets);
    let mut m_vec = vec![0.0; n];
    for a in 0..n {
        let mut s = 0.0;
        for b in 0..n {
            s += yv[b] * nabla_l[(a, b)] - zv[b] * nabla_k[(a, b)];
            s += -a_val[(a, b)] * l_jets[b].value + b_val[(a, b)] * k_jets[b].value;
        }
        m_vec[a] = s;
    }

    Ok(AtlBracket { yz, c, m_vec })
}

/// [Y,Z]^a values and partials ∂_b [Y,Z]^a from jets of Y and Z.
pub(crate) fn bracket_value_and_partials(y_jets: &[Jet2], z_jets: &[Jet2]) -> (Vec<f64>, Mat) {
    let n = y_jets.len();
    let mut value = vec![0.0; n];
    for a in 0..n {
        let mut s = 0.0;
        for b in 0..n {
            s += y_jets[b].value * z_jets[a].grad(b) - z_jets[b].value * y_jets[a].grad(b);
        }
        value[a] = s;
    }
    let partials = Mat::from_fn(n, |a, b| {
        let mut s = 0.0;
        for c in 0..n {
            s += y_jets[c].grad(b) * z_jets[a].grad(c) + y_jets[c].value * z_jets[a].hess(b, c)
                - z_jets[c].grad(b) * y_jets[a].grad(c)
                - z_jets[c].value * y_jets[a].hess(b, c);
        }
        s
    });
    (value, partials)
}

/// ∇_b W^a for a vector given by values and partials at a point.
fn cov_deriv_from_values(geo: &GeometryPoint, w: &[f64], dw: &Mat) -> Mat {
    let n = geo.dim();
    Mat::from_fn(n, |a, b| {
        let mut s = dw[(a, b)];
        for c in 0..n {
            s += geo.gamma[(a, b, c)] * w[c];
        }
        s
    })
}

/// Residuals of the six classical bracket identities among horizontal,
/// vertical and complete lifts of two vector fields, evaluated at one phase
/// point. Each right-hand side is built pointwise from covariant data and
/// compared against the exact-jet bracket.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalBracketReport {
    /// [Ȳ, Z̄] − ( [Y,Z]-bar − R(Y,Z)-hat )
    pub horizontal_horizontal: f64,
    /// [Ȳ, Ẑ] − (∇_Y Z)-hat
    pub horizontal_vertical: f64,
    /// [Ȳ, Z̃] − ( [Y,Z]-bar + S(Y,Z)-hat )
    pub horizontal_complete: f64,
    /// [Ŷ, Ẑ]
    pub vertical_vertical: f64,
    /// [Ŷ, Z̃] − [Y,Z]-hat
    pub vertical_complete: f64,
    /// [Ỹ, Z̃] − [Y,Z]-tilde
    pub complete_complete: f64,
}

impl ClassicalBracketReport {
    pub fn max(&self) -> f64 {
        self.horizontal_horizontal
            .max(self.horizontal_vertical)
            .max(self.horizontal_complete)
            .max(self.vertical_vertical)
            .max(self.vertical_complete)
            .max(self.complete_complete)
    }
}

pub fn classical_bracket_table(
    m: &Arc<MetricSpec>,
    y: &VectorFieldSpec,
    z: &VectorFieldSpec,
    pt: &PhasePoint,
) -> Result<ClassicalBracketReport> {
    let n = m.dim();
    let geo = m.geometry_at(&pt.x)?;
    let x = &pt.x;

    let y_jets = y.eval_jets(x)?;
    let z_jets = z.eval_jets(x)?;
    let yv: Vec<f64> = y_jets.iter().map(|j| j.value).collect();
    let zv: Vec<f64> = z_jets.iter().map(|j| j.value).collect();

    let horiz_y = horizontal_lift(y.clone()).induced_field(m);
    let horiz_z = horizontal_lift(z.clone()).induced_field(m);
    let vert_y = vertical_lift_vector(y.clone()).induced_field(m);
    let vert_z = vertical_lift_vector(z.clone()).induced_field(m);
    let compl_y = complete_lift(m, y.clone())?.induced_field(m);
    let compl_z = complete_lift(m, z.clone())?.induced_field(m);

    let (w, dw) = bracket_value_and_partials(&y_jets, &z_jets);
    let zero = vec![0.0; n];
    let zero_mat = Mat::zeros(n);

    // [Y,Z]-bar, [Y,Z]-hat, [Y,Z]-tilde values at pt
    let bar_w = affine_coordinate_value(&geo, pt, &w, &zero_mat, &zero);
    let hat_w = affine_coordinate_value(&geo, pt, &zero, &zero_mat, &w);
    let nabla_w = cov_deriv_from_values(&geo, &w, &dw);
    let tilde_w = affine_coordinate_value(&geo, pt, &w, &nabla_w, &zero);

    let r_yz = geo.riemann_yz(&yv, &zv);
    let hat_r = affine_coordinate_value(&geo, pt, &zero, &r_yz, &zero);

    // ∇_Y Z
    let nabla_z = cov_deriv_vector_at(&geo, &z_jets);
    let mut nyz = vec![0.0; n];
    for a in 0..n {
        for b in 0..n {
            nyz[a] += yv[b] * nabla_z[(a, b)];
        }
    }
    let hat_nyz = affine_coordinate_value(&geo, pt, &zero, &zero_mat, &nyz);

    // S(Y,Z)^a_b = (L_Z Γ^a_cb) Y^c
    let lz = crate::geometry::lie_deriv_connection_at(&geo, &z_jets);
    let s_mat = Mat::from_fn(n, |a, b| {
        let mut s = 0.0;
        for c in 0..n {
            s += lz[(a, c, b)] * yv[c];
        }
        s
    });
    let hat_s = affine_coordinate_value(&geo, pt, &zero, &s_mat, &zero);

    let residual = |lhs: Vec<f64>, rhs: Vec<f64>| -> f64 {
        lhs.iter()
            .zip(&rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };

    let lhs = crate::bundle::lie_bracket_numeric(&horiz_y, &horiz_z, pt)?;
    let rhs: Vec<f64> = bar_w.iter().zip(&hat_r).map(|(a, b)| a - b).collect();
    let horizontal_horizontal = residual(lhs, rhs);

    let lhs = crate::bundle::lie_bracket_numeric(&horiz_y, &vert_z, pt)?;
    let horizontal_vertical = residual(lhs, hat_nyz);

    let lhs = crate::bundle::lie_bracket_numeric(&horiz_y, &compl_z, pt)?;
    let rhs: Vec<f64> = bar_w.iter().zip(&hat_s).map(|(a, b)| a + b).collect();
    let horizontal_complete = residual(lhs, rhs);

    let lhs = crate::bundle::lie_bracket_numeric(&vert_y, &vert_z, pt)?;
    let vertical_vertical = residual(lhs, vec![0.0; 2 * n]);

    let lhs = crate::bundle::lie_bracket_numeric(&vert_y, &compl_z, pt)?;
    let vertical_complete = residual(lhs, hat_w);

    let lhs = crate::bundle::lie_bracket_numeric(&compl_y, &compl_z, pt)?;
    let complete_complete = residual(lhs, tilde_w);

    Ok(ClassicalBracketReport {
        horizontal_horizontal,
        horizontal_vertical,
        horizontal_complete,
        vertical_vertical,
        vertical_complete,
        complete_complete,
    })
}

fn check_dim(m: &MetricSpec, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: dim,
        });
    }
    Ok(())
}

/// Pointwise covariant derivative matrix ∇_b[Y,Z]^a used by tests and by the
/// Iwai bracket-rule check; exposed because the bracket of two expression
/// fields is not itself expression-backed.
pub fn bracket_cov_deriv(
    geo: &GeometryPoint,
    y_jets: &[Jet2],
    z_jets: &[Jet2],
) -> (Vec<f64>, Mat) {
    let (w, dw) = bracket_value_and_partials(y_jets, z_jets);
    let nabla = cov_deriv_from_values(geo, &w, &dw);
    (w, nabla)
}
