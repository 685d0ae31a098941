//! Seeded sampling of admitted points and random expression fields.
//!
//! Sampling is rejection-based against the metric's admitted region, with a
//! hard cap of 10x the requested count; runs are reproducible from the seed
//! alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::PhasePoint;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::geometry::{
    MetricSpec, ScalarFieldSpec, Tensor2Field, Tensor2FieldSpec, VectorFieldSpec,
};
use crate::lifts::{
    complete_lift, horizontal_lift, iwai_lift, vertical_lift_tensor, vertical_lift_vector, AtlSpec,
};
use crate::tensor::max_abs;

pub const REJECTION_CAP_FACTOR: usize = 10;

#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub seed: u64,
    pub count: usize,
    /// Per-coordinate ranges for base points.
    pub x_box: Vec<(f64, f64)>,
    /// Per-component ranges for tangent vectors.
    pub p_box: Vec<(f64, f64)>,
    /// Reject phase points with max-norm |p| below this.
    pub min_p_norm: f64,
}

impl SampleSpec {
    pub fn for_metric(m: &MetricSpec, seed: u64, count: usize) -> Self {
        SampleSpec {
            seed,
            count,
            x_box: m.sample_box().to_vec(),
            p_box: vec![(-1.0, 1.0); m.dim()],
            min_p_norm: 0.1,
        }
    }

    pub fn with_x_box(mut self, x_box: Vec<(f64, f64)>) -> Self {
        self.x_box = x_box;
        self
    }

    pub fn with_p_box(mut self, p_box: Vec<(f64, f64)>) -> Self {
        self.p_box = p_box;
        self
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_in_box(rng: &mut ChaCha8Rng, bx: &[(f64, f64)]) -> Vec<f64> {
    bx.iter()
        .map(|(lo, hi)| lo + rng.random::<f64>() * (hi - lo))
        .collect()
}

/// Admitted base points, rejection-sampled within the box.
pub fn sample_base_points(m: &MetricSpec, spec: &SampleSpec) -> Result<Vec<Vec<f64>>> {
    let mut rng = rng_from_seed(spec.seed);
    sample_base_points_with(m, spec, &mut rng)
}

fn sample_base_points_with(
    m: &MetricSpec,
    spec: &SampleSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    if spec.x_box.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: spec.x_box.len(),
        });
    }
    let cap = REJECTION_CAP_FACTOR * spec.count;
    let mut points = Vec::with_capacity(spec.count);
    let mut attempts = 0;
    while points.len() < spec.count {
        if attempts >= cap {
            return Err(Error::SamplingExhausted {
                requested: spec.count,
                found: points.len(),
                attempts,
            });
        }
        attempts += 1;
        let x = sample_in_box(rng, &spec.x_box);
        if m.is_admitted(&x) {
            points.push(x);
        }
    }
    Ok(points)
}

/// Admitted phase points with |p| above the configured floor. An optional
/// predicate can restrict the fibre further (e.g. to future-directed
/// non-spacelike vectors); it is applied as an extra rejection.
pub fn sample_phase_points_filtered(
    m: &MetricSpec,
    spec: &SampleSpec,
    filter: Option<&dyn Fn(&PhasePoint) -> bool>,
) -> Result<Vec<PhasePoint>> {
    if spec.p_box.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: spec.p_box.len(),
        });
    }
    let mut rng = rng_from_seed(spec.seed);
    let cap = REJECTION_CAP_FACTOR * spec.count;
    let mut points = Vec::with_capacity(spec.count);
    let mut attempts = 0;
    while points.len() < spec.count {
        if attempts >= cap {
            return Err(Error::SamplingExhausted {
                requested: spec.count,
                found: points.len(),
                attempts,
            });
        }
        attempts += 1;
        let x = sample_in_box(&mut rng, &spec.x_box);
        if !m.is_admitted(&x) {
            continue;
        }
        let p = sample_in_box(&mut rng, &spec.p_box);
        if max_abs(&p) < spec.min_p_norm {
            continue;
        }
        let pt = PhasePoint::new(x, p);
        if let Some(f) = filter {
            if !f(&pt) {
                continue;
            }
        }
        points.push(pt);
    }
    Ok(points)
}

pub fn sample_phase_points(m: &MetricSpec, spec: &SampleSpec) -> Result<Vec<PhasePoint>> {
    sample_phase_points_filtered(m, spec, None)
}

/// Random expression exercising the full function set, built so that every
/// subexpression stays inside its domain for any real input: denominators
/// and log/sqrt/power arguments are wrapped as `const + u^2`, and arguments
/// of exp/tan/sinh are bounded through tanh.
pub fn random_smooth_expr(rng: &mut ChaCha8Rng, dim: usize, depth: usize) -> Expression {
    use crate::expr::Func;
    if depth == 0 {
        return if rng.random::<f64>() < 0.5 {
            Expression::var(rng.random_range(0..dim))
        } else {
            Expression::constant(rng.random::<f64>() * 4.0 - 2.0)
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_smooth_expr(rng, dim, depth - 1);
    let bounded = |e: Expression| Expression::apply(Func::Tanh, e);
    let positive = |e: Expression, floor: f64| {
        Expression::constant(floor) + e.clone() * e
    };
    match rng.random_range(0..13u32) {
        0 => sub(rng) + sub(rng),
        1 => sub(rng) - sub(rng),
        2 => sub(rng) * sub(rng),
        3 => sub(rng) / positive(sub(rng), 1.5),
        4 => sub(rng).pow(Expression::constant([2.0, 3.0][rng.random_range(0..2usize)])),
        5 => positive(sub(rng), 0.8).pow(Expression::constant(1.5)),
        6 => -sub(rng),
        7 => Expression::apply(Func::Sin, sub(rng)),
        8 => Expression::apply(Func::Cos, sub(rng)),
        9 => Expression::apply(Func::Tan, bounded(sub(rng))),
        10 => Expression::apply(Func::Exp, bounded(sub(rng))),
        11 => Expression::apply(Func::Log, positive(sub(rng), 1.2)),
        _ => Expression::apply(Func::Sqrt, positive(sub(rng), 1.2)),
    }
}

/// Random polynomial of total degree <= 2 in the coordinates, with
/// coefficients uniform in [-scale, scale].
pub fn random_poly_expr(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Expression {
    let coeff = |rng: &mut ChaCha8Rng| -> f64 { (rng.random::<f64>() * 2.0 - 1.0) * scale };
    let mut e = Expression::constant(coeff(rng));
    for i in 0..dim {
        e = e + Expression::constant(coeff(rng)) * Expression::var(i);
    }
    for i in 0..dim {
        for j in i..dim {
            e = e + Expression::constant(coeff(rng)) * Expression::var(i) * Expression::var(j);
        }
    }
    e
}

pub fn random_vector_field(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> VectorFieldSpec {
    let comps = (0..dim).map(|_| random_poly_expr(rng, dim, scale)).collect();
    VectorFieldSpec::new(comps).expect("generated components are dimension-consistent")
}

pub fn random_tensor2_spec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Tensor2FieldSpec {
    let comps = (0..dim * dim)
        .map(|_| random_poly_expr(rng, dim, scale))
        .collect();
    Tensor2FieldSpec::new(dim, comps).expect("generated components are dimension-consistent")
}

pub fn random_scalar_field(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> ScalarFieldSpec {
    ScalarFieldSpec::new(dim, random_poly_expr(rng, dim, scale))
        .expect("generated expression is dimension-consistent")
}

/// Antisymmetric expression tensor W_ab = −W_ba (both indices down).
pub fn random_skew_lower(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Tensor2FieldSpec {
    let mut comps = vec![Expression::constant(0.0); dim * dim];
    for a in 0..dim {
        for b in (a + 1)..dim {
            let e = random_poly_expr(rng, dim, scale);
            comps[a * dim + b] = e.clone();
            comps[b * dim + a] = -e;
        }
    }
    Tensor2FieldSpec::new(dim, comps).expect("generated components are dimension-consistent")
}

/// A skew transport generator A^a_b = g^{ac} W_cb with W antisymmetric.
pub fn random_skew_generator(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Tensor2Field {
    Tensor2Field::RaisedLower(random_skew_lower(rng, dim, scale))
}

/// A random lift drawn from the constructor families (horizontal, vertical,
/// tensor-vertical, complete, conformal-complete, skew, general affine).
pub fn random_atl(rng: &mut ChaCha8Rng, m: &MetricSpec, scale: f64) -> AtlSpec {
    let dim = m.dim();
    match rng.random_range(0..7u32) {
        0 => horizontal_lift(random_vector_field(rng, dim, scale)),
        1 => vertical_lift_vector(random_vector_field(rng, dim, scale)),
        2 => vertical_lift_tensor(Tensor2Field::expressions(random_tensor2_spec(
            rng, dim, scale,
        ))),
        3 => complete_lift(m, random_vector_field(rng, dim, scale))
            .expect("dimensions match by construction"),
        4 => iwai_lift(
            m,
            random_vector_field(rng, dim, scale),
            random_scalar_field(rng, dim, scale),
        )
        .expect("dimensions match by construction"),
        5 => AtlSpec::general(
            random_vector_field(rng, dim, scale),
            random_skew_generator(rng, dim, scale),
            VectorFieldSpec::zero(dim),
        )
        .expect("dimensions match by construction"),
        _ => AtlSpec::general(
            random_vector_field(rng, dim, scale),
            Tensor2Field::expressions(random_tensor2_spec(rng, dim, scale)),
            random_vector_field(rng, dim, scale),
        )
        .expect("dimensions match by construction"),
    }
}
