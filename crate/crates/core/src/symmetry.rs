//! Dynamical- and matter-symmetry conditions, rescaling-function recovery
//! and sampling-based classification of base vector fields.
//!
//! All classification here is numerical: a set flag means "no violation
//! found at the stated tolerance on the sampled points", never a proof.
//! Adding sample points can only clear a flag.

use std::sync::Arc;

use serde::Serialize;

use crate::bundle::{lie_bracket_numeric, BundleField, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::{
    cov_deriv_vector_at, lie_deriv_connection_at, MetricSpec, ScalarFieldSpec, Tensor2Field,
    VectorFieldSpec,
};
use crate::lifts::{matter_lift, AtlSpec};
use crate::tensor::{dot, max_abs, Mat};

/// Default tolerance for classification flags.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// A homothety requires the recovered conformal factor to be constant to
/// this spread across sample points.
pub const HOMOTHETY_SPREAD_TOL: f64 = 1e-8;

/// Result of testing `[Σ, spray] = −ψ·spray` at one phase point.
#[derive(Debug, Clone, Serialize)]
pub struct DynamicalResidual {
    /// Least-squares rescaling ψ over the 2n bracket components.
    pub psi_hat: f64,
    /// Max-norm residual of `[Σ, spray] + ψ·spray`.
    pub residual: f64,
}

/// Tests the dynamical-symmetry condition for an arbitrary bundle field at
/// one phase point. Requires p ≠ 0 (the spray vanishes on the zero section
/// and the rescaling is undefined there).
pub fn dynamical_residual(
    m: &Arc<MetricSpec>,
    sigma: &BundleField,
    pt: &PhasePoint,
) -> Result<DynamicalResidual> {
    let spray = BundleField::spray(m.clone());
    let spray_val = spray.value(pt)?;
    let denom = dot(&spray_val, &spray_val);
    if denom == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let bracket = lie_bracket_numeric(sigma, &spray, pt)?;
    let psi_hat = -dot(&bracket, &spray_val) / denom;
    let residual = bracket
        .iter()
        .zip(&spray_val)
        .fold(0.0f64, |acc, (b, g)| acc.max((b + psi_hat * g).abs()));
    Ok(DynamicalResidual { psi_hat, residual })
}

/// Residuals of the pointwise conditions a lift must satisfy to be a
/// dynamical symmetry with rescaling ψ: k = 0, the transport generator
/// equals `∇Y − ψδ` (indices lowered with g), and Y solves the projective
/// collineation equation with the same ψ.
#[derive(Debug, Clone, Serialize)]
pub struct AtlDynamicalConditions {
    /// Max |k^a(x)|; any nonzero k rules out a dynamical symmetry.
    pub k_norm: f64,
    /// Max |A_ab − (∇_b Y_a − ψ g_ab)|.
    pub transport_residual: f64,
    /// Max |L_Y Γ^a_bc − δ^a_(b ∇_c) ψ|.
    pub projective_residual: f64,
}

impl AtlDynamicalConditions {
    pub fn max(&self) -> f64 {
        self.k_norm
            .max(self.transport_residual)
            .max(self.projective_residual)
    }
}

pub fn atl_dynamical_conditions(
    m: &MetricSpec,
    l: &AtlSpec,
    x: &[f64],
    psi: &ScalarFieldSpec,
) -> Result<AtlDynamicalConditions> {
    let geo = m.geometry_at(x)?;
    let n = geo.dim();

    let k_norm = max_abs(&l.k().eval(x)?);

    let psi_jet = psi.eval_jet(x)?;
    let y_jets = l.y().eval_jets(x)?;
    let a_lower = geo.lower_first(&l.a().value(&geo)?);
    let nabla_y = cov_deriv_vector_at(&geo, &y_jets);
    let mut transport_residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            // ∇_b Y_a = g_ac ∇_b Y^c
            let mut lowered = 0.0;
            for c in 0..n {
                lowered += geo.g[(a, c)] * nabla_y[(c, b)];
            }
            let expected = lowered - psi_jet.value * geo.g[(a, b)];
            transport_residual = transport_residual.max((a_lower[(a, b)] - expected).abs());
        }
    }

    let lie = lie_deriv_connection_at(&geo, &y_jets);
    let mut projective_residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut expected = 0.0;
                if a == b {
                    expected += 0.5 * psi_jet.grad(c);
                }
                if a == c {
                    expected += 0.5 * psi_jet.grad(b);
                }
                projective_residual = projective_residual.max((lie[(a, b, c)] - expected).abs());
            }
        }
    }

    Ok(AtlDynamicalConditions {
        k_norm,
        transport_residual,
        projective_residual,
    })
}

/// Closed-form bracket of a linear transport lift with the geodesic spray,
/// in the coordinate basis:
/// `(A^a_b − ∇_b Y^a) p^b H_a + (R^a_bcd Y^d − ∇_c A^a_b) p^b p^c V_a`.
pub fn matter_spray_bracket(m: &MetricSpec, l: &AtlSpec, pt: &PhasePoint) -> Result<Vec<f64>> {
    let geo = m.geometry_at(&pt.x)?;
    let n = geo.dim();

    let k_val = l.k().eval(&pt.x)?;
    if max_abs(&k_val) != 0.0 {
        return Err(Error::InvalidArgument(
            "spray bracket closed form requires k = 0".into(),
        ));
    }

    let y_jets = l.y().eval_jets(&pt.x)?;
    let yv: Vec<f64> = y_jets.iter().map(|j| j.value).collect();
    let nabla_y = cov_deriv_vector_at(&geo, &y_jets);
    let a_val = l.a().value(&geo)?;
    let nabla_a = l.a().cov_deriv(&geo)?;

    let p = &pt.p;
    let mut h = vec![0.0; n];
    for a in 0..n {
        for b in 0..n {
            h[a] += (a_val[(a, b)] - nabla_y[(a, b)]) * p[b];
        }
    }
    let mut v = vec![0.0; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut riem = 0.0;
                for d in 0..n {
                    riem += geo.riemann[(a, b, c, d)] * yv[d];
                }
                v[a] += (riem - nabla_a[(a, b, c)]) * p[b] * p[c];
            }
        }
    }

    // convert (h, v) connection components to the coordinate basis
    let mut out = vec![0.0; 2 * n];
    out[..n].copy_from_slice(&h);
    for a in 0..n {
        let mut s = v[a];
        for b in 0..n {
            for c in 0..n {
                s -= geo.gamma[(a, b, c)] * p[b] * h[c];
            }
        }
        out[n + a] = s;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryFlags {
    pub killing: bool,
    pub conformal_killing: bool,
    pub homothetic: bool,
    pub affine_collineation: bool,
    pub projective_collineation: bool,
    /// Set only by phase-space checks (see `coincidence_check`).
    pub matter_symmetry: Option<bool>,
    pub dynamical_symmetry: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResiduals {
    pub x: Vec<f64>,
    pub killing: f64,
    pub conformal: f64,
    pub affine: f64,
    pub projective: f64,
    /// Conformal factor ψ = (∇_c Y^c)/n at this point.
    pub psi_conformal: f64,
}

/// Classification outcome over a fixed sample-point set.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub flags: SymmetryFlags,
    pub tolerance: f64,
    pub psi_spread: f64,
    pub per_point: Vec<PointResiduals>,
}

impl SymmetryReport {
    pub fn worst(&self) -> f64 {
        self.per_point.iter().fold(0.0f64, |acc, p| {
            acc.max(p.killing)
                .max(p.conformal)
                .max(p.affine)
                .max(p.projective)
        })
    }
}

/// Classify a base vector field by testing `∇_(a Y_b)` and `L_Y Γ` at each
/// sample point.
pub fn classify_vector_field(
    m: &MetricSpec,
    y: &VectorFieldSpec,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<SymmetryReport> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "classification requires at least 2 sample points, got {}",
            samples.len()
        )));
    }
    let n = m.dim();
    let mut per_point = Vec::with_capacity(samples.len());
    for x in samples {
        let geo = m.geometry_at(x)?;
        let y_jets = y.eval_jets(x)?;
        let nabla = cov_deriv_vector_at(&geo, &y_jets);

        // K_ab = ∇_(a Y_b) with ∇_a Y_b = g_bc ∇_a Y^c
        let lowered = Mat::from_fn(n, |a, b| {
            let mut s = 0.0;
            for c in 0..n {
                s += geo.g[(b, c)] * nabla[(c, a)];
            }
            s
        });
        let sym = Mat::from_fn(n, |a, b| 0.5 * (lowered[(a, b)] + lowered[(b, a)]));

        let div: f64 = (0..n).map(|a| nabla[(a, a)]).sum();
        let psi_conformal = div / n as f64;

        let killing = sym.max_abs();
        let conformal = sym.sub(&geo.g.scale(psi_conformal)).max_abs();

        let lie = lie_deriv_connection_at(&geo, &y_jets);
        let affine = lie.max_abs();

        // trace fit: ∇_c ψ = 2/(n+1) (L_Y Γ)^a_ac
        let mut psi_grad = vec![0.0; n];
        for c in 0..n {
            let mut tr = 0.0;
            for a in 0..n {
                tr += lie[(a, a, c)];
            }
            psi_grad[c] = 2.0 / (n as f64 + 1.0) * tr;
        }
        let mut projective: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut expected = 0.0;
                    if a == b {
                        expected += 0.5 * psi_grad[c];
                    }
                    if a == c {
                        expected += 0.5 * psi_grad[b];
                    }
                    projective = projective.max((lie[(a, b, c)] - expected).abs());
                }
            }
        }

        per_point.push(PointResiduals {
            x: x.clone(),
            killing,
            conformal,
            affine,
            projective,
            psi_conformal,
        });
    }

    let all = |f: &dyn Fn(&PointResiduals) -> f64| per_point.iter().all(|p| f(p) < tol);
    let killing = all(&|p| p.killing);
    let conformal_killing = all(&|p| p.conformal);
    let affine_collineation = all(&|p| p.affine);
    let projective_collineation = all(&|p| p.projective);

    let mean_psi =
        per_point.iter().map(|p| p.psi_conformal).sum::<f64>() / per_point.len() as f64;
    let psi_spread = (per_point
        .iter()
        .map(|p| (p.psi_conformal - mean_psi).powi(2))
        .sum::<f64>()
        / per_point.len() as f64)
        .sqrt();
    let homothetic = conformal_killing && psi_spread < HOMOTHETY_SPREAD_TOL;

    Ok(SymmetryReport {
        flags: SymmetryFlags {
            killing,
            conformal_killing,
            homothetic,
            affine_collineation,
            projective_collineation,
            matter_symmetry: None,
            dynamical_symmetry: None,
        },
        tolerance: tol,
        psi_spread,
        per_point,
    })
}

/// Outcome of the coincidence test between matter and dynamical symmetry:
/// the matter lift built from the bivector part of ∇Y is a dynamical
/// symmetry exactly when Y is homothetic.
#[derive(Debug, Clone, Serialize)]
pub struct CoincidenceReport {
    pub homothetic: bool,
    pub dynamical: bool,
    /// Whether the two tests agree (both true or both false).
    pub consistent: bool,
    pub max_dynamical_residual: f64,
    /// Phase point realizing the worst residual.
    pub worst_point: Option<(Vec<f64>, Vec<f64>)>,
    pub psi_hat_mean: f64,
    pub classification: SymmetryReport,
}

pub fn coincidence_check(
    m: &Arc<MetricSpec>,
    y: &VectorFieldSpec,
    phase_samples: &[PhasePoint],
    tol: f64,
) -> Result<CoincidenceReport> {
    if phase_samples.is_empty() {
        return Err(Error::InvalidArgument(
            "coincidence check requires at least one phase point".into(),
        ));
    }
    let base_points: Vec<Vec<f64>> = phase_samples.iter().map(|pt| pt.x.clone()).collect();
    let mut classification = classify_vector_field(m, y, &base_points, tol)?;

    // A^a_b = g^{ac} ∇_[b Y_c]: skew by construction
    let a = Tensor2Field::SkewGradOf(y.clone());
    let lift = matter_lift(m, y.clone(), a, &base_points)?;
    let field = lift.induced_field(m);

    let mut max_residual: f64 = 0.0;
    let mut worst_point = None;
    let mut psi_sum = 0.0;
    for pt in phase_samples {
        let r = dynamical_residual(m, &field, pt)?;
        psi_sum += r.psi_hat;
        if r.residual >= max_residual {
            max_residual = r.residual;
            worst_point = Some((pt.x.clone(), pt.p.clone()));
        }
    }
    let dynamical = max_residual < tol;
    let homothetic = classification.flags.homothetic;
    classification.flags.matter_symmetry = Some(true);
    classification.flags.dynamical_symmetry = Some(dynamical);

    Ok(CoincidenceReport {
        homothetic,
        dynamical,
        consistent: homothetic == dynamical,
        max_dynamical_residual: max_residual,
        worst_point,
        psi_hat_mean: psi_sum / phase_samples.len() as f64,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::expr::Params;
    use crate::lifts::{
        complete_lift, dynamical_atl, euler_field, horizontal_lift, vertical_lift_tensor,
    };
    use crate::sample::{
        random_skew_generator, rng_from_seed, sample_base_points, sample_phase_points, SampleSpec,
    };

    fn metric(name: &str) -> Arc<MetricSpec> {
        Arc::new(catalog::build(name, &Params::new()).unwrap())
    }

    fn vf(comps: &[&str]) -> VectorFieldSpec {
        VectorFieldSpec::parse(comps, &Params::new()).unwrap()
    }

    fn scalar(text: &str, dim: usize) -> ScalarFieldSpec {
        ScalarFieldSpec::parse(text, dim, &Params::new()).unwrap()
    }

    #[test]
    fn spray_is_its_own_lie_symmetry() {
        let m = metric("sphere2");
        let spray = BundleField::spray(m.clone());
        let pt = PhasePoint::new(vec![1.0, 0.4], vec![0.7, -0.2]);
        let r = dynamical_residual(&m, &spray, &pt).unwrap();
        assert_eq!(r.psi_hat, 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn euler_field_rescales_spray_with_psi_minus_one() {
        for name in ["euclidean2", "sphere2", "schwarzschild"] {
            let m = metric(name);
            let n = m.dim();
            let euler = euler_field(n).induced_field(&m);
            let x = if name == "schwarzschild" {
                vec![0.0, 5.0, 1.2, 0.3]
            } else {
                vec![1.0; n]
            };
            let pt = PhasePoint::new(x, (0..n).map(|i| 0.4 + 0.3 * i as f64).collect());
            let r = dynamical_residual(&m, &euler, &pt).unwrap();
            assert!((r.psi_hat + 1.0).abs() < 1e-12, "{name}: psi {}", r.psi_hat);
            assert!(r.residual < 1e-12, "{name}: residual {}", r.residual);
        }
    }

    #[test]
    fn flat_dilation_horizontal_lift_has_psi_one() {
        let m = metric("euclidean2");
        let lift = horizontal_lift(vf(&["x0", "x1"])).induced_field(&m);
        let pt = PhasePoint::new(vec![0.7, -0.4], vec![1.1, 0.6]);
        let r = dynamical_residual(&m, &lift, &pt).unwrap();
        assert!((r.psi_hat - 1.0).abs() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn zero_momentum_is_rejected() {
        let m = metric("euclidean2");
        let spray = BundleField::spray(m.clone());
        let pt = PhasePoint::new(vec![0.0, 0.0], vec![0.0, 0.0]);
        assert!(matches!(
            dynamical_residual(&m, &spray, &pt),
            Err(Error::ZeroMomentum)
        ));
    }

    #[test]
    fn dynamical_conditions_for_flat_projective_field() {
        let m = metric("euclidean2");
        let y = vf(&["x0^2", "x0*x1"]);
        let psi = scalar("2*x0", 2);
        let lift = dynamical_atl(&m, y, psi.clone()).unwrap();
        let report = atl_dynamical_conditions(&m, &lift, &[0.8, -0.3], &psi).unwrap();
        assert!(report.k_norm == 0.0);
        assert!(report.transport_residual < 1e-10, "{report:?}");
        assert!(report.projective_residual < 1e-10, "{report:?}");

        // and the induced field satisfies the bracket condition with ψ = 2 x0
        let field = lift.induced_field(&m);
        for pt in [
            PhasePoint::new(vec![0.8, -0.3], vec![0.6, 1.0]),
            PhasePoint::new(vec![-1.2, 0.5], vec![-0.2, 0.4]),
        ] {
            let r = dynamical_residual(&m, &field, &pt).unwrap();
            assert!(r.residual < 1e-10, "residual {}", r.residual);
            let expected = psi.eval(&pt.x).unwrap();
            assert!((r.psi_hat - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn nonzero_k_is_reported() {
        let m = metric("euclidean2");
        let lift = crate::lifts::AtlSpec::general(
            vf(&["x0", "x1"]),
            crate::geometry::Tensor2Field::zero(2),
            vf(&["1", "0"]),
        )
        .unwrap();
        let report =
            atl_dynamical_conditions(&m, &lift, &[0.3, 0.4], &ScalarFieldSpec::zero(2)).unwrap();
        assert_eq!(report.k_norm, 1.0);
    }

    #[test]
    fn schwarzschild_time_translation_is_a_lie_symmetry() {
        let m = metric("schwarzschild");
        let y = vf(&["1", "0", "0", "0"]);
        let lift = complete_lift(&m, y).unwrap();
        let report = atl_dynamical_conditions(
            &m,
            &lift,
            &[0.0, 6.0, 1.1, 0.7],
            &ScalarFieldSpec::zero(4),
        )
        .unwrap();
        assert!(report.max() < 1e-10, "{report:?}");
    }

    #[test]
    fn matter_spray_bracket_vanishes_for_flat_killing_complete_lift() {
        let m = metric("euclidean2");
        let lift = complete_lift(&m, vf(&["-x1", "x0"])).unwrap();
        let pt = PhasePoint::new(vec![0.9, 0.2], vec![1.0, -0.5]);
        let bracket = matter_spray_bracket(&m, &lift, &pt).unwrap();
        assert_eq!(max_abs(&bracket), 0.0);
    }

    #[test]
    fn matter_spray_bracket_matches_numeric_oracle() {
        let m = metric("sphere2");
        let mut rng = rng_from_seed(91);
        let pts = sample_phase_points(&m, &SampleSpec::for_metric(&m, 91, 8)).unwrap();
        let spray = BundleField::spray(m.clone());
        for _ in 0..10 {
            let a = random_skew_generator(&mut rng, 2, 0.8);
            let y = crate::sample::random_vector_field(&mut rng, 2, 0.8);
            let lift =
                crate::lifts::AtlSpec::general(y, a, VectorFieldSpec::zero(2)).unwrap();
            let field = lift.induced_field(&m);
            for pt in &pts {
                let closed = matter_spray_bracket(&m, &lift, pt).unwrap();
                let numeric = lie_bracket_numeric(&field, &spray, pt).unwrap();
                for i in 0..closed.len() {
                    assert!(
                        (closed[i] - numeric[i]).abs() < 1e-9,
                        "component {i}: {} vs {}",
                        closed[i],
                        numeric[i]
                    );
                }
            }
        }
    }

    #[test]
    fn matter_spray_bracket_for_pure_gauge_generator() {
        // Y = 0, constant skew A on flat space: bracket equals −[spray, Â]
        let m = metric("euclidean2");
        let a = crate::geometry::Tensor2FieldSpec::parse(
            2,
            &["0", "1", "-1", "0"],
            &Params::new(),
        )
        .unwrap();
        let lift = vertical_lift_tensor(crate::geometry::Tensor2Field::expressions(a));
        let pt = PhasePoint::new(vec![0.2, 0.5], vec![0.8, -0.1]);
        let closed = matter_spray_bracket(&m, &lift, &pt).unwrap();
        let spray = BundleField::spray(m.clone());
        let numeric =
            lie_bracket_numeric(&lift.induced_field(&m), &spray, &pt).unwrap();
        for i in 0..4 {
            assert!((closed[i] - numeric[i]).abs() < 1e-14);
        }
        // horizontal part is (A − ∇·0)p = Ap, vertical part vanishes
        assert_eq!(&closed[..2], &[pt.p[1], -pt.p[0]]);
        assert_eq!(&closed[2..], &[0.0, 0.0]);
    }

    #[test]
    fn classify_sphere_rotation_as_killing() {
        let m = metric("sphere2");
        let samples = sample_base_points(&m, &SampleSpec::for_metric(&m, 3, 16)).unwrap();
        let report = classify_vector_field(&m, &vf(&["0", "1"]), &samples, CLASSIFY_TOL).unwrap();
        assert!(report.flags.killing);
        assert!(report.flags.conformal_killing);
        assert!(report.flags.homothetic);
        assert!(report.flags.affine_collineation);
        assert!(report.flags.projective_collineation);
    }

    #[test]
    fn classify_flat_dilation_as_homothety() {
        let m = metric("euclidean2");
        let samples = sample_base_points(&m, &SampleSpec::for_metric(&m, 3, 16)).unwrap();
        let report = classify_vector_field(&m, &vf(&["x0", "x1"]), &samples, CLASSIFY_TOL).unwrap();
        assert!(!report.flags.killing);
        assert!(report.flags.conformal_killing);
        assert!(report.flags.homothetic);
        assert!(report.flags.affine_collineation);
        for p in &report.per_point {
            assert!((p.psi_conformal - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_flat_projective_field() {
        let m = metric("euclidean2");
        let samples = sample_base_points(&m, &SampleSpec::for_metric(&m, 3, 16)).unwrap();
        let report =
            classify_vector_field(&m, &vf(&["x0^2", "x0*x1"]), &samples, CLASSIFY_TOL).unwrap();
        assert!(!report.flags.killing);
        assert!(!report.flags.affine_collineation);
        assert!(report.flags.projective_collineation);
    }

    #[test]
    fn classify_conformal_but_not_homothetic() {
        // holomorphic z² field: conformal with ψ = 2 x0, not constant
        let m = metric("euclidean2");
        let samples = sample_base_points(&m, &SampleSpec::for_metric(&m, 3, 16)).unwrap();
        let y = vf(&["x0^2 - x1^2", "2*x0*x1"]);
        let report = classify_vector_field(&m, &y, &samples, CLASSIFY_TOL).unwrap();
        assert!(!report.flags.killing);
        assert!(report.flags.conformal_killing);
        assert!(!report.flags.homothetic);
    }

    #[test]
    fn classify_requires_two_points() {
        let m = metric("euclidean2");
        assert!(matches!(
            classify_vector_field(&m, &vf(&["1", "0"]), &[vec![0.0, 0.0]], CLASSIFY_TOL),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn flags_are_monotone_under_adding_sample_points() {
        // a flag set on a superset of points must also be set on any subset
        let m = metric("sphere2");
        let all = sample_base_points(&m, &SampleSpec::for_metric(&m, 19, 24)).unwrap();
        for y in [vf(&["0", "1"]), vf(&["x0", "0"]), vf(&["x0*x1", "cos(x0)"])] {
            let full = classify_vector_field(&m, &y, &all, CLASSIFY_TOL).unwrap();
            let sub = classify_vector_field(&m, &y, &all[..8], CLASSIFY_TOL).unwrap();
            let pairs = [
                (full.flags.killing, sub.flags.killing),
                (full.flags.conformal_killing, sub.flags.conformal_killing),
                (full.flags.homothetic, sub.flags.homothetic),
                (full.flags.affine_collineation, sub.flags.affine_collineation),
                (
                    full.flags.projective_collineation,
                    sub.flags.projective_collineation,
                ),
            ];
            for (superset, subset) in pairs {
                assert!(!superset || subset, "flag set on superset but not subset");
            }
        }
    }

    #[test]
    fn coincidence_flat_dilation_and_rotation() {
        let m = metric("euclidean2");
        let pts = sample_phase_points(&m, &SampleSpec::for_metric(&m, 17, 24)).unwrap();

        // dilation: bivector part of ∇Y vanishes, matter lift is horizontal,
        // dynamical with ψ = 1
        let report = coincidence_check(&m, &vf(&["x0", "x1"]), &pts, 1e-8).unwrap();
        assert!(report.homothetic);
        assert!(report.dynamical);
        assert!(report.consistent);
        assert!((report.psi_hat_mean - 1.0).abs() < 1e-10);

        // rotation: matter lift is the complete lift, Lie symmetry (ψ = 0)
        let report = coincidence_check(&m, &vf(&["-x1", "x0"]), &pts, 1e-8).unwrap();
        assert!(report.homothetic);
        assert!(report.dynamical);
        assert!(report.consistent);
        assert!(report.psi_hat_mean.abs() < 1e-10);
    }

    #[test]
    fn coincidence_fails_for_non_homothetic_field() {
        let m = metric("sphere2");
        let pts = sample_phase_points(&m, &SampleSpec::for_metric(&m, 29, 24)).unwrap();
        let report = coincidence_check(&m, &vf(&["x0", "0"]), &pts, 1e-8).unwrap();
        assert!(!report.homothetic);
        assert!(!report.dynamical);
        assert!(report.consistent);
        assert!(report.max_dynamical_residual > 1e-3);
        assert!(report.worst_point.is_some());
    }
}
