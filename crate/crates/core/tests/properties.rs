//! Cross-module invariants: Jacobi identity for lift-generated fields,
//! fibre-constancy of the recovered rescaling, and the implication from the
//! pointwise symmetry conditions to the bracket condition.

#![allow(clippy::needless_range_loop)]

use std::sync::Arc;

use atlift::bundle::{lie_bracket_numeric, BundleField, PhasePoint};
use atlift::catalog;
use atlift::expr::Params;
use atlift::geometry::{MetricSpec, ScalarFieldSpec, VectorFieldSpec};
use atlift::lifts::{complete_lift, dynamical_atl};
use atlift::sample::{random_atl, rng_from_seed, sample_phase_points, SampleSpec};
use atlift::symmetry::{atl_dynamical_conditions, dynamical_residual};

fn metric(name: &str) -> Arc<MetricSpec> {
    Arc::new(catalog::build(name, &Params::new()).unwrap())
}

/// Value of [G, H] at an arbitrary phase point (exact).
fn bracket_value(g: &BundleField, h: &BundleField, pt: &PhasePoint) -> Vec<f64> {
    lie_bracket_numeric(g, h, pt).unwrap()
}

/// [F, [G, H]] with the outer derivative taken by 4th-order central
/// differences of the exact inner-bracket values. Independent of the jet
/// machinery for the outer layer.
fn outer_bracket_fd(
    f: &BundleField,
    g: &BundleField,
    h: &BundleField,
    pt: &PhasePoint,
    step: f64,
) -> Vec<f64> {
    let n = pt.x.len();
    let two_n = 2 * n;
    let jf = f.jet(pt).unwrap();
    let w = bracket_value(g, h, pt);

    let shifted = |j: usize, delta: f64| {
        let mut x = pt.x.clone();
        let mut p = pt.p.clone();
        if j < n {
            x[j] += delta;
        } else {
            p[j - n] += delta;
        }
        PhasePoint::new(x, p)
    };

    let mut out = vec![0.0; two_n];
    for j in 0..two_n {
        let wp2 = bracket_value(g, h, &shifted(j, 2.0 * step));
        let wp1 = bracket_value(g, h, &shifted(j, step));
        let wm1 = bracket_value(g, h, &shifted(j, -step));
        let wm2 = bracket_value(g, h, &shifted(j, -2.0 * step));
        for i in 0..two_n {
            let dw = (-wp2[i] + 8.0 * wp1[i] - 8.0 * wm1[i] + wm2[i]) / (12.0 * step);
            out[i] += jf.comps[j] * dw;
        }
    }
    for i in 0..two_n {
        for j in 0..two_n {
            out[i] -= w[j] * jf.deriv(i, j);
        }
    }
    out
}

#[test]
fn jacobi_identity_for_lift_generated_fields() {
    for name in ["euclidean2", "sphere2"] {
        let m = metric(name);
        let mut rng = rng_from_seed(101);
        let pts = sample_phase_points(&m, &SampleSpec::for_metric(&m, 101, 4)).unwrap();
        for _ in 0..5 {
            let f = random_atl(&mut rng, &m, 0.6).induced_field(&m);
            let g = random_atl(&mut rng, &m, 0.6).induced_field(&m);
            let h = random_atl(&mut rng, &m, 0.6).induced_field(&m);
            for pt in &pts {
                let t1 = outer_bracket_fd(&f, &g, &h, pt, 1e-3);
                let t2 = outer_bracket_fd(&g, &h, &f, pt, 1e-3);
                let t3 = outer_bracket_fd(&h, &f, &g, pt, 1e-3);
                for i in 0..t1.len() {
                    let sum = t1[i] + t2[i] + t3[i];
                    assert!(
                        sum.abs() < 1e-9,
                        "{name}: Jacobi component {i} = {sum:.3e}"
                    );
                }
            }
        }
    }
}

#[test]
fn recovered_rescaling_is_constant_on_fibres() {
    // for a lift satisfying the symmetry condition, ψ depends only on x
    let m = metric("euclidean2");
    let y = VectorFieldSpec::parse(&["x0^2", "x0*x1"], &Params::new()).unwrap();
    let psi = ScalarFieldSpec::parse("2*x0", 2, &Params::new()).unwrap();
    let field = dynamical_atl(&m, y, psi).unwrap().induced_field(&m);

    let mut rng = rng_from_seed(55);
    for _ in 0..10 {
        let x = vec![
            rand::Rng::random::<f64>(&mut rng) * 2.0 - 1.0,
            rand::Rng::random::<f64>(&mut rng) * 2.0 - 1.0,
        ];
        let mut psis = Vec::new();
        for k in 0..8 {
            let p = vec![0.3 + 0.2 * k as f64, -1.0 + 0.25 * k as f64];
            let pt = PhasePoint::new(x.clone(), p);
            psis.push(dynamical_residual(&m, &field, &pt).unwrap().psi_hat);
        }
        let spread = psis.iter().fold(0.0f64, |acc, v| acc.max((v - psis[0]).abs()));
        assert!(spread < 1e-9, "fibre spread {spread:.3e} at {x:?}");
    }
}

#[test]
fn pointwise_conditions_imply_bracket_condition() {
    // sphere Killing field: conditions vanish with ψ = 0, so the bracket
    // residual must vanish at phase points over the same base points
    let m = metric("sphere2");
    let y = VectorFieldSpec::parse(
        &["sin(x1)", "cos(x1)*cos(x0)/sin(x0)"],
        &Params::new(),
    )
    .unwrap();
    let zero = ScalarFieldSpec::zero(2);
    let lift = complete_lift(&m, y).unwrap();
    let pts = sample_phase_points(&m, &SampleSpec::for_metric(&m, 77, 24)).unwrap();
    for pt in &pts {
        let cond = atl_dynamical_conditions(&m, &lift, &pt.x, &zero).unwrap();
        assert!(cond.max() < 1e-10, "conditions fail at {:?}: {cond:?}", pt.x);
    }
    let field = lift.induced_field(&m);
    for pt in &pts {
        let r = dynamical_residual(&m, &field, pt).unwrap();
        assert!(
            r.residual < 1e-9,
            "bracket residual {:.3e} at {:?}",
            r.residual,
            pt.x
        );
        assert!(r.psi_hat.abs() < 1e-9);
    }

    // flat projective field with ψ = 2 x0: same implication with rescaling
    let m = metric("euclidean2");
    let y = VectorFieldSpec::parse(&["x0^2", "x0*x1"], &Params::new()).unwrap();
    let psi = ScalarFieldSpec::parse("2*x0", 2, &Params::new()).unwrap();
    let lift = dynamical_atl(&m, y, psi.clone()).unwrap();
    let pts = sample_phase_points(&m, &SampleSpec::for_metric(&m, 78, 24)).unwrap();
    for pt in &pts {
        let cond = atl_dynamical_conditions(&m, &lift, &pt.x, &psi).unwrap();
        assert!(cond.max() < 1e-10);
    }
    let field = lift.induced_field(&m);
    for pt in &pts {
        let r = dynamical_residual(&m, &field, pt).unwrap();
        assert!(r.residual < 1e-9);
        let expected = psi.eval(&pt.x).unwrap();
        assert!((r.psi_hat - expected).abs() < 1e-8);
    }
}

#[test]
fn bracket_field_of_two_lifts_is_again_affine() {
    // the numeric bracket of two lift fields evaluated across a fibre is
    // affine in p: second differences across p vanish
    let m = metric("sphere2");
    let mut rng = rng_from_seed(13);
    let l1 = random_atl(&mut rng, &m, 0.7);
    let l2 = random_atl(&mut rng, &m, 0.7);
    let f1 = l1.induced_field(&m);
    let f2 = l2.induced_field(&m);
    let x = vec![1.2, 0.8];
    let value = |p: Vec<f64>| {
        lie_bracket_numeric(&f1, &f2, &PhasePoint::new(x.clone(), p)).unwrap()
    };
    let base = value(vec![0.2, -0.4]);
    let e0 = value(vec![1.2, -0.4]);
    let e1 = value(vec![0.2, 0.6]);
    let both = value(vec![1.2, 0.6]);
    for i in 0..base.len() {
        // mixed second difference of an affine function is zero
        let second = both[i] - e0[i] - e1[i] + base[i];
        assert!(second.abs() < 1e-10, "component {i}: {second:.3e}");
    }
}
