//! Points and vector fields on the tangent bundle.
//!
//! Bundle coordinates are `ξ^I = (x^a, p^b)`, I = 0..2n. Fields are stored
//! with analytic phase-space derivatives assembled from jets of their
//! defining base fields, so the Lie bracket below has no truncation error;
//! finite differences appear only in tests as an independent crosscheck.
//!
//! The connection basis is `H_a = ∂/∂x^a − Γ^b_ca p^c ∂/∂p^b`,
//! `V_a = ∂/∂p^a`; a field X = h^a H_a + v^a V_a has coordinate components
//! `X^a = h^a`, `P^a = v^a − Γ^a_bc p^b h^c`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{GeometryPoint, MetricSpec, Tensor2Field, VectorFieldSpec};
use crate::tensor::max_abs;

/// A point (x, p) of the tangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Self {
        PhasePoint { x, p }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Coordinate-basis components of a bundle field at a point, together with
/// all first derivatives with respect to the 2n phase coordinates.
#[derive(Debug, Clone)]
pub struct PhaseJet {
    /// (X^0..X^{n-1}, P^0..P^{n-1})
    pub comps: Vec<f64>,
    /// Row-major (2n)x(2n): `derivs[i * 2n + j] = ∂ comps[i] / ∂ ξ^j`.
    pub derivs: Vec<f64>,
}

impl PhaseJet {
    fn zeros(two_n: usize) -> Self {
        PhaseJet {
            comps: vec![0.0; two_n],
            derivs: vec![0.0; two_n * two_n],
        }
    }

    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        self.derivs[i * self.comps.len() + j]
    }

    fn set_deriv(&mut self, i: usize, j: usize, v: f64) {
        let m = self.comps.len();
        self.derivs[i * m + j] = v;
    }
}

#[derive(Debug, Clone)]
enum FieldKind {
    HorizontalBasis(usize),
    VerticalBasis(usize),
    Spray,
    /// Y^a H_a + (A^a_b p^b + k^a) V_a
    Affine {
        y: VectorFieldSpec,
        a: Tensor2Field,
        k: VectorFieldSpec,
    },
    Combination(Vec<(f64, BundleField)>),
}

/// A vector field on the tangent bundle. Immutable after construction;
/// evaluation is pure.
#[derive(Debug, Clone)]
pub struct BundleField {
    metric: Arc<MetricSpec>,
    kind: FieldKind,
}

impl BundleField {
    pub fn horizontal_basis(metric: Arc<MetricSpec>, a: usize) -> Self {
        BundleField {
            metric,
            kind: FieldKind::HorizontalBasis(a),
        }
    }

    pub fn vertical_basis(metric: Arc<MetricSpec>, a: usize) -> Self {
        BundleField {
            metric,
            kind: FieldKind::VerticalBasis(a),
        }
    }

    /// The geodesic spray p^a H_a.
    pub fn spray(metric: Arc<MetricSpec>) -> Self {
        BundleField {
            metric,
            kind: FieldKind::Spray,
        }
    }

    /// The field Y^a H_a + (A^a_b p^b + k^a) V_a.
    pub fn affine(
        metric: Arc<MetricSpec>,
        y: VectorFieldSpec,
        a: Tensor2Field,
        k: VectorFieldSpec,
    ) -> Self {
        BundleField {
            metric,
            kind: FieldKind::Affine { y, a, k },
        }
    }

    /// Pointwise linear combination of fields on the same metric.
    pub fn combination(terms: Vec<(f64, BundleField)>) -> Result<Self> {
        let metric = terms
            .first()
            .map(|(_, f)| f.metric.clone())
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        Ok(BundleField {
            metric,
            kind: FieldKind::Combination(terms),
        })
    }

    pub fn metric(&self) -> &Arc<MetricSpec> {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Coordinate-basis components (X^a, P^a) at a phase point.
    pub fn value(&self, pt: &PhasePoint) -> Result<Vec<f64>> {
        Ok(self.jet(pt)?.comps)
    }

    /// Components and exact first derivatives at a phase point.
    pub fn jet(&self, pt: &PhasePoint) -> Result<PhaseJet> {
        let geo = self.metric.geometry_at(&pt.x)?;
        self.jet_at(&geo, pt)
    }

    fn jet_at(&self, geo: &GeometryPoint, pt: &PhasePoint) -> Result<PhaseJet> {
        let n = self.dim();
        if pt.x.len() != n || pt.p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: pt.x.len().max(pt.p.len()),
            });
        }
        let two_n = 2 * n;
        let p = &pt.p;
        let mut jet = PhaseJet::zeros(two_n);
        match &self.kind {
            FieldKind::VerticalBasis(i) => {
                jet.comps[n + i] = 1.0;
            }
            FieldKind::HorizontalBasis(i) => {
                jet.comps[*i] = 1.0;
                for a in 0..n {
                    let mut s = 0.0;
                    for c in 0..n {
                        s -= geo.gamma[(a, c, *i)] * p[c];
                    }
                    jet.comps[n + a] = s;
                    for e in 0..n {
                        let mut dx = 0.0;
                        for c in 0..n {
                            dx -= geo.dgamma[(a, c, *i, e)] * p[c];
                        }
                        jet.set_deriv(n + a, e, dx);
                        jet.set_deriv(n + a, n + e, -geo.gamma[(a, e, *i)]);
                    }
                }
            }
            FieldKind::Spray => {
                for a in 0..n {
                    jet.comps[a] = p[a];
                    jet.set_deriv(a, n + a, 1.0);
                    let mut s = 0.0;
                    for b in 0..n {
                        for c in 0..n {
                            s -= geo.gamma[(a, b, c)] * p[b] * p[c];
                        }
                    }
                    jet.comps[n + a] = s;
                    for e in 0..n {
                        let mut dx = 0.0;
                        for b in 0..n {
                            for c in 0..n {
                                dx -= geo.dgamma[(a, b, c, e)] * p[b] * p[c];
                            }
                        }
                        jet.set_deriv(n + a, e, dx);
                        let mut dp = 0.0;
                        for b in 0..n {
                            dp -= 2.0 * geo.gamma[(a, e, b)] * p[b];
                        }
                        jet.set_deriv(n + a, n + e, dp);
                    }
                }
            }
            FieldKind::Affine { y, a, k } => {
                let y_jets = y.eval_jets(&pt.x)?;
                let k_jets = k.eval_jets(&pt.x)?;
                let (a_val, a_part) = a.value_and_partials(geo)?;
                for i in 0..n {
                    jet.comps[i] = y_jets[i].value;
                    for e in 0..n {
                        jet.set_deriv(i, e, y_jets[i].grad(e));
                    }
                }
                for i in 0..n {
                    // P^i = A^i_b p^b + k^i − Γ^i_bc p^b Y^c
                    let mut s = k_jets[i].value;
                    for b in 0..n {
                        s += a_val[(i, b)] * p[b];
                        for c in 0..n {
                            s -= geo.gamma[(i, b, c)] * p[b] * y_jets[c].value;
                        }
                    }
                    jet.comps[n + i] = s;
                    for e in 0..n {
                        let mut dx = k_jets[i].grad(e);
                        for b in 0..n {
                            dx += a_part[(i, b, e)] * p[b];
                            for c in 0..n {
                                dx -= geo.dgamma[(i, b, c, e)] * p[b] * y_jets[c].value
                                    + geo.gamma[(i, b, c)] * p[b] * y_jets[c].grad(e);
                            }
                        }
                        jet.set_deriv(n + i, e, dx);
                        let mut dp = a_val[(i, e)];
                        for c in 0..n {
                            dp -= geo.gamma[(i, e, c)] * y_jets[c].value;
                        }
                        jet.set_deriv(n + i, n + e, dp);
                    }
                }
            }
            FieldKind::Combination(terms) => {
                for (weight, field) in terms {
                    let term = field.jet_at(geo, pt)?;
                    for i in 0..two_n {
                        jet.comps[i] += weight * term.comps[i];
                        for j in 0..two_n {
                            let v = jet.deriv(i, j) + weight * term.deriv(i, j);
                            jet.set_deriv(i, j, v);
                        }
                    }
                }
            }
        }
        Ok(jet)
    }

    /// Connection-basis components (h^a, v^a) at a phase point.
    pub fn connection_components(&self, pt: &PhasePoint) -> Result<(Vec<f64>, Vec<f64>)> {
        match &self.kind {
            FieldKind::Affine { y, a, k } => {
                // native form: h = Y, v = A p + k
                let geo = self.metric.geometry_at(&pt.x)?;
                let n = self.dim();
                let h = y.eval(&pt.x)?;
                let a_val = a.value(&geo)?;
                let kv = k.eval(&pt.x)?;
                let mut v = vec![0.0; n];
                for i in 0..n {
                    v[i] = kv[i];
                    for b in 0..n {
                        v[i] += a_val[(i, b)] * pt.p[b];
                    }
                }
                Ok((h, v))
            }
            _ => {
                let comps = self.value(pt)?;
                let n = self.dim();
                to_connection_basis(&self.metric, &comps[..n], &comps[n..], pt)
            }
        }
    }
}

/// Convert coordinate-basis components (X^a, P^a) to connection-basis
/// components: h = X, v^a = P^a + Γ^a_bc p^b X^c.
pub fn to_connection_basis(
    m: &MetricSpec,
    x_comps: &[f64],
    p_comps: &[f64],
    pt: &PhasePoint,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let geo = m.geometry_at(&pt.x)?;
    let n = m.dim();
    let h = x_comps.to_vec();
    let mut v = p_comps.to_vec();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                v[a] += geo.gamma[(a, b, c)] * pt.p[b] * x_comps[c];
            }
        }
    }
    Ok((h, v))
}

/// Convert connection-basis components (h^a, v^a) to coordinate-basis
/// components: X = h, P^a = v^a − Γ^a_bc p^b h^c.
pub fn to_coordinate_basis(
    m: &MetricSpec,
    h: &[f64],
    v: &[f64],
    pt: &PhasePoint,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let geo = m.geometry_at(&pt.x)?;
    let n = m.dim();
    let x_comps = h.to_vec();
    let mut p_comps = v.to_vec();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                p_comps[a] -= geo.gamma[(a, b, c)] * pt.p[b] * h[c];
            }
        }
    }
    Ok((x_comps, p_comps))
}

/// Coordinate-basis value of the geodesic spray at a phase point:
/// (p^a, −Γ^a_bc p^b p^c).
pub fn spray_at(m: &MetricSpec, pt: &PhasePoint) -> Result<Vec<f64>> {
    let geo = m.geometry_at(&pt.x)?;
    let n = m.dim();
    let mut out = vec![0.0; 2 * n];
    out[..n].copy_from_slice(&pt.p);
    for a in 0..n {
        let mut s = 0.0;
        for b in 0..n {
            for c in 0..n {
                s -= geo.gamma[(a, b, c)] * pt.p[b] * pt.p[c];
            }
        }
        out[n + a] = s;
    }
    Ok(out)
}

/// Lie bracket of two bundle fields at a point, in the coordinate basis:
/// `[F,G]^I = F^J ∂_J G^I − G^J ∂_J F^I`, with exact derivatives.
pub fn lie_bracket_numeric(f: &BundleField, g: &BundleField, pt: &PhasePoint) -> Result<Vec<f64>> {
    let jf = f.jet(pt)?;
    let jg = g.jet(pt)?;
    let two_n = jf.comps.len();
    if jg.comps.len() != two_n {
        return Err(Error::DimensionMismatch {
            expected: two_n,
            got: jg.comps.len(),
        });
    }
    let mut out = vec![0.0; two_n];
    for i in 0..two_n {
        let mut s = 0.0;
        for j in 0..two_n {
            s += jf.comps[j] * jg.deriv(i, j) - jg.comps[j] * jf.deriv(i, j);
        }
        out[i] = s;
    }
    Ok(out)
}

/// Max-abs residuals of the three basis bracket identities at one point:
/// `[V_a,V_b] = 0`, `[H_a,V_b] = Γ^c_ab V_c`, `[H_a,H_b] = −R^d_cab p^c V_d`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BasisBracketReport {
    pub vertical_vertical: f64,
    pub horizontal_vertical: f64,
    pub horizontal_horizontal: f64,
}

impl BasisBracketReport {
    pub fn max(&self) -> f64 {
        self.vertical_vertical
            .max(self.horizontal_vertical)
            .max(self.horizontal_horizontal)
    }
}

pub fn verify_basis_brackets(m: &Arc<MetricSpec>, pt: &PhasePoint) -> Result<BasisBracketReport> {
    let n = m.dim();
    let geo = m.geometry_at(&pt.x)?;
    let h: Vec<_> = (0..n)
        .map(|a| BundleField::horizontal_basis(m.clone(), a))
        .collect();
    let v: Vec<_> = (0..n)
        .map(|a| BundleField::vertical_basis(m.clone(), a))
        .collect();

    let mut vv: f64 = 0.0;
    let mut hv: f64 = 0.0;
    let mut hh: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let bracket = lie_bracket_numeric(&v[a], &v[b], pt)?;
            vv = vv.max(max_abs(&bracket));

            let mut residual = lie_bracket_numeric(&h[a], &v[b], pt)?;
            for c in 0..n {
                residual[n + c] -= geo.gamma[(c, a, b)];
            }
            hv = hv.max(max_abs(&residual));

            let mut residual = lie_bracket_numeric(&h[a], &h[b], pt)?;
            for d in 0..n {
                let mut expected = 0.0;
                for c in 0..n {
                    expected -= geo.riemann[(d, c, a, b)] * pt.p[c];
                }
                residual[n + d] -= expected;
            }
            hh = hh.max(max_abs(&residual));
        }
    }
    Ok(BasisBracketReport {
        vertical_vertical: vv,
        horizontal_vertical: hv,
        horizontal_horizontal: hh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::expr::Params;
    use crate::geometry::Tensor2FieldSpec;
    use std::f64::consts::FRAC_PI_4;

    fn metric(name: &str) -> Arc<MetricSpec> {
        Arc::new(catalog::build(name, &Params::new()).unwrap())
    }

    fn vf(comps: &[&str]) -> VectorFieldSpec {
        VectorFieldSpec::parse(comps, &Params::new()).unwrap()
    }

    #[test]
    fn connection_basis_conversion_on_flat_space_is_identity() {
        let m = metric("euclidean2");
        let pt = PhasePoint::new(vec![0.3, 0.4], vec![1.0, -2.0]);
        let (h, v) = to_connection_basis(&m, &[1.0, 2.0], &[3.0, 4.0], &pt).unwrap();
        assert_eq!(h, vec![1.0, 2.0]);
        assert_eq!(v, vec![3.0, 4.0]);
    }

    #[test]
    fn connection_basis_conversion_sphere_example() {
        let m = metric("sphere2");
        let pt = PhasePoint::new(vec![FRAC_PI_4, 0.0], vec![1.0, 2.0]);
        // X = (1, 0), P = 0: v^a = Γ^a_bθ p^b gives v = (0, 2) at θ = π/4
        let (h, v) = to_connection_basis(&m, &[1.0, 0.0], &[0.0, 0.0], &pt).unwrap();
        assert_eq!(h, vec![1.0, 0.0]);
        assert!((v[0] - 0.0).abs() < 1e-14);
        assert!((v[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn basis_conversions_are_mutually_inverse() {
        let m = metric("sphere2");
        let pt = PhasePoint::new(vec![1.1, 0.7], vec![0.4, -1.3]);
        let x_comps = [0.2, -0.9];
        let p_comps = [1.5, 0.3];
        let (h, v) = to_connection_basis(&m, &x_comps, &p_comps, &pt).unwrap();
        let (x2, p2) = to_coordinate_basis(&m, &h, &v, &pt).unwrap();
        for i in 0..2 {
            assert!((x2[i] - x_comps[i]).abs() < 1e-13);
            assert!((p2[i] - p_comps[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn spray_values() {
        let m = metric("euclidean2");
        let pt = PhasePoint::new(vec![0.0, 0.0], vec![1.0, 2.0]);
        assert_eq!(spray_at(&m, &pt).unwrap(), vec![1.0, 2.0, 0.0, 0.0]);

        let m = metric("sphere2");
        let pt = PhasePoint::new(vec![FRAC_PI_4, 0.0], vec![1.0, 2.0]);
        let s = spray_at(&m, &pt).unwrap();
        // vertical part: −Γ^θ_φφ (p^φ)² = 2, −2Γ^φ_θφ p^θ p^φ = −4
        assert_eq!(&s[..2], &[1.0, 2.0]);
        assert!((s[2] - 2.0).abs() < 1e-13);
        assert!((s[3] + 4.0).abs() < 1e-13);

        let pt = PhasePoint::new(vec![FRAC_PI_4, 0.0], vec![0.0, 0.0]);
        assert_eq!(spray_at(&m, &pt).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn bracket_of_field_with_itself_vanishes() {
        let m = metric("sphere2");
        let f = BundleField::affine(
            m.clone(),
            vf(&["x0", "sin(x1)"]),
            Tensor2Field::identity(2),
            vf(&["1", "x0"]),
        );
        let pt = PhasePoint::new(vec![1.2, 0.4], vec![0.5, -0.7]);
        let b = lie_bracket_numeric(&f, &f, &pt).unwrap();
        assert_eq!(max_abs(&b), 0.0);
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear() {
        let m = metric("sphere2");
        let f = BundleField::affine(
            m.clone(),
            vf(&["x0*x1", "1"]),
            Tensor2Field::grad_of(vf(&["sin(x0)", "x1"])),
            vf(&["0", "x0"]),
        );
        let g = BundleField::spray(m.clone());
        let h = BundleField::horizontal_basis(m.clone(), 1);
        let pt = PhasePoint::new(vec![0.9, 2.0], vec![-0.3, 0.8]);

        let fg = lie_bracket_numeric(&f, &g, &pt).unwrap();
        let gf = lie_bracket_numeric(&g, &f, &pt).unwrap();
        for i in 0..4 {
            assert_eq!(fg[i].to_bits(), (-gf[i]).to_bits());
        }

        let combo =
            BundleField::combination(vec![(2.5, f.clone()), (-1.25, h.clone())]).unwrap();
        let lhs = lie_bracket_numeric(&combo, &g, &pt).unwrap();
        let fh = lie_bracket_numeric(&h, &g, &pt).unwrap();
        for i in 0..4 {
            let rhs = 2.5 * fg[i] - 1.25 * fh[i];
            assert!((lhs[i] - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn euler_bracket_with_spray_reproduces_spray() {
        for name in ["euclidean2", "sphere2", "schwarzschild"] {
            let m = metric(name);
            let n = m.dim();
            let euler = BundleField::affine(
                m.clone(),
                VectorFieldSpec::zero(n),
                Tensor2Field::identity(n),
                VectorFieldSpec::zero(n),
            );
            let spray = BundleField::spray(m.clone());
            let mut x = vec![0.5; n];
            if name == "schwarzschild" {
                x = vec![0.0, 4.5, 1.3, 0.2];
            }
            let pt = PhasePoint::new(x, (0..n).map(|i| 0.3 + 0.4 * i as f64).collect());
            let bracket = lie_bracket_numeric(&euler, &spray, &pt).unwrap();
            let expected = spray.value(&pt).unwrap();
            for i in 0..2 * n {
                assert!(
                    (bracket[i] - expected[i]).abs() < 1e-12 * (1.0 + expected[i].abs()),
                    "{name} component {i}"
                );
            }
        }
    }

    #[test]
    fn constant_vertical_fields_commute() {
        let m = metric("sphere2");
        let pt = PhasePoint::new(vec![1.0, 1.0], vec![2.0, 3.0]);
        for a in 0..2 {
            for b in 0..2 {
                let va = BundleField::vertical_basis(m.clone(), a);
                let vb = BundleField::vertical_basis(m.clone(), b);
                assert_eq!(max_abs(&lie_bracket_numeric(&va, &vb, &pt).unwrap()), 0.0);
            }
        }
    }

    #[test]
    fn basis_brackets_flat_are_exact() {
        let m = metric("euclidean2");
        let pt = PhasePoint::new(vec![0.1, 0.2], vec![1.0, -1.0]);
        let report = verify_basis_brackets(&m, &pt).unwrap();
        assert_eq!(report.max(), 0.0);
    }

    #[test]
    fn basis_brackets_sphere_identity_values() {
        let m = metric("sphere2");
        let pt = PhasePoint::new(vec![FRAC_PI_4, 0.0], vec![1.0, 2.0]);
        // [H_θ, V_φ] = Γ^c_θφ V_c = 1.0 · V_φ at θ = π/4
        let h0 = BundleField::horizontal_basis(m.clone(), 0);
        let v1 = BundleField::vertical_basis(m.clone(), 1);
        let b = lie_bracket_numeric(&h0, &v1, &pt).unwrap();
        assert!((b[0]).abs() < 1e-14);
        assert!((b[1]).abs() < 1e-14);
        assert!((b[2]).abs() < 1e-14);
        assert!((b[3] - 1.0).abs() < 1e-14);

        let report = verify_basis_brackets(&m, &pt).unwrap();
        assert!(report.max() < 1e-10, "residuals {report:?}");
    }

    #[test]
    fn exact_bracket_matches_finite_difference_bracket() {
        let m = metric("sphere2");
        let f = BundleField::affine(
            m.clone(),
            vf(&["x0*x1", "cos(x0)"]),
            Tensor2Field::grad_of(vf(&["sin(x1)", "x0^2"])),
            vf(&["x1", "1"]),
        );
        let g = BundleField::spray(m.clone());
        let pt = PhasePoint::new(vec![1.2, 0.8], vec![0.6, -0.4]);
        let exact = lie_bracket_numeric(&f, &g, &pt).unwrap();

        // independent route: central differences of the component functions
        let h = 1e-6;
        let eval = |field: &BundleField, pt: &PhasePoint| field.value(pt).unwrap();
        let mut fd = [0.0; 4];
        for j in 0..4 {
            let shift = |sign: f64| {
                let mut x = pt.x.clone();
                let mut p = pt.p.clone();
                if j < 2 {
                    x[j] += sign * h;
                } else {
                    p[j - 2] += sign * h;
                }
                PhasePoint::new(x, p)
            };
            let ptp = shift(1.0);
            let ptm = shift(-1.0);
            let (gp, gm) = (eval(&g, &ptp), eval(&g, &ptm));
            let (fp, fm) = (eval(&f, &ptp), eval(&f, &ptm));
            let fj = eval(&f, &pt)[j];
            let gj = eval(&g, &pt)[j];
            for i in 0..4 {
                fd[i] += fj * (gp[i] - gm[i]) / (2.0 * h) - gj * (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        for i in 0..4 {
            assert!(
                (exact[i] - fd[i]).abs() < 1e-7 * (1.0 + exact[i].abs()),
                "component {i}: exact {} vs fd {}",
                exact[i],
                fd[i]
            );
        }
    }

    #[test]
    fn affine_field_connection_components_match_definition() {
        let m = metric("sphere2");
        let y = vf(&["x0", "x1^2"]);
        let a_spec = Tensor2FieldSpec::parse(2, &["x0", "1", "0", "x1"], &Params::new()).unwrap();
        let k = vf(&["1", "x0*x1"]);
        let field = BundleField::affine(
            m.clone(),
            y.clone(),
            Tensor2Field::expressions(a_spec.clone()),
            k.clone(),
        );
        let pt = PhasePoint::new(vec![0.8, 1.4], vec![0.2, 0.9]);
        let (h, v) = field.connection_components(&pt).unwrap();
        // h = Y, v = A p + k exactly
        let yv = y.eval(&pt.x).unwrap();
        let av = a_spec.eval(&pt.x).unwrap();
        let kv = k.eval(&pt.x).unwrap();
        for i in 0..2 {
            assert_eq!(h[i], yv[i]);
            let expect = av[(i, 0)] * pt.p[0] + av[(i, 1)] * pt.p[1] + kv[i];
            assert!((v[i] - expect).abs() < 1e-15);
        }
        // and the coordinate components agree with the conversion identity
        let comps = field.value(&pt).unwrap();
        let (x2, p2) = to_coordinate_basis(&m, &h, &v, &pt).unwrap();
        for i in 0..2 {
            assert!((comps[i] - x2[i]).abs() < 1e-14);
            assert!((comps[2 + i] - p2[i]).abs() < 1e-14);
        }
    }
}
