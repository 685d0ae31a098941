//! Built-in manifold catalog, addressable by name. Parameters (such as the
//! Schwarzschild mass) have defaults and can be overridden when building.

use crate::error::{Error, Result};
use crate::expr::{parse_with_params, Params};
use crate::geometry::{DomainConstraint, MetricSpec};

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub dimension: usize,
    pub coords: &'static [&'static str],
    /// Upper triangle of g_ab, row-major: (0,0), (0,1), .., (1,1), (1,2), ..
    pub metric_upper: &'static [&'static str],
    /// Inequalities defining the admitted region; all must hold.
    pub domain: &'static [&'static str],
    pub params: &'static [(&'static str, f64)],
    /// Default per-coordinate sampling ranges for random admitted points.
    pub sample_box: &'static [(f64, f64)],
}

const TWO_PI: f64 = std::f64::consts::TAU;

static ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "euclidean2",
        description: "flat Euclidean plane, Cartesian coordinates",
        dimension: 2,
        coords: &["x", "y"],
        metric_upper: &["1", "0", "1"],
        domain: &[],
        params: &[],
        sample_box: &[(-2.0, 2.0), (-2.0, 2.0)],
    },
    CatalogEntry {
        name: "euclidean3",
        description: "flat Euclidean 3-space, Cartesian coordinates",
        dimension: 3,
        coords: &["x", "y", "z"],
        metric_upper: &["1", "0", "0", "1", "0", "1"],
        domain: &[],
        params: &[],
        sample_box: &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
    },
    CatalogEntry {
        name: "euclidean4",
        description: "flat Euclidean 4-space, Cartesian coordinates",
        dimension: 4,
        coords: &["x", "y", "z", "w"],
        metric_upper: &["1", "0", "0", "0", "1", "0", "0", "1", "0", "1"],
        domain: &[],
        params: &[],
        sample_box: &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
    },
    CatalogEntry {
        name: "euclidean-polar",
        description: "flat Euclidean plane in polar coordinates (r, phi)",
        dimension: 2,
        coords: &["r", "phi"],
        metric_upper: &["1", "0", "x0^2"],
        domain: &["x0 > 1e-6"],
        params: &[],
        sample_box: &[(0.5, 3.0), (0.0, TWO_PI)],
    },
    CatalogEntry {
        name: "sphere2",
        description: "unit 2-sphere, polar coordinates (theta, phi)",
        dimension: 2,
        coords: &["theta", "phi"],
        metric_upper: &["1", "0", "sin(x0)^2"],
        domain: &["sin(x0) > 1e-6"],
        params: &[],
        sample_box: &[(0.35, 2.79), (0.0, TWO_PI)],
    },
    CatalogEntry {
        name: "minkowski2",
        description: "2D Minkowski spacetime, signature (-, +)",
        dimension: 2,
        coords: &["t", "x"],
        metric_upper: &["-1", "0", "1"],
        domain: &[],
        params: &[],
        sample_box: &[(-2.0, 2.0), (-2.0, 2.0)],
    },
    CatalogEntry {
        name: "minkowski4",
        description: "4D Minkowski spacetime, signature (-, +, +, +)",
        dimension: 4,
        coords: &["t", "x", "y", "z"],
        metric_upper: &["-1", "0", "0", "0", "1", "0", "0", "1", "0", "1"],
        domain: &[],
        params: &[],
        sample_box: &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
    },
    CatalogEntry {
        name: "schwarzschild",
        description: "Schwarzschild exterior, coordinates (t, r, theta, phi), parameter M",
        dimension: 4,
        coords: &["t", "r", "theta", "phi"],
        metric_upper: &[
            "-(1 - 2*M/x1)",
            "0",
            "0",
            "0",
            "1/(1 - 2*M/x1)",
            "0",
            "0",
            "x1^2",
            "0",
            "x1^2*sin(x2)^2",
        ],
        domain: &["x1 > 2*M*1.000001"],
        params: &[("M", 1.0)],
        sample_box: &[(0.0, 1.0), (3.0, 10.0), (0.35, 2.79), (0.0, TWO_PI)],
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn find(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Build a metric from the catalog, applying parameter overrides.
pub fn build(name: &str, overrides: &Params) -> Result<MetricSpec> {
    let entry = find(name).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown manifold `{name}`; available: {}",
            ENTRIES
                .iter()
                .map(|e| e.name)
                .collect::<Vec<_>>()
                .join(", ")
        ))
    })?;

    let mut params = Params::new();
    for (key, value) in entry.params {
        params.insert((*key).to_string(), *value);
    }
    for (key, value) in overrides {
        if !params.contains_key(key) {
            return Err(Error::InvalidArgument(format!(
                "manifold `{name}` has no parameter `{key}`"
            )));
        }
        params.insert(key.clone(), *value);
    }

    let dim = entry.dimension;
    let g_upper = entry
        .metric_upper
        .iter()
        .map(|t| parse_with_params(t, dim, &params))
        .collect::<Result<Vec<_>>>()?;
    let domain = entry
        .domain
        .iter()
        .map(|t| DomainConstraint::parse(t, dim, &params))
        .collect::<Result<Vec<_>>>()?;
    let coords = entry.coords.iter().map(|c| (*c).to_string()).collect();

    Ok(MetricSpec::new(dim, coords, g_upper, domain)?
        .with_name(entry.name)
        .with_params(params)
        .with_sample_box(entry.sample_box.to_vec()))
}
