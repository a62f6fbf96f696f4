//! Panel quadrature rules: Gauss–Legendre for smooth panels, tanh-sinh for panels with
//! endpoint singularities.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

pub const GAUSS_ORDER: usize = 8;

const TS_STEP: f64 = 0.125;
const TS_LEVELS: usize = 32;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn gauss_legendre(order: usize) -> Rule {
    let g = GaussLegendre::new(order.try_into().expect("order >= 2"));
    let (nodes, weights) = g.iter().map(|(x, w)| (*x, *w)).unzip();
    Rule { nodes, weights }
}

pub(crate) fn gauss8() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

/// Tanh-sinh abscissae stored as distances from the nearest endpoint (`1 - |x|`) so
/// nodes next to a singular endpoint keep full relative precision.
struct TanhSinh {
    complements: Vec<f64>,
    weights: Vec<f64>,
}

fn tanh_sinh() -> &'static TanhSinh {
    static RULE: OnceLock<TanhSinh> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut complements = Vec::with_capacity(TS_LEVELS + 1);
        let mut weights = Vec::with_capacity(TS_LEVELS + 1);
        for k in 0..=TS_LEVELS {
            let s = k as f64 * TS_STEP;
            let u = FRAC_PI_2 * s.sinh();
            let c = 2.0 / ((2.0 * u).exp() + 1.0);
            let w = TS_STEP * FRAC_PI_2 * s.cosh() / u.cosh().powi(2);
            complements.push(c);
            weights.push(w);
        }
        TanhSinh { complements, weights }
    })
}

/// Tanh-sinh nodes and weights mapped to `(a, b)`. Nodes that round onto an endpoint are dropped.
pub fn tanh_sinh_on(a: f64, b: f64) -> Vec<(f64, f64)> {
    let ts = tanh_sinh();
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(2 * TS_LEVELS + 1);
    out.push((a + half, half * ts.weights[0]));
    for k in 1..=TS_LEVELS {
        let d = half * ts.complements[k];
        let w = half * ts.weights[k];
        let left = a + d;
        let right = b - d;
        if left > a && left < b {
            out.push((left, w));
        }
        if right < b && right > a {
            out.push((right, w));
        }
    }
    out
}

/// Gauss–Legendre nodes and weights on `(a, b)`.
pub fn gauss_on(a: f64, b: f64) -> Vec<(f64, f64)> {
    let r = gauss8();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    r.nodes.iter().zip(&r.weights).map(|(x, w)| (mid + half * x, half * w)).collect()
}

/// Composite Gauss rule on `(a, b)` with `m` equal sub-panels.
pub fn composite_gauss(a: f64, b: f64, m: usize) -> Vec<(f64, f64)> {
    let m = m.max(1);
    let h = (b - a) / m as f64;
    (0..m).flat_map(|k| gauss_on(a + k as f64 * h, a + (k + 1) as f64 * h)).collect()
}

pub(crate) fn rule_on(a: f64, b: f64, rough: bool) -> Vec<(f64, f64)> {
    if rough {
        tanh_sinh_on(a, b)
    } else {
        gauss_on(a, b)
    }
}
