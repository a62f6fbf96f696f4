//! Finite Hilbert transform `(H_Δφ)(x) = (1/π) PV∫_Δ φ(t)/(t − x) dt`.
//!
//! On each panel the principal value is split as `g(x)·ln|(b−x)/(a−x)|` plus a regular
//! remainder. For linear pieces the remainder is the constant slope times the panel length.

use std::f64::consts::PI;

use log::warn;

use super::quadrature::{rule_on, tanh_sinh_on};
use super::{BoundaryDataLine, IntervalSet, PiecewiseLinearFunction};
use crate::error::{KappaError, Result};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ENDPOINT_NUDGE: f64 = 1e-12;

/// `ln|b − x| − ln|a − x|`, dropping a vanishing distance. At an interior node the dropped
/// terms of the two neighbouring panels cancel when the function is continuous there.
fn log_ratio(a: f64, b: f64, x: f64) -> f64 {
    let mut l = 0.0;
    if b != x {
        l += (b - x).abs().ln();
    }
    if a != x {
        l -= (a - x).abs().ln();
    }
    l
}

/// `PV∫_a^b g(t)/(t − x) dt` for `g` linear with `g(a) = ga`, `g(b) = gb`.
pub(crate) fn pv_linear(a: f64, b: f64, ga: C64, gb: C64, x: f64) -> C64 {
    let s = (gb - ga) / (b - a);
    let gx = ga + s * (x - a);
    gx * log_ratio(a, b, x) + s * (b - a)
}

/// `PV∫_a^b g(t)/(t − x) dt` for `g` analytic on the panel; `piece` evaluates its extension.
pub(crate) fn pv_panel<F: Fn(f64) -> C64>(a: f64, b: f64, x: f64, piece: F, rough: bool) -> C64 {
    let h = b - a;
    if (a - x).max(x - b) >= h {
        return rule_on(a, b, rough).iter().map(|&(t, w)| piece(t) * (w / (t - x))).sum();
    }
    let gx = piece(x);
    let rem = |lo: f64, hi: f64| -> C64 {
        rule_on(lo, hi, rough)
            .iter()
            .map(|&(t, w)| {
                let d = t - x;
                if d == 0.0 {
                    ZERO
                } else {
                    (piece(t) - gx) * (w / d)
                }
            })
            .sum()
    };
    let r = if rough && x > a && x < b { rem(a, x) + rem(x, b) } else { rem(a, b) };
    gx * log_ratio(a, b, x) + r
}

/// `H_Δ φ_p (x)` in closed form.
pub(crate) fn hat_hilbert(set: &IntervalSet, p: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for g in set.hat_support(p) {
        let (a, b) = set.panel(g);
        let ga = set.hat_on_panel(p, g, a);
        let gb = set.hat_on_panel(p, g, b);
        let slope = (gb - ga) / (b - a);
        s += (ga + slope * (x - a)) * log_ratio(a, b, x) + slope * (b - a);
    }
    s / PI
}

/// `H_Δ(f φ_p)(x)`.
pub(crate) fn hilbert_product(set: &IntervalSet, f: &BoundaryDataLine, p: usize, x: f64) -> C64 {
    let mut s = ZERO;
    for g in set.hat_support(p) {
        let (a, b) = set.panel(g);
        let rough = f.rough_on(set, g);
        s += pv_panel(a, b, x, |t| f.on_panel(set, g, t) * set.hat_on_panel(p, g, t), rough);
    }
    s / PI
}

fn nudge_off_endpoint(set: &IntervalSet, x: f64) -> f64 {
    for &(a, b) in set.intervals() {
        let d = ENDPOINT_NUDGE * x.abs().max(1.0);
        if x == a {
            warn!("evaluation point {x} is an endpoint of the interval set; moved inside by {d:e}");
            return x + d;
        }
        if x == b {
            warn!("evaluation point {x} is an endpoint of the interval set; moved inside by {d:e}");
            return x - d;
        }
    }
    x
}

fn pl_hilbert(phi: &PiecewiseLinearFunction, x: f64) -> C64 {
    let set = phi.set();
    let v = phi.values();
    let s: C64 = (0..set.n_panels())
        .map(|g| {
            let (a, b) = set.panel(g);
            let [l, r] = set.panel_hats(g);
            pv_linear(a, b, v[l], v[r], x)
        })
        .sum();
    s / PI
}

/// `H_Δφ` at the points `xs`, exact for piecewise-linear `φ` up to rounding.
///
/// A point on `∂Δ` where `φ` does not vanish is moved `1e-12` inside (with a warning);
/// the transform has a logarithmic singularity there.
pub fn finite_hilbert(set: &IntervalSet, phi: &PiecewiseLinearFunction, xs: &[f64]) -> Result<Vec<C64>> {
    if phi.set() != set {
        return Err(KappaError::DimensionMismatch("function is not defined on this interval set".into()));
    }
    Ok(xs
        .iter()
        .map(|&x| {
            let x = if set.is_endpoint(x) && phi.eval(x) != ZERO { nudge_off_endpoint(set, x) } else { x };
            pl_hilbert(phi, x)
        })
        .collect())
}

/// `H_Δu(x)` for a general callable `u`, by tanh-sinh panels with singularity subtraction.
/// `u` may have integrable singularities at panel nodes.
pub fn hilbert_of_fn<F: Fn(f64) -> C64>(set: &IntervalSet, u: F, x: f64) -> C64 {
    let ux = if set.locate(x).is_some() { u(x) } else { ZERO };
    let mut s = ZERO;
    for g in 0..set.n_panels() {
        let (a, b) = set.panel(g);
        if (a - x).max(x - b) >= b - a {
            s += tanh_sinh_on(a, b).iter().map(|&(t, w)| u(t) * (w / (t - x))).sum::<C64>();
            continue;
        }
        let rem = |lo: f64, hi: f64| -> C64 {
            tanh_sinh_on(lo, hi).iter().map(|&(t, w)| (u(t) - ux) * (w / (t - x))).sum()
        };
        s += ux * log_ratio(a, b, x);
        s += if x > a && x < b { rem(a, x) + rem(x, b) } else { rem(a, b) };
    }
    s / PI
}

/// `⟨u, v⟩ = ∫_Δ u v̄ dt` by tanh-sinh panels.
pub fn inner_product<U: Fn(f64) -> C64, V: Fn(f64) -> C64>(set: &IntervalSet, u: U, v: V) -> C64 {
    (0..set.n_panels())
        .flat_map(|g| {
            let (a, b) = set.panel(g);
            tanh_sinh_on(a, b)
        })
        .map(|(t, w)| u(t) * v(t).conj() * w)
        .sum()
}

/// Largest residual of `H_Δ[φ H_Δψ + (H_Δφ)ψ] = (H_Δφ)(H_Δψ) − φψ` over `points`.
pub fn convolution_residual(phi: &PiecewiseLinearFunction, psi: &PiecewiseLinearFunction, points: &[f64]) -> f64 {
    let set = phi.set();
    let u = |t: f64| phi.eval(t) * pl_hilbert(psi, t) + pl_hilbert(phi, t) * psi.eval(t);
    points
        .iter()
        .map(|&x| {
            let lhs = hilbert_of_fn(set, u, x);
            let rhs = pl_hilbert(phi, x) * pl_hilbert(psi, x) - phi.eval(x) * psi.eval(x);
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}
