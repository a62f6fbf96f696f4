//! Hermitian forms of boundary data on `Δ ⊂ R`, assembled in the hat basis.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::hilbert::{hat_hilbert, hilbert_product};
use super::quadrature::{composite_gauss, rule_on, tanh_sinh_on};
use super::{BoundaryDataLine, IntervalSet};
use crate::error::{KappaError, Result};
use crate::linalg::{inertia, CMatrix, HermitianMatrix, Inertia};
use crate::C64;

pub const DEFAULT_SERIES_ORDER: usize = 256;
/// Series terms per panel needed to resolve the kinks of the hat basis.
const SERIES_PER_PANEL: usize = 32;
const ASSEMBLY_TOL: f64 = 1e-6;
const MIN_IMAG: f64 = 1e-9;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A certified line form: matrix on the given mesh plus the count after panel doubling.
#[derive(Debug, Clone)]
pub struct LineForm {
    pub matrix: HermitianMatrix,
    pub inertia: Inertia,
    pub refined_n_neg: usize,
    pub panels: usize,
}

fn certify<A>(set: &IntervalSet, tol: f64, assemble: A) -> Result<LineForm>
where
    A: Fn(&IntervalSet) -> Result<HermitianMatrix>,
{
    let matrix = assemble(set)?;
    certify_given(set, tol, matrix, assemble)
}

/// `A[p,q] = ∫ H_Δ(f φ_p) · conj(w) φ_q`, with `w ≡ 1` when absent.
fn hilbert_pairing(set: &IntervalSet, f: &BoundaryDataLine, w: Option<&BoundaryDataLine>) -> CMatrix {
    let n = set.dim();
    let mut a = CMatrix::zeros(n, n);
    for p in 0..n {
        let supp = set.hat_support(p);
        for g in 0..set.n_panels() {
            let (lo, hi) = set.panel(g);
            let near = set.distance_to_panels(lo, hi, &supp) < 0.5 * (hi - lo);
            let rough = near || w.is_some_and(|w| w.rough_on(set, g));
            let hats = set.panel_hats(g);
            for (t, wt) in rule_on(lo, hi, rough) {
                let mut v = hilbert_product(set, f, p, t) * wt;
                if let Some(w) = w {
                    v *= w.on_panel(set, g, t).conj();
                }
                for q in hats {
                    a[(p, q)] += v * set.hat_on_panel(q, g, t);
                }
            }
        }
    }
    a
}

/// `M[p,q] = ∫ f conj(w) φ_p φ_q`.
fn mass(set: &IntervalSet, f: &BoundaryDataLine, w: Option<&BoundaryDataLine>) -> CMatrix {
    let n = set.dim();
    let mut m = CMatrix::zeros(n, n);
    for g in 0..set.n_panels() {
        let (lo, hi) = set.panel(g);
        let rough = f.rough_on(set, g) || w.is_some_and(|w| w.rough_on(set, g));
        let hats = set.panel_hats(g);
        for (t, wt) in rule_on(lo, hi, rough) {
            let mut v = f.on_panel(set, g, t) * wt;
            if let Some(w) = w {
                v *= w.on_panel(set, g, t).conj();
            }
            for p in hats {
                for q in hats {
                    m[(p, q)] += v * set.hat_on_panel(p, g, t) * set.hat_on_panel(q, g, t);
                }
            }
        }
    }
    m
}

fn loewner_matrix(f0: &BoundaryDataLine, set: &IntervalSet) -> Result<HermitianMatrix> {
    let m = hilbert_pairing(set, f0, None) - mass(set, f0, None) * I;
    let l = (&m + m.adjoint()) * C64::new(PI, 0.0);
    Ok(HermitianMatrix::symmetrize(l))
}

fn loewner_real_matrix(f0: &BoundaryDataLine, set: &IntervalSet) -> Result<HermitianMatrix> {
    if !f0.is_real() {
        return Err(KappaError::InvalidInput("the divided-difference form needs real data".into()));
    }
    let n = set.dim();
    let np = set.n_panels();
    let rules: Vec<Vec<(f64, f64)>> = (0..np)
        .map(|g| {
            let (lo, hi) = set.panel(g);
            rule_on(lo, hi, f0.rough_on(set, g))
        })
        .collect();
    let values: Vec<Vec<f64>> =
        (0..np).map(|g| rules[g].iter().map(|&(t, _)| f0.on_panel(set, g, t).re).collect()).collect();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for g1 in 0..np {
        let h1 = set.panel_hats(g1);
        for g2 in 0..np {
            let h2 = set.panel_hats(g2);
            let mut blk = [[0.0; 2]; 2];
            for (i, &(s, ws)) in rules[g1].iter().enumerate() {
                let fs = values[g1][i];
                let ps = [set.hat_on_panel(h1[0], g1, s), set.hat_on_panel(h1[1], g1, s)];
                for (j, &(t, wt)) in rules[g2].iter().enumerate() {
                    let k = if g1 == g2 && i == j {
                        f0.slope_on_panel(set, g1, s).re
                    } else {
                        (fs - values[g2][j]) / (s - t)
                    };
                    let c = ws * wt * k;
                    let pt0 = set.hat_on_panel(h2[0], g2, t);
                    let pt1 = set.hat_on_panel(h2[1], g2, t);
                    blk[0][0] += c * ps[0] * pt0;
                    blk[0][1] += c * ps[0] * pt1;
                    blk[1][0] += c * ps[1] * pt0;
                    blk[1][1] += c * ps[1] * pt1;
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    l[(h1[a], h2[b])] += blk[a][b];
                }
            }
        }
    }
    let l = (&l + l.transpose()) * 0.5;
    Ok(HermitianMatrix::symmetrize(l.map(|v| C64::new(v, 0.0))))
}

fn dual_loewner_matrix(g0: &BoundaryDataLine, set: &IntervalSet) -> Result<HermitianMatrix> {
    if !g0.is_real() {
        return Err(KappaError::InvalidInput("the dual form needs real data".into()));
    }
    let n = set.dim();
    let pts: Vec<(usize, f64, f64)> = (0..set.n_panels())
        .flat_map(|g| {
            let (lo, hi) = set.panel(g);
            tanh_sinh_on(lo, hi).into_iter().map(move |(t, w)| (g, t, w))
        })
        .collect();
    let mut hmat = DMatrix::<f64>::zeros(pts.len(), n);
    let mut weights = Vec::with_capacity(pts.len());
    let mut l = DMatrix::<f64>::zeros(n, n);
    for (r, &(g, t, w)) in pts.iter().enumerate() {
        let gw = PI * w * g0.on_panel(set, g, t).re;
        weights.push(gw);
        for p in 0..n {
            hmat[(r, p)] = hat_hilbert(set, p, t);
        }
        let hats = set.panel_hats(g);
        for &p in &hats {
            for &q in &hats {
                l[(p, q)] += gw * set.hat_on_panel(p, g, t) * set.hat_on_panel(q, g, t);
            }
        }
    }
    let mut weighted = hmat.clone();
    for (r, w) in weights.iter().enumerate() {
        weighted.row_mut(r).scale_mut(*w);
    }
    l -= hmat.transpose() * weighted;
    let l = (&l + l.transpose()) * 0.5;
    Ok(HermitianMatrix::symmetrize(l.map(|v| C64::new(v, 0.0))))
}

/// `π⟨(H_Δ − i)(f₀φ_p), φ_q⟩ + π⟨φ_p, (H_Δ − i)(f₀φ_q)⟩`, certified under panel doubling.
pub fn loewner_form(f0: &BoundaryDataLine, set: &IntervalSet, tol: f64) -> Result<LineForm> {
    certify(set, tol, |s| loewner_matrix(f0, s))
}

/// `∫∫ (f₀(s) − f₀(t))/(s − t) φ_p(s) φ_q(t) ds dt` for real `f₀`; the diagonal of the
/// kernel is the local slope.
pub fn loewner_real_form(f0: &BoundaryDataLine, set: &IntervalSet, tol: f64) -> Result<LineForm> {
    certify(set, tol, |s| loewner_real_matrix(f0, s))
}

/// `π ∫_Δ [φ_p φ_q − (H_Δφ_p)(H_Δφ_q)] g₀ dt` for real bounded `g₀`.
pub fn dual_loewner_form(g0: &BoundaryDataLine, set: &IntervalSet, tol: f64) -> Result<LineForm> {
    certify(set, tol, |s| dual_loewner_matrix(g0, s))
}

/// `k(z) = (1/π) ∫_Δ g₀(t)/(t − z) dt`, exact for the panelwise-linear interpolant of `g₀`.
pub fn cauchy_transform(g0: &BoundaryDataLine, set: &IntervalSet, z: C64) -> Result<C64> {
    if !(z.im >= MIN_IMAG) {
        return Err(KappaError::EvaluationTooCloseToLine(z));
    }
    let mut s = C64::new(0.0, 0.0);
    for g in 0..set.n_panels() {
        let (a, b) = set.panel(g);
        let ga = g0.on_panel(set, g, a);
        let gb = g0.on_panel(set, g, b);
        let slope = (gb - ga) / (b - a);
        // t − z stays in the lower half-plane, so the principal log of the ratio is the
        // difference of logs.
        let log = ((b - z) / (a - z)).ln();
        s += (ga + slope * (z - a)) * log + slope * (b - a);
    }
    Ok(s / PI)
}

/// `L²(Δ)` distance between `Im k(x + iε)` and `g₀` on panel Gauss nodes. On `Δ` the
/// analytic correction `f` of the dual construction has real boundary values, so this is
/// the boundary defect of `h = k + f`.
pub fn dual_construction_defect(g0: &BoundaryDataLine, set: &IntervalSet, eps: f64) -> Result<f64> {
    let mut acc = 0.0;
    for g in 0..set.n_panels() {
        let (a, b) = set.panel(g);
        for (x, w) in composite_gauss(a, b, 1) {
            let k = cauchy_transform(g0, set, C64::new(x, eps))?;
            let d = k.im - g0.on_panel(set, g, x).re;
            acc += w * d * d;
        }
    }
    Ok(acc.sqrt())
}

/// Sub-panels so that `((t−i)/(t+i))^j`, `j ≤ jmax`, turns by at most two radians per sub-panel.
fn oscillation_split(a: f64, b: f64, jmax: usize) -> usize {
    let tmin = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
    let rate = 2.0 * jmax as f64 / (1.0 + tmin * tmin);
    ((b - a) * rate / 2.0).ceil().max(1.0) as usize
}

/// `⟨φ, e_j⟩` for `|j| ≤ jmax`, `e_j = π^{-1/2} ((t−i)/(t+i))^j/(t+i)`; entry `j + jmax`.
pub fn basis_coefficients<F: Fn(f64) -> C64>(set: &IntervalSet, phi: F, jmax: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 2 * jmax + 1];
    let scale = 1.0 / PI.sqrt();
    for g in 0..set.n_panels() {
        let (a, b) = set.panel(g);
        for (t, w) in composite_gauss(a, b, oscillation_split(a, b, jmax)) {
            let u = (t - I) / (t + I);
            let base = phi(t) * (w * scale) / (t - I);
            let uc = u.conj();
            let mut pos = base;
            let mut neg = base;
            out[jmax] += base;
            for j in 1..=jmax {
                pos *= uc;
                neg *= u;
                out[jmax + j] += pos;
                out[jmax - j] += neg;
            }
        }
    }
    out
}

/// `d_j(xφ_p) = ∫ ((t−i)/(t+i))^j x(t) φ_p(t)/(t+i) dt`, rows `p`, columns `j = 0..=jmax`.
fn series_coefficients(set: &IntervalSet, x: &BoundaryDataLine, jmax: usize) -> CMatrix {
    let mut d = CMatrix::zeros(set.dim(), jmax + 1);
    for g in 0..set.n_panels() {
        let (a, b) = set.panel(g);
        let hats = set.panel_hats(g);
        for (t, w) in composite_gauss(a, b, oscillation_split(a, b, jmax)) {
            let u = (t - I) / (t + I);
            let xv = x.on_panel(set, g, t) * w / (t + I);
            let v = [xv * set.hat_on_panel(hats[0], g, t), xv * set.hat_on_panel(hats[1], g, t)];
            let mut pw = C64::new(1.0, 0.0);
            for j in 0..=jmax {
                d[(hats[0], j)] += v[0] * pw;
                d[(hats[1], j)] += v[1] * pw;
                pw *= u;
            }
        }
    }
    d
}

/// Series order for `set`: the default, raised so that the hat kinks are resolved.
pub fn series_order(set: &IntervalSet) -> usize {
    DEFAULT_SERIES_ORDER.max(SERIES_PER_PANEL * set.panels_per_interval())
}

/// Both assemblies of the half-plane boundary form.
#[derive(Debug, Clone)]
pub struct HalfPlaneAssembly {
    /// Route (a): truncated coefficient series.
    pub series: CMatrix,
    /// Route (b): `π⟨Q₋(cφ_p), cφ_q⟩ − π⟨Q₋(bφ_p), bφ_q⟩`, `Q₋ = (I + iH)/2`.
    pub projection: HermitianMatrix,
    /// Largest entrywise disagreement over hats interior to `Δ`.
    pub mismatch: f64,
    /// Power-law estimate of the largest diagonal series tail beyond `jmax`.
    pub tail_estimate: f64,
}

fn projection_matrix(b: &BoundaryDataLine, c: &BoundaryDataLine, set: &IntervalSet) -> HermitianMatrix {
    let m = mass(set, c, Some(c)) + hilbert_pairing(set, c, Some(c)) * I
        - mass(set, b, Some(b))
        - hilbert_pairing(set, b, Some(b)) * I;
    HermitianMatrix::symmetrize(m * C64::new(0.5 * PI, 0.0))
}

pub fn halfplane_assembly(
    b: &BoundaryDataLine,
    c: &BoundaryDataLine,
    set: &IntervalSet,
    jmax: usize,
) -> Result<HalfPlaneAssembly> {
    let dc = series_coefficients(set, c, jmax);
    let db = series_coefficients(set, b, jmax);
    let series = &dc * dc.adjoint() - &db * db.adjoint();

    let projection = projection_matrix(b, c, set);

    let n = set.dim();
    let interior: Vec<usize> = (0..n).filter(|&p| !set.is_edge_hat(p)).collect();
    let mut mismatch: f64 = 0.0;
    for &p in &interior {
        for &q in &interior {
            mismatch = mismatch.max((series[(p, q)] - projection.matrix()[(p, q)]).norm());
        }
    }

    let mut tail_estimate: f64 = 0.0;
    if jmax >= 16 {
        // Fit `|d_j|² ~ j^{-α}` on the last two quarter blocks and sum the power tail.
        let q = jmax / 4;
        for &p in &interior {
            let term = |j: usize| dc[(p, j)].norm_sqr() + db[(p, j)].norm_sqr();
            let e1: f64 = (jmax - 2 * q + 1..=jmax - q).map(term).sum();
            let e2: f64 = (jmax - q + 1..=jmax).map(term).sum();
            if e2 == 0.0 {
                continue;
            }
            let alpha = (e1 / e2).ln() / (7.0f64 / 5.0).ln();
            let tail = if alpha > 1.0 { e2 / q as f64 * jmax as f64 / (alpha - 1.0) } else { f64::INFINITY };
            tail_estimate = tail_estimate.max(tail);
        }
    }
    Ok(HalfPlaneAssembly { series, projection, mismatch, tail_estimate })
}

#[derive(Debug, Clone)]
pub struct HalfPlaneForm {
    pub form: LineForm,
    pub mismatch: f64,
    pub tail_estimate: f64,
}

/// Boundary form of `b = S c` on `Δ`, assembled by the series and projection routes.
pub fn boundary_form_halfplane(
    b: &BoundaryDataLine,
    c: &BoundaryDataLine,
    set: &IntervalSet,
    jmax: usize,
    tol: f64,
) -> Result<HalfPlaneForm> {
    let asm = halfplane_assembly(b, c, set, jmax)?;
    if asm.mismatch > ASSEMBLY_TOL {
        return Err(KappaError::AssemblyMismatch(asm.mismatch));
    }
    let (mismatch, tail_estimate) = (asm.mismatch, asm.tail_estimate);
    let matrix = asm.projection;
    let form = certify_given(set, tol, matrix, |s| Ok(projection_matrix(b, c, s)))?;
    Ok(HalfPlaneForm { form, mismatch, tail_estimate })
}

fn certify_given<A>(set: &IntervalSet, tol: f64, matrix: HermitianMatrix, assemble: A) -> Result<LineForm>
where
    A: Fn(&IntervalSet) -> Result<HermitianMatrix>,
{
    let coarse = inertia(&matrix, tol);
    let refined_n_neg = inertia(&assemble(&set.refined())?, tol).n_neg;
    if refined_n_neg != coarse.n_neg {
        return Err(KappaError::TruncationUnstable { coarse: coarse.n_neg, fine: refined_n_neg });
    }
    Ok(LineForm { matrix, inertia: coarse, refined_n_neg, panels: set.panels_per_interval() })
}
