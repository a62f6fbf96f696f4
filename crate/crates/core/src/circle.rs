//! Boundary data on the unit circle: FFT coefficients, `Q₋`, the boundary form, Hankel rank.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{KappaError, Result};
use crate::linalg::{inertia, CMatrix, HermitianMatrix, Inertia, INERTIA_TOL};
use crate::model_space::ModelSpace;
use crate::poly::ZERO;
use crate::rational::BlaschkeProduct;
use crate::C64;

pub const CIRCLE_GRID: usize = 4096;

/// Uniform grid `u_m = exp(2πim/N)` with a node subset representing `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    n: usize,
    mask: Vec<bool>,
    arcs: Vec<(f64, f64)>,
    /// `|σ(Δ) − (nodes in Δ)/N|` from snapping arc endpoints to nodes.
    pub snapping_error: f64,
}

impl CircleGrid {
    pub fn full(n: usize) -> Result<Self> {
        check_power_of_two(n)?;
        Ok(Self { n, mask: vec![true; n], arcs: vec![(0.0, 2.0 * PI)], snapping_error: 0.0 })
    }

    /// Closed arcs given as angle intervals `[θ₀, θ₁]` (radians, counterclockwise).
    pub fn arcs(n: usize, arcs: &[(f64, f64)]) -> Result<Self> {
        check_power_of_two(n)?;
        let mut norm = Vec::new();
        for &(a, b) in arcs {
            if !(a.is_finite() && b.is_finite()) || b <= a {
                return Err(KappaError::InvalidInput(format!("arc [{a}, {b}] is empty")));
            }
            if b - a >= 2.0 * PI {
                return Self::full(n);
            }
            let a0 = a.rem_euclid(2.0 * PI);
            norm.push((a0, a0 + (b - a)));
        }
        let mut mask = vec![false; n];
        let mut total = 0.0;
        for &(a, b) in &norm {
            total += b - a;
            for (m, slot) in mask.iter_mut().enumerate() {
                let th = 2.0 * PI * m as f64 / n as f64;
                let inside = (th >= a - 1e-12 && th <= b + 1e-12) || (th + 2.0 * PI >= a - 1e-12 && th + 2.0 * PI <= b + 1e-12);
                if inside {
                    if *slot {
                        return Err(KappaError::InvalidInput("arcs overlap".into()));
                    }
                    *slot = true;
                }
            }
        }
        let count = mask.iter().filter(|v| **v).count();
        let snapping_error = (count as f64 / n as f64 - total / (2.0 * PI)).abs();
        Ok(Self { n, mask, arcs: norm, snapping_error })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn node(&self, m: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * m as f64 / self.n as f64)
    }

    pub fn in_delta(&self, m: usize) -> bool {
        self.mask[m]
    }

    pub fn arc_list(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    /// `σ(Δ)` as node fraction.
    pub fn measure(&self) -> f64 {
        self.mask.iter().filter(|v| **v).count() as f64 / self.n as f64
    }

    /// Samples a function at every node (values outside `Δ` are still taken).
    pub fn sample<F: Fn(C64) -> C64>(&self, f: F) -> Vec<C64> {
        (0..self.n).map(|m| f(self.node(m))).collect()
    }

    /// Monomials `u^0..u^{k-1}` restricted to `Δ`.
    pub fn monomial_basis(&self, k: usize) -> Vec<Vec<C64>> {
        (0..k)
            .map(|p| (0..self.n).map(|m| if self.mask[m] { self.node(m).powi(p as i32) } else { ZERO }).collect())
            .collect()
    }
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(KappaError::InvalidInput(format!("grid size {n} is not a power of two")));
    }
    Ok(())
}

/// Two-sided coefficients `ĉ_j` with `x = Σ ĉ_j u^j`, stored for `j = −N/2..N/2−1` at index `j + N/2`.
pub fn fourier_coefficients(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let j = k as isize - (n / 2) as isize;
            buf[j.rem_euclid(n as isize) as usize] * scale
        })
        .collect()
}

/// Grid samples from two-sided coefficients in the layout of [`fourier_coefficients`].
pub fn synthesize(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    let mut buf = vec![ZERO; n];
    for (k, c) in coeffs.iter().enumerate() {
        let j = k as isize - (n / 2) as isize;
        buf[j.rem_euclid(n as isize) as usize] = *c;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Keeps coefficients with index `j ≤ 0`.
pub fn q_minus(coeffs: &[C64]) -> Vec<C64> {
    let half = coeffs.len() / 2;
    coeffs.iter().enumerate().map(|(k, c)| if k <= half { *c } else { ZERO }).collect()
}

/// `x̂(j) = ∫_Δ u^j x dσ` for `j = 0..=jmax`.
pub fn moments(grid: &CircleGrid, x: &[C64], jmax: usize) -> Vec<C64> {
    let n = grid.len();
    let mut buf: Vec<C64> = (0..n).map(|m| if grid.in_delta(m) { x[m] } else { ZERO }).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().take(jmax + 1).map(|v| v / n as f64).collect()
}

/// Samples of `b` and `c` at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDataDisk {
    pub b: Vec<C64>,
    pub c: Vec<C64>,
}

impl BoundaryDataDisk {
    pub fn new(grid: &CircleGrid, b: Vec<C64>, c: Vec<C64>) -> Result<Self> {
        if b.len() != grid.len() || c.len() != grid.len() {
            return Err(KappaError::DimensionMismatch("boundary samples must cover every node".into()));
        }
        Ok(Self { b, c })
    }

    pub fn from_fns<B, C>(grid: &CircleGrid, b: B, c: C) -> Self
    where
        B: Fn(C64) -> C64,
        C: Fn(C64) -> C64,
    {
        Self { b: grid.sample(b), c: grid.sample(c) }
    }

    /// `c ≠ 0` at every node of `Δ`.
    pub fn c_nonvanishing(&self, grid: &CircleGrid) -> bool {
        (0..grid.len()).filter(|m| grid.in_delta(*m)).all(|m| self.c[m].norm() > 1e-14)
    }

    /// `max |b/c|` over `Δ`, the boundary modulus of `S = b/c`.
    pub fn max_ratio(&self, grid: &CircleGrid) -> f64 {
        (0..grid.len())
            .filter(|m| grid.in_delta(*m))
            .map(|m| (self.b[m] / self.c[m]).norm())
            .fold(0.0, f64::max)
    }
}

/// Assembled circle boundary form with its diagnostics.
#[derive(Debug, Clone)]
pub struct DiskForm {
    pub matrix: HermitianMatrix,
    pub inertia: Inertia,
    /// Coefficient energy dropped beyond `J`, summed over the basis. It bounds the eigenvalue
    /// perturbation due to truncation. Reported only: on arcs it decays like `1/J` and is far
    /// larger than the actual movement of the negative eigenvalues.
    pub tail_estimate: f64,
    /// `|λ_i(J) − λ_i(2J)|` per ascending eigenvalue; an eigenvalue is counted only beyond
    /// twice its drift. Empty when `2J > N/2`.
    pub drift: Vec<f64>,
    /// `n_neg` at truncation `2J`, when `2J ≤ N/2`.
    pub refined_n_neg: Option<usize>,
    pub truncation: usize,
}

fn form_from_moments(a: &[Vec<C64>], b: &[Vec<C64>], j: usize) -> HermitianMatrix {
    let k = a.len();
    let m = CMatrix::from_fn(k, k, |p, q| {
        (0..=j).map(|i| a[p][i] * a[q][i].conj() - b[p][i] * b[q][i].conj()).sum()
    });
    HermitianMatrix::symmetrize(m)
}

/// Matrix of `Σ_{j≤J} ĉφ_p(j) conj ĉφ_q(j) − b̂φ_p(j) conj b̂φ_q(j)` on the given basis.
pub fn boundary_form_disk(
    grid: &CircleGrid,
    data: &BoundaryDataDisk,
    basis: &[Vec<C64>],
    j: usize,
    tol: f64,
) -> Result<DiskForm> {
    let n = grid.len();
    if j > n / 2 {
        return Err(KappaError::InvalidInput(format!("truncation {j} exceeds N/2")));
    }
    if basis.iter().any(|phi| phi.len() != n) {
        return Err(KappaError::DimensionMismatch("basis functions must cover every node".into()));
    }
    let prod = |x: &[C64], phi: &[C64]| -> Vec<C64> { x.iter().zip(phi).map(|(a, b)| a * b).collect() };
    let half = n / 2;
    let a: Vec<Vec<C64>> = basis.iter().map(|phi| moments(grid, &prod(&data.c, phi), half)).collect();
    let b: Vec<Vec<C64>> = basis.iter().map(|phi| moments(grid, &prod(&data.b, phi), half)).collect();
    let tail = |j: usize| -> f64 {
        a.iter().chain(b.iter()).map(|v| v[j + 1..].iter().map(|c| c.norm_sqr()).sum::<f64>()).sum()
    };
    let tail_estimate = tail(j);
    let matrix = form_from_moments(&a, &b, j);
    if 2 * j > half {
        let inert = inertia(&matrix, tol);
        return Ok(DiskForm { matrix, inertia: inert, tail_estimate, drift: Vec::new(), refined_n_neg: None, truncation: j });
    }
    // Eigenvalues produced by truncation shrink under J -> 2J while genuine ones settle, so
    // each eigenvalue must clear twice its own movement.
    let coarse = matrix.eigenvalues();
    let fine = form_from_moments(&a, &b, 2 * j).eigenvalues();
    let drift: Vec<f64> = coarse.iter().zip(&fine).map(|(x, y)| (x - y).abs()).collect();
    let norm = coarse.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = tol * norm.max(1.0);
    let count = |s: &[f64]| -> (usize, usize) {
        let floor = |i: usize| threshold.max(2.0 * drift[i]);
        let neg = (0..s.len()).filter(|&i| s[i] < -floor(i)).count();
        let pos = (0..s.len()).filter(|&i| s[i] > floor(i)).count();
        (neg, pos)
    };
    let (n_neg, n_pos) = count(&coarse);
    let (fine_neg, _) = count(&fine);
    if fine_neg != n_neg {
        return Err(KappaError::TruncationUnstable { coarse: n_neg, fine: fine_neg });
    }
    let inert = Inertia { n_neg, n_zero: coarse.len() - n_neg - n_pos, n_pos, zero_tolerance: tol, threshold, spectrum: coarse };
    let refined_n_neg = Some(fine_neg);
    Ok(DiskForm { matrix, inertia: inert, tail_estimate, drift, refined_n_neg, truncation: j })
}

/// Hankel rank result.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelRank {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Ratio between the smallest retained and largest discarded singular value (or the threshold).
    pub gap_ratio: f64,
}

pub const HANKEL_GAP_TOL: f64 = 1e-8;

/// Numerical rank of the `m×m` Hankel matrix `[ĉ_{−(j+k+1)}]` of a full-grid function.
pub fn hankel_rank(samples: &[C64], m: usize, gap_tol: f64) -> Result<HankelRank> {
    let n = samples.len();
    check_power_of_two(n)?;
    if m == 0 || m > n / 4 {
        return Err(KappaError::InvalidInput(format!("Hankel size {m} must be in 1..=N/4")));
    }
    let coeffs = fourier_coefficients(samples);
    let half = n / 2;
    let h = CMatrix::from_fn(m, m, |j, k| coeffs[half - (j + k + 1)]);
    let mut sv: Vec<f64> = h.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let sup = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = 1e-12 * sup.max(1.0);
    let threshold = (gap_tol * sv[0]).max(floor);
    let rank = sv.iter().filter(|s| **s > threshold).count();
    let gap_ratio = if rank == 0 {
        threshold / sv[0].max(f64::MIN_POSITIVE)
    } else if rank == m || sv[rank] == 0.0 {
        sv[rank - 1] / threshold
    } else {
        sv[rank - 1] / sv[rank]
    };
    if gap_ratio < 10.0 {
        return Err(KappaError::NoCleanGap(gap_ratio));
    }
    Ok(HankelRank { rank, singular_values: sv, gap_ratio })
}

/// Grid L² norm of `(M_B Q₋ M_B* − Q₋ − P_{uH(B)}) h`.
///
/// For `B = z^κ` the difference is the projection onto `span{u, …, u^κ}`, which has rank `κ`;
/// the constant `1` is not in its range.
pub fn mb_projection_check(b: &BlaschkeProduct, h: &[C64]) -> Result<f64> {
    let n = h.len();
    check_power_of_two(n)?;
    if b.degree() > n / 8 {
        return Err(KappaError::InvalidInput("Blaschke degree exceeds N/8".into()));
    }
    let grid = CircleGrid::full(n)?;
    let bv = (0..n).map(|m| b.eval(grid.node(m))).collect::<Result<Vec<_>>>()?;
    let proj = |x: Vec<C64>| synthesize(&q_minus(&fourier_coefficients(&x)));
    let bbar_h: Vec<C64> = bv.iter().zip(h).map(|(bb, x)| bb.conj() * x).collect();
    let lhs: Vec<C64> = proj(bbar_h).iter().zip(&bv).map(|(x, bb)| x * bb).collect();
    let qh = proj(h.to_vec());
    let mut p = vec![ZERO; n];
    if b.degree() > 0 {
        let ms = ModelSpace::build_with_grid(b, n)?;
        let basis: Vec<Vec<C64>> = (0..n).map(|m| ms.basis_at(grid.node(m))).collect();
        for k in 0..b.degree() {
            // ⟨h, u e_k⟩
            let coef: C64 = (0..n).map(|m| h[m] * (grid.node(m) * basis[m][k]).conj()).sum::<C64>() / n as f64;
            for m in 0..n {
                p[m] += coef * grid.node(m) * basis[m][k];
            }
        }
    }
    let sq: f64 = (0..n).map(|m| (lhs[m] - qh[m] - p[m]).norm_sqr()).sum::<f64>() / n as f64;
    Ok(sq.sqrt())
}

/// Random trigonometric polynomial with frequencies `|k| ≤ band`, sampled on `n` nodes.
pub fn random_trig_poly<R: rand::Rng>(rng: &mut R, n: usize, band: usize) -> Vec<C64> {
    let mut coeffs = vec![ZERO; n];
    let half = n / 2;
    for k in (half - band)..=(half + band).min(n - 1) {
        coeffs[k] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + (k as f64 - half as f64).abs());
    }
    synthesize(&coeffs)
}

/// Default inertia tolerance for circle forms.
pub const DISK_FORM_TOL: f64 = INERTIA_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ONE;
    use crate::rational::Domain;
    use rand::SeedableRng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn monomial(n: usize, p: i32) -> Vec<C64> {
        let g = CircleGrid::full(n).unwrap();
        g.sample(|u| u.powi(p))
    }

    #[test]
    fn q_minus_examples() {
        let n = 64;
        let pos = fourier_coefficients(&monomial(n, 3));
        assert!(q_minus(&pos).iter().all(|v| v.norm() < 1e-14));
        let neg = fourier_coefficients(&monomial(n, -2));
        let q = q_minus(&neg);
        assert!(q.iter().zip(&neg).all(|(a, b)| (a - b).norm() < 1e-15));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x = fourier_coefficients(&random_trig_poly(&mut rng, n, 10));
        assert_eq!(q_minus(&q_minus(&x)), q_minus(&x));
    }

    #[test]
    fn parseval_on_arc() {
        let g = CircleGrid::arcs(256, &[(0.3, 2.0)]).unwrap();
        let x = g.sample(|u| (u * 0.5).exp() + c(0.2));
        let all = moments(&g, &x, 255);
        let energy: f64 = all.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let direct: f64 = (0..256).filter(|m| g.in_delta(*m)).map(|m| x[m].norm_sqr()).sum::<f64>() / 256.0;
        // moments over all N indices: ∑ |x̂(j)|² = (1/N) ∑ |x|²
        assert!((energy - direct).abs() < 1e-10);
        assert!(g.snapping_error <= 1.0 / 256.0);
    }

    #[test]
    fn inverse_monomial_counts_kappa() {
        for kappa in 1..=3usize {
            for n in [CIRCLE_GRID, 2 * CIRCLE_GRID] {
                let g = CircleGrid::full(n).unwrap();
                let data = BoundaryDataDisk::from_fns(&g, |u| u.conj().powi(kappa as i32), |_| ONE);
                let basis = g.monomial_basis(kappa + 3);
                let form = boundary_form_disk(&g, &data, &basis, 256, 1e-9).unwrap();
                assert_eq!(form.inertia.n_neg, kappa);
            }
        }
    }

    #[test]
    fn schur_data_on_arc_is_nonnegative() {
        let g = CircleGrid::arcs(1024, &[(0.0, PI)]).unwrap();
        let data = BoundaryDataDisk::from_fns(&g, |u| (u - 0.5) / (ONE - u * 0.5), |_| ONE);
        let form = boundary_form_disk(&g, &data, &g.monomial_basis(6), 128, 1e-9).unwrap();
        assert_eq!(form.inertia.n_neg, 0, "{:?} tail {}", form.inertia.spectrum, form.tail_estimate);
        let data = BoundaryDataDisk::from_fns(&g, |_| ZERO, |_| ONE);
        let form = boundary_form_disk(&g, &data, &g.monomial_basis(6), 128, 1e-9).unwrap();
        assert_eq!(form.inertia.n_neg, 0);
    }

    #[test]
    fn hankel_examples() {
        let n = 1024;
        let g = CircleGrid::full(n).unwrap();
        let f = g.sample(|u| (u - 0.5) / (ONE - u * 0.5));
        assert_eq!(hankel_rank(&f, 16, HANKEL_GAP_TOL).unwrap().rank, 0);
        let ubar = g.sample(|u| u.conj());
        let r = hankel_rank(&ubar, 16, HANKEL_GAP_TOL).unwrap();
        assert_eq!(r.rank, 1);
        assert!((r.singular_values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mb_identity() {
        let n = 512;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let h = random_trig_poly(&mut rng, n, n / 4);
        assert!(mb_projection_check(&BlaschkeProduct::identity(), &h).unwrap() < 1e-12);
        let z = BlaschkeProduct::new(vec![ZERO], ONE, Domain::Disk).unwrap();
        assert!(mb_projection_check(&z, &monomial(n, 1)).unwrap() < 1e-10);
        let b = BlaschkeProduct::new(vec![C64::new(0.3, 0.4), c(-0.5), C64::new(0.1, -0.6)], ONE, Domain::Disk).unwrap();
        assert!(mb_projection_check(&b, &h).unwrap() < 1e-8);
    }
}
