//! Hermitian matrices, inertia, and the discrete Stein equation.

use nalgebra::{DMatrix, DVector};

use crate::error::{KappaError, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default relative zero tolerance for eigenvalue classification.
pub const INERTIA_TOL: f64 = 1e-9;
const HERMITIAN_DEFECT: f64 = 1e-10;
const STEIN_DIRECT_MAX: usize = 64;
const STEIN_MAX_DOUBLINGS: usize = 64;

/// A square complex matrix equal to its conjugate transpose, symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Accepts `m` if its Hermitian defect is at most 1e-10 relative to its largest entry.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(KappaError::DimensionMismatch(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let defect = hermitian_defect(&m);
        if !(defect <= HERMITIAN_DEFECT * scale) {
            return Err(KappaError::NotHermitian(defect));
        }
        Ok(Self::symmetrize(m))
    }

    /// Replaces `m` by `(m + m*)/2` without checking the defect.
    pub fn symmetrize(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Self(h)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self(CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `Q* H Q`.
    pub fn congruence(&self, q: &CMatrix) -> Self {
        Self::symmetrize(q.adjoint() * &self.0 * q)
    }

    /// Leading principal submatrix of size `k`.
    pub fn leading(&self, k: usize) -> Self {
        Self(self.0.view((0, 0), (k, k)).into_owned())
    }
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Signature of a Hermitian matrix together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Inertia {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    /// Relative tolerance requested by the caller.
    pub zero_tolerance: f64,
    /// Absolute threshold actually applied, `tol * max(1, ‖H‖₂)`.
    pub threshold: f64,
    /// Ascending eigenvalues.
    pub spectrum: Vec<f64>,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.n_neg + self.n_zero + self.n_pos
    }

    pub fn triple(&self) -> (usize, usize, usize) {
        (self.n_neg, self.n_zero, self.n_pos)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.first().copied().unwrap_or(0.0)
    }
}

/// Counts eigenvalues below, within, and above `tol * max(1, ‖H‖₂)`.
pub fn inertia(h: &HermitianMatrix, tol: f64) -> Inertia {
    inertia_with_floor(h, tol, 0.0)
}

/// As [`inertia`], with the zero threshold raised to at least `floor` (an absolute
/// perturbation bound on the eigenvalues, e.g. from truncation).
pub fn inertia_with_floor(h: &HermitianMatrix, tol: f64, floor: f64) -> Inertia {
    let spectrum = h.eigenvalues();
    let norm = spectrum.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = (tol * norm.max(1.0)).max(floor);
    let n_neg = spectrum.iter().filter(|v| **v < -threshold).count();
    let n_pos = spectrum.iter().filter(|v| **v > threshold).count();
    Inertia { n_neg, n_zero: spectrum.len() - n_neg - n_pos, n_pos, zero_tolerance: tol, threshold, spectrum }
}

/// Complex Schur form `A = U T U*` with `T` upper triangular.
///
/// The plain QR iteration can stall on some exactly structured inputs (e.g. shift matrices),
/// so diagonal shifts are tried before giving up.
pub fn schur_form(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    if let Some(s) = a.clone().try_schur(f64::EPSILON, 2000) {
        return s.unpack();
    }
    let scale = a.norm().max(1.0);
    for k in 1..=8 {
        let sigma = C64::from_polar(0.1 * k as f64 * scale, 0.7 * k as f64);
        let shifted = a + CMatrix::identity(n, n) * sigma;
        if let Some(s) = shifted.try_schur(f64::EPSILON, 2000) {
            let (u, mut t) = s.unpack();
            for i in 0..n {
                t[(i, i)] -= sigma;
            }
            return (u, t);
        }
    }
    panic!("complex Schur decomposition failed to converge");
}

/// Complex eigenvalues via the Schur decomposition.
pub fn eigenvalues(a: &CMatrix) -> Vec<C64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = schur_form(a);
    t.diagonal().iter().copied().collect()
}

pub fn spectral_radius(a: &CMatrix) -> f64 {
    eigenvalues(a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Numerical rank: singular values above `tol * max(1, s₁)`.
pub fn rank(a: &CMatrix, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let s1 = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > tol * s1.max(1.0)).count()
}

/// Solves `M = A M A* + Q`. Requires `ρ(A) < 1`.
///
/// Below dimension 64 the equation is triangularized through the Schur form of `A` and
/// solved entry by entry; above, the doubling iteration `M ← M + A_k M A_k*, A_k ← A_k²` is used.
pub fn solve_stein(a: &CMatrix, q: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    if !a.is_square() || q.shape() != (n, n) {
        return Err(KappaError::DimensionMismatch("Stein equation operands".into()));
    }
    if n == 0 {
        return Ok(q.clone());
    }
    let rho = spectral_radius(a);
    if rho >= 1.0 - 1e-9 {
        return Err(KappaError::SpectralRadiusTooLarge(rho));
    }
    let m = if n < STEIN_DIRECT_MAX { stein_schur(a, q) } else { stein_doubling(a, q, tol)? };
    let residual = (&m - a * &m * a.adjoint() - q).norm();
    let scale = m.norm() + q.norm();
    if residual > tol.max(1e-12) * scale.max(1.0) {
        return Err(KappaError::NonConvergence(residual));
    }
    Ok(m)
}

fn stein_schur(a: &CMatrix, q: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let (u, t) = schur_form(a);
    // X - T X T* = U* Q U, T upper triangular
    let qt = u.adjoint() * q * &u;
    let mut x = CMatrix::zeros(n, n);
    for i in (0..n).rev() {
        for j in (0..n).rev() {
            let mut acc = qt[(i, j)];
            for k in i..n {
                for l in j..n {
                    if k == i && l == j {
                        continue;
                    }
                    let tk = t[(i, k)];
                    let tl = t[(j, l)];
                    if tk == C64::new(0.0, 0.0) || tl == C64::new(0.0, 0.0) {
                        continue;
                    }
                    acc += tk * x[(k, l)] * tl.conj();
                }
            }
            x[(i, j)] = acc / (C64::new(1.0, 0.0) - t[(i, i)] * t[(j, j)].conj());
        }
    }
    &u * x * u.adjoint()
}

fn stein_doubling(a: &CMatrix, q: &CMatrix, tol: f64) -> Result<CMatrix> {
    let mut m = q.clone();
    let mut ak = a.clone();
    let mut last = f64::INFINITY;
    for _ in 0..STEIN_MAX_DOUBLINGS {
        let inc = &ak * &m * ak.adjoint();
        let size = inc.norm();
        m += inc;
        ak = &ak * &ak;
        if size <= tol * 1e-3 * m.norm().max(1.0) || ak.norm() == 0.0 {
            return Ok(m);
        }
        if size >= last && size > tol {
            log::debug!("Stein doubling increment stalled at {size}");
        }
        last = size;
    }
    Err(KappaError::NonConvergence(last))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> CMatrix {
        let n = rows.len();
        CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0))
    }

    #[test]
    fn inertia_examples() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -2.0, 0.0]);
        assert_eq!(inertia(&h, 1e-9).triple(), (1, 1, 1));
        let z = HermitianMatrix::new(CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(inertia(&z, 1e-9).triple(), (0, 3, 0));
        let h = HermitianMatrix::new(real(&[&[-3.0, -6.0], &[-6.0, -12.0]])).unwrap();
        let i = inertia(&h, 1e-9);
        assert_eq!(i.triple(), (1, 1, 0));
        assert!((i.spectrum[0] + 15.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = real(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(HermitianMatrix::new(m), Err(KappaError::NotHermitian(_))));
    }

    #[test]
    fn stein_scalar() {
        let a = CMatrix::from_element(1, 1, C64::new(0.5, 0.0));
        let q = CMatrix::from_element(1, 1, C64::new(3.0, 0.0));
        let m = solve_stein(&a, &q, 1e-12).unwrap();
        assert!((m[(0, 0)].re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn stein_doubling_matches_direct() {
        let n = 5;
        let a = CMatrix::from_fn(n, n, |i, j| C64::new(0.1 * (i as f64 - j as f64).cos(), 0.05 * (i + 2 * j) as f64 / n as f64));
        let q = CMatrix::from_fn(n, n, |i, j| C64::new((i * j) as f64 * 0.1 + if i == j { 1.0 } else { 0.0 }, 0.0));
        let q = &q + q.adjoint();
        let d = stein_schur(&a, &q);
        let it = stein_doubling(&a, &q, 1e-14).unwrap();
        assert!((d - it).norm() < 1e-10);
    }

    #[test]
    fn stein_rejects_unstable() {
        let a = CMatrix::identity(2, 2);
        let q = CMatrix::identity(2, 2);
        assert!(matches!(solve_stein(&a, &q, 1e-10), Err(KappaError::SpectralRadiusTooLarge(_))));
    }
}
