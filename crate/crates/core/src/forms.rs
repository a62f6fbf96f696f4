//! Interior-data Hermitian forms: Pick, kernel, Carathéodory–Fejér and Nudel'man.

use crate::error::{KappaError, Result};
use crate::linalg::{self, inertia, CMatrix, CVector, HermitianMatrix, Inertia, INERTIA_TOL};
use crate::poly::{ONE, ZERO};
use crate::rational::SchurPair;
use crate::C64;

const DUPLICATE_TOL: f64 = 1e-14;
const BOUNDARY_MARGIN: f64 = 1e-12;
const SAMPLE_POLE_VALUE: f64 = 1e12;

fn check_distinct(points: &[C64]) -> Result<()> {
    for j in 0..points.len() {
        for k in 0..j {
            if (points[j] - points[k]).norm() <= DUPLICATE_TOL * points[j].norm().max(1.0) {
                return Err(KappaError::DuplicatePoints(k, j));
            }
        }
    }
    Ok(())
}

fn check_disk(points: &[C64]) -> Result<()> {
    match points.iter().find(|z| !(z.norm() < 1.0 - BOUNDARY_MARGIN)) {
        Some(z) => Err(KappaError::PointOnBoundary(*z)),
        None => Ok(()),
    }
}

/// `[(1 - w_j w̄_k)/(1 - z_j z̄_k)]`.
pub fn pick_matrix(points: &[C64], values: &[C64]) -> Result<HermitianMatrix> {
    if points.len() != values.len() {
        return Err(KappaError::DimensionMismatch(format!("{} points, {} values", points.len(), values.len())));
    }
    check_disk(points)?;
    check_distinct(points)?;
    let n = points.len();
    let m = CMatrix::from_fn(n, n, |j, k| {
        (ONE - values[j] * values[k].conj()) / (ONE - points[j] * points[k].conj())
    });
    HermitianMatrix::new(m)
}

fn sample<F>(f: &F, z: C64) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    match f(z) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() && v.norm() < SAMPLE_POLE_VALUE => Ok(v),
        Ok(_) | Err(KappaError::PoleHit(_)) => Err(KappaError::SamplePole(z)),
        Err(e) => Err(e),
    }
}

/// Schur kernel `(1 - S(z_j) conj S(z_k))/(1 - z_j z̄_k)` at disk samples.
pub fn kernel_matrix_schur<F>(s: F, samples: &[C64]) -> Result<HermitianMatrix>
where
    F: Fn(C64) -> Result<C64>,
{
    check_disk(samples)?;
    check_distinct(samples)?;
    let vals = samples.iter().map(|z| sample(&s, *z)).collect::<Result<Vec<_>>>()?;
    let n = samples.len();
    let m = CMatrix::from_fn(n, n, |j, k| {
        (ONE - vals[j] * vals[k].conj()) / (ONE - samples[j] * samples[k].conj())
    });
    HermitianMatrix::new(m)
}

/// Nevanlinna kernel `(f(z_j) - conj f(z_k))/(z_j - z̄_k)` at upper half-plane samples.
pub fn kernel_matrix_nevanlinna<F>(f: F, samples: &[C64]) -> Result<HermitianMatrix>
where
    F: Fn(C64) -> Result<C64>,
{
    if let Some(z) = samples.iter().find(|z| !(z.im > BOUNDARY_MARGIN)) {
        return Err(KappaError::PointOnBoundary(*z));
    }
    check_distinct(samples)?;
    let vals = samples.iter().map(|z| sample(&f, *z)).collect::<Result<Vec<_>>>()?;
    let n = samples.len();
    let m = CMatrix::from_fn(n, n, |j, k| (vals[j] - vals[k].conj()) / (samples[j] - samples[k].conj()));
    HermitianMatrix::new(m)
}

/// Upper-triangular Toeplitz matrix of `w₀..w_n` and its defect `I - T*T`.
#[derive(Debug, Clone)]
pub struct ToeplitzDefect {
    pub t: CMatrix,
    pub defect: HermitianMatrix,
    pub inertia: Inertia,
}

pub fn upper_toeplitz(w: &[C64]) -> CMatrix {
    let n = w.len();
    CMatrix::from_fn(n, n, |j, k| if k >= j { w[k - j] } else { ZERO })
}

pub fn cf_matrices(w: &[C64]) -> ToeplitzDefect {
    cf_matrices_tol(w, INERTIA_TOL)
}

pub fn cf_matrices_tol(w: &[C64], tol: f64) -> ToeplitzDefect {
    let t = upper_toeplitz(w);
    let n = w.len();
    let defect = HermitianMatrix::symmetrize(CMatrix::identity(n, n) - t.adjoint() * &t);
    let inertia = inertia(&defect, tol);
    ToeplitzDefect { t, defect, inertia }
}

/// Triple `(A, b, c)` on `Cⁿ` with the full coordinate dual as admissible set.
#[derive(Debug, Clone, PartialEq)]
pub struct NudelmanData {
    pub a: CMatrix,
    pub b: CVector,
    pub c: CVector,
}

impl NudelmanData {
    pub fn new(a: CMatrix, b: CVector, c: CVector) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || b.len() != n || c.len() != n {
            return Err(KappaError::DimensionMismatch(format!(
                "A is {}x{}, b has {}, c has {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        let rho = linalg::spectral_radius(&a);
        if rho >= 1.0 - 1e-9 {
            return Err(KappaError::SpectralRadiusTooLarge(rho));
        }
        Ok(Self { a, b, c })
    }

    /// Pick data: `A = diag(z)`, `c = 1`, `b = w`.
    pub fn pick(points: &[C64], values: &[C64]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(KappaError::DimensionMismatch("points and values".into()));
        }
        check_disk(points)?;
        check_distinct(points)?;
        let n = points.len();
        Self::new(
            CMatrix::from_diagonal(&CVector::from_column_slice(points)),
            CVector::from_column_slice(values),
            CVector::from_element(n, ONE),
        )
    }

    /// Carathéodory–Fejér data: lower shift, `c = e₀`, `b = w`.
    pub fn cf(w: &[C64]) -> Result<Self> {
        let n = w.len();
        let mut c = CVector::zeros(n);
        if n > 0 {
            c[0] = ONE;
        }
        Self::new(lower_shift(n), CVector::from_column_slice(w), c)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Krylov matrix `[x, Ax, …, A^{n-1}x]`.
    fn krylov(&self, x: &CVector) -> CMatrix {
        let n = self.dim();
        let mut k = CMatrix::zeros(n, n);
        let mut v = x.clone();
        for j in 0..n {
            k.set_column(j, &v);
            v = &self.a * v;
        }
        k
    }

    /// Every functional annihilating all `A^j c` also annihilates all `A^j b`.
    pub fn is_admissible(&self, tol: f64) -> bool {
        let kc = self.krylov(&self.c);
        let kb = self.krylov(&self.b);
        let mut both = CMatrix::zeros(self.dim(), 2 * self.dim());
        both.view_mut((0, 0), kc.shape()).copy_from(&kc);
        both.view_mut((0, self.dim()), kb.shape()).copy_from(&kb);
        linalg::rank(&kc, tol) == linalg::rank(&both, tol)
    }
}

pub fn lower_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i == j + 1 { ONE } else { ZERO })
}

/// Matrix of the form `Σ_j A^j (cc* - bb*) A*^j`, i.e. the solution of `M = A M A* + cc* - bb*`.
pub fn nudelman_form(data: &NudelmanData, tol: f64) -> Result<HermitianMatrix> {
    let q = &data.c * data.c.adjoint() - &data.b * data.b.adjoint();
    let m = linalg::solve_stein(&data.a, &q, tol)?;
    Ok(HermitianMatrix::symmetrize(m))
}

/// Default starting truncation for [`verify_pair`].
pub const VERIFY_J0: usize = 16;

/// Outcome of [`verify_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResidual {
    /// Partial-sum mismatch plus the tail bound.
    pub residual: f64,
    pub tail_bound: f64,
    pub order: usize,
}

impl PairResidual {
    pub fn verified(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// Checks `Σ f_j A^j c = Σ B_j A^j b`, doubling the truncation from 16 up to `j_max`.
pub fn verify_pair(data: &NudelmanData, pair: &SchurPair, j_max: usize, tol: f64) -> Result<PairResidual> {
    let j_max = j_max.max(1);
    let bound = pair.f.taylor(1).map(|_| ()).and_then(|_| crate::rational::schur_class_check(&pair.f, 1e-9))?;
    let f_sup = bound.sup_estimate.max(1.0);
    let b_rat = pair.b.to_rational()?;
    let mut j = VERIFY_J0.min(j_max);
    loop {
        let f_coef = pair.f.taylor(2 * j + 2)?;
        let b_coef = b_rat.taylor(2 * j + 2)?;
        let mut vc = data.c.clone();
        let mut vb = data.b.clone();
        let mut sum = CVector::zeros(data.dim());
        let mut tail = 0.0;
        for k in 0..=2 * j + 1 {
            if k <= j {
                sum += &vc * f_coef[k] - &vb * b_coef[k];
            } else {
                tail += f_sup * vc.norm() + vb.norm();
            }
            vc = &data.a * vc;
            vb = &data.a * vb;
        }
        let q = linalg::spectral_norm(&data.a.pow((j + 1) as u32));
        let tail = if tail == 0.0 {
            0.0
        } else if q < 1.0 {
            tail / (1.0 - q)
        } else {
            f64::INFINITY
        };
        let residual = sum.norm() + tail;
        if tail <= 0.1 * tol || j >= j_max {
            if tail > tol {
                return Err(KappaError::TruncationInsufficient { order: j, tail });
            }
            return Ok(PairResidual { residual, tail_bound: tail, order: j });
        }
        j = (2 * j).min(j_max);
    }
}
