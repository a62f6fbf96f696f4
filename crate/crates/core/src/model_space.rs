//! Model spaces `H(C)` for finite Blaschke `C`, the compressed shift and its commutant.

use std::f64::consts::PI;

use crate::error::{KappaError, Result};
use crate::linalg::{self, inertia, CMatrix, CVector, HermitianMatrix, Inertia};
use crate::poly::{ONE, ZERO};
use crate::rational::{schur_class_check, BlaschkeProduct, Domain, RationalFunction};
use crate::C64;

pub const MODEL_GRID: usize = 4096;
/// Default coefficient truncation for the non-inner Gram form.
pub const GRAM_TRUNCATION: usize = 256;
const POLE_MARGIN: f64 = 1e-6;

/// `H(C) = H² ⊖ C H²` with the Takenaka–Malmquist basis and the compressed shift.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    c: BlaschkeProduct,
    t: CMatrix,
    grid: usize,
}

impl ModelSpace {
    pub fn build(c: &BlaschkeProduct) -> Result<Self> {
        Self::build_with_grid(c, MODEL_GRID)
    }

    /// Computes `T_{jk} = ⟨z e_k, e_j⟩` by quadrature on `grid` circle nodes.
    pub fn build_with_grid(c: &BlaschkeProduct, grid: usize) -> Result<Self> {
        if c.domain() != Domain::Disk {
            return Err(KappaError::InvalidInput("model spaces need a disk Blaschke product".into()));
        }
        let n = c.degree();
        if n == 0 {
            return Err(KappaError::DegreeZero);
        }
        let mut t = CMatrix::zeros(n, n);
        let mut row = vec![ZERO; n];
        for m in 0..grid {
            let u = C64::from_polar(1.0, 2.0 * PI * m as f64 / grid as f64);
            tm_basis_into(c.zeros(), u, &mut row);
            for j in 0..n {
                let ej = row[j].conj();
                for k in 0..n {
                    t[(j, k)] += u * row[k] * ej;
                }
            }
        }
        t /= C64::new(grid as f64, 0.0);
        Ok(Self { c: c.clone(), t, grid })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn blaschke(&self) -> &BlaschkeProduct {
        &self.c
    }

    pub fn zeros(&self) -> &[C64] {
        self.c.zeros()
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Matrix of the compressed shift in the orthonormal basis.
    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    /// Values `e_0(z)..e_{n-1}(z)` of the orthonormal basis.
    pub fn basis_at(&self, z: C64) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim()];
        tm_basis_into(self.zeros(), z, &mut out);
        out
    }

    /// Coordinates of the reproducing kernel `K_C(w, ·)`: `conj(e_j(w))`.
    pub fn kernel_coords(&self, w: C64) -> CVector {
        CVector::from_iterator(self.dim(), self.basis_at(w).into_iter().map(|v| v.conj()))
    }

    /// Second singular value of `I - T*T`; zero for an exact compressed shift (rank-one defect).
    pub fn defect_rank_residual(&self) -> f64 {
        let n = self.dim();
        let d = CMatrix::identity(n, n) - self.t.adjoint() * &self.t;
        let mut sv: Vec<f64> = d.svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv.get(1).copied().unwrap_or(0.0)
    }
}

fn tm_basis_into(zeros: &[C64], z: C64, out: &mut [C64]) {
    let mut prefix = ONE;
    for (k, b) in zeros.iter().enumerate() {
        let den = ONE - b.conj() * z;
        out[k] = prefix * (1.0 - b.norm_sqr()).sqrt() / den;
        prefix *= (z - b) / den;
    }
}

/// Closed form of the compressed shift in the Takenaka–Malmquist basis.
pub fn compressed_shift_closed_form(zeros: &[C64]) -> CMatrix {
    let n = zeros.len();
    CMatrix::from_fn(n, n, |j, k| {
        if j == k {
            zeros[k]
        } else if j > k {
            let mut v = C64::new((1.0 - zeros[j].norm_sqr()).sqrt() * (1.0 - zeros[k].norm_sqr()).sqrt(), 0.0);
            for m in zeros.iter().take(j).skip(k + 1) {
                v *= -m.conj();
            }
            v
        } else {
            ZERO
        }
    })
}

/// `φ(A) = p(A) q(A)⁻¹` for `φ = p/q` with poles off the closed disk.
pub fn rational_of_matrix(phi: &RationalFunction, a: &CMatrix) -> Result<CMatrix> {
    if let Some(p) = phi.poles().into_iter().find(|p| p.norm() <= 1.0 + POLE_MARGIN) {
        return Err(KappaError::PoleNearDisk(p));
    }
    let n = a.nrows();
    let horner = |c: &[C64]| {
        c.iter().rev().fold(CMatrix::zeros(n, n), |acc, &ck| &acc * a + CMatrix::identity(n, n) * ck)
    };
    let p = horner(phi.numerator());
    let q = horner(phi.denominator());
    let sv = q.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if n > 0 && !(smin > 1e-12 * smax.max(1.0)) {
        return Err(KappaError::SingularDenominator);
    }
    let qinv = q.try_inverse().ok_or(KappaError::SingularDenominator)?;
    Ok(p * qinv)
}

pub fn phi_of_t(phi: &RationalFunction, m: &ModelSpace) -> Result<CMatrix> {
    rational_of_matrix(phi, m.t())
}

/// `B(A)` for a disk Blaschke product.
pub fn blaschke_of_matrix(b: &BlaschkeProduct, a: &CMatrix) -> Result<CMatrix> {
    rational_of_matrix(&b.to_rational()?, a)
}

/// An operator proposed as a member of the commutant of `T`.
#[derive(Debug, Clone)]
pub struct CommutantCandidate {
    pub r: CMatrix,
    /// Frobenius norm of `TR - RT`.
    pub commutation_residual: f64,
}

impl CommutantCandidate {
    pub fn new(r: CMatrix, m: &ModelSpace) -> Result<Self> {
        Self::against(r, m.t())
    }

    pub fn against(r: CMatrix, t: &CMatrix) -> Result<Self> {
        if r.shape() != t.shape() {
            return Err(KappaError::DimensionMismatch(format!("R is {:?}, T is {:?}", r.shape(), t.shape())));
        }
        let commutation_residual = (t * &r - &r * t).norm();
        Ok(Self { r, commutation_residual })
    }
}

/// `I - RR*` in the orthonormal basis.
pub fn sarason_defect_matrix(r: &CommutantCandidate, m: &ModelSpace, tol: f64) -> Result<HermitianMatrix> {
    if r.r.shape() != m.t().shape() {
        return Err(KappaError::DimensionMismatch("R and T".into()));
    }
    if r.commutation_residual > tol * linalg::spectral_norm(&r.r).max(1.0) {
        return Err(KappaError::NotInCommutant(r.commutation_residual));
    }
    let n = m.dim();
    Ok(HermitianMatrix::symmetrize(CMatrix::identity(n, n) - &r.r * r.r.adjoint()))
}

pub fn sarason_defect(r: &CommutantCandidate, m: &ModelSpace, tol: f64) -> Result<Inertia> {
    Ok(inertia(&sarason_defect_matrix(r, m, tol)?, tol))
}

/// Values `r(β_i)` of `R = r(T)` read off from `R* k_β = conj(r(β)) k_β`.
pub fn commutant_values(r: &CMatrix, m: &ModelSpace) -> Vec<C64> {
    m.zeros()
        .iter()
        .map(|b| {
            let k = m.kernel_coords(*b);
            let rk = r.adjoint() * &k;
            (k.dotc(&rk) / k.dotc(&k)).conj()
        })
        .collect()
}

/// Lower-triangular Toeplitz matrix of multiplication by the power series `coeffs`.
pub fn lower_toeplitz(coeffs: &[C64], n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i >= j { coeffs.get(i - j).copied().unwrap_or(ZERO) } else { ZERO })
}

/// Coefficient-space matrix of multiplication by `f`, truncated to size `n`.
pub fn multiplication_matrix(f: &RationalFunction, n: usize) -> Result<CMatrix> {
    Ok(lower_toeplitz(&f.taylor(n)?, n))
}

/// Result of the Gram form `G - RGR*` for a (possibly non-inner) `C`.
#[derive(Debug, Clone)]
pub struct GramFormReport {
    pub inertia: Inertia,
    /// Inertia of `I - RR*` in `H(C)`, same truncation.
    pub defect_inertia: Inertia,
    /// Negative squares at truncation `2N`.
    pub refined_n_neg: usize,
    /// `‖G - I‖` in the orthonormal basis; near zero exactly when `C` is inner.
    pub g_identity_defect: f64,
    /// Dimension of the retained subspace of `H(C)`.
    pub rank: usize,
    pub truncation: usize,
}

struct GramParts {
    form: HermitianMatrix,
    defect: HermitianMatrix,
    g_defect: f64,
    rank: usize,
}

fn gram_parts(c_coef: &[C64], r: &CMatrix, n: usize) -> GramParts {
    let half = n / 2;
    let l = lower_toeplitz(c_coef, n);
    // spanning family g_j = z^j - C(z) Σ_{m≤j} conj(c_m) z^{j-m}, j < N/2, as coefficient columns
    let gamma_full = CMatrix::identity(n, n) - &l * l.adjoint();
    let gmat = gamma_full.columns(0, half).into_owned();
    let gamma = HermitianMatrix::symmetrize(gmat.rows(0, half).into_owned());
    let eig = gamma.matrix().clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..half).filter(|&i| eig.eigenvalues[i] > 1e-10 * lmax.max(1e-300)).collect();
    let mut w = CMatrix::zeros(half, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let s = 1.0 / eig.eigenvalues[i].sqrt();
        w.set_column(col, &(eig.eigenvectors.column(i) * C64::new(s, 0.0)));
    }
    let v = &gmat * &w; // orthonormal family of H(C), H² coefficients
    let x = r.adjoint();
    let xv = &x * &v;
    let g_on = v.adjoint() * &v;
    let form = HermitianMatrix::symmetrize(&g_on - xv.adjoint() * &xv);
    let y = w.adjoint() * xv.rows(0, half);
    let k = keep.len();
    let defect = HermitianMatrix::symmetrize(CMatrix::identity(k, k) - y.adjoint() * &y);
    let g_defect = (&g_on - CMatrix::identity(k, k)).norm();
    GramParts { form, defect, g_defect, rank: k }
}

/// Inertia of `G - RGR*` where `G` is the Gram operator of the inclusion `H(C) ⊂ H²`.
///
/// `r` is the `N×N` coefficient-space matrix of an operator commuting with the truncated shift
/// (hence lower-triangular Toeplitz); its conjugate transpose is taken as the action of `R*` on
/// Taylor coefficients. The computation is repeated at `2N`, extending `R` by its first column.
pub fn gram_form_general(c: &RationalFunction, r: &CMatrix, n: usize, tol: f64) -> Result<GramFormReport> {
    let check = schur_class_check(c, tol)?;
    if !check.is_schur0 {
        return Err(KappaError::NotGeneralizedSchur { sup: check.sup_estimate });
    }
    if r.shape() != (n, n) || n < 2 {
        return Err(KappaError::DimensionMismatch(format!("R is {:?}, truncation {n}", r.shape())));
    }
    let shift = crate::forms::lower_shift(n);
    let resid = (&shift * r - r * &shift).norm();
    if resid > tol * linalg::spectral_norm(r).max(1.0) {
        return Err(KappaError::NotInCommutant(resid));
    }
    let c_coef = c.taylor(2 * n)?;
    let coarse = gram_parts(&c_coef[..n], r, n);
    let symbol: Vec<C64> = r.column(0).iter().copied().collect();
    let r2 = lower_toeplitz(&symbol, 2 * n);
    let fine = gram_parts(&c_coef, &r2, 2 * n);
    let inertia_coarse = inertia(&coarse.form, tol);
    let fine_n_neg = inertia(&fine.form, tol).n_neg;
    if inertia_coarse.n_neg != fine_n_neg {
        return Err(KappaError::TruncationUnstable { coarse: inertia_coarse.n_neg, fine: fine_n_neg });
    }
    Ok(GramFormReport {
        inertia: inertia_coarse,
        defect_inertia: inertia(&coarse.defect, tol),
        refined_n_neg: fine_n_neg,
        g_identity_defect: coarse.g_defect,
        rank: coarse.rank,
        truncation: n,
    })
}
