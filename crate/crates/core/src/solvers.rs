//! Constructive solutions: the Schur algorithm for definite data and a multistart search
//! over Blaschke zeros for indefinite data.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KappaError, Result};
use crate::forms::{cf_matrices_tol, pick_matrix, verify_pair, NudelmanData, PairResidual};
use crate::linalg::{self, inertia, Inertia, INERTIA_TOL};
use crate::model_space::{blaschke_of_matrix, commutant_values, phi_of_t, CommutantCandidate, ModelSpace};
use crate::poly::{self, ONE, ZERO};
use crate::rational::{schur_class_check, BlaschkeProduct, Domain, RationalFunction, SchurPair, CIRCLE_BAND};
use crate::C64;

const UNIMODULAR_TOL: f64 = 1e-9;
const INTERPOLATION_TOL: f64 = 1e-8;
const VERIFY_TOL: f64 = 1e-6;
const VERIFY_JMAX: usize = 1 << 14;
const COMMUTATION_TOL: f64 = 1e-8;
const REPEATED_ZERO_TOL: f64 = 1e-8;
const EXTRA_DEGREES: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    pub max_iters: u64,
    pub seed: u64,
    /// Zeros are kept in `|a| ≤ 1 − margin`.
    pub margin: f64,
    /// Nelder–Mead simplex spread at which a start stops.
    pub objective_tol: f64,
    /// Relative tolerance for negative eigenvalues.
    pub inertia_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { starts: 32, max_iters: 400, seed: 0, margin: 1e-3, objective_tol: 1e-12, inertia_tol: INERTIA_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    Infeasible,
    SearchFailed,
}

/// One search at a fixed Blaschke degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub kappa: usize,
    /// Best minimal eigenvalue of the modified form.
    pub objective: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub pair: Option<SchurPair>,
    pub certificate: Inertia,
    /// Max interpolation mismatch `|f(z_j) − B(z_j) w_j|` (Pick, Sarason) or coefficient
    /// mismatch (CF).
    pub interpolation_residual: Option<f64>,
    pub verification: Option<PairResidual>,
    /// `‖B(T)R − f(T)‖₂` for Sarason data.
    pub identity_residual: Option<f64>,
    /// Largest `m` with `w = f/B + O(z^m)` for CF data.
    pub matching_order: Option<usize>,
    pub attempts: Vec<Attempt>,
}

impl SolveReport {
    fn unsolved(status: SolveStatus, certificate: Inertia, attempts: Vec<Attempt>) -> Self {
        Self {
            status,
            pair: None,
            certificate,
            interpolation_residual: None,
            verification: None,
            identity_residual: None,
            matching_order: None,
            attempts,
        }
    }
}

fn mobius(w: C64, a: C64) -> C64 {
    (w - a) / (ONE - a.conj() * w)
}

/// Schur-algorithm interpolant in `S₀` as `(numerator, denominator)`. Peels the node with the
/// smallest value modulus; unimodular remaining data end in a constant.
fn schur_interpolant(points: &[C64], values: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    if points.is_empty() {
        return Ok((vec![ZERO], vec![ONE]));
    }
    let k = (0..values.len()).min_by(|&i, &j| values[i].norm().total_cmp(&values[j].norm())).unwrap_or(0);
    let (z1, w1) = (points[k], values[k]);
    if w1.norm() >= 1.0 - UNIMODULAR_TOL {
        let c = w1 / w1.norm();
        return match values.iter().map(|w| (w - c).norm()).fold(0.0, f64::max) {
            d if d <= 1e-6 => Ok((vec![c], vec![ONE])),
            _ => Err(KappaError::DegenerateNode(w1.norm())),
        };
    }
    let mut zs = Vec::with_capacity(points.len() - 1);
    let mut ws = Vec::with_capacity(points.len() - 1);
    for j in (0..points.len()).filter(|&j| j != k) {
        let b = mobius(points[j], z1);
        zs.push(points[j]);
        ws.push(mobius(values[j], w1) / b);
    }
    let (n, d) = schur_interpolant(&zs, &ws)?;
    let lin = [-z1, ONE];
    let dlin = [ONE, -z1.conj()];
    let num = poly::add(&poly::mul(&lin, &n), &poly::scale(&poly::mul(&dlin, &d), w1));
    let den = poly::add(&poly::mul(&dlin, &d), &poly::scale(&poly::mul(&lin, &n), w1.conj()));
    Ok((num, den))
}

fn interpolation_residual(f: &RationalFunction, b: &BlaschkeProduct, points: &[C64], values: &[C64]) -> Result<f64> {
    let mut r: f64 = 0.0;
    for (z, w) in points.iter().zip(values) {
        r = r.max((f.eval(*z)? - b.eval(*z)? * w).norm());
    }
    Ok(r)
}

fn pick_certificate(points: &[C64], values: &[C64], tol: f64) -> Result<Inertia> {
    Ok(inertia(&pick_matrix(points, values)?, tol))
}

/// Builds and verifies the pair `(f, B)` for Pick data given the zeros of `B`.
fn pick_pair(points: &[C64], values: &[C64], b: BlaschkeProduct) -> Result<(SchurPair, f64, PairResidual)> {
    let modified: Vec<C64> = points.iter().zip(values).map(|(z, w)| Ok(b.eval(*z)? * w)).collect::<Result<_>>()?;
    let (num, den) = schur_interpolant(points, &modified)?;
    let f = RationalFunction::new(num, den)?;
    let residual = interpolation_residual(&f, &b, points, values)?;
    if residual > INTERPOLATION_TOL {
        return Err(KappaError::NonConvergence(residual));
    }
    let pair = SchurPair::new(f, b)?;
    let ver = verify_pair(&NudelmanData::pick(points, values)?, &pair, VERIFY_JMAX, VERIFY_TOL)?;
    if !ver.verified(VERIFY_TOL) {
        return Err(KappaError::NonConvergence(ver.residual));
    }
    Ok((pair, residual, ver))
}

/// Definite Nevanlinna–Pick: `f ∈ S₀` with `f(z_j) = w_j`, or `Infeasible`.
pub fn solve_np0(points: &[C64], values: &[C64]) -> Result<SolveReport> {
    let certificate = pick_certificate(points, values, INERTIA_TOL)?;
    if certificate.n_neg > 0 {
        return Ok(SolveReport::unsolved(SolveStatus::Infeasible, certificate, Vec::new()));
    }
    let (pair, residual, ver) = pick_pair(points, values, BlaschkeProduct::identity())?;
    Ok(SolveReport {
        status: SolveStatus::Solved,
        pair: Some(pair),
        certificate,
        interpolation_residual: Some(residual),
        verification: Some(ver),
        identity_residual: None,
        matching_order: None,
        attempts: vec![Attempt { kappa: 0, objective: 0.0, status: SolveStatus::Solved }],
    })
}

/// Maps `R^{2κ}` onto zeros in the disk of radius `r_max`.
fn chart(x: &[f64], r_max: f64) -> Vec<C64> {
    x.chunks(2)
        .map(|p| {
            let v = C64::new(p[0], p[1]);
            let n = v.norm();
            if n == 0.0 {
                ZERO
            } else {
                v * (r_max * n.tanh() / n)
            }
        })
        .collect()
}

fn chart_inverse(a: &[C64], r_max: f64) -> Vec<f64> {
    a.iter()
        .flat_map(|z| {
            let n = z.norm();
            let s = if n == 0.0 { 0.0 } else { (n / r_max).min(1.0 - 1e-12).atanh() / n };
            [z.re * s, z.im * s]
        })
        .collect()
}

/// `−λ_min` of the modified form as a function of chart coordinates.
struct ZeroObjective<'a> {
    r_max: f64,
    form: &'a dyn Fn(&BlaschkeProduct) -> Result<f64>,
}

impl CostFunction for ZeroObjective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        let b = BlaschkeProduct::new(chart(x, self.r_max), ONE, Domain::Disk)?;
        Ok(self.form(&b).map(|v| -v).unwrap_or(f64::INFINITY))
    }
}

impl ZeroObjective<'_> {
    fn form(&self, b: &BlaschkeProduct) -> Result<f64> {
        (self.form)(b)
    }
}

/// Multistart Nelder–Mead over the zeros of a degree-`kappa` Blaschke product. Returns
/// candidates sorted by objective (best first, ties by start index).
fn search_zeros(
    kappa: usize,
    config: &SearchConfig,
    form: &dyn Fn(&BlaschkeProduct) -> Result<f64>,
) -> Vec<(f64, Vec<C64>)> {
    let r_max = 1.0 - config.margin;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (kappa as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let dim = 2 * kappa;
    let mut out = Vec::with_capacity(config.starts);
    for _ in 0..config.starts {
        let zeros: Vec<C64> = (0..kappa)
            .map(|_| {
                let r = 0.9 * rng.gen::<f64>().sqrt();
                C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let x0 = chart_inverse(&zeros, r_max);
        let mut simplex = vec![x0.clone()];
        for i in 0..dim {
            let mut v = x0.clone();
            v[i] += 0.3;
            simplex.push(v);
        }
        let problem = ZeroObjective { r_max, form };
        let best = NelderMead::new(simplex)
            .with_sd_tolerance(config.objective_tol)
            .ok()
            .and_then(|s| Executor::new(problem, s).configure(|st| st.max_iters(config.max_iters)).run().ok())
            .and_then(|r| {
                let st = r.state();
                st.get_best_param().map(|p| (-st.get_best_cost(), chart(p, r_max)))
            });
        if let Some(b) = best {
            out.push(b);
        }
    }
    // stable sort keeps start order among ties
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

fn min_eig(h: &crate::linalg::HermitianMatrix) -> f64 {
    h.eigenvalues().first().copied().unwrap_or(0.0)
}

fn feasible(objective: f64, scale: f64, tol: f64) -> bool {
    objective >= -tol * scale.max(1.0)
}

/// Indefinite Pick data: `f ∈ S₀`, `B` of degree `κ` with `f(z_j) = B(z_j) w_j`.
pub fn solve_pick_kappa(points: &[C64], values: &[C64], config: &SearchConfig) -> Result<SolveReport> {
    let certificate = pick_certificate(points, values, config.inertia_tol)?;
    let kappa = certificate.n_neg;
    if kappa == 0 {
        return solve_np0(points, values);
    }
    let form = |b: &BlaschkeProduct| -> Result<f64> {
        let v: Vec<C64> = points.iter().zip(values).map(|(z, w)| Ok(b.eval(*z)? * w)).collect::<Result<_>>()?;
        Ok(min_eig(&pick_matrix(points, &v)?))
    };
    let mut attempts = Vec::new();
    for k in kappa..=kappa + EXTRA_DEGREES {
        let candidates = search_zeros(k, config, &form);
        let best = candidates.first().map_or(f64::NEG_INFINITY, |c| c.0);
        for (obj, zeros) in candidates.iter().filter(|c| feasible(c.0, 1.0, config.inertia_tol)) {
            let Ok(b) = BlaschkeProduct::new(zeros.clone(), ONE, Domain::Disk) else { continue };
            if let Ok((pair, residual, ver)) = pick_pair(points, values, b) {
                attempts.push(Attempt { kappa: k, objective: *obj, status: SolveStatus::Solved });
                return Ok(SolveReport {
                    status: SolveStatus::Solved,
                    pair: Some(pair),
                    certificate,
                    interpolation_residual: Some(residual),
                    verification: Some(ver),
                    identity_residual: None,
                    matching_order: None,
                    attempts,
                });
            }
        }
        attempts.push(Attempt { kappa: k, objective: best, status: SolveStatus::SearchFailed });
    }
    Ok(SolveReport::unsolved(SolveStatus::SearchFailed, certificate, attempts))
}

/// Schur-parameter completion of Taylor data `c₀..c_n` to `f ∈ S₀`.
fn schur_completion(c: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
    if c.is_empty() {
        return Ok((vec![ZERO], vec![ONE]));
    }
    let g = c[0];
    if g.norm() >= 1.0 - UNIMODULAR_TOL {
        let rest = c[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if rest > 1e-6 {
            return Err(KappaError::DegenerateNode(g.norm()));
        }
        return Ok((vec![g / g.norm()], vec![ONE]));
    }
    // f₁ = (f − γ) / (z (1 − γ̄ f))
    let num: Vec<C64> = c[1..].to_vec();
    let mut den: Vec<C64> = c.iter().map(|v| -g.conj() * v).collect();
    den[0] += ONE;
    let c1 = poly::series_div(&num, &den, c.len() - 1);
    let (n, d) = schur_completion(&c1)?;
    let zn = poly::mul(&[ZERO, ONE], &n);
    let num = poly::add(&zn, &poly::scale(&d, g));
    let den = poly::add(&d, &poly::scale(&zn, g.conj()));
    Ok((num, den))
}

fn truncated_product(b: &BlaschkeProduct, w: &[C64]) -> Result<Vec<C64>> {
    let bt = b.to_rational()?.taylor(w.len())?;
    Ok((0..w.len()).map(|k| (0..=k).map(|j| bt[j] * w[k - j]).sum()).collect())
}

/// Leading Taylor coefficients of `f/B` that agree with `w`.
fn matching_order(pair: &SchurPair, w: &[C64]) -> usize {
    let s = pair.b.to_rational().and_then(|b| pair.f.div(&b)).and_then(|s| s.taylor(w.len()));
    match s {
        Ok(s) => s.iter().zip(w).take_while(|(a, b)| (*a - *b).norm() <= 1e-8 * b.norm().max(1.0)).count(),
        Err(_) => 0,
    }
}

fn cf_pair(w: &[C64], b: BlaschkeProduct) -> Result<(SchurPair, f64, PairResidual, usize)> {
    let target = truncated_product(&b, w)?;
    let (num, den) = schur_completion(&target)?;
    let f = RationalFunction::new(num, den)?;
    let got = f.taylor(w.len())?;
    let residual = got.iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if residual > INTERPOLATION_TOL {
        return Err(KappaError::NonConvergence(residual));
    }
    let pair = SchurPair::new(f, b)?;
    let ver = verify_pair(&NudelmanData::cf(w)?, &pair, w.len().max(1), VERIFY_TOL)?;
    if !ver.verified(VERIFY_TOL) {
        return Err(KappaError::NonConvergence(ver.residual));
    }
    let order = matching_order(&pair, w);
    Ok((pair, residual, ver, order))
}

/// Carathéodory–Fejér data `w₀..w_n`: `B·w = f + O(z^{n+1})` with `f ∈ S₀`, `deg B = κ`.
pub fn solve_cf_kappa(w: &[C64], config: &SearchConfig) -> Result<SolveReport> {
    if w.is_empty() {
        return Err(KappaError::InvalidInput("no Taylor data".into()));
    }
    let certificate = cf_matrices_tol(w, config.inertia_tol).inertia;
    let kappa = certificate.n_neg;
    let solved = |k: usize, obj: f64, mut attempts: Vec<Attempt>, r: (SchurPair, f64, PairResidual, usize)| {
        attempts.push(Attempt { kappa: k, objective: obj, status: SolveStatus::Solved });
        SolveReport {
            status: SolveStatus::Solved,
            pair: Some(r.0),
            certificate: certificate.clone(),
            interpolation_residual: Some(r.1),
            verification: Some(r.2),
            identity_residual: None,
            matching_order: Some(r.3),
            attempts,
        }
    };
    if kappa == 0 {
        let r = cf_pair(w, BlaschkeProduct::identity())?;
        return Ok(solved(0, 0.0, Vec::new(), r));
    }
    let form = |b: &BlaschkeProduct| -> Result<f64> {
        let t = truncated_product(b, w)?;
        Ok(min_eig(&cf_matrices_tol(&t, config.inertia_tol).defect))
    };
    let mut attempts = Vec::new();
    for k in kappa..=kappa + EXTRA_DEGREES {
        let candidates = search_zeros(k, config, &form);
        let best = candidates.first().map_or(f64::NEG_INFINITY, |c| c.0);
        for (obj, zeros) in candidates.iter().filter(|c| feasible(c.0, 1.0, config.inertia_tol)) {
            let Ok(b) = BlaschkeProduct::new(zeros.clone(), ONE, Domain::Disk) else { continue };
            if let Ok(r) = cf_pair(w, b) {
                return Ok(solved(k, *obj, attempts, r));
            }
        }
        attempts.push(Attempt { kappa: k, objective: best, status: SolveStatus::SearchFailed });
    }
    Ok(SolveReport::unsolved(SolveStatus::SearchFailed, certificate, attempts))
}

/// Sarason data `R` in the commutant of the compressed shift on `K_C`, `C` with distinct
/// zeros: reduces to Pick data `(β_i, r(β_i))` and checks `B(T)R = f(T)` on matrices.
pub fn solve_sarason(m: &ModelSpace, r: &CommutantCandidate, config: &SearchConfig) -> Result<SolveReport> {
    let zeros = m.zeros();
    for j in 0..zeros.len() {
        for k in 0..j {
            if (zeros[j] - zeros[k]).norm() <= REPEATED_ZERO_TOL {
                return Err(KappaError::RepeatedZeros);
            }
        }
    }
    if r.commutation_residual > COMMUTATION_TOL * linalg::spectral_norm(&r.r).max(1.0) {
        return Err(KappaError::NotInCommutant(r.commutation_residual));
    }
    let values = commutant_values(&r.r, m);
    let mut report = solve_pick_kappa(zeros, &values, config)?;
    if let Some(pair) = &report.pair {
        let lhs = blaschke_of_matrix(&pair.b, m.t())? * &r.r;
        let rhs = phi_of_t(&pair.f, m)?;
        let res = linalg::spectral_norm(&(lhs - rhs));
        report.identity_residual = Some(res);
        if res > VERIFY_TOL {
            report.status = SolveStatus::SearchFailed;
        }
    }
    Ok(report)
}

/// Whether `f` passes the grid Schur test; used by callers re-verifying reports.
pub fn is_schur0(f: &RationalFunction) -> bool {
    schur_class_check(f, CIRCLE_BAND).map(|c| c.is_schur0).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn quick() -> SearchConfig {
        SearchConfig { starts: 8, ..SearchConfig::default() }
    }

    #[test]
    fn constant_solution() {
        let r = solve_np0(&[c(0.0, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert_eq!(r.status, SolveStatus::Solved);
        let f = &r.pair.unwrap().f;
        assert!((f.eval(c(0.3, 0.4)).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn blaschke_ground_truth() {
        let f0 = |z: C64| (z - 0.5) / (ONE - z * 0.5);
        let pts = [c(0.1, 0.2), c(-0.4, 0.0), c(0.0, -0.6), c(0.5, 0.5)];
        let vals: Vec<C64> = pts.iter().map(|z| f0(*z)).collect();
        let r = solve_np0(&pts, &vals).unwrap();
        assert_eq!(r.status, SolveStatus::Solved);
        assert!(r.interpolation_residual.unwrap() <= 1e-8);
        let f = r.pair.unwrap().f;
        for (z, w) in pts.iter().zip(&vals) {
            assert!((f.eval(*z).unwrap() - w).norm() <= 1e-8);
        }
    }

    #[test]
    fn infeasible_single_node() {
        let r = solve_np0(&[c(0.0, 0.0)], &[c(2.0, 0.0)]).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn one_negative_square() {
        let r = solve_pick_kappa(&[c(0.0, 0.0)], &[c(2.0, 0.0)], &quick()).unwrap();
        assert_eq!(r.status, SolveStatus::Solved);
        let p = r.pair.unwrap();
        assert_eq!(p.kappa, 1);
        let r = solve_pick_kappa(&[c(0.0, 0.0), c(0.25, 0.0)], &[c(-2.0, 0.0), c(-3.5, 0.0)], &quick()).unwrap();
        assert_eq!(r.status, SolveStatus::Solved);
        assert_eq!(r.pair.unwrap().kappa, 1);
    }

    #[test]
    fn ground_truth_pair_verifies() {
        let pts = [c(0.0, 0.0), c(0.25, 0.0)];
        let vals = [c(-2.0, 0.0), c(-3.5, 0.0)];
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)], ONE, Domain::Disk).unwrap();
        let pair = SchurPair::new(RationalFunction::constant(ONE), b).unwrap();
        let v = verify_pair(&NudelmanData::pick(&pts, &vals).unwrap(), &pair, 1024, 1e-8).unwrap();
        assert!(v.verified(1e-8));
    }

    #[test]
    fn cf_examples() {
        let r = solve_cf_kappa(&[c(0.5, 0.0)], &quick()).unwrap();
        assert_eq!(r.status, SolveStatus::Solved);
        assert!((r.pair.unwrap().f.eval(c(0.3, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        let w = [c(0.0, 0.0), c(2.0, 0.0)];
        let r = solve_cf_kappa(&w, &quick()).unwrap();
        assert_eq!(r.status, SolveStatus::Solved);
        assert_eq!(r.pair.as_ref().unwrap().kappa, 1);
        assert!(r.matching_order.unwrap() >= 1);
    }

    #[test]
    fn deterministic() {
        let pts = [c(0.0, 0.0), c(0.25, 0.0)];
        let vals = [c(-2.0, 0.0), c(-3.5, 0.0)];
        let a = solve_pick_kappa(&pts, &vals, &quick()).unwrap();
        let b = solve_pick_kappa(&pts, &vals, &quick()).unwrap();
        assert_eq!(a.attempts, b.attempts);
        assert_eq!(a.pair.unwrap().b, b.pair.unwrap().b);
    }

    #[test]
    fn sarason_scalar() {
        let c_b = BlaschkeProduct::new(vec![ZERO], ONE, Domain::Disk).unwrap();
        let m = ModelSpace::build(&c_b).unwrap();
        let r = CommutantCandidate::new(crate::CMatrix::from_element(1, 1, c(2.0, 0.0)), &m).unwrap();
        let rep = solve_sarason(&m, &r, &quick()).unwrap();
        assert_eq!(rep.status, SolveStatus::Solved);
        assert!(rep.identity_residual.unwrap() <= 1e-6);
        assert_eq!(rep.pair.unwrap().kappa, 1);
    }
}
