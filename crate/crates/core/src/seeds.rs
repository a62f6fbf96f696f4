//! Seeded random instances with known ground truth.
//!
//! Every generator starts from a random pair `S = f/B` (or a real pole–residue Nevanlinna
//! function on the line), builds the problem data from it, and checks that the certificate of
//! the generated data sees all `κ` negative squares. Draws that fail the check are discarded
//! and redrawn from the same stream, so a seed always yields the same instance.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{boundary_form_disk, hankel_rank, BoundaryDataDisk, CircleGrid, HANKEL_GAP_TOL};
use crate::error::{KappaError, Result};
use crate::forms::{cf_matrices_tol, nudelman_form, pick_matrix, NudelmanData};
use crate::line::{loewner_form, BoundaryDataLine, IntervalSet};
use crate::linalg::{inertia, CMatrix, CVector, INERTIA_TOL};
use crate::model_space::{blaschke_of_matrix, phi_of_t, rational_of_matrix, ModelSpace};
use crate::rational::{BlaschkeProduct, Domain, RationalFunction, SchurPair};
use crate::C64;

pub const MAX_KAPPA: usize = 3;
pub const MAX_SIZE: usize = 64;

const MAX_DRAWS: usize = 200;
const ZERO_RADIUS: (f64, f64) = (0.3, 0.75);
const ZERO_SEPARATION: f64 = 0.2;
const NEAR_POLE: f64 = 0.08;
const POINT_RADIUS: f64 = 0.9;
const POINT_SEPARATION: f64 = 0.04;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_request(kappa: usize, size: usize, min_size: usize) -> Result<()> {
    if kappa > MAX_KAPPA {
        return Err(KappaError::InvalidInput(format!("kappa {kappa} exceeds {MAX_KAPPA}")));
    }
    if size > MAX_SIZE || size < min_size {
        return Err(KappaError::InvalidInput(format!("size {size} must lie in {min_size}..={MAX_SIZE}")));
    }
    Ok(())
}

fn unimodular<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

fn in_annulus<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    let r = rng.gen_range(lo * lo..hi * hi).sqrt();
    C64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
}

/// Points in `|z| ≤ r_max` at least `sep` from each other and from `avoid`.
pub fn separated_points<R: Rng>(rng: &mut R, n: usize, r_max: f64, sep: f64, avoid: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = in_annulus(rng, 0.0, r_max);
        if out.iter().chain(avoid).all(|w| (z - w).norm() >= sep) {
            out.push(z);
        }
    }
    out
}

/// Disk Blaschke product of degree `kappa` with separated zeros away from the origin.
pub fn random_blaschke<R: Rng>(rng: &mut R, kappa: usize) -> Result<BlaschkeProduct> {
    let mut zeros: Vec<C64> = Vec::with_capacity(kappa);
    while zeros.len() < kappa {
        let a = in_annulus(rng, ZERO_RADIUS.0, ZERO_RADIUS.1);
        if zeros.iter().all(|b| (a - b).norm() >= ZERO_SEPARATION) {
            zeros.push(a);
        }
    }
    BlaschkeProduct::new(zeros, unimodular(rng), Domain::Disk)
}

/// `f = s·e^{iθ}·B_f(z)·(1 + tz)/(1 + |t|)` with `s < 1`, so `sup |f| ≤ s`.
/// Zeros of `B_f` keep away from `avoid`.
pub fn random_schur0<R: Rng>(rng: &mut R, degree: usize, avoid: &[C64]) -> Result<RationalFunction> {
    let zeros = separated_points(rng, degree, ZERO_RADIUS.1, ZERO_SEPARATION, avoid);
    let bf = BlaschkeProduct::new(zeros, unimodular(rng), Domain::Disk)?.to_rational()?;
    let t = in_annulus(rng, 0.0, 0.6);
    let s = rng.gen_range(0.3..0.85) / (1.0 + t.norm());
    let tilt = RationalFunction::polynomial(vec![ONE * s, t * s])?;
    bf.mul(&tilt)
}

/// Coprime `(f, B)` with `deg B = kappa` and `deg f ≤ 2`.
pub fn random_pair<R: Rng>(rng: &mut R, kappa: usize) -> Result<SchurPair> {
    let b = random_blaschke(rng, kappa)?;
    let degree = rng.gen_range(0..=1);
    let f = random_schur0(rng, degree, b.zeros())?;
    SchurPair::new(f, b)
}

/// `S = f/B` as one rational function.
pub fn pair_function(pair: &SchurPair) -> Result<RationalFunction> {
    pair.f.div(&pair.b.to_rational()?)
}

/// One point at distance [`NEAR_POLE`] from each pole of `S`, in a random direction.
pub fn near_pole_points<R: Rng>(rng: &mut R, pair: &SchurPair) -> Vec<C64> {
    pair.b
        .zeros()
        .iter()
        .map(|a| {
            let dir = unimodular(rng);
            let z = a + dir * NEAR_POLE;
            if z.norm() < POINT_RADIUS {
                z
            } else {
                a - dir * NEAR_POLE
            }
        })
        .collect()
}

fn values(pair: &SchurPair, points: &[C64]) -> Result<Vec<C64>> {
    points.iter().map(|z| pair.eval(*z)).collect()
}

/// Draws until `build` succeeds with a certificate of exactly `kappa` negative squares.
fn redraw<T, F>(seed: u64, mut build: F) -> Result<T>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<Option<T>>,
{
    let mut rng = rng_from_seed(seed);
    let mut last = None;
    for _ in 0..MAX_DRAWS {
        match build(&mut rng) {
            Ok(Some(t)) => return Ok(t),
            Ok(None) => {}
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(KappaError::NonConvergence(MAX_DRAWS as f64)))
}

#[derive(Debug, Clone)]
pub struct PickInstance {
    pub points: Vec<C64>,
    pub values: Vec<C64>,
    pub truth: SchurPair,
}

/// `size` interpolation points, one next to each pole, with values of a random `S ∈ S_κ`.
pub fn pick_instance(seed: u64, kappa: usize, size: usize) -> Result<PickInstance> {
    check_request(kappa, size, kappa.max(1))?;
    redraw(seed, |rng| {
        let truth = random_pair(rng, kappa)?;
        let mut points = near_pole_points(rng, &truth);
        let avoid: Vec<C64> = points.iter().chain(truth.b.zeros()).copied().collect();
        points.extend(separated_points(rng, size - kappa, POINT_RADIUS, POINT_SEPARATION.max(NEAR_POLE / 2.0), &avoid));
        let values = values(&truth, &points)?;
        let cert = inertia(&pick_matrix(&points, &values)?, INERTIA_TOL);
        Ok((cert.n_neg == kappa).then_some(PickInstance { points, values, truth }))
    })
}

#[derive(Debug, Clone)]
pub struct CfInstance {
    /// Taylor coefficients `w_0..w_{size−1}` of `S` at the origin.
    pub w: Vec<C64>,
    pub truth: SchurPair,
}

pub fn cf_instance(seed: u64, kappa: usize, size: usize) -> Result<CfInstance> {
    check_request(kappa, size, (2 * kappa).max(1))?;
    redraw(seed, |rng| {
        let truth = random_pair(rng, kappa)?;
        let w = pair_function(&truth)?.taylor(size - 1)?;
        let cert = cf_matrices_tol(&w, INERTIA_TOL).inertia;
        Ok((cert.n_neg == kappa).then_some(CfInstance { w, truth }))
    })
}

#[derive(Debug, Clone)]
pub struct SarasonInstance {
    /// Zeros of the inner function `C`; the model space is `H(C)`.
    pub zeros: Vec<C64>,
    /// `R = S(T) = f(T) B(T)⁻¹` in the model-space basis.
    pub r: CMatrix,
    pub truth: SchurPair,
}

pub fn sarason_instance(seed: u64, kappa: usize, size: usize) -> Result<SarasonInstance> {
    check_request(kappa, size, kappa.max(1))?;
    redraw(seed, |rng| {
        let truth = random_pair(rng, kappa)?;
        let mut zeros = near_pole_points(rng, &truth);
        let avoid: Vec<C64> = zeros.iter().chain(truth.b.zeros()).copied().collect();
        zeros.extend(separated_points(rng, size - kappa, 0.85, 0.1, &avoid));
        let c = BlaschkeProduct::new(zeros.clone(), ONE, Domain::Disk)?;
        let m = ModelSpace::build(&c)?;
        let bt = blaschke_of_matrix(&truth.b, m.t())?;
        let Some(bt_inv) = bt.try_inverse() else { return Ok(None) };
        let r = phi_of_t(&truth.f, &m)? * bt_inv;
        let cert = inertia(&pick_matrix(&zeros, &values(&truth, &zeros)?)?, INERTIA_TOL);
        Ok((cert.n_neg == kappa).then_some(SarasonInstance { zeros, r, truth }))
    })
}

#[derive(Debug, Clone)]
pub struct NudelmanInstance {
    pub data: NudelmanData,
    pub truth: SchurPair,
}

/// Upper-triangular `A` with eigenvalues next to the poles, random `c`, and
/// `b = B(A)⁻¹ f(A) c` so that `f(A)c = B(A)b`.
pub fn nudelman_instance(seed: u64, kappa: usize, size: usize) -> Result<NudelmanInstance> {
    check_request(kappa, size, kappa.max(1))?;
    redraw(seed, |rng| {
        let truth = random_pair(rng, kappa)?;
        let mut eig = near_pole_points(rng, &truth);
        let avoid: Vec<C64> = eig.iter().chain(truth.b.zeros()).copied().collect();
        eig.extend(separated_points(rng, size - kappa, 0.85, 0.1, &avoid));
        let a = CMatrix::from_fn(size, size, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => eig[i],
            std::cmp::Ordering::Less => C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)),
            std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
        });
        let c = CVector::from_fn(size, |_, _| C64::new(rng.gen_range(0.5..1.0), rng.gen_range(-0.5..0.5)));
        let Some(ba_inv) = blaschke_of_matrix(&truth.b, &a)?.try_inverse() else { return Ok(None) };
        let b = ba_inv * rational_of_matrix(&truth.f, &a)? * &c;
        let data = NudelmanData::new(a, b, c)?;
        let cert = inertia(&nudelman_form(&data, 1e-13)?, INERTIA_TOL);
        Ok((cert.n_neg == kappa).then_some(NudelmanInstance { data, truth }))
    })
}

pub const DISK_GRID: usize = 4096;
pub const DISK_TRUNCATION: usize = 256;

#[derive(Debug, Clone)]
pub struct BoundaryDiskInstance {
    /// `b = S` on the circle; `c ≡ 1`.
    pub b: RationalFunction,
    pub c: RationalFunction,
    /// Number of monomials in the test basis.
    pub basis: usize,
    pub truth: SchurPair,
}

pub fn boundary_disk_instance(seed: u64, kappa: usize, size: usize) -> Result<BoundaryDiskInstance> {
    check_request(kappa, size, kappa + 1)?;
    let grid = CircleGrid::full(DISK_GRID)?;
    redraw(seed, |rng| {
        let truth = random_pair(rng, kappa)?;
        let s = pair_function(&truth)?;
        let c = RationalFunction::constant(ONE);
        let data = BoundaryDataDisk::new(&grid, grid.sample(|u| s.eval(u).unwrap_or(ONE)), vec![ONE; grid.len()])?;
        let form = boundary_form_disk(&grid, &data, &grid.monomial_basis(size), DISK_TRUNCATION, INERTIA_TOL)?;
        Ok((form.inertia.n_neg == kappa).then_some(BoundaryDiskInstance { b: s, c, basis: size, truth }))
    })
}

#[derive(Debug, Clone)]
pub struct HankelInstance {
    /// Boundary function `S = f/B`, sampled on the grid by the caller.
    pub s: RationalFunction,
    /// Hankel matrix size.
    pub size: usize,
    pub truth: SchurPair,
}

/// Samples of a rational function on the full `n`-point circle grid.
pub fn circle_samples(s: &RationalFunction, n: usize) -> Result<Vec<C64>> {
    let grid = CircleGrid::full(n)?;
    (0..n).map(|m| s.eval(grid.node(m))).collect()
}

pub fn hankel_instance(seed: u64, kappa: usize, size: usize) -> Result<HankelInstance> {
    check_request(kappa, size, kappa + 1)?;
    redraw(seed, |rng| {
        let truth = random_pair(rng, kappa)?;
        let s = pair_function(&truth)?;
        let h = hankel_rank(&circle_samples(&s, DISK_GRID)?, size, HANKEL_GAP_TOL)?;
        Ok((h.rank == kappa).then_some(HankelInstance { s, size, truth }))
    })
}

/// `f₀(x) = αx + β + Σ c_k/(t_k − x)` on `(−1, 1)`; `κ` residues are negative.
#[derive(Debug, Clone)]
pub struct LoewnerInstance {
    pub interval: (f64, f64),
    pub panels: usize,
    pub f0: RationalFunction,
    pub slope: f64,
    pub offset: f64,
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
    pub kappa: usize,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Real rational form of `αx + β + Σ c_k/(t_k − x)`.
pub fn pole_residue_function(slope: f64, offset: f64, poles: &[f64], residues: &[f64]) -> Result<RationalFunction> {
    let mut f = RationalFunction::polynomial(vec![real(offset), real(slope)])?;
    for (t, c) in poles.iter().zip(residues) {
        let term = RationalFunction::new(vec![real(*c)], vec![real(*t), real(-1.0)])?;
        f = f.add(&term)?;
    }
    Ok(f)
}

/// Boundary data for a rational function with real coefficients, evaluated on the real axis.
pub fn real_line_data(set: &IntervalSet, f0: &RationalFunction) -> Result<BoundaryDataLine> {
    let f0 = f0.clone();
    BoundaryDataLine::from_real_fn(set, move |x| f0.eval(real(x)).map(|v| v.re).unwrap_or(f64::NAN))
}

pub fn loewner_instance(seed: u64, kappa: usize, size: usize) -> Result<LoewnerInstance> {
    check_request(kappa, size, 2)?;
    let interval = (-1.0, 1.0);
    let set = IntervalSet::interval(interval.0, interval.1, size)?;
    redraw(seed, |rng| {
        let n_pos = rng.gen_range(0..=2);
        let mut poles: Vec<f64> = Vec::new();
        while poles.len() < kappa + n_pos {
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let t = side * rng.gen_range(1.15..1.9);
            if poles.iter().all(|p| (p - t).abs() >= 0.25) {
                poles.push(t);
            }
        }
        let residues: Vec<f64> = (0..poles.len())
            .map(|k| if k < kappa { -rng.gen_range(0.3..1.0) } else { rng.gen_range(0.1..1.0) })
            .collect();
        let slope = rng.gen_range(0.0..1.0);
        let offset = rng.gen_range(-0.5..0.5);
        let f0 = pole_residue_function(slope, offset, &poles, &residues)?;
        let data = real_line_data(&set, &f0)?;
        let form = match loewner_form(&data, &set, INERTIA_TOL) {
            Ok(f) => f,
            Err(KappaError::TruncationUnstable { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok((form.inertia.n_neg == kappa).then_some(LoewnerInstance {
            interval,
            panels: size,
            f0: f0.clone(),
            slope,
            offset,
            poles: poles.clone(),
            residues: residues.clone(),
            kappa,
        }))
    })
}

/// Positive rational density `g₀(x) = a₀ + Σ w_k y_k / ((x − x_k)² + y_k²)` on `(−1, 1)`.
///
/// Only a smooth density makes sense here: a kink in `g₀` puts an `(x − k) log|x − k|` term
/// into `H_Δ g₀`, and the dual form then has infinitely many negative squares.
#[derive(Debug, Clone)]
pub struct DualInstance {
    pub interval: (f64, f64),
    pub panels: usize,
    pub base: f64,
    /// `(x_k, y_k, w_k)`.
    pub bumps: Vec<(f64, f64, f64)>,
    pub g0: RationalFunction,
}

impl DualInstance {
    pub fn eval(&self, x: f64) -> f64 {
        self.base + self.bumps.iter().map(|(c, y, w)| w * y / ((x - c).powi(2) + y * y)).sum::<f64>()
    }
}

pub fn dual_instance(seed: u64, size: usize) -> Result<DualInstance> {
    check_request(0, size, 2)?;
    let mut rng = rng_from_seed(seed);
    let base = rng.gen_range(0.05..0.5);
    let mut g0 = RationalFunction::constant(real(base));
    let mut bumps = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let (c, y, w) = (rng.gen_range(-1.2..1.2), rng.gen_range(0.25..0.8), rng.gen_range(0.05..0.5));
        g0 = g0.add(&RationalFunction::new(vec![real(w * y)], vec![real(c * c + y * y), real(-2.0 * c), real(1.0)])?)?;
        bumps.push((c, y, w));
    }
    Ok(DualInstance { interval: (-1.0, 1.0), panels: size, base, bumps, g0 })
}
