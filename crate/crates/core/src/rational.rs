//! Rational functions, Blaschke products, Kreĭn–Langer factorization and the Cayley map.

use std::f64::consts::PI;

use crate::error::{KappaError, Result};
use crate::poly::{self, ONE, ZERO};
use crate::C64;

/// Relative tolerance for cancelling common numerator/denominator roots.
pub const GCD_TOL: f64 = 1e-10;
/// Default number of circle nodes in the Schur-class grid test.
pub const SCHUR_GRID: usize = 4096;
/// Band around the unit circle inside which a pole is neither interior nor exterior.
pub const CIRCLE_BAND: f64 = 1e-9;

/// A complex rational function `num / den` in reduced form with monic denominator.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: Vec<C64>,
    den: Vec<C64>,
    poles: Vec<C64>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl RationalFunction {
    /// Builds and reduces `num / den`. Coefficients are in ascending degree.
    pub fn new(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(num, den, GCD_TOL)
    }

    pub fn with_tolerance(num: Vec<C64>, den: Vec<C64>, tol: f64) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(KappaError::InvalidInput("empty coefficient list".into()));
        }
        if num.iter().chain(den.iter()).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(KappaError::InvalidInput("non-finite coefficient".into()));
        }
        let mut num = poly::trim(num, 1e-15);
        let mut den = poly::trim(den, 1e-15);
        if poly::is_zero(&den) {
            return Err(KappaError::InvalidInput("denominator is identically zero".into()));
        }
        if poly::is_zero(&num) {
            return Ok(Self { num: vec![ZERO], den: vec![ONE], poles: Vec::new() });
        }
        // exact common powers of z
        while num.len() > 1 && den.len() > 1 && num[0] == ZERO && den[0] == ZERO {
            num.remove(0);
            den.remove(0);
        }
        let mut kept = Vec::new();
        for r in poly::roots(&den) {
            let scale = poly::eval_abs(&num, r).max(f64::MIN_POSITIVE);
            if poly::degree(&num) > 0 && poly::eval(&num, r).norm() <= tol * scale {
                num = poly::deflate(&num, r);
                den = poly::deflate(&den, r);
            } else {
                kept.push(r);
            }
        }
        let lead = den[den.len() - 1];
        let num = poly::scale(&num, ONE / lead);
        let mut den = poly::scale(&den, ONE / lead);
        let d = den.len() - 1;
        den[d] = ONE;
        Ok(Self { num, den, poles: kept })
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Result<Self> {
        Self::new(coeffs, vec![ONE])
    }

    pub fn constant(c: C64) -> Self {
        Self { num: vec![c], den: vec![ONE], poles: Vec::new() }
    }

    /// The identity map `z`.
    pub fn z() -> Self {
        Self { num: vec![ZERO, ONE], den: vec![ONE], poles: Vec::new() }
    }

    pub fn numerator(&self) -> &[C64] {
        &self.num
    }

    pub fn denominator(&self) -> &[C64] {
        &self.den
    }

    /// Denominator roots, i.e. the poles after reduction.
    pub fn poles(&self) -> Vec<C64> {
        if self.poles.len() == poly::degree(&self.den) {
            self.poles.clone()
        } else {
            poly::roots(&self.den)
        }
    }

    pub fn zeros(&self) -> Vec<C64> {
        poly::roots(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        poly::is_zero(&self.num)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = poly::eval(&self.den, z);
        let hit = self.poles().iter().any(|p| (z - p).norm() <= 1e-14 * p.norm().max(1.0));
        if hit || d == ZERO {
            return Err(KappaError::PoleHit(z));
        }
        Ok(poly::eval(&self.num, z) / d)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(poly::mul(&self.num, &other.num), poly::mul(&self.den, &other.den))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = poly::add(&poly::mul(&self.num, &other.den), &poly::mul(&other.num, &self.den));
        Self::new(n, poly::mul(&self.den, &other.den))
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == ZERO {
            return Self::constant(ZERO);
        }
        Self { num: poly::scale(&self.num, s), den: self.den.clone(), poles: self.poles.clone() }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(KappaError::InvalidInput("reciprocal of the zero function".into()));
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    /// First `n` Taylor coefficients at the origin.
    pub fn taylor(&self, n: usize) -> Result<Vec<C64>> {
        if self.den[0] == ZERO {
            return Err(KappaError::PoleHit(ZERO));
        }
        Ok(poly::series_div(&self.num, &self.den, n))
    }
}

/// Domain on which a Blaschke product lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Disk,
    HalfPlane,
}

/// Finite Blaschke product `c ∏ (z - a)/(1 - ā z)` (disk) or `c ∏ (z - a)/(z - ā)` (half-plane).
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
    constant: C64,
    domain: Domain,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<C64>, constant: C64, domain: Domain) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(KappaError::InvalidInput(format!("constant {constant} is not unimodular")));
        }
        for &a in &zeros {
            let inside = match domain {
                Domain::Disk => a.norm() < 1.0,
                Domain::HalfPlane => a.im > 0.0,
            };
            if !inside || !a.re.is_finite() || !a.im.is_finite() {
                return Err(KappaError::PointOnBoundary(a));
            }
        }
        Ok(Self { zeros, constant, domain })
    }

    /// Disk product whose first nonzero Taylor coefficient at 0 is positive.
    pub fn normalized(zeros: Vec<C64>) -> Result<Self> {
        let p = zeros.iter().filter(|a| **a != ZERO).fold(ONE, |acc, a| acc * (-a));
        let c = p.conj() / p.norm();
        Self::new(zeros, c, Domain::Disk)
    }

    pub fn identity() -> Self {
        Self { zeros: Vec::new(), constant: ONE, domain: Domain::Disk }
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Evaluates factor by factor.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut acc = self.constant;
        for &a in &self.zeros {
            let (num, den, pole) = match self.domain {
                Domain::Disk => (z - a, ONE - a.conj() * z, if a == ZERO { None } else { Some(ONE / a.conj()) }),
                Domain::HalfPlane => (z - a, z - a.conj(), Some(a.conj())),
            };
            if let Some(p) = pole {
                if (z - p).norm() <= 1e-14 || den == ZERO {
                    return Err(KappaError::PoleHit(z));
                }
            }
            acc *= num / den;
        }
        Ok(acc)
    }

    /// Coefficient form of the product. Intended for low degrees.
    pub fn to_rational(&self) -> Result<RationalFunction> {
        let (num, den) = match self.domain {
            Domain::Disk => {
                let mut den = vec![ONE];
                for a in &self.zeros {
                    den = poly::mul(&den, &[ONE, -a.conj()]);
                }
                (poly::from_roots(&self.zeros, self.constant), den)
            }
            Domain::HalfPlane => {
                let conj: Vec<C64> = self.zeros.iter().map(|a| a.conj()).collect();
                (poly::from_roots(&self.zeros, self.constant), poly::from_roots(&conj, ONE))
            }
        };
        RationalFunction::new(num, den)
    }
}

/// Kreĭn–Langer pair `(f, B)` representing `S = f / B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurPair {
    pub f: RationalFunction,
    pub b: BlaschkeProduct,
    pub kappa: usize,
    /// True when `f` does not vanish (to 1e-8) at any zero of `B`.
    pub coprime: bool,
}

impl SchurPair {
    /// Validates `f` against the 4096-point Schur test and records coprimality.
    pub fn new(f: RationalFunction, b: BlaschkeProduct) -> Result<Self> {
        let check = schur_class_check(&f, CIRCLE_BAND)?;
        if !check.is_schur0 {
            return Err(KappaError::NotGeneralizedSchur { sup: check.sup_estimate });
        }
        let coprime = b
            .zeros()
            .iter()
            .all(|a| f.eval(*a).map(|v| v.norm() > 1e-8).unwrap_or(true));
        let kappa = b.degree();
        Ok(Self { f, b, kappa, coprime })
    }

    /// `S(z) = f(z) / B(z)`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let bz = self.b.eval(z)?;
        if bz.norm() <= 1e-14 {
            return Err(KappaError::PoleHit(z));
        }
        Ok(self.f.eval(z)? / bz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurCheck {
    pub is_schur0: bool,
    pub sup_estimate: f64,
}

/// Grid test for membership in S₀ with the default grid.
pub fn schur_class_check(f: &RationalFunction, tol: f64) -> Result<SchurCheck> {
    schur_class_check_grid(f, tol, SCHUR_GRID)
}

/// Grid test for membership in S₀: max |f| on `n` circle nodes and absence of poles in the disk.
pub fn schur_class_check_grid(f: &RationalFunction, tol: f64, n: usize) -> Result<SchurCheck> {
    let poles = f.poles();
    if let Some(p) = poles.iter().find(|p| p.norm() < 1.0 - tol) {
        return Err(KappaError::InteriorPole(*p));
    }
    let on_circle = poles.iter().any(|p| p.norm() <= 1.0 + tol);
    let mut sup = 0.0f64;
    for m in 0..n {
        let u = C64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
        match f.eval(u) {
            Ok(v) => sup = sup.max(v.norm()),
            Err(_) => sup = f64::INFINITY,
        }
    }
    Ok(SchurCheck { is_schur0: sup <= 1.0 + tol && !on_circle, sup_estimate: sup })
}

/// Splits `S` into `f / B` with `B` collecting the poles of `S` inside the disk.
pub fn krein_langer_factorize(s: &RationalFunction, tol: f64) -> Result<SchurPair> {
    let poles = s.poles();
    if let Some(p) = poles.iter().find(|p| (p.norm() - 1.0).abs() <= tol) {
        return Err(KappaError::BoundaryPole(*p));
    }
    let (interior, exterior): (Vec<C64>, Vec<C64>) = poles.into_iter().partition(|p| p.norm() < 1.0);
    let b = BlaschkeProduct::normalized(interior.clone())?;
    // f = c N / (∏_ext (z - r) ∏_int (1 - ā z)), with the interior linear factors cancelled exactly
    let mut den = poly::from_roots(&exterior, ONE);
    for a in &interior {
        den = poly::mul(&den, &[ONE, -a.conj()]);
    }
    let num = poly::scale(s.numerator(), b.constant());
    let f = RationalFunction::new(num, den)?;
    let check = schur_class_check(&f, tol)?;
    if !check.is_schur0 {
        return Err(KappaError::NotGeneralizedSchur { sup: check.sup_estimate });
    }
    let coprime = b.zeros().iter().all(|a| f.eval(*a).map(|v| v.norm() > 1e-8).unwrap_or(true));
    Ok(SchurPair { kappa: b.degree(), f, b, coprime })
}

/// `i (1 + s) / (1 - s)` for a single value.
pub fn cayley_value(s: C64) -> Result<C64> {
    let d = ONE - s;
    if d.norm() < 1e-14 {
        return Err(KappaError::DegenerateValue(s));
    }
    Ok(C64::new(0.0, 1.0) * (ONE + s) / d)
}

/// Disk coordinate `(z - i)/(z + i)` of a half-plane point.
pub fn halfplane_to_disk(z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (z - i) / (z + i)
}

/// Inverse of [`halfplane_to_disk`].
pub fn disk_to_halfplane(w: C64) -> C64 {
    C64::new(0.0, 1.0) * (ONE + w) / (ONE - w)
}

/// Lifts a callable Schur function on C₊ to the Nevanlinna function `i(1+S)/(1-S)`.
pub fn cayley_schur_to_nevanlinna<F>(s: F) -> impl Fn(C64) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    move |z| cayley_value(s(z)?)
}

/// Rational version: given a disk function `S₀`, returns `f(z) = i(1+S(z))/(1-S(z))`
/// with `S(z) = S₀((z - i)/(z + i))`.
pub fn cayley_rational(s0: &RationalFunction) -> Result<RationalFunction> {
    let d = poly::degree(s0.numerator()).max(poly::degree(s0.denominator()));
    let p = poly::compose_cayley(s0.numerator(), d);
    let q = poly::compose_cayley(s0.denominator(), d);
    let diff = poly::trim(poly::add(&q, &poly::scale(&p, -ONE)), 1e-14);
    if poly::is_zero(&diff) {
        return Err(KappaError::DegenerateValue(ONE));
    }
    let num = poly::scale(&poly::add(&q, &p), C64::new(0.0, 1.0));
    RationalFunction::new(num, diff)
}

/// Disk-form lift `S(z) = S₀((z - i)/(z + i))` as a rational function on C₊.
pub fn compose_with_cayley(s0: &RationalFunction) -> Result<RationalFunction> {
    let d = poly::degree(s0.numerator()).max(poly::degree(s0.denominator()));
    RationalFunction::new(
        poly::compose_cayley(s0.numerator(), d),
        poly::compose_cayley(s0.denominator(), d),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn reduces_common_factor() {
        // (z - 1/2)(z + 3) / ((z - 1/2) * 2)
        let num = poly::from_roots(&[c(0.5), c(-3.0)], ONE);
        let den = poly::from_roots(&[c(0.5)], c(2.0));
        let r = RationalFunction::new(num, den).unwrap();
        assert_eq!(r.denominator().len(), 1);
        assert!((r.numerator()[0] - c(1.5)).norm() < 1e-12);
        assert!((r.numerator()[1] - c(0.5)).norm() < 1e-12);
    }

    #[test]
    fn blaschke_trivial_cases() {
        let one = BlaschkeProduct::identity();
        assert_eq!(one.eval(C64::new(0.3, 7.0)).unwrap(), ONE);
        let b = BlaschkeProduct::new(vec![c(0.5)], ONE, Domain::Disk).unwrap();
        assert_eq!(b.eval(c(0.5)).unwrap(), ZERO);
        let u = C64::from_polar(1.0, 1.234);
        assert!((b.eval(u).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(matches!(b.eval(c(2.0)), Err(KappaError::PoleHit(_))));
    }

    #[test]
    fn halfplane_blaschke_is_unimodular_on_line() {
        let b = BlaschkeProduct::new(vec![C64::new(0.3, 2.0), C64::new(-1.0, 0.5)], ONE, Domain::HalfPlane).unwrap();
        for x in [-3.0, 0.0, 0.7, 10.0] {
            assert!((b.eval(c(x)).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn factorize_inverse_square() {
        let s = RationalFunction::new(vec![ONE], vec![ZERO, ZERO, ONE]).unwrap();
        let pair = krein_langer_factorize(&s, 1e-9).unwrap();
        assert_eq!(pair.kappa, 2);
        assert_eq!(pair.b.zeros(), &[ZERO, ZERO]);
        assert!((pair.f.eval(c(0.3)).unwrap() - ONE).norm() < 1e-12);
    }

    #[test]
    fn factorize_schur_function_has_trivial_b() {
        let s = RationalFunction::polynomial(vec![ZERO, c(0.5)]).unwrap();
        let pair = krein_langer_factorize(&s, 1e-9).unwrap();
        assert_eq!(pair.kappa, 0);
        assert_eq!(pair.b.eval(c(0.2)).unwrap(), ONE);
    }

    #[test]
    fn factorize_cancels_pole() {
        // S = z(1 - z/2)/(z - 1/2)
        let s = RationalFunction::new(vec![ZERO, ONE, c(-0.5)], vec![c(-0.5), ONE]).unwrap();
        let pair = krein_langer_factorize(&s, 1e-9).unwrap();
        assert_eq!(pair.kappa, 1);
        assert!((pair.b.zeros()[0] - c(0.5)).norm() < 1e-12);
        // normalized B(0) = 1/2 > 0, so B = -(z - 1/2)/(1 - z/2) and f = -z
        assert!((pair.b.eval(ZERO).unwrap() - c(0.5)).norm() < 1e-12);
        let z = C64::new(0.1, -0.4);
        let unit = pair.f.eval(z).unwrap() / z;
        assert!((unit.norm() - 1.0).abs() < 1e-12);
        assert!((pair.f.eval(c(0.5)).unwrap().norm() - 0.5).abs() < 1e-12);
        assert!(pair.coprime);
        let check = schur_class_check(&pair.f, 1e-9).unwrap();
        assert!(check.is_schur0);
        assert!((check.sup_estimate - 1.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_pole_rejected() {
        let s = RationalFunction::new(vec![ONE], vec![c(-1.0), ONE]).unwrap();
        assert!(matches!(krein_langer_factorize(&s, 1e-9), Err(KappaError::BoundaryPole(_))));
    }

    #[test]
    fn schur_check_examples() {
        let zero = RationalFunction::constant(ZERO);
        let r = schur_class_check(&zero, 1e-9).unwrap();
        assert!(r.is_schur0 && r.sup_estimate == 0.0);
        let two = RationalFunction::constant(c(2.0));
        let r = schur_class_check(&two, 1e-9).unwrap();
        assert!(!r.is_schur0 && r.sup_estimate == 2.0);
        let inner = RationalFunction::new(vec![c(-0.5), ONE], vec![ONE, c(-0.5)]).unwrap();
        let r = schur_class_check(&inner, 1e-9).unwrap();
        assert!(r.is_schur0 && (r.sup_estimate - 1.0).abs() < 1e-10);
        let bad = RationalFunction::new(vec![ONE], vec![c(-0.5), ONE]).unwrap();
        assert!(matches!(schur_class_check(&bad, 1e-9), Err(KappaError::InteriorPole(_))));
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(cayley_value(ZERO).unwrap(), C64::new(0.0, 1.0));
        assert_eq!(cayley_value(c(-1.0)).unwrap(), ZERO);
        assert!(matches!(cayley_value(ONE), Err(KappaError::DegenerateValue(_))));
        let f = cayley_rational(&RationalFunction::z()).unwrap();
        assert_eq!(f.numerator().len(), 2);
        assert!(f.numerator()[0].norm() < 1e-15);
        assert!((f.numerator()[1] - ONE).norm() < 1e-15);
        assert_eq!(f.denominator(), &[ONE]);
        let lifted = cayley_schur_to_nevanlinna(|z| Ok(halfplane_to_disk(z)));
        let z = C64::new(0.4, 1.3);
        assert!((lifted(z).unwrap() - z).norm() < 1e-14);
    }
}
