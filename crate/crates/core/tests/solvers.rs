use kappa_core::model_space::{blaschke_of_matrix, phi_of_t, CommutantCandidate, ModelSpace};
use kappa_core::rational::{BlaschkeProduct, Domain, RationalFunction};
use kappa_core::{pick_matrix, inertia, solve_cf_kappa, solve_pick_kappa, solve_sarason, SearchConfig, SolveStatus, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn seed_f0() -> RationalFunction {
    // (z + 0.3) / (2 - 0.5 z): analytic on the closed disk with sup < 1
    RationalFunction::new(vec![c(0.3, 0.0), ONE], vec![c(2.0, 0.0), c(-0.5, 0.0)]).unwrap()
}

fn seed_b0(zeros: &[C64]) -> BlaschkeProduct {
    BlaschkeProduct::new(zeros.to_vec(), ONE, Domain::Disk).unwrap()
}

#[test]
fn pick_kappa_two_round_trip() {
    let f0 = seed_f0();
    let b0 = seed_b0(&[c(0.4, 0.3), c(-0.5, 0.1)]);
    let pts = [c(0.0, 0.0), c(0.6, 0.0), c(-0.3, 0.5), c(0.1, -0.7), c(-0.6, -0.2), c(0.35, 0.55)];
    let vals: Vec<C64> = pts.iter().map(|z| f0.eval(*z).unwrap() / b0.eval(*z).unwrap()).collect();
    let cert = inertia(&pick_matrix(&pts, &vals).unwrap(), 1e-9);
    assert_eq!(cert.n_neg, 2);
    let rep = solve_pick_kappa(&pts, &vals, &SearchConfig::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Solved, "{:?}", rep.attempts);
    let pair = rep.pair.unwrap();
    assert!(pair.kappa >= cert.n_neg);
    assert!(rep.interpolation_residual.unwrap() <= 1e-8);
    assert!(rep.verification.unwrap().residual <= 1e-6);
    for (z, w) in pts.iter().zip(&vals) {
        assert!((pair.f.eval(*z).unwrap() - pair.b.eval(*z).unwrap() * w).norm() <= 1e-8);
    }
}

#[test]
fn cf_round_trip_matching_order() {
    let f0 = seed_f0();
    let b0 = seed_b0(&[c(0.5, 0.2), c(-0.3, -0.4)]);
    let s = f0.div(&b0.to_rational().unwrap()).unwrap();
    let w = s.taylor(7).unwrap();
    let rep = solve_cf_kappa(&w, &SearchConfig::default()).unwrap();
    assert_eq!(rep.certificate.n_neg, 2);
    assert_eq!(rep.status, SolveStatus::Solved, "{:?}", rep.attempts);
    assert!(rep.matching_order.unwrap() >= 5, "order {:?}", rep.matching_order);
    assert!(rep.pair.unwrap().kappa >= 2);
}

#[test]
fn cf_hand_example() {
    // B with zero 1/4 turns w = (0, 2) into (0, -1/2), completed by f = -z/2
    let b = seed_b0(&[c(0.25, 0.0)]);
    let bt = b.to_rational().unwrap().taylor(2).unwrap();
    let prod = [bt[0] * 0.0, bt[0] * 2.0 + bt[1] * 0.0];
    assert!((prod[1] - c(-0.5, 0.0)).norm() < 1e-14);
    let rep = solve_cf_kappa(&[c(0.0, 0.0), c(2.0, 0.0)], &SearchConfig::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Solved);
}

#[test]
fn sarason_seeded_s1() {
    let cb = seed_b0(&[c(0.2, 0.1), c(-0.4, 0.3), c(0.1, -0.5)]);
    let m = ModelSpace::build(&cb).unwrap();
    let f0 = seed_f0();
    let b0 = seed_b0(&[c(0.6, 0.0)]);
    let b0t = blaschke_of_matrix(&b0, m.t()).unwrap();
    let r = phi_of_t(&f0, &m).unwrap() * b0t.try_inverse().unwrap();
    let cand = CommutantCandidate::new(r, &m).unwrap();
    let rep = solve_sarason(&m, &cand, &SearchConfig::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Solved, "{:?}", rep.attempts);
    assert!(rep.identity_residual.unwrap() <= 1e-6);
    assert_eq!(rep.certificate.n_neg, 1);
}

#[test]
fn sarason_definite() {
    let cb = seed_b0(&[c(0.2, 0.1), c(-0.4, 0.3)]);
    let m = ModelSpace::build(&cb).unwrap();
    let r = phi_of_t(&seed_f0(), &m).unwrap();
    let rep = solve_sarason(&m, &CommutantCandidate::new(r, &m).unwrap(), &SearchConfig::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Solved);
    assert_eq!(rep.pair.unwrap().kappa, 0);
}

#[test]
fn repeated_zeros_are_reported() {
    let cb = seed_b0(&[c(0.2, 0.1), c(0.2, 0.1)]);
    let m = ModelSpace::build(&cb).unwrap();
    let r = phi_of_t(&seed_f0(), &m).unwrap();
    let err = solve_sarason(&m, &CommutantCandidate::new(r, &m).unwrap(), &SearchConfig::default()).unwrap_err();
    assert!(matches!(err, kappa_core::KappaError::RepeatedZeros));
}

#[test]
fn same_seed_same_report() {
    let pts = [c(0.0, 0.0), c(0.5, 0.1), c(-0.2, 0.4)];
    let vals = [c(1.5, 0.0), c(0.2, -0.9), c(-1.1, 0.3)];
    let cfg = SearchConfig { seed: 42, starts: 12, ..SearchConfig::default() };
    let a = solve_pick_kappa(&pts, &vals, &cfg).unwrap();
    let b = solve_pick_kappa(&pts, &vals, &cfg).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.attempts, b.attempts);
    if let (Some(x), Some(y)) = (a.pair, b.pair) {
        assert_eq!(x.b, y.b);
        assert_eq!(x.f, y.f);
    }
}
