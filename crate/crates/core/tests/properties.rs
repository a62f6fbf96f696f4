use proptest::prelude::*;
use rand::Rng;

use kappa_core::circle::{
    boundary_form_disk, fourier_coefficients, hankel_rank, BoundaryDataDisk, CircleGrid, HANKEL_GAP_TOL,
};
use kappa_core::forms::{cf_matrices_tol, nudelman_form, NudelmanData};
use kappa_core::line::{basis_coefficients, loewner_form, IntervalSet};
use kappa_core::linalg::{eigenvalues, spectral_norm, INERTIA_TOL};
use kappa_core::model_space::{
    compressed_shift_closed_form, gram_form_general, lower_toeplitz, phi_of_t, rational_of_matrix,
    sarason_defect_matrix, CommutantCandidate, ModelSpace,
};
use kappa_core::rational::{cayley_value, schur_class_check, BlaschkeProduct, Domain, RationalFunction};
use kappa_core::seeds::{self, rng_from_seed};
use kappa_core::{
    inertia, kernel_matrix_schur, krein_langer_factorize, solve_cf_kappa, solve_pick_kappa, CMatrix, CVector,
    HermitianMatrix, SearchConfig, SolveStatus, C64,
};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn complex_in_disk(r: f64) -> impl Strategy<Value = C64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| C64::from_polar(m, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blaschke_is_unimodular_on_circle(zeros in prop::collection::vec(complex_in_disk(0.95), 0..6), seed: u64) {
        let b = BlaschkeProduct::normalized(zeros).unwrap();
        let mut rng = rng_from_seed(seed);
        for _ in 0..100 {
            let u = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            prop_assert!((b.eval(u).unwrap().norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn factorization_reproduces_s(seed: u64, kappa in 0usize..=3) {
        let mut rng = rng_from_seed(seed);
        let pair = seeds::random_pair(&mut rng, kappa).unwrap();
        let s = seeds::pair_function(&pair).unwrap();
        let back = krein_langer_factorize(&s, 1e-9).unwrap();
        prop_assert_eq!(back.kappa, kappa);
        let mut checked = 0;
        while checked < 200 {
            let z = C64::from_polar(rng.gen_range(0.0f64..0.99).sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            if pair.b.zeros().iter().any(|a| (z - a).norm() < 1e-3) {
                continue;
            }
            let direct = s.eval(z).unwrap();
            let split = back.f.eval(z).unwrap() / back.b.eval(z).unwrap();
            prop_assert!((direct - split).norm() <= 1e-9 * direct.norm().max(1.0));
            checked += 1;
        }
    }

    #[test]
    fn cayley_of_constant_is_in_upper_half_plane(s in complex_in_disk(0.999)) {
        prop_assert!(cayley_value(s).unwrap().im > 0.0);
    }

    #[test]
    fn factorization_degree_counts_interior_roots(
        inside in prop::collection::vec(complex_in_disk(0.9), 0..4),
        outside in prop::collection::vec((1.2f64..3.0, 0.0..std::f64::consts::TAU), 0..3),
    ) {
        // den = ∏ (z - r); numerator z + 5 keeps S bounded by a constant on the circle
        let roots: Vec<C64> = inside.iter().copied().chain(outside.iter().map(|(m, a)| C64::from_polar(*m, *a))).collect();
        let mut den = vec![ONE];
        for r in &roots {
            let mut next = vec![C64::new(0.0, 0.0); den.len() + 1];
            for (k, c) in den.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            den = next;
        }
        // companion matrix oracle for the number of roots in the disk
        let d = den.len() - 1;
        let mut inside_count = 0;
        if d > 0 {
            let comp = CMatrix::from_fn(d, d, |i, j| if j == d - 1 { -den[i] } else if i == j + 1 { ONE } else { C64::new(0.0, 0.0) });
            inside_count = eigenvalues(&comp).iter().filter(|e| e.norm() < 1.0).count();
        }
        let tiny = RationalFunction::new(vec![C64::new(1e-3, 0.0)], den).unwrap();
        if let Ok(pair) = krein_langer_factorize(&tiny, 1e-9) {
            prop_assert_eq!(pair.b.degree(), inside_count);
        }
        prop_assert_eq!(inside_count, inside.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn nudelman_bound_for_diagonal_data(seed: u64, kappa in 0usize..=3, n in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let pair = seeds::random_pair(&mut rng, kappa).unwrap();
        let pts = seeds::separated_points(&mut rng, n, 0.9, 0.05, pair.b.zeros());
        let a = CMatrix::from_diagonal(&CVector::from_column_slice(&pts));
        let c = CVector::from_fn(n, |_, _| C64::new(rng.gen_range(0.2..1.0), rng.gen_range(-1.0..1.0)));
        let b = kappa_core::model_space::blaschke_of_matrix(&pair.b, &a).unwrap().try_inverse().unwrap()
            * rational_of_matrix(&pair.f, &a).unwrap()
            * &c;
        let form = nudelman_form(&NudelmanData::new(a, b, c).unwrap(), 1e-14).unwrap();
        prop_assert!(inertia(&form, INERTIA_TOL).n_neg <= kappa);
    }

    #[test]
    fn congruence_preserves_inertia(seed: u64, n in 1usize..=7) {
        let mut rng = rng_from_seed(seed);
        let mut g = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x = CMatrix::from_fn(n, n, |_, _| g());
        let d: Vec<f64> = (0..n).map(|k| if k % 3 == 0 { -1.0 - k as f64 } else { 1.0 + k as f64 }).collect();
        let h = HermitianMatrix::symmetrize(&x * CMatrix::from_diagonal(&CVector::from_iterator(n, d.iter().map(|v| C64::new(*v, 0.0)))) * x.adjoint());
        let q = CMatrix::identity(n, n) + CMatrix::from_fn(n, n, |_, _| g()) * C64::new(0.2, 0.0);
        prop_assume!(q.clone().try_inverse().is_some());
        let a = inertia(&h, INERTIA_TOL);
        let b = inertia(&h.congruence(&q), INERTIA_TOL);
        prop_assert_eq!(a.n_neg, b.n_neg);
        prop_assert_eq!(a.n_pos, b.n_pos);
    }

    #[test]
    fn adding_samples_never_lowers_n_neg(seed: u64, kappa in 0usize..=3) {
        let mut rng = rng_from_seed(seed);
        let pair = seeds::random_pair(&mut rng, kappa).unwrap();
        let mut pts = seeds::near_pole_points(&mut rng, &pair);
        let avoid: Vec<C64> = pts.iter().chain(pair.b.zeros()).copied().collect();
        pts.extend(seeds::separated_points(&mut rng, 8, 0.9, 0.05, &avoid));
        let mut last = 0;
        for k in 1..=pts.len() {
            let m = kernel_matrix_schur(|z| pair.eval(z), &pts[..k]).unwrap();
            let n_neg = inertia(&m, INERTIA_TOL).n_neg;
            prop_assert!(n_neg >= last && n_neg <= kappa);
            last = n_neg;
        }
        prop_assert_eq!(last, kappa);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn cf_bridge_through_jordan_block(seed: u64, n in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let w: Vec<C64> = (0..=n).map(|_| C64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2))).collect();
        // C = z^{n+1}: the compressed shift is the nilpotent Jordan block
        let t = compressed_shift_closed_form(&vec![C64::new(0.0, 0.0); n + 1]);
        let r = lower_toeplitz(&w, n + 1);
        let cand = CommutantCandidate::against(r.clone(), &t).unwrap();
        prop_assert!(cand.commutation_residual < 1e-12);
        let defect = HermitianMatrix::symmetrize(CMatrix::identity(n + 1, n + 1) - &r * r.adjoint());
        prop_assert_eq!(inertia(&defect, INERTIA_TOL).triple(), cf_matrices_tol(&w, INERTIA_TOL).inertia.triple());
    }

    #[test]
    fn schur_symbols_give_contractions(seed: u64, deg in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let zeros = seeds::separated_points(&mut rng, deg, 0.85, 0.1, &[]);
        let m = ModelSpace::build(&BlaschkeProduct::new(zeros, ONE, Domain::Disk).unwrap()).unwrap();
        let f = seeds::random_schur0(&mut rng, 1, &[]).unwrap();
        let r = phi_of_t(&f, &m).unwrap();
        let cand = CommutantCandidate::new(r, &m).unwrap();
        prop_assert_eq!(inertia(&sarason_defect_matrix(&cand, &m, 1e-8).unwrap(), INERTIA_TOL).n_neg, 0);

        // non-inner C = (1 + z)/3 on a truncated coefficient space
        let c = RationalFunction::polynomial(vec![C64::new(1.0 / 3.0, 0.0), C64::new(1.0 / 3.0, 0.0)]).unwrap();
        let r = lower_toeplitz(&f.taylor(16).unwrap(), 16);
        let g = gram_form_general(&c, &r, 16, 1e-9).unwrap();
        prop_assert_eq!(g.inertia.n_neg, 0);
        prop_assert_eq!(g.defect_inertia.n_neg, 0);
    }

    #[test]
    fn functional_calculus_is_multiplicative(seed: u64, deg in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let zeros = seeds::separated_points(&mut rng, deg, 0.85, 0.1, &[]);
        let m = ModelSpace::build(&BlaschkeProduct::new(zeros, ONE, Domain::Disk).unwrap()).unwrap();
        let phi = seeds::random_schur0(&mut rng, 1, &[]).unwrap();
        let psi = seeds::random_schur0(&mut rng, 2, &[]).unwrap();
        let lhs = phi_of_t(&phi.mul(&psi).unwrap(), &m).unwrap();
        let rhs = phi_of_t(&phi, &m).unwrap() * phi_of_t(&psi, &m).unwrap();
        prop_assert!(spectral_norm(&(lhs - rhs)) <= 1e-8);
    }

    #[test]
    fn hankel_rank_is_blaschke_degree(seed: u64, kappa in 0usize..=3) {
        let mut rng = rng_from_seed(seed);
        let pair = seeds::random_pair(&mut rng, kappa).unwrap();
        prop_assume!(pair.b.zeros().iter().all(|a| pair.f.eval(*a).unwrap().norm() >= 0.1));
        let s = seeds::pair_function(&pair).unwrap();
        let h = hankel_rank(&seeds::circle_samples(&s, 4096).unwrap(), 16, HANKEL_GAP_TOL).unwrap();
        prop_assert_eq!(h.rank, kappa);
        prop_assert!(h.gap_ratio >= 10.0);
    }

    #[test]
    fn disk_form_grows_monotonically_on_an_arc(seed: u64, kappa in 0usize..=3) {
        let mut rng = rng_from_seed(seed);
        let pair = seeds::random_pair(&mut rng, kappa).unwrap();
        let s = seeds::pair_function(&pair).unwrap();
        let grid = CircleGrid::arcs(4096, &[(0.3, 5.5)]).unwrap();
        let cfun = |u: C64| ONE + u * 0.3;
        let data = BoundaryDataDisk::from_fns(&grid, |u| s.eval(u).unwrap() * cfun(u), cfun);
        let mut last = 0;
        for k in 1..=2 * kappa + 4 {
            let form = boundary_form_disk(&grid, &data, &grid.monomial_basis(k), 256, INERTIA_TOL).unwrap();
            prop_assert!(form.inertia.n_neg >= last && form.inertia.n_neg <= kappa);
            last = form.inertia.n_neg;
        }
        prop_assert_eq!(last, kappa);
    }

    #[test]
    fn grid_parseval(seed: u64) {
        let mut rng = rng_from_seed(seed);
        let grid = CircleGrid::arcs(1024, &[(1.0, 4.0)]).unwrap();
        let x: Vec<C64> = (0..1024).map(|m| if grid.in_delta(m) { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { C64::new(0.0, 0.0) }).collect();
        let coef: f64 = fourier_coefficients(&x).iter().map(|c| c.norm_sqr()).sum();
        let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / 1024.0;
        prop_assert!((coef - norm).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn basis_parseval_converges(a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let set = IntervalSet::interval(-1.0, 1.0, 16).unwrap();
        let phi = move |t: f64| C64::new((1.0 - t * t).powi(3) * (1.0 + a * t + b * t * t), 0.0);
        // ‖φ‖² by a fine Gauss rule
        let norm2: f64 = kappa_core::line::quadrature::composite_gauss(-1.0, 1.0, 64).iter().map(|(t, w)| w * phi(*t).norm_sqr()).sum();
        let mut last = f64::INFINITY;
        for j in [16, 32, 64, 128] {
            let total: f64 = basis_coefficients(&set, phi, j).iter().map(|v| v.norm_sqr()).sum();
            let defect = norm2 - total;
            prop_assert!(defect >= -1e-9 && defect <= last + 1e-12);
            last = defect;
        }
        prop_assert!(last <= 1e-6, "defect {}", last);
    }

    #[test]
    fn loewner_count_never_exceeds_negative_residues(seed: u64, kappa in 0usize..=2) {
        let mut rng = rng_from_seed(seed);
        let mut poles: Vec<f64> = Vec::new();
        while poles.len() < kappa + 1 {
            let t = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(1.05..4.0);
            if poles.iter().all(|p| (p - t).abs() > 0.05) {
                poles.push(t);
            }
        }
        let residues: Vec<f64> = (0..=kappa).map(|k| if k < kappa { -rng.gen_range(0.01..2.0) } else { rng.gen_range(0.01..2.0) }).collect();
        let f0 = seeds::pole_residue_function(rng.gen_range(0.0..1.0), 0.0, &poles, &residues).unwrap();
        let set = IntervalSet::interval(-1.0, 1.0, 8).unwrap();
        let data = seeds::real_line_data(&set, &f0).unwrap();
        if let Ok(form) = loewner_form(&data, &set, INERTIA_TOL) {
            prop_assert!(form.inertia.n_neg <= kappa);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn solved_reports_reverify(seed in 0u64..10_000, kappa in 0usize..=2) {
        let cfg = SearchConfig { seed, ..SearchConfig::default() };
        let inst = seeds::pick_instance(seed, kappa, 5).unwrap();
        let rep = solve_pick_kappa(&inst.points, &inst.values, &cfg).unwrap();
        if rep.status == SolveStatus::Solved {
            let pair = rep.pair.as_ref().unwrap();
            prop_assert!(rep.interpolation_residual.unwrap() <= 1e-8);
            prop_assert!(schur_class_check(&pair.f, 1e-9).unwrap().is_schur0);
            prop_assert!(pair.b.degree() >= rep.certificate.n_neg);
        }
        let again = solve_pick_kappa(&inst.points, &inst.values, &cfg).unwrap();
        prop_assert_eq!(rep.attempts, again.attempts);

        let cf = seeds::cf_instance(seed, kappa, 6).unwrap();
        let rep = solve_cf_kappa(&cf.w, &cfg).unwrap();
        if rep.status == SolveStatus::Solved {
            let n = cf.w.len() - 1;
            prop_assert!(rep.matching_order.unwrap() >= n + 1 - rep.certificate.n_neg);
            prop_assert!(rep.pair.unwrap().b.degree() >= rep.certificate.n_neg);
        }
    }
}
