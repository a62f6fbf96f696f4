//! Dispatch from a parsed problem to the library.

use kappa_core::circle::{boundary_form_disk, hankel_rank, BoundaryDataDisk, CircleGrid, HANKEL_GAP_TOL};
use kappa_core::forms::{cf_matrices_tol, nudelman_form, NudelmanData};
use kappa_core::line::{
    dual_loewner_form, loewner_form, loewner_real_form, BoundaryDataLine, IntervalSet, LineForm, DEFAULT_PANELS,
};
use kappa_core::model_space::{phi_of_t, sarason_defect, CommutantCandidate, ModelSpace};
use kappa_core::{
    inertia, pick_matrix, solve_cf_kappa, solve_np0, solve_pick_kappa, solve_sarason, BlaschkeProduct, CMatrix,
    CVector, Domain, KappaError, RationalFunction, SearchConfig, SolveReport, SolveStatus, C64,
};

use crate::problem::{
    to_c64, to_c64_vec, BoundaryDiskProblem, Complex, DualLoewnerProblem, HankelProblem, LineSpec, LoewnerProblem,
    Problem, SolveConfig,
};
use crate::report::{EffectiveSettings, Report, Solution, Status};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_TRUNC: usize = 256;

/// Command-line overrides; they take precedence over values in the problem file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub trunc: Option<usize>,
    pub seed: Option<u64>,
    pub solve: bool,
}

/// Input errors: the problem could not be evaluated as stated.
#[derive(Debug)]
pub struct InputError(pub String);

impl From<KappaError> for InputError {
    fn from(e: KappaError) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<(), InputError>;

fn input(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

fn matrix(rows: &[Vec<Complex>], what: &str) -> Result<CMatrix, InputError> {
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(input(format!("{what}[{i}]: expected {n} entries, found {}", r.len())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| to_c64(&rows[i][j])))
}

pub fn run(problem: &Problem, raw: &[u8], ov: &Overrides) -> Result<Report, InputError> {
    let s = problem.settings();
    let settings = EffectiveSettings {
        tol: ov.tol.or(s.tol).unwrap_or(DEFAULT_TOL),
        grid: ov.grid.or(s.grid).unwrap_or(DEFAULT_GRID),
        trunc: ov.trunc.or(s.trunc).unwrap_or(DEFAULT_TRUNC),
    };
    if !(settings.tol > 0.0 && settings.tol < 1.0) {
        return Err(input(format!("tol: {} must lie in (0, 1)", settings.tol)));
    }
    let solve = match (&s.solve, ov.solve) {
        (Some(r), _) if r.config().is_some() => r.config(),
        (_, true) => Some(SolveConfig::default()),
        _ => None,
    };
    let mut report = Report::new(problem.kind(), raw, settings.clone());
    let search = solve.as_ref().map(|c| c.search(ov.seed));
    if let Some(cfg) = &search {
        report.note("search_seed", cfg.seed);
        report.note("search_starts", cfg.starts);
    }
    let solvable = matches!(problem, Problem::Pick(_) | Problem::Cf(_) | Problem::Sarason(_));
    if solve.is_some() && !solvable {
        return Err(input(format!("solve: not available for {} problems", problem.kind())));
    }

    let outcome = match problem {
        Problem::Pick(p) => {
            let z = to_c64_vec(&p.z);
            let w = to_c64_vec(&p.w);
            let cert = inertia(&pick_matrix(&z, &w)?, settings.tol);
            report.certify(&cert);
            solve_with(&mut report, solve.as_ref(), cert.n_neg, |cfg, max| {
                if max == Some(0) {
                    solve_np0(&z, &w)
                } else {
                    solve_pick_kappa(&z, &w, cfg)
                }
            }, search.as_ref())
        }
        Problem::Cf(p) => {
            let w = to_c64_vec(&p.w);
            let d = cf_matrices_tol(&w, settings.tol);
            report.certify(&d.inertia);
            solve_with(&mut report, solve.as_ref(), d.inertia.n_neg, |cfg, _| solve_cf_kappa(&w, cfg), search.as_ref())
        }
        Problem::Sarason(p) => {
            let zeros = to_c64_vec(&p.zeros);
            let c = BlaschkeProduct::new(zeros, C64::new(1.0, 0.0), Domain::Disk)?;
            let m = ModelSpace::build(&c)?;
            let r = match (&p.r, &p.symbol) {
                (Some(rows), None) => matrix(rows, "r")?,
                (None, Some(sym)) => phi_of_t(&sym.build()?, &m)?,
                _ => return Err(input("r: exactly one of `r` and `symbol` must be given")),
            };
            if r.nrows() != m.dim() {
                return Err(input(format!("r: expected {0}x{0}, found {1}x{1}", m.dim(), r.nrows())));
            }
            let cand = CommutantCandidate::new(r, &m)?;
            report.note("commutation_residual", cand.commutation_residual);
            let cert = sarason_defect(&cand, &m, settings.tol)?;
            report.certify(&cert);
            solve_with(&mut report, solve.as_ref(), cert.n_neg, |cfg, _| solve_sarason(&m, &cand, cfg), search.as_ref())
        }
        Problem::Nudelman(p) => {
            let a = matrix(&p.a, "a")?;
            let data = NudelmanData::new(a, CVector::from_vec(to_c64_vec(&p.b)), CVector::from_vec(to_c64_vec(&p.c)))?;
            report.note("admissible", data.is_admissible(settings.tol));
            let form = nudelman_form(&data, 1e-14)?;
            report.certify(&inertia(&form, settings.tol));
            Ok(())
        }
        Problem::BoundaryDisk(p) => boundary_disk(&mut report, p, &settings),
        Problem::Loewner(p) => line_form(&mut report, p, &settings, false),
        Problem::LoewnerReal(p) => line_form(&mut report, p, &settings, true),
        Problem::DualLoewner(p) => dual_form(&mut report, p, &settings),
        Problem::Hankel(p) => hankel(&mut report, p, &settings),
    };
    outcome?;
    Ok(report)
}

/// Maps numerical failures that are outcomes rather than input errors onto report statuses.
fn absorb(report: &mut Report, r: Result<(), KappaError>) -> Outcome {
    match r {
        Ok(()) => Ok(()),
        Err(KappaError::TruncationUnstable { coarse, fine }) => {
            report.status = Status::TruncationUnstable;
            report.note("coarse_n_neg", coarse);
            report.note("refined_n_neg", fine);
            Ok(())
        }
        Err(KappaError::NoCleanGap(ratio)) => {
            report.status = Status::NoCleanGap;
            report.note("gap_ratio", ratio);
            Ok(())
        }
        Err(KappaError::AssemblyMismatch(m)) => {
            report.status = Status::AssemblyMismatch;
            report.note("assembly_mismatch", m);
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn solve_with<F>(
    report: &mut Report,
    solve: Option<&SolveConfig>,
    n_neg: usize,
    f: F,
    search: Option<&SearchConfig>,
) -> Outcome
where
    F: FnOnce(&SearchConfig, Option<usize>) -> kappa_core::Result<SolveReport>,
{
    let (Some(req), Some(cfg)) = (solve, search) else { return Ok(()) };
    if let Some(max) = req.max_kappa {
        report.note("max_kappa", max);
        if n_neg > max {
            report.status = Status::Infeasible;
            return Ok(());
        }
    }
    let rep = f(cfg, req.max_kappa)?;
    report.status = match rep.status {
        SolveStatus::Solved => Status::Solved,
        SolveStatus::Infeasible => Status::Infeasible,
        SolveStatus::SearchFailed => Status::SearchFailed,
    };
    report.solution = Some(Solution::from(&rep));
    Ok(())
}

fn boundary_disk(report: &mut Report, p: &BoundaryDiskProblem, s: &EffectiveSettings) -> Outcome {
    let grid = match &p.arcs {
        None => CircleGrid::full(s.grid)?,
        Some(arcs) => CircleGrid::arcs(s.grid, &arcs.iter().map(|a| (a[0], a[1])).collect::<Vec<_>>())?,
    };
    let b = p.b.build()?;
    let c = p.c.build()?;
    let sample = |f: &RationalFunction| -> Result<Vec<C64>, InputError> {
        (0..grid.len()).map(|m| f.eval(grid.node(m)).map_err(InputError::from)).collect()
    };
    let data = BoundaryDataDisk::new(&grid, sample(&b)?, sample(&c)?)?;
    if !data.c_nonvanishing(&grid) {
        return Err(input("c: vanishes on the arc set"));
    }
    report.note("max_ratio", data.max_ratio(&grid));
    report.note("arc_measure", grid.measure());
    if p.basis == 0 {
        return Err(input("basis: must be positive"));
    }
    let r = boundary_form_disk(&grid, &data, &grid.monomial_basis(p.basis), s.trunc, s.tol).map(|form| {
        report.certify(&form.inertia);
        report.note("tail_estimate", form.tail_estimate);
        report.note("refined_n_neg", form.refined_n_neg);
        report.note("eigenvalue_drift", &form.drift);
    });
    absorb(report, r)
}

fn interval_set(intervals: &[[f64; 2]], panels: Option<usize>) -> Result<IntervalSet, InputError> {
    let iv: Vec<(f64, f64)> = intervals.iter().map(|i| (i[0], i[1])).collect();
    Ok(IntervalSet::new(&iv, panels.unwrap_or(DEFAULT_PANELS))?)
}

fn line_data(spec: &LineSpec, set: &IntervalSet, what: &str) -> Result<BoundaryDataLine, InputError> {
    match spec {
        LineSpec::Rational(r) => {
            let f = r.build()?;
            Ok(BoundaryDataLine::from_fn(set, move |x| f.eval(C64::new(x, 0.0)).unwrap_or(C64::new(f64::NAN, 0.0)))?)
        }
        LineSpec::Samples(v) => {
            if v.len() != set.dim() {
                return Err(input(format!("{what}.samples: expected {} nodal values, found {}", set.dim(), v.len())));
            }
            Ok(BoundaryDataLine::from_samples(set.clone(), to_c64_vec(v))?)
        }
    }
}

fn note_line_form(report: &mut Report, form: &LineForm) {
    report.certify(&form.inertia);
    report.note("panels", form.panels);
    report.note("refined_n_neg", form.refined_n_neg);
}

fn line_form(report: &mut Report, p: &LoewnerProblem, s: &EffectiveSettings, real: bool) -> Outcome {
    let set = interval_set(&p.intervals, p.panels)?;
    let data = line_data(&p.f0, &set, "f0")?;
    let form = if real { loewner_real_form(&data, &set, s.tol) } else { loewner_form(&data, &set, s.tol) };
    let r = form.map(|f| note_line_form(report, &f));
    absorb(report, r)
}

fn dual_form(report: &mut Report, p: &DualLoewnerProblem, s: &EffectiveSettings) -> Outcome {
    let set = interval_set(&p.intervals, p.panels)?;
    let data = line_data(&p.g0, &set, "g0")?;
    let r = dual_loewner_form(&data, &set, s.tol).map(|f| note_line_form(report, &f));
    absorb(report, r)
}

fn hankel(report: &mut Report, p: &HankelProblem, s: &EffectiveSettings) -> Outcome {
    let f = p.s.build()?;
    let grid = CircleGrid::full(s.grid)?;
    let samples = (0..grid.len()).map(|m| f.eval(grid.node(m))).collect::<kappa_core::Result<Vec<_>>>()?;
    let r = hankel_rank(&samples, p.size, HANKEL_GAP_TOL).map(|h| {
        report.kappa = Some(h.rank);
        report.note("rank", h.rank);
        report.note("gap_ratio", h.gap_ratio);
        report.note("singular_values", &h.singular_values);
    });
    absorb(report, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse;

    fn go(text: &str) -> Report {
        run(&parse(text).unwrap(), text.as_bytes(), &Overrides::default()).unwrap()
    }

    #[test]
    fn single_node_pick() {
        let r = go(r#"{"kind": "pick", "z": [[0, 0]], "w": [[2, 0]], "solve": true}"#);
        assert_eq!(r.kappa, Some(1));
        assert_eq!(r.status, Status::Solved);
        let pair = r.solution.unwrap().pair.unwrap();
        assert_eq!(pair.b.zeros.len(), 1);
        // λ_min(P_B) = 1 − 4|a|² is flat at the optimum a = 0, so the zero is only fixed to ~√tol
        assert!(pair.b.zeros[0][0].hypot(pair.b.zeros[0][1]) < 1e-6);
        assert!(pair.f.num.iter().all(|c| c[0].hypot(c[1]) < 2e-6));
    }

    #[test]
    fn cf_defect_spectrum() {
        let r = go(r#"{"kind": "cf", "w": [[0, 0], [2, 0]]}"#);
        assert_eq!(r.kappa, Some(1));
        let c = r.certificate.unwrap();
        assert!((c.spectrum[0] + 3.0).abs() < 1e-12 && (c.spectrum[1] - 1.0).abs() < 1e-12);
        assert_eq!(r.status.exit_code(), 0);
    }

    #[test]
    fn max_kappa_marks_infeasible() {
        let r = go(r#"{"kind": "pick", "z": [[0, 0]], "w": [[2, 0]], "solve": {"max_kappa": 0}}"#);
        assert_eq!(r.status, Status::Infeasible);
        assert!(r.solution.is_none());
    }

    #[test]
    fn solve_rejected_for_forms() {
        let text = r#"{"kind": "hankel", "s": {"num": [[1, 0]], "den": [[0, 0], [1, 0]]}, "size": 4, "solve": true}"#;
        assert!(run(&parse(text).unwrap(), text.as_bytes(), &Overrides::default()).is_err());
    }
}
