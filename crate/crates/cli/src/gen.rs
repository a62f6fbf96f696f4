//! Seeded instances with a ground-truth sidecar.

use serde::Serialize;
use serde_json::{json, Value};

use kappa_core::seeds;
use kappa_core::SchurPair;

use crate::problem::{
    from_c64, BoundaryDiskProblem, CfProblem, DualLoewnerProblem, HankelProblem, LineSpec, LoewnerProblem,
    NudelmanProblem, PickProblem, Problem, RationalSpec, SarasonProblem, SolveRequest, PROBLEM_SCHEMA_VERSION,
};
use crate::report::PairSpec;

pub const KINDS: [&str; 9] =
    ["pick", "cf", "sarason", "nudelman", "boundary-disk", "loewner", "loewner-real", "dual-loewner", "hankel"];

#[derive(Debug, Clone, Serialize)]
pub struct Truth {
    pub schema_version: u32,
    pub seed: u64,
    pub kind: String,
    /// `None` when the construction does not fix the index (dual-loewner).
    pub kappa: Option<usize>,
    pub size: usize,
    /// `(f, B)` for disk problems.
    pub pair: Option<PairSpec>,
    /// Pole–residue data for line problems.
    pub line: Option<Value>,
}

fn rows(m: &kappa_core::CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| from_c64(m[(i, j)])).collect()).collect()
}

fn vec_of(v: &[kappa_core::C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| from_c64(*z)).collect()
}

macro_rules! blank {
    ($ty:ident { $($field:ident : $val:expr),* $(,)? }, $solve:expr) => {
        $ty {
            $($field: $val,)*
            schema_version: Some(PROBLEM_SCHEMA_VERSION),
            tol: None,
            grid: None,
            trunc: None,
            solve: $solve,
        }
    };
}

/// Builds the problem for `kind` from seed and returns it with its truth record.
pub fn generate(seed: u64, kind: &str, kappa: usize, size: usize, solve: bool) -> Result<(Problem, Truth), String> {
    let err = |e: kappa_core::KappaError| e.to_string();
    let solve_req = solve.then_some(SolveRequest::Flag(true));
    let pair_truth = |p: &SchurPair| Some(PairSpec::from(p));
    let (problem, pair, line) = match kind {
        "pick" => {
            let i = seeds::pick_instance(seed, kappa, size).map_err(err)?;
            let p = blank!(PickProblem { z: vec_of(&i.points), w: vec_of(&i.values) }, solve_req);
            (Problem::Pick(p), pair_truth(&i.truth), None)
        }
        "cf" => {
            let i = seeds::cf_instance(seed, kappa, size).map_err(err)?;
            (Problem::Cf(blank!(CfProblem { w: vec_of(&i.w) }, solve_req)), pair_truth(&i.truth), None)
        }
        "sarason" => {
            let i = seeds::sarason_instance(seed, kappa, size).map_err(err)?;
            let p = blank!(SarasonProblem { zeros: vec_of(&i.zeros), r: Some(rows(&i.r)), symbol: None }, solve_req);
            (Problem::Sarason(p), pair_truth(&i.truth), None)
        }
        "nudelman" => {
            let i = seeds::nudelman_instance(seed, kappa, size).map_err(err)?;
            let d = &i.data;
            let b: Vec<_> = d.b.iter().copied().collect();
            let c: Vec<_> = d.c.iter().copied().collect();
            let p = blank!(NudelmanProblem { a: rows(&d.a), b: vec_of(&b), c: vec_of(&c) }, None);
            (Problem::Nudelman(p), pair_truth(&i.truth), None)
        }
        "boundary-disk" => {
            let i = seeds::boundary_disk_instance(seed, kappa, size).map_err(err)?;
            let p = blank!(
                BoundaryDiskProblem {
                    b: RationalSpec::from_function(&i.b),
                    c: RationalSpec::from_function(&i.c),
                    arcs: None,
                    basis: i.basis,
                },
                None
            );
            (Problem::BoundaryDisk(p), pair_truth(&i.truth), None)
        }
        "loewner" | "loewner-real" => {
            let i = seeds::loewner_instance(seed, kappa, size).map_err(err)?;
            let p = blank!(
                LoewnerProblem {
                    intervals: vec![[i.interval.0, i.interval.1]],
                    panels: Some(i.panels),
                    f0: LineSpec::Rational(RationalSpec::from_function(&i.f0)),
                },
                None
            );
            let line = json!({
                "slope": i.slope,
                "offset": i.offset,
                "poles": i.poles,
                "residues": i.residues,
            });
            let problem = if kind == "loewner" { Problem::Loewner(p) } else { Problem::LoewnerReal(p) };
            (problem, None, Some(line))
        }
        "dual-loewner" => {
            let i = seeds::dual_instance(seed, size).map_err(err)?;
            let p = blank!(
                DualLoewnerProblem {
                    intervals: vec![[i.interval.0, i.interval.1]],
                    panels: Some(i.panels),
                    g0: LineSpec::Rational(RationalSpec::from_function(&i.g0)),
                },
                None
            );
            let line = json!({ "base": i.base, "bumps": i.bumps });
            (Problem::DualLoewner(p), None, Some(line))
        }
        "hankel" => {
            let i = seeds::hankel_instance(seed, kappa, size).map_err(err)?;
            let p = blank!(HankelProblem { s: RationalSpec::from_function(&i.s), size: i.size }, None);
            (Problem::Hankel(p), pair_truth(&i.truth), None)
        }
        other => return Err(format!("kind: unknown problem kind `{other}` (expected one of {})", KINDS.join(", "))),
    };
    // a positive density says nothing about the index of −H_Δ g₀
    let kappa = (kind != "dual-loewner").then_some(kappa);
    let truth = Truth { schema_version: PROBLEM_SCHEMA_VERSION, seed, kind: kind.to_string(), kappa, size, pair, line };
    Ok((problem, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_generates() {
        for kind in KINDS {
            let size = if kind.starts_with("loewner") || kind == "dual-loewner" { 8 } else { 5 };
            let (p, t) = generate(11, kind, 1, size, false).unwrap_or_else(|e| panic!("{kind}: {e}"));
            assert_eq!(p.kind(), kind);
            assert_eq!(t.kind, kind);
        }
    }

    #[test]
    fn unknown_kind_is_an_error() {
        assert!(generate(0, "spline", 0, 4, false).is_err());
    }
}
