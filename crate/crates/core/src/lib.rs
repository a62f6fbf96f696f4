//! Negative-squares certificates and desk-scale solvers for indefinite interpolation
//! problems in the generalized Schur and Nevanlinna classes.
//!
//! ```
//! use kappa_core::{inertia, pick_matrix, solve_pick_kappa, SearchConfig, SolveStatus, C64};
//!
//! let z = [C64::new(0.0, 0.0), C64::new(0.25, 0.0)];
//! let w = [C64::new(-2.0, 0.0), C64::new(-3.5, 0.0)];
//! let p = pick_matrix(&z, &w)?;
//! assert_eq!(inertia(&p, 1e-9).n_neg, 1);
//!
//! let report = solve_pick_kappa(&z, &w, &SearchConfig::default())?;
//! assert_eq!(report.status, SolveStatus::Solved);
//! let pair = report.pair.unwrap();
//! assert_eq!(pair.b.zeros().len(), 1);
//! # Ok::<(), kappa_core::KappaError>(())
//! ```

pub mod circle;
pub mod error;
pub mod forms;
pub mod line;
pub mod linalg;
pub mod model_space;
pub mod poly;
pub mod rational;
pub mod seeds;
pub mod solvers;

pub use num_complex::Complex64 as C64;

pub use error::{KappaError, Result};
pub use forms::{
    cf_matrices, kernel_matrix_nevanlinna, kernel_matrix_schur, nudelman_form, pick_matrix, verify_pair,
    NudelmanData, PairResidual, ToeplitzDefect,
};
pub use linalg::{inertia, CMatrix, CVector, HermitianMatrix, Inertia};
pub use rational::{
    cayley_rational, cayley_schur_to_nevanlinna, cayley_value, krein_langer_factorize, schur_class_check,
    BlaschkeProduct, Domain, RationalFunction, SchurCheck, SchurPair,
};
pub use solvers::{solve_cf_kappa, solve_np0, solve_pick_kappa, solve_sarason, SearchConfig, SolveReport, SolveStatus};
