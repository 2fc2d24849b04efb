//! Sparse matrices, Krylov solvers and the fast separable preconditioners
//! used by the time stepper.

mod fastdiag;
mod krylov;
mod schur;
mod sparse;

pub use fastdiag::{Basis1D, FastDiag};
pub use krylov::{
    cg_solve, dot, gmres_solve, norm, pcg, pgmres, relative_residual, FnOperator, IdentityPrecond, Jacobi,
    LinearOperator, Preconditioner, SolveReport, DEFAULT_RESTART,
};
pub use schur::{schur_current_solve, NeumannPoissonPrecond};
pub use sparse::SparseMatrix;
