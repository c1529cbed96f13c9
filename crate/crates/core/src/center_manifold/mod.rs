//! Center-manifold reduction of the projected Hermite-coefficient system.
//!
//! In the diagonalised variables `a_k = alpha_k`, `b_k = alpha_k/nu + beta_k`
//! and `eta = 1/(1+t)` the system decouples by parity, and the manifold is the
//! graph `b_k = h_k(a, eta) = sum_l H(k, k-2l) eta^l a_{k-2l}`.

mod integrate;
mod invariance;
mod rates;
mod system;
mod table;

pub use integrate::{
    etdrk4_integrate, integrate_full, integrate_off_manifold, integrate_reduced, phi_functions, IntegratorOptions,
    Trajectory,
};
pub use invariance::{h_poly, invariance_residual, LinearPoly};
pub use rates::{predict_rate, RatePrediction};
pub use system::{
    ab_rhs, alphabeta_rhs, from_diagonal, off_manifold_rhs, to_diagonal, OffManifoldState, ReducedDerivative,
    ReducedState,
};
pub use table::{build_even_table, build_odd_table, build_table, h_eval, h_grad_a, CMCoeffTable, CMTables, Parity};
