//! Symmetric equilibria of the n-player Brownian stopping contest with
//! regret penalties.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod closed_form;
pub mod error;
pub mod interp;
pub mod io;
pub mod law;
pub mod model;
pub mod ode;
pub mod past_regret;
pub mod quad;
pub mod simulation;
pub mod verification;

pub use closed_form::{all_regret_cdf, future_regret_cdf, no_regret_cdf, PowerLaw};
pub use error::{Error, Result};
pub use law::{
    perkins_xi_survival, sample_joint, Equilibrium, EquilibriumCdf, JointLaw, MConditional, Marginal, PerkinsMap,
    TabulatedCdf,
};
pub use model::{
    expected_payoff, realized_payoff, scale_inverse, scale_transform, ContestSpec, PayoffOutcome, RegretMode,
    ScaleFunction,
};
pub use past_regret::{build_equilibrium, two_player_oracle, PastRegretSolution, SolverConfig};
