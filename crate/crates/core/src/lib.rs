//! Generalized Nash equilibria of integer-programming congestion games via
//! Graver-basis augmentation on N-fold programs, plus the inverse problem
//! of finding cost weights that make a given point optimal.
//!
//! All arithmetic is exact: big integers for lattice work and big
//! rationals for objective values and LP data.

pub mod convexobj;
pub mod error;
pub mod exactmath;
pub mod game;
pub mod graver;
pub mod inverse;
pub mod json;
pub mod nfold;
pub mod oracle;
pub mod random;
pub mod solver;

pub use convexobj::{eval_cost, eval_objective, SeparableObjective, UnivariateCost};
pub use error::{Error, Result};
pub use exactmath::{conformal_leq, sign_compatible, IntMatrix, IntVector, LpOutcome, RatVector};
pub use game::{
    aggregate_usage, best_response, find_equilibrium, is_generalized_nash, is_satisfied,
    player_cost, provider_cost, GameInstance, PlayerSpec, StrategyProfile,
};
pub use graver::{graver_basis, graver_basis_with_cap, GraverBasis, DEFAULT_GRAVER_CAP};
pub use inverse::{feasible_shifts, solve_iiop, verify_answer, IiopAnswer, IiopInstance};
pub use nfold::{
    build_c_matrix, build_multitype_matrix, build_nash_matrix, build_nfold, NfoldSpec, TypeCatalog,
};
pub use solver::{
    check_optimal, find_feasible, greedy_augment, solve_ip, IpInstance, SolveResult, SolveStatus,
    SolverConfig,
};
