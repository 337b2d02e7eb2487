//! Numerical ground truth, independent of the closed forms in
//! [`crate::analytic`]: master-equation integration, no-jump propagation,
//! quantum-jump Monte Carlo and root finding.

pub mod master;
pub mod ode;
pub mod roots;
pub mod trajectories;

pub use master::{integrate_master, integrate_nojump, unravel, NoJumpSystem, UnravelingSnapshot};
pub use ode::{DenseSolution, IntegratorOptions, Method, OdeSystem, Stepper};
pub use roots::{first_crossing, numeric_entangling_time, BalanceCondition, CrossingOptions};
pub use trajectories::{run_monte_carlo, HistogramBin, TrajectoryEnsemble};
