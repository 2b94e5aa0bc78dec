//! Trajectory generators that cross-check certificates: fluid
//! queue-ratio dynamics, Skorohod workload paths with active-set
//! reflection, and a stochastic discrete-event simulator.

mod des;
mod fluid;
mod skorohod;

pub use des::{simulate_des, DESConfig, DESTrajectory, Dist, Policy, RNG_ALGORITHM};
pub use fluid::{simulate_fluid, FluidTrajectory, TieBreak};
pub use skorohod::{simulate_skorohod, SkorohodProblem, SkorohodTrajectory};

/// Least-squares slope of y over x; used by drift tests on simulator
/// output.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}
