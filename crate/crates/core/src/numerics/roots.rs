//! First-crossing search: uniform scan for a sign change, then bisection.

use crate::analytic::InitialState;
use crate::error::{Error, Result};
use crate::model::{NhModel, System};
use crate::quantum::{PureState, C64};

use super::master::NoJumpSystem;
use super::ode::{DenseSolution, IntegratorOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Width of the final bracket.
    pub tol: f64,
    pub scan_points: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            scan_points: 2000,
        }
    }
}

/// Earliest `t` in `bracket` where `f(t) = target`.
pub fn first_crossing(
    f: impl Fn(f64) -> f64,
    target: f64,
    bracket: (f64, f64),
    opts: CrossingOptions,
) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(hi > lo) || opts.scan_points < 1 {
        return Err(Error::InvalidParams(format!("bad bracket [{lo}, {hi}]")));
    }
    let g = |t: f64| f(t) - target;
    let n = opts.scan_points;
    let mut t_prev = lo;
    let mut g_prev = g(lo);
    if g_prev == 0.0 {
        return Ok(lo);
    }
    for i in 1..=n {
        let t = lo + (hi - lo) * i as f64 / n as f64;
        let gt = g(t);
        if gt == 0.0 {
            return Ok(t);
        }
        if gt.signum() != g_prev.signum() {
            return Ok(bisect(&g, t_prev, t, g_prev, opts.tol));
        }
        t_prev = t;
        g_prev = gt;
    }
    Err(Error::NoCrossing { lo, hi })
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Amplitude-balance condition marking maximal entanglement of the no-jump
/// state, expressed on raw state components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceCondition {
    /// `|ψ₁₀| − |ψ₀₁|` (or the reverse for the `|0,1⟩` start).
    TwoQubit(InitialState),
    /// `|ψ₁₀₀| − |ψ₀₁₀ + ψ₀₀₁|/2`, zero when `|C| = |D|/√2`.
    ThreeQubitW,
}

impl BalanceCondition {
    pub fn for_system(system: System, initial: InitialState) -> Result<Self> {
        initial.label(system)?;
        Ok(match system {
            System::TwoQubit => BalanceCondition::TwoQubit(initial),
            System::ThreeQubit => BalanceCondition::ThreeQubitW,
        })
    }

    /// Positive before the balance point.
    pub fn eval(&self, amps: &[C64]) -> f64 {
        match self {
            BalanceCondition::TwoQubit(InitialState::NhExcited) => {
                amps[0b10].norm() - amps[0b01].norm()
            }
            BalanceCondition::TwoQubit(InitialState::HermitianExcited) => {
                amps[0b01].norm() - amps[0b10].norm()
            }
            BalanceCondition::ThreeQubitW => {
                amps[0b100].norm() - (amps[0b010] + amps[0b001]).norm() / 2.0
            }
        }
    }
}

/// First balance time of the ODE-propagated no-jump state, searched on
/// `[0, t_max]`.
pub fn numeric_entangling_time(
    model: &NhModel,
    initial: InitialState,
    t_max: f64,
    opts: IntegratorOptions,
    crossing: CrossingOptions,
) -> Result<f64> {
    let condition = BalanceCondition::for_system(model.system, initial)?;
    let psi0 = PureState::basis(initial.label(model.system)?)?;
    let sys = NoJumpSystem::new(model);
    let sol = DenseSolution::solve(&sys, psi0.amps(), 0.0, t_max, opts)?;
    first_crossing(
        |t| condition.eval(&sol.eval(t)),
        0.0,
        (0.0, t_max),
        crossing,
    )
}
