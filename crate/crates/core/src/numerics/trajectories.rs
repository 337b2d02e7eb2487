//! Monte Carlo wave-function unraveling.
//!
//! Each trajectory propagates the unnormalized state under the non-Hermitian
//! Hamiltonian. A uniform number `r` is drawn per inter-jump segment and a
//! jump happens when the norm² drops to `r`; the crossing is located by
//! bisection on the integrator's dense output. The jump applies one of the
//! jump operators (chosen by weight `‖Lₖψ‖²`) and renormalizes.
//!
//! Trajectory `i` draws from the ChaCha stream `i` under the master seed, and
//! outcomes are reduced in index order, so results do not depend on how the
//! work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::NhModel;
use crate::quantum::{apply, norm_squared, outer, DensityMatrix, OperatorMatrix, PureState, C64};

use super::master::NoJumpSystem;
use super::ode::{IntegratorOptions, Stepper};

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub n_traj: u64,
    pub seed: u64,
    pub t_final: f64,
    /// Trajectories without any jump up to `t_final`.
    pub no_jump_count: u64,
    /// Jump times over `[0, t_final]`, all jumps of all trajectories.
    pub jump_time_histogram: Vec<HistogramBin>,
    /// Average of the normalized trajectory projectors at `t_final`.
    pub mean_density: DensityMatrix,
}

impl TrajectoryEnsemble {
    pub fn no_jump_fraction(&self) -> f64 {
        self.no_jump_count as f64 / self.n_traj as f64
    }

    /// Binomial standard error of [`Self::no_jump_fraction`].
    pub fn standard_error(&self) -> f64 {
        let p = self.no_jump_fraction();
        (p * (1.0 - p) / self.n_traj as f64).sqrt()
    }
}

struct Outcome {
    jump_times: Vec<f64>,
    final_state: PureState,
}

fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn simulate(
    sys: &NoJumpSystem,
    jumps: &[OperatorMatrix],
    psi0: &PureState,
    t_final: f64,
    opts: IntegratorOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let mut stepper = Stepper::new(sys, 0.0, psi0.amps(), opts)?;
    let mut threshold: f64 = rng.random();
    let mut jump_times = Vec::new();
    while stepper.t() < t_final {
        stepper.step(t_final)?;
        let n2: f64 = stepper.y().iter().map(|a| a.norm_sqr()).sum();
        if n2 >= threshold {
            continue;
        }
        let seg = stepper.last_segment().expect("a step was taken");
        let norm_at = |t: f64| -> f64 { seg.eval(t).iter().map(|a| a.norm_sqr()).sum() };
        let (mut lo, mut hi) = (seg.t0, seg.t1());
        while hi - lo > 1e-13 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if norm_at(mid) >= threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t_jump = 0.5 * (lo + hi);
        let psi = PureState::from_amps(seg.eval(t_jump))?;
        let candidates: Vec<PureState> = jumps
            .iter()
            .map(|l| apply(l, &psi))
            .collect::<Result<_>>()?;
        let weights: Vec<f64> = candidates.iter().map(norm_squared).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Numeric(format!(
                "norm decays but no jump channel is open at t = {t_jump}"
            )));
        }
        let mut pick: f64 = rng.random::<f64>() * total;
        let mut chosen = candidates.len() - 1;
        for (k, w) in weights.iter().enumerate() {
            if pick < *w {
                chosen = k;
                break;
            }
            pick -= w;
        }
        let after = candidates[chosen].normalized()?;
        jump_times.push(t_jump);
        stepper.reset(t_jump, after.amps());
        threshold = rng.random();
    }
    Ok(Outcome {
        jump_times,
        final_state: PureState::from_amps(stepper.y().to_vec())?.normalized()?,
    })
}

/// Run `n_traj` trajectories from `psi0` up to `t_final`.
pub fn run_monte_carlo(
    model: &NhModel,
    psi0: &PureState,
    t_final: f64,
    n_traj: u64,
    seed: u64,
    opts: IntegratorOptions,
) -> Result<TrajectoryEnsemble> {
    if n_traj == 0 {
        return Err(Error::InvalidParams("need at least one trajectory".into()));
    }
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParams(format!(
            "t_final must be > 0, got {t_final}"
        )));
    }
    if psi0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: psi0.dim(),
        });
    }
    if !psi0.is_normalized() {
        return Err(Error::InvalidParams(
            "initial state must be normalized".into(),
        ));
    }
    opts.validate()?;
    let sys = NoJumpSystem::new(model);
    let outcomes: Vec<Outcome> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i);
            simulate(&sys, &model.jump_ops, psi0, t_final, opts, &mut rng)
        })
        .collect::<Result<_>>()?;

    let dim = model.dim();
    let width = t_final / HISTOGRAM_BINS as f64;
    let mut counts = [0u64; HISTOGRAM_BINS];
    let mut sum = OperatorMatrix::zeros(dim);
    let mut no_jump_count = 0;
    for o in &outcomes {
        if o.jump_times.is_empty() {
            no_jump_count += 1;
        }
        for &t in &o.jump_times {
            let bin = ((t / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[bin] += 1;
        }
        sum = sum.add(&outer(&o.final_state))?;
    }
    let mean = sum.scale(C64::from(1.0 / n_traj as f64));
    let mean_density = DensityMatrix::new(mean)
        .map_err(|e| Error::Numeric(format!("ensemble average is not a density matrix: {e}")))?;
    let jump_time_histogram = counts
        .iter()
        .enumerate()
        .map(|(k, &count)| HistogramBin {
            lo: k as f64 * width,
            hi: (k + 1) as f64 * width,
            count,
        })
        .collect();
    Ok(TrajectoryEnsemble {
        n_traj,
        seed,
        t_final,
        no_jump_count,
        jump_time_histogram,
        mean_density,
    })
}
