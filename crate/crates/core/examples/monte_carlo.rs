//! Quantum-jump trajectories: the fraction of jump-free runs at the
//! entangling time against the closed-form success probability.
//!
//! cargo run --release --example monte_carlo -- [trajectories] [seed]

use nh_entangle::analytic::{entangling_time_2q, InitialState};
use nh_entangle::model::{ModelParams, NhModel, System};
use nh_entangle::numerics::run_monte_carlo;
use nh_entangle::quantum::PureState;
use nh_entangle::sweep::monte_carlo_options;

fn main() -> nh_entangle::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    for ratio in [0.25, 0.5, 1.0, 2.0] {
        let p = ModelParams::from_ratio(1.0, ratio)?;
        let target = entangling_time_2q(p, InitialState::NhExcited)?;
        let model = NhModel::build(System::TwoQubit, p);
        let psi0 = PureState::basis("10")?;
        let ens = run_monte_carlo(&model, &psi0, target.t_star, n, seed, monte_carlo_options())?;
        let z = (ens.no_jump_fraction() - target.success_probability) / ens.standard_error();
        println!(
            "R = {ratio:4.2}: no-jump {:.5} ± {:.5}, closed form {:.5}, z = {z:+.2}",
            ens.no_jump_fraction(),
            ens.standard_error(),
            target.success_probability
        );
    }
    Ok(())
}
