//! No-jump evolution of a decaying qubit coupled to a lossless one, from
//! both initial excitations, for one under- and one over-damped ratio.
//!
//! cargo run --example two_qubit_evolution

use nh_entangle::analytic::{amplitudes_2q, overdamped_asymptotics_2q, InitialState};
use nh_entangle::model::ModelParams;

fn main() -> nh_entangle::Result<()> {
    for ratio in [0.5, 2.0] {
        let p = ModelParams::from_ratio(1.0, ratio)?;
        println!("R = {ratio}");
        println!("  λt      E(|1,0>)  P(|1,0>)  E(|0,1>)  P(|0,1>)");
        for k in 0..=10 {
            let t = 0.5 * k as f64;
            let nh = amplitudes_2q(p, t, InitialState::NhExcited)?;
            let herm = amplitudes_2q(p, t, InitialState::HermitianExcited)?;
            println!(
                "  {t:<6.2}  {:.6}  {:.6}  {:.6}  {:.6}",
                nh.concurrence(),
                nh.norm_sq_unnormalized,
                herm.concurrence(),
                herm.norm_sq_unnormalized
            );
        }
        if let Ok(asym) = overdamped_asymptotics_2q(p) {
            println!(
                "  concurrence returns to 0 at λt = {:.6}, then tends to {:.6}",
                asym.t_zero * p.lambda(),
                asym.e_infinity
            );
        }
        println!();
    }
    Ok(())
}
