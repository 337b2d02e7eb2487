//! Three qubits: the decaying qubit drives two lossless partners into a
//! W-type state with all pairwise concurrences equal to 2/3.
//!
//! cargo run --example w_state

use nh_entangle::analytic::{no_jump_state, w_pairwise_concurrence, w_time_3q, InitialState};
use nh_entangle::model::{ModelParams, System};

fn main() -> nh_entangle::Result<()> {
    println!("    R     T_rs      P        C12       C13       C23");
    for r in [0.0, 0.5, 1.0, std::f64::consts::SQRT_2, 2.0, 3.0] {
        let p = ModelParams::from_ratio(1.0, r)?;
        let w = w_time_3q(p);
        let state = no_jump_state(System::ThreeQubit, p, w.t_star, InitialState::NhExcited)?
            .normalized()?;
        let [c12, c13, c23] = w_pairwise_concurrence(&state)?;
        println!(
            "  {r:5.3}  {:.6}  {:.6}  {c12:.6}  {c13:.6}  {c23:.6}",
            w.t_rescaled, w.success_probability
        );
    }
    Ok(())
}
