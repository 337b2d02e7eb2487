//! Time to maximal entanglement and its success probability across the
//! dissipation ratio, closed form next to the root-finder on the
//! propagated state.
//!
//! cargo run --example entangling_time_sweep

use nh_entangle::analytic::InitialState;
use nh_entangle::model::System;
use nh_entangle::sweep::ratio_record;

fn main() -> nh_entangle::Result<()> {
    println!("    R    T_rs(|1,0>)  numeric      P        T'_rs(|0,1>)");
    for k in 0..=12 {
        let r = 0.25 * k as f64;
        let nh = ratio_record(System::TwoQubit, InitialState::NhExcited, 1.0, r)?;
        let herm = if r < 1.0 {
            let rec = ratio_record(System::TwoQubit, InitialState::HermitianExcited, 1.0, r)?;
            format!("{:.6}", rec.t_rs)
        } else {
            "-".into()
        };
        println!(
            "  {r:4.2}   {:.6}    {:.6}   {:.6}   {herm}",
            nh.t_rs, nh.t_rs_numeric, nh.p_success
        );
    }
    println!("\nDissipation on the excited qubit shortens the time to a Bell state;");
    println!("starting from the lossless qubit it lengthens it and diverges at R = 1.");
    Ok(())
}
