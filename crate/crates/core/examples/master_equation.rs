//! Full master-equation evolution and its split into the jump-free branch
//! and everything that has jumped at least once.
//!
//! cargo run --example master_equation

use nh_entangle::model::{ModelParams, NhModel, System};
use nh_entangle::numerics::{integrate_master, unravel, IntegratorOptions};
use nh_entangle::quantum::{partial_trace, pure_to_density, wootters_concurrence, PureState};

fn main() -> nh_entangle::Result<()> {
    let model = NhModel::build(System::TwoQubit, ModelParams::from_ratio(1.0, 0.7)?);
    let psi0 = PureState::basis("10")?;
    let ts: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
    let opts = IntegratorOptions::precise();
    let rhos = integrate_master(&model, &pure_to_density(&psi0)?, &ts, opts)?;
    let split = unravel(&model, &psi0, &ts, opts)?;

    println!("  λt    p(00)     E(ρ)      p_nojump  max|ρ − split|");
    for ((t, rho), snap) in ts.iter().zip(&rhos).zip(&split) {
        println!(
            "  {t:4.1}  {:.6}  {:.6}  {:.6}  {:.1e}",
            rho.population("00")?,
            wootters_concurrence(rho)?,
            snap.p_nojump,
            snap.reconstruct().max_abs_diff(rho.matrix())
        );
    }

    let last = rhos.last().expect("non-empty grid");
    let qubit2 = partial_trace(last, &[2])?;
    println!(
        "\nlossless qubit at λt = 5: p(1) = {:.6}",
        qubit2.population("1")?
    );
    Ok(())
}
