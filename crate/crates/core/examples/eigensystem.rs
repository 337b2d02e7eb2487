//! Single-excitation spectrum of the non-Hermitian Hamiltonian through the
//! exceptional point, closed form against a general eigensolver.
//!
//! cargo run --example eigensystem

use nh_entangle::model::{
    analytic_eigensystem, classify_regime, match_by_energy, numeric_eigensystem, ModelParams,
    NhModel, System,
};

fn main() -> nh_entangle::Result<()> {
    for system in [System::TwoQubit, System::ThreeQubit] {
        println!(
            "{system}, exceptional point at R = {:.6}",
            system.threshold()
        );
        for r in [0.0, 0.5, 0.9, 1.0, 1.2, std::f64::consts::SQRT_2, 2.0] {
            let p = ModelParams::from_ratio(1.0, r)?;
            let regime = classify_regime(p, system);
            let model = NhModel::build(system, p);
            let numeric = numeric_eigensystem(&model, 1)?;
            match analytic_eigensystem(p, system) {
                Ok(reference) => {
                    let matched = match_by_energy(&numeric, &reference);
                    let err = reference
                        .iter()
                        .zip(&matched)
                        .map(|(a, b)| (a.energy - b.energy).norm())
                        .fold(0.0, f64::max);
                    let energies: Vec<String> = reference
                        .iter()
                        .map(|e| format!("{:+.4}{:+.4}i", e.energy.re, e.energy.im))
                        .collect();
                    println!(
                        "  R = {r:.3} {:?}: {}  (|Δ| = {err:.1e})",
                        regime.kind,
                        energies.join("  ")
                    );
                }
                Err(e) => println!("  R = {r:.3} {:?}: {e}", regime.kind),
            }
        }
        println!();
    }
    Ok(())
}
