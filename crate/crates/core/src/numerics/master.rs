//! Master equation, no-jump Schrödinger equation and their decomposition.
//!
//! The generator is
//!
//! ```text
//! dρ/dt = −i(Hρ − ρH†) + Σₖ Lₖ ρ Lₖ†
//! ```
//!
//! with `H` the non-Hermitian Hamiltonian and `L = √κ σ₁⁻`. Since
//! `H − H† = −i Σ Lₖ†Lₖ`, this is the standard trace-preserving Lindbladian.

use crate::error::{Error, Result};
use crate::model::NhModel;
use crate::quantum::{norm_squared, DensityMatrix, OperatorMatrix, PureState, C64, I, ZERO};

use super::ode::{integrate, IntegratorOptions, OdeSystem};

/// `out = a · b` for row-major `n × n` slices.
fn matmul_into(n: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
    out.fill(ZERO);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
}

fn matvec_into(n: usize, a: &[C64], x: &[C64], out: &mut [C64]) {
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        out[i] = row.iter().zip(x).map(|(m, v)| m * v).sum();
    }
}

struct Generator {
    n: usize,
    h: Vec<C64>,
    h_dag: Vec<C64>,
    jumps: Vec<(Vec<C64>, Vec<C64>)>,
}

impl Generator {
    fn new(model: &NhModel) -> Self {
        Self {
            n: model.dim(),
            h: model.hamiltonian.as_slice().to_vec(),
            h_dag: model.hamiltonian.adjoint().as_slice().to_vec(),
            jumps: model
                .jump_ops
                .iter()
                .map(|l| (l.as_slice().to_vec(), l.adjoint().as_slice().to_vec()))
                .collect(),
        }
    }

    /// `dρ = −i(Hρ − ρH†) + Σ L ρ L†`
    fn lindblad(&self, rho: &[C64], drho: &mut [C64]) {
        let n = self.n;
        let mut a = vec![ZERO; n * n];
        let mut b = vec![ZERO; n * n];
        matmul_into(n, &self.h, rho, &mut a);
        matmul_into(n, rho, &self.h_dag, &mut b);
        for i in 0..n * n {
            drho[i] = -I * (a[i] - b[i]);
        }
        for (l, l_dag) in &self.jumps {
            matmul_into(n, l, rho, &mut a);
            matmul_into(n, &a, l_dag, &mut b);
            for i in 0..n * n {
                drho[i] += b[i];
            }
        }
    }
}

/// `dψ/dt = −i H ψ`, with no renormalization.
pub struct NoJumpSystem {
    n: usize,
    minus_i_h: Vec<C64>,
}

impl NoJumpSystem {
    pub fn new(model: &NhModel) -> Self {
        Self {
            n: model.dim(),
            minus_i_h: model
                .hamiltonian
                .as_slice()
                .iter()
                .map(|&h| -I * h)
                .collect(),
        }
    }
}

impl OdeSystem for NoJumpSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
        matvec_into(self.n, &self.minus_i_h, y, dy);
    }
}

struct MasterSystem(Generator);

impl OdeSystem for MasterSystem {
    fn dim(&self) -> usize {
        self.0.n * self.0.n
    }

    fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
        self.0.lindblad(y, dy);
    }
}

/// Unnormalized no-jump state together with the density matrix of all
/// trajectories that have jumped at least once:
///
/// ```text
/// dψ/dt  = −iHψ
/// dρ_J/dt = −i(Hρ_J − ρ_J H†) + Σ L ρ_J L† + Σ L ψψ† L†
/// ```
struct UnravelingSystem(Generator);

impl OdeSystem for UnravelingSystem {
    fn dim(&self) -> usize {
        self.0.n + self.0.n * self.0.n
    }

    fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
        let g = &self.0;
        let n = g.n;
        let (psi, rho_j) = y.split_at(n);
        let (dpsi, drho) = dy.split_at_mut(n);
        matvec_into(n, &g.h, psi, dpsi);
        for d in dpsi.iter_mut() {
            *d *= -I;
        }
        g.lindblad(rho_j, drho);
        let mut lpsi = vec![ZERO; n];
        for (l, _) in &g.jumps {
            matvec_into(n, l, psi, &mut lpsi);
            for i in 0..n {
                for j in 0..n {
                    drho[i * n + j] += lpsi[i] * lpsi[j].conj();
                }
            }
        }
    }
}

fn check_grid_origin(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        Some(&0.0) => Ok(()),
        _ => Err(Error::InvalidParams("time grid must start at 0".into())),
    }
}

fn check_model_dim(model: &NhModel, dim: usize) -> Result<()> {
    if model.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: dim,
        });
    }
    Ok(())
}

/// Density matrices on `t_grid`. Every output is validated (Hermitian, unit
/// trace, positive within the crate tolerances); a violation is reported as
/// a numerical failure.
pub fn integrate_master(
    model: &NhModel,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: IntegratorOptions,
) -> Result<Vec<DensityMatrix>> {
    check_grid_origin(t_grid)?;
    check_model_dim(model, rho0.dim())?;
    let sys = MasterSystem(Generator::new(model));
    let out = integrate(&sys, rho0.matrix().as_slice(), t_grid, opts)?;
    out.into_iter()
        .zip(t_grid)
        .map(|(y, &t)| {
            let m = OperatorMatrix::from_row_major(model.dim(), &y)?;
            DensityMatrix::new(m)
                .map_err(|e| Error::Numeric(format!("tolerance failure at t = {t}: {e}")))
        })
        .collect()
}

/// Unnormalized no-jump states on `t_grid`; their norm² is the probability
/// that no jump has occurred.
pub fn integrate_nojump(
    model: &NhModel,
    psi0: &PureState,
    t_grid: &[f64],
    opts: IntegratorOptions,
) -> Result<Vec<PureState>> {
    check_grid_origin(t_grid)?;
    check_model_dim(model, psi0.dim())?;
    if !psi0.is_normalized() {
        return Err(Error::InvalidParams(format!(
            "initial state has norm² {}",
            norm_squared(psi0)
        )));
    }
    let sys = NoJumpSystem::new(model);
    integrate(&sys, psi0.amps(), t_grid, opts)?
        .into_iter()
        .map(PureState::from_amps)
        .collect()
}

/// No-jump and jump contributions to the density matrix at one time.
#[derive(Debug, Clone)]
pub struct UnravelingSnapshot {
    pub t: f64,
    /// Probability of the no-jump record.
    pub p_nojump: f64,
    /// Normalized no-jump state.
    pub nojump_state: PureState,
    /// Unnormalized density matrix of all jump-containing trajectories;
    /// its trace is `1 − p_nojump`.
    pub jump_part: OperatorMatrix,
}

impl UnravelingSnapshot {
    /// `p_nojump |ψ̂⟩⟨ψ̂| + ρ_J`
    pub fn reconstruct(&self) -> OperatorMatrix {
        crate::quantum::outer(&self.nojump_state)
            .scale(C64::from(self.p_nojump))
            .add(&self.jump_part)
            .expect("matching dimensions")
    }
}

/// Split the evolution from `psi0` into its no-jump part and the density
/// matrix fed by the jump flux `Σ L ψψ† L†`.
pub fn unravel(
    model: &NhModel,
    psi0: &PureState,
    t_grid: &[f64],
    opts: IntegratorOptions,
) -> Result<Vec<UnravelingSnapshot>> {
    check_grid_origin(t_grid)?;
    check_model_dim(model, psi0.dim())?;
    if !psi0.is_normalized() {
        return Err(Error::InvalidParams(
            "initial state must be normalized".into(),
        ));
    }
    let n = model.dim();
    let mut y0 = psi0.amps().to_vec();
    y0.extend(std::iter::repeat_n(ZERO, n * n));
    let sys = UnravelingSystem(Generator::new(model));
    integrate(&sys, &y0, t_grid, opts)?
        .into_iter()
        .zip(t_grid)
        .map(|(y, &t)| {
            let psi = PureState::from_amps(y[..n].to_vec())?;
            Ok(UnravelingSnapshot {
                t,
                p_nojump: norm_squared(&psi),
                nojump_state: psi.normalized()?,
                jump_part: OperatorMatrix::from_row_major(n, &y[n..])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_two_qubit, ModelParams};
    use crate::quantum::pure_to_density;
    use approx::assert_abs_diff_eq;

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
    }

    #[test]
    fn rabi_swap_without_decay() {
        let model = build_two_qubit(ModelParams::new(1.0, 0.0).unwrap());
        let rho0 = pure_to_density(&PureState::basis("10").unwrap()).unwrap();
        let ts = grid(3.0, 30);
        let out = integrate_master(&model, &rho0, &ts, IntegratorOptions::default()).unwrap();
        for (t, rho) in ts.iter().zip(&out) {
            assert_abs_diff_eq!(
                rho.population("10").unwrap(),
                t.cos().powi(2),
                epsilon = 1e-8
            );
            assert_abs_diff_eq!(
                rho.population("01").unwrap(),
                t.sin().powi(2),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn decays_to_ground_state() {
        let model = build_two_qubit(ModelParams::from_ratio(1.0, 0.7).unwrap());
        let rho0 = pure_to_density(&PureState::basis("11").unwrap()).unwrap();
        let opts = IntegratorOptions {
            dt_max: 0.05,
            ..IntegratorOptions::default()
        };
        let out = integrate_master(&model, &rho0, &[0.0, 60.0], opts).unwrap();
        assert_abs_diff_eq!(out[1].population("00").unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn nojump_norm_conserved_without_decay() {
        let model = build_two_qubit(ModelParams::new(1.0, 0.0).unwrap());
        let psi0 = PureState::basis("10").unwrap();
        let out =
            integrate_nojump(&model, &psi0, &grid(5.0, 50), IntegratorOptions::default()).unwrap();
        for s in &out {
            assert_abs_diff_eq!(norm_squared(s), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn grid_must_start_at_zero() {
        let model = build_two_qubit(ModelParams::new(1.0, 0.0).unwrap());
        let psi0 = PureState::basis("10").unwrap();
        assert!(
            integrate_nojump(&model, &psi0, &[0.5, 1.0], IntegratorOptions::default()).is_err()
        );
        let unnormalized = psi0.scaled(C64::from(2.0));
        assert!(integrate_nojump(
            &model,
            &unnormalized,
            &[0.0, 1.0],
            IntegratorOptions::default()
        )
        .is_err());
        let wrong_dim = PureState::basis("100").unwrap();
        assert!(integrate_nojump(
            &model,
            &wrong_dim,
            &[0.0, 1.0],
            IntegratorOptions::default()
        )
        .is_err());
    }

    #[test]
    fn jump_weight_complements_nojump_probability() {
        let model = build_two_qubit(ModelParams::from_ratio(1.0, 0.5).unwrap());
        let psi0 = PureState::basis("10").unwrap();
        let snaps = unravel(&model, &psi0, &grid(4.0, 8), IntegratorOptions::precise()).unwrap();
        for s in &snaps {
            assert_abs_diff_eq!(s.p_nojump + s.jump_part.trace().re, 1.0, epsilon = 1e-10);
        }
    }
}
