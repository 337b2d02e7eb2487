//! The two coupled-qubit models: one decaying ("NH") qubit swapping an
//! excitation with one or two lossless partners.
//!
//! ```text
//! H = λ Σⱼ (σ₁⁺σⱼ⁻ + σ₁⁻σⱼ⁺) − (iκ/2) |1⟩₁⟨1|,    L = √κ σ₁⁻
//! ```

use std::f64::consts::SQRT_2;

use nalgebra::Schur;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    embed_lowering, embed_raising, embed_single, excitation, norm_squared, OperatorMatrix,
    PureState, C64, I, ONE, ZERO,
};

/// Relative half-width of the exceptional-point classification window.
pub const EP_EPSILON: f64 = 1e-9;

/// Coupling strength and decay rate of the NH qubit, in a common frequency unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    lambda: f64,
    kappa: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, kappa: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParams(format!(
                "kappa must be >= 0, got {kappa}"
            )));
        }
        Ok(Self { lambda, kappa })
    }

    /// Parameters with `κ = 4λR`.
    pub fn from_ratio(lambda: f64, ratio: f64) -> Result<Self> {
        if !(ratio >= 0.0) || !ratio.is_finite() {
            return Err(Error::InvalidParams(format!(
                "ratio must be >= 0, got {ratio}"
            )));
        }
        Self::new(lambda, 4.0 * lambda * ratio)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `R = κ/(4λ)`
    pub fn ratio(&self) -> f64 {
        self.kappa / (4.0 * self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    /// NH qubit coupled to one Hermitian qubit.
    #[serde(rename = "2q")]
    TwoQubit,
    /// NH qubit coupled symmetrically to two Hermitian qubits.
    #[serde(rename = "3q")]
    ThreeQubit,
}

impl System {
    pub fn n_qubits(self) -> usize {
        match self {
            System::TwoQubit => 2,
            System::ThreeQubit => 3,
        }
    }

    pub fn dim(self) -> usize {
        1 << self.n_qubits()
    }

    /// Value of R at the exceptional point of the single-excitation sector.
    /// The NH qubit sees an effective coupling `√(n−1)·λ`.
    pub fn threshold(self) -> f64 {
        match self {
            System::TwoQubit => 1.0,
            System::ThreeQubit => SQRT_2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            System::TwoQubit => "2q",
            System::ThreeQubit => "3q",
        }
    }

    /// Label of the initial state with the NH qubit excited.
    pub fn nh_excited_label(self) -> &'static str {
        match self {
            System::TwoQubit => "10",
            System::ThreeQubit => "100",
        }
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NhModel {
    pub system: System,
    pub params: ModelParams,
    pub hamiltonian: OperatorMatrix,
    pub jump_ops: Vec<OperatorMatrix>,
}

impl NhModel {
    pub fn build(system: System, params: ModelParams) -> Self {
        let n = system.n_qubits();
        let sp1 = embed_raising(n, 1).expect("qubit 1 exists");
        let sm1 = embed_lowering(n, 1).expect("qubit 1 exists");
        let mut coupling = OperatorMatrix::zeros(system.dim());
        for j in 2..=n {
            let spj = embed_raising(n, j).expect("partner qubit exists");
            let smj = embed_lowering(n, j).expect("partner qubit exists");
            let term = sp1
                .matmul(&smj)
                .and_then(|a| a.add(&sm1.matmul(&spj)?))
                .expect("matching dimensions");
            coupling = coupling.add(&term).expect("matching dimensions");
        }
        let decaying = embed_single(n, 1, &OperatorMatrix::excited_projector()).expect("qubit 1");
        let hamiltonian = coupling
            .scale(C64::from(params.lambda))
            .sub(&decaying.scale(I * (params.kappa / 2.0)))
            .expect("matching dimensions");
        let jump = sm1.scale(C64::from(params.kappa.sqrt()));
        Self {
            system,
            params,
            hamiltonian,
            jump_ops: vec![jump],
        }
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.system.n_qubits()
    }

    /// Basis indices with the given total excitation number.
    pub fn sector_indices(&self, excitations: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| excitation(i) == excitations)
            .collect()
    }
}

pub fn build_two_qubit(params: ModelParams) -> NhModel {
    NhModel::build(System::TwoQubit, params)
}

pub fn build_three_qubit(params: ModelParams) -> NhModel {
    NhModel::build(System::ThreeQubit, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeKind {
    /// Oscillatory no-jump dynamics.
    UnderDamped,
    ExceptionalPoint,
    /// Hyperbolic no-jump dynamics.
    OverDamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub kind: RegimeKind,
    /// `√|threshold²·λ² − κ²/16|`
    pub rate: f64,
    pub threshold: f64,
}

pub fn classify_regime(params: ModelParams, system: System) -> Regime {
    let threshold = system.threshold();
    let r = params.ratio();
    let kind = if (r - threshold).abs() <= EP_EPSILON * threshold {
        RegimeKind::ExceptionalPoint
    } else if r < threshold {
        RegimeKind::UnderDamped
    } else {
        RegimeKind::OverDamped
    };
    let rate = match kind {
        RegimeKind::ExceptionalPoint => 0.0,
        _ => params.lambda * ((threshold - r) * (threshold + r)).abs().sqrt(),
    };
    Regime {
        kind,
        rate,
        threshold,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub energy: C64,
    /// Eigenvector in the full register basis, already multiplied by
    /// `normalization`.
    pub state: PureState,
    /// Prefactor applied to the raw eigenvector, e.g. `N± = (|E±|² + λ²)^(−1/2)`.
    pub normalization: f64,
}

impl EigenPair {
    /// `‖H v − E v‖`
    pub fn residual(&self, hamiltonian: &OperatorMatrix) -> Result<f64> {
        let hv = crate::quantum::apply(hamiltonian, &self.state)?;
        let ev = self.state.scaled(self.energy);
        let diff: Vec<C64> = hv
            .amps()
            .iter()
            .zip(ev.amps())
            .map(|(a, b)| a - b)
            .collect();
        Ok(norm_squared(&PureState::from_amps(diff)?).sqrt())
    }
}

/// Closed-form single-excitation eigensystem.
///
/// Two qubits: `[E₊, E₋]` with `E± = −iκ/4 ± Ω` and
/// `|Φ±⟩ = N±(E±|10⟩ + λ|01⟩)`.
/// Three qubits: `[E₀, E₊, E₋]` where `E₀ = 0` is the dark state
/// `(|010⟩ − |001⟩)/√2` and the bright pair couples `|100⟩` to
/// `|φ_b⟩ = (|010⟩ + |001⟩)/√2` with strength `√2·λ`.
pub fn analytic_eigensystem(params: ModelParams, system: System) -> Result<Vec<EigenPair>> {
    let regime = classify_regime(params, system);
    if regime.kind == RegimeKind::ExceptionalPoint {
        return Err(Error::Defective {
            ratio: params.ratio(),
        });
    }
    let lambda = params.lambda;
    let g = lambda * (system.n_qubits() as f64 - 1.0).sqrt();
    // Ω for the under-damped case, iG for the over-damped case
    let root = match regime.kind {
        RegimeKind::UnderDamped => C64::from(regime.rate),
        _ => I * regime.rate,
    };
    let base = -I * (params.kappa / 4.0);
    let bright = |energy: C64| -> Result<EigenPair> {
        let normalization = 1.0 / (energy.norm_sqr() + g * g).sqrt();
        let raw = match system {
            System::TwoQubit => {
                PureState::superposition(&[(energy, "10"), (C64::from(lambda), "01")])?
            }
            System::ThreeQubit => PureState::superposition(&[
                (energy, "100"),
                // √2·λ |φ_b⟩ = λ(|010⟩ + |001⟩)
                (C64::from(lambda), "010"),
                (C64::from(lambda), "001"),
            ])?,
        };
        Ok(EigenPair {
            energy,
            state: raw.scaled(C64::from(normalization)),
            normalization,
        })
    };
    let mut pairs = Vec::with_capacity(3);
    if system == System::ThreeQubit {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        pairs.push(EigenPair {
            energy: ZERO,
            state: PureState::superposition(&[(C64::from(h), "010"), (C64::from(-h), "001")])?,
            normalization: h,
        });
    }
    pairs.push(bright(base + root)?);
    pairs.push(bright(base - root)?);
    Ok(pairs)
}

/// General complex eigendecomposition of the Hamiltonian restricted to the
/// sector with `excitations` total excitations. Eigenvectors are embedded in
/// the full register and scaled to unit norm.
pub fn numeric_eigensystem(model: &NhModel, excitations: usize) -> Result<Vec<EigenPair>> {
    let indices = model.sector_indices(excitations);
    if indices.is_empty() {
        return Err(Error::InvalidParams(format!(
            "no basis states with {excitations} excitations"
        )));
    }
    let block = model.hamiltonian.submatrix(&indices).to_nalgebra();
    let n = indices.len();
    let schur = Schur::try_new(block, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let energy = t[(k, k)];
        // back-substitution for the k-th eigenvector of the triangular factor
        let mut y = vec![ZERO; n];
        y[k] = ONE;
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - energy;
            if d.norm() < f64::EPSILON * (1.0 + energy.norm()) {
                d = C64::from(f64::EPSILON * (1.0 + energy.norm()));
            }
            y[i] = -s / d;
        }
        let mut amps = vec![ZERO; model.dim()];
        for (row, &full) in indices.iter().enumerate() {
            amps[full] = (0..n).map(|j| q[(row, j)] * y[j]).sum();
        }
        let raw = PureState::from_amps(amps)?;
        let normalization = 1.0 / norm_squared(&raw).sqrt();
        if !normalization.is_finite() {
            return Err(Error::Numeric("zero eigenvector".into()));
        }
        pairs.push(EigenPair {
            energy,
            state: raw.scaled(C64::from(normalization)),
            normalization,
        });
    }
    Ok(pairs)
}

/// Reorder `numeric` so that entry `i` has the energy nearest to
/// `reference[i]`. Greedy; adequate for well-separated spectra.
pub fn match_by_energy(numeric: &[EigenPair], reference: &[EigenPair]) -> Vec<EigenPair> {
    let mut pool: Vec<EigenPair> = numeric.to_vec();
    let mut out = Vec::with_capacity(reference.len());
    for r in reference {
        if pool.is_empty() {
            break;
        }
        let best = pool
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.energy - r.energy)
                    .norm()
                    .total_cmp(&(b.1.energy - r.energy).norm())
            })
            .map(|(i, _)| i)
            .expect("pool is nonempty");
        out.push(pool.swap_remove(best));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{inner, PureState};
    use approx::assert_abs_diff_eq;

    fn idx(label: &str) -> usize {
        usize::from_str_radix(label, 2).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        let p = ModelParams::from_ratio(2.0, 0.5).unwrap();
        assert_eq!(p.kappa(), 4.0);
        assert_eq!(p.ratio(), 0.5);
    }

    #[test]
    fn two_qubit_matrix_elements() {
        let m = build_two_qubit(ModelParams::new(1.0, 0.0).unwrap());
        assert_eq!(m.hamiltonian.get(idx("10"), idx("01")), ONE);
        assert_eq!(m.hamiltonian.hermiticity_error(), 0.0);
        let m = build_two_qubit(ModelParams::new(1.0, 2.0).unwrap());
        assert_eq!(m.hamiltonian.get(idx("10"), idx("10")), -I);
        assert_eq!(m.hamiltonian.get(idx("11"), idx("11")), -I);
        assert_eq!(m.hamiltonian.get(idx("01"), idx("01")), ZERO);
        assert_eq!(m.jump_ops.len(), 1);
        assert_abs_diff_eq!(m.jump_ops[0].get(idx("00"), idx("10")).re, 2f64.sqrt());
        assert_abs_diff_eq!(m.jump_ops[0].get(idx("01"), idx("11")).re, 2f64.sqrt());
    }

    #[test]
    fn three_qubit_matrix_elements() {
        let m = build_three_qubit(ModelParams::new(0.7, 1.3).unwrap());
        let h = &m.hamiltonian;
        assert_eq!(h.get(idx("100"), idx("010")).re, 0.7);
        assert_eq!(h.get(idx("100"), idx("001")).re, 0.7);
        assert_eq!(h.get(idx("010"), idx("001")), ZERO);
        assert_abs_diff_eq!((h.get(idx("100"), idx("100")) + I * 0.65).norm(), 0.0);
    }

    #[test]
    fn regime_classification() {
        let p = ModelParams::from_ratio(1.0, 0.5).unwrap();
        let r = classify_regime(p, System::TwoQubit);
        assert_eq!(r.kind, RegimeKind::UnderDamped);
        assert_abs_diff_eq!(r.rate, 0.75f64.sqrt(), epsilon = 1e-15);
        let r = classify_regime(ModelParams::from_ratio(1.0, 1.0).unwrap(), System::TwoQubit);
        assert_eq!(r.kind, RegimeKind::ExceptionalPoint);
        assert_eq!(r.rate, 0.0);
        let r = classify_regime(
            ModelParams::from_ratio(1.0, 1.0).unwrap(),
            System::ThreeQubit,
        );
        assert_eq!(r.kind, RegimeKind::UnderDamped);
        assert_abs_diff_eq!(r.rate, 1.0, epsilon = 1e-15);
        let r = classify_regime(ModelParams::from_ratio(1.0, 2.0).unwrap(), System::TwoQubit);
        assert_eq!(r.kind, RegimeKind::OverDamped);
        assert_abs_diff_eq!(r.rate, 3f64.sqrt(), epsilon = 1e-15);
        let r = classify_regime(
            ModelParams::from_ratio(1.0, SQRT_2).unwrap(),
            System::ThreeQubit,
        );
        assert_eq!(r.kind, RegimeKind::ExceptionalPoint);
    }

    #[test]
    fn analytic_energies() {
        let e =
            analytic_eigensystem(ModelParams::new(1.0, 2.0).unwrap(), System::TwoQubit).unwrap();
        let om = 0.75f64.sqrt();
        assert_abs_diff_eq!(
            (e[0].energy - C64::new(om, -0.5)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            (e[1].energy - C64::new(-om, -0.5)).norm(),
            0.0,
            epsilon = 1e-15
        );

        let e =
            analytic_eigensystem(ModelParams::new(1.0, 4.0).unwrap(), System::ThreeQubit).unwrap();
        assert_eq!(e[0].energy, ZERO);
        assert_abs_diff_eq!(
            (e[1].energy - C64::new(1.0, -1.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            (e[2].energy - C64::new(-1.0, -1.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn hermitian_limit_eigenstates() {
        let e =
            analytic_eigensystem(ModelParams::new(1.0, 0.0).unwrap(), System::TwoQubit).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::superposition(&[(C64::from(h), "10"), (C64::from(h), "01")]).unwrap();
        let minus =
            PureState::superposition(&[(C64::from(h), "10"), (C64::from(-h), "01")]).unwrap();
        assert_abs_diff_eq!(e[0].energy.re, 1.0);
        assert_abs_diff_eq!(e[1].energy.re, -1.0);
        assert_abs_diff_eq!(
            inner(&plus, &e[0].state).unwrap().norm(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            inner(&minus, &e[1].state).unwrap().norm(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn exceptional_point_is_defective() {
        let p = ModelParams::from_ratio(1.0, 1.0).unwrap();
        assert!(matches!(
            analytic_eigensystem(p, System::TwoQubit),
            Err(Error::Defective { .. })
        ));
    }

    #[test]
    fn sector_sizes() {
        let p = ModelParams::from_ratio(1.0, 0.3).unwrap();
        let e2 = numeric_eigensystem(&build_two_qubit(p), 1).unwrap();
        assert_eq!(e2.len(), 2);
        let e3 = numeric_eigensystem(&build_three_qubit(p), 1).unwrap();
        assert_eq!(e3.len(), 3);
        assert_eq!(e3.iter().filter(|e| e.energy.norm() < 1e-12).count(), 1);
        assert!(numeric_eigensystem(&build_two_qubit(p), 3).is_err());
    }
}
