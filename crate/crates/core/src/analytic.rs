//! Closed-form no-jump dynamics, entangling times and success probabilities.
//!
//! In the single-excitation sector the NH qubit couples to one bright mode
//! with strength `g` (`λ` for two qubits, `√2·λ` for three). Writing
//! `w = g² − κ²/16`, every amplitude is built from
//!
//! ```text
//! c(t) = cos(√w t),     s(t) = sin(√w t)/√w
//! ```
//!
//! which turn into `cosh`/`sinh` for `w < 0` and into `1` and `t` at the
//! exceptional point. Within [`EP_WINDOW`] of the threshold the power series
//! of `c` and `s` is summed instead of the trigonometric forms.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify_regime, ModelParams, RegimeKind, System};
use crate::quantum::{partial_trace, pure_to_density, wootters_concurrence, PureState, C64, I};

/// Half-width in R of the window around an exceptional point where series
/// forms replace the trigonometric/hyperbolic ones.
pub const EP_WINDOW: f64 = 1e-6;

/// Which qubit holds the excitation at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialState {
    /// `|1,0⟩` (or `|1,0,0⟩`): the decaying qubit is excited.
    #[serde(rename = "nh")]
    NhExcited,
    /// `|0,1⟩`: the lossless partner is excited.
    #[serde(rename = "herm")]
    HermitianExcited,
}

impl InitialState {
    pub fn tag(self) -> &'static str {
        match self {
            InitialState::NhExcited => "nh",
            InitialState::HermitianExcited => "herm",
        }
    }

    pub fn label(self, system: System) -> Result<&'static str> {
        match (self, system) {
            (InitialState::NhExcited, System::TwoQubit) => Ok("10"),
            (InitialState::HermitianExcited, System::TwoQubit) => Ok("01"),
            (InitialState::NhExcited, System::ThreeQubit) => Ok("100"),
            (InitialState::HermitianExcited, System::ThreeQubit) => Err(Error::NotApplicable(
                "the three-qubit model starts with the NH qubit excited".into(),
            )),
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Real amplitudes of the unnormalized no-jump state
/// `e^(−κt/4) (a|excited NH⟩ − i b|partner⟩)`.
///
/// For the primed start `|0,1⟩` the roles swap: `a` multiplies `|0,1⟩` and
/// `b` multiplies `|1,0⟩`. For three qubits the partner ket is the bright
/// state `|φ_b⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoJumpAmplitudes {
    pub a: f64,
    pub b: f64,
    /// Probability that no jump has occurred by time `t`.
    pub norm_sq_unnormalized: f64,
    /// `(a² + b²)^(−1/2)`
    pub normalization: f64,
}

impl NoJumpAmplitudes {
    fn new(a: f64, b: f64, kappa: f64, t: f64) -> Self {
        let n2 = a * a + b * b;
        Self {
            a,
            b,
            norm_sq_unnormalized: (-kappa * t / 2.0).exp() * n2,
            normalization: 1.0 / n2.sqrt(),
        }
    }

    /// `2|ab|/(a² + b²)`
    pub fn concurrence(&self) -> f64 {
        2.0 * (self.a * self.b).abs() / (self.a * self.a + self.b * self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglingTimeResult {
    /// First time of maximal entanglement, in units of `1/λ` when `λ = 1`.
    pub t_star: f64,
    pub t_rescaled: f64,
    /// Same quantity for the lossless system with the same `λ`.
    pub tau_hermitian: f64,
    pub success_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverdampedAsymptotics {
    /// Time at which the two-qubit concurrence returns to zero.
    pub t_zero: f64,
    /// `2|x|/(1 + x²)`
    pub e_infinity: f64,
    /// `(G − κ/4)/λ`
    pub x: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn in_ep_window(params: ModelParams, system: System) -> bool {
    (params.ratio() - system.threshold()).abs() < EP_WINDOW
}

/// `(c(t), s(t))` for the bright-mode coupling of `system`.
fn propagator_functions(params: ModelParams, system: System, t: f64) -> (f64, f64) {
    if in_ep_window(params, system) {
        let th = system.threshold();
        let r = params.ratio();
        let w = params.lambda() * params.lambda() * (th - r) * (th + r);
        return series_functions(w, t);
    }
    let regime = classify_regime(params, system);
    let rate = regime.rate;
    match regime.kind {
        RegimeKind::UnderDamped => ((rate * t).cos(), (rate * t).sin() / rate),
        RegimeKind::OverDamped => ((rate * t).cosh(), (rate * t).sinh() / rate),
        RegimeKind::ExceptionalPoint => (1.0, t),
    }
}

/// Power series of `cos(√w t)` and `sin(√w t)/√w`, valid for either sign of `w`.
fn series_functions(w: f64, t: f64) -> (f64, f64) {
    let z = -w * t * t;
    let (mut c, mut s) = (1.0, 1.0);
    let (mut tc, mut ts) = (1.0, 1.0);
    for k in 1..60 {
        let k = k as f64;
        tc *= z / ((2.0 * k - 1.0) * (2.0 * k));
        ts *= z / ((2.0 * k) * (2.0 * k + 1.0));
        c += tc;
        s += ts;
        if tc.abs() < 1e-18 * c.abs() && ts.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    (c, s * t)
}

/// `atan(√v)/√v`, continued to `atanh(√−v)/√−v` for `v < 0`.
fn arctan_ratio(v: f64) -> f64 {
    if v.abs() < 1e-4 {
        // Σ (−v)^k / (2k+1)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..12 {
            sum += term / (2 * k + 1) as f64;
            term *= -v;
        }
        sum
    } else if v > 0.0 {
        v.sqrt().atan() / v.sqrt()
    } else {
        (-v).sqrt().atanh() / (-v).sqrt()
    }
}

fn effective_coupling(params: ModelParams, system: System) -> f64 {
    match system {
        System::TwoQubit => params.lambda(),
        System::ThreeQubit => SQRT_2 * params.lambda(),
    }
}

/// Two-qubit no-jump amplitudes from either initial state.
pub fn amplitudes_2q(
    params: ModelParams,
    t: f64,
    initial: InitialState,
) -> Result<NoJumpAmplitudes> {
    check_time(t)?;
    let (c, s) = propagator_functions(params, System::TwoQubit, t);
    let k4 = params.kappa() / 4.0;
    let a = match initial {
        InitialState::NhExcited => c - k4 * s,
        InitialState::HermitianExcited => c + k4 * s,
    };
    Ok(NoJumpAmplitudes::new(
        a,
        params.lambda() * s,
        params.kappa(),
        t,
    ))
}

/// `2|ab|/(a² + b²)` for the two-qubit no-jump state.
pub fn concurrence_2q(params: ModelParams, t: f64, initial: InitialState) -> Result<f64> {
    Ok(amplitudes_2q(params, t, initial)?.concurrence())
}

/// Three-qubit no-jump amplitudes `C` (on `|1,0,0⟩`) and `D` (on `|φ_b⟩`)
/// from `|1,0,0⟩`. `D` carries the bright-mode coupling `√2·λ`.
pub fn amplitudes_3q(params: ModelParams, t: f64) -> Result<NoJumpAmplitudes> {
    check_time(t)?;
    let (c, s) = propagator_functions(params, System::ThreeQubit, t);
    let cc = c - params.kappa() / 4.0 * s;
    let d = effective_coupling(params, System::ThreeQubit) * s;
    Ok(NoJumpAmplitudes::new(cc, d, params.kappa(), t))
}

pub fn amplitudes(
    system: System,
    params: ModelParams,
    t: f64,
    initial: InitialState,
) -> Result<NoJumpAmplitudes> {
    match system {
        System::TwoQubit => amplitudes_2q(params, t, initial),
        System::ThreeQubit => {
            initial.label(system)?;
            amplitudes_3q(params, t)
        }
    }
}

/// Unnormalized no-jump state vector reconstructed from the amplitudes.
pub fn no_jump_state(
    system: System,
    params: ModelParams,
    t: f64,
    initial: InitialState,
) -> Result<PureState> {
    let amp = amplitudes(system, params, t, initial)?;
    let decay = (-params.kappa() * t / 4.0).exp();
    let a = C64::from(decay * amp.a);
    let b = -I * (decay * amp.b);
    match (system, initial) {
        (System::TwoQubit, InitialState::NhExcited) => {
            PureState::superposition(&[(a, "10"), (b, "01")])
        }
        (System::TwoQubit, InitialState::HermitianExcited) => {
            PureState::superposition(&[(a, "01"), (b, "10")])
        }
        (System::ThreeQubit, _) => {
            PureState::superposition(&[(a, "100"), (b / SQRT_2, "010"), (b / SQRT_2, "001")])
        }
    }
}

/// Minimum over the three pairs of the Wootters concurrence of the
/// normalized three-qubit no-jump state, in closed form:
/// `min(√2|C D|, D²)/(C² + D²)`.
pub fn concurrence_3q(params: ModelParams, t: f64) -> Result<f64> {
    let amp = amplitudes_3q(params, t)?;
    let n2 = amp.a * amp.a + amp.b * amp.b;
    Ok((SQRT_2 * (amp.a * amp.b).abs()).min(amp.b * amp.b) / n2)
}

/// Concurrence column used by sweeps: two-qubit concurrence, or the weakest
/// pairwise concurrence for three qubits.
pub fn concurrence(
    system: System,
    params: ModelParams,
    t: f64,
    initial: InitialState,
) -> Result<f64> {
    match system {
        System::TwoQubit => concurrence_2q(params, t, initial),
        System::ThreeQubit => {
            initial.label(system)?;
            concurrence_3q(params, t)
        }
    }
}

/// `π/(4λ)`
pub fn tau_hermitian_2q(params: ModelParams) -> f64 {
    FRAC_PI_4 / params.lambda()
}

/// `arccos(1/√3)/(√2 λ)`
pub fn tau_hermitian_3q(params: ModelParams) -> f64 {
    (1.0 / 3f64.sqrt()).acos() / (SQRT_2 * params.lambda())
}

/// First time where the NH-qubit amplitude `c − (κ/4)s` equals the partner
/// amplitude `g·s`, i.e. `tan(√w T) = √w/(g + κ/4)` and its continuations.
fn balance_time(params: ModelParams, system: System) -> f64 {
    let r = params.ratio();
    let th = system.threshold();
    // T = F(v)/(λ(1+R)),  v = (th² − R²)/(1+R)²
    let v = (th - r) * (th + r) / ((1.0 + r) * (1.0 + r));
    arctan_ratio(v) / (params.lambda() * (1.0 + r))
}

/// Rescaled time to maximal two-qubit entanglement.
///
/// `NhExcited` is defined for every R; `HermitianExcited` only below the
/// exceptional point, since above it the concurrence never reaches 1.
pub fn entangling_time_2q(
    params: ModelParams,
    initial: InitialState,
) -> Result<EntanglingTimeResult> {
    let tau = tau_hermitian_2q(params);
    let t_star = match initial {
        InitialState::NhExcited => balance_time(params, System::TwoQubit),
        InitialState::HermitianExcited => {
            let regime = classify_regime(params, System::TwoQubit);
            if regime.kind != RegimeKind::UnderDamped {
                return Err(Error::NoMaximalEntanglement {
                    ratio: params.ratio(),
                });
            }
            let r = params.ratio();
            ((1.0 + r) / (1.0 - r)).sqrt().atan() / regime.rate
        }
    };
    let success_probability = match initial {
        InitialState::NhExcited => success_probability_2q(params),
        InitialState::HermitianExcited => {
            amplitudes_2q(params, t_star, initial)?.norm_sq_unnormalized
        }
    };
    Ok(EntanglingTimeResult {
        t_star,
        t_rescaled: t_star / tau,
        tau_hermitian: tau,
        success_probability,
    })
}

/// Probability of no jump up to the entangling time, starting from `|1,0⟩`:
/// `2/(1−R²)·e^(−κT/2)·sin²(ΩT)` below the exceptional point and the
/// hyperbolic analog above it.
pub fn success_probability_2q(params: ModelParams) -> f64 {
    let t = balance_time(params, System::TwoQubit);
    let r = params.ratio();
    let damping = (-params.kappa() * t / 2.0).exp();
    if in_ep_window(params, System::TwoQubit) {
        let (_, s) = propagator_functions(params, System::TwoQubit, t);
        return 2.0 * damping * (params.lambda() * s).powi(2);
    }
    let regime = classify_regime(params, System::TwoQubit);
    match regime.kind {
        RegimeKind::UnderDamped => 2.0 / (1.0 - r * r) * damping * (regime.rate * t).sin().powi(2),
        RegimeKind::OverDamped => 2.0 / (r * r - 1.0) * damping * (regime.rate * t).sinh().powi(2),
        RegimeKind::ExceptionalPoint => 2.0 * damping * (params.lambda() * t).powi(2),
    }
}

/// Zero crossing and long-time limit of the two-qubit concurrence above
/// the exceptional point.
///
/// For large R the limit behaves as `1/R`.
pub fn overdamped_asymptotics_2q(params: ModelParams) -> Result<OverdampedAsymptotics> {
    let regime = classify_regime(params, System::TwoQubit);
    if regime.kind != RegimeKind::OverDamped {
        return Err(Error::NotApplicable(format!(
            "overdamped asymptotics need R > 1, got {}",
            params.ratio()
        )));
    }
    let g = regime.rate;
    let k4 = params.kappa() / 4.0;
    let x = (g - k4) / params.lambda();
    Ok(OverdampedAsymptotics {
        t_zero: (g / k4).atanh() / g,
        e_infinity: 2.0 * x.abs() / (1.0 + x * x),
        x,
    })
}

/// Time to reach the W-type state from `|1,0,0⟩`: first solution of
/// `|C| = |D|/√2`, i.e. `tan(ΛT) = √(2−R²)/(1+R)`.
pub fn w_time_3q(params: ModelParams) -> EntanglingTimeResult {
    let t_star = balance_time(params, System::ThreeQubit);
    let tau = tau_hermitian_3q(params);
    EntanglingTimeResult {
        t_star,
        t_rescaled: t_star / tau,
        tau_hermitian: tau,
        success_probability: success_probability_3q(params),
    }
}

/// `e^(−κT/2)(C² + D²)` at the W time.
pub fn success_probability_3q(params: ModelParams) -> f64 {
    let t = balance_time(params, System::ThreeQubit);
    amplitudes_3q(params, t)
        .expect("balance time is finite and positive")
        .norm_sq_unnormalized
}

/// `3/(2−R²)·e^(−κT/2)·sin²(ΛT)` and its hyperbolic analog. Algebraically
/// equal to [`success_probability_3q`].
pub fn success_probability_3q_closed_form(params: ModelParams) -> f64 {
    let t = balance_time(params, System::ThreeQubit);
    let r = params.ratio();
    let damping = (-params.kappa() * t / 2.0).exp();
    if in_ep_window(params, System::ThreeQubit) {
        let (_, s) = propagator_functions(params, System::ThreeQubit, t);
        return 3.0 * damping * (params.lambda() * s).powi(2);
    }
    let regime = classify_regime(params, System::ThreeQubit);
    match regime.kind {
        RegimeKind::UnderDamped => 3.0 / (2.0 - r * r) * damping * (regime.rate * t).sin().powi(2),
        RegimeKind::OverDamped => 3.0 / (r * r - 2.0) * damping * (regime.rate * t).sinh().powi(2),
        RegimeKind::ExceptionalPoint => 3.0 * damping * (params.lambda() * t).powi(2),
    }
}

/// Rescaled W time written out explicitly:
/// `√2·arctan(√(2−R²)/(1+R)) / (√(2−R²)·arccos(1/√3))` below `R = √2`,
/// with `arctanh` and `√(R²−2)` above.
pub fn w_time_rescaled_closed_form(ratio: f64) -> f64 {
    let acos = (1.0 / 3f64.sqrt()).acos();
    let d = 2.0 - ratio * ratio;
    if (ratio - SQRT_2).abs() < EP_WINDOW {
        // T·λ = 1/(1+√2) at the exceptional point
        return SQRT_2 / ((1.0 + ratio) * acos) * arctan_ratio(d / (1.0 + ratio).powi(2));
    }
    if d > 0.0 {
        SQRT_2 * (d.sqrt() / (1.0 + ratio)).atan() / (d.sqrt() * acos)
    } else {
        SQRT_2 * ((-d).sqrt() / (1.0 + ratio)).atanh() / ((-d).sqrt() * acos)
    }
}

/// Pairwise Wootters concurrences `(C₁₂, C₁₃, C₂₃)` of a normalized
/// three-qubit state.
pub fn w_pairwise_concurrence(state: &PureState) -> Result<[f64; 3]> {
    if state.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: state.dim(),
        });
    }
    let rho = pure_to_density(state)?;
    let pair =
        |keep: [usize; 2]| -> Result<f64> { wootters_concurrence(&partial_trace(&rho, &keep)?) };
    Ok([pair([1, 2])?, pair([1, 3])?, pair([2, 3])?])
}

/// Formulas as originally typeset, kept to show how they disagree with the
/// propagated state. Not used by any other computation.
pub mod printed {
    use super::*;

    /// `D = (λ/Λ) sin(Λt)`, missing the `√2` of the bright-mode coupling.
    pub fn amplitudes_3q(params: ModelParams, t: f64) -> Result<NoJumpAmplitudes> {
        check_time(t)?;
        let (c, s) = propagator_functions(params, System::ThreeQubit, t);
        let cc = c - params.kappa() / 4.0 * s;
        Ok(NoJumpAmplitudes::new(
            cc,
            params.lambda() * s,
            params.kappa(),
            t,
        ))
    }

    /// Rescaled W time above `R = √2` with `√(R²−1)` in the `arctanh` and
    /// `arccosh(1/√3)` in the denominator. The latter is undefined over the
    /// reals, so this returns NaN.
    pub fn w_time_rescaled_overdamped(ratio: f64) -> f64 {
        let acosh = (1.0 / 3f64.sqrt()).acosh();
        SQRT_2 / ((ratio * ratio - 2.0).sqrt() * acosh)
            * ((ratio * ratio - 1.0).sqrt() / (1.0 + ratio)).atanh()
    }

    /// Success probability with the `3/(2(2−R²))` prefactor.
    pub fn success_probability_3q(params: ModelParams) -> f64 {
        super::success_probability_3q_closed_form(params) / 2.0
    }
}
