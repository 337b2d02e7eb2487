//! Self-check suite: closed forms against propagation, monotonicity,
//! entanglement at the predicted times, master-equation invariants and the
//! eigensystem cross-check. Also reports where the typeset formulas for the
//! three-qubit system disagree with the propagated state.

use std::f64::consts::{FRAC_2_PI, SQRT_2};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    self, concurrence_2q, entangling_time_2q, no_jump_state, overdamped_asymptotics_2q, printed,
    success_probability_2q, success_probability_3q, success_probability_3q_closed_form,
    w_pairwise_concurrence, w_time_3q, w_time_rescaled_closed_form, InitialState, NoJumpAmplitudes,
};
use crate::error::Result;
use crate::model::{
    analytic_eigensystem, match_by_energy, numeric_eigensystem, ModelParams, NhModel, System,
};
use crate::numerics::{integrate_master, integrate_nojump, unravel, IntegratorOptions};
use crate::quantum::{
    norm_squared, outer, pure_to_density, wootters_concurrence, DensityMatrix, PureState, C64, I,
};
use crate::sweep::ratio_record;

/// Ratios straddling the exceptional point of each system.
pub const ORACLE_RATIOS_2Q: [f64; 8] = [0.0, 0.3, 0.7, 0.999, 1.001, 1.5, 2.0, 3.0];
pub const ORACLE_RATIOS_3Q: [f64; 8] = [0.0, 0.3, 0.7, 1.413, 1.415, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Coarser grids; finishes in a few seconds.
    pub quick: bool,
    /// Check the typeset three-qubit formulas (`D` without `√2`, the
    /// overdamped W time, the halved success probability) instead of the
    /// corrected ones.
    pub use_printed_3q: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub name: String,
    pub printed: f64,
    pub corrected: f64,
    /// `corrected / printed`
    pub factor: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub discrepancies: Vec<Discrepancy>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = write!(
                s,
                "{}  {:<52} max_err={:<10.3e} tol={:.0e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_error,
                c.tolerance
            );
            if let Some(d) = &c.detail {
                let _ = write!(s, "  ({d})");
            }
            s.push('\n');
        }
        s.push_str("\nDiscrepancies in the typeset three-qubit formulas:\n");
        for d in &self.discrepancies {
            let _ = writeln!(
                s,
                "  {:<34} printed={:<10} corrected={:<10} factor={:<10} {}",
                d.name,
                fmt_num(d.printed),
                fmt_num(d.corrected),
                fmt_num(d.factor),
                d.note
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            s,
            "\n{} checks, {} failed: {}",
            self.checks.len(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        );
        s
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.6}")
    }
}

fn params(r: f64) -> ModelParams {
    ModelParams::from_ratio(1.0, r).expect("grid ratios are valid")
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn max_state_diff(a: &PureState, b: &PureState) -> f64 {
    a.amps()
        .iter()
        .zip(b.amps())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Three-qubit no-jump state built from given amplitudes.
fn state_3q(amp: NoJumpAmplitudes, kappa: f64, t: f64) -> Result<PureState> {
    let decay = (-kappa * t / 4.0).exp();
    let a = C64::from(decay * amp.a);
    let b = -I * (decay * amp.b / SQRT_2);
    PureState::superposition(&[(a, "100"), (b, "010"), (b, "001")])
}

fn check(name: &str, tolerance: f64, run: impl FnOnce() -> Result<f64>) -> CheckResult {
    match run() {
        Ok(err) => CheckResult {
            name: name.into(),
            max_error: err,
            tolerance,
            passed: err <= tolerance,
            detail: None,
        },
        Err(e) => CheckResult {
            name: name.into(),
            max_error: f64::NAN,
            tolerance,
            passed: false,
            detail: Some(e.to_string()),
        },
    }
}

fn amplitude_oracle(
    system: System,
    initial: InitialState,
    ratios: &[f64],
    points: usize,
    printed_d: bool,
) -> Result<f64> {
    let ts = grid(0.0, 10.0, points);
    let errs: Vec<Result<f64>> = ratios
        .par_iter()
        .map(|&r| {
            let p = params(r);
            let model = NhModel::build(system, p);
            let psi0 = PureState::basis(initial.label(system)?)?;
            let states = integrate_nojump(&model, &psi0, &ts, IntegratorOptions::precise())?;
            let mut worst: f64 = 0.0;
            for (&t, psi) in ts.iter().zip(&states) {
                let closed = if printed_d {
                    state_3q(printed::amplitudes_3q(p, t)?, p.kappa(), t)?
                } else {
                    no_jump_state(system, p, t, initial)?
                };
                worst = worst.max(max_state_diff(&closed, psi));
            }
            Ok(worst)
        })
        .collect();
    errs.into_iter().try_fold(0.0, |m, e| Ok(f64::max(m, e?)))
}

/// Closed-form success probability against the propagated norm² at T.
fn probability_identity(system: System, ratios: &[f64], printed_p: bool) -> Result<f64> {
    let errs: Vec<Result<f64>> = ratios
        .par_iter()
        .map(|&r| {
            let p = params(r);
            let (t, closed) = match system {
                System::TwoQubit => (
                    entangling_time_2q(p, InitialState::NhExcited)?.t_star,
                    success_probability_2q(p),
                ),
                System::ThreeQubit if printed_p => {
                    (w_time_3q(p).t_star, printed::success_probability_3q(p))
                }
                System::ThreeQubit => (w_time_3q(p).t_star, success_probability_3q_closed_form(p)),
            };
            let model = NhModel::build(system, p);
            let psi0 = PureState::basis(system.nh_excited_label())?;
            let psi = integrate_nojump(&model, &psi0, &[0.0, t], IntegratorOptions::precise())?;
            Ok((closed - norm_squared(&psi[1])).abs())
        })
        .collect();
    errs.into_iter().try_fold(0.0, |m, e| Ok(f64::max(m, e?)))
}

/// Largest step against the expected direction (0 when monotone).
fn monotonic_violation(values: &[f64], increasing: bool) -> f64 {
    values
        .windows(2)
        .map(|w| if increasing { w[0] - w[1] } else { w[1] - w[0] })
        .fold(0.0, f64::max)
}

fn monotonicity(step: f64) -> Result<f64> {
    let n = (5.0 / step).round() as usize + 1;
    let rs: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
    let herm: Vec<f64> = rs.iter().copied().filter(|&r| r <= 0.95 + 1e-12).collect();
    let mut t2 = Vec::new();
    let mut p2 = Vec::new();
    let mut t3 = Vec::new();
    let mut p3 = Vec::new();
    for &r in &rs {
        let p = params(r);
        let e = entangling_time_2q(p, InitialState::NhExcited)?;
        t2.push(e.t_rescaled);
        p2.push(e.success_probability);
        let w = w_time_3q(p);
        t3.push(w.t_rescaled);
        p3.push(w.success_probability);
    }
    let th = herm
        .iter()
        .map(|&r| Ok(entangling_time_2q(params(r), InitialState::HermitianExcited)?.t_rescaled))
        .collect::<Result<Vec<f64>>>()?;
    Ok([
        monotonic_violation(&t2, false),
        monotonic_violation(&p2, false),
        monotonic_violation(&t3, false),
        monotonic_violation(&p3, false),
        monotonic_violation(&th, true),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

fn peak_concurrence(ratios: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in ratios {
        let p = params(r);
        let t = entangling_time_2q(p, InitialState::NhExcited)?.t_star;
        worst = worst.max((concurrence_2q(p, t, InitialState::NhExcited)? - 1.0).abs());
        if r < 1.0 {
            let t = entangling_time_2q(p, InitialState::HermitianExcited)?.t_star;
            worst = worst.max((concurrence_2q(p, t, InitialState::HermitianExcited)? - 1.0).abs());
        }
    }
    Ok(worst)
}

fn w_state_concurrence(ratios: &[f64], printed_d: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in ratios {
        let p = params(r);
        let t = w_time_3q(p).t_star;
        let state = if printed_d {
            state_3q(printed::amplitudes_3q(p, t)?, p.kappa(), t)?
        } else {
            no_jump_state(System::ThreeQubit, p, t, InitialState::NhExcited)?
        };
        for c in w_pairwise_concurrence(&state.normalized()?)? {
            worst = worst.max((c - 2.0 / 3.0).abs());
        }
    }
    Ok(worst)
}

fn exceptional_point_continuity() -> Result<f64> {
    let t2 = |r: f64| -> Result<f64> {
        Ok(entangling_time_2q(params(r), InitialState::NhExcited)?.t_rescaled)
    };
    let at_ep_3q = w_time_3q(params(SQRT_2)).t_rescaled;
    let errs = [
        (t2(1.0 - 1e-4)? - FRAC_2_PI).abs(),
        (t2(1.0 + 1e-4)? - FRAC_2_PI).abs(),
        (t2(1.0)? - FRAC_2_PI).abs(),
        (w_time_3q(params(SQRT_2 - 1e-4)).t_rescaled - at_ep_3q).abs(),
        (w_time_3q(params(SQRT_2 + 1e-4)).t_rescaled - at_ep_3q).abs(),
        (w_time_rescaled_closed_form(SQRT_2 + 1e-4) - at_ep_3q).abs(),
    ];
    Ok(errs.into_iter().fold(0.0, f64::max))
}

fn root_finder(step: f64) -> Result<f64> {
    let mut jobs = Vec::new();
    let n = (3.0 / step).round() as usize;
    for k in 0..=n {
        let r = k as f64 * step;
        jobs.push((System::TwoQubit, InitialState::NhExcited, r));
        jobs.push((System::ThreeQubit, InitialState::NhExcited, r));
        if r <= 0.95 + 1e-12 {
            jobs.push((System::TwoQubit, InitialState::HermitianExcited, r));
        }
    }
    let errs: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(s, i, r)| Ok(ratio_record(s, i, 1.0, r)?.abs_diff))
        .collect();
    errs.into_iter().try_fold(0.0, |m, e| Ok(f64::max(m, e?)))
}

/// Rescaled W time in closed form against the root-finder above the
/// exceptional point. A NaN from the formula counts as a failure.
fn w_time_overdamped(printed_t: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in [1.5, 2.0, 2.5, 3.0] {
        let closed = if printed_t {
            printed::w_time_rescaled_overdamped(r)
        } else {
            w_time_rescaled_closed_form(r)
        };
        let numeric =
            ratio_record(System::ThreeQubit, InitialState::NhExcited, 1.0, r)?.t_rs_numeric;
        let err = (closed - numeric).abs();
        if err.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(err);
    }
    Ok(worst)
}

fn overdamped_limits() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in [1.5, 2.0, 3.0, 5.0] {
        let p = params(r);
        let asym = overdamped_asymptotics_2q(p)?;
        worst = worst.max(concurrence_2q(p, asym.t_zero, InitialState::NhExcited)?);
        let late = concurrence_2q(p, 50.0, InitialState::NhExcited)?;
        worst = worst.max((late - asym.e_infinity).abs());
    }
    Ok(worst)
}

/// Trace, hermiticity and positivity of the propagated density matrix, and
/// the no-jump/jump decomposition against the full master equation.
fn master_equation(points: usize) -> Result<(f64, f64)> {
    let ts = grid(0.0, 5.0, points);
    let cases = [
        (System::TwoQubit, 0.3),
        (System::TwoQubit, 0.7),
        (System::TwoQubit, 1.5),
        (System::ThreeQubit, 0.7),
        (System::ThreeQubit, 2.0),
    ];
    let results: Vec<Result<(f64, f64)>> = cases
        .par_iter()
        .map(|&(system, r)| {
            let model = NhModel::build(system, params(r));
            let psi0 = PureState::basis(system.nh_excited_label())?;
            let rho0 = pure_to_density(&psi0)?;
            let opts = IntegratorOptions::precise();
            let rhos = integrate_master(&model, &rho0, &ts, opts)?;
            let mut invariants: f64 = 0.0;
            for rho in &rhos {
                let m = rho.matrix();
                invariants = invariants
                    .max((rho.trace() - 1.0).norm())
                    .max(m.hermiticity_error())
                    .max(-rho.eigenvalues()[0]);
            }
            let snaps = unravel(&model, &psi0, &ts, opts)?;
            let split = snaps
                .iter()
                .zip(&rhos)
                .map(|(s, rho)| s.reconstruct().max_abs_diff(rho.matrix()))
                .fold(0.0, f64::max);
            Ok((invariants, split))
        })
        .collect();
    results.into_iter().try_fold((0.0, 0.0), |(a, b), e| {
        let (x, y) = e?;
        Ok((f64::max(a, x), f64::max(b, y)))
    })
}

fn eigensystems(step: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let n = (3.0 / step).round() as usize;
    for system in [System::TwoQubit, System::ThreeQubit] {
        for k in 0..=n {
            let r = k as f64 * step;
            if (r - system.threshold()).abs() < 1e-3 {
                continue;
            }
            let model = NhModel::build(system, params(r));
            let reference = analytic_eigensystem(model.params, system)?;
            let numeric = match_by_energy(&numeric_eigensystem(&model, 1)?, &reference);
            for (a, b) in reference.iter().zip(&numeric) {
                worst = worst
                    .max((a.energy - b.energy).norm())
                    .max(a.residual(&model.hamiltonian)?)
                    .max(b.residual(&model.hamiltonian)?);
            }
        }
    }
    Ok(worst)
}

fn wootters_random(cases: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let mut z = || C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let state = PureState::superposition(&[(z(), "10"), (z(), "01")])?.normalized()?;
        let (a, b) = (state.amp("10")?, state.amp("01")?);
        let rho = DensityMatrix::new(outer(&state))?;
        worst = worst.max((wootters_concurrence(&rho)? - 2.0 * (a * b).norm()).abs());
    }
    Ok(worst)
}

fn discrepancies() -> Result<Vec<Discrepancy>> {
    let p = params(0.5);
    let t = 1.0;
    let d_printed = printed::amplitudes_3q(p, t)?.b;
    let d_corrected = analytic::amplitudes_3q(p, t)?.b;

    let t_star = w_time_3q(p).t_star;
    let c_printed = w_pairwise_concurrence(
        &state_3q(printed::amplitudes_3q(p, t_star)?, p.kappa(), t_star)?.normalized()?,
    )?[0];

    let over = params(2.0);
    let record = ratio_record(System::ThreeQubit, InitialState::NhExcited, 1.0, 2.0)?;

    let model = NhModel::build(System::ThreeQubit, p);
    let psi0 = PureState::basis("100")?;
    let psi = integrate_nojump(&model, &psi0, &[0.0, t_star], IntegratorOptions::precise())?;
    let p_oracle = norm_squared(&psi[1]);

    Ok(vec![
        Discrepancy {
            name: "bright amplitude D (R=0.5, λt=1)".into(),
            printed: d_printed,
            corrected: d_corrected,
            factor: d_corrected / d_printed,
            note: "printed D lacks the √2 of the bright-mode coupling".into(),
        },
        Discrepancy {
            name: "pair concurrence at W time (R=0.5)".into(),
            printed: c_printed,
            corrected: 2.0 / 3.0,
            factor: 2.0 / 3.0 / c_printed,
            note: "printed amplitudes never reach the W state".into(),
        },
        Discrepancy {
            name: "rescaled W time (R=2)".into(),
            printed: printed::w_time_rescaled_overdamped(over.ratio()),
            corrected: w_time_rescaled_closed_form(over.ratio()),
            factor: w_time_rescaled_closed_form(over.ratio())
                / printed::w_time_rescaled_overdamped(over.ratio()),
            note: format!(
                "printed form uses arccosh(1/√3) (undefined) and √(R²−1); root-finder gives {:.6}",
                record.t_rs_numeric
            ),
        },
        Discrepancy {
            name: "W success probability (R=0.5)".into(),
            printed: printed::success_probability_3q(p),
            corrected: success_probability_3q(p),
            factor: success_probability_3q(p) / printed::success_probability_3q(p),
            note: format!("printed prefactor is half; propagated norm² is {p_oracle:.6}"),
        },
    ])
}

pub fn run_validation(opts: ValidateOptions) -> ValidationReport {
    let quick = opts.quick;
    let points = if quick { 50 } else { 200 };
    let step: f64 = if quick { 0.25 } else { 0.05 };
    let sweep: Vec<f64> = (0..=(3.0 / step).round() as usize)
        .map(|k| k as f64 * step)
        .collect();

    let mut checks = vec![
        check("amplitude oracle 2q |1,0>", 1e-8, || {
            amplitude_oracle(
                System::TwoQubit,
                InitialState::NhExcited,
                &ORACLE_RATIOS_2Q,
                points,
                false,
            )
        }),
        check("amplitude oracle 2q |0,1>", 1e-8, || {
            amplitude_oracle(
                System::TwoQubit,
                InitialState::HermitianExcited,
                &ORACLE_RATIOS_2Q,
                points,
                false,
            )
        }),
        check(
            if opts.use_printed_3q {
                "amplitude oracle 3q (printed D)"
            } else {
                "amplitude oracle 3q"
            },
            1e-8,
            || {
                amplitude_oracle(
                    System::ThreeQubit,
                    InitialState::NhExcited,
                    &ORACLE_RATIOS_3Q,
                    points,
                    opts.use_printed_3q,
                )
            },
        ),
        check(
            "success probability = propagated norm² (2q)",
            1e-10,
            || probability_identity(System::TwoQubit, &sweep, false),
        ),
        check(
            if opts.use_printed_3q {
                "success probability = propagated norm² (3q, printed)"
            } else {
                "success probability = propagated norm² (3q)"
            },
            1e-10,
            || probability_identity(System::ThreeQubit, &sweep, opts.use_printed_3q),
        ),
        check("monotone T_rs, T'_rs and P over R", 0.0, || {
            monotonicity(step)
        }),
        check("unit concurrence at T (2q)", 1e-9, || {
            peak_concurrence(&sweep)
        }),
        check("pairwise concurrence 2/3 at W time", 1e-9, || {
            w_state_concurrence(&sweep, opts.use_printed_3q)
        }),
        check(
            "continuity across exceptional points",
            1e-3,
            exceptional_point_continuity,
        ),
        check("root-finder vs closed-form T_rs", 1e-8, || {
            root_finder(step)
        }),
        check(
            if opts.use_printed_3q {
                "overdamped W time vs root-finder (printed)"
            } else {
                "overdamped W time vs root-finder"
            },
            1e-8,
            || w_time_overdamped(opts.use_printed_3q),
        ),
        check(
            "overdamped zero crossing and limit",
            1e-4,
            overdamped_limits,
        ),
        check("eigensystem analytic vs numeric", 1e-9, || {
            eigensystems(if quick { 0.5 } else { 0.25 })
        }),
        check("Wootters = 2|ab| on random states", 1e-10, || {
            wootters_random(1000)
        }),
    ];
    match master_equation(if quick { 26 } else { 101 }) {
        Ok((inv, split)) => {
            checks.push(check(
                "master equation trace/hermiticity/positivity",
                1e-9,
                || Ok(inv),
            ));
            checks.push(check(
                "no-jump + jump parts = master solution",
                1e-7,
                || Ok(split),
            ));
        }
        Err(e) => checks.push(CheckResult {
            name: "master equation".into(),
            max_error: f64::NAN,
            tolerance: 1e-9,
            passed: false,
            detail: Some(e.to_string()),
        }),
    }
    let discrepancies = discrepancies().unwrap_or_default();
    ValidationReport {
        checks,
        discrepancies,
    }
}
