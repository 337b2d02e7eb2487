//! Sweep records, run configuration and the command implementations
//! behind the `nh-entangle` binary.
//!
//! Times are reported as `λt` and dissipation as `R`.

use std::io::{Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    self, entangling_time_2q, success_probability_2q, success_probability_3q, tau_hermitian_2q,
    tau_hermitian_3q, w_pairwise_concurrence, w_time_3q, InitialState,
};
use crate::error::Error as ModelError;
use crate::model::{ModelParams, NhModel, System};
use crate::numerics::{
    integrate_nojump, numeric_entangling_time, run_monte_carlo, CrossingOptions, HistogramBin,
    IntegratorOptions,
};
use crate::quantum::{norm_squared, pure_to_density, wootters_concurrence, PureState, I};

pub const SWEEP_HEADER: &str = "system,initial,R,lambda_t,a,b,norm_sq,concurrence,p_nojump";
pub const RATIO_HEADER: &str = "system,initial,R,T,T_rs,T_rs_numeric,abs_diff,P_success";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Configuration problems; reported with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures while running a command.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every setting a run can take, each optional. Loaded from a TOML file
/// and/or command-line flags; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<System>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// `self` overridden by every field set in `flags`. Setting either of
    /// `ratio`/`kappa` on the command line replaces both from the file.
    pub fn overridden_by(mut self, flags: RunConfig) -> Self {
        if flags.ratio.is_some() || flags.kappa.is_some() {
            self.ratio = None;
            self.kappa = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(
            system,
            initial,
            lambda,
            ratio,
            kappa,
            ratio_range,
            tmax,
            steps,
            engine,
            trajectories,
            seed,
            format,
            out
        );
        self
    }

    pub fn system(&self) -> System {
        self.system.unwrap_or(System::TwoQubit)
    }

    pub fn initial(&self) -> InitialState {
        self.initial.unwrap_or(InitialState::NhExcited)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(1.0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn engine(&self) -> Engine {
        self.engine.unwrap_or(Engine::Analytic)
    }

    fn check_system_initial(&self) -> Result<(), ConfigError> {
        self.initial().label(self.system()).map_err(|_| {
            ConfigError::Invalid("--initial herm is only defined for --system 2q".into())
        })?;
        Ok(())
    }

    /// Model parameters from `lambda` and exactly one of `ratio`/`kappa`.
    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        let lambda = self.lambda();
        match (self.ratio, self.kappa) {
            (Some(_), Some(_)) => Err(ConfigError::Invalid(
                "--ratio and --kappa are mutually exclusive".into(),
            )),
            (Some(r), None) => Ok(ModelParams::from_ratio(lambda, r)?),
            (None, Some(k)) => Ok(ModelParams::new(lambda, k)?),
            (None, None) => Err(ConfigError::Invalid(
                "one of --ratio or --kappa is required".into(),
            )),
        }
    }
}

/// Inclusive grid `lo, lo + step, …, ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl RatioRange {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::Invalid(format!("--ratio-range expects lo:hi:step, got {s:?}"));
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [lo, hi, step] = parts[..] else {
            return Err(bad());
        };
        if !(lo >= 0.0) || !(hi >= lo) || !(step > 0.0) || !hi.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "--ratio-range needs 0 <= lo <= hi and step > 0, got {s:?}"
            )));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| {
                let r = self.lo + k as f64 * self.step;
                // strip accumulated binary noise so grid values print cleanly
                (r * 1e12).round() / 1e12
            })
            .collect()
    }
}

/// One time point of a no-jump evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub system: System,
    pub initial: InitialState,
    #[serde(rename = "R")]
    pub ratio: f64,
    pub lambda_t: f64,
    /// Amplitude on the initially excited ket (`A`, `A′` or `C`).
    pub a: f64,
    /// Partner amplitude without its `−i` phase (`B` or `D`).
    pub b: f64,
    /// `a² + b²`
    pub norm_sq: f64,
    /// Two-qubit concurrence, or the smallest pairwise concurrence for three qubits.
    pub concurrence: f64,
    pub p_nojump: f64,
}

/// One point of an entangling-time sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub system: System,
    pub initial: InitialState,
    #[serde(rename = "R")]
    pub ratio: f64,
    /// `λT`
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_rs")]
    pub t_rs: f64,
    #[serde(rename = "T_rs_numeric")]
    pub t_rs_numeric: f64,
    pub abs_diff: f64,
    #[serde(rename = "P_success")]
    pub p_success: f64,
}

fn time_grid(tmax: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| tmax * k as f64 / (steps - 1) as f64)
        .collect()
}

/// Real amplitudes recovered from a propagated state; see [`SweepRecord`].
fn amplitudes_from_state(
    system: System,
    initial: InitialState,
    params: ModelParams,
    t: f64,
    psi: &PureState,
) -> (f64, f64) {
    let undo = (params.kappa() * t / 4.0).exp();
    let amps = psi.amps();
    let (excited, partner) = match (system, initial) {
        (System::TwoQubit, InitialState::NhExcited) => (amps[0b10], amps[0b01]),
        (System::TwoQubit, InitialState::HermitianExcited) => (amps[0b01], amps[0b10]),
        (System::ThreeQubit, _) => (
            amps[0b100],
            (amps[0b010] + amps[0b001]) * std::f64::consts::FRAC_1_SQRT_2,
        ),
    };
    ((excited * undo).re, (I * partner * undo).re)
}

fn numeric_concurrence(system: System, psi: &PureState) -> crate::Result<f64> {
    let normalized = psi.normalized()?;
    match system {
        System::TwoQubit => wootters_concurrence(&pure_to_density(&normalized)?),
        System::ThreeQubit => Ok(w_pairwise_concurrence(&normalized)?
            .into_iter()
            .fold(f64::INFINITY, f64::min)),
    }
}

/// Time series of the no-jump state.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<Vec<SweepRecord>, RunError> {
    cfg.check_system_initial()?;
    let params = cfg.params()?;
    let tmax = cfg
        .tmax
        .ok_or_else(|| ConfigError::Invalid("--tmax is required".into()))?;
    if !(tmax > 0.0) || !tmax.is_finite() {
        return Err(ConfigError::Invalid(format!("--tmax must be > 0, got {tmax}")).into());
    }
    let steps = cfg.steps.unwrap_or(501);
    if steps < 2 {
        return Err(ConfigError::Invalid(format!("--steps must be >= 2, got {steps}")).into());
    }
    let (system, initial) = (cfg.system(), cfg.initial());
    let lambda_t = time_grid(tmax, steps);
    let ts: Vec<f64> = lambda_t.iter().map(|x| x / params.lambda()).collect();
    let ratio = params.ratio();
    let record = |lt: f64, a: f64, b: f64, concurrence: f64, p_nojump: f64| SweepRecord {
        system,
        initial,
        ratio,
        lambda_t: lt,
        a,
        b,
        norm_sq: a * a + b * b,
        concurrence,
        p_nojump,
    };
    match cfg.engine() {
        Engine::Analytic => lambda_t
            .iter()
            .zip(&ts)
            .map(|(&lt, &t)| {
                let amp = analytic::amplitudes(system, params, t, initial)?;
                let c = analytic::concurrence(system, params, t, initial)?;
                Ok(record(lt, amp.a, amp.b, c, amp.norm_sq_unnormalized))
            })
            .collect(),
        Engine::Numeric => {
            let model = NhModel::build(system, params);
            let psi0 = PureState::basis(initial.label(system)?)?;
            let states = integrate_nojump(&model, &psi0, &ts, IntegratorOptions::precise())?;
            lambda_t
                .iter()
                .zip(&ts)
                .zip(&states)
                .map(|((&lt, &t), psi)| {
                    let (a, b) = amplitudes_from_state(system, initial, params, t, psi);
                    let c = numeric_concurrence(system, psi)?;
                    Ok(record(lt, a, b, c, norm_squared(psi)))
                })
                .collect()
        }
    }
}

/// One sweep row at a single `ratio`; the numeric time comes from the
/// root-finder on the propagated state.
pub fn ratio_record(
    system: System,
    initial: InitialState,
    lambda: f64,
    ratio: f64,
) -> crate::Result<RatioRecord> {
    let params = ModelParams::from_ratio(lambda, ratio)?;
    let (closed, tau, bracket_scale) = match system {
        System::TwoQubit => {
            let res = entangling_time_2q(params, initial)?;
            // T_rs ≤ 1 from |1,0⟩; from |0,1⟩ it is bounded by 2/√(1−R²)
            let scale = match initial {
                InitialState::NhExcited => 1.5,
                InitialState::HermitianExcited => 2.2 / (1.0 - ratio * ratio).sqrt(),
            };
            (res, tau_hermitian_2q(params), scale)
        }
        System::ThreeQubit => (w_time_3q(params), tau_hermitian_3q(params), 1.5),
    };
    let model = NhModel::build(system, params);
    let crossing = CrossingOptions {
        tol: 1e-13,
        ..CrossingOptions::default()
    };
    let t_numeric = numeric_entangling_time(
        &model,
        initial,
        bracket_scale * tau,
        IntegratorOptions::precise(),
        crossing,
    )?;
    let t_rs_numeric = t_numeric / tau;
    let p_success = match (system, initial) {
        (System::TwoQubit, InitialState::NhExcited) => success_probability_2q(params),
        (System::TwoQubit, InitialState::HermitianExcited) => closed.success_probability,
        (System::ThreeQubit, _) => success_probability_3q(params),
    };
    Ok(RatioRecord {
        system,
        initial,
        ratio,
        t: closed.t_star * lambda,
        t_rs: closed.t_rescaled,
        t_rs_numeric,
        abs_diff: (closed.t_rescaled - t_rs_numeric).abs(),
        p_success,
    })
}

/// Entangling time and success probability over a grid of R, with the
/// closed form next to the numeric root-finder.
pub fn cmd_sweep_ratio(cfg: &RunConfig) -> Result<Vec<RatioRecord>, RunError> {
    cfg.check_system_initial()?;
    let range = RatioRange::parse(
        cfg.ratio_range
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("--ratio-range is required".into()))?,
    )?;
    let lambda = cfg.lambda();
    if !(lambda > 0.0) {
        return Err(ConfigError::Invalid(format!("--lambda must be > 0, got {lambda}")).into());
    }
    let (system, initial) = (cfg.system(), cfg.initial());
    let values = range.values();
    if initial == InitialState::HermitianExcited && values.iter().any(|&r| r >= 1.0) {
        return Err(ConfigError::Invalid(
            "from |0,1> maximal entanglement exists only for R < 1; lower the --ratio-range upper bound".into(),
        )
        .into());
    }
    let rows: Vec<crate::Result<RatioRecord>> = values
        .par_iter()
        .map(|&r| ratio_record(system, initial, lambda, r))
        .collect();
    Ok(rows.into_iter().collect::<crate::Result<_>>()?)
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloSummary {
    pub system: System,
    pub initial: InitialState,
    #[serde(rename = "R")]
    pub ratio: f64,
    pub lambda: f64,
    /// `λ·t_final`
    pub lambda_t_final: f64,
    pub trajectories: u64,
    pub seed: u64,
    pub no_jump_count: u64,
    pub no_jump_fraction: f64,
    pub standard_error: f64,
    /// Closed-form no-jump probability at `t_final`.
    pub analytic_p: f64,
    /// `(fraction − analytic_p)/standard_error`; absent when the standard
    /// error vanishes and the two differ.
    pub z_score: Option<f64>,
    /// Jump-time bins in units of `λt`.
    pub jump_time_histogram: Vec<HistogramBin>,
    /// Mean density matrix as rows of `[re, im]` pairs.
    pub mean_density: Vec<Vec<[f64; 2]>>,
}

/// Integrator settings for trajectories; the adaptive controller, not the
/// step cap, sets the accuracy.
pub fn monte_carlo_options() -> IntegratorOptions {
    IntegratorOptions {
        dt_max: 0.05,
        ..IntegratorOptions::default()
    }
}

/// Trajectory ensemble up to the entangling time (or `--tmax`), compared
/// with the closed-form no-jump probability.
pub fn cmd_montecarlo(cfg: &RunConfig) -> Result<MonteCarloSummary, RunError> {
    cfg.check_system_initial()?;
    let params = cfg.params()?;
    let (system, initial) = (cfg.system(), cfg.initial());
    let n_traj = cfg.trajectories.unwrap_or(10_000);
    if n_traj == 0 {
        return Err(ConfigError::Invalid("--trajectories must be >= 1".into()).into());
    }
    let seed = cfg.seed.unwrap_or(0);
    let t_final = match cfg.tmax {
        Some(lt) if lt > 0.0 && lt.is_finite() => lt / params.lambda(),
        Some(lt) => {
            return Err(ConfigError::Invalid(format!("--tmax must be > 0, got {lt}")).into())
        }
        None => match system {
            System::TwoQubit => {
                entangling_time_2q(params, initial)
                    .map_err(|_| {
                        ConfigError::Invalid(
                            "no entangling time from |0,1> for R >= 1; pass --tmax".into(),
                        )
                    })?
                    .t_star
            }
            System::ThreeQubit => w_time_3q(params).t_star,
        },
    };
    let analytic_p = analytic::amplitudes(system, params, t_final, initial)?.norm_sq_unnormalized;
    let model = NhModel::build(system, params);
    let psi0 = PureState::basis(initial.label(system)?)?;
    let ens = run_monte_carlo(&model, &psi0, t_final, n_traj, seed, monte_carlo_options())?;
    let fraction = ens.no_jump_fraction();
    let se = ens.standard_error();
    let diff = fraction - analytic_p;
    let z_score = if se > 0.0 {
        Some(diff / se)
    } else if diff.abs() < 1e-12 {
        Some(0.0)
    } else {
        None
    };
    let lambda = params.lambda();
    let dim = ens.mean_density.dim();
    Ok(MonteCarloSummary {
        system,
        initial,
        ratio: params.ratio(),
        lambda,
        lambda_t_final: t_final * lambda,
        trajectories: n_traj,
        seed,
        no_jump_count: ens.no_jump_count,
        no_jump_fraction: fraction,
        standard_error: se,
        analytic_p,
        z_score,
        jump_time_histogram: ens
            .jump_time_histogram
            .iter()
            .map(|b| HistogramBin {
                lo: b.lo * lambda,
                hi: b.hi * lambda,
                count: b.count,
            })
            .collect(),
        mean_density: (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let z = ens.mean_density.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct JsonDocument<'a, T: Serialize> {
    metadata: Metadata<'a>,
    rows: &'a [T],
}

/// Write rows as CSV (header from the record's field names) or as a JSON
/// document with a metadata header.
pub fn write_rows<T: Serialize>(
    out: &mut dyn Write,
    rows: &[T],
    format: Format,
    command: &str,
    cfg: &RunConfig,
) -> Result<(), RunError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let doc = JsonDocument {
                metadata: Metadata {
                    tool: env!("CARGO_PKG_NAME"),
                    version: TOOL_VERSION,
                    command,
                    seed: cfg.seed,
                    config: cfg,
                },
                rows,
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Monte Carlo summaries are always JSON.
pub fn write_summary(
    out: &mut dyn Write,
    summary: &MonteCarloSummary,
    cfg: &RunConfig,
) -> Result<(), RunError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        metadata: Metadata<'a>,
        summary: &'a MonteCarloSummary,
    }
    let doc = Doc {
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: TOOL_VERSION,
            command: "montecarlo",
            seed: Some(summary.seed),
            config: cfg,
        },
        summary,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// Parse CSV written by [`write_rows`] back into records.
pub fn read_csv<T: for<'de> Deserialize<'de>>(input: impl Read) -> Result<Vec<T>, RunError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(toml: &str) -> RunConfig {
        RunConfig::from_toml_str(toml).unwrap()
    }

    #[test]
    fn ratio_range_parsing() {
        let r = RatioRange::parse("0:3:0.05").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 61);
        assert_eq!(v[3], 0.15);
        assert_eq!(*v.last().unwrap(), 3.0);
        assert!(RatioRange::parse("0:3").is_err());
        assert!(RatioRange::parse("1:0:0.1").is_err());
        assert!(RatioRange::parse("0:1:0").is_err());
        assert!(RatioRange::parse("a:b:c").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = cfg("system = \"3q\"\nratio = 0.5\ntmax = 4.0\n");
        let flags = RunConfig {
            kappa: Some(1.0),
            tmax: Some(2.0),
            ..RunConfig::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.system, Some(System::ThreeQubit));
        assert_eq!(merged.ratio, None);
        assert_eq!(merged.kappa, Some(1.0));
        assert_eq!(merged.tmax, Some(2.0));
    }

    #[test]
    fn config_rejects_unknown_keys_and_conflicts() {
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
        let both = cfg("ratio = 0.5\nkappa = 1.0\n");
        assert!(matches!(both.params(), Err(ConfigError::Invalid(_))));
        let neither = cfg("tmax = 1.0");
        assert!(neither.params().is_err());
        let negative = cfg("ratio = -0.5");
        assert!(matches!(negative.params(), Err(ConfigError::Model(_))));
    }

    #[test]
    fn evolve_rejects_bad_settings() {
        assert!(cmd_evolve(&cfg("ratio = 0.5")).is_err());
        assert!(cmd_evolve(&cfg("ratio = 0.5\ntmax = -1.0")).is_err());
        assert!(cmd_evolve(&cfg("ratio = 0.5\ntmax = 1.0\nsteps = 1")).is_err());
        assert!(cmd_evolve(&cfg(
            "system = \"3q\"\ninitial = \"herm\"\nratio = 0.5\ntmax = 1.0"
        ))
        .is_err());
    }

    #[test]
    fn hermitian_evolution_concurrence() {
        let rows = cmd_evolve(&cfg("ratio = 0.0\ntmax = 5.0")).unwrap();
        assert_eq!(rows.len(), 501);
        for r in &rows {
            assert!((r.concurrence - (2.0 * r.lambda_t).sin().abs()).abs() < 1e-12);
            assert!((r.p_nojump - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn numeric_engine_tracks_closed_forms() {
        for sys in ["2q", "3q"] {
            let text = format!("system = \"{sys}\"\nratio = 0.8\ntmax = 4.0\nsteps = 41");
            let analytic = cmd_evolve(&cfg(&text)).unwrap();
            let numeric = cmd_evolve(&cfg(&format!("{text}\nengine = \"numeric\""))).unwrap();
            for (x, y) in analytic.iter().zip(&numeric) {
                assert!((x.a - y.a).abs() < 1e-9, "{sys} a at {}", x.lambda_t);
                assert!((x.b - y.b).abs() < 1e-9, "{sys} b at {}", x.lambda_t);
                assert!((x.p_nojump - y.p_nojump).abs() < 1e-9);
                assert!((x.concurrence - y.concurrence).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sweep_rejects_primed_start_past_threshold() {
        let c = cfg("initial = \"herm\"\nratio-range = \"0:1.2:0.1\"");
        assert!(matches!(cmd_sweep_ratio(&c), Err(RunError::Config(_))));
    }

    #[test]
    fn csv_header_and_round_trip() {
        let rows = cmd_evolve(&cfg("ratio = 2.0\ntmax = 3.0\nsteps = 7")).unwrap();
        let mut buf = Vec::new();
        write_rows(
            &mut buf,
            &rows,
            Format::Csv,
            "evolve",
            &RunConfig::default(),
        )
        .unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER);
        let back: Vec<SweepRecord> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, rows);

        let rows = cmd_sweep_ratio(&cfg("ratio-range = \"0:0.2:0.1\"")).unwrap();
        let mut buf = Vec::new();
        write_rows(
            &mut buf,
            &rows,
            Format::Csv,
            "sweep-ratio",
            &RunConfig::default(),
        )
        .unwrap();
        assert_eq!(
            String::from_utf8_lossy(&buf).lines().next().unwrap(),
            RATIO_HEADER
        );
        let back: Vec<RatioRecord> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, rows);
    }
}
