//! Explicit Runge-Kutta integration of complex linear systems.
//!
//! Two methods: classical RK4 on a fixed grid (used for convergence-order
//! checks) and the Dormand-Prince 5(4) pair with step-size control and its
//! fourth-order continuous extension (used everywhere else).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    FixedRK4,
    AdaptiveRK45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Largest step, in units of `1/λ`.
    pub dt_max: f64,
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            dt_max: 1e-3,
            method: Method::AdaptiveRK45,
            abs_tol: 1e-10,
            rel_tol: 1e-9,
        }
    }
}

impl IntegratorOptions {
    /// Tight tolerances for oracle comparisons.
    pub fn precise() -> Self {
        Self {
            dt_max: 0.05,
            method: Method::AdaptiveRK45,
            abs_tol: 1e-14,
            rel_tol: 1e-13,
        }
    }

    pub fn fixed_rk4(dt: f64) -> Self {
        Self {
            dt_max: dt,
            method: Method::FixedRK4,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0) || !self.dt_max.is_finite() {
            return Err(Error::InvalidParams(format!(
                "dt_max must be > 0, got {}",
                self.dt_max
            )));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be > 0".into()));
        }
        Ok(())
    }
}

/// `dy/dt = f(t, y)` over complex vectors.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

// Dormand-Prince 5(4)
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Polynomial interpolant over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    coeffs: [Vec<C64>; 5],
    quartic: bool,
}

impl DenseSegment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Evaluate at `t` (expected in `[t0, t0 + h]`).
    pub fn eval_into(&self, t: f64, out: &mut [C64]) {
        let th = if self.h > 0.0 {
            (t - self.t0) / self.h
        } else {
            0.0
        };
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        if self.quartic {
            for i in 0..out.len() {
                out[i] = r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * th1) * th) * th1) * th;
            }
        } else {
            // cubic Hermite, same nesting without the last term
            for i in 0..out.len() {
                out[i] = r1[i] + (r2[i] + (r3[i] + r4[i] * th) * th1) * th;
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<C64> {
        let mut out = vec![ZERO; self.coeffs[0].len()];
        self.eval_into(t, &mut out);
        out
    }
}

/// Single-step driver that keeps the interpolant of its last step.
pub struct Stepper<'s, S: OdeSystem> {
    sys: &'s S,
    opts: IntegratorOptions,
    t: f64,
    y: Vec<C64>,
    h: f64,
    k: [Vec<C64>; 7],
    fsal_valid: bool,
    tmp: Vec<C64>,
    y_new: Vec<C64>,
    last: Option<DenseSegment>,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
}

impl<'s, S: OdeSystem> Stepper<'s, S> {
    pub fn new(sys: &'s S, t0: f64, y0: &[C64], opts: IntegratorOptions) -> Result<Self> {
        opts.validate()?;
        let n = sys.dim();
        if y0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y0.len(),
            });
        }
        let z = || vec![ZERO; n];
        Ok(Self {
            sys,
            opts,
            t: t0,
            y: y0.to_vec(),
            h: opts.dt_max.min(1e-2),
            k: [z(), z(), z(), z(), z(), z(), z()],
            fsal_valid: false,
            tmp: z(),
            y_new: z(),
            last: None,
            steps_accepted: 0,
            steps_rejected: 0,
        })
    }

    /// Restart from a new state, e.g. after a quantum jump.
    pub fn reset(&mut self, t: f64, y: &[C64]) {
        self.t = t;
        self.y.copy_from_slice(y);
        self.fsal_valid = false;
        self.last = None;
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    pub fn last_segment(&self) -> Option<&DenseSegment> {
        self.last.as_ref()
    }

    /// Advance by one accepted step, never past `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<()> {
        let remaining = t_limit - self.t;
        if remaining <= 0.0 {
            return Ok(());
        }
        match self.opts.method {
            Method::FixedRK4 => {
                let h = self.opts.dt_max.min(remaining);
                self.rk4_step(h);
                Ok(())
            }
            Method::AdaptiveRK45 => self.dopri_step(t_limit),
        }
    }

    fn rk4_step(&mut self, h: f64) {
        let n = self.y.len();
        let (t, sys) = (self.t, self.sys);
        let [k1, k2, k3, k4, kend, ..] = &mut self.k;
        sys.rhs(t, &self.y, k1);
        for i in 0..n {
            self.tmp[i] = self.y[i] + k1[i] * (0.5 * h);
        }
        sys.rhs(t + 0.5 * h, &self.tmp, k2);
        for i in 0..n {
            self.tmp[i] = self.y[i] + k2[i] * (0.5 * h);
        }
        sys.rhs(t + 0.5 * h, &self.tmp, k3);
        for i in 0..n {
            self.tmp[i] = self.y[i] + k3[i] * h;
        }
        sys.rhs(t + h, &self.tmp, k4);
        for i in 0..n {
            self.y_new[i] = self.y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        sys.rhs(t + h, &self.y_new, kend);
        // cubic Hermite interpolant
        let diff: Vec<C64> = (0..n).map(|i| self.y_new[i] - self.y[i]).collect();
        let r3: Vec<C64> = (0..n).map(|i| k1[i] * h - diff[i]).collect();
        let r4: Vec<C64> = (0..n).map(|i| diff[i] - kend[i] * h - r3[i]).collect();
        self.last = Some(DenseSegment {
            t0: t,
            h,
            coeffs: [self.y.clone(), diff, r3, r4, vec![ZERO; n]],
            quartic: false,
        });
        std::mem::swap(&mut self.y, &mut self.y_new);
        self.t = t + h;
        self.steps_accepted += 1;
    }

    fn error_norm(&self, h: f64) -> f64 {
        let n = self.y.len();
        let (atol, rtol) = (self.opts.abs_tol, self.opts.rel_tol);
        let sum: f64 = (0..n)
            .map(|i| {
                let err = self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7;
                let sc = atol + rtol * self.y[i].norm().max(self.y_new[i].norm());
                (err.norm() * h / sc).powi(2)
            })
            .sum();
        (sum / n as f64).sqrt()
    }

    fn dopri_step(&mut self, t_limit: f64) -> Result<()> {
        let n = self.y.len();
        let sys = self.sys;
        if !self.fsal_valid {
            sys.rhs(self.t, &self.y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        loop {
            let remaining = t_limit - self.t;
            let proposal = self.h.min(self.opts.dt_max);
            let mut h = proposal;
            let hits_limit = h >= remaining;
            if hits_limit {
                h = remaining;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) && !hits_limit {
                return Err(Error::StepUnderflow { t: self.t });
            }
            let t = self.t;
            let y = &self.y;
            let tmp = &mut self.tmp;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (h * A21);
            }
            sys.rhs(t + C2 * h, tmp, k2);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
            }
            sys.rhs(t + C3 * h, tmp, k3);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
            }
            sys.rhs(t + C4 * h, tmp, k4);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
            }
            sys.rhs(t + C5 * h, tmp, k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
            }
            sys.rhs(t + h, tmp, k6);
            for i in 0..n {
                self.y_new[i] = y[i]
                    + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
            }
            sys.rhs(t + h, &self.y_new, k7);

            let err = self.error_norm(h);
            if !err.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite error estimate at t = {t}"
                )));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                self.store_dense(t, h);
                self.t = if hits_limit { t_limit } else { t + h };
                std::mem::swap(&mut self.y, &mut self.y_new);
                self.k.swap(0, 6);
                self.steps_accepted += 1;
                // a step truncated at t_limit does not shrink the proposal
                self.h = if hits_limit {
                    (h * factor).max(proposal)
                } else {
                    h * factor
                };
                return Ok(());
            }
            self.steps_rejected += 1;
            self.h = h * factor.min(1.0);
        }
    }

    fn store_dense(&mut self, t: f64, h: f64) {
        let n = self.y.len();
        let k = &self.k;
        let diff: Vec<C64> = (0..n).map(|i| self.y_new[i] - self.y[i]).collect();
        let bspl: Vec<C64> = (0..n).map(|i| k[0][i] * h - diff[i]).collect();
        let r4: Vec<C64> = (0..n).map(|i| diff[i] - k[6][i] * h - bspl[i]).collect();
        let r5: Vec<C64> = (0..n)
            .map(|i| {
                (k[0][i] * D1
                    + k[2][i] * D3
                    + k[3][i] * D4
                    + k[4][i] * D5
                    + k[5][i] * D6
                    + k[6][i] * D7)
                    * h
            })
            .collect();
        self.last = Some(DenseSegment {
            t0: t,
            h,
            coeffs: [self.y.clone(), diff, bspl, r4, r5],
            quartic: true,
        });
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParams("empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParams(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Solution values at every point of `t_grid`; the first point is the
/// initial time.
pub fn integrate<S: OdeSystem>(
    sys: &S,
    y0: &[C64],
    t_grid: &[f64],
    opts: IntegratorOptions,
) -> Result<Vec<Vec<C64>>> {
    check_grid(t_grid)?;
    let mut stepper = Stepper::new(sys, t_grid[0], y0, opts)?;
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0.to_vec());
    for w in t_grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        match opts.method {
            Method::FixedRK4 => {
                let n = ((t1 - t0) / opts.dt_max).ceil().max(1.0) as usize;
                let h = (t1 - t0) / n as f64;
                for j in 0..n {
                    let target = if j + 1 == n {
                        t1
                    } else {
                        t0 + h * (j + 1) as f64
                    };
                    let dt = target - stepper.t;
                    stepper.rk4_step(dt);
                    stepper.t = target;
                }
            }
            Method::AdaptiveRK45 => {
                while stepper.t < t1 {
                    stepper.step(t1)?;
                }
            }
        }
        out.push(stepper.y.clone());
    }
    Ok(out)
}

/// Piecewise-polynomial solution over `[t0, t_end]`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    segments: Vec<DenseSegment>,
}

impl DenseSolution {
    pub fn solve<S: OdeSystem>(
        sys: &S,
        y0: &[C64],
        t0: f64,
        t_end: f64,
        opts: IntegratorOptions,
    ) -> Result<Self> {
        if !(t_end > t0) {
            return Err(Error::InvalidParams(format!(
                "empty interval [{t0}, {t_end}]"
            )));
        }
        let mut stepper = Stepper::new(sys, t0, y0, opts)?;
        let mut segments = Vec::new();
        while stepper.t < t_end {
            stepper.step(t_end)?;
            segments.push(stepper.last.clone().expect("a step was taken"));
        }
        Ok(Self { segments })
    }

    pub fn t_start(&self) -> f64 {
        self.segments[0].t0
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().map(|s| s.t1()).unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> Vec<C64> {
        let i = self
            .segments
            .partition_point(|s| s.t1() < t)
            .min(self.segments.len() - 1);
        self.segments[i].eval(t)
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }
}
