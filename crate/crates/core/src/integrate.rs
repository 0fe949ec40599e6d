//! Time propagation of the master equation.
//!
//! The state is packed as `[ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂, ∫ρ₁₁]`, so every stored
//! density matrix is Hermitian by construction and the running integral of
//! `ρ₁₁` is advanced by the same scheme (and to the same order) as the state.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{rhs, GeneratorContext};
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::model::ModelSpec;
use crate::units::time_to_fs;

type State = [f64; 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta on a uniform grid.
    FixedRk4,
    /// Dormand–Prince 5(4) with error control.
    AdaptiveDopri5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step. When absent, the step is the shortest of the vibron and
    /// beat periods divided by `steps_per_period`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: u32,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Spacing of stored trajectory samples.
    pub sample_interval: f64,
}

fn default_steps_per_period() -> u32 {
    1000
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::FixedRk4,
            step: None,
            steps_per_period: default_steps_per_period(),
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            sample_interval: 0.01,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig {
            method: Method::AdaptiveDopri5,
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn fixed(step: f64) -> Self {
        IntegratorConfig {
            step: Some(step),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidParameter(format!(
                "integrator.{what} must be finite and > 0, got {v}"
            )))
        };
        if let Some(h) = self.step {
            if !(h.is_finite() && h > 0.0) {
                return bad("step", h);
            }
        }
        if self.steps_per_period == 0 {
            return Err(Error::InvalidParameter(
                "integrator.steps_per_period must be ≥ 1".into(),
            ));
        }
        for (what, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("sample_interval", self.sample_interval),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(what, v);
            }
        }
        Ok(())
    }

    /// Nominal fixed step for `model` over `[0, t_end]`.
    pub fn resolved_step(&self, model: &ModelSpec, t_end: f64) -> f64 {
        if let Some(h) = self.step {
            return h;
        }
        let mut period = t_end;
        if model.drive.omega > 0.0 {
            period = period.min(2.0 * PI / model.drive.omega);
        }
        let beat = model.beat_frequency();
        if beat > 0.0 {
            period = period.min(2.0 * PI / beat);
        }
        period / f64::from(self.steps_per_period)
    }
}

/// Time-ordered samples of the state with the running `∫₀ᵗ ρ₁₁ ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub rho11_integral: Vec<f64>,
}

pub const TRAJECTORY_CSV_HEADER: [&str; 8] = [
    "t_internal",
    "t_fs",
    "rho11",
    "rho22",
    "re_rho12",
    "im_rho12",
    "trace",
    "rho11_integral",
];

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn final_integral(&self) -> Option<f64> {
        self.rho11_integral.last().copied()
    }

    /// Write the trajectory as CSV (header row, values in shortest
    /// round-trip representation).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", TRAJECTORY_CSV_HEADER.join(","))?;
        for ((t, s), integral) in self
            .times
            .iter()
            .zip(&self.states)
            .zip(&self.rho11_integral)
        {
            let c = s.rho12();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                t,
                time_to_fs(*t),
                s.rho11(),
                s.rho22(),
                c.re,
                c.im,
                s.trace(),
                integral
            )?;
        }
        Ok(())
    }
}

/// Final state and integral of a propagation, without the sample history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub state: DensityMatrix,
    pub rho11_integral: f64,
}

fn pack(rho: &DensityMatrix, integral: f64) -> State {
    let c = rho.rho12();
    [rho.rho11(), rho.rho22(), c.re, c.im, integral]
}

fn unpack(y: &State) -> DensityMatrix {
    DensityMatrix::from_parts(y[0], y[1], Complex64::new(y[2], y[3]))
}

fn deriv(model: &ModelSpec, t: f64, y: &State) -> State {
    let rho = unpack(y);
    let d = rhs(&GeneratorContext::new(model, t, &rho));
    let d12 = d[(0, 1)];
    [d[(0, 0)].re, d[(1, 1)].re, d12.re, d12.im, y[0]]
}

#[inline]
fn axpy(y: &State, h: f64, k: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, ki) in k {
        for i in 0..5 {
            out[i] += h * c * ki[i];
        }
    }
    out
}

fn rk4_step(model: &ModelSpec, t: f64, y: &State, h: f64) -> State {
    let k1 = deriv(model, t, y);
    let k2 = deriv(model, t + 0.5 * h, &axpy(y, 0.5 * h, &[(1.0, &k1)]));
    let k3 = deriv(model, t + 0.5 * h, &axpy(y, 0.5 * h, &[(1.0, &k2)]));
    let k4 = deriv(model, t + h, &axpy(y, h, &[(1.0, &k3)]));
    let mut out = *y;
    for i in 0..5 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

// Dormand–Prince 5(4) tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand–Prince step; returns the 5th-order solution and the
/// embedded error estimate.
fn dopri5_step(model: &ModelSpec, t: f64, y: &State, h: f64) -> (State, State) {
    let k1 = deriv(model, t, y);
    let k2 = deriv(model, t + h / 5.0, &axpy(y, h, &[(A21, &k1)]));
    let k3 = deriv(
        model,
        t + 3.0 * h / 10.0,
        &axpy(y, h, &[(A31, &k1), (A32, &k2)]),
    );
    let k4 = deriv(
        model,
        t + 4.0 * h / 5.0,
        &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = deriv(
        model,
        t + 8.0 * h / 9.0,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = deriv(
        model,
        t + h,
        &axpy(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = deriv(model, t + h, &y_new);
    let mut err = [0.0; 5];
    for i in 0..5 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err)
}

fn check_finite(y: &State, t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { time: t })
    }
}

fn check_inputs(
    model: &ModelSpec,
    rho0: &DensityMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<()> {
    model.validate()?;
    cfg.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end must be finite and > 0, got {t_end}"
        )));
    }
    if !rho0.matrix().is_finite() {
        return Err(Error::InvalidParameter(
            "initial state is not finite".into(),
        ));
    }
    if rho0.min_eigenvalue() < -1e-12 || rho0.trace() > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(
            "initial state must be positive semidefinite with trace ≤ 1".into(),
        ));
    }
    Ok(())
}

/// Drive the integration, calling `observe(t, y)` at every
/// accepted step boundary that should be sampled (always including 0 and
/// `t_end`).
fn drive<F: FnMut(f64, &State)>(
    model: &ModelSpec,
    rho0: &DensityMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
    mut observe: F,
) -> Result<State> {
    check_inputs(model, rho0, t_end, cfg)?;
    let mut y = pack(rho0, 0.0);
    observe(0.0, &y);
    match cfg.method {
        Method::FixedRk4 => {
            let nominal = cfg.resolved_step(model, t_end);
            let n = ((t_end / nominal) * (1.0 - 1e-12)).ceil().max(1.0) as u64;
            let h = t_end / n as f64;
            let stride = ((cfg.sample_interval / h).round() as u64).max(1);
            for i in 0..n {
                let t = i as f64 * h;
                y = rk4_step(model, t, &y, h);
                let t_next = if i + 1 == n {
                    t_end
                } else {
                    (i + 1) as f64 * h
                };
                check_finite(&y, t_next)?;
                if (i + 1) % stride == 0 || i + 1 == n {
                    observe(t_next, &y);
                }
            }
        }
        Method::AdaptiveDopri5 => {
            let h_min = 1e-14 * t_end.max(1.0);
            let mut h = cfg.sample_interval.min(t_end).min(1e-2);
            let mut t = 0.0;
            let mut k = 1u64;
            while t < t_end {
                let target = (k as f64 * cfg.sample_interval).min(t_end);
                let remaining = target - t;
                // Steps landing within a tiny fraction of the target snap to it.
                let clamped = h >= remaining * (1.0 - 1e-9);
                let step = if clamped { remaining } else { h };
                let (y_new, err) = dopri5_step(model, t, &y, step);
                let mut norm: f64 = 0.0;
                for i in 0..5 {
                    let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
                    norm = norm.max((err[i] / scale).abs());
                }
                if !norm.is_finite() {
                    return Err(Error::Divergence { time: t + step });
                }
                if norm <= 1.0 {
                    t = if clamped { target } else { t + step };
                    y = y_new;
                    check_finite(&y, t)?;
                    if clamped {
                        observe(t, &y);
                        k += 1;
                    }
                    let grow = if norm == 0.0 {
                        5.0
                    } else {
                        (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    // A step shortened to hit a sample does not shrink the proposal.
                    h = if clamped {
                        h.max(step * grow)
                    } else {
                        step * grow
                    };
                } else {
                    h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 1.0);
                    if h < h_min {
                        return Err(Error::StepUnderflow { time: t });
                    }
                }
            }
        }
    }
    Ok(y)
}

/// Propagate `rho0` over `[0, t_end]` and return the sampled trajectory.
pub fn propagate(
    model: &ModelSpec,
    rho0: &DensityMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        rho11_integral: Vec::new(),
    };
    drive(model, rho0, t_end, cfg, |t, y| {
        traj.times.push(t);
        traj.states.push(unpack(y));
        traj.rho11_integral.push(y[4]);
    })?;
    Ok(traj)
}

/// Propagate without storing samples.
pub fn propagate_endpoint(
    model: &ModelSpec,
    rho0: &DensityMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Endpoint> {
    let y = drive(model, rho0, t_end, cfg, |_, _| {})?;
    Ok(Endpoint {
        state: unpack(&y),
        rho11_integral: y[4],
    })
}

/// Transition amplitude `⟨2|e^{−itH}|1⟩` of the closed, undriven system:
/// `J/(2√(J²+Δ²)) · e^{−itE₊} · (1 − e^{2it√(J²+Δ²)})`.
pub fn beat_amplitude(j: f64, delta: f64, e_mean: f64, t: f64) -> Result<Complex64> {
    let r = j.hypot(delta);
    if r == 0.0 {
        return Err(Error::DegenerateBeat);
    }
    let e_plus = e_mean + r;
    let phase = Complex64::from_polar(1.0, -t * e_plus);
    let beat = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * t * r);
    Ok(phase * beat * (j / (2.0 * r)))
}

/// Difference between the final states at two resolutions: `h` and `h/2` in
/// fixed mode, `tol` and `tol/10` in adaptive mode.
pub fn convergence_probe(
    model: &ModelSpec,
    rho0: &DensityMatrix,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let fine = match cfg.method {
        Method::FixedRk4 => {
            let h = cfg.resolved_step(model, t_end);
            let coarse = IntegratorConfig {
                step: Some(h),
                ..*cfg
            };
            let fine = IntegratorConfig {
                step: Some(h / 2.0),
                ..*cfg
            };
            (coarse, fine)
        }
        Method::AdaptiveDopri5 => {
            let fine = IntegratorConfig {
                rel_tol: cfg.rel_tol / 10.0,
                abs_tol: cfg.abs_tol / 10.0,
                ..*cfg
            };
            (*cfg, fine)
        }
    };
    let a = propagate_endpoint(model, rho0, t_end, &fine.0)?;
    let b = propagate_endpoint(model, rho0, t_end, &fine.1)?;
    let diff = *a.state.matrix() - *b.state.matrix();
    Ok(diff.norm())
}
