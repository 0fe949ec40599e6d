//! Recombination objectives: residence time `T̄ = ∫₀^{T₀} ρ₁₁ dt` and the
//! dimensionless rate `R = (r_offset + r_slope·γ⁻)·T̄`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{propagate_endpoint, IntegratorConfig};
use crate::linalg::DensityMatrix;
use crate::model::ModelSpec;
use crate::sweep::SweepSurface;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    /// Integration window `T₀` (internal time).
    pub t0: f64,
    /// Constant part of the rate prefactor (internal energy; 0.5 = 50 cm⁻¹).
    #[serde(default = "default_r_offset")]
    pub r_offset: f64,
    /// Weight of `γ⁻` in the rate prefactor.
    #[serde(default = "default_r_slope")]
    pub r_slope: f64,
}

fn default_r_offset() -> f64 {
    0.5
}

fn default_r_slope() -> f64 {
    0.22
}

impl ObjectiveSpec {
    pub fn with_window(t0: f64) -> Self {
        ObjectiveSpec {
            t0,
            r_offset: default_r_offset(),
            r_slope: default_r_slope(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "objective.t0 must be finite and > 0, got {}",
                self.t0
            )));
        }
        if !(self.r_offset.is_finite() && self.r_slope.is_finite()) {
            return Err(Error::InvalidParameter(
                "objective rate constants must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Two beat periods, `2·(2π/frequency)`.
pub fn default_window(beat_angular_frequency: f64) -> f64 {
    4.0 * PI / beat_angular_frequency
}

/// Residence time in level 1 over `[0, T₀]` starting from `|1⟩⟨1|`.
pub fn t_bar(model: &ModelSpec, spec: &ObjectiveSpec, cfg: &IntegratorConfig) -> Result<f64> {
    spec.validate()?;
    let end = propagate_endpoint(model, &DensityMatrix::excited(), spec.t0, cfg)?;
    Ok(end.rho11_integral)
}

pub fn recombination_rate(gamma_minus: f64, t_bar: f64, spec: &ObjectiveSpec) -> f64 {
    (spec.r_offset + spec.r_slope * gamma_minus) * t_bar
}

/// Spread of the objective over the square neighborhood of `radius` grid
/// steps around `at`, relative to the value at `at`.
pub fn flatness(surface: &SweepSurface, at: &[usize], radius: usize) -> Result<f64> {
    let shape = surface.shape();
    if at.len() != shape.len() || radius == 0 {
        return Err(Error::OffGrid {
            index: at.to_vec(),
            radius,
        });
    }
    let fits = at
        .iter()
        .zip(&shape)
        .all(|(&i, &n)| i >= radius && i + radius < n);
    if !fits {
        return Err(Error::OffGrid {
            index: at.to_vec(),
            radius,
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let ranges: Vec<std::ops::RangeInclusive<usize>> =
        at.iter().map(|&i| (i - radius)..=(i + radius)).collect();
    let mut visit = |idx: &[usize]| {
        let v = surface.value(idx);
        lo = lo.min(v);
        hi = hi.max(v);
    };
    match ranges.as_slice() {
        [r] => r.clone().for_each(|i| visit(&[i])),
        [r0, r1] => {
            for i in r0.clone() {
                for j in r1.clone() {
                    visit(&[i, j]);
                }
            }
        }
        _ => {
            return Err(Error::OffGrid {
                index: at.to_vec(),
                radius,
            })
        }
    }
    Ok((hi - lo) / surface.value(at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DissipationSpec, DriveSpec, SinkSpec};
    use crate::sweep::{Axis, ObjectiveKind, Parameter, SweepSpec};

    fn preset() -> ModelSpec {
        ModelSpec {
            e1: 3.0,
            e2: 0.0,
            j: 0.75,
            drive: DriveSpec::on_level2(3.0, 3.40, 0.0),
            dissipation: DissipationSpec::new(0.6, 0.22),
            sink: SinkSpec::new(0.0, 0.1),
        }
    }

    fn synthetic(values: Vec<f64>, shape: &[usize]) -> SweepSurface {
        let axes: Vec<Axis> = shape
            .iter()
            .zip([Parameter::Amplitude, Parameter::Frequency])
            .map(|(&n, p)| Axis::new(p, 0.0, (n - 1) as f64, n))
            .collect();
        let spec = SweepSpec::new(
            axes,
            preset(),
            ObjectiveKind::TBar,
            ObjectiveSpec::with_window(1.0),
        );
        SweepSurface::from_values(spec, values).unwrap()
    }

    #[test]
    fn window_examples() {
        assert!((default_window(3.40) - 3.696).abs() < 1e-3);
        assert!((default_window(3.40) * 50.0 - 184.8).abs() < 0.05);
        assert!((default_window(3.35) - 3.751).abs() < 1e-3);
        assert!((default_window(2.0 * PI) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn frozen_level_gives_full_window() {
        let m = ModelSpec::closed(3.0, 0.0, 0.0);
        let spec = ObjectiveSpec::with_window(default_window(3.40));
        let tb = t_bar(&m, &spec, &IntegratorConfig::default()).unwrap();
        assert!((tb - spec.t0).abs() < 1e-12, "{tb}");
    }

    #[test]
    fn t_bar_is_bounded_by_window() {
        let spec = ObjectiveSpec::with_window(default_window(3.40));
        let tb = t_bar(&preset(), &spec, &IntegratorConfig::default()).unwrap();
        assert!(tb > 0.0 && tb < spec.t0);
    }

    #[test]
    fn rate_examples() {
        let spec = ObjectiveSpec::with_window(1.0);
        assert!((recombination_rate(0.0, 2.0, &spec) - 1.0).abs() < 1e-15);
        assert!((recombination_rate(0.6, 1.5, &spec) - 0.948).abs() < 1e-12);
    }

    #[test]
    fn rate_is_affine_in_gamma() {
        let spec = ObjectiveSpec::with_window(1.0);
        let r = |g: f64| recombination_rate(g, 1.3, &spec);
        let slope = r(1.0) - r(0.0);
        for g in [0.25, 0.7, 2.0] {
            assert!((r(g) - (r(0.0) + slope * g)).abs() < 1e-14);
        }
    }

    #[test]
    fn extra_recombination_sink_never_increases_t_bar() {
        let spec = ObjectiveSpec::with_window(default_window(3.40));
        let cfg = IntegratorConfig::default();
        let mut last = f64::INFINITY;
        for s1 in [0.0, 0.05, 0.1] {
            let mut m = preset();
            m.sink.s1 = s1;
            let tb = t_bar(&m, &spec, &cfg).unwrap();
            assert!(tb <= last);
            last = tb;
        }
    }

    #[test]
    fn refinement_changes_t_bar_negligibly() {
        let spec = ObjectiveSpec::with_window(default_window(3.40));
        let m = preset();
        let coarse = IntegratorConfig::default();
        let h = coarse.resolved_step(&m, spec.t0);
        let fine = IntegratorConfig::fixed(h / 2.0);
        let a = t_bar(&m, &spec, &coarse).unwrap();
        let b = t_bar(&m, &spec, &fine).unwrap();
        assert!((a - b).abs() < 1e-6 * spec.t0);
    }

    #[test]
    fn flatness_examples() {
        let flat = synthetic(vec![2.0; 25], &[5, 5]);
        assert_eq!(flatness(&flat, &[2, 2], 1).unwrap(), 0.0);
        let mut bowl = vec![1.1; 9];
        bowl[4] = 1.0;
        let bowl = synthetic(bowl, &[3, 3]);
        assert!((flatness(&bowl, &[1, 1], 1).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(
            flatness(&bowl, &[0, 1], 1),
            Err(Error::OffGrid { .. })
        ));
        assert!(flatness(&bowl, &[1, 1], 2).is_err());
        let line = synthetic(vec![3.0, 2.0, 3.0], &[3]);
        assert!((flatness(&line, &[1], 1).unwrap() - 0.5).abs() < 1e-15);
    }
}
