//! Named parameter sets, one per reference run.
//!
//! Reference model (internal units, 1 = 100 cm⁻¹): `E₁ − E₂ = 3.0`, `J = 0.75`,
//! vibron `3.0·sin(3.40 t)` on level 2, `γ⁻ = 0.6`, `γ⁺/γ⁻ = 0.22`,
//! `s₁ = 0`, `s₂ = 0.1`, window `T₀ = 4π/3.40` (≈ 185 fs).

use serde::Serialize;

use crate::config::{RunConfig, SweepPlan};
use crate::error::{Error, Result};
use crate::integrate::IntegratorConfig;
use crate::model::{DissipationSpec, DriveSpec, ModelSpec, SinkSpec};
use crate::objective::{default_window, ObjectiveSpec};
use crate::sweep::{Axis, ObjectiveKind, Parameter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub figure: &'static str,
    pub config: RunConfig,
}

pub const NAMES: [&str; 7] = [
    "fig-trajectory",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig35",
    "fig3d",
];

/// Vibron-driven reference model.
pub fn reference_model() -> ModelSpec {
    ModelSpec {
        e1: 3.0,
        e2: 0.0,
        j: 0.75,
        drive: DriveSpec::on_level2(3.0, 3.40, 0.0),
        dissipation: DissipationSpec::new(0.6, 0.22),
        sink: SinkSpec::new(0.0, 0.1),
    }
}

fn base_config() -> RunConfig {
    RunConfig {
        t_end: 3.70,
        model: reference_model(),
        objective: ObjectiveSpec::with_window(default_window(3.40)),
        integrator: IntegratorConfig::default(),
        sweep: None,
    }
}

fn sweep_1d(
    param: Parameter,
    start: f64,
    stop: f64,
    count: usize,
    objective: ObjectiveKind,
) -> Option<SweepPlan> {
    Some(SweepPlan {
        axes: vec![Axis::new(param, start, stop, count)],
        objective,
        flatness_radius: 1,
    })
}

pub fn catalog() -> Vec<Preset> {
    NAMES
        .iter()
        .map(|n| preset(n).expect("catalog names resolve"))
        .collect()
}

pub fn catalog_names() -> String {
    NAMES.join(", ")
}

pub fn preset(name: &str) -> Result<Preset> {
    let mut config = base_config();
    let (description, figure) = match name {
        "fig-trajectory" => (
            "ρ₁₁(t) from |1⟩⟨1| under the reference vibron, t ∈ [0, 3.70]",
            "time evolution of ρ₁₁",
        ),
        "fig4a" => {
            config.sweep = sweep_1d(Parameter::Frequency, 0.5, 5.0, 91, ObjectiveKind::TBar);
            ("T̄ versus vibron frequency ω at A = 3.0", "Fig. 4(a)")
        }
        "fig4b" => {
            config.model.drive.a2 = 2.0;
            config.sweep = sweep_1d(Parameter::Frequency, 0.5, 5.0, 91, ObjectiveKind::TBar);
            ("T̄ versus vibron frequency ω at A = 2.0", "Fig. 4(b)")
        }
        "fig4c" => {
            config.sweep = sweep_1d(Parameter::Amplitude, 0.0, 6.0, 121, ObjectiveKind::TBar);
            ("T̄ versus vibron amplitude A at ω = 3.40", "Fig. 4(c)")
        }
        "fig4d" => {
            // ±3.14 keeps the grid on exact 0.02 rad steps.
            #[allow(clippy::approx_constant)]
            let (lo, hi) = (-3.14, 3.14);
            config.sweep = sweep_1d(Parameter::Phase, lo, hi, 315, ObjectiveKind::TBar);
            ("T̄ versus vibron phase φ at A = 3.0, ω = 3.40", "Fig. 4(d)")
        }
        "fig35" => {
            config.sweep = sweep_1d(
                Parameter::GammaMinus,
                0.0,
                3.0,
                61,
                ObjectiveKind::RecombinationRate,
            );
            (
                "recombination rate R versus γ⁻ at A = 3.0, ω = 3.40, φ = 0",
                "Fig. 35 (R vs γ⁻)",
            )
        }
        "fig3d" => {
            config.model.dissipation.gamma_minus = 0.5;
            config.objective = ObjectiveSpec::with_window(default_window(3.35));
            config.sweep = Some(SweepPlan {
                axes: vec![
                    Axis::new(Parameter::Amplitude, 0.5, 6.0, 111),
                    Axis::new(Parameter::Frequency, 0.5, 5.0, 91),
                ],
                objective: ObjectiveKind::TBar,
                flatness_radius: 5,
            });
            (
                "T̄(A, ω) landscape at γ⁻ = 0.5 with minima, barrier and min-over-A profile",
                "Fig. 3D",
            )
        }
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                catalog: catalog_names(),
            });
        }
    };
    let name = NAMES
        .iter()
        .find(|n| **n == name)
        .copied()
        .unwrap_or("custom");
    Ok(Preset {
        name,
        description,
        figure,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_valid() {
        let all = catalog();
        assert_eq!(all.len(), 7);
        for p in &all {
            p.config.validate().unwrap();
            if p.name != "fig-trajectory" {
                assert!(p.config.sweep.is_some(), "{}", p.name);
            }
        }
    }

    #[test]
    fn unknown_preset_lists_catalog() {
        let err = preset("fig99").unwrap_err().to_string();
        assert!(err.contains("fig99"));
        for n in NAMES {
            assert!(err.contains(n));
        }
    }

    #[test]
    fn landscape_window_uses_its_own_beat_frequency() {
        let p = preset("fig3d").unwrap();
        assert!((p.config.objective.t0 - 4.0 * std::f64::consts::PI / 3.35).abs() < 1e-15);
        let q = preset("fig4a").unwrap();
        assert!((q.config.objective.t0 - 4.0 * std::f64::consts::PI / 3.40).abs() < 1e-15);
    }

    #[test]
    fn grid_steps_are_pinned() {
        let step =
            |name: &str, k: usize| preset(name).unwrap().config.sweep.unwrap().axes[k].step();
        assert!((step("fig4a", 0) - 0.05).abs() < 1e-12);
        assert!((step("fig4c", 0) - 0.05).abs() < 1e-12);
        assert!((step("fig4d", 0) - 0.02).abs() < 1e-12);
        assert!((step("fig35", 0) - 0.05).abs() < 1e-12);
        assert!((step("fig3d", 0) - 0.05).abs() < 1e-12);
        assert!((step("fig3d", 1) - 0.05).abs() < 1e-12);
    }
}
