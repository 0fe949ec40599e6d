//! Resolved run configuration shared by presets and the command line.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrate::IntegratorConfig;
use crate::model::ModelSpec;
use crate::objective::ObjectiveSpec;
use crate::sweep::{Axis, ObjectiveKind, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub axes: Vec<Axis>,
    pub objective: ObjectiveKind,
    #[serde(default = "default_radius")]
    pub flatness_radius: usize,
}

fn default_radius() -> usize {
    1
}

/// Everything needed to reproduce a simulation or sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Trajectory length for `simulate` (internal time).
    pub t_end: f64,
    pub model: ModelSpec,
    pub objective: ObjectiveSpec,
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepPlan>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "t_end must be finite and > 0, got {}",
                self.t_end
            )));
        }
        self.model.validate()?;
        self.objective.validate()?;
        self.integrator.validate()?;
        if let Some(s) = self.sweep_spec() {
            s.validate()?;
        }
        Ok(())
    }

    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        self.sweep.as_ref().map(|plan| SweepSpec {
            axes: plan.axes.clone(),
            base: self.model,
            objective: plan.objective,
            window: self.objective,
            integrator: self.integrator,
            flatness_radius: plan.flatness_radius,
        })
    }
}
