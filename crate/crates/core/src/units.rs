//! Fixed conversion constants between internal units and spectroscopic units.
//!
//! Internal energy unit = 100 cm⁻¹ with ℏ = 1. The matching time unit is
//! ℏ/(100 cm⁻¹) ≈ 53.08 fs, but results are reported with the rounded value of
//! 50 fs per internal time unit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    InternalEnergy,
    Cm1,
    InternalTime,
    Fs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Energy,
    Time,
}

impl Unit {
    fn dimension(self) -> Dimension {
        match self {
            Unit::InternalEnergy | Unit::Cm1 => Dimension::Energy,
            Unit::InternalTime | Unit::Fs => Dimension::Time,
        }
    }

    /// Size of one of this unit expressed in internal units.
    fn to_internal_factor(self) -> f64 {
        match self {
            Unit::InternalEnergy | Unit::InternalTime => 1.0,
            Unit::Cm1 => 1.0 / UnitSystem::ENERGY_UNIT_CM,
            Unit::Fs => 1.0 / UnitSystem::TIME_UNIT_FS,
        }
    }

    fn internal_factor(self) -> f64 {
        match self {
            Unit::InternalEnergy | Unit::InternalTime => 1.0,
            Unit::Cm1 => UnitSystem::ENERGY_UNIT_CM,
            Unit::Fs => UnitSystem::TIME_UNIT_FS,
        }
    }
}

pub struct UnitSystem;

impl UnitSystem {
    /// cm⁻¹ per internal energy unit.
    pub const ENERGY_UNIT_CM: f64 = 100.0;
    /// fs per internal time unit (reporting convention).
    pub const TIME_UNIT_FS: f64 = 50.0;
    /// ℏ/(100 cm⁻¹) in fs. Documentation only; never used for reporting.
    pub const EXACT_TIME_UNIT_FS: f64 = 53.088_2;
}

/// Convert `value` between two units of the same dimension.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    if from.dimension() != to.dimension() {
        return Err(Error::DimensionMismatch { from, to });
    }
    if from == to {
        return Ok(value);
    }
    Ok(value * from.to_internal_factor() * to.internal_factor())
}

#[inline]
pub fn energy_to_cm1(e: f64) -> f64 {
    e * UnitSystem::ENERGY_UNIT_CM
}

#[inline]
pub fn time_to_fs(t: f64) -> f64 {
    t * UnitSystem::TIME_UNIT_FS
}
