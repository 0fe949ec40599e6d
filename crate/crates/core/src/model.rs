//! Model parameters and the closed-system eigenproblem.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::thermal_ratio;
use crate::error::{Error, Result};

/// Classical vibron drive entering the diagonal of the Hamiltonian.
///
/// `a1` and `a2` are the projections of the nuclear displacement onto the two
/// electronic levels (`u·w` and `v·w`); the vibron amplitude `A` is `|a2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub a1: f64,
    pub a2: f64,
    pub omega: f64,
    pub phi: f64,
    /// Scale the vibron by the instantaneous trace `ρ₁₁ + ρ₂₂` (phase fixed at 0).
    #[serde(default)]
    pub feedback: bool,
}

impl DriveSpec {
    /// Open-loop drive on level 2 only.
    pub fn on_level2(amplitude: f64, omega: f64, phi: f64) -> Self {
        DriveSpec {
            a1: 0.0,
            a2: amplitude,
            omega,
            phi,
            feedback: false,
        }
    }

    pub fn off() -> Self {
        Self::on_level2(0.0, 0.0, 0.0)
    }

    /// Switch to the state-dependent drive. The feedback vibron carries no phase.
    pub fn with_feedback(mut self) -> Self {
        self.feedback = true;
        self.phi = 0.0;
        self
    }

    /// Phase wrapped to (−π, π].
    pub fn wrapped_phi(&self) -> f64 {
        let mut p = self.phi.rem_euclid(2.0 * PI);
        if p > PI {
            p -= 2.0 * PI;
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a1", self.a1),
            ("a2", self.a2),
            ("omega", self.omega),
            ("phi", self.phi),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "drive.{name} must be finite, got {v}"
                )));
            }
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive.omega must be ≥ 0, got {}",
                self.omega
            )));
        }
        if self.feedback && self.phi != 0.0 {
            return Err(Error::InvalidParameter(
                "drive.feedback = true requires drive.phi = 0".into(),
            ));
        }
        Ok(())
    }
}

/// Two-channel dissipation: `γ⁻` drives 1 → 2, `γ⁺ = ratio·γ⁻` drives 2 → 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSpec {
    pub gamma_minus: f64,
    pub ratio: f64,
}

impl DissipationSpec {
    pub fn new(gamma_minus: f64, ratio: f64) -> Self {
        DissipationSpec { gamma_minus, ratio }
    }

    /// Ratio from detailed balance at temperature `beta_inverse` (energy units)
    /// for a level splitting `delta_e = E₁ − E₂`.
    pub fn from_temperature(gamma_minus: f64, beta_inverse: f64, delta_e: f64) -> Self {
        DissipationSpec {
            gamma_minus,
            ratio: thermal_ratio(beta_inverse, delta_e),
        }
    }

    pub fn none() -> Self {
        DissipationSpec {
            gamma_minus: 0.0,
            ratio: 0.0,
        }
    }

    #[inline]
    pub fn gamma_plus(&self) -> f64 {
        self.ratio * self.gamma_minus
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_minus.is_finite() && self.gamma_minus >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dissipation.gamma_minus must be finite and ≥ 0, got {}",
                self.gamma_minus
            )));
        }
        if !(self.ratio.is_finite() && self.ratio >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dissipation.ratio must be finite and ≥ 0, got {}",
                self.ratio
            )));
        }
        Ok(())
    }
}

/// Sink rates: `s1` drains level 1 (recombination), `s2` drains level 2
/// (onward charge transfer).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinkSpec {
    pub s1: f64,
    pub s2: f64,
}

impl SinkSpec {
    pub fn new(s1: f64, s2: f64) -> Self {
        SinkSpec { s1, s2 }
    }

    pub fn none() -> Self {
        SinkSpec { s1: 0.0, s2: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("s1", self.s1), ("s2", self.s2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sink.{name} must be finite and ≥ 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub e1: f64,
    pub e2: f64,
    pub j: f64,
    pub drive: DriveSpec,
    pub dissipation: DissipationSpec,
    pub sink: SinkSpec,
}

impl ModelSpec {
    /// Closed, undriven two-level system.
    pub fn closed(e1: f64, e2: f64, j: f64) -> Self {
        ModelSpec {
            e1,
            e2,
            j,
            drive: DriveSpec::off(),
            dissipation: DissipationSpec::none(),
            sink: SinkSpec::none(),
        }
    }

    /// Half splitting `Δ = (E₁ − E₂)/2`.
    pub fn delta(&self) -> f64 {
        0.5 * (self.e1 - self.e2)
    }

    /// Mean energy `E = (E₁ + E₂)/2`.
    pub fn e_mean(&self) -> f64 {
        0.5 * (self.e1 + self.e2)
    }

    /// Angular frequency of the undriven quantum beats, `2√(J² + Δ²)`.
    pub fn beat_frequency(&self) -> f64 {
        2.0 * self.j.hypot(self.delta())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e1", self.e1), ("e2", self.e2), ("j", self.j)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        self.drive.validate()?;
        self.dissipation.validate()?;
        self.sink.validate()
    }
}

/// Eigen-decomposition of the static Hamiltonian `[[E₁, J], [J, E₂]]`.
///
/// Eigenvectors are real; each has a non-negative second component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub psi_plus: [f64; 2],
    pub psi_minus: [f64; 2],
}

pub fn eigensystem(e1: f64, e2: f64, j: f64) -> Eigensystem {
    let e = 0.5 * (e1 + e2);
    let delta = 0.5 * (e1 - e2);
    let r = j.hypot(delta);
    let (e_plus, e_minus) = (e + r, e - r);

    if j == 0.0 {
        // Diagonal: canonical basis ordered by energy.
        let (psi_plus, psi_minus) = if delta >= 0.0 {
            ([1.0, 0.0], [0.0, 1.0])
        } else {
            ([0.0, 1.0], [1.0, 0.0])
        };
        return Eigensystem {
            e_plus,
            e_minus,
            psi_plus,
            psi_minus,
        };
    }

    // (Δ ± r, J)/√(2(r² ± Δr)). Only the branch without cancellation is
    // evaluated directly; the other is its orthogonal complement.
    let normalize = |v: [f64; 2]| {
        let n = v[0].hypot(v[1]);
        let s = if v[1] < 0.0 { -1.0 } else { 1.0 };
        [s * v[0] / n, s * v[1] / n]
    };
    let (psi_plus, psi_minus) = if delta >= 0.0 {
        let p = normalize([delta + r, j]);
        (p, normalize([-p[1], p[0]]))
    } else {
        let m = normalize([delta - r, j]);
        (normalize([m[1], -m[0]]), m)
    };
    Eigensystem {
        e_plus,
        e_minus,
        psi_plus,
        psi_minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apply(e1: f64, e2: f64, j: f64, v: [f64; 2]) -> [f64; 2] {
        [e1 * v[0] + j * v[1], j * v[0] + e2 * v[1]]
    }

    fn residual(e1: f64, e2: f64, j: f64, v: [f64; 2], lambda: f64) -> f64 {
        let hv = apply(e1, e2, j, v);
        (hv[0] - lambda * v[0]).hypot(hv[1] - lambda * v[1])
    }

    #[test]
    fn diagonal_hamiltonian() {
        let es = eigensystem(3.0, -3.0, 0.0);
        assert_eq!(es.e_plus, 3.0);
        assert_eq!(es.e_minus, -3.0);
        assert_eq!(es.psi_plus, [1.0, 0.0]);
        assert_eq!(es.psi_minus, [0.0, 1.0]);
    }

    #[test]
    fn resonance_splitting_is_335_wavenumbers() {
        let es = eigensystem(3.0, 0.0, 0.75);
        let split = es.e_plus - es.e_minus;
        assert!((split - 2.0 * (1.5f64 * 1.5 + 0.75 * 0.75).sqrt()).abs() < 1e-14);
        assert!((split * 100.0 - 335.0).abs() < 0.5);
    }

    #[test]
    fn symmetric_case_eigenvectors() {
        let es = eigensystem(0.0, 0.0, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((es.psi_plus[0] - s).abs() < 1e-15 && (es.psi_plus[1] - s).abs() < 1e-15);
        assert!((es.psi_minus[0] + s).abs() < 1e-15 && (es.psi_minus[1] - s).abs() < 1e-15);
        assert_eq!(es.e_plus, 1.0);
        assert_eq!(es.e_minus, -1.0);
    }

    #[test]
    fn matches_closed_form_where_it_is_well_conditioned() {
        // Direct evaluation of the closed form for both branches.
        let (e1, e2, j): (f64, f64, f64) = (1.2, 0.4, 0.9);
        let d = 0.5 * (e1 - e2);
        let r: f64 = (j * j + d * d).sqrt();
        let np = (2.0 * (r * r + d * r)).sqrt();
        let nm = (2.0 * (r * r - d * r)).sqrt();
        let es = eigensystem(e1, e2, j);
        assert!((es.psi_plus[0] - (d + r) / np).abs() < 1e-14);
        assert!((es.psi_plus[1] - j / np).abs() < 1e-14);
        assert!((es.psi_minus[0] - (d - r) / nm).abs() < 1e-14);
        assert!((es.psi_minus[1] - j / nm).abs() < 1e-14);
    }

    #[test]
    fn degenerate_point() {
        let es = eigensystem(2.0, 2.0, 0.0);
        assert_eq!(es.e_plus, 2.0);
        assert_eq!(es.e_minus, 2.0);
        assert_eq!(es.psi_plus, [1.0, 0.0]);
        assert_eq!(es.psi_minus, [0.0, 1.0]);
        // Level 2 above level 1: ordering follows energy.
        let es = eigensystem(-1.0, 1.0, 0.0);
        assert_eq!(es.psi_plus, [0.0, 1.0]);
    }

    #[test]
    fn wrapped_phase() {
        let d = DriveSpec::on_level2(1.0, 1.0, 3.0 * PI);
        assert!((d.wrapped_phi() - PI).abs() < 1e-12);
        let d = DriveSpec::on_level2(1.0, 1.0, -0.2);
        assert!((d.wrapped_phi() + 0.2).abs() < 1e-15);
    }

    #[test]
    fn feedback_requires_zero_phase() {
        let mut d = DriveSpec::on_level2(3.0, 3.4, 0.5).with_feedback();
        assert_eq!(d.phi, 0.0);
        assert!(d.validate().is_ok());
        d.phi = 0.1;
        assert!(d.validate().is_err());
    }

    #[test]
    fn validation_rejects_negative_rates() {
        let mut m = ModelSpec::closed(3.0, 0.0, 0.75);
        assert!(m.validate().is_ok());
        m.sink.s2 = -0.1;
        assert!(m.validate().is_err());
        m.sink.s2 = 0.1;
        m.dissipation.gamma_minus = f64::NAN;
        assert!(m.validate().is_err());
    }

    proptest! {
        #[test]
        fn eigenpairs_have_small_residual(e1 in -10.0f64..10.0, e2 in -10.0f64..10.0, j in -10.0f64..10.0) {
            let es = eigensystem(e1, e2, j);
            let h_norm = (e1 * e1 + e2 * e2 + 2.0 * j * j).sqrt();
            prop_assert!(residual(e1, e2, j, es.psi_plus, es.e_plus) <= 1e-12 * h_norm.max(1.0));
            prop_assert!(residual(e1, e2, j, es.psi_minus, es.e_minus) <= 1e-12 * h_norm.max(1.0));
            let dot = es.psi_plus[0] * es.psi_minus[0] + es.psi_plus[1] * es.psi_minus[1];
            prop_assert!(dot.abs() < 1e-12);
            for v in [es.psi_plus, es.psi_minus] {
                prop_assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
                prop_assert!(v[1] >= 0.0);
            }
        }

        #[test]
        fn equal_weights_at_resonance(e in -10.0f64..10.0, j in -10.0f64..10.0) {
            prop_assume!(j != 0.0);
            let es = eigensystem(e, e, j);
            prop_assert!((es.psi_plus[0].abs() - es.psi_plus[1].abs()).abs() < 1e-12);
            prop_assert!((es.psi_minus[0].abs() - es.psi_minus[1].abs()).abs() < 1e-12);
        }
    }
}
