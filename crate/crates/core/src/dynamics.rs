//! Right-hand side of the master equation
//! `dρ/dt = −i[H(ρ, t), ρ] + L(ρ) + S(ρ)`.

use num_complex::Complex64;

use crate::linalg::{hermitize, DensityMatrix, Mat2};
use crate::model::{DissipationSpec, ModelSpec, SinkSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Everything the generator depends on at one instant. The state only
/// matters when the drive runs in feedback mode.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorContext<'a> {
    pub model: &'a ModelSpec,
    pub time: f64,
    pub state: &'a DensityMatrix,
}

impl<'a> GeneratorContext<'a> {
    pub fn new(model: &'a ModelSpec, time: f64, state: &'a DensityMatrix) -> Self {
        GeneratorContext { model, time, state }
    }
}

/// Dimensionless vibron factor `q(t)`.
///
/// Open loop: `sin(ωt + φ)`. Feedback: `(ρ₁₁ + ρ₂₂)·sin(ωt)`, evaluated on the
/// state carried by the context.
pub fn vibron(ctx: &GeneratorContext<'_>) -> f64 {
    let d = &ctx.model.drive;
    if d.feedback {
        ctx.state.trace() * (d.omega * ctx.time).sin()
    } else {
        (d.omega * ctx.time + d.phi).sin()
    }
}

/// `[[E₁ + a1·q, J], [J, E₂ + a2·q]]`.
pub fn hamiltonian_at(ctx: &GeneratorContext<'_>) -> Mat2 {
    let m = ctx.model;
    let q = vibron(ctx);
    Mat2::from_real([[m.e1 + m.drive.a1 * q, m.j], [m.j, m.e2 + m.drive.a2 * q]])
}

/// Two-channel GKSL dissipator
/// `γ⁺(ρ₂₂|1⟩⟨1| − ½{ρ, |2⟩⟨2|}) + γ⁻(ρ₁₁|2⟩⟨2| − ½{ρ, |1⟩⟨1|})`.
pub fn dissipator(rho: &DensityMatrix, d: &DissipationSpec) -> Mat2 {
    let gm = d.gamma_minus;
    let gp = d.gamma_plus();
    let (r11, r22) = (rho.rho11(), rho.rho22());
    let flow = gp * r22 - gm * r11;
    let coh = rho.rho12() * (-0.5 * (gp + gm));
    Mat2([
        [Complex64::new(flow, 0.0), coh],
        [coh.conj(), Complex64::new(-flow, 0.0)],
    ])
}

/// `−s₁ρ₁₁|1⟩⟨1| − s₂ρ₂₂|2⟩⟨2|`.
pub fn sink_term(rho: &DensityMatrix, s: &SinkSpec) -> Mat2 {
    Mat2::diag(-s.s1 * rho.rho11(), -s.s2 * rho.rho22())
}

/// Projected GKSL jump term on level 1 (`A`) towards level 2 (`B`), next to the
/// plain sink on level 1. The two agree identically: a sink is the
/// `|A⟩⟨A|`-block of a dissipative transfer into an ancillary level.
pub fn gksl_truncation_check(rho: &DensityMatrix, s: f64) -> (Mat2, Mat2) {
    gksl_truncation_pair(rho, s, 0, 1)
}

/// Same as [`gksl_truncation_check`] for an arbitrary ordered pair of levels.
pub fn gksl_truncation_pair(rho: &DensityMatrix, s: f64, a: usize, b: usize) -> (Mat2, Mat2) {
    let pa = Mat2::projector(a);
    let pb = Mat2::projector(b);
    let m: Mat2 = (*rho).into();
    let rho_aa = m[(a, a)];
    let jump = (pb.scale_c(rho_aa) - m.anticommutator(&pa).scale(0.5)).scale(s);
    let projected = pa * jump * pa;
    let sink = pa.scale_c(rho_aa).scale(-s);
    (projected, sink)
}

/// Detailed-balance ratio `γ⁺/γ⁻ = exp(−ΔE/β⁻¹)`.
pub fn thermal_ratio(beta_inverse: f64, delta_e: f64) -> f64 {
    (-delta_e / beta_inverse).exp()
}

/// Full generator `−i[H, ρ] + L(ρ) + S(ρ)`, symmetrized to be exactly Hermitian.
pub fn rhs(ctx: &GeneratorContext<'_>) -> Mat2 {
    let h = hamiltonian_at(ctx);
    let rho: Mat2 = (*ctx.state).into();
    let unitary = h.commutator(&rho).scale_c(-I);
    let total = unitary
        + dissipator(ctx.state, &ctx.model.dissipation)
        + sink_term(ctx.state, &ctx.model.sink);
    *hermitize(&total).matrix()
}
