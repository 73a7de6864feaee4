//! Gauge reduction to canonical form.
//!
//! With `α = ∫₀^z (c0 - c̄0)` and `β = ∫₀^z (c2 - c̄2)`,
//! `R(z) = e^{-iβ}(cos α·I + sin α·J)` turns `JY' + QY = λY` into
//! `JỸ' + (Q̃₁ + Q̃₂)Ỹ = λỸ` with `Q̃₁ = R⁻¹Q₁R = e^{-2αJ}Q₁` and
//! `Q̃₂ = c̄0·σ0 + c̄2·σ2`. Taking traces at π,
//!
//! ```text
//! Δ_Q(λ) = e^{-i·π·c̄2}·Δ_{Q̃₁}(λ - c̄0)
//! ```

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::floquet::monodromy;
use crate::pauli::{Mat2, C64, SIGMA};
use crate::potential::{Channel, Potential};
use crate::propagator::{fundamental, j_poly, PropagationError};

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeData {
    /// `z ↦ ∫₀^z (c0 - c̄0) dt`.
    pub alpha: Channel,
    /// `z ↦ ∫₀^z (c2 - c̄2) dt`.
    pub beta: Channel,
    pub mean_c0: f64,
    pub mean_c2: f64,
    /// `∫₀^π c2 dt`.
    pub phase: f64,
    /// Spectral shift, equal to `c̄0`.
    pub shift: f64,
}

/// Scalar summary of [`GaugeData`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeSummary {
    pub mean_c0: f64,
    pub mean_c2: f64,
    pub phase: f64,
    pub shift: f64,
}

impl GaugeData {
    pub fn new(q: &Potential) -> Self {
        let (c0, c2) = (q.channel(0), q.channel(2));
        let (mean_c0, mean_c2) = (c0.mean(), c2.mean());
        GaugeData {
            alpha: c0.mean_free_antiderivative(),
            beta: c2.mean_free_antiderivative(),
            mean_c0,
            mean_c2,
            phase: PI * mean_c2,
            shift: mean_c0,
        }
    }

    pub fn summary(&self) -> GaugeSummary {
        GaugeSummary {
            mean_c0: self.mean_c0,
            mean_c2: self.mean_c2,
            phase: self.phase,
            shift: self.shift,
        }
    }

    /// `e^{i·phase}`, the factor that makes the discriminant real.
    pub fn unit_phase(&self) -> C64 {
        C64::new(0.0, self.phase).exp()
    }

    pub fn r(&self, z: f64) -> Mat2 {
        let (a, b) = (self.alpha.eval(z), self.beta.eval(z));
        let ph = C64::new(0.0, -b).exp();
        j_poly(ph * a.cos(), ph * a.sin())
    }
}

/// `R(z)` for `q`.
pub fn gauge_r(q: &Potential, z: f64) -> Mat2 {
    GaugeData::new(q).r(z)
}

/// Output of [`reduce_to_canonical`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// `Q̃₁`, canonical.
    pub q1: Potential,
    /// Constant `Q̃₂ = c̄0·σ0 + c̄2·σ2`.
    pub q2: Mat2,
    pub gauge: GaugeData,
}

impl Reduction {
    /// `Q̃₁ + Q̃₂` as a single potential.
    pub fn full(&self) -> Potential {
        let q1 = &self.q1;
        let mut ch: [Channel; 4] = std::array::from_fn(|i| q1.channel(i).clone());
        ch[0] = Channel::constant(self.gauge.mean_c0);
        ch[2] = Channel::constant(self.gauge.mean_c2);
        let p = Potential::from_channels(ch);
        match q1.rotation() {
            Some(r) => p.rotated(r.clone()),
            None => p,
        }
    }
}

fn is_constant(c: &Channel) -> bool {
    c.is_piecewise_constant() && c.breakpoints().iter().all(|&b| b == 0.0)
}

pub fn reduce_to_canonical(q: &Potential) -> Reduction {
    let gauge = GaugeData::new(q);
    let mut q1 = q.j_decompose().q1;
    if !is_constant(q.channel(0)) {
        q1 = q1.rotated(Channel::combine(vec![(-2.0, gauge.alpha.clone())]));
    }
    let q2 = Mat2::IDENTITY * gauge.mean_c0 + SIGMA[2] * gauge.mean_c2;
    Reduction { q1, q2, gauge }
}

/// `|Δ_Q(λ) - e^{-i·phase}·Δ_{Q̃₁}(λ - shift)|`.
pub fn discriminant_relation_defect(q: &Potential, lambda: f64) -> Result<f64, PropagationError> {
    let red = reduce_to_canonical(q);
    relation_defect_with(q, &red, lambda)
}

/// As [`discriminant_relation_defect`] with a precomputed reduction.
pub fn relation_defect_with(q: &Potential, red: &Reduction, lambda: f64) -> Result<f64, PropagationError> {
    let lhs = fundamental(q, C64::new(lambda, 0.0), PI, false)?.y.trace();
    let reduced = fundamental(&red.q1, C64::new(lambda - red.gauge.shift, 0.0), PI, false)?
        .y
        .trace();
    Ok((lhs - C64::new(0.0, -red.gauge.phase).exp() * reduced).norm())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("potential is not canonical (σ0/σ2 L¹ norm {defect:.3e})")]
    NotCanonical { defect: f64 },
    #[error("potential is not π/2-periodic (defect {defect:.3e})")]
    NotHalfPeriodic { defect: f64 },
}

/// The π/2-periodicity-breaking gauge `R̂(z) = e^{φ(z)(J - iI)}`, `φ = πz - z²`.
///
/// Returns `Q̂ = e^{2φJ}·Q + (π - 2z)(I + σ2)`.
pub fn half_period_breaking_transform(q: &Potential) -> Result<Potential, GaugeError> {
    let tol = q.default_tolerance();
    let q2_norm = q.j_decompose().q2.l1_norm();
    if q2_norm >= tol {
        return Err(GaugeError::NotCanonical { defect: q2_norm });
    }
    let defect = q.half_periodic_defect();
    if defect >= tol {
        return Err(GaugeError::NotHalfPeriodic { defect });
    }
    let ramp = || Channel::polynomial(vec![PI, -2.0]).expect("valid polynomial");
    let angle = Channel::polynomial(vec![0.0, 2.0 * PI, -2.0]).expect("valid polynomial");
    let base = Potential::from_channels([
        ramp(),
        q.channel(1).clone(),
        ramp(),
        q.channel(3).clone(),
    ]);
    let base = match q.rotation() {
        Some(r) => base.rotated(r.clone()),
        None => base,
    };
    Ok(base.rotated(angle))
}

/// `det R(z) = e^{-2iβ(z)}` residual, used by tests and the harness.
pub fn gauge_det_defect(g: &GaugeData, z: f64) -> f64 {
    (g.r(z).det() - C64::new(0.0, -2.0 * g.beta.eval(z)).exp()).norm()
}

/// Checks `𝕐_Q(π) = e^{-i·phase}·𝕐_{Q̃₁}(π; λ - shift)` entrywise, valid because `R(π) = I`.
pub fn monodromy_relation_defect(q: &Potential, lambda: f64) -> Result<f64, PropagationError> {
    let red = reduce_to_canonical(q);
    let a = monodromy(q, C64::new(lambda, 0.0))?.y_pi;
    let b = monodromy(&red.q1, C64::new(lambda - red.gauge.shift, 0.0))?.y_pi;
    Ok((a - b * C64::new(0.0, -red.gauge.phase).exp()).norm_col_sum())
}
