//! Discriminants, Floquet multipliers and stability.
//!
//! Entries follow the convention `y_ij = 𝕐[j][i]`, so
//! `Δ^I = 𝕐₀₀ + 𝕐₁₁`, `Δ^J = 𝕐₀₁ - 𝕐₁₀`, `∇^I = 𝕐₀₀ - 𝕐₁₁`, `∇^J = 𝕐₀₁ + 𝕐₁₀`
//! and `𝕐 = ½(Δ^I·I + Δ^J·J + ∇^I·σ3 + ∇^J·σ1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Mat2, C64, SIGMA};
use crate::potential::Potential;
use crate::propagator::{fundamental, fundamental_at, PropagationError};

/// Half-width of the band around ±2 classified as a band edge.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;
/// Largest imaginary part of the reduced discriminant accepted for real λ.
pub const LINE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantQuad {
    pub d_i: C64,
    pub d_j: C64,
    pub n_i: C64,
    pub n_j: C64,
}

impl DiscriminantQuad {
    pub fn from_matrix(y: &Mat2) -> Self {
        let m = &y.m;
        DiscriminantQuad {
            d_i: m[0][0] + m[1][1],
            d_j: m[0][1] - m[1][0],
            n_i: m[0][0] - m[1][1],
            n_j: m[0][1] + m[1][0],
        }
    }

    pub fn reconstruct(&self) -> Mat2 {
        (Mat2::IDENTITY * self.d_i + Mat2::J * self.d_j + SIGMA[3] * self.n_i + SIGMA[1] * self.n_j)
            * 0.5
    }

    /// `dI² + dJ² - nI² - nJ²`, equal to `4·det 𝕐`.
    pub fn wronskian(&self) -> C64 {
        self.d_i * self.d_i + self.d_j * self.d_j - self.n_i * self.n_i - self.n_j * self.n_j
    }
}

/// `𝕐` at π, π/2 and -π/2 together with their quads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub lambda: C64,
    pub y_pi: Mat2,
    pub y_half: Mat2,
    pub y_neg_half: Mat2,
    pub disc: DiscriminantQuad,
    pub disc_plus: DiscriminantQuad,
    pub disc_minus: DiscriminantQuad,
    /// `∂λ𝕐(π)`, when requested.
    pub dy_pi: Option<Mat2>,
}

impl Monodromy {
    /// `Δ(λ) = tr 𝕐(π)`.
    pub fn discriminant(&self) -> C64 {
        self.disc.d_i
    }

    /// `dΔ/dλ`, when the derivative was propagated.
    pub fn discriminant_derivative(&self) -> Option<C64> {
        self.dy_pi.map(|d| d.trace())
    }

    /// `‖𝕐(π/2) - 𝕐(-π/2)·𝕐(π)‖`.
    pub fn consistency_defect(&self) -> f64 {
        (self.y_half - self.y_neg_half * self.y_pi).norm_col_sum()
    }
}

pub fn monodromy(q: &Potential, lambda: C64) -> Result<Monodromy, PropagationError> {
    build(q, lambda, false)
}

pub fn monodromy_with_derivative(q: &Potential, lambda: C64) -> Result<Monodromy, PropagationError> {
    build(q, lambda, true)
}

fn build(q: &Potential, lambda: C64, derivative: bool) -> Result<Monodromy, PropagationError> {
    let v = fundamental_at(q, lambda, &[PI / 2.0, PI, -PI / 2.0], derivative)?;
    let (half, pi, neg) = (v[0].y, v[1].y, v[2].y);
    Ok(Monodromy {
        lambda,
        y_pi: pi,
        y_half: half,
        y_neg_half: neg,
        disc: DiscriminantQuad::from_matrix(&pi),
        disc_plus: DiscriminantQuad::from_matrix(&half),
        disc_minus: DiscriminantQuad::from_matrix(&neg),
        dy_pi: v[1].dy_dlambda,
    })
}

/// `Δ(λ)` and `dΔ/dλ` from a single forward sweep to π.
pub fn discriminant_with_derivative(q: &Potential, lambda: C64) -> Result<(C64, C64), PropagationError> {
    let p = fundamental(q, lambda, PI, true)?;
    Ok((p.y.trace(), p.dy_dlambda.expect("derivative requested").trace()))
}

/// Roots of `ρ² - Δρ + det 𝕐(π) = 0`.
pub fn floquet_multipliers(m: &Monodromy) -> (C64, C64) {
    multipliers_from(m.discriminant(), m.y_pi.det())
}

/// Roots of `ρ² - Δρ + d = 0`, avoiding cancellation in the smaller root.
pub fn multipliers_from(delta: C64, det: C64) -> (C64, C64) {
    let root = (delta * delta - det * 4.0).sqrt();
    let big = if (delta + root).norm() >= (delta - root).norm() {
        (delta + root) * 0.5
    } else {
        (delta - root) * 0.5
    };
    if big.norm() == 0.0 {
        return (big, big);
    }
    (big, det / big)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Boundary,
}

impl Stability {
    /// One-letter code used in scan tables.
    pub fn code(self) -> char {
        match self {
            Stability::Stable => 'S',
            Stability::Unstable => 'U',
            Stability::Boundary => 'B',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'S' => Some(Stability::Stable),
            'U' => Some(Stability::Unstable),
            'B' => Some(Stability::Boundary),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    #[error("reduced discriminant at λ = {lambda} is off the real line (Im = {imag:.3e})")]
    OffLine { lambda: f64, imag: f64 },
}

/// Stability of real λ from `δ = e^{i·phase}·Δ`.
pub fn stability(m: &Monodromy, phase: f64) -> Result<Stability, FloquetError> {
    let delta = C64::new(0.0, phase).exp() * m.discriminant();
    classify_reduced(m.lambda.re, delta)
}

pub fn classify_reduced(lambda: f64, delta: C64) -> Result<Stability, FloquetError> {
    if delta.im.abs() > LINE_TOLERANCE {
        return Err(FloquetError::OffLine {
            lambda,
            imag: delta.im,
        });
    }
    let d = delta.re;
    Ok(if (d - 2.0).abs() <= BOUNDARY_TOLERANCE || (d + 2.0).abs() <= BOUNDARY_TOLERANCE {
        Stability::Boundary
    } else if d.abs() < 2.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfVariant {
    /// `𝕐(π) = (σ2·𝕐(π/2))²`, the π/2-anti-periodic setting.
    Periodic,
    /// `𝕐(π) = 𝕐(π/2)²`, the π/2-periodic setting.
    Antiperiodic,
}

pub fn half_monodromy_identity_defect(m: &Monodromy, variant: HalfVariant) -> f64 {
    let h = match variant {
        HalfVariant::Antiperiodic => m.y_half,
        HalfVariant::Periodic => SIGMA[2] * m.y_half,
    };
    (m.y_pi - h * h).norm_col_sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumDiffVariant {
    /// `𝕐(π/2) + 𝕐(-π/2) = ±√(Δ+2)·I`.
    Plus,
    /// `𝕐(π/2) - 𝕐(-π/2) = ±√(2-Δ)·J`.
    Minus,
}

fn sum_diff_parts(m: &Monodromy, variant: SumDiffVariant) -> (Mat2, C64, Mat2) {
    let delta = m.discriminant();
    match variant {
        SumDiffVariant::Plus => (m.y_half + m.y_neg_half, (delta + 2.0).sqrt(), Mat2::IDENTITY),
        SumDiffVariant::Minus => (m.y_half - m.y_neg_half, (-delta + 2.0).sqrt(), Mat2::J),
    }
}

/// Defect of the half-period sum/difference identity, minimised over the sign
/// of the principal square root.
pub fn sum_difference_identity_defect(m: &Monodromy, variant: SumDiffVariant) -> f64 {
    let (lhs, root, basis) = sum_diff_parts(m, variant);
    let plus = (lhs - basis * root).norm_col_sum();
    let minus = (lhs + basis * root).norm_col_sum();
    plus.min(minus)
}

/// Sum/difference defects along an ordered λ grid with the root's sign carried
/// by continuity from one node to the next.
pub fn sum_difference_defects_along(monodromies: &[Monodromy], variant: SumDiffVariant) -> Vec<f64> {
    let mut out = Vec::with_capacity(monodromies.len());
    let mut history: Vec<C64> = Vec::with_capacity(monodromies.len());
    for m in monodromies {
        let (lhs, root, basis) = sum_diff_parts(m, variant);
        // predict the signed root linearly from the last two nodes
        let predicted = match history.as_slice() {
            [] => None,
            [p] => Some(*p),
            [.., a, b] => Some(*b * 2.0 - *a),
        };
        let signed = match predicted {
            None => {
                if (lhs - basis * root).norm_col_sum() <= (lhs + basis * root).norm_col_sum() {
                    root
                } else {
                    -root
                }
            }
            Some(p) => {
                if (root - p).norm() <= (root + p).norm() {
                    root
                } else {
                    -root
                }
            }
        };
        history.push(signed);
        out.push((lhs - basis * signed).norm_col_sum());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Channel;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn free_quad_at_pi() {
        let lam = 0.37;
        let m = monodromy(&Potential::zero(), c(lam)).unwrap();
        let s = (lam * PI).sin();
        assert!(close(m.disc.d_i, c(2.0 * (lam * PI).cos()), 1e-13));
        // 𝕐(π) = cos λπ·I - sin λπ·J, so Δ^J = -2 sin λπ in this convention
        assert!(close(m.disc.d_j, c(-2.0 * s), 1e-13));
        assert!(m.disc.n_i.norm() < 1e-13 && m.disc.n_j.norm() < 1e-13);
    }

    #[test]
    fn sigma1_quad_at_zero() {
        let m = monodromy(&Potential::constant([0.0, 1.0, 0.0, 0.0]), c(0.0)).unwrap();
        let scale = PI.cosh();
        assert!(close(m.disc.d_i, c(2.0 * PI.cosh()), 1e-12 * scale));
        assert!(close(m.disc.n_i, c(2.0 * PI.sinh()), 1e-12 * scale));
        assert!(m.disc.d_j.norm() < 1e-12 * scale && m.disc.n_j.norm() < 1e-12 * scale);
    }

    #[test]
    fn shifted_free_quad() {
        let lam = 2.6;
        let m = monodromy(&Potential::constant([1.0, 0.0, 0.0, 0.0]), c(lam)).unwrap();
        assert!(close(m.disc.d_i, c(2.0 * ((lam - 1.0) * PI).cos()), 1e-12));
    }

    #[test]
    fn reconstruction_and_wronskian() {
        let q = Potential::from_channels([
            Channel::zero(),
            Channel::cos(1, 1.2),
            Channel::zero(),
            Channel::sin(2, -0.7),
        ]);
        let m = monodromy(&q, c(1.9)).unwrap();
        for (y, quad) in [(m.y_pi, m.disc), (m.y_half, m.disc_plus), (m.y_neg_half, m.disc_minus)] {
            assert!((quad.reconstruct() - y).max_abs() < 1e-12);
            assert!(close(quad.wronskian(), c(4.0), 1e-9));
        }
        assert!(m.consistency_defect() < 1e-9);
    }

    #[test]
    fn multiplier_examples() {
        let (a, b) = multipliers_from(c(2.0), c(1.0));
        assert!(close(a, c(1.0), 1e-7) && close(b, c(1.0), 1e-7));
        let (a, b) = multipliers_from(c(0.0), c(1.0));
        assert!(close(a * b, c(1.0), 1e-15) && close(a + b, c(0.0), 1e-15));
        assert!(close(a.powu(2), c(-1.0), 1e-15));
        let (a, b) = multipliers_from(c(2.5), c(1.0));
        assert!(close(a, c(2.0), 1e-15) && close(b, c(0.5), 1e-15));
    }

    #[test]
    fn multipliers_match_determinant_and_trace() {
        let q = Potential::constant([0.3, 0.5, 0.8, -0.2]);
        let m = monodromy(&q, C64::new(1.1, 0.2)).unwrap();
        let (a, b) = floquet_multipliers(&m);
        assert!(close(a * b, m.y_pi.det(), 1e-10));
        assert!(close(a + b, m.discriminant(), 1e-10));
    }

    #[test]
    fn stability_examples() {
        let free = Potential::zero();
        assert_eq!(stability(&monodromy(&free, c(0.5)).unwrap(), 0.0), Ok(Stability::Stable));
        assert_eq!(stability(&monodromy(&free, c(1.0)).unwrap(), 0.0), Ok(Stability::Boundary));
        let s1 = Potential::constant([0.0, 1.0, 0.0, 0.0]);
        assert_eq!(stability(&monodromy(&s1, c(0.0)).unwrap(), 0.0), Ok(Stability::Unstable));
        // σ2 potential: Δ = 2cos λπ·e^{-iπ}, real only after the phase is removed
        let s2 = Potential::constant([0.0, 0.0, 0.5, 0.0]);
        let m = monodromy(&s2, c(0.25)).unwrap();
        assert!(matches!(stability(&m, 0.0), Err(FloquetError::OffLine { .. })));
        assert_eq!(stability(&m, s2.im_q_integral()), Ok(Stability::Stable));
    }

    #[test]
    fn half_monodromy_examples() {
        let free = Potential::zero();
        for lam in [0.0, 0.5, 1.0, 2.0, 3.3] {
            let m = monodromy(&free, c(lam)).unwrap();
            assert!(half_monodromy_identity_defect(&m, HalfVariant::Antiperiodic) < 1e-12);
        }
        let s1 = Potential::constant([0.0, 1.0, 0.0, 0.0]);
        let m = monodromy(&s1, c(2.0)).unwrap();
        assert!(half_monodromy_identity_defect(&m, HalfVariant::Antiperiodic) < 1e-10);
        let anti = Potential::single(1, Channel::cos(1, 1.0));
        let m = monodromy(&anti, c(1.0)).unwrap();
        assert!(half_monodromy_identity_defect(&m, HalfVariant::Periodic) < 1e-9);
        assert!(half_monodromy_identity_defect(&m, HalfVariant::Antiperiodic) > 1e-3);
    }

    #[test]
    fn sum_difference_examples() {
        let free = Potential::zero();
        let m = monodromy(&free, c(0.5)).unwrap();
        assert!(sum_difference_identity_defect(&m, SumDiffVariant::Plus) < 1e-12);
        assert!(sum_difference_identity_defect(&m, SumDiffVariant::Minus) < 1e-12);
        let s1 = Potential::constant([0.0, 1.0, 0.0, 0.0]);
        let m = monodromy(&s1, c(3.0)).unwrap();
        assert!(sum_difference_identity_defect(&m, SumDiffVariant::Plus) < 1e-6);
    }

    #[test]
    fn sum_difference_along_grid_tracks_the_sign() {
        let free = Potential::zero();
        let ms: Vec<Monodromy> = (0..=40)
            .map(|k| monodromy(&free, c(-2.0 + 0.1 * k as f64)).unwrap())
            .collect();
        for variant in [SumDiffVariant::Plus, SumDiffVariant::Minus] {
            let d = sum_difference_defects_along(&ms, variant);
            assert!(d.iter().all(|&x| x < 1e-6), "{variant:?}: {d:?}");
        }
    }

    #[test]
    fn free_discriminant_on_a_grid() {
        let free = Potential::zero();
        for k in 0..=100 {
            let lam = -5.0 + 0.1 * k as f64;
            let (d, dd) = discriminant_with_derivative(&free, c(lam)).unwrap();
            assert!(close(d, c(2.0 * (lam * PI).cos()), 1e-10));
            assert!(close(dd, c(-2.0 * PI * (lam * PI).sin()), 1e-9));
        }
    }
}
