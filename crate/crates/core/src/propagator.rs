//! Fundamental matrix of `J𝕐' + Q𝕐 = λ𝕐`, `𝕐(0) = I`.
//!
//! Written as `𝕐' = A(z)𝕐` with `A = -λJ + JQ(z)` (using `J⁻¹ = -J`).
//! Piecewise-constant potentials are propagated with one exact exponential per
//! piece. Everything else uses the fourth-order commutator-free exponential
//! scheme
//!
//! ```text
//! 𝕐ₙ₊₁ = exp(h(a₁A₁ + a₂A₂))·exp(h(a₂A₁ + a₁A₂))·𝕐ₙ,   a₁,₂ = (3 ∓ 2√3)/12
//! ```
//!
//! with `A₁, A₂` at the Gauss nodes of the step. Steps start at π/2048 and are
//! halved piece by piece while the Richardson estimate obtained from pairs of
//! steps exceeds the local tolerance.
//!
//! The λ-derivative is the exact derivative of the discrete scheme, which is a
//! consistent discretisation of `(∂λ𝕐)' = A·∂λ𝕐 - J·𝕐`, `∂λ𝕐(0) = 0`.
//!
//! Negative `z` runs the same scheme with negative steps; this is the reflected
//! system `ẑ = -z`, `Q̂(ẑ) = -Q(-ẑ)`, `λ̂ = -λ`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::pauli::{Mat2, C64};
use crate::potential::{wrap, Potential};

/// Base step of the exponential scheme.
pub const BASE_STEP: f64 = PI / 2048.0;
/// Relative local error accepted per pair of steps.
pub const LOCAL_TOLERANCE: f64 = 1e-12;
/// Limit on `|Im λ|·|z|` beyond which entries overflow `f64`.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

const MAX_HALVINGS: u32 = 10;
const ALPHA1: f64 = (3.0 - 2.0 * 1.732_050_807_568_877_2) / 12.0;
const ALPHA2: f64 = (3.0 + 2.0 * 1.732_050_807_568_877_2) / 12.0;
const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    #[error("non-finite propagation input (λ = {lambda}, z = {z})")]
    NonFinite { lambda: C64, z: f64 },
    #[error("|Im λ|·|z| = {exponent:.1} exceeds {OVERFLOW_EXPONENT}; the solution overflows f64")]
    Overflow { exponent: f64 },
    #[error("step control did not converge on [{from}, {to}] (error estimate {estimate:.3e})")]
    StepControl { from: f64, to: f64, estimate: f64 },
}

/// Value of the fundamental matrix (and optionally its λ-derivative) at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub lambda: C64,
    pub z: f64,
    pub y: Mat2,
    pub dy_dlambda: Option<Mat2>,
}

/// `𝕐(z; λ)` with `𝕐(0) = I`.
pub fn fundamental(
    q: &Potential,
    lambda: C64,
    z: f64,
    want_derivative: bool,
) -> Result<Propagation, PropagationError> {
    Ok(fundamental_at(q, lambda, &[z], want_derivative)?.remove(0))
}

/// `𝕐` at several points, sharing one sweep per direction.
pub fn fundamental_at(
    q: &Potential,
    lambda: C64,
    zs: &[f64],
    want_derivative: bool,
) -> Result<Vec<Propagation>, PropagationError> {
    for &z in zs {
        if !z.is_finite() || !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(PropagationError::NonFinite { lambda, z });
        }
        let exponent = lambda.im.abs() * z.abs();
        if exponent > OVERFLOW_EXPONENT {
            return Err(PropagationError::Overflow { exponent });
        }
    }
    let stepper = Stepper {
        q,
        lambda,
        derivative: want_derivative,
        exact: q.is_piecewise_constant(),
    };
    let mut out = vec![None; zs.len()];
    for forward in [true, false] {
        let mut idx: Vec<usize> = (0..zs.len())
            .filter(|&i| if forward { zs[i] >= 0.0 } else { zs[i] < 0.0 })
            .collect();
        if idx.is_empty() {
            continue;
        }
        idx.sort_by(|&a, &b| zs[a].abs().total_cmp(&zs[b].abs()));
        let targets: Vec<f64> = idx.iter().map(|&i| zs[i]).collect();
        let values = stepper.run(&targets)?;
        for (i, (y, dy)) in idx.into_iter().zip(values) {
            out[i] = Some(Propagation {
                lambda,
                z: zs[i],
                y,
                dy_dlambda: dy,
            });
        }
    }
    Ok(out.into_iter().map(|p| p.expect("every target visited")).collect())
}

/// `𝕌(z) = 𝕐(z)·𝕐(π)⁻¹`, the solution normalised by `𝕌(π) = I`.
pub fn anchored_at_pi(q: &Potential, lambda: C64, z: f64) -> Result<Propagation, PropagationError> {
    let v = fundamental_at(q, lambda, &[z, PI], false)?;
    let inv = v[1].y.inverse().expect("fundamental matrix is invertible");
    Ok(Propagation {
        lambda,
        z,
        y: v[0].y * inv,
        dy_dlambda: None,
    })
}

/// Leading large-|λ| term `e^{-Jλz}·e^{J∫₀^z Q₂ dt}`.
///
/// `JQ₂ = c0·J - i·c2·I` commutes with J, so with `α = ∫₀^z c0` and
/// `β = ∫₀^z c2` the second factor is `e^{-iβ}(cos α·I + sin α·J)`.
pub fn asymptotic_reference(q: &Potential, lambda: C64, z: f64) -> Mat2 {
    let alpha = q.channel(0).integral_to(z);
    let beta = q.channel(2).integral_to(z);
    let lz = lambda * z;
    let (a, b) = (lz.cos(), -lz.sin());
    let phase = C64::new(0.0, -beta).exp();
    let (c, d) = (phase * alpha.cos(), phase * alpha.sin());
    j_poly(a * c - b * d, a * d + b * c)
}

/// `‖𝕐(z; λ) - leading term‖·e^{-|Im λ|·|z|}`.
pub fn normalized_asymptotic_defect(q: &Potential, lambda: C64, z: f64) -> Result<f64, PropagationError> {
    let y = fundamental(q, lambda, z, false)?.y;
    let lead = asymptotic_reference(q, lambda, z);
    Ok((y - lead).norm_col_sum() * (-(lambda.im * z).abs()).exp())
}

/// `a·I + b·J`.
pub(crate) fn j_poly(a: C64, b: C64) -> Mat2 {
    Mat2::new(a, b, -b, a)
}

/// Generator `A(z) = -λJ + JQ(z)`.
fn generator(q: &Potential, lambda: C64, z: f64) -> Mat2 {
    let [c0, c1, c2, c3] = q.coefficients(z);
    let off = C64::from(c0) - lambda;
    Mat2::new(
        C64::new(c1, -c2),
        off - c3,
        -off - c3,
        C64::new(-c1, -c2),
    )
}

struct Stepper<'a> {
    q: &'a Potential,
    lambda: C64,
    derivative: bool,
    exact: bool,
}

type State = (Mat2, Option<Mat2>);

impl Stepper<'_> {
    /// Runs from 0 through `targets` (all on one side of 0, sorted by |z|).
    fn run(&self, targets: &[f64]) -> Result<Vec<State>, PropagationError> {
        let end = *targets.last().unwrap();
        let marks = self.marks(end, targets);
        let mut y = Mat2::IDENTITY;
        let mut dy = self.derivative.then_some(Mat2::ZERO);
        let mut out = Vec::with_capacity(targets.len());
        let mut t = targets.iter().peekable();
        while t.peek().is_some_and(|&&z| z == 0.0) {
            out.push((y, dy));
            t.next();
        }
        for w in marks.windows(2) {
            let (s, ds) = self.piece(w[0], w[1])?;
            if let (Some(d), Some(ds)) = (dy.as_mut(), ds) {
                *d = ds * y + s * *d;
            }
            y = s * y;
            while t.peek().is_some_and(|&&z| z == w[1]) {
                out.push((y, dy));
                t.next();
            }
        }
        Ok(out)
    }

    /// Piece boundaries from 0 to `end`: breakpoints of Q in every period,
    /// multiples of π/2 and the requested targets.
    fn marks(&self, end: f64, targets: &[f64]) -> Vec<f64> {
        let (lo, hi) = if end >= 0.0 { (0.0, end) } else { (end, 0.0) };
        let mut m = vec![0.0, end];
        m.extend_from_slice(targets);
        let mut base = self.q.breakpoints();
        base.push(0.0);
        base.push(PI / 2.0);
        let k0 = (lo / PI).floor() as i64 - 1;
        let k1 = (hi / PI).ceil() as i64 + 1;
        for k in k0..=k1 {
            for b in &base {
                let x = b + k as f64 * PI;
                if x > lo && x < hi {
                    m.push(x);
                }
            }
        }
        if end >= 0.0 {
            m.sort_by(|a, b| a.total_cmp(b));
        } else {
            m.sort_by(|a, b| b.total_cmp(a));
        }
        m.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        // keep targets bit-exact where dedup merged them with a breakpoint
        for x in m.iter_mut() {
            if let Some(t) = targets.iter().find(|t| (**t - *x).abs() < 1e-14) {
                *x = *t;
            }
        }
        m
    }

    /// Transfer matrix of one piece and its λ-derivative.
    fn piece(&self, from: f64, to: f64) -> Result<(Mat2, Option<Mat2>), PropagationError> {
        let len = to - from;
        if self.exact {
            let a = generator(self.q, self.lambda, wrap(from + 0.5 * len));
            return Ok(if self.derivative {
                let (e, de) = expm_directional(&(a * len), &(Mat2::J * (-len)));
                (e, Some(de))
            } else {
                (expm(&(a * len)), None)
            });
        }
        let mut pairs = ((len.abs() / (2.0 * BASE_STEP)).ceil() as usize).max(1);
        let mut last_estimate = 0.0;
        for _ in 0..=MAX_HALVINGS {
            match self.piece_with(from, len, pairs) {
                Ok(v) => return Ok(v),
                Err(est) => {
                    last_estimate = est;
                    pairs *= 2;
                }
            }
        }
        Err(PropagationError::StepControl {
            from,
            to,
            estimate: last_estimate,
        })
    }

    fn piece_with(&self, from: f64, len: f64, pairs: usize) -> Result<(Mat2, Option<Mat2>), f64> {
        let h = len / (2 * pairs) as f64;
        let mut s = Mat2::IDENTITY;
        let mut ds = self.derivative.then_some(Mat2::ZERO);
        for p in 0..pairs {
            let z0 = from + (2 * p) as f64 * h;
            let (s1, d1) = self.cf4_step(z0, h);
            let (s2, d2) = self.cf4_step(z0 + h, h);
            let pair = s2 * s1;
            let (big, _) = self.cf4_step_plain(z0, 2.0 * h);
            let estimate = (pair - big).norm_col_sum() / 15.0;
            if estimate > LOCAL_TOLERANCE * pair.norm_col_sum().max(1.0) {
                return Err(estimate);
            }
            if let Some(d) = ds.as_mut() {
                let (d1, d2) = (d1.unwrap(), d2.unwrap());
                let dpair = d2 * s1 + s2 * d1;
                *d = dpair * s + pair * *d;
            }
            s = pair * s;
        }
        Ok((s, ds))
    }

    fn nodes(&self, z0: f64, h: f64) -> (Mat2, Mat2) {
        let a1 = generator(self.q, self.lambda, wrap(z0 + (0.5 - GAUSS_OFFSET) * h));
        let a2 = generator(self.q, self.lambda, wrap(z0 + (0.5 + GAUSS_OFFSET) * h));
        ((a1 * ALPHA1 + a2 * ALPHA2) * h, (a1 * ALPHA2 + a2 * ALPHA1) * h)
    }

    fn cf4_step_plain(&self, z0: f64, h: f64) -> (Mat2, Option<Mat2>) {
        let (ml, mr) = self.nodes(z0, h);
        (expm(&ml) * expm(&mr), None)
    }

    fn cf4_step(&self, z0: f64, h: f64) -> (Mat2, Option<Mat2>) {
        if !self.derivative {
            return self.cf4_step_plain(z0, h);
        }
        let (ml, mr) = self.nodes(z0, h);
        // each exponent depends on λ through -(a₁ + a₂)·h·J = -(h/2)·J
        let dm = Mat2::J * (-0.5 * h);
        let (el, del) = expm_directional(&ml, &dm);
        let (er, der) = expm_directional(&mr, &dm);
        (el * er, Some(del * er + el * der))
    }
}

/// `cosh √w`, `sinh √w / √w` and the derivative of the latter in `w`.
fn exp_kernels(w: C64) -> (C64, C64, C64) {
    if w.norm() < 1.0 {
        let mut f = C64::new(0.0, 0.0);
        let mut g = C64::new(0.0, 0.0);
        let mut dg = C64::new(0.0, 0.0);
        let mut wk = C64::new(1.0, 0.0); // w^k
        let mut fact_even = 1.0; // (2k)!
        let mut wkm1 = C64::new(0.0, 0.0); // w^(k-1)
        for k in 0..18 {
            let fact_odd = fact_even * (2 * k + 1) as f64; // (2k+1)!
            f += wk / fact_even;
            g += wk / fact_odd;
            if k > 0 {
                dg += wkm1 * (k as f64 / fact_odd);
            }
            wkm1 = wk;
            wk *= w;
            fact_even = fact_odd * (2 * k + 2) as f64;
        }
        (f, g, dg)
    } else {
        let s = w.sqrt();
        let f = s.cosh();
        let g = s.sinh() / s;
        (f, g, (f - g) / (w * 2.0))
    }
}

fn split_traceless(m: &Mat2) -> (C64, Mat2) {
    let a0 = m.trace() * 0.5;
    (a0, *m - Mat2::scalar(a0))
}

/// Closed-form exponential of a 2×2 matrix: with `M = a₀I + B`, `B² = wI`,
/// `e^M = e^{a₀}(cosh √w·I + (sinh √w/√w)·B)`.
pub fn expm(m: &Mat2) -> Mat2 {
    let (a0, b) = split_traceless(m);
    let w = b[(0, 0)] * b[(0, 0)] + b[(0, 1)] * b[(1, 0)];
    let (f, g, _) = exp_kernels(w);
    (Mat2::scalar(f) + b * g) * a0.exp()
}

/// `e^M` and its directional derivative along `dm`.
pub fn expm_directional(m: &Mat2, dm: &Mat2) -> (Mat2, Mat2) {
    let (a0, b) = split_traceless(m);
    let (da0, db) = split_traceless(dm);
    let w = b[(0, 0)] * b[(0, 0)] + b[(0, 1)] * b[(1, 0)];
    let dw = b[(0, 0)] * db[(0, 0)] * 2.0 + db[(0, 1)] * b[(1, 0)] + b[(0, 1)] * db[(1, 0)];
    let (f, g, dg) = exp_kernels(w);
    let scale = a0.exp();
    let core = Mat2::scalar(f) + b * g;
    let dcore = Mat2::scalar(g * 0.5 * dw) + b * (dg * dw) + db * g;
    (core * scale, (core * da0 + dcore) * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::SIGMA;
    use crate::potential::Channel;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Classical RK4 on `𝕐' = A𝕐` with a fixed tiny step, independent of the
    /// exponential scheme.
    fn rk4_reference(q: &Potential, lambda: C64, z: f64, h: f64) -> Mat2 {
        let n = (z.abs() / h).ceil() as usize;
        let h = z / n as f64;
        let a = |t: f64| generator(q, lambda, wrap(t));
        let mut y = Mat2::IDENTITY;
        for k in 0..n {
            let t = k as f64 * h;
            let k1 = a(t) * y;
            let k2 = a(t + 0.5 * h) * (y + k1 * (0.5 * h));
            let k3 = a(t + 0.5 * h) * (y + k2 * (0.5 * h));
            let k4 = a(t + h) * (y + k3 * h);
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        y
    }

    fn taylor_expm(m: &Mat2) -> Mat2 {
        // scaling and squaring with a long Taylor series
        let s = 8;
        let small = *m * (1.0 / (1u64 << s) as f64);
        let mut term = Mat2::IDENTITY;
        let mut sum = Mat2::IDENTITY;
        for k in 1..30 {
            term = term * small * (1.0 / k as f64);
            sum += term;
        }
        for _ in 0..s {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn expm_matches_taylor() {
        let ms = [
            Mat2::new(C64::new(0.3, 0.1), c(2.0), c(-1.5), C64::new(-0.2, 0.4)),
            Mat2::from_real(1e-9, 1e-8, 0.0, 0.0),
            Mat2::from_real(0.0, 3.0, 3.0, 0.0),
            Mat2::from_real(1.0, 1.0, 0.0, 1.0), // defective
        ];
        for m in ms {
            let d = (expm(&m) - taylor_expm(&m)).max_abs();
            assert!(d < 1e-12 * taylor_expm(&m).max_abs(), "{m:?}: {d}");
        }
    }

    #[test]
    fn expm_directional_matches_finite_difference() {
        let m = Mat2::new(C64::new(0.3, 0.1), c(0.9), c(-1.5), C64::new(-0.2, 0.4));
        let dm = Mat2::new(c(0.1), c(-0.5), c(0.7), C64::new(0.0, 0.3));
        let (_, de) = expm_directional(&m, &dm);
        let h = 1e-6;
        let fd = (expm(&(m + dm * h)) - expm(&(m - dm * h))) * (0.5 / h);
        assert!((de - fd).max_abs() < 1e-8);
        // small-w branch
        let m = Mat2::from_real(0.01, 0.02, -0.03, -0.01);
        let (_, de) = expm_directional(&m, &dm);
        let fd = (expm(&(m + dm * h)) - expm(&(m - dm * h))) * (0.5 / h);
        assert!((de - fd).max_abs() < 1e-8);
    }

    #[test]
    fn free_system_at_pi() {
        let p = fundamental(&Potential::zero(), c(1.0), PI, false).unwrap();
        assert!((p.y + Mat2::IDENTITY).max_abs() < 1e-14);
    }

    #[test]
    fn identity_at_zero() {
        let q = Potential::single(1, Channel::cos(1, 1.0));
        let p = fundamental(&q, c(0.7), 0.0, true).unwrap();
        assert_eq!(p.y, Mat2::IDENTITY);
        assert_eq!(p.dy_dlambda, Some(Mat2::ZERO));
    }

    #[test]
    fn sigma0_sigma2_closed_form() {
        // Q = σ0: A = (1 - λ)J, so at λ = 1 the solution is I.
        let q = Potential::constant([1.0, 0.0, 0.0, 0.0]);
        let p = fundamental(&q, c(1.0), PI, false).unwrap();
        assert!((p.y - Mat2::IDENTITY).max_abs() < 1e-14);
        // general r, q: e^{-iqz}(cos((r-λ)z)I + sin((r-λ)z)J)
        let (r, s, lam, z) = (0.7, -1.3, 2.2, 2.9);
        let q = Potential::constant([r, 0.0, s, 0.0]);
        let p = fundamental(&q, c(lam), z, false).unwrap();
        let th = (r - lam) * z;
        let want = j_poly(c(th.cos()), c(th.sin())) * C64::new(0.0, -s * z).exp();
        assert!((p.y - want).max_abs() < 1e-12);
    }

    #[test]
    fn sigma1_constant_closed_form() {
        let q = Potential::constant([0.0, 1.0, 0.0, 0.0]);
        let p = fundamental(&q, c(0.0), PI, false).unwrap();
        let want = Mat2::IDENTITY * PI.cosh() + SIGMA[3] * PI.sinh();
        assert!((p.y - want).max_abs() < 1e-12 * want.max_abs());
        let r = rk4_reference(&q, c(0.0), PI, 1e-5);
        assert!((r - want).max_abs() < 1e-9 * want.max_abs());
    }

    #[test]
    fn anchored_examples() {
        let u = anchored_at_pi(&Potential::zero(), c(0.3), PI).unwrap();
        assert!((u.y - Mat2::IDENTITY).max_abs() < 1e-14);
        let q = Potential::single(1, Channel::cos(1, 1.0));
        let u = anchored_at_pi(&q, c(1.7), PI).unwrap();
        assert!((u.y - Mat2::IDENTITY).max_abs() < 1e-12);
        let s1 = Potential::constant([0.0, 1.0, 0.0, 0.0]);
        let u = anchored_at_pi(&s1, c(0.0), 0.0).unwrap();
        let want = (Mat2::IDENTITY * PI.cosh() + SIGMA[3] * PI.sinh()).inverse().unwrap();
        assert!((u.y - want).max_abs() < 1e-12);
    }

    #[test]
    fn asymptotic_reference_examples() {
        let lam = C64::new(0.4, 2.0);
        let r = asymptotic_reference(&Potential::zero(), lam, 1.1);
        assert!((r - j_poly((lam * 1.1).cos(), -(lam * 1.1).sin())).max_abs() < 1e-14);
        let r = asymptotic_reference(&Potential::constant([1.0, 0.0, 0.0, 0.0]), c(0.0), PI);
        assert!((r + Mat2::IDENTITY).max_abs() < 1e-14);
        let r = asymptotic_reference(&Potential::constant([0.0, 0.0, 1.0, 0.0]), c(0.0), PI);
        assert!((r + Mat2::IDENTITY).max_abs() < 1e-14);
    }

    #[test]
    fn smooth_potential_matches_rk4_reference() {
        let q = Potential::from_channels([
            Channel::sin(1, 0.5),
            Channel::cos(2, 1.0),
            Channel::cos(1, 0.3),
            Channel::sin(3, -0.4),
        ]);
        for &(lam, z) in &[(0.0, PI), (3.5, PI), (-2.0, -PI / 2.0), (7.9, 1.3)] {
            let p = fundamental(&q, c(lam), z, false).unwrap();
            let r = rk4_reference(&q, c(lam), z, 1e-5);
            let d = (p.y - r).norm_col_sum();
            assert!(d < 1e-10, "λ = {lam}, z = {z}: {d:e}");
        }
    }

    #[test]
    fn negative_z_runs_the_reflected_system() {
        let q = Potential::from_channels([
            Channel::zero(),
            Channel::cos(1, 1.0),
            Channel::sin(1, 0.2),
            Channel::combine(vec![(0.3, Channel::sin(2, 1.0))]),
        ]);
        let lam = c(1.3);
        let back = fundamental(&q, lam, -PI / 2.0, false).unwrap();
        let fwd = fundamental_at(&q, lam, &[PI / 2.0, PI], false).unwrap();
        // 𝕐(π/2) = 𝕐(-π/2)·𝕐(π)
        assert!((back.y * fwd[1].y - fwd[0].y).norm_col_sum() < 1e-9);
        let r = rk4_reference(&q, lam, -PI / 2.0, 1e-5);
        assert!((back.y - r).norm_col_sum() < 1e-9);
        // explicit reflection ẑ = -z, Q̂(ẑ) = -Q(-ẑ), λ̂ = -λ
        let reflected = Potential::from_channels([
            Channel::zero(),
            Channel::cos(1, -1.0),
            Channel::sin(1, 0.2),
            Channel::combine(vec![(0.3, Channel::sin(2, 1.0))]),
        ]);
        let r = fundamental(&reflected, -lam, PI / 2.0, false).unwrap();
        assert!((back.y - r.y).norm_col_sum() < 1e-11);
    }

    #[test]
    fn derivative_matches_central_differences() {
        let q = Potential::single(1, Channel::cos(2, 1.0));
        let lam = 2.3;
        let h = 1e-5;
        let p = fundamental(&q, c(lam), PI, true).unwrap();
        let plus = fundamental(&q, c(lam + h), PI, false).unwrap().y;
        let minus = fundamental(&q, c(lam - h), PI, false).unwrap().y;
        let fd = (plus - minus) * (0.5 / h);
        let d = p.dy_dlambda.unwrap();
        assert!((d - fd).norm_col_sum() / d.norm_col_sum() < 1e-6);
        let pc = Potential::single(1, Channel::piecewise_constant(vec![0.0, 1.0], vec![1.0, -0.5]).unwrap());
        let p = fundamental(&pc, c(lam), PI, true).unwrap();
        let plus = fundamental(&pc, c(lam + h), PI, false).unwrap().y;
        let minus = fundamental(&pc, c(lam - h), PI, false).unwrap().y;
        let fd = (plus - minus) * (0.5 / h);
        let d = p.dy_dlambda.unwrap();
        assert!((d - fd).norm_col_sum() / d.norm_col_sum() < 1e-6);
    }

    #[test]
    fn overflow_is_reported() {
        let err = fundamental(&Potential::zero(), C64::new(0.0, 300.0), PI, false).unwrap_err();
        assert!(matches!(err, PropagationError::Overflow { .. }));
        let err = fundamental(&Potential::zero(), c(f64::NAN), PI, false).unwrap_err();
        assert!(matches!(err, PropagationError::NonFinite { .. }));
    }
}
