//! π-periodic Hermitian potentials `Q = Σ cᵢ·σᵢ` with real channels.
//!
//! With `q₁ = c0 + c3`, `q₂ = c0 - c3` and `q = c1 + i·c2` the matrix is
//! `[[q₁, q], [q*, q₂]]`, so real channels are exactly Hermiticity of `Q`.
//!
//! A potential may carry a J-rotation angle `θ(z)` acting on its σ1/σ3 part:
//! `Q = c0·σ0 + c2·σ2 + e^{θJ}(c1·σ1 + c3·σ3)`. Gauge reductions produce
//! such potentials in closed form.

mod channel;
mod io;

use std::f64::consts::PI;

pub use channel::{Channel, Piecewise, TrigPoly};
pub use io::{ChannelFile, PotentialFile, PotentialKind, PotentialParseError};

use crate::pauli::{Mat2, C64};

pub(crate) use channel::wrap;

/// Finest quadrature cell used by the symmetry defects.
const QUADRATURE_CELL: f64 = PI / 4096.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    channels: [Channel; 4],
    rotation: Option<Channel>,
}

impl Default for Potential {
    fn default() -> Self {
        Self::zero()
    }
}

impl Potential {
    pub fn zero() -> Self {
        Self::constant([0.0; 4])
    }

    /// Constant potential `Σ cᵢσᵢ`.
    pub fn constant(c: [f64; 4]) -> Self {
        Self::from_channels(c.map(Channel::constant))
    }

    pub fn from_channels(channels: [Channel; 4]) -> Self {
        Potential {
            channels,
            rotation: None,
        }
    }

    /// Single non-zero channel.
    pub fn single(index: usize, c: Channel) -> Self {
        let mut ch: [Channel; 4] = std::array::from_fn(|_| Channel::zero());
        ch[index] = c;
        Self::from_channels(ch)
    }

    /// Applies an additional J-rotation `e^{θ(z)J}` to the σ1/σ3 part.
    pub fn rotated(mut self, angle: Channel) -> Self {
        self.rotation = Some(match self.rotation.take() {
            None => angle,
            Some(prev) => Channel::combine(vec![(1.0, prev), (1.0, angle)]),
        });
        self
    }

    /// Base channel `i`, before any rotation.
    pub fn channel(&self, i: usize) -> &Channel {
        &self.channels[i]
    }

    pub fn rotation(&self) -> Option<&Channel> {
        self.rotation.as_ref()
    }

    /// Effective Pauli coefficients `(c0, c1, c2, c3)` at `z`.
    pub fn coefficients(&self, z: f64) -> [f64; 4] {
        let c0 = self.channels[0].eval(z);
        let c2 = self.channels[2].eval(z);
        let (mut c1, mut c3) = (self.channels[1].eval(z), self.channels[3].eval(z));
        if let Some(theta) = &self.rotation {
            let (s, c) = theta.eval(z).sin_cos();
            (c1, c3) = (c1 * c - c3 * s, c3 * c + c1 * s);
        }
        [c0, c1, c2, c3]
    }

    /// `Q(z mod π)`.
    pub fn eval(&self, z: f64) -> Mat2 {
        coefficients_to_matrix(self.coefficients(z))
    }

    /// Sorted points in `[0, π)` where some channel may be non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .channels
            .iter()
            .chain(self.rotation.iter())
            .flat_map(|c| c.breakpoints())
            .collect();
        sort_dedup(&mut b);
        b
    }

    /// True when every channel is a step function and there is no varying rotation,
    /// so the generator is constant between breakpoints.
    pub fn is_piecewise_constant(&self) -> bool {
        self.channels.iter().all(Channel::is_piecewise_constant)
            && self.rotation.as_ref().is_none_or(Channel::is_piecewise_constant)
    }

    /// `∫₀^π c2 dt = ∫₀^π Im q dt`.
    pub fn im_q_integral(&self) -> f64 {
        PI * self.channels[2].mean()
    }

    /// `∫₀^π |Q| dt` with the entrywise-max norm.
    pub fn l1_norm(&self) -> f64 {
        self.integrate(|z| coefficients_max_entry(self.coefficients(z)))
    }

    /// Default tolerance for the almost-everywhere symmetry predicates.
    pub fn default_tolerance(&self) -> f64 {
        1e-8 * (1.0 + self.l1_norm())
    }

    /// Splits `Q = Q₁ + Q₂` with `Q₁J = -JQ₁` (σ1, σ3) and `Q₂J = JQ₂` (σ0, σ2).
    pub fn j_decompose(&self) -> JDecomposition {
        let z = Channel::zero;
        let q1 = Potential {
            channels: [z(), self.channels[1].clone(), z(), self.channels[3].clone()],
            rotation: self.rotation.clone(),
        };
        let q2 = Potential::from_channels([
            self.channels[0].clone(),
            z(),
            self.channels[2].clone(),
            z(),
        ]);
        JDecomposition { q1, q2 }
    }

    /// `Q₂ ≡ 0` up to `tol` in L¹.
    pub fn is_canonical(&self, tol: f64) -> bool {
        self.j_decompose().q2.l1_norm() < tol
    }

    /// `∫₀^π |Q(z + π/2) - Q(z)| dz`.
    pub fn half_periodic_defect(&self) -> f64 {
        self.shift_defect(|a, b| [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
    }

    /// `∫₀^π |Q(z + π/2) + Q(z)| dz`.
    pub fn half_antiperiodic_defect(&self) -> f64 {
        self.shift_defect(|a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }

    /// `∫₀^π |Q(z + π/2) - σ2·Q(z)·σ2| dz`, using `σ2(Σcᵢσᵢ)σ2 = c0σ0 - c1σ1 + c2σ2 - c3σ3`.
    pub fn sigma2_similarity_defect(&self) -> f64 {
        self.shift_defect(|a, b| [a[0] - b[0], a[1] + b[1], a[2] - b[2], a[3] + b[3]])
    }

    pub fn is_half_periodic(&self, tol: f64) -> bool {
        self.half_periodic_defect() < tol
    }

    pub fn is_half_antiperiodic(&self, tol: f64) -> bool {
        self.half_antiperiodic_defect() < tol
    }

    pub fn is_sigma2_similar(&self, tol: f64) -> bool {
        self.sigma2_similarity_defect() < tol
    }

    /// Samples the effective channels on `n` uniform nodes as a grid potential.
    pub fn sampled(&self, n: usize) -> Potential {
        let h = PI / n as f64;
        let rows: Vec<[f64; 4]> = (0..n).map(|k| self.coefficients(k as f64 * h)).collect();
        let channels = std::array::from_fn(|i| {
            let s: Vec<f64> = rows.iter().map(|r| r[i]).collect();
            Channel::grid(&s).expect("non-empty grid")
        });
        Potential::from_channels(channels)
    }

    fn shift_defect(&self, combine: impl Fn([f64; 4], [f64; 4]) -> [f64; 4]) -> f64 {
        let half = PI / 2.0;
        self.integrate_with_shift(|z| {
            let d = combine(self.coefficients(z + half), self.coefficients(z));
            coefficients_max_entry(d)
        })
    }

    fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let nodes = quadrature_nodes(&self.breakpoints());
        midpoint(&nodes, f)
    }

    fn integrate_with_shift(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut b = self.breakpoints();
        let shifted: Vec<f64> = b.iter().map(|x| wrap(x - PI / 2.0)).collect();
        b.extend(shifted);
        sort_dedup(&mut b);
        midpoint(&quadrature_nodes(&b), f)
    }
}

/// J-decomposition of a potential.
#[derive(Debug, Clone, PartialEq)]
pub struct JDecomposition {
    /// σ1/σ3 part, anti-commuting with J.
    pub q1: Potential,
    /// σ0/σ2 part, commuting with J.
    pub q2: Potential,
}

pub(crate) fn coefficients_to_matrix([c0, c1, c2, c3]: [f64; 4]) -> Mat2 {
    Mat2::new(
        C64::new(c0 + c3, 0.0),
        C64::new(c1, c2),
        C64::new(c1, -c2),
        C64::new(c0 - c3, 0.0),
    )
}

fn coefficients_max_entry([c0, c1, c2, c3]: [f64; 4]) -> f64 {
    (c0 + c3).abs().max((c0 - c3).abs()).max(c1.hypot(c2))
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
}

/// Nodes of `[0, π]` containing every breakpoint, refined so no cell exceeds
/// the quadrature cell size.
fn quadrature_nodes(breaks: &[f64]) -> Vec<f64> {
    let mut marks: Vec<f64> = std::iter::once(0.0)
        .chain(breaks.iter().copied())
        .chain(std::iter::once(PI))
        .collect();
    sort_dedup(&mut marks);
    let mut nodes = vec![0.0];
    for w in marks.windows(2) {
        let n = ((w[1] - w[0]) / QUADRATURE_CELL).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n as f64;
        nodes.extend((1..=n).map(|k| if k == n { w[1] } else { w[0] + k as f64 * h }));
    }
    nodes
}

fn midpoint(nodes: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    nodes
        .windows(2)
        .map(|w| (w[1] - w[0]) * f(0.5 * (w[0] + w[1])))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::SIGMA;

    fn cos_sigma1(k: usize) -> Potential {
        Potential::single(1, Channel::cos(k, 1.0))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Potential::zero().eval(1.3), Mat2::ZERO);
        assert_eq!(Potential::constant([0.0, 1.0, 0.0, 0.0]).eval(0.0), SIGMA[1]);
        let n = 64;
        let s: Vec<f64> = (0..n).map(|k| (2.0 * k as f64 * PI / n as f64).sin()).collect();
        let q = Potential::single(2, Channel::grid(&s).unwrap());
        assert!((q.eval(PI / 4.0) - SIGMA[2]).max_abs() < 1e-15);
    }

    #[test]
    fn j_decompose_examples() {
        // q₁ = 1, q₂ = 3, q = 2 + i  →  c0 = 2, c1 = 2, c2 = 1, c3 = -1
        let q = Potential::constant([2.0, 2.0, 1.0, -1.0]);
        assert_eq!(
            q.eval(0.0),
            Mat2::new(C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(2.0, -1.0), C64::new(3.0, 0.0))
        );
        let d = q.j_decompose();
        assert_eq!(d.q1.eval(0.3), SIGMA[1] * 2.0 - SIGMA[3]);
        assert_eq!(d.q2.eval(0.3), SIGMA[0] * 2.0 + SIGMA[2]);

        let d = Potential::constant([0.0, 1.0, 0.0, 0.0]).j_decompose();
        assert_eq!(d.q1.eval(0.0), SIGMA[1]);
        assert_eq!(d.q2.eval(0.0), Mat2::ZERO);

        let d = Potential::constant([1.0, 0.0, 1.0, 0.0]).j_decompose();
        assert_eq!(d.q1.eval(0.0), Mat2::ZERO);
        assert_eq!(d.q2.eval(0.0), SIGMA[0] + SIGMA[2]);
    }

    #[test]
    fn j_parts_commute_as_expected() {
        let q = Potential::from_channels([
            Channel::sin(1, 0.4),
            Channel::cos(2, 1.0),
            Channel::constant(0.3),
            Channel::piecewise_constant(vec![0.0, 1.0], vec![1.0, -1.0]).unwrap(),
        ])
        .rotated(Channel::cos(1, 0.7));
        let d = q.j_decompose();
        for k in 0..50 {
            let z = k as f64 * 0.137;
            let (a, b) = (d.q1.eval(z), d.q2.eval(z));
            assert!((a * Mat2::J + Mat2::J * a).max_abs() < 1e-15);
            assert!((b * Mat2::J - Mat2::J * b).max_abs() < 1e-15);
            assert!((a + b - q.eval(z)).max_abs() < 1e-15);
            assert!(q.eval(z).is_hermitian(1e-14));
        }
    }

    #[test]
    fn half_periodicity_examples() {
        let tol = 1e-8;
        assert!(Potential::constant([1.0, 2.0, -1.0, 0.5]).is_half_periodic(tol));
        let q = cos_sigma1(1);
        assert!(!q.is_half_periodic(tol));
        assert!((q.half_periodic_defect() - 4.0).abs() < 1e-6);
        assert!(cos_sigma1(2).is_half_periodic(tol));
    }

    #[test]
    fn half_antiperiodicity_examples() {
        let tol = 1e-8;
        assert!(Potential::zero().is_half_antiperiodic(tol));
        assert!(cos_sigma1(1).is_half_antiperiodic(tol));
        let s1 = Potential::constant([0.0, 1.0, 0.0, 0.0]);
        assert!(!s1.is_half_antiperiodic(tol));
        assert!((s1.half_antiperiodic_defect() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sigma2_similarity_examples() {
        let tol = 1e-8;
        assert!(Potential::constant([1.0, 0.0, 0.0, 0.0]).is_sigma2_similar(tol));
        assert!(cos_sigma1(1).is_sigma2_similar(tol));
        assert!(!Potential::constant([0.0, 1.0, 0.0, 0.0]).is_sigma2_similar(tol));
    }

    #[test]
    fn sigma2_similarity_matches_j_parts() {
        let tol = 1e-8;
        let specs = vec![
            Potential::zero(),
            cos_sigma1(1),
            cos_sigma1(2),
            Potential::constant([1.0, 1.0, 0.0, 0.0]),
            Potential::from_channels([
                Channel::cos(2, 1.0),
                Channel::cos(1, 0.5),
                Channel::constant(0.2),
                Channel::sin(3, 1.0),
            ]),
            Potential::from_channels([
                Channel::cos(1, 1.0),
                Channel::cos(1, 0.5),
                Channel::zero(),
                Channel::zero(),
            ]),
            Potential::single(
                1,
                Channel::piecewise_constant(vec![0.0, PI / 2.0], vec![1.0, -1.0]).unwrap(),
            ),
        ];
        for q in specs {
            let d = q.j_decompose();
            assert_eq!(
                q.is_sigma2_similar(tol),
                d.q1.is_half_antiperiodic(tol) && d.q2.is_half_periodic(tol),
                "{q:?}"
            );
        }
    }

    #[test]
    fn piecewise_defect_is_exact() {
        // values 1 on [0, π/2), -1 on [π/2, π): anti-periodic, defect for periodicity 2π
        let q = Potential::single(
            1,
            Channel::piecewise_constant(vec![0.0, PI / 2.0], vec![1.0, -1.0]).unwrap(),
        );
        assert!(q.half_antiperiodic_defect() < 1e-15);
        assert!((q.half_periodic_defect() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rotation_is_applied_to_the_sigma1_sigma3_part() {
        let q = Potential::constant([0.0, 1.0, 0.0, 0.0]).rotated(Channel::constant(0.3));
        let r = Mat2::IDENTITY * 0.3f64.cos() + Mat2::J * 0.3f64.sin();
        assert!((q.eval(1.0) - r * SIGMA[1]).max_abs() < 1e-15);
    }

    #[test]
    fn canonical_detection() {
        assert!(cos_sigma1(1).is_canonical(1e-10));
        assert!(!Potential::constant([0.0, 1.0, 0.1, 0.0]).is_canonical(1e-10));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_potential() -> impl Strategy<Value = Potential> {
            (
                prop::collection::vec(-2.0..2.0f64, 4),
                prop::collection::vec(-2.0..2.0f64, 4),
                -1.0..1.0f64,
            )
                .prop_map(|(a, b, th)| {
                    Potential::from_channels([
                        Channel::trig(vec![a[0], b[0]], vec![0.0, a[1]]).unwrap(),
                        Channel::cos(1, a[2]),
                        Channel::piecewise_constant(vec![0.0, 1.0], vec![b[1], b[2]]).unwrap(),
                        Channel::grid(&[a[3], b[3], 0.5]).unwrap(),
                    ])
                    .rotated(Channel::sin(1, th))
                })
        }

        proptest! {
            #[test]
            fn hermitian_and_pi_periodic(q in arb_potential(), z in -10.0..10.0f64) {
                let a = q.eval(z);
                prop_assert!(a.is_hermitian(1e-14));
                prop_assert!((q.eval(z + PI) - a).max_abs() < 1e-12);
            }
        }
    }
}
