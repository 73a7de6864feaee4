#![allow(dead_code)]

use std::f64::consts::PI;

use dirac_floquet::gauge::half_period_breaking_transform;
use dirac_floquet::pauli::{Mat2, C64};
use dirac_floquet::potential::{Channel, Potential};

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn sigma1() -> Potential {
    Potential::constant([0.0, 1.0, 0.0, 0.0])
}

/// `cos(2kz)·σ1`.
pub fn cos_sigma1(k: usize) -> Potential {
    Potential::single(1, Channel::cos(k, 1.0))
}

pub fn canonical_potentials() -> Vec<(&'static str, Potential)> {
    vec![
        ("zero", Potential::zero()),
        ("sigma1", sigma1()),
        ("cos2z sigma1", cos_sigma1(1)),
        ("cos4z sigma1", cos_sigma1(2)),
        (
            "trig sigma1/sigma3",
            Potential::from_channels([
                Channel::zero(),
                Channel::trig(vec![0.2, 0.7], vec![0.0, -0.4, 0.3]).unwrap(),
                Channel::zero(),
                Channel::trig(vec![-0.5], vec![0.0, 0.9]).unwrap(),
            ]),
        ),
        (
            "steps sigma1/sigma3",
            Potential::from_channels([
                Channel::zero(),
                Channel::piecewise_constant(vec![0.0, 0.8, 2.1], vec![1.5, -0.5, 0.25]).unwrap(),
                Channel::zero(),
                Channel::piecewise_constant(vec![0.0, 1.9], vec![-1.0, 0.6]).unwrap(),
            ]),
        ),
        (
            "grid sigma1",
            Potential::single(
                1,
                Channel::grid(&(0..64).map(|k| (2.0 * k as f64 * PI / 64.0).sin() + 0.3).collect::<Vec<_>>())
                    .unwrap(),
            ),
        ),
    ]
}

/// Canonical plus non-canonical potentials.
pub fn all_potentials() -> Vec<(&'static str, Potential)> {
    let mut v = canonical_potentials();
    v.push(("sigma0 + sigma1", Potential::constant([1.0, 1.0, 0.0, 0.0])));
    v.push((
        "sigma1 + sin2z sigma2",
        Potential::from_channels([Channel::zero(), Channel::constant(1.0), Channel::sin(1, 1.0), Channel::zero()]),
    ));
    v.push((
        "trig all channels",
        Potential::from_channels([
            Channel::trig(vec![0.4, 0.8], vec![]).unwrap(),
            Channel::sin(2, 0.5),
            Channel::trig(vec![-0.3], vec![0.0, 0.6]).unwrap(),
            Channel::cos(1, 0.7),
        ]),
    ));
    v.push(("gauge-broken cos4z sigma1", gauge_broken()));
    v
}

pub fn named(name: &str) -> Potential {
    all_potentials()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, q)| q)
        .unwrap_or_else(|| panic!("no test potential named {name}"))
}

/// The π/2-periodicity-breaking gauge applied to `cos(4z)σ1`.
pub fn gauge_broken() -> Potential {
    half_period_breaking_transform(&cos_sigma1(2)).unwrap()
}

/// Classical RK4 on `𝕐' = (-λJ + JQ)𝕐` with a fixed step, independent of the
/// library's exponential integrator.
pub fn rk4(q: &Potential, lambda: C64, z: f64, h: f64) -> Mat2 {
    let n = (z.abs() / h).ceil() as usize;
    let h = z / n as f64;
    let a = |t: f64| Mat2::J * (q.eval(t) - Mat2::IDENTITY * lambda);
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

/// Reduced discriminant of `Q = σ1`: `A² = (1 - λ²)I`.
pub fn sigma1_delta(l: f64) -> f64 {
    let w = 1.0 - l * l;
    if w >= 0.0 {
        2.0 * (PI * w.sqrt()).cosh()
    } else {
        2.0 * (PI * (-w).sqrt()).cos()
    }
}
