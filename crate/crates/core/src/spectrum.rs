//! Real-axis spectral analysis: discriminant scans, boundary-value eigenvalues,
//! double-zero classification and instability intervals.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floquet::{Stability, BOUNDARY_TOLERANCE};
use crate::gauge::GaugeData;
use crate::pauli::C64;
use crate::potential::Potential;
use crate::propagator::{fundamental, PropagationError};

/// Default scan density, points per unit of λ.
pub const POINTS_PER_UNIT: f64 = 200.0;
/// Default tolerance on gap lengths for double-zero classification.
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-6;
/// Largest imaginary part of the reduced discriminant a scan accepts.
pub const SCAN_LINE_TOLERANCE: f64 = 1e-6;
/// Residual bound for a tangential touch.
pub const DOUBLE_RESIDUAL: f64 = 1e-8;
/// Slope bound for a tangential touch.
pub const DOUBLE_SLOPE: f64 = 1e-6;

const EXTREMUM_WINDOW: f64 = 0.1;
const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("invalid window [{lo}, {hi}] with {n} points (need lo < hi and n ≥ 2)")]
    InvalidWindow { lo: f64, hi: f64, n: usize },
    #[error("reduced discriminant leaves the real line at λ = {lambda} (Im = {imag:.3e})")]
    OffLine { lambda: f64, imag: f64 },
    #[error("unresolved zero cluster in [{lo}, {hi}]; rerun with a denser grid")]
    Cluster { lo: f64, hi: f64 },
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

/// Reduced discriminant `δ = e^{i·phase}Δ` and `dδ/dλ` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScan {
    pub potential: Potential,
    pub phase: f64,
    pub lambdas: Vec<f64>,
    /// Raw `Δ(λ)`.
    pub delta: Vec<C64>,
    pub delta_reduced: Vec<f64>,
    pub derivative: Vec<f64>,
    pub stability: Vec<Stability>,
    pub grid_step: f64,
}

impl SpectralScan {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lambdas[0], *self.lambdas.last().unwrap())
    }

    /// `(δ, dδ/dλ)` at an arbitrary λ, for refinement.
    pub fn evaluate(&self, lambda: f64) -> Result<(f64, f64), SpectrumError> {
        reduced(&self.potential, self.phase, lambda)
    }
}

/// Classification from a real reduced discriminant.
pub fn classify(delta: f64) -> Stability {
    if (delta - 2.0).abs() <= BOUNDARY_TOLERANCE || (delta + 2.0).abs() <= BOUNDARY_TOLERANCE {
        Stability::Boundary
    } else if delta.abs() < 2.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// Uniform grid of `n` points on `[lo, hi]`, hitting both ends exactly.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + k as f64 * h })
        .collect()
}

/// Number of points giving the default density on `[lo, hi]`.
pub fn default_points(lo: f64, hi: f64) -> usize {
    ((hi - lo) * POINTS_PER_UNIT).ceil() as usize + 1
}

fn reduced(q: &Potential, phase: f64, lambda: f64) -> Result<(f64, f64), SpectrumError> {
    let p = fundamental(q, C64::new(lambda, 0.0), PI, true)?;
    let u = C64::new(0.0, phase).exp();
    let d = u * p.y.trace();
    let dd = u * p.dy_dlambda.expect("derivative requested").trace();
    Ok((d.re, dd.re))
}

fn check_window(lo: f64, hi: f64, n: usize) -> Result<(), SpectrumError> {
    if !(lo < hi) || n < 2 || !lo.is_finite() || !hi.is_finite() {
        return Err(SpectrumError::InvalidWindow { lo, hi, n });
    }
    Ok(())
}

pub fn scan(q: &Potential, lo: f64, hi: f64, n: usize) -> Result<SpectralScan, SpectrumError> {
    scan_with(q, lo, hi, n, false)
}

pub fn scan_parallel(q: &Potential, lo: f64, hi: f64, n: usize) -> Result<SpectralScan, SpectrumError> {
    scan_with(q, lo, hi, n, true)
}

pub fn scan_with(
    q: &Potential,
    lo: f64,
    hi: f64,
    n: usize,
    parallel: bool,
) -> Result<SpectralScan, SpectrumError> {
    check_window(lo, hi, n)?;
    let phase = GaugeData::new(q).phase;
    let u = C64::new(0.0, phase).exp();
    let lambdas = grid(lo, hi, n);
    let eval = |&lambda: &f64| -> Result<(C64, C64), SpectrumError> {
        let p = fundamental(q, C64::new(lambda, 0.0), PI, true)?;
        Ok((p.y.trace(), p.dy_dlambda.expect("derivative requested").trace()))
    };
    let raw: Vec<(C64, C64)> = if parallel {
        lambdas.par_iter().map(eval).collect::<Result<_, _>>()?
    } else {
        lambdas.iter().map(eval).collect::<Result<_, _>>()?
    };
    let mut delta = Vec::with_capacity(n);
    let mut delta_reduced = Vec::with_capacity(n);
    let mut derivative = Vec::with_capacity(n);
    let mut stability = Vec::with_capacity(n);
    for (&lambda, (d, dd)) in lambdas.iter().zip(raw) {
        let r = u * d;
        if r.im.abs() > SCAN_LINE_TOLERANCE {
            return Err(SpectrumError::OffLine { lambda, imag: r.im });
        }
        delta.push(d);
        delta_reduced.push(r.re);
        derivative.push((u * dd).re);
        stability.push(classify(r.re));
    }
    Ok(SpectralScan {
        potential: q.clone(),
        phase,
        lambdas,
        delta,
        delta_reduced,
        derivative,
        stability,
        grid_step: (hi - lo) / (n - 1) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// `δ = +2`, periodic eigenvalues.
    #[serde(rename = "plus2")]
    Plus2,
    /// `δ = -2`, antiperiodic eigenvalues.
    #[serde(rename = "minus2")]
    Minus2,
}

impl Target {
    pub fn value(self) -> f64 {
        match self {
            Target::Plus2 => 2.0,
            Target::Minus2 => -2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    Simple,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub lambda: f64,
    pub target: Target,
    pub multiplicity: Multiplicity,
    /// `|δ(λ*) ∓ 2|`.
    pub residual: f64,
    /// `dδ/dλ` at `λ*`.
    pub slope: f64,
    /// Crossings bracketing a numerically closed gap, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_gap: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    pub length: f64,
    /// `Plus2` where `δ > 2`, `Minus2` where `δ < -2`.
    pub side: Target,
    /// The interval reaches the edge of the scanned window.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub window: (f64, f64),
    pub zeros: Vec<Zero>,
    pub gaps: Vec<Gap>,
    pub tolerance: f64,
}

impl GapReport {
    /// Gaps of length at least the tolerance.
    pub fn open_gaps(&self) -> Vec<Gap> {
        self.gaps
            .iter()
            .copied()
            .filter(|g| g.length >= self.tolerance)
            .collect()
    }

    /// Longest gap on one side (0 when there is none).
    pub fn max_gap(&self, side: Target) -> f64 {
        self.gaps
            .iter()
            .filter(|g| g.side == side)
            .map(|g| g.length)
            .fold(0.0, f64::max)
    }

    pub fn zeros_of(&self, target: Target) -> impl Iterator<Item = &Zero> {
        self.zeros.iter().filter(move |z| z.target == target)
    }

    /// True when every zero of `δ ∓ 2` (per `target`) in the window is double.
    pub fn all_double(&self, target: Target) -> bool {
        self.zeros_of(target).all(|z| z.multiplicity == Multiplicity::Double)
    }
}

/// Samples of a real function and its derivative on a grid.
struct Samples<'a> {
    x: &'a [f64],
    f: Vec<f64>,
    g: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    x: f64,
    f: f64,
    g: f64,
}

/// Bracketed Newton for a sign change of `f` on `[a, b]`.
fn crossing<E>(eval: &E, mut a: Point, mut b: Point) -> Result<Point, SpectrumError>
where
    E: Fn(f64) -> Result<(f64, f64), SpectrumError>,
{
    let mut x = a.x - a.f * (b.x - a.x) / (b.f - a.f);
    if !(x > a.x && x < b.x) {
        x = 0.5 * (a.x + b.x);
    }
    let mut best = if a.f.abs() < b.f.abs() { a } else { b };
    for _ in 0..MAX_ITERATIONS {
        let (f, g) = eval(x)?;
        let p = Point { x, f, g };
        if f.abs() < best.f.abs() {
            best = p;
        }
        if f == 0.0 || f.abs() < 1e-13 || b.x - a.x < 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
        if (a.f < 0.0) == (f < 0.0) {
            a = p;
        } else {
            b = p;
        }
        let newton = x - f / g;
        x = if g != 0.0 && newton > a.x && newton < b.x {
            newton
        } else {
            0.5 * (a.x + b.x)
        };
    }
    Ok(best)
}

/// Zero of `g = f'` on `[a, b]` by the Illinois variant of regula falsi.
fn extremum<E>(eval: &E, mut a: Point, mut b: Point) -> Result<Point, SpectrumError>
where
    E: Fn(f64) -> Result<(f64, f64), SpectrumError>,
{
    if a.g == 0.0 {
        return Ok(a);
    }
    if b.g == 0.0 {
        return Ok(b);
    }
    let (mut ga, mut gb) = (a.g, b.g);
    let mut side = 0i8;
    let mut best = if a.g.abs() < b.g.abs() { a } else { b };
    for _ in 0..MAX_ITERATIONS {
        if b.x - a.x < 1e-13 * a.x.abs().max(1.0) {
            break;
        }
        let mut x = b.x - gb * (b.x - a.x) / (gb - ga);
        if !(x > a.x && x < b.x) {
            x = 0.5 * (a.x + b.x);
        }
        let (f, g) = eval(x)?;
        let p = Point { x, f, g };
        if g.abs() <= best.g.abs() {
            best = p;
        }
        if g == 0.0 {
            break;
        }
        if (g < 0.0) == (ga < 0.0) {
            a = p;
            ga = g;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = p;
            gb = g;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    // the extremum value is what matters; take the point with the smallest slope
    Ok(best)
}

/// Hermite cubic through two samples, checked for a hidden sign change.
fn hermite_hides_zero(a: Point, b: Point) -> bool {
    let h = b.x - a.x;
    (1..16).any(|k| {
        let t = k as f64 / 16.0;
        let (t2, t3) = (t * t, t * t * t);
        let p = (2.0 * t3 - 3.0 * t2 + 1.0) * a.f
            + (t3 - 2.0 * t2 + t) * h * a.g
            + (-2.0 * t3 + 3.0 * t2) * b.f
            + (t3 - t2) * h * b.g;
        (p < 0.0) != (a.f < 0.0) && p != 0.0
    })
}

#[derive(Debug, Clone, Copy)]
struct RawZero {
    x: f64,
    f: f64,
    g: f64,
    multiplicity: Multiplicity,
    closed_gap: Option<(f64, f64)>,
}

/// All zeros of the sampled function with double-zero classification.
/// Returns the zeros and every simple crossing (including those bracketing
/// closed gaps).
fn find_zeros<E>(s: &Samples, eval: &E, tol: f64) -> Result<(Vec<RawZero>, Vec<f64>), SpectrumError>
where
    E: Fn(f64) -> Result<(f64, f64), SpectrumError>,
{
    let n = s.x.len();
    let pt = |k: usize| Point {
        x: s.x[k],
        f: s.f[k],
        g: s.g[k],
    };
    let mut extrema: Vec<Point> = Vec::new();
    let mut crossings: Vec<Point> = Vec::new();
    for k in 0..n - 1 {
        let (a, b) = (pt(k), pt(k + 1));
        let has_ext = a.g * b.g <= 0.0 && !(a.g == 0.0 && b.g == 0.0);
        let near = a.f.abs().min(b.f.abs()) < EXTREMUM_WINDOW;
        let mut pieces = vec![a];
        if has_ext && near {
            let e = extremum(eval, a, b)?;
            if e.x > a.x && e.x < b.x {
                pieces.push(e);
            }
            extrema.push(e);
        } else if !has_ext && a.f * b.f > 0.0 && near && hermite_hides_zero(a, b) {
            return Err(SpectrumError::Cluster { lo: a.x, hi: b.x });
        }
        pieces.push(b);
        for w in pieces.windows(2) {
            if w[0].f * w[1].f < 0.0 {
                crossings.push(crossing(eval, w[0], w[1])?);
            }
        }
    }
    for k in 0..n {
        // zeros sitting exactly on a node
        let p = pt(k);
        if p.f == 0.0 && p.g.abs() >= DOUBLE_SLOPE {
            crossings.push(p);
        }
    }
    crossings.sort_by(|a, b| a.x.total_cmp(&b.x));
    crossings.dedup_by(|a, b| (a.x - b.x).abs() < 1e-12);
    extrema.sort_by(|a, b| a.x.total_cmp(&b.x));
    extrema.dedup_by(|a, b| (a.x - b.x).abs() < 1e-9);

    let mut consumed = vec![false; crossings.len()];
    let mut zeros = Vec::new();
    for e in &extrema {
        if e.f.abs() >= DOUBLE_RESIDUAL || e.g.abs() >= DOUBLE_SLOPE {
            continue;
        }
        let near: Vec<usize> = (0..crossings.len())
            .filter(|&i| !consumed[i] && (crossings[i].x - e.x).abs() < tol)
            .collect();
        let span = match (near.first(), near.last()) {
            (Some(&i), Some(&j)) => (crossings[i].x, crossings[j].x),
            _ => (e.x, e.x),
        };
        if span.1 - span.0 >= tol {
            continue;
        }
        if !near.is_empty() {
            // roundoff can add stray crossings at a touch; a touch leaves
            // the same sign on both sides
            let left = eval(e.x - tol)?.0;
            let right = eval(e.x + tol)?.0;
            if (left < 0.0) != (right < 0.0) {
                continue;
            }
        }
        for &i in &near {
            consumed[i] = true;
        }
        zeros.push(RawZero {
            x: e.x,
            f: e.f,
            g: e.g,
            multiplicity: Multiplicity::Double,
            closed_gap: (near.len() >= 2).then_some(span),
        });
    }
    for (i, c) in crossings.iter().enumerate() {
        if !consumed[i] {
            zeros.push(RawZero {
                x: c.x,
                f: c.f,
                g: c.g,
                multiplicity: Multiplicity::Simple,
                closed_gap: None,
            });
        }
    }
    // touches exactly at the window edges cannot be bracketed
    for k in [0, n - 1] {
        let p = pt(k);
        if p.f.abs() < DOUBLE_RESIDUAL
            && p.g.abs() < DOUBLE_SLOPE
            && !zeros.iter().any(|z| (z.x - p.x).abs() < tol)
        {
            zeros.push(RawZero {
                x: p.x,
                f: p.f,
                g: p.g,
                multiplicity: Multiplicity::Double,
                closed_gap: None,
            });
        }
    }
    zeros.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok((zeros, crossings.iter().map(|c| c.x).collect()))
}

fn target_zeros(
    scan: &SpectralScan,
    target: Target,
    tol: f64,
) -> Result<(Vec<Zero>, Vec<f64>), SpectrumError> {
    let t = target.value();
    let samples = Samples {
        x: &scan.lambdas,
        f: scan.delta_reduced.iter().map(|d| d - t).collect(),
        g: scan.derivative.clone(),
    };
    let eval = |x: f64| scan.evaluate(x).map(|(d, dd)| (d - t, dd));
    let (raw, crossings) = find_zeros(&samples, &eval, tol)?;
    let zeros = raw
        .into_iter()
        .map(|r| Zero {
            lambda: r.x,
            target,
            multiplicity: r.multiplicity,
            residual: r.f.abs(),
            slope: r.g,
            closed_gap: r.closed_gap,
        })
        .collect();
    Ok((zeros, crossings))
}

/// Maximal intervals of the window where `|δ| > 2`, with every zero of `δ ∓ 2`.
pub fn instability_intervals(scan: &SpectralScan, tol: f64) -> Result<GapReport, SpectrumError> {
    let (mut zeros, mut bounds) = target_zeros(scan, Target::Plus2, tol)?;
    let (z2, b2) = target_zeros(scan, Target::Minus2, tol)?;
    zeros.extend(z2);
    bounds.extend(b2);
    zeros.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    bounds.sort_by(|a, b| a.total_cmp(b));

    let (lo, hi) = scan.window();
    let mut edges = vec![lo];
    edges.extend(bounds.iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    let mut gaps: Vec<Gap> = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let d = representative(scan, a, b)?;
        if d.abs() > 2.0 {
            let truncated = a == lo || b == hi;
            let side = if d > 0.0 { Target::Plus2 } else { Target::Minus2 };
            match gaps.last_mut() {
                // adjacent pieces split by a spurious boundary merge
                Some(g) if g.hi == a && g.side == side => {
                    g.hi = b;
                    g.length = b - g.lo;
                    g.truncated |= truncated;
                }
                _ => gaps.push(Gap {
                    lo: a,
                    hi: b,
                    length: b - a,
                    side,
                    truncated,
                }),
            }
        }
    }
    Ok(GapReport {
        window: (lo, hi),
        zeros,
        gaps,
        tolerance: tol,
    })
}

/// `δ` at a point inside `(a, b)`: the scan node closest to the middle, or a
/// fresh evaluation when the interval holds no node.
fn representative(scan: &SpectralScan, a: f64, b: f64) -> Result<f64, SpectrumError> {
    let mid = 0.5 * (a + b);
    let start = scan.lambdas.partition_point(|&x| x <= a);
    let end = scan.lambdas.partition_point(|&x| x < b);
    if start < end {
        let k = (start..end)
            .min_by(|&i, &j| {
                (scan.lambdas[i] - mid)
                    .abs()
                    .total_cmp(&(scan.lambdas[j] - mid).abs())
            })
            .unwrap();
        return Ok(scan.delta_reduced[k]);
    }
    Ok(scan.evaluate(mid)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// `Y(0) = Y(π)`.
    BC1,
    /// `Y(0) = -Y(π)`.
    BC2,
    /// `y₁(0) = y₁(π) = 0`.
    BC3,
    /// `y₂(0) = y₂(π) = 0`.
    BC4,
}

/// Eigenvalues in `[lo, hi]` for one of the four boundary conditions, using the
/// default scan density. Double zeros are reported once.
pub fn find_bc_eigenvalues(
    q: &Potential,
    bc: BoundaryCondition,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>, SpectrumError> {
    Ok(bc_zeros(q, bc, lo, hi, default_points(lo, hi))?
        .into_iter()
        .map(|z| z.lambda)
        .collect())
}

/// Zeros with multiplicity for a boundary condition on an `n`-point grid.
pub fn bc_zeros(
    q: &Potential,
    bc: BoundaryCondition,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<Zero>, SpectrumError> {
    check_window(lo, hi, n)?;
    match bc {
        BoundaryCondition::BC1 | BoundaryCondition::BC2 => {
            let target = if bc == BoundaryCondition::BC1 {
                Target::Plus2
            } else {
                Target::Minus2
            };
            let s = scan(q, lo, hi, n)?;
            Ok(target_zeros(&s, target, DEFAULT_GAP_TOLERANCE)?.0)
        }
        BoundaryCondition::BC3 | BoundaryCondition::BC4 => {
            let (i, j) = if bc == BoundaryCondition::BC3 { (0, 1) } else { (1, 0) };
            let u = C64::new(0.0, GaugeData::new(q).phase).exp();
            let eval = |x: f64| -> Result<(f64, f64), SpectrumError> {
                let p = fundamental(q, C64::new(x, 0.0), PI, true)?;
                let d = p.dy_dlambda.expect("derivative requested");
                Ok(((u * p.y[(i, j)]).re, (u * d[(i, j)]).re))
            };
            let x = grid(lo, hi, n);
            let mut f = Vec::with_capacity(n);
            let mut g = Vec::with_capacity(n);
            for &xi in &x {
                let (a, b) = eval(xi)?;
                f.push(a);
                g.push(b);
            }
            let samples = Samples { x: &x, f, g };
            let (raw, _) = find_zeros(&samples, &eval, DEFAULT_GAP_TOLERANCE)?;
            Ok(raw
                .into_iter()
                .map(|r| Zero {
                    lambda: r.x,
                    target: Target::Plus2,
                    multiplicity: r.multiplicity,
                    residual: r.f.abs(),
                    slope: r.g,
                    closed_gap: r.closed_gap,
                })
                .collect())
        }
    }
}
