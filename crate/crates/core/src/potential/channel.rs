//! Real, π-periodic scalar functions used as Pauli channels of a potential.

use std::f64::consts::PI;

/// Reduces `z` into `[0, π)`.
pub(crate) fn wrap(z: f64) -> f64 {
    let r = z.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Piecewise polynomial on `[0, π)`, extended periodically.
///
/// Piece `i` covers `[knots[i], knots[i+1])` (the last one ends at π) and is
/// the polynomial `Σ polys[i][k]·(z - knots[i])^k`. Values are right-continuous
/// at the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    knots: Vec<f64>,
    polys: Vec<Vec<f64>>,
}

impl Piecewise {
    pub fn new(knots: Vec<f64>, polys: Vec<Vec<f64>>) -> Result<Self, String> {
        if knots.is_empty() {
            return Err("at least one piece is required".into());
        }
        if knots.len() != polys.len() {
            return Err(format!(
                "{} knots but {} pieces",
                knots.len(),
                polys.len()
            ));
        }
        if knots[0] != 0.0 {
            return Err(format!("first breakpoint must be 0, found {}", knots[0]));
        }
        for w in knots.windows(2) {
            if !(w[1] > w[0]) {
                return Err(format!("breakpoints must increase strictly ({} then {})", w[0], w[1]));
            }
        }
        let last = *knots.last().unwrap();
        if !(last < PI) || !last.is_finite() {
            return Err(format!("breakpoints must lie in [0, π), found {last}"));
        }
        if polys.iter().flatten().any(|c| !c.is_finite()) {
            return Err("non-finite coefficient".into());
        }
        Ok(Piecewise { knots, polys })
    }

    fn piece_len(&self, i: usize) -> f64 {
        let end = self.knots.get(i + 1).copied().unwrap_or(PI);
        end - self.knots[i]
    }

    fn eval(&self, z: f64) -> f64 {
        let z = wrap(z);
        let i = self.knots.partition_point(|&k| k <= z).max(1) - 1;
        horner(&self.polys[i], z - self.knots[i])
    }

    fn integral(&self) -> f64 {
        (0..self.knots.len())
            .map(|i| horner(&integrate_poly(&self.polys[i], 0.0), self.piece_len(i)))
            .sum()
    }

    fn mean_free_antiderivative(&self, mean: f64) -> Piecewise {
        let mut acc = 0.0;
        let mut polys = Vec::with_capacity(self.polys.len());
        for (i, p) in self.polys.iter().enumerate() {
            let mut shifted = p.clone();
            if shifted.is_empty() {
                shifted.push(0.0);
            }
            shifted[0] -= mean;
            let prim = integrate_poly(&shifted, acc);
            acc = horner(&prim, self.piece_len(i));
            polys.push(prim);
        }
        Piecewise {
            knots: self.knots.clone(),
            polys,
        }
    }

    fn is_constant_pieces(&self) -> bool {
        self.polys.iter().all(|p| p.iter().skip(1).all(|&c| c == 0.0))
    }
}

fn horner(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn integrate_poly(p: &[f64], constant: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(constant);
    out.extend(p.iter().enumerate().map(|(k, &c)| c / (k as f64 + 1.0)));
    out
}

/// `Σ cos[k]·cos(2kz) + sin[k]·sin(2kz)`; `cos[0]` is the mean and `sin[0]`
/// contributes nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self, String> {
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err("non-finite coefficient".into());
        }
        Ok(TrigPoly { cos, sin })
    }

    fn eval(&self, z: f64) -> f64 {
        let n = self.cos.len().max(self.sin.len());
        let mut acc = self.cos.first().copied().unwrap_or(0.0);
        for k in 1..n {
            let (s, c) = (2.0 * k as f64 * z).sin_cos();
            acc += self.cos.get(k).copied().unwrap_or(0.0) * c
                + self.sin.get(k).copied().unwrap_or(0.0) * s;
        }
        acc
    }

    fn mean_free_antiderivative(&self) -> TrigPoly {
        let n = self.cos.len().max(self.sin.len());
        let mut cos = vec![0.0; n.max(1)];
        let mut sin = vec![0.0; n.max(1)];
        for k in 1..n {
            let w = 2.0 * k as f64;
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k).copied().unwrap_or(0.0);
            sin[k] = a / w;
            cos[k] = -b / w;
            cos[0] += b / w;
        }
        TrigPoly { cos, sin }
    }
}

/// A real π-periodic channel function.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Piecewise(Piecewise),
    Trig(TrigPoly),
    /// Linear combination `Σ wᵢ·cᵢ`.
    Combination(Vec<(f64, Channel)>),
}

impl Channel {
    pub fn zero() -> Self {
        Channel::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Channel::Piecewise(Piecewise {
            knots: vec![0.0],
            polys: vec![vec![c]],
        })
    }

    /// Right-continuous step function with `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, String> {
        let polys = values.into_iter().map(|v| vec![v]).collect();
        Piecewise::new(breakpoints, polys).map(Channel::Piecewise)
    }

    /// Uniform samples at `kπ/N`, linearly interpolated with periodic wrap.
    pub fn grid(samples: &[f64]) -> Result<Self, String> {
        let n = samples.len();
        if n == 0 {
            return Err("grid needs at least one sample".into());
        }
        let h = PI / n as f64;
        let knots = (0..n).map(|k| k as f64 * h).collect();
        let polys = (0..n)
            .map(|k| {
                let next = samples[(k + 1) % n];
                vec![samples[k], (next - samples[k]) / h]
            })
            .collect();
        Piecewise::new(knots, polys).map(Channel::Piecewise)
    }

    /// Polynomial `Σ coeffs[k]·z^k` on `[0, π)`, extended periodically.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self, String> {
        Piecewise::new(vec![0.0], vec![coeffs]).map(Channel::Piecewise)
    }

    pub fn trig(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self, String> {
        TrigPoly::new(cos, sin).map(Channel::Trig)
    }

    /// `amp·cos(2kz)`.
    pub fn cos(k: usize, amp: f64) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = amp;
        Channel::Trig(TrigPoly { cos: c, sin: vec![] })
    }

    /// `amp·sin(2kz)`.
    pub fn sin(k: usize, amp: f64) -> Self {
        let mut s = vec![0.0; k + 1];
        s[k] = amp;
        Channel::Trig(TrigPoly { cos: vec![], sin: s })
    }

    pub fn combine(terms: Vec<(f64, Channel)>) -> Self {
        Channel::Combination(terms)
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Channel::Piecewise(p) => p.eval(z),
            Channel::Trig(t) => t.eval(z),
            Channel::Combination(terms) => terms.iter().map(|(w, c)| w * c.eval(z)).sum(),
        }
    }

    /// `(1/π)∫₀^π c dt`.
    pub fn mean(&self) -> f64 {
        match self {
            Channel::Piecewise(p) => p.integral() / PI,
            Channel::Trig(t) => t.cos.first().copied().unwrap_or(0.0),
            Channel::Combination(terms) => terms.iter().map(|(w, c)| w * c.mean()).sum(),
        }
    }

    /// `z ↦ ∫₀^z (c - mean) dt`, which is again π-periodic and vanishes at 0.
    pub fn mean_free_antiderivative(&self) -> Channel {
        match self {
            Channel::Piecewise(p) => Channel::Piecewise(p.mean_free_antiderivative(self.mean())),
            Channel::Trig(t) => Channel::Trig(t.mean_free_antiderivative()),
            Channel::Combination(terms) => Channel::Combination(
                terms
                    .iter()
                    .map(|(w, c)| (*w, c.mean_free_antiderivative()))
                    .collect(),
            ),
        }
    }

    /// `∫₀^z c dt` for any real `z`.
    pub fn integral_to(&self, z: f64) -> f64 {
        self.mean() * z + self.mean_free_antiderivative().eval(z)
    }

    /// Points in `[0, π)` where the channel may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Channel::Piecewise(p) => p.knots.clone(),
            Channel::Trig(_) => vec![],
            Channel::Combination(terms) => {
                terms.iter().flat_map(|(_, c)| c.breakpoints()).collect()
            }
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        match self {
            Channel::Piecewise(p) => p.is_constant_pieces(),
            Channel::Trig(t) => {
                t.cos.iter().skip(1).all(|&c| c == 0.0) && t.sin.iter().skip(1).all(|&c| c == 0.0)
            }
            Channel::Combination(terms) => terms.iter().all(|(_, c)| c.is_piecewise_constant()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_into_period() {
        assert_eq!(wrap(0.0), 0.0);
        assert!((wrap(PI + 0.5) - 0.5).abs() < 1e-15);
        assert!((wrap(-0.5) - (PI - 0.5)).abs() < 1e-15);
        assert!(wrap(-1e-300) < PI);
    }

    #[test]
    fn piecewise_constant_is_right_continuous() {
        let c = Channel::piecewise_constant(vec![0.0, 1.0, 2.0], vec![1.0, -2.0, 3.0]).unwrap();
        assert_eq!(c.eval(0.0), 1.0);
        assert_eq!(c.eval(1.0), -2.0);
        assert_eq!(c.eval(1.999), -2.0);
        assert_eq!(c.eval(2.0), 3.0);
        assert_eq!(c.eval(PI + 1.5), -2.0);
        let want = (1.0 * 1.0 - 2.0 * 1.0 + 3.0 * (PI - 2.0)) / PI;
        assert!((c.mean() - want).abs() < 1e-15);
        assert!(c.is_piecewise_constant());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(Channel::piecewise_constant(vec![0.5], vec![1.0]).is_err());
        assert!(Channel::piecewise_constant(vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(Channel::piecewise_constant(vec![0.0, 4.0], vec![1.0, 1.0]).is_err());
        assert!(Channel::piecewise_constant(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(Channel::grid(&[]).is_err());
    }

    #[test]
    fn grid_is_exact_at_nodes() {
        let n = 64;
        let samples: Vec<f64> = (0..n).map(|k| (2.0 * k as f64 * PI / n as f64).sin()).collect();
        let c = Channel::grid(&samples).unwrap();
        assert!((c.eval(PI / 4.0) - 1.0).abs() < 1e-15);
        // periodic wrap interpolates between the last sample and the first
        let h = PI / n as f64;
        let mid = PI - h / 2.0;
        assert!((c.eval(mid) - 0.5 * samples[n - 1]).abs() < 1e-14);
    }

    #[test]
    fn trig_antiderivative_matches_quadrature() {
        let c = Channel::trig(vec![0.7, 1.0, 0.0, -0.3], vec![0.0, 0.5, 2.0]).unwrap();
        let a = c.mean_free_antiderivative();
        assert!(a.eval(0.0).abs() < 1e-15);
        assert!(a.eval(PI).abs() < 1e-14);
        // brute-force composite Simpson for ∫₀^z (c - mean)
        let z = 1.234;
        let n = 20_000;
        let h = z / n as f64;
        let f = |t: f64| c.eval(t) - 0.7;
        let mut s = f(0.0) + f(z);
        for k in 1..n {
            s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s *= h / 3.0;
        assert!((a.eval(z) - s).abs() < 1e-12);
        assert!((c.mean() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn piecewise_antiderivative_is_periodic_and_exact() {
        let c = Channel::polynomial(vec![PI, -2.0]).unwrap();
        assert!(c.mean().abs() < 1e-15);
        let a = c.mean_free_antiderivative();
        for &z in &[0.3, 1.0, 2.5] {
            assert!((a.eval(z) - (PI * z - z * z)).abs() < 1e-14);
        }
        assert!(a.eval(PI - 1e-12).abs() < 1e-10);

        let g = Channel::grid(&[1.0, 3.0, 2.0, 0.0]).unwrap();
        // trapezoid mean of the periodic interpolant
        assert!((g.mean() - 1.5).abs() < 1e-15);
        let ga = g.mean_free_antiderivative();
        assert!(ga.eval(PI - 1e-13).abs() < 1e-10);
    }

    #[test]
    fn integral_to_handles_negative_and_long_ranges() {
        let c = Channel::combine(vec![(1.0, Channel::constant(0.5)), (2.0, Channel::cos(1, 1.0))]);
        // ∫₀^z 0.5 + 2cos 2t = 0.5z + sin 2z
        for &z in &[-2.0f64, 0.4, 5.0, 7.5] {
            let want = 0.5 * z + (2.0 * z).sin();
            assert!((c.integral_to(z) - want).abs() < 1e-13, "z = {z}");
        }
    }
}
