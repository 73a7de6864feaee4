//! 2×2 complex matrices and the Pauli basis.
//!
//! Conventions follow the first-order system `JY' + QY = λY`:
//!
//! ```text
//! σ0 = I,  σ1 = [[0, 1], [1, 0]],  σ2 = [[0, i], [-i, 0]],  σ3 = [[1, 0], [0, -1]]
//! J  = [[0, 1], [-1, 0]],          σ2 = i·J
//! ```
//!
//! Note that this σ2 is the negative of the usual physics convention, so
//! products pick up the opposite sign: σ1·σ2 = -i·σ3.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// A 2×2 complex matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[C64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        m: [[ZERO, ZERO], [ZERO, ZERO]],
    };
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[ONE, ZERO], [ZERO, ONE]],
    };
    /// The symplectic unit `J`.
    pub const J: Mat2 = Mat2 {
        m: [[ZERO, ONE], [C64::new(-1.0, 0.0), ZERO]],
    };

    pub const fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Mat2 {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn from_real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self::new(m11.into(), m12.into(), m21.into(), m22.into())
    }

    pub fn scalar(s: C64) -> Self {
        Self::new(s, ZERO, ZERO, s)
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes exactly.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        let inv = d.inv();
        Some(Self::new(
            self.m[1][1] * inv,
            -self.m[0][1] * inv,
            -self.m[1][0] * inv,
            self.m[0][0] * inv,
        ))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    /// Operator norm induced by the ℓ¹ vector norm: the largest column sum of
    /// absolute values.
    pub fn norm_col_sum(&self) -> f64 {
        let c0 = self.m[0][0].norm() + self.m[1][0].norm();
        let c1 = self.m[0][1].norm() + self.m[1][1].norm();
        c0.max(c1)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (*self - self.adjoint()).max_abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.m[r][c]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.map(|x| -x)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.map(|x| x * s)
    }
}

/// The four Pauli matrices, indexed 0..=3.
pub const SIGMA: [Mat2; 4] = [
    Mat2::IDENTITY,
    Mat2::new(ZERO, ONE, ONE, ZERO),
    Mat2::new(ZERO, I, C64::new(0.0, -1.0), ZERO),
    Mat2::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0)),
];

/// Coefficients of a matrix in the basis {σ0, σ1, σ2, σ3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoeffs {
    pub a: [C64; 4],
}

impl PauliCoeffs {
    pub fn new(a0: C64, a1: C64, a2: C64, a3: C64) -> Self {
        PauliCoeffs { a: [a0, a1, a2, a3] }
    }

    pub fn real(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self::new(a0.into(), a1.into(), a2.into(), a3.into())
    }

    /// Basis element σ_i as coefficients.
    pub fn unit(i: usize) -> Self {
        let mut a = [ZERO; 4];
        a[i] = ONE;
        PauliCoeffs { a }
    }
}

/// `⟨H, F⟩ = Tr(Hᵀ F̄)`, i.e. the sum of `H_jk · conj(F_jk)`.
pub fn lin_inner(h: &Mat2, f: &Mat2) -> C64 {
    (h.transpose() * f.conj()).trace()
}

/// Expands `h` in the Pauli basis.
///
/// The basis is orthogonal with `⟨σi, σi⟩ = 2`, so each projection is halved.
pub fn decompose(h: &Mat2) -> PauliCoeffs {
    let mut a = [ZERO; 4];
    for (ai, s) in a.iter_mut().zip(SIGMA.iter()) {
        *ai = lin_inner(h, s) * 0.5;
    }
    PauliCoeffs { a }
}

pub fn recompose(c: &PauliCoeffs) -> Mat2 {
    c.a.iter()
        .zip(SIGMA.iter())
        .fold(Mat2::ZERO, |acc, (ai, s)| acc + s.scale(*ai))
}

/// `a0² - a1² - a2² - a3²`, the determinant of `recompose(c)`.
pub fn quad_det(c: &PauliCoeffs) -> C64 {
    let [a0, a1, a2, a3] = c.a;
    a0 * a0 - a1 * a1 - a2 * a2 - a3 * a3
}

/// Pauli expansion of `σi · σj`.
///
/// # Panics
/// If either index exceeds 3.
pub fn pauli_product(i: usize, j: usize) -> PauliCoeffs {
    assert!(i < 4 && j < 4, "Pauli index out of range: ({i}, {j})");
    if i == 0 {
        return PauliCoeffs::unit(j);
    }
    if j == 0 {
        return PauliCoeffs::unit(i);
    }
    if i == j {
        return PauliCoeffs::unit(0);
    }
    // With σ2 = iJ every product of distinct non-identity elements flips the
    // sign of the textbook Levi-Civita rule.
    let k = 6 - i - j;
    let eps = levi_civita(i, j, k);
    let mut a = [ZERO; 4];
    a[k] = C64::new(0.0, -eps);
    PauliCoeffs { a }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}
