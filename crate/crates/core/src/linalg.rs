//! 2×2 complex matrix algebra.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense 2×2 complex matrix, row-major. Index `(0, 0)` is `⟨1|·|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Self::from_real([[a, 0.0], [0.0, b]])
    }

    /// `|k⟩⟨k|` for `k ∈ {0, 1}` (levels 1 and 2).
    pub fn projector(k: usize) -> Self {
        let mut m = Self::zero();
        m.0[k][k] = ONE;
        m
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: f64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn commutator(&self, other: &Mat2) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Mat2) -> Self {
        *self * *other + *other * *self
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry-wise modulus of `m − m†`.
    pub fn anti_hermitian_deviation(&self) -> f64 {
        let d = *self - self.dagger();
        d.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
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
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// `(m + m†)/2`.
pub fn hermitize(m: &Mat2) -> DensityMatrix {
    let h = (*m + m.dagger()).scale(0.5);
    DensityMatrix(h)
}

/// Hermitian 2×2 state of the two-level system. May be sub-normalized
/// (`tr ρ < 1`) once population has leaked into the sink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// `|k⟩⟨k|` with `k = 0` for level 1 and `k = 1` for level 2.
    pub fn pure_level(k: usize) -> Self {
        DensityMatrix(Mat2::projector(k))
    }

    /// Initial state `|1⟩⟨1|`.
    pub fn excited() -> Self {
        Self::pure_level(0)
    }

    /// Build from populations and the coherence `ρ₁₂`; Hermitian by construction.
    pub fn from_parts(rho11: f64, rho22: f64, rho12: Complex64) -> Self {
        DensityMatrix(Mat2([
            [Complex64::new(rho11, 0.0), rho12],
            [rho12.conj(), Complex64::new(rho22, 0.0)],
        ]))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn rho11(&self) -> f64 {
        self.0 .0[0][0].re
    }

    pub fn rho22(&self) -> f64 {
        self.0 .0[1][1].re
    }

    pub fn rho12(&self) -> Complex64 {
        self.0 .0[0][1]
    }

    pub fn trace(&self) -> f64 {
        self.rho11() + self.rho22()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.rho11() + self.rho22());
        let half_diff = 0.5 * (self.rho11() - self.rho22());
        let r = half_diff.hypot(self.rho12().norm());
        [mean - r, mean + r]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

impl From<DensityMatrix> for Mat2 {
    fn from(d: DensityMatrix) -> Mat2 {
        d.0
    }
}
