//! Quaternion arithmetic over `f64`, pure unit axes and the symplectic
//! splittings used to express sided transforms through two-sided ones.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Tolerance used when validating axes (unit length, zero scalar part,
/// orthogonality).
pub const AXIS_TOL: f64 = 1e-12;

/// Inputs whose norm lies within this distance of 1 are renormalized instead
/// of rejected.
pub const NORMALIZE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuatError {
    #[error("axis is not a unit quaternion (norm {0})")]
    NotUnit(f64),
    #[error("axis has a nonzero scalar part ({0})")]
    NotPure(f64),
    #[error("axes are not orthogonal (dot product {0})")]
    NotOrthogonal(f64),
}

/// `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// `|q|²`.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse `conj(q) / |q|²`, or `None` for zero.
    pub fn reciprocal(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            None
        } else {
            Some(self.conj() * (1.0 / n))
        }
    }

    /// Euclidean dot product of the coefficient 4-vectors.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn vector(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

/// Free-function form of the Hamilton product.
#[inline]
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

#[inline]
pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

#[inline]
pub fn qabs(q: Quaternion) -> f64 {
    q.abs()
}

impl Mul for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn mul(self, r: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * r.w - p.x * r.x - p.y * r.y - p.z * r.z,
            p.w * r.x + p.x * r.w + p.y * r.z - p.z * r.y,
            p.w * r.y - p.x * r.z + p.y * r.w + p.z * r.x,
            p.w * r.z + p.x * r.y - p.y * r.x + p.z * r.w,
        )
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, rhs: Quaternion) {
        *self = *self * rhs;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;

    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, r: Quaternion) {
        self.w += r.w;
        self.x += r.x;
        self.y += r.y;
        self.z += r.z;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, r: Quaternion) {
        self.w -= r.w;
        self.x -= r.x;
        self.y -= r.y;
        self.z -= r.z;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// A pure unit quaternion `μ = x i + y j + z k` with `μ² = −1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureUnit {
    x: f64,
    y: f64,
    z: f64,
}

impl PureUnit {
    pub const I: PureUnit = PureUnit { x: 1.0, y: 0.0, z: 0.0 };
    pub const J: PureUnit = PureUnit { x: 0.0, y: 1.0, z: 0.0 };
    pub const K: PureUnit = PureUnit { x: 0.0, y: 0.0, z: 1.0 };

    /// Builds an axis from its `i, j, k` coefficients. Vectors within
    /// [`NORMALIZE_TOL`] of unit length are renormalized.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, QuatError> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > NORMALIZE_TOL {
            return Err(QuatError::NotUnit(n));
        }
        Ok(Self { x: x / n, y: y / n, z: z / n })
    }

    pub fn from_quaternion(q: Quaternion) -> Result<Self, QuatError> {
        if q.w.abs() > AXIS_TOL {
            return Err(QuatError::NotPure(q.w));
        }
        Self::new(q.x, q.y, q.z)
    }

    #[inline]
    pub fn quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn coeffs(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, other: PureUnit) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// `e^{μθ} = cos θ + μ sin θ`.
    #[inline]
    pub fn exp(self, theta: f64) -> Quaternion {
        let (s, c) = theta.sin_cos();
        Quaternion::new(c, self.x * s, self.y * s, self.z * s)
    }

    /// `c + μ s` for real `c`, `s`; an element of the complex plane spanned by
    /// `{1, μ}`.
    #[inline]
    pub fn complex(self, re: f64, im: f64) -> Quaternion {
        Quaternion::new(re, self.x * im, self.y * im, self.z * im)
    }
}

impl Neg for PureUnit {
    type Output = PureUnit;

    fn neg(self) -> PureUnit {
        PureUnit { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// `e^{μθ}` for a pure unit axis.
#[inline]
pub fn qexp_pure(mu: PureUnit, theta: f64) -> Quaternion {
    mu.exp(theta)
}

/// Two orthogonal pure unit quaternions replacing `(i, j)` in the transform
/// kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisPair {
    pub mu1: PureUnit,
    pub mu2: PureUnit,
}

impl Default for AxisPair {
    fn default() -> Self {
        Self::CANONICAL
    }
}

impl AxisPair {
    pub const CANONICAL: AxisPair = AxisPair { mu1: PureUnit::I, mu2: PureUnit::J };

    pub fn new(mu1: PureUnit, mu2: PureUnit) -> Result<Self, QuatError> {
        let d = mu1.dot(mu2);
        if d.abs() > AXIS_TOL {
            return Err(QuatError::NotOrthogonal(d));
        }
        Ok(Self { mu1, mu2 })
    }

    /// Validates two arbitrary quaternions as an axis pair.
    pub fn from_quaternions(mu1: Quaternion, mu2: Quaternion) -> Result<Self, QuatError> {
        Self::new(PureUnit::from_quaternion(mu1)?, PureUnit::from_quaternion(mu2)?)
    }

    /// `μ3 = μ1 μ2`, the third axis of the right-handed frame.
    pub fn mu3(self) -> PureUnit {
        let q = self.mu1.quaternion() * self.mu2.quaternion();
        PureUnit { x: q.x, y: q.y, z: q.z }
    }

    pub fn is_canonical(self) -> bool {
        self == Self::CANONICAL
    }

    /// Coordinates of `q` in the frame `{1, μ1, μ2, μ3}`.
    pub fn coordinates(self, q: Quaternion) -> [f64; 4] {
        let v = q.vector();
        let d = |m: PureUnit| m.x * v[0] + m.y * v[1] + m.z * v[2];
        [q.w, d(self.mu1), d(self.mu2), d(self.mu3())]
    }

    /// Inverse of [`coordinates`](Self::coordinates).
    pub fn from_coordinates(self, c: [f64; 4]) -> Quaternion {
        let m1 = self.mu1.quaternion();
        let m2 = self.mu2.quaternion();
        let m3 = self.mu3().quaternion();
        Quaternion::real(c[0]) + m1 * c[1] + m2 * c[2] + m3 * c[3]
    }
}

/// Which complex subalgebra the split is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitFlavor {
    /// `q = f_a + f_b μ2` with `f_a, f_b ∈ span{1, μ1}`.
    Right,
    /// `q = f_d + μ1 f_e` with `f_d, f_e ∈ span{1, μ2}`.
    Left,
}

/// A quaternion written as two complex numbers of one subalgebra.
///
/// For [`SplitFlavor::Right`] the first part is `f_a = a_re + μ1 a_im` and the
/// second `f_b = b_re + μ1 b_im`. For [`SplitFlavor::Left`] the parts are
/// `f_d = a_re + μ2 a_im` and `f_e = b_re + μ2 b_im`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymplecticSplit {
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub flavor: SplitFlavor,
}

impl SymplecticSplit {
    /// First part as a quaternion embedded through `axes`.
    pub fn first(&self, axes: AxisPair) -> Quaternion {
        self.axis(axes).complex(self.a_re, self.a_im)
    }

    /// Second part as a quaternion embedded through `axes`.
    pub fn second(&self, axes: AxisPair) -> Quaternion {
        self.axis(axes).complex(self.b_re, self.b_im)
    }

    fn axis(&self, axes: AxisPair) -> PureUnit {
        match self.flavor {
            SplitFlavor::Right => axes.mu1,
            SplitFlavor::Left => axes.mu2,
        }
    }
}

/// Splits `q` over the canonical frame.
pub fn symplectic_split(q: Quaternion, flavor: SplitFlavor) -> SymplecticSplit {
    symplectic_split_axes(q, flavor, AxisPair::CANONICAL)
}

pub fn symplectic_split_axes(q: Quaternion, flavor: SplitFlavor, axes: AxisPair) -> SymplecticSplit {
    let c = if axes.is_canonical() { q.to_array() } else { axes.coordinates(q) };
    match flavor {
        // w + c1 μ1 + c2 μ2 + c3 μ1μ2 = (w + c1 μ1) + (c2 + c3 μ1) μ2
        SplitFlavor::Right => SymplecticSplit { a_re: c[0], a_im: c[1], b_re: c[2], b_im: c[3], flavor },
        // w + c1 μ1 + c2 μ2 + c3 μ1μ2 = (w + c2 μ2) + μ1 (c1 + c3 μ2)
        SplitFlavor::Left => SymplecticSplit { a_re: c[0], a_im: c[2], b_re: c[1], b_im: c[3], flavor },
    }
}

/// Canonical-frame inverse of [`symplectic_split`].
pub fn recompose(split: &SymplecticSplit) -> Quaternion {
    recompose_axes(split, AxisPair::CANONICAL)
}

pub fn recompose_axes(split: &SymplecticSplit, axes: AxisPair) -> Quaternion {
    let c = match split.flavor {
        SplitFlavor::Right => [split.a_re, split.a_im, split.b_re, split.b_im],
        SplitFlavor::Left => [split.a_re, split.b_re, split.a_im, split.b_im],
    };
    if axes.is_canonical() {
        Quaternion::from_array(c)
    } else {
        axes.from_coordinates(c)
    }
}
