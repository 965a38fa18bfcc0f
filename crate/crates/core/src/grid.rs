//! Uniformly sampled quaternion signals and spectra on rectangles.
//!
//! Samples sit at cell midpoints: sample `k` along `s` is located at
//! `s_min + (k + 1/2) ds`. Data is stored row-major with one row per `t`
//! sample, so index `it * ns + is` holds the value at `(s_is, t_it)`.

use rayon::prelude::*;
use thiserror::Error;

use crate::qft::QftKind;
use crate::qlct::LctKind;
use crate::quat::Quaternion;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("data length {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite sample at (s={s}, t={t})")]
    NonFinite { s: f64, t: f64 },
    #[error("shape mismatch: {a:?} vs {b:?}")]
    ShapeMismatch { a: (usize, usize), b: (usize, usize) },
}

/// Geometry of a midpoint grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub s_min: f64,
    pub t_min: f64,
    pub ds: f64,
    pub dt: f64,
    pub ns: usize,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(s_min: f64, t_min: f64, ds: f64, dt: f64, ns: usize, nt: usize) -> Result<Self, GridError> {
        if !(s_min.is_finite() && t_min.is_finite()) {
            return Err(GridError::InvalidGrid("origin must be finite".into()));
        }
        if !(ds.is_finite() && dt.is_finite() && ds > 0.0 && dt > 0.0) {
            return Err(GridError::InvalidGrid(format!("spacing must be positive (ds={ds}, dt={dt})")));
        }
        if ns == 0 || nt == 0 {
            return Err(GridError::InvalidGrid(format!("empty grid ({ns}x{nt})")));
        }
        Ok(Self { s_min, t_min, ds, dt, ns, nt })
    }

    /// `n × n` cells covering `[-extent, extent]²`.
    pub fn symmetric(n: usize, extent: f64) -> Result<Self, GridError> {
        Self::symmetric_rect(n, n, extent, extent)
    }

    /// `ns × nt` cells covering `[-s_ext, s_ext] × [-t_ext, t_ext]`.
    pub fn symmetric_rect(ns: usize, nt: usize, s_ext: f64, t_ext: f64) -> Result<Self, GridError> {
        if !(s_ext > 0.0 && t_ext > 0.0) {
            return Err(GridError::InvalidGrid(format!("extent must be positive ({s_ext}, {t_ext})")));
        }
        if ns == 0 || nt == 0 {
            return Err(GridError::InvalidGrid(format!("empty grid ({ns}x{nt})")));
        }
        Self::new(-s_ext, -t_ext, 2.0 * s_ext / ns as f64, 2.0 * t_ext / nt as f64, ns, nt)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn s(&self, k: usize) -> f64 {
        self.s_min + (k as f64 + 0.5) * self.ds
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        self.t_min + (k as f64 + 0.5) * self.dt
    }

    pub fn s_coords(&self) -> Vec<f64> {
        (0..self.ns).map(|k| self.s(k)).collect()
    }

    pub fn t_coords(&self) -> Vec<f64> {
        (0..self.nt).map(|k| self.t(k)).collect()
    }

    pub fn s_max(&self) -> f64 {
        self.s_min + self.ns as f64 * self.ds
    }

    pub fn t_max(&self) -> f64 {
        self.t_min + self.nt as f64 * self.dt
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.ds * self.dt
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ns, self.nt)
    }
}

/// Placement of the transform kernels relative to the signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `K1 · f · K2`
    TwoSided,
    /// `f · K1 · K2`
    RightSided,
    /// `K1 · K2 · f`
    LeftSided,
}

impl Side {
    pub fn tag(self) -> u8 {
        match self {
            Side::TwoSided => 0,
            Side::RightSided => 1,
            Side::LeftSided => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Side::TwoSided),
            1 => Some(Side::RightSided),
            2 => Some(Side::LeftSided),
            _ => None,
        }
    }
}

/// Flat label of the transform that produced a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformTag {
    TwoSidedQft,
    RightQft,
    LeftQft,
    TwoSidedQlct,
    RightQlct,
    LeftQlct,
}

/// Which transform produced a spectrum, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Provenance {
    Qft(QftKind),
    Qlct {
        kind: LctKind,
        /// Per-axis phase `(α, β)` removed to turn the raw QLCT into the
        /// fractional transform; `None` for the raw QLCT.
        frft_phase: Option<(f64, f64)>,
    },
}

impl Provenance {
    pub fn side(&self) -> Side {
        match self {
            Provenance::Qft(k) => k.side,
            Provenance::Qlct { kind, .. } => kind.side,
        }
    }

    pub fn tag(&self) -> TransformTag {
        match (self, self.side()) {
            (Provenance::Qft(_), Side::TwoSided) => TransformTag::TwoSidedQft,
            (Provenance::Qft(_), Side::RightSided) => TransformTag::RightQft,
            (Provenance::Qft(_), Side::LeftSided) => TransformTag::LeftQft,
            (Provenance::Qlct { .. }, Side::TwoSided) => TransformTag::TwoSidedQlct,
            (Provenance::Qlct { .. }, Side::RightSided) => TransformTag::RightQlct,
            (Provenance::Qlct { .. }, Side::LeftSided) => TransformTag::LeftQlct,
        }
    }
}

/// Sampled quaternion-valued function.
#[derive(Clone, Debug, PartialEq)]
pub struct QSignal2D {
    grid: GridSpec,
    data: Vec<Quaternion>,
}

impl QSignal2D {
    pub fn new(grid: GridSpec, data: Vec<Quaternion>) -> Result<Self, GridError> {
        if data.len() != grid.len() {
            return Err(GridError::LengthMismatch { expected: grid.len(), found: data.len() });
        }
        if let Some(k) = data.iter().position(|q| !q.is_finite()) {
            return Err(GridError::NonFinite { s: grid.s(k % grid.ns), t: grid.t(k / grid.ns) });
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, data: vec![Quaternion::ZERO; grid.len()] }
    }

    /// Skips the finiteness scan; for outputs of finite arithmetic on
    /// validated inputs.
    pub(crate) fn from_parts(grid: GridSpec, data: Vec<Quaternion>) -> Self {
        debug_assert_eq!(grid.len(), data.len());
        Self { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn data(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Quaternion> {
        self.data
    }

    #[inline]
    pub fn at(&self, is: usize, it: usize) -> Quaternion {
        self.data[it * self.grid.ns + is]
    }

    /// One real component (`0 → w`, `1 → x`, `2 → y`, `3 → z`).
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|q| q.to_array()[c]).collect()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|q| q.x == 0.0 && q.y == 0.0 && q.z == 0.0)
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        Self::from_parts(self.grid, self.data.iter().map(|&q| f(q)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|q| q * c)
    }

    /// Pointwise `self + other` on matching shapes.
    pub fn add(&self, other: &Self) -> Result<Self, GridError> {
        check_shape(&self.grid, &other.grid)?;
        Ok(Self::from_parts(self.grid, self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect()))
    }
}

/// Quaternion transform output together with how it was produced.
#[derive(Clone, Debug, PartialEq)]
pub struct QSpectrum2D {
    grid: GridSpec,
    data: Vec<Quaternion>,
    provenance: Provenance,
}

impl QSpectrum2D {
    pub fn new(grid: GridSpec, data: Vec<Quaternion>, provenance: Provenance) -> Result<Self, GridError> {
        let sig = QSignal2D::new(grid, data)?;
        Ok(Self { grid, data: sig.data, provenance })
    }

    pub(crate) fn from_parts(grid: GridSpec, data: Vec<Quaternion>, provenance: Provenance) -> Self {
        debug_assert_eq!(grid.len(), data.len());
        Self { grid, data, provenance }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn data(&self) -> &[Quaternion] {
        &self.data
    }

    #[inline]
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    #[inline]
    pub fn at(&self, iu: usize, iv: usize) -> Quaternion {
        self.data[iv * self.grid.ns + iu]
    }

    /// The spectrum viewed as a plain sampled signal on its own grid.
    pub fn as_signal(&self) -> QSignal2D {
        QSignal2D::from_parts(self.grid, self.data.clone())
    }

    pub fn map(&self, f: impl Fn(usize, usize, Quaternion) -> Quaternion) -> Self {
        let ns = self.grid.ns;
        let data = self.data.iter().enumerate().map(|(k, &q)| f(k % ns, k / ns, q)).collect();
        Self::from_parts(self.grid, data, self.provenance)
    }
}

/// A quaternion-valued function of two real variables that can be sampled
/// anywhere.
pub trait Field2D: Sync {
    fn eval(&self, s: f64, t: f64) -> Quaternion;

    /// Rectangle `[s_lo, s_hi, t_lo, t_hi]` outside which the field vanishes
    /// or is numerically negligible.
    fn support(&self) -> Option<[f64; 4]> {
        None
    }

    /// Lines `s = c` across which the field may jump.
    fn breaks_s(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Lines `t = c` across which the field may jump.
    fn breaks_t(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Adapts a closure to [`Field2D`].
pub struct FnField<F>(pub F);

impl<F: Fn(f64, f64) -> Quaternion + Sync> Field2D for FnField<F> {
    fn eval(&self, s: f64, t: f64) -> Quaternion {
        (self.0)(s, t)
    }
}

impl<T: Field2D + ?Sized> Field2D for &T {
    fn eval(&self, s: f64, t: f64) -> Quaternion {
        (**self).eval(s, t)
    }
    fn support(&self) -> Option<[f64; 4]> {
        (**self).support()
    }
    fn breaks_s(&self) -> Vec<f64> {
        (**self).breaks_s()
    }
    fn breaks_t(&self) -> Vec<f64> {
        (**self).breaks_t()
    }
}

/// Evaluates `field` at every cell midpoint of `grid`.
pub fn sample<F: Field2D + ?Sized>(field: &F, grid: &GridSpec) -> Result<QSignal2D, GridError> {
    let ns = grid.ns;
    let data: Vec<Quaternion> = (0..grid.len())
        .into_par_iter()
        .map(|k| field.eval(grid.s(k % ns), grid.t(k / ns)))
        .collect();
    QSignal2D::new(*grid, data)
}

/// Midpoint-rule `∫∫ |f| ds dt`.
pub fn l1_norm(sig: &QSignal2D) -> f64 {
    let g = sig.grid();
    let rows: Vec<f64> = sig
        .data()
        .par_chunks(g.ns)
        .map(|row| row.iter().map(|q| q.abs()).sum::<f64>())
        .collect();
    rows.iter().sum::<f64>() * g.cell_area()
}

/// Midpoint-rule `∫∫ |a − b| ds dt`.
pub fn l1_diff(a: &QSignal2D, b: &QSignal2D) -> Result<f64, GridError> {
    check_shape(a.grid(), b.grid())?;
    let ns = a.grid().ns;
    let rows: Vec<f64> = a
        .data()
        .par_chunks(ns)
        .zip(b.data().par_chunks(ns))
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&p, &q)| (p - q).abs()).sum::<f64>())
        .collect();
    Ok(rows.iter().sum::<f64>() * a.grid().cell_area())
}

/// `max |a − b|` over samples.
pub fn linf_diff(a: &QSignal2D, b: &QSignal2D) -> Result<f64, GridError> {
    check_shape(a.grid(), b.grid())?;
    Ok(a.data().iter().zip(b.data()).map(|(&p, &q)| (p - q).abs()).fold(0.0, f64::max))
}

fn check_shape(a: &GridSpec, b: &GridSpec) -> Result<(), GridError> {
    if a.shape() != b.shape() {
        return Err(GridError::ShapeMismatch { a: a.shape(), b: b.shape() });
    }
    Ok(())
}
