//! Quaternion Fourier transforms by midpoint quadrature.
//!
//! Forward transforms (no `2π` factor):
//!
//! ```text
//! two-sided  F_T(u,v) = ∫∫ e^{−μ1 u s} f(s,t) e^{−μ2 v t} ds dt
//! right      F_R(u,v) = ∫∫ f(s,t) e^{−μ1 u s} e^{−μ2 v t} ds dt
//! left       F_L(u,v) = ∫∫ e^{−μ1 u s} e^{−μ2 v t} f(s,t) ds dt
//! ```
//!
//! Inverses carry `1/4π²` and reverse the kernel order of the sided variants:
//! `F_R e^{μ2 t v} e^{μ1 s u}` and `e^{μ2 t v} e^{μ1 s u} F_L`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::TransformError;
use crate::grid::{GridSpec, Provenance, QSignal2D, QSpectrum2D, Side};
use crate::quat::{AxisPair, PureUnit, Quaternion};
use crate::sandwich::{apply, AxisOp, Placement};

/// Which QFT: kernel placement and axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QftKind {
    pub side: Side,
    pub axes: AxisPair,
}

impl QftKind {
    pub const fn new(side: Side, axes: AxisPair) -> Self {
        Self { side, axes }
    }

    pub const fn canonical(side: Side) -> Self {
        Self { side, axes: AxisPair::CANONICAL }
    }

    /// Same side and axes up to `tol` on the axis coefficients.
    pub fn matches(&self, other: &QftKind, tol: f64) -> bool {
        self.side == other.side && axes_close(self.axes, other.axes, tol)
    }
}

pub(crate) fn axes_close(a: AxisPair, b: AxisPair, tol: f64) -> bool {
    let close = |p: PureUnit, q: PureUnit| p.coeffs().iter().zip(q.coeffs()).all(|(x, y)| (x - y).abs() <= tol);
    close(a.mu1, b.mu1) && close(a.mu2, b.mu2)
}

/// Truncated frequency box `[−u_max, u_max] × [−v_max, v_max]` sampled at
/// `nu × nv` midpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreqWindow {
    pub u_max: f64,
    pub v_max: f64,
    pub nu: usize,
    pub nv: usize,
}

impl FreqWindow {
    pub fn new(u_max: f64, v_max: f64, nu: usize, nv: usize) -> Result<Self, TransformError> {
        if !(u_max.is_finite() && v_max.is_finite() && u_max > 0.0 && v_max > 0.0) {
            return Err(TransformError::InvalidWindow(format!("extents must be positive, got ({u_max}, {v_max})")));
        }
        if nu == 0 || nv == 0 {
            return Err(TransformError::InvalidWindow(format!("sample counts must be positive, got ({nu}, {nv})")));
        }
        Ok(Self { u_max, v_max, nu, nv })
    }

    pub fn square(m: f64, n: usize) -> Result<Self, TransformError> {
        Self::new(m, m, n, n)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::symmetric_rect(self.nu, self.nv, self.u_max, self.v_max).expect("validated window")
    }
}

pub fn qft_forward(sig: &QSignal2D, kind: QftKind, window: FreqWindow) -> Result<QSpectrum2D, TransformError> {
    let window = FreqWindow::new(window.u_max, window.v_max, window.nu, window.nv)?;
    qft_forward_on(sig, kind, &window.grid())
}

/// Forward transform evaluated at the midpoints of an arbitrary frequency
/// grid.
pub fn qft_forward_on(sig: &QSignal2D, kind: QftKind, freq: &GridSpec) -> Result<QSpectrum2D, TransformError> {
    let data = forward_at(sig, kind, &freq.s_coords(), &freq.t_coords());
    Ok(QSpectrum2D::from_parts(*freq, data, Provenance::Qft(kind)))
}

/// Forward transform at arbitrary frequency coordinates, row-major over
/// `(us, vs)`.
pub(crate) fn forward_at(sig: &QSignal2D, kind: QftKind, us: &[f64], vs: &[f64]) -> Vec<Quaternion> {
    let g = sig.grid();
    let (m1, m2) = (kind.axes.mu1, kind.axes.mu2);
    let opx = AxisOp::dense(us, &g.s_coords(), g.ds, |u, s| m1.exp(-u * s));
    let opy = AxisOp::dense(vs, &g.t_coords(), g.dt, |v, t| m2.exp(-v * t));
    // a real signal commutes with both kernels, so every side is the same sum
    let placement = match kind.side {
        _ if sig.is_real() => Placement::Sandwich,
        Side::TwoSided => Placement::Sandwich,
        Side::RightSided => Placement::RightXY,
        Side::LeftSided => Placement::LeftXY,
    };
    apply(sig.data(), g.ns, g.nt, &opx, &opy, placement).0
}

/// Inversion integral evaluated at the midpoints of `target`.
pub fn qft_inverse(spec: &QSpectrum2D, kind: QftKind, target: &GridSpec) -> Result<QSignal2D, TransformError> {
    match spec.provenance() {
        Provenance::Qft(k) if k.matches(&kind, 1e-12) => {}
        other => {
            return Err(TransformError::ProvenanceMismatch {
                expected: format!("{:?} QFT", kind.side),
                found: describe(other),
            })
        }
    }
    let f = spec.grid();
    let (m1, m2) = (kind.axes.mu1, kind.axes.mu2);
    let opx = AxisOp::dense(&target.s_coords(), &f.s_coords(), f.ds / (2.0 * PI), |s, u| m1.exp(s * u));
    let opy = AxisOp::dense(&target.t_coords(), &f.t_coords(), f.dt / (2.0 * PI), |t, v| m2.exp(t * v));
    let placement = match kind.side {
        Side::TwoSided => Placement::Sandwich,
        Side::RightSided => Placement::RightYX,
        Side::LeftSided => Placement::LeftYX,
    };
    let (data, _, _) = apply(spec.data(), f.ns, f.nt, &opx, &opy, placement);
    Ok(QSignal2D::from_parts(*target, data))
}

pub(crate) fn describe(p: &Provenance) -> String {
    match p {
        Provenance::Qft(k) => format!("{:?} QFT", k.side),
        Provenance::Qlct { kind, frft_phase: None } => format!("{:?} QLCT", kind.side),
        Provenance::Qlct { kind, frft_phase: Some(_) } => format!("{:?} QFRFT", kind.side),
    }
}

/// Sign of the exponent in the complex Fourier kernel `e^{±i(us + vt)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FtSign {
    Negative,
    Positive,
}

/// A complex-valued field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub data: Vec<Complex64>,
    pub sign: FtSign,
}

impl ComplexField {
    pub fn at(&self, iu: usize, iv: usize) -> Complex64 {
        self.data[iv * self.grid.ns + iu]
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Ordinary 2D Fourier transform `∫∫ h(s,t) e^{±i(us+vt)} ds dt` of a
/// real-valued signal, by midpoint quadrature on `freq`.
pub fn ft2d_complex(sig: &QSignal2D, freq: &GridSpec, sign: FtSign) -> Result<ComplexField, TransformError> {
    if !sig.is_real() {
        return Err(TransformError::NonRealInput);
    }
    let g = sig.grid();
    let sg = match sign {
        FtSign::Negative => -1.0,
        FtSign::Positive => 1.0,
    };
    let table = |out: &[f64], inp: &[f64], w: f64| -> Vec<Complex64> {
        out.iter()
            .flat_map(|&o| inp.iter().map(move |&i| Complex64::from_polar(w, sg * o * i)))
            .collect()
    };
    let (us, vs) = (freq.s_coords(), freq.t_coords());
    let tx = table(&us, &g.s_coords(), g.ds);
    let ty = table(&vs, &g.t_coords(), g.dt);
    let (ns, nt, nu) = (g.ns, g.nt, freq.ns);
    let h = sig.component(0);
    // along s: rows t, columns u
    let mut tmp = vec![Complex64::new(0.0, 0.0); nu * nt];
    tmp.par_chunks_mut(nu).zip(h.par_chunks(ns)).for_each(|(orow, irow)| {
        for (iu, o) in orow.iter_mut().enumerate() {
            let k = &tx[iu * ns..(iu + 1) * ns];
            *o = k.iter().zip(irow).map(|(&c, &x)| c * x).sum();
        }
    });
    let mut data = vec![Complex64::new(0.0, 0.0); nu * freq.nt];
    data.par_chunks_mut(nu).enumerate().for_each(|(iv, orow)| {
        let k = &ty[iv * nt..(iv + 1) * nt];
        for (it, &c) in k.iter().enumerate() {
            for (o, &x) in orow.iter_mut().zip(&tmp[it * nu..(it + 1) * nu]) {
                *o += c * x;
            }
        }
    });
    Ok(ComplexField { grid: *freq, data, sign })
}

/// Index map `v ↦ −v` on a frequency grid symmetric about zero in `v`.
fn v_mirror(g: &GridSpec) -> Result<impl Fn(usize) -> usize, TransformError> {
    let scale = g.t_min.abs().max(g.t_max().abs());
    if (g.t_min + g.t_max()).abs() > 1e-12 * scale {
        return Err(TransformError::InvalidWindow("frequency grid must be symmetric in v".into()));
    }
    let nv = g.nt;
    Ok(move |iv: usize| nv - 1 - iv)
}

/// Two-sided QFT of a real signal from its complex Fourier transform:
/// `H_T(u,v) = [H(u,v)(1 − μ3) + H(u,−v)(1 + μ3)] / 2`, with the complex unit
/// identified with `μ1`.
pub fn qft_from_ft(h: &ComplexField, axes: AxisPair) -> Result<QSpectrum2D, TransformError> {
    if h.sign != FtSign::Negative {
        return Err(TransformError::SignConvention);
    }
    let mirror = v_mirror(&h.grid)?;
    let m1 = axes.mu1;
    let m3 = axes.mu3().quaternion();
    let one_minus = Quaternion::ONE - m3;
    let one_plus = Quaternion::ONE + m3;
    let nu = h.grid.ns;
    let data = (0..h.data.len())
        .map(|k| {
            let (iu, iv) = (k % nu, k / nu);
            let a = h.at(iu, iv);
            let b = h.at(iu, mirror(iv));
            (m1.complex(a.re, a.im) * one_minus + m1.complex(b.re, b.im) * one_plus) * 0.5
        })
        .collect();
    Ok(QSpectrum2D::from_parts(h.grid, data, Provenance::Qft(QftKind::new(Side::TwoSided, axes))))
}

/// Complex Fourier transform of a real signal from its two-sided QFT:
/// `H(u,v) = [H_T(u,v)(1 + μ3) + H_T(u,−v)(1 − μ3)] / 2`.
pub fn ft_from_qft(spec: &QSpectrum2D) -> Result<ComplexField, TransformError> {
    let axes = match spec.provenance() {
        Provenance::Qft(k) if k.side == Side::TwoSided => k.axes,
        other => {
            return Err(TransformError::ProvenanceMismatch { expected: "TwoSided QFT".into(), found: describe(other) })
        }
    };
    let mirror = v_mirror(spec.grid())?;
    let m3 = axes.mu3().quaternion();
    let one_minus = Quaternion::ONE - m3;
    let one_plus = Quaternion::ONE + m3;
    let nu = spec.grid().ns;
    let data = (0..spec.data().len())
        .map(|k| {
            let (iu, iv) = (k % nu, k / nu);
            let q = (spec.at(iu, iv) * one_plus + spec.at(iu, mirror(iv)) * one_minus) * 0.5;
            let c = axes.coordinates(q);
            Complex64::new(c[0], c[1])
        })
        .collect();
    Ok(ComplexField { grid: *spec.grid(), data, sign: FtSign::Negative })
}

/// Multiplies a QFT by `(μ1 u)^m` on the left and `(μ2 v)^n` on the right,
/// the spectral image of `∂^m_s ∂^n_t f`. Right-sided spectra admit only
/// `n`, left-sided only `m`.
pub fn derivative_multiplier(spec: &QSpectrum2D, m: u32, n: u32) -> Result<QSpectrum2D, TransformError> {
    let kind = match spec.provenance() {
        Provenance::Qft(k) => *k,
        other => {
            return Err(TransformError::ProvenanceMismatch { expected: "QFT".into(), found: describe(other) })
        }
    };
    match kind.side {
        Side::RightSided if m > 0 => {
            return Err(TransformError::SideMismatch("right-sided spectra admit only the v multiplier".into()))
        }
        Side::LeftSided if n > 0 => {
            return Err(TransformError::SideMismatch("left-sided spectra admit only the u multiplier".into()))
        }
        _ => {}
    }
    let g = *spec.grid();
    let (m1, m2) = (kind.axes.mu1.quaternion(), kind.axes.mu2.quaternion());
    let pow = |q: Quaternion, e: u32| (0..e).fold(Quaternion::ONE, |acc, _| acc * q);
    Ok(spec.map(|iu, iv, q| pow(m1 * g.s(iu), m) * q * pow(m2 * g.t(iv), n)))
}
