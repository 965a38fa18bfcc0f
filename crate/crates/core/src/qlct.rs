//! Quaternion linear canonical transforms.
//!
//! Each axis carries a unit-determinant matrix `A = (a, b; c, d)` and the
//! kernel
//!
//! ```text
//! K_A^μ(x, ξ) = e^{−sgn(b) μ π/4} / √(2π|b|) · e^{μ (a x²/2b − x ξ/b + d ξ²/2b)}
//! ```
//!
//! i.e. `1/√(μ 2π b)` on the principal branch. The inverse matrix
//! `(d, −b, −c, a)` gives the conjugate kernel, so the inversion integrals
//! need no extra normalization. For `b = 0` the transform is the chirp
//! multiplication `√d e^{μ c d ξ²/2} f(d ξ)`.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::error::TransformError;
use crate::fast::{fast_grid, qft_fast};
use crate::grid::{GridSpec, Provenance, QSignal2D, QSpectrum2D, Side};
use crate::qft::{axes_close, describe, forward_at, FreqWindow, QftKind};
use crate::quat::{symplectic_split_axes, AxisPair, PureUnit, Quaternion, SplitFlavor};
use crate::sandwich::{apply, AxisOp, Placement};

/// Tolerance on `ad − bc = 1`.
pub const DET_TOL: f64 = 1e-10;
/// `|b|` at or below this is treated as the chirp branch.
pub const DEGENERATE_B: f64 = 1e-12;

/// One axis' parameter matrix `(a, b; c, d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LctParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LctParams {
    /// Reduces the transform to the Fourier transform.
    pub const FOURIER: LctParams = LctParams { a: 0.0, b: 1.0, c: -1.0, d: 0.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, TransformError> {
        let p = Self { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    /// `(cos α, sin α; −sin α, cos α)`.
    pub fn rotation(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        let v = [self.a, self.b, self.c, self.d];
        if v.iter().any(|x| !x.is_finite()) {
            return Err(TransformError::InvalidParams(format!("non-finite entry in {v:?}")));
        }
        let det = self.det();
        if (det - 1.0).abs() > DET_TOL {
            return Err(TransformError::InvalidParams(format!("determinant {det} is not 1")));
        }
        Ok(())
    }

    /// `(d, −b, −c, a)`.
    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn is_degenerate(&self) -> bool {
        self.b.abs() <= DEGENERATE_B
    }

    fn close(&self, o: &LctParams, tol: f64) -> bool {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d].iter().all(|x| x.abs() <= tol)
    }
}

/// Kernel `K_A^μ(x, ξ)`.
pub fn lct_kernel(p: LctParams, axis: PureUnit, x: f64, xi: f64) -> Result<Quaternion, TransformError> {
    if p.is_degenerate() {
        return Err(TransformError::DegenerateB);
    }
    Ok(kernel(p, axis, x, xi))
}

#[inline]
fn kernel(p: LctParams, axis: PureUnit, x: f64, xi: f64) -> Quaternion {
    let b = p.b;
    let theta = (p.a * x * x - 2.0 * x * xi + p.d * xi * xi) / (2.0 * b) - b.signum() * FRAC_PI_4;
    axis.exp(theta) * (1.0 / (2.0 * PI * b.abs()).sqrt())
}

/// Which QLCT: kernel placement, per-axis matrices and axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LctKind {
    pub side: Side,
    pub a1: LctParams,
    pub a2: LctParams,
    pub axes: AxisPair,
}

impl LctKind {
    pub fn new(side: Side, a1: LctParams, a2: LctParams, axes: AxisPair) -> Result<Self, TransformError> {
        a1.validate()?;
        a2.validate()?;
        Ok(Self { side, a1, a2, axes })
    }

    pub fn canonical(side: Side, a1: LctParams, a2: LctParams) -> Result<Self, TransformError> {
        Self::new(side, a1, a2, AxisPair::CANONICAL)
    }

    pub fn matches(&self, o: &LctKind, tol: f64) -> bool {
        self.side == o.side && self.a1.close(&o.a1, tol) && self.a2.close(&o.a2, tol) && axes_close(self.axes, o.axes, tol)
    }
}

/// Order of the inverse kernels relative to the spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelOrder {
    /// Right-sided: `L_R K_{A2⁻¹} K_{A1⁻¹}`; left-sided: `K_{A2⁻¹} K_{A1⁻¹} L_L`.
    #[default]
    Inverting,
    /// The two inverse kernels exchanged: `L_R K_{A1⁻¹} K_{A2⁻¹}` and
    /// `K_{A1⁻¹} K_{A2⁻¹} L_L`. Does not invert non-real signals.
    Swapped,
}

/// Knobs for the inversion integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseOptions {
    /// Multiplies the reconstruction; `1` inverts.
    pub prefactor: f64,
    pub order: KernelOrder,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { prefactor: 1.0, order: KernelOrder::Inverting }
    }
}

fn forward_placement(side: Side) -> Placement {
    match side {
        Side::TwoSided => Placement::Sandwich,
        Side::RightSided => Placement::RightXY,
        Side::LeftSided => Placement::LeftXY,
    }
}

/// Output coordinates along one axis: the window, or for a chirp axis the
/// input samples mapped through `ξ = x/d`.
fn axis_output(p: &LctParams, x_min: f64, dx: f64, n: usize, w_min: f64, dw: f64, nw: usize) -> Result<(f64, f64, usize), TransformError> {
    if p.is_degenerate() {
        if p.d <= 0.0 {
            return Err(TransformError::InvalidParams(format!("chirp branch needs d > 0, got {}", p.d)));
        }
        Ok((x_min / p.d, dx / p.d, n))
    } else {
        Ok((w_min, dw, nw))
    }
}

fn forward_op(p: LctParams, axis: PureUnit, phase: f64, inp: &[f64], dx: f64, out: &[f64]) -> AxisOp {
    let rot = axis.exp(0.5 * phase);
    if p.is_degenerate() {
        let sd = p.d.sqrt();
        AxisOp::Diagonal(out.iter().map(|&xi| rot * axis.exp(0.5 * p.c * p.d * xi * xi) * sd).collect())
    } else {
        AxisOp::dense(out, inp, dx, move |xi, x| rot * kernel(p, axis, x, xi))
    }
}

fn forward_impl(sig: &QSignal2D, kind: LctKind, phase: (f64, f64), out: GridSpec, frft: bool) -> QSpectrum2D {
    let g = sig.grid();
    let (m1, m2) = (kind.axes.mu1, kind.axes.mu2);
    let opx = forward_op(kind.a1, m1, phase.0, &g.s_coords(), g.ds, &out.s_coords());
    let opy = forward_op(kind.a2, m2, phase.1, &g.t_coords(), g.dt, &out.t_coords());
    let side = if sig.is_real() { Side::TwoSided } else { kind.side };
    let (data, _, _) = apply(sig.data(), g.ns, g.nt, &opx, &opy, forward_placement(side));
    let frft_phase = if frft { Some(phase) } else { None };
    QSpectrum2D::from_parts(out, data, Provenance::Qlct { kind, frft_phase })
}

fn output_grid(g: &GridSpec, kind: &LctKind, window: FreqWindow) -> Result<GridSpec, TransformError> {
    let window = FreqWindow::new(window.u_max, window.v_max, window.nu, window.nv)?;
    let w = window.grid();
    let (s0, ds, ns) = axis_output(&kind.a1, g.s_min, g.ds, g.ns, w.s_min, w.ds, w.ns)?;
    let (t0, dt, nt) = axis_output(&kind.a2, g.t_min, g.dt, g.nt, w.t_min, w.dt, w.nt)?;
    Ok(GridSpec::new(s0, t0, ds, dt, ns, nt)?)
}

/// Forward QLCT on the window grid. An axis with `b = 0` instead maps the
/// input samples through `ξ = x/d` and ignores that axis of the window.
pub fn qlct_forward(sig: &QSignal2D, kind: LctKind, window: FreqWindow) -> Result<QSpectrum2D, TransformError> {
    kind.a1.validate()?;
    kind.a2.validate()?;
    let out = output_grid(sig.grid(), &kind, window)?;
    Ok(forward_impl(sig, kind, (0.0, 0.0), out, false))
}

/// Forward QLCT at the midpoints of `out`; both axes must have `b ≠ 0`.
pub fn qlct_forward_on(sig: &QSignal2D, kind: LctKind, out: &GridSpec) -> Result<QSpectrum2D, TransformError> {
    kind.a1.validate()?;
    kind.a2.validate()?;
    if kind.a1.is_degenerate() || kind.a2.is_degenerate() {
        return Err(TransformError::DegenerateB);
    }
    Ok(forward_impl(sig, kind, (0.0, 0.0), *out, false))
}

fn check_provenance(spec: &QSpectrum2D, kind: &LctKind) -> Result<(f64, f64), TransformError> {
    match spec.provenance() {
        Provenance::Qlct { kind: k, frft_phase } if k.matches(kind, 1e-12) => Ok(frft_phase.unwrap_or((0.0, 0.0))),
        other => Err(TransformError::ProvenanceMismatch { expected: format!("{:?} QLCT", kind.side), found: describe(other) }),
    }
}

fn inverse_impl(spec: &QSpectrum2D, kind: LctKind, target: &GridSpec, opts: InverseOptions) -> Result<QSignal2D, TransformError> {
    let phase = check_provenance(spec, &kind)?;
    if kind.a1.is_degenerate() || kind.a2.is_degenerate() {
        return Err(TransformError::DegenerateB);
    }
    let f = spec.grid();
    let (m1, m2) = (kind.axes.mu1, kind.axes.mu2);
    let (i1, i2) = (kind.a1.inverse(), kind.a2.inverse());
    let (r1, r2) = (m1.exp(-0.5 * phase.0), m2.exp(-0.5 * phase.1));
    let opx = AxisOp::dense(&target.s_coords(), &f.s_coords(), f.ds * opts.prefactor, move |s, u| r1 * kernel(i1, m1, u, s));
    let opy = AxisOp::dense(&target.t_coords(), &f.t_coords(), f.dt, move |t, v| r2 * kernel(i2, m2, v, t));
    let placement = match (kind.side, opts.order) {
        (Side::TwoSided, _) => Placement::Sandwich,
        (Side::RightSided, KernelOrder::Inverting) => Placement::RightYX,
        (Side::RightSided, KernelOrder::Swapped) => Placement::RightXY,
        (Side::LeftSided, KernelOrder::Inverting) => Placement::LeftYX,
        (Side::LeftSided, KernelOrder::Swapped) => Placement::LeftXY,
    };
    let (data, _, _) = apply(spec.data(), f.ns, f.nt, &opx, &opy, placement);
    Ok(QSignal2D::from_parts(*target, data))
}

/// `f(s,t) = ∫∫ K_{A1⁻¹}^{μ1}(u,s) L_T(u,v) K_{A2⁻¹}^{μ2}(v,t) du dv` on `target`.
pub fn qlct_inverse_two_sided(spec: &QSpectrum2D, kind: LctKind, target: &GridSpec) -> Result<QSignal2D, TransformError> {
    qlct_inverse_two_sided_with(spec, kind, target, InverseOptions::default())
}

pub fn qlct_inverse_two_sided_with(
    spec: &QSpectrum2D,
    kind: LctKind,
    target: &GridSpec,
    opts: InverseOptions,
) -> Result<QSignal2D, TransformError> {
    if kind.side != Side::TwoSided {
        return Err(TransformError::SideMismatch(format!("expected a two-sided kind, got {:?}", kind.side)));
    }
    inverse_impl(spec, kind, target, opts)
}

/// Right-sided `∫∫ L_R K_{A2⁻¹}(v,t) K_{A1⁻¹}(u,s)` or left-sided
/// `∫∫ K_{A2⁻¹}(v,t) K_{A1⁻¹}(u,s) L_L` on `target`.
pub fn qlct_inverse_sided(spec: &QSpectrum2D, kind: LctKind, target: &GridSpec) -> Result<QSignal2D, TransformError> {
    qlct_inverse_sided_with(spec, kind, target, InverseOptions::default())
}

pub fn qlct_inverse_sided_with(
    spec: &QSpectrum2D,
    kind: LctKind,
    target: &GridSpec,
    opts: InverseOptions,
) -> Result<QSignal2D, TransformError> {
    if kind.side == Side::TwoSided {
        return Err(TransformError::SideMismatch("expected a sided kind".into()));
    }
    inverse_impl(spec, kind, target, opts)
}

/// How the QFT inside [`qlct_via_qft`] is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QftBackend {
    /// Midpoint quadrature at the scaled window frequencies.
    Quadrature(FreqWindow),
    /// FFT; the output grid is the FFT grid scaled by `(b1, b2)`.
    Fast,
}

/// Two-sided QLCT through one QFT:
/// `L_T(u,v) = C1(u) P_T(u/b1, v/b2) C2(v)` with
/// `p = e^{μ1 a1 s²/2b1} f e^{μ2 a2 t²/2b2}` and
/// `C(u) = e^{−sgn(b) μ π/4} e^{μ d u²/2b} / √(2π|b|)`.
pub fn qlct_via_qft(sig: &QSignal2D, kind: LctKind, backend: QftBackend) -> Result<QSpectrum2D, TransformError> {
    kind.a1.validate()?;
    kind.a2.validate()?;
    if kind.side != Side::TwoSided {
        return Err(TransformError::SideMismatch("the chirp–QFT–chirp factorization is two-sided".into()));
    }
    if kind.a1.is_degenerate() || kind.a2.is_degenerate() {
        return Err(TransformError::DegenerateB);
    }
    let g = *sig.grid();
    let (p1, p2) = (kind.a1, kind.a2);
    let (m1, m2) = (kind.axes.mu1, kind.axes.mu2);
    let left: Vec<Quaternion> = g.s_coords().iter().map(|&s| m1.exp(p1.a * s * s / (2.0 * p1.b))).collect();
    let right: Vec<Quaternion> = g.t_coords().iter().map(|&t| m2.exp(p2.a * t * t / (2.0 * p2.b))).collect();
    let ns = g.ns;
    let chirped: Vec<Quaternion> = sig
        .data()
        .par_iter()
        .enumerate()
        .map(|(k, &q)| left[k % ns] * q * right[k / ns])
        .collect();
    let p = QSignal2D::new(g, chirped)?;
    let qkind = QftKind::new(Side::TwoSided, kind.axes);

    let (out, pt) = match backend {
        QftBackend::Quadrature(window) => {
            let w = FreqWindow::new(window.u_max, window.v_max, window.nu, window.nv)?.grid();
            let us: Vec<f64> = w.s_coords().iter().map(|u| u / p1.b).collect();
            let vs: Vec<f64> = w.t_coords().iter().map(|v| v / p2.b).collect();
            (w, forward_at(&p, qkind, &us, &vs))
        }
        QftBackend::Fast => {
            if p1.b < 0.0 || p2.b < 0.0 {
                return Err(TransformError::InvalidParams("the FFT backend needs b > 0 on both axes".into()));
            }
            let fg = fast_grid(&g);
            let out = GridSpec::new(fg.s_min * p1.b, fg.t_min * p2.b, fg.ds * p1.b, fg.dt * p2.b, fg.ns, fg.nt)?;
            (out, qft_fast(&p, qkind)?.data().to_vec())
        }
    };
    let post = |p: LctParams, axis: PureUnit, x: f64| {
        axis.exp(p.d * x * x / (2.0 * p.b) - p.b.signum() * FRAC_PI_4) * (1.0 / (2.0 * PI * p.b.abs()).sqrt())
    };
    let cu: Vec<Quaternion> = out.s_coords().iter().map(|&u| post(p1, m1, u)).collect();
    let cv: Vec<Quaternion> = out.t_coords().iter().map(|&v| post(p2, m2, v)).collect();
    let nu = out.ns;
    let data = pt.par_iter().enumerate().map(|(k, &q)| cu[k % nu] * q * cv[k / nu]).collect();
    Ok(QSpectrum2D::from_parts(out, data, Provenance::Qlct { kind, frft_phase: None }))
}

/// Sided QLCT assembled from two-sided transforms of the symplectic parts:
///
/// ```text
/// L_R(f) = L_T^{μ1,μ2}(f_a) + L_T^{−μ1,μ2}(f_b) μ2     f = f_a + f_b μ2
/// L_L(f) = L_T^{μ1,μ2}(f_d) + μ1 L_T^{μ1,−μ2}(f_e)     f = f_d + μ1 f_e
/// ```
pub fn sided_decompose_transform(sig: &QSignal2D, kind: LctKind, out: &GridSpec) -> Result<QSpectrum2D, TransformError> {
    let flavor = match kind.side {
        Side::RightSided => SplitFlavor::Right,
        Side::LeftSided => SplitFlavor::Left,
        Side::TwoSided => return Err(TransformError::SideMismatch("expected a sided kind".into())),
    };
    let axes = kind.axes;
    let splits: Vec<_> = sig.data().iter().map(|&q| symplectic_split_axes(q, flavor, axes)).collect();
    let first = QSignal2D::new(*sig.grid(), splits.iter().map(|s| s.first(axes)).collect())?;
    let second_vals: Vec<Quaternion> = splits.iter().map(|s| s.second(axes)).collect();
    let two = LctKind { side: Side::TwoSided, ..kind };
    let t1 = qlct_forward_on(&first, two, out)?;
    let mut data = t1.data().to_vec();
    if second_vals.iter().any(|q| *q != Quaternion::ZERO) {
        let second = QSignal2D::new(*sig.grid(), second_vals)?;
        let flipped = match flavor {
            SplitFlavor::Right => AxisPair::new(-axes.mu1, axes.mu2)?,
            SplitFlavor::Left => AxisPair::new(axes.mu1, -axes.mu2)?,
        };
        let t2 = qlct_forward_on(&second, LctKind { axes: flipped, ..two }, out)?;
        let (m1, m2) = (axes.mu1.quaternion(), axes.mu2.quaternion());
        for (o, &x) in data.iter_mut().zip(t2.data()) {
            *o += match flavor {
                SplitFlavor::Right => x * m2,
                SplitFlavor::Left => m1 * x,
            };
        }
    }
    Ok(QSpectrum2D::from_parts(*out, data, Provenance::Qlct { kind, frft_phase: None }))
}

/// Fractional transform of angles `(α, β)`: the QLCT with rotation matrices.
/// With `phase_corrected` each kernel is multiplied by `e^{μ α/2}` (resp.
/// `β`), removing the constant phase the raw QLCT carries relative to the
/// fractional Fourier transform.
pub fn qfrft(
    sig: &QSignal2D,
    alpha: f64,
    beta: f64,
    side: Side,
    axes: AxisPair,
    phase_corrected: bool,
    window: FreqWindow,
) -> Result<QSpectrum2D, TransformError> {
    for ang in [alpha, beta] {
        if ang.sin().abs() <= DEGENERATE_B {
            return Err(TransformError::DegenerateAngle(ang));
        }
    }
    let kind = LctKind { side, a1: LctParams::rotation(alpha), a2: LctParams::rotation(beta), axes };
    let out = output_grid(sig.grid(), &kind, window)?;
    let phase = if phase_corrected { (alpha, beta) } else { (0.0, 0.0) };
    Ok(forward_impl(sig, kind, phase, out, phase_corrected))
}

/// Inverts a QLCT or fractional-transform spectrum using the side recorded
/// in its provenance.
pub fn qlct_inverse(spec: &QSpectrum2D, target: &GridSpec) -> Result<QSignal2D, TransformError> {
    let kind = match spec.provenance() {
        Provenance::Qlct { kind, .. } => *kind,
        other => return Err(TransformError::ProvenanceMismatch { expected: "QLCT".into(), found: describe(other) }),
    };
    inverse_impl(spec, kind, target, InverseOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{linf_diff, sample, FnField};
    use crate::qft::qft_forward_on;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(n: usize, seed: u64) -> QSignal2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GridSpec::symmetric(n, 1.5).unwrap();
        let data = (0..n * n)
            .map(|_| Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        QSignal2D::new(g, data).unwrap()
    }

    fn max_diff(a: &[Quaternion], b: &[Quaternion]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn parameter_validation() {
        assert!(LctParams::new(1.0, 1.0, 0.0, 1.0).is_ok());
        assert!(LctParams::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(LctParams::new(f64::NAN, 1.0, 0.0, 1.0).is_err());
        let p = LctParams::new(2.0, 0.5, 1.0, 0.75).unwrap();
        assert_eq!(p.inverse().det(), p.det());
        assert!(LctParams::rotation(0.7).validate().is_ok());
    }

    #[test]
    fn kernel_examples() {
        let f = LctParams::FOURIER;
        let (x, xi) = (0.7, -1.3);
        let k = lct_kernel(f, PureUnit::I, x, xi).unwrap();
        let want = PureUnit::I.exp(-FRAC_PI_4) * PureUnit::I.exp(-x * xi) * (1.0 / (2.0 * PI).sqrt());
        assert!((k - want).abs() < 1e-15);
        let p = LctParams::new(2.0, 0.5, 1.0, 0.75).unwrap();
        let k0 = lct_kernel(p, PureUnit::J, 0.0, 0.0).unwrap();
        assert!((k0 - PureUnit::J.exp(-FRAC_PI_4) * (1.0 / PI.sqrt())).abs() < 1e-15);
        for &(x, xi) in &[(0.0, 3.0), (-5.0, 2.0), (10.0, -10.0)] {
            assert!((lct_kernel(p, PureUnit::K, x, xi).unwrap().abs() - 1.0 / PI.sqrt()).abs() < 1e-14);
        }
        let deg = LctParams::new(1.0, 0.0, 0.5, 1.0).unwrap();
        assert!(matches!(lct_kernel(deg, PureUnit::I, 0.0, 0.0), Err(TransformError::DegenerateB)));
    }

    #[test]
    fn inverse_kernel_is_conjugate() {
        let p = LctParams::new(2.0, 0.5, 1.0, 0.75).unwrap();
        for &(x, xi) in &[(0.3, -0.2), (1.7, 2.5)] {
            let a = kernel(p.inverse(), PureUnit::I, xi, x);
            let b = kernel(p, PureUnit::I, x, xi).conj();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn fourier_matrix_reduces_to_qft() {
        let sig = random_signal(10, 31);
        let w = FreqWindow::square(2.0, 8).unwrap();
        let kind = LctKind::canonical(Side::TwoSided, LctParams::FOURIER, LctParams::FOURIER).unwrap();
        let l = qlct_forward(&sig, kind, w).unwrap();
        let f = qft_forward_on(&sig, QftKind::canonical(Side::TwoSided), &w.grid()).unwrap();
        let (cl, cr) = (PureUnit::I.exp(-FRAC_PI_4), PureUnit::J.exp(-FRAC_PI_4));
        let want: Vec<Quaternion> = f.data().iter().map(|&q| cl * q * cr * (1.0 / (2.0 * PI))).collect();
        assert!(max_diff(l.data(), &want) < 1e-12);
    }

    #[test]
    fn identity_chirp_branch() {
        let sig = random_signal(6, 32);
        let ident = LctParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        let w = FreqWindow::square(2.0, 5).unwrap();
        for side in [Side::TwoSided, Side::RightSided, Side::LeftSided] {
            let kind = LctKind::canonical(side, ident, ident).unwrap();
            let l = qlct_forward(&sig, kind, w).unwrap();
            assert_eq!(l.grid(), sig.grid());
            assert!(max_diff(l.data(), sig.data()) < 1e-15);
        }
    }

    #[test]
    fn scaled_chirp_branch() {
        let sig = random_signal(6, 33);
        let p = LctParams::new(0.5, 0.0, 0.3, 2.0).unwrap();
        let w = FreqWindow::square(2.0, 4).unwrap();
        let kind = LctKind::canonical(Side::TwoSided, p, LctParams::FOURIER).unwrap();
        let l = qlct_forward(&sig, kind, w).unwrap();
        assert_eq!(l.grid().ns, 6);
        assert!((l.grid().ds - sig.grid().ds / 2.0).abs() < 1e-15);
        assert!(matches!(qlct_forward_on(&sig, kind, &w.grid()), Err(TransformError::DegenerateB)));
        let neg = LctParams::new(-2.0, 0.0, 0.3, -0.5).unwrap();
        let kind = LctKind::canonical(Side::TwoSided, neg, LctParams::FOURIER).unwrap();
        assert!(matches!(qlct_forward(&sig, kind, w), Err(TransformError::InvalidParams(_))));
    }

    #[test]
    fn via_qft_matches_direct() {
        let sig = random_signal(12, 34);
        let w = FreqWindow::new(2.0, 3.0, 9, 11).unwrap();
        for (a1, a2) in [
            (LctParams::new(1.0, 1.0, 0.0, 1.0).unwrap(), LctParams::new(2.0, 0.5, 1.0, 0.75).unwrap()),
            (LctParams::new(0.5, -2.0, 0.5, 0.0).unwrap(), LctParams::rotation(-0.4)),
        ] {
            let kind = LctKind::canonical(Side::TwoSided, a1, a2).unwrap();
            let a = qlct_via_qft(&sig, kind, QftBackend::Quadrature(w)).unwrap();
            let b = qlct_forward(&sig, kind, w).unwrap();
            assert!(max_diff(a.data(), b.data()) < 1e-12);
        }
    }

    #[test]
    fn via_fast_qft_matches_direct() {
        let sig = random_signal(16, 35);
        let kind = LctKind::canonical(
            Side::TwoSided,
            LctParams::new(1.0, 1.0, 0.0, 1.0).unwrap(),
            LctParams::new(2.0, 0.5, 1.0, 0.75).unwrap(),
        )
        .unwrap();
        let a = qlct_via_qft(&sig, kind, QftBackend::Fast).unwrap();
        let b = qlct_forward_on(&sig, kind, a.grid()).unwrap();
        assert!(max_diff(a.data(), b.data()) < 1e-11);
    }

    #[test]
    fn decomposition_matches_direct() {
        let sig = random_signal(8, 36);
        let out = FreqWindow::square(2.5, 7).unwrap().grid();
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let tilted = AxisPair::new(PureUnit::new(s2, 0.0, s2).unwrap(), PureUnit::J).unwrap();
        for axes in [AxisPair::CANONICAL, tilted] {
            for side in [Side::RightSided, Side::LeftSided] {
                let kind = LctKind::new(side, LctParams::new(1.0, 1.0, 0.0, 1.0).unwrap(), LctParams::rotation(0.9), axes).unwrap();
                let a = sided_decompose_transform(&sig, kind, &out).unwrap();
                let b = qlct_forward_on(&sig, kind, &out).unwrap();
                assert!(max_diff(a.data(), b.data()) < 1e-12, "{side:?}");
            }
        }
    }

    #[test]
    fn side_checks() {
        let sig = random_signal(4, 37);
        let w = FreqWindow::square(1.0, 4).unwrap();
        let kind = LctKind::canonical(Side::RightSided, LctParams::FOURIER, LctParams::FOURIER).unwrap();
        let spec = qlct_forward(&sig, kind, w).unwrap();
        assert!(matches!(qlct_inverse_two_sided(&spec, kind, sig.grid()), Err(TransformError::SideMismatch(_))));
        let two = LctKind { side: Side::TwoSided, ..kind };
        assert!(matches!(qlct_inverse_sided(&spec, two, sig.grid()), Err(TransformError::SideMismatch(_))));
        let left = LctKind { side: Side::LeftSided, ..kind };
        assert!(matches!(qlct_inverse_sided(&spec, left, sig.grid()), Err(TransformError::ProvenanceMismatch { .. })));
        assert!(matches!(qlct_via_qft(&sig, kind, QftBackend::Fast), Err(TransformError::SideMismatch(_))));
    }

    #[test]
    fn degenerate_angle() {
        let sig = random_signal(4, 38);
        let w = FreqWindow::square(1.0, 4).unwrap();
        let r = qfrft(&sig, PI, 0.5, Side::TwoSided, AxisPair::CANONICAL, true, w);
        assert!(matches!(r, Err(TransformError::DegenerateAngle(_))));
    }

    #[test]
    fn frft_quarter_turn_is_scaled_qft() {
        let sig = random_signal(10, 39);
        let w = FreqWindow::square(2.0, 8).unwrap();
        let f = qft_forward_on(&sig, QftKind::canonical(Side::TwoSided), &w.grid()).unwrap();
        let h = PI / 2.0;
        let corrected = qfrft(&sig, h, h, Side::TwoSided, AxisPair::CANONICAL, true, w).unwrap();
        let want: Vec<Quaternion> = f.data().iter().map(|&q| q * (1.0 / (2.0 * PI))).collect();
        assert!(max_diff(corrected.data(), &want) < 1e-12);
        let raw = qfrft(&sig, h, h, Side::TwoSided, AxisPair::CANONICAL, false, w).unwrap();
        let (cl, cr) = (PureUnit::I.exp(-FRAC_PI_4), PureUnit::J.exp(-FRAC_PI_4));
        let want: Vec<Quaternion> = f.data().iter().map(|&q| cl * q * cr * (1.0 / (2.0 * PI))).collect();
        assert!(max_diff(raw.data(), &want) < 1e-12);
    }

    #[test]
    fn gaussian_is_frft_eigenfunction() {
        let g = GridSpec::symmetric(128, 9.0).unwrap();
        let sig = sample(&FnField(|s: f64, t: f64| Quaternion::real((-(s * s + t * t) / 2.0).exp())), &g).unwrap();
        let w = FreqWindow::square(4.0, 17).unwrap();
        for &(a, b) in &[(0.3, 1.1), (2.0, -0.7)] {
            for corrected in [true, false] {
                let l = qfrft(&sig, a, b, Side::TwoSided, AxisPair::CANONICAL, corrected, w).unwrap();
                let fg = l.grid();
                for iv in 0..fg.nt {
                    for iu in 0..fg.ns {
                        let (u, v) = (fg.s(iu), fg.t(iv));
                        let want = (-(u * u + v * v) / 2.0).exp();
                        assert!((l.at(iu, iv).abs() - want).abs() < 1e-10, "({a},{b}) at ({u},{v})");
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_through_negative_angles() {
        let g = GridSpec::symmetric(96, 8.0).unwrap();
        let sig = sample(&FnField(|s: f64, t: f64| Quaternion::new(1.0, 0.5, -0.3, 0.2) * (-(s * s + t * t)).exp()), &g).unwrap();
        let w = FreqWindow::square(8.0, 96).unwrap();
        let (a, b) = (0.8, 1.2);
        let l = qfrft(&sig, a, b, Side::TwoSided, AxisPair::CANONICAL, true, w).unwrap();
        let back = qfrft(&l.as_signal(), -a, -b, Side::TwoSided, AxisPair::CANONICAL, true, FreqWindow::square(8.0, 96).unwrap()).unwrap();
        assert!(linf_diff(&back.as_signal(), &sig).unwrap() < 1e-6);
        for side in [Side::TwoSided, Side::RightSided, Side::LeftSided] {
            let l = qfrft(&sig, a, b, side, AxisPair::CANONICAL, true, w).unwrap();
            let back = qlct_inverse(&l, &g).unwrap();
            assert!(linf_diff(&back, &sig).unwrap() < 1e-6, "{side:?}");
        }
    }
}
