//! Pointwise convergence machinery: truncated (Dirichlet) inversion, the
//! quadrant jump average η, Gauss–Weierstrass means and a truncated-domain
//! diagnostic for the L-class condition.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use thiserror::Error;

use crate::error::TransformError;
use crate::grid::{l1_diff, Field2D, GridError, GridSpec, Provenance, QSignal2D, QSpectrum2D, Side};
use crate::qft::{describe, qft_inverse};
use crate::quadrature::{panel_edges, Rule};
use crate::quat::Quaternion;
use crate::sandwich::{apply, AxisOp, Placement};

/// Uniform bound on `|∫_a^b sin t / t dt|`.
pub const SINC_BOUND: f64 = 6.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothingError {
    #[error("window must be positive, got M = {0}, N = {1}")]
    NonPositiveWindow(f64, f64),
    #[error("window M = {m}, N = {n} exceeds the spectrum box ({u_max}, {v_max})")]
    WindowBeyondSpectrum { m: f64, n: f64, u_max: f64, v_max: f64 },
    #[error("field has no finite support box; the sinc path needs one")]
    UnboundedSupport,
    #[error("quadrant {quadrant} did not converge: successive extrapolants differ by {spread:.3e}")]
    NonConvergent { quadrant: usize, spread: f64 },
    #[error("no section with finite one-dimensional mass was found")]
    NoIntegrableSection,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Where the truncated inversion takes its data from.
#[derive(Clone, Copy)]
pub enum PartialSource<'a> {
    /// A QFT spectrum; the inversion integral is restricted to `|u| ≤ M`,
    /// `|v| ≤ N`.
    Spectrum(&'a QSpectrum2D),
    /// An analytic field convolved with the product of Dirichlet kernels.
    Field(&'a dyn Field2D),
}

/// Truncated inversion at `(x0, y0)` with frequency box `[−M, M] × [−N, N]`.
pub fn dirichlet_partial_inverse(src: PartialSource<'_>, point: (f64, f64), m: f64, n: f64) -> Result<Quaternion, SmoothingError> {
    match src {
        PartialSource::Spectrum(spec) => partial_inverse_spectrum(spec, point, m, n),
        PartialSource::Field(f) => partial_inverse_sinc(f, point, m, n),
    }
}

fn check_window(m: f64, n: f64) -> Result<(), SmoothingError> {
    if !(m.is_finite() && n.is_finite() && m > 0.0 && n > 0.0) {
        return Err(SmoothingError::NonPositiveWindow(m, n));
    }
    Ok(())
}

/// Midpoint sum of `(1/4π²) ∫∫ e^{μ1 u x0} F e^{μ2 v y0}` (kernel order
/// following the spectrum's side) over the cells whose centres lie in the
/// window.
pub fn partial_inverse_spectrum(spec: &QSpectrum2D, point: (f64, f64), m: f64, n: f64) -> Result<Quaternion, SmoothingError> {
    check_window(m, n)?;
    let kind = match spec.provenance() {
        Provenance::Qft(k) => *k,
        other => {
            return Err(TransformError::ProvenanceMismatch { expected: "QFT".into(), found: describe(other) }.into());
        }
    };
    let g = spec.grid();
    let slack_u = 0.5 * g.ds;
    let slack_v = 0.5 * g.dt;
    let u_max = g.s_min.abs().max(g.s_max().abs());
    let v_max = g.t_min.abs().max(g.t_max().abs());
    if m > u_max + slack_u || n > v_max + slack_v {
        return Err(SmoothingError::WindowBeyondSpectrum { m, n, u_max, v_max });
    }
    let (x0, y0) = point;
    let (mu1, mu2) = (kind.axes.mu1, kind.axes.mu2);
    let cols: Vec<(usize, Quaternion)> = (0..g.ns)
        .map(|k| (k, g.s(k)))
        .filter(|&(_, u)| u.abs() <= m + 1e-12 * m)
        .map(|(k, u)| (k, mu1.exp(u * x0)))
        .collect();
    let rows: Vec<(usize, Quaternion)> = (0..g.nt)
        .map(|k| (k, g.t(k)))
        .filter(|&(_, v)| v.abs() <= n + 1e-12 * n)
        .map(|(k, v)| (k, mu2.exp(v * y0)))
        .collect();
    let sum: Quaternion = rows
        .par_iter()
        .map(|&(iv, ey)| {
            cols.iter()
                .map(|&(iu, ex)| {
                    let f = spec.at(iu, iv);
                    match kind.side {
                        Side::TwoSided => ex * f * ey,
                        Side::RightSided => f * ey * ex,
                        Side::LeftSided => ey * ex * f,
                    }
                })
                .sum::<Quaternion>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(sum * (g.cell_area() / (4.0 * PI * PI)))
}

const SINC_NODES: usize = 12;
const MAX_PANEL: f64 = 0.5;

/// `sin(Mx) / (πx)`, continuous at zero.
fn dirichlet(m: f64, x: f64) -> f64 {
    let y = m * x;
    if y.abs() < 1e-8 {
        m / PI * (1.0 - y * y / 6.0)
    } else {
        y.sin() / (PI * x)
    }
}

/// Panel edges on `[lo, hi]` at the zeros of `sin(M (x0 − σ))`, at `cuts`,
/// and at most `MAX_PANEL` apart.
fn half_period_edges(lo: f64, hi: f64, x0: f64, m: f64, cuts: &[f64]) -> Vec<f64> {
    let step = PI / m;
    let k_lo = ((x0 - hi) / step).floor() as i64;
    let k_hi = ((x0 - lo) / step).ceil() as i64;
    let zeros = (k_lo..=k_hi).map(|k| x0 - k as f64 * step);
    let coarse = panel_edges(lo, hi, zeros.chain(cuts.iter().copied()));
    let mut out = vec![coarse[0]];
    for w in coarse.windows(2) {
        let pieces = ((w[1] - w[0]) / MAX_PANEL).ceil().max(1.0) as usize;
        for p in 1..=pieces {
            out.push(w[0] + (w[1] - w[0]) * p as f64 / pieces as f64);
        }
    }
    out
}

/// Nodes and weights of `∫_lo^hi g(σ) D_M(x0 − σ) dσ`.
fn sinc_nodes(lo: f64, hi: f64, x0: f64, m: f64, cuts: &[f64], rule: &Rule) -> Vec<(f64, f64)> {
    let edges = half_period_edges(lo, hi, x0, m, cuts);
    edges
        .windows(2)
        .flat_map(|w| rule.on(w[0], w[1]).map(|(x, wt)| (x, wt * dirichlet(m, x0 - x))).collect::<Vec<_>>())
        .collect()
}

/// `∫∫ f(σ, τ) D_M(x0 − σ) D_N(y0 − τ) dσ dτ` over the field's support box,
/// integrating panel by panel between consecutive zeros of the kernels.
pub fn partial_inverse_sinc(field: &dyn Field2D, point: (f64, f64), m: f64, n: f64) -> Result<Quaternion, SmoothingError> {
    check_window(m, n)?;
    let [s_lo, s_hi, t_lo, t_hi] = field.support().ok_or(SmoothingError::UnboundedSupport)?;
    let rule = Rule::new(SINC_NODES);
    let xs = sinc_nodes(s_lo, s_hi, point.0, m, &field.breaks_s(), &rule);
    let ys = sinc_nodes(t_lo, t_hi, point.1, n, &field.breaks_t(), &rule);
    let sum: Quaternion = ys
        .par_iter()
        .map(|&(t, wt)| xs.iter().map(|&(s, ws)| field.eval(s, t) * ws).sum::<Quaternion>() * wt)
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(sum)
}

/// `∫_0^r sin(Ms) / (πs) ds` by half-period panels.
pub fn half_line_sinc_mass(m: f64, r: f64) -> Result<f64, SmoothingError> {
    check_window(m, m)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(SmoothingError::InvalidParams(format!("radius must be positive, got {r}")));
    }
    let rule = Rule::new(SINC_NODES);
    Ok(sinc_nodes(0.0, r, 0.0, m, &[], &rule).iter().map(|&(_, w)| w).sum())
}

/// Sine integral `Si(x) = ∫_0^x sin t / t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= 64.0 {
        let rule = Rule::new(16);
        let edges = panel_edges(0.0, x, (1..).map(|k| k as f64 * FRAC_PI_2).take_while(|&c| c < x));
        edges
            .windows(2)
            .map(|w| rule.integrate(w[0], w[1], |t| t.sin() / t))
            .sum()
    } else {
        // Si(x) = π/2 − f(x) cos x − g(x) sin x with the asymptotic series
        // f ~ (1/x) Σ (−1)^k (2k)!/x^{2k}, g ~ (1/x²) Σ (−1)^k (2k+1)!/x^{2k}
        let inv2 = 1.0 / (x * x);
        let (mut f, mut g) = (0.0, 0.0);
        let (mut tf, mut tg) = (1.0, 1.0);
        for k in 0..20 {
            f += tf;
            g += tg;
            let kf = k as f64;
            let nf = -tf * (2.0 * kf + 1.0) * (2.0 * kf + 2.0) * inv2;
            let ng = -tg * (2.0 * kf + 2.0) * (2.0 * kf + 3.0) * inv2;
            if nf.abs() > tf.abs() || ng.abs() > tg.abs() {
                break;
            }
            tf = nf;
            tg = ng;
        }
        FRAC_PI_2 - f / x * x.cos() - g * inv2 * x.sin()
    }
}

/// `|∫_a^b sin t / t dt|`, which never exceeds [`SINC_BOUND`].
pub fn sinc_integral_bound_check(a: f64, b: f64) -> f64 {
    let v = (sine_integral(b) - sine_integral(a)).abs();
    debug_assert!(v <= SINC_BOUND, "sinc integral over ({a}, {b}) is {v}");
    v
}

/// Quadrant limits of `f` at a point and their mean η.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpAverage {
    pub value: Quaternion,
    /// Limits from the `(+,+)`, `(+,−)`, `(−,+)` and `(−,−)` quadrants.
    pub quadrant_values: [Quaternion; 4],
    pub h_sequence: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaOptions {
    pub h0: f64,
    pub levels: usize,
    /// Relative tolerance on the last two extrapolants.
    pub tol: f64,
}

impl Default for EtaOptions {
    fn default() -> Self {
        Self { h0: 1e-2, levels: 10, tol: 1e-6 }
    }
}

pub const QUADRANTS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Estimates the four quadrant limits along the diagonals
/// `(x0 ± h, y0 ± h)`, `h = h0 · 2^{−k}`, with first-order Richardson
/// extrapolation.
pub fn eta_jump_average(field: &dyn Field2D, point: (f64, f64), opts: EtaOptions) -> Result<JumpAverage, SmoothingError> {
    if !(opts.h0.is_finite() && opts.h0 > 0.0) || opts.levels < 2 || !(opts.tol > 0.0) {
        return Err(SmoothingError::InvalidParams(format!("{opts:?}")));
    }
    let h: Vec<f64> = (0..=opts.levels).map(|k| opts.h0 * 0.5f64.powi(k as i32)).collect();
    let mut quadrant_values = [Quaternion::ZERO; 4];
    for (qi, &(ss, st)) in QUADRANTS.iter().enumerate() {
        let v: Vec<Quaternion> = h.iter().map(|&hk| field.eval(point.0 + ss * hk, point.1 + st * hk)).collect();
        let r: Vec<Quaternion> = v.windows(2).map(|w| w[1] * 2.0 - w[0]).collect();
        let last = r[r.len() - 1];
        let spread = (last - r[r.len() - 2]).abs();
        if !spread.is_finite() || spread > opts.tol * last.abs().max(1.0) {
            return Err(SmoothingError::NonConvergent { quadrant: qi, spread });
        }
        quadrant_values[qi] = last;
    }
    let value = quadrant_values.iter().copied().sum::<Quaternion>() * 0.25;
    Ok(JumpAverage { value, quadrant_values, h_sequence: h })
}

fn check_alpha(alpha: f64) -> Result<(), SmoothingError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(SmoothingError::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// `W(s, t) = e^{−(s²+t²)/4α} / (4πα)` sampled at the cell midpoints.
pub fn gauss_weierstrass_kernel(alpha: f64, grid: &GridSpec) -> Result<QSignal2D, SmoothingError> {
    check_alpha(alpha)?;
    let c = 1.0 / (4.0 * PI * alpha);
    let ns = grid.ns;
    let data = (0..grid.len())
        .map(|k| {
            let (s, t) = (grid.s(k % ns), grid.t(k / ns));
            Quaternion::real(c * (-(s * s + t * t) / (4.0 * alpha)).exp())
        })
        .collect();
    Ok(QSignal2D::new(*grid, data)?)
}

/// Gauss parameter and a strictly decreasing schedule of further values.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussMeanParams {
    pub alpha: f64,
    pub schedule: Vec<f64>,
}

impl GaussMeanParams {
    /// Starts at the first schedule entry.
    pub fn new(schedule: Vec<f64>) -> Result<Self, SmoothingError> {
        let alpha = *schedule
            .first()
            .ok_or_else(|| SmoothingError::InvalidParams("empty schedule".into()))?;
        let p = Self { alpha, schedule };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SmoothingError> {
        check_alpha(self.alpha)?;
        for &a in &self.schedule {
            check_alpha(a)?;
        }
        if self.schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(SmoothingError::InvalidParams(format!("schedule must be strictly decreasing: {:?}", self.schedule)));
        }
        Ok(())
    }
}

/// One step of the Gauss-mean sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussMeanStep {
    pub alpha: f64,
    pub signal: QSignal2D,
    /// `‖f ∗ W_α − f‖₁` against the supplied reference.
    pub l1_error: Option<f64>,
}

/// `(1/4π²) ∫∫ e^{μ1 s u} F(u, v) e^{μ2 t v} e^{−α(u²+v²)} du dv` on `target`.
pub fn gauss_mean_at(spec: &QSpectrum2D, alpha: f64, target: &GridSpec) -> Result<QSignal2D, SmoothingError> {
    check_alpha(alpha)?;
    let kind = match spec.provenance() {
        Provenance::Qft(k) if k.side == Side::TwoSided => *k,
        other => {
            return Err(TransformError::ProvenanceMismatch { expected: "TwoSided QFT".into(), found: describe(other) }.into());
        }
    };
    let g = *spec.grid();
    let damped = spec.map(|iu, iv, q| {
        let (u, v) = (g.s(iu), g.t(iv));
        q * (-alpha * (u * u + v * v)).exp()
    });
    Ok(qft_inverse(&damped, kind, target)?)
}

/// Gauss means along the schedule, with L¹ errors when `reference` is given.
pub fn gauss_mean_inverse(
    spec: &QSpectrum2D,
    params: &GaussMeanParams,
    target: &GridSpec,
    reference: Option<&QSignal2D>,
) -> Result<Vec<GaussMeanStep>, SmoothingError> {
    params.validate()?;
    params
        .schedule
        .iter()
        .map(|&alpha| {
            let signal = gauss_mean_at(spec, alpha, target)?;
            let l1_error = reference.map(|r| l1_diff(&signal, r)).transpose()?;
            Ok(GaussMeanStep { alpha, signal, l1_error })
        })
        .collect()
}

/// Direct midpoint convolution `f ∗ W_α` on the signal's own grid.
pub fn gauss_convolve(sig: &QSignal2D, alpha: f64) -> Result<QSignal2D, SmoothingError> {
    check_alpha(alpha)?;
    let g = *sig.grid();
    let c = 1.0 / (4.0 * PI * alpha).sqrt();
    let w = |a: f64, b: f64| Quaternion::real(c * (-(a - b) * (a - b) / (4.0 * alpha)).exp());
    let sc = g.s_coords();
    let tc = g.t_coords();
    let opx = AxisOp::dense(&sc, &sc, g.ds, w);
    let opy = AxisOp::dense(&tc, &tc, g.dt, w);
    let (data, _, _) = apply(sig.data(), g.ns, g.nt, &opx, &opy, Placement::Sandwich);
    Ok(QSignal2D::new(g, data)?)
}

/// `~f(s, t)`: the sum of `f` over the four mirrored points around `(x0, y0)`.
pub fn quadrant_sum(field: &dyn Field2D, point: (f64, f64), s: f64, t: f64) -> Quaternion {
    let (x0, y0) = point;
    field.eval(x0 - s, y0 - t) + field.eval(x0 + s, y0 + t) + field.eval(x0 - s, y0 + t) + field.eval(x0 + s, y0 - t)
}

const LC_NODES: usize = 10;
const LC_LEVELS: i32 = 40;

/// Geometric panels on `(0, eps]` refining toward zero, where the `1/s`
/// weight lives.
fn near_zero_nodes(eps: f64, rule: &Rule) -> Vec<(f64, f64)> {
    (0..LC_LEVELS)
        .flat_map(|k| {
            let hi = eps * 0.5f64.powi(k);
            rule.on(0.5 * hi, hi).collect::<Vec<_>>()
        })
        .collect()
}

/// Panels on `[lo, hi]` at most `MAX_PANEL` long, split at `cuts`.
fn plain_nodes(lo: f64, hi: f64, cuts: &[f64], rule: &Rule) -> Vec<(f64, f64)> {
    let coarse = panel_edges(lo, hi, cuts.iter().copied());
    coarse
        .windows(2)
        .flat_map(|w| {
            let pieces = ((w[1] - w[0]) / MAX_PANEL).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / pieces as f64;
            (0..pieces).flat_map(move |p| rule.on(w[0] + p as f64 * h, w[0] + (p + 1) as f64 * h).collect::<Vec<_>>())
        })
        .collect()
}

/// Distances from `c` to the breaks, which are the kinks of `~f`.
fn mirrored_cuts(breaks: &[f64], c: f64) -> Vec<f64> {
    breaks.iter().map(|b| (b - c).abs()).collect()
}

/// Candidate sections `a` (or `b`) near the origin of the mirrored variable.
fn section_candidates(eps: f64) -> [f64; 4] {
    [0.0, 0.25 * eps, 0.5 * eps, eps]
}

/// Truncated estimates of the two L-class integrals at `point`:
///
/// `∫_{ε2}^{R} ∫_0^{ε1} |~f(s,t) − ~f(a,t)| / s ds dt` and
/// `∫_{ε1}^{R} ∫_0^{ε2} |~f(s,t) − ~f(s,b)| / t dt ds`,
///
/// with `a`, `b` the first candidate sections whose one-dimensional mass on
/// `[0, R]` is finite. The numbers are returned for the caller to judge.
pub fn lc_class_diagnostic(
    field: &dyn Field2D,
    point: (f64, f64),
    eps1: f64,
    eps2: f64,
    r: f64,
) -> Result<(f64, f64), SmoothingError> {
    let ok = |x: f64| x.is_finite() && x > 0.0;
    if !(ok(eps1) && ok(eps2) && ok(r)) || r <= eps1 || r <= eps2 {
        return Err(SmoothingError::InvalidParams(format!("need 0 < eps < R, got eps = ({eps1}, {eps2}), R = {r}")));
    }
    let rule = Rule::new(LC_NODES);
    let cuts_s = mirrored_cuts(&field.breaks_s(), point.0);
    let cuts_t = mirrored_cuts(&field.breaks_t(), point.1);
    let tf = |s: f64, t: f64| quadrant_sum(field, point, s, t);

    let full_t = plain_nodes(0.0, r, &cuts_t, &rule);
    let full_s = plain_nodes(0.0, r, &cuts_s, &rule);
    let mass = |nodes: &[(f64, f64)], g: &dyn Fn(f64) -> Quaternion| nodes.iter().map(|&(x, w)| w * g(x).abs()).sum::<f64>();
    let a = section_candidates(eps1)
        .into_iter()
        .find(|&a| mass(&full_t, &|t| tf(a, t)).is_finite())
        .ok_or(SmoothingError::NoIntegrableSection)?;
    let b = section_candidates(eps2)
        .into_iter()
        .find(|&b| mass(&full_s, &|s| tf(s, b)).is_finite())
        .ok_or(SmoothingError::NoIntegrableSection)?;

    let inner_s = near_zero_nodes(eps1, &rule);
    let outer_t = plain_nodes(eps2, r, &cuts_t, &rule);
    let v1: f64 = outer_t
        .par_iter()
        .map(|&(t, wt)| {
            let base = tf(a, t);
            wt * inner_s.iter().map(|&(s, ws)| ws * (tf(s, t) - base).abs() / s).sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();

    let inner_t = near_zero_nodes(eps2, &rule);
    let outer_s = plain_nodes(eps1, r, &cuts_s, &rule);
    let v2: f64 = outer_s
        .par_iter()
        .map(|&(s, ws)| {
            let base = tf(s, b);
            ws * inner_t.iter().map(|&(t, wt)| wt * (tf(s, t) - base).abs() / t).sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok((v1, v2))
}
