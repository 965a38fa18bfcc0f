//! FFT evaluation of the QFTs on the grid induced by the sampling.
//!
//! For `n` samples of spacing `ds` the frequencies are
//! `u_k = (k − n/2) · 2π/(n ds)`. With midpoint samples
//! `s_m = s_min + (m + 1/2) ds` we have
//! `e^{∓i u_k s_m} = e^{∓i u_k s_0} (−1)^m e^{∓2πi km/n}` where
//! `s_0 = s_min + ds/2`, so a `(−1)^m` modulation, a length-`n` DFT and one
//! phase factor give the midpoint sum exactly.
//!
//! Each real component `h` of the signal is handled through the complex
//! transforms `P_{σs,σt}(u,v) = ∫∫ h e^{i(σs us + σt vt)}`:
//! `F_T(h) = [P_{−−}(1 − k) + P_{−+}(1 + k)]/2`, and the `u`-reflected
//! transform used for the `j` and `k` components (`e^{−ius} j = j e^{ius}`)
//! swaps in `P_{+−}`, `P_{++}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::TransformError;
use crate::grid::{GridSpec, Provenance, QSignal2D, QSpectrum2D, Side};
use crate::qft::QftKind;
use crate::quat::Quaternion;

/// Frequency grid on which [`qft_fast`] evaluates, for a given signal grid.
pub fn fast_grid(g: &GridSpec) -> GridSpec {
    let du = 2.0 * PI / (g.ns as f64 * g.ds);
    let dv = 2.0 * PI / (g.nt as f64 * g.dt);
    let u0 = -((g.ns / 2) as f64) * du - 0.5 * du;
    let v0 = -((g.nt / 2) as f64) * dv - 0.5 * dv;
    GridSpec::new(u0, v0, du, dv, g.ns, g.nt).expect("positive spacing")
}

pub fn qft_fast(sig: &QSignal2D, kind: QftKind) -> Result<QSpectrum2D, TransformError> {
    let g = *sig.grid();
    if !g.ns.is_power_of_two() || !g.nt.is_power_of_two() {
        return Err(TransformError::NotPowerOfTwo(g.ns, g.nt));
    }
    if !kind.axes.is_canonical() {
        return Err(TransformError::NonCanonicalAxes);
    }
    let freq = fast_grid(&g);
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    // the two-sided transform reflects u for the components that anticommute with i
    let reflect = |c: usize| kind.side == Side::TwoSided && c >= 2;

    let parts: Vec<Option<Vec<Quaternion>>> = (0..4)
        .into_par_iter()
        .map(|c| {
            let h = sig.component(c);
            if h.iter().all(|&x| x == 0.0) {
                return None;
            }
            let su = if reflect(c) { 1.0 } else { -1.0 };
            let p = signed_dft2(&h, &g, &freq, su, -1.0);
            let q = signed_dft2(&h, &g, &freq, su, 1.0);
            Some(p.iter().zip(&q).map(|(a, b)| two_sided_from_pair(*a, *b)).collect())
        })
        .collect();

    let mut data = vec![Quaternion::ZERO; g.len()];
    for (c, part) in parts.into_iter().enumerate() {
        let Some(part) = part else { continue };
        let e = basis[c];
        for (o, &x) in data.iter_mut().zip(&part) {
            *o += match kind.side {
                Side::TwoSided | Side::RightSided => e * x,
                Side::LeftSided => x * e,
            };
        }
    }
    Ok(QSpectrum2D::from_parts(freq, data, Provenance::Qft(kind)))
}

/// `[P(1 − k) + Q(1 + k)]/2` for complex `P`, `Q` embedded as `a + ib`.
fn two_sided_from_pair(p: Complex64, q: Complex64) -> Quaternion {
    // (a + ib)(1 − k) = a + ib + bj − ak ; (c + id)(1 + k) = c + id − dj + ck
    Quaternion::new(0.5 * (p.re + q.re), 0.5 * (p.im + q.im), 0.5 * (p.im - q.im), 0.5 * (q.re - p.re))
}

/// Midpoint sum `Σ h(s,t) e^{i(σs u s + σt v t)} ds dt` on `freq`.
fn signed_dft2(h: &[f64], g: &GridSpec, freq: &GridSpec, sigma_s: f64, sigma_t: f64) -> Vec<Complex64> {
    let (ns, nt) = (g.ns, g.nt);
    let mut planner = FftPlanner::<f64>::new();
    let plan = |p: &mut FftPlanner<f64>, n: usize, sigma: f64| {
        if sigma < 0.0 {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    };
    let fs = plan(&mut planner, ns, sigma_s);
    let ft = plan(&mut planner, nt, sigma_t);

    let mut buf: Vec<Complex64> = h
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let alt = if (k % ns + k / ns) % 2 == 0 { x } else { -x };
            Complex64::new(alt, 0.0)
        })
        .collect();
    fs.process(&mut buf);
    let mut cols = transpose(&buf, ns, nt);
    ft.process(&mut cols);
    let mut out = transpose(&cols, nt, ns);

    let s0 = g.s_min + 0.5 * g.ds;
    let t0 = g.t_min + 0.5 * g.dt;
    let ph_u: Vec<Complex64> = (0..ns).map(|k| Complex64::from_polar(g.ds, sigma_s * freq.s(k) * s0)).collect();
    let ph_v: Vec<Complex64> = (0..nt).map(|k| Complex64::from_polar(g.dt, sigma_t * freq.t(k) * t0)).collect();
    for (k, x) in out.iter_mut().enumerate() {
        *x *= ph_u[k % ns] * ph_v[k / ns];
    }
    out
}

fn transpose(a: &[Complex64], ncols: usize, nrows: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    for r in 0..nrows {
        for c in 0..ncols {
            out[c * nrows + r] = a[r * ncols + c];
        }
    }
    out
}
