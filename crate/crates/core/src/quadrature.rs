//! Gauss–Legendre rules and panel integration helpers.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `P_n(z)` and `P_n'(z)`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A rule mapped onto `[a, b]`, reusable across panels.
#[derive(Clone, Debug)]
pub struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self { x, w }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `(node, weight)` pairs on `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.x.iter().zip(&self.w).map(move |(&x, &w)| (m + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Sorted, deduplicated panel edges of `[a, b]` containing every cut that
/// falls strictly inside.
pub fn panel_edges(a: f64, b: f64, cuts: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut e: Vec<f64> = cuts.into_iter().filter(|&c| c > a && c < b).collect();
    e.push(a);
    e.push(b);
    e.sort_by(f64::total_cmp);
    let tol = 1e-13 * (b - a).abs().max(1.0);
    e.dedup_by(|x, y| (*x - *y).abs() <= tol);
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 40] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let r = Rule::new(6);
        // degree 11 is exact for 6 points
        let v = r.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn smooth_integral() {
        let r = Rule::new(20);
        let v = r.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn edges() {
        assert_eq!(panel_edges(0.0, 1.0, [0.5, -1.0, 0.5, 1.0]), vec![0.0, 0.5, 1.0]);
    }
}
