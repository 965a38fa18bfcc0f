//! Built-in analytic test signals.

use std::f64::consts::PI;

use crate::grid::Field2D;
use crate::quat::Quaternion;

/// `weight · exp(−((s−s0)/ws)² − ((t−t0)/wt)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump {
    pub weight: Quaternion,
    pub center: (f64, f64),
    pub width: (f64, f64),
}

impl GaussianBump {
    fn envelope(&self, s: f64, t: f64) -> (f64, f64, f64) {
        let xs = (s - self.center.0) / self.width.0;
        let xt = (t - self.center.1) / self.width.1;
        ((-(xs * xs + xt * xt)).exp(), xs, xt)
    }
}

/// Finite sum of Gaussian bumps with analytic partial derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSum(pub Vec<GaussianBump>);

impl GaussianSum {
    pub fn d_s(&self, s: f64, t: f64) -> Quaternion {
        self.0
            .iter()
            .map(|b| {
                let (e, xs, _) = b.envelope(s, t);
                b.weight * (-2.0 * xs / b.width.0 * e)
            })
            .sum()
    }

    pub fn d_t(&self, s: f64, t: f64) -> Quaternion {
        self.0
            .iter()
            .map(|b| {
                let (e, _, xt) = b.envelope(s, t);
                b.weight * (-2.0 * xt / b.width.1 * e)
            })
            .sum()
    }
}

impl Field2D for GaussianSum {
    fn eval(&self, s: f64, t: f64) -> Quaternion {
        self.0.iter().map(|b| b.weight * b.envelope(s, t).0).sum()
    }

    fn support(&self) -> Option<[f64; 4]> {
        // e^{-42} is below 1e-18 of the peak
        let r = 42f64.sqrt();
        let mut bx = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for b in &self.0 {
            bx[0] = bx[0].min(b.center.0 - r * b.width.0);
            bx[1] = bx[1].max(b.center.0 + r * b.width.0);
            bx[2] = bx[2].min(b.center.1 - r * b.width.1);
            bx[3] = bx[3].max(b.center.1 + r * b.width.1);
        }
        Some(bx)
    }
}

/// Indicator of the closed box `[s_lo, s_hi] × [t_lo, t_hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxIndicator {
    pub s: (f64, f64),
    pub t: (f64, f64),
}

impl BoxIndicator {
    pub const UNIT: BoxIndicator = BoxIndicator { s: (-1.0, 1.0), t: (-1.0, 1.0) };
}

impl Field2D for BoxIndicator {
    fn eval(&self, s: f64, t: f64) -> Quaternion {
        if s >= self.s.0 && s <= self.s.1 && t >= self.t.0 && t <= self.t.1 {
            Quaternion::ONE
        } else {
            Quaternion::ZERO
        }
    }
    fn support(&self) -> Option<[f64; 4]> {
        Some([self.s.0, self.s.1, self.t.0, self.t.1])
    }
    fn breaks_s(&self) -> Vec<f64> {
        vec![self.s.0, self.s.1]
    }
    fn breaks_t(&self) -> Vec<f64> {
        vec![self.t.0, self.t.1]
    }
}

/// `e^s e^t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpProduct;

impl Field2D for ExpProduct {
    fn eval(&self, s: f64, t: f64) -> Quaternion {
        Quaternion::real((s + t).exp())
    }
}

/// `e^{−(s²+t²)}`.
pub fn gaussian() -> GaussianSum {
    GaussianSum(vec![GaussianBump { weight: Quaternion::ONE, center: (0.0, 0.0), width: (1.0, 1.0) }])
}

/// Two off-centre bumps with non-commuting quaternion weights, so the three
/// kernel placements give different spectra.
pub fn quaternion_gaussian() -> GaussianSum {
    GaussianSum(vec![
        GaussianBump { weight: Quaternion::new(1.0, 0.5, -0.25, 0.75), center: (0.5, -0.3), width: (1.0, 1.0) },
        GaussianBump { weight: Quaternion::new(0.2, -0.6, 0.9, 0.3), center: (-0.4, 0.6), width: (1.0, 1.0) },
    ])
}

/// `(1/4π²) e^{−α(s²+t²)}`, whose two-sided transform is the
/// Gauss–Weierstrass kernel of parameter `α`.
pub fn gauss_weierstrass_source(alpha: f64) -> GaussianSum {
    let w = 1.0 / alpha.sqrt();
    GaussianSum(vec![GaussianBump { weight: Quaternion::real(1.0 / (4.0 * PI * PI)), center: (0.0, 0.0), width: (w, w) }])
}

/// A named fixture.
#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Gaussian(GaussianSum),
    Indicator(BoxIndicator),
    ExpProduct,
}

pub const FIXTURE_NAMES: &[&str] = &["gaussian", "qgaussian", "indicator", "gw", "exp-product"];

impl Fixture {
    pub fn by_name(name: &str) -> Option<Fixture> {
        Some(match name {
            "gaussian" => Fixture::Gaussian(gaussian()),
            "qgaussian" => Fixture::Gaussian(quaternion_gaussian()),
            "indicator" => Fixture::Indicator(BoxIndicator::UNIT),
            "gw" => Fixture::Gaussian(gauss_weierstrass_source(0.5)),
            "exp-product" => Fixture::ExpProduct,
            _ => return None,
        })
    }

    pub fn gaussian_sum(&self) -> Option<&GaussianSum> {
        match self {
            Fixture::Gaussian(g) => Some(g),
            _ => None,
        }
    }
}

impl Field2D for Fixture {
    fn eval(&self, s: f64, t: f64) -> Quaternion {
        match self {
            Fixture::Gaussian(g) => g.eval(s, t),
            Fixture::Indicator(b) => b.eval(s, t),
            Fixture::ExpProduct => ExpProduct.eval(s, t),
        }
    }
    fn support(&self) -> Option<[f64; 4]> {
        match self {
            Fixture::Gaussian(g) => g.support(),
            Fixture::Indicator(b) => b.support(),
            Fixture::ExpProduct => None,
        }
    }
    fn breaks_s(&self) -> Vec<f64> {
        match self {
            Fixture::Indicator(b) => b.breaks_s(),
            _ => Vec::new(),
        }
    }
    fn breaks_t(&self) -> Vec<f64> {
        match self {
            Fixture::Indicator(b) => b.breaks_t(),
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in FIXTURE_NAMES {
            assert!(Fixture::by_name(n).is_some(), "{n}");
        }
        assert!(Fixture::by_name("nope").is_none());
    }

    #[test]
    fn derivatives_match_central_differences() {
        let g = quaternion_gaussian();
        let h = 1e-5;
        for &(s, t) in &[(0.1, 0.2), (-0.7, 1.1), (1.5, -0.4)] {
            let fd_s = (g.eval(s + h, t) - g.eval(s - h, t)) * (0.5 / h);
            let fd_t = (g.eval(s, t + h) - g.eval(s, t - h)) * (0.5 / h);
            assert!((fd_s - g.d_s(s, t)).abs() < 1e-8);
            assert!((fd_t - g.d_t(s, t)).abs() < 1e-8);
        }
    }

    #[test]
    fn indicator_is_closed() {
        let b = BoxIndicator::UNIT;
        assert_eq!(b.eval(1.0, 1.0), Quaternion::ONE);
        assert_eq!(b.eval(1.0 + 1e-15, 0.0), Quaternion::ZERO);
    }
}
