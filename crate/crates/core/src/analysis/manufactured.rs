use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::fem::Diffusivity;

/// One-dimensional factor of a separable manufactured solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile1d {
    /// `x - x³`, zero at -1, 0 and 1.
    Cubic,
    /// `x(1 - x)`
    Bubble,
    /// `sin(πx)`
    Sine,
    /// `sin(πx) eˣ`
    SineExp,
    /// `x`
    Linear,
    /// `0`
    Zero,
}

impl Profile1d {
    /// Value, first and second derivative.
    pub fn eval(self, x: f64) -> (f64, f64, f64) {
        match self {
            Profile1d::Cubic => (x - x * x * x, 1.0 - 3.0 * x * x, -6.0 * x),
            Profile1d::Bubble => (x * (1.0 - x), 1.0 - 2.0 * x, -2.0),
            Profile1d::Sine => {
                let (s, c) = (libm::sin(PI * x), libm::cos(PI * x));
                (s, PI * c, -PI * PI * s)
            }
            Profile1d::SineExp => {
                let (s, c, e) = (libm::sin(PI * x), libm::cos(PI * x), libm::exp(x));
                (s * e, (PI * c + s) * e, (2.0 * PI * c + (1.0 - PI * PI) * s) * e)
            }
            Profile1d::Linear => (x, 1.0, 0.0),
            Profile1d::Zero => (0.0, 0.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile1d::Cubic => "cubic",
            Profile1d::Bubble => "bubble",
            Profile1d::Sine => "sine",
            Profile1d::SineExp => "sine-exp",
            Profile1d::Linear => "linear",
            Profile1d::Zero => "zero",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Cubic, Self::Bubble, Self::Sine, Self::SineExp, Self::Linear, Self::Zero]
            .into_iter()
            .find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeFactor {
    /// `eᵗ`
    Exp,
    /// `1 + t`; backward Euler integrates it without truncation error.
    Linear,
    /// `1`
    Constant,
}

impl TimeFactor {
    /// Value and derivative.
    pub fn eval(self, t: f64) -> (f64, f64) {
        match self {
            TimeFactor::Exp => {
                let e = libm::exp(t);
                (e, e)
            }
            TimeFactor::Linear => (1.0 + t, 1.0),
            TimeFactor::Constant => (1.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeFactor::Exp => "exp",
            TimeFactor::Linear => "linear",
            TimeFactor::Constant => "constant",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Exp, Self::Linear, Self::Constant].into_iter().find(|p| p.name() == name)
    }
}

/// `u(x, y, t) = X(x) Y(y) g(t)` with piecewise constant diffusivity.
///
/// The source on subdomain `i` is `f_i = u_t - α_i Δu`, so `u` solves the
/// heat equation on each subdomain. Across an interface with an α jump the
/// normal flux of `u` is discontinuous; schemes then need the interface
/// flux term to stay consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSolution {
    pub x: Profile1d,
    pub y: Profile1d,
    pub time: TimeFactor,
    pub alphas: Vec<f64>,
}

impl ManufacturedSolution {
    pub fn new(x: Profile1d, y: Profile1d, time: TimeFactor, alphas: Vec<f64>) -> Self {
        Self { x, y, time, alphas }
    }

    /// `xy(1 - x²)(1 - y²)eᵗ`, the L-shape benchmark.
    pub fn benchmark(alphas: Vec<f64>) -> Self {
        Self::new(Profile1d::Cubic, Profile1d::Cubic, TimeFactor::Exp, alphas)
    }

    /// `sin(πx)eˣ sin(πy)eᵗ`, vanishing on the boundary of the unit square.
    pub fn smooth(alphas: Vec<f64>) -> Self {
        Self::new(Profile1d::SineExp, Profile1d::Sine, TimeFactor::Exp, alphas)
    }

    pub fn alpha(&self, subdomain: usize) -> f64 {
        self.alphas[subdomain]
    }

    pub fn diffusivities(&self) -> Vec<Diffusivity> {
        self.alphas.iter().map(|&a| Diffusivity::Constant(a)).collect()
    }

    pub fn u(&self, x: f64, y: f64, t: f64) -> f64 {
        self.x.eval(x).0 * self.y.eval(y).0 * self.time.eval(t).0
    }

    pub fn u_t(&self, x: f64, y: f64, t: f64) -> f64 {
        self.x.eval(x).0 * self.y.eval(y).0 * self.time.eval(t).1
    }

    pub fn grad(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let (xv, xd, _) = self.x.eval(x);
        let (yv, yd, _) = self.y.eval(y);
        let g = self.time.eval(t).0;
        [xd * yv * g, xv * yd * g]
    }

    pub fn laplacian(&self, x: f64, y: f64, t: f64) -> f64 {
        let (xv, _, xdd) = self.x.eval(x);
        let (yv, _, ydd) = self.y.eval(y);
        (xdd * yv + xv * ydd) * self.time.eval(t).0
    }

    /// `u_t - α_i Δu`
    pub fn source(&self, subdomain: usize, x: f64, y: f64, t: f64) -> f64 {
        self.u_t(x, y, t) - self.alphas[subdomain] * self.laplacian(x, y, t)
    }

    /// `-α_i Δu`, the source of the stationary problem at time `t`.
    pub fn elliptic_source(&self, subdomain: usize, x: f64, y: f64, t: f64) -> f64 {
        -self.alphas[subdomain] * self.laplacian(x, y, t)
    }

    /// `α_i ∇u`
    pub fn flux(&self, subdomain: usize, x: f64, y: f64, t: f64) -> [f64; 2] {
        let a = self.alphas[subdomain];
        let g = self.grad(x, y, t);
        [a * g[0], a * g[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn profiles_match_finite_differences() {
        let profiles = [Profile1d::Cubic, Profile1d::Bubble, Profile1d::Sine, Profile1d::SineExp, Profile1d::Linear];
        let mut s = 7;
        for p in profiles {
            for _ in 0..50 {
                let x = 2.0 * rng(&mut s) - 1.0;
                let e = 1e-4;
                let (v, d, dd) = p.eval(x);
                let (vp, dp, _) = p.eval(x + e);
                let (vm, dm, _) = p.eval(x - e);
                assert!(((vp - vm) / (2.0 * e) - d).abs() < 1e-6 * (1.0 + d.abs()), "{p:?}");
                assert!(((dp - dm) / (2.0 * e) - dd).abs() < 1e-6 * (1.0 + dd.abs()), "{p:?}");
                assert!(((vp - 2.0 * v + vm) / (e * e) - dd).abs() < 1e-4 * (1.0 + dd.abs()), "{p:?}");
            }
            assert_eq!(Profile1d::from_name(p.name()), Some(p));
        }
    }

    #[test]
    fn benchmark_vanishes_on_lshape_boundary() {
        let u = ManufacturedSolution::benchmark(alloc::vec![1.0, 10.0, 10.0]);
        for i in 0..=20 {
            let s = -1.0 + 0.1 * i as f64;
            for (x, y) in [(s, -1.0), (s, 1.0), (-1.0, s), (1.0, s)] {
                assert_eq!(u.u(x, y, 0.5), 0.0);
            }
            let s = 0.05 * i as f64;
            assert_eq!(u.u(0.0, s, 0.3), 0.0);
            assert_eq!(u.u(s, 0.0, 0.3), 0.0);
        }
        assert_eq!(u.u(0.5, 0.5, 0.0), 0.375 * 0.375);
    }

    #[test]
    fn source_is_heat_residual() {
        let u = ManufacturedSolution::new(Profile1d::Bubble, Profile1d::Linear, TimeFactor::Linear, alloc::vec![2.0]);
        // u = x(1-x) y (1+t): u_t = x(1-x)y, Δu = -2y(1+t)
        let (x, y, t) = (0.3, 0.7, 0.5);
        let f = u.source(0, x, y, t);
        assert!((f - (x * (1.0 - x) * y + 4.0 * y * (1.0 + t))).abs() < 1e-15);
        assert_eq!(TimeFactor::from_name("exp"), Some(TimeFactor::Exp));
    }
}
