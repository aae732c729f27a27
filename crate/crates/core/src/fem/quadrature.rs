use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Quadrature rule on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Legendre polynomial P_n and its derivative at `x`.
pub(crate) fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // derivative from the recurrence; the endpoint formula avoids 0/0
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        let s = if x > 0.0 { 1.0 } else if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// n-point Gauss–Legendre rule, exact for polynomials of degree 2n − 1.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::EmptyQuadrature);
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok(QuadratureRule { points, weights })
}

/// Gauss–Lobatto–Legendre nodes for degree `k` (k + 1 points, including ±1),
/// in increasing order.
pub fn gauss_lobatto_nodes(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut nodes = vec![0.0; k + 1];
    nodes[0] = -1.0;
    nodes[k] = 1.0;
    let kf = k as f64;
    for j in 1..k {
        // interior nodes are roots of P_k'; Chebyshev–Lobatto initial guess
        let mut x = -libm::cos(PI * j as f64 / kf);
        for _ in 0..100 {
            let (p, dp) = legendre(k, x);
            let d2p = (2.0 * x * dp - kf * (kf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[j] = x;
    }
    for j in 1..=k / 2 {
        // enforce exact symmetry
        let s = 0.5 * (nodes[k - j] - nodes[j]);
        nodes[j] = -s;
        nodes[k - j] = s;
    }
    if k.is_multiple_of(2) {
        nodes[k / 2] = 0.0;
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let q1 = gauss_legendre(1).unwrap();
        assert_eq!(q1.points, vec![0.0]);
        assert_eq!(q1.weights, vec![2.0]);
        let q2 = gauss_legendre(2).unwrap();
        let r = 1.0 / libm::sqrt(3.0);
        assert!((q2.points[0] + r).abs() < 1e-15 && (q2.points[1] - r).abs() < 1e-15);
        assert!((q2.weights[0] - 1.0).abs() < 1e-15 && (q2.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_points_is_an_error() {
        assert_eq!(gauss_legendre(0), Err(Error::EmptyQuadrature));
    }

    #[test]
    fn five_point_rule_integrates_x8() {
        let q = gauss_legendre(5).unwrap();
        let v = q.integrate(-1.0, 1.0, |x| libm::pow(x, 8.0));
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn exact_on_monomials_up_to_declared_degree() {
        for n in 1..=12 {
            let q = gauss_legendre(n).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for d in 0..=(2 * n - 1) {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                let got = q.integrate(-1.0, 1.0, |x| libm::pow(x, d as f64));
                assert!((got - exact).abs() <= 1e-13, "n={n} d={d}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn lobatto_known_values() {
        assert_eq!(gauss_lobatto_nodes(1).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(gauss_lobatto_nodes(2).unwrap(), vec![-1.0, 0.0, 1.0]);
        let n3 = gauss_lobatto_nodes(3).unwrap();
        let r = 1.0 / libm::sqrt(5.0);
        assert!((n3[1] + r).abs() < 1e-15 && (n3[2] - r).abs() < 1e-15);
        let n4 = gauss_lobatto_nodes(4).unwrap();
        let r = libm::sqrt(3.0 / 7.0);
        assert!((n4[3] - r).abs() < 1e-15);
        for k in 1..10 {
            let n = gauss_lobatto_nodes(k).unwrap();
            assert!(n.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
