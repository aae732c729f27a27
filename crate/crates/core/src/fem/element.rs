use alloc::vec;
use alloc::vec::Vec;

use super::{gauss_legendre, gauss_lobatto_nodes, Lagrange1d, QuadratureRule};
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::linalg::DenseMatrix;

/// Diffusion coefficient on one subdomain.
#[derive(Debug, Clone, Copy)]
pub enum Diffusivity {
    Constant(f64),
    /// Smooth coefficient sampled at quadrature points.
    Variable(fn(f64, f64) -> f64),
}

impl Diffusivity {
    #[inline]
    pub fn at(&self, x: f64, y: f64) -> f64 {
        match *self {
            Diffusivity::Constant(a) => a,
            Diffusivity::Variable(f) => f(x, y),
        }
    }
}

impl From<f64> for Diffusivity {
    fn from(a: f64) -> Self {
        Diffusivity::Constant(a)
    }
}

/// Tensor-product Q_k element on [-1, 1]² with Gauss–Lobatto nodes.
///
/// Local node `(a, b)` (a along x, b along y) has index `b * (k + 1) + a`.
/// One-dimensional shape values and derivatives are cached at the
/// `k + 2` Gauss points used for all element integrals.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    degree: usize,
    basis: Lagrange1d,
    quad: QuadratureRule,
    /// `vals[q * (k + 1) + a]`
    vals: Vec<f64>,
    ders: Vec<f64>,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        let basis = Lagrange1d::new(gauss_lobatto_nodes(degree)?);
        let quad = gauss_legendre(degree + 2)?;
        let np = degree + 1;
        let mut vals = vec![0.0; quad.len() * np];
        let mut ders = vec![0.0; quad.len() * np];
        for (q, &x) in quad.points.iter().enumerate() {
            for a in 0..np {
                vals[q * np + a] = basis.value(a, x);
                ders[q * np + a] = basis.derivative(a, x);
            }
        }
        Ok(Self {
            degree,
            basis,
            quad,
            vals,
            ders,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nodes per direction.
    #[inline]
    pub fn nodes_1d(&self) -> usize {
        self.degree + 1
    }

    #[inline]
    pub fn n_local(&self) -> usize {
        self.nodes_1d() * self.nodes_1d()
    }

    pub fn basis_1d(&self) -> &Lagrange1d {
        &self.basis
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }

    /// Shape values and reference gradients at `(xi, eta)`.
    pub fn eval(&self, xi: f64, eta: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
        let vx = self.basis.values(xi);
        let dx = self.basis.derivatives(xi);
        let vy = self.basis.values(eta);
        let dy = self.basis.derivatives(eta);
        let np = self.nodes_1d();
        let mut v = Vec::with_capacity(np * np);
        let mut g = Vec::with_capacity(np * np);
        for b in 0..np {
            for a in 0..np {
                v.push(vx[a] * vy[b]);
                g.push([dx[a] * vy[b], vx[a] * dy[b]]);
            }
        }
        (v, g)
    }
}

fn check_cell(cell: &Rect) -> Result<(f64, f64)> {
    let (hx, hy) = (cell.width(), cell.height());
    if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
        return Err(Error::DegenerateCell);
    }
    Ok((hx, hy))
}

/// Local mass `∫ φ_i φ_j` and stiffness `∫ α ∇φ_i·∇φ_j` on a physical cell.
pub fn local_matrices(
    el: &ReferenceElement,
    cell: &Rect,
    alpha: Diffusivity,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let (hx, hy) = check_cell(cell)?;
    let np = el.nodes_1d();
    let n = el.n_local();
    let nq = el.quad.len();
    let jac = 0.25 * hx * hy;
    let (sx, sy) = (2.0 / hx, 2.0 / hy);
    let mut mass = DenseMatrix::zeros(n, n);
    let mut stiff = DenseMatrix::zeros(n, n);
    for qy in 0..nq {
        for qx in 0..nq {
            let w = el.quad.weights[qx] * el.quad.weights[qy] * jac;
            let x = cell.x0 + 0.5 * hx * (el.quad.points[qx] + 1.0);
            let y = cell.y0 + 0.5 * hy * (el.quad.points[qy] + 1.0);
            let wa = w * alpha.at(x, y);
            let vx = &el.vals[qx * np..(qx + 1) * np];
            let dx = &el.ders[qx * np..(qx + 1) * np];
            let vy = &el.vals[qy * np..(qy + 1) * np];
            let dy = &el.ders[qy * np..(qy + 1) * np];
            for i in 0..n {
                let (ai, bi) = (i % np, i / np);
                let phi_i = vx[ai] * vy[bi];
                let gx_i = sx * dx[ai] * vy[bi];
                let gy_i = sy * vx[ai] * dy[bi];
                for j in i..n {
                    let (aj, bj) = (j % np, j / np);
                    let phi_j = vx[aj] * vy[bj];
                    let gx_j = sx * dx[aj] * vy[bj];
                    let gy_j = sy * vx[aj] * dy[bj];
                    mass.add(i, j, w * phi_i * phi_j);
                    stiff.add(i, j, wa * (gx_i * gx_j + gy_i * gy_j));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            mass.set(i, j, mass.get(j, i));
            stiff.set(i, j, stiff.get(j, i));
        }
    }
    Ok((mass, stiff))
}

/// Local load `∫ f(·, t) φ_i` on a physical cell.
pub fn local_load(
    el: &ReferenceElement,
    cell: &Rect,
    f: &dyn Fn(f64, f64, f64) -> f64,
    t: f64,
) -> Result<Vec<f64>> {
    let (hx, hy) = check_cell(cell)?;
    let np = el.nodes_1d();
    let nq = el.quad.len();
    let jac = 0.25 * hx * hy;
    let mut load = vec![0.0; el.n_local()];
    for qy in 0..nq {
        for qx in 0..nq {
            let x = cell.x0 + 0.5 * hx * (el.quad.points[qx] + 1.0);
            let y = cell.y0 + 0.5 * hy * (el.quad.points[qy] + 1.0);
            let fw = f(x, y, t) * el.quad.weights[qx] * el.quad.weights[qy] * jac;
            if fw == 0.0 {
                continue;
            }
            for b in 0..np {
                let vy = el.vals[qy * np + b];
                for a in 0..np {
                    load[b * np + a] += fw * el.vals[qx * np + a] * vy;
                }
            }
        }
    }
    Ok(load)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rect {
        Rect::new(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn bilinear_mass_matches_exact_integration() {
        let el = ReferenceElement::new(1).unwrap();
        let (m, _) = local_matrices(&el, &unit(), Diffusivity::Constant(1.0)).unwrap();
        let exact = [[4.0, 2.0, 2.0, 1.0], [2.0, 4.0, 1.0, 2.0], [2.0, 1.0, 4.0, 2.0], [1.0, 2.0, 2.0, 4.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert!((m.get(i, j) - exact[i][j] / 36.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bilinear_stiffness_diagonal_and_row_sums() {
        let el = ReferenceElement::new(1).unwrap();
        let (_, a) = local_matrices(&el, &unit(), Diffusivity::Constant(1.0)).unwrap();
        for i in 0..4 {
            assert!((a.get(i, i) - 2.0 / 3.0).abs() < 1e-15);
            assert!(a.row(i).iter().sum::<f64>().abs() < 1e-15);
        }
    }

    #[test]
    fn mass_total_is_area_and_constants_in_kernel() {
        let cell = Rect::new(0.2, 0.7, -0.3, 0.1);
        for k in 1..=6 {
            let el = ReferenceElement::new(k).unwrap();
            let (m, a) = local_matrices(&el, &cell, Diffusivity::Constant(3.0)).unwrap();
            let total: f64 = (0..m.rows()).map(|i| m.row(i).iter().sum::<f64>()).sum();
            assert!((total - cell.area()).abs() < 1e-12 * cell.area());
            let ones = vec![1.0; a.cols()];
            let r = a.mul_vec(&ones);
            assert!(libm::sqrt(r.iter().map(|v| v * v).sum::<f64>()) < 1e-12);
            assert_eq!(m.transpose(), m);
            assert_eq!(a.transpose(), a);
        }
    }

    #[test]
    fn load_of_unit_source() {
        let el = ReferenceElement::new(1).unwrap();
        let l = local_load(&el, &unit(), &|_, _, _| 1.0, 0.0).unwrap();
        for v in l {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let z = local_load(&el, &unit(), &|_, _, _| 0.0, 0.0).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn load_of_shape_function_is_mass_column() {
        let el = ReferenceElement::new(2).unwrap();
        let cell = Rect::new(1.0, 1.5, 2.0, 2.25);
        let (m, _) = local_matrices(&el, &cell, Diffusivity::Constant(1.0)).unwrap();
        let j = 4;
        let phi_j = |x: f64, y: f64, _t: f64| {
            let xi = 2.0 * (x - cell.x0) / cell.width() - 1.0;
            let eta = 2.0 * (y - cell.y0) / cell.height() - 1.0;
            el.eval(xi, eta).0[j]
        };
        let l = local_load(&el, &cell, &phi_j, 0.0).unwrap();
        for i in 0..el.n_local() {
            assert!((l[i] - m.get(i, j)).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_cell_is_rejected() {
        let el = ReferenceElement::new(1).unwrap();
        let flat = Rect::new(0.0, 1.0, 0.5, 0.5);
        assert_eq!(
            local_matrices(&el, &flat, Diffusivity::Constant(1.0)).unwrap_err(),
            Error::DegenerateCell
        );
    }
}
