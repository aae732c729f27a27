use crate::assembly::MortarSpace;
use crate::error::Result;
use crate::fem::gauss_legendre;

/// Error of a discrete function against an exact one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    /// Broken H¹ seminorm `(Σ_i |e|²_{H¹(Ω_i)})^{1/2}`.
    pub h1_semi: f64,
    /// Broken H¹ norm `(Σ_i ‖e‖²_{H¹(Ω_i)})^{1/2}`.
    pub broken_h1: f64,
}

/// Cell-wise quadrature with `k + 3` Gauss points per direction of the two
/// components of `integrand(subdomain, x, y, u_h, ∇u_h)`, `full` holding all subdomain
/// nodal values.
fn integrate(
    space: &MortarSpace,
    full: &[f64],
    integrand: &mut dyn FnMut(usize, f64, f64, f64, [f64; 2]) -> [f64; 2],
) -> Result<[f64; 2]> {
    let mut total = [0.0; 2];
    for (s, m) in space.meshes().iter().enumerate() {
        let el = space.element(m.degree());
        let rule = gauss_legendre(m.degree() + 3)?;
        let off = space.dofs().offset(s);
        // basis values do not depend on the cell
        let mut tables = alloc::vec::Vec::with_capacity(rule.len() * rule.len());
        for &eta in &rule.points {
            for &xi in &rule.points {
                tables.push(el.eval(xi, eta));
            }
        }
        for c in 0..m.n_cells() {
            let r = m.cell_rect(c);
            let (hx, hy) = (r.width(), r.height());
            let jac = 0.25 * hx * hy;
            let nodes = m.cell_nodes(c);
            for (qy, (&eta, &wy)) in rule.points.iter().zip(&rule.weights).enumerate() {
                for (qx, (&xi, &wx)) in rule.points.iter().zip(&rule.weights).enumerate() {
                    let (vals, grads) = &tables[qy * rule.len() + qx];
                    let mut uh = 0.0;
                    let mut g = [0.0; 2];
                    for ((&n, v), d) in nodes.iter().zip(vals).zip(grads) {
                        let c = full[off + n];
                        uh += c * v;
                        g[0] += c * d[0];
                        g[1] += c * d[1];
                    }
                    g = [g[0] * 2.0 / hx, g[1] * 2.0 / hy];
                    let x = r.x0 + 0.5 * hx * (xi + 1.0);
                    let y = r.y0 + 0.5 * hy * (eta + 1.0);
                    let w = wx * wy * jac;
                    let v = integrand(s, x, y, uh, g);
                    total[0] += w * v[0];
                    total[1] += w * v[1];
                }
            }
        }
    }
    Ok(total)
}

/// L² and broken H¹ errors of `full` (all subdomain nodal values) against
/// `exact(x, y) -> (u, ∇u)`.
pub fn error_norms(space: &MortarSpace, full: &[f64], exact: &dyn Fn(f64, f64) -> (f64, [f64; 2])) -> Result<ErrorNorms> {
    let [l2, h1] = integrate(space, full, &mut |_, x, y, uh, g| {
        let (u, gu) = exact(x, y);
        let e = u - uh;
        let (ex, ey) = (gu[0] - g[0], gu[1] - g[1]);
        [e * e, ex * ex + ey * ey]
    })?;
    Ok(ErrorNorms {
        l2: libm::sqrt(l2),
        h1_semi: libm::sqrt(h1),
        broken_h1: libm::sqrt(l2 + h1),
    })
}

/// `∫_Ω (u - u_h) w`
pub fn functional_error(
    space: &MortarSpace,
    full: &[f64],
    exact: &dyn Fn(f64, f64) -> f64,
    weight: &dyn Fn(f64, f64) -> f64,
) -> Result<f64> {
    Ok(integrate(space, full, &mut |_, x, y, uh, _| [(exact(x, y) - uh) * weight(x, y), 0.0])?[0])
}
