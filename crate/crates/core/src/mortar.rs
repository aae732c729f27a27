//! Multiplier spaces, the mortar projection and master–slave elimination of
//! the weak continuity constraint across nonmatching interfaces.
//!
//! Along an interface γ the nonmortar trace mesh has subintervals
//! `I_0 … I_l`. The multiplier space consists of continuous piecewise
//! polynomials of degree `k` on `I_1 … I_{l-1}` and degree `k - 1` on the two
//! end subintervals. Its dimension `k(l + 1) - 1` equals the number of
//! interior nonmortar trace nodes, so the moment conditions
//!
//! ```text
//! ∫_γ (v_M − v_NM) χ ds = 0   for all multipliers χ
//! ```
//!
//! can be solved for the interior nonmortar values given the mortar trace and
//! the two nonmortar endpoint values.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::{gauss_legendre, gauss_lobatto_nodes, Lagrange1d};
use crate::geometry::{locate_interval, InterfaceSegment, TraceMesh};
use crate::linalg::{DenseMatrix, Lu};

/// Continuous piecewise Q_k trace space on a 1D mesh, nodal basis on
/// Gauss–Lobatto points. Node `e·k + a` is local node `a` of interval `e`.
#[derive(Debug, Clone)]
pub struct TraceSpace {
    breakpoints: Vec<f64>,
    degree: usize,
    basis: Lagrange1d,
}

impl TraceSpace {
    pub fn new(breakpoints: Vec<f64>, degree: usize) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                name: "breakpoints",
                reason: "need at least one interval with increasing breakpoints",
            });
        }
        let basis = Lagrange1d::new(gauss_lobatto_nodes(degree)?);
        Ok(Self {
            breakpoints,
            degree,
            basis,
        })
    }

    pub fn from_trace(t: &TraceMesh) -> Result<Self> {
        Self::new(t.breakpoints.clone(), t.degree)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn subintervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.subintervals() * self.degree + 1
    }

    fn reference(&self, e: usize, s: f64) -> f64 {
        let (a, b) = (self.breakpoints[e], self.breakpoints[e + 1]);
        2.0 * (s - a) / (b - a) - 1.0
    }

    /// Values of the `k + 1` basis functions supported on interval `e`
    /// (nodes `e·k ..= e·k + k`) at `s`.
    pub fn eval_in(&self, e: usize, s: f64) -> Vec<f64> {
        self.basis.values(self.reference(e, s))
    }

    /// Nodal positions along the trace.
    pub fn node_positions(&self) -> Vec<f64> {
        let k = self.degree;
        let mut out = Vec::with_capacity(self.n_nodes());
        for e in 0..self.subintervals() {
            let (a, b) = (self.breakpoints[e], self.breakpoints[e + 1]);
            for &g in &self.basis.nodes()[..k] {
                out.push(a + 0.5 * (g + 1.0) * (b - a));
            }
        }
        out.push(*self.breakpoints.last().unwrap());
        out
    }

    pub fn evaluate(&self, values: &[f64], s: f64) -> f64 {
        let e = locate_interval(&self.breakpoints, s);
        let k = self.degree;
        self.eval_in(e, s).iter().enumerate().map(|(a, phi)| phi * values[e * k + a]).sum()
    }
}

/// Dimension of the multiplier space on a nonmortar mesh with
/// `subintervals = l + 1` pieces: `k(l + 1) − 1`.
pub fn multiplier_dim(subintervals: usize, degree: usize) -> Result<usize> {
    if subintervals < 2 || degree == 0 {
        return Err(Error::InvalidMultiplierSpace { subintervals, degree });
    }
    Ok(degree * subintervals - 1)
}

/// Multiplier space on a nonmortar trace mesh.
///
/// Basis function `i` is attached to interior trace node `i + 1`. On
/// interior subintervals it coincides with the nodal trace basis; on the end
/// subintervals it is the degree `k − 1` Lagrange polynomial through the
/// nodes other than the domain endpoint.
#[derive(Debug, Clone)]
pub struct MultiplierSpace {
    breakpoints: Vec<f64>,
    degree: usize,
    full: Lagrange1d,
    left: Lagrange1d,
    right: Lagrange1d,
}

impl MultiplierSpace {
    pub fn new(breakpoints: Vec<f64>, degree: usize) -> Result<Self> {
        multiplier_dim(breakpoints.len().saturating_sub(1), degree)?;
        let gll = gauss_lobatto_nodes(degree)?;
        Ok(Self {
            breakpoints,
            degree,
            left: Lagrange1d::new(gll[1..].to_vec()),
            right: Lagrange1d::new(gll[..degree].to_vec()),
            full: Lagrange1d::new(gll),
        })
    }

    pub fn from_trace(t: &TraceMesh) -> Result<Self> {
        Self::new(t.breakpoints.clone(), t.degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn subintervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.degree * self.subintervals() - 1
    }

    /// Basis functions supported on interval `e` at `s`, as
    /// `(first basis index, values)`; indices are consecutive.
    pub fn eval_in(&self, e: usize, s: f64) -> (usize, Vec<f64>) {
        let (a, b) = (self.breakpoints[e], self.breakpoints[e + 1]);
        let xi = 2.0 * (s - a) / (b - a) - 1.0;
        let k = self.degree;
        let last = self.subintervals() - 1;
        if e == 0 {
            // trace nodes 1..=k  ->  basis 0..k
            (0, self.left.values(xi))
        } else if e == last {
            // trace nodes e·k ..= e·k + k − 1
            (e * k - 1, self.right.values(xi))
        } else {
            (e * k - 1, self.full.values(xi))
        }
    }

    pub fn evaluate(&self, coeffs: &[f64], s: f64) -> f64 {
        let e = locate_interval(&self.breakpoints, s);
        let (first, vals) = self.eval_in(e, s);
        vals.iter().enumerate().map(|(i, v)| v * coeffs[first + i]).sum()
    }
}

/// Composite Gauss rule on the union of two breakpoint sets.
///
/// Every merged subinterval lies inside one interval of each mesh, recorded
/// in `cells_a` / `cells_b` per point, so products of piecewise polynomials
/// from the two meshes are integrated exactly up to degree `2·order − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceQuadrature {
    pub breakpoints: Vec<f64>,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub cells_a: Vec<usize>,
    pub cells_b: Vec<usize>,
}

impl InterfaceQuadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&s, w)| w * f(s)).sum()
    }
}

/// Sorted union of two breakpoint lists; points closer than a relative
/// `1e-12` are identified.
pub fn merge_breakpoints(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let (a0, a1) = (a[0], *a.last().unwrap());
    let (b0, b1) = (b[0], *b.last().unwrap());
    let tol = 1e-12 * (a1 - a0).abs().max(b1 - b0).max(1e-300);
    if (a0 - b0).abs() > tol || (a1 - b1).abs() > tol {
        return Err(Error::MismatchedExtent);
    }
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for v in all {
        match out.last() {
            Some(&l) if v - l <= tol => {}
            _ => out.push(v),
        }
    }
    // keep mesh a's endpoints exactly
    out[0] = a0;
    let n = out.len();
    out[n - 1] = a1;
    Ok(out)
}

pub fn interface_quadrature(a: &[f64], b: &[f64], order: usize) -> Result<InterfaceQuadrature> {
    let merged = merge_breakpoints(a, b)?;
    let rule = gauss_legendre(order)?;
    let n = (merged.len() - 1) * rule.len();
    let mut q = InterfaceQuadrature {
        breakpoints: Vec::new(),
        points: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        cells_a: Vec::with_capacity(n),
        cells_b: Vec::with_capacity(n),
    };
    for w in merged.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let (ca, cb) = (locate_interval(a, mid), locate_interval(b, mid));
        let half = 0.5 * (hi - lo);
        for (x, wt) in rule.points.iter().zip(&rule.weights) {
            q.points.push(mid + half * x);
            q.weights.push(wt * half);
            q.cells_a.push(ca);
            q.cells_b.push(cb);
        }
    }
    q.breakpoints = merged;
    Ok(q)
}

/// Gram matrix `D_ij = ∫ χ_i φ_j` between multipliers and the interior
/// nonmortar trace basis.
fn multiplier_gram(trace: &TraceSpace, mult: &MultiplierSpace) -> Result<DenseMatrix> {
    let k = trace.degree();
    let dim = mult.dim();
    let rule = gauss_legendre(k + 2)?;
    let mut d = DenseMatrix::zeros(dim, dim);
    for e in 0..trace.subintervals() {
        let (a, b) = (trace.breakpoints[e], trace.breakpoints[e + 1]);
        let half = 0.5 * (b - a);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let s = a + half * (x + 1.0);
            let phi = trace.eval_in(e, s);
            let (first, chi) = mult.eval_in(e, s);
            for (i, c) in chi.iter().enumerate() {
                for (la, p) in phi.iter().enumerate() {
                    let node = e * k + la;
                    if node == 0 || node == trace.n_nodes() - 1 {
                        continue;
                    }
                    d.add(first + i, node - 1, w * half * c * p);
                }
            }
        }
    }
    Ok(d)
}

/// Mortar projection onto the interior nonmortar trace space: the unique
/// `Πv` vanishing at both ends of γ with `∫ (Πv − v) χ = 0` for every
/// multiplier `χ`. Returns the values at interior trace nodes.
pub fn mortar_project(breakpoints: &[f64], degree: usize, v: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
    let trace = TraceSpace::new(breakpoints.to_vec(), degree)?;
    let mult = MultiplierSpace::new(breakpoints.to_vec(), degree)?;
    let d = multiplier_gram(&trace, &mult)?;
    let rule = gauss_legendre(degree + 6)?;
    let mut rhs = vec![0.0; mult.dim()];
    for e in 0..trace.subintervals() {
        let (a, b) = (breakpoints[e], breakpoints[e + 1]);
        let half = 0.5 * (b - a);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let s = a + half * (x + 1.0);
            let fv = v(s) * w * half;
            let (first, chi) = mult.eval_in(e, s);
            for (i, c) in chi.iter().enumerate() {
                rhs[first + i] += fv * c;
            }
        }
    }
    Ok(Lu::factor(&d)?.solve(&rhs))
}

/// A node of a subdomain mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub subdomain: usize,
    pub node: usize,
}

/// Slave/master relation on one interface.
///
/// `coefficients` is `slaves × masters`; masters are all mortar trace nodes
/// followed by the two nonmortar endpoint nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    pub gamma_id: usize,
    pub slaves: Vec<NodeRef>,
    pub masters: Vec<NodeRef>,
    pub coefficients: DenseMatrix,
}

impl CouplingMap {
    /// Slave values for the given master values.
    pub fn slave_values(&self, masters: &[f64]) -> Vec<f64> {
        self.coefficients.mul_vec(masters)
    }
}

fn trace_moments(
    q: &InterfaceQuadrature,
    trace: &TraceSpace,
    cells: &[usize],
    mult: &MultiplierSpace,
    cells_mult: &[usize],
) -> DenseMatrix {
    let k = trace.degree();
    let mut m = DenseMatrix::zeros(mult.dim(), trace.n_nodes());
    for p in 0..q.len() {
        let s = q.points[p];
        let phi = trace.eval_in(cells[p], s);
        let (first, chi) = mult.eval_in(cells_mult[p], s);
        for (i, c) in chi.iter().enumerate() {
            for (a, v) in phi.iter().enumerate() {
                m.add(first + i, cells[p] * k + a, q.weights[p] * c * v);
            }
        }
    }
    m
}

/// Builds the elimination map for one interface:
/// `slaves = D⁻¹ [B_M | −B_E] · masters`.
pub fn build_coupling(seg: &InterfaceSegment) -> Result<CouplingMap> {
    let mortar = TraceSpace::from_trace(&seg.mortar)?;
    let nonmortar = TraceSpace::from_trace(&seg.nonmortar)?;
    let mult = MultiplierSpace::from_trace(&seg.nonmortar).map_err(|_| Error::NonmortarTooCoarse {
        gamma: seg.gamma_id,
        subintervals: seg.nonmortar.subintervals(),
    })?;
    let order = mortar.degree().max(nonmortar.degree()) + 2;
    let q = interface_quadrature(mortar.breakpoints(), nonmortar.breakpoints(), order)?;
    let b_m = trace_moments(&q, &mortar, &q.cells_a, &mult, &q.cells_b);
    let b_nm = trace_moments(&q, &nonmortar, &q.cells_b, &mult, &q.cells_b);

    let dim = mult.dim();
    let n_nm = nonmortar.n_nodes();
    let n_m = mortar.n_nodes();
    let mut d = DenseMatrix::zeros(dim, dim);
    let mut rhs = DenseMatrix::zeros(dim, n_m + 2);
    for i in 0..dim {
        for j in 0..dim {
            d.set(i, j, b_nm.get(i, j + 1));
        }
        for j in 0..n_m {
            rhs.set(i, j, b_m.get(i, j));
        }
        rhs.set(i, n_m, -b_nm.get(i, 0));
        rhs.set(i, n_m + 1, -b_nm.get(i, n_nm - 1));
    }
    let coefficients = d.solve_matrix(&rhs)?;

    let nm_sub = seg.nonmortar.subdomain;
    let slaves = seg.nonmortar.nodes[1..n_nm - 1]
        .iter()
        .map(|&node| NodeRef { subdomain: nm_sub, node })
        .collect();
    let mut masters: Vec<NodeRef> = seg
        .mortar
        .nodes
        .iter()
        .map(|&node| NodeRef {
            subdomain: seg.mortar.subdomain,
            node,
        })
        .collect();
    masters.push(NodeRef {
        subdomain: nm_sub,
        node: seg.nonmortar.nodes[0],
    });
    masters.push(NodeRef {
        subdomain: nm_sub,
        node: seg.nonmortar.nodes[n_nm - 1],
    });
    Ok(CouplingMap {
        gamma_id: seg.gamma_id,
        slaves,
        masters,
        coefficients,
    })
}

/// `∫_γ (v_M − v_NM) χ_i ds` for every multiplier basis function, given full
/// nodal trace values on both sides.
pub fn jump_moments(seg: &InterfaceSegment, mortar_values: &[f64], nonmortar_values: &[f64]) -> Result<Vec<f64>> {
    let mortar = TraceSpace::from_trace(&seg.mortar)?;
    let nonmortar = TraceSpace::from_trace(&seg.nonmortar)?;
    let mult = MultiplierSpace::from_trace(&seg.nonmortar)?;
    let order = mortar.degree().max(nonmortar.degree()) + 2;
    let q = interface_quadrature(mortar.breakpoints(), nonmortar.breakpoints(), order)?;
    let (km, knm) = (mortar.degree(), nonmortar.degree());
    let mut out = vec![0.0; mult.dim()];
    for p in 0..q.len() {
        let s = q.points[p];
        let (ca, cb) = (q.cells_a[p], q.cells_b[p]);
        let vm: f64 = mortar.eval_in(ca, s).iter().enumerate().map(|(a, v)| v * mortar_values[ca * km + a]).sum();
        let vn: f64 = nonmortar.eval_in(cb, s).iter().enumerate().map(|(a, v)| v * nonmortar_values[cb * knm + a]).sum();
        let (first, chi) = mult.eval_in(cb, s);
        for (i, c) in chi.iter().enumerate() {
            out[first + i] += q.weights[p] * (vm - vn) * c;
        }
    }
    Ok(out)
}
