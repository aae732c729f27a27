//! Global DOF bookkeeping, block assembly over the broken space and Galerkin
//! reduction onto the constrained (weakly continuous) space.
//!
//! Full vectors hold one value per subdomain node, subdomain blocks
//! concatenated in partition order. Reduced vectors hold one value per free
//! DOF (neither Dirichlet nor slave); the prolongation `P` maps reduced to
//! full, filling slaves through the coupling maps and Dirichlet DOFs with 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::{local_matrices, Diffusivity, ReferenceElement};
use crate::geometry::{extract_interfaces, EdgeKind, InterfaceSegment, MeshSpec, MortarRule, Partition, Side, SubdomainMesh};
use crate::linalg::{CsrMatrix, SparseSymMatrix};
use crate::mortar::{build_coupling, CouplingMap, TraceSpace};

/// Role of a full DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofClass {
    Interior,
    Dirichlet,
    /// Trace DOF that other DOFs depend on (mortar trace or nonmortar endpoint).
    Master,
    /// Interior nonmortar trace DOF, eliminated through a coupling map.
    Slave,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    offsets: Vec<usize>,
    classes: Vec<DofClass>,
    reduced: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl DofMap {
    pub fn new(partition: &Partition, meshes: &[SubdomainMesh], couplings: &[CouplingMap]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(meshes.len() + 1);
        offsets.push(0);
        for m in meshes {
            offsets.push(offsets.last().unwrap() + m.n_nodes());
        }
        let n = *offsets.last().unwrap();
        let mut classes = vec![DofClass::Interior; n];
        for (s, m) in meshes.iter().enumerate() {
            for side in Side::ALL {
                if partition.edge_kind(s, side) == EdgeKind::Boundary {
                    for node in m.side_nodes(side) {
                        classes[offsets[s] + node] = DofClass::Dirichlet;
                    }
                }
            }
            // a corner where only interfaces meet can still lie on ∂Ω
            // (the re-entrant corner of the L-shape)
            let (nx, ny) = (m.nodes_x() - 1, m.nodes_y() - 1);
            for (ix, iy) in [(0, 0), (nx, 0), (0, ny), (nx, ny)] {
                let n = m.node(ix, iy);
                let (x, y) = m.node_coords(n);
                if on_domain_boundary(partition, x, y) {
                    classes[offsets[s] + n] = DofClass::Dirichlet;
                }
            }
        }
        for c in couplings {
            for sl in &c.slaves {
                let g = offsets[sl.subdomain] + sl.node;
                match classes[g] {
                    DofClass::Interior => classes[g] = DofClass::Slave,
                    _ => {
                        return Err(Error::ChainedConstraint {
                            subdomain: sl.subdomain,
                            node: sl.node,
                        })
                    }
                }
            }
        }
        for c in couplings {
            for m in &c.masters {
                let g = offsets[m.subdomain] + m.node;
                match classes[g] {
                    DofClass::Slave => {
                        return Err(Error::ChainedConstraint {
                            subdomain: m.subdomain,
                            node: m.node,
                        })
                    }
                    DofClass::Interior => classes[g] = DofClass::Master,
                    _ => {}
                }
            }
        }
        let mut reduced = vec![None; n];
        let mut free = Vec::new();
        for (g, c) in classes.iter().enumerate() {
            if matches!(c, DofClass::Interior | DofClass::Master) {
                reduced[g] = Some(free.len());
                free.push(g);
            }
        }
        Ok(Self {
            offsets,
            classes,
            reduced,
            free,
        })
    }

    #[inline]
    pub fn n_full(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub fn n_reduced(&self) -> usize {
        self.free.len()
    }

    #[inline]
    pub fn global(&self, subdomain: usize, node: usize) -> usize {
        self.offsets[subdomain] + node
    }

    pub fn offset(&self, subdomain: usize) -> usize {
        self.offsets[subdomain]
    }

    pub fn class(&self, g: usize) -> DofClass {
        self.classes[g]
    }

    pub fn classes(&self) -> &[DofClass] {
        &self.classes
    }

    pub fn reduced_index(&self, g: usize) -> Option<usize> {
        self.reduced[g]
    }

    /// Full index of each reduced DOF.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Full-vector range of one subdomain.
    pub fn block(&self, subdomain: usize) -> core::ops::Range<usize> {
        self.offsets[subdomain]..self.offsets[subdomain + 1]
    }
}

fn on_domain_boundary(partition: &Partition, x: f64, y: f64) -> bool {
    let bb = partition.bounding_box();
    let tol = 1e-12 * bb.width().max(bb.height());
    partition.subdomains().iter().enumerate().any(|(s, r)| {
        Side::ALL.into_iter().any(|side| {
            if partition.edge_kind(s, side) != EdgeKind::Boundary {
                return false;
            }
            let ((x0, y0), (x1, y1)) = match side {
                Side::Bottom => ((r.x0, r.y0), (r.x1, r.y0)),
                Side::Top => ((r.x0, r.y1), (r.x1, r.y1)),
                Side::Left => ((r.x0, r.y0), (r.x0, r.y1)),
                Side::Right => ((r.x1, r.y0), (r.x1, r.y1)),
            };
            x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol
        })
    })
}

/// Sparse map from reduced to full DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct Prolongation {
    matrix: CsrMatrix,
}

impl Prolongation {
    pub fn new(dofs: &DofMap, couplings: &[CouplingMap]) -> Self {
        let mut t = Vec::new();
        for (r, &g) in dofs.free_dofs().iter().enumerate() {
            t.push((g, r, 1.0));
        }
        for c in couplings {
            for (i, sl) in c.slaves.iter().enumerate() {
                let gs = dofs.global(sl.subdomain, sl.node);
                for (j, m) in c.masters.iter().enumerate() {
                    let gm = dofs.global(m.subdomain, m.node);
                    let v = c.coefficients.get(i, j);
                    if let Some(r) = dofs.reduced_index(gm) {
                        if v != 0.0 {
                            t.push((gs, r, v));
                        }
                    }
                }
            }
        }
        Self {
            matrix: CsrMatrix::from_triplets(dofs.n_full(), dofs.n_reduced(), t),
        }
    }

    /// Identity on `n` DOFs (no constraints, no Dirichlet nodes).
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CsrMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect()),
        }
    }

    pub fn from_matrix(matrix: CsrMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn n_full(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_reduced(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, reduced: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(reduced)
    }

    pub fn apply_transpose(&self, full: &[f64]) -> Vec<f64> {
        self.matrix.transpose_mul_vec(full)
    }
}

/// Block-diagonal mass and stiffness over the broken space.
pub fn assemble_unconstrained(
    meshes: &[SubdomainMesh],
    alphas: &[Diffusivity],
) -> Result<(SparseSymMatrix, SparseSymMatrix)> {
    if alphas.len() != meshes.len() {
        return Err(Error::DimensionMismatch {
            expected: meshes.len(),
            got: alphas.len(),
        });
    }
    let n: usize = meshes.iter().map(SubdomainMesh::n_nodes).sum();
    let mut tm = Vec::new();
    let mut ta = Vec::new();
    let mut offset = 0;
    let mut elements: Vec<ReferenceElement> = Vec::new();
    for (mesh, &alpha) in meshes.iter().zip(alphas) {
        if !elements.iter().any(|e| e.degree() == mesh.degree()) {
            elements.push(ReferenceElement::new(mesh.degree())?);
        }
        let el = elements.iter().find(|e| e.degree() == mesh.degree()).unwrap();
        for c in 0..mesh.n_cells() {
            let (m, a) = local_matrices(el, &mesh.cell_rect(c), alpha)?;
            let nodes = mesh.cell_nodes(c);
            for (i, &ni) in nodes.iter().enumerate() {
                for (j, &nj) in nodes.iter().enumerate() {
                    let (gi, gj) = (offset + ni, offset + nj);
                    if gi <= gj {
                        tm.push((gi, gj, m.get(i, j)));
                        ta.push((gi, gj, a.get(i, j)));
                    }
                }
            }
        }
        offset += mesh.n_nodes();
    }
    Ok((SparseSymMatrix::from_upper_triplets(n, tm), SparseSymMatrix::from_upper_triplets(n, ta)))
}

/// `Pᵀ K P`, summing only upper-triangle entries and mirroring.
pub fn reduce_matrix(k: &SparseSymMatrix, p: &Prolongation) -> Result<SparseSymMatrix> {
    if k.dim() != p.n_full() {
        return Err(Error::DimensionMismatch {
            expected: p.n_full(),
            got: k.dim(),
        });
    }
    let pm = p.matrix();
    let mut t = Vec::new();
    for a in 0..k.dim() {
        let (pa_cols, pa_vals) = pm.row(a);
        if pa_cols.is_empty() {
            continue;
        }
        let (kc, kv) = k.row(a);
        for (&b, &kab) in kc.iter().zip(kv) {
            let (pb_cols, pb_vals) = pm.row(b);
            for (&i, &pai) in pa_cols.iter().zip(pa_vals) {
                for (&j, &pbj) in pb_cols.iter().zip(pb_vals) {
                    if i <= j {
                        t.push((i, j, pai * kab * pbj));
                    }
                }
            }
        }
    }
    Ok(SparseSymMatrix::from_upper_triplets(p.n_reduced(), t))
}

/// `Pᵀ b`
pub fn reduce_vector(b: &[f64], p: &Prolongation) -> Result<Vec<f64>> {
    if b.len() != p.n_full() {
        return Err(Error::DimensionMismatch {
            expected: p.n_full(),
            got: b.len(),
        });
    }
    Ok(p.apply_transpose(b))
}

/// The constrained finite element space: meshes, interfaces, couplings and
/// the DOF bookkeeping that ties them together.
#[derive(Debug, Clone)]
pub struct MortarSpace {
    partition: Partition,
    meshes: Vec<SubdomainMesh>,
    interfaces: Vec<InterfaceSegment>,
    couplings: Vec<CouplingMap>,
    dofs: DofMap,
    prolongation: Prolongation,
    elements: Vec<ReferenceElement>,
}

impl MortarSpace {
    pub fn new(partition: Partition, specs: &[MeshSpec], rule: &MortarRule) -> Result<Self> {
        if specs.len() != partition.len() {
            return Err(Error::MeshCount {
                expected: partition.len(),
                got: specs.len(),
            });
        }
        let meshes = specs
            .iter()
            .enumerate()
            .map(|(i, s)| SubdomainMesh::from_spec(&partition, i, *s))
            .collect::<Result<Vec<_>>>()?;
        let interfaces = extract_interfaces(&partition, &meshes, rule)?;
        let couplings = interfaces.iter().map(build_coupling).collect::<Result<Vec<_>>>()?;
        let dofs = DofMap::new(&partition, &meshes, &couplings)?;
        let prolongation = Prolongation::new(&dofs, &couplings);
        let mut elements: Vec<ReferenceElement> = Vec::new();
        for m in &meshes {
            if !elements.iter().any(|e| e.degree() == m.degree()) {
                elements.push(ReferenceElement::new(m.degree())?);
            }
        }
        Ok(Self {
            partition,
            meshes,
            interfaces,
            couplings,
            dofs,
            prolongation,
            elements,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn meshes(&self) -> &[SubdomainMesh] {
        &self.meshes
    }

    pub fn interfaces(&self) -> &[InterfaceSegment] {
        &self.interfaces
    }

    pub fn couplings(&self) -> &[CouplingMap] {
        &self.couplings
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn prolongation(&self) -> &Prolongation {
        &self.prolongation
    }

    pub fn element(&self, degree: usize) -> &ReferenceElement {
        self.elements.iter().find(|e| e.degree() == degree).expect("element cached for every mesh degree")
    }

    /// Largest cell diameter over all subdomains.
    pub fn h_max(&self) -> f64 {
        self.meshes.iter().map(SubdomainMesh::h).fold(0.0, f64::max)
    }

    pub fn prolong(&self, reduced: &[f64]) -> Vec<f64> {
        self.prolongation.apply(reduced)
    }

    /// Nodal values of `f(subdomain, x, y)` at every full DOF (a broken
    /// function, generally not in the constrained space).
    pub fn nodal_values(&self, f: &dyn Fn(usize, f64, f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dofs.n_full()];
        for (s, m) in self.meshes.iter().enumerate() {
            for n in 0..m.n_nodes() {
                let (x, y) = m.node_coords(n);
                out[self.dofs.global(s, n)] = f(s, x, y);
            }
        }
        out
    }

    /// Mortar interpolant: nodal values at free DOFs, slaves from the
    /// couplings, Dirichlet DOFs zero. Returned as a reduced vector.
    pub fn interpolate(&self, f: &dyn Fn(usize, f64, f64) -> f64) -> Vec<f64> {
        self.dofs
            .free_dofs()
            .iter()
            .map(|&g| {
                let s = self.subdomain_of(g);
                let (x, y) = self.meshes[s].node_coords(g - self.dofs.offset(s));
                f(s, x, y)
            })
            .collect()
    }

    pub fn subdomain_of(&self, g: usize) -> usize {
        (0..self.meshes.len()).find(|&s| self.dofs.block(s).contains(&g)).expect("DOF in range")
    }

    /// Value of a full vector at `(x, y)`, taken from the first subdomain
    /// containing the point.
    pub fn evaluate(&self, full: &[f64], x: f64, y: f64) -> Option<f64> {
        for (s, m) in self.meshes.iter().enumerate() {
            if let Some((c, xi, eta)) = m.locate(x, y) {
                let (vals, _) = self.element(m.degree()).eval(xi, eta);
                let off = self.dofs.offset(s);
                return Some(m.cell_nodes(c).iter().zip(&vals).map(|(&n, v)| v * full[off + n]).sum());
            }
        }
        None
    }

    pub fn assemble(&self, alphas: &[Diffusivity]) -> Result<(SparseSymMatrix, SparseSymMatrix)> {
        assemble_unconstrained(&self.meshes, alphas)
    }

    /// Full load vector
    /// `∫ f φ + Σ_i ∫_{∂Ω_i ∩ Γ} (q_i · n_i) φ` where `q_i = α_i ∇u_i` is the
    /// optional interface flux of each side.
    pub fn assemble_load(
        &self,
        source: &dyn Fn(usize, f64, f64) -> f64,
        flux: Option<&dyn Fn(usize, f64, f64) -> [f64; 2]>,
    ) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dofs.n_full()];
        for (s, m) in self.meshes.iter().enumerate() {
            let el = self.element(m.degree());
            let off = self.dofs.offset(s);
            for c in 0..m.n_cells() {
                let f = |x: f64, y: f64, _t: f64| source(s, x, y);
                let l = crate::fem::local_load(el, &m.cell_rect(c), &f, 0.0)?;
                for (&n, v) in m.cell_nodes(c).iter().zip(l) {
                    out[off + n] += v;
                }
            }
        }
        if let Some(q) = flux {
            self.add_interface_flux(&mut out, q, 1.0)?;
        }
        Ok(out)
    }

    /// Adds `sign · Σ_sides ∫_γ (q_i · n_i) φ` on every interface.
    pub(crate) fn add_interface_flux(
        &self,
        out: &mut [f64],
        q: &dyn Fn(usize, f64, f64) -> [f64; 2],
        sign: f64,
    ) -> Result<()> {
        for seg in &self.interfaces {
            let order = seg.mortar.degree.max(seg.nonmortar.degree) + 3;
            let quad = crate::mortar::interface_quadrature(&seg.mortar.breakpoints, &seg.nonmortar.breakpoints, order)?;
            for (trace, cells) in [(&seg.mortar, &quad.cells_a), (&seg.nonmortar, &quad.cells_b)] {
                let space = TraceSpace::from_trace(trace)?;
                let normal = trace.side.outward_normal();
                let k = trace.degree;
                let off = self.dofs.offset(trace.subdomain);
                for p in 0..quad.len() {
                    let s = quad.points[p];
                    let (x, y) = seg.point(s);
                    let qv = q(trace.subdomain, x, y);
                    let qn = sign * quad.weights[p] * (qv[0] * normal[0] + qv[1] * normal[1]);
                    let e = cells[p];
                    for (a, phi) in space.eval_in(e, s).iter().enumerate() {
                        out[off + trace.nodes[e * k + a]] += qn * phi;
                    }
                }
            }
        }
        Ok(())
    }

    /// `∫ q · ∇φ` over all cells for a vector field `q(subdomain, x, y)`.
    pub fn assemble_gradient_load(&self, q: &dyn Fn(usize, f64, f64) -> [f64; 2]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dofs.n_full()];
        for (s, m) in self.meshes.iter().enumerate() {
            let el = self.element(m.degree());
            let rule = el.quadrature();
            let off = self.dofs.offset(s);
            for c in 0..m.n_cells() {
                let r = m.cell_rect(c);
                let (hx, hy) = (r.width(), r.height());
                let jac = 0.25 * hx * hy;
                let nodes = m.cell_nodes(c);
                for (qy, wy) in rule.points.iter().zip(&rule.weights) {
                    for (qx, wx) in rule.points.iter().zip(&rule.weights) {
                        let x = r.x0 + 0.5 * hx * (qx + 1.0);
                        let y = r.y0 + 0.5 * hy * (qy + 1.0);
                        let qv = q(s, x, y);
                        let w = wx * wy * jac;
                        let (_, grads) = el.eval(*qx, *qy);
                        for (&n, g) in nodes.iter().zip(&grads) {
                            out[off + n] += w * (qv[0] * g[0] * 2.0 / hx + qv[1] * g[1] * 2.0 / hy);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
