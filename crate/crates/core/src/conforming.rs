//! Single-domain conforming reference discretization for matching grids.
//!
//! Subdomain nodes at coinciding coordinates are merged into one global
//! unknown and element matrices are scattered directly into that numbering,
//! without going through the mortar coupling. Used as an independent
//! reference: on matching grids the mortar space coincides with the
//! conforming space.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::{local_load, local_matrices, Diffusivity, ReferenceElement};
use crate::geometry::{EdgeKind, Partition, Side, SubdomainMesh};
use crate::linalg::SparseSymMatrix;

#[derive(Debug, Clone)]
pub struct ConformingSystem {
    /// `unknown[s][node]`: free global index of a subdomain node, if any.
    unknown: Vec<Vec<Option<usize>>>,
    n_free: usize,
    mass: SparseSymMatrix,
    stiffness: SparseSymMatrix,
}

fn key(x: f64, y: f64, scale: f64) -> (i64, i64) {
    let q = |v: f64| libm::round(v / scale * 1e9) as i64;
    (q(x), q(y))
}

impl ConformingSystem {
    /// Fails with `NonconformingInterface` if an interface node has no
    /// partner on the other side.
    pub fn new(partition: &Partition, meshes: &[SubdomainMesh], alphas: &[Diffusivity]) -> Result<Self> {
        if meshes.len() != partition.len() || alphas.len() != meshes.len() {
            return Err(Error::MeshCount {
                expected: partition.len(),
                got: meshes.len().min(alphas.len()),
            });
        }
        let bb = partition.bounding_box();
        let scale = bb.width().max(bb.height());
        let mut ids: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut global: Vec<Vec<usize>> = Vec::with_capacity(meshes.len());
        let mut copies: Vec<usize> = Vec::new();
        let mut dirichlet: Vec<bool> = Vec::new();
        for (s, m) in meshes.iter().enumerate() {
            let mut on_boundary = vec![false; m.n_nodes()];
            for side in Side::ALL {
                if partition.edge_kind(s, side) == EdgeKind::Boundary {
                    for n in m.side_nodes(side) {
                        on_boundary[n] = true;
                    }
                }
            }
            let mut g = Vec::with_capacity(m.n_nodes());
            for (n, &b) in on_boundary.iter().enumerate() {
                let (x, y) = m.node_coords(n);
                let next = ids.len();
                let id = *ids.entry(key(x, y, scale)).or_insert(next);
                if id == copies.len() {
                    copies.push(0);
                    dirichlet.push(false);
                }
                copies[id] += 1;
                dirichlet[id] |= b;
                g.push(id);
            }
            global.push(g);
        }
        // every node strictly inside an interface must be shared
        for iface in partition.interfaces() {
            let (a, b) = iface.subdomains;
            for (s, side) in [(a, iface.sides.0), (b, iface.sides.1)] {
                let nodes = meshes[s].side_nodes(side);
                for &n in &nodes[1..nodes.len() - 1] {
                    if copies[global[s][n]] < 2 {
                        return Err(Error::NonconformingInterface { a, b });
                    }
                }
            }
        }
        let mut free = vec![None; copies.len()];
        let mut n_free = 0;
        for (id, &d) in dirichlet.iter().enumerate() {
            if !d {
                free[id] = Some(n_free);
                n_free += 1;
            }
        }
        let unknown: Vec<Vec<Option<usize>>> =
            global.iter().map(|g| g.iter().map(|&id| free[id]).collect()).collect();

        let mut tm = Vec::new();
        let mut ta = Vec::new();
        for (s, (m, &alpha)) in meshes.iter().zip(alphas).enumerate() {
            let el = ReferenceElement::new(m.degree())?;
            for c in 0..m.n_cells() {
                let (lm, la) = local_matrices(&el, &m.cell_rect(c), alpha)?;
                let nodes = m.cell_nodes(c);
                for (i, &ni) in nodes.iter().enumerate() {
                    let Some(gi) = unknown[s][ni] else { continue };
                    for (j, &nj) in nodes.iter().enumerate() {
                        let Some(gj) = unknown[s][nj] else { continue };
                        if gi <= gj {
                            tm.push((gi, gj, lm.get(i, j)));
                            ta.push((gi, gj, la.get(i, j)));
                        }
                    }
                }
            }
        }
        Ok(Self {
            unknown,
            n_free,
            mass: SparseSymMatrix::from_upper_triplets(n_free, tm),
            stiffness: SparseSymMatrix::from_upper_triplets(n_free, ta),
        })
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn mass(&self) -> &SparseSymMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &SparseSymMatrix {
        &self.stiffness
    }

    /// `∫ f φ_i` for every free unknown.
    pub fn load(&self, meshes: &[SubdomainMesh], source: &dyn Fn(usize, f64, f64) -> f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_free];
        for (s, m) in meshes.iter().enumerate() {
            let el = ReferenceElement::new(m.degree())?;
            for c in 0..m.n_cells() {
                let f = |x: f64, y: f64, _t: f64| source(s, x, y);
                let l = local_load(&el, &m.cell_rect(c), &f, 0.0)?;
                for (&n, v) in m.cell_nodes(c).iter().zip(l) {
                    if let Some(g) = self.unknown[s][n] {
                        out[g] += v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Free unknowns read off per-subdomain nodal values (the first copy of
    /// each shared node wins).
    pub fn from_broken(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_free];
        let mut seen = vec![false; self.n_free];
        for (g, u) in self.unknown.iter().flatten().enumerate() {
            if let Some(i) = *u {
                if !seen[i] {
                    out[i] = full[g];
                    seen[i] = true;
                }
            }
        }
        out
    }

    /// Expands a vector of free unknowns to per-subdomain nodal values,
    /// blocks concatenated in partition order.
    pub fn to_broken(&self, x: &[f64]) -> Vec<f64> {
        self.unknown
            .iter()
            .flat_map(|u| u.iter().map(|g| g.map_or(0.0, |g| x[g])))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Cholesky;

    #[test]
    fn merges_shared_interface_nodes() {
        let p = Partition::preset("unit-square-2x1").unwrap();
        let m = vec![SubdomainMesh::new(&p, 0, 2, 4, 1).unwrap(), SubdomainMesh::new(&p, 1, 2, 4, 1).unwrap()];
        let sys = ConformingSystem::new(&p, &m, &[1.0.into(), 1.0.into()]).unwrap();
        // 5 x 5 global grid, 3 x 3 interior
        assert_eq!(sys.n_free(), 9);
    }

    #[test]
    fn rejects_nonmatching_grids() {
        let p = Partition::preset("unit-square-2x1").unwrap();
        let m = vec![SubdomainMesh::new(&p, 0, 2, 4, 1).unwrap(), SubdomainMesh::new(&p, 1, 2, 3, 1).unwrap()];
        assert_eq!(
            ConformingSystem::new(&p, &m, &[1.0.into(), 1.0.into()]).unwrap_err(),
            Error::NonconformingInterface { a: 0, b: 1 }
        );
    }

    #[test]
    fn reproduces_quadratic_solution_exactly() {
        // -Δu = 2(x(1-x) + y(1-y)) with u = x(1-x)y(1-y), which lies in Q_2
        let p = Partition::preset("unit-square-2x2").unwrap();
        let m: Vec<_> = (0..4).map(|s| SubdomainMesh::new(&p, s, 2, 2, 2).unwrap()).collect();
        let sys = ConformingSystem::new(&p, &m, &[1.0.into(); 4]).unwrap();
        let b = sys.load(&m, &|_, x, y| 2.0 * (x * (1.0 - x) + y * (1.0 - y))).unwrap();
        let u = sys.to_broken(&Cholesky::factor(sys.stiffness()).unwrap().solve(&b));
        let mut off = 0;
        for mesh in &m {
            for n in 0..mesh.n_nodes() {
                let (x, y) = mesh.node_coords(n);
                assert!((u[off + n] - x * (1.0 - x) * y * (1.0 - y)).abs() < 1e-13);
            }
            off += mesh.n_nodes();
        }
    }
}
