//! Rectangular subdomain partitions, structured per-subdomain meshes and the
//! interface skeleton with mortar/nonmortar side assignment.

use alloc::collections::VecDeque;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::gauss_lobatto_nodes;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= self.x0 - tol && x <= self.x1 + tol && y >= self.y0 - tol && y <= self.y1 + tol
    }
}

/// Edge of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            Side::Bottom => [0.0, -1.0],
            Side::Right => [1.0, 0.0],
            Side::Top => [0.0, 1.0],
            Side::Left => [-1.0, 0.0],
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Which coordinate is constant along an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `x = position`, parametrized by `y`.
    Vertical,
    /// `y = position`, parametrized by `x`.
    Horizontal,
}

/// A full edge shared by two subdomains (`subdomains.0 < subdomains.1`).
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSpec {
    pub subdomains: (usize, usize),
    pub sides: (Side, Side),
    pub orientation: Orientation,
    pub position: f64,
    pub extent: (f64, f64),
}

/// Classification of a subdomain edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Lies on ∂Ω (homogeneous Dirichlet).
    Boundary,
    /// Index into [`Partition::interfaces`].
    Interface(usize),
}

/// Geometrically conforming partition of a polygonal domain into
/// axis-aligned rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    subdomains: Vec<Rect>,
    interfaces: Vec<InterfaceSpec>,
    edges: Vec<[EdgeKind; 4]>,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

impl Partition {
    /// Validates the rectangles and discovers the interfaces between them.
    pub fn new(subdomains: Vec<Rect>) -> Result<Self> {
        let mut scale: f64 = 0.0;
        for (i, r) in subdomains.iter().enumerate() {
            let ok = [r.x0, r.x1, r.y0, r.y1].iter().all(|v| v.is_finite()) && r.width() > 0.0 && r.height() > 0.0;
            if !ok {
                return Err(Error::DegenerateSubdomain { index: i });
            }
            scale = scale.max(r.x0.abs()).max(r.x1.abs()).max(r.y0.abs()).max(r.y1.abs()).max(r.width()).max(r.height());
        }
        let tol = 1e-12 * scale.max(1.0);
        let mut interfaces = Vec::new();
        let mut edges = vec![[EdgeKind::Boundary; 4]; subdomains.len()];
        for a in 0..subdomains.len() {
            for b in a + 1..subdomains.len() {
                let (ra, rb) = (&subdomains[a], &subdomains[b]);
                let ox = ra.x1.min(rb.x1) - ra.x0.max(rb.x0);
                let oy = ra.y1.min(rb.y1) - ra.y0.max(rb.y0);
                if ox > tol && oy > tol {
                    return Err(Error::Overlap { a, b });
                }
                let found = if close(ox, 0.0, tol) && oy > tol {
                    // touching along a vertical line
                    let (sa, sb, pos) = if close(ra.x1, rb.x0, tol) {
                        (Side::Right, Side::Left, ra.x1)
                    } else {
                        (Side::Left, Side::Right, ra.x0)
                    };
                    if !(close(ra.y0, rb.y0, tol) && close(ra.y1, rb.y1, tol)) {
                        return Err(Error::NonconformingInterface { a, b });
                    }
                    Some((sa, sb, Orientation::Vertical, pos, (ra.y0, ra.y1)))
                } else if close(oy, 0.0, tol) && ox > tol {
                    let (sa, sb, pos) = if close(ra.y1, rb.y0, tol) {
                        (Side::Top, Side::Bottom, ra.y1)
                    } else {
                        (Side::Bottom, Side::Top, ra.y0)
                    };
                    if !(close(ra.x0, rb.x0, tol) && close(ra.x1, rb.x1, tol)) {
                        return Err(Error::NonconformingInterface { a, b });
                    }
                    Some((sa, sb, Orientation::Horizontal, pos, (ra.x0, ra.x1)))
                } else {
                    None
                };
                if let Some((sa, sb, orientation, position, extent)) = found {
                    let id = interfaces.len();
                    edges[a][sa.index()] = EdgeKind::Interface(id);
                    edges[b][sb.index()] = EdgeKind::Interface(id);
                    interfaces.push(InterfaceSpec {
                        subdomains: (a, b),
                        sides: (sa, sb),
                        orientation,
                        position,
                        extent,
                    });
                }
            }
        }
        Ok(Self {
            subdomains,
            interfaces,
            edges,
        })
    }

    /// Named partitions: `lshape`, `unit-square`, `unit-square-2x1`,
    /// `unit-square-2x2`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "lshape" => Self::lshape(),
            "unit-square" => Self::new(vec![Rect::new(0.0, 1.0, 0.0, 1.0)]),
            "unit-square-2x1" => Self::new(vec![Rect::new(0.0, 0.5, 0.0, 1.0), Rect::new(0.5, 1.0, 0.0, 1.0)]),
            "unit-square-2x2" => Self::new(vec![
                Rect::new(0.0, 0.5, 0.0, 0.5),
                Rect::new(0.5, 1.0, 0.0, 0.5),
                Rect::new(0.0, 0.5, 0.5, 1.0),
                Rect::new(0.5, 1.0, 0.5, 1.0),
            ]),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    /// `[-1,1]² \ [0,1]²` as three unit squares.
    pub fn lshape() -> Result<Self> {
        Self::new(vec![
            Rect::new(-1.0, 0.0, 0.0, 1.0),
            Rect::new(-1.0, 0.0, -1.0, 0.0),
            Rect::new(0.0, 1.0, -1.0, 0.0),
        ])
    }

    pub fn subdomains(&self) -> &[Rect] {
        &self.subdomains
    }

    pub fn interfaces(&self) -> &[InterfaceSpec] {
        &self.interfaces
    }

    pub fn len(&self) -> usize {
        self.subdomains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdomains.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.subdomains.iter().map(Rect::area).sum()
    }

    pub fn edge_kind(&self, subdomain: usize, side: Side) -> EdgeKind {
        self.edges[subdomain][side.index()]
    }

    pub fn bounding_box(&self) -> Rect {
        self.subdomains.iter().fold(
            Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |b, r| Rect::new(b.x0.min(r.x0), b.x1.max(r.x1), b.y0.min(r.y0), b.y1.max(r.y1)),
        )
    }

    /// Two-colouring of the subdomain adjacency graph by BFS parity; on a
    /// non-bipartite graph some neighbours share a colour.
    pub fn colouring(&self) -> Vec<u8> {
        let n = self.len();
        let mut colour = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for spec in &self.interfaces {
                    let w = match spec.subdomains {
                        (a, b) if a == v => b,
                        (a, b) if b == v => a,
                        _ => continue,
                    };
                    if colour[w] == u8::MAX {
                        colour[w] = 1 - colour[v];
                        queue.push_back(w);
                    }
                }
            }
        }
        colour
    }
}

/// Cell counts and polynomial degree for one subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub degree: usize,
}

/// Uniform tensor-product Q_k mesh on one rectangular subdomain.
///
/// Nodes are numbered `iy * (nx·k + 1) + ix` with nodal coordinates at
/// mapped Gauss–Lobatto points of each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainMesh {
    subdomain: usize,
    rect: Rect,
    nx: usize,
    ny: usize,
    degree: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
}

fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut v: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
    v[n] = b;
    v
}

fn nodal_coords(breaks: &[f64], gll: &[f64]) -> Vec<f64> {
    let k = gll.len() - 1;
    let mut out = Vec::with_capacity((breaks.len() - 1) * k + 1);
    for w in breaks.windows(2) {
        for &g in &gll[..k] {
            out.push(w[0] + 0.5 * (g + 1.0) * (w[1] - w[0]));
        }
    }
    out.push(*breaks.last().unwrap());
    out
}

impl SubdomainMesh {
    pub fn new(partition: &Partition, subdomain: usize, nx: usize, ny: usize, degree: usize) -> Result<Self> {
        let count = partition.len();
        let rect = *partition
            .subdomains()
            .get(subdomain)
            .ok_or(Error::SubdomainOutOfRange { index: subdomain, count })?;
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh {
                subdomain,
                reason: "cell counts must be positive",
            });
        }
        if degree == 0 {
            return Err(Error::InvalidMesh {
                subdomain,
                reason: "degree must be at least 1",
            });
        }
        let gll = gauss_lobatto_nodes(degree)?;
        let x_breaks = uniform_breaks(rect.x0, rect.x1, nx);
        let y_breaks = uniform_breaks(rect.y0, rect.y1, ny);
        Ok(Self {
            subdomain,
            rect,
            nx,
            ny,
            degree,
            xs: nodal_coords(&x_breaks, &gll),
            ys: nodal_coords(&y_breaks, &gll),
            x_breaks,
            y_breaks,
        })
    }

    pub fn from_spec(partition: &Partition, subdomain: usize, spec: MeshSpec) -> Result<Self> {
        Self::new(partition, subdomain, spec.nx, spec.ny, spec.degree)
    }

    #[inline]
    pub fn subdomain(&self) -> usize {
        self.subdomain
    }

    #[inline]
    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn cells_x(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn cells_y(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn nodes_x(&self) -> usize {
        self.xs.len()
    }

    #[inline]
    pub fn nodes_y(&self) -> usize {
        self.ys.len()
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    #[inline]
    pub fn node(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    pub fn node_coords(&self, n: usize) -> (f64, f64) {
        let w = self.xs.len();
        (self.xs[n % w], self.ys[n / w])
    }

    /// Largest cell diameter.
    pub fn h(&self) -> f64 {
        let hx = self.rect.width() / self.nx as f64;
        let hy = self.rect.height() / self.ny as f64;
        libm::sqrt(hx * hx + hy * hy)
    }

    pub fn cell_rect(&self, c: usize) -> Rect {
        let (cx, cy) = (c % self.nx, c / self.nx);
        Rect::new(self.x_breaks[cx], self.x_breaks[cx + 1], self.y_breaks[cy], self.y_breaks[cy + 1])
    }

    /// Subdomain node indices of cell `c` in reference-element order.
    pub fn cell_nodes(&self, c: usize) -> Vec<usize> {
        let k = self.degree;
        let (cx, cy) = (c % self.nx, c / self.nx);
        let mut out = Vec::with_capacity((k + 1) * (k + 1));
        for b in 0..=k {
            for a in 0..=k {
                out.push(self.node(cx * k + a, cy * k + b));
            }
        }
        out
    }

    /// Nodes on `side`, ordered by increasing coordinate along the edge.
    pub fn side_nodes(&self, side: Side) -> Vec<usize> {
        let (w, h) = (self.nodes_x(), self.nodes_y());
        match side {
            Side::Bottom => (0..w).map(|i| self.node(i, 0)).collect(),
            Side::Top => (0..w).map(|i| self.node(i, h - 1)).collect(),
            Side::Left => (0..h).map(|j| self.node(0, j)).collect(),
            Side::Right => (0..h).map(|j| self.node(w - 1, j)).collect(),
        }
    }

    /// Cell breakpoints along `side`.
    pub fn side_breakpoints(&self, side: Side) -> &[f64] {
        match side {
            Side::Bottom | Side::Top => &self.x_breaks,
            Side::Left | Side::Right => &self.y_breaks,
        }
    }

    /// Cell containing `(x, y)` and the reference coordinates within it.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, f64, f64)> {
        let tol = 1e-12 * (1.0 + self.rect.width().max(self.rect.height()));
        if !self.rect.contains(x, y, tol) {
            return None;
        }
        let cx = locate_interval(&self.x_breaks, x);
        let cy = locate_interval(&self.y_breaks, y);
        let r = self.cell_rect(cy * self.nx + cx);
        let xi = 2.0 * (x - r.x0) / r.width() - 1.0;
        let eta = 2.0 * (y - r.y0) / r.height() - 1.0;
        Some((cy * self.nx + cx, xi, eta))
    }
}

/// Index of the interval of sorted `breaks` that contains `s` (clamped).
pub fn locate_interval(breaks: &[f64], s: f64) -> usize {
    let n = breaks.len() - 1;
    match breaks.partition_point(|&b| b <= s) {
        0 => 0,
        p if p > n => n - 1,
        p => p - 1,
    }
}

/// One side's view of an interface: the inherited 1D trace mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMesh {
    pub subdomain: usize,
    pub side: Side,
    pub degree: usize,
    pub breakpoints: Vec<f64>,
    /// Subdomain node ids along the edge, ordered by increasing parameter.
    pub nodes: Vec<usize>,
}

impl TraceMesh {
    pub fn subintervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    fn from_mesh(mesh: &SubdomainMesh, side: Side) -> Self {
        Self {
            subdomain: mesh.subdomain(),
            side,
            degree: mesh.degree(),
            breakpoints: mesh.side_breakpoints(side).to_vec(),
            nodes: mesh.side_nodes(side),
        }
    }
}

/// An interface segment γ with its mortar and nonmortar traces.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSegment {
    pub gamma_id: usize,
    pub orientation: Orientation,
    pub position: f64,
    pub extent: (f64, f64),
    pub mortar: TraceMesh,
    pub nonmortar: TraceMesh,
}

impl InterfaceSegment {
    pub fn mortar_side(&self) -> usize {
        self.mortar.subdomain
    }

    pub fn nonmortar_side(&self) -> usize {
        self.nonmortar.subdomain
    }

    /// Physical point at parameter `s`.
    pub fn point(&self, s: f64) -> (f64, f64) {
        match self.orientation {
            Orientation::Vertical => (self.position, s),
            Orientation::Horizontal => (s, self.position),
        }
    }

    pub fn length(&self) -> f64 {
        self.extent.1 - self.extent.0
    }
}

/// Mortar side selection: the coarser trace (fewer subintervals) is mortar,
/// ties go to the lower subdomain index; per-interface overrides win.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MortarRule {
    /// `(interface index, mortar subdomain)`
    pub overrides: Vec<(usize, usize)>,
}

impl MortarRule {
    pub fn with_override(mut self, gamma: usize, mortar: usize) -> Self {
        self.overrides.push((gamma, mortar));
        self
    }
}

pub fn extract_interfaces(
    partition: &Partition,
    meshes: &[SubdomainMesh],
    rule: &MortarRule,
) -> Result<Vec<InterfaceSegment>> {
    if meshes.len() != partition.len() {
        return Err(Error::MeshCount {
            expected: partition.len(),
            got: meshes.len(),
        });
    }
    let mut out = Vec::with_capacity(partition.interfaces().len());
    for (gamma, spec) in partition.interfaces().iter().enumerate() {
        let (a, b) = spec.subdomains;
        let ta = TraceMesh::from_mesh(&meshes[a], spec.sides.0);
        let tb = TraceMesh::from_mesh(&meshes[b], spec.sides.1);
        let a_is_mortar = match rule.overrides.iter().rev().find(|o| o.0 == gamma) {
            Some(&(_, m)) if m == a => true,
            Some(&(_, m)) if m == b => false,
            Some(&(_, m)) => return Err(Error::InvalidMortarOverride { gamma, subdomain: m }),
            None => ta.subintervals() <= tb.subintervals(),
        };
        let (mortar, nonmortar) = if a_is_mortar { (ta, tb) } else { (tb, ta) };
        if nonmortar.subintervals() < 2 {
            return Err(Error::NonmortarTooCoarse {
                gamma,
                subintervals: nonmortar.subintervals(),
            });
        }
        out.push(InterfaceSegment {
            gamma_id: gamma,
            orientation: spec.orientation,
            position: spec.position,
            extent: spec.extent,
            mortar,
            nonmortar,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lshape_preset() {
        let p = Partition::preset("lshape").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.subdomains()[0], Rect::new(-1.0, 0.0, 0.0, 1.0));
        assert_eq!(p.subdomains()[1], Rect::new(-1.0, 0.0, -1.0, 0.0));
        assert_eq!(p.subdomains()[2], Rect::new(0.0, 1.0, -1.0, 0.0));
        assert_eq!(p.interfaces().len(), 2);
        let i0 = &p.interfaces()[0];
        assert_eq!(i0.subdomains, (0, 1));
        assert_eq!(i0.orientation, Orientation::Horizontal);
        assert_eq!((i0.position, i0.extent), (0.0, (-1.0, 0.0)));
        let i1 = &p.interfaces()[1];
        assert_eq!(i1.subdomains, (1, 2));
        assert_eq!(i1.orientation, Orientation::Vertical);
        assert_eq!((i1.position, i1.extent), (0.0, (-1.0, 0.0)));
        assert!((p.area() - 3.0).abs() < 1e-12 * 3.0);
        assert_eq!(p.edge_kind(0, Side::Right), EdgeKind::Boundary);
        assert_eq!(p.edge_kind(0, Side::Bottom), EdgeKind::Interface(0));
        assert_eq!(p.colouring(), vec![0, 1, 0]);
    }

    #[test]
    fn two_by_one_preset() {
        let p = Partition::preset("unit-square-2x1").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.interfaces().len(), 1);
        assert!((p.area() - 1.0).abs() < 1e-12);
        assert_eq!(Partition::preset("unit-square-2x2").unwrap().interfaces().len(), 4);
        assert!(matches!(Partition::preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn overlap_and_partial_edges_are_rejected() {
        let r = Partition::new(vec![Rect::new(0.0, 1.0, 0.0, 1.0), Rect::new(0.5, 1.5, 0.0, 1.0)]);
        assert_eq!(r, Err(Error::Overlap { a: 0, b: 1 }));
        let r = Partition::new(vec![Rect::new(0.0, 1.0, 0.0, 1.0), Rect::new(1.0, 2.0, 0.5, 1.5)]);
        assert_eq!(r, Err(Error::NonconformingInterface { a: 0, b: 1 }));
        let r = Partition::new(vec![Rect::new(0.0, 0.0, 0.0, 1.0)]);
        assert_eq!(r, Err(Error::DegenerateSubdomain { index: 0 }));
    }

    #[test]
    fn mesh_node_counts() {
        let p = Partition::preset("unit-square").unwrap();
        let m = SubdomainMesh::new(&p, 0, 2, 2, 1).unwrap();
        assert_eq!((m.n_nodes(), m.n_cells()), (9, 4));
        let m = SubdomainMesh::new(&p, 0, 2, 1, 2).unwrap();
        assert_eq!(m.n_nodes(), (2 * 2 + 1) * (1 * 2 + 1));
        assert!(matches!(SubdomainMesh::new(&p, 0, 0, 2, 1), Err(Error::InvalidMesh { .. })));
    }

    #[test]
    fn mesh_cells_and_sides() {
        let p = Partition::preset("unit-square").unwrap();
        let m = SubdomainMesh::new(&p, 0, 3, 2, 2).unwrap();
        for c in 0..m.n_cells() {
            let r = m.cell_rect(c);
            assert!(r.area() > 0.0);
            let nodes = m.cell_nodes(c);
            let (x0, y0) = m.node_coords(nodes[0]);
            let (x1, y1) = m.node_coords(*nodes.last().unwrap());
            assert_eq!((x0, y0, x1, y1), (r.x0, r.y0, r.x1, r.y1));
        }
        let left = m.side_nodes(Side::Left);
        assert_eq!(left.len(), 5);
        assert!(left.windows(2).all(|w| m.node_coords(w[0]).1 < m.node_coords(w[1]).1));
        assert_eq!(m.locate(0.99, 0.01).map(|c| c.0), Some(2));
        assert_eq!(m.locate(1.5, 0.5), None);
    }

    fn lshape_meshes(n: [usize; 3], k: usize) -> (Partition, Vec<SubdomainMesh>) {
        let p = Partition::lshape().unwrap();
        let m = (0..3).map(|i| SubdomainMesh::new(&p, i, n[i], n[i], k).unwrap()).collect();
        (p, m)
    }

    #[test]
    fn lshape_interfaces_inherit_traces() {
        let (p, m) = lshape_meshes([6, 8, 6], 1);
        let segs = extract_interfaces(&p, &m, &MortarRule::default()).unwrap();
        assert_eq!(segs.len(), 2);
        for s in &segs {
            assert_eq!(s.mortar.subintervals(), 6);
            assert_eq!(s.nonmortar.subintervals(), 8);
            assert_eq!(s.nonmortar_side(), 1);
            for t in [&s.mortar, &s.nonmortar] {
                assert_eq!(t.breakpoints[0], s.extent.0);
                assert_eq!(*t.breakpoints.last().unwrap(), s.extent.1);
            }
        }
        let again = extract_interfaces(&p, &m, &MortarRule::default()).unwrap();
        assert_eq!(segs, again);
    }

    #[test]
    fn matching_traces_are_identical_and_ties_pick_lower_index() {
        let (p, m) = lshape_meshes([4, 4, 4], 1);
        let segs = extract_interfaces(&p, &m, &MortarRule::default()).unwrap();
        assert_eq!(segs[0].mortar.breakpoints, segs[0].nonmortar.breakpoints);
        assert_eq!(segs[0].mortar_side(), 0);
        assert_eq!(segs[1].mortar_side(), 1);
    }

    #[test]
    fn override_and_too_coarse_nonmortar() {
        let (p, m) = lshape_meshes([6, 8, 6], 1);
        let rule = MortarRule::default().with_override(0, 1);
        let segs = extract_interfaces(&p, &m, &rule).unwrap();
        assert_eq!(segs[0].mortar_side(), 1);
        let bad = MortarRule::default().with_override(0, 2);
        assert!(matches!(extract_interfaces(&p, &m, &bad), Err(Error::InvalidMortarOverride { .. })));

        let p = Partition::preset("unit-square-2x1").unwrap();
        let m = vec![SubdomainMesh::new(&p, 0, 2, 1, 1).unwrap(), SubdomainMesh::new(&p, 1, 2, 1, 1).unwrap()];
        assert!(matches!(
            extract_interfaces(&p, &m, &MortarRule::default()),
            Err(Error::NonmortarTooCoarse { subintervals: 1, .. })
        ));
    }
}
