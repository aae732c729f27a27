use alloc::vec::Vec;

/// Lagrange interpolation basis on an arbitrary set of distinct nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrange1d {
    nodes: Vec<f64>,
    /// 1 / Π_{j≠i} (x_i − x_j)
    inv_denoms: Vec<f64>,
}

impl Lagrange1d {
    pub fn new(nodes: Vec<f64>) -> Self {
        let inv_denoms = (0..nodes.len())
            .map(|i| {
                let d: f64 = (0..nodes.len())
                    .filter(|&j| j != i)
                    .map(|j| nodes[i] - nodes[j])
                    .product();
                1.0 / d
            })
            .collect();
        Self { nodes, inv_denoms }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn value(&self, i: usize, x: f64) -> f64 {
        let p: f64 = (0..self.nodes.len())
            .filter(|&j| j != i)
            .map(|j| x - self.nodes[j])
            .product();
        p * self.inv_denoms[i]
    }

    pub fn derivative(&self, i: usize, x: f64) -> f64 {
        let n = self.nodes.len();
        let mut s = 0.0;
        for m in (0..n).filter(|&m| m != i) {
            let p: f64 = (0..n)
                .filter(|&j| j != i && j != m)
                .map(|j| x - self.nodes[j])
                .product();
            s += p;
        }
        s * self.inv_denoms[i]
    }

    pub fn values(&self, x: f64) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i, x)).collect()
    }

    pub fn derivatives(&self, x: f64) -> Vec<f64> {
        (0..self.len()).map(|i| self.derivative(i, x)).collect()
    }
}
