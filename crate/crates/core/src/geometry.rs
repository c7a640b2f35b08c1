//! Core-shell domains and interface-aligned 1D meshes.
//!
//! A domain is either the interval `(0, R)` split at `Γ` into core `(0, Γ)`
//! and shell `(Γ, R)`, or a radially symmetric ball of dimension 2 or 3 whose
//! radial coordinate runs over the same interval. In the radial case the
//! volume element is `r^(N-1) dr` and the centre carries a symmetry
//! (zero-flux) condition; the outer boundary is always Dirichlet.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Interval,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreShellGeometry {
    kind: GeometryKind,
    dimension: u32,
    interface: f64,
    outer_extent: f64,
}

impl CoreShellGeometry {
    pub fn new(kind: GeometryKind, dimension: u32, interface: f64, outer_extent: f64) -> Result<Self> {
        match (kind, dimension) {
            (GeometryKind::Interval, 1) | (GeometryKind::Radial, 2 | 3) => {}
            (GeometryKind::Interval, d) => {
                return Err(Error::InvalidGeometry(format!("interval geometry must have dimension 1, got {d}")))
            }
            (GeometryKind::Radial, d) => {
                return Err(Error::InvalidGeometry(format!("radial geometry must have dimension 2 or 3, got {d}")))
            }
        }
        if !(outer_extent > 0.0) || !outer_extent.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "outer extent must be positive and finite, got {outer_extent}"
            )));
        }
        if !(interface > 0.0 && interface < outer_extent) {
            return Err(Error::InvalidGeometry(format!("interface {interface} outside domain (0, {outer_extent})")));
        }
        Ok(Self { kind, dimension, interface, outer_extent })
    }

    pub fn interval(interface: f64, outer_extent: f64) -> Result<Self> {
        Self::new(GeometryKind::Interval, 1, interface, outer_extent)
    }

    pub fn radial(dimension: u32, interface: f64, outer_extent: f64) -> Result<Self> {
        Self::new(GeometryKind::Radial, dimension, interface, outer_extent)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn interface(&self) -> f64 {
        self.interface
    }

    pub fn outer_extent(&self) -> f64 {
        self.outer_extent
    }

    /// Exponent of the radial volume element `r^(N-1)`.
    pub fn weight_exponent(&self) -> u32 {
        self.dimension - 1
    }

    /// Weighted measure `∫₀ᴿ r^(N-1) dr` of the whole domain.
    pub fn measure(&self) -> f64 {
        let n = self.dimension as i32;
        self.outer_extent.powi(n) / n as f64
    }

    /// True if `x` lies in the closed core `Ω̄₁`.
    pub fn in_core(&self, x: f64) -> bool {
        x <= self.interface
    }
}

/// Boundary treatment at the left end of the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftBoundary {
    Dirichlet,
    /// Zero flux at `r = 0` from radial symmetry.
    Symmetry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    geometry: CoreShellGeometry,
    nodes: Vec<f64>,
    interface_index: usize,
}

fn segment_count(length: f64, spacing: f64) -> usize {
    let q = length / spacing;
    ((q - 1e-9 * q.max(1.0)).ceil() as usize).max(1)
}

impl Mesh {
    /// Piecewise-uniform mesh with a node exactly at the interface and
    /// maximum element size not exceeding `target_spacing`.
    pub fn build(geometry: &CoreShellGeometry, target_spacing: f64) -> Result<Self> {
        if !(target_spacing > 0.0) || !target_spacing.is_finite() {
            return Err(Error::InvalidMesh(format!("target spacing must be positive, got {target_spacing}")));
        }
        let gamma = geometry.interface;
        let outer = geometry.outer_extent;
        let n_core = segment_count(gamma, target_spacing);
        let n_shell = segment_count(outer - gamma, target_spacing);

        let mut nodes = Vec::with_capacity(n_core + n_shell + 1);
        nodes.extend((0..n_core).map(|i| gamma * i as f64 / n_core as f64));
        nodes.push(gamma);
        nodes.extend((1..n_shell).map(|j| gamma + (outer - gamma) * j as f64 / n_shell as f64));
        nodes.push(outer);

        Ok(Self { geometry: *geometry, nodes, interface_index: n_core })
    }

    /// Mesh with (roughly) `elements` elements overall; exact when the
    /// interface position is commensurate with `outer_extent / elements`.
    pub fn with_elements(geometry: &CoreShellGeometry, elements: usize) -> Result<Self> {
        if elements < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 elements, got {elements}")));
        }
        Self::build(geometry, geometry.outer_extent / elements as f64)
    }

    /// Mesh from explicit node coordinates; the interface must be one of them.
    pub fn from_nodes(geometry: &CoreShellGeometry, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidMesh("need at least 3 nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh("nodes must be strictly increasing".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != geometry.outer_extent {
            return Err(Error::InvalidMesh(format!("nodes must span [0, {}]", geometry.outer_extent)));
        }
        let interface_index = nodes
            .iter()
            .position(|&x| x == geometry.interface)
            .ok_or_else(|| Error::InvalidMesh(format!("interface node {} missing", geometry.interface)))?;
        Ok(Self { geometry: *geometry, nodes, interface_index })
    }

    /// Bisects every element.
    pub fn refine(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().unwrap());
        Self { geometry: self.geometry, nodes, interface_index: 2 * self.interface_index }
    }

    pub fn geometry(&self) -> &CoreShellGeometry {
        &self.geometry
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interface_index(&self) -> usize {
        self.interface_index
    }

    pub fn weight_exponent(&self) -> u32 {
        self.geometry.weight_exponent()
    }

    pub fn left_boundary(&self) -> LeftBoundary {
        match self.geometry.kind {
            GeometryKind::Interval => LeftBoundary::Dirichlet,
            GeometryKind::Radial => LeftBoundary::Symmetry,
        }
    }

    /// Contiguous range of unconstrained node indices.
    pub fn free_range(&self) -> std::ops::Range<usize> {
        let start = match self.left_boundary() {
            LeftBoundary::Dirichlet => 1,
            LeftBoundary::Symmetry => 0,
        };
        start..self.nodes.len() - 1
    }

    pub fn free_count(&self) -> usize {
        self.free_range().len()
    }

    pub fn is_dirichlet(&self, i: usize) -> bool {
        !self.free_range().contains(&i)
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Zeroes the Dirichlet entries of a nodal vector.
    pub fn pin_dirichlet(&self, values: &mut [f64]) {
        let free = self.free_range();
        for (i, v) in values.iter_mut().enumerate() {
            if !free.contains(&i) {
                *v = 0.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_validation() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        assert_eq!(g.weight_exponent(), 0);
        assert!(g.in_core(0.5) && !g.in_core(0.51));
        let r = CoreShellGeometry::radial(3, 0.5, 1.0).unwrap();
        assert_eq!(r.weight_exponent(), 2);
        assert!((r.measure() - 1.0 / 3.0).abs() < 1e-15);

        assert!(CoreShellGeometry::interval(1.5, 1.0).is_err());
        assert!(CoreShellGeometry::interval(0.0, 1.0).is_err());
        assert!(CoreShellGeometry::interval(1.0, 1.0).is_err());
        assert!(CoreShellGeometry::new(GeometryKind::Interval, 2, 0.5, 1.0).is_err());
        assert!(CoreShellGeometry::new(GeometryKind::Radial, 1, 0.5, 1.0).is_err());
        assert!(CoreShellGeometry::new(GeometryKind::Radial, 4, 0.5, 1.0).is_err());
    }

    #[test]
    fn uniform_split() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let m = Mesh::build(&g, 0.25).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(m.interface_index(), 2);
        assert_eq!(m.free_range(), 1..4);
    }

    #[test]
    fn off_grid_interface() {
        let g = CoreShellGeometry::interval(0.3, 1.0).unwrap();
        let m = Mesh::build(&g, 0.25).unwrap();
        assert_eq!(m.nodes()[m.interface_index()], 0.3);
        assert!(m.max_spacing() <= 0.25);
        // uniform within each subdomain
        let h: Vec<f64> = m.nodes().windows(2).map(|w| w[1] - w[0]).collect();
        let k = m.interface_index();
        assert!(h[..k].iter().all(|x| (x - h[0]).abs() < 1e-15));
        assert!(h[k..].iter().all(|x| (x - h[k]).abs() < 1e-15));
    }

    #[test]
    fn radial_mesh() {
        let g = CoreShellGeometry::radial(3, 0.5, 1.0).unwrap();
        let m = Mesh::build(&g, 0.125).unwrap();
        assert_eq!(m.nodes()[m.interface_index()], 0.5);
        assert_eq!(m.weight_exponent(), 2);
        assert_eq!(m.element_count(), 8);
        assert_eq!(m.free_range(), 0..8);
        assert_eq!(m.left_boundary(), LeftBoundary::Symmetry);
    }

    #[test]
    fn refinement_bookkeeping() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let m = Mesh::build(&g, 0.25).unwrap();
        let r = m.refine();
        assert_eq!(r.element_count(), 8);
        assert_eq!(r.interface_index(), 4);
        assert_eq!(r, Mesh::build(&g, 0.125).unwrap());
        assert_eq!(r.refine(), m.refine().refine());
        for x in m.nodes() {
            assert!(r.nodes().contains(x));
        }
    }

    #[test]
    fn from_nodes_requires_interface() {
        let g = CoreShellGeometry::interval(0.5, 1.0).unwrap();
        let err = Mesh::from_nodes(&g, vec![0.0, 0.4, 0.6, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
        let m = Mesh::from_nodes(&g, vec![0.0, 0.2, 0.5, 1.0]).unwrap();
        assert_eq!(m.interface_index(), 2);
        assert!(Mesh::from_nodes(&g, vec![0.0, 0.5, 0.5, 1.0]).is_err());
    }
}
