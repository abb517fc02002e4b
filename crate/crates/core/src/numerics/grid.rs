//! Uniform simplicial grids on intervals and rectangles.

use crate::error::{Error, Result};

/// One P1 simplex: vertex indices, measure and the (constant) gradients of
/// its barycentric basis functions. Only the first `dim + 1` entries of
/// `nodes` and `grads` are meaningful; 1D gradients carry a zero second
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub nodes: [usize; 3],
    pub measure: f64,
    pub grads: [[f64; 2]; 3],
}

/// Uniform grid on `(0, L_1)` or `(0, L_1) × (0, L_2)`.
///
/// In 2D every rectangular cell with lower-left corner `a`, lower-right `b`,
/// upper-left `c` and upper-right `d` is split along the `a–d` diagonal into
/// the triangles `(a, b, d)` and `(a, d, c)`. Node `(i, j)` has index
/// `i + nx·j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    resolution: Vec<usize>,
    extents: Vec<f64>,
    coords: Vec<[f64; 2]>,
    elements: Vec<Element>,
    boundary: Vec<bool>,
}

/// Builds a uniform grid with `resolution[d]` nodes along axis `d`.
///
/// ```
/// use kwcopt::numerics::build_grid;
/// let g = build_grid(1, &[3], &[1.0]).unwrap();
/// assert_eq!(g.node_count(), 3);
/// assert_eq!(g.elements().len(), 2);
/// assert_eq!(g.elements()[0].measure, 0.5);
/// ```
pub fn build_grid(dim: usize, resolution: &[usize], extents: &[f64]) -> Result<SpatialGrid> {
    if dim != 1 && dim != 2 {
        return Err(Error::Grid(format!("dimension {dim} is not 1 or 2")));
    }
    if resolution.len() != dim || extents.len() != dim {
        return Err(Error::Grid(format!(
            "expected {dim} resolution and extent entries, got {} and {}",
            resolution.len(),
            extents.len()
        )));
    }
    if let Some(r) = resolution.iter().find(|&&r| r < 2) {
        return Err(Error::Grid(format!("resolution {r} has fewer than 2 nodes")));
    }
    if let Some(e) = extents.iter().find(|e| !e.is_finite() || **e <= 0.0) {
        return Err(Error::Grid(format!("extent {e} is not a finite positive length")));
    }
    Ok(if dim == 1 {
        interval(resolution[0], extents[0])
    } else {
        rectangle(resolution[0], resolution[1], extents[0], extents[1])
    })
}

fn interval(n: usize, len: f64) -> SpatialGrid {
    let h = len / (n - 1) as f64;
    let coords = (0..n).map(|i| [i as f64 * h, 0.0]).collect();
    let elements = (0..n - 1)
        .map(|i| Element {
            nodes: [i, i + 1, usize::MAX],
            measure: h,
            grads: [[-1.0 / h, 0.0], [1.0 / h, 0.0], [0.0, 0.0]],
        })
        .collect();
    let mut boundary = vec![false; n];
    boundary[0] = true;
    boundary[n - 1] = true;
    SpatialGrid {
        dim: 1,
        resolution: vec![n],
        extents: vec![len],
        coords,
        elements,
        boundary,
    }
}

fn rectangle(nx: usize, ny: usize, lx: f64, ly: f64) -> SpatialGrid {
    let (hx, hy) = (lx / (nx - 1) as f64, ly / (ny - 1) as f64);
    let mut coords = Vec::with_capacity(nx * ny);
    let mut boundary = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            coords.push([i as f64 * hx, j as f64 * hy]);
            boundary.push(i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
        }
    }
    let mut elements = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = i + nx * j;
            let (b, c, d) = (a + 1, a + nx, a + nx + 1);
            elements.push(triangle(&coords, [a, b, d]));
            elements.push(triangle(&coords, [a, d, c]));
        }
    }
    SpatialGrid {
        dim: 2,
        resolution: vec![nx, ny],
        extents: vec![lx, ly],
        coords,
        elements,
        boundary,
    }
}

fn triangle(coords: &[[f64; 2]], nodes: [usize; 3]) -> Element {
    let [p0, p1, p2] = nodes.map(|k| coords[k]);
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    let grads = [
        [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
        [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
        [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
    ];
    Element {
        nodes,
        measure: 0.5 * det.abs(),
        grads,
    }
}

impl Element {
    /// Vertex indices (2 in 1D, 3 in 2D).
    pub fn vertices(&self, dim: usize) -> &[usize] {
        &self.nodes[..dim + 1]
    }
}

impl SpatialGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    /// `|Ω|`.
    pub fn volume(&self) -> f64 {
        self.extents.iter().product()
    }

    /// Smallest axis spacing.
    pub fn spacing(&self) -> f64 {
        self.extents
            .iter()
            .zip(&self.resolution)
            .map(|(l, n)| l / (*n - 1) as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// Centroid of element `e`.
    pub fn centroid(&self, e: usize) -> [f64; 2] {
        let verts = self.elements[e].vertices(self.dim);
        let k = verts.len() as f64;
        let mut c = [0.0; 2];
        for &v in verts {
            c[0] += self.coords[v][0] / k;
            c[1] += self.coords[v][1] / k;
        }
        c
    }

    /// Evaluates `f` at every node.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_iterator(
            self.node_count(),
            self.coords.iter().map(|c| f(&c[..self.dim])),
        )
    }
}
