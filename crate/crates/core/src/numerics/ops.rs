//! P1 assembly of mass, stiffness, weighted and convection matrices.

use nalgebra::{DVector, Matrix2, Vector2};

use super::grid::SpatialGrid;
use super::sparse::{BandedLu, CsrMatrix};
use crate::error::{Error, Result};

/// One value per node.
pub type ScalarField = DVector<f64>;
/// One vector per element (second component is zero in 1D).
pub type VectorField = Vec<Vector2<f64>>;
/// One symmetric matrix per element (only the leading 1×1 block is used in 1D).
pub type MatrixField = Vec<Matrix2<f64>>;

/// Assembled operators of one grid, with cached factorizations of `M` and
/// of the Riesz matrix `M + K`.
#[derive(Debug, Clone)]
pub struct DiscreteOperators {
    grid: SpatialGrid,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    lumped: DVector<f64>,
    mass_lu: BandedLu,
    riesz_lu: BandedLu,
}

/// Assembles the P1 operators of `grid`.
///
/// ```
/// use kwcopt::numerics::{assemble_operators, build_grid};
/// use nalgebra::DVector;
/// let ops = assemble_operators(&build_grid(1, &[11], &[1.0]).unwrap()).unwrap();
/// let one = DVector::from_element(11, 1.0);
/// assert!(ops.stiffness().mul_vec(&one).amax() < 1e-12);
/// let x = DVector::from_fn(11, |i, _| i as f64 / 10.0);
/// assert!((ops.stiffness().quad(&x) - 1.0).abs() < 1e-12);
/// ```
pub fn assemble_operators(grid: &SpatialGrid) -> Result<DiscreteOperators> {
    DiscreteOperators::new(grid.clone())
}

impl DiscreteOperators {
    pub fn new(grid: SpatialGrid) -> Result<Self> {
        let n = grid.node_count();
        let dim = grid.dim();
        let k = (dim + 1) as f64;
        let mut mt = Vec::new();
        let mut kt = Vec::new();
        for el in grid.elements() {
            if !(el.measure > 0.0) {
                return Err(Error::Grid("element with nonpositive measure".into()));
            }
            let v = el.vertices(dim);
            for (a, &ja) in v.iter().enumerate() {
                for (b, &jb) in v.iter().enumerate() {
                    let m = el.measure / (k * (k + 1.0)) * if a == b { 2.0 } else { 1.0 };
                    mt.push((ja, jb, m));
                    let g = el.grads[a][0] * el.grads[b][0] + el.grads[a][1] * el.grads[b][1];
                    kt.push((ja, jb, el.measure * g));
                }
            }
        }
        let mass = CsrMatrix::from_triplets(n, n, mt);
        let stiffness = CsrMatrix::from_triplets(n, n, kt);
        let lumped = mass.row_sums();
        let mass_lu = BandedLu::factor(&mass)?;
        let riesz_lu = BandedLu::factor(&CsrMatrix::lincomb(&[(1.0, &mass), (1.0, &stiffness)]))?;
        Ok(DiscreteOperators {
            grid,
            mass,
            stiffness,
            lumped,
            mass_lu,
            riesz_lu,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn nodes(&self) -> usize {
        self.grid.node_count()
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Row sums of `M` (the lumped mass).
    pub fn lumped(&self) -> &DVector<f64> {
        &self.lumped
    }

    /// Mass matrix weighted by `c` sampled at element midpoints
    /// (the P1 interpolant of `c` at the centroid, i.e. the vertex mean).
    pub fn weighted_mass(&self, c: &ScalarField) -> CsrMatrix {
        let dim = self.grid.dim();
        let k = (dim + 1) as f64;
        let mut t = Vec::new();
        for el in self.grid.elements() {
            let v = el.vertices(dim);
            let cm = v.iter().map(|&j| c[j]).sum::<f64>() / k;
            for (a, &ja) in v.iter().enumerate() {
                for (b, &jb) in v.iter().enumerate() {
                    let m = el.measure / (k * (k + 1.0)) * if a == b { 2.0 } else { 1.0 };
                    t.push((ja, jb, cm * m));
                }
            }
        }
        CsrMatrix::from_triplets(self.nodes(), self.nodes(), t)
    }

    /// Nodally lumped weighted mass `diag(m ⊙ c)`.
    pub fn lumped_mass(&self, c: &ScalarField) -> CsrMatrix {
        CsrMatrix::diagonal(&self.lumped.component_mul(c))
    }

    /// `K_A[j,k] = Σ_e |e| ∇φ_jᵀ A_e ∇φ_k`.
    pub fn weighted_stiffness(&self, a: &MatrixField) -> CsrMatrix {
        let dim = self.grid.dim();
        let mut t = Vec::new();
        for (el, ae) in self.grid.elements().iter().zip(a) {
            let v = el.vertices(dim);
            for (p, &jp) in v.iter().enumerate() {
                let gp = Vector2::from(el.grads[p]);
                for (q, &jq) in v.iter().enumerate() {
                    let gq = Vector2::from(el.grads[q]);
                    t.push((jp, jq, el.measure * gp.dot(&(ae * gq))));
                }
            }
        }
        CsrMatrix::from_triplets(self.nodes(), self.nodes(), t)
    }

    /// Matrix of `(ω·∇z, φ)`: `C[j,k] = Σ_e (ω_e·∇φ_k) ∫_e φ_j`.
    pub fn convection(&self, w: &VectorField) -> CsrMatrix {
        let dim = self.grid.dim();
        let k = (dim + 1) as f64;
        let mut t = Vec::new();
        for (el, we) in self.grid.elements().iter().zip(w) {
            let v = el.vertices(dim);
            for &jr in v {
                for (q, &jq) in v.iter().enumerate() {
                    let g = Vector2::from(el.grads[q]);
                    t.push((jr, jq, we.dot(&g) * el.measure / k));
                }
            }
        }
        CsrMatrix::from_triplets(self.nodes(), self.nodes(), t)
    }

    /// Matrix of `(p ω, ∇ψ)` with rows indexed by the test function `ψ`:
    /// `T[j,k] = Σ_e (ω_e·∇φ_j) ∫_e φ_k`. Equals `convection(ω)ᵀ`.
    pub fn transport(&self, w: &VectorField) -> CsrMatrix {
        let dim = self.grid.dim();
        let k = (dim + 1) as f64;
        let mut t = Vec::new();
        for (el, we) in self.grid.elements().iter().zip(w) {
            let v = el.vertices(dim);
            for (p, &jp) in v.iter().enumerate() {
                let g = Vector2::from(el.grads[p]);
                for &jq in v {
                    t.push((jp, jq, we.dot(&g) * el.measure / k));
                }
            }
        }
        CsrMatrix::from_triplets(self.nodes(), self.nodes(), t)
    }

    /// Elementwise gradient of a P1 field.
    pub fn gradient(&self, w: &ScalarField) -> VectorField {
        let dim = self.grid.dim();
        self.grid
            .elements()
            .iter()
            .map(|el| {
                el.vertices(dim)
                    .iter()
                    .enumerate()
                    .fold(Vector2::zeros(), |acc, (a, &j)| acc + Vector2::from(el.grads[a]) * w[j])
            })
            .collect()
    }

    /// Vertex mean of a nodal field on every element.
    pub fn element_mean(&self, w: &ScalarField) -> Vec<f64> {
        let dim = self.grid.dim();
        let k = (dim + 1) as f64;
        self.grid
            .elements()
            .iter()
            .map(|el| el.vertices(dim).iter().map(|&j| w[j]).sum::<f64>() / k)
            .collect()
    }

    /// Load vector of a piecewise-constant function: `Σ_e v_e ∫_e φ_j`.
    pub fn element_load(&self, v: &[f64]) -> DVector<f64> {
        let dim = self.grid.dim();
        let k = (dim + 1) as f64;
        let mut out = DVector::zeros(self.nodes());
        for (el, ve) in self.grid.elements().iter().zip(v) {
            for &j in el.vertices(dim) {
                out[j] += ve * el.measure / k;
            }
        }
        out
    }

    /// Lumped L² projection of a piecewise-constant function onto nodes.
    pub fn nodal_average(&self, v: &[f64]) -> ScalarField {
        self.element_load(v).component_div(&self.lumped)
    }

    /// `|w|_H² = wᵀMw`.
    pub fn norm_h_sq(&self, w: &ScalarField) -> f64 {
        self.mass.quad(w)
    }

    pub fn norm_h(&self, w: &ScalarField) -> f64 {
        self.norm_h_sq(w).max(0.0).sqrt()
    }

    /// `|∇w|² = wᵀKw`.
    pub fn grad_sq(&self, w: &ScalarField) -> f64 {
        self.stiffness.quad(w).max(0.0)
    }

    /// `|w|_V² = wᵀ(M+K)w`.
    pub fn norm_v_sq(&self, w: &ScalarField) -> f64 {
        self.norm_h_sq(w) + self.grad_sq(w)
    }

    pub fn norm_v(&self, w: &ScalarField) -> f64 {
        self.norm_v_sq(w).max(0.0).sqrt()
    }

    /// `|f|_{V*}² = fᵀ(M+K)⁻¹f` for a load vector `f` (entries `⟨f, φ_j⟩`).
    pub fn dual_norm_sq(&self, f: &DVector<f64>) -> f64 {
        f.dot(&self.riesz_lu.solve(f)).max(0.0)
    }

    /// V* norm² of the functional `φ ↦ (h, φ)_H`.
    pub fn vstar_norm_sq(&self, h: &ScalarField) -> f64 {
        self.dual_norm_sq(&self.mass.mul_vec(h))
    }

    pub fn inner_h(&self, a: &ScalarField, b: &ScalarField) -> f64 {
        a.dot(&self.mass.mul_vec(b))
    }

    /// `M⁻¹f`: the H-field representing a load vector.
    pub fn mass_solve(&self, f: &DVector<f64>) -> ScalarField {
        self.mass_lu.solve(f)
    }

    /// `(M+K)⁻¹f`.
    pub fn riesz_solve(&self, f: &DVector<f64>) -> ScalarField {
        self.riesz_lu.solve(f)
    }

    /// `|v|_H` for a piecewise-constant vector field.
    pub fn vector_norm_h(&self, v: &VectorField) -> f64 {
        self.grid
            .elements()
            .iter()
            .zip(v)
            .map(|(el, ve)| el.measure * ve.norm_squared())
            .sum::<f64>()
            .sqrt()
    }
}
