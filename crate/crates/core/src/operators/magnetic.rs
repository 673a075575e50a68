use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigensolve::HermitianMatrix;

/// Directed grid edge `a → b` carrying the Peierls phase `θ`; the discrete
/// magnetic gradient along it is `u_a − e^{iθ} u_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeierlsEdge {
    pub a: usize,
    pub b: usize,
    pub theta: f64,
}

/// Square `n × n` interior grid on `(-L/2, L/2)²` with phases on its edges.
/// Node `(i, j)` has index `i + n j`; the Dirichlet boundary contributes
/// `|u|²` once per missing neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticGrid {
    n: usize,
    length: f64,
    edges: Vec<PeierlsEdge>,
}

impl MagneticGrid {
    /// Landau gauge: phase `flux · i` on the vertical edge leaving column `i`,
    /// zero on horizontal edges, so every plaquette encloses `flux`.
    pub fn landau(n: usize, length: f64, flux: f64) -> Self {
        Self::with_phases(n, length, |i, _j, vertical| if vertical { flux * i as f64 } else { 0.0 })
    }

    /// Phase for each edge from `phase(i, j, vertical)` at its tail node.
    pub fn with_phases(n: usize, length: f64, phase: impl Fn(usize, usize, bool) -> f64) -> Self {
        let mut edges = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let p = i + n * j;
                if i + 1 < n {
                    edges.push(PeierlsEdge {
                        a: p,
                        b: p + 1,
                        theta: phase(i, j, false),
                    });
                }
                if j + 1 < n {
                    edges.push(PeierlsEdge {
                        a: p,
                        b: p + n,
                        theta: phase(i, j, true),
                    });
                }
            }
        }
        Self { n, length, edges }
    }

    /// Gauge transform `θ_ab ↦ θ_ab + χ_a − χ_b`.
    pub fn gauge_transformed(&self, chi: &[f64]) -> Self {
        assert_eq!(chi.len(), self.node_count());
        let edges = self
            .edges
            .iter()
            .map(|e| PeierlsEdge {
                theta: e.theta + chi[e.a] - chi[e.b],
                ..*e
            })
            .collect();
        Self { edges, ..self.clone() }
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.n as f64 + 1.0)
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n
    }

    pub fn edges(&self) -> &[PeierlsEdge] {
        &self.edges
    }

    pub fn edges_mut(&mut self) -> &mut [PeierlsEdge] {
        &mut self.edges
    }

    /// Number of grid edges incident to `node`.
    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.a == node || e.b == node).count()
    }

    /// `H = h⁻² (4 I − Σ_edges (e^{iθ}|a⟩⟨b| + h.c.))`.
    pub fn hamiltonian(&self) -> HermitianMatrix {
        let size = self.node_count();
        let inv_h2 = self.spacing().powi(-2);
        let mut m = DMatrix::<Complex64>::zeros(size, size);
        for p in 0..size {
            m[(p, p)] = Complex64::new(4.0 * inv_h2, 0.0);
        }
        for e in &self.edges {
            let z = Complex64::from_polar(inv_h2, e.theta);
            m[(e.a, e.b)] -= z;
            m[(e.b, e.a)] -= z.conj();
        }
        HermitianMatrix::new(m).expect("square by construction")
    }
}
