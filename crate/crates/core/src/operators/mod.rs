//! Discrete realizations of the model operators and the transforms between
//! nodal values and eigen-coefficients.
//!
//! Every backend produces a [`Spectrum`]: ascending eigenvalues, eigenvectors
//! sampled at the nodes, and the positive node weights under which those
//! samples are orthonormal. Finite-difference kinds use second-order central
//! differences with homogeneous Dirichlet data, so the trapezoidal weight of
//! every interior node is the cell volume.

mod magnetic;
mod matrix_market;

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{
    eigh_hermitian, eigh_symmetric, eigh_tridiagonal, eigh_tridiagonal_lowest, EigenDecomposition,
    SymmetricMatrix,
};
use crate::error::{Error, Result};
use crate::Scalar;

pub use magnetic::{MagneticGrid, PeierlsEdge};
pub use matrix_market::{read_matrix_market, MatrixMarket};

/// Largest Hermite index evaluated by the three-term recurrence.
pub const MAX_HERMITE_MODES: usize = 60;

/// Largest per-axis grid accepted by the dense 2-D kinds (`grid²` unknowns).
pub const MAX_GRID_2D: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    IntervalAnalytic,
    IntervalFd,
    Box2dFd,
    OscillatorAnalytic,
    OscillatorFd,
    PotentialFd,
    GrushinFd,
    MagneticFd,
    MatrixFile,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::IntervalAnalytic => "interval_analytic",
            BackendKind::IntervalFd => "interval_fd",
            BackendKind::Box2dFd => "box2d_fd",
            BackendKind::OscillatorAnalytic => "oscillator_analytic",
            BackendKind::OscillatorFd => "oscillator_fd",
            BackendKind::PotentialFd => "potential_fd",
            BackendKind::GrushinFd => "grushin_fd",
            BackendKind::MagneticFd => "magnetic_fd",
            BackendKind::MatrixFile => "matrix_file",
        }
    }

    /// Accepts both `interval_fd` and `interval-fd` spellings.
    pub fn parse(s: &str) -> Option<Self> {
        let norm = s.replace('-', "_");
        [
            BackendKind::IntervalAnalytic,
            BackendKind::IntervalFd,
            BackendKind::Box2dFd,
            BackendKind::OscillatorAnalytic,
            BackendKind::OscillatorFd,
            BackendKind::PotentialFd,
            BackendKind::GrushinFd,
            BackendKind::MagneticFd,
            BackendKind::MatrixFile,
        ]
        .into_iter()
        .find(|k| k.name() == norm)
    }
}

/// Confining potential for `potential_fd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// `b(x) = 1 + x²`
    BConstPlusX2,
    /// `V(x) = 1 + x⁴`
    OnePlusX4,
    /// Values at the grid nodes.
    CustomTable(Vec<f64>),
}

impl Potential {
    pub fn parse(s: &str) -> Option<Self> {
        match s.replace('-', "_").as_str() {
            "b_const_plus_x2" => Some(Potential::BConstPlusX2),
            "one_plus_x4" => Some(Potential::OnePlusX4),
            _ => None,
        }
    }

    fn values(&self, xs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Potential::BConstPlusX2 => Ok(xs.iter().map(|x| 1.0 + x * x).collect()),
            Potential::OnePlusX4 => Ok(xs.iter().map(|x| 1.0 + x.powi(4)).collect()),
            Potential::CustomTable(t) => {
                if t.len() != xs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: xs.len(),
                        got: t.len(),
                    });
                }
                if t.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidBackend("potential table has non-finite entries".into()));
                }
                Ok(t.clone())
            }
        }
    }
}

/// Description of a backend.
///
/// `length` is the side of the domain for the interval and square kinds
/// (`(0, L)` and `(-L/2, L/2)²`) and the half-width of the truncation window
/// `[-L, L]` for the oscillator and potential kinds. `grid` counts interior
/// nodes per axis; `modes` is the number of retained eigenpairs (required for
/// analytic kinds, an optional cap for finite-difference kinds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: BackendKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<Potential>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl BackendSpec {
    pub fn empty(kind: BackendKind) -> Self {
        Self {
            kind,
            length: None,
            grid: None,
            modes: None,
            gamma: None,
            potential: None,
            flux: None,
            path: None,
        }
    }

    pub fn interval_analytic(length: f64, modes: usize) -> Self {
        Self {
            length: Some(length),
            modes: Some(modes),
            ..Self::empty(BackendKind::IntervalAnalytic)
        }
    }

    pub fn interval_fd(length: f64, grid: usize) -> Self {
        Self {
            length: Some(length),
            grid: Some(grid),
            ..Self::empty(BackendKind::IntervalFd)
        }
    }

    pub fn box2d_fd(length: f64, grid: usize) -> Self {
        Self {
            length: Some(length),
            grid: Some(grid),
            ..Self::empty(BackendKind::Box2dFd)
        }
    }

    pub fn oscillator_analytic(modes: usize) -> Self {
        Self {
            modes: Some(modes),
            ..Self::empty(BackendKind::OscillatorAnalytic)
        }
    }

    pub fn oscillator_fd(half_width: f64, grid: usize) -> Self {
        Self {
            length: Some(half_width),
            grid: Some(grid),
            ..Self::empty(BackendKind::OscillatorFd)
        }
    }

    pub fn potential_fd(half_width: f64, grid: usize, potential: Potential) -> Self {
        Self {
            length: Some(half_width),
            grid: Some(grid),
            potential: Some(potential),
            ..Self::empty(BackendKind::PotentialFd)
        }
    }

    pub fn grushin_fd(length: f64, grid: usize, gamma: f64) -> Self {
        Self {
            length: Some(length),
            grid: Some(grid),
            gamma: Some(gamma),
            ..Self::empty(BackendKind::GrushinFd)
        }
    }

    pub fn magnetic_fd(length: f64, grid: usize, flux: f64) -> Self {
        Self {
            length: Some(length),
            grid: Some(grid),
            flux: Some(flux),
            ..Self::empty(BackendKind::MagneticFd)
        }
    }

    pub fn matrix_file(path: impl Into<PathBuf>) -> Self {
        Self {
            path: Some(path.into()),
            ..Self::empty(BackendKind::MatrixFile)
        }
    }

    pub fn with_modes(mut self, modes: usize) -> Self {
        self.modes = Some(modes);
        self
    }

    /// Checks that exactly the parameters the kind uses are present and in range.
    pub fn validate(&self) -> Result<()> {
        use BackendKind::*;
        let (required, optional): (&[&str], &[&str]) = match self.kind {
            IntervalAnalytic => (&["length", "modes"], &[]),
            IntervalFd | Box2dFd | OscillatorFd => (&["length", "grid"], &["modes"]),
            OscillatorAnalytic => (&["modes"], &[]),
            PotentialFd => (&["length", "grid", "potential"], &["modes"]),
            GrushinFd => (&["length", "grid", "gamma"], &["modes"]),
            MagneticFd => (&["length", "grid", "flux"], &["modes"]),
            MatrixFile => (&["path"], &["modes"]),
        };
        let present = [
            ("length", self.length.is_some()),
            ("grid", self.grid.is_some()),
            ("modes", self.modes.is_some()),
            ("gamma", self.gamma.is_some()),
            ("potential", self.potential.is_some()),
            ("flux", self.flux.is_some()),
            ("path", self.path.is_some()),
        ];
        for (name, is_set) in present {
            let wanted = required.contains(&name);
            if wanted && !is_set {
                return Err(Error::InvalidBackend(format!(
                    "{} requires --{name}",
                    self.kind.name()
                )));
            }
            if is_set && !wanted && !optional.contains(&name) {
                return Err(Error::InvalidBackend(format!(
                    "{} does not take --{name}",
                    self.kind.name()
                )));
            }
        }
        if let Some(l) = self.length {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidBackend(format!("length must be positive, got {l}")));
            }
        }
        if let Some(g) = self.grid {
            if g < 2 {
                return Err(Error::InvalidBackend(format!("grid must be at least 2, got {g}")));
            }
            if matches!(self.kind, Box2dFd | GrushinFd | MagneticFd) && g > MAX_GRID_2D {
                return Err(Error::InvalidBackend(format!(
                    "grid {g} exceeds the dense 2-D limit {MAX_GRID_2D}"
                )));
            }
        }
        if let Some(m) = self.modes {
            if m < 1 {
                return Err(Error::InvalidBackend("modes must be at least 1".into()));
            }
        }
        if let Some(g) = self.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::InvalidBackend(format!("gamma must be >= 0, got {g}")));
            }
        }
        if self.kind == GrushinFd && self.grid.is_some_and(|g| g % 2 == 1) {
            return Err(Error::InvalidBackend(
                "grushin_fd needs an even grid so no node sits on the degenerate line x = 0".into(),
            ));
        }
        if let Some(f) = self.flux {
            if !f.is_finite() {
                return Err(Error::InvalidBackend("flux must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Homogeneous dimension data of the Grushin backend (`m = n = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrushinDims {
    pub m: usize,
    pub n: usize,
    pub gamma: f64,
    /// `N_γ = m + (1 + γ) n`
    pub homogeneous_dim: f64,
    /// `2*_γ = 2 N_γ / (N_γ − 2)`; infinite when `N_γ = 2`.
    pub critical_exponent: f64,
}

impl GrushinDims {
    pub fn new(gamma: f64) -> Self {
        let (m, n) = (1usize, 1usize);
        let homogeneous_dim = m as f64 + (1.0 + gamma) * n as f64;
        let critical_exponent = 2.0 * homogeneous_dim / (homogeneous_dim - 2.0);
        Self {
            m,
            n,
            gamma,
            homogeneous_dim,
            critical_exponent,
        }
    }
}

/// Eigenpairs of a discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: nalgebra::Scalar = f64> {
    eigenvalues: Vec<f64>,
    basis: DMatrix<T>,
    weights: Vec<f64>,
    points: Vec<[f64; 2]>,
    dim: usize,
    extent: f64,
    grushin: Option<GrushinDims>,
    backend: BackendSpec,
}

impl<T: Scalar> Spectrum<T> {
    fn assemble(
        eigenvalues: Vec<f64>,
        basis: DMatrix<T>,
        weights: Vec<f64>,
        points: Vec<[f64; 2]>,
        dim: usize,
        extent: f64,
        backend: BackendSpec,
    ) -> Result<Self> {
        match eigenvalues.first() {
            Some(&l1) if l1 > 0.0 => {}
            Some(&l1) => {
                return Err(Error::InvalidBackend(format!(
                    "operator is not elliptic: lowest eigenvalue {l1:e} <= 0"
                )))
            }
            None => return Err(Error::InvalidBackend("no eigenpairs".into())),
        }
        debug_assert!(eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        debug_assert_eq!(basis.nrows(), weights.len());
        debug_assert_eq!(basis.ncols(), eigenvalues.len());
        Ok(Self {
            eigenvalues,
            basis,
            weights,
            points,
            dim,
            extent,
            grushin: None,
            backend,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `k` holds `φ_k` sampled at the nodes.
    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn mode(&self, k: usize) -> Vec<T> {
        self.basis.column(k).iter().copied().collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node coordinates; the second component is zero for 1-D kinds.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spatial dimension; 0 for operators read from a matrix file.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest coordinate magnitude covered by the domain.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn grushin(&self) -> Option<&GrushinDims> {
        self.grushin.as_ref()
    }

    pub fn backend(&self) -> &BackendSpec {
        &self.backend
    }

    /// Sobolev-critical exponent used by the `L^q` interpolation check:
    /// `2N/(N−2)` in dimension `N ≥ 3`, `2*_γ` for Grushin, infinite otherwise.
    pub fn critical_exponent(&self) -> f64 {
        if let Some(g) = &self.grushin {
            return g.critical_exponent;
        }
        if self.dim >= 3 {
            let n = self.dim as f64;
            2.0 * n / (n - 2.0)
        } else {
            f64::INFINITY
        }
    }

    /// `max_{j,k} |Σ_i w_i conj(φ_j(i)) φ_k(i) − δ_jk|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut weighted = self.basis.clone();
        for (i, w) in self.weights.iter().enumerate() {
            weighted.row_mut(i).scale_mut(*w);
        }
        let g = self.basis.adjoint() * weighted;
        let mut worst = 0.0f64;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).modulus());
            }
        }
        worst
    }

    /// Weighted `L²` norm of nodal values.
    pub fn l2_norm(&self, values: &[T]) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.modulus_squared())
            .sum::<f64>()
            .sqrt()
    }
}

/// Spectrum of either scalar type, as produced by [`build_any`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnySpectrum {
    Real(Spectrum<f64>),
    Complex(Spectrum<Complex64>),
}

impl AnySpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        match self {
            AnySpectrum::Real(s) => s.eigenvalues(),
            AnySpectrum::Complex(s) => s.eigenvalues(),
        }
    }
}

/// A function on the base domain: nodal values, plus its eigen-coefficients
/// `c_k = ⟨f, φ_k⟩` once projected.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundFunction<T = f64> {
    pub values: Vec<T>,
    pub coefficients: Option<Vec<T>>,
}

impl<T: Scalar> GroundFunction<T> {
    pub fn from_values(values: Vec<T>) -> Self {
        Self {
            values,
            coefficients: None,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_values(vec![T::zero(); n])
    }

    /// Coefficients against `sp`, or an error if the function was not projected onto it.
    pub fn coefficients_for(&self, sp: &Spectrum<T>) -> Result<&[T]> {
        match &self.coefficients {
            Some(c) if c.len() == sp.mode_count() => Ok(c),
            Some(c) => Err(Error::DimensionMismatch {
                expected: sp.mode_count(),
                got: c.len(),
            }),
            None => Err(Error::InvalidArgument(
                "function has no eigen-coefficients; project it first".into(),
            )),
        }
    }
}

/// `c_k = Σ_i w_i conj(φ_k(i)) f(i)`.
pub fn project<T: Scalar>(f: &GroundFunction<T>, sp: &Spectrum<T>) -> Result<GroundFunction<T>> {
    if f.values.len() != sp.node_count() {
        return Err(Error::DimensionMismatch {
            expected: sp.node_count(),
            got: f.values.len(),
        });
    }
    let weighted: Vec<T> = f
        .values
        .iter()
        .zip(sp.weights())
        .map(|(v, w)| v.scale(*w))
        .collect();
    let coefficients = (0..sp.mode_count())
        .map(|k| {
            sp.basis
                .column(k)
                .iter()
                .zip(&weighted)
                .fold(T::zero(), |acc, (phi, v)| acc + phi.conjugate() * *v)
        })
        .collect();
    Ok(GroundFunction {
        values: f.values.clone(),
        coefficients: Some(coefficients),
    })
}

/// Nodal values `Σ_k c_k φ_k`; missing trailing coefficients are zero.
pub fn synthesize<T: Scalar>(c: &[T], sp: &Spectrum<T>) -> Result<GroundFunction<T>> {
    if c.len() > sp.mode_count() {
        return Err(Error::DimensionMismatch {
            expected: sp.mode_count(),
            got: c.len(),
        });
    }
    let mut values = vec![T::zero(); sp.node_count()];
    for (k, ck) in c.iter().enumerate() {
        if *ck == T::zero() {
            continue;
        }
        for (v, phi) in values.iter_mut().zip(sp.basis.column(k).iter()) {
            *v += *phi * *ck;
        }
    }
    let mut coefficients = c.to_vec();
    coefficients.resize(sp.mode_count(), T::zero());
    Ok(GroundFunction {
        values,
        coefficients: Some(coefficients),
    })
}

/// Builds any real-valued backend.
pub fn build_backend(spec: &BackendSpec) -> Result<Spectrum> {
    match build_any(spec)? {
        AnySpectrum::Real(s) => Ok(s),
        AnySpectrum::Complex(_) => Err(Error::InvalidBackend(format!(
            "{} yields a complex spectrum; use build_any or magnetic_spectrum",
            spec.kind.name()
        ))),
    }
}

/// Builds any backend, real or complex.
pub fn build_any(spec: &BackendSpec) -> Result<AnySpectrum> {
    spec.validate()?;
    use BackendKind::*;
    let sp = match spec.kind {
        IntervalAnalytic => interval_analytic(spec)?,
        IntervalFd => interval_fd(spec)?,
        Box2dFd => box2d_fd(spec)?,
        OscillatorAnalytic | OscillatorFd => oscillator_spectrum(spec)?,
        PotentialFd => potential_fd(spec)?,
        GrushinFd => grushin_fd(spec)?,
        MagneticFd => return Ok(AnySpectrum::Complex(magnetic_spectrum(spec)?)),
        MatrixFile => return matrix_file(spec),
    };
    Ok(AnySpectrum::Real(sp))
}

fn required<T: Copy>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidBackend(format!("missing {what}")))
}

fn interval_analytic(spec: &BackendSpec) -> Result<Spectrum> {
    let length = required(spec.length, "length")?;
    let modes = required(spec.modes, "modes")?;
    // modes interior nodes: the discrete sine transform is exactly orthogonal there
    let h = length / (modes as f64 + 1.0);
    let xs: Vec<f64> = (1..=modes).map(|i| i as f64 * h).collect();
    let amp = (2.0 / length).sqrt();
    let basis = DMatrix::from_fn(modes, modes, |i, k| {
        amp * ((k + 1) as f64 * PI * xs[i] / length).sin()
    });
    let eigenvalues = (1..=modes).map(|k| (k as f64 * PI / length).powi(2)).collect();
    Spectrum::assemble(
        eigenvalues,
        basis,
        vec![h; modes],
        xs.iter().map(|&x| [x, 0.0]).collect(),
        1,
        length,
        spec.clone(),
    )
}

/// `−d²/dx² + V` on interior nodes `xs` with spacing `h`.
fn fd_1d(spec: &BackendSpec, xs: Vec<f64>, h: f64, potential: &[f64], extent: f64) -> Result<Spectrum> {
    let n = xs.len();
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = potential.iter().map(|v| 2.0 * inv_h2 + v).collect();
    let off = vec![-inv_h2; n - 1];
    let ed = match spec.modes {
        Some(m) if m < n => eigh_tridiagonal_lowest(&diag, &off, m)?,
        _ => eigh_tridiagonal(&diag, &off)?,
    };
    let scale = 1.0 / h.sqrt();
    Spectrum::assemble(
        ed.eigenvalues,
        ed.vectors * scale,
        vec![h; n],
        xs.iter().map(|&x| [x, 0.0]).collect(),
        1,
        extent,
        spec.clone(),
    )
}

fn interval_fd(spec: &BackendSpec) -> Result<Spectrum> {
    let length = required(spec.length, "length")?;
    let n = required(spec.grid, "grid")?;
    let h = length / (n as f64 + 1.0);
    let xs = (1..=n).map(|i| i as f64 * h).collect();
    fd_1d(spec, xs, h, &vec![0.0; n], length)
}

fn symmetric_window(half_width: f64, n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * half_width / (n as f64 + 1.0);
    ((1..=n).map(|i| -half_width + i as f64 * h).collect(), h)
}

fn potential_fd(spec: &BackendSpec) -> Result<Spectrum> {
    let half = required(spec.length, "length")?;
    let n = required(spec.grid, "grid")?;
    let (xs, h) = symmetric_window(half, n);
    let v = spec
        .potential
        .as_ref()
        .ok_or_else(|| Error::InvalidBackend("missing potential".into()))?
        .values(&xs)?;
    fd_1d(spec, xs, h, &v, half)
}

/// Harmonic oscillator `−d²/dx² + x²` in one dimension, either through
/// Hermite functions on Gauss–Hermite nodes or by finite differences on
/// `[−L, L]`.
pub fn oscillator_spectrum(spec: &BackendSpec) -> Result<Spectrum> {
    spec.validate()?;
    match spec.kind {
        BackendKind::OscillatorAnalytic => {
            let modes = required(spec.modes, "modes")?;
            if modes > MAX_HERMITE_MODES {
                return Err(Error::InvalidBackend(format!(
                    "{modes} Hermite modes exceed the recurrence stability window {MAX_HERMITE_MODES}"
                )));
            }
            oscillator_analytic(spec, modes)
        }
        BackendKind::OscillatorFd => {
            let half = required(spec.length, "length")?;
            if (-half * half / 2.0).exp() >= 1e-12 {
                return Err(Error::InvalidBackend(format!(
                    "half-width {half} truncates the Gaussian tail above 1e-12"
                )));
            }
            let n = required(spec.grid, "grid")?;
            let (xs, h) = symmetric_window(half, n);
            let v: Vec<f64> = xs.iter().map(|x| x * x).collect();
            fd_1d(spec, xs, h, &v, half)
        }
        other => Err(Error::InvalidBackend(format!(
            "{} is not an oscillator backend",
            other.name()
        ))),
    }
}

/// Normalized Hermite functions `ψ_0..ψ_{count-1}` at `x`.
pub fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if count > 1 {
        out.push(2f64.sqrt() * x * psi0);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

fn oscillator_analytic(spec: &BackendSpec, modes: usize) -> Result<Spectrum> {
    // Golub–Welsch nodes for the weight e^{-x²}
    let off: Vec<f64> = (1..modes).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let nodes = crate::eigensolve::tridiagonal_eigenvalues(&vec![0.0; modes], &off)?;
    let table: Vec<Vec<f64>> = nodes.iter().map(|&x| hermite_functions(modes, x)).collect();
    // Christoffel weights make the sampled ψ_k exactly orthonormal
    let weights: Vec<f64> = table
        .iter()
        .map(|row| 1.0 / row.iter().map(|v| v * v).sum::<f64>())
        .collect();
    let basis = DMatrix::from_fn(modes, modes, |i, k| table[i][k]);
    let eigenvalues = (0..modes).map(|k| 2.0 * k as f64 + 1.0).collect();
    let extent = nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Spectrum::assemble(
        eigenvalues,
        basis,
        weights,
        nodes.iter().map(|&x| [x, 0.0]).collect(),
        1,
        extent,
        spec.clone(),
    )
}

/// Node coordinates of the square `(-L/2, L/2)²`, index `i + n j`.
fn square_nodes(length: f64, n: usize) -> (Vec<f64>, f64) {
    let h = length / (n as f64 + 1.0);
    ((1..=n).map(|i| -0.5 * length + i as f64 * h).collect(), h)
}

fn dense_2d(spec: &BackendSpec, length: f64, n: usize, y_weight: impl Fn(f64) -> f64) -> Result<Spectrum> {
    let (xs, h) = square_nodes(length, n);
    let size = n * n;
    let inv_h2 = 1.0 / (h * h);
    let mut m = DMatrix::<f64>::zeros(size, size);
    for j in 0..n {
        for i in 0..n {
            let a = y_weight(xs[i]);
            let p = i + n * j;
            m[(p, p)] = 2.0 * inv_h2 + 2.0 * a * inv_h2;
            if i + 1 < n {
                m[(p, p + 1)] = -inv_h2;
                m[(p + 1, p)] = -inv_h2;
            }
            if j + 1 < n {
                m[(p, p + n)] = -a * inv_h2;
                m[(p + n, p)] = -a * inv_h2;
            }
        }
    }
    let ed = eigh_symmetric(&SymmetricMatrix::new(m)?)?;
    let ed = truncate(ed, spec.modes);
    let points = (0..size).map(|p| [xs[p % n], xs[p / n]]).collect();
    Spectrum::assemble(
        ed.eigenvalues,
        ed.vectors / h,
        vec![h * h; size],
        points,
        2,
        0.5 * length,
        spec.clone(),
    )
}

fn truncate<T: Scalar>(ed: EigenDecomposition<T>, modes: Option<usize>) -> EigenDecomposition<T> {
    match modes {
        Some(m) if m < ed.eigenvalues.len() => EigenDecomposition {
            eigenvalues: ed.eigenvalues[..m].to_vec(),
            vectors: ed.vectors.columns(0, m).into_owned(),
        },
        _ => ed,
    }
}

fn box2d_fd(spec: &BackendSpec) -> Result<Spectrum> {
    dense_2d(spec, required(spec.length, "length")?, required(spec.grid, "grid")?, |_| 1.0)
}

/// Grushin operator `−∂²_x − (1+γ)²|x|^{2γ} ∂²_y` on `(-L/2, L/2)²`.
fn grushin_fd(spec: &BackendSpec) -> Result<Spectrum> {
    let gamma = required(spec.gamma, "gamma")?;
    let coef = (1.0 + gamma).powi(2);
    let mut sp = dense_2d(
        spec,
        required(spec.length, "length")?,
        required(spec.grid, "grid")?,
        |x| coef * x.abs().powf(2.0 * gamma),
    )?;
    sp.grushin = Some(GrushinDims::new(gamma));
    Ok(sp)
}

/// Peierls-phase magnetic Laplacian with constant flux per plaquette.
pub fn magnetic_spectrum(spec: &BackendSpec) -> Result<Spectrum<Complex64>> {
    spec.validate()?;
    if spec.kind != BackendKind::MagneticFd {
        return Err(Error::InvalidBackend(format!(
            "{} is not a magnetic backend",
            spec.kind.name()
        )));
    }
    let grid = MagneticGrid::landau(
        required(spec.grid, "grid")?,
        required(spec.length, "length")?,
        required(spec.flux, "flux")?,
    );
    grid.spectrum(spec)
}

impl MagneticGrid {
    /// Decomposes the assembled Hermitian matrix into a [`Spectrum`].
    pub fn spectrum(&self, spec: &BackendSpec) -> Result<Spectrum<Complex64>> {
        let ed = truncate(eigh_hermitian(&self.hamiltonian())?, spec.modes);
        let h = self.spacing();
        let n = self.side();
        let (xs, _) = square_nodes(self.length(), n);
        let points = (0..n * n).map(|p| [xs[p % n], xs[p / n]]).collect();
        Spectrum::assemble(
            ed.eigenvalues,
            ed.vectors.map(|z| z / h),
            vec![h * h; n * n],
            points,
            2,
            0.5 * self.length(),
            spec.clone(),
        )
    }
}

fn matrix_file(spec: &BackendSpec) -> Result<AnySpectrum> {
    let path = spec
        .path
        .as_ref()
        .ok_or_else(|| Error::InvalidBackend("missing path".into()))?;
    let mm = read_matrix_market(path)?;
    let n = mm.dim();
    let points: Vec<[f64; 2]> = (0..n).map(|i| [i as f64, 0.0]).collect();
    match mm {
        MatrixMarket::Real(m) => {
            let ed = truncate(eigh_symmetric(&m)?, spec.modes);
            Ok(AnySpectrum::Real(Spectrum::assemble(
                ed.eigenvalues,
                ed.vectors,
                vec![1.0; n],
                points,
                0,
                n as f64,
                spec.clone(),
            )?))
        }
        MatrixMarket::Complex(m) => {
            let ed = truncate(eigh_hermitian(&m)?, spec.modes);
            Ok(AnySpectrum::Complex(Spectrum::assemble(
                ed.eigenvalues,
                ed.vectors,
                vec![1.0; n],
                points,
                0,
                n as f64,
                spec.clone(),
            )?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_analytic_levels_and_modes() {
        let sp = build_backend(&BackendSpec::interval_analytic(PI, 3)).unwrap();
        assert_eq!(sp.eigenvalues().len(), 3);
        for (k, lam) in sp.eigenvalues().iter().enumerate() {
            assert!((lam - ((k + 1) * (k + 1)) as f64).abs() < 1e-12);
        }
        let x = sp.points()[1][0];
        assert!((sp.basis()[(1, 0)] - (2.0 / PI).sqrt() * x.sin()).abs() < 1e-15);
        assert!(sp.orthonormality_defect() < 1e-13);
    }

    #[test]
    fn interval_fd_matches_discrete_formula() {
        let n = 40;
        let sp = build_backend(&BackendSpec::interval_fd(PI, n)).unwrap();
        let h = PI / (n as f64 + 1.0);
        for (k, lam) in sp.eigenvalues().iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - ((k + 1) as f64 * h).cos());
            assert!(((lam - exact) / exact).abs() < 1e-11);
        }
        assert!(sp.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn validation_rejects_mismatched_parameters() {
        let mut spec = BackendSpec::interval_fd(1.0, 10);
        spec.flux = Some(0.1);
        assert!(matches!(build_backend(&spec), Err(Error::InvalidBackend(_))));
        let spec = BackendSpec::empty(BackendKind::IntervalFd);
        assert!(build_backend(&spec).is_err());
        assert!(build_backend(&BackendSpec::interval_fd(-1.0, 10)).is_err());
        assert!(build_backend(&BackendSpec::interval_fd(1.0, 1)).is_err());
        assert!(build_backend(&BackendSpec::grushin_fd(1.0, 7, 1.0)).is_err());
        assert!(build_backend(&BackendSpec::oscillator_analytic(61)).is_err());
        assert!(build_backend(&BackendSpec::oscillator_fd(5.0, 100)).is_err());
        assert!(build_backend(&BackendSpec::magnetic_fd(1.0, 4, 0.1)).is_err());
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in [
            BackendKind::IntervalAnalytic,
            BackendKind::Box2dFd,
            BackendKind::MagneticFd,
            BackendKind::MatrixFile,
        ] {
            assert_eq!(BackendKind::parse(k.name()), Some(k));
        }
        assert_eq!(BackendKind::parse("interval-analytic"), Some(BackendKind::IntervalAnalytic));
        assert_eq!(BackendKind::parse("nope"), None);
    }

    #[test]
    fn hermite_ground_state_at_origin() {
        let psi = hermite_functions(3, 0.0);
        assert!((psi[0] - PI.powf(-0.25)).abs() < 1e-15);
        assert_eq!(psi[1], 0.0);
    }

    #[test]
    fn oscillator_analytic_is_orthonormal() {
        let sp = build_backend(&BackendSpec::oscillator_analytic(40)).unwrap();
        assert_eq!(&sp.eigenvalues()[..3], &[1.0, 3.0, 5.0]);
        assert!(sp.orthonormality_defect() < 1e-12);
        // Golub–Welsch first-component weights agree with the Christoffel form
        let total: f64 = sp.weights().iter().zip(sp.points()).map(|(w, p)| w * (-p[0] * p[0]).exp()).sum();
        assert!((total - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fd_mode_cap_keeps_lowest() {
        let full = build_backend(&BackendSpec::potential_fd(6.0, 200, Potential::OnePlusX4)).unwrap();
        let capped =
            build_backend(&BackendSpec::potential_fd(6.0, 200, Potential::OnePlusX4).with_modes(4)).unwrap();
        assert_eq!(capped.mode_count(), 4);
        for k in 0..4 {
            assert!((full.eigenvalues()[k] - capped.eigenvalues()[k]).abs() < 1e-9);
        }
        assert!(capped.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn potential_bounds_ground_level() {
        for pot in [Potential::BConstPlusX2, Potential::OnePlusX4] {
            let sp = build_backend(&BackendSpec::potential_fd(5.0, 120, pot)).unwrap();
            assert!(sp.eigenvalues()[0] >= 1.0);
        }
        let table: Vec<f64> = (0..30).map(|i| 2.0 + (i as f64 * 0.3).sin()).collect();
        let sp = build_backend(&BackendSpec::potential_fd(3.0, 30, Potential::CustomTable(table))).unwrap();
        assert!(sp.eigenvalues()[0] >= 1.0);
        let bad = BackendSpec::potential_fd(3.0, 30, Potential::CustomTable(vec![1.0; 3]));
        assert!(matches!(build_backend(&bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn grushin_metadata() {
        let d = GrushinDims::new(1.0);
        assert_eq!(d.homogeneous_dim, 3.0);
        assert_eq!(d.critical_exponent, 6.0);
        assert!(GrushinDims::new(0.0).critical_exponent.is_infinite());
        let sp = build_backend(&BackendSpec::grushin_fd(2.0, 6, 1.0)).unwrap();
        assert_eq!(sp.critical_exponent(), 6.0);
        assert!(sp.points().iter().all(|p| p[0] != 0.0));
    }

    #[test]
    fn projection_and_synthesis() {
        let sp = build_backend(&BackendSpec::interval_fd(1.0, 30)).unwrap();
        let f = GroundFunction::from_values(sp.mode(2));
        let c = project(&f, &sp).unwrap().coefficients.unwrap();
        for (k, ck) in c.iter().enumerate() {
            let want = if k == 2 { 1.0 } else { 0.0 };
            assert!((ck - want).abs() < 1e-12);
        }
        let zero = project(&GroundFunction::zeros(30), &sp).unwrap();
        assert!(zero.coefficients.unwrap().iter().all(|c| *c == 0.0));
        assert!(project(&GroundFunction::zeros(29), &sp).is_err());
        assert!(synthesize(&vec![1.0; 31], &sp).is_err());
        let g = synthesize(&[0.0, 2.0], &sp).unwrap();
        assert_eq!(g.coefficients.as_ref().unwrap().len(), 30);
        assert!(GroundFunction::zeros(30).coefficients_for(&sp).is_err());
    }
}
