//! Fractional powers, interpolation norms and compactness diagnostics.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::FracOrder;
use crate::operators::{synthesize, BackendKind, GroundFunction, MagneticGrid, Spectrum};
use crate::Scalar;

/// Monte Carlo samples per rank in [`truncation_modulus`].
pub const MONTE_CARLO_SAMPLES: usize = 200;

/// `A^s f = Σ λ_k^s c_k φ_k`.
pub fn fractional_apply<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    f: &GroundFunction<T>,
) -> Result<GroundFunction<T>> {
    spectral_apply(sp, order.s(), f)
}

/// `A^σ f` for any real exponent `σ`.
pub fn spectral_apply<T: Scalar>(
    sp: &Spectrum<T>,
    sigma: f64,
    f: &GroundFunction<T>,
) -> Result<GroundFunction<T>> {
    let c = f.coefficients_for(sp)?;
    let scaled: Vec<T> = c
        .iter()
        .zip(sp.eigenvalues())
        .map(|(ck, lam)| ck.scale(lam.powf(sigma)))
        .collect();
    synthesize(&scaled, sp)
}

/// `(Σ_k λ_k^σ |c_k|²)^{1/2}` for `σ ∈ [0, 2]`.
pub fn interpolation_norm<T: Scalar>(
    sp: &Spectrum<T>,
    sigma: f64,
    f: &GroundFunction<T>,
) -> Result<f64> {
    if !(0.0..=2.0).contains(&sigma) {
        return Err(Error::Domain {
            func: "interpolation_norm",
            arg: sigma,
            expected: "0 <= sigma <= 2",
        });
    }
    let c = f.coefficients_for(sp)?;
    Ok(weighted_norm(sp.eigenvalues(), sigma, c.iter().map(|ck| ck.modulus_squared())))
}

fn weighted_norm(lambda: &[f64], sigma: f64, sq: impl Iterator<Item = f64>) -> f64 {
    sq.zip(lambda)
        .map(|(c2, lam)| lam.powf(sigma) * c2)
        .sum::<f64>()
        .sqrt()
}

/// One rank of the compactness report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationEntry {
    pub rank: usize,
    /// `‖(I − P_n) w‖_Y` for the witness `w`.
    pub modulus: f64,
    /// `λ_{n+1}^{−s/2}`.
    pub bound: f64,
    /// Same modulus measured against the cylinder energy norm, `modulus / √K(s)`.
    pub energy_modulus: f64,
    /// Largest tail norm among the Monte Carlo samples.
    pub monte_carlo_max: f64,
    /// Witness coefficients, normalized to unit interpolation norm.
    pub witness: Vec<f64>,
}

/// Sup of `‖f − P_n f‖_Y` over `f` with unit interpolation norm (σ = s).
///
/// The supremum is attained by `λ_{n+1}^{−s/2} φ_{n+1}`. Samples drawn
/// uniformly on the coefficient sphere and rescaled to unit norm give an
/// independent lower bound; the stream for rank `n` is `n` of the seeded
/// generator, so ranks can be evaluated in any order.
pub fn truncation_modulus<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    rank: usize,
    seed: u64,
) -> Result<TruncationEntry> {
    let m = sp.mode_count();
    if rank >= m {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} out of range for {m} modes"
        )));
    }
    let s = order.s();
    let lambda = sp.eigenvalues();
    let bound = lambda[rank].powf(-s / 2.0);

    let mut witness = vec![0.0; m];
    witness[rank] = bound;
    let norm = weighted_norm(lambda, s, witness.iter().map(|w| w * w));
    let modulus = tail_norm(&witness, rank) / norm;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rank as u64);
    let mut monte_carlo_max = 0.0f64;
    let mut c = vec![0.0; m];
    for _ in 0..MONTE_CARLO_SAMPLES {
        for ck in c.iter_mut() {
            *ck = StandardNormal.sample(&mut rng);
        }
        let norm = weighted_norm(lambda, s, c.iter().map(|v| v * v));
        monte_carlo_max = monte_carlo_max.max(tail_norm(&c, rank) / norm);
    }

    Ok(TruncationEntry {
        rank,
        modulus,
        bound,
        energy_modulus: modulus / order.ks().sqrt(),
        monte_carlo_max,
        witness,
    })
}

fn tail_norm(c: &[f64], rank: usize) -> f64 {
    c[rank..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub s: f64,
    pub seed: u64,
    pub samples: usize,
    /// `√K(s)`: energy norm over interpolation norm.
    pub energy_scale: f64,
    pub entries: Vec<TruncationEntry>,
}

impl CompactnessReport {
    pub fn ranks(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.rank).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.modulus).collect()
    }

    pub fn bounds(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.bound).collect()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].modulus <= w[0].modulus)
    }

    /// Largest `|modulus − bound|`.
    pub fn witness_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.modulus - e.bound).abs())
            .fold(0.0, f64::max)
    }

    /// Largest excess of a Monte Carlo sample over the bound (negative when none).
    pub fn monte_carlo_excess(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.monte_carlo_max - e.bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Truncation moduli for every rank `0..mode_count`.
pub fn compactness_report<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    seed: u64,
) -> Result<CompactnessReport> {
    let entries = (0..sp.mode_count())
        .map(|n| truncation_modulus(sp, order, n, seed))
        .collect::<Result<_>>()?;
    Ok(CompactnessReport {
        s: order.s(),
        seed,
        samples: MONTE_CARLO_SAMPLES,
        energy_scale: order.ks().sqrt(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailMass {
    /// `Σ_{|x_i| > R} w_i f_i²`.
    pub tail: f64,
    /// `E(f) / R²`.
    pub bound: f64,
    /// `E(f) = ∫ |f'|² + x² f²`.
    pub energy: f64,
}

impl TailMass {
    pub fn holds(&self) -> bool {
        self.tail <= self.bound
    }
}

/// Mass of `f` outside `[−R, R]` against the confinement bound `E(f)/R²`.
///
/// Finite-difference grids use the discrete form with zero Dirichlet
/// data; the Hermite basis uses `Σ λ_k c_k²`.
pub fn tail_mass_check(sp: &Spectrum, f: &GroundFunction, radius: f64) -> Result<TailMass> {
    let kind = sp.backend().kind;
    if !matches!(kind, BackendKind::OscillatorAnalytic | BackendKind::OscillatorFd) {
        return Err(Error::InvalidBackend(format!(
            "tail check needs an oscillator backend, got {}",
            kind.name()
        )));
    }
    if !(radius > 0.0 && radius <= sp.extent()) {
        return Err(Error::Domain {
            func: "tail_mass_check",
            arg: radius,
            expected: "0 < R <= domain extent",
        });
    }
    if f.values.len() != sp.node_count() {
        return Err(Error::DimensionMismatch {
            expected: sp.node_count(),
            got: f.values.len(),
        });
    }
    let tail = sp
        .points()
        .iter()
        .zip(sp.weights())
        .zip(&f.values)
        .filter(|((p, _), _)| p[0].abs() > radius)
        .map(|((_, w), v)| w * v * v)
        .sum();
    let energy = match kind {
        BackendKind::OscillatorFd => {
            let h = sp.weights()[0];
            let v = &f.values;
            let n = v.len();
            let mut grad = v[0] * v[0] + v[n - 1] * v[n - 1];
            grad += v.windows(2).map(|p| (p[1] - p[0]).powi(2)).sum::<f64>();
            let pot: f64 = sp.points().iter().zip(v).map(|(p, f)| p[0] * p[0] * f * f).sum();
            grad / h + h * pot
        }
        _ => f
            .coefficients_for(sp)?
            .iter()
            .zip(sp.eigenvalues())
            .map(|(c, lam)| lam * c * c)
            .sum(),
    };
    Ok(TailMass {
        tail,
        bound: energy / (radius * radius),
        energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpCheck {
    pub q: f64,
    /// Critical exponent `2*` (infinite in dimension ≤ 2).
    pub p: f64,
    /// Interpolation parameter solving `1/q = (1−t)/2 + t/p`.
    pub t: f64,
    /// `‖f‖_q`.
    pub lhs: f64,
    /// `‖f‖_2^{1−t} ‖f‖_p^t`.
    pub rhs: f64,
}

impl LpCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + tol)
    }
}

/// Weighted discrete `L^p` norm; `p = ∞` gives the max norm.
pub fn lp_norm<T: Scalar>(sp: &Spectrum<T>, values: &[T], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|v| v.modulus()).fold(0.0, f64::max);
    }
    sp.weights()
        .iter()
        .zip(values)
        .map(|(w, v)| w * v.modulus().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Hölder interpolation `‖f‖_q ≤ ‖f‖_2^{1−t} ‖f‖_{2*}^t` for `2 ≤ q < 2*`.
pub fn lp_interpolation_check<T: Scalar>(
    f: &GroundFunction<T>,
    q: f64,
    sp: &Spectrum<T>,
) -> Result<LpCheck> {
    let p = sp.critical_exponent();
    if !(q >= 2.0 && q < p) {
        return Err(Error::Domain {
            func: "lp_interpolation_check",
            arg: q,
            expected: "2 <= q < critical exponent",
        });
    }
    if f.values.len() != sp.node_count() {
        return Err(Error::DimensionMismatch {
            expected: sp.node_count(),
            got: f.values.len(),
        });
    }
    let t = (0.5 - 1.0 / q) / (0.5 - 1.0 / p);
    let lhs = lp_norm(sp, &f.values, q);
    let two = lp_norm(sp, &f.values, 2.0);
    let top = lp_norm(sp, &f.values, p);
    let rhs = two.powf(1.0 - t) * top.powf(t);
    Ok(LpCheck { q, p, t, lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diamagnetic {
    /// `Σ_edges (|u_a| − |u_b|)²`.
    pub q0: f64,
    /// `Σ_edges |u_a − e^{iθ} u_b|²`.
    pub qa: f64,
}

impl Diamagnetic {
    pub fn holds(&self, tol: f64) -> bool {
        self.q0 <= self.qa + tol
    }
}

/// Edge sums of the plain and magnetic difference forms.
pub fn diamagnetic_check(grid: &MagneticGrid, u: &[Complex64]) -> Result<Diamagnetic> {
    if u.len() != grid.node_count() {
        return Err(Error::DimensionMismatch {
            expected: grid.node_count(),
            got: u.len(),
        });
    }
    let mut q0 = 0.0;
    let mut qa = 0.0;
    for e in grid.edges() {
        let (a, b) = (u[e.a], u[e.b]);
        q0 += (a.norm() - b.norm()).powi(2);
        qa += (a - Complex64::from_polar(1.0, e.theta) * b).norm_sqr();
    }
    Ok(Diamagnetic { q0, qa })
}
