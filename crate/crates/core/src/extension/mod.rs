//! The extension problem on the half-line `t ∈ (0, ∞)`.
//!
//! Expanding the extension in the eigenbasis, `u(x, t) = Σ_k α_k(t) φ_k(x)`,
//! each coefficient solves
//!
//! ```text
//! α'' + (1 − 2s)/t · α' − λ α = 0,    α(0) = c,    α bounded,
//! ```
//!
//! whose decaying solution is `α(t) = c · 2^{1−s}/Γ(s) · (√λ t)^s K_s(√λ t)`.
//! The weighted energy `∫ (λα² + α'²) t^{1−2s} dt` of that solution equals
//! `K(s) λ^s c²` with `K(s) = −2sΓ(−s) / (4^s Γ(s))`, and
//! `−t^{1−2s} α'(t) → K(s) λ^s c` as `t ↓ 0`.

mod quadrature;

use crate::error::{Error, Result};
use crate::operators::{synthesize, GroundFunction, Spectrum};
use crate::specfun::{bessel_k_scaled, gamma};
use crate::Scalar;

pub use quadrature::{gauss_legendre, half_line_quadrature, HalfLineQuadrature};

/// Beyond this argument every `K_ν(x) e^{…}` product underflows.
const UNDERFLOW_ARG: f64 = 745.0;

/// Fractional order `s ∈ (0, 1)` with the energy constant `K(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    s: f64,
    ks: f64,
    gamma_s: f64,
}

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain {
                func: "k_constant",
                arg: s,
                expected: "0 < s < 1",
            });
        }
        let gamma_s = gamma(s)?;
        let ks = -2.0 * s * gamma(-s)? / (4f64.powf(s) * gamma_s);
        debug_assert!(ks > 0.0);
        Ok(Self { s, ks, gamma_s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `K(s) = −2sΓ(−s) / (4^s Γ(s))`.
    pub fn ks(&self) -> f64 {
        self.ks
    }

    /// `2^{1−s}/Γ(s)`, the normalization making `α(0⁺) = c`.
    fn profile_norm(&self) -> f64 {
        2f64.powf(1.0 - self.s) / self.gamma_s
    }
}

/// `K(s)` packaged with `s`.
pub fn k_constant(s: f64) -> Result<FracOrder> {
    FracOrder::new(s)
}

/// Decaying solution of the mode equation for one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProfile {
    lambda: f64,
    order: FracOrder,
    c0: f64,
    sqrt_lambda: f64,
    norm: f64,
}

pub fn mode_profile(lambda: f64, order: FracOrder, c0: f64) -> Result<ModeProfile> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain {
            func: "mode_profile",
            arg: lambda,
            expected: "lambda > 0",
        });
    }
    Ok(ModeProfile {
        lambda,
        order,
        c0,
        sqrt_lambda: lambda.sqrt(),
        norm: order.profile_norm(),
    })
}

impl ModeProfile {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// `α(t)`; returns `c0` at `t = 0`.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 || self.c0 == 0.0 {
            return self.c0;
        }
        let x = self.sqrt_lambda * t;
        if x > UNDERFLOW_ARG {
            return 0.0;
        }
        let s = self.order.s;
        let k = bessel_k_scaled(s, x).expect("s in (0,1), x > 0");
        self.c0 * self.norm * x.powf(s) * k * (-x).exp()
    }

    /// `α'(t)` for `t > 0`, via `d/dz [z^s K_s(z)] = −z^s K_{1−s}(z)`.
    pub fn derivative(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        if self.c0 == 0.0 {
            return 0.0;
        }
        let x = self.sqrt_lambda * t;
        if x > UNDERFLOW_ARG {
            return 0.0;
        }
        let s = self.order.s;
        let k = bessel_k_scaled(1.0 - s, x).expect("1-s in (0,1), x > 0");
        -self.c0 * self.norm * self.sqrt_lambda * x.powf(s) * k * (-x).exp()
    }

    /// Boundary flux `−t^{1−2s} α'(t)` for `t > 0`; bounded as `t ↓ 0`.
    pub fn flux(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        if self.c0 == 0.0 {
            return 0.0;
        }
        let x = self.sqrt_lambda * t;
        if x > UNDERFLOW_ARG {
            return 0.0;
        }
        let s = self.order.s;
        let k = bessel_k_scaled(1.0 - s, x).expect("1-s in (0,1), x > 0");
        self.c0 * self.norm * self.lambda.powf(s) * x.powf(1.0 - s) * k * (-x).exp()
    }
}

/// Dirichlet-to-Neumann value `−lim_{t↓0} t^{1−2s} α'(t)`.
///
/// The flux is sampled at `t = 10^{−m}/√λ`, `m = 2..5`. Its small-`t`
/// expansion only contains the powers `t^{2−2s}`, `t²`, `t^{4−2s}`, …, so
/// three Richardson eliminations with those exponents leave an `O(t⁴)`
/// remainder. The result is rejected when the last two eliminations
/// disagree by more than `1e−5` relative.
pub fn dtn_limit(p: &ModeProfile) -> Result<f64> {
    if p.c0 == 0.0 {
        return Ok(0.0);
    }
    let s = p.order.s;
    let samples: Vec<f64> = (2..=5)
        .map(|m| p.flux(10f64.powi(-m) / p.sqrt_lambda))
        .collect();
    let exponents = [2.0 - 2.0 * s, 2.0, 4.0 - 2.0 * s];
    let mut column = samples;
    let mut previous = column.clone();
    for &e in &exponents {
        let r = 10f64.powf(e);
        previous = column.clone();
        column = column.windows(2).map(|w| (r * w[1] - w[0]) / (r - 1.0)).collect();
    }
    let last = column[0];
    let prev = *previous.last().expect("two entries before the final step");
    if !last.is_finite() || (last - prev).abs() > 1e-5 * last.abs() {
        return Err(Error::Extrapolation { prev, last });
    }
    Ok(last)
}

/// Relative size of the neglected tail `∫_{tmax}^∞` compared to the total.
const TAIL_LIMIT: f64 = 1e-12;

/// Cylinder energy `∫₀^∞ Σ_k [λ_k α_k² + α_k'²] t^{1−2s} dt` by quadrature.
///
/// With a `t^{2s−1}` rule the same integral is evaluated as
/// `∫ Σ_k [λ_k α_k² t^{2−4s} + (t^{1−2s} α_k')²] t^{2s−1} dt`.
pub fn extension_energy<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    f: &GroundFunction<T>,
    quad: &HalfLineQuadrature,
) -> Result<f64> {
    let c = f.coefficients_for(sp)?;
    let s = order.s();
    let primary = (quad.weight_exponent() - (1.0 - 2.0 * s)).abs() < 1e-12;
    let mut total = 0.0;
    let mut tail = 0.0;
    for (k, ck) in c.iter().enumerate() {
        let amp = ck.modulus();
        if amp == 0.0 {
            continue;
        }
        let lambda = sp.eigenvalues()[k];
        let p = mode_profile(lambda, *order, amp)?;
        let integrand = |t: f64| {
            let a = p.value(t);
            if primary {
                let d = p.derivative(t);
                lambda * a * a + d * d
            } else {
                let b = p.flux(t);
                lambda * a * a * t.powf(2.0 - 4.0 * s) + b * b
            }
        };
        total += quad.integrate(integrand);
        // integrand decays like e^{-2√λ t}
        let tm = quad.tmax();
        tail += integrand(tm) * tm.powf(quad.weight_exponent()) / (2.0 * lambda.sqrt());
    }
    if tail > TAIL_LIMIT * total {
        return Err(Error::QuadratureTail {
            tail: tail / total,
            limit: TAIL_LIMIT,
        });
    }
    Ok(total)
}

/// `K(s) Σ_k λ_k^s |c_k|²`.
pub fn spectral_energy<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    f: &GroundFunction<T>,
) -> Result<f64> {
    let c = f.coefficients_for(sp)?;
    let sum: f64 = c
        .iter()
        .zip(sp.eigenvalues())
        .map(|(ck, lam)| lam.powf(order.s()) * ck.modulus_squared())
        .sum();
    Ok(order.ks() * sum)
}

/// Extension coefficients `α_k(t)` for trace coefficients `c_k`.
pub fn extension_coefficients<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    f: &GroundFunction<T>,
    t: f64,
) -> Result<Vec<T>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    let c = f.coefficients_for(sp)?;
    c.iter()
        .zip(sp.eigenvalues())
        .map(|(ck, &lam)| {
            let unit = mode_profile(lam, *order, 1.0)?;
            Ok(ck.scale(unit.value(t)))
        })
        .collect()
}

/// `u(·, t) = Σ_k α_k(t) φ_k`.
pub fn evaluate_extension<T: Scalar>(
    sp: &Spectrum<T>,
    order: &FracOrder,
    f: &GroundFunction<T>,
    t: f64,
) -> Result<GroundFunction<T>> {
    if t == 0.0 {
        f.coefficients_for(sp)?;
        return Ok(f.clone());
    }
    let alpha = extension_coefficients(sp, order, f, t)?;
    synthesize(&alpha, sp)
}
