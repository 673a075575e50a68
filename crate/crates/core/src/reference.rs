//! Slow, independent evaluations used to cross-check the fast paths.
//!
//! Nothing here shares code with [`crate::specfun`] or the spectral
//! calculus: integrals go through adaptive Gauss–Kronrod quadrature and
//! matrix square roots through the Denman–Beavers iteration.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7–K15 panel with the QUADPACK error estimate.
fn kronrod15(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [0.0; 15];
    fv[7] = g(c);
    for i in 0..7 {
        fv[i] = g(c - h * KRONROD_NODES[i]);
        fv[14 - i] = g(c + h * KRONROD_NODES[i]);
    }
    let wk = |i: usize| KRONROD_WEIGHTS[if i <= 7 { i } else { 14 - i }];
    let mut k = 0.0;
    let mut gs = GAUSS_WEIGHTS[3] * fv[7];
    let mut abs = 0.0;
    for (i, v) in fv.iter().enumerate() {
        k += wk(i) * v;
        abs += wk(i) * v.abs();
    }
    for i in (1..7).step_by(2) {
        gs += GAUSS_WEIGHTS[i / 2] * (fv[i] + fv[14 - i]);
    }
    let mean = 0.5 * k;
    let asc: f64 = fv.iter().enumerate().map(|(i, v)| wk(i) * (v - mean).abs()).sum::<f64>() * h.abs();
    let mut err = ((k - gs) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    // rounding floor: no estimate below this can be trusted
    let floor = 50.0 * f64::EPSILON * abs * h.abs();
    (k * h, err.max(floor), floor)
}

/// Adaptive G7–K15 quadrature of `g` over `[a, b]` to absolute tolerance `tol`.
/// Panels whose error estimate is at rounding level are accepted as well.
pub fn integrate(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(a, b, tol)];
    let mut total = 0.0;
    let mut splits = 0usize;
    while let Some((lo, hi, eps)) = stack.pop() {
        let (v, err, floor) = kronrod15(&g, lo, hi);
        if err <= eps.max(floor) || (hi - lo) < 1e-14 * (b - a).abs() {
            total += v;
            continue;
        }
        splits += 1;
        if splits > 100_000 {
            return Err(Error::InvalidArgument(
                "adaptive quadrature did not converge".into(),
            ));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, 0.5 * eps));
        stack.push((mid, hi, 0.5 * eps));
    }
    Ok(total)
}

/// `K_ν(x) = ∫₀^∞ e^{−x cosh u} cosh(νu) du`.
pub fn bessel_k_integral(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            func: "bessel_k_integral",
            arg: x,
            expected: "x > 0",
        });
    }
    // factor out e^{-x} so large x does not underflow; stop where the rest is below e^{-60}
    let upper = (1.0 + 60.0 / x).acosh();
    let g = |u: f64| (-x * (u.cosh() - 1.0)).exp() * (nu * u).cosh();
    let scaled = integrate(g, 0.0, upper, 1e-15)?;
    Ok(scaled * (-x).exp())
}

/// `Γ(a) = ∫₀^∞ t^{a−1} e^{−t} dt` for `a > 0`; the piece over `[0, 1]`
/// goes through `t = u^{1/a}`, which removes the endpoint singularity.
pub fn gamma_integral(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain {
            func: "gamma_integral",
            arg: a,
            expected: "a > 0",
        });
    }
    let head = integrate(|u: f64| (-u.powf(1.0 / a)).exp(), 0.0, 1.0, 1e-16)? / a;
    let upper = 800.0 + 2.0 * a;
    let g = |t: f64| ((a - 1.0) * t.ln() - t).exp();
    let peak = g((a - 1.0).max(1.0));
    let tail = integrate(g, 1.0, upper, 1e-15 * peak.max(1.0))?;
    Ok(head + tail)
}

/// `erfc(x) = 2/√π ∫_x^∞ e^{−t²} dt`.
pub fn erfc_integral(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Ok(2.0 - erfc_integral(-x)?);
    }
    let upper = x.max(28.0) + 1.0;
    let v = integrate(|t| (-t * t).exp(), x, upper, 1e-17)?;
    Ok(2.0 / PI.sqrt() * v)
}

/// Principal square root of a symmetric positive definite matrix by the
/// Denman–Beavers iteration.
pub fn sqrtm_denman_beavers(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().ok_or_else(singular)?;
        let zi = z.clone().try_inverse().ok_or_else(singular)?;
        let y_next = (&y + zi) * 0.5;
        let z_next = (&z + yi) * 0.5;
        let change = (&y_next - &y).amax();
        y = y_next;
        z = z_next;
        if change <= 1e-15 * y.amax() {
            return Ok(y);
        }
    }
    Err(Error::InvalidArgument(
        "Denman-Beavers iteration did not converge".into(),
    ))
}

fn singular() -> Error {
    Error::InvalidArgument("singular iterate in Denman-Beavers".into())
}

/// Eigenvalues `(2/h²)(1 − cos kπh/L)` of the three-point Dirichlet
/// Laplacian on `n` interior nodes of `(0, L)`.
pub fn fd_interval_eigenvalues(length: f64, n: usize) -> Vec<f64> {
    let h = length / (n as f64 + 1.0);
    (1..=n)
        .map(|k| 2.0 / (h * h) * (1.0 - (k as f64 * PI * h / length).cos()))
        .collect()
}
