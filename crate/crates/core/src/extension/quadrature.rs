use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::FracOrder;

/// Nodes and weights for `∫₀^{tmax} g(t) t^a dt` with `a = 1 − 2s` or `a = 2s − 1`.
///
/// The interval is cut into Gauss–Legendre panels: panels of width at most
/// `tmax/32` at the top, geometrically shrinking panels (ratio 1/3) toward
/// the origin, and an innermost panel treated with the substitution
/// `t = τ^{1/(a+1)}`, which absorbs the weight exactly. Algebraic
/// singularities of `g` at `t = 0` therefore cost a logarithmic number of
/// panels.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    weight_exponent: f64,
    tmax: f64,
}

const GEOMETRIC_RATIO: f64 = 1.0 / 3.0;
const UNIFORM_PANELS: f64 = 32.0;

impl HalfLineQuadrature {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_exponent(&self) -> f64 {
        self.weight_exponent
    }

    pub fn tmax(&self) -> f64 {
        self.tmax
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_q g(t_q)`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .sum()
    }

    /// Rule whose cutoff makes `e^{−√λ_min · tmax} < 1e−14`.
    pub fn for_lowest_eigenvalue(
        order: &FracOrder,
        weight_exponent: f64,
        lambda_min: f64,
        n: usize,
    ) -> Result<Self> {
        if !(lambda_min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lowest eigenvalue must be positive, got {lambda_min}"
            )));
        }
        let tmax = 14.0 * std::f64::consts::LN_10 / lambda_min.sqrt() * 1.0001;
        half_line_quadrature(order, weight_exponent, tmax, n)
    }
}

/// Builds the composite rule with `n` Gauss points per panel.
pub fn half_line_quadrature(
    order: &FracOrder,
    weight_exponent: f64,
    tmax: f64,
    n: usize,
) -> Result<HalfLineQuadrature> {
    let s = order.s();
    let a = weight_exponent;
    if (a - (1.0 - 2.0 * s)).abs() > 1e-12 && (a - (2.0 * s - 1.0)).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "weight exponent {a} is neither 1 - 2s nor 2s - 1 for s = {s}"
        )));
    }
    if n < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 nodes per panel, got {n}")));
    }
    if !(tmax > 0.0 && tmax.is_finite()) {
        return Err(Error::InvalidArgument(format!("tmax must be positive, got {tmax}")));
    }
    // Innermost panel small enough that t^{min(2s, 2-2s)} over it is below 1e-16.
    let decay = (2.0 * s).min(2.0 - 2.0 * s);
    let t_inner = tmax * 10f64.powf(-16.0 / decay).max(1e-250);
    let cap = tmax / UNIFORM_PANELS;

    let mut breaks = vec![tmax];
    let mut cur = tmax;
    loop {
        let next = (cur - cap).max(cur * GEOMETRIC_RATIO);
        if next <= t_inner {
            break;
        }
        breaks.push(next);
        cur = next;
    }
    breaks.reverse();

    let (gx, gw) = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(n * (breaks.len() + 1));
    let mut weights = Vec::with_capacity(n * (breaks.len() + 1));

    // [0, breaks[0]] through τ = t^{a+1}
    let ap1 = a + 1.0;
    let tau_hi = breaks[0].powf(ap1);
    for (x, w) in gx.iter().zip(&gw) {
        let tau = 0.5 * tau_hi * (x + 1.0);
        nodes.push(tau.powf(1.0 / ap1));
        weights.push(0.5 * tau_hi * w / ap1);
    }
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in gx.iter().zip(&gw) {
            let t = mid + half * x;
            nodes.push(t);
            weights.push(half * w * t.powf(a));
        }
    }
    Ok(HalfLineQuadrature {
        nodes,
        weights,
        weight_exponent: a,
        tmax,
    })
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]` by Newton
/// iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
