//! Dense symmetric / Hermitian eigendecomposition.
//!
//! Householder reduction to real symmetric tridiagonal form followed by the
//! implicit-shift QL iteration. The Hermitian case uses complex reflectors and
//! a diagonal unitary rescaling that makes the off-diagonal real before QL.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum QL sweeps spent on a single eigenvalue.
pub const MAX_SWEEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    m: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Symmetrizes `(m + mᵀ)/2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let t = m.transpose();
        Ok(Self { m: (m + t) * 0.5 })
    }

    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Hermitian part `(m + m*)/2`.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let a = m.adjoint();
        Ok(Self {
            m: (m + a).map(|z| z * 0.5),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }
}

/// Eigenvalues in ascending order with the matching eigenvectors stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T: nalgebra::Scalar> {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<T>,
}

impl<T> EigenDecomposition<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    /// `max |V* V - I|` over the retained columns.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        let mut worst = 0.0f64;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).modulus());
            }
        }
        worst
    }

    /// `max |M - V Λ V*|`.
    pub fn reconstruction_residual(&self, m: &DMatrix<T>) -> f64 {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lam);
        }
        let rebuilt = scaled * self.vectors.adjoint();
        (m - rebuilt).iter().fold(0.0, |w, z| w.max(z.modulus()))
    }
}

pub fn eigh_symmetric(m: &SymmetricMatrix) -> Result<EigenDecomposition<f64>> {
    decompose_dense(m.matrix().clone())
}

pub fn eigh_hermitian(m: &HermitianMatrix) -> Result<EigenDecomposition<Complex64>> {
    decompose_dense(m.matrix().clone())
}

/// Full decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and sub/super-diagonal `offdiag`.
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<EigenDecomposition<f64>> {
    check_tridiagonal(diag, offdiag)?;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut v = DMatrix::<f64>::identity(n, n);
    tql(&mut d, &mut e, Some(&mut v))?;
    Ok(sorted(d, v))
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending, without vectors.
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    check_tridiagonal(diag, offdiag)?;
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    tql::<f64>(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// The `count` lowest eigenpairs of a symmetric tridiagonal matrix.
///
/// Eigenvalues come from QL without vector accumulation; vectors from
/// inverse iteration with a pivoted tridiagonal LU, orthogonalized against
/// the vectors already found. `O(n²)` instead of the `O(n³)` full path.
pub fn eigh_tridiagonal_lowest(
    diag: &[f64],
    offdiag: &[f64],
    count: usize,
) -> Result<EigenDecomposition<f64>> {
    let n = diag.len();
    let count = count.min(n);
    if count == n {
        return eigh_tridiagonal(diag, offdiag);
    }
    let all = tridiagonal_eigenvalues(diag, offdiag)?;
    let norm = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { offdiag[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut vectors = DMatrix::<f64>::zeros(n, count);
    for k in 0..count {
        let lam = all[k];
        let shift = lam + 8.0 * f64::EPSILON * norm;
        let lu = TridiagonalLu::factor(diag, offdiag, shift, norm);
        // deterministic, generic start vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        let mut converged = false;
        for _ in 0..8 {
            lu.solve(&mut x);
            for j in 0..k {
                let col = vectors.column(j);
                let dot: f64 = col.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, ci) in x.iter_mut().zip(col.iter()) {
                    *xi -= dot * ci;
                }
            }
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for xi in &mut x {
                *xi /= nrm;
            }
            let resid = tridiagonal_residual(diag, offdiag, lam, &x);
            if resid <= 1e-12 * norm {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                index: k,
                sweeps: 8,
            });
        }
        vectors.column_mut(k).copy_from_slice(&x);
    }
    Ok(EigenDecomposition {
        eigenvalues: all[..count].to_vec(),
        vectors,
    })
}

fn check_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if offdiag.len() + 1 != diag.len() {
        return Err(Error::DimensionMismatch {
            expected: diag.len() - 1,
            got: offdiag.len(),
        });
    }
    Ok(())
}

fn tridiagonal_residual(diag: &[f64], off: &[f64], lam: f64, x: &[f64]) -> f64 {
    let n = diag.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut r = (diag[i] - lam) * x[i];
        if i > 0 {
            r += off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            r += off[i] * x[i + 1];
        }
        worst = worst.max(r.abs());
    }
    worst
}

/// Partial-pivoting LU of `T - σI` for tridiagonal `T`.
struct TridiagonalLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, norm: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = f64::EPSILON * norm;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = f64::EPSILON * norm;
        }
        Self {
            lower: dl,
            diag: d,
            upper: du,
            upper2: du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.upper[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.upper[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

fn decompose_dense<T>(mut a: DMatrix<T>) -> Result<EigenDecomposition<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let mut q = DMatrix::<T>::identity(n, n);
    householder_tridiagonalize(&mut a, &mut q);

    // A = Q T Q*, T Hermitian tridiagonal with possibly complex subdiagonal.
    // Rescale by a diagonal unitary so the subdiagonal becomes real and >= 0.
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].real()).collect();
    let mut e = vec![0.0; n];
    let mut phase = T::one();
    for k in 0..n - 1 {
        let sub = a[(k + 1, k)];
        let modulus = sub.modulus();
        if modulus > 0.0 {
            phase *= sub.unscale(modulus);
        }
        e[k] = modulus;
        let next = phase;
        for i in 0..n {
            q[(i, k + 1)] *= next;
        }
    }
    tql(&mut d, &mut e, Some(&mut q))?;
    Ok(sorted(d, q))
}

/// In-place Householder reduction; on exit `a` holds the tridiagonal part
/// and `q` the accumulated unitary factor.
fn householder_tridiagonalize<T>(a: &mut DMatrix<T>, q: &mut DMatrix<T>)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut u = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for k in 0..n - 2 {
        let lo = k + 1;
        let alpha = (lo..n)
            .map(|i| a[(i, k)].modulus_squared())
            .sum::<f64>()
            .sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(lo, k)];
        let x0_mod = x0.modulus();
        if (lo + 1..n).all(|i| a[(i, k)].modulus() == 0.0) {
            continue;
        }
        let ph = if x0_mod > 0.0 { x0.unscale(x0_mod) } else { T::one() };
        // v = x + ph·α e₁, ‖v‖² = 2α(α + |x₀|)
        let vnorm = (2.0 * alpha * (alpha + x0_mod)).sqrt();
        for i in lo..n {
            u[i] = a[(i, k)].unscale(vnorm);
        }
        u[lo] = (x0 + ph.scale(alpha)).unscale(vnorm);

        // p = B u on the trailing block
        for i in lo..n {
            let mut acc = T::zero();
            for j in lo..n {
                acc += a[(i, j)] * u[j];
            }
            p[i] = acc;
        }
        let mut kappa = T::zero();
        for i in lo..n {
            kappa += u[i].conjugate() * p[i];
        }
        let kappa = kappa.real();
        for i in lo..n {
            p[i] -= u[i].scale(kappa);
        }
        // B ← B − 2 u w* − 2 w u*
        for j in lo..n {
            let wj = p[j].conjugate();
            let uj = u[j].conjugate();
            for i in lo..n {
                let upd = u[i] * wj + p[i] * uj;
                a[(i, j)] -= upd + upd;
            }
        }
        let beta = -(ph.scale(alpha));
        a[(lo, k)] = beta;
        a[(k, lo)] = beta.conjugate();
        for i in lo + 1..n {
            a[(i, k)] = T::zero();
            a[(k, i)] = T::zero();
        }
        // Q ← Q (I − 2 u u*)
        for r in 0..n {
            let mut acc = T::zero();
            for i in lo..n {
                acc += q[(r, i)] * u[i];
            }
            let acc = acc + acc;
            for i in lo..n {
                q[(r, i)] -= acc * u[i].conjugate();
            }
        }
    }
}

/// Implicit QL with Wilkinson-type shifts on the real symmetric tridiagonal
/// matrix (`d`, `e`), `e[i]` coupling rows `i` and `i+1`, `e[n-1] = 0`.
/// Rotations are accumulated into the columns of `v` when present.
fn tql<T>(d: &mut [f64], e: &mut [f64], mut v: Option<&mut DMatrix<T>>) -> Result<()>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::NoConvergence {
                        index: l,
                        sweeps: MAX_SWEEPS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..v.nrows() {
                            let hv = v[(k, i + 1)];
                            let vi = v[(k, i)];
                            v[(k, i + 1)] = vi.scale(s) + hv.scale(c);
                            v[(k, i)] = vi.scale(c) - hv.scale(s);
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn sorted<T>(d: Vec<f64>, v: DMatrix<T>) -> EigenDecomposition<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(v.nrows(), order.len(), |r, c| v[(r, order[c])]);
    EigenDecomposition {
        eigenvalues,
        vectors,
    }
}
