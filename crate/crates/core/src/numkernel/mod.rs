//! Dense complex linear algebra for the small Hermitian matrices that appear
//! in few-level atomic problems (dimension up to a few dozen).
//!
//! Everything is built on a cyclic Jacobi eigensolver. Matrix functions
//! (inverse, inverse square root, exponential) are applied through the
//! eigendecomposition, so a non-diagonal detuning block is handled the same
//! way as a diagonal one.

mod matrix;

pub(crate) use matrix::ZERO;
pub use matrix::{ComplexMatrix, C64};

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance applied before decomposition.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius mass, relative to |A|_F.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Eigenvalues below this fraction of the operator norm count as zero when inverting.
pub const SINGULAR_REL_TOL: f64 = 1e-10;

/// Eigendecomposition `A = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column k pairs with `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum())
    }

    /// Reassembles `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| C64::new(l, 0.0))
    }

    pub fn op_norm(&self) -> f64 {
        self.values.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min)
    }

    /// Expands `v` in the eigenbasis: returns `V^dagger v`.
    pub fn coefficients(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n).map(|k| (0..n).map(|i| self.vectors[(i, k)].conj() * v[i]).sum()).collect()
    }

    /// `V (f(lambda) * c)` for eigenbasis coefficients `c`.
    pub fn synthesize(&self, c: &[C64], f: impl Fn(f64) -> C64) -> Vec<C64> {
        let n = self.dim();
        let scaled: Vec<C64> = c.iter().zip(&self.values).map(|(ck, &l)| ck * f(l)).collect();
        (0..n).map(|i| (0..n).map(|k| self.vectors[(i, k)] * scaled[k]).sum()).collect()
    }
}

/// Rejects non-square input and deviations from Hermiticity beyond a tolerance
/// relative to the largest entry.
pub fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let tolerance = HERMITIAN_TOL * (1.0 + a.max_abs());
    let deviation = a.hermiticity_defect();
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    Ok(())
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(A + A^dagger)/2` after the Hermiticity check.
/// Eigenvalues come back ascending; ties keep the order in which the sweeps
/// left them, so the output is a deterministic function of the input.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut w = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&w) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let raw: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi step zeroing the (p, q) entry: A <- U^dagger A U, V <- V U.
///
/// U is the phase fix diag(1, e^{-i phi}) followed by a real rotation, so the
/// complex case reduces to the textbook real one.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let g = b.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let zeta = (aqq - app) / (2.0 * g);
    let t = if zeta.abs() > 1e150 {
        0.5 / zeta
    } else {
        let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
        sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phase = b.conj() / g;

    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = phase * (-s);
    let u11 = phase * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u00 + akq * u10;
        a[(k, q)] = akp * u01 + akq * u11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
        a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}

/// Time-evolution operator exp(-i h t), hbar = 1.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(h)?.matrix(t))
}

/// Caches one eigendecomposition so a whole time grid can be evaluated from it.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermitianEig,
}

impl Propagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self { eig: herm_eig(h)? })
    }

    pub fn from_eig(eig: HermitianEig) -> Self {
        Self { eig }
    }

    pub fn eig(&self) -> &HermitianEig {
        &self.eig
    }

    pub fn matrix(&self, t: f64) -> ComplexMatrix {
        self.eig.apply_fn(|l| C64::from_polar(1.0, -l * t))
    }

    /// exp(-i h t) v.
    pub fn apply(&self, t: f64, v: &[C64]) -> Vec<C64> {
        let c = self.eig.coefficients(v);
        self.eig.synthesize(&c, |l| C64::from_polar(1.0, -l * t))
    }
}

/// Inverse of a Hermitian matrix through its spectrum.
///
/// Fails with `SingularBlock` when the smallest |eigenvalue| is at or below
/// `1e-10 * |a|_op`.
pub fn herm_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    inverse_from_eig(&eig)
}

pub(crate) fn inverse_from_eig(eig: &HermitianEig) -> Result<ComplexMatrix> {
    ensure_invertible(eig)?;
    Ok(eig.apply_fn(|l| C64::new(1.0 / l, 0.0)))
}

pub(crate) fn ensure_invertible(eig: &HermitianEig) -> Result<()> {
    let threshold = SINGULAR_REL_TOL * eig.op_norm();
    let min_abs_eig = eig.min_abs();
    // NaN counts as singular.
    if min_abs_eig.is_nan() || min_abs_eig <= threshold {
        return Err(Error::SingularBlock { min_abs_eig, threshold });
    }
    Ok(())
}

/// `P^{-1/2}` and `P^{+1/2}` of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct SquareRoots {
    pub inv_sqrt: ComplexMatrix,
    pub sqrt: ComplexMatrix,
}

pub fn herm_inv_sqrt(p: &ComplexMatrix) -> Result<SquareRoots> {
    let eig = herm_eig(p)?;
    let min_eig = eig.values.first().copied().unwrap_or(1.0);
    if min_eig.is_nan() || min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    Ok(SquareRoots {
        inv_sqrt: eig.apply_fn(|l| C64::new(l.sqrt().recip(), 0.0)),
        sqrt: eig.apply_fn(|l| C64::new(l.sqrt(), 0.0)),
    })
}

/// Operator and trace norms of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorms {
    pub op: f64,
    pub trace: f64,
}

pub fn spectral_norms(a: &ComplexMatrix) -> Result<SpectralNorms> {
    Ok(norms_of_spectrum(&herm_eig(a)?.values))
}

pub(crate) fn norms_of_spectrum(values: &[f64]) -> SpectralNorms {
    SpectralNorms { op: values.iter().map(|l| l.abs()).fold(0.0, f64::max), trace: values.iter().map(|l| l.abs()).sum() }
}

/// Largest singular value of an arbitrary (possibly rectangular) matrix.
pub fn singular_op_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = a * &a.adjoint();
    Ok(herm_eig(&gram)?.op_norm().sqrt())
}
