//! Independent reference implementations used as test oracles. None of them
//! go through the eigensolver under test.
#![allow(dead_code)]

use markov_elim::model::BlockHamiltonian;
use markov_elim::numkernel::{ComplexMatrix, C64};
use rand::Rng;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols(), b.rows());
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        a[(i, j)]
                    } else if j - n == i {
                        c(1.0)
                    } else {
                        c(0.0)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| m[p][col].norm().total_cmp(&m[q][col].norm())).unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        assert!(p.norm() > 1e-300, "singular matrix in oracle");
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != c(0.0) {
                    let pivot_row = m[col].clone();
                    for (x, t) in m[r].iter_mut().zip(pivot_row) {
                        *x -= f * t;
                    }
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| m[i][n + j])
}

/// `exp(-i h t)` by scaling and squaring of a Taylor series.
pub fn taylor_expm(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = h.rows();
    let a = h.scale_complex(-I * t);
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = a.scale(0.5f64.powi(squarings as i32));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = matmul(&term, &a).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
}

/// Hermitian matrix with entries drawn uniformly from `[-scale, scale]`.
pub fn random_hermitian(rng: &mut impl Rng, d: usize, scale: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c(rng.gen_range(-scale..=scale));
        for j in i + 1..d {
            let z = random_complex(rng, scale);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random unitary from Gram-Schmidt on random complex columns.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| random_complex(rng, 1.0)).collect();
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `U diag(values) U^dagger` for a random unitary `U`.
pub fn hermitian_with_spectrum(rng: &mut impl Rng, values: &[f64]) -> ComplexMatrix {
    let u = random_unitary(rng, values.len());
    matmul(&matmul(&u, &ComplexMatrix::from_real_diagonal(values)), &u.adjoint()).hermitian_part()
}

/// A valid block with `m, n <= 3`, `|Delta|_op = 1`, all Delta eigenvalues
/// at least 0.3 in magnitude and `|Omega|_op <= 0.3`.
pub fn random_block(rng: &mut impl Rng) -> BlockHamiltonian {
    let m = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=3);
    let mut values: Vec<f64> = (0..n)
        .map(|_| {
            let mag = rng.gen_range(0.3..=1.0);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    values[0] = values[0].signum();
    let delta = hermitian_with_spectrum(rng, &values);
    let omega = random_hermitian(rng, m, 0.1);
    let raw = ComplexMatrix::from_fn(m, n, |_, _| random_complex(rng, 1.0));
    // Frobenius norm bounds the operator norm.
    let coupling = raw.scale(rng.gen_range(0.01..=0.3) / raw.frobenius_norm());
    BlockHamiltonian::unlabeled(omega, coupling, delta).expect("valid random block")
}

pub fn unit_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| random_complex(rng, 1.0)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn basis(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); d];
    v[k] = c(1.0);
    v
}
