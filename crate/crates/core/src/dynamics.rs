//! Time evolution on a uniform grid, exact and effective.

use rayon::prelude::*;

use crate::elimination::{estimate_irrelevant, metric, EffectiveModel, Order};
use crate::error::{Error, Result};
use crate::model::BlockHamiltonian;
use crate::numkernel::{herm_eig, herm_inv_sqrt, ComplexMatrix, Propagator, C64, ZERO};

/// Tolerance on the norm of initial states.
pub const NORM_TOL: f64 = 1e-12;
/// Largest `h |Delta|_op` accepted by [`reconstruct_history`].
pub const MAX_RECONSTRUCT_STEP: f64 = 1.0;

/// Uniform grid `t_k = k * t_max / steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidGrid(format!("t_max must be positive and finite, got {t_max}")));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be at least 1".into()));
        }
        Ok(Self { t_max, steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps).map(|k| k as f64 * dt).collect()
    }
}

/// Sampled state history in the original basis order.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub labels: Vec<String>,
    /// `amplitudes[k][i]`: state `i` at `times[k]`.
    pub amplitudes: Vec<Vec<C64>>,
    pub populations: Vec<Vec<f64>>,
    pub method: String,
    /// Quadratic form the method conserves: `|psi|^2` for exact and zeroth
    /// order, `psi^dagger M psi` over the relevant states for first order.
    pub conserved_norm: Vec<f64>,
    pub rabi: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Population history of one state.
    pub fn population_of(&self, state: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[state]).collect()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn quadratic_form(m: &ComplexMatrix, v: &[C64]) -> f64 {
    let mv = m.mul_vec(v);
    v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
}

fn populations(amplitudes: &[Vec<C64>]) -> Vec<Vec<f64>> {
    amplitudes.iter().map(|a| a.iter().map(|z| z.norm_sqr()).collect()).collect()
}

fn check_normalized(psi: &[C64]) -> Result<()> {
    let n = norm_sqr(psi);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    Ok(())
}

/// Full Schrödinger evolution from one eigendecomposition of `h`.
pub fn evolve_exact(h: &ComplexMatrix, labels: &[String], psi0: &[C64], grid: &TimeGrid) -> Result<Trajectory> {
    if psi0.len() != h.rows() || labels.len() != h.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {}, state length {}, {} labels",
            h.rows(),
            psi0.len(),
            labels.len()
        )));
    }
    check_normalized(psi0)?;
    let prop = Propagator::new(h)?;
    let rabi = (h.rows() >= 2).then(|| smallest_gap(&prop.eig().values));
    let times = grid.times();
    let amplitudes: Vec<Vec<C64>> = times.par_iter().map(|&t| prop.apply(t, psi0)).collect();
    let conserved_norm = amplitudes.iter().map(|a| norm_sqr(a)).collect();
    Ok(Trajectory {
        populations: populations(&amplitudes),
        times,
        labels: labels.to_vec(),
        amplitudes,
        method: "exact".into(),
        conserved_norm,
        rabi,
    })
}

/// Maps a vector given in `from` index order to `to` order (same index set).
fn reorder(values: &[C64], from: &[usize], to: &[usize]) -> Vec<C64> {
    to.iter().map(|i| values[from.iter().position(|f| f == i).expect("same index set")]).collect()
}

/// Effective evolution of the relevant states, with irrelevant amplitudes
/// filled in from the zeroth-order estimate at every elimination step.
pub fn evolve_effective(model: &EffectiveModel, psi0_full: &[C64], grid: &TimeGrid) -> Result<Trajectory> {
    let d = model.full_dim();
    if psi0_full.len() != d {
        return Err(Error::DimensionMismatch(format!("state has {} entries, model has {d} states", psi0_full.len())));
    }
    check_normalized(psi0_full)?;
    let relevant = model.relevant_indices();
    let outside: f64 = (0..d).filter(|i| !relevant.contains(i)).map(|i| psi0_full[i].norm_sqr()).sum();
    if outside > NORM_TOL {
        return Err(Error::InitialStateOutsideRelevant { weight: outside });
    }

    let raw: Vec<C64> = relevant.iter().map(|&i| psi0_full[i]).collect();
    let m_norm = quadratic_form(model.metric(), &raw);
    let psi0: Vec<C64> = raw.iter().map(|z| z / m_norm.sqrt()).collect();

    // M1 and M1D share the Hermitian generator M^{-1/2} H0 M^{-1/2}; both are
    // propagated as dressed states and undressed afterwards.
    let prop = Propagator::new(model.hermitian_form())?;
    let roots = match model.order() {
        Order::M0 => None,
        Order::M1 | Order::M1D => Some(herm_inv_sqrt(model.metric())?),
    };
    let dressed0 = match &roots {
        Some(r) => r.sqrt.mul_vec(&psi0),
        None => psi0.clone(),
    };

    // Undressing matrices for inner first-order steps.
    let stages = model.stages();
    let orders = model.stage_orders();
    let undress: Vec<Option<ComplexMatrix>> = stages
        .iter()
        .zip(orders)
        .take(stages.len() - 1)
        .map(|(b, o)| match o {
            Order::M0 => Ok(None),
            Order::M1 | Order::M1D => Ok(Some(herm_inv_sqrt(&metric(b)?)?.inv_sqrt)),
        })
        .collect::<Result<_>>()?;

    let rebuild = |rel: Vec<C64>| -> Result<Vec<C64>> {
        let mut v = rel;
        for k in (0..stages.len()).rev() {
            let block = &stages[k];
            let eps = estimate_irrelevant(block, &v)?;
            v.extend(eps);
            if k == 0 {
                let mut full = vec![ZERO; d];
                for (&i, z) in block.permutation().iter().zip(&v) {
                    full[i] = *z;
                }
                return Ok(full);
            }
            let prev = stages[k - 1].relevant_indices();
            v = reorder(&v, block.permutation(), prev);
            if let Some(u) = &undress[k - 1] {
                v = u.mul_vec(&v);
            }
        }
        unreachable!("at least one stage")
    };

    let times = grid.times();
    let samples: Vec<(Vec<C64>, f64)> = times
        .par_iter()
        .map(|&t| {
            let dressed = prop.apply(t, &dressed0);
            let psi = match &roots {
                Some(r) => r.inv_sqrt.mul_vec(&dressed),
                None => dressed,
            };
            let norm = quadratic_form(model.metric(), &psi);
            rebuild(psi).map(|full| (full, norm))
        })
        .collect::<Result<_>>()?;
    let (amplitudes, conserved_norm): (Vec<_>, Vec<_>) = samples.into_iter().unzip();

    let method = orders.iter().map(|o| o.name()).collect::<Vec<_>>().join("+");
    Ok(Trajectory {
        populations: populations(&amplitudes),
        times,
        labels: model.full_labels(),
        amplitudes,
        method,
        conserved_norm,
        rabi: (model.m() >= 2).then(|| rabi_effective(model)).transpose()?,
    })
}

/// Irrelevant amplitudes from the exact integral of the relevant history,
/// `eps(t) = -(i/2) int_0^t exp(-i Delta (t - s)) Omega^dagger psi(s) ds`,
/// by the trapezoidal rule in the eigenbasis of `Delta`.
pub fn reconstruct_history(block: &BlockHamiltonian, psi_samples: &[Vec<C64>], dt: f64) -> Result<Vec<Vec<C64>>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidGrid(format!("step must be positive, got {dt}")));
    }
    let eig = block.delta_eig();
    let h_norm = dt * eig.op_norm();
    if h_norm > MAX_RECONSTRUCT_STEP {
        return Err(Error::GridTooCoarse { h_norm });
    }
    if let Some(bad) = psi_samples.iter().find(|p| p.len() != block.m()) {
        return Err(Error::DimensionMismatch(format!(
            "sample has {} entries, block has {} relevant states",
            bad.len(),
            block.m()
        )));
    }

    let couple_dag = block.coupling().adjoint();
    let n = block.n();
    // f_j(s) = exp(i lambda_j s) * <v_j| Omega^dagger psi(s)>
    let integrand: Vec<Vec<C64>> = psi_samples
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let s = k as f64 * dt;
            let c = eig.coefficients(&couple_dag.mul_vec(psi));
            c.iter().zip(&eig.values).map(|(cj, &l)| cj * C64::from_polar(1.0, l * s)).collect()
        })
        .collect();

    let mut acc = vec![ZERO; n];
    let mut out = Vec::with_capacity(psi_samples.len());
    for (k, f) in integrand.iter().enumerate() {
        if k > 0 {
            for j in 0..n {
                acc[j] += (integrand[k - 1][j] + f[j]) * (0.5 * dt);
            }
        }
        let t = k as f64 * dt;
        let coeffs: Vec<C64> =
            acc.iter().zip(&eig.values).map(|(a, &l)| a * C64::from_polar(1.0, -l * t) * C64::new(0.0, -0.5)).collect();
        out.push(eig.synthesize(&coeffs, |_| C64::new(1.0, 0.0)));
    }
    Ok(out)
}

fn adjacent_gaps(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

fn smallest_gap(values: &[f64]) -> f64 {
    adjacent_gaps(values).into_iter().fold(f64::INFINITY, f64::min)
}

/// Smallest spacing between adjacent eigenvalues of the full Hamiltonian.
pub fn rabi_exact(h: &ComplexMatrix) -> Result<f64> {
    if h.rows() < 2 {
        return Err(Error::DimensionMismatch("Rabi frequency needs at least two states".into()));
    }
    Ok(smallest_gap(&herm_eig(h)?.values))
}

/// Smallest adjacent gap among the `relevant.len()` eigenstates with the most
/// weight on the `relevant` basis states.
///
/// With several irrelevant states the smallest gap of the whole spectrum can
/// belong to two dressed irrelevant states; this picks out the slow
/// oscillation an effective model describes.
pub fn rabi_exact_relevant(h: &ComplexMatrix, relevant: &[usize]) -> Result<f64> {
    if relevant.len() < 2 || relevant.iter().any(|&i| i >= h.rows()) {
        return Err(Error::DimensionMismatch(format!("need at least two relevant indices below {}, got {relevant:?}", h.rows())));
    }
    let eig = herm_eig(h)?;
    let weight = |k: usize| relevant.iter().map(|&i| eig.vectors[(i, k)].norm_sqr()).sum::<f64>();
    let mut by_weight: Vec<usize> = (0..eig.dim()).collect();
    by_weight.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)).then(a.cmp(&b)));
    let mut chosen: Vec<f64> = by_weight[..relevant.len()].iter().map(|&k| eig.values[k]).collect();
    chosen.sort_by(f64::total_cmp);
    Ok(smallest_gap(&chosen))
}

/// All adjacent eigenvalue gaps of the effective Hamiltonian, ascending by energy.
pub fn effective_gaps(model: &EffectiveModel) -> Result<Vec<f64>> {
    Ok(adjacent_gaps(&herm_eig(model.hermitian_form())?.values))
}

/// Eigenvalue spacing of a two-state effective model; the smallest adjacent
/// gap when more states are kept.
pub fn rabi_effective(model: &EffectiveModel) -> Result<f64> {
    if model.m() < 2 {
        return Err(Error::DimensionMismatch("Rabi frequency needs at least two relevant states".into()));
    }
    Ok(effective_gaps(model)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Population differences of `other` against `reference`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub labels: Vec<String>,
    pub max_abs: Vec<f64>,
    pub rms: Vec<f64>,
    /// `(other - reference) / reference` of the Rabi frequencies.
    pub rabi_relative: Option<f64>,
}

impl ComparisonReport {
    pub fn worst_max(&self) -> f64 {
        self.max_abs.iter().copied().fold(0.0, f64::max)
    }

    pub fn worst_rms(&self) -> f64 {
        self.rms.iter().copied().fold(0.0, f64::max)
    }
}

pub fn compare_trajectories(reference: &Trajectory, other: &Trajectory) -> Result<ComparisonReport> {
    if reference.labels != other.labels {
        return Err(Error::GridMismatch(format!("labels {:?} vs {:?}", reference.labels, other.labels)));
    }
    if reference.times.len() != other.times.len()
        || reference.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::GridMismatch("time grids differ".into()));
    }
    let d = reference.dim();
    let len = reference.len() as f64;
    let mut max_abs = vec![0.0; d];
    let mut sum_sq = vec![0.0; d];
    for (pa, pb) in reference.populations.iter().zip(&other.populations) {
        for i in 0..d {
            let diff = (pa[i] - pb[i]).abs();
            max_abs[i] = f64::max(max_abs[i], diff);
            sum_sq[i] += diff * diff;
        }
    }
    let rabi_relative = match (reference.rabi, other.rabi) {
        (Some(a), Some(b)) if a != 0.0 => Some((b - a) / a),
        _ => None,
    };
    Ok(ComparisonReport {
        labels: reference.labels.clone(),
        max_abs,
        rms: sum_sq.into_iter().map(|s| (s / len).sqrt()).collect(),
        rabi_relative,
    })
}
