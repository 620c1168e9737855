//! Choice of the scalar interaction-picture shift.
//!
//! Adding `shift * 1` to the interaction Hamiltonian does not change the exact
//! dynamics but does change every effective Hamiltonian built from it. The
//! shift is picked by one of three rules: make `omega` traceless, or minimize
//! the operator or trace norm of the shifted effective Hamiltonian.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::elimination::{compose_elimination, effective, EffectiveModel, Order};
use crate::error::{Error, Result};
use crate::model::{partition, shift_picture, BlockHamiltonian, PartitionPlan};
use crate::numkernel::{herm_eig, norms_of_spectrum, singular_op_norm, ComplexMatrix, SpectralNorms};

/// Uniform samples in the coarse scan.
pub const SCAN_SAMPLES: usize = 2001;
/// Golden-section stopping width, relative to the search half-width B.
pub const REFINE_REL_WIDTH: f64 = 1e-10;
/// Shifts closer than this (relative to |Delta|_op) to an eigenvalue of -Delta are skipped.
pub const SINGULAR_SHIFT_REL: f64 = 1e-8;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionKind {
    /// (a) trace of the shifted `omega` vanishes.
    TraceZero,
    /// (b) operator norm of the shifted effective Hamiltonian is minimal.
    MinOpNorm,
    /// (c) trace norm of the shifted effective Hamiltonian is minimal.
    MinTraceNorm,
    Fixed(f64),
}

/// How the picture shift is selected, and which order the norm rules look at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PictureCondition {
    pub kind: ConditionKind,
    pub order: Order,
}

impl PictureCondition {
    pub fn new(kind: ConditionKind) -> Self {
        Self { kind, order: Order::M0 }
    }

    pub fn with_order(kind: ConditionKind, order: Order) -> Self {
        Self { kind, order }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionKind::TraceZero => f.write_str("a"),
            ConditionKind::MinOpNorm => f.write_str("b"),
            ConditionKind::MinTraceNorm => f.write_str("c"),
            ConditionKind::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

impl FromStr for ConditionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "a" => Ok(ConditionKind::TraceZero),
            "b" => Ok(ConditionKind::MinOpNorm),
            "c" => Ok(ConditionKind::MinTraceNorm),
            other => {
                let value = other
                    .strip_prefix("fixed:")
                    .ok_or_else(|| format!("unknown picture condition {other:?} (expected a, b, c or fixed:<value>)"))?;
                let v: f64 = value.trim().parse().map_err(|_| format!("bad fixed shift {value:?}"))?;
                if !v.is_finite() {
                    return Err("fixed shift must be finite".into());
                }
                Ok(ConditionKind::Fixed(v))
            }
        }
    }
}

/// Which norm a minimization rule targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Op,
    Trace,
}

/// Effective model of `order` in the picture shifted by `shift`.
pub fn shifted_effective(block: &BlockHamiltonian, shift: f64, order: Order) -> Result<EffectiveModel> {
    let shifted = block.shifted(shift)?;
    Ok(effective(&shifted, order)?.with_shift(shift))
}

/// Multi-step elimination in the picture shifted by `shift`.
pub fn shifted_composed(
    h: &ComplexMatrix,
    labels: &[String],
    plan: &PartitionPlan,
    orders: &[Order],
    shift: f64,
) -> Result<EffectiveModel> {
    Ok(compose_elimination(&shift_picture(h, shift), labels, plan, orders)?.with_shift(shift))
}

/// Rule (a): the shift that makes `omega` traceless.
pub fn shift_condition_a(block: &BlockHamiltonian) -> f64 {
    // `+ 0.0` turns a negative zero into zero for reporting.
    -block.omega().trace().re / block.m() as f64 + 0.0
}

/// Half-width of the shift search interval, `2 (|omega|_op + |Delta|_op + |Omega|_op)`.
pub fn search_bound(block: &BlockHamiltonian) -> Result<f64> {
    let omega = herm_eig(block.omega())?.op_norm();
    let delta = block.delta_eig().op_norm();
    let coupling = singular_op_norm(block.coupling())?;
    Ok(2.0 * (omega + delta + coupling))
}

fn is_singular_shift(block: &BlockHamiltonian, shift: f64) -> bool {
    let eig = block.delta_eig();
    let floor = SINGULAR_SHIFT_REL * eig.op_norm();
    eig.values.iter().any(|l| (l + shift).abs() < floor)
}

fn spectrum_norms(model: &EffectiveModel) -> Option<SpectralNorms> {
    herm_eig(model.hermitian_form()).ok().map(|e| norms_of_spectrum(&e.values))
}

/// Rules (b)/(c): scans `[-B, B]` and refines the best sample by golden section.
pub fn shift_minimize(block: &BlockHamiltonian, norm: NormKind, order: Order) -> Result<f64> {
    let bound = search_bound(block)?;
    minimize_shift(
        |w| {
            if is_singular_shift(block, w) {
                return None;
            }
            shifted_effective(block, w, order).ok().as_ref().and_then(spectrum_norms)
        },
        norm,
        bound,
    )
}

/// Same as [`shift_minimize`] for a multi-step elimination of the full matrix.
pub fn shift_minimize_composed(
    h: &ComplexMatrix,
    labels: &[String],
    plan: &PartitionPlan,
    orders: &[Order],
    norm: NormKind,
) -> Result<f64> {
    let merged = partition(h, &plan.merged(), labels)?;
    let bound = search_bound(&merged)?;
    minimize_shift(
        |w| {
            if is_singular_shift(&merged, w) {
                return None;
            }
            shifted_composed(h, labels, plan, orders, w).ok().as_ref().and_then(spectrum_norms)
        },
        norm,
        bound,
    )
}

/// Resolves a condition to a concrete shift for a one-shot block.
pub fn select_shift(block: &BlockHamiltonian, condition: PictureCondition) -> Result<f64> {
    match condition.kind {
        ConditionKind::TraceZero => Ok(shift_condition_a(block)),
        ConditionKind::MinOpNorm => shift_minimize(block, NormKind::Op, condition.order),
        ConditionKind::MinTraceNorm => shift_minimize(block, NormKind::Trace, condition.order),
        ConditionKind::Fixed(w) => Ok(w),
    }
}

/// Resolves `kind` for a (possibly multi-step) plan and builds the shifted
/// effective model. Norm rules look at the order of the last step.
pub fn effective_for_plan(
    h: &ComplexMatrix,
    labels: &[String],
    plan: &PartitionPlan,
    orders: &[Order],
    kind: ConditionKind,
) -> Result<EffectiveModel> {
    let shift = match kind {
        ConditionKind::Fixed(w) => w,
        ConditionKind::TraceZero => shift_condition_a(&partition(h, &plan.merged(), labels)?),
        ConditionKind::MinOpNorm | ConditionKind::MinTraceNorm => {
            let norm = if kind == ConditionKind::MinOpNorm { NormKind::Op } else { NormKind::Trace };
            if plan.stages.len() == 1 {
                let order = *orders.first().ok_or(Error::DimensionMismatch("no stage orders".into()))?;
                shift_minimize(&partition(h, plan, labels)?, norm, order)?
            } else {
                shift_minimize_composed(h, labels, plan, orders, norm)?
            }
        }
    };
    shifted_composed(h, labels, plan, orders, shift)
}

#[derive(Debug, Clone, Copy)]
struct Score {
    primary: f64,
    secondary: f64,
    shift: f64,
}

impl Score {
    fn new(norms: Option<SpectralNorms>, kind: NormKind, shift: f64) -> Self {
        match norms {
            None => Score { primary: f64::INFINITY, secondary: f64::INFINITY, shift },
            Some(n) => match kind {
                NormKind::Op => Score { primary: n.op, secondary: n.trace, shift },
                NormKind::Trace => Score { primary: n.trace, secondary: n.op, shift },
            },
        }
    }

    fn is_valid(&self) -> bool {
        self.primary.is_finite()
    }

    /// Lexicographic: the target norm, then the other norm on ties (this
    /// centres the shift on flat stretches), then the smaller |shift|.
    fn cmp(&self, other: &Score, tol: f64) -> Ordering {
        if (self.primary - other.primary).abs() > tol || !self.is_valid() || !other.is_valid() {
            return self.primary.total_cmp(&other.primary);
        }
        if (self.secondary - other.secondary).abs() > tol {
            return self.secondary.total_cmp(&other.secondary);
        }
        self.shift.abs().total_cmp(&other.shift.abs())
    }
}

/// Minimizes a possibly non-smooth norm objective of the shift over `[-bound, bound]`.
///
/// `objective` returns `None` for excluded (singular) shifts. Scan points are
/// evaluated in parallel; the result does not depend on scheduling.
pub fn minimize_shift<F>(objective: F, norm: NormKind, bound: f64) -> Result<f64>
where
    F: Fn(f64) -> Option<SpectralNorms> + Sync,
{
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::SearchFailed);
    }
    let step = 2.0 * bound / (SCAN_SAMPLES - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_SAMPLES).map(|i| -bound + step * i as f64).collect();
    let scores: Vec<Score> = xs.par_iter().map(|&x| Score::new(objective(x), norm, x)).collect();

    let tol = 1e-12 * bound;
    let best = (0..scores.len())
        .filter(|&i| scores[i].is_valid())
        .min_by(|&i, &j| scores[i].cmp(&scores[j], tol))
        .ok_or(Error::SearchFailed)?;

    let lo = if best > 0 && scores[best - 1].is_valid() { xs[best - 1] } else { xs[best] };
    let hi = if best + 1 < xs.len() && scores[best + 1].is_valid() { xs[best + 1] } else { xs[best] };
    let eval = |x: f64| Score::new(objective(x), norm, x);

    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while b - a > REFINE_REL_WIDTH * bound {
        if fc.cmp(&fd, tol) != Ordering::Greater {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(d);
        }
    }
    let refined = eval(0.5 * (a + b));
    let winner = [refined, fc, fd, scores[best]]
        .into_iter()
        .filter(Score::is_valid)
        .min_by(|p, q| p.cmp(q, tol))
        .expect("best sample is valid");
    Ok(winner.shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{partition, scenario_lambda};

    fn lambda_block(o0: f64, o1: f64, det: f64) -> BlockHamiltonian {
        let s = scenario_lambda(o0, o1, 1.0, det).unwrap();
        partition(&s.matrix, &s.plan, &s.labels).unwrap()
    }

    fn spacing(model: &EffectiveModel) -> f64 {
        let e = herm_eig(model.hermitian_form()).unwrap();
        e.values[1] - e.values[0]
    }

    #[test]
    fn zero_shift_is_identity_operation() {
        let block = lambda_block(0.4, 0.3, -0.0175);
        for order in [Order::M0, Order::M1, Order::M1D] {
            let a = shifted_effective(&block, 0.0, order).unwrap();
            let b = effective(&block, order).unwrap();
            assert_eq!(a.h_eff(), b.h_eff());
        }
    }

    #[test]
    fn op_norm_closed_form_shift() {
        let o: f64 = 0.4;
        let x = 2.0 * o * o / 4.0;
        let w = ((1.0 + 2.0 * x).sqrt() - 1.0) / 2.0;
        let model = shifted_effective(&lambda_block(o, o, 0.0), w, Order::M0).unwrap();
        assert!((spacing(&model) - ((1.0 + 2.0 * x).sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn singular_shift_is_rejected() {
        let err = shifted_effective(&lambda_block(0.4, 0.3, 0.0), -1.0, Order::M0).unwrap_err();
        assert!(matches!(err, Error::SingularBlock { .. }));
    }

    #[test]
    fn condition_a_cases() {
        assert_eq!(shift_condition_a(&lambda_block(0.4, 0.3, -0.0175)), 0.0);
        let raw = BlockHamiltonian::unlabeled(
            ComplexMatrix::from_real_diagonal(&[0.0, 0.05]),
            ComplexMatrix::from_real_rows(&[&[0.4], &[0.3]]),
            ComplexMatrix::from_real_rows(&[&[1.0]]),
        )
        .unwrap();
        assert!((shift_condition_a(&raw) + 0.025).abs() < 1e-16);
        let scalar = BlockHamiltonian::unlabeled(
            ComplexMatrix::identity(3).scale(0.7),
            ComplexMatrix::zeros(3, 1),
            ComplexMatrix::from_real_rows(&[&[1.0]]),
        )
        .unwrap();
        assert!((shift_condition_a(&scalar) + 0.7).abs() < 1e-15);
    }

    #[test]
    fn minimized_shifts_lambda() {
        let o: f64 = 0.4;
        let x = 2.0 * o * o / 4.0;
        let block = lambda_block(o, o, 0.0);
        let wb = shift_minimize(&block, NormKind::Op, Order::M0).unwrap();
        assert!((wb - ((1.0 + 2.0 * x).sqrt() - 1.0) / 2.0).abs() < 1e-8);
        let wc = shift_minimize(&block, NormKind::Trace, Order::M0).unwrap();
        let sc = spacing(&shifted_effective(&block, wc, Order::M0).unwrap());
        assert!((sc - ((1.0 + 4.0 * x).sqrt() - 1.0) / 2.0).abs() < 1e-8);
    }

    #[test]
    fn uncoupled_block_centres_the_spectrum() {
        let det = 0.05;
        let block = BlockHamiltonian::unlabeled(
            ComplexMatrix::from_real_diagonal(&[0.0, det]),
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::from_real_rows(&[&[1.0]]),
        )
        .unwrap();
        for norm in [NormKind::Op, NormKind::Trace] {
            let w = shift_minimize(&block, norm, Order::M0).unwrap();
            assert!((w + det / 2.0).abs() < 1e-8, "{norm:?}: {w}");
        }
    }

    #[test]
    fn parse_conditions() {
        assert_eq!("a".parse::<ConditionKind>().unwrap(), ConditionKind::TraceZero);
        assert_eq!("fixed:-0.5".parse::<ConditionKind>().unwrap(), ConditionKind::Fixed(-0.5));
        assert!("d".parse::<ConditionKind>().is_err());
        assert!("fixed:nan".parse::<ConditionKind>().is_err());
    }

    #[test]
    fn all_singular_fails() {
        let r = minimize_shift(|_| None, NormKind::Op, 1.0);
        assert_eq!(r, Err(Error::SearchFailed));
    }
}
