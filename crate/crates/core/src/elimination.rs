//! Effective Hamiltonians for the relevant sector.
//!
//! Zeroth order (adiabatic elimination):
//!     H0 = omega - Omega (4 Delta)^-1 Omega^dagger
//! First order, with metric M = 1 + Omega (4 Delta^2)^-1 Omega^dagger:
//!     H1  = M^-1 H0              (Hermitian for the inner product psi^dagger M psi)
//!     H1' = M^-1/2 H0 M^-1/2     (Hermitian, acts on psi' = M^+1/2 psi)
//!
//! Functions of `Delta` go through its eigendecomposition, so coupled
//! irrelevant sectors are handled exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{BlockHamiltonian, PartitionPlan};
use crate::numkernel::{check_hermitian, herm_inv_sqrt, herm_inverse, ComplexMatrix, C64};

/// Level of the Markov hierarchy (and, at first order, the representation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    /// Zeroth order: standard adiabatic elimination.
    M0,
    /// First order, metric representation.
    M1,
    /// First order, dressed (Hermitian) representation.
    M1D,
}

impl Order {
    pub fn name(self) -> &'static str {
        match self {
            Order::M0 => "markov0",
            Order::M1 => "markov1",
            Order::M1D => "markov1d",
        }
    }

    /// Maps a hierarchy level to an order. Only levels 0 and 1 exist here.
    pub fn from_level(level: u32, dressed: bool) -> Result<Self> {
        match (level, dressed) {
            (0, false) => Ok(Order::M0),
            (1, false) => Ok(Order::M1),
            (1, true) => Ok(Order::M1D),
            (0, true) => Err(Error::UnsupportedOrder("the zeroth order has no dressed form".into())),
            (k, _) => Err(Error::UnsupportedOrder(format!(
                "Markov order {k} is not implemented; only orders 0 and 1 have closed-form effective Hamiltonians"
            ))),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov0" | "m0" => Ok(Order::M0),
            "markov1" | "m1" => Ok(Order::M1),
            "markov1d" | "m1d" => Ok(Order::M1D),
            other => {
                let level = other.strip_prefix("markov").and_then(|rest| rest.trim_end_matches('d').parse::<u32>().ok());
                match level {
                    Some(k) => Order::from_level(k, other.ends_with('d')),
                    None => Err(Error::UnsupportedOrder(format!("unknown order {other:?}"))),
                }
            }
        }
    }
}

/// Effective Hamiltonian of some order over the relevant states, together
/// with what is needed to rebuild the irrelevant amplitudes.
#[derive(Debug, Clone)]
pub struct EffectiveModel {
    order: Order,
    h_eff: ComplexMatrix,
    metric: ComplexMatrix,
    dressing: ComplexMatrix,
    hermitian_form: ComplexMatrix,
    stages: Vec<BlockHamiltonian>,
    stage_orders: Vec<Order>,
    shift: f64,
}

impl EffectiveModel {
    pub fn order(&self) -> Order {
        self.order
    }

    pub fn h_eff(&self) -> &ComplexMatrix {
        &self.h_eff
    }

    /// Identity at zeroth order.
    pub fn metric(&self) -> &ComplexMatrix {
        &self.metric
    }

    /// `M^{+1/2}` for the dressed form, identity otherwise.
    pub fn dressing(&self) -> &ComplexMatrix {
        &self.dressing
    }

    /// A Hermitian matrix with the spectrum of `h_eff`. For `M1` this is the
    /// dressed form; for the other orders it is `h_eff` itself.
    pub fn hermitian_form(&self) -> &ComplexMatrix {
        &self.hermitian_form
    }

    /// The block of the last elimination step.
    pub fn source(&self) -> &BlockHamiltonian {
        self.stages.last().expect("at least one stage")
    }

    /// Every elimination step in the order it was applied.
    pub fn stages(&self) -> &[BlockHamiltonian] {
        &self.stages
    }

    pub fn stage_orders(&self) -> &[Order] {
        &self.stage_orders
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn m(&self) -> usize {
        self.h_eff.rows()
    }

    /// Original-basis indices of the relevant states, in `h_eff` order.
    pub fn relevant_indices(&self) -> &[usize] {
        self.source().relevant_indices()
    }

    /// Dimension of the full problem before elimination.
    pub fn full_dim(&self) -> usize {
        self.stages[0].dim()
    }

    /// Labels of the full problem in original basis order.
    pub fn full_labels(&self) -> Vec<String> {
        let first = &self.stages[0];
        let mut labels = vec![String::new(); first.dim()];
        let names = first.relevant_labels().iter().chain(first.irrelevant_labels());
        for (&idx, name) in first.permutation().iter().zip(names) {
            labels[idx] = name.clone();
        }
        labels
    }

    pub(crate) fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

/// `Omega (4 Delta)^{-1} Omega^dagger`.
fn light_shift_term(block: &BlockHamiltonian) -> ComplexMatrix {
    let inv = block.delta_eig().apply_fn(|l| C64::new(0.25 / l, 0.0));
    let c = block.coupling();
    (&(c * &inv) * &c.adjoint()).hermitian_part()
}

/// `omega - Omega (4 Delta)^{-1} Omega^dagger`, symmetrized.
fn zeroth_order_matrix(block: &BlockHamiltonian) -> ComplexMatrix {
    (block.omega() - &light_shift_term(block)).hermitian_part()
}

/// `1 + Omega (4 Delta^2)^{-1} Omega^dagger`.
pub fn metric(block: &BlockHamiltonian) -> Result<ComplexMatrix> {
    let inv_sq = block.delta_eig().apply_fn(|l| C64::new(0.25 / (l * l), 0.0));
    let c = block.coupling();
    let correction = &(c * &inv_sq) * &c.adjoint();
    Ok(correction.hermitian_part().add_scalar_identity(1.0))
}

/// Adiabatic elimination.
pub fn heff0(block: &BlockHamiltonian) -> Result<EffectiveModel> {
    let h = zeroth_order_matrix(block);
    let m = block.m();
    Ok(EffectiveModel {
        order: Order::M0,
        hermitian_form: h.clone(),
        h_eff: h,
        metric: ComplexMatrix::identity(m),
        dressing: ComplexMatrix::identity(m),
        stages: vec![block.clone()],
        stage_orders: vec![Order::M0],
        shift: 0.0,
    })
}

/// First order in the metric representation, `M^{-1} H0`.
pub fn heff1(block: &BlockHamiltonian) -> Result<EffectiveModel> {
    let h0 = zeroth_order_matrix(block);
    let metric = metric(block)?;
    let roots = herm_inv_sqrt(&metric)?;
    let h_eff = &herm_inverse(&metric)? * &h0;
    let hermitian_form = (&(&roots.inv_sqrt * &h0) * &roots.inv_sqrt).hermitian_part();
    Ok(EffectiveModel {
        order: Order::M1,
        h_eff,
        dressing: ComplexMatrix::identity(block.m()),
        metric,
        hermitian_form,
        stages: vec![block.clone()],
        stage_orders: vec![Order::M1],
        shift: 0.0,
    })
}

/// First order in the dressed representation, `M^{-1/2} H0 M^{-1/2}`.
pub fn heff1_dressed(block: &BlockHamiltonian) -> Result<EffectiveModel> {
    let h0 = zeroth_order_matrix(block);
    let metric = metric(block)?;
    let roots = herm_inv_sqrt(&metric)?;
    let h_eff = (&(&roots.inv_sqrt * &h0) * &roots.inv_sqrt).hermitian_part();
    Ok(EffectiveModel {
        order: Order::M1D,
        hermitian_form: h_eff.clone(),
        h_eff,
        metric,
        dressing: roots.sqrt,
        stages: vec![block.clone()],
        stage_orders: vec![Order::M1D],
        shift: 0.0,
    })
}

pub fn effective(block: &BlockHamiltonian, order: Order) -> Result<EffectiveModel> {
    match order {
        Order::M0 => heff0(block),
        Order::M1 => heff1(block),
        Order::M1D => heff1_dressed(block),
    }
}

/// Zeroth-order estimate of the irrelevant amplitudes, `-(2 Delta)^{-1} Omega^dagger psi`.
pub fn estimate_irrelevant(block: &BlockHamiltonian, psi: &[C64]) -> Result<Vec<C64>> {
    if psi.len() != block.m() {
        return Err(Error::DimensionMismatch(format!(
            "relevant column has {} entries, block has {} relevant states",
            psi.len(),
            block.m()
        )));
    }
    let source = block.coupling().adjoint().mul_vec(psi);
    let eig = block.delta_eig();
    let c = eig.coefficients(&source);
    Ok(eig.synthesize(&c, |l| C64::new(-0.5 / l, 0.0)))
}

/// Eliminates the plan's stages one after another.
///
/// At stage k every state not yet eliminated counts as relevant. Inner
/// stages feed their Hermitian effective Hamiltonian into the next stage
/// (for a first-order inner stage that is the dressed form); the last stage
/// produces the returned model over `plan.relevant`.
pub fn compose_elimination(
    h: &ComplexMatrix,
    labels: &[String],
    plan: &PartitionPlan,
    orders: &[Order],
) -> Result<EffectiveModel> {
    check_hermitian(h)?;
    let d = h.rows();
    if labels.len() != d {
        return Err(Error::DimensionMismatch(format!("{} labels for dimension {d}", labels.len())));
    }
    plan.validate(d)?;
    if orders.len() != plan.stages.len() {
        return Err(Error::DimensionMismatch(format!("{} stage orders for {} stages", orders.len(), plan.stages.len())));
    }

    let mut current_idx = plan.ordering();
    let mut current_h = h.permuted(&current_idx);
    let mut blocks = Vec::with_capacity(plan.stages.len());

    for (k, (stage, &order)) in plan.stages.iter().zip(orders).enumerate() {
        let rel_pos: Vec<usize> = (0..current_idx.len()).filter(|&p| !stage.contains(&current_idx[p])).collect();
        let irr_pos: Vec<usize> =
            stage.iter().map(|s| current_idx.iter().position(|c| c == s).expect("validated plan")).collect();
        let remaining: Vec<usize> = rel_pos.iter().map(|&p| current_idx[p]).collect();
        let permutation: Vec<usize> = remaining.iter().chain(stage.iter()).copied().collect();
        let block = BlockHamiltonian::with_permutation(
            current_h.select(&rel_pos, &rel_pos),
            current_h.select(&rel_pos, &irr_pos).scale(2.0),
            current_h.select(&irr_pos, &irr_pos),
            remaining.iter().map(|&i| labels[i].clone()).collect(),
            stage.iter().map(|&i| labels[i].clone()).collect(),
            permutation,
        )
        .map_err(|e| e.at_stage(k))?;

        let model = effective(&block, order).map_err(|e| e.at_stage(k))?;
        blocks.push(block);
        if k + 1 == plan.stages.len() {
            return Ok(EffectiveModel { stages: blocks, stage_orders: orders.to_vec(), ..model });
        }
        current_h = model.hermitian_form;
        current_idx = remaining;
    }
    unreachable!("plan has at least one stage")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compensating_detuning, partition, scenario_lambda};
    use crate::numkernel::herm_eig;

    fn lambda_block(o0: f64, o1: f64, delta: f64, det: f64) -> BlockHamiltonian {
        let s = scenario_lambda(o0, o1, delta, det).unwrap();
        partition(&s.matrix, &s.plan, &s.labels).unwrap()
    }

    fn gap(m: &ComplexMatrix) -> f64 {
        let e = herm_eig(m).unwrap();
        e.values[1] - e.values[0]
    }

    #[test]
    fn heff0_matches_closed_form() {
        let (o0, o1, dd, det) = (0.37, 0.21, 1.3, 0.02);
        let model = heff0(&lambda_block(o0, o1, dd, det)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            &[-0.5 * (det + o0 * o0 / (2.0 * dd)), -0.5 * o0 * o1 / (2.0 * dd)],
            &[-0.5 * o0 * o1 / (2.0 * dd), -0.5 * (-det + o1 * o1 / (2.0 * dd))],
        ]);
        assert!(model.h_eff().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn heff0_fig3_numbers() {
        let model = heff0(&lambda_block(0.4, 0.3, 1.0, -0.0175)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[-0.03125, -0.03], &[-0.03, -0.03125]]);
        assert!(model.h_eff().max_abs_diff(&expected) < 1e-15);
        assert_eq!(*model.metric(), ComplexMatrix::identity(2));
    }

    #[test]
    fn uncoupled_block_is_untouched() {
        let omega = ComplexMatrix::from_real_diagonal(&[0.1, -0.2]);
        let block =
            BlockHamiltonian::unlabeled(omega.clone(), ComplexMatrix::zeros(2, 1), ComplexMatrix::from_real_rows(&[&[1.0]]))
                .unwrap();
        for order in [Order::M0, Order::M1, Order::M1D] {
            let m = effective(&block, order).unwrap();
            assert_eq!(*m.h_eff(), omega);
            assert_eq!(*m.metric(), ComplexMatrix::identity(2));
            assert_eq!(*m.dressing(), ComplexMatrix::identity(2));
        }
    }

    #[test]
    fn lambda_metric() {
        let m = metric(&lambda_block(0.4, 0.3, 1.0, 0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[1.04, 0.03], &[0.03, 1.0225]]);
        assert!(m.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn first_order_spacing_resonant() {
        for o in [0.1, 0.3, 0.4, 0.6] {
            let x = 2.0 * o * o / 4.0;
            let m1 = heff1(&lambda_block(o, o, 1.0, 0.0)).unwrap();
            let m1d = heff1_dressed(&lambda_block(o, o, 1.0, 0.0)).unwrap();
            assert!((gap(m1.hermitian_form()) - x / (1.0 + x)).abs() < 1e-13);
            assert!((gap(m1d.h_eff()) - x / (1.0 + x)).abs() < 1e-13);
        }
    }

    #[test]
    fn dressed_spacing_fig3_rabi() {
        let m1d = heff1_dressed(&lambda_block(0.4, 0.3, 1.0, 0.0)).unwrap();
        assert!((gap(m1d.h_eff()) - 0.0625 / 1.0625).abs() < 1e-13);
        assert!((gap(m1d.h_eff()) - 0.0588235).abs() < 1e-7);
    }

    #[test]
    fn metric_form_is_hermitian_under_metric() {
        let model = heff1(&lambda_block(0.4, 0.3, 1.0, -0.0175)).unwrap();
        let mh = model.metric() * model.h_eff();
        assert!(mh.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn similarity_between_first_order_forms() {
        let block = lambda_block(0.4, 0.3, 1.0, -0.0175);
        let m1 = heff1(&block).unwrap();
        let m1d = heff1_dressed(&block).unwrap();
        let inv_sqrt = herm_inv_sqrt(m1d.metric()).unwrap().inv_sqrt;
        let similar = &(m1d.dressing() * m1.h_eff()) * &inv_sqrt;
        assert!(similar.max_abs_diff(m1d.h_eff()) <= 1e-10);
    }

    #[test]
    fn irrelevant_estimate() {
        let block = lambda_block(0.4, 0.3, 1.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let eps = estimate_irrelevant(&block, &[one, zero]).unwrap();
        assert!((eps[0] - C64::new(-0.2, 0.0)).norm() < 1e-15);
        assert!((eps[0].norm_sqr() - 0.04).abs() < 1e-15);
        assert_eq!(estimate_irrelevant(&block, &[zero, zero]).unwrap(), vec![zero]);
        assert!(estimate_irrelevant(&block, &[one]).is_err());
    }

    #[test]
    fn epsilon_norm_matches_metric_excess() {
        let block = lambda_block(0.4, 0.3, 1.0, -0.0175);
        let psi = [C64::new(0.6, 0.1), C64::new(-0.2, 0.7)];
        let eps = estimate_irrelevant(&block, &psi).unwrap();
        let lhs: f64 = eps.iter().map(|e| e.norm_sqr()).sum();
        let excess = metric(&block).unwrap().add_scalar_identity(-1.0);
        let mpsi = excess.mul_vec(&psi);
        let rhs: f64 = psi.iter().zip(&mpsi).map(|(a, b)| (a.conj() * b).re).sum();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn single_stage_composition_is_one_shot() {
        let s = scenario_lambda(0.4, 0.3, 1.0, compensating_detuning(0.4, 0.3, 1.0)).unwrap();
        let block = partition(&s.matrix, &s.plan, &s.labels).unwrap();
        for order in [Order::M0, Order::M1, Order::M1D] {
            let direct = effective(&block, order).unwrap();
            let composed = compose_elimination(&s.matrix, &s.labels, &s.plan, &[order]).unwrap();
            assert_eq!(direct.h_eff(), composed.h_eff());
            assert_eq!(composed.full_labels(), s.labels);
        }
    }

    #[test]
    fn order_parsing() {
        assert_eq!("markov1d".parse::<Order>().unwrap(), Order::M1D);
        assert!(matches!("markov2".parse::<Order>(), Err(Error::UnsupportedOrder(_))));
        assert!(matches!(Order::from_level(3, false), Err(Error::UnsupportedOrder(_))));
        assert!(matches!("exact".parse::<Order>(), Err(Error::UnsupportedOrder(_))));
    }

    #[test]
    fn stage_errors_are_annotated() {
        // The second stage's block [[0]] is singular.
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.1], &[0.0, 0.0, 0.0], &[0.1, 0.0, 1.0]]);
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let plan = PartitionPlan::new(vec![0], vec![vec![2], vec![1]]);
        let err = compose_elimination(&h, &labels, &plan, &[Order::M0, Order::M0]).unwrap_err();
        assert!(matches!(err, Error::AtStage { stage: 1, .. }), "{err:?}");
        assert!(matches!(err.root(), Error::SingularBlock { .. }));
    }
}
