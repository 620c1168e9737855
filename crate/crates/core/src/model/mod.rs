//! Interaction-picture Hamiltonians of laser-driven level ladders and their
//! split into a relevant sector (`omega`), an irrelevant sector (`delta`) and
//! the coupling between them.

mod scenarios;

pub use scenarios::{
    compensating_detuning, scenario_four_level, scenario_lambda, scenario_rydberg_pair, scenario_two_atom, Preset, Scenario,
};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::numkernel::{check_hermitian, ensure_invertible, herm_eig, ComplexMatrix, HermitianEig};

/// Lab-frame description of a cascade of `d` levels, neighbours coupled by lasers.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLadder {
    level_energies: Vec<f64>,
    laser_frequencies: Vec<f64>,
    rabi_frequencies: Vec<f64>,
}

impl LevelLadder {
    pub fn new(level_energies: Vec<f64>, laser_frequencies: Vec<f64>, rabi_frequencies: Vec<f64>) -> Result<Self> {
        let d = level_energies.len();
        if d < 2 {
            return Err(Error::InvalidLadder(format!("need at least two levels, got {d}")));
        }
        if laser_frequencies.len() != d - 1 || rabi_frequencies.len() != d - 1 {
            return Err(Error::InvalidLadder(format!(
                "{d} levels need {} laser and Rabi frequencies, got {} and {}",
                d - 1,
                laser_frequencies.len(),
                rabi_frequencies.len()
            )));
        }
        if level_energies.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidLadder("level energies must be finite".into()));
        }
        if let Some(i) = laser_frequencies.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidLadder(format!("laser frequency {i} must be positive")));
        }
        if let Some(i) = rabi_frequencies.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidLadder(format!("Rabi frequency {i} must be positive")));
        }
        Ok(Self { level_energies, laser_frequencies, rabi_frequencies })
    }

    pub fn dim(&self) -> usize {
        self.level_energies.len()
    }

    pub fn level_energies(&self) -> &[f64] {
        &self.level_energies
    }

    pub fn laser_frequencies(&self) -> &[f64] {
        &self.laser_frequencies
    }

    pub fn rabi_frequencies(&self) -> &[f64] {
        &self.rabi_frequencies
    }
}

/// Photon directions `q_i = +-1` and laser detunings of each transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Detunings {
    pub q: Vec<i8>,
    pub detunings: Vec<f64>,
}

pub fn detunings_from_lab(ladder: &LevelLadder) -> Result<Detunings> {
    let w = &ladder.level_energies;
    let mut q = Vec::with_capacity(w.len() - 1);
    let mut detunings = Vec::with_capacity(w.len() - 1);
    for (i, &laser) in ladder.laser_frequencies.iter().enumerate() {
        let gap = w[i + 1] - w[i];
        if gap == 0.0 {
            return Err(Error::DegenerateAdjacentLevels { index: i });
        }
        let qi: i8 = if gap > 0.0 { 1 } else { -1 };
        q.push(qi);
        detunings.push(f64::from(qi) * gap - laser);
    }
    Ok(Detunings { q, detunings })
}

/// Tridiagonal interaction-picture Hamiltonian of the ladder: diagonal entry k
/// is the accumulated signed detuning `sum_{i<k} q_i Delta_i`, neighbours are
/// coupled by `Omega_i / 2`.
pub fn build_cascade(ladder: &LevelLadder) -> Result<ComplexMatrix> {
    let det = detunings_from_lab(ladder)?;
    let d = ladder.dim();
    let mut diag = vec![0.0; d];
    for k in 1..d {
        diag[k] = diag[k - 1] + f64::from(det.q[k - 1]) * det.detunings[k - 1];
    }
    let mut h = ComplexMatrix::from_real_diagonal(&diag);
    for (i, &rabi) in ladder.rabi_frequencies.iter().enumerate() {
        h[(i, i + 1)].re = 0.5 * rabi;
        h[(i + 1, i)].re = 0.5 * rabi;
    }
    Ok(h)
}

/// Moves to another time-independent picture: `h + shift * 1`.
pub fn shift_picture(h: &ComplexMatrix, shift: f64) -> ComplexMatrix {
    h.add_scalar_identity(shift)
}

/// Which states are kept and in what order the others are eliminated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub relevant: Vec<usize>,
    /// Elimination stages, applied in order. A single stage is one-shot elimination.
    pub stages: Vec<Vec<usize>>,
}

impl PartitionPlan {
    pub fn new(relevant: Vec<usize>, stages: Vec<Vec<usize>>) -> Self {
        Self { relevant, stages }
    }

    pub fn one_shot(relevant: Vec<usize>, irrelevant: Vec<usize>) -> Self {
        Self { relevant, stages: vec![irrelevant] }
    }

    /// All eliminated indices, stage by stage.
    pub fn irrelevant(&self) -> Vec<usize> {
        self.stages.iter().flatten().copied().collect()
    }

    /// Same relevant set with every stage merged into one.
    pub fn merged(&self) -> Self {
        Self::one_shot(self.relevant.clone(), self.irrelevant())
    }

    /// Relevant indices followed by the irrelevant ones in stage order.
    pub fn ordering(&self) -> Vec<usize> {
        self.relevant.iter().copied().chain(self.irrelevant()).collect()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.relevant.is_empty() {
            return Err(Error::IndexError("relevant set is empty".into()));
        }
        if self.stages.is_empty() || self.stages.iter().any(Vec::is_empty) {
            return Err(Error::IndexError("every elimination stage must contain at least one state".into()));
        }
        let mut seen = BTreeSet::new();
        for &i in self.relevant.iter().chain(self.stages.iter().flatten()) {
            if i >= dim {
                return Err(Error::IndexError(format!("index {i} out of range for dimension {dim}")));
            }
            if !seen.insert(i) {
                return Err(Error::IndexError(format!("index {i} appears more than once")));
            }
        }
        if seen.len() != dim {
            let missing: Vec<usize> = (0..dim).filter(|i| !seen.contains(i)).collect();
            return Err(Error::IndexError(format!("states {missing:?} are neither relevant nor eliminated")));
        }
        Ok(())
    }
}

/// `H = [[omega, coupling/2], [coupling^dagger/2, delta]]`.
///
/// `coupling` holds the full Rabi matrix, not its half, so effective
/// Hamiltonian formulas can be written with their usual factors of 4.
#[derive(Debug, Clone)]
pub struct BlockHamiltonian {
    omega: ComplexMatrix,
    coupling: ComplexMatrix,
    delta: ComplexMatrix,
    delta_eig: HermitianEig,
    relevant_labels: Vec<String>,
    irrelevant_labels: Vec<String>,
    /// Original basis index of each block position (relevant first).
    permutation: Vec<usize>,
}

impl BlockHamiltonian {
    pub fn new(
        omega: ComplexMatrix,
        coupling: ComplexMatrix,
        delta: ComplexMatrix,
        relevant_labels: Vec<String>,
        irrelevant_labels: Vec<String>,
    ) -> Result<Self> {
        let d = omega.rows() + delta.rows();
        Self::with_permutation(omega, coupling, delta, relevant_labels, irrelevant_labels, (0..d).collect())
    }

    /// Unlabelled block; states are named `r0.., i0..`.
    pub fn unlabeled(omega: ComplexMatrix, coupling: ComplexMatrix, delta: ComplexMatrix) -> Result<Self> {
        let rel = (0..omega.rows()).map(|i| format!("r{i}")).collect();
        let irr = (0..delta.rows()).map(|i| format!("i{i}")).collect();
        Self::new(omega, coupling, delta, rel, irr)
    }

    pub(crate) fn with_permutation(
        omega: ComplexMatrix,
        coupling: ComplexMatrix,
        delta: ComplexMatrix,
        relevant_labels: Vec<String>,
        irrelevant_labels: Vec<String>,
        permutation: Vec<usize>,
    ) -> Result<Self> {
        let (m, n) = (omega.rows(), delta.rows());
        if m == 0 || n == 0 {
            return Err(Error::IndexError(format!("both sectors must be non-empty (m = {m}, n = {n})")));
        }
        check_hermitian(&omega)?;
        check_hermitian(&delta)?;
        if coupling.rows() != m || coupling.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "coupling is {}x{}, expected {m}x{n}",
                coupling.rows(),
                coupling.cols()
            )));
        }
        if relevant_labels.len() != m || irrelevant_labels.len() != n {
            return Err(Error::DimensionMismatch("label count does not match block sizes".into()));
        }
        let mut names = BTreeSet::new();
        for l in relevant_labels.iter().chain(&irrelevant_labels) {
            if !names.insert(l.as_str()) {
                return Err(Error::IndexError(format!("label {l:?} used twice")));
            }
        }
        if permutation.len() != m + n {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let delta_eig = herm_eig(&delta)?;
        ensure_invertible(&delta_eig)?;
        Ok(Self { omega, coupling, delta, delta_eig, relevant_labels, irrelevant_labels, permutation })
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn coupling(&self) -> &ComplexMatrix {
        &self.coupling
    }

    pub fn delta(&self) -> &ComplexMatrix {
        &self.delta
    }

    pub fn delta_eig(&self) -> &HermitianEig {
        &self.delta_eig
    }

    pub fn relevant_labels(&self) -> &[String] {
        &self.relevant_labels
    }

    pub fn irrelevant_labels(&self) -> &[String] {
        &self.irrelevant_labels
    }

    /// Number of relevant states.
    pub fn m(&self) -> usize {
        self.omega.rows()
    }

    /// Number of irrelevant states.
    pub fn n(&self) -> usize {
        self.delta.rows()
    }

    pub fn dim(&self) -> usize {
        self.m() + self.n()
    }

    /// Original-basis index for each block position, relevant states first.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn relevant_indices(&self) -> &[usize] {
        &self.permutation[..self.m()]
    }

    pub fn irrelevant_indices(&self) -> &[usize] {
        &self.permutation[self.m()..]
    }

    /// `[[omega, coupling/2], [coupling^dagger/2, delta]]` in block order.
    pub fn assemble(&self) -> ComplexMatrix {
        let half = self.coupling.scale(0.5);
        ComplexMatrix::from_blocks(&self.omega, &half, &half.adjoint(), &self.delta)
            .expect("block shapes validated on construction")
    }

    /// The same physics in the picture shifted by `shift`: omega and delta both move.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        if shift == 0.0 {
            return Ok(self.clone());
        }
        Self::with_permutation(
            self.omega.add_scalar_identity(shift),
            self.coupling.clone(),
            self.delta.add_scalar_identity(shift),
            self.relevant_labels.clone(),
            self.irrelevant_labels.clone(),
            self.permutation.clone(),
        )
    }
}

/// Splits `h` according to `plan`. The irrelevant sector is ordered stage by stage.
pub fn partition(h: &ComplexMatrix, plan: &PartitionPlan, labels: &[String]) -> Result<BlockHamiltonian> {
    check_hermitian(h)?;
    let d = h.rows();
    if labels.len() != d {
        return Err(Error::DimensionMismatch(format!("{} labels for dimension {d}", labels.len())));
    }
    plan.validate(d)?;
    let rel = &plan.relevant;
    let irr = plan.irrelevant();
    BlockHamiltonian::with_permutation(
        h.select(rel, rel),
        h.select(rel, &irr).scale(2.0),
        h.select(&irr, &irr),
        rel.iter().map(|&i| labels[i].clone()).collect(),
        irr.iter().map(|&i| labels[i].clone()).collect(),
        plan.ordering(),
    )
}

pub(crate) fn index_labels(d: usize) -> Vec<String> {
    (0..d).map(|i| i.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::C64;

    #[test]
    fn two_level_detuning() {
        let ladder = LevelLadder::new(vec![0.0, 10.0], vec![9.0], vec![0.4]).unwrap();
        let det = detunings_from_lab(&ladder).unwrap();
        assert_eq!(det.q, vec![1]);
        assert_eq!(det.detunings, vec![1.0]);
    }

    #[test]
    fn emission_step_detuning() {
        let ladder = LevelLadder::new(vec![0.0, 10.0, 3.0], vec![9.0, 6.9], vec![0.4, 0.3]).unwrap();
        let det = detunings_from_lab(&ladder).unwrap();
        assert_eq!(det.q, vec![1, -1]);
        assert_eq!(det.detunings[0], 1.0);
        assert!((det.detunings[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn resonant_and_degenerate() {
        let ladder = LevelLadder::new(vec![0.0, 10.0], vec![10.0], vec![0.4]).unwrap();
        assert_eq!(detunings_from_lab(&ladder).unwrap().detunings, vec![0.0]);
        let flat = LevelLadder::new(vec![1.0, 1.0], vec![1.0], vec![0.4]).unwrap();
        assert_eq!(detunings_from_lab(&flat), Err(Error::DegenerateAdjacentLevels { index: 0 }));
    }

    #[test]
    fn ladder_validation() {
        assert!(LevelLadder::new(vec![0.0], vec![], vec![]).is_err());
        assert!(LevelLadder::new(vec![0.0, 1.0], vec![0.5], vec![0.0]).is_err());
        assert!(LevelLadder::new(vec![0.0, 1.0], vec![-0.5], vec![0.1]).is_err());
        assert!(LevelLadder::new(vec![0.0, 1.0], vec![0.5, 0.5], vec![0.1]).is_err());
    }

    #[test]
    fn smallest_cascade() {
        let ladder = LevelLadder::new(vec![0.0, 10.0], vec![9.0], vec![0.4]).unwrap();
        let h = build_cascade(&ladder).unwrap();
        assert_eq!(h, ComplexMatrix::from_real_rows(&[&[0.0, 0.2], &[0.2, 1.0]]));
    }

    #[test]
    fn lambda_cascade_diagonal() {
        // g at 0, e at 10, t at 0.5; Delta_0 = 1, Delta_1 = 1 - delta
        let (big, small) = (1.0, 0.05);
        let (wg, we, wt) = (0.0, 10.0, 0.5);
        let ladder = LevelLadder::new(vec![wg, we, wt], vec![we - wg - big, (we - wt) - (big - small)], vec![0.4, 0.3]).unwrap();
        let h = build_cascade(&ladder).unwrap();
        let diag: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        assert!((diag[0]).abs() < 1e-14);
        assert!((diag[1] - big).abs() < 1e-12);
        assert!((diag[2] - small).abs() < 1e-12);
    }

    #[test]
    fn four_level_cascade_is_tridiagonal() {
        let ladder = LevelLadder::new(vec![0.0, 11.0, 20.0, 32.0], vec![10.0, 9.5, 12.25], vec![0.4, 0.3, 0.4]).unwrap();
        let h = build_cascade(&ladder).unwrap();
        let det = detunings_from_lab(&ladder).unwrap().detunings;
        let expect = [0.0, det[0], det[0] + det[1], det[0] + det[1] + det[2]];
        for (k, e) in expect.iter().enumerate() {
            assert!((h[(k, k)].re - e).abs() < 1e-12);
        }
        for i in 0..4usize {
            for j in 0..4 {
                if i.abs_diff(j) > 1 {
                    assert_eq!(h[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(h[(2, 3)].re, 0.2);
    }

    #[test]
    fn shift_cases() {
        let h = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.05]);
        assert_eq!(shift_picture(&h, 0.0), h);
        let s = shift_picture(&h, -0.025);
        let d: Vec<f64> = s.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![-0.025, 0.975, 0.025]);
    }

    #[test]
    fn plan_validation() {
        assert!(PartitionPlan::new(vec![0, 1], vec![vec![2]]).validate(3).is_ok());
        assert!(PartitionPlan::new(vec![0, 1, 2], vec![]).validate(3).is_err());
        assert!(PartitionPlan::new(vec![0, 1], vec![vec![1, 2]]).validate(3).is_err());
        assert!(PartitionPlan::new(vec![0], vec![vec![2]]).validate(3).is_err());
        assert!(PartitionPlan::new(vec![0, 1], vec![vec![3]]).validate(3).is_err());
        assert!(PartitionPlan::new(vec![0], vec![vec![1], vec![]]).validate(2).is_err());
    }

    #[test]
    fn partition_all_relevant_fails() {
        let h = ComplexMatrix::identity(2);
        let plan = PartitionPlan::new(vec![0, 1], vec![]);
        assert!(matches!(partition(&h, &plan, &index_labels(2)), Err(Error::IndexError(_))));
    }

    #[test]
    fn partition_singular_delta() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 0.1], &[0.1, 0.0]]);
        let plan = PartitionPlan::one_shot(vec![0], vec![1]);
        assert!(matches!(partition(&h, &plan, &index_labels(2)), Err(Error::SingularBlock { .. })));
    }
}
