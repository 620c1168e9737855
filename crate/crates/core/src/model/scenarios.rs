//! Ready-made interaction-picture Hamiltonians for the standard examples:
//! a Raman Lambda system, a three-photon four-level ladder, a Rydberg-blockaded
//! atom pair and a pair of unblockaded three-level atoms.

use std::f64::consts::SQRT_2;

use super::{index_labels, partition, PartitionPlan};
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;

/// A full Hamiltonian with basis labels and its default relevant/irrelevant split.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub matrix: ComplexMatrix,
    pub labels: Vec<String>,
    pub plan: PartitionPlan,
    /// Alternative split where the preset has one (multi-step elimination).
    pub alt_plan: Option<PartitionPlan>,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn checked(self) -> Result<Self> {
        partition(&self.matrix, &self.plan, &self.labels)?;
        if let Some(alt) = &self.alt_plan {
            alt.validate(self.dim())?;
        }
        Ok(self)
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Raman Lambda system in the basis (g, t, e), relevant {g, t}.
///
/// `delta` is the mean detuning of the intermediate state, `detuning` the
/// two-photon detuning; the picture is the symmetric one with g and t at
/// `-detuning/2` and `+detuning/2`.
pub fn scenario_lambda(omega0: f64, omega1: f64, delta: f64, detuning: f64) -> Result<Scenario> {
    if delta == 0.0 {
        return Err(Error::InvalidLadder("intermediate-state detuning must be nonzero".into()));
    }
    let matrix = ComplexMatrix::from_real_rows(&[
        &[-0.5 * detuning, 0.0, 0.5 * omega0],
        &[0.0, 0.5 * detuning, 0.5 * omega1],
        &[0.5 * omega0, 0.5 * omega1, delta],
    ]);
    Scenario {
        name: "lambda".into(),
        matrix,
        labels: labels(&["g", "t", "e"]),
        plan: PartitionPlan::one_shot(vec![0, 1], vec![2]),
        alt_plan: None,
    }
    .checked()
}

/// Four-level ladder driven by three lasers, basis |0>..|3> in ladder order.
/// Relevant states are the ends of the ladder, |0> and |3>.
pub fn scenario_four_level(omega0: f64, omega1: f64, omega2: f64, delta0: f64, delta1: f64, delta2: f64) -> Result<Scenario> {
    let d01 = delta0 + delta1;
    let d012 = d01 + delta2;
    let matrix = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.5 * omega0, 0.0, 0.0],
        &[0.5 * omega0, delta0, 0.5 * omega1, 0.0],
        &[0.0, 0.5 * omega1, d01, 0.5 * omega2],
        &[0.0, 0.0, 0.5 * omega2, d012],
    ]);
    Scenario {
        name: "four_level".into(),
        matrix,
        labels: index_labels(4),
        plan: PartitionPlan::one_shot(vec![0, 3], vec![1, 2]),
        alt_plan: None,
    }
    .checked()
}

/// Two cascade atoms with a blockaded doubly-excited Rydberg state, in the
/// permutation-symmetric basis (gg, gr, ge, re, ee, rr).
///
/// Default plan eliminates all four auxiliary states at once; `alt_plan`
/// first removes the far-detuned pair (ee, rr) and then (ge, re).
pub fn scenario_rydberg_pair(omega0: f64, omega1: f64, delta: f64, detuning: f64, blockade: f64) -> Result<Scenario> {
    let (a, b) = (omega0 / SQRT_2, omega1 / SQRT_2);
    let (ha, hb) = (0.5 * omega0, 0.5 * omega1);
    let matrix = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, a, 0.0, 0.0, 0.0],
        &[0.0, detuning, hb, ha, 0.0, 0.0],
        &[a, hb, delta + 0.5 * detuning, 0.0, a, 0.0],
        &[0.0, ha, 0.0, delta + 1.5 * detuning, b, b],
        &[0.0, 0.0, a, b, 2.0 * delta + detuning, 0.0],
        &[0.0, 0.0, 0.0, b, 0.0, blockade + 2.0 * detuning],
    ]);
    Scenario {
        name: "rydberg".into(),
        matrix,
        labels: labels(&["gg", "gr", "ge", "re", "ee", "rr"]),
        plan: PartitionPlan::one_shot(vec![0, 1], vec![2, 3, 4, 5]),
        alt_plan: Some(PartitionPlan::new(vec![0, 1], vec![vec![4, 5], vec![2, 3]])),
    }
    .checked()
}

/// Two Lambda/cascade atoms without blockade, basis (gg, gt, tt, ge, te, ee),
/// relevant {gg, gt, tt}.
pub fn scenario_two_atom(omega0: f64, omega1: f64, delta: f64, detuning: f64) -> Result<Scenario> {
    let (a, b) = (omega0 / SQRT_2, omega1 / SQRT_2);
    let (ha, hb) = (0.5 * omega0, 0.5 * omega1);
    let matrix = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, a, 0.0, 0.0],
        &[0.0, detuning, 0.0, hb, ha, 0.0],
        &[0.0, 0.0, 2.0 * detuning, 0.0, b, 0.0],
        &[a, hb, 0.0, delta + 0.5 * detuning, 0.0, a],
        &[0.0, ha, b, 0.0, delta + 1.5 * detuning, b],
        &[0.0, 0.0, 0.0, a, b, 2.0 * delta + detuning],
    ]);
    Scenario {
        name: "two_atom".into(),
        matrix,
        labels: labels(&["gg", "gt", "tt", "ge", "te", "ee"]),
        plan: PartitionPlan::one_shot(vec![0, 1, 2], vec![3, 4, 5]),
        alt_plan: None,
    }
    .checked()
}

/// Named presets with their parameter lists, for configuration-driven use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Lambda,
    FourLevel,
    RydbergPair,
    TwoAtom,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Lambda, Preset::FourLevel, Preset::RydbergPair, Preset::TwoAtom];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Lambda => "lambda",
            Preset::FourLevel => "four_level",
            Preset::RydbergPair => "rydberg",
            Preset::TwoAtom => "two_atom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Lambda => "three-level Raman (Lambda) system, relevant {g, t}",
            Preset::FourLevel => "four-level three-photon ladder, relevant {0, 3}",
            Preset::RydbergPair => "two cascade atoms with Rydberg blockade, relevant {gg, gr}",
            Preset::TwoAtom => "two three-level atoms without blockade, relevant {gg, gt, tt}",
        }
    }

    /// Parameter names in the order `build` expects them. All are angular frequencies.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Preset::Lambda => &["omega0", "omega1", "delta", "detuning"],
            Preset::FourLevel => &["omega0", "omega1", "omega2", "delta0", "delta1", "delta2"],
            Preset::RydbergPair => &["omega0", "omega1", "delta", "detuning", "delta_rb"],
            Preset::TwoAtom => &["omega0", "omega1", "delta", "detuning"],
        }
    }

    /// Whether the preset has a two-photon `detuning` that can be set to the
    /// light-shift-compensating value `(omega1^2 - omega0^2) / (4 delta)`.
    pub fn has_compensable_detuning(self) -> bool {
        !matches!(self, Preset::FourLevel)
    }

    pub fn build(self, values: &[f64]) -> Result<Scenario> {
        let expected = self.params().len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "preset {} takes {expected} parameters, got {}",
                self.name(),
                values.len()
            )));
        }
        let v = values;
        match self {
            Preset::Lambda => scenario_lambda(v[0], v[1], v[2], v[3]),
            Preset::FourLevel => scenario_four_level(v[0], v[1], v[2], v[3], v[4], v[5]),
            Preset::RydbergPair => scenario_rydberg_pair(v[0], v[1], v[2], v[3], v[4]),
            Preset::TwoAtom => scenario_two_atom(v[0], v[1], v[2], v[3]),
        }
    }
}

/// Two-photon detuning that equalizes the adiabatic-elimination light shifts.
pub fn compensating_detuning(omega0: f64, omega1: f64, delta: f64) -> f64 {
    (omega1 * omega1 - omega0 * omega0) / (4.0 * delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::partition;
    use crate::numkernel::C64;

    #[test]
    fn lambda_fig3_entries() {
        let s = scenario_lambda(0.4, 0.3, 1.0, compensating_detuning(0.4, 0.3, 1.0)).unwrap();
        let m = &s.matrix;
        assert!((m[(0, 0)].re - 0.00875).abs() < 1e-15);
        assert!((m[(1, 1)].re + 0.00875).abs() < 1e-15);
        assert_eq!(m[(2, 2)].re, 1.0);
        assert_eq!(m[(0, 2)].re, 0.2);
        assert_eq!(m[(1, 2)].re, 0.15);
        assert_eq!(m[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn lambda_symmetric_case() {
        let s = scenario_lambda(0.4, 0.4, 1.0, 0.0).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.2], &[0.0, 0.0, 0.2], &[0.2, 0.2, 1.0]]);
        assert_eq!(s.matrix, expected);
        assert_eq!(s.plan, PartitionPlan::one_shot(vec![0, 1], vec![2]));
    }

    #[test]
    fn lambda_block_form() {
        let (o0, o1, dd, det) = (0.4, 0.3, 1.0, -0.0175);
        let s = scenario_lambda(o0, o1, dd, det).unwrap();
        let b = partition(&s.matrix, &s.plan, &s.labels).unwrap();
        assert_eq!(*b.omega(), ComplexMatrix::from_real_diagonal(&[-det / 2.0, det / 2.0]));
        assert_eq!(*b.coupling(), ComplexMatrix::from_real_rows(&[&[o0], &[o1]]));
        assert_eq!(*b.delta(), ComplexMatrix::from_real_rows(&[&[dd]]));
        assert_eq!(b.relevant_labels(), ["g", "t"]);
    }

    #[test]
    fn four_level_reordered_blocks() {
        let (o0, o1, o2, dd) = (0.4, 0.3, 0.4, 1.0);
        let s = scenario_four_level(o0, o1, o2, dd, 0.0, -dd).unwrap();
        let b = partition(&s.matrix, &s.plan, &s.labels).unwrap();
        assert_eq!(*b.omega(), ComplexMatrix::zeros(2, 2));
        assert_eq!(*b.delta(), ComplexMatrix::from_real_rows(&[&[dd, o1 / 2.0], &[o1 / 2.0, dd]]));
        assert_eq!(*b.coupling(), ComplexMatrix::from_real_rows(&[&[o0, 0.0], &[0.0, o2]]));
        assert_eq!(b.permutation(), [0, 3, 1, 2]);
        assert_eq!(b.relevant_labels(), ["0", "3"]);
    }

    #[test]
    fn rydberg_entries() {
        let (o0, o1, dd) = (0.3, 0.2, 1.0);
        let det = compensating_detuning(o0, o1, dd);
        let s = scenario_rydberg_pair(o0, o1, dd, det, 5.0).unwrap();
        let rr = s.label_index("rr").unwrap();
        let gg = s.label_index("gg").unwrap();
        let gr = s.label_index("gr").unwrap();
        let ge = s.label_index("ge").unwrap();
        assert_eq!(s.matrix[(rr, rr)].re, 5.0 + 2.0 * det);
        assert_eq!(s.matrix[(gg, ge)].re, o0 / SQRT_2);
        assert_eq!(s.matrix[(gr, ge)].re, o1 / 2.0);
        assert!(s.matrix.hermiticity_defect() == 0.0);
        assert_eq!(s.alt_plan.as_ref().unwrap().stages, vec![vec![4, 5], vec![2, 3]]);
    }

    #[test]
    fn two_atom_is_unblockaded_rydberg_pair() {
        let (o0, o1, dd) = (0.3, 0.2, 1.0);
        let det = compensating_detuning(o0, o1, dd);
        let pair = scenario_rydberg_pair(o0, o1, dd, det, 0.0).unwrap();
        let two = scenario_two_atom(o0, o1, dd, det).unwrap();
        // relabel r -> t and reorder to (gg, gt, tt, ge, te, ee)
        let relabeled: Vec<String> = pair.labels.iter().map(|l| l.replace('r', "t")).collect();
        let order: Vec<usize> = two.labels.iter().map(|l| relabeled.iter().position(|r| r == l).unwrap()).collect();
        assert_eq!(pair.matrix.permuted(&order), two.matrix);
    }

    #[test]
    fn presets_hermitian_for_arbitrary_inputs() {
        for (i, &x) in [0.05, 0.7, 2.3].iter().enumerate() {
            let y = 0.3 + i as f64;
            assert_eq!(scenario_lambda(x, y, 1.5, -0.2).unwrap().matrix.hermiticity_defect(), 0.0);
            assert_eq!(scenario_rydberg_pair(x, y, 1.0, 0.1, 3.0).unwrap().matrix.hermiticity_defect(), 0.0);
            assert_eq!(scenario_two_atom(x, y, 1.0, 0.1).unwrap().matrix.hermiticity_defect(), 0.0);
        }
    }

    #[test]
    fn preset_registry() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        assert!(Preset::Lambda.build(&[0.4, 0.3]).is_err());
        let s = Preset::RydbergPair.build(&[0.3, 0.2, 1.0, -0.0125, 5.0]).unwrap();
        assert_eq!(s.dim(), 6);
    }
}
