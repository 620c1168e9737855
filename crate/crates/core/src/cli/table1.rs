//! Closed-form Rabi frequencies of the Lambda system, checked against the
//! numerical pipeline.
//!
//! Everything is in units of the intermediate detuning. With
//! `x = (Omega0^2 + Omega1^2) / 4` and `alpha = (Omega0^2 - Omega1^2) / (Omega0^2 + Omega1^2)`
//! the couplings are `Omega0^2 = 2x(1 + alpha)`, `Omega1^2 = 2x(1 - alpha)`;
//! for `alpha != 0` the two-photon detuning cancels the differential light
//! shift, `detuning = -alpha x`.

use std::fmt;

use crate::dynamics::{rabi_effective, rabi_exact};
use crate::elimination::{effective, Order};
use crate::error::Result;
use crate::model::{compensating_detuning, partition, scenario_lambda, BlockHamiltonian, Scenario};
use crate::picture::{shift_minimize, shifted_effective, NormKind};

pub const DEFAULT_X: [f64; 5] = [0.01, 0.04, 0.08, 0.16, 0.25];
pub const DEFAULT_ALPHA: [f64; 2] = [0.28, 0.5];

/// Tolerance for rows that hold identically.
pub const TOL_CLOSED_FORM: f64 = 1e-10;
/// Tolerance for rows that go through the shift minimizer.
pub const TOL_MINIMIZED: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    /// `'a'` for equal couplings, `'b'` for unequal couplings at compensated detuning.
    pub table: char,
    pub x: f64,
    pub alpha: f64,
    pub quantity: &'static str,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
}

impl Table1Row {
    pub fn residual(&self) -> f64 {
        (self.actual - self.expected).abs()
    }

    pub fn passed(&self) -> bool {
        self.residual() <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(Table1Row::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Table1Row> {
        self.rows.iter().filter(|r| !r.passed())
    }
}

impl fmt::Display for Table1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<5} {:>7} {:>6}  {:<22} {:>20} {:>20} {:>10} {:>10}  status",
            "table", "x", "alpha", "quantity", "expected", "actual", "residual", "tol"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<5} {:>7} {:>6}  {:<22} {:>20.14} {:>20.14} {:>10.3e} {:>10.3e}  {}",
                r.table,
                r.x,
                r.alpha,
                r.quantity,
                r.expected,
                r.actual,
                r.residual(),
                r.tolerance,
                if r.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Lambda system with unit intermediate detuning at the given `(x, alpha)`.
pub fn lambda_at(x: f64, alpha: f64) -> Result<Scenario> {
    let o0 = (2.0 * x * (1.0 + alpha)).sqrt();
    let o1 = (2.0 * x * (1.0 - alpha)).sqrt();
    scenario_lambda(o0, o1, 1.0, compensating_detuning(o0, o1, 1.0))
}

fn lambda_block(x: f64, alpha: f64) -> Result<(Scenario, BlockHamiltonian)> {
    let s = lambda_at(x, alpha)?;
    let block = partition(&s.matrix, &s.plan, &s.labels)?;
    Ok((s, block))
}

pub fn rabi_condition_a(x: f64, alpha: f64, order: Order) -> Result<f64> {
    let (_, block) = lambda_block(x, alpha)?;
    rabi_effective(&effective(&block, order)?)
}

pub fn rabi_minimized(x: f64, alpha: f64, norm: NormKind) -> Result<f64> {
    let (_, block) = lambda_block(x, alpha)?;
    let shift = shift_minimize(&block, norm, Order::M0)?;
    rabi_effective(&shifted_effective(&block, shift, Order::M0)?)
}

pub fn rabi_exact_at(x: f64, alpha: f64) -> Result<f64> {
    rabi_exact(&lambda_at(x, alpha)?.matrix)
}

fn value(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// Rows for equal couplings and zero two-photon detuning.
pub fn table_a_rows(x: f64) -> Vec<Table1Row> {
    let row =
        |quantity, expected, actual, tolerance| Table1Row { table: 'a', x, alpha: 0.0, quantity, expected, actual, tolerance };
    let exact_closed = ((1.0 + 4.0 * x).sqrt() - 1.0) / 2.0;
    let exact = value(rabi_exact_at(x, 0.0));
    let c = value(rabi_minimized(x, 0.0, NormKind::Trace));
    vec![
        row("exact", exact_closed, exact, TOL_CLOSED_FORM),
        row("markov0/a", x, value(rabi_condition_a(x, 0.0, Order::M0)), TOL_CLOSED_FORM),
        row("markov1/a", x / (1.0 + x), value(rabi_condition_a(x, 0.0, Order::M1)), TOL_CLOSED_FORM),
        row("markov0/b", (1.0 + 2.0 * x).sqrt() - 1.0, value(rabi_minimized(x, 0.0, NormKind::Op)), TOL_MINIMIZED),
        row("markov0/c", exact_closed, c, TOL_MINIMIZED),
        row("markov0/c vs exact", exact, c, TOL_MINIMIZED),
    ]
}

/// Rows for unequal couplings at the compensating detuning. Beyond the
/// closed-form zeroth-order row these are order-of-magnitude checks: the
/// exact value deviates at O(x^2), condition (c) at O(x^2 alpha^2) and the
/// first-order model at O(x^3).
pub fn table_b_rows(x: f64, alpha: f64) -> Vec<Table1Row> {
    let row = |quantity, expected, actual, tolerance| Table1Row { table: 'b', x, alpha, quantity, expected, actual, tolerance };
    let lead = (1.0 - alpha * alpha).sqrt() * x;
    let exact = value(rabi_exact_at(x, alpha));
    vec![
        row("markov0/a", lead, value(rabi_condition_a(x, alpha, Order::M0)), 1e-12),
        row("exact vs leading", lead, exact, 1.5 * (1.0 - alpha * alpha).sqrt() * x * x),
        row("markov0/c vs exact", exact, value(rabi_minimized(x, alpha, NormKind::Trace)), 0.5 * x * x * alpha * alpha),
        row("markov1/a vs exact", exact, value(rabi_condition_a(x, alpha, Order::M1)), 1.5 * x * x * x),
    ]
}

pub fn verify_table1(xs: &[f64], alphas: &[f64]) -> Table1Report {
    let mut rows = Vec::new();
    for &x in xs {
        rows.extend(table_a_rows(x));
    }
    for &alpha in alphas.iter().filter(|a| **a != 0.0) {
        for &x in xs {
            rows.extend(table_b_rows(x, alpha));
        }
    }
    Table1Report { rows }
}
