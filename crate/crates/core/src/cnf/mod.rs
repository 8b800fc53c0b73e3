//! CNF formulas, DIMACS I/O and two solvers: linear-time 2SAT and a plain
//! DPLL for small general instances.

mod dimacs;
mod dpll;
mod twosat;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Not;

pub use dimacs::{read_dimacs, write_dimacs};
pub use dpll::{solve_dpll, solve_dpll_with_budget, DEFAULT_DECISION_BUDGET};
pub use twosat::solve_2sat;

use crate::error::{Error, Result};

/// A signed, 1-based variable id; negative means negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        debug_assert!(var >= 1);
        Lit(var as i32)
    }

    pub fn neg(var: u32) -> Lit {
        debug_assert!(var >= 1);
        Lit(-(var as i32))
    }

    pub fn from_dimacs(v: i32) -> Option<Lit> {
        (v != 0).then_some(Lit(v))
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Index into a literal-indexed table: `2(v-1)` for `v`, `2(v-1)+1` for `¬v`.
    pub(crate) fn code(self) -> usize {
        2 * (self.var() as usize - 1) + self.is_negated() as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    var_meta: BTreeMap<u32, String>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn var_meta(&self) -> &BTreeMap<u32, String> {
        &self.var_meta
    }

    /// Allocates a fresh variable with an optional descriptive tag.
    pub fn new_var(&mut self, meta: impl Into<Option<String>>) -> u32 {
        self.num_vars += 1;
        if let Some(tag) = meta.into() {
            self.var_meta.insert(self.num_vars, tag);
        }
        self.num_vars
    }

    pub fn set_meta(&mut self, var: u32, tag: String) {
        self.var_meta.insert(var, tag);
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) -> Result<()> {
        if clause.is_empty() {
            return Err(Error::EmptyClause);
        }
        if let Some(l) = clause.iter().find(|l| l.var() > self.num_vars) {
            return Err(Error::LiteralOutOfRange {
                literal: l.to_dimacs() as i64,
                num_vars: self.num_vars,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Widest clause, 0 for an empty formula.
    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_satisfied_by(&self, model: &Model) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| model.lit(l)))
    }
}

/// A total assignment of the variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model(values)
    }

    pub fn value(&self, var: u32) -> bool {
        self.0[var as usize - 1]
    }

    pub fn lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) != lit.is_negated()
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub model: Option<Model>,
}

impl SatResult {
    pub fn sat(model: Model) -> Self {
        SatResult { model: Some(model) }
    }

    pub fn unsat() -> Self {
        SatResult { model: None }
    }

    pub fn is_sat(&self) -> bool {
        self.model.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    TwoSat,
    Dpll,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::TwoSat => "2sat",
            SolverKind::Dpll => "dpll",
        }
    }
}

/// 2SAT when every clause has at most two literals, DPLL otherwise.
pub fn solve(f: &CnfFormula) -> Result<(SatResult, SolverKind)> {
    if f.max_width() <= 2 {
        Ok((solve_2sat(f)?, SolverKind::TwoSat))
    } else {
        Ok((solve_dpll(f)?, SolverKind::Dpll))
    }
}
