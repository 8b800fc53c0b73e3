use super::{CnfFormula, Lit, Model, SatResult};
use crate::error::{Error, Result};

pub const DEFAULT_DECISION_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unset,
    True,
    False,
}

struct Decision {
    var: u32,
    trail_len: usize,
    flipped: bool,
}

struct Dpll<'a> {
    clauses: &'a [Vec<Lit>],
    values: Vec<Value>,
    trail: Vec<u32>,
}

enum ClauseState {
    Satisfied,
    Conflict,
    Unit(Lit),
    Open,
}

impl Dpll<'_> {
    fn lit_value(&self, l: Lit) -> Value {
        match (self.values[l.var() as usize - 1], l.is_negated()) {
            (Value::Unset, _) => Value::Unset,
            (Value::True, false) | (Value::False, true) => Value::True,
            _ => Value::False,
        }
    }

    fn assign(&mut self, l: Lit) {
        self.values[l.var() as usize - 1] = if l.is_negated() {
            Value::False
        } else {
            Value::True
        };
        self.trail.push(l.var());
    }

    fn state(&self, clause: &[Lit]) -> ClauseState {
        let mut unset = None;
        let mut n_unset = 0;
        for &l in clause {
            match self.lit_value(l) {
                Value::True => return ClauseState::Satisfied,
                Value::Unset => {
                    n_unset += 1;
                    unset = Some(l);
                }
                Value::False => {}
            }
        }
        match (n_unset, unset) {
            (0, _) => ClauseState::Conflict,
            (1, Some(l)) => ClauseState::Unit(l),
            _ => ClauseState::Open,
        }
    }

    /// Unit propagation to a fixpoint. False on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for c in self.clauses {
                match self.state(c) {
                    ClauseState::Conflict => return false,
                    ClauseState::Unit(l) => {
                        self.assign(l);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Assigns every literal that occurs with one polarity only among the
    /// clauses not yet satisfied. Returns whether anything was assigned.
    fn eliminate_pure(&mut self) -> bool {
        let n = self.values.len();
        let mut seen = vec![(false, false); n];
        for c in self.clauses {
            if matches!(self.state(c), ClauseState::Satisfied) {
                continue;
            }
            for &l in c {
                if self.lit_value(l) == Value::Unset {
                    let s = &mut seen[l.var() as usize - 1];
                    if l.is_negated() {
                        s.1 = true;
                    } else {
                        s.0 = true;
                    }
                }
            }
        }
        let mut any = false;
        for (i, &(pos, neg)) in seen.iter().enumerate() {
            let var = i as u32 + 1;
            if pos != neg {
                self.assign(if pos { Lit::pos(var) } else { Lit::neg(var) });
                any = true;
            }
        }
        any
    }

    fn undo_to(&mut self, len: usize) {
        for v in self.trail.drain(len..) {
            self.values[v as usize - 1] = Value::Unset;
        }
    }
}

pub fn solve_dpll(f: &CnfFormula) -> Result<SatResult> {
    solve_dpll_with_budget(f, DEFAULT_DECISION_BUDGET)
}

/// Complete DPLL: unit propagation, pure-literal elimination, branching on
/// the lowest unassigned variable with `true` tried first, chronological
/// backtracking. Fails once more than `budget` decisions have been made.
pub fn solve_dpll_with_budget(f: &CnfFormula, budget: u64) -> Result<SatResult> {
    let mut s = Dpll {
        clauses: f.clauses(),
        values: vec![Value::Unset; f.num_vars() as usize],
        trail: Vec::new(),
    };
    let mut decisions: Vec<Decision> = Vec::new();
    let mut made = 0u64;

    loop {
        let ok = s.propagate() && {
            while s.eliminate_pure() {
                if !s.propagate() {
                    break;
                }
            }
            s.clauses
                .iter()
                .all(|c| !matches!(s.state(c), ClauseState::Conflict))
        };

        if !ok {
            // backtrack to the latest decision with an untried branch
            loop {
                let Some(d) = decisions.pop() else {
                    return Ok(SatResult::unsat());
                };
                s.undo_to(d.trail_len);
                if !d.flipped {
                    decisions.push(Decision { flipped: true, ..d });
                    s.assign(Lit::neg(d.var));
                    break;
                }
            }
            continue;
        }

        let all_satisfied = s
            .clauses
            .iter()
            .all(|c| matches!(s.state(c), ClauseState::Satisfied));
        let unset = s.values.iter().position(|&v| v == Value::Unset);
        let (Some(i), false) = (unset, all_satisfied) else {
            // variables left open are free; fix them to true
            let values = s.values.iter().map(|&v| v != Value::False).collect();
            return Ok(SatResult::sat(Model::new(values)));
        };
        if made >= budget {
            return Err(Error::DecisionBudget(budget));
        }
        made += 1;
        let var = i as u32 + 1;
        decisions.push(Decision {
            var,
            trail_len: s.trail.len(),
            flipped: false,
        });
        s.assign(Lit::pos(var));
    }
}
