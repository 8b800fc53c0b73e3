//! 3CNF-SAT reduces to op-matching a determinate-ish pattern against a text
//! with at most three characters per position.
//!
//! For variables `v = 0..n` the pattern holds `v+1` and the text `{2v+1, 2v+2}`;
//! picking the even value means "true". Each clause appends one position:
//! the pattern may pick any of its variables `z+1`, the text the matching
//! literal value `2(z+1) - neg`. An op-match must map the clause position
//! onto some variable position with the same value on both sides, i.e. onto
//! a satisfied literal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{CnfFormula, Lit};
use crate::corestr::{op_iso, CharSet, IndetString};
use crate::error::{Error, Result};
use crate::oracle::{oracle_match, Witness};
use crate::Assignment;

/// A clause of one to three literals over distinct variables (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3Clause {
    /// `(variable, negated)`
    pub lits: Vec<(u32, bool)>,
    /// Fewer than three distinct literals in the input; the clause positions
    /// repeat the last literal, which collapses inside the character sets.
    pub padded: bool,
}

impl Cnf3Clause {
    /// Variables, padded to three.
    pub fn z(&self) -> [u32; 3] {
        let last = self.lits[self.lits.len() - 1];
        std::array::from_fn(|k| self.lits.get(k).copied().unwrap_or(last).0)
    }

    /// Polarity bits (1 = negated), padded to three.
    pub fn l(&self) -> [u8; 3] {
        let last = self.lits[self.lits.len() - 1];
        std::array::from_fn(|k| self.lits.get(k).copied().unwrap_or(last).1 as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3Instance {
    pub num_vars: u32,
    pub clauses: Vec<Cnf3Clause>,
}

impl Cnf3Instance {
    pub fn is_satisfied_by(&self, valuation: &[bool]) -> bool {
        self.first_unsatisfied(valuation).is_none()
    }

    fn first_unsatisfied(&self, valuation: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.lits.iter().any(|&(v, neg)| valuation[v as usize] != neg))
    }

    pub fn to_formula(&self) -> CnfFormula {
        let mut f = CnfFormula::new(self.num_vars);
        for c in &self.clauses {
            f.add_clause(
                c.lits
                    .iter()
                    .map(|&(v, neg)| {
                        if neg {
                            Lit::neg(v + 1)
                        } else {
                            Lit::pos(v + 1)
                        }
                    })
                    .collect(),
            )
            .expect("variables in range");
        }
        f
    }
}

/// Normalizes DIMACS-style clauses: repeated literals are merged,
/// tautologies dropped.
pub fn sanitize_3cnf(num_vars: u32, raw: &[Vec<i64>]) -> Result<Cnf3Instance> {
    let mut clauses = Vec::with_capacity(raw.len());
    for (clause, lits) in raw.iter().enumerate() {
        let bad = |message: &str| Error::BadClause {
            clause,
            message: message.into(),
        };
        if lits.is_empty() {
            return Err(bad("empty clause"));
        }
        if lits.len() > 3 {
            return Err(bad("more than three literals"));
        }
        let mut out: Vec<(u32, bool)> = Vec::with_capacity(3);
        let mut tautology = false;
        for &l in lits {
            if l == 0 || l.unsigned_abs() > num_vars as u64 {
                return Err(Error::LiteralOutOfRange {
                    literal: l,
                    num_vars,
                });
            }
            let lit = (l.unsigned_abs() as u32 - 1, l < 0);
            match out.iter().find(|&&(v, _)| v == lit.0) {
                Some(&(_, neg)) if neg != lit.1 => tautology = true,
                Some(_) => {}
                None => out.push(lit),
            }
        }
        if !tautology {
            let padded = out.len() < 3;
            clauses.push(Cnf3Clause { lits: out, padded });
        }
    }
    Ok(Cnf3Instance { num_vars, clauses })
}

pub fn sanitize_formula(f: &CnfFormula) -> Result<Cnf3Instance> {
    let raw: Vec<Vec<i64>> = f
        .clauses()
        .iter()
        .map(|c| c.iter().map(|l| l.to_dimacs() as i64).collect())
        .collect();
    sanitize_3cnf(f.num_vars(), &raw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub pattern: IndetString,
    pub text: IndetString,
    /// Index of the first clause position.
    pub var_offset: usize,
}

fn pattern_value(v: u32) -> i64 {
    v as i64 + 1
}

fn text_value(v: u32, negated: bool) -> i64 {
    2 * (v as i64 + 1) - negated as i64
}

pub fn reduce_3sat(f: &Cnf3Instance) -> Result<ReductionOutput> {
    let n = f.num_vars;
    let mut pattern = Vec::with_capacity(n as usize + f.clauses.len());
    let mut text = Vec::with_capacity(pattern.capacity());
    for v in 0..n {
        pattern.push(CharSet::singleton(pattern_value(v)));
        text.push(CharSet::from_sorted(vec![
            text_value(v, true),
            text_value(v, false),
        ]));
    }
    for (clause, c) in f.clauses.iter().enumerate() {
        let bad = |message: &str| Error::BadClause {
            clause,
            message: message.into(),
        };
        if c.lits.is_empty() || c.lits.len() > 3 {
            return Err(bad("clause must have one to three literals"));
        }
        for (k, &(v, _)) in c.lits.iter().enumerate() {
            if v >= n {
                return Err(bad("variable out of range"));
            }
            if c.lits[..k].iter().any(|&(w, _)| w == v) {
                return Err(bad("repeated variable; sanitize first"));
            }
        }
        pattern
            .push(CharSet::new(c.lits.iter().map(|&(v, _)| pattern_value(v)).collect()).unwrap());
        text.push(
            CharSet::new(c.lits.iter().map(|&(v, neg)| text_value(v, neg)).collect()).unwrap(),
        );
    }
    Ok(ReductionOutput {
        pattern: pattern.into(),
        text: text.into(),
        var_offset: n as usize,
    })
}

/// Reads a valuation off the text side of an op-match: a variable is true
/// iff its text value is even.
pub fn extract_assignment(out: &ReductionOutput, witness: &Witness) -> Result<Vec<bool>> {
    if !witness.x.is_valid_for(&out.pattern) || !witness.y.is_valid_for(&out.text) {
        return Err(Error::InvalidWitness(
            "not an assignment of the reduced strings".into(),
        ));
    }
    if !op_iso(&witness.x, &witness.y)? {
        return Err(Error::InvalidWitness(
            "assignments are not order-isomorphic".into(),
        ));
    }
    Ok(witness.y[..out.var_offset]
        .iter()
        .map(|v| v % 2 == 0)
        .collect())
}

/// Builds the op-match that a satisfying valuation induces: every clause
/// position points at its first satisfied literal.
pub fn inject_assignment(f: &Cnf3Instance, valuation: &[bool]) -> Result<Witness> {
    if valuation.len() != f.num_vars as usize {
        return Err(Error::LengthMismatch {
            left: valuation.len(),
            right: f.num_vars as usize,
        });
    }
    let mut x: Vec<i64> = (0..f.num_vars).map(pattern_value).collect();
    let mut y: Vec<i64> = (0..f.num_vars)
        .map(|v| text_value(v, !valuation[v as usize]))
        .collect();
    for (clause, c) in f.clauses.iter().enumerate() {
        let &(v, neg) = c
            .lits
            .iter()
            .find(|&&(v, neg)| valuation[v as usize] != neg)
            .ok_or(Error::UnsatisfiedClause { clause })?;
        x.push(pattern_value(v));
        y.push(text_value(v, neg));
    }
    Ok(Witness {
        x: Assignment(x),
        y: Assignment(y),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCheck {
    pub satisfiable: bool,
    /// Pattern/text op-match found by exhaustive search.
    pub witness: Option<Witness>,
    /// Valuation read back from `witness`.
    pub valuation: Option<Vec<bool>>,
}

impl ReductionCheck {
    pub fn consistent(&self) -> bool {
        self.satisfiable == self.witness.is_some()
    }
}

/// Solves `f` directly and searches the reduced instance exhaustively.
pub fn check_reduction(f: &Cnf3Instance, budget: u128) -> Result<ReductionCheck> {
    let out = reduce_3sat(f)?;
    let satisfiable = crate::cnf::solve_dpll(&f.to_formula())?.is_sat();
    // the pattern has far fewer assignments; keep it on the indexed side
    let witness = oracle_match(&out.text, &out.pattern, budget)?.map(Witness::swapped);
    let valuation = match &witness {
        Some(w) => {
            let v = extract_assignment(&out, w)?;
            if let Some(clause) = f.first_unsatisfied(&v) {
                return Err(Error::UnsatisfiedClause { clause });
            }
            Some(v)
        }
        None => None,
    };
    Ok(ReductionCheck {
        satisfiable,
        witness,
        valuation,
    })
}

/// Uniform random clauses with three distinct variables (fewer when
/// `num_vars < 3`) and random signs.
pub fn random_3cnf(num_vars: u32, num_clauses: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = num_vars.min(3) as usize;
    (0..num_clauses)
        .map(|_| {
            let vars = rand::seq::index::sample(&mut rng, num_vars as usize, width);
            vars.iter()
                .map(|v| {
                    let v = v as i64 + 1;
                    if rng.gen_bool(0.5) {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corestr::parse_string;

    fn two_clause() -> Cnf3Instance {
        sanitize_3cnf(4, &[vec![1, -2, 3], vec![-1, 2, 4]]).unwrap()
    }

    #[test]
    fn two_clause_strings() {
        let out = reduce_3sat(&two_clause()).unwrap();
        assert_eq!(out.pattern.to_string(), "1 2 3 4 1|2|3 1|2|4");
        assert_eq!(out.text.to_string(), "1|2 3|4 5|6 7|8 2|3|6 1|4|8");
        assert_eq!(out.var_offset, 4);
        assert_eq!(two_clause().clauses[0].z(), [0, 1, 2]);
        assert_eq!(two_clause().clauses[0].l(), [0, 1, 0]);
    }

    #[test]
    fn small_shapes() {
        let out = reduce_3sat(&sanitize_3cnf(1, &[]).unwrap()).unwrap();
        assert_eq!(
            (out.pattern.to_string(), out.text.to_string()),
            ("1".into(), "1|2".into())
        );
        let out = reduce_3sat(&sanitize_3cnf(3, &[vec![1, 2, 3]]).unwrap()).unwrap();
        assert_eq!(out.text[3], parse_string("2|4|6").unwrap()[0]);
    }

    #[test]
    fn sanitizer_policy() {
        let f = sanitize_3cnf(2, &[vec![1, -1, 2], vec![1, 1, 2]]).unwrap();
        assert_eq!(f.clauses.len(), 1);
        assert_eq!(f.clauses[0].lits, vec![(0, false), (1, false)]);
        assert!(f.clauses[0].padded);
        assert_eq!(f.clauses[0].z(), [0, 1, 1]);
        let out = reduce_3sat(&f).unwrap();
        assert_eq!(out.text[2].len(), 2);
        assert!(matches!(
            sanitize_3cnf(4, &[vec![1, 2, 3, 4]]),
            Err(Error::BadClause { clause: 0, .. })
        ));
        assert!(matches!(
            sanitize_3cnf(4, &[vec![]]),
            Err(Error::BadClause { .. })
        ));
        assert!(matches!(
            sanitize_3cnf(2, &[vec![3]]),
            Err(Error::LiteralOutOfRange { .. })
        ));
        let dup = Cnf3Instance {
            num_vars: 2,
            clauses: vec![Cnf3Clause {
                lits: vec![(0, false), (0, true)],
                padded: true,
            }],
        };
        assert!(matches!(reduce_3sat(&dup), Err(Error::BadClause { .. })));
    }

    #[test]
    fn inject_two_clause() {
        let f = two_clause();
        let w = inject_assignment(&f, &[true, true, false, false]).unwrap();
        assert_eq!(w.y.0, vec![2, 4, 5, 7, 2, 4]);
        assert_eq!(w.x.0, vec![1, 2, 3, 4, 1, 2]);
        assert!(op_iso(&w.x, &w.y).unwrap());
        let out = reduce_3sat(&f).unwrap();
        assert_eq!(
            extract_assignment(&out, &w).unwrap(),
            vec![true, true, false, false]
        );
        assert!(matches!(
            inject_assignment(&f, &[false, true, false, false]),
            Err(Error::UnsatisfiedClause { clause: 0 })
        ));
    }

    #[test]
    fn two_clause_matches_and_extracts() {
        let check = check_reduction(&two_clause(), u128::MAX).unwrap();
        assert!(check.satisfiable && check.consistent());
        assert!(two_clause().is_satisfied_by(check.valuation.as_ref().unwrap()));
    }

    #[test]
    fn unsat_toy_has_no_match() {
        let f = sanitize_3cnf(1, &[vec![1, 1, 1], vec![-1, -1, -1]]).unwrap();
        let check = check_reduction(&f, u128::MAX).unwrap();
        assert!(!check.satisfiable);
        assert_eq!(check.witness, None);
    }

    #[test]
    fn all_even_is_all_true() {
        let f = sanitize_3cnf(3, &[vec![1, 2, 3]]).unwrap();
        let out = reduce_3sat(&f).unwrap();
        let w = Witness {
            x: Assignment(vec![1, 2, 3, 1]),
            y: Assignment(vec![2, 4, 6, 2]),
        };
        assert_eq!(extract_assignment(&out, &w).unwrap(), vec![true; 3]);
        let bad = Witness {
            x: Assignment(vec![1, 2, 3, 1]),
            y: Assignment(vec![2, 4, 6, 4]),
        };
        assert!(matches!(
            extract_assignment(&out, &bad),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn random_formulas_agree() {
        for seed in 0..200 {
            let n = 1 + (seed % 6) as u32;
            let raw = random_3cnf(n, (seed % 7) as usize, seed);
            let f = sanitize_3cnf(n, &raw).unwrap();
            assert!(
                check_reduction(&f, u128::MAX).unwrap().consistent(),
                "{raw:?}"
            );
        }
    }
}
