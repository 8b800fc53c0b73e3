//! CNF encodings of equal-length verification.
//!
//! With one determinate string `x`, variable `z(i,c)` selects character `c`
//! of `y[i]`; every position needs one selected character, and a pair of
//! selections that violates the relation between `i` and one of its context
//! positions (equal / nearest smaller / nearest larger in `x`) is forbidden.
//!
//! With both strings indeterminate, `z(i,a,b)` selects `a` from `x[i]` and
//! `b` from `y[i]` together, and two selections conflict whenever the order
//! of their `x` characters differs from the order of their `y` characters.

use std::cmp::Ordering;

use crate::cnf::{CnfFormula, Lit, Model};
use crate::corestr::{determinate_chars, Assignment, CharSet};
use crate::error::{Error, Result};
use crate::orderctx::det_context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Eq1VarKey {
    pub i: usize,
    pub c: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Eq2VarKey {
    pub i: usize,
    pub a: i64,
    pub b: i64,
}

/// Maps variables back to positions. Variables are numbered position-major,
/// so position `i` owns the contiguous block `first_var[i]..first_var[i+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry<K> {
    pub keys: Vec<K>,
    pub first_var: Vec<u32>,
}

impl<K: Copy> Registry<K> {
    pub fn key(&self, var: u32) -> K {
        self.keys[var as usize - 1]
    }

    fn vars_of(&self, i: usize) -> std::ops::Range<u32> {
        self.first_var[i]..self.first_var[i + 1]
    }

    pub fn positions(&self) -> usize {
        self.first_var.len() - 1
    }

    /// Lowest-numbered true variable of each position.
    fn chosen(&self, model: &Model) -> Result<Vec<K>> {
        (0..self.positions())
            .map(|i| {
                self.vars_of(i)
                    .find(|&v| model.value(v))
                    .map(|v| self.key(v))
                    .ok_or(Error::Decode {
                        position: i,
                        message: "no selected character".into(),
                    })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Encoding<K> {
    pub formula: CnfFormula,
    pub registry: Registry<K>,
}

fn check_lengths(x: &[CharSet], y: &[CharSet]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

pub fn encode_eq1(x: &[CharSet], y: &[CharSet]) -> Result<Encoding<Eq1VarKey>> {
    check_lengths(x, y)?;
    let ctx = det_context(x)?;

    let mut formula = CnfFormula::new(0);
    let mut keys = Vec::new();
    let mut first_var = Vec::with_capacity(y.len() + 1);
    for (i, set) in y.iter().enumerate() {
        first_var.push(formula.num_vars() + 1);
        for c in set.iter() {
            formula.new_var(format!("z i={i} y={c}"));
            keys.push(Eq1VarKey { i, c });
        }
    }
    first_var.push(formula.num_vars() + 1);
    let registry = Registry { keys, first_var };

    for i in 0..y.len() {
        formula.add_clause(registry.vars_of(i).map(Lit::pos).collect())?;
    }

    let relations = [
        (&ctx.leq, Ordering::Equal),
        (&ctx.lmax, Ordering::Greater),
        (&ctx.lmin, Ordering::Less),
    ];
    for i in 0..y.len() {
        for (context, required) in relations {
            let Some(j) = context[i] else { continue };
            for (vi, c) in registry.vars_of(i).zip(y[i].iter()) {
                for (vj, d) in registry.vars_of(j).zip(y[j].iter()) {
                    if c.cmp(&d) != required {
                        formula.add_clause(vec![Lit::neg(vi), Lit::neg(vj)])?;
                    }
                }
            }
        }
    }
    Ok(Encoding { formula, registry })
}

pub fn encode_eq2(x: &[CharSet], y: &[CharSet]) -> Result<Encoding<Eq2VarKey>> {
    check_lengths(x, y)?;
    let mut formula = CnfFormula::new(0);
    let mut keys = Vec::new();
    let mut first_var = Vec::with_capacity(y.len() + 1);
    for i in 0..x.len() {
        first_var.push(formula.num_vars() + 1);
        for a in x[i].iter() {
            for b in y[i].iter() {
                formula.new_var(format!("z i={i} x={a} y={b}"));
                keys.push(Eq2VarKey { i, a, b });
            }
        }
    }
    first_var.push(formula.num_vars() + 1);
    let registry = Registry { keys, first_var };

    for i in 0..x.len() {
        formula.add_clause(registry.vars_of(i).map(Lit::pos).collect())?;
    }
    for i in 0..x.len() {
        for k in 0..i {
            for vi in registry.vars_of(i) {
                let ki = registry.key(vi);
                for vk in registry.vars_of(k) {
                    let kk = registry.key(vk);
                    if ki.a.cmp(&kk.a) != ki.b.cmp(&kk.b) {
                        formula.add_clause(vec![Lit::neg(vi), Lit::neg(vk)])?;
                    }
                }
            }
        }
    }
    Ok(Encoding { formula, registry })
}

/// Reads the selected characters of `y` out of a model of [`encode_eq1`] and
/// checks them against the determinate `x`.
pub fn decode_eq1(x: &[CharSet], enc: &Encoding<Eq1VarKey>, model: &Model) -> Result<Assignment> {
    let y: Vec<i64> = enc
        .registry
        .chosen(model)?
        .into_iter()
        .map(|k| k.c)
        .collect();
    let xs = determinate_chars(x)?;
    ensure_iso(&xs, &y)?;
    Ok(Assignment(y))
}

/// Reads the selected `(x, y)` pair out of a model of [`encode_eq2`].
pub fn decode_eq2(enc: &Encoding<Eq2VarKey>, model: &Model) -> Result<(Assignment, Assignment)> {
    let chosen = enc.registry.chosen(model)?;
    let x: Vec<i64> = chosen.iter().map(|k| k.a).collect();
    let y: Vec<i64> = chosen.iter().map(|k| k.b).collect();
    ensure_iso(&x, &y)?;
    Ok((Assignment(x), Assignment(y)))
}

fn ensure_iso(x: &[i64], y: &[i64]) -> Result<()> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&i| x[i]);
    match order
        .windows(2)
        .find(|w| x[w[0]].cmp(&x[w[1]]) != y[w[0]].cmp(&y[w[1]]))
    {
        None => Ok(()),
        Some(w) => Err(Error::Decode {
            position: w[1],
            message: format!("decoded assignment breaks the order with position {}", w[0]),
        }),
    }
}
