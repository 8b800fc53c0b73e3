//! 2SAT verification for alternating instances: at every position at least
//! one of the two strings is determinate.
//!
//! Each position gets threshold variables `g(k)` = "the chosen value on the
//! indeterminate side is at least its k-th smallest character". Consistency
//! (`g(k) ⇒ g(k-1)`) and forcing (`g(0)`) make every model pick exactly one
//! character per position: the largest `k` with `g(k)` true.
//!
//! Pairs of positions fall into three shapes:
//! - both `x` determinate: the fixed order of the `x` characters must be
//!   reproduced by the `y` choices (and symmetrically with `x`, `y` swapped);
//! - `x` determinate at α and indeterminate at β, `y` the other way round:
//!   `x[β] > a ⇔ y[α] < b` and `x[β] ≥ a ⇔ y[α] ≤ b`.
//!
//! Every such constraint is a conjunction of two-literal implications.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::cnf::{solve_2sat, CnfFormula, Lit, Model};
use crate::corestr::{op_iso, CharSet};
use crate::error::{Error, Result};
use crate::oracle::Witness;
use crate::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::X => "x",
            Side::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThresholdVarKey {
    pub side: Side,
    pub i: usize,
    pub k: usize,
}

/// An alternating instance after equality preprocessing. `remap[p]` is the
/// reduced position that original position `p` was folded into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternateInstance {
    pub x: Vec<CharSet>,
    pub y: Vec<CharSet>,
    pub remap: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preprocessed {
    Instance(AlternateInstance),
    /// Some position lost all its characters.
    NoMatch,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlternateOptions {
    /// Only constrain neighbours in the sorted order of determinate
    /// characters; the remaining pairs follow by transitivity.
    pub adjacency: bool,
    /// Reject early when some pair of positions has no consistent choice.
    pub skip_pair_check: bool,
}

pub fn is_alternating(x: &[CharSet], y: &[CharSet]) -> bool {
    x.iter()
        .zip(y)
        .all(|(a, b)| a.is_singleton() || b.is_singleton())
}

fn check_shape(x: &[CharSet], y: &[CharSet]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    match x
        .iter()
        .zip(y)
        .position(|(a, b)| !a.is_singleton() && !b.is_singleton())
    {
        Some(position) => Err(Error::AlternationViolated { position }),
        None => Ok(()),
    }
}

type Pos = [CharSet; 2];

/// Folds positions whose side-`s` characters are the same single value; their
/// other sides must then agree too and are intersected.
fn merge_equal_singletons(pos: &mut Vec<Pos>, remap: &mut [usize], s: usize) -> Option<bool> {
    let other = 1 - s;
    let mut first: HashMap<i64, usize> = HashMap::new();
    let mut out: Vec<Pos> = Vec::with_capacity(pos.len());
    let mut moved = Vec::with_capacity(pos.len());
    let mut changed = false;
    for p in pos.drain(..) {
        if p[s].is_singleton() {
            if let Some(&t) = first.get(&p[s].min()) {
                out[t][other] = out[t][other].intersect(&p[other])?;
                moved.push(t);
                changed = true;
                continue;
            }
            first.insert(p[s].min(), out.len());
        }
        moved.push(out.len());
        out.push(p);
    }
    *pos = out;
    for r in remap.iter_mut() {
        *r = moved[*r];
    }
    Some(changed)
}

/// With `v` fixed on one side of `p` and `c` a candidate on the other side,
/// `c` survives only if the position pinned to `c` on that side can mirror
/// the equality, i.e. contains `v`.
fn drop_one_sided_equalities(pos: &mut [Pos]) -> Option<bool> {
    let mut changed = false;
    for s in 0..2 {
        let other = 1 - s;
        let pinned: HashMap<i64, usize> = pos
            .iter()
            .enumerate()
            .filter(|(_, p)| p[s].is_singleton())
            .map(|(q, p)| (p[s].min(), q))
            .collect();
        for p in 0..pos.len() {
            if pos[p][s].is_singleton() {
                continue;
            }
            let v = pos[p][other].min();
            let kept: Vec<i64> = pos[p][s]
                .iter()
                .filter(|&c| match pinned.get(&c) {
                    Some(&q) if q != p => pos[q][other].contains(v),
                    _ => true,
                })
                .collect();
            if kept.len() != pos[p][s].len() {
                if kept.is_empty() {
                    return None;
                }
                pos[p][s] = CharSet::from_sorted(kept);
                changed = true;
            }
        }
    }
    Some(changed)
}

/// Applies equality merging and one-sided equality removal until nothing
/// changes.
pub fn preprocess_alternate(x: &[CharSet], y: &[CharSet]) -> Result<Preprocessed> {
    check_shape(x, y)?;
    let mut pos: Vec<Pos> = x
        .iter()
        .cloned()
        .zip(y.iter().cloned())
        .map(|(a, b)| [a, b])
        .collect();
    let mut remap: Vec<usize> = (0..x.len()).collect();
    loop {
        let step = (|| {
            let a = merge_equal_singletons(&mut pos, &mut remap, 0)?;
            let b = merge_equal_singletons(&mut pos, &mut remap, 1)?;
            let c = drop_one_sided_equalities(&mut pos)?;
            Some(a || b || c)
        })();
        match step {
            None => return Ok(Preprocessed::NoMatch),
            Some(false) => break,
            Some(true) => {}
        }
    }
    let (x, y) = pos.into_iter().map(|[a, b]| (a, b)).unzip();
    Ok(Preprocessed::Instance(AlternateInstance { x, y, remap }))
}

const LT: u8 = 1;
const EQ: u8 = 2;
const GT: u8 = 4;

fn relations(a: &CharSet, b: &CharSet) -> u8 {
    let mut r = 0;
    if a.min() < b.max() {
        r |= LT;
    }
    if a.max() > b.min() {
        r |= GT;
    }
    if a.intersect(b).is_some() {
        r |= EQ;
    }
    r
}

/// Whether positions `alpha` and `beta` admit some choice of characters that
/// orders them the same way in both strings.
pub fn check_pair(x: &[CharSet], y: &[CharSet], alpha: usize, beta: usize) -> bool {
    relations(&x[alpha], &x[beta]) & relations(&y[alpha], &y[beta]) != 0
}

#[derive(Debug, Clone)]
pub struct AlternateEncoding {
    pub formula: CnfFormula,
    pub keys: Vec<ThresholdVarKey>,
    /// Indeterminate side and variable range of each reduced position.
    pub groups: Vec<(Side, Range<u32>)>,
}

#[derive(Clone, Copy)]
enum G {
    Const(bool),
    Var(u32),
}

struct Builder<'a> {
    inst: &'a AlternateInstance,
    groups: Vec<(Side, Range<u32>)>,
    formula: CnfFormula,
    seen: HashSet<Vec<Lit>>,
    contradiction: bool,
}

impl Builder<'_> {
    fn set(&self, s: Side, p: usize) -> &CharSet {
        match s {
            Side::X => &self.inst.x[p],
            Side::Y => &self.inst.y[p],
        }
    }

    /// "The side-`s` value at `p` is at least its k-th character."
    fn g(&self, s: Side, p: usize, k: usize) -> G {
        let (side, vars) = &self.groups[p];
        // a determinate side, or a group whose only variable is forced
        if *side != s || self.set(s, p).is_singleton() {
            return G::Const(k == 0);
        }
        if k >= self.set(s, p).len() {
            G::Const(false)
        } else {
            G::Var(vars.start + k as u32)
        }
    }

    fn clause(&mut self, terms: [(G, bool); 2]) {
        let mut lits = Vec::with_capacity(2);
        for (g, positive) in terms {
            match g {
                G::Const(v) if v == positive => return,
                G::Const(_) => {}
                G::Var(v) => lits.push(if positive { Lit::pos(v) } else { Lit::neg(v) }),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.is_empty() {
            self.contradiction = true;
        } else if self.seen.insert(lits.clone()) {
            self.formula
                .add_clause(lits)
                .expect("variables are registered");
        }
    }

    fn implies(&mut self, a: (G, bool), b: (G, bool)) {
        self.clause([(a.0, !a.1), b]);
    }

    fn iff(&mut self, a: (G, bool), b: (G, bool)) {
        self.implies(a, b);
        self.implies(b, a);
    }

    /// Side `s` must satisfy value(hi) > value(lo), or ≥ when `strict` is
    /// false.
    fn at_least(&mut self, s: Side, hi: usize, lo: usize, strict: bool) {
        for (i, c) in self.set(s, lo).clone().iter().enumerate() {
            let hi_set = self.set(s, hi);
            let k = if strict {
                hi_set.first_above(c)
            } else {
                hi_set.first_at_least(c)
            };
            self.implies((self.g(s, lo, i), true), (self.g(s, hi, k), true));
        }
    }

    /// Both positions are determinate on side `fixed`; reproduce their order
    /// on the other side.
    fn same_order(&mut self, fixed: Side, alpha: usize, beta: usize) {
        let free = match fixed {
            Side::X => Side::Y,
            Side::Y => Side::X,
        };
        let a = self.set(fixed, alpha).min();
        let b = self.set(fixed, beta).min();
        match a.cmp(&b) {
            std::cmp::Ordering::Greater => self.at_least(free, alpha, beta, true),
            std::cmp::Ordering::Less => self.at_least(free, beta, alpha, true),
            std::cmp::Ordering::Equal => {
                self.at_least(free, alpha, beta, false);
                self.at_least(free, beta, alpha, false);
            }
        }
    }

    /// `x` fixed to `a` at α, `y` fixed to `b` at β.
    fn crossed(&mut self, alpha: usize, beta: usize) {
        let a = self.inst.x[alpha].min();
        let b = self.inst.y[beta].min();
        let xb = &self.inst.x[beta];
        let ya = &self.inst.y[alpha];
        let (i_gt, i_ge) = (xb.first_above(a), xb.first_at_least(a));
        let (j_gt, j_ge) = (ya.first_above(b), ya.first_at_least(b));
        // x[β] > a ⇔ y[α] < b
        self.iff(
            (self.g(Side::X, beta, i_gt), true),
            (self.g(Side::Y, alpha, j_ge), false),
        );
        // x[β] ≥ a ⇔ y[α] ≤ b
        self.iff(
            (self.g(Side::X, beta, i_ge), true),
            (self.g(Side::Y, alpha, j_gt), false),
        );
    }
}

fn chain(set: &[CharSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.len()).filter(|&p| set[p].is_singleton()).collect();
    order.sort_by_key(|&p| set[p].min());
    order
}

pub fn encode_alternate(inst: &AlternateInstance, opts: AlternateOptions) -> AlternateEncoding {
    let n = inst.x.len();
    let mut formula = CnfFormula::new(0);
    let mut keys = Vec::new();
    let mut groups = Vec::with_capacity(n);
    for i in 0..n {
        let (side, set) = if inst.x[i].is_singleton() {
            (Side::Y, &inst.y[i])
        } else {
            (Side::X, &inst.x[i])
        };
        let start = formula.num_vars() + 1;
        for k in 0..set.len() {
            formula.new_var(format!("g s={} i={i} k={k}", side.name()));
            keys.push(ThresholdVarKey { side, i, k });
        }
        groups.push((side, start..formula.num_vars() + 1));
    }

    let mut b = Builder {
        inst,
        groups,
        formula,
        seen: HashSet::new(),
        contradiction: false,
    };
    for p in 0..n {
        let vars = b.groups[p].1.clone();
        for v in vars.start + 1..vars.end {
            b.implies((G::Var(v), true), (G::Var(v - 1), true));
        }
    }
    for p in 0..n {
        let v = b.groups[p].1.start;
        b.clause([(G::Var(v), true), (G::Var(v), true)]);
    }

    if opts.adjacency {
        for (fixed, order) in [(Side::X, chain(&inst.x)), (Side::Y, chain(&inst.y))] {
            for w in order.windows(2) {
                b.same_order(fixed, w[1], w[0]);
            }
        }
    }
    for alpha in 0..n {
        for beta in 0..n {
            if alpha == beta {
                continue;
            }
            let (xa, xb) = (inst.x[alpha].is_singleton(), inst.x[beta].is_singleton());
            let (ya, yb) = (inst.y[alpha].is_singleton(), inst.y[beta].is_singleton());
            if alpha < beta && !opts.adjacency {
                if xa && xb {
                    b.same_order(Side::X, alpha, beta);
                }
                if ya && yb {
                    b.same_order(Side::Y, alpha, beta);
                }
            }
            if xa && !ya && !xb && yb {
                b.crossed(alpha, beta);
            }
        }
    }

    if b.contradiction {
        b.formula.add_clause(vec![Lit::pos(1)]).unwrap();
        b.formula.add_clause(vec![Lit::neg(1)]).unwrap();
    }
    AlternateEncoding {
        formula: b.formula,
        keys,
        groups: b.groups,
    }
}

/// Reads each position's choice (largest true threshold) out of `model` and
/// expands it back to the original positions.
pub fn extract_alternate(
    inst: &AlternateInstance,
    enc: &AlternateEncoding,
    model: &Model,
) -> Result<Witness> {
    let mut xs = Vec::with_capacity(inst.x.len());
    let mut ys = Vec::with_capacity(inst.y.len());
    for (p, (side, vars)) in enc.groups.iter().enumerate() {
        let values: Vec<bool> = vars.clone().map(|v| model.value(v)).collect();
        let k = values.iter().take_while(|&&t| t).count();
        if k == 0 || values[k..].iter().any(|&t| t) {
            return Err(Error::Decode {
                position: p,
                message: "threshold variables are not downward closed".into(),
            });
        }
        let (x, y) = match side {
            Side::X => (inst.x[p].chars()[k - 1], inst.y[p].min()),
            Side::Y => (inst.x[p].min(), inst.y[p].chars()[k - 1]),
        };
        xs.push(x);
        ys.push(y);
    }
    let x: Vec<i64> = inst.remap.iter().map(|&q| xs[q]).collect();
    let y: Vec<i64> = inst.remap.iter().map(|&q| ys[q]).collect();
    if !op_iso(&x, &y)? {
        return Err(Error::Decode {
            position: 0,
            message: "extracted assignment is not order-isomorphic".into(),
        });
    }
    Ok(Witness {
        x: Assignment(x),
        y: Assignment(y),
    })
}

/// Preprocessing, pair check, encoding, 2SAT and extraction.
pub fn match_alternate(
    x: &[CharSet],
    y: &[CharSet],
    opts: AlternateOptions,
) -> Result<Option<Witness>> {
    let inst = match preprocess_alternate(x, y)? {
        Preprocessed::NoMatch => return Ok(None),
        Preprocessed::Instance(inst) => inst,
    };
    if !opts.skip_pair_check {
        let n = inst.x.len();
        for alpha in 0..n {
            for beta in alpha + 1..n {
                if !check_pair(&inst.x, &inst.y, alpha, beta) {
                    return Ok(None);
                }
            }
        }
    }
    let enc = encode_alternate(&inst, opts);
    match solve_2sat(&enc.formula)?.model {
        None => Ok(None),
        Some(model) => {
            let w = extract_alternate(&inst, &enc, &model)?;
            debug_assert!(w.x.is_valid_for(x) && w.y.is_valid_for(y));
            Ok(Some(w))
        }
    }
}
