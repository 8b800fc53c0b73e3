//! Brute-force ground truth and seeded instance generators.
//!
//! Two determinate strings are order-isomorphic exactly when their dense-rank
//! vectors coincide, so a pair of indeterminate strings matches iff some
//! assignment of `x` and some assignment of `y` share a rank vector. The
//! oracle enumerates every assignment of both strings, nothing more.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corestr::{assignment_count, Assignment, CharSet, IndetString};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// A pair of valid assignments demonstrating an order-preserving match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub x: Assignment,
    pub y: Assignment,
}

impl Witness {
    pub fn swapped(self) -> Witness {
        Witness {
            x: self.y,
            y: self.x,
        }
    }
}

/// Dense ranks: each value replaced by the number of distinct smaller values.
pub fn rank_signature(values: &[i64]) -> Vec<u32> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    values
        .iter()
        .map(|v| sorted.binary_search(v).unwrap() as u32)
        .collect()
}

/// Calls `f` on every valid assignment, positions left to right, characters
/// ascending (the last position varies fastest). Stops when `f` returns true.
pub fn for_each_assignment(s: &[CharSet], mut f: impl FnMut(&[i64]) -> bool) {
    if s.is_empty() {
        f(&[]);
        return;
    }
    let mut idx = vec![0usize; s.len()];
    let mut cur: Vec<i64> = s.iter().map(CharSet::min).collect();
    loop {
        if f(&cur) {
            return;
        }
        let mut p = s.len();
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < s[p].len() {
                cur[p] = s[p].chars()[idx[p]];
                break;
            }
            idx[p] = 0;
            cur[p] = s[p].min();
        }
    }
}

/// Does some assignment of `x` op-match some assignment of `y`?
///
/// Returns the first witness in x-major enumeration order. The budget bounds
/// the total number of enumerated assignments, `|A(x)| + |A(y)|`.
pub fn oracle_match(x: &[CharSet], y: &[CharSet], budget: u128) -> Result<Option<Witness>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let needed = assignment_count(x).saturating_add(assignment_count(y));
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let mut first_y: HashMap<Vec<u32>, Vec<i64>> = HashMap::new();
    for_each_assignment(y, |a| {
        first_y
            .entry(rank_signature(a))
            .or_insert_with(|| a.to_vec());
        false
    });

    let mut found = None;
    for_each_assignment(x, |a| {
        if let Some(b) = first_y.get(&rank_signature(a)) {
            found = Some(Witness {
                x: Assignment(a.to_vec()),
                y: Assignment(b.clone()),
            });
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// All window starts `i` with `oracle_match(p, t[i..i+m])`.
pub fn oracle_search(p: &[CharSet], t: &[CharSet], budget: u128) -> Result<Vec<usize>> {
    if p.len() > t.len() {
        return Err(Error::PatternTooLong {
            pattern: p.len(),
            text: t.len(),
        });
    }
    let m = p.len();
    let mut out = Vec::new();
    for i in 0..=t.len() - m {
        if oracle_match(p, &t[i..i + m], budget)?.is_some() {
            out.push(i);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// First string indeterminate, second determinate.
    OneIndet,
    BothIndet,
    /// Both may be indeterminate, never at the same index.
    Alternate,
    Determinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceGenSpec {
    pub m: usize,
    pub r_max: usize,
    pub alphabet_size: u32,
    pub seed: u64,
    pub mode: GenMode,
}

fn random_set(rng: &mut ChaCha8Rng, r_max: usize, alphabet: u32) -> CharSet {
    let r = rng.gen_range(1..=r_max);
    let chars = (0..r).map(|_| rng.gen_range(0..alphabet) as i64).collect();
    CharSet::new(chars).expect("r >= 1")
}

fn random_char(rng: &mut ChaCha8Rng, alphabet: u32) -> CharSet {
    CharSet::singleton(rng.gen_range(0..alphabet) as i64)
}

/// A reproducible random pair of equal-length strings.
///
/// # Panics
///
/// If `m`, `r_max` or `alphabet_size` is zero.
pub fn gen_instance(spec: &InstanceGenSpec) -> (IndetString, IndetString) {
    assert!(spec.m >= 1 && spec.r_max >= 1 && spec.alphabet_size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (r, a) = (spec.r_max, spec.alphabet_size);
    let mut x = Vec::with_capacity(spec.m);
    let mut y = Vec::with_capacity(spec.m);
    for _ in 0..spec.m {
        match spec.mode {
            GenMode::OneIndet => {
                x.push(random_set(&mut rng, r, a));
                y.push(random_char(&mut rng, a));
            }
            GenMode::BothIndet => {
                x.push(random_set(&mut rng, r, a));
                y.push(random_set(&mut rng, r, a));
            }
            GenMode::Alternate => {
                if rng.gen_bool(0.5) {
                    x.push(random_set(&mut rng, r, a));
                    y.push(random_char(&mut rng, a));
                } else {
                    x.push(random_char(&mut rng, a));
                    y.push(random_set(&mut rng, r, a));
                }
            }
            GenMode::Determinate => {
                x.push(random_char(&mut rng, a));
                y.push(random_char(&mut rng, a));
            }
        }
    }
    (IndetString::new(x), IndetString::new(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corestr::{op_iso, parse_string};

    fn s(text: &str) -> IndetString {
        parse_string(text).unwrap()
    }

    #[test]
    fn intro_witness_is_first_in_enumeration_order() {
        let w = oracle_match(&s("1 2|5 3 3"), &s("2 5 3 3"), DEFAULT_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(w.x.0, vec![1, 5, 3, 3]);
        assert_eq!(w.y.0, vec![2, 5, 3, 3]);
    }

    #[test]
    fn three_position_instance_matches() {
        let w = oracle_match(&s("2 1|3 3"), &s("2 0 3|4"), DEFAULT_BUDGET).unwrap();
        assert!(w.is_some());
        assert!(oracle_match(&s("1"), &s("9"), DEFAULT_BUDGET)
            .unwrap()
            .is_some());
    }

    #[test]
    fn search_examples() {
        assert_eq!(
            oracle_search(&s("1 5 3 3"), &s("5 1 4 2 2 5 2 4"), DEFAULT_BUDGET).unwrap(),
            vec![1]
        );
        assert_eq!(
            oracle_search(&s("1 2|5 3 3"), &s("5 0 1 1|2 2 5 2|3 3|4"), DEFAULT_BUDGET).unwrap(),
            vec![1, 4]
        );
        assert_eq!(
            oracle_search(&s("3|4"), &s("1 2|9 3"), DEFAULT_BUDGET).unwrap(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            oracle_match(&s("1 2"), &s("1"), DEFAULT_BUDGET),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            oracle_match(&s("1|2|3 1|2|3"), &s("1 2"), 5),
            Err(Error::BudgetExceeded {
                needed: 10,
                budget: 5
            })
        ));
        assert!(matches!(
            oracle_search(&s("1 2 3"), &s("1 2"), DEFAULT_BUDGET),
            Err(Error::PatternTooLong { .. })
        ));
    }

    #[test]
    fn enumeration_order() {
        let mut seen = Vec::new();
        for_each_assignment(&s("1|2 3|4"), |a| {
            seen.push(a.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]);
    }

    #[test]
    fn generator_is_deterministic_and_respects_modes() {
        for seed in 0..200 {
            for mode in [
                GenMode::OneIndet,
                GenMode::BothIndet,
                GenMode::Alternate,
                GenMode::Determinate,
            ] {
                let spec = InstanceGenSpec {
                    m: 6,
                    r_max: 3,
                    alphabet_size: 5,
                    seed,
                    mode,
                };
                let (x, y) = gen_instance(&spec);
                assert_eq!((x.clone(), y.clone()), gen_instance(&spec));
                assert_eq!(x.len(), 6);
                assert_eq!(y.len(), 6);
                match mode {
                    GenMode::OneIndet => assert!(y.is_determinate()),
                    GenMode::Determinate => assert!(x.is_determinate() && y.is_determinate()),
                    GenMode::Alternate => {
                        assert!(x
                            .iter()
                            .zip(y.iter())
                            .all(|(a, b)| a.len() == 1 || b.len() == 1))
                    }
                    GenMode::BothIndet => {}
                }
                assert!(x
                    .iter()
                    .chain(y.iter())
                    .all(|c| c.max() < 5 && c.min() >= 0));
            }
        }
    }

    /// Quadratic witness search over assignment pairs, used to cross-check
    /// the rank-signature shortcut.
    fn pairwise(x: &[CharSet], y: &[CharSet]) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut xs = Vec::new();
        for_each_assignment(x, |a| {
            xs.push(a.to_vec());
            false
        });
        let mut ys = Vec::new();
        for_each_assignment(y, |a| {
            ys.push(a.to_vec());
            false
        });
        for a in &xs {
            for b in &ys {
                if op_iso(a, b).unwrap() {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        None
    }

    #[test]
    fn signature_shortcut_agrees_with_pairwise_enumeration() {
        for seed in 0..3000 {
            let spec = InstanceGenSpec {
                m: 1 + (seed as usize % 5),
                r_max: 3,
                alphabet_size: 5,
                seed,
                mode: GenMode::BothIndet,
            };
            let (x, y) = gen_instance(&spec);
            let fast = oracle_match(&x, &y, DEFAULT_BUDGET)
                .unwrap()
                .map(|w| (w.x.0, w.y.0));
            assert_eq!(fast, pairwise(&x, &y), "seed {seed}");
        }
    }

    #[test]
    fn symmetric_and_monotone_and_determinate_reduces_to_op_iso() {
        for seed in 0..2000 {
            let spec = InstanceGenSpec {
                m: 1 + (seed as usize % 5),
                r_max: 3,
                alphabet_size: 6,
                seed,
                mode: GenMode::BothIndet,
            };
            let (x, y) = gen_instance(&spec);
            let forward = oracle_match(&x, &y, DEFAULT_BUDGET).unwrap().is_some();
            let backward = oracle_match(&y, &x, DEFAULT_BUDGET).unwrap().is_some();
            assert_eq!(forward, backward);

            // adding a character never destroys a match
            let mut grown = x.clone().into_positions();
            let p = seed as usize % grown.len();
            let mut chars = grown[p].chars().to_vec();
            chars.push(7);
            grown[p] = CharSet::new(chars).unwrap();
            if forward {
                assert!(oracle_match(&grown, &y, DEFAULT_BUDGET).unwrap().is_some());
            }

            let det = gen_instance(&InstanceGenSpec {
                mode: GenMode::Determinate,
                ..spec
            });
            let a = det.0.as_determinate().unwrap();
            let b = det.1.as_determinate().unwrap();
            assert_eq!(
                oracle_match(&det.0, &det.1, DEFAULT_BUDGET)
                    .unwrap()
                    .is_some(),
                op_iso(&a, &b).unwrap()
            );
        }
    }
}
