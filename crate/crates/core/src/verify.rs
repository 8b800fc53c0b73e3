//! Verification of an indeterminate string against a determinate string of
//! the same length.
//!
//! Positions are visited in ascending order of the determinate string `x`.
//! Runs of equal `x` characters must receive one common character in `y`, so
//! their sets are intersected into a group; consecutive groups must then be
//! assigned strictly increasing characters.

use std::ops::Range;

use crate::corestr::{determinate_chars, intersect_sorted, Assignment, CharSet};
use crate::error::{Error, Result};

/// Positions of a determinate string in non-decreasing character order, ties
/// by ascending index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortPermutation(pub Vec<usize>);

/// The intersected sets of `y` along the sort order of `x`, one per distinct
/// character of `x`. A group may be empty, in which case there is no match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedString {
    pub groups: Vec<Vec<i64>>,
    /// Range of permutation indices merged into each group.
    pub group_spans: Vec<Range<usize>>,
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

pub fn sorted_indexes(x: &[CharSet]) -> Result<SortPermutation> {
    Ok(SortPermutation(
        sorted_pairs(x)?.into_iter().map(|(_, i)| i).collect(),
    ))
}

/// `(character, position)` pairs of a determinate string in sorted order.
/// Ties fall in index order, as with a stable sort by character.
fn sorted_pairs(x: &[CharSet]) -> Result<Vec<(i64, usize)>> {
    let mut keyed = x
        .iter()
        .enumerate()
        .map(|(position, c)| {
            if c.is_singleton() {
                Ok((c.min(), position))
            } else {
                Err(Error::NotDeterminate { position })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_unstable();
    Ok(keyed)
}

pub fn group_and_intersect(
    x: &[CharSet],
    y: &[CharSet],
    pi: &SortPermutation,
) -> Result<GroupedString> {
    check_lengths(x, y)?;
    let chars = determinate_chars(x)?;
    let pi = &pi.0;
    let mut groups: Vec<Vec<i64>> = Vec::new();
    let mut group_spans = Vec::new();
    let mut scratch = Vec::new();
    let mut start = 0;
    for k in 0..pi.len() {
        if k > 0 && chars[pi[k]] == chars[pi[k - 1]] {
            let last = groups.last_mut().unwrap();
            intersect_sorted(last, y[pi[k]].chars(), &mut scratch);
            std::mem::swap(last, &mut scratch);
        } else {
            if k > 0 {
                group_spans.push(start..k);
            }
            start = k;
            groups.push(y[pi[k]].chars().to_vec());
        }
    }
    if !pi.is_empty() {
        group_spans.push(start..pi.len());
    }
    Ok(GroupedString {
        groups,
        group_spans,
    })
}

/// Greedy verification. Returns a witness assignment of `y` when `y`
/// op-matches the determinate `x`.
///
/// Each group takes the smallest character above the previous group's choice;
/// groups are intersected on the fly into a reused buffer.
pub fn verify_greedy(x: &[CharSet], y: &[CharSet]) -> Result<Option<Assignment>> {
    check_lengths(x, y)?;
    let pi = sorted_pairs(x)?;
    // Reading y in sort order is a random walk; doing it in a pass of its
    // own lets the loads overlap instead of waiting behind the branches of
    // the scan below.
    let sorted: Vec<CharSet> = pi.iter().map(|&(_, p)| y[p].clone()).collect();

    let mut witness = vec![0i64; y.len()];
    let mut group: Vec<i64> = Vec::new();
    let mut scratch: Vec<i64> = Vec::new();
    let mut next_min: Option<i64> = None;
    let mut start = 0;
    for k in 0..=pi.len() {
        let closes_group = k == pi.len() || (k > 0 && pi[k].0 != pi[k - 1].0);
        if k > 0 && closes_group {
            let from = match next_min {
                None => 0,
                Some(prev) => group.partition_point(|&a| a <= prev),
            };
            let Some(&chosen) = group.get(from) else {
                return Ok(None);
            };
            next_min = Some(chosen);
            for &(_, p) in &pi[start..k] {
                witness[p] = chosen;
            }
            start = k;
        }
        if k == pi.len() {
            break;
        }
        if k == start {
            group.clear();
            group.extend_from_slice(sorted[k].chars());
        } else {
            intersect_sorted(&group, sorted[k].chars(), &mut scratch);
            std::mem::swap(&mut group, &mut scratch);
            if group.is_empty() {
                return Ok(None);
            }
        }
    }
    Ok(Some(Assignment(witness)))
}

/// Length of a longest strictly increasing subsequence (patience sorting).
pub fn lis_length(z: &[i64]) -> usize {
    let mut tails: Vec<i64> = Vec::new();
    for &v in z {
        let pos = tails.partition_point(|&t| t < v);
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
    }
    tails.len()
}

/// The groups concatenated, each in descending order.
pub fn lis_candidate(grouped: &GroupedString) -> Vec<i64> {
    grouped
        .groups
        .iter()
        .flat_map(|g| g.iter().rev().copied())
        .collect()
}

/// Reference check: `y` matches `x` iff the descending-per-group
/// concatenation has a strictly increasing subsequence touching every group.
pub fn verify_lis(x: &[CharSet], y: &[CharSet]) -> Result<bool> {
    let pi = sorted_indexes(x)?;
    let grouped = group_and_intersect(x, y, &pi)?;
    if grouped.groups.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    Ok(lis_length(&lis_candidate(&grouped)) == grouped.groups.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corestr::{op_iso, parse_string, IndetString};

    fn s(text: &str) -> IndetString {
        parse_string(text).unwrap()
    }

    #[test]
    fn sort_permutations() {
        assert_eq!(sorted_indexes(&s("4 1 4 2")).unwrap().0, vec![1, 3, 0, 2]);
        assert_eq!(sorted_indexes(&s("1 4 3 1")).unwrap().0, vec![0, 3, 2, 1]);
        assert_eq!(sorted_indexes(&s("1 2 5 9")).unwrap().0, vec![0, 1, 2, 3]);
        assert_eq!(
            sorted_indexes(&s("1 2|3")),
            Err(Error::NotDeterminate { position: 1 })
        );
    }

    #[test]
    fn grouping_walkthrough() {
        let x = s("4 1 4 2");
        let y = s("2|7 2 7|8 1|4|8");
        let pi = sorted_indexes(&x).unwrap();
        let g = group_and_intersect(&x, &y, &pi).unwrap();
        assert_eq!(g.groups, vec![vec![2], vec![1, 4, 8], vec![7]]);
        assert_eq!(g.group_spans, vec![0..1, 1..2, 2..4]);
        assert_eq!(lis_candidate(&g), vec![2, 8, 4, 1, 7]);
        assert_eq!(lis_length(&lis_candidate(&g)), 3);

        let x = s("1 4 3 1");
        let y = s("2 4|5 3|5 1|2");
        let g = group_and_intersect(&x, &y, &sorted_indexes(&x).unwrap()).unwrap();
        assert_eq!(g.groups, vec![vec![2], vec![3, 5], vec![4, 5]]);

        let x = s("3 3 3");
        let y = s("1|2|3 2|3 3|2|9");
        let g = group_and_intersect(&x, &y, &sorted_indexes(&x).unwrap()).unwrap();
        assert_eq!(g.groups, vec![vec![2, 3]]);
    }

    #[test]
    fn greedy_examples() {
        let w = verify_greedy(&s("4 1 4 2"), &s("2|7 2 7|8 1|4|8"))
            .unwrap()
            .unwrap();
        assert_eq!(w.0, vec![7, 2, 7, 4]);
        assert!(verify_greedy(&s("1 4 3 1"), &s("2 4|5 3|5 1|2"))
            .unwrap()
            .is_some());
        assert!(verify_greedy(&s("1 2"), &s("5 3|4")).unwrap().is_none());
        assert!(verify_greedy(&s("1 1"), &s("1|2 3|4")).unwrap().is_none());
        assert!(matches!(
            verify_greedy(&s("1 2"), &s("1")),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            verify_greedy(&s("1|2 2"), &s("1 2")),
            Err(Error::NotDeterminate { position: 0 })
        ));
    }

    #[test]
    fn lis_examples() {
        assert!(verify_lis(&s("4 1 4 2"), &s("2|7 2 7|8 1|4|8")).unwrap());
        assert!(!verify_lis(&s("1 1"), &s("1 2")).unwrap());
        assert!(!verify_lis(&s("1 2"), &s("5 3|4")).unwrap());
        assert_eq!(lis_length(&[3, 3, 3]), 1);
        assert_eq!(lis_length(&[]), 0);
    }

    #[test]
    fn determinate_inputs_reduce_to_op_iso() {
        use crate::oracle::{gen_instance, GenMode, InstanceGenSpec};
        for seed in 0..10_000 {
            let (x, y) = gen_instance(&InstanceGenSpec {
                m: 1 + seed as usize % 8,
                r_max: 1,
                alphabet_size: 5,
                seed,
                mode: GenMode::Determinate,
            });
            let expected =
                op_iso(&x.as_determinate().unwrap(), &y.as_determinate().unwrap()).unwrap();
            assert_eq!(verify_greedy(&x, &y).unwrap().is_some(), expected);
            assert_eq!(verify_lis(&x, &y).unwrap(), expected);
        }
    }
}
