//! Order contexts: for each position, the earlier positions whose characters
//! constrain it.

use crate::corestr::{determinate_chars, CharSet};
use crate::error::Result;

/// Nearest-value contexts of a determinate string.
///
/// `leq[i]` is the latest earlier position with an equal character. When it
/// exists it determines every relation of `i`, and `lmax[i]`/`lmin[i]` are left
/// empty. Otherwise `lmax[i]` is the earlier position holding the largest
/// smaller character and `lmin[i]` the one holding the smallest larger
/// character, ties going to the latest index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetOrderContext {
    pub leq: Vec<Option<usize>>,
    pub lmax: Vec<Option<usize>>,
    pub lmin: Vec<Option<usize>>,
}

impl DetOrderContext {
    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }
}

/// For each `q`, the nearest `p < q` with `seq[p] < seq[q]`.
fn nearest_smaller_to_left(seq: &[usize]) -> Vec<Option<usize>> {
    let mut out = vec![None; seq.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (q, &v) in seq.iter().enumerate() {
        while stack.last().is_some_and(|&p| seq[p] >= v) {
            stack.pop();
        }
        out[q] = stack.last().copied();
        stack.push(q);
    }
    out
}

/// Builds the determinate contexts from two sorted orders of the positions.
///
/// In ascending order (character, then index), the nearest entry to the left
/// of `i` with a smaller index is the latest position holding the largest
/// character not above `x[i]`: an equal character gives `leq`, a smaller one
/// gives `lmax`. The descending order (character descending, index
/// ascending) gives `lmin` the same way.
pub fn det_context(x: &[CharSet]) -> Result<DetOrderContext> {
    let chars = determinate_chars(x)?;
    let m = chars.len();
    let mut leq = vec![None; m];
    let mut lmax = vec![None; m];
    let mut lmin = vec![None; m];

    let mut asc: Vec<usize> = (0..m).collect();
    asc.sort_by_key(|&i| chars[i]);
    for (q, p) in nearest_smaller_to_left(&asc).into_iter().enumerate() {
        let i = asc[q];
        if let Some(p) = p {
            let k = asc[p];
            if chars[k] == chars[i] {
                leq[i] = Some(k);
            } else {
                lmax[i] = Some(k);
            }
        }
    }

    let mut desc: Vec<usize> = (0..m).collect();
    desc.sort_by_key(|&i| std::cmp::Reverse(chars[i]));
    for (q, p) in nearest_smaller_to_left(&desc).into_iter().enumerate() {
        let i = desc[q];
        if let Some(p) = p {
            let k = desc[p];
            if chars[k] != chars[i] {
                lmin[i] = Some(k);
            }
        }
    }

    for i in 0..m {
        if leq[i].is_some() {
            lmax[i] = None;
            lmin[i] = None;
        }
    }
    Ok(DetOrderContext { leq, lmax, lmin })
}

/// Contexts of one character of an indeterminate string: every earlier
/// position holding some equal / smaller / larger character.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CharContext {
    pub leq: Vec<usize>,
    pub lmax: Vec<usize>,
    pub lmin: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndetOrderContext {
    /// `entries[i][j]` belongs to the `j`-th smallest character of position `i`.
    pub entries: Vec<Vec<CharContext>>,
}

impl IndetOrderContext {
    pub fn get(&self, i: usize, j: usize) -> &CharContext {
        &self.entries[i][j]
    }
}

pub fn indet_context(x: &[CharSet]) -> IndetOrderContext {
    let entries = x
        .iter()
        .enumerate()
        .map(|(i, set)| {
            set.iter()
                .map(|c| {
                    let mut ctx = CharContext::default();
                    for (k, earlier) in x[..i].iter().enumerate() {
                        if earlier.contains(c) {
                            ctx.leq.push(k);
                        }
                        if c > earlier.min() {
                            ctx.lmax.push(k);
                        }
                        if c < earlier.max() {
                            ctx.lmin.push(k);
                        }
                    }
                    ctx
                })
                .collect()
        })
        .collect();
    IndetOrderContext { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corestr::{parse_string, IndetString};
    use crate::oracle::{gen_instance, GenMode, InstanceGenSpec};

    fn s(text: &str) -> IndetString {
        parse_string(text).unwrap()
    }

    /// Direct quadratic evaluation of the nearest-value contexts.
    fn quadratic(chars: &[i64]) -> DetOrderContext {
        let m = chars.len();
        let mut ctx = DetOrderContext {
            leq: vec![None; m],
            lmax: vec![None; m],
            lmin: vec![None; m],
        };
        for i in 0..m {
            ctx.leq[i] = (0..i).rev().find(|&k| chars[k] == chars[i]);
            if ctx.leq[i].is_some() {
                continue;
            }
            ctx.lmax[i] = (0..i)
                .filter(|&k| chars[k] < chars[i])
                .max_by_key(|&k| (chars[k], k));
            ctx.lmin[i] = (0..i)
                .filter(|&k| chars[k] > chars[i])
                .min_by_key(|&k| (chars[k], std::cmp::Reverse(k)));
        }
        ctx
    }

    #[test]
    fn repeated_values_clear_extremes() {
        let ctx = det_context(&s("1 4 3 1")).unwrap();
        assert_eq!(ctx.leq, vec![None, None, None, Some(0)]);
        assert_eq!(ctx.lmax, vec![None, Some(0), Some(0), None]);
        assert_eq!(ctx.lmin, vec![None, None, Some(1), None]);
    }

    #[test]
    fn monotone_and_constant() {
        let ctx = det_context(&s("1 3 5 8")).unwrap();
        assert_eq!(ctx.lmax, vec![None, Some(0), Some(1), Some(2)]);
        assert!(ctx.leq.iter().chain(&ctx.lmin).all(Option::is_none));

        let ctx = det_context(&s("4 4 4")).unwrap();
        assert_eq!(ctx.leq, vec![None, Some(0), Some(1)]);
        assert!(ctx.lmax.iter().chain(&ctx.lmin).all(Option::is_none));
    }

    #[test]
    fn ties_go_to_latest_index() {
        let ctx = det_context(&s("2 2 5 7 7 4")).unwrap();
        // position 2: largest smaller is 2, at 0 and 1 -> 1
        assert_eq!(ctx.lmax[2], Some(1));
        // position 5 (4): largest smaller 2 -> 1, smallest larger 5 -> 2
        assert_eq!(ctx.lmax[5], Some(1));
        assert_eq!(ctx.lmin[5], Some(2));
        let ctx = det_context(&s("9 7 7 3")).unwrap();
        assert_eq!(ctx.lmin[3], Some(2));
    }

    #[test]
    fn det_context_matches_quadratic_definition() {
        for seed in 0..5000 {
            let (x, _) = gen_instance(&InstanceGenSpec {
                m: 1 + seed as usize % 8,
                r_max: 1,
                alphabet_size: 1 + (seed % 6) as u32,
                seed,
                mode: GenMode::Determinate,
            });
            let chars = x.as_determinate().unwrap();
            assert_eq!(det_context(&x).unwrap(), quadratic(&chars), "{chars:?}");
        }
    }

    #[test]
    fn indeterminate_contexts_example() {
        let ctx = indet_context(&s("2 1|3 3"));
        assert_eq!(ctx.get(0, 0), &CharContext::default());
        assert_eq!(ctx.get(1, 0).lmin, vec![0]);
        assert!(ctx.get(1, 0).lmax.is_empty());
        assert_eq!(ctx.get(1, 1).lmax, vec![0]);
        assert!(ctx.get(1, 1).lmin.is_empty());
        assert_eq!(ctx.get(2, 0).leq, vec![1]);
        assert_eq!(ctx.get(2, 0).lmax, vec![0, 1]);
        assert!(ctx.get(2, 0).lmin.is_empty());

        let single = indet_context(&s("5|6"));
        assert!(single.entries[0]
            .iter()
            .all(|c| *c == CharContext::default()));
    }

    #[test]
    fn indet_context_on_determinate_strings() {
        for seed in 0..10_000 {
            let (x, _) = gen_instance(&InstanceGenSpec {
                m: 1 + seed as usize % 8,
                r_max: 1,
                alphabet_size: 5,
                seed,
                mode: GenMode::Determinate,
            });
            let chars = x.as_determinate().unwrap();
            let all = indet_context(&x);
            let near = det_context(&x).unwrap();
            for i in 0..chars.len() {
                let c = all.get(i, 0);
                let eq: Vec<usize> = (0..i).filter(|&k| chars[k] == chars[i]).collect();
                let lt: Vec<usize> = (0..i).filter(|&k| chars[k] < chars[i]).collect();
                let gt: Vec<usize> = (0..i).filter(|&k| chars[k] > chars[i]).collect();
                assert_eq!(c.leq, eq);
                assert_eq!(c.lmax, lt);
                assert_eq!(c.lmin, gt);
                for (nearest, set) in [
                    (near.leq[i], &c.leq),
                    (near.lmax[i], &c.lmax),
                    (near.lmin[i], &c.lmin),
                ] {
                    if let Some(k) = nearest {
                        assert!(set.contains(&k));
                    }
                }
            }
        }
    }
}
