//! Full-text search with a rise/fall filter.
//!
//! Both pattern and text are reduced to one symbol per adjacent pair:
//! `One` when the pair surely rises, `Zero` when it surely does not, `Star`
//! when the choice of characters decides. A window can only op-match if its
//! symbols are compatible with the pattern's, so exact matching with
//! wildcards yields the candidate windows, which are then verified one by
//! one.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;

use crate::alternate::{is_alternating, match_alternate, AlternateOptions};
use crate::cnf::{solve, solve_dpll};
use crate::corestr::{is_determinate, CharSet};
use crate::error::{Error, Result};
use crate::oracle::{oracle_match, Witness, DEFAULT_BUDGET};
use crate::satencode::{decode_eq1, decode_eq2, encode_eq1, encode_eq2};
use crate::verify::{verify_greedy, verify_lis};
use crate::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trit {
    Zero,
    One,
    Star,
}

impl Trit {
    pub fn compatible(self, other: Trit) -> bool {
        self == other || self == Trit::Star || other == Trit::Star
    }

    fn symbol(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::Star => '*',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedString(pub Vec<Trit>);

impl fmt::Display for EncodedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|t| write!(f, "{}", t.symbol()))
    }
}

pub fn encode_pair(a: &CharSet, b: &CharSet) -> Trit {
    if a.max() < b.min() {
        Trit::One
    } else if a.min() >= b.max() {
        Trit::Zero
    } else {
        Trit::Star
    }
}

pub fn encode_binary(s: &[CharSet]) -> Result<EncodedString> {
    if s.len() < 2 {
        return Err(Error::TooShortToEncode(s.len()));
    }
    Ok(EncodedString(
        s.windows(2).map(|w| encode_pair(&w[0], &w[1])).collect(),
    ))
}

/// Incremental wildcard matcher: feed text symbols one at a time and learn
/// whether the last `p.len()` of them match the pattern.
#[derive(Debug, Clone)]
pub enum WildcardMatcher {
    ShiftAnd {
        masks: [u64; 3],
        state: u64,
        accept: u64,
    },
    Naive {
        pattern: Vec<Trit>,
        recent: VecDeque<Trit>,
    },
}

impl WildcardMatcher {
    /// # Panics
    ///
    /// On an empty pattern.
    pub fn new(p: &[Trit]) -> Self {
        assert!(!p.is_empty());
        if p.len() <= 64 {
            let mut masks = [0u64; 3];
            for (c, mask) in [Trit::Zero, Trit::One, Trit::Star]
                .into_iter()
                .zip(&mut masks)
            {
                for (k, &q) in p.iter().enumerate() {
                    if q.compatible(c) {
                        *mask |= 1 << k;
                    }
                }
            }
            WildcardMatcher::ShiftAnd {
                masks,
                state: 0,
                accept: 1 << (p.len() - 1),
            }
        } else {
            WildcardMatcher::Naive {
                pattern: p.to_vec(),
                recent: VecDeque::with_capacity(p.len()),
            }
        }
    }

    pub fn push(&mut self, c: Trit) -> bool {
        match self {
            WildcardMatcher::ShiftAnd {
                masks,
                state,
                accept,
            } => {
                *state = ((*state << 1) | 1) & masks[c as usize];
                *state & *accept != 0
            }
            WildcardMatcher::Naive { pattern, recent } => {
                if recent.len() == pattern.len() {
                    recent.pop_front();
                }
                recent.push_back(c);
                recent.len() == pattern.len()
                    && pattern
                        .iter()
                        .zip(recent.iter())
                        .all(|(a, &b)| a.compatible(b))
            }
        }
    }
}

/// Every alignment `i` with `p` compatible with `t[i..i + p.len()]`.
pub fn wildcard_match(p: &[Trit], t: &[Trit]) -> Vec<usize> {
    if p.is_empty() {
        return (0..=t.len()).collect();
    }
    let mut m = WildcardMatcher::new(p);
    t.iter()
        .enumerate()
        .filter(|&(_, &c)| m.push(c))
        .map(|(j, _)| j + 1 - p.len())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Auto,
    Greedy,
    Lis,
    Eq1,
    Eq2,
    Alternate,
    /// Greedy verification of every window, ignoring the filter.
    Naive,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Auto,
        Method::Greedy,
        Method::Lis,
        Method::Eq1,
        Method::Eq2,
        Method::Alternate,
        Method::Naive,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Greedy => "greedy",
            Method::Lis => "lis",
            Method::Eq1 => "eq1",
            Method::Eq2 => "eq2",
            Method::Alternate => "alternate",
            Method::Naive => "naive",
            Method::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub matched: bool,
    /// Present for every method except `lis`.
    pub witness: Option<Witness>,
    /// The verifier that actually ran (`auto` resolved).
    pub method: Method,
}

/// The verifier `auto` picks for a pair of equal-length strings.
pub fn route(x: &[CharSet], y: &[CharSet]) -> Method {
    if is_determinate(x) || is_determinate(y) {
        Method::Greedy
    } else if is_alternating(x, y) {
        Method::Alternate
    } else {
        Method::Eq2
    }
}

fn shape(method: Method, reason: &str) -> Error {
    Error::MethodShape {
        method: method.name(),
        reason: reason.into(),
    }
}

/// Runs `f(det, other)` with whichever side is determinate and maps the
/// witness back to `(x, y)` order.
fn one_determinate(
    x: &[CharSet],
    y: &[CharSet],
    method: Method,
    f: impl FnOnce(&[CharSet], &[CharSet]) -> Result<Option<Assignment>>,
) -> Result<Option<Witness>> {
    let det = |s: &[CharSet]| Assignment(s.iter().map(CharSet::min).collect());
    if is_determinate(x) {
        Ok(f(x, y)?.map(|a| Witness { x: det(x), y: a }))
    } else if is_determinate(y) {
        Ok(f(y, x)?.map(|a| Witness { x: a, y: det(y) }))
    } else {
        Err(shape(method, "needs one determinate string"))
    }
}

/// Decides whether equal-length `x` and `y` op-match.
pub fn verify_pair(x: &[CharSet], y: &[CharSet], method: Method, budget: u128) -> Result<Verdict> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let method = match method {
        Method::Auto => route(x, y),
        m => m,
    };
    let witness = match method {
        Method::Auto => unreachable!(),
        Method::Greedy | Method::Naive => one_determinate(x, y, method, verify_greedy)?,
        Method::Lis => {
            let matched = if is_determinate(x) {
                verify_lis(x, y)?
            } else if is_determinate(y) {
                verify_lis(y, x)?
            } else {
                return Err(shape(method, "needs one determinate string"));
            };
            return Ok(Verdict {
                matched,
                witness: None,
                method,
            });
        }
        Method::Eq1 => one_determinate(x, y, method, |d, s| {
            let enc = encode_eq1(d, s)?;
            match solve(&enc.formula)?.0.model {
                Some(model) => decode_eq1(d, &enc, &model).map(Some),
                None => Ok(None),
            }
        })?,
        Method::Eq2 => {
            let enc = encode_eq2(x, y)?;
            match solve_dpll(&enc.formula)?.model {
                Some(model) => {
                    let (a, b) = decode_eq2(&enc, &model)?;
                    Some(Witness { x: a, y: b })
                }
                None => None,
            }
        }
        Method::Alternate => match_alternate(x, y, AlternateOptions::default())?,
        Method::Oracle => oracle_match(x, y, budget)?,
    };
    Ok(Verdict {
        matched: witness.is_some(),
        witness,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub method: Method,
    pub use_filter: bool,
    /// Oracle enumeration budget.
    pub budget: u128,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            method: Method::Auto,
            use_filter: true,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub windows_total: usize,
    pub candidates_after_filter: usize,
    pub verified_matches: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    /// Start of the window in the text.
    pub start: usize,
    pub witness: Option<Witness>,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchReport {
    pub matches: Vec<Match>,
    /// Window starts that survived the filter (all windows without it).
    pub candidates: Vec<usize>,
    pub stats: SearchStats,
}

impl MatchReport {
    pub fn positions(&self) -> Vec<usize> {
        self.matches.iter().map(|m| m.start).collect()
    }
}

fn check_search_shape(p: &[CharSet], n: usize) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    if p.len() > n {
        return Err(Error::PatternTooLong {
            pattern: p.len(),
            text: n,
        });
    }
    Ok(())
}

fn filtering(p: &[CharSet], opts: &SearchOptions) -> bool {
    opts.use_filter && opts.method != Method::Naive && p.len() >= 2
}

/// All window starts where `p` op-matches `t`, ascending. Candidate windows
/// are verified in parallel.
pub fn search(p: &[CharSet], t: &[CharSet], opts: SearchOptions) -> Result<MatchReport> {
    check_search_shape(p, t.len())?;
    let m = p.len();
    let windows_total = t.len() - m + 1;
    let candidates = if filtering(p, &opts) {
        wildcard_match(&encode_binary(p)?.0, &encode_binary(t)?.0)
    } else {
        (0..windows_total).collect()
    };
    let verdicts: Vec<Verdict> = candidates
        .par_iter()
        .map(|&i| verify_pair(p, &t[i..i + m], opts.method, opts.budget))
        .collect::<Result<_>>()?;
    let matches: Vec<Match> = candidates
        .iter()
        .zip(verdicts)
        .filter(|(_, v)| v.matched)
        .map(|(&start, v)| Match {
            start,
            witness: v.witness,
            method: v.method,
        })
        .collect();
    Ok(MatchReport {
        stats: SearchStats {
            windows_total,
            candidates_after_filter: candidates.len(),
            verified_matches: matches.len(),
        },
        matches,
        candidates,
    })
}

/// Search over a text that arrives one position at a time, keeping only
/// the last `m` positions.
#[derive(Debug, Clone)]
pub struct StreamSearcher {
    pattern: Vec<CharSet>,
    opts: SearchOptions,
    matcher: Option<WildcardMatcher>,
    window: VecDeque<CharSet>,
    seen: usize,
    stats: SearchStats,
}

impl StreamSearcher {
    pub fn new(pattern: Vec<CharSet>, opts: SearchOptions) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::EmptyInput);
        }
        let matcher = if filtering(&pattern, &opts) {
            Some(WildcardMatcher::new(&encode_binary(&pattern)?.0))
        } else {
            None
        };
        Ok(StreamSearcher {
            window: VecDeque::with_capacity(pattern.len()),
            pattern,
            opts,
            matcher,
            seen: 0,
            stats: SearchStats::default(),
        })
    }

    /// Appends one text position; returns the match ending here, if any.
    pub fn push(&mut self, c: CharSet) -> Result<Option<Match>> {
        let m = self.pattern.len();
        let trit = self.window.back().map(|prev| encode_pair(prev, &c));
        if self.window.len() == m {
            self.window.pop_front();
        }
        self.window.push_back(c);
        self.seen += 1;
        let hit = match (&mut self.matcher, trit) {
            (Some(matcher), Some(t)) => matcher.push(t),
            (Some(_), None) => false,
            (None, _) => true,
        };
        if self.window.len() < m {
            return Ok(None);
        }
        self.stats.windows_total += 1;
        if !hit {
            return Ok(None);
        }
        self.stats.candidates_after_filter += 1;
        let window: Vec<CharSet> = self.window.iter().cloned().collect();
        let v = verify_pair(&self.pattern, &window, self.opts.method, self.opts.budget)?;
        if !v.matched {
            return Ok(None);
        }
        self.stats.verified_matches += 1;
        Ok(Some(Match {
            start: self.seen - m,
            witness: v.witness,
            method: v.method,
        }))
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Fails when fewer text positions than pattern positions arrived.
    pub fn finish(self) -> Result<SearchStats> {
        check_search_shape(&self.pattern, self.seen)?;
        Ok(self.stats)
    }
}
