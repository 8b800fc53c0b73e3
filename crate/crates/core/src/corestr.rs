//! Determinate and indeterminate strings over an integer alphabet.
//!
//! Text format: positions are separated by whitespace or commas, the
//! alternatives of one position by `|`, e.g. `1 2|5 3 3`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// One position of an indeterminate string: a nonempty, strictly ascending
/// set of characters. Up to three characters are stored inline, which keeps
/// long strings in one contiguous allocation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharSet(SmallVec<[i64; 3]>);

impl CharSet {
    /// Canonicalizes `chars` (sort + dedup). Fails on an empty input.
    pub fn new(mut chars: Vec<i64>) -> Option<Self> {
        if chars.is_empty() {
            return None;
        }
        chars.sort_unstable();
        chars.dedup();
        Some(CharSet(chars.into_iter().collect()))
    }

    pub fn singleton(c: i64) -> Self {
        CharSet(smallvec::smallvec![c])
    }

    /// Wraps an already sorted, deduplicated, nonempty vector.
    pub(crate) fn from_sorted(chars: Vec<i64>) -> Self {
        debug_assert!(!chars.is_empty());
        debug_assert!(chars.windows(2).all(|w| w[0] < w[1]));
        CharSet(chars.into_iter().collect())
    }

    pub fn chars(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }

    pub fn min(&self) -> i64 {
        self.0[0]
    }

    pub fn max(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn contains(&self, c: i64) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    /// Index of the smallest character strictly greater than `c`
    /// (`len()` if there is none).
    pub fn first_above(&self, c: i64) -> usize {
        self.0.partition_point(|&a| a <= c)
    }

    /// Index of the smallest character greater than or equal to `c`
    /// (`len()` if there is none).
    pub fn first_at_least(&self, c: i64) -> usize {
        self.0.partition_point(|&a| a < c)
    }

    /// Set intersection by linear merge. `None` when empty.
    pub fn intersect(&self, other: &CharSet) -> Option<CharSet> {
        let mut out = Vec::new();
        intersect_sorted(&self.0, &other.0, &mut out);
        if out.is_empty() {
            None
        } else {
            Some(CharSet::from_sorted(out))
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }
}

/// Merge-intersects two ascending slices into `out` (cleared first).
pub(crate) fn intersect_sorted(a: &[i64], b: &[i64], out: &mut Vec<i64>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

impl fmt::Display for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A sequence of character sets. Determinate iff every set is a singleton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndetString(Vec<CharSet>);

impl IndetString {
    pub fn new(positions: Vec<CharSet>) -> Self {
        IndetString(positions)
    }

    /// A determinate string from plain characters.
    pub fn determinate(chars: &[i64]) -> Self {
        IndetString(chars.iter().map(|&c| CharSet::singleton(c)).collect())
    }

    /// Builds a string from per-position character lists, canonicalizing each.
    pub fn from_sets<I, S>(sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Vec<i64>>,
    {
        sets.into_iter()
            .enumerate()
            .map(|(position, s)| CharSet::new(s.into()).ok_or(Error::EmptyPosition { position }))
            .collect::<Result<Vec<_>>>()
            .map(IndetString)
    }

    pub fn positions(&self) -> &[CharSet] {
        &self.0
    }

    pub fn into_positions(self) -> Vec<CharSet> {
        self.0
    }

    pub fn is_determinate(&self) -> bool {
        is_determinate(&self.0)
    }

    /// The characters of a determinate string.
    pub fn as_determinate(&self) -> Result<Vec<i64>> {
        determinate_chars(&self.0)
    }

    /// Largest position size.
    pub fn max_width(&self) -> usize {
        self.0.iter().map(CharSet::len).max().unwrap_or(0)
    }

    /// Number of valid assignments, saturating.
    pub fn assignment_count(&self) -> u128 {
        assignment_count(&self.0)
    }
}

impl Deref for IndetString {
    type Target = [CharSet];

    fn deref(&self) -> &[CharSet] {
        &self.0
    }
}

impl From<Vec<CharSet>> for IndetString {
    fn from(v: Vec<CharSet>) -> Self {
        IndetString(v)
    }
}

pub fn is_determinate(s: &[CharSet]) -> bool {
    s.iter().all(CharSet::is_singleton)
}

pub fn determinate_chars(s: &[CharSet]) -> Result<Vec<i64>> {
    s.iter()
        .enumerate()
        .map(|(position, c)| {
            if c.is_singleton() {
                Ok(c.min())
            } else {
                Err(Error::NotDeterminate { position })
            }
        })
        .collect()
}

pub(crate) fn assignment_count(s: &[CharSet]) -> u128 {
    s.iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
}

impl fmt::Display for IndetString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_string(&self.0))
    }
}

impl FromStr for IndetString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_string(s)
    }
}

/// One character per position; a valid assignment picks each value from the
/// corresponding position of some indeterminate string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<i64>);

impl Assignment {
    pub fn is_valid_for(&self, s: &[CharSet]) -> bool {
        self.0.len() == s.len() && self.0.iter().zip(s).all(|(&v, c)| c.contains(v))
    }
}

impl Deref for Assignment {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Assignment {
    fn from(v: Vec<i64>) -> Self {
        Assignment(v)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses the text format into a canonical indeterminate string.
pub fn parse_string(text: &str) -> Result<IndetString> {
    // Allow `2 | 5` as well as `2|5`.
    let mut normalized = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        if ch == '|' {
            while normalized.ends_with(char::is_whitespace) {
                normalized.pop();
            }
            normalized.push('|');
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
        } else {
            normalized.push(ch);
        }
    }

    let mut positions = Vec::new();
    for (position, token) in normalized
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .enumerate()
    {
        let mut chars = Vec::new();
        for alt in token.split('|') {
            if alt.is_empty() {
                return Err(Error::EmptyPosition { position });
            }
            let v = alt.parse::<i64>().map_err(|_| Error::BadToken {
                position,
                token: alt.to_string(),
            })?;
            chars.push(v);
        }
        positions.push(CharSet::new(chars).ok_or(Error::EmptyPosition { position })?);
    }
    if positions.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(IndetString(positions))
}

pub fn serialize_string(s: &[CharSet]) -> String {
    let mut out = String::new();
    for (k, c) in s.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(&c.to_string());
    }
    out
}

/// Order-isomorphism of two determinate strings: `x[i] <= x[j]` iff
/// `y[i] <= y[j]` for every pair.
///
/// Sorts the positions by `x` (stable) and compares each pair of neighbours
/// in that order; the neighbour relations determine all the others.
pub fn op_iso(x: &[i64], y: &[i64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&i| x[i]);
    Ok(order
        .windows(2)
        .all(|w| x[w[0]].cmp(&x[w[1]]) == y[w[0]].cmp(&y[w[1]])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pairs_iso(x: &[i64], y: &[i64]) -> bool {
        (0..x.len()).all(|i| (0..x.len()).all(|j| x[i].cmp(&x[j]) == y[i].cmp(&y[j])))
    }

    #[test]
    fn parses_examples() {
        let s = parse_string("1 2|5 3 3").unwrap();
        assert_eq!(
            s,
            IndetString::from_sets([vec![1], vec![2, 5], vec![3], vec![3]]).unwrap()
        );
        assert_eq!(parse_string("7").unwrap(), IndetString::determinate(&[7]));
        let s = parse_string("5|5|2").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].chars(), &[2, 5]);
    }

    #[test]
    fn parses_commas_and_spaced_bars() {
        let a = parse_string("1, 2 | 5,3\n3").unwrap();
        assert_eq!(a, parse_string("1 2|5 3 3").unwrap());
        assert_eq!(parse_string("-4|-9 0").unwrap()[0].chars(), &[-9, -4]);
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(parse_string("   "), Err(Error::EmptyInput));
        assert_eq!(parse_string(""), Err(Error::EmptyInput));
        assert_eq!(
            parse_string("1 2||3"),
            Err(Error::EmptyPosition { position: 1 })
        );
        assert_eq!(
            parse_string("1 2 x|3"),
            Err(Error::BadToken {
                position: 2,
                token: "x".into()
            })
        );
        assert!(matches!(
            parse_string("1 |"),
            Err(Error::EmptyPosition { position: 0 })
        ));
    }

    #[test]
    fn serializes_examples() {
        let s = IndetString::from_sets([vec![1], vec![2, 5], vec![3], vec![3]]).unwrap();
        assert_eq!(serialize_string(&s), "1 2|5 3 3");
        assert_eq!(IndetString::determinate(&[7]).to_string(), "7");
    }

    #[test]
    fn op_iso_examples() {
        assert!(op_iso(&[1, 5, 3, 3], &[1, 4, 2, 2]).unwrap());
        assert!(!op_iso(&[1, 4, 3, 1], &[2, 5, 4, 3]).unwrap());
        assert!(op_iso(&[10], &[-3]).unwrap());
        assert!(op_iso(&[], &[]).unwrap());
        assert_eq!(
            op_iso(&[1, 2], &[1]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn op_iso_matches_all_pairs_exhaustively() {
        // every pair of strings over {0..3} with m <= 5
        for m in 1..=5u32 {
            let count = 4usize.pow(m);
            let decode = |mut code: usize| {
                (0..m)
                    .map(|_| {
                        let d = (code % 4) as i64;
                        code /= 4;
                        d
                    })
                    .collect::<Vec<_>>()
            };
            let strings: Vec<Vec<i64>> = (0..count).map(decode).collect();
            for x in &strings {
                for y in &strings {
                    assert_eq!(op_iso(x, y).unwrap(), all_pairs_iso(x, y), "{x:?} {y:?}");
                }
            }
        }
    }

    #[test]
    fn intersection_and_lookup() {
        let a = CharSet::new(vec![1, 4, 8]).unwrap();
        let b = CharSet::new(vec![2, 4, 8, 9]).unwrap();
        assert_eq!(a.intersect(&b).unwrap().chars(), &[4, 8]);
        assert!(a.intersect(&CharSet::singleton(3)).is_none());
        assert_eq!(a.first_above(4), 2);
        assert_eq!(a.first_at_least(4), 1);
        assert_eq!(a.first_above(8), 3);
        assert_eq!(a.first_at_least(0), 0);
    }
}
