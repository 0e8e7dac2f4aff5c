//! Permutations, patterns and consecutive containment.
//!
//! Values are 1-based (`σ ∈ S_m` is a rearrangement of `1..=m`), offsets of
//! occurrences are 0-based: an occurrence at `i` means the window
//! `π[i..i+m]` standardizes to `σ`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::{rng, Error, Result};

fn check_permutation(entries: &[u32]) -> Result<()> {
    let n = entries.len();
    let mut seen = alloc::vec![false; n];
    for &v in entries {
        let idx = v as usize;
        if idx == 0 || idx > n {
            return Err(Error::NotAPermutation {
                len: n,
                detail: alloc::format!("value {v} out of range"),
            });
        }
        if core::mem::replace(&mut seen[idx - 1], true) {
            return Err(Error::NotAPermutation {
                len: n,
                detail: alloc::format!("value {v} repeated"),
            });
        }
    }
    Ok(())
}

fn ranks_of<T: Ord + Copy + Into<i64>>(values: &[T]) -> Result<Vec<u32>> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by_key(|&i| values[i]);
    let mut out = alloc::vec![0u32; values.len()];
    for (rank, pair) in idx.windows(2).enumerate() {
        if values[pair[0]] == values[pair[1]] {
            return Err(Error::DuplicateValue(values[pair[0]].into()));
        }
        out[pair[0]] = rank as u32 + 1;
    }
    out[*idx.last().unwrap()] = values.len() as u32;
    Ok(out)
}

/// A consecutive pattern `σ ∈ S_m`, `m >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    entries: Vec<u32>,
}

impl Pattern {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        check_permutation(&entries)?;
        Ok(Pattern { entries })
    }

    /// `12…m`.
    pub fn increasing(m: usize) -> Self {
        Pattern {
            entries: (1..=m as u32).collect(),
        }
    }

    /// `m…21`.
    pub fn decreasing(m: usize) -> Self {
        Pattern {
            entries: (1..=m as u32).rev().collect(),
        }
    }

    /// The pattern `12…(m−2) m (m−1)`, the least avoided one in `S_m`.
    pub fn nakamura(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::out_of_range("m", m, "m >= 2"));
        }
        let mut e: Vec<u32> = (1..=m as u32).collect();
        e.swap(m - 2, m - 1);
        Ok(Pattern { entries: e })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }

    pub fn is_monotone(&self) -> bool {
        let w = &self.entries;
        w.windows(2).all(|p| p[0] < p[1]) || w.windows(2).all(|p| p[0] > p[1])
    }

    pub fn reverse(&self) -> Self {
        Pattern {
            entries: self.entries.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let m1 = self.len() as u32 + 1;
        Pattern {
            entries: self.entries.iter().map(|&v| m1 - v).collect(),
        }
    }

    /// The orbit under reverse and complement, sorted and deduplicated.
    pub fn symmetry_class(&self) -> Vec<Pattern> {
        let r = self.reverse();
        let c = self.complement();
        let rc = r.complement();
        let mut v = alloc::vec![self.clone(), r, c, rc];
        v.sort();
        v.dedup();
        v
    }

    /// Lexicographically least member of [`Pattern::symmetry_class`].
    pub fn class_representative(&self) -> Pattern {
        self.symmetry_class().swap_remove(0)
    }

    /// Standardization of `entries[range]`.
    pub fn standardize_slice(&self, range: core::ops::Range<usize>) -> Pattern {
        standardize(&self.entries[range]).expect("pattern entries are distinct")
    }

    pub fn matcher(&self) -> WindowMatcher {
        WindowMatcher::new(self)
    }

    /// 0-based offsets of the consecutive occurrences of `self` in `values`.
    pub fn occurrences_in(&self, values: &[u32]) -> OccurrenceList {
        self.matcher().occurrences(values)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

/// Digits run together for `m <= 9` (`132`), comma separated otherwise
/// (`1,10,2,...`).
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.entries {
                write!(f, "{v}")?;
            }
        } else {
            for (i, v) in self.entries.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(s.to_string());
        if s.is_empty() {
            return Err(Error::Empty);
        }
        let entries: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if !s.contains(',') && entries.len() > 9 {
            return Err(bad());
        }
        Pattern::new(entries)
    }
}

impl TryFrom<&[u32]> for Pattern {
    type Error = Error;

    fn try_from(value: &[u32]) -> Result<Self> {
        Pattern::new(value.to_vec())
    }
}

/// A permutation `π ∈ S_n` (`n = 0` allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        check_permutation(&entries)?;
        Ok(Permutation { entries })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            entries: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn reverse(&self) -> Self {
        Permutation {
            entries: self.entries.iter().rev().copied().collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let n1 = self.len() as u32 + 1;
        Permutation {
            entries: self.entries.iter().map(|&v| n1 - v).collect(),
        }
    }
}

impl From<Pattern> for Permutation {
    fn from(p: Pattern) -> Self {
        Permutation { entries: p.entries }
    }
}

/// Sorted 0-based offsets of the occurrences of a pattern.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OccurrenceList {
    positions: Vec<usize>,
}

impl OccurrenceList {
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.positions
    }
}

/// Precomputed order of a pattern for O(m) window tests.
///
/// A window matches `σ` iff its values taken at the positions holding
/// `1, 2, …, m` in `σ` are strictly increasing.
#[derive(Clone, Debug)]
pub struct WindowMatcher {
    by_value: Vec<usize>,
}

impl WindowMatcher {
    pub fn new(sigma: &Pattern) -> Self {
        let mut by_value = alloc::vec![0usize; sigma.len()];
        for (pos, &v) in sigma.entries.iter().enumerate() {
            by_value[v as usize - 1] = pos;
        }
        WindowMatcher { by_value }
    }

    pub fn len(&self) -> usize {
        self.by_value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_value.is_empty()
    }

    /// `window` must hold exactly `m` distinct values.
    #[inline]
    pub fn matches<T: Ord + Copy>(&self, window: &[T]) -> bool {
        debug_assert_eq!(window.len(), self.by_value.len());
        self.by_value.windows(2).all(|p| window[p[0]] < window[p[1]])
    }

    #[inline]
    pub fn occurs_in<T: Ord + Copy>(&self, values: &[T]) -> bool {
        let m = self.by_value.len();
        values.len() >= m && values.windows(m).any(|w| self.matches(w))
    }

    pub fn occurrences<T: Ord + Copy>(&self, values: &[T]) -> OccurrenceList {
        let m = self.by_value.len();
        if values.len() < m {
            return OccurrenceList::default();
        }
        OccurrenceList {
            positions: values
                .windows(m)
                .enumerate()
                .filter(|(_, w)| self.matches(w))
                .map(|(i, _)| i)
                .collect(),
        }
    }
}

/// Relabels distinct values onto `1..=len` preserving their relative order.
pub fn standardize<T: Ord + Copy + Into<i64>>(values: &[T]) -> Result<Pattern> {
    Ok(Pattern {
        entries: ranks_of(values)?,
    })
}

/// Offsets `i` with `st(π[i..i+m]) = σ`; empty when `π` avoids `σ`.
pub fn occurrences(pi: &Permutation, sigma: &Pattern) -> OccurrenceList {
    sigma.occurrences_in(&pi.entries)
}

pub fn reverse(p: &Pattern) -> Pattern {
    p.reverse()
}

pub fn complement(p: &Pattern) -> Pattern {
    p.complement()
}

/// Uniformly random pattern of length `m`, fully determined by `seed`.
pub fn random_pattern(m: usize, seed: u64) -> Result<Pattern> {
    if m == 0 {
        return Err(Error::out_of_range("m", m, "m >= 1"));
    }
    Ok(random_pattern_with(&mut rng::seeded(seed), m))
}

/// Draws a uniform pattern from an existing generator (`m >= 1`).
pub fn random_pattern_with<R: RngCore + ?Sized>(rng: &mut R, m: usize) -> Pattern {
    assert!(m >= 1);
    let mut entries: Vec<u32> = (1..=m as u32).collect();
    entries.shuffle(rng);
    Pattern { entries }
}

/// Advances `a` to its lexicographic successor; false at the last one.
pub fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Calls `f` on every permutation of `1..=n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[u32])) {
    let mut a: Vec<u32> = (1..=n as u32).collect();
    loop {
        f(&a);
        if !next_permutation(&mut a) {
            break;
        }
    }
}

/// All of `S_m` in lexicographic order.
pub fn all_patterns(m: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    for_each_permutation(m, |p| out.push(Pattern { entries: p.to_vec() }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(standardize(&[3i64, 5, 1]).unwrap(), p("231"));
        assert_eq!(standardize(&[1i64, 2, 3, 4, 5]).unwrap(), Pattern::increasing(5));
        assert_eq!(standardize(&[10i64, 2, 7]).unwrap(), p("312"));
    }

    #[test]
    fn standardize_rejects_bad_input() {
        assert_eq!(standardize::<i64>(&[]), Err(Error::Empty));
        assert_eq!(standardize(&[4i64, 1, 4]), Err(Error::DuplicateValue(4)));
    }

    #[test]
    fn occurrences_examples() {
        let pi = Permutation::new(vec![1, 5, 3, 2, 4]).unwrap();
        assert_eq!(occurrences(&pi, &p("132")).positions(), &[0]);
        let sigma = p("2413");
        let same = Permutation::from(sigma.clone());
        assert_eq!(occurrences(&same, &sigma).positions(), &[0]);
        let short = Permutation::new(vec![2, 1]).unwrap();
        assert!(occurrences(&short, &sigma).is_empty());
        assert!(occurrences(&Permutation::identity(0), &sigma).is_empty());
    }

    #[test]
    fn symmetries() {
        assert_eq!(reverse(&p("132")), p("231"));
        assert_eq!(complement(&p("132")), p("312"));
        assert_eq!(reverse(&Pattern::increasing(6)), Pattern::decreasing(6));
        assert_eq!(Pattern::nakamura(5).unwrap(), p("12354"));
        assert_eq!(p("213").class_representative(), p("132"));
        assert_eq!(p("321").symmetry_class(), vec![p("123"), p("321")]);
    }

    #[test]
    fn text_format() {
        let long = Pattern::new(vec![1, 10, 2, 9, 3, 8, 4, 7, 5, 6]).unwrap();
        assert_eq!(long.to_string(), "1,10,2,9,3,8,4,7,5,6");
        assert_eq!("1,10,2,9,3,8,4,7,5,6".parse::<Pattern>().unwrap(), long);
        assert_eq!("1,3,2".parse::<Pattern>().unwrap(), p("132"));
        assert!("1231".parse::<Pattern>().is_err());
        assert!("124".parse::<Pattern>().is_err());
        assert!("1a2".parse::<Pattern>().is_err());
        assert!("".parse::<Pattern>().is_err());
        assert!("0".parse::<Pattern>().is_err());
        assert!("1,,2".parse::<Pattern>().is_err());
    }

    #[test]
    fn random_pattern_is_deterministic_and_valid() {
        assert_eq!(random_pattern(5, 42).unwrap(), random_pattern(5, 42).unwrap());
        for seed in 0..50 {
            let r = random_pattern(5, seed).unwrap();
            assert!(Pattern::new(r.entries().to_vec()).is_ok());
        }
        assert!(random_pattern(0, 1).is_err());
    }

    #[test]
    fn random_pattern_chi_square() {
        // 10^5 draws over S_4 (24 cells); 49.728 is the upper 0.001 quantile
        // of chi-square with 23 degrees of freedom.
        let all = all_patterns(4);
        let mut hist = [0u64; 24];
        let draws = 100_000u64;
        for seed in 0..draws {
            let r = random_pattern(4, seed).unwrap();
            hist[all.binary_search(&r).unwrap()] += 1;
        }
        let expected = draws as f64 / 24.0;
        let chi2: f64 = hist
            .iter()
            .map(|&o| (o as f64 - expected) * (o as f64 - expected) / expected)
            .sum();
        assert!(chi2 < 49.728, "chi2 = {chi2}");
    }

    #[test]
    fn only_sigma_contains_sigma_in_s_m() {
        for m in 1..=5 {
            for sigma in all_patterns(m) {
                let mut hits = 0;
                for_each_permutation(m, |pi| {
                    if !sigma.occurrences_in(pi).is_empty() {
                        hits += 1;
                        assert_eq!(pi, sigma.entries());
                    }
                });
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn lexicographic_enumeration() {
        let all = all_patterns(4);
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    fn perm_strategy(max: usize) -> impl Strategy<Value = Vec<u32>> {
        (0..=max).prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
    }

    fn pattern_strategy(max: usize) -> impl Strategy<Value = Pattern> {
        (1..=max).prop_flat_map(|m| {
            Just((1..=m as u32).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|e| Pattern::new(e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn standardize_idempotent(v in proptest::collection::hash_set(-1000i64..1000, 1..12)) {
            let v: Vec<i64> = v.into_iter().collect();
            let once = standardize(&v).unwrap();
            let e: Vec<i64> = once.entries().iter().map(|&x| x as i64).collect();
            prop_assert_eq!(standardize(&e).unwrap(), once);
        }

        #[test]
        fn occurrences_respect_symmetry(pi in perm_strategy(9), sigma in pattern_strategy(4)) {
            let pi = Permutation::new(pi).unwrap();
            let n = pi.len();
            let m = sigma.len();
            let occ = occurrences(&pi, &sigma);
            if n >= m {
                prop_assert!(occ.len() <= n - m + 1);
            }
            prop_assert!(occ.positions().windows(2).all(|w| w[0] < w[1]));
            for &i in occ.positions() {
                prop_assert_eq!(&standardize(&pi.entries()[i..i + m]).unwrap(), &sigma);
            }
            // reversing both maps occurrence i to n - m - i
            let rev = occurrences(&pi.reverse(), &sigma.reverse());
            let mut mapped: Vec<usize> = occ.positions().iter().map(|&i| n - m - i).collect();
            mapped.sort_unstable();
            prop_assert_eq!(rev.positions(), &mapped[..]);
            let comp = occurrences(&pi.complement(), &sigma.complement());
            prop_assert_eq!(comp, occ);
        }

        #[test]
        fn reverse_and_complement_are_involutions(sigma in pattern_strategy(10)) {
            prop_assert_eq!(sigma.reverse().reverse(), sigma.clone());
            prop_assert_eq!(sigma.complement().complement(), sigma.clone());
            prop_assert_eq!(sigma.to_string().parse::<Pattern>().unwrap(), sigma);
        }
    }
}
