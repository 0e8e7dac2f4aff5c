//! Self-overlap structure of a pattern.
//!
//! `σ ∈ S_m` overlaps at `k` (`1 <= k <= m-1`) when its length-`k` prefix
//! and suffix standardize to the same pattern. Two occurrences of `σ` whose
//! offsets differ by `m - k` can coexist only if `σ` overlaps at `k`, and
//! then the `k` shared entries are forced (see [`forced_suffix`]).
//!
//! `N_k` is the set of patterns overlapping at `k`; `M_k` the set of patterns
//! with no overlap larger than `k` (so `M_1` are the non-overlapping ones and
//! `M_{m-1} = S_m`).

use alloc::vec::Vec;

use crate::perm::{all_patterns, for_each_permutation, Pattern, WindowMatcher};
use crate::util::{binomial_u64, factorial_u64};
use crate::{Error, Result};

/// Largest `m` for exhaustive scans of the pattern space.
pub const PATTERN_SCAN_LIMIT: usize = 8;

/// Largest word length `2m - k` counted by enumerating `S_{2m-k}`.
pub const JOINT_ENUMERATION_LIMIT: usize = 11;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapProfile {
    m: usize,
    overlaps: Vec<usize>,
}

impl OverlapProfile {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Overlap positions in increasing order; always starts with 1.
    pub fn overlaps(&self) -> &[usize] {
        &self.overlaps
    }

    pub fn contains(&self, k: usize) -> bool {
        self.overlaps.binary_search(&k).is_ok()
    }

    pub fn max_overlap(&self) -> usize {
        *self.overlaps.last().expect("1 is always an overlap")
    }

    /// `σ ∈ M_j`.
    pub fn in_m(&self, j: usize) -> bool {
        self.max_overlap() <= j
    }
}

/// Overlap positions of `sigma`; requires `m >= 2`.
pub fn overlap_profile(sigma: &Pattern) -> Result<OverlapProfile> {
    let m = sigma.len();
    if m < 2 {
        return Err(Error::out_of_range("m", m, "m >= 2"));
    }
    let overlaps = (1..m)
        .filter(|&k| sigma.standardize_slice(0..k) == sigma.standardize_slice(m - k..m))
        .collect();
    Ok(OverlapProfile { m, overlaps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub max_overlap: usize,
    pub is_non_overlapping: bool,
    pub is_monotone: bool,
}

pub fn classify(sigma: &Pattern) -> Result<Classification> {
    let profile = overlap_profile(sigma)?;
    let max_overlap = profile.max_overlap();
    let is_monotone = max_overlap == sigma.len() - 1;
    debug_assert_eq!(is_monotone, sigma.is_monotone());
    Ok(Classification {
        max_overlap,
        is_non_overlapping: max_overlap == 1,
        is_monotone,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneLemmaCheck {
    pub m: usize,
    /// Every `σ ∈ S_m` that overlaps at `m - 1`.
    pub patterns_with_overlap_at_m_minus_1: Vec<Pattern>,
}

impl MonotoneLemmaCheck {
    /// True when only the two monotone patterns overlap at `m - 1`.
    pub fn holds(&self) -> bool {
        let mut expected = alloc::vec![Pattern::increasing(self.m), Pattern::decreasing(self.m)];
        expected.sort();
        let mut got = self.patterns_with_overlap_at_m_minus_1.clone();
        got.sort();
        got == expected
    }
}

/// Exhaustively lists the patterns of `S_m` overlapping at `m - 1`,
/// `3 <= m <= 8`.
pub fn verify_monotone_lemma(m: usize) -> Result<MonotoneLemmaCheck> {
    if !(3..=PATTERN_SCAN_LIMIT).contains(&m) {
        return Err(Error::out_of_range("m", m, "3 <= m <= 8"));
    }
    let mut found = Vec::new();
    for sigma in all_patterns(m) {
        if overlap_profile(&sigma)?.contains(m - 1) {
            found.push(sigma);
        }
    }
    Ok(MonotoneLemmaCheck {
        m,
        patterns_with_overlap_at_m_minus_1: found,
    })
}

fn check_k(m: usize, k: usize) -> Result<()> {
    if k == 0 || k >= m {
        Err(Error::InvalidOverlapPosition { m, k })
    } else {
        Ok(())
    }
}

/// A value that every double-occurrence word must carry at `position`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForcedValue {
    /// 1-based position in the word `τ ∈ S_{2m-k}`.
    pub position: usize,
    pub value: u32,
}

/// The entries `τ_{m-i}`, `0 <= i < k`, shared by the occurrences at offsets
/// `0` and `m - k` of any `τ ∈ S_{2m-k}` containing both.
///
/// With `σ' = st(σ_{m-k+1}, …, σ_m)` the shared entry is
/// `τ_{m-i} = σ_{k-i} + σ_{m-i} - σ'_{k-i}`. Sorted by position.
pub fn forced_suffix(sigma: &Pattern, k: usize) -> Result<Vec<ForcedValue>> {
    let m = sigma.len();
    check_k(m, k)?;
    if !overlap_profile(sigma)?.contains(k) {
        return Err(Error::ImpossibleEventPair { k });
    }
    let s = sigma.entries();
    let tail = sigma.standardize_slice(m - k..m);
    let t = tail.entries();
    let mut out: Vec<ForcedValue> = (0..k)
        .map(|i| ForcedValue {
            position: m - i,
            // 1-based σ_{k-i} is s[k-i-1]
            value: s[k - i - 1] + s[m - i - 1] - t[k - i - 1],
        })
        .collect();
    out.reverse();
    Ok(out)
}

/// Number of words in `S_{2m-k}` holding `σ` at offsets `0` and `m - k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JointCount {
    pub m: usize,
    pub k: usize,
    pub count: u64,
    /// `C(2(m-k), m-k)`.
    pub bound: u64,
}

impl JointCount {
    /// `(2m-k)!`, the number of candidate words.
    pub fn words(&self) -> u64 {
        factorial_u64(2 * self.m - self.k)
    }

    /// `Pr(A_i ∧ A_{i+m-k})` for a uniform permutation.
    pub fn probability(&self) -> f64 {
        self.count as f64 / self.words() as f64
    }
}

/// Exact joint count; enumerates `S_{2m-k}` up to length 11 and uses the
/// forced-values construction beyond that.
pub fn joint_count(sigma: &Pattern, k: usize) -> Result<JointCount> {
    let m = sigma.len();
    check_k(m, k)?;
    if 2 * m - k <= JOINT_ENUMERATION_LIMIT {
        joint_count_enumerated(sigma, k)
    } else {
        joint_count_constructive(sigma, k)
    }
}

fn joint_bound(m: usize, k: usize) -> u64 {
    let a = (m - k) as u64;
    binomial_u64(2 * a, a)
}

/// Depth-first search over `S_{2m-k}` that abandons a branch as soon as
/// one of the two windows stops matching.
struct DoubleOccurrenceSearch<'a> {
    sigma: &'a [u32],
    m: usize,
    shift: usize,
    word: Vec<u32>,
    used: Vec<bool>,
}

impl DoubleOccurrenceSearch<'_> {
    fn consistent(&self, p: usize) -> bool {
        let w = &self.word;
        let ok = |start: usize| {
            if p < start || p >= start + self.m {
                return true;
            }
            let sp = self.sigma[p - start];
            (start..p).all(|q| (w[q] < w[p]) == (self.sigma[q - start] < sp))
        };
        ok(0) && ok(self.shift)
    }

    fn run(&mut self, p: usize, visit: &mut dyn FnMut(&[u32])) {
        let len = self.used.len();
        if p == len {
            visit(&self.word);
            return;
        }
        for v in 0..len {
            if self.used[v] {
                continue;
            }
            self.word[p] = v as u32 + 1;
            if self.consistent(p) {
                self.used[v] = true;
                self.run(p + 1, visit);
                self.used[v] = false;
            }
        }
    }
}

/// Visits every `τ ∈ S_{2m-k}` with occurrences of `σ` at `0` and `m - k`.
pub fn for_each_double_occurrence(sigma: &Pattern, k: usize, mut visit: impl FnMut(&[u32])) -> Result<()> {
    let m = sigma.len();
    check_k(m, k)?;
    let len = 2 * m - k;
    let mut search = DoubleOccurrenceSearch {
        sigma: sigma.entries(),
        m,
        shift: m - k,
        word: alloc::vec![0; len],
        used: alloc::vec![false; len],
    };
    search.run(0, &mut visit);
    Ok(())
}

/// Joint count by exhaustive (pruned) search of `S_{2m-k}`.
pub fn joint_count_enumerated(sigma: &Pattern, k: usize) -> Result<JointCount> {
    let mut count = 0u64;
    for_each_double_occurrence(sigma, k, |_| count += 1)?;
    let m = sigma.len();
    Ok(JointCount {
        m,
        k,
        count,
        bound: joint_bound(m, k),
    })
}

/// Joint count from the forced values: choose which `m - k` of the free
/// values sit before the shared block; the pattern then fixes the whole
/// word, which is kept if it is consistent.
pub fn joint_count_constructive(sigma: &Pattern, k: usize) -> Result<JointCount> {
    let m = sigma.len();
    check_k(m, k)?;
    let bound = joint_bound(m, k);
    let forced = match forced_suffix(sigma, k) {
        Ok(f) => f,
        Err(Error::ImpossibleEventPair { .. }) => return Ok(JointCount { m, k, count: 0, bound }),
        Err(e) => return Err(e),
    };
    let len = 2 * m - k;
    let free_len = m - k;
    let s = sigma.entries();
    let mut is_forced = alloc::vec![false; len + 1];
    for f in &forced {
        if f.value == 0 || f.value as usize > len {
            return Ok(JointCount { m, k, count: 0, bound });
        }
        is_forced[f.value as usize] = true;
    }
    let forced_values: Vec<u32> = forced.iter().map(|f| f.value).collect();
    let free: Vec<u32> = (1..=len as u32).filter(|&v| !is_forced[v as usize]).collect();
    if free.len() != 2 * free_len {
        // forced values collided
        return Ok(JointCount { m, k, count: 0, bound });
    }

    // places `values` (sorted) into a window according to σ
    let arrange = |values: &mut Vec<u32>, out: &mut [u32]| {
        values.sort_unstable();
        for (slot, &r) in out.iter_mut().zip(s) {
            *slot = values[r as usize - 1];
        }
    };

    let mut count = 0u64;
    let mut word = alloc::vec![0u32; len];
    let mut window = alloc::vec![0u32; m];
    let mut chosen = alloc::vec![false; free.len()];
    let mut first: Vec<u32> = Vec::with_capacity(m);
    let mut second: Vec<u32> = Vec::with_capacity(m);
    for_each_subset(free.len(), free_len, &mut chosen, &mut |chosen| {
        first.clear();
        second.clear();
        first.extend_from_slice(&forced_values);
        second.extend_from_slice(&forced_values);
        for (v, &c) in free.iter().zip(chosen.iter()) {
            if c {
                first.push(*v);
            } else {
                second.push(*v);
            }
        }
        arrange(&mut first, &mut window);
        word[..m].copy_from_slice(&window);
        if word[free_len..m] != forced_values[..] {
            return;
        }
        arrange(&mut second, &mut window);
        if window[..k] != forced_values[..] {
            return;
        }
        word[free_len..].copy_from_slice(&window);
        count += 1;
    });
    Ok(JointCount { m, k, count, bound })
}

fn for_each_subset(n: usize, size: usize, chosen: &mut [bool], f: &mut dyn FnMut(&[bool])) {
    fn go(i: usize, left: usize, chosen: &mut [bool], f: &mut dyn FnMut(&[bool])) {
        if left == 0 {
            f(chosen);
            return;
        }
        if chosen.len() - i < left {
            return;
        }
        chosen[i] = true;
        go(i + 1, left - 1, chosen, f);
        chosen[i] = false;
        go(i + 1, left, chosen, f);
    }
    debug_assert_eq!(chosen.len(), n);
    go(0, size, chosen, f);
}

/// Exact sizes of `N_k` and `M_k` over `S_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapCensus {
    pub m: usize,
    /// `m!`.
    pub total: u64,
    /// `n_sizes[k - 1] = |N_k|`, `k = 1..m-1`.
    pub n_sizes: Vec<u64>,
    /// `m_sizes[k - 1] = |M_k|`.
    pub m_sizes: Vec<u64>,
    /// `max_overlap_sizes[k - 1]` = number of patterns with maximal overlap `k`.
    pub max_overlap_sizes: Vec<u64>,
}

impl OverlapCensus {
    pub fn n_size(&self, k: usize) -> u64 {
        self.n_sizes[k - 1]
    }

    pub fn m_size(&self, k: usize) -> u64 {
        self.m_sizes[k - 1]
    }

    /// `|N_k| / m!`.
    pub fn n_fraction(&self, k: usize) -> f64 {
        self.n_size(k) as f64 / self.total as f64
    }

    pub fn m_fraction(&self, k: usize) -> f64 {
        self.m_size(k) as f64 / self.total as f64
    }
}

/// Classifies every pattern of `S_m`, `2 <= m <= 8`.
pub fn enumerate_overlap_sets(m: usize) -> Result<OverlapCensus> {
    if !(2..=PATTERN_SCAN_LIMIT).contains(&m) {
        return Err(Error::out_of_range("m", m, "2 <= m <= 8"));
    }
    let mut n_sizes = alloc::vec![0u64; m - 1];
    let mut max_overlap_sizes = alloc::vec![0u64; m - 1];
    let mut total = 0u64;
    let mut scratch_err = None;
    for_each_permutation(m, |p| {
        let sigma = Pattern::new(p.to_vec()).expect("enumerated permutation");
        match overlap_profile(&sigma) {
            Ok(profile) => {
                for &k in profile.overlaps() {
                    n_sizes[k - 1] += 1;
                }
                max_overlap_sizes[profile.max_overlap() - 1] += 1;
                total += 1;
            }
            Err(e) => scratch_err = Some(e),
        }
    });
    if let Some(e) = scratch_err {
        return Err(e);
    }
    let m_sizes = max_overlap_sizes
        .iter()
        .scan(0u64, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    Ok(OverlapCensus {
        m,
        total,
        n_sizes,
        m_sizes,
        max_overlap_sizes,
    })
}

/// Whether `values` holds `σ` at both offsets `0` and `m - k`.
pub fn is_double_occurrence(sigma: &Pattern, k: usize, values: &[u32]) -> bool {
    let m = sigma.len();
    let matcher = WindowMatcher::new(sigma);
    values.len() == 2 * m - k && matcher.matches(&values[..m]) && matcher.matches(&values[m - k..])
}
