//! Exact counts `α_n(σ)` of `σ`-avoiding permutations and growth-rate
//! estimators.
//!
//! [`count_dp`] builds permutations left to right. A prefix of length `ℓ`
//! is summarized by the ranks (within the prefix) of its last `m - 1`
//! entries; appending an entry of relative rank `x ∈ 0..=ℓ` shifts every
//! rank `>= x` up by one, and the new length-`m` window is tested against
//! `σ`. The layer at length `ℓ` has at most `ℓ!/(ℓ-m+1)!` states, so the
//! count is polynomial in `n` for fixed `m`. All counts are big integers.

use alloc::vec::Vec;

use hashbrown::HashMap;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::overlap::overlap_profile;
use crate::perm::{all_patterns, for_each_permutation, Pattern, WindowMatcher};
use crate::rng::{self, chunk_seed, chunks};
use crate::util::{factorial, falling, ratio, to_f64};
use crate::{Error, Result};

/// Largest `n` accepted by [`count_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 10;

/// Largest `m` accepted by [`scan_patterns`].
pub const SCAN_LIMIT: usize = 5;

const RANK_BITS: u32 = 12;
const RANK_MASK: u128 = (1 << RANK_BITS) - 1;
const MAX_WINDOW: usize = (128 / RANK_BITS) as usize;

/// Exact `α_0(σ), …, α_N(σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    sigma: Pattern,
    counts: Vec<BigUint>,
}

impl CountTable {
    /// Wraps externally obtained counts after checking the identities every
    /// table satisfies: `α_n = n!` for `n < m`, `α_m = m! - 1` and
    /// `α_{n+1} <= (n+1) α_n`.
    pub fn from_counts(sigma: Pattern, counts: Vec<BigUint>) -> Result<Self> {
        let m = sigma.len();
        if counts.is_empty() {
            return Err(Error::Empty);
        }
        for (n, a) in counts.iter().enumerate() {
            let expected = match n.cmp(&m) {
                core::cmp::Ordering::Less => Some(factorial(n)),
                core::cmp::Ordering::Equal => Some(factorial(m) - 1u32),
                core::cmp::Ordering::Greater => None,
            };
            if expected.is_some_and(|e| &e != a) {
                return Err(Error::InvalidArgument("count table violates alpha_n = n! below m"));
            }
            if n > 0 && a > &(&counts[n - 1] * n) {
                return Err(Error::InvalidArgument("count table grows faster than (n+1)-fold"));
            }
        }
        Ok(CountTable { sigma, counts })
    }

    pub fn sigma(&self) -> &Pattern {
        &self.sigma
    }

    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn alpha(&self, n: usize) -> Option<&BigUint> {
        self.counts.get(n)
    }

    /// `α_n / n!`, the probability that a uniform `π ∈ S_n` avoids `σ`.
    pub fn avoidance_probability(&self, n: usize) -> Option<BigRational> {
        self.alpha(n).map(|a| ratio(a.clone(), factorial(n)))
    }

    /// Truncates the table to `α_0..α_n`.
    pub fn prefix(&self, n: usize) -> Option<CountTable> {
        (n <= self.n_max()).then(|| CountTable {
            sigma: self.sigma.clone(),
            counts: self.counts[..=n].to_vec(),
        })
    }
}

/// `α_n(σ)` by testing every `π ∈ S_n`; `n <= 10`.
pub fn count_bruteforce(sigma: &Pattern, n: usize) -> Result<BigUint> {
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::out_of_range("n", n, "n <= 10 for brute force"));
    }
    let matcher = WindowMatcher::new(sigma);
    let mut avoiders = 0u64;
    for_each_permutation(n, |pi| {
        if !matcher.occurs_in(pi) {
            avoiders += 1;
        }
    });
    Ok(BigUint::from(avoiders))
}

/// Limits for [`count_dp_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpConfig {
    /// Largest admissible number of states in one layer.
    pub max_states: usize,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig { max_states: 1 << 23 }
    }
}

impl DpConfig {
    /// Upper bound on the widest layer of the table up to `n_max`.
    pub fn projected_states(m: usize, n_max: usize) -> u128 {
        falling(n_max, m.saturating_sub(1))
    }
}

fn pack(ranks: &[u16]) -> u128 {
    ranks.iter().rev().fold(0u128, |acc, &r| (acc << RANK_BITS) | r as u128)
}

fn unpack(mut key: u128, w: usize, out: &mut [u16]) {
    for slot in out.iter_mut().take(w) {
        *slot = (key & RANK_MASK) as u16;
        key >>= RANK_BITS;
    }
}

/// Exact table `α_0..α_{n_max}` with the default state budget.
pub fn count_dp(sigma: &Pattern, n_max: usize) -> Result<CountTable> {
    count_dp_with(sigma, n_max, &DpConfig::default())
}

pub fn count_dp_with(sigma: &Pattern, n_max: usize, config: &DpConfig) -> Result<CountTable> {
    let m = sigma.len();
    if m > MAX_WINDOW + 1 {
        return Err(Error::out_of_range("m", m, "m <= 11 for the dynamic program"));
    }
    if n_max > RANK_MASK as usize {
        return Err(Error::out_of_range("n_max", n_max, "n_max <= 4095"));
    }
    let projected = DpConfig::projected_states(m, n_max);
    if projected > config.max_states as u128 {
        return Err(Error::Capacity {
            projected,
            budget: config.max_states,
        });
    }

    let matcher = WindowMatcher::new(sigma);
    let keep = m - 1;
    let mut counts = Vec::with_capacity(n_max + 1);
    counts.push(BigUint::one());
    let mut layer: HashMap<u128, BigUint> = HashMap::new();
    layer.insert(pack(&[]), BigUint::one());
    let mut ranks = alloc::vec![0u16; keep];
    let mut window = alloc::vec![0u16; m];

    for len in 0..n_max {
        let w = len.min(keep);
        let last = len + 1 == n_max;
        let mut next: HashMap<u128, BigUint> = HashMap::with_capacity(if last { 0 } else { layer.len() * 2 });
        let mut total = BigUint::zero();
        for (&key, count) in &layer {
            unpack(key, w, &mut ranks);
            for x in 0..=len as u16 {
                let window = &mut window[..w + 1];
                for (dst, &r) in window.iter_mut().zip(&ranks[..w]) {
                    *dst = if r >= x { r + 1 } else { r };
                }
                window[w] = x;
                if w + 1 == m && matcher.matches(window) {
                    continue;
                }
                total += count;
                if !last {
                    let tail = &window[(w + 1).saturating_sub(keep)..];
                    *next.entry(pack(tail)).or_insert_with(BigUint::zero) += count;
                }
            }
        }
        counts.push(total);
        layer = next;
    }
    Ok(CountTable {
        sigma: sigma.clone(),
        counts,
    })
}

/// Growth-rate estimators derived from a [`CountTable`].
///
/// The ratio estimator `ρ̂_n = α_{n+1} / ((n+1) α_n)` converges much faster
/// than the root estimator `(α_n / n!)^{1/n}`, because the constant `c` in
/// `α_n ~ c ρ^n n!` cancels in the ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoEstimate {
    /// `ratio[n] = ρ̂_n` for `n = 0..N-1`.
    pub ratio: Vec<f64>,
    /// `root[n] = (α_n/n!)^{1/n}` for `n = 1..N`; `root[0] = 1`.
    pub root: Vec<f64>,
}

impl RhoEstimate {
    /// `ρ̂` at the largest `n` the table supports.
    pub fn last_ratio(&self) -> Option<f64> {
        self.ratio.last().copied()
    }
}

pub fn rho_estimates(table: &CountTable) -> RhoEstimate {
    let c = table.counts();
    let ratios = c
        .windows(2)
        .enumerate()
        .map(|(n, w)| {
            if w[0].is_zero() {
                0.0
            } else {
                to_f64(&ratio(w[1].clone(), &w[0] * (n + 1)))
            }
        })
        .collect();
    let root = (0..c.len())
        .map(|n| {
            if n == 0 {
                1.0
            } else {
                let p = to_f64(&ratio(c[n].clone(), factorial(n)));
                libm::pow(p, 1.0 / n as f64)
            }
        })
        .collect();
    RhoEstimate { ratio: ratios, root }
}

/// Monte Carlo estimate of `α_n/n!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvoidanceEstimate {
    pub samples: u64,
    pub avoiders: u64,
    pub p_hat: f64,
    /// `sqrt(p̂ (1 - p̂) / samples)`.
    pub std_err: f64,
}

impl AvoidanceEstimate {
    pub fn from_counts(samples: u64, avoiders: u64) -> Self {
        let p_hat = avoiders as f64 / samples as f64;
        AvoidanceEstimate {
            samples,
            avoiders,
            p_hat,
            std_err: libm::sqrt(p_hat * (1.0 - p_hat) / samples as f64),
        }
    }
}

/// Avoiders among `draws` uniform permutations of length `n` generated from
/// one chunk seed.
pub fn avoidance_hits(sigma: &Pattern, n: usize, draws: u64, seed: u64) -> u64 {
    use rand::seq::SliceRandom;
    let matcher = WindowMatcher::new(sigma);
    let mut rng = rng::seeded(seed);
    let mut pi: Vec<u32> = (1..=n as u32).collect();
    let mut hits = 0;
    for _ in 0..draws {
        pi.shuffle(&mut rng);
        if !matcher.occurs_in(&pi) {
            hits += 1;
        }
    }
    hits
}

/// Unbiased estimate of `α_n/n!` from `samples` uniform permutations.
pub fn mc_avoidance(sigma: &Pattern, n: usize, samples: u64, seed: u64) -> Result<AvoidanceEstimate> {
    if samples == 0 {
        return Err(Error::out_of_range("samples", 0, "samples >= 1"));
    }
    let avoiders = chunks(samples)
        .map(|(c, draws)| avoidance_hits(sigma, n, draws, chunk_seed(seed, c)))
        .sum();
    Ok(AvoidanceEstimate::from_counts(samples, avoiders))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub pattern: Pattern,
    pub alpha: BigUint,
    pub class_rep: Pattern,
    pub is_monotone: bool,
    pub max_overlap: usize,
}

/// `α_n(σ)` for every `σ ∈ S_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub m: usize,
    pub n: usize,
    /// One row per pattern, in lexicographic order.
    pub rows: Vec<ScanRow>,
    /// Number of reverse/complement classes.
    pub classes: usize,
    pub max_alpha: BigUint,
    pub min_alpha: BigUint,
    pub argmax: Vec<Pattern>,
    pub argmin: Vec<Pattern>,
}

/// Representatives of the reverse/complement classes of `S_m`.
pub fn class_representatives(m: usize) -> Vec<Pattern> {
    let mut reps: Vec<Pattern> = all_patterns(m)
        .into_iter()
        .filter(|p| p.class_representative() == *p)
        .collect();
    reps.sort();
    reps
}

fn check_scan_range(m: usize) -> Result<()> {
    if !(2..=SCAN_LIMIT).contains(&m) {
        return Err(Error::out_of_range("m", m, "2 <= m <= 5"));
    }
    Ok(())
}

/// Spreads per-class counts over all of `S_m`. `rep_counts` must hold one
/// entry for each of [`class_representatives`]`(m)`.
pub fn assemble_scan(m: usize, n: usize, rep_counts: &[(Pattern, BigUint)]) -> Result<ScanReport> {
    check_scan_range(m)?;
    let lookup = |rep: &Pattern| {
        rep_counts
            .iter()
            .find(|(p, _)| p == rep)
            .map(|(_, a)| a.clone())
            .ok_or(Error::InvalidArgument("missing class representative"))
    };
    let mut rows = Vec::new();
    for pattern in all_patterns(m) {
        let class_rep = pattern.class_representative();
        let alpha = lookup(&class_rep)?;
        let max_overlap = overlap_profile(&pattern)?.max_overlap();
        rows.push(ScanRow {
            is_monotone: pattern.is_monotone(),
            pattern,
            alpha,
            class_rep,
            max_overlap,
        });
    }
    let max_alpha = rows.iter().map(|r| &r.alpha).max().unwrap().clone();
    let min_alpha = rows.iter().map(|r| &r.alpha).min().unwrap().clone();
    let pick = |a: &BigUint| {
        rows.iter()
            .filter(|r| &r.alpha == a)
            .map(|r| r.pattern.clone())
            .collect()
    };
    Ok(ScanReport {
        m,
        n,
        classes: rep_counts.len(),
        argmax: pick(&max_alpha),
        argmin: pick(&min_alpha),
        max_alpha,
        min_alpha,
        rows,
    })
}

/// Exact `α_n` over `S_m` (`2 <= m <= 5`), one DP per symmetry class.
pub fn scan_patterns(m: usize, n: usize) -> Result<ScanReport> {
    check_scan_range(m)?;
    let reps = class_representatives(m);
    let mut rep_counts = Vec::with_capacity(reps.len());
    for rep in reps {
        let table = count_dp(&rep, n)?;
        let a = table.alpha(n).expect("table reaches n").clone();
        rep_counts.push((rep, a));
    }
    assemble_scan(m, n, &rep_counts)
}
