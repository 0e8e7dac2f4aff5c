//! Overlap statistics of uniformly random patterns.
//!
//! [`sample_overlap_distribution`] estimates `Pr(σ ∈ N_k)` by sampling and
//! compares each estimate with `1/k!` (exact for `2k <= m`) or with the
//! tail bound `2^{1-m/2}` (for `2k > m`). [`mk_census`] gives the exact
//! sizes of `M_k` for `m <= 8` together with the lower bound
//! `1 - 2/(k+1)! - m 2^{-m/2}`.

use alloc::vec::Vec;

use crate::overlap::{enumerate_overlap_sets, overlap_profile, PATTERN_SCAN_LIMIT};
use crate::perm::random_pattern_with;
use crate::rng::{self, chunk_seed, chunks};
use crate::util::factorial_u64;
use crate::{Error, Result};

/// Smallest sample budget accepted by [`sample_overlap_distribution`].
pub const MIN_SAMPLES: u64 = 1000;

/// `|M_1|/m!` lies in this interval in the limit.
pub const BONA_INTERVAL: (f64, f64) = (0.364_098_149, 0.364_099_274_3);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetKind {
    /// `1/k!`, `2k <= m`.
    Exact,
    /// `2^{1-m/2}`, `2k > m`.
    UpperBound,
}

impl TargetKind {
    pub fn name(self) -> &'static str {
        match self {
            TargetKind::Exact => "exact",
            TargetKind::UpperBound => "upper_bound",
        }
    }
}

/// Sampled frequency of `N_k` for one `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleReport {
    pub m: usize,
    pub k: usize,
    pub samples: u64,
    pub hits: u64,
    /// `hits / samples`.
    pub fraction: f64,
    pub target: f64,
    pub target_kind: TargetKind,
    /// `sqrt(target (1 - target) / samples)`.
    pub std_err: f64,
    /// `|fraction - target| <= 3 std_err` for exact targets,
    /// `fraction <= target + 3 std_err` for upper bounds.
    pub within_3sigma: bool,
}

/// Target for `Pr(σ ∈ N_k)`.
pub fn overlap_target(m: usize, k: usize) -> (f64, TargetKind) {
    if 2 * k <= m {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        (1.0 / f, TargetKind::Exact)
    } else {
        (libm::pow(2.0, 1.0 - m as f64 / 2.0), TargetKind::UpperBound)
    }
}

impl SampleReport {
    pub fn new(m: usize, k: usize, samples: u64, hits: u64) -> Self {
        let (target, target_kind) = overlap_target(m, k);
        let fraction = hits as f64 / samples as f64;
        let std_err = libm::sqrt(target * (1.0 - target).max(0.0) / samples as f64);
        let slack = 3.0 * std_err;
        let within_3sigma = match target_kind {
            TargetKind::Exact => (fraction - target).abs() <= slack,
            TargetKind::UpperBound => fraction <= target + slack,
        };
        SampleReport {
            m,
            k,
            samples,
            hits,
            fraction,
            target,
            target_kind,
            std_err,
            within_3sigma,
        }
    }
}

/// Raw counts from a batch of random patterns; batches merge by addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapTally {
    pub m: usize,
    pub samples: u64,
    /// `n_hits[k - 1]` = patterns with an overlap at `k`.
    pub n_hits: Vec<u64>,
    /// `max_overlap_hist[k - 1]` = patterns whose largest overlap is `k`.
    pub max_overlap_hist: Vec<u64>,
}

impl OverlapTally {
    pub fn new(m: usize) -> Self {
        OverlapTally {
            m,
            samples: 0,
            n_hits: alloc::vec![0; m.saturating_sub(1)],
            max_overlap_hist: alloc::vec![0; m.saturating_sub(1)],
        }
    }

    /// Tally of `draws` patterns from chunk seed `seed`.
    pub fn sample_chunk(m: usize, draws: u64, seed: u64) -> Self {
        let mut tally = Self::new(m);
        let mut rng = rng::seeded(seed);
        for _ in 0..draws {
            let sigma = random_pattern_with(&mut rng, m);
            let profile = overlap_profile(&sigma).expect("m >= 2");
            for &k in profile.overlaps() {
                tally.n_hits[k - 1] += 1;
            }
            tally.max_overlap_hist[profile.max_overlap() - 1] += 1;
            tally.samples += 1;
        }
        tally
    }

    pub fn merge(mut self, other: &OverlapTally) -> Self {
        assert_eq!(self.m, other.m);
        self.samples += other.samples;
        for (a, b) in self.n_hits.iter_mut().zip(&other.n_hits) {
            *a += b;
        }
        for (a, b) in self.max_overlap_hist.iter_mut().zip(&other.max_overlap_hist) {
            *a += b;
        }
        self
    }

    pub fn reports(&self) -> Vec<SampleReport> {
        (1..self.m)
            .map(|k| SampleReport::new(self.m, k, self.samples, self.n_hits[k - 1]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapDistribution {
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    /// One report per `k = 1..m-1`.
    pub reports: Vec<SampleReport>,
    pub max_overlap_hist: Vec<u64>,
}

impl OverlapDistribution {
    pub fn from_tally(tally: &OverlapTally, seed: u64) -> Self {
        OverlapDistribution {
            m: tally.m,
            samples: tally.samples,
            seed,
            reports: tally.reports(),
            max_overlap_hist: tally.max_overlap_hist.clone(),
        }
    }
}

/// Checks the arguments of [`sample_overlap_distribution`].
pub fn check_sampling_args(m: usize, samples: u64) -> Result<()> {
    if m < 4 {
        return Err(Error::out_of_range("m", m, "m >= 4"));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::out_of_range("samples", samples as usize, "samples >= 1000"));
    }
    Ok(())
}

/// Frequencies of `N_k`, `k = 1..m-1`, among `samples` uniform patterns of
/// length `m >= 4`. Deterministic per seed.
pub fn sample_overlap_distribution(m: usize, samples: u64, seed: u64) -> Result<OverlapDistribution> {
    check_sampling_args(m, samples)?;
    let tally = chunks(samples)
        .map(|(c, draws)| OverlapTally::sample_chunk(m, draws, chunk_seed(seed, c)))
        .fold(OverlapTally::new(m), |acc, t| acc.merge(&t));
    Ok(OverlapDistribution::from_tally(&tally, seed))
}

/// Exact `|M_k|/m!` against `1 - 2/(k+1)! - m 2^{-m/2}`, `1 <= k <= m/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaRow {
    pub k: usize,
    pub fraction: f64,
    pub lower_bound: f64,
    /// The bound is `<= 0`.
    pub vacuous: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MkCensus {
    pub m: usize,
    pub total: u64,
    /// `n_sizes[k - 1] = |N_k|`.
    pub n_sizes: Vec<u64>,
    /// `m_sizes[k - 1] = |M_k|`.
    pub m_sizes: Vec<u64>,
    /// `|M_k|/m!`.
    pub m_fractions: Vec<f64>,
    /// `|M_1|/m!`.
    pub non_overlapping_fraction: f64,
    pub lemma_rows: Vec<LemmaRow>,
    /// `|M_1| >= (3 - e) m!`.
    pub three_minus_e_holds: bool,
    /// `|M_1|/m!` inside the limiting interval (informational).
    pub in_bona_interval: bool,
}

pub fn mk_census(m: usize) -> Result<MkCensus> {
    if m > PATTERN_SCAN_LIMIT {
        return Err(Error::out_of_range("m", m, "m <= 8; use sampling for larger m"));
    }
    let census = enumerate_overlap_sets(m)?;
    let total = census.total;
    debug_assert_eq!(total, factorial_u64(m));
    let m_fractions: Vec<f64> = census.m_sizes.iter().map(|&s| s as f64 / total as f64).collect();
    let non_overlapping_fraction = m_fractions[0];
    let tail = m as f64 * libm::pow(2.0, -(m as f64) / 2.0);
    let lemma_rows = (1..=m / 2)
        .filter(|&k| k < m)
        .map(|k| {
            let fraction = m_fractions[k - 1];
            let lower_bound = 1.0 - 2.0 / factorial_u64(k + 1) as f64 - tail;
            LemmaRow {
                k,
                fraction,
                lower_bound,
                vacuous: lower_bound <= 0.0,
                holds: fraction >= lower_bound,
            }
        })
        .collect();
    Ok(MkCensus {
        m,
        total,
        n_sizes: census.n_sizes,
        m_sizes: census.m_sizes,
        m_fractions,
        non_overlapping_fraction,
        lemma_rows,
        three_minus_e_holds: non_overlapping_fraction >= 3.0 - core::f64::consts::E,
        in_bona_interval: (BONA_INTERVAL.0..=BONA_INTERVAL.1).contains(&non_overlapping_fraction),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_examples() {
        let d = sample_overlap_distribution(8, 100_000, 0).unwrap();
        assert_eq!(d.reports.len(), 7);
        for r in &d.reports {
            assert!(r.within_3sigma, "{r:?}");
            assert_eq!(r.fraction, r.hits as f64 / r.samples as f64);
        }
        assert!((d.reports[1].target - 0.5).abs() < 1e-15);
        assert!((d.reports[2].target - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(d.reports[0].hits, 100_000);
        assert_eq!(d.max_overlap_hist.iter().sum::<u64>(), 100_000);

        let d = sample_overlap_distribution(10, 100_000, 1).unwrap();
        let r = d.reports[6];
        assert_eq!(r.target_kind, TargetKind::UpperBound);
        assert!((r.target - 2f64.powf(-4.0)).abs() < 1e-15);
        assert!(r.within_3sigma);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_overlap_distribution(6, 5000, 42).unwrap();
        let b = sample_overlap_distribution(6, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_overlap_distribution(6, 5000, 43).unwrap();
        assert_ne!(a.reports, c.reports);
    }

    #[test]
    fn chunk_merge_is_order_independent() {
        let parts: Vec<_> = chunks(10_000)
            .map(|(c, d)| OverlapTally::sample_chunk(5, d, chunk_seed(9, c)))
            .collect();
        let forward = parts.iter().fold(OverlapTally::new(5), |a, t| a.merge(t));
        let backward = parts.iter().rev().fold(OverlapTally::new(5), |a, t| a.merge(t));
        assert_eq!(forward, backward);
    }

    #[test]
    fn rejects_small_inputs() {
        assert!(sample_overlap_distribution(3, 1000, 0).is_err());
        assert!(sample_overlap_distribution(5, 999, 0).is_err());
        assert!(mk_census(9).is_err());
    }

    #[test]
    fn census_examples() {
        let c = mk_census(3).unwrap();
        assert_eq!(c.m_sizes[0], 4);
        assert!((c.non_overlapping_fraction - 4.0 / 6.0).abs() < 1e-15);
        let c = mk_census(4).unwrap();
        assert_eq!(c.n_sizes[1] * 2, 24);
        let c = mk_census(6).unwrap();
        assert!(c.m_fractions.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*c.m_fractions.last().unwrap(), 1.0);
    }

    #[test]
    fn census_identities() {
        for m in 2..=8 {
            let c = mk_census(m).unwrap();
            for k in 1..=m / 2 {
                assert_eq!(c.n_sizes[k - 1] * factorial_u64(k), c.total, "m={m} k={k}");
            }
            for row in &c.lemma_rows {
                if !row.vacuous {
                    assert!(row.holds, "m={m} {row:?}");
                }
            }
            assert!(c.three_minus_e_holds);
        }
    }

    #[test]
    fn sampling_tracks_census() {
        let c = mk_census(6).unwrap();
        let d = sample_overlap_distribution(6, 100_000, 3).unwrap();
        for r in &d.reports {
            let p = c.n_sizes[r.k - 1] as f64 / c.total as f64;
            let se = libm::sqrt(p * (1.0 - p) / r.samples as f64);
            assert!((r.fraction - p).abs() <= 3.0 * se + 1e-12, "{r:?} vs {p}");
        }
        let argmax = |v: &[u64]| v.iter().enumerate().max_by_key(|x| x.1).unwrap().0;
        let census = enumerate_overlap_sets(6).unwrap();
        assert_eq!(argmax(&d.max_overlap_hist), argmax(&census.max_overlap_sizes));
    }
}
