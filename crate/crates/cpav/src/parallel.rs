//! Rayon versions of the core loops. Work is split along the same chunks
//! as the sequential code, so results do not depend on the thread count.

use cpav_core::enumerate::{
    assemble_scan, avoidance_hits, class_representatives, count_dp, AvoidanceEstimate, CountTable, ScanReport,
    SCAN_LIMIT,
};
use cpav_core::rng::{chunk_seed, chunks};
use cpav_core::stats::{check_sampling_args, OverlapDistribution, OverlapTally};
use cpav_core::{Error, Pattern, Result};
use rayon::prelude::*;

/// Count tables for many patterns at once.
pub fn count_tables(patterns: &[Pattern], n_max: usize) -> Result<Vec<CountTable>> {
    patterns.par_iter().map(|p| count_dp(p, n_max)).collect()
}

/// `α_n` over `S_m`, one DP per symmetry class, classes in parallel.
/// `lookup` may supply a cached table for a representative.
pub fn scan(
    m: usize,
    n: usize,
    lookup: impl Fn(&Pattern) -> Option<CountTable> + Sync,
) -> Result<(ScanReport, Vec<CountTable>)> {
    if !(2..=SCAN_LIMIT).contains(&m) {
        return Err(Error::OutOfRange {
            name: "m",
            value: m,
            expected: "2 <= m <= 5",
        });
    }
    let reps = class_representatives(m);
    let tables: Vec<(CountTable, bool)> = reps
        .par_iter()
        .map(|rep| match lookup(rep) {
            Some(t) => Ok((t, true)),
            None => count_dp(rep, n).map(|t| (t, false)),
        })
        .collect::<Result<_>>()?;
    let rep_counts: Vec<_> = tables
        .iter()
        .map(|(t, _)| (t.sigma().clone(), t.alpha(n).expect("table reaches n").clone()))
        .collect();
    let report = assemble_scan(m, n, &rep_counts)?;
    let fresh = tables
        .into_iter()
        .filter(|(_, cached)| !cached)
        .map(|(t, _)| t)
        .collect();
    Ok((report, fresh))
}

pub fn mc_avoidance(sigma: &Pattern, n: usize, samples: u64, seed: u64) -> Result<AvoidanceEstimate> {
    if samples == 0 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: 0,
            expected: "samples >= 1",
        });
    }
    let parts: Vec<(u64, u64)> = chunks(samples).collect();
    let avoiders = parts
        .par_iter()
        .map(|&(c, draws)| avoidance_hits(sigma, n, draws, chunk_seed(seed, c)))
        .sum();
    Ok(AvoidanceEstimate::from_counts(samples, avoiders))
}

pub fn sample_overlap_distribution(m: usize, samples: u64, seed: u64) -> Result<OverlapDistribution> {
    check_sampling_args(m, samples)?;
    let parts: Vec<(u64, u64)> = chunks(samples).collect();
    let tallies: Vec<OverlapTally> = parts
        .par_iter()
        .map(|&(c, draws)| OverlapTally::sample_chunk(m, draws, chunk_seed(seed, c)))
        .collect();
    let tally = tallies.iter().fold(OverlapTally::new(m), |acc, t| acc.merge(t));
    Ok(OverlapDistribution::from_tally(&tally, seed))
}
