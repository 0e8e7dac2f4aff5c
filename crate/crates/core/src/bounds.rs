//! Upper and lower bounds on the growth rate `ρ_σ`.
//!
//! Occurrence events `A_i = {st(π_{i+1..i+m}) = σ}`, `0 <= i <= n-m`, use the
//! dependency graph joining offsets at distance `< m`. With `μ` the expected
//! number of occurrences, `Δ` the sum of `Pr(A_i ∧ A_j)` over edges and `δ`
//! the largest neighbourhood mass, Suen's inequality gives
//! `Pr(X = 0) <= exp(-μ + Δ e^{2δ})`. Per position `μ/n → 1/m!` and
//! `Δ/n → Σ_k Pr(A_0 ∧ A_{m-k})`, which turns the inequality into a bound
//! on `ρ_σ`.
//!
//! Every bound is evaluated with its explicit finite-`m` constants and
//! carries a validity flag instead of an "m large enough" assumption.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::overlap::{joint_count, overlap_profile, JointCount};
use crate::perm::Pattern;
use crate::util::{factorial, ratio, to_f64};
use crate::{Error, Result};

fn rat(num: u64, den: BigUint) -> BigRational {
    ratio(BigUint::from(num), den)
}

/// `δ = 2(m-1)/m!`.
fn local_mass(m: usize) -> BigRational {
    rat(2 * (m as u64 - 1), factorial(m))
}

fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Suen parameters of the occurrence events of `σ` in `S_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuenParameters {
    pub n: usize,
    pub m: usize,
    /// `(n - m + 1)/m!`.
    pub mu: BigRational,
    /// `2(m - 1)/m!`.
    pub delta: BigRational,
    /// `Σ_{i<j, j-i<m} Pr(A_i ∧ A_j)` from exact joint counts.
    pub big_delta_exact: BigRational,
    /// `n Σ_{k ∈ profile} 4^{m-k} / (sqrt(π(m-k)) (2m-k)!)`.
    pub big_delta_bound: f64,
    /// Joint counts for each overlap position.
    pub joint: Vec<JointCount>,
}

impl SuenParameters {
    pub fn mu_f64(&self) -> f64 {
        to_f64(&self.mu)
    }

    pub fn delta_f64(&self) -> f64 {
        to_f64(&self.delta)
    }

    pub fn big_delta_exact_f64(&self) -> f64 {
        to_f64(&self.big_delta_exact)
    }

    /// `1 - Δ e^{2δ} / μ`; the bound below is informative when positive.
    pub fn exponent_coefficient(&self) -> f64 {
        1.0 - self.big_delta_exact_f64() * exp(2.0 * self.delta_f64()) / self.mu_f64()
    }

    /// Suen's bound `exp(-μ (1 - Δ e^{2δ}/μ))` on `Pr(X = 0)` at this `n`.
    pub fn avoidance_upper(&self) -> f64 {
        exp(-self.mu_f64() * self.exponent_coefficient())
    }
}

fn joint_probability(j: &JointCount) -> BigRational {
    rat(j.count, factorial(2 * j.m - j.k))
}

fn joint_counts(sigma: &Pattern) -> Result<Vec<JointCount>> {
    overlap_profile(sigma)?
        .overlaps()
        .iter()
        .map(|&k| joint_count(sigma, k))
        .collect()
}

/// `4^{m-k} / (sqrt(π (m-k)) (2m-k)!)`, the per-pair joint bound.
pub fn joint_probability_bound(m: usize, k: usize) -> f64 {
    let a = (m - k) as f64;
    libm::pow(4.0, a) / (libm::sqrt(core::f64::consts::PI * a) * to_f64(&ratio(factorial(2 * m - k), BigUint::one())))
}

pub fn suen_parameters(sigma: &Pattern, n: usize) -> Result<SuenParameters> {
    let m = sigma.len();
    if m < 2 {
        return Err(Error::out_of_range("m", m, "m >= 2"));
    }
    if n < m {
        return Err(Error::out_of_range("n", n, "n >= m"));
    }
    let events = (n - m + 1) as u64;
    let joint = joint_counts(sigma)?;
    let mut big_delta_exact = BigRational::zero();
    let mut big_delta_bound = 0.0;
    for j in &joint {
        let gap = (m - j.k) as u64;
        let pairs = events.saturating_sub(gap);
        big_delta_exact += joint_probability(j) * BigRational::from(BigInt::from(pairs));
        big_delta_bound += joint_probability_bound(m, j.k);
    }
    Ok(SuenParameters {
        n,
        m,
        mu: rat(events, factorial(m)),
        delta: local_mass(m),
        big_delta_exact,
        big_delta_bound: n as f64 * big_delta_bound,
        joint,
    })
}

/// A growth-rate bound of the form `exp(-(1 - r e^{2δ}) / m!)`, where
/// `r` is the per-position ratio `Δ/μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuenBound {
    pub m: usize,
    /// `Δ/μ` per position, exact.
    pub ratio: BigRational,
    /// `r e^{2δ}`.
    pub inflated_ratio: f64,
    /// `exp(-(1 - r e^{2δ})/m!)`, or 1 when not valid.
    pub rho_upper: f64,
    /// `1 - rho_upper`, computed without cancellation.
    pub gap: f64,
    /// `r e^{2δ} < 1`.
    pub valid: bool,
}

fn suen_form(m: usize, r: BigRational) -> SuenBound {
    let inflated_ratio = to_f64(&r) * exp(2.0 * to_f64(&local_mass(m)));
    let valid = inflated_ratio < 1.0;
    let gap = if valid {
        -libm::expm1(-(1.0 - inflated_ratio) / to_f64(&ratio(factorial(m), BigUint::one())))
    } else {
        0.0
    };
    SuenBound {
        m,
        ratio: r,
        inflated_ratio,
        rho_upper: 1.0 - gap,
        gap,
        valid,
    }
}

/// Upper bound on `ρ_σ` from the exact joint occurrence probabilities:
/// `r = m! Σ_{k ∈ profile} count_k / (2m-k)!`.
///
/// Vacuous (`valid = false`, bound 1) for the monotone patterns.
pub fn suen_upper(sigma: &Pattern) -> Result<SuenBound> {
    let m = sigma.len();
    if m < 2 {
        return Err(Error::out_of_range("m", m, "m >= 2"));
    }
    let per_position = joint_counts(sigma)?
        .iter()
        .map(joint_probability)
        .fold(BigRational::zero(), |acc, p| acc + p);
    let r = per_position * BigRational::from(BigInt::from(factorial(m)));
    Ok(suen_form(m, r))
}

/// Upper bound valid for every non-monotone `σ ∈ S_m`, using
/// `Pr(A_0 ∧ A_{m-k}) <= 4^{m-k} / (sqrt(2π) (2m-k)!)` for `k <= m-2` and no
/// overlap at `m-1`. The ratio is not exact (it contains `sqrt(2π)`), so it
/// is rounded to the nearest `f64` before being stored as a rational.
pub fn suen_upper_non_monotone(m: usize) -> Result<SuenBound> {
    if m < 3 {
        return Err(Error::out_of_range("m", m, "m >= 3"));
    }
    let sqrt_2pi = libm::sqrt(2.0 * core::f64::consts::PI);
    let per_position: f64 = (1..=m - 2)
        .map(|k| libm::pow(4.0, (m - k) as f64) / (sqrt_2pi * to_f64(&ratio(factorial(2 * m - k), BigUint::one()))))
        .sum();
    let r = per_position * to_f64(&ratio(factorial(m), BigUint::one()));
    let r = BigRational::from_float(r).unwrap_or_else(BigRational::zero);
    Ok(suen_form(m, r))
}

/// `(1 - 1/m!)^{1/m}`, valid for every `σ ∈ S_m`.
pub fn block_upper(m: usize) -> Result<f64> {
    Ok(1.0 - block_upper_gap(m)?)
}

/// `1 - (1 - 1/m!)^{1/m}`, accurate even where the bound itself rounds
/// to 1.
pub fn block_upper_gap(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::out_of_range("m", m, "m >= 2"));
    }
    let inv = 1.0 / to_f64(&ratio(factorial(m), BigUint::one()));
    Ok(-libm::expm1(libm::log1p(-inv) / m as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LllLower {
    pub m: usize,
    /// `x = e^{(m-1)/m!} / m!`.
    pub weight: f64,
    /// `1 - x`.
    pub rho_lower: f64,
    /// `x < 1`.
    pub valid: bool,
    /// Whether `1/m! <= x (1-x)^{m-1}`, the local lemma condition, holds
    /// for this `x`.
    pub condition_holds: bool,
}

/// Local-lemma lower bound `ρ_σ >= 1 - e^{(m-1)/m!}/m!` for every `σ ∈ S_m`.
pub fn lll_lower(m: usize) -> Result<LllLower> {
    if m < 2 {
        return Err(Error::out_of_range("m", m, "m >= 2"));
    }
    let mf = to_f64(&ratio(factorial(m), BigUint::one()));
    let weight = exp((m as f64 - 1.0) / mf) / mf;
    // log(m! x (1-x)^{m-1}) = (m-1)/m! + (m-1) log(1-x)
    let log_lhs = (m as f64 - 1.0) / mf + (m as f64 - 1.0) * libm::log1p(-weight);
    Ok(LllLower {
        m,
        weight,
        rho_lower: 1.0 - weight,
        valid: weight < 1.0,
        condition_holds: log_lhs >= 0.0,
    })
}

/// Upper bound `exp(-(1 - r e^{2δ})/m!)` with `r = 4^{m-k} m!/(2m-k)!`,
/// valid for every `σ ∈ M_k` when `r e^{2δ} < 1`.
pub fn mk_upper(m: usize, k: usize) -> Result<SuenBound> {
    if m < 2 {
        return Err(Error::out_of_range("m", m, "m >= 2"));
    }
    if k == 0 || k >= m {
        return Err(Error::InvalidOverlapPosition { m, k });
    }
    let four = BigUint::from(4u32).pow((m - k) as u32);
    let r = ratio(four * factorial(m), factorial(2 * m - k));
    Ok(suen_form(m, r))
}

/// Whether `1 - ρ_σ >= (1 + 1/m)(1 - ρ_mono)`.
pub fn gap_corollary(m: usize, rho_mono: f64, rho_sigma: f64) -> Result<bool> {
    let open = |x: f64| x > 0.0 && x < 1.0;
    if !open(rho_mono) || !open(rho_sigma) {
        return Err(Error::InvalidArgument("growth rates must lie in (0, 1)"));
    }
    if m == 0 {
        return Err(Error::out_of_range("m", m, "m >= 1"));
    }
    Ok(1.0 - rho_sigma >= (1.0 + 1.0 / m as f64) * (1.0 - rho_mono))
}

/// Every bound available for `m` (and optionally `k` and a pattern).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub m: usize,
    pub k: Option<usize>,
    pub pattern: Option<Pattern>,
    pub lower_lll: f64,
    pub upper_block: f64,
    /// Pattern-specific Suen bound, or the non-monotone form without a
    /// pattern (`None` for `m < 3` then).
    pub upper_suen: Option<f64>,
    pub upper_mk: Option<f64>,
    pub flags: BoundFlags,
    /// `n` of the finite-length Suen evaluation, if requested.
    pub n_used: Option<usize>,
    /// `exp(-μ(1 - Δ e^{2δ}/μ))` at `n_used`.
    pub suen_finite: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundFlags {
    pub lll_valid: bool,
    pub lll_condition: bool,
    pub suen_valid: Option<bool>,
    pub mk_valid: Option<bool>,
    pub suen_finite_informative: Option<bool>,
}

pub fn bound_report(m: usize, k: Option<usize>, pattern: Option<&Pattern>, n: Option<usize>) -> Result<BoundReport> {
    if let Some(p) = pattern {
        if p.len() != m {
            return Err(Error::InvalidArgument("pattern length differs from m"));
        }
    }
    let lll = lll_lower(m)?;
    let mut flags = BoundFlags {
        lll_valid: lll.valid,
        lll_condition: lll.condition_holds,
        ..BoundFlags::default()
    };
    let suen = match pattern {
        Some(p) => Some(suen_upper(p)?),
        None if m >= 3 => Some(suen_upper_non_monotone(m)?),
        None => None,
    };
    flags.suen_valid = suen.as_ref().map(|s| s.valid);
    let mk = k.map(|k| mk_upper(m, k)).transpose()?;
    flags.mk_valid = mk.as_ref().map(|b| b.valid);
    let (n_used, suen_finite) = match (pattern, n) {
        (Some(p), Some(n)) => {
            let params = suen_parameters(p, n)?;
            flags.suen_finite_informative = Some(params.exponent_coefficient() > 0.0);
            (Some(n), Some(params.avoidance_upper()))
        }
        _ => (None, None),
    };
    Ok(BoundReport {
        m,
        k,
        pattern: pattern.cloned(),
        lower_lll: lll.rho_lower,
        upper_block: block_upper(m)?,
        upper_suen: suen.map(|s| s.rho_upper),
        upper_mk: mk.map(|b| b.rho_upper),
        flags,
        n_used,
        suen_finite,
    })
}

/// Comparison of the explicit non-monotone upper bound with the quadratic
/// lower bound on the monotone growth rate. When it holds, every
/// non-monotone `σ ∈ S_m` is avoided less than `12…m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CmpCertificate {
    pub m: usize,
    /// `1 - ` the non-monotone upper bound.
    pub upper_gap: f64,
    /// `ε'` of the monotone lower bound `1 - ε'`.
    pub lower_gap: Option<f64>,
    pub holds: bool,
}

pub fn cmp_certificate(m: usize) -> Result<CmpCertificate> {
    let upper = suen_upper_non_monotone(m)?;
    let lower = crate::series::monotone_lb_quadratic(m)?;
    let lower_gap = lower.epsilon_prime;
    Ok(CmpCertificate {
        m,
        upper_gap: upper.gap,
        lower_gap,
        holds: upper.valid && lower_gap.is_some_and(|e| upper.gap > e),
    })
}
