//! Growth rates as reciprocals of the smallest positive root of a series.
//!
//! Three series are supported:
//!
//! * `g(z) = Σ_i z^{mi}/(mi)! - Σ_i z^{mi+1}/(mi+1)!`, whose smallest root is
//!   `1/ρ` of the monotone pattern;
//! * the polynomial majorant `f(z) = 1 - z + z^m/m! - z^{m+1}/(m+1)! +
//!   z^{2m}/(2m)!` of `g`, whose smallest root `z_1 >= z_0` gives
//!   `ρ_{12…m} >= 1/z_1`;
//! * `f(z) = 1 - z + z^m/m! - m z^{2m+1}/(2m-1)!` for the pattern
//!   `12…(m-2) m (m-1)`, whose smallest root gives an upper bound on that
//!   pattern's growth rate. The last term is configurable through
//!   [`NakamuraTail`].
//!
//! Coefficients are `1/j!` computed from exact factorials. The infinite
//! series `g` is cut where the first omitted term is below `1e-30` on
//! `[1, 2]`, so truncation is not an error source in double precision.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::util::{factorial, ratio, to_f64};
use crate::{Error, Result};

/// Truncation threshold for the omitted tail.
pub const TAIL_EPSILON: f64 = 1e-30;
/// Root bracket.
pub const BRACKET: (f64, f64) = (1.0, 2.0);
/// Step of the bracket scan.
pub const SCAN_STEP: f64 = 0.01;
/// Final bracket width of the bisection.
pub const ROOT_TOLERANCE: f64 = 1e-13;
/// Evaluation domain.
pub const DOMAIN: (f64, f64) = (0.0, 4.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    MonotoneG,
    MonotoneMajorant,
    Nakamura,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::MonotoneG => "monotone_g",
            SeriesKind::MonotoneMajorant => "monotone_majorant_f",
            SeriesKind::Nakamura => "nakamura_f",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone_g" => Ok(SeriesKind::MonotoneG),
            "monotone_majorant_f" => Ok(SeriesKind::MonotoneMajorant),
            "nakamura_f" => Ok(SeriesKind::Nakamura),
            _ => Err(Error::InvalidArgument("unknown series kind")),
        }
    }
}

/// The last term `-coefficient · z^exponent / factorial!` of the
/// Nakamura-pattern series. [`NakamuraTail::standard`] gives
/// `m z^{2m+1} / (2m-1)!`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NakamuraTail {
    pub coefficient: u64,
    pub exponent: u32,
    pub factorial: usize,
}

impl NakamuraTail {
    pub fn standard(m: usize) -> Self {
        NakamuraTail {
            coefficient: m as u64,
            exponent: 2 * m as u32 + 1,
            factorial: 2 * m - 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Term {
    coefficient: f64,
    exponent: u32,
}

/// A truncated series ready for evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSpec {
    kind: SeriesKind,
    m: usize,
    terms: Vec<Term>,
    /// First omitted term as `(±1/j!, j)`, for the error bound.
    omitted: Option<Term>,
}

fn inv_factorial(j: usize) -> f64 {
    to_f64(&ratio(BigUint::one(), factorial(j)))
}

fn term(sign: f64, exponent: usize) -> Term {
    Term {
        coefficient: sign * inv_factorial(exponent),
        exponent: exponent as u32,
    }
}

impl SeriesSpec {
    pub fn new(kind: SeriesKind, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::out_of_range("m", m, "m >= 2"));
        }
        let (terms, omitted) = match kind {
            SeriesKind::MonotoneG => {
                let mut terms = Vec::new();
                let mut j = 0usize;
                loop {
                    // exponents mi and mi+1, signs + and -
                    let even = j.is_multiple_of(2);
                    let exponent = m * (j / 2) + usize::from(!even);
                    let t = term(if even { 1.0 } else { -1.0 }, exponent);
                    let magnitude = t.coefficient.abs() * libm::pow(BRACKET.1, exponent as f64);
                    if exponent > 0 && magnitude < TAIL_EPSILON {
                        break (terms, Some(t));
                    }
                    terms.push(t);
                    j += 1;
                }
            }
            SeriesKind::MonotoneMajorant => (
                alloc::vec![
                    term(1.0, 0),
                    term(-1.0, 1),
                    term(1.0, m),
                    term(-1.0, m + 1),
                    term(1.0, 2 * m),
                ],
                None,
            ),
            SeriesKind::Nakamura => return Self::nakamura_with(m, NakamuraTail::standard(m)),
        };
        Ok(SeriesSpec {
            kind,
            m,
            terms,
            omitted,
        })
    }

    /// The Nakamura-pattern series with a custom last term.
    pub fn nakamura_with(m: usize, tail: NakamuraTail) -> Result<Self> {
        if m < 2 {
            return Err(Error::out_of_range("m", m, "m >= 2"));
        }
        let last = Term {
            coefficient: -(tail.coefficient as f64) * inv_factorial(tail.factorial),
            exponent: tail.exponent,
        };
        Ok(SeriesSpec {
            kind: SeriesKind::Nakamura,
            m,
            terms: alloc::vec![term(1.0, 0), term(-1.0, 1), term(1.0, m), last],
            omitted: None,
        })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of terms summed.
    pub fn truncation_terms(&self) -> usize {
        self.terms.len()
    }

    /// Bound on the truncation error at `z`: the first omitted term
    /// (the tail alternates with decreasing magnitude), 0 for polynomials.
    pub fn truncation_error_bound(&self, z: f64) -> f64 {
        self.omitted
            .map(|t| t.coefficient.abs() * libm::pow(z, t.exponent as f64))
            .unwrap_or(0.0)
    }

    fn raw(&self, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * libm::pow(z, t.exponent as f64))
            .sum()
    }
}

/// Value of the truncated series at `z ∈ [0, 4]`.
pub fn eval_series(spec: &SeriesSpec, z: f64) -> Result<f64> {
    if !(DOMAIN.0..=DOMAIN.1).contains(&z) {
        return Err(Error::InvalidArgument("z outside [0, 4]"));
    }
    Ok(spec.raw(z))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootResult {
    pub kind: SeriesKind,
    pub m: usize,
    pub z0: f64,
    /// `1/z0`.
    pub rho: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    /// `|series(z0)|`.
    pub residual: f64,
    pub truncation_terms: usize,
    /// Bracket width after each bisection step.
    pub widths: Vec<f64>,
}

/// Smallest root in `(1, 2]`: scan upward from 1 in steps of 0.01 until the
/// sign changes, then bisect to a bracket of width `1e-13`.
pub fn smallest_root(spec: &SeriesSpec) -> Result<RootResult> {
    let steps = libm::round((BRACKET.1 - BRACKET.0) / SCAN_STEP) as usize;
    let mut lo = BRACKET.0;
    let mut f_lo = spec.raw(lo);
    let mut found = None;
    for i in 1..=steps {
        let hi = BRACKET.0 + i as f64 * SCAN_STEP;
        let f_hi = spec.raw(hi);
        if f_hi == 0.0 || f_lo.signum() != f_hi.signum() {
            found = Some((lo, hi, f_hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut lo, mut hi, f_hi) = found.ok_or(Error::NoRoot {
        lo: BRACKET.0,
        hi: BRACKET.1,
    })?;
    let lo_sign = spec.raw(lo).signum();
    let mut widths = Vec::new();
    if f_hi == 0.0 {
        lo = hi;
    } else {
        while hi - lo > ROOT_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = spec.raw(mid);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
            } else if f_mid.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
            widths.push(hi - lo);
        }
    }
    let z0 = 0.5 * (lo + hi);
    Ok(RootResult {
        kind: spec.kind,
        m: spec.m,
        z0,
        rho: 1.0 / z0,
        bracket: (lo, hi),
        residual: spec.raw(z0).abs(),
        truncation_terms: spec.truncation_terms(),
        widths,
    })
}

/// Explicit lower bound on the monotone growth rate from the quadratic
/// `a ε² - b ε + c = 0` with
/// `a = 2m-1 + (m-1)(m²+1)/(m+1)!`, `b = 1 + (m²+1)/(m+1)!`,
/// `c = m/(m+1)! + 1/(2m)!`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticBound {
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `b² - 4ac`, sign decided exactly.
    pub discriminant: f64,
    /// Smallest positive root, when the discriminant is nonnegative.
    pub epsilon_prime: Option<f64>,
    /// `1 - ε'`.
    pub rho_lower: Option<f64>,
    /// Two-term expansion `c/b + a c²/b³` of the smallest root.
    pub approx_epsilon: f64,
    pub valid: bool,
}

pub fn monotone_lb_quadratic(m: usize) -> Result<QuadraticBound> {
    if m < 3 {
        return Err(Error::out_of_range("m", m, "m >= 3"));
    }
    let int = |v: usize| BigRational::from_integer(v.into());
    let inv_fact = |j: usize| ratio(BigUint::one(), factorial(j));
    let m2 = int(m * m + 1);
    let a = int(2 * m - 1) + int(m - 1) * &m2 * inv_fact(m + 1);
    let b = int(1) + &m2 * inv_fact(m + 1);
    let c = int(m) * inv_fact(m + 1) + inv_fact(2 * m);
    let disc = &b * &b - int(4) * &a * &c;
    let valid = !disc.is_negative();
    let (af, bf, cf) = (to_f64(&a), to_f64(&b), to_f64(&c));
    let epsilon_prime = valid.then(|| 2.0 * cf / (bf + libm::sqrt(to_f64(&disc))));
    Ok(QuadraticBound {
        m,
        a: af,
        b: bf,
        c: cf,
        discriminant: to_f64(&disc),
        epsilon_prime,
        rho_lower: epsilon_prime.map(|e| 1.0 - e),
        approx_epsilon: cf / bf + af * cf * cf / (bf * bf * bf),
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{block_upper, lll_lower};

    fn root(kind: SeriesKind, m: usize) -> RootResult {
        smallest_root(&SeriesSpec::new(kind, m).unwrap()).unwrap()
    }

    #[test]
    fn eval_examples() {
        for m in 2..=8 {
            for kind in [
                SeriesKind::MonotoneG,
                SeriesKind::MonotoneMajorant,
                SeriesKind::Nakamura,
            ] {
                assert_eq!(eval_series(&SeriesSpec::new(kind, m).unwrap(), 0.0).unwrap(), 1.0);
            }
        }
        let f = SeriesSpec::new(SeriesKind::Nakamura, 3).unwrap();
        let expected = 1.0 - 1.0 + 1.0 / 6.0 - 3.0 / 120.0;
        assert!((eval_series(&f, 1.0).unwrap() - expected).abs() < 1e-15);
        assert!((eval_series(&f, 1.0).unwrap() - 0.1417).abs() < 1e-4);
        assert!(eval_series(&f, 4.5).is_err());
        assert!(eval_series(&f, -0.1).is_err());
    }

    #[test]
    fn majorant_dominates_g() {
        for m in 3..=8 {
            let g = SeriesSpec::new(SeriesKind::MonotoneG, m).unwrap();
            let f = SeriesSpec::new(SeriesKind::MonotoneMajorant, m).unwrap();
            for i in 0..=200 {
                let z = i as f64 * 0.01;
                assert!(
                    eval_series(&f, z).unwrap() >= eval_series(&g, z).unwrap() - 1e-15,
                    "m={m} z={z}"
                );
            }
        }
    }

    #[test]
    fn truncation_is_below_threshold() {
        for m in 2..=8 {
            let g = SeriesSpec::new(SeriesKind::MonotoneG, m).unwrap();
            assert!(g.truncation_error_bound(2.0) < TAIL_EPSILON);
            assert!(g.truncation_error_bound(1.0) < TAIL_EPSILON);
            assert!(g.truncation_terms() > 2);
            assert_eq!(
                SeriesSpec::new(SeriesKind::MonotoneMajorant, m)
                    .unwrap()
                    .truncation_error_bound(2.0),
                0.0
            );
        }
    }

    #[test]
    fn root_examples() {
        // 40-digit reference values
        let cases = [
            (SeriesKind::MonotoneG, 3, 1.209_199_576_156_15),
            (SeriesKind::MonotoneG, 4, 1.038_415_637_266_56),
            (SeriesKind::MonotoneG, 6, 1.001_198_827_324_06),
            (SeriesKind::MonotoneMajorant, 3, 1.210_559_427_168_77),
            (SeriesKind::Nakamura, 3, 1.198_028_461_100_01),
            (SeriesKind::Nakamura, 4, 1.049_284_506_653_48),
        ];
        for (kind, m, z) in cases {
            let r = root(kind, m);
            assert!((r.z0 - z).abs() < 1e-12, "{kind} m={m}: {} vs {z}", r.z0);
            assert!(r.residual <= 1e-12);
            assert!(r.bracket.0 <= r.z0 && r.z0 <= r.bracket.1);
        }
        let r = root(SeriesKind::MonotoneG, 3);
        assert!((r.rho - 0.8270).abs() < 1e-4);
        let r = root(SeriesKind::Nakamura, 3);
        assert!(r.z0 > 1.15 && r.z0 < 1.20);
    }

    #[test]
    fn bisection_halves_monotonically() {
        let r = root(SeriesKind::MonotoneG, 5);
        assert!(!r.widths.is_empty());
        assert!(r.widths.windows(2).all(|w| w[1] < w[0]));
        assert!(*r.widths.last().unwrap() <= ROOT_TOLERANCE);
        let spec = SeriesSpec::new(SeriesKind::MonotoneG, 5).unwrap();
        let (lo, hi) = r.bracket;
        assert!(eval_series(&spec, lo).unwrap() * eval_series(&spec, hi).unwrap() <= 0.0);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        let tail = NakamuraTail {
            coefficient: 0,
            exponent: 5,
            factorial: 5,
        };
        // 1 - z + z^2/2 has no real root
        let spec = SeriesSpec::nakamura_with(2, tail).unwrap();
        assert!(matches!(smallest_root(&spec), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn root_orderings() {
        for m in 3..=8 {
            let z0 = root(SeriesKind::MonotoneG, m);
            let z1 = root(SeriesKind::MonotoneMajorant, m);
            assert!(z1.z0 >= z0.z0 - ROOT_TOLERANCE, "m={m}");
            assert!(z0.rho > lll_lower(m).unwrap().rho_lower);
            assert!(z0.rho < block_upper(m).unwrap());
        }
    }

    #[test]
    fn quadratic_examples() {
        let q = monotone_lb_quadratic(6).unwrap();
        assert!(q.valid);
        let e = q.epsilon_prime.unwrap();
        assert!((e - 1.197_514_082_26e-3).abs() < 1e-13);
        assert!((q.rho_lower.unwrap() - 0.99880).abs() < 1e-5);
        for m in 6..=10 {
            let q = monotone_lb_quadratic(m).unwrap();
            let f = to_f64(&ratio(BigUint::one(), factorial(m)));
            // compare gaps: ε' > 1/m! - 1/(m m!)
            assert!(q.epsilon_prime.unwrap() > f - f / m as f64);
            let e = q.epsilon_prime.unwrap();
            assert!((q.approx_epsilon - e).abs() / e <= 1e-2);
        }
        for m in 4..=8 {
            let q = monotone_lb_quadratic(m).unwrap();
            let rho = root(SeriesKind::MonotoneG, m).rho;
            assert!(q.rho_lower.unwrap() <= rho, "m={m}");
        }
        let q = monotone_lb_quadratic(3).unwrap();
        assert!(!q.valid);
        assert!(q.discriminant < 0.0);
        assert!(q.epsilon_prime.is_none());
        assert!(monotone_lb_quadratic(2).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in [
            SeriesKind::MonotoneG,
            SeriesKind::MonotoneMajorant,
            SeriesKind::Nakamura,
        ] {
            assert_eq!(kind.name().parse::<SeriesKind>().unwrap(), kind);
        }
    }
}
