use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

pub(crate) fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub(crate) fn binomial_u64(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    // exact at every step: C(n, i+1) = C(n, i) * (n-i) / (i+1)
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as u64
}

pub(crate) fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Falling factorial `n (n-1) ... (n-k+1)`, saturating.
pub(crate) fn falling(n: usize, k: usize) -> u128 {
    (0..k).fold(
        1u128,
        |acc, i| {
            if i >= n {
                0
            } else {
                acc.saturating_mul((n - i) as u128)
            }
        },
    )
}
