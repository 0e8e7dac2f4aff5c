use alloc::string::String;

/// Errors reported by the core routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    Empty,
    #[error("values must be distinct (duplicate {0})")]
    DuplicateValue(i64),
    #[error("not a permutation of 1..={len}: {detail}")]
    NotAPermutation { len: usize, detail: String },
    #[error("cannot parse pattern {0:?}")]
    Parse(String),
    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: usize,
        expected: &'static str,
    },
    #[error("overlap position k = {k} is invalid for m = {m} (need 1 <= k <= m-1)")]
    InvalidOverlapPosition { m: usize, k: usize },
    #[error("impossible event pair: pattern has no overlap at k = {k}")]
    ImpossibleEventPair { k: usize },
    #[error("state space of {projected} states exceeds the budget of {budget}")]
    Capacity { projected: u128, budget: usize },
    #[error("no sign change of the series in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("{0}")]
    InvalidArgument(&'static str),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: usize, expected: &'static str) -> Self {
        Error::OutOfRange { name, value, expected }
    }

    /// True for resource-limit errors (as opposed to invalid input).
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
