//! Binomial and multinomial kernels, plus enumeration of bounded integer
//! compositions in lexicographic order.
//!
//! Two numeric routes are kept side by side: exact big integers for identity
//! checks at moderate sizes, and base-2 logarithms backed by a shared table of
//! log-factorials for arbitrary sizes.

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base-2 logarithm of a nonnegative real. Zero is stored as `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    pub fn from_log2(log2_value: f64) -> Self {
        LogWeight(log2_value)
    }

    /// Panics on negative or NaN input.
    pub fn from_value(x: f64) -> Self {
        assert!(x >= 0.0, "LogWeight of negative value {x}");
        if x == 0.0 {
            Self::ZERO
        } else {
            LogWeight(x.log2())
        }
    }

    pub fn log2(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp2()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// Product of the underlying values.
impl std::ops::Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, other: LogWeight) -> LogWeight {
        if self.is_zero() || other.is_zero() {
            LogWeight::ZERO
        } else {
            LogWeight(self.0 + other.0)
        }
    }
}

/// Quotient of the underlying values. Dividing by zero is a caller bug.
impl std::ops::Div for LogWeight {
    type Output = LogWeight;

    fn div(self, other: LogWeight) -> LogWeight {
        assert!(!other.is_zero(), "LogWeight division by zero");
        if self.is_zero() {
            LogWeight::ZERO
        } else {
            LogWeight(self.0 - other.0)
        }
    }
}

impl fmt::Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "2^-inf")
        } else {
            write!(f, "2^{}", self.0)
        }
    }
}

// Table of log2(i!) for i = 0..len, grown on demand. Entries are produced by
// compensated summation so that differences of large entries stay accurate.
struct LogFactorialTable {
    values: Arc<Vec<f64>>,
    sum: f64,
    comp: f64,
}

fn table() -> &'static RwLock<LogFactorialTable> {
    static TABLE: OnceLock<RwLock<LogFactorialTable>> = OnceLock::new();
    TABLE.get_or_init(|| {
        RwLock::new(LogFactorialTable {
            values: Arc::new(vec![0.0]),
            sum: 0.0,
            comp: 0.0,
        })
    })
}

/// Snapshot of the log2-factorial table covering at least `0..=max`.
pub fn log2_factorials(max: usize) -> Arc<Vec<f64>> {
    {
        let guard = table().read().expect("log-factorial table poisoned");
        if guard.values.len() > max {
            return Arc::clone(&guard.values);
        }
    }
    let mut guard = table().write().expect("log-factorial table poisoned");
    if guard.values.len() <= max {
        let target = (max + 1).max(2 * guard.values.len()).max(1024);
        let mut values = Vec::with_capacity(target);
        values.extend_from_slice(&guard.values);
        let (mut sum, mut comp) = (guard.sum, guard.comp);
        for i in values.len()..target {
            // Neumaier summation
            let term = (i as f64).log2();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            values.push(sum + comp);
        }
        guard.sum = sum;
        guard.comp = comp;
        guard.values = Arc::new(values);
    }
    Arc::clone(&guard.values)
}

pub fn log2_factorial(n: usize) -> f64 {
    log2_factorials(n)[n]
}

fn check_nonnegative(n: i64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::Domain(format!("binomial top index must be >= 0, got {n}")))
}

/// Exact binomial coefficient; zero when `k` lies outside `[0, n]`.
pub fn binom_exact(n: i64, k: i64) -> Result<BigUint> {
    let n = check_nonnegative(n)?;
    if k < 0 || k as u64 > n as u64 {
        return Ok(BigUint::zero());
    }
    Ok(binom_big(n, k as usize))
}

pub(crate) fn binom_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // acc = C(n-k+i, i) after step i, always integral
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Row `C(n, 0..=n)` of Pascal's triangle.
pub fn binom_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * (n - k + 1) / k;
        row.push(c.clone());
    }
    row
}

/// log2 of `binom(n, k)`; [`LogWeight::ZERO`] when `k` lies outside `[0, n]`.
pub fn log2_binom(n: i64, k: i64) -> Result<LogWeight> {
    let n = check_nonnegative(n)?;
    if k < 0 || k as u64 > n as u64 {
        return Ok(LogWeight::ZERO);
    }
    Ok(LogWeight(log2_binom_unchecked(
        &log2_factorials(n),
        n,
        k as usize,
    )))
}

#[inline]
pub(crate) fn log2_binom_unchecked(lf: &[f64], n: usize, k: usize) -> f64 {
    lf[n] - lf[k] - lf[n - k]
}

/// log2 of `n! / (parts[0]! parts[1]! ...)`.
pub fn multinomial_log2(n: usize, parts: &[usize]) -> Result<LogWeight> {
    let total: usize = parts.iter().sum();
    if total != n {
        return Err(Error::Domain(format!(
            "multinomial parts sum to {total}, expected {n}"
        )));
    }
    let lf = log2_factorials(n);
    let denom: f64 = parts.iter().map(|&k| lf[k]).sum();
    Ok(LogWeight(lf[n] - denom))
}

/// log2 of an arbitrary-precision integer, accurate to f64 rounding.
pub fn big_log2(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.log2() + shift as f64
}

/// Number of compositions of `n` with `0 <= k_i <= bounds[i]`: the coefficient
/// of `x^n` in the product of `1 + x + ... + x^{bounds[i]}`.
pub fn composition_count(n: usize, bounds: &[usize]) -> BigUint {
    let cap = n + 1;
    let mut poly = vec![BigUint::zero(); cap];
    poly[0] = BigUint::one();
    for &b in bounds {
        // multiply by (1 + ... + x^b) via a running window sum
        let mut next = vec![BigUint::zero(); cap];
        let mut window = BigUint::zero();
        for j in 0..cap {
            window += &poly[j];
            if j > b {
                window -= &poly[j - b - 1];
            }
            next[j] = window.clone();
        }
        poly = next;
    }
    poly.swap_remove(n)
}

/// Lexicographic stream of bounded compositions of `total`.
///
/// Besides the [`Iterator`] interface, [`BoundedCompositions::advance`]
/// reports the lowest index that changed, which lets callers keep prefix
/// products or sums up to date in amortized constant time per item.
#[derive(Debug, Clone)]
pub struct BoundedCompositions {
    total: usize,
    bounds: Vec<usize>,
    // suffix_cap[i] = sum of bounds[i..]
    suffix_cap: Vec<usize>,
    current: Vec<usize>,
    state: CursorState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CursorState {
    Fresh,
    Active,
    Done,
}

impl BoundedCompositions {
    pub fn new(total: usize, bounds: &[usize]) -> Self {
        let d = bounds.len();
        let mut suffix_cap = vec![0usize; d + 1];
        for i in (0..d).rev() {
            suffix_cap[i] = suffix_cap[i + 1].saturating_add(bounds[i]);
        }
        let feasible = total <= suffix_cap[0];
        let mut current = vec![0usize; d];
        if feasible {
            fill_min(&mut current, 0, total, &suffix_cap);
        }
        BoundedCompositions {
            total,
            bounds: bounds.to_vec(),
            suffix_cap,
            current,
            state: if feasible {
                CursorState::Fresh
            } else {
                CursorState::Done
            },
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// The composition most recently produced by [`advance`](Self::advance).
    pub fn current(&self) -> &[usize] {
        &self.current
    }

    /// Moves to the next composition. Returns the lowest changed index
    /// (0 for the first item), or `None` once exhausted.
    pub fn advance(&mut self) -> Option<usize> {
        match self.state {
            CursorState::Done => None,
            CursorState::Fresh => {
                self.state = CursorState::Active;
                Some(0)
            }
            CursorState::Active => {
                let d = self.current.len();
                let mut rest = 0usize;
                let mut i = d;
                while i > 1 {
                    i -= 1;
                    rest += self.current[i];
                    let pivot = i - 1;
                    if self.current[pivot] < self.bounds[pivot] && rest >= 1 {
                        self.current[pivot] += 1;
                        fill_min(&mut self.current, i, rest - 1, &self.suffix_cap);
                        return Some(pivot);
                    }
                }
                self.state = CursorState::Done;
                None
            }
        }
    }

    /// Splits the stream into contiguous lexicographic chunks, one per
    /// feasible value of the leading coordinate.
    pub fn leading_chunks(total: usize, bounds: &[usize]) -> Vec<LeadingChunk> {
        let Some((&b0, rest)) = bounds.split_first() else {
            return if total == 0 {
                vec![LeadingChunk {
                    lead: None,
                    inner: BoundedCompositions::new(0, &[]),
                }]
            } else {
                Vec::new()
            };
        };
        let rest_cap: usize = rest.iter().sum();
        let lo = total.saturating_sub(rest_cap);
        let hi = b0.min(total);
        (lo..=hi)
            .map(|k0| LeadingChunk {
                lead: Some(k0),
                inner: BoundedCompositions::new(total - k0, rest),
            })
            .collect()
    }
}

// Lexicographically smallest assignment of `amount` to positions `from..`.
fn fill_min(current: &mut [usize], from: usize, amount: usize, suffix_cap: &[usize]) {
    let mut remaining = amount;
    for j in from..current.len() {
        let k = remaining.saturating_sub(suffix_cap[j + 1]);
        current[j] = k;
        remaining -= k;
    }
    debug_assert_eq!(remaining, 0);
}

impl Iterator for BoundedCompositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().map(|_| self.current.clone())
    }
}

/// Compositions sharing one value of the leading coordinate.
#[derive(Debug, Clone)]
pub struct LeadingChunk {
    lead: Option<usize>,
    inner: BoundedCompositions,
}

impl LeadingChunk {
    pub fn lead(&self) -> Option<usize> {
        self.lead
    }
}

impl Iterator for LeadingChunk {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let rest = self.inner.next()?;
        Some(match self.lead {
            Some(k0) => std::iter::once(k0).chain(rest).collect(),
            None => rest,
        })
    }
}

/// Shorthand for [`BoundedCompositions::new`].
pub fn enumerate_compositions(n: usize, bounds: &[usize]) -> BoundedCompositions {
    BoundedCompositions::new(n, bounds)
}

/// Streams compositions together with `sum_i term(i, k_i)`, updating the
/// running sum only from the changed index onward.
pub(crate) fn for_each_weighted<F, G>(n: usize, bounds: &[usize], term: F, mut visit: G)
where
    F: Fn(usize, usize) -> f64,
    G: FnMut(&[usize], f64),
{
    let d = bounds.len();
    let mut iter = BoundedCompositions::new(n, bounds);
    let mut prefix = vec![0.0f64; d + 1];
    while let Some(pivot) = iter.advance() {
        let k = iter.current();
        for i in pivot..d {
            prefix[i + 1] = prefix[i] + term(i, k[i]);
        }
        visit(k, prefix[d]);
    }
}
