//! Exact closed-form probabilities for the broken-stick polygon problems.
//!
//! A stick is broken uniformly at random into `n` pieces and we ask about
//! forming a `k`-gon from `k` of them:
//!
//! - [`prob_none`]: no choice of `k` pieces forms a `k`-gon,
//! - [`prob_exists`]: some choice does,
//! - [`prob_forall`]: every choice does,
//! - [`prob_ngon`]: all `n` pieces form an `n`-gon.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::genfib::GenFibTable;
use crate::rational::ExactRational;

/// `k` polygon sides out of `n` stick pieces, `n ≥ k ≥ 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProblemSpec {
    k: usize,
    n: usize,
}

impl ProblemSpec {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 3 {
            return domain(format!("polygon needs k ≥ 3 sides, got k = {k}"));
        }
        if n < k {
            return domain(format!("need n ≥ k pieces, got k = {k}, n = {n}"));
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// `C(n, r)` by the multiplicative formula; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::ZERO;
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The `n` part sizes whose product is the denominator of [`prob_none`]:
/// `f_{k-1}(k-2), …, f_{k-1}(n)` followed by `h_{k-1}(2), …, h_{k-1}(k-2)`.
///
/// These are also the exponents of the closed product `∏ 1/(1 - q^e)`
/// counting the ordered outcomes, computed here from the Fibonacci tables
/// alone.
pub fn denominator_parts(spec: ProblemSpec) -> Result<Vec<BigUint>> {
    let (k, n) = (spec.k, spec.n);
    let mut table = GenFibTable::new(k - 1)?;
    let mut parts: Vec<BigUint> = (k - 2..=n).map(|i| table.partial_sum(i).clone()).collect();
    for l in 2..=k.saturating_sub(2) {
        parts.push(table.h(n, l)?);
    }
    Ok(parts)
}

/// Probability that no `k` of the `n` pieces form a `k`-gon.
pub fn prob_none(spec: ProblemSpec) -> Result<ExactRational> {
    let denom: BigUint = denominator_parts(spec)?.into_iter().product();
    ExactRational::new(BigInt::from(factorial(spec.n)), BigInt::from(denom))
}

/// Probability that at least one choice of `k` pieces forms a `k`-gon.
pub fn prob_exists(spec: ProblemSpec) -> Result<ExactRational> {
    Ok(ExactRational::one() - prob_none(spec)?)
}

/// Probability that every choice of `k` pieces forms a `k`-gon.
///
/// ```text
/// n(n-1)⋯(n-k+3) / m · Σ_{j=1..m} (-1)^{j+1} j^{-(k-3)} C(m, j) / (m/j + 1)_{k-2}
/// ```
///
/// with `m = n - k + 2` and `(x)_r = x(x+1)⋯(x+r-1)` the rising factorial.
pub fn prob_forall(spec: ProblemSpec) -> Result<ExactRational> {
    let (k, n) = (spec.k, spec.n);
    let m = (n - k + 2) as u64;
    let lead: BigUint = ((n - k + 3) as u64..=n as u64).map(BigUint::from).product();
    let lead = ExactRational::new(BigInt::from(lead), BigInt::from(m))?;

    let mut sum = ExactRational::zero();
    for j in 1..=m {
        let jq = ExactRational::from(j as i64);
        let base = ExactRational::new(m as i64, j as i64)? + ExactRational::one();
        let rising: ExactRational = (0..k as i64 - 2)
            .map(|i| &base + &ExactRational::from(i))
            .product();
        let term = ExactRational::from(BigInt::from(binomial(m, j)))
            .checked_div(&(jq.pow(k as i32 - 3)? * rising))?;
        if j % 2 == 1 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    Ok(lead * sum)
}

/// Probability that all `n` pieces form an `n`-gon: `1 - n / 2^(n-1)`.
pub fn prob_ngon(n: usize) -> Result<ExactRational> {
    if n < 3 {
        return domain(format!("n-gon needs n ≥ 3, got {n}"));
    }
    let pow = BigInt::one() << (n - 1);
    Ok(ExactRational::one() - ExactRational::new(n as i64, pow)?)
}
