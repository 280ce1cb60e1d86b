//! Counting oracles that do not go through the Omega engine.
//!
//! - [`count_constrained`]: exhaustive search over weakly decreasing vectors
//!   satisfying the window inequalities `a_i ≥ a_{i+1} + … + a_{i+k-1}`.
//! - [`count_restricted`] / [`series_coefficients`]: the one-dimensional
//!   partition DP for `∏ 1/(1 - q^e)`.
//! - [`hermite_coeff`]: dense series expansion of the `n`-gon generating
//!   function `q^n/(1-q)^n - n q^{2n-1}/((1-q)^n (1+q)^{n-1})`.
//! - [`asymptotic_ratio`] and [`limit_probability`]: the large-`N` checks
//!   that connect the discrete counts back to the continuous probabilities.
//!
//! The crude form sums every `a_i` from 0, so the closed product counts the
//! non-negative solutions. The positive-parts counts agree only to leading
//! order; [`Positivity`] selects which one the brute force produces.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::omega::ClosedProduct;
use crate::prob::{binomial, denominator_parts, factorial, ProblemSpec};
use crate::rational::ExactRational;

/// Largest piece count the brute-force search accepts.
pub const MAX_BRUTE_PARTS: usize = 12;
/// Largest stick length accepted by [`count_ngon_compositions`].
pub const MAX_COMPOSITION_TOTAL: u64 = 60;

/// Largest stick length the brute-force search accepts for `n` pieces:
/// 400 up to 4 pieces, 120 up to 8, 60 up to [`MAX_BRUTE_PARTS`].
pub fn max_brute_total(n: usize) -> u64 {
    match n {
        0..=4 => 400,
        5..=8 => 120,
        _ => 60,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Positivity {
    /// Every `a_i ≥ 0`.
    Nonneg,
    /// Every `a_i ≥ 1`.
    Positive,
}

impl Positivity {
    fn lower_bound(self) -> u64 {
        match self {
            Positivity::Nonneg => 0,
            Positivity::Positive => 1,
        }
    }
}

/// Order in which the search tries candidate values for each part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    #[default]
    Descending,
    Ascending,
}

/// A weakly decreasing solution `a_1 ≥ … ≥ a_n` and its sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SolutionVector {
    pub parts: Vec<u64>,
    pub total: u64,
}

impl SolutionVector {
    pub fn is_weakly_decreasing(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] >= w[1])
    }

    /// `a_i ≥ a_{i+1} + … + a_{i+k-1}` for every full window.
    pub fn satisfies_windows(&self, k: usize) -> bool {
        let n = self.parts.len();
        n < k || (0..=n - k).all(|i| self.parts[i] >= self.parts[i + 1..i + k].iter().sum::<u64>())
    }
}

/// Counts indexed by `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.counts.get(n)
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl Serialize for CountTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.counts.iter().map(|c| c.to_string()))
    }
}

struct Search<'a, F> {
    k: usize,
    n: usize,
    lb: u64,
    order: SearchOrder,
    parts: Vec<u64>,
    visit: &'a mut F,
}

impl<F: FnMut(&[u64])> Search<'_, F> {
    /// Feasible values for the next part given the remaining sum.
    fn range(&self, remaining: u64) -> Option<(u64, u64)> {
        let i = self.parts.len();
        let after = (self.n - i - 1) as u64;
        let mut hi = remaining;
        if let Some(&prev) = self.parts.last() {
            hi = hi.min(prev);
        }
        // every open window starting at w bounds the rest of its sum by parts[w]
        let windows = self.n - self.k + 1;
        for w in i.saturating_sub(self.k - 1)..i.min(windows) {
            let used: u64 = self.parts[w + 1..i].iter().sum();
            hi = hi.min(self.parts[w].checked_sub(used)?);
        }
        hi = hi.min(remaining.checked_sub(after * self.lb)?);
        let mut lo = self.lb.max(remaining.div_ceil(after + 1));
        if after == 0 {
            lo = lo.max(remaining);
        }
        (lo <= hi).then_some((lo, hi))
    }

    fn run(&mut self, remaining: u64) {
        if self.parts.len() == self.n {
            if remaining == 0 {
                (self.visit)(&self.parts);
            }
            return;
        }
        let Some((lo, hi)) = self.range(remaining) else {
            return;
        };
        let step = |this: &mut Self, x: u64| {
            this.parts.push(x);
            this.run(remaining - x);
            this.parts.pop();
        };
        match self.order {
            SearchOrder::Descending => (lo..=hi).rev().for_each(|x| step(self, x)),
            SearchOrder::Ascending => (lo..=hi).for_each(|x| step(self, x)),
        }
    }
}

fn check_bounds(spec: ProblemSpec, total: u64) -> Result<()> {
    let n = spec.n();
    if n > MAX_BRUTE_PARTS || total > max_brute_total(n) {
        return Err(Error::Resource(format!(
            "brute force is limited to n ≤ {MAX_BRUTE_PARTS} and N ≤ {} at n = {n}, got N = {total}",
            max_brute_total(n)
        )));
    }
    Ok(())
}

/// Calls `visit` on every solution, first part fixed to `first`.
fn search_from<F: FnMut(&[u64])>(
    spec: ProblemSpec,
    total: u64,
    positivity: Positivity,
    order: SearchOrder,
    first: u64,
    visit: &mut F,
) {
    let mut s = Search {
        k: spec.k(),
        n: spec.n(),
        lb: positivity.lower_bound(),
        order,
        parts: Vec::with_capacity(spec.n()),
        visit,
    };
    if let Some((lo, hi)) = s.range(total) {
        if (lo..=hi).contains(&first) {
            s.parts.push(first);
            s.run(total - first);
        }
    }
}

fn first_part_candidates(
    total: u64,
    n: usize,
    positivity: Positivity,
    order: SearchOrder,
) -> Vec<u64> {
    let lb = positivity.lower_bound();
    let lo = total.div_ceil(n as u64);
    let hi = total.saturating_sub((n as u64 - 1) * lb);
    let mut v: Vec<u64> = (lo..=hi).collect();
    if order == SearchOrder::Descending {
        v.reverse();
    }
    v
}

/// Every solution with sum `total`, in search order.
pub fn constrained_solutions(
    spec: ProblemSpec,
    total: u64,
    positivity: Positivity,
) -> Result<Vec<SolutionVector>> {
    check_bounds(spec, total)?;
    let mut out = Vec::new();
    for a1 in first_part_candidates(total, spec.n(), positivity, SearchOrder::Descending) {
        search_from(
            spec,
            total,
            positivity,
            SearchOrder::Descending,
            a1,
            &mut |p: &[u64]| {
                out.push(SolutionVector {
                    parts: p.to_vec(),
                    total,
                })
            },
        );
    }
    Ok(out)
}

/// Number of weakly decreasing `n`-vectors summing to `total` that satisfy
/// every window inequality.
///
/// Exhaustive; bounded by [`max_brute_total`] and [`MAX_BRUTE_PARTS`].
/// The search is split over the value of `a_1` and run in parallel.
pub fn count_constrained(spec: ProblemSpec, total: u64, positivity: Positivity) -> Result<BigUint> {
    count_constrained_with_order(spec, total, positivity, SearchOrder::Descending)
}

pub fn count_constrained_with_order(
    spec: ProblemSpec,
    total: u64,
    positivity: Positivity,
    order: SearchOrder,
) -> Result<BigUint> {
    check_bounds(spec, total)?;
    let count: u64 = first_part_candidates(total, spec.n(), positivity, order)
        .into_par_iter()
        .map(|a1| {
            let mut c = 0u64;
            search_from(spec, total, positivity, order, a1, &mut |_: &[u64]| c += 1);
            c
        })
        .sum();
    Ok(BigUint::from(count))
}

/// Coefficients of `∏ 1/(1 - q^p)` for `p` in `parts`, up to `q^max_total`.
pub fn restricted_table(parts: &[u64], max_total: usize) -> Result<CountTable> {
    if parts.contains(&0) {
        return domain("parts must be positive");
    }
    let mut counts = vec![BigUint::zero(); max_total + 1];
    counts[0] = BigUint::one();
    for &p in parts {
        let Ok(p) = usize::try_from(p) else { continue };
        for total in p..=max_total {
            let (lo, hi) = counts.split_at_mut(total);
            hi[0] += &lo[total - p];
        }
    }
    Ok(CountTable { counts })
}

/// Partitions of `total` into parts from the multiset `parts`; repeated
/// entries are distinct part types.
pub fn count_restricted(parts: &[u64], total: usize) -> Result<BigUint> {
    let table = restricted_table(parts, total)?;
    Ok(table.counts[total].clone())
}

/// Series coefficients of a closed product up to `q^max_total`.
pub fn series_coefficients(cp: &ClosedProduct, max_total: usize) -> CountTable {
    // exponents beyond max_total cannot contribute
    let parts: Vec<u64> = cp
        .exponents()
        .iter()
        .filter_map(|e| e.to_u64())
        .filter(|&e| e as u128 <= max_total as u128)
        .collect();
    restricted_table(&parts, max_total).expect("closed product exponents are positive")
}

fn inverse_one_minus_q_pow(n: usize, len: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); len];
    if len > 0 {
        s[0] = BigInt::one();
    }
    for _ in 0..n {
        for i in 1..len {
            let prev = s[i - 1].clone();
            s[i] += prev;
        }
    }
    s
}

fn divide_by_one_plus_q(s: &mut [BigInt]) {
    for i in 1..s.len() {
        let prev = s[i - 1].clone();
        s[i] -= prev;
    }
}

fn shift(s: &[BigInt], by: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); s.len()];
    if by < s.len() {
        out[by..].clone_from_slice(&s[..s.len() - by]);
    }
    out
}

/// Coefficients of `q^n/(1-q)^n - n q^{2n-1}/((1-q)^n (1+q)^{n-1})` up to
/// `q^max_total`.
pub fn hermite_series(n: usize, max_total: usize) -> Result<Vec<BigInt>> {
    if n < 3 {
        return domain(format!("n-gon needs n ≥ 3, got {n}"));
    }
    let len = max_total + 1;
    let base = inverse_one_minus_q_pow(n, len);
    let compositions = shift(&base, n);
    let mut tail = base;
    for _ in 0..n - 1 {
        divide_by_one_plus_q(&mut tail);
    }
    let tail = shift(&tail, 2 * n - 1);
    let scale = BigInt::from(n);
    Ok(compositions
        .into_iter()
        .zip(tail)
        .map(|(c, t)| c - &scale * t)
        .collect())
}

/// Compositions of `total` into `n` positive parts with `2 a_i ≤ total`,
/// read off the generating function.
pub fn hermite_coeff(n: usize, total: usize) -> Result<BigInt> {
    Ok(hermite_series(n, total)?.swap_remove(total))
}

/// The same count by direct enumeration of compositions.
pub fn count_ngon_compositions(n: usize, total: u64) -> Result<BigUint> {
    if n < 3 {
        return domain(format!("n-gon needs n ≥ 3, got {n}"));
    }
    if total > MAX_COMPOSITION_TOTAL {
        return Err(Error::Resource(format!(
            "composition enumeration is limited to N ≤ {MAX_COMPOSITION_TOTAL}"
        )));
    }
    fn rec(left: usize, remaining: u64, cap: u64) -> u64 {
        if left == 0 {
            return (remaining == 0) as u64;
        }
        let hi = cap.min(remaining.saturating_sub(left as u64 - 1));
        (1..=hi).map(|a| rec(left - 1, remaining - a, cap)).sum()
    }
    Ok(BigUint::from(rec(n, total, total / 2)))
}

/// Discrete `n`-gon probability `hermite_coeff(n, N) / C(N-1, n-1)`.
pub fn hermite_probability(n: usize, total: usize) -> Result<ExactRational> {
    if total < n {
        return domain(format!("need N ≥ n, got N = {total}, n = {n}"));
    }
    let num = hermite_coeff(n, total)?;
    let den = binomial(total as u64 - 1, n as u64 - 1);
    ExactRational::new(num, BigInt::from(den))
}

/// `count_restricted(parts, N) / (N^{n-1} / ((n-1)! P))` where `parts` are
/// the closed-product exponents and `P` their product; tends to 1.
pub fn asymptotic_ratio(spec: ProblemSpec, total: usize) -> Result<ExactRational> {
    if total < 1 {
        return domain("asymptotic ratio needs N ≥ 1");
    }
    let parts = denominator_parts(spec)?;
    let product: BigUint = parts.iter().product();
    let small: Vec<u64> = parts
        .iter()
        .filter_map(|p| p.to_u64())
        .filter(|&p| p as u128 <= total as u128)
        .collect();
    let count = count_restricted(&small, total)?;
    let n = spec.n();
    let num = BigInt::from(count * factorial(n - 1) * product);
    let den = BigInt::from(BigUint::from(total).pow(n as u32 - 1));
    ExactRational::new(num, den)
}

/// `n! · #positive solutions / C(N-1, n-1)`, the finite-`N` probability
/// that no `k` pieces of an integer stick form a `k`-gon.
///
/// Pieces of equal length are counted `n!` times, so small `N` can give
/// values above 1; only the `N → ∞` limit is meaningful.
pub fn limit_probability(spec: ProblemSpec, total: u64) -> Result<ExactRational> {
    if total <= spec.n() as u64 {
        return domain(format!("need N > n, got N = {total}, n = {}", spec.n()));
    }
    let count = count_constrained(spec, total, Positivity::Positive)?;
    let num = BigInt::from(factorial(spec.n()) * count);
    let den = BigInt::from(binomial(total - 1, spec.n() as u64 - 1));
    ExactRational::new(num, den)
}
