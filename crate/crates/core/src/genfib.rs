//! Generalized (k-step) Fibonacci numbers and their partial sums.
//!
//! For order `k ≥ 2`:
//!
//! ```text
//! F(n) = 0                      0 ≤ n ≤ k-2
//! F(k-1) = 1
//! F(n) = F(n-1) + … + F(n-k)    n ≥ k
//!
//! f(i) = F(k-1) + … + F(i)      (0 for i ≤ k-2)
//! g(j) = 1 + f(n-2) + … + f(n-j)
//! h(l) = f(n) + g(k-1) + g(k-2) + … + g(k+1-l)
//! ```
//!
//! `g` and `h` depend on the stick piece count `n` as well as on their own
//! argument. Both are evaluated by their defining sums for every argument
//! `≥ 2`; `f` vanishes on small and negative indices so the sums stay well
//! defined when the argument runs past `n - k + 1` (respectively `k - 2`).

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{domain, Result};

/// Append-only memo of `F(0..)` and `f(0..)` for one order `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenFibTable {
    k: usize,
    values: Vec<BigUint>,
    partial: Vec<BigUint>,
}

impl GenFibTable {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return domain(format!("Fibonacci order k must be at least 2, got {k}"));
        }
        Ok(Self {
            k,
            values: Vec::new(),
            partial: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    /// Number of memoized entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn partial_sums(&self) -> &[BigUint] {
        &self.partial
    }

    /// Grows both sequences so that index `n` is present.
    pub fn extend_to(&mut self, n: usize) {
        let k = self.k;
        while self.values.len() <= n {
            let m = self.values.len();
            let next = if m + 2 <= k {
                BigUint::zero()
            } else if m + 1 == k {
                BigUint::one()
            } else {
                self.values[m - k..].iter().sum()
            };
            let acc = match self.partial.last() {
                Some(prev) => prev + &next,
                None => next.clone(),
            };
            self.values.push(next);
            self.partial.push(acc);
        }
    }

    /// `F(n)` of this order.
    pub fn fib(&mut self, n: usize) -> &BigUint {
        self.extend_to(n);
        &self.values[n]
    }

    /// `f(i)`: the partial sum `F(k-1) + … + F(i)`.
    pub fn partial_sum(&mut self, i: usize) -> &BigUint {
        self.extend_to(i);
        &self.partial[i]
    }

    /// `f(i)` with negative indices read as 0.
    pub fn partial_sum_at(&mut self, i: i64) -> BigUint {
        if i < 0 {
            BigUint::zero()
        } else {
            self.partial_sum(i as usize).clone()
        }
    }

    /// `g(j) = 1 + Σ_{l=2..=j} f(n - l)`.
    pub fn g(&mut self, n: usize, j: usize) -> Result<BigUint> {
        if n < self.k {
            return domain(format!("g needs n ≥ k = {}, got n = {n}", self.k));
        }
        if j < 2 {
            return domain(format!("g needs j ≥ 2, got {j}"));
        }
        let mut acc = BigUint::one();
        for l in 2..=j {
            acc += self.partial_sum_at(n as i64 - l as i64);
        }
        Ok(acc)
    }

    /// `h(l) = f(n) + Σ_{j=2..=l} g(k + 1 - j)`.
    pub fn h(&mut self, n: usize, l: usize) -> Result<BigUint> {
        let k = self.k;
        if k < 3 {
            return domain(format!("h needs order k ≥ 3, got {k}"));
        }
        if n < k {
            return domain(format!("h needs n ≥ k = {k}, got n = {n}"));
        }
        if l < 2 {
            return domain(format!("h needs l ≥ 2, got {l}"));
        }
        let mut acc = self.partial_sum(n).clone();
        for j in 2..=l {
            // k + 1 - j drops below 2 once l ≥ k; g is undefined there.
            if k + 1 < j + 2 {
                return domain(format!("h({l}) reaches g below index 2 for order {k}"));
            }
            acc += self.g(n, k + 1 - j)?;
        }
        Ok(acc)
    }
}

thread_local! {
    static TABLES: RefCell<BTreeMap<usize, GenFibTable>> = const { RefCell::new(BTreeMap::new()) };
}

fn with_table<T>(k: i64, f: impl FnOnce(&mut GenFibTable) -> Result<T>) -> Result<T> {
    if k < 2 {
        return domain(format!("Fibonacci order k must be at least 2, got {k}"));
    }
    let k = k as usize;
    TABLES.with(|cell| {
        let mut tables = cell.borrow_mut();
        let table = match tables.entry(k) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(GenFibTable::new(k)?),
        };
        f(table)
    })
}

fn nonneg(name: &str, v: i64) -> Result<usize> {
    if v < 0 {
        domain(format!("{name} must be non-negative, got {v}"))
    } else {
        Ok(v as usize)
    }
}

/// `F_n^(k)`, memoized per thread.
pub fn gen_fib(k: i64, n: i64) -> Result<BigUint> {
    with_table(k, |t| Ok(t.fib(nonneg("n", n)?).clone()))
}

/// `f_k(i)`, memoized per thread.
pub fn f_sum(k: i64, i: i64) -> Result<BigUint> {
    with_table(k, |t| Ok(t.partial_sum(nonneg("i", i)?).clone()))
}

/// `g_k(j)` for stick piece count `n`.
pub fn g_val(k: i64, n: i64, j: i64) -> Result<BigUint> {
    with_table(k, |t| t.g(nonneg("n", n)?, nonneg("j", j)?))
}

/// `h_k(l)` for stick piece count `n`.
pub fn h_val(k: i64, n: i64, l: i64) -> Result<BigUint> {
    with_table(k, |t| t.h(nonneg("n", n)?, nonneg("l", l)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn fib_cases() {
        assert_eq!(gen_fib(4, 2).unwrap(), big(0));
        assert_eq!(gen_fib(3, 2).unwrap(), big(1));
        assert_eq!(gen_fib(2, 6).unwrap(), big(8));
        // tribonacci from the seed 0, 0, 1
        let trib: Vec<u64> = vec![0, 0, 1, 1, 2, 4, 7, 13, 24, 44];
        for (n, v) in trib.into_iter().enumerate() {
            assert_eq!(gen_fib(3, n as i64).unwrap(), big(v));
        }
    }

    #[test]
    fn partial_sum_cases() {
        assert_eq!(f_sum(3, 5).unwrap(), big(8));
        assert_eq!(f_sum(4, 2).unwrap(), big(0));
        assert_eq!(f_sum(2, 4).unwrap(), big(7));
    }

    #[test]
    fn g_cases() {
        assert_eq!(g_val(3, 6, 2).unwrap(), big(5));
        assert_eq!(g_val(3, 5, 2).unwrap(), big(3));
        // f_2(2) = F_4 - 1 = 2
        assert_eq!(f_sum(2, 2).unwrap(), big(2));
        assert_eq!(g_val(2, 4, 2).unwrap(), big(3));
    }

    #[test]
    fn h_cases() {
        assert_eq!(h_val(3, 5, 2).unwrap(), big(11));
        assert_eq!(h_val(3, 6, 2).unwrap(), big(20));
        // f_4(5) = 1 + 1 + 2 = 4, g_4(3) = 1 + f_4(3) + f_4(2) = 2
        assert_eq!(f_sum(4, 5).unwrap(), big(4));
        assert_eq!(g_val(4, 5, 3).unwrap(), big(2));
        assert_eq!(h_val(4, 5, 2).unwrap(), big(6));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(gen_fib(1, 3), Err(Error::Domain(_))));
        assert!(matches!(gen_fib(3, -1), Err(Error::Domain(_))));
        assert!(matches!(f_sum(0, 2), Err(Error::Domain(_))));
        assert!(matches!(f_sum(3, -2), Err(Error::Domain(_))));
        assert!(matches!(g_val(3, 6, 1), Err(Error::Domain(_))));
        assert!(matches!(g_val(3, 2, 2), Err(Error::Domain(_))));
        assert!(matches!(h_val(3, 6, 1), Err(Error::Domain(_))));
        assert!(matches!(h_val(2, 6, 2), Err(Error::Domain(_))));
        assert!(matches!(h_val(3, 6, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn lemma_recurrence() {
        for k in 2..=6usize {
            let mut t = GenFibTable::new(k).unwrap();
            for j in (k - 1)..=40 {
                let rhs: BigUint = BigUint::one()
                    + (1..=k)
                        .map(|i| t.partial_sum_at(j as i64 - i as i64))
                        .sum::<BigUint>();
                assert_eq!(t.partial_sum(j), &rhs, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn ordinary_fibonacci_closed_form() {
        let mut t = GenFibTable::new(2).unwrap();
        for i in 2..=40 {
            let expected = t.fib(i + 2) - 1u32;
            assert_eq!(t.partial_sum(i), &expected);
        }
    }

    #[test]
    fn g_boundary_identity() {
        for k in 4..=6usize {
            let mut t = GenFibTable::new(k - 1).unwrap();
            for n in k..=k + 6 {
                let lhs = t.g(n, k - 1).unwrap();
                let fn_ = t.partial_sum(n).clone();
                let rhs = fn_ - t.partial_sum(n - 1);
                assert_eq!(lhs, rhs, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn monotone_from_k() {
        for k in 2..=6usize {
            let mut t = GenFibTable::new(k).unwrap();
            t.extend_to(60);
            for i in (k - 1)..60 {
                assert!(t.values()[i] <= t.values()[i + 1]);
                assert!(t.partial_sums()[i] <= t.partial_sums()[i + 1]);
                if i >= k {
                    assert!(t.values()[i] < t.values()[i + 1]);
                    assert!(t.partial_sums()[i] < t.partial_sums()[i + 1]);
                }
            }
        }
    }

    #[test]
    fn memoization_is_transparent() {
        let a = f_sum(5, 80).unwrap();
        let b = f_sum(5, 80).unwrap();
        assert_eq!(a, b);
        let mut fresh = GenFibTable::new(5).unwrap();
        assert_eq!(fresh.partial_sum(80), &a);
        // partial growth then re-query gives the same prefix
        let mut t = GenFibTable::new(3).unwrap();
        t.extend_to(5);
        let early = t.values().to_vec();
        t.extend_to(50);
        assert_eq!(&t.values()[..6], &early[..]);
    }

    #[test]
    fn exceeds_u64() {
        // F_100 of the ordinary sequence overflows 64 bits.
        let v = gen_fib(2, 100).unwrap();
        assert_eq!(v.to_string(), "354224848179261915075");
    }
}
