//! Cross-check suites run by `brokenstick verify`.
//!
//! Each suite compares two independent routes over a grid and reports one
//! [`Check`] per grid point. Defaults reproduce the acceptance grid.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::enumerate::{
    asymptotic_ratio, count_constrained, count_ngon_compositions, count_restricted, hermite_coeff,
    hermite_probability, series_coefficients, Positivity,
};
use crate::error::{domain, Result};
use crate::montecarlo::{estimate, exact_value, Mode, SimConfig, DEFAULT_CHUNKS, DEFAULT_SEED};
use crate::omega::run_elimination;
use crate::prob::{denominator_parts, prob_ngon, ProblemSpec};
use crate::rational::ExactRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma1,
    Prop2,
    Asymptotic,
    Montecarlo,
    Hermite,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma1" => Ok(Suite::Lemma1),
            "prop2" => Ok(Suite::Prop2),
            "asymptotic" => Ok(Suite::Asymptotic),
            "montecarlo" => Ok(Suite::Montecarlo),
            "hermite" => Ok(Suite::Hermite),
            other => domain(format!("unknown suite {other:?}")),
        }
    }
}

/// Grid overrides; `None` keeps the suite default.
#[derive(Clone, Copy, Debug, Default)]
pub struct Grid {
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub n_extra: Option<usize>,
    pub max_total: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub chunks: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(name: String, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn specs(grid: &Grid, k_range: (usize, usize), n_extra: usize) -> Result<Vec<ProblemSpec>> {
    let lo = grid.k_min.unwrap_or(k_range.0);
    let hi = grid.k_max.unwrap_or(k_range.1);
    let extra = grid.n_extra.unwrap_or(n_extra);
    let mut out = Vec::new();
    for k in lo..=hi {
        for n in k..=k + extra {
            out.push(ProblemSpec::new(k, n)?);
        }
    }
    Ok(out)
}

/// Closed-product series, restricted-parts DP and brute force agree on the
/// non-negative counts.
pub fn lemma1(grid: &Grid) -> Result<Vec<Check>> {
    let max_total = grid.max_total.unwrap_or(30);
    let mut checks = Vec::new();
    for spec in specs(grid, (3, 5), 3)? {
        let series = series_coefficients(&run_elimination(spec, false)?.product, max_total);
        let parts: Vec<u64> = denominator_parts(spec)?
            .iter()
            .filter_map(BigUint::to_u64)
            .collect();
        let mut mismatch = None;
        for total in 0..=max_total {
            let brute = count_constrained(spec, total as u64, Positivity::Nonneg)?;
            let dp = count_restricted(&parts, total)?;
            let s = series.get(total).cloned().unwrap_or_default();
            if brute != s || brute != dp {
                mismatch = Some(format!("N={total}: brute {brute}, series {s}, parts {dp}"));
                break;
            }
        }
        checks.push(check(
            format!("k={} n={}", spec.k(), spec.n()),
            mismatch.is_none(),
            mismatch.unwrap_or_else(|| format!("agree for N ≤ {max_total}")),
        ));
    }
    Ok(checks)
}

/// The eliminated exponent multiset equals the Fibonacci formula.
pub fn prop2(grid: &Grid) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for spec in specs(grid, (3, 6), 4)? {
        let engine = run_elimination(spec, false)?.product.sorted();
        let mut formula = denominator_parts(spec)?;
        formula.sort();
        let show = |v: &[BigUint]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        checks.push(check(
            format!("k={} n={}", spec.k(), spec.n()),
            engine == formula,
            format!("engine [{}] formula [{}]", show(&engine), show(&formula)),
        ));
    }
    Ok(checks)
}

/// Restricted-parts count against its leading asymptotic term.
pub fn asymptotic(grid: &Grid) -> Result<Vec<Check>> {
    let k = grid.k_min.unwrap_or(3);
    let n = k + grid.n_extra.unwrap_or(1);
    let spec = ProblemSpec::new(k, n)?;
    let big = grid.max_total.unwrap_or(100_000);
    let small = (big / 100).max(1);
    let one = ExactRational::one();
    let gap_big = (asymptotic_ratio(spec, big)? - one.clone()).abs();
    let gap_small = (asymptotic_ratio(spec, small)? - one).abs();
    Ok(vec![
        check(
            format!("k={k} n={n} N={big} within 2%"),
            gap_big.to_f64() < 0.02,
            format!("|ratio - 1| = {:.3e}", gap_big.to_f64()),
        ),
        check(
            format!("k={k} n={n} gap shrinks from N={small} to N={big}"),
            gap_big < gap_small,
            format!("{:.3e} -> {:.3e}", gap_small.to_f64(), gap_big.to_f64()),
        ),
    ])
}

/// The default Monte Carlo grid: mode, k, n.
pub const MONTECARLO_GRID: [(Mode, usize, usize); 7] = [
    (Mode::None, 3, 3),
    (Mode::None, 3, 5),
    (Mode::None, 4, 5),
    (Mode::None, 5, 6),
    (Mode::Forall, 3, 4),
    (Mode::Forall, 4, 5),
    (Mode::Ngon, 5, 5),
];

/// Simulation estimates within 4 standard errors of the exact values.
pub fn montecarlo(grid: &Grid) -> Result<Vec<Check>> {
    let trials = grid.trials.unwrap_or(1_000_000);
    let seed = grid.seed.unwrap_or(DEFAULT_SEED);
    let chunks = grid.chunks.unwrap_or(DEFAULT_CHUNKS);
    let mut checks = Vec::new();
    for (mode, k, n) in MONTECARLO_GRID {
        let config = SimConfig::new(ProblemSpec::new(k, n)?, mode, trials, seed, chunks)?;
        let result = estimate(&config);
        let exact = exact_value(mode, config.spec)?;
        let z = result.z_score(&exact);
        checks.push(check(
            format!("{mode:?} k={k} n={n}").to_lowercase(),
            z <= 4.0,
            format!("estimate {:.6} exact {} z {:.2}", result.estimate, exact, z),
        ));
    }
    Ok(checks)
}

/// Series coefficients against enumerated compositions, and the induced
/// probability against `1 - n/2^{n-1}`.
pub fn hermite(grid: &Grid) -> Result<Vec<Check>> {
    let max_total = grid.max_total.unwrap_or(25);
    let mut checks = Vec::new();
    for n in 3..=5 {
        let mut mismatch = None;
        for total in 0..=max_total {
            let series = hermite_coeff(n, total)?;
            let brute = count_ngon_compositions(n, total as u64)?;
            if series != brute.clone().into() {
                mismatch = Some(format!("N={total}: series {series}, compositions {brute}"));
                break;
            }
        }
        checks.push(check(
            format!("n={n} coefficients"),
            mismatch.is_none(),
            mismatch.unwrap_or_else(|| format!("agree for N ≤ {max_total}")),
        ));
    }
    for n in [3, 4] {
        let p = hermite_probability(n, 400)?;
        let gap = (p.clone() - prob_ngon(n)?).abs().to_f64();
        checks.push(check(
            format!("n={n} N=400 probability"),
            gap <= 0.05,
            format!("{:.6} vs {}, gap {gap:.4}", p.to_f64(), prob_ngon(n)?),
        ));
    }
    Ok(checks)
}

pub fn run(suite: Suite, grid: &Grid) -> Result<Report> {
    let checks = match suite {
        Suite::Lemma1 => lemma1(grid)?,
        Suite::Prop2 => prop2(grid)?,
        Suite::Asymptotic => asymptotic(grid)?,
        Suite::Montecarlo => montecarlo(grid)?,
        Suite::Hermite => hermite(grid)?,
    };
    Ok(Report {
        suite,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
