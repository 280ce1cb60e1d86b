//! MacMahon's Omega operator restricted to the ±1 exponent fragment.
//!
//! A [`CrudeForm`] is a product of factors `(1 - q^e · M)^(-1)` where `M` is
//! a Laurent monomial in marker variables. Each marker encodes one linear
//! inequality among the stick pieces `a_1 ≥ … ≥ a_n`:
//!
//! - `λ_i` for the window inequality `a_i ≥ a_{i+1} + … + a_{i+k-1}`,
//! - `μ_i` for the chain inequality `a_i ≥ a_{i+1}` on the tail.
//!
//! Applying `Ω≥` to a marker that appears with exponent `+1` in exactly one
//! factor and `-1` elsewhere uses the reduction
//!
//! ```text
//! Ω≥ 1 / ((1 - λ x_1)(1 - x_2/λ)⋯(1 - x_r/λ))
//!     = 1 / ((1 - x_1)(1 - x_1 x_2)⋯(1 - x_1 x_r))
//! ```
//!
//! Repeating it for every marker leaves a closed product `∏ 1/(1 - q^e)`.
//! Anything outside that fragment is rejected with [`Error::Shape`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prob::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Lambda,
    Mu,
}

/// A marker variable `λ_i` or `μ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EliminationVar {
    pub kind: VarKind,
    pub index: usize,
}

impl EliminationVar {
    pub fn lambda(index: usize) -> Self {
        Self {
            kind: VarKind::Lambda,
            index,
        }
    }

    pub fn mu(index: usize) -> Self {
        Self {
            kind: VarKind::Mu,
            index,
        }
    }

    /// Stable ASCII name, e.g. `lambda_3`.
    pub fn name(&self) -> String {
        match self.kind {
            VarKind::Lambda => format!("lambda_{}", self.index),
            VarKind::Mu => format!("mu_{}", self.index),
        }
    }
}

impl fmt::Display for EliminationVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Lambda => write!(f, "λ{}", self.index),
            VarKind::Mu => write!(f, "μ{}", self.index),
        }
    }
}

impl Serialize for EliminationVar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.name())
    }
}

/// One factor `(1 - q^q_exp · ∏ v^e_v)^(-1)`.
///
/// Zero exponents are never stored, so absence and exponent zero coincide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrudeFactor {
    q_exp: BigUint,
    vars: BTreeMap<EliminationVar, i64>,
}

impl CrudeFactor {
    pub fn new(q_exp: impl Into<BigUint>) -> Self {
        Self {
            q_exp: q_exp.into(),
            vars: BTreeMap::new(),
        }
    }

    /// Builder-style: multiply the monomial by `var^exp`.
    pub fn with(mut self, var: EliminationVar, exp: i64) -> Self {
        self.add_var(var, exp);
        self
    }

    fn add_var(&mut self, var: EliminationVar, exp: i64) {
        let e = self.vars.entry(var).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.vars.remove(&var);
        }
    }

    pub fn q_exp(&self) -> &BigUint {
        &self.q_exp
    }

    pub fn vars(&self) -> &BTreeMap<EliminationVar, i64> {
        &self.vars
    }

    pub fn exponent_of(&self, var: EliminationVar) -> i64 {
        self.vars.get(&var).copied().unwrap_or(0)
    }

    pub fn is_pure(&self) -> bool {
        self.vars.is_empty()
    }

    /// Monomial product: q-exponents add, variable exponents merge.
    fn times(&self, other: &CrudeFactor) -> CrudeFactor {
        let mut out = self.clone();
        out.q_exp += &other.q_exp;
        for (&v, &e) in &other.vars {
            out.add_var(v, e);
        }
        out
    }

    fn without(&self, var: EliminationVar) -> CrudeFactor {
        let mut out = self.clone();
        out.vars.remove(&var);
        out
    }
}

impl fmt::Display for CrudeFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = String::new();
        let mut den = String::new();
        for (v, &e) in &self.vars {
            let target = if e > 0 { &mut num } else { &mut den };
            target.push_str(&v.to_string());
            if e.abs() != 1 {
                target.push_str(&format!("^{}", e.abs()));
            }
        }
        write!(f, "(1 - q^{}", self.q_exp)?;
        if !num.is_empty() {
            write!(f, "·{num}")?;
        }
        if !den.is_empty() {
            write!(f, "/{den}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for CrudeFactor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let vars: BTreeMap<String, i64> = self.vars.iter().map(|(v, &e)| (v.name(), e)).collect();
        let mut st = s.serialize_struct("CrudeFactor", 2)?;
        st.serialize_field("q_exp", &self.q_exp.to_string())?;
        st.serialize_field("vars", &vars)?;
        st.end()
    }
}

/// An ordered product of crude factors; order is construction order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrudeForm {
    factors: Vec<CrudeFactor>,
}

impl CrudeForm {
    pub fn new(factors: Vec<CrudeFactor>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[CrudeFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Variables still present, in `Ord` order.
    pub fn variables(&self) -> Vec<EliminationVar> {
        let mut vs: Vec<_> = self
            .factors
            .iter()
            .flat_map(|f| f.vars.keys().copied())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Checks that every remaining variable has exponents in `{+1, -1}`
    /// with exactly one `+1` occurrence.
    pub fn check_discipline(&self) -> Result<()> {
        for var in self.variables() {
            locate(self, var)?;
        }
        Ok(())
    }
}

impl fmt::Display for CrudeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/")?;
        for factor in &self.factors {
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// `∏ 1/(1 - q^e_i)` with no marker variables left.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedProduct {
    exponents: Vec<BigUint>,
}

impl ClosedProduct {
    pub fn new(exponents: Vec<BigUint>) -> Result<Self> {
        if exponents.iter().any(|e| e == &BigUint::ZERO) {
            return Err(Error::Domain(
                "closed product exponents must be positive".into(),
            ));
        }
        Ok(Self { exponents })
    }

    /// Fails with a shape error if any marker variable survives.
    pub fn from_form(form: &CrudeForm) -> Result<Self> {
        if let Some(v) = form.variables().first() {
            return Err(Error::Shape(format!("variable {v} was not eliminated")));
        }
        Self::new(form.factors.iter().map(|f| f.q_exp.clone()).collect())
    }

    /// Exponents in construction order.
    pub fn exponents(&self) -> &[BigUint] {
        &self.exponents
    }

    /// Exponents as a sorted multiset.
    pub fn sorted(&self) -> Vec<BigUint> {
        let mut v = self.exponents.clone();
        v.sort();
        v
    }
}

/// One elimination step: the variable, the indices of the factors that
/// carried it, and what those factors became.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub var: EliminationVar,
    pub consumed: Vec<usize>,
    pub produced: Vec<CrudeFactor>,
}

/// The crude form for `spec`: one factor per stick piece.
///
/// Factor `i` (1-based) carries `λ_i^{+1}` for `i ≤ n-k+1`, `λ_j^{-1}` for
/// every window `j < i ≤ j+k-1`, `μ_i^{+1}` for `n-k+2 ≤ i ≤ n-1` and
/// `μ_{i-1}^{-1}` for `n-k+3 ≤ i ≤ n`.
pub fn build_crude(spec: ProblemSpec) -> CrudeForm {
    let (k, n) = (spec.k(), spec.n());
    let windows = n - k + 1;
    let factors = (1..=n)
        .map(|i| {
            let mut f = CrudeFactor::new(1u32);
            if i <= windows {
                f.add_var(EliminationVar::lambda(i), 1);
            }
            for j in i.saturating_sub(k - 1).max(1)..i.min(windows + 1) {
                f.add_var(EliminationVar::lambda(j), -1);
            }
            if i > windows && i < n {
                f.add_var(EliminationVar::mu(i), 1);
            }
            if i > windows + 1 {
                f.add_var(EliminationVar::mu(i - 1), -1);
            }
            f
        })
        .collect();
    CrudeForm::new(factors)
}

/// The elimination order: `λ_1 … λ_{n-k+1}` then `μ_{n-k+2} … μ_{n-1}`.
pub fn elimination_order(spec: ProblemSpec) -> Vec<EliminationVar> {
    let windows = spec.n() - spec.k() + 1;
    (1..=windows)
        .map(EliminationVar::lambda)
        .chain((windows + 1..spec.n()).map(EliminationVar::mu))
        .collect()
}

/// Index of the unique `+1` factor and the `-1` factors of `var`.
fn locate(form: &CrudeForm, var: EliminationVar) -> Result<(usize, Vec<usize>)> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (idx, f) in form.factors.iter().enumerate() {
        match f.exponent_of(var) {
            0 => {}
            1 => plus.push(idx),
            -1 => minus.push(idx),
            e => {
                return Err(Error::Shape(format!(
                    "{var} has exponent {e} in factor {idx}; only ±1 is supported"
                )))
            }
        }
    }
    match plus.as_slice() {
        [p] => Ok((*p, minus)),
        [] => Err(Error::Shape(format!(
            "{var} has no factor with exponent +1"
        ))),
        _ => Err(Error::Shape(format!(
            "{var} has exponent +1 in {} factors",
            plus.len()
        ))),
    }
}

/// Applies `Ω≥` to `var` and records the step.
pub fn eliminate_step(form: &CrudeForm, var: EliminationVar) -> Result<(CrudeForm, TraceStep)> {
    let (plus, minus) = locate(form, var)?;
    let x1 = form.factors[plus].without(var);
    let mut factors = form.factors.clone();
    factors[plus] = x1.clone();
    for &idx in &minus {
        factors[idx] = form.factors[idx].without(var).times(&x1);
    }
    let mut consumed = minus;
    consumed.push(plus);
    consumed.sort_unstable();
    let produced = consumed.iter().map(|&i| factors[i].clone()).collect();
    Ok((
        CrudeForm::new(factors),
        TraceStep {
            var,
            consumed,
            produced,
        },
    ))
}

/// Applies `Ω≥` to `var`.
pub fn eliminate(form: &CrudeForm, var: EliminationVar) -> Result<CrudeForm> {
    eliminate_step(form, var).map(|(f, _)| f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub product: ClosedProduct,
    pub trace: Option<Vec<TraceStep>>,
}

/// Eliminates every marker of `build_crude(spec)` in the fixed order.
///
/// A shape error here means the crude form left the supported fragment
/// mid-run, which is an internal invariant violation.
pub fn run_elimination(spec: ProblemSpec, trace: bool) -> Result<Elimination> {
    let mut form = build_crude(spec);
    let mut steps = Vec::new();
    for var in elimination_order(spec) {
        let (next, step) = eliminate_step(&form, var)?;
        next.check_discipline()?;
        if trace {
            steps.push(step);
        }
        form = next;
    }
    debug_assert!(form.factors.iter().all(|f| f.q_exp >= BigUint::one()));
    Ok(Elimination {
        product: ClosedProduct::from_form(&form)?,
        trace: trace.then_some(steps),
    })
}
