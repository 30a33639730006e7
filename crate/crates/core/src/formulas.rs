//! Closed-form bounds: exact integer branches via `u128` binomials, real
//! branches in `f64`.

use std::fmt;

use serde::Serialize;

use crate::binom::{binomial, binomial_real};
use crate::error::FormulaError;

#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Value {
    ExactInteger(u128),
    Real(f64),
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BoundValue {
    #[serde(flatten)]
    pub value: Value,
    pub condition: String,
}

impl BoundValue {
    fn exact(v: u128, condition: impl Into<String>) -> Self {
        BoundValue { value: Value::ExactInteger(v), condition: condition.into() }
    }

    fn real(v: f64, condition: impl Into<String>) -> Self {
        BoundValue { value: Value::Real(v), condition: condition.into() }
    }

    pub fn as_exact(&self) -> Option<u128> {
        match self.value {
            Value::ExactInteger(v) => Some(v),
            Value::Real(_) => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self.value {
            Value::ExactInteger(v) => v as f64,
            Value::Real(v) => v,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Value::ExactInteger(v) => write!(f, "{v}")?,
            Value::Real(v) => write!(f, "{v}")?,
        }
        write!(f, "  [{}]", self.condition)
    }
}

fn c(n: u128, k: u128, what: &'static str) -> Result<u128, FormulaError> {
    binomial(n, k).ok_or(FormulaError::Overflow(what))
}

fn domain(formula: &'static str, requirement: impl Into<String>) -> FormulaError {
    FormulaError::Domain { formula, requirement: requirement.into() }
}

/// Erdős Matching Conjecture value `max{C(rk+r-1, r), C(n, r) - C(n-k, r)}`.
pub fn emc_rhs(n: u64, r: u64, k: u64) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "emc-rhs";
    if r == 0 || k.checked_mul(r).is_none_or(|rk| rk > n) {
        return Err(domain(NAME, "r >= 1 and 0 <= k <= n/r"));
    }
    let (n, r, k) = (n as u128, r as u128, k as u128);
    let clique = c(r * k + r - 1, r, NAME)?;
    let cover = c(n, r, NAME)? - c(n - k, r, NAME)?;
    Ok(BoundValue::exact(clique.max(cover), "ν(H) = k; exact"))
}

/// Conjectured `ex_r(n; 𝓛_{n,k}) = max{C(k+r-2, r), C(n, r) - C(n-(k-1)/r, r)}`.
pub fn conjecture_rhs(n: u64, r: u64, k: u64) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "conjecture-rhs";
    if r == 0 || k <= r || k % r != 1 % r {
        return Err(domain(NAME, "k > r and k ≡ 1 (mod r)"));
    }
    if n < k + r - 2 {
        return Err(domain(NAME, format!("n >= k + r - 2 = {}", k + r - 2)));
    }
    let (n, r, k) = (n as u128, r as u128, k as u128);
    let clique = c(k + r - 2, r, NAME)?;
    let cover = c(n, r, NAME)? - c(n - (k - 1) / r, r, NAME)?;
    Ok(BoundValue::exact(clique.max(cover), "conjectured exact value"))
}

/// Checks `conjecture_rhs(n, r, rk+1) == emc_rhs(n, r, k)` exactly.
pub fn emc_reduction_check(n: u64, r: u64, k: u64) -> Result<bool, FormulaError> {
    if k == 0 || n < r * k + r - 1 {
        return Err(domain("emc-reduction", "k >= 1 and n >= rk + r - 1"));
    }
    let lhs = conjecture_rhs(n, r, r * k + 1)?.as_exact();
    let rhs = emc_rhs(n, r, k)?.as_exact();
    Ok(lhs.is_some() && lhs == rhs)
}

/// Graph case (r = 2): `max{C(k,2), C(n,2) - C(n-⌊(k-1)/2⌋, 2) + c}`, `c = 1` iff k even.
pub fn ning_wang_rhs(n: u64, k: u64) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "ning-wang";
    if k < 2 || k + 1 > n {
        return Err(domain(NAME, "2 <= k <= n - 1"));
    }
    let (n, k) = (n as u128, k as u128);
    let parity = if k % 2 == 0 { 1 } else { 0 };
    let clique = c(k, 2, NAME)?;
    let cover = c(n, 2, NAME)? - c(n - (k - 1) / 2, 2, NAME)? + parity;
    Ok(BoundValue::exact(clique.max(cover), "theorem for graphs; exact"))
}

/// 3-graph matching bound `max{C(3k+2, 3), C(n,3) - C(n-k,3)}`, valid for n ≥ 3k+2.
pub fn frankl3_rhs(n: u64, k: u64) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "frankl3";
    if n < 3 * k + 2 {
        return Err(domain(NAME, "n >= 3k + 2"));
    }
    let (n, k) = (n as u128, k as u128);
    let clique = c(3 * k + 2, 3, NAME)?;
    let cover = c(n, 3, NAME)? - c(n - k, 3, NAME)?;
    Ok(BoundValue::exact(clique.max(cover), "n >= 3k + 2"))
}

/// `C(n, r) - C(n-k, r)`, valid for n ≥ (2r-1)k + r.
pub fn franklr_rhs(n: u64, r: u64, k: u64) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "franklr";
    if r == 0 || n < (2 * r - 1) * k + r {
        return Err(domain(NAME, "n >= (2r - 1)k + r"));
    }
    let (n, r, k) = (n as u128, r as u128, k as u128);
    let v = c(n, r, NAME)? - c(n - k, r, NAME)?;
    Ok(BoundValue::exact(v, "n >= (2r - 1)k + r"))
}

/// The cubic `27x³ + (1-x)³ - 1` whose interior root separates the two r = 3 regimes.
pub fn f(x: f64) -> f64 {
    27.0 * x * x * x + (1.0 - x).powi(3) - 1.0
}

/// Root of [`f`] in (0, 1/3).
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct Beta0 {
    pub value: f64,
}

pub fn beta0() -> Beta0 {
    Beta0 { value: (321f64.sqrt() - 3.0) / 52.0 }
}

/// Density `(9/2)β₀³` where the r = 3 bounds change branch.
pub fn alpha0() -> f64 {
    4.5 * beta0().value.powi(3)
}

/// Both branches of the r = 3 matching lower bound, `(1 - ∛(1-6α))n - 2`
/// and `(∛(6α)/3)n - 1`.
pub fn matching_lb_r3_branches(alpha: f64, n: u64) -> (f64, f64) {
    let n = n as f64;
    ((1.0 - (1.0 - 6.0 * alpha).cbrt()) * n - 2.0, (6.0 * alpha).cbrt() / 3.0 * n - 1.0)
}

/// Lower bound on ν(H) for a 3-graph with `αn³` edges.
pub fn matching_lb_r3(alpha: f64, n: u64) -> Result<BoundValue, FormulaError> {
    if !(alpha > 0.0 && alpha < 1.0 / 6.0) {
        return Err(domain("matching-lb", "0 < α < 1/6"));
    }
    let (low, high) = matching_lb_r3_branches(alpha, n);
    let a0 = alpha0();
    let (v, cond) = if alpha < a0 {
        (low, "0 < α < (9/2)β₀³; n sufficiently large")
    } else if alpha > a0 {
        (high, "(9/2)β₀³ < α < 1/6; n sufficiently large")
    } else {
        (low.max(high), "α = (9/2)β₀³: max of both branches")
    };
    Ok(BoundValue::real(v, cond))
}

/// Upper end of the density range for the general-r bounds, `(1 - (1 - 1/(2r))^r)/r!`.
pub fn alpha_max_general(r: u32) -> f64 {
    (1.0 - (1.0 - 1.0 / (2.0 * r as f64)).powi(r as i32)) / factorial(r)
}

fn factorial(r: u32) -> f64 {
    (1..=r).map(f64::from).product()
}

/// `(1 - (1 - r!α)^{1/r})n - r + 1`.
pub fn matching_lb_general(alpha: f64, n: u64, r: u32) -> Result<BoundValue, FormulaError> {
    if r < 2 {
        return Err(domain("matching-lb-general", "r >= 2"));
    }
    let top = alpha_max_general(r);
    if !(alpha > 0.0 && alpha < top) {
        return Err(domain("matching-lb-general", format!("0 < α < {top}")));
    }
    let root = (1.0 - factorial(r) * alpha).powf(1.0 / r as f64);
    let v = (1.0 - root) * n as f64 - r as f64 + 1.0;
    Ok(BoundValue::real(v, "n sufficiently large"))
}

/// Both r = 3 forest branches, `3(1 - ∛(1-6α))n` and `∛(6α)n`.
pub fn dense_forest_r3_branches(alpha: f64, n: u64) -> (f64, f64) {
    let n = n as f64;
    (3.0 * (1.0 - (1.0 - 6.0 * alpha).cbrt()) * n, (6.0 * alpha).cbrt() * n)
}

/// Leading-order lower bound on l(H) for an r-graph with `αn^r` edges; the
/// `o(1)n` correction is dropped.
pub fn dense_forest_lb(alpha: f64, n: u64, r: u32) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "dense-forest-lb";
    match r {
        3 => {
            if !(alpha > 0.0 && alpha < 1.0 / 6.0) {
                return Err(domain(NAME, "0 < α < 1/6 for r = 3"));
            }
            let (low, high) = dense_forest_r3_branches(alpha, n);
            let a0 = alpha0();
            let (v, cond) = if alpha < a0 {
                (low, "0 < α < (9/2)β₀³; o(1)n term dropped")
            } else if alpha > a0 {
                (high, "(9/2)β₀³ < α < 1/6; o(1)n term dropped")
            } else {
                (low.max(high), "α = (9/2)β₀³: max of both branches; o(1)n term dropped")
            };
            Ok(BoundValue::real(v, cond))
        }
        r if r >= 4 => {
            let top = alpha_max_general(r);
            if !(alpha > 0.0 && alpha < top) {
                return Err(domain(NAME, format!("0 < α < {top} for r = {r}")));
            }
            let root = (1.0 - factorial(r) * alpha).powf(1.0 / r as f64);
            let rf = r as f64;
            Ok(BoundValue::real((rf - rf * root) * n as f64, "o(1)n term dropped"))
        }
        _ => Err(domain(NAME, "r >= 3")),
    }
}

/// Leading-order asymptotic Turán value `max{C(cn, r), C(n, r) - C(n - cn/r, r)}`.
/// The clique branch uses `⌊cn⌋`; the join branch uses the real `cn/r` in a
/// generalised binomial.
pub fn theorem12_rhs(n: u64, r: u32, c: f64) -> Result<BoundValue, FormulaError> {
    const NAME: &str = "theorem12";
    let ok = match r {
        3 => c > 0.0 && c < 1.0,
        r if r >= 4 => c > 0.0 && c < 0.5,
        _ => false,
    };
    if !ok {
        return Err(domain(NAME, "r = 3 with 0 < c < 1, or r >= 4 with 0 < c < 1/2"));
    }
    let (clique, cover) = theorem12_branches(n, r, c);
    Ok(BoundValue::real(
        clique.max(cover),
        "clique branch C(⌊cn⌋, r); join branch C(n, r) - C(n - cn/r, r) with real cn/r; + o(n^r) unquantified",
    ))
}

pub fn theorem12_branches(n: u64, r: u32, c: f64) -> (f64, f64) {
    let nf = n as f64;
    let floor_cn = (c * nf).floor();
    let clique = binomial_real(floor_cn, r);
    let cover = binomial_real(nf, r) - binomial_real(nf - c * nf / r as f64, r);
    (clique, cover)
}
