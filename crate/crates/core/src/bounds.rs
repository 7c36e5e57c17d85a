//! Power-weighted superadditivity bounds for the l1-norm of coherence.
//!
//! Every strengthened bound is built from a single coefficient
//!
//! ```text
//! q(alpha, x) = ((1 + x)^alpha - 1) / x^alpha,   x = k^delta in (0, 1]
//! ```
//!
//! and a tiered weighting of the marginal coherences `C_1..C_n` of a
//! [`CoherenceProfile`]. The hypotheses compare each marginal with the tail
//! coherence behind it: for a partition index `m`, parties `1..=m` must
//! satisfy `C_i^beta >= T_i^beta / x` and parties `m+1..n-1` must satisfy
//! `C_j^beta <= T_j^beta / x`. Both families reduce to an interval of
//! admissible `x`, see [`partition_and_feasibility`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coherence::{coherence_profile, CoherenceProfile};
use crate::qmatrix::DensityMatrix;
use crate::{Error, Result};

/// Slack applied when checking the ratio hypotheses.
pub const FEASIBILITY_SLACK: f64 = 1e-9;
/// Smallest `x` the optimiser will use when the interval starts at zero.
pub const X_FLOOR: f64 = 1e-6;
/// Number of log-spaced points between the interval endpoint and its upper end.
pub const GRID_POINTS: usize = 16;

const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Eq4,
    Eq5,
    Thm1,
    Thm2AsPrinted,
    Thm2ProofConsistent,
    Thm3,
    Thm4AsPrinted,
    Thm4ProofConsistent,
    PlainSuperadditivity,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::Eq4,
        Variant::Eq5,
        Variant::Thm1,
        Variant::Thm2AsPrinted,
        Variant::Thm2ProofConsistent,
        Variant::Thm3,
        Variant::Thm4AsPrinted,
        Variant::Thm4ProofConsistent,
        Variant::PlainSuperadditivity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Eq4 => "eq4",
            Variant::Eq5 => "eq5",
            Variant::Thm1 => "thm1",
            Variant::Thm2AsPrinted => "thm2_as_printed",
            Variant::Thm2ProofConsistent => "thm2_proof_consistent",
            Variant::Thm3 => "thm3",
            Variant::Thm4AsPrinted => "thm4_as_printed",
            Variant::Thm4ProofConsistent => "thm4_proof_consistent",
            Variant::PlainSuperadditivity => "plain_superadditivity",
        }
    }

    /// The coefficient assignments displayed for the all-`i` corollaries,
    /// which need a last-pair hypothesis their statement does not list.
    pub fn is_as_printed(self) -> bool {
        matches!(self, Variant::Thm2AsPrinted | Variant::Thm4AsPrinted)
    }

    /// Whether the variant raises coherences to `alpha * beta` rather than `alpha`.
    pub fn uses_beta(self) -> bool {
        matches!(
            self,
            Variant::Thm3 | Variant::Thm4AsPrinted | Variant::Thm4ProofConsistent
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown bound variant '{s}'")))
    }
}

/// Which coefficient assignment to use for the `m = n - 2` corollaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorollaryForm {
    /// `q^{i-1}` on `C_1..C_{n-1}` and `q^{n-1}` on `C_n`.
    AsPrinted,
    /// `q^{i-1}` on `C_1..C_{n-2}` and `q^{n-2}` on both `C_{n-1}` and `C_n`.
    ProofConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub delta: f64,
    /// `k^delta`
    pub x: f64,
    /// Partition index, one-based: parties `1..=m` form the "≥" family.
    pub m: usize,
}

impl BoundParams {
    pub fn new(alpha: f64, beta: f64, k: f64, delta: f64, m: usize) -> Result<Self> {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::domain(format!("k must lie in (0, 1], got {k}")));
        }
        if !(delta >= 1.0 && delta.is_finite()) {
            return Err(Error::domain(format!("delta must be >= 1, got {delta}")));
        }
        let x = k.powf(delta);
        Self::validated(alpha, beta, k, delta, x, m)
    }

    /// Parametrises by `x` directly, reporting the canonical `(k, delta) = (x, 1)`.
    pub fn from_x(alpha: f64, beta: f64, x: f64, m: usize) -> Result<Self> {
        Self::validated(alpha, beta, x, 1.0, x, m)
    }

    fn validated(alpha: f64, beta: f64, k: f64, delta: f64, x: f64, m: usize) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::domain(format!("beta must be >= 1, got {beta}")));
        }
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::domain(format!(
                "x = k^delta must lie in (0, 1], got {x}"
            )));
        }
        if m == 0 {
            return Err(Error::domain("partition index m must be at least 1"));
        }
        debug_assert!((k.powf(delta) - x).abs() <= PARAM_TOL);
        Ok(Self {
            alpha,
            beta,
            k,
            delta,
            x,
            m,
        })
    }

    fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }
}

/// Admissible `x` for one partition index. `hi` is `+inf` when no upper
/// constraint applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub feasible: bool,
}

impl FeasibleInterval {
    fn new(lo: f64, hi: f64) -> Self {
        let feasible = lo <= hi.min(1.0) + FEASIBILITY_SLACK;
        Self { lo, hi, feasible }
    }

    /// `min(hi, 1)`.
    pub fn upper(&self) -> f64 {
        self.hi.min(1.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo - FEASIBILITY_SLACK && x <= self.hi + FEASIBILITY_SLACK && x <= 1.0
    }
}

impl fmt::Display for FeasibleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.upper())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub variant: Variant,
    pub params: BoundParams,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must be >= 1, got {alpha}")))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("x must lie in (0, 1], got {x}")))
    }
}

/// `(1 + t)^alpha - 1`, accurate for small `t`.
fn pow1p_minus_one(t: f64, alpha: f64) -> f64 {
    (alpha * t.ln_1p()).exp_m1()
}

/// `((1 + x)^alpha - 1) / x^alpha`.
pub fn q_coeff(alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_x(x)?;
    Ok(pow1p_minus_one(x, alpha) / x.powf(alpha))
}

/// `(1 + t)^alpha - 1 - q(alpha, x) t^alpha`, nonnegative whenever `0 <= t <= x`.
pub fn scalar_lemma_gap(alpha: f64, x: f64, t: f64) -> Result<f64> {
    let q = q_coeff(alpha, x)?;
    if !(0.0..=x).contains(&t) {
        return Err(Error::domain(format!("t = {t} outside [0, x = {x}]")));
    }
    Ok(pow1p_minus_one(t, alpha) - q * t.powf(alpha))
}

/// Ratio for a "≥" hypothesis `C^beta >= T^beta / x`, i.e. `x >= (T / C)^beta`.
fn lower_ratio(c: f64, t: f64, beta: f64) -> f64 {
    if c == 0.0 {
        if t == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (t / c).powf(beta)
    }
}

/// Ratio for a "≤" hypothesis `C^beta <= T^beta / x`, i.e. `x <= (T / C)^beta`.
/// A vanishing marginal satisfies it for every `x`.
fn upper_ratio(c: f64, t: f64, beta: f64) -> f64 {
    if c == 0.0 {
        f64::INFINITY
    } else {
        (t / c).powf(beta)
    }
}

fn require_three_parties(profile: &CoherenceProfile) -> Result<usize> {
    let n = profile.n();
    if n < 3 {
        return Err(Error::input(format!(
            "the bounds need at least three parties, profile has {n}"
        )));
    }
    Ok(n)
}

/// Interval of admissible `x` for every partition index `m = 1..=n-2`
/// (element `m - 1` of the result).
pub fn partition_and_feasibility(
    profile: &CoherenceProfile,
    beta: f64,
) -> Result<Vec<FeasibleInterval>> {
    let n = require_three_parties(profile)?;
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::domain(format!("beta must be >= 1, got {beta}")));
    }
    let c = &profile.marginals;
    let t = &profile.tails;
    let lower: Vec<f64> = (0..n - 1).map(|i| lower_ratio(c[i], t[i], beta)).collect();
    let upper: Vec<f64> = (0..n - 1).map(|i| upper_ratio(c[i], t[i], beta)).collect();
    Ok((1..=n - 2)
        .map(|m| {
            let lo = lower[..m].iter().copied().fold(0.0, f64::max);
            let hi = upper[m..].iter().copied().fold(f64::INFINITY, f64::min);
            FeasibleInterval::new(lo, hi)
        })
        .collect())
}

/// Interval for the corollaries that only impose the "≥" family on `1..=n-2`.
fn corollary_interval(profile: &CoherenceProfile, beta: f64) -> Result<FeasibleInterval> {
    let intervals = partition_and_feasibility(profile, beta)?;
    let last = intervals[intervals.len() - 1];
    Ok(FeasibleInterval::new(last.lo, f64::INFINITY))
}

fn powers(values: &[f64], exponent: f64) -> Vec<f64> {
    values.iter().map(|v| v.powf(exponent)).collect()
}

/// `sum_{i<=m} q^{i-1} P_i + q^{m+1} sum_{m<j<n} P_j + q^m P_n` over the
/// powered marginals `P`.
fn tiered_sum(p: &[f64], q: f64, m: usize) -> f64 {
    let n = p.len();
    let head: f64 = (0..m).map(|i| q.powi(i as i32) * p[i]).sum();
    let middle: f64 = p[m..n - 1].iter().sum();
    head + q.powi(m as i32 + 1) * middle + q.powi(m as i32) * p[n - 1]
}

fn corollary_sum(p: &[f64], q: f64, form: CorollaryForm) -> f64 {
    let n = p.len();
    match form {
        CorollaryForm::AsPrinted => {
            let head: f64 = (0..n - 1).map(|i| q.powi(i as i32) * p[i]).sum();
            head + q.powi(n as i32 - 1) * p[n - 1]
        }
        CorollaryForm::ProofConsistent => {
            let head: f64 = (0..n - 2).map(|i| q.powi(i as i32) * p[i]).sum();
            head + q.powi(n as i32 - 2) * (p[n - 2] + p[n - 1])
        }
    }
}

fn interval_for(
    variant: Variant,
    profile: &CoherenceProfile,
    beta: f64,
    m: usize,
) -> Result<FeasibleInterval> {
    let intervals = partition_and_feasibility(profile, beta)?;
    intervals
        .get(m.wrapping_sub(1))
        .copied()
        .ok_or_else(|| Error::Precondition {
            variant,
            detail: format!("partition index m = {m} outside [1, {}]", intervals.len()),
            interval: None,
        })
}

fn require_contains(variant: Variant, interval: FeasibleInterval, x: f64) -> Result<()> {
    if interval.feasible && interval.contains(x) {
        Ok(())
    } else {
        Err(Error::Precondition {
            variant,
            detail: format!("x = {x} is not in the admissible interval {interval}"),
            interval: Some(interval),
        })
    }
}

fn tiered_bound(
    variant: Variant,
    profile: &CoherenceProfile,
    params: &BoundParams,
    beta: f64,
) -> Result<BoundValue> {
    let interval = interval_for(variant, profile, beta, params.m)?;
    require_contains(variant, interval, params.x)?;
    let q = q_coeff(params.alpha, params.x)?;
    let p = powers(&profile.marginals, params.alpha * beta);
    Ok(BoundValue {
        value: tiered_sum(&p, q, params.m),
        variant,
        params: *params,
    })
}

/// Tiered bound on `C(rho)^alpha` for partition `params.m` at `x = k^delta`.
pub fn thm1_bound(profile: &CoherenceProfile, params: &BoundParams) -> Result<BoundValue> {
    let mut p = *params;
    p.beta = 1.0;
    tiered_bound(Variant::Thm1, profile, &p, 1.0)
}

/// As [`thm1_bound`] with hypotheses on `C^beta` and a bound on `C(rho)^{alpha beta}`.
pub fn thm3_bound(profile: &CoherenceProfile, params: &BoundParams) -> Result<BoundValue> {
    tiered_bound(Variant::Thm3, profile, params, params.beta)
}

fn corollary_bound(
    variant: Variant,
    profile: &CoherenceProfile,
    params: &BoundParams,
    beta: f64,
    form: CorollaryForm,
) -> Result<BoundValue> {
    let interval = corollary_interval(profile, beta)?;
    require_contains(variant, interval, params.x)?;
    let q = q_coeff(params.alpha, params.x)?;
    let p = powers(&profile.marginals, params.alpha * beta);
    let mut out = *params;
    out.beta = beta;
    Ok(BoundValue {
        value: corollary_sum(&p, q, form),
        variant,
        params: out.with_m(profile.n() - 2),
    })
}

/// The `m = n - 2` corollary of [`thm1_bound`], in either coefficient form.
/// `params.m` is ignored.
pub fn thm2_bound(
    profile: &CoherenceProfile,
    params: &BoundParams,
    form: CorollaryForm,
) -> Result<BoundValue> {
    let variant = match form {
        CorollaryForm::AsPrinted => Variant::Thm2AsPrinted,
        CorollaryForm::ProofConsistent => Variant::Thm2ProofConsistent,
    };
    corollary_bound(variant, profile, params, 1.0, form)
}

/// The `m = n - 2` corollary of [`thm3_bound`]. `params.m` is ignored.
pub fn thm4_bound(
    profile: &CoherenceProfile,
    params: &BoundParams,
    form: CorollaryForm,
) -> Result<BoundValue> {
    let variant = match form {
        CorollaryForm::AsPrinted => Variant::Thm4AsPrinted,
        CorollaryForm::ProofConsistent => Variant::Thm4ProofConsistent,
    };
    corollary_bound(variant, profile, params, params.beta, form)
}

/// Earlier tiered bound with coefficient `2^alpha - 1`, requiring only
/// `C_j <= T_j` for `j = m+1..n-1`.
pub fn prior_bound_eq4(profile: &CoherenceProfile, alpha: f64, m: usize) -> Result<BoundValue> {
    let params = BoundParams::from_x(alpha, 1.0, 1.0, m)?;
    let interval = interval_for(Variant::Eq4, profile, 1.0, m)?;
    if interval.hi + FEASIBILITY_SLACK < 1.0 {
        return Err(Error::Precondition {
            variant: Variant::Eq4,
            detail: format!("C_j <= T_j fails for some j > {m}"),
            interval: Some(interval),
        });
    }
    let q = 2f64.powf(alpha) - 1.0;
    let p = powers(&profile.marginals, alpha);
    Ok(BoundValue {
        value: tiered_sum(&p, q, m),
        variant: Variant::Eq4,
        params,
    })
}

/// Earlier tiered bound with coefficient `q(alpha, k)` and both hypothesis
/// families taken at `x = k`.
pub fn prior_bound_eq5(
    profile: &CoherenceProfile,
    alpha: f64,
    k: f64,
    m: usize,
) -> Result<BoundValue> {
    let params = BoundParams::new(alpha, 1.0, k, 1.0, m)?;
    let interval = interval_for(Variant::Eq5, profile, 1.0, m)?;
    require_contains(Variant::Eq5, interval, k)?;
    let q = q_coeff(alpha, k)?;
    let p = powers(&profile.marginals, alpha);
    Ok(BoundValue {
        value: tiered_sum(&p, q, m),
        variant: Variant::Eq5,
        params,
    })
}

/// `sum_i C_i`, the plain multiqubit superadditivity bound on `C(rho)`.
pub fn plain_superadditivity(profile: &CoherenceProfile) -> f64 {
    profile.marginals.iter().sum()
}

/// Evaluates any variant. `Eq5` reads its parameter from `params.k`; the
/// corollaries ignore `params.m`.
pub fn evaluate(
    variant: Variant,
    profile: &CoherenceProfile,
    params: &BoundParams,
) -> Result<BoundValue> {
    match variant {
        Variant::Eq4 => prior_bound_eq4(profile, params.alpha, params.m),
        Variant::Eq5 => prior_bound_eq5(profile, params.alpha, params.k, params.m),
        Variant::Thm1 => thm1_bound(profile, params),
        Variant::Thm2AsPrinted => thm2_bound(profile, params, CorollaryForm::AsPrinted),
        Variant::Thm2ProofConsistent => thm2_bound(profile, params, CorollaryForm::ProofConsistent),
        Variant::Thm3 => thm3_bound(profile, params),
        Variant::Thm4AsPrinted => thm4_bound(profile, params, CorollaryForm::AsPrinted),
        Variant::Thm4ProofConsistent => thm4_bound(profile, params, CorollaryForm::ProofConsistent),
        Variant::PlainSuperadditivity => {
            let p = BoundParams::from_x(1.0, 1.0, 1.0, params.m)?;
            Ok(BoundValue {
                value: plain_superadditivity(profile),
                variant,
                params: p,
            })
        }
    }
}

/// The quantity a variant lower-bounds: `C(rho)^alpha`, `C(rho)^{alpha beta}`
/// for the beta variants, or `C(rho)` for plain superadditivity.
pub fn actual_value(variant: Variant, profile: &CoherenceProfile, params: &BoundParams) -> f64 {
    match variant {
        Variant::PlainSuperadditivity => profile.full,
        v if v.uses_beta() => profile.full.powf(params.alpha * params.beta),
        _ => profile.full.powf(params.alpha),
    }
}

/// Candidate `x` values for an interval: the lower endpoint (clamped to
/// `[X_FLOOR, 1]`) followed by [`GRID_POINTS`] log-spaced points up to
/// `min(hi, 1)`. Empty for an infeasible interval.
pub fn candidate_xs(interval: &FeasibleInterval) -> Vec<f64> {
    if !interval.feasible {
        return Vec::new();
    }
    let start = interval.lo.clamp(X_FLOOR, 1.0);
    let end = interval.upper().max(start);
    let mut xs = vec![start];
    if end > start {
        let ratio = end / start;
        for g in 1..=GRID_POINTS {
            let x = if g == GRID_POINTS {
                end
            } else {
                start * ratio.powf(g as f64 / GRID_POINTS as f64)
            };
            xs.push(x);
        }
    }
    xs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    /// Best bound found, `None` if no partition index is feasible.
    pub best: Option<BoundValue>,
    pub intervals: Vec<FeasibleInterval>,
}

/// Maximises the tiered bound over feasible `m` and admissible `x`.
///
/// Since `q(alpha, .)` is nonincreasing the lower endpoint wins; the grid is
/// evaluated anyway. Ties between partition indices go to the smaller one.
pub fn optimize_bound(profile: &CoherenceProfile, alpha: f64, beta: f64) -> Result<Optimum> {
    check_alpha(alpha)?;
    let intervals = partition_and_feasibility(profile, beta)?;
    let mut best: Option<BoundValue> = None;
    for (idx, interval) in intervals.iter().enumerate() {
        for x in candidate_xs(interval) {
            let params = BoundParams::from_x(alpha, beta, x, idx + 1)?;
            let value = if beta == 1.0 {
                thm1_bound(profile, &params)?
            } else {
                thm3_bound(profile, &params)?
            };
            if best.is_none_or(|b| value.value > b.value) {
                best = Some(value);
            }
        }
    }
    Ok(Optimum { best, intervals })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates every link of the tiered-bound derivation on actual coherences.
///
/// Links `i = 1..=m` peel off a single party from the head,
/// `T_{i-1}^{ab} >= C_i^{ab} + q T_i^{ab}` (with `T_0` the full state), and
/// links `j = m+1..n-1` peel one off the tail,
/// `T_{j-1}^{ab} >= q C_j^{ab} + T_j^{ab}`. Each link is weighted by the power
/// of `q` it carries in the chain, so the residuals sum to
/// `C(rho)^{ab}` minus the tiered bound.
pub fn chain_audit_profile(
    profile: &CoherenceProfile,
    params: &BoundParams,
) -> Result<Vec<ChainStep>> {
    let variant = if params.beta == 1.0 {
        Variant::Thm1
    } else {
        Variant::Thm3
    };
    let interval = interval_for(variant, profile, params.beta, params.m)?;
    require_contains(variant, interval, params.x)?;
    let n = profile.n();
    let m = params.m;
    let e = params.alpha * params.beta;
    let q = q_coeff(params.alpha, params.x)?;
    let c = powers(&profile.marginals, e);
    let mut t = vec![profile.full.powf(e)];
    t.extend(powers(&profile.tails, e));

    let mut steps = Vec::with_capacity(n - 1);
    for i in 1..=m {
        let w = q.powi(i as i32 - 1);
        let lhs = w * t[i - 1];
        let rhs = w * (c[i - 1] + q * t[i]);
        steps.push(ChainStep {
            label: format!("head A{i} | A{}..A{n}", i + 1),
            lhs,
            rhs,
            residual: lhs - rhs,
        });
    }
    let w = q.powi(m as i32);
    for j in (m + 1)..n {
        let lhs = w * t[j - 1];
        let rhs = w * (q * c[j - 1] + t[j]);
        let rest = if j + 1 == n {
            format!("A{n}")
        } else {
            format!("A{}..A{n}", j + 1)
        };
        steps.push(ChainStep {
            label: format!("tail A{j} | {rest}"),
            lhs,
            rhs,
            residual: lhs - rhs,
        });
    }
    Ok(steps)
}

/// [`chain_audit_profile`] on the profile of `rho` under `ordering`.
pub fn chain_audit(
    rho: &DensityMatrix,
    ordering: &[usize],
    params: &BoundParams,
) -> Result<Vec<ChainStep>> {
    let profile = coherence_profile(rho, ordering)?;
    chain_audit_profile(&profile, params)
}
