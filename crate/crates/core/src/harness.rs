//! Verification campaigns over random ensembles.
//!
//! Samples are evaluated in parallel in fixed-size chunks and folded into
//! the report sequentially in stream order, so reports and record lists do
//! not depend on the thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    self, candidate_xs, chain_audit_profile, partition_and_feasibility, BoundParams, ChainStep,
    CorollaryForm, FeasibleInterval, Variant,
};
use crate::coherence::{coherence_profile, qubit_vs_rest, CoherenceProfile};
use crate::ensembles::{
    paper_example_state, random_density, random_graded_pure, random_product_pure, random_pure,
};
use crate::qmatrix::{pure_to_density, DensityMatrix};
use crate::rng::SeedSpec;
use crate::{Error, Result};

/// A record is a violation when `actual - claimed` falls below this.
pub const VIOLATION_TOL: f64 = -1e-9;
/// Largest party count for which all orderings may be searched.
pub const MAX_ORDERING_SEARCH: usize = 5;

const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Pure,
    /// `rank = None` means full rank.
    Ginibre {
        rank: Option<usize>,
    },
    Product,
    /// See [`random_graded_pure`].
    Graded {
        decay: f64,
    },
}

impl Ensemble {
    pub fn name(&self) -> String {
        match self {
            Ensemble::Pure => "pure".into(),
            Ensemble::Ginibre { rank: None } => "ginibre".into(),
            Ensemble::Ginibre { rank: Some(r) } => format!("ginibre_r{r}"),
            Ensemble::Product => "product".into(),
            Ensemble::Graded { decay } => format!("graded_d{decay}"),
        }
    }

    pub fn sample(&self, n: usize, seed: SeedSpec) -> Result<DensityMatrix> {
        match *self {
            Ensemble::Pure => Ok(pure_to_density(&random_pure(n, seed)?)),
            Ensemble::Ginibre { rank } => random_density(n, rank.unwrap_or(1 << n), seed),
            Ensemble::Product => Ok(pure_to_density(&random_product_pure(n, seed)?)),
            Ensemble::Graded { decay } => Ok(pure_to_density(&random_graded_pure(n, decay, seed)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSpec {
    pub ensemble: Ensemble,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
}

impl CampaignSpec {
    fn state_id(&self, stream: u64) -> String {
        format!(
            "{}-n{}-{}-{}",
            self.ensemble.name(),
            self.n,
            self.seed,
            stream
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub all_orderings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Infeasible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Infeasible => "infeasible",
        }
    }
}

/// One state, one bound variant, one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub state_id: String,
    pub ordering: Vec<usize>,
    pub variant: Variant,
    pub alpha: f64,
    pub beta: f64,
    pub x: Option<f64>,
    pub m: Option<usize>,
    pub claimed: Option<f64>,
    pub actual: f64,
    pub residual: Option<f64>,
    pub verdict: Verdict,
}

impl AuditRecord {
    fn judged(
        state_id: &str,
        ordering: &[usize],
        variant: Variant,
        params: (f64, f64, Option<f64>, Option<usize>),
        claimed: f64,
        actual: f64,
    ) -> Self {
        let residual = actual - claimed;
        let verdict = if residual < VIOLATION_TOL {
            Verdict::Violated
        } else {
            Verdict::Holds
        };
        let (alpha, beta, x, m) = params;
        Self {
            state_id: state_id.to_owned(),
            ordering: ordering.to_vec(),
            variant,
            alpha,
            beta,
            x,
            m,
            claimed: Some(claimed),
            actual,
            residual: Some(residual),
            verdict,
        }
    }

    fn infeasible(
        state_id: &str,
        ordering: &[usize],
        variant: Variant,
        params: (f64, f64, Option<f64>, Option<usize>),
        actual: f64,
    ) -> Self {
        let (alpha, beta, x, m) = params;
        Self {
            state_id: state_id.to_owned(),
            ordering: ordering.to_vec(),
            variant,
            alpha,
            beta,
            x,
            m,
            claimed: None,
            actual,
            residual: None,
            verdict: Verdict::Infeasible,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tally {
    pub total: u64,
    pub holds: u64,
    pub violated: u64,
    pub infeasible: u64,
    pub min_residual: Option<f64>,
}

impl Tally {
    fn push(&mut self, rec: &AuditRecord) {
        self.total += 1;
        match rec.verdict {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Infeasible => self.infeasible += 1,
        }
        if let Some(r) = rec.residual {
            self.min_residual = Some(self.min_residual.map_or(r, |m: f64| m.min(r)));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub count: usize,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for an empty sample.
    pub fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let at = |p: f64| {
            let idx = ((p * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1;
            values[idx]
        };
        Some(Self {
            count: values.len(),
            min: values[0],
            q25: at(0.25),
            median: at(0.5),
            q75: at(0.75),
            max: values[values.len() - 1],
        })
    }
}

/// Findings for the printed coefficient assignment of the `m = n - 2`
/// corollaries, kept apart from the main counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub tally: Tally,
    pub worst: Option<AuditRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CampaignReport {
    pub total: u64,
    pub holds: u64,
    pub violated: u64,
    pub infeasible: u64,
    pub min_residual: Option<f64>,
    /// Quantiles of `claimed / actual` over records that hold.
    pub tightness: Option<Quantiles>,
    pub by_variant: BTreeMap<Variant, Tally>,
    pub paper_discrepancy: DiscrepancyReport,
}

impl CampaignReport {
    /// Violations including the discrepancy section.
    pub fn any_violation(&self) -> bool {
        self.violated > 0 || self.paper_discrepancy.tally.violated > 0
    }
}

#[derive(Default)]
struct Aggregator {
    main: Tally,
    ratios: Vec<f64>,
    by_variant: BTreeMap<Variant, Tally>,
    discrepancy: DiscrepancyReport,
}

impl Aggregator {
    fn push(&mut self, rec: &AuditRecord) {
        self.by_variant.entry(rec.variant).or_default().push(rec);
        if rec.variant.is_as_printed() {
            self.discrepancy.tally.push(rec);
            if rec.verdict == Verdict::Violated {
                let worse = self
                    .discrepancy
                    .worst
                    .as_ref()
                    .is_none_or(|w| rec.residual.unwrap_or(0.0) < w.residual.unwrap_or(0.0));
                if worse {
                    self.discrepancy.worst = Some(rec.clone());
                }
            }
            return;
        }
        self.main.push(rec);
        if let (Verdict::Holds, Some(c)) = (rec.verdict, rec.claimed) {
            if rec.actual > 0.0 {
                self.ratios.push(c / rec.actual);
            }
        }
    }

    fn finish(self) -> CampaignReport {
        CampaignReport {
            total: self.main.total,
            holds: self.main.holds,
            violated: self.main.violated,
            infeasible: self.main.infeasible,
            min_residual: self.main.min_residual,
            tightness: Quantiles::from_values(self.ratios),
            by_variant: self.by_variant,
            paper_discrepancy: self.discrepancy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Campaign {
    pub report: CampaignReport,
    /// Empty unless records were requested.
    pub records: Vec<AuditRecord>,
}

fn run_streams<F>(samples: u64, keep_records: bool, per_state: F) -> Result<Campaign>
where
    F: Fn(u64) -> Result<Vec<AuditRecord>> + Sync,
{
    let mut agg = Aggregator::default();
    let mut records = Vec::new();
    let mut start = 0u64;
    while start < samples {
        let end = (start + CHUNK as u64).min(samples);
        let chunk: Vec<Result<Vec<AuditRecord>>> =
            (start..end).into_par_iter().map(&per_state).collect();
        for recs in chunk {
            let recs = recs?;
            for r in &recs {
                agg.push(r);
            }
            if keep_records {
                records.extend(recs);
            }
        }
        start = end;
    }
    Ok(Campaign {
        report: agg.finish(),
        records,
    })
}

/// Checks `C(rho) >= sum_i C_i` and every qubit-versus-rest split.
///
/// The full-sum record has `m = None`; split records list the split qubit
/// first in `ordering` and carry `m = Some(1)`.
pub fn superadditivity_records(state_id: &str, rho: &DensityMatrix) -> Result<Vec<AuditRecord>> {
    let n = rho.n_qubits();
    let identity: Vec<usize> = (0..n).collect();
    let profile = coherence_profile(rho, &identity)?;
    let params = (1.0, 1.0, None, None);
    let mut out = vec![AuditRecord::judged(
        state_id,
        &identity,
        Variant::PlainSuperadditivity,
        params,
        bounds::plain_superadditivity(&profile),
        profile.full,
    )];
    for q in 0..n {
        let (a, b) = qubit_vs_rest(rho, q)?;
        let mut ordering = vec![q];
        ordering.extend((0..n).filter(|&p| p != q));
        out.push(AuditRecord::judged(
            state_id,
            &ordering,
            Variant::PlainSuperadditivity,
            (1.0, 1.0, None, Some(1)),
            a + b,
            profile.full,
        ));
    }
    Ok(out)
}

/// Plain superadditivity over an ensemble (needs `2 <= n <= 8`).
pub fn verify_superadditivity(spec: &CampaignSpec, keep_records: bool) -> Result<Campaign> {
    if !(2..=8).contains(&spec.n) {
        return Err(Error::input(format!("n = {} outside [2, 8]", spec.n)));
    }
    run_streams(spec.samples, keep_records, |s| {
        let rho = spec.ensemble.sample(spec.n, SeedSpec::new(spec.seed, s))?;
        superadditivity_records(&spec.state_id(s), &rho)
    })
}

fn evaluate_or_infeasible(
    state_id: &str,
    profile: &CoherenceProfile,
    variant: Variant,
    params: &BoundParams,
) -> Result<AuditRecord> {
    let actual = bounds::actual_value(variant, profile, params);
    let tag = |x: f64, m: usize| (params.alpha, params.beta, Some(x), Some(m));
    match bounds::evaluate(variant, profile, params) {
        Ok(v) => Ok(AuditRecord::judged(
            state_id,
            &profile.ordering,
            variant,
            tag(
                if variant == Variant::Eq5 {
                    v.params.k
                } else {
                    v.params.x
                },
                v.params.m,
            ),
            v.value,
            actual,
        )),
        Err(Error::Precondition { .. }) => Ok(AuditRecord::infeasible(
            state_id,
            &profile.ordering,
            variant,
            tag(
                if variant == Variant::Eq5 {
                    params.k
                } else {
                    params.x
                },
                params.m,
            ),
            actual,
        )),
        Err(e) => Err(e),
    }
}

fn infeasible_record(
    state_id: &str,
    profile: &CoherenceProfile,
    variant: Variant,
    alpha: f64,
    beta: f64,
    m: usize,
) -> AuditRecord {
    let p = BoundParams {
        alpha,
        beta,
        k: 1.0,
        delta: 1.0,
        x: 1.0,
        m,
    };
    let actual = bounds::actual_value(variant, profile, &p);
    AuditRecord::infeasible(
        state_id,
        &profile.ordering,
        variant,
        (alpha, beta, None, Some(m)),
        actual,
    )
}

/// Every bound variant on one profile over the `alpha x beta` grid, at the
/// optimiser's candidate `x` values for each feasible partition index.
pub fn theorem_records(
    state_id: &str,
    profile: &CoherenceProfile,
    alphas: &[f64],
    betas: &[f64],
) -> Result<Vec<AuditRecord>> {
    let n = profile.n();
    let mut out = Vec::new();
    for &beta in betas {
        let intervals = partition_and_feasibility(profile, beta)?;
        let corollary = FeasibleInterval {
            hi: f64::INFINITY,
            feasible: intervals[n - 3].lo <= 1.0 + bounds::FEASIBILITY_SLACK,
            ..intervals[n - 3]
        };
        let plain = beta == 1.0;
        let tiered: &[Variant] = if plain {
            &[Variant::Thm1, Variant::Thm3, Variant::Eq5]
        } else {
            &[Variant::Thm3]
        };
        let corollaries: &[Variant] = if plain {
            &[
                Variant::Thm2AsPrinted,
                Variant::Thm2ProofConsistent,
                Variant::Thm4AsPrinted,
                Variant::Thm4ProofConsistent,
            ]
        } else {
            &[Variant::Thm4AsPrinted, Variant::Thm4ProofConsistent]
        };
        for &alpha in alphas {
            for (idx, interval) in intervals.iter().enumerate() {
                let m = idx + 1;
                if plain {
                    let p = BoundParams::from_x(alpha, 1.0, 1.0, m)?;
                    out.push(evaluate_or_infeasible(state_id, profile, Variant::Eq4, &p)?);
                }
                let xs = candidate_xs(interval);
                if xs.is_empty() {
                    for &v in tiered {
                        out.push(infeasible_record(state_id, profile, v, alpha, beta, m));
                    }
                    continue;
                }
                for &x in &xs {
                    let p = BoundParams::from_x(alpha, beta, x, m)?;
                    for &v in tiered {
                        out.push(evaluate_or_infeasible(state_id, profile, v, &p)?);
                    }
                }
            }
            let xs = candidate_xs(&corollary);
            if xs.is_empty() {
                for &v in corollaries {
                    out.push(infeasible_record(state_id, profile, v, alpha, beta, n - 2));
                }
            }
            for &x in &xs {
                let p = BoundParams::from_x(alpha, beta, x, n - 2)?;
                for &v in corollaries {
                    out.push(evaluate_or_infeasible(state_id, profile, v, &p)?);
                }
            }
        }
    }
    Ok(out)
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_orderings(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    // next lexicographic permutation
    while let Some(i) = (0..n.saturating_sub(1))
        .rev()
        .find(|&i| current[i] < current[i + 1])
    {
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
    out
}

/// Theorem campaign over an ensemble (needs `n >= 3`).
pub fn verify_theorems(
    spec: &CampaignSpec,
    grid: &TheoremGrid,
    keep_records: bool,
) -> Result<Campaign> {
    if spec.n < 3 || spec.n > 8 {
        return Err(Error::input(format!("n = {} outside [3, 8]", spec.n)));
    }
    if grid.all_orderings && spec.n > MAX_ORDERING_SEARCH {
        return Err(Error::input(format!(
            "ordering search is limited to n <= {MAX_ORDERING_SEARCH}"
        )));
    }
    let orderings = if grid.all_orderings {
        all_orderings(spec.n)
    } else {
        vec![(0..spec.n).collect()]
    };
    run_streams(spec.samples, keep_records, |s| {
        let rho = spec.ensemble.sample(spec.n, SeedSpec::new(spec.seed, s))?;
        let id = spec.state_id(s);
        let mut recs = Vec::new();
        for ordering in &orderings {
            let profile = coherence_profile(&rho, ordering)?;
            recs.extend(theorem_records(&id, &profile, &grid.alphas, &grid.betas)?);
        }
        Ok(recs)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub y1: f64,
    pub y2: f64,
    pub actual_pow: f64,
    pub thm1_proof_consistent: f64,
}

/// Closed-form lower bounds for the example state at `x = (4/5)^2` and at
/// `k = 4/5`, next to the true `C^alpha` and the tiered bound from the
/// engine at `x = 0.64, m = 1`.
pub fn fig1_sweep(alpha_min: f64, alpha_max: f64, step: f64) -> Result<Vec<SweepRow>> {
    if !(alpha_min >= 1.0 && alpha_min <= alpha_max && alpha_max.is_finite()) {
        return Err(Error::domain(format!(
            "need 1 <= alpha_min <= alpha_max, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::domain(format!("step must be positive, got {step}")));
    }
    let steps = ((alpha_max - alpha_min) / step + 1e-9).floor() as usize;
    let rho = pure_to_density(&paper_example_state());
    let profile = coherence_profile(&rho, &[0, 1, 2])?;
    (0..=steps)
        .map(|i| {
            let alpha = alpha_min + i as f64 * step;
            let y1 =
                1.0 + ((41.0f64 / 25.0).powf(alpha) - 1.0).powi(2) * (375.0f64 / 256.0).powf(alpha);
            let y2 =
                1.0 + ((9.0f64 / 5.0).powf(alpha) - 1.0).powi(2) * (15.0f64 / 16.0).powf(alpha);
            let params = BoundParams::new(alpha, 1.0, 0.8, 2.0, 1)?;
            let engine = bounds::thm1_bound(&profile, &params)?;
            Ok(SweepRow {
                alpha,
                y1,
                y2,
                actual_pow: profile.full.powf(alpha),
                thm1_proof_consistent: engine.value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    pub alpha: f64,
    /// Evaluations where both bounds were admissible with the same `m`.
    pub count: usize,
    /// Smallest `tiered(x) - earlier(k)` seen.
    pub min_difference: Option<f64>,
    /// Quantiles of `tiered(x) / earlier(k)` over evaluations with a positive denominator.
    pub ratio: Option<Quantiles>,
}

/// Compares the tiered bound at `x = k^delta` with the earlier bound at `k`,
/// taking `x` at the optimiser's endpoint for each feasible `m`.
pub fn tightness_compare(
    spec: &CampaignSpec,
    alphas: &[f64],
    delta: f64,
) -> Result<Vec<TightnessRow>> {
    if spec.n < 3 {
        return Err(Error::input("tightness comparison needs n >= 3"));
    }
    if delta.is_nan() || delta < 1.0 {
        return Err(Error::domain(format!("delta must be >= 1, got {delta}")));
    }
    let per_state: Vec<Result<Vec<(usize, f64, f64)>>> = (0..spec.samples)
        .into_par_iter()
        .map(|s| {
            let rho = spec.ensemble.sample(spec.n, SeedSpec::new(spec.seed, s))?;
            let identity: Vec<usize> = (0..spec.n).collect();
            let profile = coherence_profile(&rho, &identity)?;
            let intervals = partition_and_feasibility(&profile, 1.0)?;
            let mut out = Vec::new();
            for (ai, &alpha) in alphas.iter().enumerate() {
                for (idx, iv) in intervals.iter().enumerate() {
                    let Some(&x) = candidate_xs(iv).first() else {
                        continue;
                    };
                    let k = x.powf(1.0 / delta);
                    if !iv.contains(k) {
                        continue;
                    }
                    let params = BoundParams::new(alpha, 1.0, k, delta, idx + 1)?;
                    let tiered = bounds::thm1_bound(&profile, &params)?.value;
                    let earlier = bounds::prior_bound_eq5(&profile, alpha, k, idx + 1)?.value;
                    out.push((ai, tiered, earlier));
                }
            }
            Ok(out)
        })
        .collect();
    let mut rows: Vec<(usize, Option<f64>, Vec<f64>)> = vec![(0, None, Vec::new()); alphas.len()];
    for state in per_state {
        for (ai, tiered, earlier) in state? {
            let row = &mut rows[ai];
            row.0 += 1;
            let diff = tiered - earlier;
            row.1 = Some(row.1.map_or(diff, |d: f64| d.min(diff)));
            if earlier > 0.0 {
                row.2.push(tiered / earlier);
            }
        }
    }
    Ok(alphas
        .iter()
        .zip(rows)
        .map(|(&alpha, (count, min_difference, ratios))| TightnessRow {
            alpha,
            count,
            min_difference,
            ratio: Quantiles::from_values(ratios),
        })
        .collect())
}

/// Everything the single-state audit reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateAudit {
    pub profile: CoherenceProfile,
    pub intervals: Vec<FeasibleInterval>,
    /// Partition index used for the tiered variants.
    pub m: usize,
    /// Chain residuals, when the parameters are admissible for `m`.
    pub chain: Option<Vec<ChainStep>>,
    pub records: Vec<AuditRecord>,
}

/// Audits one state at one parameter point: chain residuals plus every
/// variant with its verdict. When `params.m` is `None` the smallest
/// admissible partition index is used (or 1 if none is admissible).
/// The earlier bound `Eq5` is evaluated at `k = params.k`.
#[allow(clippy::too_many_arguments)]
pub fn audit_state(
    state_id: &str,
    rho: &DensityMatrix,
    ordering: &[usize],
    alpha: f64,
    beta: f64,
    k: f64,
    delta: f64,
    m: Option<usize>,
) -> Result<StateAudit> {
    let profile = coherence_profile(rho, ordering)?;
    let intervals = partition_and_feasibility(&profile, beta)?;
    let x = BoundParams::new(alpha, beta, k, delta, 1)?.x;
    let m = match m {
        Some(m) if m >= 1 && m <= intervals.len() => m,
        Some(m) => {
            return Err(Error::input(format!(
                "m = {m} outside [1, {}]",
                intervals.len()
            )))
        }
        None => intervals
            .iter()
            .position(|iv| iv.feasible && iv.contains(x))
            .map_or(1, |i| i + 1),
    };
    let params = BoundParams::new(alpha, beta, k, delta, m)?;
    let chain = match chain_audit_profile(&profile, &params) {
        Ok(steps) => Some(steps),
        Err(Error::Precondition { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut records = Vec::new();
    for variant in Variant::ALL {
        let rec = if variant == Variant::PlainSuperadditivity {
            AuditRecord::judged(
                state_id,
                &profile.ordering,
                variant,
                (1.0, 1.0, None, None),
                bounds::plain_superadditivity(&profile),
                profile.full,
            )
        } else {
            let mut p = params;
            if !variant.uses_beta() {
                p.beta = 1.0;
            }
            evaluate_or_infeasible(state_id, &profile, variant, &p)?
        };
        records.push(rec);
    }
    Ok(StateAudit {
        profile,
        intervals,
        m,
        chain,
        records,
    })
}

/// Corollary form for a variant tag, if it is one of the `m = n - 2` variants.
pub fn corollary_form(variant: Variant) -> Option<CorollaryForm> {
    match variant {
        Variant::Thm2AsPrinted | Variant::Thm4AsPrinted => Some(CorollaryForm::AsPrinted),
        Variant::Thm2ProofConsistent | Variant::Thm4ProofConsistent => {
            Some(CorollaryForm::ProofConsistent)
        }
        _ => None,
    }
}
