//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use cohbound::bounds::{
    evaluate, partition_and_feasibility, prior_bound_eq4, prior_bound_eq5, q_coeff,
    scalar_lemma_gap, BoundParams, Variant,
};
use cohbound::coherence::{coherence_profile, CoherenceProfile};
use cohbound::ensembles::paper_example_state;
use cohbound::harness::{
    fig1_sweep, tightness_compare, verify_superadditivity, verify_theorems, CampaignReport,
    CampaignSpec, Ensemble, TheoremGrid,
};
use cohbound::qmatrix::pure_to_density;
use cohbound::rng::SeedSpec;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn criterion(
    id: u32,
    name: &str,
    limit: Duration,
    failures: &mut Vec<u32>,
    f: impl FnOnce() -> Outcome,
) {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let ok = out.ok && in_time;
    let tag = if ok { "PASS" } else { "FAIL" };
    let time_note = if in_time { "" } else { " [over time limit]" };
    println!(
        "[{tag}] {id}. {name} ({:.3} s, limit {} s){time_note}: {}",
        elapsed.as_secs_f64(),
        limit.as_secs_f64(),
        out.detail
    );
    if !ok {
        failures.push(id);
    }
}

fn example_profile() -> Outcome {
    let psi = paper_example_state();
    let rho = pure_to_density(&psi);
    let start = Instant::now();
    let p = coherence_profile(&rho, &[0, 1, 2]).unwrap();
    let profile_time = start.elapsed();

    // direct off-diagonal sum over the amplitudes
    let a = psi.amplitudes();
    let mut direct = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            if i != j {
                direct += (a[i] * a[j].conj()).norm();
            }
        }
    }
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    let ok = close(p.marginals[0], 1.0)
        && close(p.marginals[1], 0.0)
        && close(p.marginals[2], 0.6)
        && close(p.tails[0], 0.6)
        && close(p.tails[1], 0.6)
        && close(p.full, 2.2)
        && close(direct, 2.2)
        && profile_time < Duration::from_millis(1);
    check(
        ok,
        format!(
            "C = {:?}, T = {:?}, full = {}, direct sum = {direct}, profile in {:.1} us",
            p.marginals,
            p.tails,
            p.full,
            profile_time.as_secs_f64() * 1e6
        ),
    )
}

fn fig1_curves() -> Outcome {
    let rows = fig1_sweep(1.0, 3.0, 0.01).unwrap();
    let r1 = &rows[0];
    let r2 = &rows[100];
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9;
    let values_ok = (r2.alpha - 2.0).abs() < 1e-12
        && close(r1.y1, 1.6)
        && close(r1.y2, 1.6)
        && close(r2.y1, 7.125625)
        && close(r2.y2, 5.41);
    let ordered = rows.iter().all(|r| r.y1 >= r.y2 - 1e-12);
    check(
        values_ok && ordered && rows.len() == 201,
        format!(
            "y1(1) = {}, y2(1) = {}, y1(2) = {}, y2(2) = {}, y1 >= y2 on {} rows: {ordered}",
            r1.y1,
            r1.y2,
            r2.y1,
            r2.y2,
            rows.len()
        ),
    )
}

fn scalar_lemma() -> Outcome {
    let mut rng = SeedSpec::new(2024, 3).rng();
    let mut worst = f64::INFINITY;
    let mut worst_end: f64 = 0.0;
    for _ in 0..100_000 {
        let alpha = 1.0 + 4.0 * rng.next_f64();
        // (0, 1]
        let x = 1.0 - rng.next_f64();
        let t = x * rng.next_f64();
        worst = worst.min(scalar_lemma_gap(alpha, x, t).unwrap());
        worst_end = worst_end
            .max(scalar_lemma_gap(alpha, x, 0.0).unwrap().abs())
            .max(scalar_lemma_gap(alpha, x, x).unwrap().abs());
    }
    check(
        worst >= -1e-12 && worst_end <= 1e-12,
        format!("min gap {worst:.3e}, max |gap| at endpoints {worst_end:.3e}"),
    )
}

fn superadditivity_campaign() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for ensemble in [
        Ensemble::Pure,
        Ensemble::Ginibre { rank: None },
        Ensemble::Ginibre { rank: Some(2) },
    ] {
        for n in 2..=5 {
            let spec = CampaignSpec {
                ensemble,
                n,
                samples: 1000,
                seed: 11,
            };
            let r = verify_superadditivity(&spec, false).unwrap().report;
            ok &= r.violated == 0 && r.holds == r.total;
            lines.push(format!(
                "{} n={n}: {} checks, {} violated",
                ensemble.name(),
                r.total,
                r.violated
            ));
        }
    }
    check(ok, lines.join("; "))
}

fn tally(report: &CampaignReport, v: Variant) -> (u64, u64) {
    report
        .by_variant
        .get(&v)
        .map_or((0, 0), |t| (t.holds + t.violated, t.violated))
}

const THEOREM_VARIANTS: [Variant; 4] = [
    Variant::Thm1,
    Variant::Thm3,
    Variant::Thm2ProofConsistent,
    Variant::Thm4ProofConsistent,
];

fn theorem_campaign() -> Outcome {
    let grid = TheoremGrid {
        alphas: vec![1.0, 1.5, 2.0, 3.0],
        betas: vec![1.0, 2.0],
        all_orderings: false,
    };
    let mut ok = true;
    let mut feasible = [0u64; 4];
    let mut violated = [0u64; 4];
    for ensemble in [
        Ensemble::Pure,
        Ensemble::Ginibre { rank: None },
        Ensemble::Ginibre { rank: Some(2) },
    ] {
        for n in 3..=5 {
            let spec = CampaignSpec {
                ensemble,
                n,
                samples: 1000,
                seed: 12,
            };
            let r = verify_theorems(&spec, &grid, false).unwrap().report;
            for (i, v) in THEOREM_VARIANTS.iter().enumerate() {
                let (f, bad) = tally(&r, *v);
                feasible[i] += f;
                violated[i] += bad;
            }
        }
    }
    let mut parts = Vec::new();
    for (i, v) in THEOREM_VARIANTS.iter().enumerate() {
        ok &= violated[i] == 0;
        parts.push(format!(
            "{v}: {} feasible, {} violated",
            feasible[i], violated[i]
        ));
    }
    let mut detail = parts.join("; ");
    if feasible.iter().all(|&f| f == 0) {
        detail.push_str(
            " (no random pure or Ginibre state met the hypotheses, so this holds vacuously)",
        );
    }
    check(ok, detail)
}

/// Not a criterion: the same campaign on graded states, where the
/// hypotheses are often met. Reported as a finding.
fn graded_theorem_finding() -> (bool, String) {
    let grid = TheoremGrid {
        alphas: vec![1.0, 1.5, 2.0, 3.0],
        betas: vec![1.0, 2.0],
        all_orderings: false,
    };
    let mut feasible = [0u64; 4];
    let mut violated = [0u64; 4];
    for n in 3..=5 {
        let spec = CampaignSpec {
            ensemble: Ensemble::Graded { decay: 0.1 },
            n,
            samples: 1000,
            seed: 12,
        };
        let r = verify_theorems(&spec, &grid, false).unwrap().report;
        for (i, v) in THEOREM_VARIANTS.iter().enumerate() {
            let (f, bad) = tally(&r, *v);
            feasible[i] += f;
            violated[i] += bad;
        }
    }
    let parts: Vec<String> = THEOREM_VARIANTS
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{v}: {} feasible, {} violated", feasible[i], violated[i]))
        .collect();
    // the proof-consistent corollaries must still hold
    (
        violated[2] == 0 && violated[3] == 0 && feasible[2] > 0,
        parts.join("; "),
    )
}

/// Synthetic profile whose hypotheses hold at `x = 1` for partition `m`;
/// even seeds use `m = n - 2`, where the corollaries apply as well.
fn random_profile(seed: u64) -> (CoherenceProfile, usize) {
    let mut rng = SeedSpec::new(77, seed).rng();
    let n = 3 + (rng.next_u64() % 4) as usize;
    let m = if seed.is_multiple_of(2) {
        n - 2
    } else {
        1 + (rng.next_u64() % (n as u64 - 2)) as usize
    };
    let mut c: Vec<f64> = (0..n).map(|_| 0.01 + 0.99 * rng.next_f64()).collect();
    let mut tails = vec![0.0; n - 1];
    for i in (0..n - 1).rev() {
        tails[i] = if i == n - 2 {
            c[n - 1]
        } else {
            tails[i + 1] + c[i + 1]
        };
        c[i] = if i < m {
            c[i].max(tails[i])
        } else {
            c[i].min(tails[i])
        };
    }
    let full = 2.0 * c.iter().sum::<f64>();
    (CoherenceProfile::from_values(c, tails, full).unwrap(), m)
}

fn reductions() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut evaluated = 0usize;
    for s in 0..100 {
        let (p, m) = random_profile(s);
        let mut rng = SeedSpec::new(78, s).rng();
        let alpha = 1.0 + 2.0 * rng.next_f64();
        let beta = 1.0 + rng.next_f64();
        let mut diff = |a: f64, b: f64| {
            worst_abs = worst_abs.max((a - b).abs());
            // 1e-12 relative to the magnitude once values exceed 1
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
            evaluated += 1;
        };
        let at = |alpha: f64, beta: f64, x: f64| BoundParams::from_x(alpha, beta, x, m).unwrap();
        let val = |v: Variant, params: &BoundParams| evaluate(v, &p, params).unwrap().value;

        let x = partition_and_feasibility(&p, 1.0).unwrap()[m - 1]
            .lo
            .clamp(1e-6, 1.0);
        let corollaries = m == p.n() - 2;
        let one = at(alpha, 1.0, x);
        diff(val(Variant::Thm3, &one), val(Variant::Thm1, &one));
        if corollaries {
            diff(
                val(Variant::Thm4AsPrinted, &one),
                val(Variant::Thm2AsPrinted, &one),
            );
            diff(
                val(Variant::Thm4ProofConsistent, &one),
                val(Variant::Thm2ProofConsistent, &one),
            );
        }
        let eq4 = prior_bound_eq4(&p, alpha, m).unwrap().value;
        diff(val(Variant::Thm1, &at(alpha, 1.0, 1.0)), eq4);
        diff(prior_bound_eq5(&p, alpha, 1.0, m).unwrap().value, eq4);

        let power_sum = |b: f64| p.marginals.iter().map(|c| c.powf(b)).sum::<f64>();
        let xb = partition_and_feasibility(&p, beta).unwrap()[m - 1];
        if xb.feasible {
            let pb = at(1.0, beta, xb.lo.clamp(1e-6, 1.0));
            diff(val(Variant::Thm3, &pb), power_sum(beta));
            if corollaries {
                diff(val(Variant::Thm4AsPrinted, &pb), power_sum(beta));
                diff(val(Variant::Thm4ProofConsistent, &pb), power_sum(beta));
            }
        }
        let p1 = at(1.0, 1.0, x);
        diff(val(Variant::Thm1, &p1), power_sum(1.0));
        diff(val(Variant::Eq5, &p1), power_sum(1.0));
        if corollaries {
            diff(val(Variant::Thm2AsPrinted, &p1), power_sum(1.0));
            diff(val(Variant::Thm2ProofConsistent, &p1), power_sum(1.0));
        }
        diff(prior_bound_eq4(&p, 1.0, m).unwrap().value, power_sum(1.0));
    }
    check(
        worst <= 1e-12,
        format!(
            "{evaluated} identities on 100 profiles, max scaled deviation {worst:.3e} (absolute {worst_abs:.3e})"
        ),
    )
}

fn dominance() -> Outcome {
    let mut coef_worst = f64::INFINITY;
    for i in 0..40 {
        for j in 1..=25 {
            let alpha = 1.0 + 4.0 * i as f64 / 39.0;
            let k = j as f64 / 25.0;
            coef_worst =
                coef_worst.min(q_coeff(alpha, k * k).unwrap() - q_coeff(alpha, k).unwrap());
        }
    }
    let alphas = [1.0, 1.5, 2.0, 3.0];
    let mut count = 0;
    let mut worst = f64::INFINITY;
    let mut parts = Vec::new();
    for ensemble in [
        Ensemble::Pure,
        Ensemble::Ginibre { rank: None },
        Ensemble::Graded { decay: 0.3 },
    ] {
        let mut here = 0;
        for n in 3..=5 {
            let spec = CampaignSpec {
                ensemble,
                n,
                samples: 300,
                seed: 13,
            };
            for row in tightness_compare(&spec, &alphas, 2.0).unwrap() {
                here += row.count;
                if let Some(d) = row.min_difference {
                    worst = worst.min(d);
                }
            }
        }
        count += here;
        parts.push(format!("{}: {here}", ensemble.name()));
    }
    check(
        coef_worst >= -1e-12 && worst >= -1e-12 && count > 0,
        format!(
            "min q(a,k^2) - q(a,k) over 1000 points {coef_worst:.3e}; jointly feasible evaluations ({}), min thm1 - eq5 {worst:.3e}",
            parts.join(", ")
        ),
    )
}

fn cohbound(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cohbound"))
        .args(args)
        .env_remove("COHBOUND_MAX_QUBITS")
        .output()
        .unwrap()
}

fn discrepancy_audit() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("example.state");
    let path = path.to_str().unwrap();
    assert!(cohbound(&["example", path]).status.success());
    let out = cohbound(&["audit", path, "--alpha", "2", "--k", "0.8", "--delta", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let csv_start = text.find("state_id,").unwrap_or(text.len());
    let mut rdr = csv::Reader::from_reader(&text.as_bytes()[csv_start..]);
    let mut printed = None;
    let mut consistent = None;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let claimed: f64 = rec[7].parse().unwrap_or(f64::NAN);
        let actual: f64 = rec[8].parse().unwrap_or(f64::NAN);
        let verdict = rec[10].to_string();
        match &rec[2] {
            "thm2_as_printed" => printed = Some((claimed, actual, verdict)),
            "thm2_proof_consistent" => consistent = Some((claimed, actual, verdict)),
            _ => {}
        }
    }
    let code = out.status.code();
    let ok = match (&printed, &consistent) {
        (Some((c1, a1, v1)), Some((c2, _, v2))) => {
            (c1 - 7.125625).abs() < 1e-9
                && (a1 - 4.84).abs() < 1e-9
                && v1 == "violated"
                && (c2 - 2.485).abs() < 1e-9
                && v2 == "holds"
                && code == Some(1)
        }
        _ => false,
    };
    check(
        ok,
        format!("as printed {printed:?}, proof consistent {consistent:?}, exit code {code:?}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let json = dir.path().join(format!("{tag}.json"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let out = cohbound(&[
            "verify",
            "--ensemble",
            "ginibre",
            "--n",
            "4",
            "--samples",
            "200",
            "--seed",
            "7",
            "--alphas",
            "1,2",
            "--json",
            json.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        (
            out.status.code(),
            std::fs::read(json).unwrap(),
            std::fs::read(csv).unwrap(),
        )
    };
    let (c1, j1, v1) = run("a");
    let (c2, j2, v2) = run("b");
    let ok = c1 == c2 && matches!(c1, Some(0 | 1)) && j1 == j2 && v1 == v2 && !v1.is_empty();
    check(
        ok,
        format!(
            "exit codes {c1:?}/{c2:?}, JSON {} bytes identical: {}, CSV {} bytes identical: {}",
            j1.len(),
            j1 == j2,
            v1.len(),
            v1 == v2
        ),
    )
}

fn main() {
    let mut failures = Vec::new();
    let s = Duration::from_secs;
    criterion(
        1,
        "example state profile",
        Duration::from_millis(1),
        &mut failures,
        example_profile,
    );
    criterion(2, "alpha sweep curves", s(1), &mut failures, fig1_curves);
    criterion(3, "scalar lemma", s(5), &mut failures, scalar_lemma);
    criterion(
        4,
        "superadditivity campaign",
        s(60),
        &mut failures,
        superadditivity_campaign,
    );
    criterion(
        5,
        "theorem validity campaign",
        s(120),
        &mut failures,
        theorem_campaign,
    );
    criterion(6, "reduction identities", s(1), &mut failures, reductions);
    criterion(7, "tightness dominance", s(5), &mut failures, dominance);
    criterion(
        8,
        "as-printed corollary audit",
        s(1),
        &mut failures,
        discrepancy_audit,
    );
    criterion(9, "campaign determinism", s(60), &mut failures, determinism);

    let (held, detail) = graded_theorem_finding();
    println!(
        "[INFO] graded ensemble (decay 0.1, n = 3..5, 1000 states each): {detail}; proof-consistent corollaries hold: {held}"
    );
    if !held {
        failures.push(0);
    }

    if failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed {failures:?}");
        std::process::exit(1);
    }
}
