//! Prints how often random ensembles satisfy the tiered-bound hypotheses and
//! how the main variants fare on them.

use cohbound::bounds::Variant;
use cohbound::harness::{verify_theorems, CampaignSpec, Ensemble, TheoremGrid};

fn main() {
    let ensembles = [
        Ensemble::Pure,
        Ensemble::Ginibre { rank: None },
        Ensemble::Ginibre { rank: Some(2) },
        Ensemble::Product,
        Ensemble::Graded { decay: 0.3 },
        Ensemble::Graded { decay: 0.1 },
    ];
    let grid = TheoremGrid {
        alphas: vec![1.0, 1.5, 2.0, 3.0],
        betas: vec![1.0, 2.0],
        all_orderings: false,
    };
    for ensemble in ensembles {
        for n in 3..=5 {
            let spec = CampaignSpec {
                ensemble,
                n,
                samples: 1000,
                seed: 1,
            };
            let report = verify_theorems(&spec, &grid, false).unwrap().report;
            let line: Vec<String> = [
                Variant::Thm1,
                Variant::Thm3,
                Variant::Thm2ProofConsistent,
                Variant::Thm4ProofConsistent,
                Variant::Thm2AsPrinted,
                Variant::Eq4,
                Variant::Eq5,
            ]
            .iter()
            .filter_map(|v| {
                report
                    .by_variant
                    .get(v)
                    .map(|t| format!("{v}: {}ok/{}bad/{}inf", t.holds, t.violated, t.infeasible))
            })
            .collect();
            println!("{} n={n}: {}", ensemble.name(), line.join("  "));
        }
    }
}
