//! Certifying a pure convention: mutual cooperation in the prisoner's
//! dilemma is stable exactly when the gain from defecting against a
//! cooperator (here 1) does not exceed the effective cost of deception
//! `c = min_n k(n)/q(n, 1)`.
//!
//! ```bash
//! cargo run --example certify_pure_convention
//! ```

use coevo::env::Environment;
use coevo::game::prisoners_dilemma;
use coevo::scalar::Scalar;
use coevo::stability::{certify_pure_nsc, effective_cost, refute_nsc};

fn main() {
    for k2 in [
        Scalar::ratio(1, 4),
        Scalar::ratio(1, 2),
        Scalar::one(),
        Scalar::from_int(2),
    ] {
        let env = Environment::builder(prisoners_dilemma())
            .costs(vec![Scalar::zero(), k2.clone()])
            .tail_step(Scalar::from_int(10))
            .build()
            .unwrap();
        let c = effective_cost(&env);
        let cert = certify_pure_nsc(&env, 0).unwrap();
        println!(
            "effective cost c = {c}: cooperation is {}",
            if cert.verdict.is_certified() {
                "certified stable"
            } else {
                "refuted"
            }
        );
        for check in &cert.verdict.conditions {
            println!(
                "   [{}] {} (margin {})",
                if check.passed { "pass" } else { "fail" },
                check.name,
                check
                    .margin
                    .as_ref()
                    .map(|m| m.render())
                    .unwrap_or_else(|| "n/a".into())
            );
        }
        // On success the certifier emits the witness population: a level-1
        // type that weakly prefers punishing deviators with defection. The
        // refutation battery then has nothing on it.
        if let Some(config) = cert.configuration {
            let report = refute_nsc(&config, 4).unwrap();
            println!(
                "   witness configuration resists the mutant recipes: {:?}",
                report.verdict.status
            );
        }
    }
}
