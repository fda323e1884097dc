//! Refuting stability constructively: each recipe builds a small mutant
//! group, extends the population into a focal post-entry configuration, and
//! checks whether the mutants outperform in the vanishing-share limit.
//!
//! ```bash
//! cargo run --example refute_with_mutants
//! ```

use coevo::env::Environment;
use coevo::game::{prisoners_dilemma, MixedStrategy, SymmetricGame};
use coevo::population::{BehaviorPolicy, Configuration, TypeDistribution};
use coevo::prefs::{CognitiveType, UtilityFunction};
use coevo::scalar::Scalar;
use coevo::stability::{refute_nsc, Witness};

fn report(config: &Configuration, budget: u32) {
    let report = refute_nsc(config, budget).unwrap();
    for (recipe, outcome) in &report.outcomes {
        println!("   {recipe}: {outcome}");
    }
    match &report.verdict.witness {
        Some(Witness::Scenario(s)) => {
            let summary = s.summary();
            println!(
                "   -> refuted by `{}`: mutants {:?} gain {} (first order)",
                summary.label,
                summary.mutants,
                summary.first_order_gain
            );
        }
        _ => println!("   -> {:?}", report.verdict.status),
    }
}

fn main() {
    // An all-cooperate population in a world where deception is cheap:
    // an indifferent deceiver at level 2 pockets the defection gain.
    let env = Environment::builder(prisoners_dilemma())
        .costs(vec![Scalar::zero(), Scalar::ratio(1, 2)])
        .tail_step(Scalar::from_int(10))
        .build()
        .unwrap();
    let enforcer = CognitiveType::simple(
        "enforcer",
        UtilityFunction::convention_enforcer(0, 1, 2),
        1,
    )
    .unwrap();
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::pure(0, 2));
    let config = Configuration::new(env, TypeDistribution::singleton(enforcer), policy);
    println!("all-cooperate population, cheap deception:");
    report(&config, 4);

    // A lone level-2 type paying a heavy cognitive cost for zero-sum play:
    // its average fitness drops below the pure maxmin value, and a level-1
    // mutant that simply insists on the maxmin action walks in.
    let rps = SymmetricGame::rock_paper_scissors();
    let env = Environment::builder(rps.clone())
        .costs_int(&[0, 2])
        .tail_step(Scalar::from_int(10))
        .build()
        .unwrap();
    let overpaying = CognitiveType::materialistic("overpaying", &rps, 2);
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::uniform(3));
    let config = Configuration::new(env, TypeDistribution::singleton(overpaying), policy);
    println!("zero-sum population paying for useless sophistication:");
    report(&config, 3);
}
