//! Evolutionarily stable cooperation through discriminating preferences:
//! a type that cooperates with its own kind and plays the minmax action
//! against everyone else. Strict stability holds when the cooperative
//! surplus over the minmax value covers the cognitive cost and the
//! deviation gain stays below the effective cost of deceiving this level.
//!
//! ```bash
//! cargo run --example discriminating_certificate
//! ```

use coevo::env::Environment;
use coevo::game::prisoners_dilemma;
use coevo::interdependent::{id_pure_esc_sufficient, id_pure_nsc_necessary, id_undominated};
use coevo::scalar::Scalar;

fn main() {
    for k2 in [Scalar::from_int(2), Scalar::ratio(1, 2)] {
        let env = Environment::builder(prisoners_dilemma())
            .costs(vec![Scalar::zero(), k2.clone()])
            .tail_step(Scalar::from_int(10))
            .build()
            .unwrap();
        let cert = id_pure_esc_sufficient(&env, 0, 1, None).unwrap();
        println!(
            "k(2) = {k2}: cooperation via a discriminating level-1 type is {}",
            if cert.verdict.is_certified() {
                "CERTIFIED evolutionarily stable"
            } else {
                "not certified"
            }
        );
        for c in &cert.verdict.conditions {
            println!(
                "   [{}] {} (margin {})",
                if c.passed { "pass" } else { "fail" },
                c.name,
                c.margin.as_ref().map(|m| m.render()).unwrap_or_else(|| "n/a".into())
            );
        }
        if let Some(config) = &cert.configuration {
            let witness = config.distribution().type_at(0);
            let undominated = id_undominated(witness, config.universe()).unwrap();
            println!(
                "   witness `{}` can be induced to play: {:?}",
                witness.name, undominated.actions
            );
            let necessity = id_pure_nsc_necessary(config).unwrap();
            println!("   necessary conditions pass: {}", necessity.pass);
        }
    }
}
