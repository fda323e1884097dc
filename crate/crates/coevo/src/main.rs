//! Command-line front end: analyze a game, certify or refute the stability
//! of a configuration, construct the closed-form heterogeneous ladders, and
//! simulate replicator dynamics.
//!
//! Exit codes: 0 certified/valid, 1 refuted, 2 inconclusive, 64 input
//! errors, 65 invalid configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use coevo::dynamics::{replicate, stability_probe, ProbeOptions, StepControl};
use coevo::env::Environment;
use coevo::error::Error;
use coevo::game::MixedStrategy;
use coevo::interdependent::{
    construct_hawkdove_esc, id_pure_esc_sufficient, id_pure_nsc_necessary, DiscriminatingType,
    HawkDoveCase,
};
use coevo::io;
use coevo::population::{BehaviorPolicy, Configuration, TypeDistribution};
use coevo::report::{
    exit_code_for, render_highest_type_report, render_efficiency_check, render_validation, render_verdict,
    status_label, Report, RunManifest,
};
use coevo::scalar::Scalar;
use coevo::stability::{
    build_type_game, certify_pure_nsc, check_highest_type_conditions, check_efficiency_requirement,
    construct_rps_nsc, effective_cost, refute_nsc, StabilityStatus,
};

#[derive(Parser)]
#[command(
    name = "coevo",
    about = "Stability analysis for populations whose preferences coevolve with deception",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampling-based checks and perturbations.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Keep exact rational arithmetic (the default).
    #[arg(long, global = true, conflicts_with = "float")]
    rational: bool,
    /// Degrade all inputs to floating point.
    #[arg(long, global = true)]
    float: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Game-level diagnostics: efficiency, deviation gains, punishment
    /// actions, genericity, maxmin/minmax.
    Analyze(AnalyzeArgs),
    /// Certify a pure convention (optionally with discriminating
    /// preferences), or check a configuration's necessary conditions.
    Certify(CertifyArgs),
    /// Replay the constructive mutant recipes against a configuration.
    Refute(RefuteArgs),
    /// Build the closed-form heterogeneous ladders.
    Construct(ConstructArgs),
    /// Integrate replicator dynamics on the induced type game.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Game file (text matrix with `actions:` header, or JSON).
    game: PathBuf,
    /// Genericity tolerance (defaults to 1e-12 exact / 1e-9 float).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Environment file (JSON: game, costs, deception).
    env: PathBuf,
    /// Certify this pure action as the convention.
    #[arg(long, conflicts_with = "config")]
    pure: Option<String>,
    /// Use discriminating (type-interdependent) preferences.
    #[arg(long, requires = "pure")]
    interdependent: bool,
    /// Cognitive level for the discriminating certificate.
    #[arg(long, default_value_t = 1)]
    level: u32,
    /// Check the necessary stability conditions of this configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the witness configuration here on success.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RefuteArgs {
    /// Environment file.
    env: PathBuf,
    /// Configuration file.
    config: PathBuf,
    /// Highest cognitive level tried by the indifferent-deceiver recipe.
    #[arg(long, default_value_t = 6)]
    budget: u32,
}

#[derive(Args)]
struct ConstructArgs {
    /// Environment file (game + costs + deception for --rps; costs for
    /// --hawk-dove).
    env: PathBuf,
    /// Build the Rock-Paper-Scissors ladder.
    #[arg(long, conflicts_with = "hawk_dove")]
    rps: bool,
    /// Level-1 share when the balance system leaves it free.
    #[arg(long)]
    level1_share: Option<String>,
    /// Build the Hawk-Dove in-group ladder from the hawk gain G and the
    /// dove loss L.
    #[arg(long, num_args = 2, value_names = ["G", "L"])]
    hawk_dove: Option<Vec<String>>,
    /// Same-level matches play the mixed Hawk-Dove equilibrium.
    #[arg(long)]
    mixed_within_level: bool,
    /// Write the constructed configuration here (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Environment file.
    env: PathBuf,
    /// Configuration file.
    config: PathBuf,
    /// Mutant group to inject: JSON with `epsilon` and `types`.
    #[arg(long)]
    mutants: Option<PathBuf>,
    /// Integration horizon.
    #[arg(long, default_value_t = 100.0)]
    horizon: f64,
    /// Step-control tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Probe the rest point at these radii (comma-separated).
    #[arg(long, value_delimiter = ',')]
    probe_radii: Vec<f64>,
    /// Samples per probe radius.
    #[arg(long, default_value_t = 8)]
    probe_samples: usize,
    /// Terminal distance beyond this multiple of the radius counts as an
    /// escape.
    #[arg(long, default_value_t = 10.0)]
    escape_factor: f64,
    /// Write the trajectory CSV here (default: appended to the text report).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`coevo ... | head`) instead of
    // panicking mid-report.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(64)
        }
    }
}

fn run(cli: &Cli) -> coevo::Result<u8> {
    match &cli.command {
        Command::Analyze(args) => analyze(cli, args),
        Command::Certify(args) => certify(cli, args),
        Command::Refute(args) => refute(cli, args),
        Command::Construct(args) => construct(cli, args),
        Command::Simulate(args) => simulate(cli, args),
    }
}

fn load_env(cli: &Cli, path: &Path) -> coevo::Result<Environment> {
    let env = io::parse_environment_file(path)?;
    if cli.float {
        env.degraded_to_float()
    } else {
        Ok(env)
    }
}

fn load_config(cli: &Cli, path: &Path, env: &Environment) -> coevo::Result<Configuration> {
    let config = io::parse_configuration_file(path, Some(env.clone()))?;
    if cli.float {
        config.degraded_to_float()
    } else {
        Ok(config)
    }
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> coevo::Result<u8> {
    let game = io::parse_game_file(&args.game)?;
    let game = if cli.float {
        coevo::game::SymmetricGame::new(
            game.actions().to_vec(),
            game.payoff_matrix().map(Scalar::degraded),
        )?
    } else {
        game
    };
    let tol = match args.tol {
        Some(t) => Scalar::approx(t),
        None if game.is_exact() => Scalar::ratio(1, 1_000_000_000_000),
        None => Scalar::approx(1e-9),
    };
    let diagnostics = game.diagnostics(&tol);
    let manifest = RunManifest::new("analyze", cli.seed)
        .input(args.game.display().to_string())
        .flag("tol", tol.render())
        .flag("mode", if game.is_exact() { "rational" } else { "float" });

    #[derive(Serialize)]
    struct Body {
        actions: Vec<String>,
        diagnostics: coevo::game::GameDiagnostics,
    }
    let report = Report::new(
        manifest,
        Body {
            actions: game.actions().to_vec(),
            diagnostics: diagnostics.clone(),
        },
    );
    if cli.json {
        print!("{}", report.to_json());
        return Ok(0);
    }
    let labels = |ids: &[usize]| {
        ids.iter()
            .map(|&a| game.action_label(a).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("actions: {}", game.actions().join(", "));
    println!(
        "efficient payoff: {}",
        diagnostics.efficiency.efficient_payoff
    );
    let profiles: Vec<String> = diagnostics
        .efficiency
        .efficient_profiles
        .iter()
        .map(|&(a, b)| format!("({}, {})", game.action_label(a), game.action_label(b)))
        .collect();
    println!("efficient profiles: {}", profiles.join(" "));
    println!(
        "symmetric efficient actions: {}",
        if diagnostics.efficiency.symmetric_efficient_actions.is_empty() {
            "none".to_string()
        } else {
            labels(&diagnostics.efficiency.symmetric_efficient_actions)
        }
    );
    println!(
        "punishment actions: {}",
        if diagnostics.punishment_actions.is_empty() {
            "none".to_string()
        } else {
            labels(&diagnostics.punishment_actions)
        }
    );
    println!("generic: {}", diagnostics.generic);
    println!(
        "pure maxmin: {} (play {}); pure minmax: {} (opponent plays {})",
        diagnostics.maxmin.maxmin,
        game.action_label(diagnostics.maxmin.maxmin_action),
        diagnostics.maxmin.minmax,
        game.action_label(diagnostics.maxmin.minmax_action)
    );
    for (a, g) in diagnostics.deviation_gains.iter().enumerate() {
        println!("deviation gain g({}) = {}", game.action_label(a), g);
    }
    Ok(0)
}

fn certify(cli: &Cli, args: &CertifyArgs) -> coevo::Result<u8> {
    let env = load_env(cli, &args.env)?;
    let manifest = RunManifest::new("certify", cli.seed)
        .input(args.env.display().to_string())
        .with_environment(&env);

    if let Some(config_path) = &args.config {
        let config = load_config(cli, config_path, &env)?;
        let manifest = manifest.input(config_path.display().to_string());
        let validation = config.validate()?;
        if !validation.valid {
            emit(cli, Report::new(manifest, json!({ "validation": validation })), || {
                render_validation(&validation)
            });
            return Ok(65);
        }
        let highest = check_highest_type_conditions(&config)?;
        let efficiency = check_efficiency_requirement(&config)?;
        let balanced = config.is_balanced(&coevo::scalar::default_tol(config.is_exact()))?;
        let refutes = !highest.pass
            || efficiency.no_stable_configuration_exists
            || (efficiency.applicable && !efficiency.pass);
        let status = if refutes {
            StabilityStatus::Refuted
        } else {
            StabilityStatus::Inconclusive
        };
        let body = json!({
            "validation": validation,
            "balanced": balanced,
            "highest_type_conditions": highest,
            "efficiency_check": efficiency,
            "status": status,
        });
        emit(cli, Report::new(manifest, body), || {
            let mut text = render_validation(&validation);
            text.push_str(&format!("balanced: {balanced}\n"));
            text.push_str(&render_highest_type_report(&highest));
            text.push_str(&render_efficiency_check(&efficiency));
            text.push_str(&format!(
                "status: {} (necessary conditions {}; certification covers pure conventions \
                 and the closed-form constructions)\n",
                status_label(status),
                if refutes { "violated" } else { "hold" }
            ));
            text
        });
        return Ok(exit_code_for(status) as u8);
    }

    let Some(action_label) = &args.pure else {
        return Err(Error::Input(
            "certify needs either --pure ACTION or --config FILE".into(),
        ));
    };
    let action = env
        .game()
        .action_by_label(action_label)
        .ok_or_else(|| Error::Input(format!("unknown action label `{action_label}`")))?;

    if args.interdependent {
        let cert = id_pure_esc_sufficient(&env, action, args.level, None)?;
        let candidate = match &cert.configuration {
            Some(c) => c.clone(),
            None => {
                let blueprint = DiscriminatingType::new(
                    action,
                    env.game().maxmin_minmax().minmax_action,
                    args.level,
                )?;
                let incumbent = blueprint.build(env.game())?;
                let dist = TypeDistribution::singleton(incumbent);
                let mut policy = BehaviorPolicy::new();
                policy.set_nash(0, 0, MixedStrategy::pure(action, env.game().num_actions()));
                Configuration::new(env.clone(), dist, policy)
            }
        };
        let necessity = id_pure_nsc_necessary(&candidate)?;
        let status = if cert.verdict.is_certified() {
            StabilityStatus::CertifiedStable
        } else if !necessity.pass {
            StabilityStatus::Refuted
        } else {
            StabilityStatus::Inconclusive
        };
        if let (Some(out), Some(config)) = (&args.output, &cert.configuration) {
            std::fs::write(out, io::write_configuration(config))?;
        }
        let manifest = manifest
            .flag("pure", action_label)
            .flag("interdependent", true)
            .flag("level", args.level);
        let body = json!({
            "sufficiency": cert.verdict,
            "necessity": necessity,
            "status": status,
        });
        emit(cli, Report::new(manifest, body), || {
            let mut text = String::from("sufficiency (discriminating witness):\n");
            text.push_str(&render_verdict(&cert.verdict));
            text.push_str(&format!(
                "necessity: {}\n",
                if necessity.pass { "pass" } else { "FAIL" }
            ));
            for c in &necessity.conditions {
                text.push_str(&coevo::report::render_condition(c));
                text.push('\n');
            }
            text.push_str(&format!("status: {}\n", status_label(status)));
            text
        });
        return Ok(exit_code_for(status) as u8);
    }

    let cert = certify_pure_nsc(&env, action)?;
    if let (Some(out), Some(config)) = (&args.output, &cert.configuration) {
        std::fs::write(out, io::write_configuration(config))?;
    }
    let manifest = manifest
        .flag("pure", action_label)
        .flag("effective_cost", effective_cost(&env).render());
    let status = cert.verdict.status;
    let body = json!({
        "action": action_label,
        "verdict": cert.verdict,
        "witness_configuration": cert.configuration.as_ref().map(io::configuration_to_json),
    });
    emit(cli, Report::new(manifest, body), || {
        render_verdict(&cert.verdict)
    });
    Ok(exit_code_for(status) as u8)
}

fn refute(cli: &Cli, args: &RefuteArgs) -> coevo::Result<u8> {
    let env = load_env(cli, &args.env)?;
    let config = load_config(cli, &args.config, &env)?;
    let validation = config.validate()?;
    let manifest = RunManifest::new("refute", cli.seed)
        .input(args.env.display().to_string())
        .input(args.config.display().to_string())
        .with_environment(&env)
        .flag("budget", args.budget);
    if !validation.valid {
        emit(cli, Report::new(manifest, json!({ "validation": validation })), || {
            render_validation(&validation)
        });
        return Ok(65);
    }
    let report = refute_nsc(&config, args.budget)?;
    let status = report.verdict.status;
    let body = json!({
        "verdict": report.verdict,
        "recipes": report.outcomes,
    });
    emit(cli, Report::new(manifest, body), || {
        let mut text = String::new();
        for (name, outcome) in &report.outcomes {
            text.push_str(&format!("recipe {name}: {outcome}\n"));
        }
        text.push_str(&render_verdict(&report.verdict));
        text
    });
    Ok(exit_code_for(status) as u8)
}

fn construct(cli: &Cli, args: &ConstructArgs) -> coevo::Result<u8> {
    let env = load_env(cli, &args.env)?;
    let manifest = RunManifest::new("construct", cli.seed)
        .input(args.env.display().to_string())
        .with_environment(&env);

    let (config, case_notes, exit) = if args.rps {
        let share = args
            .level1_share
            .as_deref()
            .map(Scalar::parse_exact)
            .transpose()?;
        let config = construct_rps_nsc(&env, share.as_ref())?;
        (Some(config), Vec::new(), 0u8)
    } else if let Some(gl) = &args.hawk_dove {
        let g = Scalar::parse_exact(&gl[0])?;
        let l = Scalar::parse_exact(&gl[1])?;
        let table = env.deception_table();
        if *table.default_q() != Scalar::one()
            || table.overrides().iter().any(|(_, _, q)| *q != Scalar::one())
        {
            return Err(Error::Precondition(
                "the in-group ladder assumes certain deception: q must be 1 across levels".into(),
            ));
        }
        let built = construct_hawkdove_esc(&g, &l, env.cost_schedule(), args.mixed_within_level)?;
        let exit = match built.case {
            HawkDoveCase::NoneInFamily => 1,
            _ => 0,
        };
        let mut notes = built.notes.clone();
        notes.insert(
            0,
            format!(
                "case: {}",
                match built.case {
                    HawkDoveCase::EvolutionarilyStable => "evolutionarily stable configuration",
                    HawkDoveCase::NeutrallyStable =>
                        "neutrally stable configuration (not evolutionarily stable)",
                    HawkDoveCase::NoneInFamily => "no stable in-group ladder exists",
                }
            ),
        );
        (built.configuration, notes, exit)
    } else {
        return Err(Error::Input(
            "construct needs either --rps or --hawk-dove G L".into(),
        ));
    };

    let verification = match &config {
        Some(c) => {
            let validation = c.validate()?;
            let balanced = c.is_balanced(&coevo::scalar::default_tol(c.is_exact()))?;
            // The highest-type conditions characterise the baseline model;
            // discriminating types evade them by design, so they are only
            // checked for the materialistic ladder.
            let highest = if args.rps {
                Some(check_highest_type_conditions(c)?)
            } else {
                None
            };
            Some((validation, balanced, highest))
        }
        None => None,
    };

    let body = json!({
        "configuration": config.as_ref().map(io::configuration_to_json),
        "notes": case_notes,
        "verification": verification.as_ref().map(|(v, b, t)| json!({
            "validation": v,
            "balanced": b,
            "highest_type_conditions": t,
        })),
    });
    emit(cli, Report::new(manifest, body), || {
        let mut text = String::new();
        for n in &case_notes {
            text.push_str(&format!("{n}\n"));
        }
        if let Some((validation, balanced, highest)) = &verification {
            text.push_str(&render_validation(validation));
            text.push_str(&format!("balanced: {balanced}\n"));
            if let Some(t) = highest {
                text.push_str(&render_highest_type_report(t));
            }
        }
        text
    });

    if let Some(c) = &config {
        let written = io::write_configuration(c);
        match &args.output {
            Some(path) => std::fs::write(path, written)?,
            None if cli.json => {} // already embedded in the JSON report
            None => print!("{written}"),
        }
    }
    Ok(exit)
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> coevo::Result<u8> {
    let env = load_env(cli, &args.env)?;
    let mut config = load_config(cli, &args.config, &env)?;
    let mut manifest = RunManifest::new("simulate", cli.seed)
        .input(args.env.display().to_string())
        .input(args.config.display().to_string())
        .with_environment(&env)
        .flag("horizon", args.horizon)
        .flag("tolerance", args.tolerance);

    if let Some(mutants_path) = &args.mutants {
        manifest = manifest.input(mutants_path.display().to_string());
        config = inject_mutants(&env, &config, mutants_path)?;
    }
    let x0: Vec<f64> = config
        .distribution()
        .frequencies()
        .iter()
        .map(Scalar::to_f64)
        .collect();

    let validation = config.validate()?;
    if !validation.valid {
        emit(cli, Report::new(manifest, json!({ "validation": validation })), || {
            render_validation(&validation)
        });
        return Ok(65);
    }

    let tg = build_type_game(&config)?;
    let control = StepControl {
        tolerance: args.tolerance,
        ..StepControl::default()
    };
    let record = replicate(tg.payoff(), &x0, args.horizon, &control)?;
    let csv = record.to_csv(&tg.type_names());
    if let Some(path) = &args.csv {
        std::fs::write(path, &csv)?;
    }

    let probe = if args.probe_radii.is_empty() {
        None
    } else {
        Some(stability_probe(
            tg.payoff(),
            &x0,
            &args.probe_radii,
            args.horizon,
            &control,
            &ProbeOptions {
                samples_per_radius: args.probe_samples,
                escape_factor: args.escape_factor,
                seed: cli.seed,
            },
        )?)
    };

    let body = json!({
        "types": tg.type_names(),
        "initial": x0,
        "terminal": record.terminal(),
        "points_recorded": record.times.len(),
        "probe": probe,
        "auto_completed_policy": validation.auto_completed,
        "csv": args.csv.as_ref().map(|p| p.display().to_string()),
    });
    emit(cli, Report::new(manifest, body), || {
        let mut text = String::new();
        text.push_str(&format!("types: {}\n", tg.type_names().join(", ")));
        text.push_str(&format!("initial: {x0:?}\n"));
        text.push_str(&format!("terminal: {:?}\n", record.terminal()));
        if let Some(p) = &probe {
            for r in &p.radii {
                text.push_str(&format!(
                    "probe r = {}: max excursion {:.3e}, max terminal distance {:.3e} -> {}\n",
                    r.radius,
                    r.max_excursion,
                    r.max_terminal_distance,
                    if r.escaped {
                        "ESCAPE"
                    } else {
                        "no escape within horizon"
                    }
                ));
            }
        }
        if args.csv.is_none() {
            text.push_str(&csv);
        }
        text
    });
    Ok(0)
}

/// Reads a mutants file (`{"epsilon": ..., "types": [...]}`) and builds the
/// focal post-entry configuration: incumbents scaled by `1 − ε`, mutants at
/// `ε` times their shares, incumbent behaviour preserved, new pairs
/// auto-completed (and flagged in the report).
fn inject_mutants(
    env: &Environment,
    config: &Configuration,
    path: &Path,
) -> coevo::Result<Configuration> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("mutants JSON: {e}")))?;
    let epsilon = match value.get("epsilon") {
        Some(serde_json::Value::String(s)) => Scalar::parse_exact(s)?,
        Some(serde_json::Value::Number(n)) => Scalar::parse_exact(&n.to_string())?,
        _ => Scalar::ratio(1, 100),
    };
    if epsilon <= Scalar::zero() || epsilon >= Scalar::one() {
        return Err(Error::Input("mutant share must lie in (0, 1)".into()));
    }
    // Reuse the configuration parser for the type list by wrapping it in a
    // configuration skeleton.
    let skeleton = json!({
        "types": value.get("types").cloned().unwrap_or(json!([])),
    })
    .to_string();
    let mutants = io::parse_configuration_str(&skeleton, None, Some(env.clone()))?;

    let mut support = config.distribution().types().to_vec();
    let mut freqs: Vec<Scalar> = config
        .distribution()
        .frequencies()
        .iter()
        .map(|f| f * &(Scalar::one() - epsilon.clone()))
        .collect();
    for (i, t) in mutants.distribution().types().iter().enumerate() {
        support.push(t.clone());
        freqs.push(epsilon.clone() * mutants.distribution().frequency(i).clone());
    }
    let dist = TypeDistribution::new(support, freqs)?;
    let mut policy = BehaviorPolicy::new();
    for (&(i, j), play) in config.policy().nash_entries() {
        policy.set_nash(i, j, play.clone());
    }
    for (&(i, j), play) in config.policy().deception_entries() {
        policy.set_deception(i, j, play.clone());
    }
    Configuration::with_auto_policy(env.clone(), dist, policy)
}

fn emit<T: Serialize>(cli: &Cli, report: Report<T>, text: impl Fn() -> String) {
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", text());
    }
}
