//! File formats.
//!
//! *Game files* come in two shapes, auto-detected: a whitespace-delimited
//! matrix with an `actions:` header line, or a JSON object
//! `{"actions": [...], "payoff": [[...]]}`. Numeric literals are exact:
//! integers, decimals, scientific notation, and `p/q` fractions all parse
//! to arbitrary-precision rationals.
//!
//! *Environment files* are JSON: a game (inline or a path), a cost schedule
//! (explicit levels plus a linear tail step), and a deception table (default
//! probability plus per-pair overrides).
//!
//! *Configuration files* are JSON: types (utility, level, frequency) plus a
//! behaviour policy keyed by type names; omitted policy entries are
//! auto-completed with the first enumerated equilibrium and flagged.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::env::{DeceptionTable, Environment};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, SymmetricGame};
use crate::linalg::Matrix;
use crate::population::{BehaviorPolicy, Configuration, TypeDistribution};
use crate::prefs::{BranchUtility, CognitiveType, Preferences, TypeRef, UtilityFunction};
use crate::scalar::Scalar;

/// Parses a game from either accepted shape.
pub fn parse_game_str(text: &str) -> Result<SymmetricGame> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("game JSON: {e}")))?;
        game_from_json(&value)
    } else {
        parse_game_text(text)
    }
}

pub fn parse_game_file(path: &Path) -> Result<SymmetricGame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_game_str(&text)
}

fn parse_game_text(text: &str) -> Result<SymmetricGame> {
    let mut actions: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("actions:") {
            if actions.is_some() {
                return Err(Error::Parse(format!(
                    "line {}: duplicate actions header",
                    lineno + 1
                )));
            }
            actions = Some(rest.split_whitespace().map(str::to_string).collect());
            continue;
        }
        let row: Result<Vec<Scalar>> = line
            .split_whitespace()
            .map(|tok| {
                Scalar::parse_exact(tok)
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect();
        rows.push(row?);
    }
    let actions = actions.ok_or_else(|| {
        Error::Parse("missing `actions:` header line in game file".into())
    })?;
    let m = actions.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Parse(format!(
                "payoff row {} has {} entries, expected {m}",
                i + 1,
                row.len()
            )));
        }
    }
    if rows.len() != m {
        return Err(Error::Parse(format!(
            "expected {m} payoff rows, found {}",
            rows.len()
        )));
    }
    SymmetricGame::new(actions, Matrix::from_rows(rows)?)
}

fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => Scalar::parse_exact(s),
        Value::Number(n) => Scalar::parse_exact(&n.to_string()),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of rows".into()))?;
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {} is not an array", i + 1)))?;
        out.push(
            cells
                .iter()
                .map(scalar_from_json)
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Matrix::from_rows(out)
}

fn game_from_json(v: &Value) -> Result<SymmetricGame> {
    let actions = v
        .get("actions")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("game JSON needs an `actions` array".into()))?
        .iter()
        .map(|a| {
            a.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse("action labels must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let payoff = matrix_from_json(
        v.get("payoff")
            .ok_or_else(|| Error::Parse("game JSON needs a `payoff` matrix".into()))?,
    )?;
    SymmetricGame::new(actions, payoff)
}

/// Parses an environment file; `base_dir` resolves a game given as a path.
pub fn parse_environment_str(text: &str, base_dir: Option<&Path>) -> Result<Environment> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("environment JSON: {e}")))?;
    environment_from_json(&value, base_dir)
}

pub fn parse_environment_file(path: &Path) -> Result<Environment> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_environment_str(&text, path.parent())
}

pub fn environment_from_json(v: &Value, base_dir: Option<&Path>) -> Result<Environment> {
    let game = match v.get("game") {
        Some(Value::String(path)) => {
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => Path::new(path).to_path_buf(),
            };
            parse_game_file(&full)?
        }
        Some(obj @ Value::Object(_)) => game_from_json(obj)?,
        _ => {
            return Err(Error::Parse(
                "environment needs a `game` (inline object or path string)".into(),
            ))
        }
    };
    let costs = v
        .get("costs")
        .ok_or_else(|| Error::Parse("environment needs a `costs` object".into()))?;
    let levels = costs
        .get("levels")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("`costs.levels` must be an array".into()))?
        .iter()
        .map(scalar_from_json)
        .collect::<Result<Vec<_>>>()?;
    let tail_step = match costs.get("tail_step") {
        Some(t) => Some(scalar_from_json(t)?),
        None => None,
    };
    let deception = match v.get("deception") {
        None => DeceptionTable::certain(),
        Some(d) => {
            let default_q = match d.get("default") {
                Some(q) => scalar_from_json(q)?,
                None => Scalar::one(),
            };
            let mut table = DeceptionTable::with_default(default_q)?;
            if let Some(entries) = d.get("overrides").and_then(Value::as_array) {
                for e in entries {
                    let deceiver = e
                        .get("deceiver")
                        .and_then(Value::as_u64)
                        .ok_or_else(|| Error::Parse("override needs `deceiver`".into()))?;
                    let deceived = e
                        .get("deceived")
                        .and_then(Value::as_u64)
                        .ok_or_else(|| Error::Parse("override needs `deceived`".into()))?;
                    let q = scalar_from_json(
                        e.get("q")
                            .ok_or_else(|| Error::Parse("override needs `q`".into()))?,
                    )?;
                    table.set(deceiver as u32, deceived as u32, q)?;
                }
            }
            table
        }
    };
    let mut builder = Environment::builder(game).costs(levels).deception(deception);
    if let Some(step) = tail_step {
        builder = builder.tail_step(step);
    }
    builder.build()
}

fn utility_from_json(v: &Value, game: &SymmetricGame) -> Result<Preferences> {
    match v {
        Value::String(s) if s == "materialistic" => Ok(Preferences::Simple(
            UtilityFunction::materialistic(game),
        )),
        Value::String(s) if s == "indifferent" => Ok(Preferences::Simple(
            UtilityFunction::constant(game.num_actions()),
        )),
        Value::Array(_) => Ok(Preferences::Simple(UtilityFunction::new(
            matrix_from_json(v)?,
        )?)),
        Value::Object(obj) => {
            if let Some(a) = obj.get("dominant") {
                let label = a
                    .as_str()
                    .ok_or_else(|| Error::Parse("`dominant` takes an action label".into()))?;
                let action = game.action_by_label(label).ok_or_else(|| {
                    Error::Parse(format!("unknown action label `{label}`"))
                })?;
                return Ok(Preferences::Simple(UtilityFunction::dominant_action(
                    action,
                    game.num_actions(),
                )));
            }
            let branches = obj
                .get("branches")
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    Error::Parse("interdependent utility needs `branches` and `otherwise`".into())
                })?
                .iter()
                .map(|b| {
                    let label = b
                        .get("label")
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse("branch needs a `label`".into()))?;
                    let level = b
                        .get("level")
                        .and_then(Value::as_u64)
                        .ok_or_else(|| Error::Parse("branch needs a `level`".into()))?;
                    let matrix = matrix_from_json(
                        b.get("matrix")
                            .ok_or_else(|| Error::Parse("branch needs a `matrix`".into()))?,
                    )?;
                    Ok((
                        TypeRef::new(label, level as u32),
                        UtilityFunction::new(matrix)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let otherwise = UtilityFunction::new(matrix_from_json(
                obj.get("otherwise")
                    .ok_or_else(|| Error::Parse("interdependent utility needs `otherwise`".into()))?,
            )?)?;
            Ok(Preferences::Discriminating(BranchUtility {
                branches,
                otherwise,
            }))
        }
        other => Err(Error::Parse(format!("unrecognized utility: {other}"))),
    }
}

fn play_from_json(v: &Value, game: &SymmetricGame) -> Result<MixedStrategy> {
    match v {
        Value::String(label) => {
            let a = game
                .action_by_label(label)
                .ok_or_else(|| Error::Parse(format!("unknown action label `{label}`")))?;
            Ok(MixedStrategy::pure(a, game.num_actions()))
        }
        Value::Object(weights) => {
            let mut w = vec![Scalar::zero(); game.num_actions()];
            for (label, weight) in weights {
                let a = game
                    .action_by_label(label)
                    .ok_or_else(|| Error::Parse(format!("unknown action label `{label}`")))?;
                w[a] = scalar_from_json(weight)?;
            }
            MixedStrategy::new(w)
        }
        other => Err(Error::Parse(format!(
            "a play is an action label or a weight map, got {other}"
        ))),
    }
}

/// Parses a configuration file. The environment comes from the file's
/// `environment` field unless `env_override` supplies one. Missing policy
/// entries are auto-completed and flagged in the validation report.
pub fn parse_configuration_str(
    text: &str,
    base_dir: Option<&Path>,
    env_override: Option<Environment>,
) -> Result<Configuration> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("configuration JSON: {e}")))?;
    let env = match env_override {
        Some(e) => e,
        None => match value.get("environment") {
            Some(Value::String(path)) => {
                let full = match base_dir {
                    Some(dir) => dir.join(path),
                    None => Path::new(path).to_path_buf(),
                };
                parse_environment_file(&full)?
            }
            Some(obj @ Value::Object(_)) => environment_from_json(obj, base_dir)?,
            _ => {
                return Err(Error::Parse(
                    "configuration needs an `environment` (inline, path, or --env)".into(),
                ))
            }
        },
    };
    let game = env.game().clone();

    let type_entries = value
        .get("types")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("configuration needs a `types` array".into()))?;
    let mut types = Vec::new();
    let mut freqs = Vec::new();
    let mut names = BTreeMap::new();
    for (i, t) in type_entries.iter().enumerate() {
        let name = t
            .get("name")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| format!("type{i}"));
        let level = t
            .get("level")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse(format!("type `{name}` needs a `level`")))? as u32;
        let frequency = scalar_from_json(
            t.get("frequency")
                .ok_or_else(|| Error::Parse(format!("type `{name}` needs a `frequency`")))?,
        )?;
        let prefs = utility_from_json(
            t.get("utility")
                .ok_or_else(|| Error::Parse(format!("type `{name}` needs a `utility`")))?,
            &game,
        )?;
        let ct = match prefs {
            Preferences::Simple(u) => CognitiveType::simple(name.clone(), u, level)?,
            Preferences::Discriminating(b) => {
                CognitiveType::discriminating(name.clone(), b, level)?
            }
        };
        if names.insert(name.clone(), i).is_some() {
            return Err(Error::Parse(format!("duplicate type name `{name}`")));
        }
        types.push(ct);
        freqs.push(frequency);
    }
    let dist = TypeDistribution::new(types, freqs)?;

    let mut policy = BehaviorPolicy::new();
    if let Some(p) = value.get("policy") {
        for (mode, setter) in [
            ("nash", true),
            ("deception", false),
        ] {
            if let Some(entries) = p.get(mode).and_then(Value::as_array) {
                for e in entries {
                    let of = e
                        .get("of")
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse("policy entry needs `of`".into()))?;
                    let vs = e
                        .get("vs")
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse("policy entry needs `vs`".into()))?;
                    let play = play_from_json(
                        e.get("play")
                            .ok_or_else(|| Error::Parse("policy entry needs `play`".into()))?,
                        &game,
                    )?;
                    let i = *names
                        .get(of)
                        .ok_or_else(|| Error::Parse(format!("unknown type `{of}` in policy")))?;
                    let j = *names
                        .get(vs)
                        .ok_or_else(|| Error::Parse(format!("unknown type `{vs}` in policy")))?;
                    if setter {
                        policy.set_nash(i, j, play);
                    } else {
                        policy.set_deception(i, j, play);
                    }
                }
            }
        }
    }

    let mut config = Configuration::with_auto_policy(env, dist, policy)?;
    if let Some(extra) = value.get("universe").and_then(Value::as_array) {
        let refs = extra
            .iter()
            .map(|r| {
                let label = r
                    .get("label")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("universe entry needs `label`".into()))?;
                let level = r
                    .get("level")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Parse("universe entry needs `level`".into()))?;
                Ok(TypeRef::new(label, level as u32))
            })
            .collect::<Result<Vec<_>>>()?;
        config = config.with_universe(refs);
    }
    Ok(config)
}

pub fn parse_configuration_file(
    path: &Path,
    env_override: Option<Environment>,
) -> Result<Configuration> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_configuration_str(&text, path.parent(), env_override)
}

fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(_) => Value::String(s.render()),
        Scalar::Approx(v) => json!(v),
    }
}

fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array((0..m.cols()).map(|j| scalar_to_json(m.get(i, j))).collect())
            })
            .collect(),
    )
}

pub fn game_to_json(game: &SymmetricGame) -> Value {
    json!({
        "actions": game.actions(),
        "payoff": matrix_to_json(game.payoff_matrix()),
    })
}

pub fn environment_to_json(env: &Environment) -> Value {
    let mut deception = Map::new();
    deception.insert(
        "default".into(),
        scalar_to_json(env.deception_table().default_q()),
    );
    let overrides: Vec<Value> = env
        .deception_table()
        .overrides()
        .iter()
        .map(|(a, b, q)| {
            json!({"deceiver": a, "deceived": b, "q": scalar_to_json(q)})
        })
        .collect();
    if !overrides.is_empty() {
        deception.insert("overrides".into(), Value::Array(overrides));
    }
    json!({
        "game": game_to_json(env.game()),
        "costs": {
            "levels": env.cost_schedule().explicit().iter().map(scalar_to_json).collect::<Vec<_>>(),
            "tail_step": scalar_to_json(env.cost_schedule().tail_step()),
        },
        "deception": Value::Object(deception),
    })
}

fn play_to_json(play: &MixedStrategy, game: &SymmetricGame) -> Value {
    if let Some(a) = play.as_pure() {
        return Value::String(game.action_label(a).to_string());
    }
    let mut map = Map::new();
    for (i, w) in play.weights().iter().enumerate() {
        if !w.is_zero() {
            map.insert(game.action_label(i).to_string(), scalar_to_json(w));
        }
    }
    Value::Object(map)
}

fn preferences_to_json(prefs: &Preferences, game: &SymmetricGame) -> Value {
    match prefs {
        Preferences::Simple(u) => {
            if u == &UtilityFunction::materialistic(game) {
                Value::String("materialistic".into())
            } else {
                matrix_to_json(u.matrix())
            }
        }
        Preferences::Discriminating(b) => {
            json!({
                "branches": b.branches.iter().map(|(r, u)| json!({
                    "label": r.label,
                    "level": r.level,
                    "matrix": matrix_to_json(u.matrix()),
                })).collect::<Vec<_>>(),
                "otherwise": matrix_to_json(b.otherwise.matrix()),
            })
        }
    }
}

/// Renders a configuration (with its environment inlined) as canonical JSON.
/// Writing, re-parsing, and writing again is byte-identical in exact mode.
pub fn configuration_to_json(config: &Configuration) -> Value {
    let game = config.env().game();
    let dist = config.distribution();
    let types: Vec<Value> = (0..dist.len())
        .map(|i| {
            let t = dist.type_at(i);
            json!({
                "name": t.name,
                "level": t.level,
                "frequency": scalar_to_json(dist.frequency(i)),
                "utility": preferences_to_json(&t.prefs, game),
            })
        })
        .collect();
    let mut nash = Vec::new();
    let mut deception = Vec::new();
    for i in 0..dist.len() {
        for j in 0..dist.len() {
            if let Some(p) = config.policy().nash_play(i, j) {
                nash.push(json!({
                    "of": dist.type_at(i).name,
                    "vs": dist.type_at(j).name,
                    "play": play_to_json(p, game),
                }));
            }
            if let Some(p) = config.policy().deception_play(i, j) {
                deception.push(json!({
                    "of": dist.type_at(i).name,
                    "vs": dist.type_at(j).name,
                    "play": play_to_json(p, game),
                }));
            }
        }
    }
    let extra_universe: Vec<Value> = config
        .universe()
        .iter()
        .filter(|r| {
            !dist
                .types()
                .iter()
                .any(|t| t.name == r.label && t.level == r.level)
        })
        .map(|r| json!({"label": r.label, "level": r.level}))
        .collect();
    let mut root = Map::new();
    root.insert("environment".into(), environment_to_json(config.env()));
    root.insert("types".into(), Value::Array(types));
    root.insert(
        "policy".into(),
        json!({"nash": nash, "deception": deception}),
    );
    if !extra_universe.is_empty() {
        root.insert("universe".into(), Value::Array(extra_universe));
    }
    Value::Object(root)
}

pub fn write_configuration(config: &Configuration) -> String {
    let mut out = serde_json::to_string_pretty(&configuration_to_json(config))
        .expect("serialization cannot fail");
    out.push('\n');
    out
}
