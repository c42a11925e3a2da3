//! Function sources, config files and the merge of flags over file values
//! over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use angmax_core::verify::{FamilyConfig, Fixture};
use angmax_core::{ExpFunction, InputFunction};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// Keys understood at the top level of every config file, next to the
/// command-specific ones.
#[derive(Debug, Default, Deserialize)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
}

/// Parsed `--config` value: inline JSON when it starts with `{`, else a path.
pub fn load_config(arg: Option<&str>) -> Result<(Common, Map<String, Value>), CliError> {
    let Some(arg) = arg else {
        return Ok((Common::default(), Map::new()));
    };
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)
            .map_err(|e| CliError::Config(format!("cannot read config '{arg}': {e}")))?
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    let mut common = Map::new();
    for key in ["out", "format", "jobs"] {
        if let Some(v) = map.remove(key) {
            common.insert(key.into(), v);
        }
    }
    let common = serde_json::from_value(Value::Object(common))
        .map_err(|e| CliError::Config(format!("bad config entry: {e}")))?;
    Ok((common, map))
}

/// Resolve a function source.
///
/// Accepted forms: `fixture:NAME`, `random:INDEX` (member of the seeded
/// signed family, needs a seed), inline JSON, or a path to a JSON file.
pub fn load_function(src: &str, seed: Option<u64>) -> Result<InputFunction, CliError> {
    if let Some(name) = src.strip_prefix("fixture:") {
        let fx: Fixture = name.parse().map_err(CliError::from)?;
        return Ok(fx.function());
    }
    if let Some(idx) = src.strip_prefix("random:") {
        let seed =
            seed.ok_or_else(|| CliError::Config("a random function source needs --seed".into()))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| CliError::Config(format!("bad family index '{idx}'")))?;
        let family = FamilyConfig {
            count: idx + 1,
            ..FamilyConfig::signed(seed)
        };
        let mut members = family.generate()?;
        return Ok(members.pop().expect("count >= 1").f);
    }
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        fs::read_to_string(Path::new(src))
            .map_err(|e| CliError::Config(format!("cannot read function file '{src}': {e}")))?
    };
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("function is not valid JSON: {e}")))?;
    function_from_value(value, seed)
}

/// A function given inside a config file: a source string or a JSON object.
pub fn function_from_value(value: Value, seed: Option<u64>) -> Result<InputFunction, CliError> {
    if let Value::String(s) = &value {
        return load_function(s, seed);
    }
    let f: InputFunction = serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("not a function description: {e}")))?;
    // the derived deserializer does not validate the exponential parameters
    if let InputFunction::Exp(g) = &f {
        ExpFunction::new(g.amplitude(), g.rate())?;
    }
    Ok(f)
}

/// Overlay `patch` onto `base`. Keys absent from an object in `base` are
/// rejected, except below a `null` default, which accepts any value.
pub fn merge(base: &mut Value, patch: Value, path: &str) -> Result<(), CliError> {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                let here = format!("{path}/{k}");
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v, &here)?,
                    None => return Err(CliError::Config(format!("unknown config key '{here}'"))),
                }
            }
            Ok(())
        }
        (slot, v) => {
            *slot = v;
            Ok(())
        }
    }
}

/// Set `key` on an object value, failing if the default config has no such key.
pub fn set(base: &mut Value, key: &str, v: Value) -> Result<(), CliError> {
    let mut patch = Map::new();
    patch.insert(key.into(), v);
    merge(base, Value::Object(patch), "")
}

/// Place a seed where the experiment keeps it: at the top level, or on its
/// random family.
pub fn set_seed(base: &mut Value, seed: Value) -> Result<(), CliError> {
    let Value::Object(map) = base else {
        return Err(CliError::Config("config is not an object".into()));
    };
    if let Some(slot) = map.get_mut("seed") {
        *slot = seed;
        return Ok(());
    }
    match map.get_mut("family") {
        Some(Value::Object(fam)) => {
            fam.insert("seed".into(), seed);
            Ok(())
        }
        _ => Err(CliError::Config(
            "this experiment has no random family to seed".into(),
        )),
    }
}

/// `rho_min,rho_max,count`.
pub fn parse_grid(s: &str) -> Result<Value, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("--grid expects rho_min,rho_max,count, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(serde_json::json!({ "rho_min": lo, "rho_max": hi, "count": n }))
}

/// Exponent list entry: a number `>= 1` or `inf`.
pub fn parse_exponent(s: &str) -> Result<f64, CliError> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse()
            .map_err(|_| CliError::Config(format!("bad exponent '{t}'"))),
    }
}

/// JSON form of an exponent list, with `inf` spelled as a string.
pub fn exponents_value(ps: &[f64]) -> Value {
    Value::Array(
        ps.iter()
            .map(|p| {
                if p.is_infinite() {
                    Value::String("inf".into())
                } else {
                    serde_json::json!(p)
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn merge_rejects_unknown_keys() {
        let mut base = json!({"a": 1, "b": {"c": 2}, "d": null});
        merge(&mut base, json!({"b": {"c": 3}, "d": {"x": 1}}), "").unwrap();
        assert_eq!(base, json!({"a": 1, "b": {"c": 3}, "d": {"x": 1}}));
        assert!(merge(&mut base, json!({"b": {"zz": 0}}), "").is_err());
    }

    #[test]
    fn seed_goes_to_family_or_top() {
        let mut a = json!({"seed": 1});
        set_seed(&mut a, json!(7)).unwrap();
        assert_eq!(a, json!({"seed": 7}));
        let mut b = json!({"family": {"seed": 1, "count": 3}});
        set_seed(&mut b, json!(7)).unwrap();
        assert_eq!(b["family"]["seed"], json!(7));
        assert!(set_seed(&mut json!({"family": null}), json!(7)).is_err());
    }

    #[test]
    fn grid_and_exponents() {
        assert_eq!(
            parse_grid("0.01, 100, 64").unwrap(),
            json!({"rho_min": 0.01, "rho_max": 100.0, "count": 64})
        );
        assert!(parse_grid("1,2").is_err());
        assert_eq!(parse_exponent("inf").unwrap(), f64::INFINITY);
        assert_eq!(exponents_value(&[2.0, f64::INFINITY]), json!([2.0, "inf"]));
    }

    #[test]
    fn function_sources() {
        let f = load_function("fixture:indicator01", None).unwrap();
        assert_eq!(f.lp_norm(1.0).unwrap(), 1.0);
        let g = load_function(r#"{"breakpoints":[0,2],"values":[[0.5,0]]}"#, None).unwrap();
        assert_eq!(g.lp_norm(1.0).unwrap(), 1.0);
        assert!(load_function("random:3", None).is_err());
        let a = load_function("random:3", Some(5)).unwrap();
        assert_eq!(a, load_function("random:3", Some(5)).unwrap());
        assert!(load_function(r#"{"amplitude":[1,0],"rate":-1}"#, None).is_err());
    }
}
