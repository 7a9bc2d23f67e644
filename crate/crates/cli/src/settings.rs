//! Command settings: flat JSON config files merged with command-line flags,
//! plus parsers for the compact value syntaxes used by both.

use std::fs;
use std::path::{Path, PathBuf};

use dupnet_core::estimators::ResampleScheme;
use dupnet_core::exact::uniform_grid;
use dupnet_core::pmcmc::{ComponentPrior, Driving, PriorSpec};
use dupnet_core::{Component, Theta};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DUPNET_OUT_DIR";

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Reads a config file: a flat JSON object, or a manifest whose `config`
/// member is one.
pub fn read_config_file(path: &Path) -> CliResult<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))?;
    let mut object = match value {
        Value::Object(map) => map,
        _ => return Err(usage(format!("{}: config must be a JSON object", path.display()))),
    };
    if let Some(Value::Object(inner)) = object.remove("config") {
        object = inner;
    }
    Ok(object)
}

/// Overlays the flags that were given (non-null) onto the file values.
/// Keys the settings type does not know are rejected.
pub fn merge<T: Serialize + DeserializeOwned + Default>(file: Option<Map<String, Value>>, flags: &T) -> CliResult<T> {
    let mut merged = file.unwrap_or_default();
    if let Value::Object(known) = serde_json::to_value(T::default()).expect("settings serialize") {
        if let Some(key) = merged.keys().find(|k| !known.contains_key(*k)) {
            return Err(usage(format!("config: unknown setting `{key}`")));
        }
    }
    match serde_json::to_value(flags).expect("settings serialize") {
        Value::Object(map) => {
            for (k, v) in map {
                if !v.is_null() {
                    merged.insert(k, v);
                }
            }
        }
        _ => unreachable!("settings are structs"),
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("config: {e}")))
}

/// Output directory: flag or config value, then the environment, then `.`.
pub fn out_dir(configured: Option<&PathBuf>) -> PathBuf {
    configured
        .cloned()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// `pi,p,q,r`.
pub fn parse_theta(text: &str) -> CliResult<Theta> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            usage(format!(
                "parameter vector `{text}` must be four comma-separated numbers"
            ))
        })?;
    if values.len() != 4 {
        return Err(usage(format!("parameter vector `{text}` must have four components")));
    }
    Ok(Theta::new(values[0], values[1], values[2], values[3])?)
}

pub fn format_theta(t: &Theta) -> String {
    let v = t.values();
    format!("{},{},{},{}", v[0], v[1], v[2], v[3])
}

pub fn parse_component(text: &str) -> CliResult<Component> {
    Component::from_name(text.trim()).ok_or_else(|| usage(format!("unknown component `{text}` (pi, p, q or r)")))
}

/// Comma-separated components, e.g. `p` or `p,q`.
pub fn parse_components(text: &str) -> CliResult<Vec<Component>> {
    let out: Vec<Component> = text.split(',').map(parse_component).collect::<CliResult<_>>()?;
    let mut seen = out.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != out.len() {
        return Err(usage(format!("component list `{text}` repeats a component")));
    }
    Ok(out)
}

/// `lo:hi:points` or a comma-separated list of values.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || {
        usage(format!(
            "grid `{text}` must be `lo:hi:points` or a comma-separated list"
        ))
    };
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        uniform_grid(lo, hi, points)
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?
    };
    if grid.is_empty() {
        return Err(usage("grid is empty"));
    }
    if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(usage(format!("grid `{text}` leaves [0, 1]")));
    }
    Ok(grid)
}

/// `lo..hi` (inclusive) or a comma-separated list.
pub fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("sizes `{text}` must be `lo..hi` or a comma-separated list"));
    let sizes: Vec<usize> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(usage(format!("sizes `{text}` must be nonempty and positive")));
    }
    Ok(sizes)
}

/// `uniform` or `beta:a,b`.
pub fn parse_component_prior(text: &str) -> CliResult<ComponentPrior> {
    let text = text.trim();
    if text == "uniform" {
        return Ok(ComponentPrior::Uniform01);
    }
    if let Some(shapes) = text.strip_prefix("beta:") {
        if let Some((a, b)) = shapes.split_once(',') {
            if let (Ok(a), Ok(b)) = (a.trim().parse(), b.trim().parse()) {
                return Ok(ComponentPrior::Beta { a, b });
            }
        }
    }
    Err(usage(format!("prior `{text}` must be `uniform` or `beta:a,b`")))
}

/// Prior with `free` components drawn from `prior` and the rest fixed at
/// `base`.
pub fn build_prior(base: &Theta, free: &[Component], prior: &str) -> CliResult<PriorSpec> {
    let p = parse_component_prior(prior)?;
    let components = Component::ALL.map(|c| {
        if free.contains(&c) {
            p
        } else {
            ComponentPrior::Fixed(base.get(c))
        }
    });
    Ok(PriorSpec::new(components)?)
}

/// `uniform`, `target`, or a parameter vector.
pub fn parse_driving(text: &str) -> CliResult<Driving> {
    match text.trim() {
        "uniform" => Ok(Driving::Uniform),
        "target" => Ok(Driving::Target),
        other => Ok(Driving::Fixed(parse_theta(other)?)),
    }
}

pub fn parse_scheme(text: &str) -> CliResult<ResampleScheme> {
    match text.trim() {
        "stratified" => Ok(ResampleScheme::Stratified),
        "multinomial" => Ok(ResampleScheme::Multinomial),
        other => Err(usage(format!(
            "resampling scheme `{other}` must be stratified or multinomial"
        ))),
    }
}

/// Estimation method names accepted by `likelihood` and `pmcmc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodName {
    Exact,
    Is,
    Smc,
    Dpf,
    Combo,
}

pub fn parse_method(text: &str) -> CliResult<MethodName> {
    Ok(match text.trim() {
        "exact" => MethodName::Exact,
        "is" => MethodName::Is,
        "smc" => MethodName::Smc,
        "dpf" => MethodName::Dpf,
        "combo" => MethodName::Combo,
        other => return Err(usage(format!("method `{other}` must be exact, is, smc, dpf or combo"))),
    })
}
