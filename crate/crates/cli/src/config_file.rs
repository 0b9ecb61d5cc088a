//! Flat `key = value` scenario files (TOML syntax).
//!
//! Keys mirror the parameter-table symbols. Unspecified keys keep their
//! defaults. Decibel keys (`sigma2_B`, `rho0`, `P`, ...) have `_lin` twins
//! taking linear values; manifests use the twins so a rerun sees the exact
//! same numbers. Sub-tables such as `[run]` carry bookkeeping and are not
//! read back.

use airs_core::config::{db_to_linear, ScenarioConfig, Scheme, EVE_CORRELATED, EVE_UNCORRELATED, RHO0_STRONG_DB, RHO0_WEAK_DB};
use airs_core::{Error, Vec3};
use anyhow::{anyhow, bail, Context, Result};
use toml::{Table, Value};

fn field_err(key: &str, message: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(Error::Config {
        field: key.to_string(),
        message: message.to_string(),
    })
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => s.trim().parse().map_err(|_| field_err(key, format!("`{s}` is not a number"))),
        other => Err(field_err(key, format!("expected a number, got {other}"))),
    }
}

fn count(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(field_err(key, format!("expected a non-negative integer, got {other}"))),
    }
}

fn point(key: &str, v: &Value) -> Result<Vec3> {
    let Value::Array(items) = v else {
        return Err(field_err(key, format!("expected [x, y] or [x, y, z], got {v}")));
    };
    let c: Vec<f64> = items.iter().map(|x| number(key, x)).collect::<Result<_>>()?;
    match c.as_slice() {
        [x, y] => Ok(Vec3::new(*x, *y, 0.0)),
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(field_err(key, format!("expected 2 or 3 coordinates, got {}", c.len()))),
    }
}

fn text<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| field_err(key, format!("expected a string, got {v}")))
}

/// Applies one key to `cfg`.
pub fn apply_key(cfg: &mut ScenarioConfig, key: &str, v: &Value) -> Result<()> {
    match key {
        "M" => cfg.sensors = count(key, v)?,
        "omega_A" => cfg.omega_a = point(key, v)?,
        "omega_B" => cfg.omega_b = point(key, v)?,
        "omega_E" => cfg.omega_e = point(key, v)?,
        "eve" => {
            cfg.omega_e = match text(key, v)?.to_ascii_lowercase().as_str() {
                "uncorrelated" => EVE_UNCORRELATED,
                "correlated" => EVE_CORRELATED,
                other => return Err(field_err(key, format!("expected uncorrelated or correlated, got `{other}`"))),
            }
        }
        "omega_fixIRS" => cfg.omega_fixed = point(key, v)?,
        "q_o" => cfg.q_o = point(key, v)?,
        "H" => cfg.altitude = number(key, v)?,
        "T" => cfg.total_time = number(key, v)?,
        "Z" => cfg.speed = number(key, v)?,
        "alpha" => cfg.alpha = number(key, v)?,
        "f" => cfg.frequency = number(key, v)?,
        "K" => cfg.set_elements(count(key, v)?)?,
        "Kx" => cfg.kx = count(key, v)?,
        "Ky" => cfg.ky = count(key, v)?,
        "d" => cfg.spacing = number(key, v)?,
        "sigma2" => {
            let s = db_to_linear(number(key, v)?);
            cfg.sigma_b2 = s;
            cfg.sigma_e2 = s;
        }
        "sigma2_B" => cfg.sigma_b2 = db_to_linear(number(key, v)?),
        "sigma2_E" => cfg.sigma_e2 = db_to_linear(number(key, v)?),
        "sigma2_B_lin" => cfg.sigma_b2 = number(key, v)?,
        "sigma2_E_lin" => cfg.sigma_e2 = number(key, v)?,
        "rho0" => {
            cfg.rho0 = match v {
                Value::String(s) if s.eq_ignore_ascii_case("strong") => db_to_linear(RHO0_STRONG_DB),
                Value::String(s) if s.eq_ignore_ascii_case("weak") => db_to_linear(RHO0_WEAK_DB),
                _ => db_to_linear(number(key, v)?),
            }
        }
        "rho0_lin" => cfg.rho0 = number(key, v)?,
        "P" => cfg.power = db_to_linear(number(key, v)?),
        "P_lin" => cfg.power = number(key, v)?,
        "r" => cfg.radius = number(key, v)?,
        "scheme" => {
            cfg.scheme = match v {
                Value::Integer(i) => i.to_string().parse::<Scheme>()?,
                _ => text(key, v)?.parse::<Scheme>()?,
            }
        }
        "seed" => {
            cfg.seed = match v {
                Value::Integer(i) if *i >= 0 => *i as u64,
                Value::String(s) => s.parse().map_err(|_| field_err(key, format!("`{s}` is not a seed")))?,
                other => return Err(field_err(key, format!("expected a non-negative integer, got {other}"))),
            }
        }
        "trials" => cfg.trials = count(key, v)?,
        "shared_fading" => {
            cfg.shared_fading = v
                .as_bool()
                .ok_or_else(|| field_err(key, format!("expected true or false, got {v}")))?
        }
        other => bail!(field_err(other, "unknown key")),
    }
    Ok(())
}

/// Parses a scenario file body on top of the defaults.
pub fn parse_config(body: &str) -> Result<ScenarioConfig> {
    let table: Table = body.parse().context("malformed scenario file")?;
    let mut cfg = ScenarioConfig::default();
    for (key, value) in &table {
        if value.is_table() {
            continue;
        }
        apply_key(&mut cfg, key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn vec_value(v: Vec3) -> Value {
    Value::Array(vec![Value::Float(v.x), Value::Float(v.y), Value::Float(v.z)])
}

/// Every field of `cfg` as linear-valued keys.
pub fn config_table(cfg: &ScenarioConfig) -> Table {
    let mut t = Table::new();
    let mut put = |k: &str, v: Value| {
        t.insert(k.to_string(), v);
    };
    put("M", Value::Integer(cfg.sensors as i64));
    put("omega_A", vec_value(cfg.omega_a));
    put("omega_B", vec_value(cfg.omega_b));
    put("omega_E", vec_value(cfg.omega_e));
    put("omega_fixIRS", vec_value(cfg.omega_fixed));
    put("q_o", vec_value(cfg.q_o));
    put("H", Value::Float(cfg.altitude));
    put("T", Value::Float(cfg.total_time));
    put("Z", Value::Float(cfg.speed));
    put("alpha", Value::Float(cfg.alpha));
    put("f", Value::Float(cfg.frequency));
    put("Kx", Value::Integer(cfg.kx as i64));
    put("Ky", Value::Integer(cfg.ky as i64));
    put("d", Value::Float(cfg.spacing));
    put("sigma2_B_lin", Value::Float(cfg.sigma_b2));
    put("sigma2_E_lin", Value::Float(cfg.sigma_e2));
    put("rho0_lin", Value::Float(cfg.rho0));
    put("P_lin", Value::Float(cfg.power));
    put("r", Value::Float(cfg.radius));
    put("scheme", Value::String(cfg.scheme.label().to_string()));
    put("seed", Value::String(cfg.seed.to_string()));
    put("trials", Value::Integer(cfg.trials as i64));
    put("shared_fading", Value::Boolean(cfg.shared_fading));
    t
}
