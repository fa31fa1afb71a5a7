//! JSON scenario files.
//!
//! ```json
//! { "n_nodes": 5, "snr_db": 3.0, "blocklength": 1000, "theta": 0.01,
//!   "target_eps": 1e-3, "priorities": [1.0, 4.0] }
//! ```
//!
//! Exactly one of `snr_db` and `snr_linear` must be given. `priorities` may
//! also be written as `{"eta_alpha": 1, "eta_theta": 4}`.

use std::path::Path;

use fblec::{NetworkConfig, Priorities, UrConstraint};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

const KNOWN_KEYS: [&str; 7] = [
    "n_nodes",
    "snr_db",
    "snr_linear",
    "blocklength",
    "theta",
    "target_eps",
    "priorities",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub network: NetworkConfig,
    /// SNR as written in the file when it was given in dB.
    pub snr_db: Option<f64>,
    pub constraint: Option<UrConstraint>,
    pub priorities: Option<Priorities>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            context: format!("reading {}", path.display()),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| CliError::config("<document>", format!("invalid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(CliError::config("<document>", "expected a JSON object"));
        };
        if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::config(k.as_str(), "unknown key"));
        }

        let n_nodes = positive_u32(&map, "n_nodes")?;
        let blocklength = positive_u32(&map, "blocklength")?;
        let theta = number(&map, "theta")?;
        if !(theta > 0.0) {
            return Err(CliError::config("theta", format!("must be positive, got {theta}")));
        }
        let (snr, snr_db) = match (map.get("snr_db"), map.get("snr_linear")) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("snr_db", "give either snr_db or snr_linear, not both"))
            }
            (None, None) => return Err(CliError::config("snr_linear", "missing (or give snr_db)")),
            (Some(_), None) => {
                let db = number(&map, "snr_db")?;
                (10f64.powf(db / 10.0), Some(db))
            }
            (None, Some(_)) => {
                let lin = number(&map, "snr_linear")?;
                if !(lin > 0.0) {
                    return Err(CliError::config("snr_linear", format!("must be positive, got {lin}")));
                }
                (lin, None)
            }
        };
        let network = NetworkConfig::new(n_nodes, snr, blocklength, theta)
            .map_err(|e| CliError::config("<scenario>", e.to_string()))?;

        let constraint = match map.get("target_eps") {
            None | Some(Value::Null) => None,
            Some(_) => Some(parse_target(number(&map, "target_eps")?, "target_eps")?),
        };
        let priorities = match map.get("priorities") {
            None | Some(Value::Null) => None,
            Some(v) => Some(parse_priorities_value(v)?),
        };
        Ok(Self {
            network,
            snr_db,
            constraint,
            priorities,
        })
    }

    /// `(key, value)` pairs echoing the scenario, SNR in linear form.
    pub fn describe(&self) -> Vec<(String, String)> {
        let n = &self.network;
        let mut out = vec![
            ("n_nodes".to_string(), n.n_nodes.to_string()),
            ("snr_linear".to_string(), n.snr.to_string()),
            ("blocklength".to_string(), n.blocklength.to_string()),
            ("theta".to_string(), n.delay_exponent.to_string()),
        ];
        if let Some(db) = self.snr_db {
            out.push(("snr_db".into(), db.to_string()));
        }
        if let Some(c) = self.constraint {
            out.push(("target_eps".into(), c.target_eps.to_string()));
        }
        if let Some(p) = self.priorities {
            out.push(("priorities".into(), format!("{},{}", p.eta_alpha, p.eta_theta)));
        }
        out
    }
}

fn number(map: &Map<String, Value>, key: &str) -> Result<f64> {
    match map.get(key) {
        None => Err(CliError::config(key, "missing")),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::config(key, format!("expected a finite number, got {v}"))),
    }
}

fn positive_u32(map: &Map<String, Value>, key: &str) -> Result<u32> {
    let v = map.get(key).ok_or_else(|| CliError::config(key, "missing"))?;
    v.as_u64()
        .filter(|&x| x >= 1)
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| CliError::config(key, format!("expected a positive integer, got {v}")))
}

pub fn parse_target(p: f64, field: &str) -> Result<UrConstraint> {
    UrConstraint::new(p).map_err(|_| CliError::config(field, format!("must lie in (0, 1), got {p}")))
}

fn parse_priorities_value(v: &Value) -> Result<Priorities> {
    let pair = match v {
        Value::Array(xs) if xs.len() == 2 => (xs[0].as_f64(), xs[1].as_f64()),
        Value::Object(m) => (
            m.get("eta_alpha").and_then(Value::as_f64),
            m.get("eta_theta").and_then(Value::as_f64),
        ),
        _ => (None, None),
    };
    match pair {
        (Some(a), Some(t)) => make_priorities(a, t, "priorities"),
        _ => Err(CliError::config(
            "priorities",
            format!("expected [eta_alpha, eta_theta] or an object with both keys, got {v}"),
        )),
    }
}

fn make_priorities(a: f64, t: f64, field: &str) -> Result<Priorities> {
    Priorities::new(a, t)
        .map_err(|_| CliError::config(field, format!("weights must be non-negative, got {a},{t}")))
}

/// Parses the `ηα,ηθ` form of the command-line flag.
pub fn parse_priorities_flag(s: &str) -> Result<Priorities> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::config("--priorities", format!("expected two numbers `a,b`, got `{s}`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let t: f64 = parts[1].parse().map_err(|_| bad())?;
    make_priorities(a, t, "--priorities")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(err: CliError) -> String {
        match err {
            CliError::Config { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimal_linear() {
        let s = Scenario::parse(r#"{"n_nodes":5,"snr_linear":2,"blocklength":1000,"theta":0.01}"#)
            .unwrap();
        assert_eq!(s.network.n_nodes, 5);
        assert_eq!(s.network.snr, 2.0);
        assert!(s.constraint.is_none() && s.priorities.is_none() && s.snr_db.is_none());
    }

    #[test]
    fn decibels_and_extras() {
        let s = Scenario::parse(
            r#"{"n_nodes":30,"snr_db":10,"blocklength":1000,"theta":0.01,
                "target_eps":1e-3,"priorities":{"eta_alpha":1,"eta_theta":4}}"#,
        )
        .unwrap();
        assert!((s.network.snr - 10.0).abs() < 1e-12);
        assert_eq!(s.constraint.unwrap().target_eps, 1e-3);
        assert_eq!(s.priorities.unwrap().eta_theta, 4.0);
        let echoed: Vec<_> = s.describe().into_iter().map(|(k, _)| k).collect();
        assert!(echoed.contains(&"snr_linear".to_string()));
        assert!(echoed.contains(&"snr_db".to_string()));
    }

    #[test]
    fn bad_fields_are_named() {
        let cases = [
            (r#"{"snr_linear":2,"blocklength":1000,"theta":0.01}"#, "n_nodes"),
            (r#"{"n_nodes":0,"snr_linear":2,"blocklength":1000,"theta":0.01}"#, "n_nodes"),
            (r#"{"n_nodes":2.5,"snr_linear":2,"blocklength":1000,"theta":0.01}"#, "n_nodes"),
            (r#"{"n_nodes":2,"snr_linear":"x","blocklength":1000,"theta":0.01}"#, "snr_linear"),
            (r#"{"n_nodes":2,"snr_linear":2,"snr_db":3,"blocklength":1000,"theta":0.01}"#, "snr_db"),
            (r#"{"n_nodes":2,"snr_linear":2,"blocklength":-1,"theta":0.01}"#, "blocklength"),
            (r#"{"n_nodes":2,"snr_linear":2,"blocklength":100,"theta":0}"#, "theta"),
            (r#"{"n_nodes":2,"snr_linear":2,"blocklength":100,"theta":0.1,"target_eps":1}"#, "target_eps"),
            (r#"{"n_nodes":2,"snr_linear":2,"blocklength":100,"theta":0.1,"priorities":[1]}"#, "priorities"),
            (r#"{"n_nodes":2,"snr_linear":2,"blocklength":100,"theta":0.1,"rho":1}"#, "rho"),
            (r#"[1,2]"#, "<document>"),
            (r#"{"n_nodes":2,"#, "<document>"),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(Scenario::parse(text).unwrap_err()), field, "{text}");
        }
    }

    #[test]
    fn priorities_flag() {
        let p = parse_priorities_flag("1, 4").unwrap();
        assert_eq!((p.eta_alpha, p.eta_theta), (1.0, 4.0));
        assert!(parse_priorities_flag("1").is_err());
        assert!(parse_priorities_flag("1,-2").is_err());
        assert!(parse_priorities_flag("a,b").is_err());
    }
}
