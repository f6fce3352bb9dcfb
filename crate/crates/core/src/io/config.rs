//! Run configuration: flat key=value files merged with command-line flags,
//! the model and initial-data mini-languages, and output paths.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{NlkgError, Result};
use crate::exponents::{parse_rational, Rational};
use crate::field::{NonlinearityModel, PowerTerm, ScalingPair};

/// Environment variable that sets the output directory.
pub const OUT_DIR_ENV: &str = "NLKG_OUT_DIR";

/// Parse `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; a key may appear once.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(NlkgError::Parse(format!("line {}: expected key=value, got {line:?}", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(NlkgError::Parse(format!("line {}: empty key", i + 1)));
        }
        if out.iter().any(|(x, _)| x == k) {
            return Err(NlkgError::Parse(format!("line {}: duplicate key {k:?}", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Validated parameters of one subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    /// Merge a config file (if any) with flags; flags win. Keys outside
    /// `schema` are rejected from either source.
    pub fn resolve(schema: &[&str], flags: &[(String, String)], config: Option<&Path>) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|e| NlkgError::Io(format!("{}: {e}", path.display())))?;
            let pairs = parse_key_values(&text).map_err(|e| NlkgError::Parse(format!("{}: {e}", path.display())))?;
            for (k, v) in pairs {
                values.insert(k, v);
            }
        }
        for (k, v) in flags {
            values.insert(k.clone(), v.clone());
        }
        if let Some(k) = values.keys().find(|k| !schema.contains(&k.as_str())) {
            return Err(NlkgError::Parse(format!("unknown key {k:?}; accepted: {}", schema.join(", "))));
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| NlkgError::Parse(format!("missing required key {key:?}")))
    }

    fn parse_with<T>(&self, key: &str, f: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => f(s).map(Some).ok_or_else(|| NlkgError::Parse(format!("{key}: cannot parse {s:?}"))),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, |s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parse_with(key, |s| s.trim().parse::<usize>().ok())?.unwrap_or(default))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.parse_with(key, |s| s.trim().parse::<u64>().ok())?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        Ok(self
            .parse_with(key, |s| match s.trim() {
                "true" | "1" | "yes" => Some(true),
                "false" | "0" | "no" => Some(false),
                _ => None,
            })?
            .unwrap_or(default))
    }

    pub fn rational(&self, key: &str) -> Result<Rational> {
        parse_rational(self.require(key)?).map_err(|e| NlkgError::Parse(format!("{key}: {e}")))
    }

    /// Comma-separated floats.
    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.parse_with(key, |s| parse_f64_list(s).ok())
    }
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| NlkgError::Parse(format!("not a number: {x:?}")))
        })
        .collect()
}

/// "a,b" as a scaling pair.
pub fn parse_pair(s: &str) -> Result<ScalingPair> {
    match parse_f64_list(s)?.as_slice() {
        [a, b] => Ok(ScalingPair::new(*a, *b)),
        _ => Err(NlkgError::Parse(format!("expected alpha,beta, got {s:?}"))),
    }
}

/// Parse a model string for dimension d:
///
/// * `power:q`: f = |u|^q;
/// * `powersum:q1,l1;q2,l2`: f = Σ l_k |u|^{q_k};
/// * `critical`: f = |u|^{2^*}/2^*;
/// * `exp:p,k0,g`: f = |u|^p e^{k0 u² + g|u|} (d = 2).
///
/// The model is validated for d.
pub fn parse_model(s: &str, d: usize) -> Result<NonlinearityModel> {
    let bad = || NlkgError::Parse(format!("unknown model {s:?}; use power:q, powersum:q1,l1;q2,l2, critical or exp:p,k0,g"));
    let (name, args) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
    let model = match name {
        "power" => {
            let q: f64 = args.trim().parse().map_err(|_| bad())?;
            NonlinearityModel::power(q)
        }
        "powersum" => {
            let terms = args
                .split(';')
                .map(|t| match parse_f64_list(t)?.as_slice() {
                    [q, lambda] => Ok(PowerTerm { lambda: *lambda, q: *q }),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>>>()?;
            NonlinearityModel::PowerSum { terms }
        }
        "critical" if args.is_empty() => NonlinearityModel::CriticalPower { d },
        "exp" => match parse_f64_list(args)?.as_slice() {
            [p, k0, g] => NonlinearityModel::Exponential2D { lambda: 1.0, p: *p, kappa0: *k0, gamma: *g },
            _ => return Err(bad()),
        },
        _ => return Err(bad()),
    };
    model.validate(d)?;
    Ok(model)
}

/// Where initial data come from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// (cQ, 0) with Q the ground state of the model.
    ScaledGroundState(f64),
    /// (a e^{-r²/w²}, b a e^{-r²/w²}).
    Gaussian { a: f64, w: f64, b: f64 },
    /// A snapshot file.
    Snapshot(PathBuf),
}

/// `scaled-groundstate:c`, `gaussian:a,w[,b]` or a snapshot path
/// (`snapshot:path` or any other string).
pub fn parse_init(s: &str) -> Result<InitSpec> {
    let s = s.trim();
    if let Some(c) = s.strip_prefix("scaled-groundstate:") {
        let c: f64 = c.trim().parse().map_err(|_| NlkgError::Parse(format!("bad scale in {s:?}")))?;
        return Ok(InitSpec::ScaledGroundState(c));
    }
    if let Some(args) = s.strip_prefix("gaussian:") {
        return match parse_f64_list(args)?.as_slice() {
            [a, w] => Ok(InitSpec::Gaussian { a: *a, w: *w, b: 0.0 }),
            [a, w, b] => Ok(InitSpec::Gaussian { a: *a, w: *w, b: *b }),
            _ => Err(NlkgError::Parse(format!("expected gaussian:a,w[,b], got {s:?}"))),
        };
    }
    if s.is_empty() {
        return Err(NlkgError::Parse("empty initial-data specification".into()));
    }
    Ok(InitSpec::Snapshot(PathBuf::from(s.strip_prefix("snapshot:").unwrap_or(s))))
}

/// Output directory: an explicit choice wins, then [`OUT_DIR_ENV`], then
/// the working directory.
pub fn output_dir(explicit: Option<&str>) -> PathBuf {
    explicit
        .map(PathBuf::from)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolve a relative output path against `dir`, creating the directory.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf> {
    let p = Path::new(name);
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    std::fs::create_dir_all(dir).map_err(|e| NlkgError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir.join(p))
}
