//! Plain-text configuration parsing.
//!
//! Configs are key=value lines with optional `[section]` headers and `#`
//! comments. Distribution and potential specs may reference two-column CSV
//! tables; grid specs are inline comma-separated key=value strings.

use crate::distributions::MomentumDistribution;
use crate::error::{Error, Result};
use crate::stability::InteractionPotential;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Parse key=value text; section headers prefix keys as `section.key`.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].trim().to_string();
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected key=value, got '{line}'",
                lineno + 1
            )));
        };
        let key = if section.is_empty() {
            k.trim().to_string()
        } else {
            format!("{section}.{}", k.trim())
        };
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Parse an inline comma-separated key=value grid spec.
pub fn parse_inline_spec(spec: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((k, v)) = part.split_once('=') else {
            return Err(Error::Config(format!(
                "grid spec: expected key=value, got '{part}'"
            )));
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn require_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let v = map
        .get(key)
        .ok_or_else(|| Error::Config(format!("missing field '{key}'")))?;
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("field '{key}': cannot parse '{v}' as a number")))
}

pub fn require_usize(map: &BTreeMap<String, String>, key: &str) -> Result<usize> {
    let v = map
        .get(key)
        .ok_or_else(|| Error::Config(format!("missing field '{key}'")))?;
    v.parse::<usize>()
        .map_err(|_| Error::Config(format!("field '{key}': cannot parse '{v}' as an integer")))
}

pub fn optional_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Config(format!("field '{key}': cannot parse '{v}' as a number"))),
    }
}

pub fn optional_usize(map: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse::<usize>().map_err(|_| {
            Error::Config(format!("field '{key}': cannot parse '{v}' as an integer"))
        }),
    }
}

/// Read a two-column numeric CSV; `#` comments and a non-numeric header row
/// are skipped.
pub fn read_two_column_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read table {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let a = cols.next().map(str::trim);
        let b = cols.next().map(str::trim);
        match (a.and_then(|s| s.parse::<f64>().ok()), b.and_then(|s| s.parse::<f64>().ok())) {
            (Some(x), Some(y)) => rows.push((x, y)),
            _ if rows.is_empty() => continue, // header
            _ => {
                return Err(Error::Config(format!(
                    "table {}: malformed row '{line}'",
                    path.display()
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Config(format!(
            "table {} holds no numeric rows",
            path.display()
        )));
    }
    Ok(rows)
}

/// Build a momentum distribution from config text.
///
/// Keys: `family` (fermi_zero_t | fermi_dirac | bose_einstein | boltzmann |
/// tabulated), `mu`, `temperature`, `dimension`, `table_path` (two-column
/// CSV r, f(r), strictly increasing in r) relative to `base_dir`.
pub fn dist_from_config(text: &str, base_dir: &Path) -> Result<MomentumDistribution> {
    let map = parse_key_values(text)?;
    let family = map
        .get("family")
        .ok_or_else(|| Error::Config("missing field 'family'".into()))?;
    let dimension = require_usize(&map, "dimension")?;
    match family.as_str() {
        "fermi_zero_t" => MomentumDistribution::fermi_zero_t(require_f64(&map, "mu")?, dimension),
        "fermi_dirac" => MomentumDistribution::fermi_dirac(
            require_f64(&map, "temperature")?,
            require_f64(&map, "mu")?,
            dimension,
        ),
        "bose_einstein" => MomentumDistribution::bose_einstein(
            require_f64(&map, "temperature")?,
            require_f64(&map, "mu")?,
            dimension,
        ),
        "boltzmann" => MomentumDistribution::boltzmann(
            require_f64(&map, "temperature")?,
            require_f64(&map, "mu")?,
            dimension,
        ),
        "tabulated" => {
            let rel = map
                .get("table_path")
                .ok_or_else(|| Error::Config("missing field 'table_path'".into()))?;
            let rows = read_two_column_csv(&resolve(base_dir, rel))?;
            MomentumDistribution::tabulated(rows, dimension)
        }
        other => Err(Error::Config(format!("unknown distribution family '{other}'"))),
    }
}

/// Build an interaction potential from config text.
///
/// Keys: `family` (gaussian | tabulated_radial_fourier), `amplitude`,
/// `width`, `dimension`, `table_path` (two-column CSV k, w_hat(k)),
/// optional `w_l1`.
pub fn pot_from_config(text: &str, base_dir: &Path) -> Result<InteractionPotential> {
    let map = parse_key_values(text)?;
    let family = map
        .get("family")
        .ok_or_else(|| Error::Config("missing field 'family'".into()))?;
    let dimension = require_usize(&map, "dimension")?;
    match family.as_str() {
        "gaussian" => InteractionPotential::gaussian(
            require_f64(&map, "amplitude")?,
            require_f64(&map, "width")?,
            dimension,
        ),
        "zero" => Ok(InteractionPotential::zero(dimension)),
        "tabulated_radial_fourier" => {
            let rel = map
                .get("table_path")
                .ok_or_else(|| Error::Config("missing field 'table_path'".into()))?;
            let rows = read_two_column_csv(&resolve(base_dir, rel))?;
            InteractionPotential::tabulated(rows, dimension, optional_f64(&map, "w_l1")?)
        }
        other => Err(Error::Config(format!("unknown potential family '{other}'"))),
    }
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
