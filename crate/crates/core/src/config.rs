//! Declarative run configuration (TOML).
//!
//! ```toml
//! schema_version = 1
//!
//! [units]
//! hbar = 1.0
//! mass = 0.5
//!
//! [potential]
//! kind = "catalog"          # catalog | expression | tabulated | frequency
//! name = "sech2"
//! params = { V_e = 0.1, L = 1.0 }
//!
//! [sweep]
//! e_min = 0.2
//! e_max = 4.0
//! count = 50
//! spacing = "linear"        # linear | log
//! families = []             # empty: every admissible family
//! format = "csv"            # csv | json
//!
//! [tolerances]
//! rtol = 1e-10
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{lookup, CatalogEntry, Params};
use crate::engine::{PhaseVariant, Tolerances};
use crate::error::{Result, ScatterError};
use crate::parametric::FrequencyProfile;
use crate::potentials::{DeltaSpike, Potential, Shape, DEFAULT_TAIL_TOLERANCE};
use crate::units::UnitsConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub units: UnitsSection,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "half")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl Default for UnitsSection {
    fn default() -> Self {
        UnitsSection { hbar: 1.0, mass: 0.5 }
    }
}

impl UnitsSection {
    pub fn units(&self) -> Result<UnitsConfig> {
        UnitsConfig::new(self.hbar, self.mass)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Catalog {
        name: String,
        #[serde(default)]
        params: Params,
        domain: Option<(f64, f64)>,
    },
    /// `V(x)` as an expression in `x`.
    Expression {
        expr: String,
        domain: (f64, f64),
        v_minus_inf: Option<f64>,
        v_plus_inf: Option<f64>,
        tail_tolerance: Option<f64>,
        #[serde(default)]
        spikes: Vec<DeltaSpike>,
    },
    /// `(x, V)` pairs inline or from a two-column CSV file.
    Tabulated {
        points: Option<Vec<(f64, f64)>>,
        file: Option<PathBuf>,
        tail_tolerance: Option<f64>,
        #[serde(default)]
        spikes: Vec<DeltaSpike>,
    },
    /// `omega(t)` as an expression in `t`.
    Frequency {
        omega: String,
        domain: (f64, f64),
        omega_minus_inf: Option<f64>,
        omega_plus_inf: Option<f64>,
        tail_tolerance: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(ScatterError::Config(format!("unknown spacing {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(ScatterError::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub count: usize,
    pub spacing: Spacing,
    /// Explicit energies; overrides the grid when present.
    pub energies: Option<Vec<f64>>,
    pub families: Vec<String>,
    pub format: OutputFormat,
    /// Phase for `compute`; the default picks constant-k when the asymptotes agree.
    pub phase: Option<PhaseVariant>,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            e_min: 0.5,
            e_max: 2.0,
            count: 4,
            spacing: Spacing::Linear,
            energies: None,
            families: Vec::new(),
            format: OutputFormat::Csv,
            phase: None,
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn energies(&self) -> Result<Vec<f64>> {
        if let Some(e) = &self.energies {
            if e.is_empty() || e.iter().any(|v| !v.is_finite()) {
                return Err(ScatterError::Config(
                    "energies must be a non-empty list of numbers".into(),
                ));
            }
            return Ok(e.clone());
        }
        energy_grid(self.e_min, self.e_max, self.count, self.spacing)
    }
}

/// `count` energies from `min` to `max` inclusive.
pub fn energy_grid(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(ScatterError::Config("count must be at least 1".into()));
    }
    if !(min.is_finite() && max.is_finite()) {
        return Err(ScatterError::Config("energy bounds must be finite".into()));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    if !(min < max) {
        return Err(ScatterError::Config(format!(
            "e_min ({min}) must be below e_max ({max})"
        )));
    }
    let n = (count - 1) as f64;
    match spacing {
        Spacing::Linear => Ok((0..count).map(|i| min + (max - min) * i as f64 / n).collect()),
        Spacing::Log => {
            if !(min > 0.0) {
                return Err(ScatterError::Config("log spacing needs e_min > 0".into()));
            }
            let r = (max / min).ln();
            Ok((0..count).map(|i| min * (r * i as f64 / n).exp()).collect())
        }
    }
}

/// What a potential section resolves to.
#[derive(Debug, Clone)]
pub enum Problem {
    Potential {
        potential: Potential,
        /// Set for catalog potentials, which carry an exact oracle.
        catalog: Option<(&'static CatalogEntry, Params)>,
    },
    Frequency(FrequencyProfile),
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path)
            .map_err(|e| ScatterError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Config::parse(&text)?;
        // relative table paths are resolved against the config file
        if let PotentialConfig::Tabulated { file: Some(f), .. } = &mut cfg.potential {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| ScatterError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ScatterError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn units(&self) -> Result<UnitsConfig> {
        self.units.units()
    }
}

impl PotentialConfig {
    pub fn build(&self) -> Result<Problem> {
        match self {
            PotentialConfig::Catalog { name, params, domain } => {
                let entry = lookup(name)?;
                let params = entry.resolve(params)?;
                let mut pot = entry.potential(&params)?;
                if let Some(d) = domain {
                    pot = pot.with_domain(*d)?;
                }
                Ok(Problem::Potential {
                    potential: pot.with_label(entry.name),
                    catalog: Some((entry, params)),
                })
            }
            PotentialConfig::Expression {
                expr,
                domain,
                v_minus_inf,
                v_plus_inf,
                tail_tolerance,
                spikes,
            } => {
                let shape = Shape::expression(expr, "x")?;
                let vm = v_minus_inf.unwrap_or_else(|| shape.value(domain.0));
                let vp = v_plus_inf.unwrap_or_else(|| shape.value(domain.1));
                let pot = Potential::new(
                    shape,
                    vm,
                    vp,
                    *domain,
                    tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE),
                    spikes.clone(),
                )?;
                Ok(Problem::Potential {
                    potential: pot.with_label("expression"),
                    catalog: None,
                })
            }
            PotentialConfig::Tabulated {
                points,
                file,
                tail_tolerance,
                spikes,
            } => {
                let pts = match (points, file) {
                    (Some(p), None) => p.clone(),
                    (None, Some(f)) => read_table(f)?,
                    _ => {
                        return Err(ScatterError::Config(
                            "tabulated potential needs exactly one of `points` and `file`".into(),
                        ))
                    }
                };
                let mut pot = Potential::tabulated(&pts, tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE))?;
                for s in spikes {
                    pot = pot.with_spike(*s)?;
                }
                Ok(Problem::Potential {
                    potential: pot,
                    catalog: None,
                })
            }
            PotentialConfig::Frequency {
                omega,
                domain,
                omega_minus_inf,
                omega_plus_inf,
                tail_tolerance,
            } => {
                let shape = Shape::expression(omega, "t")?;
                let wm = omega_minus_inf.unwrap_or_else(|| shape.value(domain.0));
                let wp = omega_plus_inf.unwrap_or_else(|| shape.value(domain.1));
                let p =
                    FrequencyProfile::new(shape, wm, wp, *domain, tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE))?;
                Ok(Problem::Frequency(p.with_label(omega.clone())))
            }
        }
    }
}

/// Two-column `x,V` CSV; a non-numeric first row is treated as a header.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| ScatterError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ScatterError::Config(format!("{}: {e}", path.display())))?;
        if rec.len() < 2 {
            return Err(ScatterError::Config(format!(
                "{}: row {} needs two columns",
                path.display(),
                i + 1
            )));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(v)) => out.push((x, v)),
            _ if i == 0 => continue,
            _ => {
                return Err(ScatterError::Config(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_config_roundtrip() {
        let cfg = Config::parse(
            r#"
schema_version = 1
[potential]
kind = "catalog"
name = "sech2"
params = { V_e = 0.2 }
[sweep]
e_min = 0.5
e_max = 1.5
count = 3
"#,
        )
        .unwrap();
        assert_eq!(cfg.sweep.energies().unwrap(), vec![0.5, 1.0, 1.5]);
        match cfg.potential.build().unwrap() {
            Problem::Potential { catalog, .. } => {
                let (entry, params) = catalog.unwrap();
                assert_eq!(entry.name, "sech2");
                assert_eq!(params["V_e"], 0.2);
                assert_eq!(params["L"], 1.0);
            }
            _ => panic!("expected a potential"),
        }
    }

    #[test]
    fn schema_version_is_checked() {
        let err = Config::parse("schema_version = 2\n[potential]\nkind = \"catalog\"\nname = \"delta\"\n").unwrap_err();
        assert_eq!(err.code(), "ConfigError");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(
            Config::parse("schema_version = 1\nbogus = 1\n[potential]\nkind = \"catalog\"\nname = \"delta\"\n")
                .is_err()
        );
    }

    #[test]
    fn expression_and_frequency() {
        let cfg = Config::parse(
            r#"
schema_version = 1
[potential]
kind = "expression"
expr = "0.3*sech(x)^2"
domain = [-20, 20]
spikes = [{ location = 0.5, strength = 0.1 }]
"#,
        )
        .unwrap();
        let Problem::Potential { potential, .. } = cfg.potential.build().unwrap() else {
            panic!()
        };
        assert!((potential.evaluate(0.0) - 0.3).abs() < 1e-15);
        assert_eq!(potential.spikes().len(), 1);

        let cfg = Config::parse(
            r#"
schema_version = 1
[potential]
kind = "frequency"
omega = "1 + 0.3*sech(t)^2"
domain = [-20, 20]
"#,
        )
        .unwrap();
        let Problem::Frequency(p) = cfg.potential.build().unwrap() else {
            panic!()
        };
        assert!((p.omega(0.0) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn grid_validation() {
        assert!(energy_grid(1.0, 1.0, 2, Spacing::Linear).is_err());
        assert!(energy_grid(0.0, 1.0, 2, Spacing::Log).is_err());
        assert!(energy_grid(0.0, 1.0, 0, Spacing::Linear).is_err());
        let g = energy_grid(0.1, 10.0, 3, Spacing::Log).unwrap();
        assert!((g[1] - 1.0).abs() < 1e-14);
    }
}
