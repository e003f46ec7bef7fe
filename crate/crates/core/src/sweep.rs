//! Energy sweeps: parallel evaluation, fixed-column rows, CSV/JSON output.
//!
//! Rows are produced by a worker pool but always returned and written in
//! input order, so output is identical for any worker count.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::approximations::{above_barrier_beta, born_beta, distorted_born_beta};
use crate::bounds::{admissible_reports_with, BoundFamily, BoundOptions, BoundReport, Dominance};
use crate::catalog::{CatalogEntry, Params};
use crate::config::OutputFormat;
use crate::engine::{default_variant, fmt_num, integrate, PhaseVariant, ScatteringResult, Tolerances};
use crate::error::{Result, ScatterError};
use crate::potentials::Potential;
use crate::units::UnitsConfig;

/// Margin within which a bound counts as saturated.
pub const SATURATION_TOL: f64 = 1e-6;

/// Maps `f` over `items` on `workers` threads (all cores when `None`),
/// keeping input order.
pub fn parallel_map<I, T, F>(items: &[I], workers: Option<usize>, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    let run = || items.par_iter().map(&f).collect();
    match workers {
        Some(n) if n >= 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        _ => run(),
    }
}

/// First error in input order, or all values.
pub fn collect_ordered<T>(rows: Vec<Result<T>>) -> Result<Vec<T>> {
    rows.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Missing => Value::Null,
        }
    }
}

/// A row type with fixed, documented columns.
pub trait TableRow {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

// keeps the io kind so callers can tell a closed pipe apart
fn csv_io(e: csv::Error) -> std::io::Error {
    let kind = match e.kind() {
        csv::ErrorKind::Io(io) => io.kind(),
        _ => std::io::ErrorKind::Other,
    };
    std::io::Error::new(kind, e)
}

pub fn write_table<R: TableRow, W: Write>(rows: &[R], format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(R::header()).map_err(csv_io)?;
            for r in rows {
                w.write_record(r.cells().iter().map(Cell::csv)).map_err(csv_io)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    for (k, c) in R::header().iter().zip(r.cells()) {
                        m.insert((*k).to_string(), c.json());
                    }
                    Value::Object(m)
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &arr)?;
            writeln!(out)
        }
    }
}

/// `energy,abs_alpha,abs_beta,transmission,reflection,conservation_residual,phase_variant`
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeRow {
    pub energy: f64,
    pub abs_alpha: f64,
    pub abs_beta: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub conservation_residual: f64,
    pub phase_variant: PhaseVariant,
}

impl From<&ScatteringResult> for ComputeRow {
    fn from(r: &ScatteringResult) -> Self {
        ComputeRow {
            energy: r.energy,
            abs_alpha: r.alpha.norm(),
            abs_beta: r.beta.norm(),
            transmission: r.transmission,
            reflection: r.reflection,
            conservation_residual: r.conservation_residual,
            phase_variant: r.phase_variant,
        }
    }
}

impl TableRow for ComputeRow {
    fn header() -> &'static [&'static str] {
        &[
            "energy",
            "abs_alpha",
            "abs_beta",
            "transmission",
            "reflection",
            "conservation_residual",
            "phase_variant",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.energy),
            Cell::Num(self.abs_alpha),
            Cell::Num(self.abs_beta),
            Cell::Num(self.transmission),
            Cell::Num(self.reflection),
            Cell::Num(self.conservation_residual),
            Cell::Text(self.phase_variant.to_string()),
        ]
    }
}

pub fn compute_rows(
    pot: &Potential,
    units: &UnitsConfig,
    energies: &[f64],
    variant: Option<PhaseVariant>,
    tol: &Tolerances,
    workers: Option<usize>,
) -> Result<Vec<ComputeRow>> {
    let v = variant.unwrap_or_else(|| default_variant(pot));
    let rows = parallel_map(energies, workers, |&e| {
        integrate(pot, units, e, v, tol).map(|r| ComputeRow::from(&r))
    });
    collect_ordered(rows)
}

/// One bound family at one energy, joined with the numerical result.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub energy: f64,
    pub report: BoundReport,
    pub t_numeric: f64,
    pub r_numeric: f64,
    pub abs_alpha: f64,
    pub abs_beta: f64,
    /// `T_numeric - T_floor`.
    pub margin: f64,
    pub dominated: bool,
    pub saturated: bool,
}

impl TableRow for BoundsRow {
    fn header() -> &'static [&'static str] {
        &[
            "energy",
            "family",
            "phase_variant",
            "theta",
            "t_floor",
            "r_cap",
            "alpha_cap",
            "beta_cap",
            "t_numeric",
            "r_numeric",
            "abs_alpha",
            "abs_beta",
            "margin",
            "dominated",
            "saturated",
            "validity",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        let r = &self.report;
        let cap = |v: f64| if v.is_finite() { Cell::Num(v) } else { Cell::Missing };
        vec![
            Cell::Num(self.energy),
            Cell::Text(r.family.to_string()),
            r.phase_variant
                .map(|v| Cell::Text(v.to_string()))
                .unwrap_or(Cell::Missing),
            Cell::Num(r.theta_integral),
            Cell::Num(r.t_floor),
            Cell::Num(r.r_cap),
            cap(r.alpha_cap),
            cap(r.beta_cap),
            Cell::Num(self.t_numeric),
            Cell::Num(self.r_numeric),
            Cell::Num(self.abs_alpha),
            Cell::Num(self.abs_beta),
            Cell::Num(self.margin),
            Cell::Bool(self.dominated),
            Cell::Bool(self.saturated),
            Cell::Text(r.validity.to_string()),
        ]
    }
}

/// Joins every report at `E` with one numerical solution.
pub fn bounds_at(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    families: &[BoundFamily],
    tol: &Tolerances,
    opts: &BoundOptions,
    slack: f64,
) -> Result<Vec<BoundsRow>> {
    let res = integrate(pot, units, energy, default_variant(pot), tol)?;
    let reports = admissible_reports_with(pot, units, energy, opts)?;
    for f in families {
        if !reports.iter().any(|r| r.family == *f) {
            return Err(ScatterError::Inadmissible(format!(
                "bound family {f} does not apply at E = {energy}"
            )));
        }
    }
    Ok(reports
        .into_iter()
        .filter(|r| families.is_empty() || families.contains(&r.family))
        .map(|report| {
            let d = Dominance::of(&report, &res);
            BoundsRow {
                energy,
                report,
                t_numeric: res.transmission,
                r_numeric: res.reflection,
                abs_alpha: res.alpha.norm(),
                abs_beta: res.beta.norm(),
                margin: d.t_margin,
                dominated: d.holds(slack, &report),
                saturated: d.t_margin.abs() <= SATURATION_TOL && report.t_floor < 1.0,
            }
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
pub fn bounds_rows(
    pot: &Potential,
    units: &UnitsConfig,
    energies: &[f64],
    families: &[BoundFamily],
    tol: &Tolerances,
    opts: &BoundOptions,
    slack: f64,
    workers: Option<usize>,
) -> Result<Vec<BoundsRow>> {
    let rows = parallel_map(energies, workers, |&e| {
        bounds_at(pot, units, e, families, tol, opts, slack)
    });
    Ok(collect_ordered(rows)?.into_iter().flatten().collect())
}

/// `energy,born,distorted_born,above_barrier,ode`: magnitudes of `beta`;
/// an estimate that does not apply is left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxRow {
    pub energy: f64,
    pub born: Option<f64>,
    pub distorted_born: Option<f64>,
    pub above_barrier: Option<f64>,
    pub ode: f64,
}

impl TableRow for ApproxRow {
    fn header() -> &'static [&'static str] {
        &["energy", "born", "distorted_born", "above_barrier", "ode"]
    }

    fn cells(&self) -> Vec<Cell> {
        let opt = |v: Option<f64>| v.map(Cell::Num).unwrap_or(Cell::Missing);
        vec![
            Cell::Num(self.energy),
            opt(self.born),
            opt(self.distorted_born),
            opt(self.above_barrier),
            Cell::Num(self.ode),
        ]
    }
}

pub fn approx_rows(
    pot: &Potential,
    units: &UnitsConfig,
    energies: &[f64],
    tol: &Tolerances,
    workers: Option<usize>,
) -> Result<Vec<ApproxRow>> {
    let rows = parallel_map(energies, workers, |&e| -> Result<ApproxRow> {
        let ode = integrate(pot, units, e, default_variant(pot), tol)?;
        Ok(ApproxRow {
            energy: e,
            born: born_beta(pot, units, e).ok().map(|b| b.magnitude),
            distorted_born: distorted_born_beta(pot, units, e).ok().map(|b| b.magnitude),
            above_barrier: above_barrier_beta(pot, units, e).ok().map(|b| b.magnitude),
            ode: ode.beta.norm(),
        })
    });
    collect_ordered(rows)
}

/// `energy,t_exact,t_numeric,rel_error,conservation_residual`
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRow {
    pub energy: f64,
    pub t_exact: f64,
    pub t_numeric: f64,
    pub rel_error: f64,
    pub conservation_residual: f64,
}

impl TableRow for CatalogRow {
    fn header() -> &'static [&'static str] {
        &["energy", "t_exact", "t_numeric", "rel_error", "conservation_residual"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.energy),
            Cell::Num(self.t_exact),
            Cell::Num(self.t_numeric),
            Cell::Num(self.rel_error),
            Cell::Num(self.conservation_residual),
        ]
    }
}

pub fn catalog_rows(
    entry: &CatalogEntry,
    params: &Params,
    units: &UnitsConfig,
    energies: &[f64],
    tol: &Tolerances,
    workers: Option<usize>,
) -> Result<Vec<CatalogRow>> {
    let pot = entry.potential(params)?;
    let rows = parallel_map(energies, workers, |&e| -> Result<CatalogRow> {
        let exact = entry.exact_t(params, e, units)?;
        let r = integrate(&pot, units, e, default_variant(&pot), tol)?;
        Ok(CatalogRow {
            energy: e,
            t_exact: exact,
            t_numeric: r.transmission,
            rel_error: (r.transmission - exact).abs() / exact,
            conservation_residual: r.conservation_residual,
        })
    });
    collect_ordered(rows)
}

/// `name,params,description` for `catalog list`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogListRow {
    pub name: String,
    pub params: String,
    pub description: String,
}

impl TableRow for CatalogListRow {
    fn header() -> &'static [&'static str] {
        &["name", "params", "description"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.name.clone()),
            Cell::Text(self.params.clone()),
            Cell::Text(self.description.clone()),
        ]
    }
}

pub fn catalog_list() -> Vec<CatalogListRow> {
    crate::catalog::catalog()
        .iter()
        .map(|e| CatalogListRow {
            name: e.name.to_string(),
            params: e
                .params
                .iter()
                .map(|p| format!("{}={}", p.name, p.default))
                .collect::<Vec<_>>()
                .join(" "),
            description: e.description.to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_workers() {
        let p = Potential::sech2(0.3, 1.0).unwrap();
        let u = UnitsConfig::default();
        let es: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
        let tol = Tolerances::default();
        let a = compute_rows(&p, &u, &es, None, &tol, Some(1)).unwrap();
        let b = compute_rows(&p, &u, &es, None, &tol, Some(4)).unwrap();
        assert_eq!(a, b);
        let mut x = Vec::new();
        let mut y = Vec::new();
        write_table(&a, OutputFormat::Csv, &mut x).unwrap();
        write_table(&b, OutputFormat::Csv, &mut y).unwrap();
        assert_eq!(x, y);
        assert!(String::from_utf8(x)
            .unwrap()
            .starts_with("energy,abs_alpha,abs_beta,transmission,reflection,conservation_residual,phase_variant\n"));
    }

    #[test]
    fn json_mirrors_csv_columns() {
        let p = Potential::free((-2.0, 2.0)).unwrap();
        let u = UnitsConfig::default();
        let rows = compute_rows(&p, &u, &[1.0], None, &Tolerances::default(), None).unwrap();
        let mut buf = Vec::new();
        write_table(&rows, OutputFormat::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        let obj = v[0].as_object().unwrap();
        assert_eq!(obj.len(), ComputeRow::header().len());
        assert_eq!(obj["transmission"], 1.0);
    }

    #[test]
    fn first_error_wins_in_input_order() {
        let p = Potential::sech2(0.3, 1.0).unwrap();
        let u = UnitsConfig::default();
        let err = compute_rows(&p, &u, &[1.0, -1.0, -2.0], None, &Tolerances::default(), Some(3)).unwrap_err();
        assert_eq!(err.code(), "NoPropagatingMode");
    }

    #[test]
    fn well_saturation_rows_are_flagged() {
        let p = Potential::asymmetric_well(0.0, -3.0, 0.0, 0.25 * std::f64::consts::PI).unwrap();
        let u = UnitsConfig::default();
        let rows = bounds_at(
            &p,
            &u,
            1.0,
            &[BoundFamily::Case2b],
            &Tolerances::default(),
            &BoundOptions::default(),
            1e-9,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].dominated && rows[0].saturated, "{:?}", rows[0]);
    }
}
