use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use szbounds::bounds::{BoundFamily, BoundOptions, BoundReport, Dominance, ThetaMode};
use szbounds::catalog::{lookup, Params};
use szbounds::config::{Config, OutputFormat, PotentialConfig, Problem, SweepConfig, UnitsSection, SCHEMA_VERSION};
use szbounds::engine::{
    default_variant, fmt_num, integrate_traced, reconstruct_wavefunction, PhaseVariant, Tolerances, TraceRecord,
    WavefunctionSample,
};
use szbounds::parametric::{direct_oscillator, integrate_profile, parametric_bounds, FrequencyProfile, ParametricCase};
use szbounds::sweep::{
    approx_rows, bounds_rows, catalog_list as list_rows, catalog_rows, compute_rows, write_table, Cell, TableRow,
};
use szbounds::verify::{run_all, VerifyOptions};
use szbounds::{Potential, UnitsConfig};

use crate::error::{CliError, Context};
use crate::{OutputArgs, ProblemArgs, ProfileArgs, SweepArgs, TolArgs, UnitsArgs, VerifyArgs};

/// Config file with command-line overrides applied.
struct Resolved {
    cfg: Config,
    context: String,
}

fn load(
    config: &Option<std::path::PathBuf>,
    flag_potential: Option<PotentialConfig>,
    cmd: &str,
) -> Result<Resolved, CliError> {
    let mut context = cmd.to_string();
    let cfg = match config {
        Some(path) => {
            context.push_str(&format!(" config={}", path.display()));
            let mut cfg = Config::load(path).ctx(&context)?;
            if let Some(p) = flag_potential {
                cfg.potential = p;
            }
            cfg
        }
        None => {
            let potential = flag_potential.ok_or_else(|| {
                CliError::input(
                    "no problem given: pass --config or a potential on the command line",
                    cmd,
                )
            })?;
            Config {
                schema_version: SCHEMA_VERSION,
                units: UnitsSection::default(),
                potential,
                sweep: SweepConfig::default(),
                tolerances: Tolerances::default(),
            }
        }
    };
    Ok(Resolved { cfg, context })
}

fn apply_units(cfg: &mut Config, units: &UnitsArgs) {
    if let Some(h) = units.hbar {
        cfg.units.hbar = h;
    }
    if let Some(m) = units.mass {
        cfg.units.mass = m;
    }
}

fn apply_tol(cfg: &mut Config, tol: &TolArgs) {
    if let Some(r) = tol.rtol {
        cfg.tolerances.rtol = r;
        cfg.tolerances.atol = tol.atol.unwrap_or(r);
    } else if let Some(a) = tol.atol {
        cfg.tolerances.atol = a;
    }
}

fn apply_sweep(cfg: &mut Config, s: &SweepArgs) {
    let sw = &mut cfg.sweep;
    if let Some(v) = s.e_min {
        sw.e_min = v;
    }
    if let Some(v) = s.e_max {
        sw.e_max = v;
    }
    if let Some(v) = s.count {
        sw.count = v;
    }
    if let Some(v) = s.spacing {
        sw.spacing = v;
    }
    // an explicit grid on the command line replaces energies from the file
    if s.energies.is_some() || s.e_min.is_some() || s.e_max.is_some() || s.count.is_some() {
        sw.energies = s.energies.clone();
    }
    if let Some(f) = s.output.format {
        sw.format = f;
    }
    apply_tol(cfg, &s.tol);
}

fn flag_potential(p: &ProblemArgs) -> Result<Option<PotentialConfig>, CliError> {
    if let Some(name) = &p.potential {
        return Ok(Some(PotentialConfig::Catalog {
            name: name.clone(),
            params: p.params.iter().cloned().collect(),
            domain: p.domain,
        }));
    }
    if let Some(expr) = &p.expr {
        let domain = p
            .domain
            .ok_or_else(|| CliError::input("--expr needs --domain lo,hi", "arguments"))?;
        return Ok(Some(PotentialConfig::Expression {
            expr: expr.clone(),
            domain,
            v_minus_inf: None,
            v_plus_inf: None,
            tail_tolerance: None,
            spikes: vec![],
        }));
    }
    if !p.params.is_empty() || p.domain.is_some() {
        return Err(CliError::input(
            "--params and --domain need --potential or --expr",
            "arguments",
        ));
    }
    Ok(None)
}

struct Scattering {
    potential: Potential,
    units: UnitsConfig,
    energies: Vec<f64>,
    tol: Tolerances,
    format: OutputFormat,
    context: String,
    cfg: Config,
}

fn scattering(problem: &ProblemArgs, sweep: &SweepArgs, cmd: &str) -> Result<Scattering, CliError> {
    let Resolved { mut cfg, context } = load(&problem.config, flag_potential(problem)?, cmd)?;
    apply_units(&mut cfg, &problem.units);
    apply_sweep(&mut cfg, sweep);
    let units = cfg.units().ctx(&context)?;
    let potential = match cfg.potential.build().ctx(&context)? {
        Problem::Potential { potential, .. } => potential,
        Problem::Frequency(_) => {
            return Err(CliError::input(
                "frequency profiles are handled by the parametric subcommand",
                context,
            ))
        }
    };
    let energies = cfg.sweep.energies().ctx(&context)?;
    cfg.tolerances.validate().ctx(&context)?;
    Ok(Scattering {
        potential,
        units,
        energies,
        tol: cfg.tolerances,
        format: cfg.sweep.format,
        context,
        cfg,
    })
}

fn open_output(out: &OutputArgs, context: &str) -> Result<Box<dyn Write>, CliError> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).ctx(&format!("{context} output={}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<R: TableRow>(rows: &[R], format: OutputFormat, out: &OutputArgs, context: &str) -> Result<(), CliError> {
    let mut w = open_output(out, context)?;
    write_table(rows, format, &mut w).ctx(context)?;
    w.flush().ctx(context)
}

pub fn compute(
    problem: &ProblemArgs,
    sweep: &SweepArgs,
    phase: Option<PhaseVariant>,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let s = scattering(problem, sweep, "compute")?;
    let variant = phase.or(s.cfg.sweep.phase);
    let rows = compute_rows(&s.potential, &s.units, &s.energies, variant, &s.tol, workers).ctx(&s.context)?;
    emit(&rows, s.format, &sweep.output, &s.context)
}

pub fn bounds(
    problem: &ProblemArgs,
    sweep: &SweepArgs,
    families: &[String],
    slack: f64,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let s = scattering(problem, sweep, "bounds")?;
    let names = if families.is_empty() {
        &s.cfg.sweep.families
    } else {
        families
    };
    let fams = names
        .iter()
        .map(|f| f.parse::<BoundFamily>())
        .collect::<Result<Vec<_>, _>>()
        .ctx(&s.context)?;
    let rows = bounds_rows(
        &s.potential,
        &s.units,
        &s.energies,
        &fams,
        &s.tol,
        &BoundOptions::default(),
        slack,
        workers,
    )
    .ctx(&s.context)?;
    emit(&rows, s.format, &sweep.output, &s.context)
}

pub fn approx(problem: &ProblemArgs, sweep: &SweepArgs, workers: Option<usize>) -> Result<(), CliError> {
    let s = scattering(problem, sweep, "approx")?;
    let rows = approx_rows(&s.potential, &s.units, &s.energies, &s.tol, workers).ctx(&s.context)?;
    emit(&rows, s.format, &sweep.output, &s.context)
}

pub fn catalog_list(output: &OutputArgs) -> Result<(), CliError> {
    emit(&list_rows(), output.format.unwrap_or_default(), output, "catalog list")
}

pub fn catalog_eval(
    name: &str,
    params: &[(String, f64)],
    span: f64,
    sweep: &SweepArgs,
    units: &UnitsArgs,
    workers: Option<usize>,
) -> Result<(), CliError> {
    let context = format!("catalog eval {name}");
    let entry = lookup(name).ctx(&context)?;
    let params: Params = entry.resolve(&params.iter().cloned().collect()).ctx(&context)?;
    let mut us = UnitsSection::default();
    if let Some(h) = units.hbar {
        us.hbar = h;
    }
    if let Some(m) = units.mass {
        us.mass = m;
    }
    let units = us.units().ctx(&context)?;
    let mut tol = Tolerances::default();
    if let Some(r) = sweep.tol.rtol {
        tol = Tolerances::with_rtol(r);
    }
    if let Some(a) = sweep.tol.atol {
        tol.atol = a;
    }
    tol.validate().ctx(&context)?;
    let explicit = sweep.e_min.is_some() || sweep.e_max.is_some();
    let energies = if let Some(e) = &sweep.energies {
        e.clone()
    } else if explicit {
        let d = SweepConfig::default();
        szbounds::config::energy_grid(
            sweep.e_min.unwrap_or(d.e_min),
            sweep.e_max.unwrap_or(d.e_max),
            sweep.count.unwrap_or(d.count),
            sweep.spacing.unwrap_or_default(),
        )
        .ctx(&context)?
    } else {
        entry
            .energy_grid(&params, span, sweep.count.unwrap_or(10))
            .ctx(&context)?
    };
    let rows = catalog_rows(entry, &params, &units, &energies, &tol, workers).ctx(&context)?;
    emit(&rows, sweep.output.format.unwrap_or_default(), &sweep.output, &context)
}

/// `case,family,theta,t_floor,r_cap,alpha_cap,beta_cap,abs_alpha,abs_beta,produced_quanta,abs_beta_direct,dominated,validity`
struct ParametricRow {
    case: ParametricCase,
    report: BoundReport,
    abs_alpha: f64,
    abs_beta: f64,
    produced_quanta: f64,
    abs_beta_direct: f64,
    dominated: bool,
}

impl TableRow for ParametricRow {
    fn header() -> &'static [&'static str] {
        &[
            "case",
            "family",
            "theta",
            "t_floor",
            "r_cap",
            "alpha_cap",
            "beta_cap",
            "abs_alpha",
            "abs_beta",
            "produced_quanta",
            "abs_beta_direct",
            "dominated",
            "validity",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        let r = &self.report;
        let cap = |v: f64| if v.is_finite() { Cell::Num(v) } else { Cell::Missing };
        vec![
            Cell::Text(self.case.name().to_string()),
            Cell::Text(r.family.to_string()),
            Cell::Num(r.theta_integral),
            Cell::Num(r.t_floor),
            Cell::Num(r.r_cap),
            cap(r.alpha_cap),
            cap(r.beta_cap),
            Cell::Num(self.abs_alpha),
            Cell::Num(self.abs_beta),
            Cell::Num(self.produced_quanta),
            Cell::Num(self.abs_beta_direct),
            Cell::Bool(self.dominated),
            Cell::Text(r.validity.to_string()),
        ]
    }
}

pub fn parametric(args: &ProfileArgs, cases: &[String], output: &OutputArgs, tol: &TolArgs) -> Result<(), CliError> {
    let flag = match &args.omega {
        Some(omega) => Some(PotentialConfig::Frequency {
            omega: omega.clone(),
            domain: args
                .domain
                .ok_or_else(|| CliError::input("--omega needs --domain lo,hi", "parametric"))?,
            omega_minus_inf: None,
            omega_plus_inf: None,
            tail_tolerance: None,
        }),
        None => None,
    };
    let Resolved { mut cfg, context } = load(&args.config, flag, "parametric")?;
    apply_units(&mut cfg, &args.units);
    apply_tol(&mut cfg, tol);
    cfg.tolerances.validate().ctx(&context)?;
    let units = cfg.units().ctx(&context)?;
    let profile: FrequencyProfile = match cfg.potential.build().ctx(&context)? {
        Problem::Frequency(p) => p,
        Problem::Potential { .. } => {
            return Err(CliError::input(
                "parametric needs a frequency profile (kind = \"frequency\" or --omega)",
                context,
            ))
        }
    };
    let requested = cases
        .iter()
        .map(|c| c.parse::<ParametricCase>())
        .collect::<Result<Vec<_>, _>>()
        .ctx(&context)?;
    let (res, scat) = integrate_profile(&profile, &units, &cfg.tolerances).ctx(&context)?;
    let direct = direct_oscillator(&profile, &cfg.tolerances).ctx(&context)?;
    let chosen: Vec<ParametricCase> = if requested.is_empty() {
        ParametricCase::ALL.to_vec()
    } else {
        requested.clone()
    };
    let mut rows = Vec::new();
    for case in chosen {
        let report = match parametric_bounds(&profile, &units, case) {
            Ok(r) => r,
            // unrequested cases that do not apply are skipped
            Err(_) if requested.is_empty() => continue,
            Err(e) => return Err(e).ctx(&format!("{context} case={}", case.name())),
        };
        let d = Dominance::of(&report, &scat);
        rows.push(ParametricRow {
            case,
            dominated: d.holds(1e-9, &report),
            report,
            abs_alpha: res.alpha.norm(),
            abs_beta: res.beta.norm(),
            produced_quanta: res.produced_quanta,
            abs_beta_direct: direct.beta.norm(),
        });
    }
    emit(&rows, output.format.unwrap_or(cfg.sweep.format), output, &context)
}

/// `x,re_a,im_a,re_b,im_b,phi,dphi,residual`
struct TraceRow<'a>(&'a TraceRecord);

impl TableRow for TraceRow<'_> {
    fn header() -> &'static [&'static str] {
        &["x", "re_a", "im_a", "re_b", "im_b", "phi", "dphi", "residual"]
    }

    fn cells(&self) -> Vec<Cell> {
        let r = self.0;
        [r.x, r.a.re, r.a.im, r.b.re, r.b.im, r.phi, r.dphi, r.residual]
            .into_iter()
            .map(Cell::Num)
            .collect()
    }
}

/// `x,re_psi,im_psi,re_dpsi,im_dpsi,current`
struct WaveRow(WavefunctionSample);

impl TableRow for WaveRow {
    fn header() -> &'static [&'static str] {
        &["x", "re_psi", "im_psi", "re_dpsi", "im_dpsi", "current"]
    }

    fn cells(&self) -> Vec<Cell> {
        let s = &self.0;
        [s.x, s.psi.re, s.psi.im, s.dpsi.re, s.dpsi.im, s.current()]
            .into_iter()
            .map(Cell::Num)
            .collect()
    }
}

pub fn trace(
    problem: &ProblemArgs,
    energy: f64,
    phase: Option<PhaseVariant>,
    wavefunction: bool,
    output: &OutputArgs,
    tol: &TolArgs,
) -> Result<(), CliError> {
    let sweep = SweepArgs {
        energies: Some(vec![energy]),
        output: output.clone(),
        tol: tol.clone(),
        ..SweepArgs::default()
    };
    let s = scattering(problem, &sweep, "trace")?;
    let context = format!("{} E={}", s.context, fmt_num(energy));
    let variant = phase
        .or(s.cfg.sweep.phase)
        .unwrap_or_else(|| default_variant(&s.potential));
    let (_, records) = integrate_traced(&s.potential, &s.units, energy, variant, &s.tol).ctx(&context)?;
    if wavefunction {
        let rows: Vec<WaveRow> = reconstruct_wavefunction(&records).into_iter().map(WaveRow).collect();
        emit(&rows, s.format, output, &context)
    } else {
        let rows: Vec<TraceRow> = records.iter().map(TraceRow).collect();
        emit(&rows, s.format, output, &context)
    }
}

pub fn verify(args: &VerifyArgs, workers: Option<usize>) -> Result<(), CliError> {
    let mut tolerances = Tolerances::default();
    if let Some(r) = args.tol.rtol {
        tolerances = Tolerances::with_rtol(r);
    }
    if let Some(a) = args.tol.atol {
        tolerances.atol = a;
    }
    let context = format!("verify seed={}", args.seed);
    tolerances.validate().ctx(&context)?;
    let opts = VerifyOptions {
        seed: args.seed,
        random_count: args.random_count,
        energies_per_random: args.energies_per_random,
        catalog_points: args.catalog_points,
        tolerances,
        theta_mode: if args.inject_theta_fault {
            ThetaMode::SignedFault
        } else {
            ThetaMode::Exact
        },
        slack: args.slack,
        workers,
        ..VerifyOptions::default()
    };
    let start = Instant::now();
    let outcomes = run_all(&opts);
    let elapsed = start.elapsed().as_secs_f64();

    let mut out = io::stdout().lock();
    let w = |out: &mut io::StdoutLock, line: String| writeln!(out, "{line}").ctx(&context);
    w(
        &mut out,
        format!("{:<20} {:<6} {:>8} {:>12}", "check", "status", "cases", "worst"),
    )?;
    for o in &outcomes {
        w(
            &mut out,
            format!(
                "{:<20} {:<6} {:>8} {:>12.3e}",
                o.name,
                if o.passed { "PASS" } else { "FAIL" },
                o.cases,
                o.worst
            ),
        )?;
    }
    for o in outcomes.iter().filter(|o| !o.passed) {
        for f in o.failures.iter().take(args.max_failures) {
            w(&mut out, format!("FAIL {} {f}", o.name))?;
        }
        if o.failures.len() > args.max_failures {
            w(
                &mut out,
                format!("FAIL {} ... {} more", o.name, o.failures.len() - args.max_failures),
            )?;
        }
    }
    w(&mut out, format!("elapsed {elapsed:.1}s"))?;
    out.flush().ctx(&context)?;

    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
    if let Some(first) = failed.first() {
        let names: Vec<&str> = failed.iter().map(|o| o.name).collect();
        let total: usize = failed.iter().map(|o| o.failures.len()).sum();
        let triple = first
            .failures
            .first()
            .map(|f| format!(" potential={} E={} family={}", f.potential, fmt_num(f.energy), f.family))
            .unwrap_or_default();
        return Err(CliError::VerifyFailed {
            summary: format!("{total} failures in {}", names.join(",")),
            context: format!("{context} check={}{triple}", first.name),
        });
    }
    Ok(())
}
