//! Self-check suites: catalog equivalence, conservation and bound dominance.

use std::fmt;

use serde::Serialize;

use crate::bounds::{admissible_reports_with, BoundOptions, Dominance, ThetaMode};
use crate::catalog::catalog;
use crate::engine::{default_variant, integrate, Tolerances};
use crate::potentials::Potential;
use crate::random::{log_energies, random_suite, GaussianSumSpec};
use crate::sweep::parallel_map;
use crate::units::UnitsConfig;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub random_count: usize,
    pub energies_per_random: usize,
    pub catalog_points: usize,
    /// Catalog energies span `(floor, floor + catalog_span]`.
    pub catalog_span: f64,
    pub tolerances: Tolerances,
    pub theta_mode: ThetaMode,
    pub slack: f64,
    pub catalog_rel_tol: f64,
    pub residual_tol: f64,
    pub unitarity_tol: f64,
    pub workers: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20240601,
            random_count: 200,
            energies_per_random: 10,
            catalog_points: 50,
            catalog_span: 4.0,
            tolerances: Tolerances::default(),
            theta_mode: ThetaMode::Exact,
            slack: 1e-9,
            catalog_rel_tol: 1e-6,
            residual_tol: 1e-8,
            unitarity_tol: 1e-7,
            workers: None,
        }
    }
}

/// One offending `(potential, E, family)` triple.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub potential: String,
    pub energy: f64,
    pub family: String,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "potential={} E={:e} family={} {}",
            self.potential, self.energy, self.family, self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed error (or most negative margin) for the check.
    pub worst: f64,
    pub failures: Vec<Failure>,
}

impl CheckOutcome {
    fn from_parts(name: &'static str, cases: usize, worst: f64, failures: Vec<Failure>) -> Self {
        CheckOutcome {
            name,
            passed: failures.is_empty(),
            cases,
            worst,
            failures,
        }
    }
}

struct CatalogSample {
    potential: String,
    energy: f64,
    rel_error: f64,
    residual: f64,
    unitarity: f64,
    error: Option<String>,
}

fn catalog_samples(opts: &VerifyOptions) -> Vec<CatalogSample> {
    let units = UnitsConfig::default();
    let mut jobs = Vec::new();
    for entry in catalog() {
        let params = entry.defaults();
        match entry.energy_grid(&params, opts.catalog_span, opts.catalog_points) {
            Ok(grid) => jobs.extend(grid.into_iter().map(|e| (entry, e))),
            // reported as an oracle failure below
            Err(_) => jobs.push((entry, f64::NAN)),
        }
    }
    parallel_map(&jobs, opts.workers, |&(entry, e)| {
        let params = entry.defaults();
        let fail = |msg: String| CatalogSample {
            potential: entry.name.into(),
            energy: e,
            rel_error: f64::INFINITY,
            residual: f64::INFINITY,
            unitarity: f64::INFINITY,
            error: Some(msg),
        };
        let exact = match entry.exact_t(&params, e, &units) {
            Ok(t) => t,
            Err(err) => return fail(format!("oracle: {err}")),
        };
        let pot = match entry.potential(&params) {
            Ok(p) => p,
            Err(err) => return fail(err.to_string()),
        };
        match integrate(&pot, &units, e, default_variant(&pot), &opts.tolerances) {
            Ok(r) => CatalogSample {
                potential: entry.name.into(),
                energy: e,
                rel_error: (r.transmission - exact).abs() / exact,
                residual: r.conservation_residual,
                unitarity: (r.transmission + r.reflection - 1.0).abs(),
                error: None,
            },
            Err(err) => fail(format!("{}: {err}", err.code())),
        }
    })
}

/// Engine against closed forms, and conservation, over the whole catalog.
pub fn catalog_checks(opts: &VerifyOptions) -> (CheckOutcome, CheckOutcome) {
    let samples = catalog_samples(opts);
    let mut eq_fail = Vec::new();
    let mut cons_fail = Vec::new();
    let mut worst_rel: f64 = 0.0;
    let mut worst_cons: f64 = 0.0;
    for s in &samples {
        worst_rel = worst_rel.max(s.rel_error);
        worst_cons = worst_cons.max(s.residual).max(s.unitarity);
        let f = |detail: String| Failure {
            potential: s.potential.clone(),
            energy: s.energy,
            family: "-".into(),
            detail,
        };
        if let Some(e) = &s.error {
            eq_fail.push(f(e.clone()));
            cons_fail.push(f(e.clone()));
            continue;
        }
        if !(s.rel_error <= opts.catalog_rel_tol) {
            eq_fail.push(f(format!("relative error {:e}", s.rel_error)));
        }
        if !(s.residual <= opts.residual_tol && s.unitarity <= opts.unitarity_tol) {
            cons_fail.push(f(format!("residual {:e}, |T+R-1| {:e}", s.residual, s.unitarity)));
        }
    }
    (
        CheckOutcome::from_parts("catalog_equivalence", samples.len(), worst_rel, eq_fail),
        CheckOutcome::from_parts("conservation", samples.len(), worst_cons, cons_fail),
    )
}

struct DominanceJob {
    name: String,
    potential: Potential,
    energy: f64,
}

/// Every admissible family against the numerical solution, on the catalog
/// and on a seeded suite of random Gaussian sums.
pub fn dominance_check(opts: &VerifyOptions) -> CheckOutcome {
    let units = UnitsConfig::default();
    let mut jobs = Vec::new();
    for entry in catalog() {
        let params = entry.defaults();
        let (Ok(pot), Ok(grid)) = (
            entry.potential(&params),
            entry.energy_grid(&params, opts.catalog_span, opts.catalog_points.min(10)),
        ) else {
            continue;
        };
        for e in grid {
            jobs.push(DominanceJob {
                name: entry.name.into(),
                potential: pot.clone(),
                energy: e,
            });
        }
    }
    let spec = GaussianSumSpec::default();
    match random_suite(opts.seed, opts.random_count, &spec) {
        Ok(cases) => {
            for case in cases {
                for e in log_energies(0.1, 10.0, opts.energies_per_random) {
                    jobs.push(DominanceJob {
                        name: case.describe(),
                        potential: case.potential.clone(),
                        energy: e,
                    });
                }
            }
        }
        Err(err) => {
            return CheckOutcome::from_parts(
                "dominance",
                0,
                f64::NAN,
                vec![Failure {
                    potential: format!("random[seed={}]", opts.seed),
                    energy: f64::NAN,
                    family: "-".into(),
                    detail: err.to_string(),
                }],
            )
        }
    }
    let bopts = BoundOptions {
        theta_mode: opts.theta_mode,
        ..BoundOptions::default()
    };
    let results = parallel_map(&jobs, opts.workers, |job| -> (usize, f64, Vec<Failure>) {
        let fail = |family: String, detail: String| Failure {
            potential: job.name.clone(),
            energy: job.energy,
            family,
            detail,
        };
        let res = match integrate(
            &job.potential,
            &units,
            job.energy,
            default_variant(&job.potential),
            &opts.tolerances,
        ) {
            Ok(r) => r,
            Err(e) => return (0, f64::NAN, vec![fail("-".into(), format!("engine {}: {e}", e.code()))]),
        };
        let reports = match admissible_reports_with(&job.potential, &units, job.energy, &bopts) {
            Ok(r) => r,
            Err(e) => return (0, f64::NAN, vec![fail("-".into(), format!("bounds {}: {e}", e.code()))]),
        };
        let mut worst = f64::INFINITY;
        let mut failures = Vec::new();
        for rep in &reports {
            let d = Dominance::of(rep, &res);
            worst = worst.min(d.worst());
            if !d.holds(opts.slack, rep) {
                let fam = match rep.phase_variant {
                    Some(v) if rep.family == crate::bounds::BoundFamily::General => format!("General({v})"),
                    _ => rep.family.to_string(),
                };
                failures.push(fail(
                    fam,
                    format!(
                        "T={:e} T_floor={:e} R={:e} R_cap={:e} |alpha|={:e} cap={:e}",
                        res.transmission,
                        rep.t_floor,
                        res.reflection,
                        rep.r_cap,
                        res.alpha.norm(),
                        rep.alpha_cap
                    ),
                ));
            }
        }
        (reports.len(), worst, failures)
    });
    let mut cases = 0;
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for (n, w, f) in results {
        cases += n;
        if w.is_finite() {
            worst = worst.min(w);
        }
        failures.extend(f);
    }
    CheckOutcome::from_parts("dominance", cases, worst, failures)
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let (eq, cons) = catalog_checks(opts);
    vec![eq, cons, dominance_check(opts)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            random_count: 4,
            energies_per_random: 3,
            catalog_points: 4,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn small_suite_passes() {
        for c in run_all(&small()) {
            assert!(c.passed, "{}: {:?}", c.name, c.failures.first());
            assert!(c.cases > 0);
        }
    }

    #[test]
    fn signed_theta_fault_is_caught() {
        let opts = VerifyOptions {
            theta_mode: ThetaMode::SignedFault,
            random_count: 20,
            ..small()
        };
        let d = dominance_check(&opts);
        assert!(!d.passed);
    }
}
