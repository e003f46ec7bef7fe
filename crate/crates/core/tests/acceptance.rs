//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szbounds::approximations::{above_barrier_beta, born_beta, distorted_born_beta};
use szbounds::bounds::{case1_bound, BoundFamily, BoundOptions};
use szbounds::catalog::{lookup, Params};
use szbounds::engine::{default_variant, integrate, transfer_matrix, PhaseVariant, Tolerances};
use szbounds::parametric::{
    case1_theta_direct, case2_theta_direct, integrate_profile, parametric_bounds, FrequencyProfile, ParametricCase,
};
use szbounds::random::{random_suite, GaussianSumSpec};
use szbounds::sweep::bounds_at;
use szbounds::verify::{catalog_checks, dominance_check, VerifyOptions};
use szbounds::UnitsConfig;

const U: UnitsConfig = UnitsConfig { hbar: 1.0, mass: 0.5 };

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn catalog_equivalence(opts: &VerifyOptions) -> (Verdict, Verdict) {
    let start = Instant::now();
    let (eq, cons) = catalog_checks(opts);
    let secs = start.elapsed().as_secs_f64();
    let first =
        |o: &szbounds::verify::CheckOutcome| o.failures.first().map(|f| format!(" first: {f}")).unwrap_or_default();
    (
        verdict(
            eq.passed && eq.cases == 7 * 50 && secs <= 120.0,
            format!(
                "cases={} worst_rel={:.2e} runtime={secs:.1}s{}",
                eq.cases,
                eq.worst,
                first(&eq)
            ),
        ),
        verdict(
            cons.passed,
            format!("cases={} worst_residual={:.2e}{}", cons.cases, cons.worst, first(&cons)),
        ),
    )
}

fn dominance(opts: &VerifyOptions) -> Verdict {
    let d = dominance_check(opts);
    verdict(
        d.passed,
        format!(
            "family_cases={} failures={} worst_margin={:.2e}",
            d.cases,
            d.failures.len(),
            d.worst
        ),
    )
}

fn saturation() -> Verdict {
    let tol = Tolerances::default();
    let well = lookup("asymmetric_well").unwrap();
    let wp = params(&[("V1", 0.0), ("V2", -1.5), ("V3", 0.5), ("L", 1.0)]);
    let pot = well.potential(&wp).unwrap();
    let mut worst_well: f64 = 0.0;
    for n in 0..3 {
        // k2 L = (2n+1) pi / 2 with k2^2 = E - V2
        let e = ((2 * n + 1) as f64 * PI / 2.0).powi(2) - 1.5;
        let rows = bounds_at(
            &pot,
            &U,
            e,
            &[BoundFamily::Case2bAsym],
            &tol,
            &BoundOptions::default(),
            1e-9,
        );
        match rows {
            Ok(r) => worst_well = worst_well.max(r[0].margin.abs()),
            Err(err) => return verdict(false, format!("n={n}: {err}")),
        }
    }
    let barrier = lookup("square_barrier").unwrap();
    let bp = params(&[("V_e", 0.5), ("L", 1.0)]);
    let pot = barrier.potential(&bp).unwrap();
    let mut worst_res: f64 = 0.0;
    for n in 1..=3 {
        let e = 0.5 + (n as f64 * PI).powi(2);
        match integrate(&pot, &U, e, default_variant(&pot), &tol) {
            Ok(r) => worst_res = worst_res.max((r.transmission - 1.0).abs()),
            Err(err) => return verdict(false, format!("resonance n={n}: {err}")),
        }
    }
    verdict(
        worst_well <= 1e-6 && worst_res <= 1e-8,
        format!("well |T-T_floor|={worst_well:.2e} barrier |T-1|={worst_res:.2e}"),
    )
}

fn step_limit() -> Verdict {
    let tol = Tolerances::default();
    let step = lookup("tanh_step").unwrap();
    let e = 1.0;
    let mut prev_r = -1.0;
    let mut parts = Vec::new();
    let mut ok = true;
    let mut last_gap = f64::NAN;
    for l in [1.0, 0.1, 0.01] {
        let p = params(&[("V_minus", 0.0), ("V_plus", 0.75), ("L", l)]);
        let pot = step.potential(&p).unwrap();
        let rows = match bounds_at(
            &pot,
            &U,
            e,
            &[BoundFamily::Case2a],
            &tol,
            &BoundOptions::default(),
            1e-9,
        ) {
            Ok(r) => r,
            Err(err) => return verdict(false, format!("L={l}: {err}")),
        };
        let (r, cap) = (rows[0].r_numeric, rows[0].report.r_cap);
        ok &= r <= cap * (1.0 + 1e-9) && r > prev_r;
        prev_r = r;
        last_gap = cap - r;
        parts.push(format!("L={l}: R={r:.6e} R_cap={cap:.6e}"));
    }
    ok &= last_gap <= 1e-3;
    verdict(ok, parts.join(", "))
}

fn delta_asymptotics() -> Verdict {
    let strength = 2.0;
    let delta = lookup("delta").unwrap();
    let p = params(&[("strength", strength)]);
    let pot = delta.potential(&p).unwrap();
    // E = 100 m alpha^2 / (2 hbar^2)
    let e = 100.0 * U.mass * strength * strength / (2.0 * U.hbar * U.hbar);
    let exact = delta.exact_t(&p, e, &U).unwrap();
    let weak = match case1_bound(&pot, &U, e) {
        Ok((_, w)) => w,
        Err(err) => return verdict(false, err.to_string()),
    };
    let gap = (exact - weak.t_floor) / exact;
    verdict(
        weak.family == BoundFamily::Case1Weak && (0.0..=0.01).contains(&gap),
        format!("E={e} T={exact:.6e} floor={:.6e} gap={gap:.2e}", weak.t_floor),
    )
}

fn slope(lambdas: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn born_scaling() -> Verdict {
    let sech2 = lookup("sech2").unwrap();
    let tol = Tolerances::default();
    let e = 1.0;
    let lambdas = [1.0, 0.5, 0.25, 0.125];
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for &lam in &lambdas {
        let pot = sech2.potential(&params(&[("V_e", 0.2 * lam), ("L", 1.0)])).unwrap();
        let ode = match integrate(&pot, &U, e, PhaseVariant::ConstantK, &tol) {
            Ok(r) => r.beta,
            Err(err) => return verdict(false, err.to_string()),
        };
        let est = [
            born_beta(&pot, &U, e),
            distorted_born_beta(&pot, &U, e),
            above_barrier_beta(&pot, &U, e),
        ];
        for (i, b) in est.into_iter().enumerate() {
            match b {
                Ok(b) => errs[i].push((b.beta - ode).norm()),
                Err(err) => return verdict(false, format!("lambda={lam}: {err}")),
            }
        }
    }
    let slopes: Vec<f64> = errs.iter().map(|e| slope(&lambdas, e)).collect();
    verdict(
        slopes.iter().all(|s| *s >= 1.8),
        format!(
            "slopes born={:.3} distorted_born={:.3} above_barrier={:.3}",
            slopes[0], slopes[1], slopes[2]
        ),
    )
}

fn transfer_algebra() -> Verdict {
    let tol = Tolerances::default();
    let cases = random_suite(99, 10, &GaussianSumSpec::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut det, mut su, mut comp): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for case in &cases {
        let pot = &case.potential;
        let e = rng.gen_range(1.5..6.0);
        let (lo, hi) = pot.domain();
        let mut xs = [rng.gen_range(lo..hi), rng.gen_range(lo..hi)];
        xs.sort_by(f64::total_cmp);
        let v = default_variant(pot);
        let run = |a: f64, b: f64| transfer_matrix(pot, &U, e, v, a, b, &tol);
        let (full, left, right) = match (run(hi, lo), run(hi, xs[1]), run(xs[1], lo)) {
            (Ok(f), Ok(l), Ok(r)) => (f, l, r),
            (Err(err), _, _) | (_, Err(err), _) | (_, _, Err(err)) => return verdict(false, err.to_string()),
        };
        for m in [&full, &left, &right] {
            det = det.max(m.det_defect());
            su = su.max(m.su11_defect());
        }
        comp = comp.max((right * left).max_diff(&full));
        // a second split on the left piece
        if let (Ok(a), Ok(b)) = (run(hi, xs[1]), run(xs[1], xs[0])) {
            if let Ok(c) = run(hi, xs[0]) {
                comp = comp.max((b * a).max_diff(&c));
            }
        }
    }
    verdict(
        det <= 1e-8 && su <= 1e-8 && comp <= 1e-8,
        format!("det={det:.2e} sigma_z={su:.2e} composition={comp:.2e}"),
    )
}

fn ratio_caps(n: f64, d: f64) -> (f64, f64) {
    ((n + d) / (2.0 * (n * d).sqrt()), (n - d).abs() / (2.0 * (n * d).sqrt()))
}

fn parametric_mirror() -> Verdict {
    let mut profiles = Vec::new();
    for i in 0..10 {
        let t = i as f64 / 9.0;
        let amp = if i % 2 == 0 { 0.1 + 0.8 * t } else { -0.05 - 0.4 * t };
        profiles.push(FrequencyProfile::sech2_bump(0.8 + 0.5 * t, amp, 0.4 + 1.2 * t).unwrap());
    }
    for i in 0..10 {
        let t = i as f64 / 9.0;
        let (w1, w2) = if i % 2 == 0 { (1.0, 1.2 + t) } else { (1.5 + t, 0.7) };
        profiles.push(FrequencyProfile::tanh_ramp(w1, w2, 0.3 + 1.5 * t).unwrap());
    }
    let mut worst_theta: f64 = 0.0;
    let mut worst_cap: f64 = 0.0;
    for p in &profiles {
        let (wm, wp) = (p.omega_minus_inf(), p.omega_plus_inf());
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        let Ok(c2) = parametric_bounds(p, &U, ParametricCase::Case2) else {
            return verdict(false, format!("{}: case 2 failed", p.label()));
        };
        worst_theta = worst_theta.max(rel(c2.theta_integral, case2_theta_direct(p).unwrap()));
        if wm == wp {
            let c1 = parametric_bounds(p, &U, ParametricCase::Case1).unwrap();
            worst_theta = worst_theta.max(rel(c1.theta_integral, case1_theta_direct(p).unwrap()));
            // the single extremum of a sech^2 bump sits at t = 0
            let we = p.omega(0.0);
            let (n, d) = if we > wm {
                (we * we, wm * wp)
            } else {
                (wm * wp, we * we)
            };
            let (ac, bc) = ratio_caps(n, d);
            let b = parametric_bounds(p, &U, ParametricCase::Case2b).unwrap();
            worst_cap = worst_cap.max(rel(b.alpha_cap, ac)).max(rel(b.beta_cap, bc));
        } else {
            let (ac, bc) = ratio_caps(wp, wm);
            let b = parametric_bounds(p, &U, ParametricCase::Case2a).unwrap();
            worst_cap = worst_cap.max(rel(b.alpha_cap, ac)).max(rel(b.beta_cap, bc));
        }
    }
    let ramp = FrequencyProfile::tanh_ramp(1.0, 2.0, 1.0).unwrap();
    let cap = 1.0 / (2.0 * 2f64.sqrt());
    let b = parametric_bounds(&ramp, &U, ParametricCase::Case2a).unwrap();
    let beta = integrate_profile(&ramp, &U, &Tolerances::default())
        .unwrap()
        .0
        .beta
        .norm();
    let ok = worst_theta <= 1e-10 && worst_cap <= 1e-12 && (b.beta_cap - cap).abs() <= 1e-15 && beta < cap;
    verdict(
        ok,
        format!(
            "profiles={} theta_rel={worst_theta:.2e} cap_rel={worst_cap:.2e} ramp |beta|={beta:.6e} < {cap:.6e}",
            profiles.len()
        ),
    )
}

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let (c1, c2) = catalog_equivalence(&opts);
    let results = [
        ("1 catalog_equivalence", c1),
        ("2 conservation", c2),
        ("3 bound_dominance", dominance(&opts)),
        ("4 saturation", saturation()),
        ("5 step_limit", step_limit()),
        ("6 delta_asymptotics", delta_asymptotics()),
        ("7 born_order_scaling", born_scaling()),
        ("8 transfer_algebra", transfer_algebra()),
        ("9 parametric_mirror", parametric_mirror()),
    ];
    let mut all = true;
    for (name, v) in &results {
        println!("{} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        all &= v.passed;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
