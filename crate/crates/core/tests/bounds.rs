use szbounds::bounds::{
    admissible_reports, case1_bound, case2_bound, extrema_profile, monotonic_bound, single_extremum_bound, BoundFamily,
};
use szbounds::catalog::{lookup, Params};
use szbounds::{Potential, UnitsConfig};

const U: UnitsConfig = UnitsConfig { hbar: 1.0, mass: 0.5 };

fn catalog(name: &str, pairs: &[(&str, f64)]) -> Potential {
    let p: Params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    lookup(name).unwrap().potential(&p).unwrap()
}

fn r_cap(reports: &[szbounds::bounds::BoundReport], family: BoundFamily) -> f64 {
    reports.iter().find(|r| r.family == family).unwrap().r_cap
}

#[test]
fn case2b_overtakes_case1_at_high_energy() {
    let pot = catalog("sech2", &[("V_e", 0.1), ("L", 1.0)]);
    let low = admissible_reports(&pot, &U, 0.15).unwrap();
    assert!(r_cap(&low, BoundFamily::Case1) < r_cap(&low, BoundFamily::Case2b));
    let high = admissible_reports(&pot, &U, 50.0).unwrap();
    assert!(r_cap(&high, BoundFamily::Case2b) < r_cap(&high, BoundFamily::Case1));
}

#[test]
fn integral_case2_reduces_to_closed_forms() {
    // monotone step: the integral equals the step ratio
    let step = catalog("tanh_step", &[("V_minus", 0.0), ("V_plus", 0.5), ("L", 0.7)]);
    let e: f64 = 1.3;
    let (km, kp) = (e.sqrt(), (e - 0.5f64).sqrt());
    let integral = case2_bound(&step, &U, e).unwrap();
    let closed = monotonic_bound(km, kp).unwrap();
    assert!((integral.theta_integral - closed.theta_integral).abs() < 1e-9);
    assert!((integral.t_floor - closed.t_floor).abs() < 1e-9);

    // single hump: the integral equals the extremum form
    let hump = catalog("sech2", &[("V_e", 0.4), ("L", 1.0)]);
    let e: f64 = 1.0;
    let prof = extrema_profile(&hump, &U, e).unwrap();
    assert_eq!(prof.extrema.len(), 1);
    let integral = case2_bound(&hump, &U, e).unwrap();
    let closed = single_extremum_bound(1.0, 1.0, (e - 0.4f64).sqrt()).unwrap();
    assert_eq!(closed.family, BoundFamily::Case2b);
    assert!((integral.theta_integral - closed.theta_integral).abs() < 1e-9);
}

#[test]
fn weak_bound_never_beats_strong() {
    let pot = catalog("square_barrier", &[("V_e", 0.5), ("L", 1.0)]);
    for e in [0.6, 1.0, 2.0, 10.0, 100.0] {
        let (strong, weak) = case1_bound(&pot, &U, e).unwrap();
        assert!(weak.t_floor <= strong.t_floor + 1e-15, "E={e}");
    }
}
