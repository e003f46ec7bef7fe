//! Parametrically driven oscillators `u'' + omega(t)^2 u = 0` mapped onto
//! the scattering problem with `k(x) = omega(x)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use ode_solvers::{Dop853, OutputType, SVector, System};
use serde::Serialize;

use crate::bounds::{
    case1_bound, case2_bound, monotonic_bound, multi_extrema_bound, single_extremum_bound, BoundReport,
};
use crate::engine::{integrate, PhaseVariant, ScatteringResult, Tolerances};
use crate::error::{Result, ScatterError};
use crate::potentials::extrema::find_extrema_with;
use crate::potentials::{Potential, Shape, Side, DEFAULT_TAIL_TOLERANCE};
use crate::quadrature::{integrate_adaptive, sign_changes};
use crate::units::UnitsConfig;

const GRID: usize = 4096;

/// Frequency `omega(t)` on a truncated time interval.
#[derive(Debug, Clone)]
pub struct FrequencyProfile {
    omega: Shape,
    omega_minus_inf: f64,
    omega_plus_inf: f64,
    domain: (f64, f64),
    tail_tolerance: f64,
    label: String,
}

impl FrequencyProfile {
    pub fn new(
        omega: Shape,
        omega_minus_inf: f64,
        omega_plus_inf: f64,
        domain: (f64, f64),
        tail_tolerance: f64,
    ) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ScatterError::InvalidParameter(format!(
                "time interval must be finite, got [{lo}, {hi}]"
            )));
        }
        for w in [omega_minus_inf, omega_plus_inf] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(ScatterError::InvalidParameter(format!(
                    "asymptotic frequencies must be positive, got {w}"
                )));
            }
        }
        for (t, w) in [(lo, omega_minus_inf), (hi, omega_plus_inf)] {
            let dev = (omega.value(t) - w).abs();
            if !(dev <= tail_tolerance) {
                return Err(ScatterError::NonDecayingTail {
                    x: t,
                    deviation: dev,
                    tolerance: tail_tolerance,
                });
            }
        }
        let p = FrequencyProfile {
            omega,
            omega_minus_inf,
            omega_plus_inf,
            domain,
            tail_tolerance,
            label: "frequency".into(),
        };
        p.check_no_turning_point()?;
        Ok(p)
    }

    pub fn constant(omega: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(Shape::Constant(omega), omega, omega, domain, DEFAULT_TAIL_TOLERANCE)
            .map(|p| p.with_label("constant"))
    }

    /// `omega0 (1 + amplitude sech^2(t / width))`.
    pub fn sech2_bump(omega0: f64, amplitude: f64, width: f64) -> Result<Self> {
        let shape = Shape::Sum(vec![
            Shape::Constant(omega0),
            Shape::Sech2 {
                height: omega0 * amplitude,
                width,
                center: 0.0,
            },
        ]);
        let half = 20.0 * width.abs();
        Self::new(shape, omega0, omega0, (-half, half), DEFAULT_TAIL_TOLERANCE).map(|p| p.with_label("sech2_bump"))
    }

    /// Smooth monotone change from `omega1` to `omega2` over a time `width`.
    pub fn tanh_ramp(omega1: f64, omega2: f64, width: f64) -> Result<Self> {
        let shape = Shape::TanhStep {
            v_minus: omega1,
            v_plus: omega2,
            width,
        };
        let half = 20.0 * width.abs();
        Self::new(shape, omega1, omega2, (-half, half), DEFAULT_TAIL_TOLERANCE).map(|p| p.with_label("tanh_ramp"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn shape(&self) -> &Shape {
        &self.omega
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.omega.value(t)
    }

    pub fn omega_minus_inf(&self) -> f64 {
        self.omega_minus_inf
    }

    pub fn omega_plus_inf(&self) -> f64 {
        self.omega_plus_inf
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    fn check_no_turning_point(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        for i in 0..=GRID {
            let t = lo + (hi - lo) * i as f64 / GRID as f64;
            let w = self.omega.value(t);
            if !(w * w > 0.0) {
                return Err(ScatterError::TurningPoint {
                    x: t,
                    potential: -w * w,
                    energy: 0.0,
                });
            }
        }
        Ok(())
    }
}

/// The equivalent scattering problem: `V_eff = (hbar^2/2m)(omega_+^2 - omega^2)`
/// at `E = hbar^2 omega_+^2 / 2m`, so that `k(x) = omega(x)` exactly.
#[derive(Debug, Clone)]
pub struct MappedProblem {
    pub potential: Potential,
    pub units: UnitsConfig,
    pub energy: f64,
}

pub fn to_scattering(profile: &FrequencyProfile, units: &UnitsConfig) -> Result<MappedProblem> {
    profile.check_no_turning_point()?;
    let scale = 1.0 / units.k2_per_energy();
    let reference = profile.omega_plus_inf;
    let shape = Shape::SquareMap {
        inner: Box::new(profile.omega.clone()),
        scale,
        reference,
    };
    let v_of = |w: f64| scale * (reference * reference - w * w);
    let w_max = profile.omega_minus_inf.max(profile.omega_plus_inf);
    // |d(omega^2)| ~ 2 omega |d omega| near the tails
    let tol = scale * (2.0 * w_max + profile.tail_tolerance) * profile.tail_tolerance;
    let potential = Potential::new(
        shape,
        v_of(profile.omega_minus_inf),
        0.0,
        profile.domain,
        tol.max(f64::MIN_POSITIVE),
        vec![],
    )?
    .with_label(format!("mapped:{}", profile.label));
    Ok(MappedProblem {
        potential,
        units: *units,
        energy: units.energy_of_k(reference),
    })
}

/// Bogolubov coefficients of the driven oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricResult {
    pub alpha: Complex64,
    pub beta: Complex64,
    /// `|beta|^2`, the number of quanta produced in the mode.
    pub produced_quanta: f64,
    pub conservation_residual: f64,
}

impl From<&ScatteringResult> for ParametricResult {
    fn from(r: &ScatteringResult) -> Self {
        ParametricResult {
            alpha: r.alpha,
            beta: r.beta,
            produced_quanta: r.beta.norm_sqr(),
            conservation_residual: r.conservation_residual,
        }
    }
}

/// Runs the engine with the WKB phase on the mapped problem.
pub fn integrate_profile(
    profile: &FrequencyProfile,
    units: &UnitsConfig,
    tol: &Tolerances,
) -> Result<(ParametricResult, ScatteringResult)> {
    let m = to_scattering(profile, units)?;
    let r = integrate(&m.potential, &m.units, m.energy, PhaseVariant::Wkb, tol)?;
    Ok(((&r).into(), r))
}

/// Sub-cases of the frequency-domain bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ParametricCase {
    Case1,
    Case2,
    Case2a,
    Case2b,
    Case2bAsym,
    Case2c,
}

impl ParametricCase {
    pub const ALL: [ParametricCase; 6] = [
        ParametricCase::Case1,
        ParametricCase::Case2,
        ParametricCase::Case2a,
        ParametricCase::Case2b,
        ParametricCase::Case2bAsym,
        ParametricCase::Case2c,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ParametricCase::Case1 => "1",
            ParametricCase::Case2 => "2",
            ParametricCase::Case2a => "2a",
            ParametricCase::Case2b => "2b",
            ParametricCase::Case2bAsym => "2bAsym",
            ParametricCase::Case2c => "2c",
        }
    }
}

impl fmt::Display for ParametricCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParametricCase {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim_start_matches("case").trim_start_matches("Case");
        ParametricCase::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| ScatterError::InvalidParameter(format!("unknown parametric case {s:?}")))
    }
}

/// Evaluates one sub-case by delegating to the scattering bounds on the
/// mapped problem.
///
/// `2a` needs a monotone profile, `2b` and `2bAsym` exactly one extremum
/// (`2b` also equal end frequencies); `2c` accepts any alternating profile.
pub fn parametric_bounds(profile: &FrequencyProfile, units: &UnitsConfig, case: ParametricCase) -> Result<BoundReport> {
    let m = to_scattering(profile, units)?;
    let (wm, wp) = (profile.omega_minus_inf, profile.omega_plus_inf);
    let extrema = || find_extrema_with(&m.potential, &m.units, m.energy, GRID);
    match case {
        ParametricCase::Case1 => {
            if wm != wp {
                return Err(ScatterError::AsymmetricAsymptotes {
                    v_minus: m.potential.v_minus_inf(),
                    v_plus: m.potential.v_plus_inf(),
                });
            }
            Ok(case1_bound(&m.potential, &m.units, m.energy)?.0)
        }
        ParametricCase::Case2 => case2_bound(&m.potential, &m.units, m.energy),
        ParametricCase::Case2a => {
            let prof = extrema()?;
            if !prof.is_empty() {
                return Err(ScatterError::Inadmissible(format!(
                    "profile has {} extrema; the monotone case needs none",
                    prof.len()
                )));
            }
            monotonic_bound(wm, wp)
        }
        ParametricCase::Case2b | ParametricCase::Case2bAsym => {
            if case == ParametricCase::Case2b && wm != wp {
                return Err(ScatterError::AsymmetricAsymptotes {
                    v_minus: m.potential.v_minus_inf(),
                    v_plus: m.potential.v_plus_inf(),
                });
            }
            let prof = extrema()?;
            if prof.len() != 1 {
                return Err(ScatterError::Inadmissible(format!(
                    "profile has {} extrema; this case needs exactly one",
                    prof.len()
                )));
            }
            single_extremum_bound(wm, wp, prof.extrema[0].k)
        }
        ParametricCase::Case2c => multi_extrema_bound(&extrema()?),
    }
}

/// `(1 / 2 omega0) ∫ |omega^2 - omega0^2| dt`, evaluated directly in time.
pub fn case1_theta_direct(profile: &FrequencyProfile) -> Result<f64> {
    let w0 = profile.omega_minus_inf;
    if w0 != profile.omega_plus_inf {
        return Err(ScatterError::AsymmetricAsymptotes {
            v_minus: w0,
            v_plus: profile.omega_plus_inf,
        });
    }
    let (lo, hi) = profile.domain;
    let g = |t: f64| {
        let w = profile.omega(t);
        w * w - w0 * w0
    };
    let mut breaks = profile.omega.breakpoints();
    breaks.extend(sign_changes(&g, lo, hi, GRID));
    breaks.sort_by(f64::total_cmp);
    let r = integrate_adaptive(&|t: f64| g(t).abs(), lo, hi, &breaks, 1e-13, 1e-12, 50_000);
    Ok(r.value / (2.0 * w0))
}

/// `½ ∫ |omega'| / omega dt` including jumps, evaluated directly in time.
pub fn case2_theta_direct(profile: &FrequencyProfile) -> Result<f64> {
    let (lo, hi) = profile.domain;
    let mut edges = vec![lo];
    edges.extend(profile.omega.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = |t: f64| match profile.omega.derivative(t) {
            Some(d) => d,
            None => {
                let h = 1e-5;
                (profile.omega(t + h) - profile.omega(t - h)) / (2.0 * h)
            }
        };
        let kinks = sign_changes(&d, a, b, GRID);
        let f = |t: f64| d(t).abs() / profile.omega(t).abs();
        total += 0.5 * integrate_adaptive(&f, a, b, &kinks, 1e-13, 1e-12, 50_000).value;
    }
    for &b in &edges[1..edges.len() - 1] {
        let l = profile.omega.value_side(b, Side::Left);
        let r = profile.omega.value_side(b, Side::Right);
        total += 0.5 * (r / l).ln().abs();
    }
    Ok(total)
}

type OscState = SVector<f64, 5>;

/// `[Re u, Im u, Re u', Im u', t]`, with time carried as state.
struct Oscillator<'p> {
    profile: &'p FrequencyProfile,
    lo: f64,
    hi: f64,
}

impl System<f64, OscState> for Oscillator<'_> {
    fn system(&self, _t: f64, y: &OscState, dy: &mut OscState) {
        let t = y[4];
        let side = if t <= self.lo { Side::Right } else { Side::Left };
        let w = if t > self.lo && t < self.hi {
            self.profile.omega.value(t)
        } else {
            self.profile.omega.value_side(t, side)
        };
        let w2 = w * w;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -w2 * y[0];
        dy[3] = -w2 * y[1];
        dy[4] = 1.0;
    }
}

/// Integrates the oscillator itself from the late-time mode
/// `u = e^{i omega_+ t} / sqrt(omega_+)` back to early times and projects
/// onto `e^{+-i omega_- t} / sqrt(omega_-)`. Independent of the
/// Bogolubov system; used to cross-check the mapping.
pub fn direct_oscillator(profile: &FrequencyProfile, tol: &Tolerances) -> Result<ParametricResult> {
    tol.validate()?;
    let (lo, hi) = profile.domain;
    let wp = profile.omega_plus_inf;
    let wm = profile.omega_minus_inf;
    let u0 = Complex64::from_polar(1.0 / wp.sqrt(), wp * hi);
    let du0 = Complex64::i() * wp * u0;
    let mut y = OscState::from([u0.re, u0.im, du0.re, du0.im, hi]);
    let mut knots = vec![hi];
    let mut inner: Vec<f64> = profile
        .omega
        .breakpoints()
        .into_iter()
        .filter(|&b| b > lo && b < hi)
        .collect();
    inner.reverse();
    knots.extend(inner);
    knots.push(lo);
    let w_max = (0..=GRID)
        .map(|i| profile.omega(lo + (hi - lo) * i as f64 / GRID as f64).abs())
        .fold(wm.max(wp), f64::max);
    let h_max = (0.1f64).min(std::f64::consts::PI / (10.0 * w_max));
    for seg in knots.windows(2) {
        let (from, to) = (seg[0], seg[1]);
        y[4] = from;
        let sys = Oscillator {
            profile,
            lo: to,
            hi: from,
        };
        let mut solver = Dop853::from_param(
            sys,
            from,
            to,
            to - from,
            y,
            tol.rtol,
            tol.atol,
            0.9,
            0.0,
            0.333,
            6.0,
            h_max,
            0.0,
            tol.max_steps,
            u32::MAX,
            OutputType::Sparse,
        );
        if let Err(e) = solver.integrate() {
            return Err(ScatterError::ToleranceNotMet { reason: e.to_string() });
        }
        y = *solver.y_out().last().unwrap_or(&y);
    }
    let u = Complex64::new(y[0], y[1]);
    let du = Complex64::new(y[2], y[3]);
    let s = 0.5 * wm.sqrt();
    let alpha = s * (u + du / (Complex64::i() * wm)) * Complex64::from_polar(1.0, -wm * lo);
    let beta = s * (u - du / (Complex64::i() * wm)) * Complex64::from_polar(1.0, wm * lo);
    Ok(ParametricResult {
        alpha,
        beta,
        produced_quanta: beta.norm_sqr(),
        conservation_residual: (alpha.norm_sqr() - beta.norm_sqr() - 1.0).abs(),
    })
}
