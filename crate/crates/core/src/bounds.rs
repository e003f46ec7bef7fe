//! Rigorous bounds on Bogolubov coefficients, transmission and reflection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::engine::{PhaseFunction, PhaseVariant, ScatteringResult};
use crate::error::{Result, ScatterError};
use crate::potentials::{find_extrema, l1_shifted_norm, ExtremaProfile, ExtremumKind, Potential};
use crate::quadrature::{integrate_adaptive, sign_changes};
use crate::units::UnitsConfig;

const KINK_GRID: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundFamily {
    General,
    Case1,
    Case1Weak,
    Case2,
    Case2a,
    Case2b,
    Case2bAsym,
    Case2c,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 8] = [
        BoundFamily::General,
        BoundFamily::Case1,
        BoundFamily::Case1Weak,
        BoundFamily::Case2,
        BoundFamily::Case2a,
        BoundFamily::Case2b,
        BoundFamily::Case2bAsym,
        BoundFamily::Case2c,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundFamily::General => "General",
            BoundFamily::Case1 => "Case1",
            BoundFamily::Case1Weak => "Case1Weak",
            BoundFamily::Case2 => "Case2",
            BoundFamily::Case2a => "Case2a",
            BoundFamily::Case2b => "Case2b",
            BoundFamily::Case2bAsym => "Case2bAsym",
            BoundFamily::Case2c => "Case2c",
        }
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundFamily {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        BoundFamily::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ScatterError::InvalidParameter(format!("unknown bound family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Valid,
    /// The floor is zero: the bound says nothing.
    Vacuous,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Validity::Valid => "valid",
            Validity::Vacuous => "vacuous",
        })
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// One bound family evaluated at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub family: BoundFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_variant: Option<PhaseVariant>,
    pub theta_integral: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub alpha_cap: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub beta_cap: f64,
    pub t_floor: f64,
    pub r_cap: f64,
    pub validity: Validity,
}

fn validity_of(t_floor: f64) -> Validity {
    if t_floor > 0.0 {
        Validity::Valid
    } else {
        Validity::Vacuous
    }
}

impl BoundReport {
    /// Caps `cosh`, `sinh`, `sech^2`, `tanh^2` of `theta`.
    pub fn from_theta(family: BoundFamily, theta: f64, phase_variant: Option<PhaseVariant>) -> Self {
        let c = theta.cosh();
        let t = theta.tanh();
        let t_floor = if c.is_finite() { 1.0 / (c * c) } else { 0.0 };
        BoundReport {
            family,
            phase_variant,
            theta_integral: theta,
            alpha_cap: c,
            beta_cap: theta.sinh().abs(),
            t_floor,
            r_cap: t * t,
            validity: validity_of(t_floor),
        }
    }

    /// Caps from `theta = |ln(n/d)|/2`, evaluated in product form.
    pub fn from_ratio(family: BoundFamily, n: f64, d: f64) -> Self {
        let s = n + d;
        let g = 2.0 * (n * d).sqrt();
        let t_floor = 4.0 * n * d / (s * s);
        BoundReport {
            family,
            phase_variant: None,
            theta_integral: 0.5 * (n / d).ln().abs(),
            alpha_cap: s / g,
            beta_cap: (n - d).abs() / g,
            t_floor,
            r_cap: (n - d) * (n - d) / (s * s),
            validity: validity_of(t_floor),
        }
    }

    /// `max(|T_floor + R_cap - 1|, |alpha_cap^2 - beta_cap^2 - 1| / alpha_cap^2)`.
    pub fn consistency_defect(&self) -> f64 {
        let tr = (self.t_floor + self.r_cap - 1.0).abs();
        if !self.alpha_cap.is_finite() {
            return tr;
        }
        let ab = (self.alpha_cap * self.alpha_cap - self.beta_cap * self.beta_cap - 1.0).abs()
            / (self.alpha_cap * self.alpha_cap);
        tr.max(ab)
    }
}

/// How `theta` is integrated; the faulty mode drops the absolute value
/// and exists only to exercise the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaMode {
    #[default]
    Exact,
    SignedFault,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub quad_tol: f64,
    pub extrema_grid: usize,
    pub theta_mode: ThetaMode,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            quad_tol: 1e-10,
            extrema_grid: crate::potentials::extrema::DEFAULT_GRID_POINTS,
            theta_mode: ThetaMode::Exact,
        }
    }
}

/// `sqrt(phi''^2 + (k^2 - phi'^2)^2) / (2 |phi'|)`.
pub fn vartheta(dphi: f64, ddphi: f64, ksq: f64) -> Result<f64> {
    if !(dphi != 0.0 && dphi.is_finite()) {
        return Err(ScatterError::PhaseDerivativeZero { x: f64::NAN });
    }
    let d = ksq - dphi * dphi;
    Ok(ddphi.hypot(d) / (2.0 * dphi.abs()))
}

fn vartheta_mode(dphi: f64, ddphi: f64, ksq: f64, mode: ThetaMode) -> f64 {
    match mode {
        ThetaMode::Exact => ddphi.hypot(ksq - dphi * dphi) / (2.0 * dphi.abs()),
        ThetaMode::SignedFault => (ddphi + ksq - dphi * dphi) / (2.0 * dphi),
    }
}

/// `∫ vartheta dx` along the domain, including the exact contributions of
/// jumps in `phi'` and of delta spikes.
fn theta_integral(phase: &PhaseFunction<'_>, opts: &BoundOptions) -> Result<f64> {
    let pot = phase.potential();
    let (lo, hi) = pot.domain();
    let mut knots = vec![lo];
    knots.extend(pot.interfaces());
    knots.push(hi);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let zero_at = std::cell::Cell::new(None);
        let f = |x: f64| {
            let p = phase.point_in(x, a, b);
            if p.dphi == 0.0 && zero_at.get().is_none() {
                zero_at.set(Some(x));
            }
            vartheta_mode(p.dphi, p.ddphi, p.ksq, opts.theta_mode)
        };
        // vartheta has kinks where the active one of phi'' and k^2 - phi'^2 changes sign
        let signed = |x: f64| {
            let p = phase.point_in(x, a, b);
            p.ddphi + p.ksq - p.dphi * p.dphi
        };
        let kinks = sign_changes(&signed, a, b, KINK_GRID);
        let r = integrate_adaptive(&f, a, b, &kinks, opts.quad_tol, opts.quad_tol, 50_000);
        if let Some(x) = zero_at.get() {
            return Err(ScatterError::PhaseDerivativeZero { x });
        }
        total += r.value;
    }
    for w in knots.windows(3) {
        let p = w[1];
        let left = phase.point_in(p, w[0], p);
        let right = phase.point_in(p, p, w[2]);
        // a jump in phi' contributes |ln(phi'_R / phi'_L)| / 2
        let jump = 0.5 * (right.dphi / left.dphi).ln();
        let s = pot.spike_strength_at(p);
        let spike = 0.5 * phase.units().k2_per_energy() * s / right.dphi;
        total += match opts.theta_mode {
            ThetaMode::Exact => jump.abs() + spike.abs(),
            ThetaMode::SignedFault => jump - spike,
        };
    }
    Ok(total)
}

/// Bound from the general `vartheta` functional with the chosen phase.
pub fn general_bound(pot: &Potential, units: &UnitsConfig, energy: f64, variant: PhaseVariant) -> Result<BoundReport> {
    general_bound_with(pot, units, energy, variant, &BoundOptions::default())
}

pub fn general_bound_with(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    let phase = PhaseFunction::new(pot, units, energy, variant)?;
    let theta = theta_integral(&phase, opts)?;
    Ok(BoundReport::from_theta(BoundFamily::General, theta, Some(variant)))
}

fn check_symmetric(pot: &Potential) -> Result<()> {
    if pot.has_symmetric_asymptotes() {
        Ok(())
    } else {
        Err(ScatterError::AsymmetricAsymptotes {
            v_minus: pot.v_minus_inf(),
            v_plus: pot.v_plus_inf(),
        })
    }
}

/// Constant-k bound, `theta = sqrt(m / (2 (E - V_inf))) I / hbar` with
/// `I = ∫|V - V_inf|`, and its weak quadratic form.
pub fn case1_bound(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<(BoundReport, BoundReport)> {
    check_symmetric(pot)?;
    let v_inf = pot.v_minus_inf();
    if !(energy > v_inf) {
        return Err(ScatterError::NoPropagatingMode {
            energy,
            asymptote: v_inf,
        });
    }
    let i = l1_shifted_norm(pot, v_inf)?;
    let theta = i / units.hbar * (units.mass / (2.0 * (energy - v_inf))).sqrt();
    let strong = BoundReport::from_theta(BoundFamily::Case1, theta, Some(PhaseVariant::ConstantK));
    Ok((strong, weak_from_theta(theta)))
}

/// `T >= 1 - theta^2`, `R <= theta^2`, clamped to `[0, 1]`.
fn weak_from_theta(theta: f64) -> BoundReport {
    let r_cap = (theta * theta).min(1.0);
    let t_floor = (1.0 - theta * theta).max(0.0);
    let alpha_cap = if t_floor > 0.0 {
        1.0 / t_floor.sqrt()
    } else {
        f64::INFINITY
    };
    BoundReport {
        family: BoundFamily::Case1Weak,
        phase_variant: Some(PhaseVariant::ConstantK),
        theta_integral: theta,
        alpha_cap,
        beta_cap: if t_floor > 0.0 {
            (r_cap / t_floor).sqrt()
        } else {
            f64::INFINITY
        },
        t_floor,
        r_cap,
        validity: validity_of(t_floor),
    }
}

/// WKB-phase bound, `theta = ∫|k'|/(2k) dx`, by quadrature.
pub fn case2_bound(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<BoundReport> {
    case2_bound_with(pot, units, energy, &BoundOptions::default())
}

pub fn case2_bound_with(pot: &Potential, units: &UnitsConfig, energy: f64, opts: &BoundOptions) -> Result<BoundReport> {
    let phase = PhaseFunction::new(pot, units, energy, PhaseVariant::Wkb)?;
    let theta = theta_integral(&phase, opts)?;
    Ok(BoundReport::from_theta(
        BoundFamily::Case2,
        theta,
        Some(PhaseVariant::Wkb),
    ))
}

fn check_k(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::NoPropagatingMode {
            energy: f64::NAN,
            asymptote: f64::NAN,
        })
    }
}

/// Step-function bound for monotone `k(x)`.
pub fn monotonic_bound(k_minus: f64, k_plus: f64) -> Result<BoundReport> {
    check_k(k_minus)?;
    check_k(k_plus)?;
    Ok(BoundReport::from_ratio(BoundFamily::Case2a, k_plus, k_minus))
}

/// Bound for `k(x)` with one extremum `k_ext` (either kind).
pub fn single_extremum_bound(k_minus: f64, k_plus: f64, k_ext: f64) -> Result<BoundReport> {
    check_k(k_minus)?;
    check_k(k_plus)?;
    check_k(k_ext)?;
    let family = if k_minus == k_plus {
        BoundFamily::Case2b
    } else {
        BoundFamily::Case2bAsym
    };
    Ok(BoundReport::from_ratio(family, k_ext * k_ext, k_minus * k_plus))
}

/// Product-form bound for an alternating sequence of extrema.
///
/// With `N` the product of squared peaks and `D` that of squared valleys,
/// an end of the sequence that is a valley contributes its asymptotic
/// wavenumber to `N` and one that is a peak to `D` (the outermost
/// extremum "sinks down" to the asymptote). Then `theta = |ln(N/D)|/2`.
pub fn multi_extrema_bound(profile: &ExtremaProfile) -> Result<BoundReport> {
    profile.check_alternating()?;
    let (km, kp) = (profile.k_minus_inf, profile.k_plus_inf);
    match profile.extrema.len() {
        0 => monotonic_bound(km, kp),
        1 => single_extremum_bound(km, kp, profile.extrema[0].k),
        _ => {
            check_k(km)?;
            check_k(kp)?;
            let mut n = 1.0;
            let mut d = 1.0;
            for e in &profile.extrema {
                check_k(e.k)?;
                match e.kind {
                    ExtremumKind::Peak => n *= e.k * e.k,
                    ExtremumKind::Valley => d *= e.k * e.k,
                }
            }
            let first = profile.extrema[0].kind;
            let last = profile.extrema[profile.extrema.len() - 1].kind;
            for (kind, k) in [(first, km), (last, kp)] {
                match kind {
                    ExtremumKind::Valley => n *= k,
                    ExtremumKind::Peak => d *= k,
                }
            }
            Ok(BoundReport::from_ratio(BoundFamily::Case2c, n, d))
        }
    }
}

/// Every family admissible for `pot` at `E`.
pub fn admissible_reports(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<Vec<BoundReport>> {
    admissible_reports_with(pot, units, energy, &BoundOptions::default())
}

pub fn admissible_reports_with(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    opts: &BoundOptions,
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let mut first_err = None;
    for variant in [PhaseVariant::ConstantK, PhaseVariant::Wkb] {
        match general_bound_with(pot, units, energy, variant, opts) {
            Ok(r) => out.push(r),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if let Ok((s, w)) = case1_bound(pot, units, energy) {
        out.push(s);
        out.push(w);
    }
    if PhaseFunction::new(pot, units, energy, PhaseVariant::Wkb).is_ok() {
        // E touching max V passes the grid check but k vanishes at the top
        match case2_bound_with(pot, units, energy, opts) {
            Ok(r) => {
                out.push(r);
                let profile = crate::potentials::extrema::find_extrema_with(pot, units, energy, opts.extrema_grid)?;
                out.push(multi_extrema_bound(&profile)?);
            }
            Err(ScatterError::PhaseDerivativeZero { .. } | ScatterError::TurningPoint { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(first_err.unwrap_or(ScatterError::Inadmissible("no bound family applies".into())));
    }
    Ok(out)
}

/// Extrema profile at `E`, exposed for reports.
pub fn extrema_profile(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<ExtremaProfile> {
    find_extrema(pot, units, energy)
}

/// Margins of a numerical result against one report; all are `>= -slack`
/// when the bound holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dominance {
    pub t_margin: f64,
    pub r_margin: f64,
    pub alpha_margin: f64,
    pub beta_margin: f64,
}

impl Dominance {
    pub fn of(report: &BoundReport, result: &ScatteringResult) -> Self {
        Dominance {
            t_margin: result.transmission - report.t_floor,
            r_margin: report.r_cap - result.reflection,
            alpha_margin: report.alpha_cap - result.alpha.norm(),
            beta_margin: report.beta_cap - result.beta.norm(),
        }
    }

    pub fn holds(&self, slack: f64, report: &BoundReport) -> bool {
        // coefficient caps are compared relative to their size
        let rel = |cap: f64| slack * cap.abs().max(1.0);
        self.t_margin >= -slack
            && self.r_margin >= -slack
            && (self.alpha_margin >= -rel(report.alpha_cap) || report.alpha_cap.is_infinite())
            && (self.beta_margin >= -rel(report.beta_cap) || report.beta_cap.is_infinite())
    }

    pub fn worst(&self) -> f64 {
        self.t_margin
            .min(self.r_margin)
            .min(self.alpha_margin)
            .min(self.beta_margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: UnitsConfig = UnitsConfig { hbar: 1.0, mass: 0.5 };

    #[test]
    fn vartheta_examples() {
        assert_eq!(vartheta(1.5, 0.0, 2.25).unwrap(), 0.0);
        // WKB: |k'|/(2k)
        assert!((vartheta(2.0, -0.6, 4.0).unwrap() - 0.15).abs() < 1e-15);
        // constant k: |k^2 - k_inf^2| / (2 k_inf)
        assert!((vartheta(1.0, 0.0, 0.8).unwrap() - 0.1).abs() < 1e-15);
        assert!(vartheta(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn free_potential_is_unbounded_below_by_one() {
        let p = Potential::free((-4.0, 4.0)).unwrap();
        let r = general_bound(&p, &U, 1.0, PhaseVariant::ConstantK).unwrap();
        assert_eq!(r.theta_integral, 0.0);
        assert_eq!(r.t_floor, 1.0);
    }

    #[test]
    fn delta_case1_and_general() {
        let p = Potential::delta(2.0).unwrap();
        let g = general_bound(&p, &U, 1.0, PhaseVariant::ConstantK).unwrap();
        assert!((g.theta_integral - 1.0).abs() < 1e-14);
        assert!((g.t_floor - 0.41997434161402614).abs() < 1e-12);
        let (s, w) = case1_bound(&p, &U, 1.0).unwrap();
        assert!((s.theta_integral - 1.0).abs() < 1e-14);
        assert_eq!(w.r_cap, 1.0);
        assert_eq!(w.t_floor, 0.0);
        assert_eq!(w.validity, Validity::Vacuous);
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.contains("\"alpha_cap\":null"));
        assert!(json.contains("\"validity\":\"vacuous\""));
    }

    #[test]
    fn monotone_tanh_case2_is_log_ratio() {
        let p = Potential::tanh_step(0.0, 0.75, 1.0).unwrap();
        let r = case2_bound(&p, &U, 1.0).unwrap();
        assert!((r.theta_integral - 0.5 * 2f64.ln()).abs() < 1e-9);
        let m = monotonic_bound(1.0, 0.5).unwrap();
        assert!((m.t_floor - r.t_floor).abs() < 1e-9);
    }

    #[test]
    fn sech2_case2_matches_single_extremum() {
        let p = Potential::sech2(0.5, 1.0).unwrap();
        let q = case2_bound(&p, &U, 1.0).unwrap();
        let k_ext = 0.5f64.sqrt();
        assert!((q.theta_integral - (1.0 / k_ext).ln()).abs() < 1e-9);
        let s = single_extremum_bound(1.0, 1.0, k_ext).unwrap();
        assert_eq!(s.family, BoundFamily::Case2b);
        assert!((s.t_floor - q.t_floor).abs() < 1e-9);
    }

    #[test]
    fn product_form_examples() {
        let m = monotonic_bound(1.0, 2.0).unwrap();
        assert!((m.t_floor - 8.0 / 9.0).abs() < 1e-15);
        assert!((m.r_cap - 1.0 / 9.0).abs() < 1e-15);
        let s = single_extremum_bound(1.0, 1.0, 2.0).unwrap();
        assert!((s.alpha_cap - 1.25).abs() < 1e-15);
        assert!((s.beta_cap - 0.75).abs() < 1e-15);
        assert!((s.t_floor - 16.0 / 25.0).abs() < 1e-15);
        assert!((s.r_cap - 9.0 / 25.0).abs() < 1e-15);
        let g = single_extremum_bound(1.0, 4.0, 2.0).unwrap();
        assert_eq!(g.r_cap, 0.0);
        assert_eq!(g.t_floor, 1.0);
    }

    #[test]
    fn double_hump_products_match_quadrature() {
        let bump = |c: f64| crate::potentials::Shape::Sech2 {
            height: 0.5,
            width: 1.0,
            center: c,
        };
        let shape = crate::potentials::Shape::Sum(vec![bump(-2.0), bump(2.0)]);
        let p = Potential::new(shape, 0.0, 0.0, (-16.0, 16.0), 1e-10, vec![]).unwrap();
        let prof = find_extrema(&p, &U, 1.0).unwrap();
        let kinds: Vec<ExtremumKind> = prof.extrema.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![ExtremumKind::Valley, ExtremumKind::Peak, ExtremumKind::Valley]
        );
        let prod = multi_extrema_bound(&prof).unwrap();
        let quad = case2_bound(&p, &U, 1.0).unwrap();
        assert!((prod.t_floor - quad.t_floor).abs() < 1e-8, "{prof:?} {prod:?} {quad:?}");
        assert!((prod.theta_integral - quad.theta_integral).abs() < 1e-8);
    }

    #[test]
    fn reports_are_self_consistent() {
        for r in [
            BoundReport::from_theta(BoundFamily::General, 0.0, None),
            BoundReport::from_theta(BoundFamily::General, 0.37, None),
            BoundReport::from_theta(BoundFamily::General, 5.0, None),
            BoundReport::from_ratio(BoundFamily::Case2c, 3.0, 0.2),
        ] {
            assert!(r.consistency_defect() < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn family_names_roundtrip() {
        for f in BoundFamily::ALL {
            assert_eq!(f.name().parse::<BoundFamily>().unwrap(), f);
        }
    }

    #[test]
    fn energy_at_barrier_top_drops_wkb_families() {
        let pot = crate::catalog::lookup("sech2")
            .unwrap()
            .potential(&[("V_e".to_string(), 0.3)].into_iter().collect())
            .unwrap();
        let reps = admissible_reports(&pot, &U, 0.3).unwrap();
        assert!(reps.iter().all(|r| r.phase_variant != Some(PhaseVariant::Wkb)));
        assert!(reps.iter().any(|r| r.family == BoundFamily::Case1));
    }
}
