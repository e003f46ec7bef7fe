//! Perturbative estimates of the Bogolubov coefficient `beta`.
//!
//! All estimates use the engine's convention: Jost data `(a, b) = (1, 0)` on
//! the right, coefficients referred to `e^{+-i k x}` on the left.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{PhaseFunction, PhaseVariant};
use crate::error::{Result, ScatterError};
use crate::potentials::Potential;
use crate::quadrature::{gk15, gk15_nodes, panel_edges};
use crate::units::UnitsConfig;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApproxMethod {
    Born,
    DistortedBorn,
    AboveBarrier,
}

impl ApproxMethod {
    pub const ALL: [ApproxMethod; 3] = [
        ApproxMethod::Born,
        ApproxMethod::DistortedBorn,
        ApproxMethod::AboveBarrier,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ApproxMethod::Born => "Born",
            ApproxMethod::DistortedBorn => "DistortedBorn",
            ApproxMethod::AboveBarrier => "AboveBarrier",
        }
    }
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ApproxMethod {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        ApproxMethod::ALL
            .iter()
            .copied()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ScatterError::InvalidParameter(format!("unknown approximation {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub method: ApproxMethod,
    pub beta: C,
    pub magnitude: f64,
}

impl BetaEstimate {
    fn new(method: ApproxMethod, beta: C) -> Self {
        BetaEstimate {
            method,
            beta,
            magnitude: beta.norm(),
        }
    }
}

/// Quadrature nodes over a domain with a running integral of `g`.
struct Grid {
    /// `(x, weight, ∫_lo^x g)`
    nodes: Vec<(f64, f64, f64)>,
    /// `∫_lo^p g` at each panel edge in `breaks`, left to right.
    at_breaks: Vec<(f64, f64)>,
    total: f64,
}

/// Fixed GK15 panels no wider than `max_width`, split at `breaks`; the
/// running integral of `g` is carried along panel by panel.
fn cumulative_grid<G: Fn(f64, f64, f64) -> f64>(g: &G, lo: f64, hi: f64, breaks: &[f64], max_width: f64) -> Grid {
    let mut nodes = Vec::new();
    let mut at_breaks = Vec::new();
    let mut acc = 0.0;
    let mut edges: Vec<f64> = vec![lo];
    edges.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    for (p, q) in panel_edges(lo, hi, breaks, max_width) {
        let i = edges.partition_point(|&e| e <= 0.5 * (p + q)).clamp(1, edges.len() - 1);
        let (a, b) = (edges[i - 1], edges[i]);
        if p == a && p > lo {
            at_breaks.push((p, acc));
        }
        let gs = |x: f64| g(x, a, b);
        for (x, w) in gk15_nodes(p, q) {
            let partial: f64 = gk15(&gs, p, x).0;
            nodes.push((x, w, acc + partial));
        }
        acc += gk15(&gs, p, q).0;
    }
    Grid {
        nodes,
        at_breaks,
        total: acc,
    }
}

fn check_born(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<f64> {
    if !pot.has_symmetric_asymptotes() {
        return Err(ScatterError::AsymmetricAsymptotes {
            v_minus: pot.v_minus_inf(),
            v_plus: pot.v_plus_inf(),
        });
    }
    let v_inf = pot.v_minus_inf();
    let ksq = units.ksq(energy, v_inf);
    if !(ksq > 0.0) {
        return Err(ScatterError::NoPropagatingMode {
            energy,
            asymptote: v_inf,
        });
    }
    Ok(ksq.sqrt())
}

/// First Born approximation, `beta = -i (m / hbar^2 k) ∫ (V - V_inf) e^{2ikx} dx`.
pub fn born_beta(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<BetaEstimate> {
    let k = check_born(pot, units, energy)?;
    let v_inf = pot.v_minus_inf();
    let scale = units.k2_per_energy() / (2.0 * k);
    let (lo, hi) = pot.domain();
    let mut sum = C::new(0.0, 0.0);
    for (p, q) in panel_edges(lo, hi, &pot.interfaces(), PI / (8.0 * k)) {
        let f = |x: f64| C::from_polar(pot.evaluate_in(x, p, q) - v_inf, 2.0 * k * x);
        sum += gk15(&f, p, q).0;
    }
    for s in pot.spikes() {
        sum += C::from_polar(s.strength, 2.0 * k * s.location);
    }
    Ok(BetaEstimate::new(ApproxMethod::Born, -C::i() * scale * sum))
}

/// Distorted Born approximation: the Born integrand dressed with the phase
/// `Psi(x) = (m / hbar^2 k) ∫_lo^x (V - V_inf)`,
/// `beta = -i e^{i Psi_tot} ∫ c e^{2ikx - 2i Psi} dx`, `c = Psi'`.
///
/// A spike is taken at the midpoint of its phase jump.
pub fn distorted_born_beta(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<BetaEstimate> {
    let k = check_born(pot, units, energy)?;
    let v_inf = pot.v_minus_inf();
    let scale = units.k2_per_energy() / (2.0 * k);
    let (lo, hi) = pot.domain();
    let c = |x: f64, a: f64, b: f64| scale * (pot.evaluate_in(x, a, b) - v_inf);
    let interfaces = pot.interfaces();
    let grid = cumulative_grid(&c, lo, hi, &interfaces, PI / (8.0 * k));
    // phase offset from spikes to the left of each point
    let spike_phase = |x: f64, inclusive: bool| -> f64 {
        pot.spikes()
            .iter()
            .filter(|s| s.location < x || (inclusive && s.location == x))
            .map(|s| scale * s.strength)
            .sum()
    };
    let mut sum = C::new(0.0, 0.0);
    for &(x, w, psi) in &grid.nodes {
        let psi = psi + spike_phase(x, false);
        let cx = scale * (pot.evaluate(x) - v_inf);
        sum += w * cx * C::from_polar(1.0, 2.0 * k * x - 2.0 * psi);
    }
    for s in pot.spikes() {
        let smooth = grid
            .at_breaks
            .iter()
            .find(|(p, _)| *p == s.location)
            .map(|(_, v)| *v)
            .unwrap_or(0.0);
        let cs = scale * s.strength;
        let psi = smooth + spike_phase(s.location, false) + 0.5 * cs;
        sum += cs * C::from_polar(1.0, 2.0 * k * s.location - 2.0 * psi);
    }
    let psi_tot = grid.total + spike_phase(hi, true);
    let beta = -C::i() * C::from_polar(1.0, psi_tot) * sum;
    Ok(BetaEstimate::new(ApproxMethod::DistortedBorn, beta))
}

/// Reflection above the barrier with the WKB phase,
/// `b(x_lo) = -½ ∫ (k'/k) e^{2i phi} dx`, `phi(x) = k_+ x_hi - ∫_x^{x_hi} k`,
/// referred to the left asymptotic plane waves. Jumps of `k` contribute
/// `-½ ln(k_r / k_l) e^{2i phi}`.
pub fn above_barrier_beta(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<BetaEstimate> {
    let phase = PhaseFunction::new(pot, units, energy, PhaseVariant::Wkb)?;
    let (lo, hi) = pot.domain();
    let kfun = |x: f64, a: f64, b: f64| phase.point_in(x, a, b).dphi;
    let interfaces = pot.interfaces();
    let grid = cumulative_grid(&kfun, lo, hi, &interfaces, PI / (8.0 * phase.k_max()));
    let phi_of = |cum: f64| phase.k_plus() * hi - (grid.total - cum);
    let mut sum = C::new(0.0, 0.0);
    let mut edges = vec![lo];
    edges.extend(interfaces.iter().copied());
    edges.push(hi);
    for &(x, w, cum) in &grid.nodes {
        let i = edges.partition_point(|&e| e <= x).clamp(1, edges.len() - 1);
        let p = phase.point_in(x, edges[i - 1], edges[i]);
        let log_deriv = p.ddphi / p.dphi;
        sum += w * log_deriv * C::from_polar(1.0, 2.0 * phi_of(cum));
    }
    for &(x, cum) in &grid.at_breaks {
        let i = edges.iter().position(|&e| e == x).unwrap_or(0);
        if i == 0 || i + 1 >= edges.len() {
            continue;
        }
        let left = phase.point_in(x, edges[i - 1], x).dphi;
        let right = phase.point_in(x, x, edges[i + 1]).dphi;
        sum += (right / left).ln() * C::from_polar(1.0, 2.0 * phi_of(cum));
    }
    let b = -0.5 * sum;
    let gauge = phi_of(0.0) - phase.k_minus() * lo;
    let beta = b * C::from_polar(1.0, -gauge);
    Ok(BetaEstimate::new(ApproxMethod::AboveBarrier, beta))
}

/// All estimates that apply at `E`, in the order Born, distorted Born,
/// above-barrier.
pub fn all_estimates(pot: &Potential, units: &UnitsConfig, energy: f64) -> Vec<Result<BetaEstimate>> {
    vec![
        born_beta(pot, units, energy),
        distorted_born_beta(pot, units, energy),
        above_barrier_beta(pot, units, energy),
    ]
}
