//! Shabat–Zakharov integration: position-dependent Bogolubov coefficients,
//! scattering amplitudes and transfer matrices.

mod integrate;
mod phase;
mod transfer;
mod wavefunction;

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use phase::{sz_rhs, BogolubovState, PhaseFunction, PhasePoint, PhaseVariant};
pub use transfer::{transfer_matrix, TransferMatrix};
pub use wavefunction::{reconstruct_wavefunction, WavefunctionSample};

use crate::error::{Result, ScatterError};
use crate::potentials::Potential;
use crate::units::UnitsConfig;
use integrate::{pack, propagate, unpack, Recording};

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Largest acceptable `||a|^2 - |b|^2 - 1|` before failing.
    pub max_residual: f64,
    /// Overrides the oscillation-aware step cap.
    pub h_max: Option<f64>,
    pub max_steps: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-10,
            max_residual: 1e-6,
            h_max: None,
            max_steps: 2_000_000,
        }
    }
}

impl Tolerances {
    pub fn with_rtol(rtol: f64) -> Self {
        Tolerances {
            rtol,
            atol: rtol,
            ..Tolerances::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_residual > 0.0) {
            return Err(ScatterError::InvalidParameter("tolerances must be positive".into()));
        }
        if let Some(h) = self.h_max {
            if !(h > 0.0) {
                return Err(ScatterError::InvalidParameter("h_max must be positive".into()));
            }
        }
        Ok(())
    }
}

/// One accepted integration step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub x: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub phi: f64,
    pub dphi: f64,
    pub residual: f64,
}

impl TraceRecord {
    pub fn state(&self) -> BogolubovState {
        BogolubovState {
            x: self.x,
            a: self.a,
            b: self.b,
        }
    }
}

/// Writes trace records as CSV: `x,re_a,im_a,re_b,im_b,residual`.
pub fn write_trace_csv<W: Write>(records: &[TraceRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re_a", "im_a", "re_b", "im_b", "residual"])?;
    for r in records {
        w.write_record([
            fmt_num(r.x),
            fmt_num(r.a.re),
            fmt_num(r.a.im),
            fmt_num(r.b.re),
            fmt_num(r.b.im),
            fmt_num(r.residual),
        ])?;
    }
    w.flush()
}

/// Shortest round-trip representation, so output is bit-stable.
pub fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub energy: f64,
    pub phase_variant: PhaseVariant,
    /// Coefficients referred to plane waves `e^{+-i k x}` at the left end.
    pub alpha: Complex64,
    pub beta: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub conservation_residual: f64,
    /// `phi(x_lo) - k_minus x_lo`; zero for the constant-k phase.
    pub gauge_phase: f64,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    /// Rough bound on the error of `transmission`.
    pub error_estimate: f64,
}

impl ScatteringResult {
    /// `(a, b)` at the left end in the integration basis.
    pub fn raw_coefficients(&self) -> (Complex64, Complex64) {
        let g = Complex64::from_polar(1.0, self.gauge_phase);
        (self.alpha / g, self.beta * g)
    }
}

fn run_full(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    tol: &Tolerances,
    rec: Recording<'_>,
) -> Result<ScatteringResult> {
    tol.validate()?;
    let phase = PhaseFunction::new(pot, units, energy, variant)?;
    let (x_lo, x_hi) = pot.domain();
    let y0 = pack(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        phase.k_plus() * x_hi,
    );
    let prop = propagate(&phase, x_hi, x_lo, y0, 1.0, tol, rec)?;
    if !(prop.max_residual <= tol.max_residual) {
        return Err(ScatterError::ToleranceNotMet {
            reason: format!(
                "conservation residual {:.3e} exceeds {:.3e}",
                prop.max_residual, tol.max_residual
            ),
        });
    }
    let (a, b, phi_lo) = unpack(&prop.y);
    let gauge_phase = match variant {
        PhaseVariant::ConstantK => 0.0,
        PhaseVariant::Wkb => phi_lo - phase.k_minus() * x_lo,
    };
    let g = Complex64::from_polar(1.0, gauge_phase);
    let alpha = a * g;
    let beta = b / g;
    let transmission = 1.0 / alpha.norm_sqr();
    let reflection = beta.norm_sqr() / alpha.norm_sqr();
    let error_estimate = transmission * (prop.max_residual + prop.accepted as f64 * tol.rtol.max(f64::EPSILON));
    Ok(ScatteringResult {
        energy,
        phase_variant: variant,
        alpha,
        beta,
        transmission,
        reflection,
        conservation_residual: prop.max_residual,
        gauge_phase,
        accepted_steps: prop.accepted,
        rejected_steps: prop.rejected,
        error_estimate,
    })
}

/// Integrates from the right edge of the domain to the left with Jost data
/// `(a, b) = (1, 0)` and returns `alpha = a(x_lo)`, `beta = b(x_lo)`.
pub fn integrate(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    tol: &Tolerances,
) -> Result<ScatteringResult> {
    run_full(pot, units, energy, variant, tol, Recording::Nothing)
}

/// As [`integrate`], also returning every accepted step (right to left).
pub fn integrate_traced(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    tol: &Tolerances,
) -> Result<(ScatteringResult, Vec<TraceRecord>)> {
    let mut buf = Vec::new();
    let r = run_full(pot, units, energy, variant, tol, Recording::Steps(&mut buf))?;
    Ok((r, buf))
}

/// As [`integrate`], also returning the state at each of `xs`, in the
/// order visited (right to left).
pub fn integrate_sampled(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    tol: &Tolerances,
    xs: &[f64],
) -> Result<(ScatteringResult, Vec<TraceRecord>)> {
    let mut buf = Vec::new();
    let r = run_full(pot, units, energy, variant, tol, Recording::At(xs, &mut buf))?;
    Ok((r, buf))
}

/// Picks the constant-k phase when the asymptotes agree and WKB otherwise.
pub fn default_variant(pot: &Potential) -> PhaseVariant {
    if pot.has_symmetric_asymptotes() {
        PhaseVariant::ConstantK
    } else {
        PhaseVariant::Wkb
    }
}
