use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::potentials::{asymptotic_wavenumbers, Potential};
use crate::quadrature::integrate_adaptive;
use crate::units::UnitsConfig;

/// Choice of auxiliary phase `phi(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseVariant {
    /// `phi = k_inf x`; needs equal asymptotes.
    #[default]
    ConstantK,
    /// `phi' = k(x)`; needs `E > V` everywhere.
    Wkb,
}

impl fmt::Display for PhaseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseVariant::ConstantK => "constant_k",
            PhaseVariant::Wkb => "wkb",
        })
    }
}

impl FromStr for PhaseVariant {
    type Err = ScatterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "constant_k" | "constantk" | "constant" => Ok(PhaseVariant::ConstantK),
            "wkb" => Ok(PhaseVariant::Wkb),
            other => Err(ScatterError::InvalidParameter(format!(
                "unknown phase variant {other:?} (expected constant_k or wkb)"
            ))),
        }
    }
}

/// Local phase data: `phi'`, `phi''` and `k^2` at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub dphi: f64,
    pub ddphi: f64,
    pub ksq: f64,
}

/// Position-dependent Bogolubov coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogolubovState {
    pub x: f64,
    pub a: Complex64,
    pub b: Complex64,
}

impl BogolubovState {
    /// `|a|^2 - |b|^2 - 1`.
    pub fn conservation_defect(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr() - 1.0
    }
}

/// Right-hand side of the coupled first-order system for `(a, b)`.
pub fn sz_rhs(state: &BogolubovState, phi: f64, p: &PhasePoint) -> Result<(Complex64, Complex64)> {
    if !(p.dphi != 0.0 && p.dphi.is_finite()) {
        return Err(ScatterError::PhaseDerivativeZero { x: state.x });
    }
    Ok(rhs_unchecked(state.a, state.b, phi, p))
}

#[inline]
pub(crate) fn rhs_unchecked(a: Complex64, b: Complex64, phi: f64, p: &PhasePoint) -> (Complex64, Complex64) {
    let (s, c) = (2.0 * phi).sin_cos();
    let em = Complex64::new(c, -s);
    let ep = Complex64::new(c, s);
    let i = Complex64::i();
    let delta = p.ksq - p.dphi * p.dphi;
    let inv = 0.5 / p.dphi;
    let be = b * em;
    let ae = a * ep;
    let da = (be * p.ddphi + i * delta * (a + be)) * inv;
    let db = (ae * p.ddphi - i * delta * (b + ae)) * inv;
    (da, db)
}

/// Auxiliary phase bound to a potential and an energy.
#[derive(Debug, Clone)]
pub struct PhaseFunction<'a> {
    pot: &'a Potential,
    units: UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    k_minus: f64,
    k_plus: f64,
    k_max: f64,
}

const SCAN_POINTS: usize = 8192;

impl<'a> PhaseFunction<'a> {
    /// Checks admissibility of `variant` at energy `E`.
    pub fn new(pot: &'a Potential, units: &UnitsConfig, energy: f64, variant: PhaseVariant) -> Result<Self> {
        if variant == PhaseVariant::ConstantK && !pot.has_symmetric_asymptotes() {
            return Err(ScatterError::AsymmetricAsymptotes {
                v_minus: pot.v_minus_inf(),
                v_plus: pot.v_plus_inf(),
            });
        }
        let (k_minus, k_plus) = asymptotic_wavenumbers(pot, units, energy)?;
        let (lo, hi) = pot.domain();
        let mut v_min = f64::INFINITY;
        for i in 0..SCAN_POINTS {
            let x = lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64;
            v_min = v_min.min(pot.evaluate(x));
        }
        for b in pot.breakpoints() {
            v_min = v_min
                .min(pot.evaluate_in(b, f64::NEG_INFINITY, b))
                .min(pot.evaluate_in(b, b, f64::INFINITY));
        }
        if variant == PhaseVariant::Wkb {
            if !pot.spikes().is_empty() {
                return Err(ScatterError::Inadmissible(
                    "the WKB phase is undefined across delta spikes".into(),
                ));
            }
            let (x_max, v_max) = pot.max_on_grid(SCAN_POINTS);
            if v_max >= energy {
                return Err(ScatterError::TurningPoint {
                    x: x_max,
                    potential: v_max,
                    energy,
                });
            }
        }
        let k_max = units.ksq(energy, v_min).max(0.0).sqrt().max(k_minus).max(k_plus);
        Ok(PhaseFunction {
            pot,
            units: *units,
            energy,
            variant,
            k_minus,
            k_plus,
            k_max,
        })
    }

    pub fn variant(&self) -> PhaseVariant {
        self.variant
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn units(&self) -> &UnitsConfig {
        &self.units
    }

    pub fn potential(&self) -> &Potential {
        self.pot
    }

    pub fn k_minus(&self) -> f64 {
        self.k_minus
    }

    pub fn k_plus(&self) -> f64 {
        self.k_plus
    }

    /// Largest local wavenumber on the domain.
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// Phase data inside the segment `(lo, hi)` between interfaces.
    #[inline]
    pub fn point_in(&self, x: f64, lo: f64, hi: f64) -> PhasePoint {
        let v = self.pot.evaluate_in(x, lo, hi);
        let ksq = self.units.ksq(self.energy, v);
        match self.variant {
            PhaseVariant::ConstantK => PhasePoint {
                dphi: self.k_plus,
                ddphi: 0.0,
                ksq,
            },
            PhaseVariant::Wkb => {
                if ksq <= 0.0 {
                    return PhasePoint {
                        dphi: 0.0,
                        ddphi: 0.0,
                        ksq,
                    };
                }
                let k = ksq.sqrt();
                let dv = self.pot.derivative_in(x, lo, hi);
                PhasePoint {
                    dphi: k,
                    ddphi: -0.5 * self.units.k2_per_energy() * dv / k,
                    ksq,
                }
            }
        }
    }

    pub fn point(&self, x: f64) -> PhasePoint {
        self.point_in(x, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn dphi(&self, x: f64) -> f64 {
        self.point(x).dphi
    }

    pub fn ddphi(&self, x: f64) -> f64 {
        self.point(x).ddphi
    }

    /// `phi(x)`, normalised so that `phi(x_hi) = k_plus * x_hi`.
    pub fn phi(&self, x: f64) -> f64 {
        let x_hi = self.pot.domain().1;
        match self.variant {
            PhaseVariant::ConstantK => self.k_plus * x,
            PhaseVariant::Wkb => {
                let k = |y: f64| self.units.ksq(self.energy, self.pot.evaluate(y)).max(0.0).sqrt();
                let r = integrate_adaptive(&k, x, x_hi, &self.pot.breakpoints(), 1e-13, 1e-14, 10_000);
                self.k_plus * x_hi - r.value
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_propagation_has_zero_rhs() {
        let s = BogolubovState {
            x: 0.3,
            a: c(1.2, 0.4),
            b: c(-0.3, 0.7),
        };
        let p = PhasePoint {
            dphi: 1.5,
            ddphi: 0.0,
            ksq: 2.25,
        };
        let (da, db) = sz_rhs(&s, 0.9, &p).unwrap();
        assert_eq!(da, c(0.0, 0.0));
        assert_eq!(db, c(0.0, 0.0));
    }

    #[test]
    fn wkb_rhs_reduces_to_reflection_term() {
        let s = BogolubovState {
            x: 0.0,
            a: c(0.8, -0.1),
            b: c(0.2, 0.3),
        };
        let p = PhasePoint {
            dphi: 1.3,
            ddphi: -0.4,
            ksq: 1.69,
        };
        let phi = 0.77;
        let (da, db) = sz_rhs(&s, phi, &p).unwrap();
        let expect_a = s.b * Complex64::from_polar(1.0, -2.0 * phi) * (p.ddphi / (2.0 * p.dphi));
        let expect_b = s.a * Complex64::from_polar(1.0, 2.0 * phi) * (p.ddphi / (2.0 * p.dphi));
        assert!((da - expect_a).norm() < 1e-15);
        assert!((db - expect_b).norm() < 1e-15);
    }

    #[test]
    fn constant_k_rhs_coefficients() {
        // phi = k x, V - V_inf = v: da/dx = -i m v / (hbar^2 k) (a + b e^{-2i phi})
        let u = UnitsConfig::default();
        let (k, v) = (1.1, 0.37);
        let s = BogolubovState {
            x: 0.0,
            a: c(1.0, 0.2),
            b: c(0.1, -0.5),
        };
        let p = PhasePoint {
            dphi: k,
            ddphi: 0.0,
            ksq: k * k - u.k2_per_energy() * v,
        };
        let phi = 0.4;
        let (da, db) = sz_rhs(&s, phi, &p).unwrap();
        let coef = Complex64::new(0.0, -u.mass * v / (u.hbar * u.hbar * k));
        let e = Complex64::from_polar(1.0, -2.0 * phi);
        assert!((da - coef * (s.a + s.b * e)).norm() < 1e-14);
        assert!((db + coef * (s.b + s.a * e.conj())).norm() < 1e-14);
    }

    #[test]
    fn zero_phase_derivative_rejected() {
        let s = BogolubovState {
            x: 2.0,
            a: c(1.0, 0.0),
            b: c(0.0, 0.0),
        };
        let p = PhasePoint {
            dphi: 0.0,
            ddphi: 0.0,
            ksq: 1.0,
        };
        assert_eq!(sz_rhs(&s, 0.0, &p), Err(ScatterError::PhaseDerivativeZero { x: 2.0 }));
    }

    #[test]
    fn admissibility() {
        let u = UnitsConfig::default();
        let step = Potential::tanh_step(0.0, 0.5, 1.0).unwrap();
        assert!(matches!(
            PhaseFunction::new(&step, &u, 1.0, PhaseVariant::ConstantK),
            Err(ScatterError::AsymmetricAsymptotes { .. })
        ));
        let bump = Potential::sech2(2.0, 1.0).unwrap();
        assert!(matches!(
            PhaseFunction::new(&bump, &u, 1.0, PhaseVariant::Wkb),
            Err(ScatterError::TurningPoint { .. })
        ));
        assert!(PhaseFunction::new(&bump, &u, 1.0, PhaseVariant::ConstantK).is_ok());
    }

    #[test]
    fn wkb_phase_is_anchored_at_right_edge() {
        let u = UnitsConfig::default();
        let step = Potential::tanh_step(0.0, 0.75, 1.0).unwrap();
        let ph = PhaseFunction::new(&step, &u, 1.0, PhaseVariant::Wkb).unwrap();
        let hi = step.domain().1;
        assert!((ph.phi(hi) - 0.5 * hi).abs() < 1e-12);
        // d phi / dx = k
        let x = 0.3;
        let h = 1e-4;
        let d = (ph.phi(x + h) - ph.phi(x - h)) / (2.0 * h);
        assert!((d - ph.dphi(x)).abs() < 1e-7);
        assert_eq!("wkb".parse::<PhaseVariant>().unwrap(), PhaseVariant::Wkb);
    }
}
