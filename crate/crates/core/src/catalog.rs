//! Closed-form transmission and reflection results used as oracles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Result, ScatterError};
use crate::potentials::Potential;
use crate::units::UnitsConfig;

pub type Params = BTreeMap<String, f64>;

fn require_energy_above(energy: f64, floor: f64) -> Result<()> {
    if energy > floor {
        Ok(())
    } else {
        Err(ScatterError::NoPropagatingMode {
            energy,
            asymptote: floor,
        })
    }
}

fn require_over_barrier(energy: f64, barrier: f64) -> Result<()> {
    if energy > barrier {
        Ok(())
    } else {
        Err(ScatterError::UnderBarrier { energy, barrier })
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Single delta spike `strength * delta(x)`.
pub fn delta_t(strength: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_energy_above(energy, 0.0)?;
    let h2 = units.hbar * units.hbar;
    Ok(1.0 / (1.0 + units.mass * strength * strength / (2.0 * h2 * energy)))
}

/// Two spikes of equal strength a distance `separation` apart.
pub fn double_delta_t(strength: f64, separation: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_energy_above(energy, 0.0)?;
    require_positive("separation", separation)?;
    let k = units.ksq(energy, 0.0).sqrt();
    let g = units.k2_per_energy() * strength / k;
    let kl = k * separation;
    let bracket = g * kl.cos() + 0.5 * g * g * kl.sin();
    Ok(1.0 / (1.0 + bracket * bracket))
}

/// Square barrier of height `v_e` on `(0, width)`, above the barrier.
pub fn square_barrier_t(v_e: f64, width: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_energy_above(energy, 0.0)?;
    require_over_barrier(energy, v_e)?;
    require_positive("width", width)?;
    let q = units.ksq(energy, v_e).sqrt();
    let s = (q * width).sin();
    let num = energy * (energy - v_e);
    Ok(num / (num + 0.25 * v_e * v_e * s * s))
}

/// Reflection probability of the smoothed step
/// `(v_minus + v_plus)/2 + (v_plus - v_minus)/2 tanh(x / width)`.
pub fn tanh_step_r(v_minus: f64, v_plus: f64, width: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_energy_above(energy, v_minus.max(v_plus))?;
    require_positive("width", width)?;
    let km = units.ksq(energy, v_minus).sqrt();
    let kp = units.ksq(energy, v_plus).sqrt();
    if km == kp {
        return Ok(0.0);
    }
    let c = 0.5 * PI * width;
    let r = (c * (km - kp)).sinh() / (c * (km + kp)).sinh();
    Ok(r * r)
}

pub fn tanh_step_t(v_minus: f64, v_plus: f64, width: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    tanh_step_r(v_minus, v_plus, width, energy, units).map(|r| 1.0 - r)
}

/// `v_e sech^2(x / width)`.
pub fn sech2_t(v_e: f64, width: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_energy_above(energy, 0.0)?;
    require_over_barrier(energy, v_e)?;
    require_positive("width", width)?;
    let k = units.ksq(energy, 0.0).sqrt();
    let sh = (PI * k * width).sinh();
    let sh2 = sh * sh;
    let disc = 1.0 - 4.0 * units.k2_per_energy() * v_e * width * width;
    let c2 = if disc >= 0.0 {
        (0.5 * PI * disc.sqrt()).cos().powi(2)
    } else {
        (0.5 * PI * (-disc).sqrt()).cosh().powi(2)
    };
    if sh2.is_infinite() {
        return Ok(1.0);
    }
    Ok(sh2 / (sh2 + c2))
}

/// Piecewise constant `v1 | v2 on (0, width) | v3`.
pub fn asymmetric_well_t(v1: f64, v2: f64, v3: f64, width: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_energy_above(energy, v1.max(v3))?;
    require_over_barrier(energy, v2)?;
    require_positive("width", width)?;
    let k1 = units.ksq(energy, v1).sqrt();
    let k2 = units.ksq(energy, v2).sqrt();
    let k3 = units.ksq(energy, v3).sqrt();
    let s = (k2 * width).sin();
    let num = 4.0 * k1 * k2 * k2 * k3;
    let den = (k1 + k3).powi(2) * k2 * k2 + (k1 * k1 * k3 * k3 + k2 * k2 * (k2 * k2 - k1 * k1 - k3 * k3)) * s * s;
    Ok(num / den)
}

/// Pöschl–Teller step-well with `V(-inf) = v0 e^{-2 mu}`, `V(+inf) = v0 e^{2 mu}`
/// and its extremum `V = 0` at the origin.
pub fn poschl_teller_t(v0: f64, mu: f64, width: f64, energy: f64, units: &UnitsConfig) -> Result<f64> {
    require_positive("width", width)?;
    if !(mu.abs() <= MAX_PT_MU) {
        return Err(ScatterError::InvalidParameter(format!(
            "|mu| must not exceed {MAX_PT_MU}, got {mu}"
        )));
    }
    let vm = v0 * (-2.0 * mu).exp();
    let vp = v0 * (2.0 * mu).exp();
    require_energy_above(energy, vm.max(vp))?;
    let km = units.ksq(energy, vm).sqrt();
    let kp = units.ksq(energy, vp).sqrt();
    let arg = 1.0 + 4.0 * units.k2_per_energy() * v0 * width * width * mu.cosh().powi(2);
    let c = if arg >= 0.0 {
        (PI * arg.sqrt()).cos()
    } else {
        (PI * (-arg).sqrt()).cosh()
    };
    let a = PI * km * width;
    let b = PI * kp * width;
    let den = (a + b).cosh() + c;
    if den.is_infinite() {
        // large-argument limit: 2 sinh a sinh b / cosh(a+b) -> 1
        return Ok(1.0 - (-2.0 * a.min(b)).exp());
    }
    Ok(2.0 * a.sinh() * b.sinh() / den)
}

/// Beyond this the Pöschl–Teller parametrisation degenerates numerically.
pub const MAX_PT_MU: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub doc: &'static str,
}

/// One solvable potential: parameters, constructor and exact transmission.
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    build: fn(&Params) -> Result<Potential>,
    exact: fn(&Params, f64, &UnitsConfig) -> Result<f64>,
    // lowest energy at which both the formula and the real-phase engine apply
    floor: fn(&Params) -> f64,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry").field("name", &self.name).finish()
    }
}

fn p(params: &Params, key: &str) -> f64 {
    params[key]
}

impl CatalogEntry {
    /// Defaults overridden by `overrides`; unknown names are rejected.
    pub fn resolve(&self, overrides: &Params) -> Result<Params> {
        let mut out: Params = self.params.iter().map(|s| (s.name.to_string(), s.default)).collect();
        for (k, v) in overrides {
            if !out.contains_key(k) {
                let known: Vec<&str> = self.params.iter().map(|s| s.name).collect();
                return Err(ScatterError::InvalidParameter(format!(
                    "{} has no parameter {k:?} (known: {})",
                    self.name,
                    known.join(", ")
                )));
            }
            if !v.is_finite() {
                return Err(ScatterError::InvalidParameter(format!("{k} must be finite")));
            }
            out.insert(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn defaults(&self) -> Params {
        self.resolve(&Params::new()).expect("defaults are valid")
    }

    pub fn potential(&self, params: &Params) -> Result<Potential> {
        let params = self.resolve(params)?;
        (self.build)(&params)
    }

    pub fn exact_t(&self, params: &Params, energy: f64, units: &UnitsConfig) -> Result<f64> {
        let params = self.resolve(params)?;
        let t = (self.exact)(&params, energy, units)?;
        Ok(t.clamp(0.0, 1.0))
    }

    pub fn exact_r(&self, params: &Params, energy: f64, units: &UnitsConfig) -> Result<f64> {
        self.exact_t(params, energy, units).map(|t| 1.0 - t)
    }

    /// Checks that `(E, params)` lie where the closed form applies.
    pub fn validate(&self, params: &Params, energy: f64, units: &UnitsConfig) -> Result<()> {
        self.exact_t(params, energy, units).map(|_| ())
    }

    /// Lowest energy (exclusive) at which the numerical engine can run
    /// without a turning point.
    pub fn energy_floor(&self, params: &Params) -> Result<f64> {
        let params = self.resolve(params)?;
        Ok((self.floor)(&params))
    }

    /// `count` energies spanning `(floor, floor + span]`, avoiding the floor itself.
    pub fn energy_grid(&self, params: &Params, span: f64, count: usize) -> Result<Vec<f64>> {
        let floor = self.energy_floor(params)?;
        let lo = floor + 0.02 * span;
        let hi = floor + span;
        Ok((0..count)
            .map(|i| {
                if count == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect())
    }
}

const DELTA_PARAMS: &[ParamSpec] = &[ParamSpec {
    name: "strength",
    default: 2.0,
    doc: "spike strength (energy x length)",
}];

const DOUBLE_DELTA_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "strength",
        default: 1.0,
        doc: "strength of each spike",
    },
    ParamSpec {
        name: "L",
        default: 1.0,
        doc: "spike separation",
    },
];

const SQUARE_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "V_e",
        default: 0.5,
        doc: "barrier height",
    },
    ParamSpec {
        name: "L",
        default: 1.0,
        doc: "barrier width",
    },
];

const TANH_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "V_minus",
        default: 0.0,
        doc: "left asymptote",
    },
    ParamSpec {
        name: "V_plus",
        default: 0.75,
        doc: "right asymptote",
    },
    ParamSpec {
        name: "L",
        default: 1.0,
        doc: "smoothing length",
    },
];

const SECH2_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "V_e",
        default: 0.1,
        doc: "peak height (negative for a well)",
    },
    ParamSpec {
        name: "L",
        default: 1.0,
        doc: "width",
    },
];

const WELL_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "V1",
        default: 0.0,
        doc: "left level",
    },
    ParamSpec {
        name: "V2",
        default: -3.0,
        doc: "level on (0, L)",
    },
    ParamSpec {
        name: "V3",
        default: 0.0,
        doc: "right level",
    },
    ParamSpec {
        name: "L",
        default: 1.0,
        doc: "width",
    },
];

const PT_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "V0",
        default: -0.2,
        doc: "scale; asymptotes are V0 exp(-+2 mu)",
    },
    ParamSpec {
        name: "mu",
        default: 0.3,
        doc: "asymmetry",
    },
    ParamSpec {
        name: "L",
        default: 1.0,
        doc: "width",
    },
];

static CATALOG: [CatalogEntry; 7] = [
    CatalogEntry {
        name: "delta",
        description: "single delta spike at the origin",
        params: DELTA_PARAMS,
        build: |q| Potential::delta(p(q, "strength")),
        exact: |q, e, u| delta_t(p(q, "strength"), e, u),
        floor: |_| 0.0,
    },
    CatalogEntry {
        name: "double_delta",
        description: "two equal delta spikes at -L/2 and L/2",
        params: DOUBLE_DELTA_PARAMS,
        build: |q| Potential::double_delta(p(q, "strength"), p(q, "L")),
        exact: |q, e, u| double_delta_t(p(q, "strength"), p(q, "L"), e, u),
        floor: |_| 0.0,
    },
    CatalogEntry {
        name: "square_barrier",
        description: "square barrier V_e on (0, L)",
        params: SQUARE_PARAMS,
        build: |q| Potential::square_barrier(p(q, "V_e"), p(q, "L")),
        exact: |q, e, u| square_barrier_t(p(q, "V_e"), p(q, "L"), e, u),
        floor: |q| p(q, "V_e").max(0.0),
    },
    CatalogEntry {
        name: "tanh_step",
        description: "smoothed step V_minus -> V_plus over tanh(x/L)",
        params: TANH_PARAMS,
        build: |q| Potential::tanh_step(p(q, "V_minus"), p(q, "V_plus"), p(q, "L")),
        exact: |q, e, u| tanh_step_t(p(q, "V_minus"), p(q, "V_plus"), p(q, "L"), e, u),
        floor: |q| p(q, "V_minus").max(p(q, "V_plus")),
    },
    CatalogEntry {
        name: "sech2",
        description: "V_e sech^2(x/L)",
        params: SECH2_PARAMS,
        build: |q| Potential::sech2(p(q, "V_e"), p(q, "L")),
        exact: |q, e, u| sech2_t(p(q, "V_e"), p(q, "L"), e, u),
        floor: |q| p(q, "V_e").max(0.0),
    },
    CatalogEntry {
        name: "asymmetric_well",
        description: "V1 for x<0, V2 on (0, L), V3 for x>L",
        params: WELL_PARAMS,
        build: |q| Potential::asymmetric_well(p(q, "V1"), p(q, "V2"), p(q, "V3"), p(q, "L")),
        exact: |q, e, u| asymmetric_well_t(p(q, "V1"), p(q, "V2"), p(q, "V3"), p(q, "L"), e, u),
        floor: |q| p(q, "V1").max(p(q, "V2")).max(p(q, "V3")),
    },
    CatalogEntry {
        name: "poschl_teller",
        description: "Poschl-Teller step-well with V(0) = 0",
        params: PT_PARAMS,
        build: |q| Potential::poschl_teller(p(q, "V0"), p(q, "mu"), p(q, "L")),
        exact: |q, e, u| poschl_teller_t(p(q, "V0"), p(q, "mu"), p(q, "L"), e, u),
        floor: |q| {
            let v0 = p(q, "V0");
            let mu = p(q, "mu");
            (v0 * (-2.0 * mu).exp()).max(v0 * (2.0 * mu).exp()).max(0.0)
        },
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
        ScatterError::InvalidParameter(format!(
            "unknown catalog potential {name:?} (known: {})",
            names.join(", ")
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: UnitsConfig = UnitsConfig { hbar: 1.0, mass: 0.5 };

    #[test]
    fn delta_examples() {
        assert_eq!(delta_t(0.0, 1.0, &U).unwrap(), 1.0);
        assert!((delta_t(2.0, 1.0, &U).unwrap() - 0.5).abs() < 1e-15);
        assert!(delta_t(2.0, 0.0, &U).is_err());
    }

    #[test]
    fn double_delta_examples() {
        assert_eq!(double_delta_t(0.0, 1.0, 1.0, &U).unwrap(), 1.0);
        // oracle value from a plane-wave matching product
        let t = double_delta_t(1.0, 1.0, 1.0, &U).unwrap();
        assert!((t - 0.5198603146522).abs() < 1e-12);
        // kL = pi: the sine term drops out
        let e = 1.0;
        let t = double_delta_t(1.0, PI, e, &U).unwrap();
        assert!((t - 1.0 / (1.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn square_barrier_examples() {
        assert_eq!(square_barrier_t(0.0, 1.0, 1.0, &U).unwrap(), 1.0);
        let q = 0.5f64.sqrt();
        let t = square_barrier_t(0.5, PI / q, 1.0, &U).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        let t = square_barrier_t(0.5, 0.5 * PI / q, 1.0, &U).unwrap();
        assert!((t - 8.0 / 9.0).abs() < 1e-15);
        assert!(matches!(
            square_barrier_t(1.0, 1.0, 1.0, &U),
            Err(ScatterError::UnderBarrier { .. })
        ));
    }

    #[test]
    fn tanh_examples() {
        assert_eq!(tanh_step_r(0.3, 0.3, 1.0, 1.0, &U).unwrap(), 0.0);
        let r = tanh_step_r(0.0, 0.75, 1e-6, 1.0, &U).unwrap();
        assert!((r - 1.0 / 9.0).abs() < 1e-10);
        // independent ODE oracle
        let r = tanh_step_r(0.0, 0.75, 1.0, 1.0, &U).unwrap();
        assert!((r - 0.027608582822).abs() < 1e-9);
    }

    #[test]
    fn sech2_examples() {
        assert!((sech2_t(0.0, 1.0, 1.0, &U).unwrap() - 1.0).abs() < 1e-15);
        // 8 m V_e L^2 / hbar^2 = 1
        let t = sech2_t(0.25, 1.0, 1.0, &U).unwrap();
        assert!((t - (PI).tanh().powi(2)).abs() < 1e-14);
        let t = sech2_t(0.1, 1.0, 1.0, &U).unwrap();
        assert!((t - 0.9990995164576).abs() < 1e-10);
        // continuation branch stays in [0, 1]
        let t = sech2_t(3.0, 1.0, 4.0, &U).unwrap();
        assert!(t > 0.0 && t < 1.0);
    }

    #[test]
    fn asymmetric_well_examples() {
        assert!((asymmetric_well_t(0.3, 0.3, 0.3, 1.0, 1.0, &U).unwrap() - 1.0).abs() < 1e-14);
        // k1 = 1, k2 = 2, k3 = 1 at E = 1 needs V2 = -3
        let t = asymmetric_well_t(0.0, -3.0, 0.0, 0.25 * PI, 1.0, &U).unwrap();
        assert!((t - 16.0 / 25.0).abs() < 1e-14);
        let t = asymmetric_well_t(0.0, -3.0, -3.0, 0.5 * PI, 1.0, &U).unwrap();
        assert!((t - 4.0 * 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn poschl_teller_examples() {
        let t = poschl_teller_t(-0.2, 0.3, 1.0, 1.0, &U).unwrap();
        assert!((t - 0.997197284324293).abs() < 1e-10);
        // symmetric, cos term = -1: reflectionless
        let t = poschl_teller_t(0.0, 0.0, 1.0, 0.7, &U).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
        assert!(poschl_teller_t(1.0, 50.0, 1.0, 1.0, &U).is_err());
    }

    #[test]
    fn entries_resolve_and_build() {
        for e in catalog() {
            let params = e.defaults();
            let pot = e.potential(&params).unwrap();
            let grid = e.energy_grid(&params, 3.0, 5).unwrap();
            for en in grid {
                let t = e.exact_t(&params, en, &U).unwrap();
                assert!((0.0..=1.0).contains(&t), "{} at {en}", e.name);
            }
            assert!(!pot.label().is_empty());
        }
        let mut bad = Params::new();
        bad.insert("nope".into(), 1.0);
        assert!(lookup("sech2").unwrap().resolve(&bad).is_err());
        assert!(lookup("nothing").is_err());
    }
}
