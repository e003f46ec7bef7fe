//! Potentials, wavenumbers and the integral functionals used by the bounds.

pub mod extrema;
mod shape;

use std::sync::Arc;

pub use extrema::{find_extrema, scan_extrema, ExtremaProfile, Extremum, ExtremumKind, LocalExtremum};
pub use shape::{Gaussian, RealFn, Shape, Side};

use crate::error::{Result, ScatterError};
use crate::quadrature::{integrate_adaptive, sign_changes};
use crate::spline::CubicSpline;
use crate::units::UnitsConfig;

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Step used for central differences when a shape has no analytic derivative.
pub const DIFF_STEP: f64 = 1e-5;

/// A point interaction `strength * delta(x - location)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeltaSpike {
    pub location: f64,
    pub strength: f64,
}

/// A real potential with flat asymptotes, truncated to a finite domain.
#[derive(Debug, Clone)]
pub struct Potential {
    shape: Shape,
    spikes: Vec<DeltaSpike>,
    v_minus_inf: f64,
    v_plus_inf: f64,
    tail_tolerance: f64,
    domain: (f64, f64),
    label: String,
}

/// Half-width at which `amplitude * exp(-rate |x|)` drops below `tol`.
fn exp_tail_half_width(amplitude: f64, rate: f64, tol: f64) -> f64 {
    let a = amplitude.abs().max(tol);
    ((a / tol).ln() / rate).max(1.0) + 1.0
}

impl Potential {
    /// Builds a potential and checks its contracts: finite domain, tails
    /// flat to within `tail_tolerance`, spikes strictly inside.
    pub fn new(
        shape: Shape,
        v_minus_inf: f64,
        v_plus_inf: f64,
        domain: (f64, f64),
        tail_tolerance: f64,
        spikes: Vec<DeltaSpike>,
    ) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ScatterError::InvalidParameter(format!(
                "domain must be a finite interval, got [{lo}, {hi}]"
            )));
        }
        if !(tail_tolerance > 0.0) {
            return Err(ScatterError::InvalidParameter("tail tolerance must be positive".into()));
        }
        if !(v_minus_inf.is_finite() && v_plus_inf.is_finite()) {
            return Err(ScatterError::InvalidParameter(
                "asymptotic values must be finite".into(),
            ));
        }
        for s in &spikes {
            if !(s.location > lo && s.location < hi) || !s.strength.is_finite() {
                return Err(ScatterError::InvalidParameter(format!(
                    "delta spike at {} must lie strictly inside ({lo}, {hi})",
                    s.location
                )));
            }
        }
        let mut spikes = spikes;
        spikes.sort_by(|a, b| a.location.total_cmp(&b.location));
        let pot = Potential {
            label: format!("{shape:?}"),
            shape,
            spikes,
            v_minus_inf,
            v_plus_inf,
            tail_tolerance,
            domain,
        };
        let left = (pot.shape.value(lo) - v_minus_inf).abs();
        if !(left <= tail_tolerance) {
            return Err(ScatterError::NonDecayingTail {
                x: lo,
                deviation: left,
                tolerance: tail_tolerance,
            });
        }
        let right = (pot.shape.value(hi) - v_plus_inf).abs();
        if !(right <= tail_tolerance) {
            return Err(ScatterError::NonDecayingTail {
                x: hi,
                deviation: right,
                tolerance: tail_tolerance,
            });
        }
        Ok(pot)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn free(domain: (f64, f64)) -> Result<Self> {
        Potential::new(Shape::Constant(0.0), 0.0, 0.0, domain, DEFAULT_TAIL_TOLERANCE, vec![])
            .map(|p| p.with_label("free"))
    }

    pub fn constant(value: f64, domain: (f64, f64)) -> Result<Self> {
        Potential::new(
            Shape::Constant(value),
            value,
            value,
            domain,
            DEFAULT_TAIL_TOLERANCE,
            vec![],
        )
    }

    /// `height * sech^2(x / width)`.
    pub fn sech2(height: f64, width: f64) -> Result<Self> {
        positive("width", width)?;
        let half = width * 0.5 * exp_tail_half_width(4.0 * height, 1.0, DEFAULT_TAIL_TOLERANCE);
        Potential::new(
            Shape::Sech2 {
                height,
                width,
                center: 0.0,
            },
            0.0,
            0.0,
            (-half, half),
            DEFAULT_TAIL_TOLERANCE,
            vec![],
        )
        .map(|p| p.with_label("sech2"))
    }

    /// Smoothed step from `v_minus` to `v_plus` over a scale `width`.
    pub fn tanh_step(v_minus: f64, v_plus: f64, width: f64) -> Result<Self> {
        positive("width", width)?;
        let half = width * 0.5 * exp_tail_half_width(v_plus - v_minus, 1.0, DEFAULT_TAIL_TOLERANCE);
        Potential::new(
            Shape::TanhStep { v_minus, v_plus, width },
            v_minus,
            v_plus,
            (-half, half),
            DEFAULT_TAIL_TOLERANCE,
            vec![],
        )
        .map(|p| p.with_label("tanh_step"))
    }

    /// Pöschl–Teller form `v0 cosh^2(mu) (tanh((x - mu L)/L) + tanh(mu))^2`,
    /// with `V(-inf) = v0 e^{-2 mu}`, `V(+inf) = v0 e^{2 mu}` and `V(0) = 0`.
    pub fn poschl_teller(v0: f64, mu: f64, width: f64) -> Result<Self> {
        positive("width", width)?;
        let amp = 4.0 * v0.abs() * (2.0 * mu.abs()).exp() * mu.cosh().powi(2);
        let half = mu.abs() * width + width * 0.5 * exp_tail_half_width(amp, 1.0, DEFAULT_TAIL_TOLERANCE);
        Potential::new(
            Shape::PoschlTeller { v0, mu, width },
            v0 * (-2.0 * mu).exp(),
            v0 * (2.0 * mu).exp(),
            (-half, half),
            DEFAULT_TAIL_TOLERANCE,
            vec![],
        )
        .map(|p| p.with_label("poschl_teller"))
    }

    /// Height `v_e` on `(0, width)`, zero elsewhere.
    pub fn square_barrier(v_e: f64, width: f64) -> Result<Self> {
        Potential::asymmetric_well(0.0, v_e, 0.0, width).map(|p| p.with_label("square_barrier"))
    }

    /// `v1` for `x < 0`, `v2` on `(0, width)`, `v3` for `x > width`.
    pub fn asymmetric_well(v1: f64, v2: f64, v3: f64, width: f64) -> Result<Self> {
        positive("width", width)?;
        Potential::new(
            Shape::steps(vec![0.0, width], vec![v1, v2, v3])?,
            v1,
            v3,
            (-1.0, width + 1.0),
            DEFAULT_TAIL_TOLERANCE,
            vec![],
        )
        .map(|p| p.with_label("asymmetric_well"))
    }

    pub fn delta(strength: f64) -> Result<Self> {
        Potential::new(
            Shape::Constant(0.0),
            0.0,
            0.0,
            (-1.0, 1.0),
            DEFAULT_TAIL_TOLERANCE,
            vec![DeltaSpike {
                location: 0.0,
                strength,
            }],
        )
        .map(|p| p.with_label("delta"))
    }

    /// Spikes of equal strength at `±separation/2`.
    pub fn double_delta(strength: f64, separation: f64) -> Result<Self> {
        positive("separation", separation)?;
        let h = 0.5 * separation;
        Potential::new(
            Shape::Constant(0.0),
            0.0,
            0.0,
            (-h - 1.0, h + 1.0),
            DEFAULT_TAIL_TOLERANCE,
            vec![
                DeltaSpike { location: -h, strength },
                DeltaSpike { location: h, strength },
            ],
        )
        .map(|p| p.with_label("double_delta"))
    }

    /// Normalised Gaussian of total weight `strength` and standard deviation
    /// `width`: a smooth member of a family tending to `strength * delta(x)`.
    pub fn smoothed_delta(strength: f64, width: f64) -> Result<Self> {
        positive("width", width)?;
        let amplitude = strength / (width * (2.0 * std::f64::consts::PI).sqrt());
        Potential::gaussians(vec![Gaussian {
            amplitude,
            center: 0.0,
            width,
        }])
        .map(|p| p.with_label("smoothed_delta"))
    }

    /// Sum of Gaussian bumps over a zero background.
    pub fn gaussians(bumps: Vec<Gaussian>) -> Result<Self> {
        if bumps.is_empty() {
            return Potential::free((-1.0, 1.0));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let total: f64 = bumps.iter().map(|b| b.amplitude.abs()).sum();
        for b in &bumps {
            positive("width", b.width)?;
            let r = b.width
                * (2.0 * (total.max(1e-300) / (0.1 * DEFAULT_TAIL_TOLERANCE)).ln())
                    .max(1.0)
                    .sqrt();
            lo = lo.min(b.center - r);
            hi = hi.max(b.center + r);
        }
        Potential::new(
            Shape::Gaussians(bumps),
            0.0,
            0.0,
            (lo, hi),
            DEFAULT_TAIL_TOLERANCE,
            vec![],
        )
        .map(|p| p.with_label("gaussians"))
    }

    /// Natural cubic spline through tabulated `(x, V)` pairs; the end values
    /// are taken as the asymptotes.
    pub fn tabulated(points: &[(f64, f64)], tail_tolerance: f64) -> Result<Self> {
        let spline = CubicSpline::new(points)?;
        let domain = spline.x_range();
        let (vm, vp) = (spline.first_value(), spline.last_value());
        Potential::new(Shape::Tabulated(spline), vm, vp, domain, tail_tolerance, vec![])
            .map(|p| p.with_label("tabulated"))
    }

    /// A closure-backed potential. Supplying `derivative` avoids finite differences.
    pub fn custom(
        label: &str,
        value: RealFn,
        derivative: Option<RealFn>,
        v_minus_inf: f64,
        v_plus_inf: f64,
        domain: (f64, f64),
        tail_tolerance: f64,
    ) -> Result<Self> {
        Potential::new(
            Shape::Custom {
                label: label.to_string(),
                value,
                derivative,
            },
            v_minus_inf,
            v_plus_inf,
            domain,
            tail_tolerance,
            vec![],
        )
        .map(|p| p.with_label(label))
    }

    pub fn custom_fn<F>(label: &str, f: F, v_minus_inf: f64, v_plus_inf: f64, domain: (f64, f64)) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Potential::custom(
            label,
            Arc::new(f),
            None,
            v_minus_inf,
            v_plus_inf,
            domain,
            DEFAULT_TAIL_TOLERANCE,
        )
    }

    /// Adds a delta spike.
    pub fn with_spike(self, spike: DeltaSpike) -> Result<Self> {
        let mut spikes = self.spikes.clone();
        spikes.push(spike);
        let label = self.label.clone();
        Potential::new(
            self.shape,
            self.v_minus_inf,
            self.v_plus_inf,
            self.domain,
            self.tail_tolerance,
            spikes,
        )
        .map(|p| p.with_label(label))
    }

    /// Same potential with the domain replaced (e.g. widened).
    pub fn with_domain(self, domain: (f64, f64)) -> Result<Self> {
        let label = self.label.clone();
        Potential::new(
            self.shape,
            self.v_minus_inf,
            self.v_plus_inf,
            domain,
            self.tail_tolerance,
            self.spikes,
        )
        .map(|p| p.with_label(label))
    }

    /// `V(x - offset)`.
    pub fn translated(&self, offset: f64) -> Result<Self> {
        Potential::new(
            Shape::Shifted {
                inner: Box::new(self.shape.clone()),
                offset,
            },
            self.v_minus_inf,
            self.v_plus_inf,
            (self.domain.0 + offset, self.domain.1 + offset),
            self.tail_tolerance,
            self.spikes
                .iter()
                .map(|s| DeltaSpike {
                    location: s.location + offset,
                    strength: s.strength,
                })
                .collect(),
        )
        .map(|p| p.with_label(format!("{}+{offset}", self.label)))
    }

    /// `lambda * V(x)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let inner = self.shape.clone();
        let inner_d = self.shape.clone();
        let has_derivative = self.shape.derivative(self.domain.0).is_some();
        let value: RealFn = Arc::new(move |x| lambda * inner.value(x));
        let derivative: Option<RealFn> = if has_derivative {
            Some(Arc::new(move |x| lambda * inner_d.derivative(x).unwrap_or(0.0)))
        } else {
            None
        };
        let breaks = self.shape.breakpoints();
        let shape = if breaks.is_empty() {
            Shape::Custom {
                label: format!("{lambda}*{}", self.label),
                value,
                derivative,
            }
        } else {
            // keep jump locations visible to the engine
            match &self.shape {
                Shape::Steps { edges, values } => Shape::Steps {
                    edges: edges.clone(),
                    values: values.iter().map(|v| lambda * v).collect(),
                },
                _ => {
                    return Err(ScatterError::InvalidParameter(
                        "scaling is only supported for smooth or piecewise-constant shapes".into(),
                    ))
                }
            }
        };
        Potential::new(
            shape,
            lambda * self.v_minus_inf,
            lambda * self.v_plus_inf,
            self.domain,
            self.tail_tolerance * lambda.abs().max(1.0),
            self.spikes
                .iter()
                .map(|s| DeltaSpike {
                    location: s.location,
                    strength: lambda * s.strength,
                })
                .collect(),
        )
        .map(|p| p.with_label(format!("{lambda}*{}", self.label)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn spikes(&self) -> &[DeltaSpike] {
        &self.spikes
    }

    pub fn v_minus_inf(&self) -> f64 {
        self.v_minus_inf
    }

    pub fn v_plus_inf(&self) -> f64 {
        self.v_plus_inf
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn has_symmetric_asymptotes(&self) -> bool {
        (self.v_minus_inf - self.v_plus_inf).abs() <= 1e-14 * (1.0 + self.v_minus_inf.abs())
    }

    /// Smooth part of `V(x)` (spikes excluded).
    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        self.shape.value(x)
    }

    /// `V` evaluated inside the open segment `(lo, hi)`; at the segment ends
    /// the one-sided limit from the inside is used.
    #[inline]
    pub fn evaluate_in(&self, x: f64, lo: f64, hi: f64) -> f64 {
        if x >= hi {
            self.shape.value_side(hi, Side::Left)
        } else if x <= lo {
            self.shape.value_side(lo, Side::Right)
        } else {
            self.shape.value(x)
        }
    }

    /// `dV/dx` inside `(lo, hi)`, analytic when available, otherwise by
    /// central differences kept inside the segment.
    pub fn derivative_in(&self, x: f64, lo: f64, hi: f64) -> f64 {
        if let Some(d) = self.shape.derivative(x.clamp(lo, hi)) {
            return d;
        }
        let h = DIFF_STEP;
        let x = x.clamp(lo, hi);
        if x - h >= lo && x + h <= hi {
            (self.shape.value(x + h) - self.shape.value(x - h)) / (2.0 * h)
        } else if x + 2.0 * h <= hi {
            (-3.0 * self.evaluate_in(x, lo, hi) + 4.0 * self.shape.value(x + h) - self.shape.value(x + 2.0 * h))
                / (2.0 * h)
        } else {
            (3.0 * self.evaluate_in(x, lo, hi) - 4.0 * self.shape.value(x - h) + self.shape.value(x - 2.0 * h))
                / (2.0 * h)
        }
    }

    /// Jump discontinuities strictly inside the domain.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        self.shape
            .breakpoints()
            .into_iter()
            .filter(|&b| b > lo && b < hi)
            .collect()
    }

    /// Sorted interface points: jumps and spike locations.
    pub fn interfaces(&self) -> Vec<f64> {
        let mut pts = self.breakpoints();
        pts.extend(self.spikes.iter().map(|s| s.location));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Total spike strength at `x` (zero if none).
    pub fn spike_strength_at(&self, x: f64) -> f64 {
        self.spikes.iter().filter(|s| s.location == x).map(|s| s.strength).sum()
    }

    /// Largest value of the smooth part on a uniform grid plus the pieces' limits.
    pub fn max_on_grid(&self, n: usize) -> (f64, f64) {
        let (lo, hi) = self.domain;
        let mut best = (lo, self.evaluate(lo));
        let n = n.max(2);
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let v = self.evaluate(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        for b in self.breakpoints() {
            for side in [Side::Left, Side::Right] {
                let v = self.shape.value_side(b, side);
                if v > best.1 {
                    best = (b, v);
                }
            }
        }
        best
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// `k(x) = sqrt(2m(E - V(x)))/hbar`, failing at a classical turning point.
pub fn wavenumber(pot: &Potential, units: &UnitsConfig, energy: f64, x: f64) -> Result<f64> {
    if !energy.is_finite() || !x.is_finite() {
        return Err(ScatterError::InvalidParameter(
            "energy and position must be finite".into(),
        ));
    }
    let v = pot.evaluate(x);
    if energy < v {
        return Err(ScatterError::TurningPoint {
            x,
            potential: v,
            energy,
        });
    }
    Ok(units.ksq(energy, v).sqrt())
}

/// `(k(-inf), k(+inf))`.
pub fn asymptotic_wavenumbers(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<(f64, f64)> {
    let top = pot.v_minus_inf.max(pot.v_plus_inf);
    if !(energy > top) {
        return Err(ScatterError::NoPropagatingMode { energy, asymptote: top });
    }
    Ok((
        units.ksq(energy, pot.v_minus_inf).sqrt(),
        units.ksq(energy, pot.v_plus_inf).sqrt(),
    ))
}

/// `∫|V - v_ref| dx` over the domain plus the spikes' `|strength|`.
pub fn l1_shifted_norm(pot: &Potential, v_ref: f64) -> Result<f64> {
    let (lo, hi) = pot.domain;
    for x in [lo, hi] {
        let dev = (pot.evaluate(x) - v_ref).abs();
        if !(dev <= pot.tail_tolerance) {
            return Err(ScatterError::NonDecayingTail {
                x,
                deviation: dev,
                tolerance: pot.tail_tolerance,
            });
        }
    }
    let f = |x: f64| (pot.evaluate(x) - v_ref).abs();
    let mut breaks = pot.breakpoints();
    let mut edges = vec![lo];
    edges.extend(breaks.iter().copied());
    edges.push(hi);
    for w in edges.windows(2) {
        let g = |x: f64| pot.evaluate_in(x, w[0], w[1]) - v_ref;
        breaks.extend(sign_changes(&g, w[0], w[1], 2048));
    }
    breaks.sort_by(f64::total_cmp);
    let r = integrate_adaptive(&f, lo, hi, &breaks, 1e-13, 1e-12, 20_000);
    let spikes: f64 = pot.spikes.iter().map(|s| s.strength.abs()).sum();
    Ok(r.value + spikes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_examples() {
        let u = UnitsConfig::default();
        let free = Potential::free((-5.0, 5.0)).unwrap();
        assert_eq!(wavenumber(&free, &u, 1.0, 0.3).unwrap(), 1.0);
        let c = Potential::constant(0.5, (-5.0, 5.0)).unwrap();
        assert!((wavenumber(&c, &u, 1.0, 0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let step = Potential::tanh_step(0.0, 0.75, 1.0).unwrap();
        let (km, kp) = asymptotic_wavenumbers(&step, &u, 1.0).unwrap();
        assert!((km - 1.0).abs() < 1e-15 && (kp - 0.5).abs() < 1e-15);
        assert!(matches!(
            wavenumber(&c, &u, 0.2, 0.0),
            Err(ScatterError::TurningPoint { .. })
        ));
    }

    #[test]
    fn wavenumber_roundtrip_energy() {
        let u = UnitsConfig::new(1.3, 0.8).unwrap();
        let p = Potential::sech2(0.4, 1.2).unwrap();
        for i in 0..50 {
            let x = -5.0 + 0.2 * i as f64;
            let k = wavenumber(&p, &u, 2.0, x).unwrap();
            let e = k * k * u.hbar * u.hbar / (2.0 * u.mass) + p.evaluate(x);
            assert!((e - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn asymptotic_examples() {
        let u = UnitsConfig::default();
        let free = Potential::free((-5.0, 5.0)).unwrap();
        assert_eq!(asymptotic_wavenumbers(&free, &u, 4.0).unwrap(), (2.0, 2.0));
        let w = Potential::asymmetric_well(0.0, -5.0, -3.0, 1.0).unwrap();
        assert_eq!(asymptotic_wavenumbers(&w, &u, 1.0).unwrap(), (1.0, 2.0));
        let step = Potential::tanh_step(0.0, 0.75, 1.0).unwrap();
        assert!(matches!(
            asymptotic_wavenumbers(&step, &u, 0.75),
            Err(ScatterError::NoPropagatingMode { .. })
        ));
    }

    #[test]
    fn l1_examples() {
        let free = Potential::free((-5.0, 5.0)).unwrap();
        assert_eq!(l1_shifted_norm(&free, 0.0).unwrap(), 0.0);
        let d = Potential::delta(2.5).unwrap();
        assert_eq!(l1_shifted_norm(&d, 0.0).unwrap(), 2.5);
        let s = Potential::sech2(1.0, 1.0).unwrap();
        assert!((l1_shifted_norm(&s, 0.0).unwrap() - 2.0).abs() < 1e-9);
        let sq = Potential::square_barrier(0.7, 2.0).unwrap();
        assert!((l1_shifted_norm(&sq, 0.0).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn l1_rejects_wrong_reference() {
        let s = Potential::sech2(1.0, 1.0).unwrap();
        assert!(matches!(
            l1_shifted_norm(&s, 0.3),
            Err(ScatterError::NonDecayingTail { .. })
        ));
    }

    #[test]
    fn tail_contract_enforced() {
        let r = Potential::new(
            Shape::Sech2 {
                height: 1.0,
                width: 1.0,
                center: 0.0,
            },
            0.0,
            0.0,
            (-3.0, 3.0),
            1e-10,
            vec![],
        );
        assert!(matches!(r, Err(ScatterError::NonDecayingTail { .. })));
        let bad_spike = Potential::free((-1.0, 1.0)).unwrap().with_spike(DeltaSpike {
            location: 1.0,
            strength: 1.0,
        });
        assert!(bad_spike.is_err());
    }

    #[test]
    fn catalog_domains_are_flat() {
        for p in [
            Potential::sech2(-3.0, 0.5).unwrap(),
            Potential::tanh_step(-1.0, 2.0, 3.0).unwrap(),
            Potential::poschl_teller(-0.2, 0.3, 1.0).unwrap(),
            Potential::poschl_teller(1.5, -0.8, 2.0).unwrap(),
            Potential::smoothed_delta(2.0, 0.05).unwrap(),
        ] {
            let (lo, hi) = p.domain();
            assert!((p.evaluate(lo) - p.v_minus_inf()).abs() <= 1e-10);
            assert!((p.evaluate(hi) - p.v_plus_inf()).abs() <= 1e-10);
        }
    }

    #[test]
    fn translation_moves_spikes_and_domain() {
        let d = Potential::double_delta(1.0, 2.0).unwrap().translated(3.0).unwrap();
        let locs: Vec<f64> = d.spikes().iter().map(|s| s.location).collect();
        assert_eq!(locs, vec![2.0, 4.0]);
        assert_eq!(d.domain(), (1.0, 5.0));
    }
}
