use serde::{Deserialize, Serialize};

use super::Potential;
use crate::error::{Result, ScatterError};
use crate::units::UnitsConfig;

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const REFINE_TOL: f64 = 1e-10;

/// Kind of an extremum of the local wavenumber `k(x)` (or of `omega(t)`).
/// A peak of `V` is a valley of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Peak,
    Valley,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub position: f64,
    /// Local wavenumber at the extremum.
    pub k: f64,
    pub kind: ExtremumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaProfile {
    pub extrema: Vec<Extremum>,
    pub k_minus_inf: f64,
    pub k_plus_inf: f64,
}

impl ExtremaProfile {
    /// Index of the first entry that repeats the kind of its predecessor.
    pub fn first_non_alternating(&self) -> Option<usize> {
        self.extrema
            .windows(2)
            .position(|w| w[0].kind == w[1].kind)
            .map(|i| i + 1)
    }

    pub fn check_alternating(&self) -> Result<()> {
        match self.first_non_alternating() {
            Some(index) => Err(ScatterError::NonAlternatingProfile { index }),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.extrema.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extrema.is_empty()
    }
}

/// Interior local extremum of a sampled real function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalExtremum {
    pub position: f64,
    pub value: f64,
    pub is_max: bool,
}

/// Grid scan plus golden-section refinement for interior extrema of `f`
/// on `[lo, hi]`.
///
/// Consecutive samples closer than a small flatness tolerance are merged
/// into runs, so piecewise-constant functions yield one extremum per
/// plateau (reported at the run midpoint). The first and last runs are
/// the tails and never count.
pub fn scan_extrema<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<LocalExtremum> {
    let n = n.max(3);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let scale = vs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let flat_tol = 1e-14 * scale;

    // runs of (start index, end index inclusive)
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..n {
        if (vs[i] - vs[i - 1]).abs() > flat_tol {
            runs.push((start, i - 1));
            start = i;
        }
    }
    runs.push((start, n - 1));

    let mut out = Vec::new();
    for r in 1..runs.len().saturating_sub(1) {
        let (s, e) = runs[r];
        let v = vs[s];
        let prev = vs[runs[r - 1].1];
        let next = vs[runs[r + 1].0];
        let is_max = v > prev && v > next;
        let is_min = v < prev && v < next;
        if !(is_max || is_min) {
            continue;
        }
        let (position, value) = if e > s + 1 {
            let xm = 0.5 * (xs[s] + xs[e]);
            (xm, f(xm))
        } else {
            let a = xs[s.saturating_sub(1)];
            let b = xs[(e + 1).min(n - 1)];
            let x = golden_section(&f, a, b, is_max, REFINE_TOL);
            let fx = f(x);
            // keep the grid sample if refinement wandered off
            let better = if is_max { fx >= v } else { fx <= v };
            if better {
                (x, fx)
            } else {
                (xs[s], v)
            }
        };
        out.push(LocalExtremum {
            position,
            value,
            is_max,
        });
    }
    out
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool, tol: f64) -> f64 {
    let g = |x: f64| if maximize { -f(x) } else { f(x) };
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Extrema of `k(x)` at energy `E`, on the default 4096-point grid.
pub fn find_extrema(pot: &Potential, units: &UnitsConfig, energy: f64) -> Result<ExtremaProfile> {
    find_extrema_with(pot, units, energy, DEFAULT_GRID_POINTS)
}

pub fn find_extrema_with(pot: &Potential, units: &UnitsConfig, energy: f64, grid: usize) -> Result<ExtremaProfile> {
    if !pot.spikes().is_empty() {
        return Err(ScatterError::Inadmissible(
            "extrema of k(x) are undefined for potentials with delta spikes".into(),
        ));
    }
    let (k_minus_inf, k_plus_inf) = super::asymptotic_wavenumbers(pot, units, energy)?;
    let (lo, hi) = pot.domain();
    let (x_max, v_max) = pot.max_on_grid(grid);
    if v_max >= energy {
        return Err(ScatterError::TurningPoint {
            x: x_max,
            potential: v_max,
            energy,
        });
    }
    let found = scan_extrema(|x| pot.evaluate(x), lo, hi, grid);
    let mut extrema = Vec::with_capacity(found.len());
    for e in found {
        if e.value >= energy {
            return Err(ScatterError::TurningPoint {
                x: e.position,
                potential: e.value,
                energy,
            });
        }
        extrema.push(Extremum {
            position: e.position,
            k: units.ksq(energy, e.value).sqrt(),
            // a maximum of V is a minimum of k
            kind: if e.is_max {
                ExtremumKind::Valley
            } else {
                ExtremumKind::Peak
            },
        });
    }
    Ok(ExtremaProfile {
        extrema,
        k_minus_inf,
        k_plus_inf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_step_is_monotone() {
        let p = Potential::tanh_step(0.0, 0.75, 1.0).unwrap();
        let prof = find_extrema(&p, &UnitsConfig::default(), 1.0).unwrap();
        assert!(prof.is_empty());
        assert_eq!((prof.k_minus_inf, prof.k_plus_inf), (1.0, 0.5));
    }

    #[test]
    fn sech2_barrier_has_one_valley() {
        let p = Potential::sech2(0.5, 1.0).unwrap();
        let prof = find_extrema(&p, &UnitsConfig::default(), 1.0).unwrap();
        assert_eq!(prof.len(), 1);
        let e = prof.extrema[0];
        assert_eq!(e.kind, ExtremumKind::Valley);
        assert!(e.position.abs() < 1e-6, "{}", e.position);
        assert!((e.k - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn turning_point_detected() {
        let p = Potential::sech2(1.5, 1.0).unwrap();
        assert!(matches!(
            find_extrema(&p, &UnitsConfig::default(), 1.0),
            Err(ScatterError::TurningPoint { .. })
        ));
    }

    #[test]
    fn well_plateau_is_a_peak() {
        let p = Potential::asymmetric_well(0.0, -5.0, -3.0, 1.0).unwrap();
        let prof = find_extrema(&p, &UnitsConfig::default(), 1.0).unwrap();
        assert_eq!(prof.len(), 1);
        assert_eq!(prof.extrema[0].kind, ExtremumKind::Peak);
        assert!((prof.extrema[0].k - 6f64.sqrt()).abs() < 1e-14);
        assert!((prof.extrema[0].position - 0.5).abs() < 1e-3);
    }

    #[test]
    fn non_alternating_detected() {
        let e = |kind| Extremum {
            position: 0.0,
            k: 1.0,
            kind,
        };
        let prof = ExtremaProfile {
            extrema: vec![e(ExtremumKind::Peak), e(ExtremumKind::Valley), e(ExtremumKind::Valley)],
            k_minus_inf: 1.0,
            k_plus_inf: 1.0,
        };
        assert_eq!(
            prof.check_alternating(),
            Err(ScatterError::NonAlternatingProfile { index: 2 })
        );
    }
}
