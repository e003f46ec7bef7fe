use std::cell::Cell;

use num_complex::Complex64;
use ode_solvers::{Dop853, OutputType, SVector, System};

use super::phase::{rhs_unchecked, PhaseFunction, PhasePoint};
use super::{Tolerances, TraceRecord};
use crate::error::{Result, ScatterError};

/// `[Re a, Im a, Re b, Im b, phi, x]`.
///
/// Position is carried as a state component so the system is autonomous:
/// the stepper's stage abscissae are unreliable for explicit x-dependence,
/// which degrades it to first order.
pub(crate) type State = SVector<f64, 6>;

pub(crate) fn pack(a: Complex64, b: Complex64, phi: f64) -> State {
    State::from([a.re, a.im, b.re, b.im, phi, 0.0])
}

pub(crate) fn unpack(y: &State) -> (Complex64, Complex64, f64) {
    (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]), y[4])
}

struct SzSystem<'p, 'a> {
    phase: &'p PhaseFunction<'a>,
    lo: f64,
    hi: f64,
    // first position where phi' vanished, if any
    bad: &'p Cell<Option<f64>>,
}

impl System<f64, State> for SzSystem<'_, '_> {
    fn system(&self, _x: f64, y: &State, dy: &mut State) {
        let x = y[5];
        let p = self.phase.point_in(x, self.lo, self.hi);
        if !(p.dphi > 0.0 && p.dphi.is_finite()) {
            if self.bad.get().is_none() {
                self.bad.set(Some(x));
            }
            dy.fill(f64::NAN);
            return;
        }
        let (a, b, phi) = unpack(y);
        let (da, db) = rhs_unchecked(a, b, phi, &p);
        dy[0] = da.re;
        dy[1] = da.im;
        dy[2] = db.re;
        dy[3] = db.im;
        dy[4] = p.dphi;
        dy[5] = 1.0;
    }
}

/// Which states to report while propagating.
pub(crate) enum Recording<'r> {
    Nothing,
    /// Every accepted step, plus both sides of each interface.
    Steps(&'r mut Vec<TraceRecord>),
    /// Only at the given positions (in any order).
    At(&'r [f64], &'r mut Vec<TraceRecord>),
}

pub(crate) struct Propagation {
    pub y: State,
    pub max_residual: f64,
    pub accepted: u64,
    pub rejected: u64,
}

fn record(x: f64, y: &State, dphi: f64, norm_offset: f64) -> TraceRecord {
    let (a, b, phi) = unpack(y);
    TraceRecord {
        x,
        a,
        b,
        phi,
        dphi,
        residual: (a.norm_sqr() - b.norm_sqr() - norm_offset).abs(),
    }
}

/// Matching of `(psi, psi')` across an interface at which `phi'` may jump
/// and a spike of the given strength may sit. `dir` is the direction of travel.
pub(crate) fn match_interface(y: &State, from: &PhasePoint, to: &PhasePoint, spike_jump: f64, dir: f64) -> State {
    let (a, b, phi) = unpack(y);
    let e = Complex64::from_polar(1.0, phi);
    let i = Complex64::i();
    let big_a = a * e;
    let big_b = b * e.conj();
    let sf = from.dphi.sqrt();
    let psi = (big_a + big_b) / sf;
    let mut dpsi = i * sf * (big_a - big_b);
    dpsi += psi * (dir * spike_jump);
    let st = to.dphi.sqrt();
    let u = st * psi;
    let w = dpsi / (i * st);
    let na = 0.5 * (u + w) * e.conj();
    let nb = 0.5 * (u - w) * e;
    pack(na, nb, phi)
}

/// Propagates `y0` from `x_from` to `x_to`, splicing segments at jumps and
/// spikes of the potential.
///
/// `norm` is the expected value of `|a|^2 - |b|^2`, used for the residual.
pub(crate) fn propagate(
    phase: &PhaseFunction<'_>,
    x_from: f64,
    x_to: f64,
    y0: State,
    norm: f64,
    tol: &Tolerances,
    mut rec: Recording<'_>,
) -> Result<Propagation> {
    let pot = phase.potential();
    let mut out = Propagation {
        y: y0,
        max_residual: residual_with(&y0, norm),
        accepted: 0,
        rejected: 0,
    };
    if x_from == x_to {
        if let Recording::At(xs, buf) = &mut rec {
            if xs.contains(&x_from) {
                buf.push(record(x_from, &out.y, phase.point(x_from).dphi, norm));
            }
        }
        return Ok(out);
    }
    let dir = if x_to > x_from { 1.0 } else { -1.0 };
    let (min, max) = if dir > 0.0 { (x_from, x_to) } else { (x_to, x_from) };

    let mut knots: Vec<f64> = pot.interfaces().into_iter().filter(|&p| p > min && p < max).collect();
    if dir < 0.0 {
        knots.reverse();
    }
    let mut points = vec![x_from];
    points.extend(knots.iter().copied());
    points.push(x_to);

    let mut stops: Vec<f64> = match &rec {
        Recording::At(xs, _) => xs.iter().copied().filter(|&x| x >= min && x <= max).collect(),
        _ => Vec::new(),
    };
    stops.sort_by(|a, b| (dir * a).total_cmp(&(dir * b)));
    stops.dedup();
    let mut next_stop = 0;

    let h_max = tol
        .h_max
        .unwrap_or_else(|| (0.1f64).min(std::f64::consts::PI / (10.0 * phase.k_max())));
    let mut h = 0.0;
    let mut y = y0;

    let seg_of = |u: f64, w: f64| if u < w { (u, w) } else { (w, u) };

    {
        let (lo, hi) = seg_of(points[0], points[1]);
        if let Recording::Steps(buf) = &mut rec {
            buf.push(record(x_from, &y, phase.point_in(x_from, lo, hi).dphi, norm));
        }
        if next_stop < stops.len() && stops[next_stop] == x_from {
            if let Recording::At(_, buf) = &mut rec {
                buf.push(record(x_from, &y, phase.point_in(x_from, lo, hi).dphi, norm));
            }
            next_stop += 1;
        }
    }

    for (si, w2) in points.windows(2).enumerate() {
        let (u, w) = (w2[0], w2[1]);
        let (lo, hi) = seg_of(u, w);
        let mut cur = u;
        loop {
            let stop_here = next_stop < stops.len() && dir * (stops[next_stop] - w) < 0.0;
            let target = if stop_here { stops[next_stop] } else { w };
            if target != cur {
                let (ny, nh) = run(phase, cur, target, lo, hi, y, h, h_max, tol, norm, &mut out, &mut rec)?;
                y = ny;
                h = nh;
            }
            cur = target;
            if stop_here {
                if let Recording::At(_, buf) = &mut rec {
                    buf.push(record(cur, &y, phase.point_in(cur, lo, hi).dphi, norm));
                }
                next_stop += 1;
            } else {
                break;
            }
        }
        let last = si + 2 == points.len();
        if !last {
            let (nlo, nhi) = seg_of(w, points[si + 2]);
            let from = phase.point_in(w, lo, hi);
            let to = phase.point_in(w, nlo, nhi);
            let jump = phase.units().k2_per_energy() * pot.spike_strength_at(w);
            y = match_interface(&y, &from, &to, jump, dir);
            out.max_residual = out.max_residual.max(residual_with(&y, norm));
            if let Recording::Steps(buf) = &mut rec {
                buf.push(record(w, &y, to.dphi, norm));
            }
        }
        if next_stop < stops.len() && stops[next_stop] == w {
            if let Recording::At(_, buf) = &mut rec {
                let (rlo, rhi) = if last { (lo, hi) } else { seg_of(w, points[si + 2]) };
                buf.push(record(w, &y, phase.point_in(w, rlo, rhi).dphi, norm));
            }
            next_stop += 1;
        }
    }
    out.y = y;
    Ok(out)
}

fn residual_with(y: &State, norm: f64) -> f64 {
    (y[0] * y[0] + y[1] * y[1] - y[2] * y[2] - y[3] * y[3] - norm).abs()
}

#[allow(clippy::too_many_arguments)]
fn run(
    phase: &PhaseFunction<'_>,
    x0: f64,
    x1: f64,
    lo: f64,
    hi: f64,
    y: State,
    h_prev: f64,
    h_max: f64,
    tol: &Tolerances,
    norm: f64,
    out: &mut Propagation,
    rec: &mut Recording<'_>,
) -> Result<(State, f64)> {
    let bad = Cell::new(None);
    let sys = SzSystem {
        phase,
        lo,
        hi,
        bad: &bad,
    };
    let span = x1 - x0;
    let mut y = y;
    y[5] = x0;
    let h0 = if h_prev == 0.0 {
        0.0
    } else {
        h_prev.abs().min(h_max).min(span.abs()) * span.signum()
    };
    let mut solver = Dop853::from_param(
        sys,
        x0,
        x1,
        span,
        y,
        tol.rtol,
        tol.atol,
        0.9,
        0.0,
        0.333,
        6.0,
        h_max,
        h0,
        tol.max_steps,
        u32::MAX,
        OutputType::Sparse,
    );
    let res = solver.integrate();
    let stats = match res {
        Ok(s) => s,
        Err(e) => {
            if let Some(x) = bad.get() {
                let v = phase.potential().evaluate_in(x, lo, hi);
                return Err(ScatterError::TurningPoint {
                    x,
                    potential: v,
                    energy: phase.energy(),
                });
            }
            return Err(ScatterError::ToleranceNotMet { reason: e.to_string() });
        }
    };
    out.accepted += stats.accepted_steps as u64;
    out.rejected += stats.rejected_steps as u64;
    let xs = solver.x_out();
    let ys = solver.y_out();
    for (x, yy) in xs.iter().zip(ys.iter()).skip(1) {
        if !yy.iter().all(|v| v.is_finite()) {
            return Err(ScatterError::ToleranceNotMet {
                reason: format!("non-finite state at x = {x}"),
            });
        }
        out.max_residual = out.max_residual.max(residual_with(yy, norm));
        if let Recording::Steps(buf) = rec {
            buf.push(record(*x, yy, phase.point_in(*x, lo, hi).dphi, norm));
        }
    }
    let n = xs.len();
    let h_last = if n >= 2 { xs[n - 1] - xs[n - 2] } else { h_prev };
    let y_end = *ys.last().unwrap_or(&y);
    Ok((y_end, h_last))
}
