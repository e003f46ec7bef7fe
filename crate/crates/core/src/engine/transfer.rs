use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrate::{pack, propagate, unpack, Recording};
use super::phase::{PhaseFunction, PhaseVariant};
use super::Tolerances;
use crate::error::{Result, ScatterError};
use crate::potentials::Potential;
use crate::units::UnitsConfig;

type C = Complex64;

/// 2x2 complex matrix propagating `(a, b)` between two positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub m: [[C; 2]; 2],
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

impl TransferMatrix {
    pub fn identity() -> Self {
        TransferMatrix {
            m: [[c(1.0), c(0.0)], [c(0.0), c(1.0)]],
        }
    }

    pub fn new(m: [[C; 2]; 2]) -> Self {
        TransferMatrix { m }
    }

    pub fn apply(&self, a: C, b: C) -> (C, C) {
        (self.m[0][0] * a + self.m[0][1] * b, self.m[1][0] * a + self.m[1][1] * b)
    }

    pub fn det(&self) -> C {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        TransferMatrix {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        TransferMatrix {
            m: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]],
        }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        let m = &self.m;
        TransferMatrix {
            m: [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]],
        }
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }

    pub fn sigma_z() -> Self {
        TransferMatrix {
            m: [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]],
        }
    }

    pub fn sigma_x() -> Self {
        TransferMatrix {
            m: [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
        }
    }

    /// The complex structure `[[0, 1], [-1, 0]]`.
    pub fn j() -> Self {
        TransferMatrix {
            m: [[c(0.0), c(1.0)], [c(-1.0), c(0.0)]],
        }
    }

    /// `|det E - 1|`.
    pub fn det_defect(&self) -> f64 {
        (self.det() - 1.0).norm()
    }

    /// Largest entry of `E^dagger sigma_z E - sigma_z`.
    pub fn su11_defect(&self) -> f64 {
        let s = Self::sigma_z();
        (self.dagger() * s * *self).max_diff(&s)
    }

    /// Largest entry of `E^dagger - sigma_x E^T sigma_x`, i.e. how far `E`
    /// is from the `[[p, q], [q*, p*]]` layout.
    pub fn structure_defect(&self) -> f64 {
        let sx = Self::sigma_x();
        self.dagger().max_diff(&(sx * self.transpose() * sx))
    }

    /// Largest entry of `J E J + (E^{-1})^T`, which vanishes for every
    /// unimodular 2x2 matrix.
    pub fn symplectic_defect(&self) -> f64 {
        let j = Self::j();
        let lhs = j * *self * j;
        let rhs = self.inverse().transpose();
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                d = d.max((lhs.m[i][k] + rhs.m[i][k]).norm());
            }
        }
        d
    }

    /// For a full-line matrix `E(x_lo, x_hi)`: `(alpha, beta)` from its first column.
    pub fn coefficients(&self) -> (C, C) {
        (self.m[0][0], self.m[1][0])
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[c(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix { m }
    }
}

/// Matrix mapping `(a, b)` at `x_i` to `(a, b)` at `x_f`, built column by
/// column by integrating the system from the unit vectors at `x_i`.
///
/// With `x_i = x_hi` and `x_f = x_lo` the result is `[[alpha, beta*], [beta, alpha*]]`
/// in the integration basis.
pub fn transfer_matrix(
    pot: &Potential,
    units: &UnitsConfig,
    energy: f64,
    variant: PhaseVariant,
    x_i: f64,
    x_f: f64,
    tol: &Tolerances,
) -> Result<TransferMatrix> {
    tol.validate()?;
    let (lo, hi) = pot.domain();
    for x in [x_i, x_f] {
        if !(x >= lo && x <= hi) {
            return Err(ScatterError::InvalidParameter(format!(
                "position {x} outside the domain [{lo}, {hi}]"
            )));
        }
    }
    let phase = PhaseFunction::new(pot, units, energy, variant)?;
    if x_i == x_f {
        return Ok(TransferMatrix::identity());
    }
    let phi0 = phase.phi(x_i);
    let one = c(1.0);
    let zero = c(0.0);
    let p1 = propagate(&phase, x_i, x_f, pack(one, zero, phi0), 1.0, tol, Recording::Nothing)?;
    let p2 = propagate(&phase, x_i, x_f, pack(zero, one, phi0), -1.0, tol, Recording::Nothing)?;
    let worst = p1.max_residual.max(p2.max_residual);
    if !(worst <= tol.max_residual) {
        return Err(ScatterError::ToleranceNotMet {
            reason: format!("conservation residual {worst:.3e} exceeds {:.3e}", tol.max_residual),
        });
    }
    let (a1, b1, _) = unpack(&p1.y);
    let (a2, b2, _) = unpack(&p2.y);
    Ok(TransferMatrix {
        m: [[a1, a2], [b1, b2]],
    })
}
