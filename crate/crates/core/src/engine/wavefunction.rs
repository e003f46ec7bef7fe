use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSample {
    pub x: f64,
    pub psi: Complex64,
    pub dpsi: Complex64,
}

impl WavefunctionSample {
    /// Probability current `Im(psi* psi')`.
    pub fn current(&self) -> f64 {
        (self.psi.conj() * self.dpsi).im
    }
}

/// `psi = (a e^{i phi} + b e^{-i phi}) / sqrt(phi')` and
/// `psi' = i sqrt(phi') (a e^{i phi} - b e^{-i phi})` at each record.
pub fn reconstruct_wavefunction(records: &[TraceRecord]) -> Vec<WavefunctionSample> {
    records
        .iter()
        .map(|r| {
            let e = Complex64::from_polar(1.0, r.phi);
            let up = r.a * e;
            let down = r.b * e.conj();
            let s = r.dphi.sqrt();
            WavefunctionSample {
                x: r.x,
                psi: (up + down) / s,
                dpsi: Complex64::i() * s * (up - down),
            }
        })
        .collect()
}
