// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Real;

/// Coefficients of a squeezing jump operator `D = u·a + v·b†` together with
/// the effective coupling `ḡ` it is driven with. `u² − v² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BogoliubovPair<T: Real> {
    pub u: T,
    pub v: T,
    pub gbar: T,
}

impl<T: Real> BogoliubovPair<T> {
    pub fn new(u: T, v: T, gbar: T) -> Result<Self> {
        let pair = Self { u, v, gbar };
        pair.check_identity()?;
        if u < T::zero() || v < T::zero() || gbar < T::zero() {
            return Err(Error::InvalidParameter {
                name: "bogoliubov pair",
                reason: format!("u, v, gbar must be non-negative (got {u}, {v}, {gbar})"),
            });
        }
        Ok(pair)
    }

    /// `u = cosh r`, `v = sinh r`.
    pub fn from_squeezing(r: T, gbar: T) -> Result<Self> {
        Self::new(r.cosh(), r.sinh(), gbar)
    }

    /// Builds the pair from the two sideband amplitudes `A·a + B·b†`:
    /// `ḡ = √(A² − B²)`, `u = A/ḡ`, `v = B/ḡ`.
    pub fn from_sidebands(annihilating: T, creating: T) -> Result<Self> {
        let gbar2 = annihilating * annihilating - creating * creating;
        if gbar2 <= T::zero() {
            return Err(Error::ImaginaryCoupling(gbar2.as_f64()));
        }
        let gbar = gbar2.sqrt();
        Self::new(annihilating / gbar, creating / gbar, gbar)
    }

    pub fn check_identity(&self) -> Result<()> {
        let residual = self.u * self.u - self.v * self.v - T::one();
        if residual.abs() > T::tol(1e-12) {
            return Err(Error::BogoliubovIdentity { residual: residual.as_f64() });
        }
        Ok(())
    }

    /// Squeezing parameter, `e^r = u + v`.
    pub fn r(&self) -> T {
        (self.u + self.v).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidebands_fig2_values() {
        let p = BogoliubovPair::<f64>::from_sidebands(0.2, 0.12).unwrap();
        assert!((p.gbar - 0.16).abs() < 1e-15);
        assert!((p.u - 1.25).abs() < 1e-14);
        assert!((p.v - 0.75).abs() < 1e-14);
        assert!((p.r() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn imaginary_coupling_rejected() {
        assert!(matches!(BogoliubovPair::<f64>::from_sidebands(0.1, 0.1), Err(Error::ImaginaryCoupling(_))));
        assert!(matches!(BogoliubovPair::<f64>::from_sidebands(0.1, 0.2), Err(Error::ImaginaryCoupling(_))));
    }

    #[test]
    fn identity_violation_rejected() {
        assert!(matches!(BogoliubovPair::<f64>::new(1.0, 0.5, 1.0), Err(Error::BogoliubovIdentity { .. })));
    }
}
