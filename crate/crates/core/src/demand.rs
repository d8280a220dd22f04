//! Demand-side dynamics: Jacobi diffusion coefficients and the Fichera
//! boundary classification for the pricing PDE.

use serde::{Deserialize, Serialize};

/// Jacobi diffusion for electricity demand,
/// `dD = -eta (D - d_bar) dt + sqrt(2 eta sigma_bar D (xi_max - D)) dW`.
///
/// The diffusion degenerates at `D = 0` and `D = xi_max`, so the process
/// never leaves `(0, xi_max)` when the boundary non-attainment condition
/// `min(d_bar, xi_max - d_bar) >= xi_max * sigma_bar` holds; its stationary
/// mean is `d_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    /// Mean-reversion speed (1/year).
    pub eta: f64,
    /// Mean demand level (MW).
    pub d_bar: f64,
    /// Volatility scale (dimensionless).
    pub sigma_bar: f64,
    /// Capacity bound shared with the stack (MW).
    pub xi_max: f64,
    /// Initial demand (MW).
    pub d0: f64,
}

impl Default for JacobiParams {
    fn default() -> Self {
        Self {
            eta: 10.0,
            d_bar: 21_000.0,
            sigma_bar: 0.05,
            xi_max: 30_000.0,
            d0: 21_000.0,
        }
    }
}

impl JacobiParams {
    /// Drift `-eta (d - d_bar)` (MW/year).
    #[inline]
    pub fn drift(&self, d: f64) -> f64 {
        -self.eta * (d - self.d_bar)
    }

    /// Diffusion coefficient `sqrt(2 eta sigma_bar d (xi_max - d))`
    /// (MW/sqrt(year)); exactly zero on the boundary.
    #[inline]
    pub fn diffusion(&self, d: f64) -> f64 {
        (2.0 * self.eta * self.sigma_bar * d * (self.xi_max - d))
            .max(0.0)
            .sqrt()
    }

    /// Squared diffusion coefficient, without the rounding of a sqrt/square
    /// round trip.
    #[inline]
    pub fn diffusion_sq(&self, d: f64) -> f64 {
        (2.0 * self.eta * self.sigma_bar * d * (self.xi_max - d)).max(0.0)
    }

    /// Fichera function on the spatial boundary for inward normal
    /// `n = (n_d, n_e)`:
    /// `eta ((d_bar - sigma_bar xi_max) + (2 sigma_bar - 1) d) n_d + mu_e n_e`.
    ///
    /// `f >= 0` means information flows outward there and the PDE needs no
    /// boundary data on that face.
    #[inline]
    pub fn fichera(&self, d: f64, mu_e_val: f64, n: (f64, f64)) -> f64 {
        let drift_part =
            self.eta * ((self.d_bar - self.sigma_bar * self.xi_max) + (2.0 * self.sigma_bar - 1.0) * d);
        drift_part * n.0 + mu_e_val * n.1
    }

    /// Checks all invariants; empty result means the parameters are valid.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.eta > 0.0) {
            v.push(format!("eta must be > 0 (got {})", self.eta));
        }
        if !(self.sigma_bar > 0.0) {
            v.push(format!("sigma_bar must be > 0 (got {})", self.sigma_bar));
        }
        if !(self.d_bar > 0.0 && self.d_bar < self.xi_max) {
            v.push(format!(
                "d_bar must lie in (0, xi_max) (got {} with xi_max {})",
                self.d_bar, self.xi_max
            ));
        }
        if !(self.d0 > 0.0 && self.d0 < self.xi_max) {
            v.push(format!(
                "d0 must lie in (0, xi_max) (got {} with xi_max {})",
                self.d0, self.xi_max
            ));
        }
        if !(self.xi_max > 0.0) {
            v.push(format!("xi_max must be > 0 (got {})", self.xi_max));
        }
        let slack = self.d_bar.min(self.xi_max - self.d_bar);
        if !(slack >= self.xi_max * self.sigma_bar) {
            v.push(format!(
                "boundary non-attainment violated: min(d_bar, xi_max - d_bar) = {} \
                 < xi_max * sigma_bar = {}",
                slack,
                self.xi_max * self.sigma_bar
            ));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> JacobiParams {
        JacobiParams::default()
    }

    #[test]
    fn drift_values() {
        let p = reference();
        assert_eq!(p.drift(p.d_bar), 0.0);
        assert_eq!(p.drift(0.0), 2.1e5);
        assert_eq!(p.drift(30_000.0), -9.0e4);
    }

    #[test]
    fn diffusion_degenerates_on_boundary() {
        let p = reference();
        assert_eq!(p.diffusion(0.0), 0.0);
        assert_eq!(p.diffusion(30_000.0), 0.0);
        // sqrt(2*10*0.05*15000*15000) = 15000
        assert!((p.diffusion(15_000.0) - 15_000.0).abs() < 1e-9);
    }

    #[test]
    fn diffusion_symmetric_about_midpoint() {
        let p = reference();
        for k in 0..=10 {
            let d = p.xi_max * k as f64 / 10.0;
            let mirrored = p.xi_max - d;
            assert!((p.diffusion_sq(d) - p.diffusion_sq(mirrored)).abs() < 1e-6);
        }
    }

    #[test]
    fn fichera_on_demand_faces() {
        let p = reference();
        // At D = 0 with inward normal (1, 0): eta*(d_bar - sigma_bar*xi_max).
        let f = p.fichera(0.0, 0.0, (1.0, 0.0));
        assert!((f - 1.95e5).abs() < 1e-6);
        // E = 0 face (inward normal n_e = +1): mu_e >= 0 implies f >= 0.
        assert!(p.fichera(12_000.0, 0.0, (0.0, 1.0)) >= 0.0);
        assert!(p.fichera(12_000.0, 5.0e7, (0.0, 1.0)) > 0.0);
        // E = e_max face (inward normal n_e = -1): f < 0 for positive mu_e.
        assert!(p.fichera(12_000.0, 5.0e7, (0.0, -1.0)) < 0.0);
        // ... except at D = 0 where mu_e vanishes.
        assert_eq!(p.fichera(0.0, 0.0, (0.0, -1.0)), 0.0);
    }

    #[test]
    fn fichera_nonnegative_on_d_faces_iff_valid() {
        // The D-face Fichera signs are equivalent to boundary non-attainment.
        // Scan a family of parameter sets straddling the inequality.
        for k in 0..=1000 {
            let sigma_bar = 0.001 + 0.999 * k as f64 / 1000.0;
            let params = JacobiParams {
                sigma_bar,
                ..reference()
            };
            let boundary_ok = params.d_bar.min(params.xi_max - params.d_bar)
                >= params.xi_max * params.sigma_bar;
            let f_at_zero = params.fichera(0.0, 0.0, (1.0, 0.0));
            let f_at_max = params.fichera(params.xi_max, 0.0, (-1.0, 0.0));
            assert_eq!(
                boundary_ok,
                f_at_zero >= 0.0 && f_at_max >= 0.0,
                "sigma_bar = {sigma_bar}"
            );
            assert_eq!(boundary_ok, params.validate().is_empty());
        }
    }

    #[test]
    fn validate_reference_and_violations() {
        assert!(reference().validate().is_empty());
        let too_volatile = JacobiParams {
            sigma_bar: 0.9,
            ..reference()
        };
        assert!(!too_volatile.validate().is_empty());
        let on_boundary = JacobiParams {
            d_bar: 30_000.0,
            ..reference()
        };
        assert!(!on_boundary.validate().is_empty());
    }
}
