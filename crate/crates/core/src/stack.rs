//! Bid stack, marginal emissions stack and the carbon-adjusted merit order.
//!
//! The business-as-usual bid stack maps electricity supply `xi` to the
//! marginal offered price; the emissions stack maps it to the marginal
//! emissions rate of the last unit. A positive allowance price `a` raises
//! every bid by `a * e(xi)`, which can reorder the merit order (load
//! shifting). Dispatching demand `d` then activates the sublevel set of the
//! adjusted bid curve with Lebesgue measure `d`, and the market emissions
//! rate is the (rescaled) integral of the emissions stack over that set.
//!
//! For the parametric curves used here the adjusted bid is strictly convex
//! in `xi`, so the active set is always a single interval `[lo, hi]`.

use serde::{Deserialize, Serialize};

use crate::error::EngineError;

/// Relative tolerance (in units of `xi_max`) on active-set endpoints.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// Parametric description of the business-as-usual bid stack and the
/// marginal emissions stack.
///
/// Bid: `b(xi) = b_min + (b_max - b_min) * (xi/xi_max)^theta1`,
/// emissions: `e(xi) = e_max - (e_max - e_min) * (xi/xi_max)^theta2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StackParams {
    /// Price floor (currency/MWh).
    pub b_min: f64,
    /// Price cap (currency/MWh).
    pub b_max: f64,
    /// Bid-stack steepness exponent; strict convexity needs `theta1 > 2`.
    pub theta1: f64,
    /// Maximum marginal emissions rate (tCO2/MWh), attained at `xi = 0`.
    pub e_max: f64,
    /// Minimum marginal emissions rate (tCO2/MWh), attained at `xi = xi_max`.
    pub e_min: f64,
    /// Fuel-mix exponent in `[0, 1)`.
    pub theta2: f64,
    /// Hours-per-period rescaling of the emissions rate (h/period).
    pub kappa: f64,
    /// Maximum production capacity (MW).
    pub xi_max: f64,
}

impl Default for StackParams {
    /// Representative medium-sized coal/gas market (200 currency price cap,
    /// 30 GW capacity, 8760 production hours per year).
    fn default() -> Self {
        Self {
            b_min: 0.0,
            b_max: 200.0,
            theta1: 10.0,
            e_max: 1.2,
            e_min: 0.4,
            theta2: 0.4,
            kappa: 8760.0,
            xi_max: 30_000.0,
        }
    }
}

/// Interval of supply coordinates dispatched by the merit order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveSet {
    /// Left endpoint xi_1 (MW).
    pub lo: f64,
    /// Right endpoint xi_2 (MW).
    pub hi: f64,
}

impl ActiveSet {
    /// Lebesgue measure of the interval, i.e. the demand it serves.
    pub fn measure(&self) -> f64 {
        self.hi - self.lo
    }
}

impl StackParams {
    /// Checks all parameter invariants, returning the list of violations.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.b_min >= 0.0) {
            v.push(format!("b_min must be >= 0 (got {})", self.b_min));
        }
        if !(self.b_max >= self.b_min) {
            v.push(format!(
                "b_max must be >= b_min (got {} < {})",
                self.b_max, self.b_min
            ));
        }
        if !(self.theta1 > 2.0) {
            v.push(format!("theta1 must be > 2 (got {})", self.theta1));
        }
        // Strict monotonicity of the emissions rate in demand requires a
        // strictly positive emissions stack, so e_min = 0 is rejected.
        if !(self.e_min > 0.0) {
            v.push(format!("e_min must be > 0 (got {})", self.e_min));
        }
        if !(self.e_max > self.e_min) {
            v.push(format!(
                "e_max must be > e_min (got {} <= {})",
                self.e_max, self.e_min
            ));
        }
        if !(0.0 <= self.theta2 && self.theta2 < 1.0) {
            v.push(format!("theta2 must be in [0, 1) (got {})", self.theta2));
        }
        if !(self.kappa > 0.0) {
            v.push(format!("kappa must be > 0 (got {})", self.kappa));
        }
        if !(self.xi_max > 0.0) {
            v.push(format!("xi_max must be > 0 (got {})", self.xi_max));
        }
        v
    }

    /// Validated construction.
    pub fn new(
        b_min: f64,
        b_max: f64,
        theta1: f64,
        e_max: f64,
        e_min: f64,
        theta2: f64,
        kappa: f64,
        xi_max: f64,
    ) -> Result<Self, EngineError> {
        let p = Self {
            b_min,
            b_max,
            theta1,
            e_max,
            e_min,
            theta2,
            kappa,
            xi_max,
        };
        let violations = p.validate();
        if violations.is_empty() {
            Ok(p)
        } else {
            Err(EngineError::InvalidParams(violations.join("; ")))
        }
    }

    fn check_supply(&self, op: &'static str, xi: f64) -> Result<(), EngineError> {
        if xi.is_finite() && (0.0..=self.xi_max).contains(&xi) {
            Ok(())
        } else {
            Err(EngineError::Domain {
                op,
                what: "xi",
                value: xi,
                lo: 0.0,
                hi: self.xi_max,
            })
        }
    }

    fn check_price(&self, op: &'static str, a: f64) -> Result<(), EngineError> {
        if a.is_finite() && a >= 0.0 {
            Ok(())
        } else {
            Err(EngineError::Domain {
                op,
                what: "a",
                value: a,
                lo: 0.0,
                hi: f64::INFINITY,
            })
        }
    }

    fn check_demand(&self, op: &'static str, d: f64) -> Result<(), EngineError> {
        if d.is_finite() && (0.0..=self.xi_max).contains(&d) {
            Ok(())
        } else {
            Err(EngineError::Domain {
                op,
                what: "d",
                value: d,
                lo: 0.0,
                hi: self.xi_max,
            })
        }
    }

    /// Business-as-usual bid level of the marginal unit at supply `xi`.
    pub fn bau_bid(&self, xi: f64) -> Result<f64, EngineError> {
        self.check_supply("bau_bid", xi)?;
        Ok(self.bau_bid_unchecked(xi))
    }

    #[inline]
    fn bau_bid_unchecked(&self, xi: f64) -> f64 {
        self.b_min + (self.b_max - self.b_min) * (xi / self.xi_max).powf(self.theta1)
    }

    /// Marginal emissions rate of the unit at supply `xi` (tCO2/MWh).
    pub fn marginal_emissions(&self, xi: f64) -> Result<f64, EngineError> {
        self.check_supply("marginal_emissions", xi)?;
        Ok(self.marginal_emissions_unchecked(xi))
    }

    #[inline]
    fn marginal_emissions_unchecked(&self, xi: f64) -> f64 {
        self.e_max - (self.e_max - self.e_min) * (xi / self.xi_max).powf(self.theta2)
    }

    /// Carbon-adjusted bid: BAU bid plus allowance price times marginal
    /// emissions rate. For `a = 0` this is the BAU stack.
    pub fn adjusted_bid(&self, a: f64, xi: f64) -> Result<f64, EngineError> {
        self.check_price("adjusted_bid", a)?;
        self.check_supply("adjusted_bid", xi)?;
        Ok(self.adjusted_bid_unchecked(a, xi))
    }

    #[inline]
    fn adjusted_bid_unchecked(&self, a: f64, xi: f64) -> f64 {
        self.bau_bid_unchecked(xi) + a * self.marginal_emissions_unchecked(xi)
    }

    /// Antiderivative of the emissions stack:
    /// `F(xi) = e_max*xi - (e_max - e_min) * xi^(theta2+1) / ((theta2+1) * xi_max^theta2)`.
    #[inline]
    fn emissions_antiderivative(&self, xi: f64) -> f64 {
        let u = xi / self.xi_max;
        self.e_max * xi
            - (self.e_max - self.e_min) * xi * u.powf(self.theta2) / (self.theta2 + 1.0)
    }

    /// Integral of the emissions stack over `[lo, hi]` (closed form).
    pub fn emissions_integral(&self, lo: f64, hi: f64) -> f64 {
        self.emissions_antiderivative(hi) - self.emissions_antiderivative(lo)
    }

    /// Minimizer of `xi -> adjusted_bid(a, xi)` on `[0, xi_max]`.
    ///
    /// Stationarity gives
    /// `xi* = xi_max * (a*theta2*(e_max-e_min) / (theta1*(b_max-b_min)))^(1/(theta1-theta2))`,
    /// clamped into the domain.
    fn bid_minimizer(&self, a: f64) -> f64 {
        let emissions_slope = a * self.theta2 * (self.e_max - self.e_min);
        if emissions_slope <= 0.0 {
            // Adjusted bid is non-decreasing: BAU merit order.
            return 0.0;
        }
        let bid_slope = self.theta1 * (self.b_max - self.b_min);
        if bid_slope <= 0.0 {
            // Flat bid stack: the carbon term decreases everywhere.
            return self.xi_max;
        }
        let ratio = (emissions_slope / bid_slope).powf(1.0 / (self.theta1 - self.theta2));
        (ratio * self.xi_max).min(self.xi_max)
    }

    /// Solves `adjusted_bid(a, x) = level` for `x` in `[lo, hi]` by bisection.
    /// `g` must be monotone on the bracket and the bracket must straddle the
    /// level.
    fn solve_level(&self, a: f64, level: f64, mut lo: f64, mut hi: f64) -> f64 {
        let tol = 1e-13 * self.xi_max;
        let increasing = self.adjusted_bid_unchecked(a, hi) >= self.adjusted_bid_unchecked(a, lo);
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let below = self.adjusted_bid_unchecked(a, mid) < level;
            if below == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Endpoints of the sublevel set `{xi : g(a, xi) <= level}` around the
    /// minimizer `xi_star`.
    fn sublevel_interval(&self, a: f64, level: f64, xi_star: f64) -> (f64, f64) {
        let lo = if self.adjusted_bid_unchecked(a, 0.0) <= level {
            0.0
        } else {
            self.solve_level(a, level, 0.0, xi_star)
        };
        let hi = if self.adjusted_bid_unchecked(a, self.xi_max) <= level {
            self.xi_max
        } else {
            self.solve_level(a, level, xi_star, self.xi_max)
        };
        (lo, hi)
    }

    /// Merit-order dispatch: the active interval together with the marginal
    /// electricity price for allowance price `a` and demand `d`.
    ///
    /// Bisects the price level `P` on the strictly increasing map
    /// `P -> measure{xi : g(a, xi) <= P}` until the sublevel set has measure
    /// `d` (to within [`ENDPOINT_TOL`] * `xi_max`).
    pub fn dispatch(&self, a: f64, d: f64) -> Result<(ActiveSet, f64), EngineError> {
        self.check_price("dispatch", a)?;
        self.check_demand("dispatch", d)?;

        // BAU merit order activates [0, d] directly.
        if a == 0.0 {
            return Ok((ActiveSet { lo: 0.0, hi: d }, self.bau_bid_unchecked(d)));
        }

        let xi_star = self.bid_minimizer(a);
        let level_lo = self.adjusted_bid_unchecked(a, xi_star);
        let level_hi = self
            .adjusted_bid_unchecked(a, 0.0)
            .max(self.adjusted_bid_unchecked(a, self.xi_max));

        if d == 0.0 {
            return Ok((
                ActiveSet {
                    lo: xi_star,
                    hi: xi_star,
                },
                level_lo,
            ));
        }
        if d >= self.xi_max {
            return Ok((
                ActiveSet {
                    lo: 0.0,
                    hi: self.xi_max,
                },
                level_hi,
            ));
        }
        // Degenerate flat stack: every unit bids the same, keep BAU order.
        if level_hi - level_lo <= f64::EPSILON * level_hi.abs() {
            return Ok((ActiveSet { lo: 0.0, hi: d }, level_lo));
        }

        let tol = ENDPOINT_TOL * self.xi_max;
        let (mut p_lo, mut p_hi) = (level_lo, level_hi);
        let mut best = None;
        for _ in 0..200 {
            let p = 0.5 * (p_lo + p_hi);
            let (lo, hi) = self.sublevel_interval(a, p, xi_star);
            let measure = hi - lo;
            best = Some((ActiveSet { lo, hi }, p));
            if (measure - d).abs() <= tol {
                return Ok(best.unwrap());
            }
            if measure < d {
                p_lo = p;
            } else {
                p_hi = p;
            }
            if p_hi - p_lo <= f64::EPSILON * level_hi.abs() {
                break;
            }
        }
        // The price bracket collapsed to rounding. The endpoints are still
        // accurate to the inner solver tolerance; accept if the measure is
        // within a relaxed bound, otherwise report non-convergence.
        let (set, p) = best.unwrap();
        if (set.measure() - d).abs() <= 1e-6 * self.xi_max {
            Ok((set, p))
        } else {
            Err(EngineError::Convergence {
                op: "dispatch",
                detail: format!(
                    "active-set measure {} does not match demand {} (a = {})",
                    set.measure(),
                    d,
                    a
                ),
            })
        }
    }

    /// Set of active generation units for allowance price `a`, demand `d`.
    pub fn active_set(&self, a: f64, d: f64) -> Result<ActiveSet, EngineError> {
        Ok(self.dispatch(a, d)?.0)
    }

    /// Market price of electricity: the bid level of the marginal active unit.
    pub fn electricity_price(&self, a: f64, d: f64) -> Result<f64, EngineError> {
        Ok(self.dispatch(a, d)?.1)
    }

    /// Market emissions rate (tCO2 per period): `kappa` times the integral of
    /// the emissions stack over the active set.
    pub fn emissions_rate(&self, a: f64, d: f64) -> Result<f64, EngineError> {
        let (set, _) = self.dispatch(a, d)?;
        Ok(self.kappa * self.emissions_integral(set.lo, set.hi))
    }

    /// Business-as-usual market emissions rate: integral over `[0, d]`.
    pub fn bau_emissions_rate(&self, d: f64) -> Result<f64, EngineError> {
        self.check_demand("bau_emissions_rate", d)?;
        Ok(self.kappa * self.emissions_integral(0.0, d))
    }

    /// Upper bound of the emissions rate: full-capacity dispatch.
    pub fn max_emissions_rate(&self) -> f64 {
        self.kappa * self.emissions_integral(0.0, self.xi_max)
    }
}
