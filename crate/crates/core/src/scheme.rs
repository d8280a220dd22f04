//! Compliance-period structure: caps, penalties, horizons and the terminal
//! payoff functions of allowance certificates in one- and two-period
//! markets.

use serde::{Deserialize, Serialize};

use crate::error::EngineError;

/// Parameters of a single compliance period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Allowance allocation, the cap (tCO2).
    pub e_cap: f64,
    /// Non-compliance penalty rate (currency/tCO2).
    pub penalty: f64,
    /// Compliance period length (years).
    pub horizon: f64,
    /// Risk-free rate (1/year).
    pub rate: f64,
    /// Maximal cumulative emissions over the period (tCO2); the height of
    /// the PDE domain in the emissions direction.
    pub e_max: f64,
}

impl SchemeParams {
    /// Checks all invariants; empty result means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.e_cap >= 0.0) {
            v.push(format!("e_cap must be >= 0 (got {})", self.e_cap));
        }
        if !(self.penalty >= 0.0) {
            v.push(format!("penalty must be >= 0 (got {})", self.penalty));
        }
        if !(self.horizon > 0.0) {
            v.push(format!("horizon must be > 0 (got {})", self.horizon));
        }
        if !(self.rate >= 0.0) {
            v.push(format!("rate must be >= 0 (got {})", self.rate));
        }
        if !(self.e_max > 0.0) {
            v.push(format!("e_max must be > 0 (got {})", self.e_max));
        }
        if !(self.e_cap <= self.e_max) {
            v.push(format!(
                "e_cap must be <= e_max (got {} > {})",
                self.e_cap, self.e_max
            ));
        }
        v
    }

    fn check_emissions(&self, op: &'static str, e: f64) -> Result<(), EngineError> {
        if e.is_finite() && (0.0..=self.e_max).contains(&e) {
            Ok(())
        } else {
            Err(EngineError::Domain {
                op,
                what: "cumulative emissions",
                value: e,
                lo: 0.0,
                hi: self.e_max,
            })
        }
    }

    /// Terminal value of the certificate: `penalty` once cumulative emissions
    /// reach the cap (closed bracket at the cap), zero below it.
    pub fn single_period_terminal(&self, e_t: f64) -> Result<f64, EngineError> {
        self.check_emissions("single_period_terminal", e_t)?;
        Ok(if e_t >= self.e_cap { self.penalty } else { 0.0 })
    }
}

/// Inter-period connecting mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    /// Banking of spare certificates plus withdrawal of next-period
    /// certificates on non-compliance.
    #[serde(rename = "bw")]
    BankingWithdrawal,
    /// Banking and withdrawal plus borrowing of next-period certificates.
    #[serde(rename = "bbw")]
    BankingBorrowingWithdrawal,
}

/// Two consecutive compliance periods joined by a connecting mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPeriodScheme {
    pub period1: SchemeParams,
    pub period2: SchemeParams,
    /// Extra penalty charged when the entire second allocation has been
    /// withdrawn (currency/tCO2). Must dominate the second-period
    /// certificate value, for which `extra_penalty >= exp(-r T2) * penalty2`
    /// is sufficient.
    pub extra_penalty: f64,
    pub mechanism: Mechanism,
}

impl TwoPeriodScheme {
    /// Two periods sharing rate and domain height, with the default extra
    /// penalty `extra_penalty = penalty2`.
    pub fn new(period1: SchemeParams, period2: SchemeParams, mechanism: Mechanism) -> Self {
        Self {
            period1,
            period2,
            extra_penalty: period2.penalty,
            mechanism,
        }
    }

    /// Checks all invariants; empty result means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut v = self.period1.validate();
        v.extend(self.period2.validate());
        if self.period1.rate != self.period2.rate {
            v.push("both periods must share the risk-free rate".into());
        }
        if self.period1.e_max != self.period2.e_max {
            v.push("both periods must share e_max".into());
        }
        let floor = (-self.period1.rate * self.period2.horizon).exp() * self.period2.penalty;
        if !(self.extra_penalty >= floor) {
            v.push(format!(
                "extra_penalty must be >= exp(-r T2) * penalty2 = {} (got {})",
                floor, self.extra_penalty
            ));
        }
        v
    }

    /// Aggregate supply of certificates in the second period after banking
    /// or withdrawal: `(cap2 + cap1 - e1)^+`.
    pub fn aggregate_supply_period2(&self, e1: f64) -> Result<f64, EngineError> {
        self.period1
            .check_emissions("aggregate_supply_period2", e1)?;
        Ok((self.period2.e_cap + self.period1.e_cap - e1).max(0.0))
    }

    /// Second-period terminal payoff given first-period cumulative emissions
    /// `e1`: the single-period digital payoff with the adjusted supply.
    pub fn phi2(&self, e_t2: f64, e1: f64) -> Result<f64, EngineError> {
        self.period2.check_emissions("phi2", e_t2)?;
        let supply = self.aggregate_supply_period2(e1)?;
        Ok(if e_t2 >= supply {
            self.period2.penalty
        } else {
            0.0
        })
    }

    /// First-period terminal payoff under banking and withdrawal, given the
    /// value `a2_at_t1` of the second-period certificate at the period
    /// boundary.
    pub fn phi1_banking_withdrawal(&self, e_t1: f64, a2_at_t1: f64) -> Result<f64, EngineError> {
        if self.mechanism != Mechanism::BankingWithdrawal {
            return Err(EngineError::MechanismMismatch {
                op: "phi1_banking_withdrawal",
                required: "bw",
            });
        }
        self.period1.check_emissions("phi1_banking_withdrawal", e_t1)?;
        let cap1 = self.period1.e_cap;
        let both = cap1 + self.period2.e_cap;
        Ok(if e_t1 < cap1 {
            a2_at_t1
        } else if e_t1 < both {
            self.period1.penalty + a2_at_t1
        } else {
            self.period1.penalty + self.extra_penalty
        })
    }

    /// First-period terminal payoff when borrowing is also allowed:
    /// non-compliance only occurs once both allocations are exhausted.
    pub fn phi1_borrowing(&self, e_t1: f64, a2_at_t1: f64) -> Result<f64, EngineError> {
        if self.mechanism != Mechanism::BankingBorrowingWithdrawal {
            return Err(EngineError::MechanismMismatch {
                op: "phi1_borrowing",
                required: "bbw",
            });
        }
        self.period1.check_emissions("phi1_borrowing", e_t1)?;
        let both = self.period1.e_cap + self.period2.e_cap;
        Ok(if e_t1 < both {
            a2_at_t1
        } else {
            self.period1.penalty + self.extra_penalty
        })
    }

    /// First-period terminal payoff for the configured mechanism.
    pub fn phi1(&self, e_t1: f64, a2_at_t1: f64) -> Result<f64, EngineError> {
        match self.mechanism {
            Mechanism::BankingWithdrawal => self.phi1_banking_withdrawal(e_t1, a2_at_t1),
            Mechanism::BankingBorrowingWithdrawal => self.phi1_borrowing(e_t1, a2_at_t1),
        }
    }

    /// Largest possible first-period payoff; bounds the allowance price.
    pub fn max_payoff_period1(&self) -> f64 {
        self.period1.penalty + self.extra_penalty
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_single() -> SchemeParams {
        SchemeParams {
            e_cap: 1.17e8,
            penalty: 100.0,
            horizon: 1.0,
            rate: 0.05,
            e_max: 1.6519e8,
        }
    }

    fn reference_two(mechanism: Mechanism) -> TwoPeriodScheme {
        let e_max = 1.6519e8;
        let p1 = SchemeParams {
            e_cap: 1.0e8,
            penalty: 100.0,
            horizon: 1.0,
            rate: 0.05,
            e_max,
        };
        let p2 = SchemeParams {
            e_cap: 1.0e8,
            penalty: 100.0,
            horizon: 1.0,
            rate: 0.05,
            e_max,
        };
        TwoPeriodScheme::new(p1, p2, mechanism)
    }

    #[test]
    fn single_period_terminal_branches() {
        let s = reference_single();
        assert_eq!(s.single_period_terminal(0.0).unwrap(), 0.0);
        // Closed bracket: the cap itself pays the penalty.
        assert_eq!(s.single_period_terminal(1.17e8).unwrap(), 100.0);
        assert_eq!(s.single_period_terminal(s.e_max).unwrap(), 100.0);
        assert!(s.single_period_terminal(-1.0).is_err());
        assert!(s.single_period_terminal(s.e_max + 1.0).is_err());
    }

    #[test]
    fn single_period_terminal_single_jump() {
        let s = reference_single();
        let eps = 1.0;
        assert_eq!(s.single_period_terminal(s.e_cap - eps).unwrap(), 0.0);
        assert_eq!(s.single_period_terminal(s.e_cap).unwrap(), s.penalty);
        assert_eq!(s.single_period_terminal(s.e_cap + eps).unwrap(), s.penalty);
    }

    #[test]
    fn aggregate_supply_cases() {
        let s = reference_two(Mechanism::BankingWithdrawal);
        assert_eq!(s.aggregate_supply_period2(0.8e8).unwrap(), 1.2e8);
        assert_eq!(
            s.aggregate_supply_period2(s.period1.e_cap).unwrap(),
            s.period2.e_cap
        );
        // Beyond both allocations the positive part floors at zero.
        assert_eq!(s.aggregate_supply_period2(1.6519e8 * 0.999).unwrap(), 0.0);
    }

    #[test]
    fn aggregate_supply_is_nonincreasing_and_1_lipschitz() {
        let s = reference_two(Mechanism::BankingWithdrawal);
        let mut prev = s.aggregate_supply_period2(0.0).unwrap();
        let n = 500;
        for k in 1..=n {
            let e1 = s.period1.e_max * k as f64 / n as f64;
            let cur = s.aggregate_supply_period2(e1).unwrap();
            assert!(cur <= prev + 1e-9);
            let step = s.period1.e_max / n as f64;
            assert!((prev - cur).abs() <= step * (1.0 + 1e-12));
            prev = cur;
        }
    }

    #[test]
    fn phi2_branches() {
        let s = reference_two(Mechanism::BankingWithdrawal);
        assert_eq!(s.phi2(0.0, 0.0).unwrap(), 0.0);
        // At or above the adjusted supply the penalty applies.
        let supply = s.aggregate_supply_period2(0.5e8).unwrap();
        assert_eq!(s.phi2(supply, 0.5e8).unwrap(), 100.0);
        // Exhausted supply: any positive emissions are non-compliant.
        let e1 = s.period1.e_cap + s.period2.e_cap;
        assert_eq!(s.phi2(1.0, e1).unwrap(), 100.0);
    }

    #[test]
    fn phi1_banking_withdrawal_branches() {
        let s = reference_two(Mechanism::BankingWithdrawal);
        assert_eq!(s.phi1_banking_withdrawal(0.0, 30.0).unwrap(), 30.0);
        assert_eq!(
            s.phi1_banking_withdrawal(s.period1.e_cap, 30.0).unwrap(),
            130.0
        );
        assert_eq!(
            s.phi1_banking_withdrawal(s.period1.e_max, 0.0).unwrap(),
            200.0
        );
        // Mechanism mismatch is rejected.
        let b = reference_two(Mechanism::BankingBorrowingWithdrawal);
        assert!(b.phi1_banking_withdrawal(0.0, 0.0).is_err());
    }

    #[test]
    fn phi1_borrowing_branches() {
        let s = reference_two(Mechanism::BankingBorrowingWithdrawal);
        // Borrowing absorbs the first-period shortfall without penalty.
        assert_eq!(s.phi1_borrowing(s.period1.e_cap, 30.0).unwrap(), 30.0);
        assert_eq!(s.phi1_borrowing(s.period1.e_max, 0.0).unwrap(), 200.0);
        assert_eq!(s.phi1_borrowing(0.0, 0.0).unwrap(), 0.0);
        let bw = reference_two(Mechanism::BankingWithdrawal);
        assert!(bw.phi1_borrowing(0.0, 0.0).is_err());
    }

    #[test]
    fn borrowing_never_exceeds_banking_withdrawal() {
        let bw = reference_two(Mechanism::BankingWithdrawal);
        let bbw = reference_two(Mechanism::BankingBorrowingWithdrawal);
        let n = 400;
        for k in 0..=n {
            let e = bw.period1.e_max * k as f64 / n as f64;
            for &a2 in &[0.0, 30.0, 95.0] {
                let v_bw = bw.phi1_banking_withdrawal(e, a2).unwrap();
                let v_bbw = bbw.phi1_borrowing(e, a2).unwrap();
                assert!(v_bbw <= v_bw + 1e-12, "e = {e}, a2 = {a2}");
            }
        }
    }

    #[test]
    fn phi1_nondecreasing_in_emissions() {
        for mech in [
            Mechanism::BankingWithdrawal,
            Mechanism::BankingBorrowingWithdrawal,
        ] {
            let s = reference_two(mech);
            for &a2 in &[0.0, 50.0, 95.0] {
                let mut prev = f64::NEG_INFINITY;
                let n = 400;
                for k in 0..=n {
                    let e = s.period1.e_max * k as f64 / n as f64;
                    let v = s.phi1(e, a2).unwrap();
                    assert!(v >= prev - 1e-12);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn extra_penalty_floor_is_validated() {
        let mut s = reference_two(Mechanism::BankingWithdrawal);
        assert!(s.validate().is_empty());
        s.extra_penalty = 10.0;
        assert!(!s.validate().is_empty());
    }
}
