//! The self-similar profile F_{N,β} of the linear flow from |x|^{-β}.

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::Order;
use crate::error::{domain, Error, Result};
use crate::gamma::gamma;
use crate::grid::{HermiteTable, RadialGrid};
use crate::kernel::{check_dimension, LOBE_TOL, WEIGHT_CUT};
use crate::quad::{
    alternating_sum, decompose_lobes, truncation_point, AlternatingSum, LobeDecomposition, Monotonicity,
    WeightSpec,
};

const MAX_LOBES: usize = 1_000_000;

/// c_{N,β} = 2^{N/2-β} Γ((N-β)/2) / Γ(β/2).
pub fn c_const(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    2f64.powf(nf / 2.0 - beta) * gamma((nf - beta) / 2.0) / gamma(beta / 2.0)
}

/// A_{N,β} = lim_{η→∞} F_{N,β}(η) = 2^{β-N/2} Γ(β/2) / Γ((N-β)/2).
pub fn a_limit(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    2f64.powf(beta - nf / 2.0) * gamma(beta / 2.0) / gamma((nf - beta) / 2.0)
}

/// Ã_{N,β} = lim_{η→0} η^{-β} F_{N,β}(η) = Γ(β/4) / (4 Γ(N/2) 2^{(N-2)/2}).
pub fn a_tilde(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    gamma(beta / 4.0) / (4.0 * gamma(nf / 2.0) * 2f64.powf((nf - 2.0) / 2.0))
}

/// Which β are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaRange {
    /// 0 < β < N.
    Open,
    /// 0 < β ≤ N; β = N gives F_{N,N} = η^N f_N.
    IncludingN,
    /// Any β > 0, used for the auxiliary profiles F_{N+2,β}.
    Positive,
}

pub(crate) fn check_beta(n: usize, beta: f64, range: BetaRange) -> Result<()> {
    check_dimension(n)?;
    let nf = n as f64;
    let ok = beta > 0.0
        && beta.is_finite()
        && match range {
            BetaRange::Open => beta < nf,
            BetaRange::IncludingN => beta <= nf,
            BetaRange::Positive => true,
        };
    if ok {
        Ok(())
    } else {
        domain(format!("beta = {beta} outside the admitted range {range:?} for N = {n}"))
    }
}

/// Lobe decomposition of F_{N,β}(η) = ∫ W(s) s^{1/2} J_{(N-2)/2}(s) ds with W = e^{-(s/η)^4} s^{β-(N+1)/2}.
pub(crate) fn profile_lobes(n: usize, beta: f64, eta: f64, lobe_tol: f64) -> Result<LobeDecomposition> {
    let order = Order::radial(n)?;
    let power = beta - (n as f64 + 1.0) / 2.0;
    let flag = if power <= 0.0 {
        Monotonicity::StrictlyDecreasing
    } else {
        Monotonicity::Unknown
    };
    let weight = WeightSpec::new(move |s: f64| (-(s / eta).powi(4)).exp() * s.powf(power))
        .small_s_exponent(power)
        .monotone(flag)
        .support(truncation_point(eta, WEIGHT_CUT));
    decompose_lobes(order, &weight, MAX_LOBES, lobe_tol)
}

/// F_{N,β}(η) with its lobe sum, for internal callers that need the certificate.
pub(crate) fn profile_sum(n: usize, beta: f64, eta: f64, lobe_tol: f64) -> Result<AlternatingSum> {
    if !(eta > 0.0) || !eta.is_finite() {
        return domain(format!("eta = {eta} must be positive and finite"));
    }
    Ok(alternating_sum(&profile_lobes(n, beta, eta, lobe_tol)?))
}

/// F_{N,β}(η) to absolute accuracy `tol`.
pub fn profile_value(n: usize, beta: f64, eta: f64, tol: f64, range: BetaRange) -> Result<f64> {
    check_beta(n, beta, range)?;
    let s = profile_sum(n, beta, eta, LOBE_TOL)?;
    if s.error_bound > tol {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: s.error_bound,
        });
    }
    Ok(s.value)
}

/// F_{N,β}(η) together with the alternating-sum error bound.
pub fn profile_estimate(n: usize, beta: f64, eta: f64, range: BetaRange) -> Result<(f64, f64)> {
    check_beta(n, beta, range)?;
    let s = profile_sum(n, beta, eta, LOBE_TOL)?;
    Ok((s.value, s.error_bound))
}

/// η^{-β} F_{N,β}(η), continuous at η = 0 with value Ã.
pub(crate) fn scaled_profile(n: usize, beta: f64, eta: f64) -> Result<f64> {
    if eta == 0.0 {
        return Ok(a_tilde(n, beta));
    }
    Ok(profile_sum(n, beta, eta, LOBE_TOL)?.value * eta.powf(-beta))
}

/// 4η^{β-N/2} ∫ E(s) s^{β-N/2+3} J_{N/2}(ηs) ds, the remainder term of the recurrence.
pub fn recurrence_extra_term(n: usize, beta: f64, eta: f64) -> Result<f64> {
    check_beta(n, beta, BetaRange::Positive)?;
    if !(eta > 0.0) {
        return domain(format!("eta = {eta} must be positive"));
    }
    // with u = ηs this is 4η^{-4} ∫ E(u/η) u^{β-N/2+3} J_{N/2}(u) du
    let order = Order::new(n as f64 / 2.0)?;
    let power = beta - n as f64 / 2.0 + 2.5;
    let weight = WeightSpec::new(move |s: f64| (-(s / eta).powi(4)).exp() * s.powf(power))
        .small_s_exponent(power)
        .support(truncation_point(eta, WEIGHT_CUT));
    let d = decompose_lobes(order, &weight, MAX_LOBES, LOBE_TOL)?;
    Ok(4.0 * eta.powi(-4) * alternating_sum(&d).value)
}

/// |F_{N,β}(η) - (N-β)F_{N+2,β}(η) - extra term|, both sides by independent quadratures.
pub fn recurrence_residual(n: usize, beta: f64, eta: f64) -> Result<f64> {
    check_beta(n, beta, BetaRange::Positive)?;
    let lhs = profile_sum(n, beta, eta, LOBE_TOL)?.value;
    let next = profile_sum(n + 2, beta, eta, LOBE_TOL)?.value;
    let extra = recurrence_extra_term(n, beta, eta)?;
    Ok((lhs - (n as f64 - beta) * next - extra).abs())
}

/// [S(t)|·|^{-β}](x) = c_{N,β} t^{-β/4} η^{-β} F_{N,β}(η), η = |x| t^{-1/4}.
pub fn linear_solution(n: usize, beta: f64, x_norm: f64, t: f64) -> Result<f64> {
    check_beta(n, beta, BetaRange::Open)?;
    if !(t > 0.0) {
        return domain(format!("time {t} must be positive"));
    }
    if !(x_norm >= 0.0) || !x_norm.is_finite() {
        return domain(format!("|x| = {x_norm} must be finite and non-negative"));
    }
    let eta = x_norm * t.powf(-0.25);
    Ok(c_const(n, beta) * t.powf(-beta / 4.0) * scaled_profile(n, beta, eta)?)
}

/// F_{N,β} tabulated as g(η) = η^{-β}F on a log grid, with slopes from
/// d/dη[η^{-β}F_{N,β}] = -η^{-β-1} F_{N+2,β+2}.
#[derive(Debug, Clone, Serialize)]
pub struct SelfSimilarProfile {
    pub dimension: usize,
    pub beta: f64,
    pub a: f64,
    pub a_tilde: f64,
    pub c: f64,
    /// F_{N,β} at the grid nodes.
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    table: HermiteTable,
}

impl SelfSimilarProfile {
    pub fn build(n: usize, beta: f64, grid: RadialGrid) -> Result<Self> {
        check_beta(n, beta, BetaRange::Open)?;
        let pts = grid.points();
        if pts.len() < 2 || !(pts[0] > 0.0) {
            return domain("profile grid needs >= 2 positive abscissae");
        }
        let rows: Vec<Result<(f64, f64, f64)>> = pts
            .par_iter()
            .map(|&eta| {
                let s = profile_sum(n, beta, eta, LOBE_TOL)?;
                let up = profile_sum(n + 2, beta + 2.0, eta, LOBE_TOL)?.value;
                Ok((s.value, s.error_bound, -eta.powf(-beta - 1.0) * up))
            })
            .collect();
        let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
        if rows.iter().any(|r| !r.0.is_finite()) {
            return Err(Error::InvalidInput("profile evaluation produced a non-finite value".into()));
        }
        let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let scaled = pts.iter().zip(&values).map(|(e, f)| f * e.powf(-beta)).collect();
        let slopes = rows.iter().map(|r| r.2).collect();
        Ok(SelfSimilarProfile {
            dimension: n,
            beta,
            a: a_limit(n, beta),
            a_tilde: a_tilde(n, beta),
            c: c_const(n, beta),
            values,
            error_estimates: rows.iter().map(|r| r.1).collect(),
            table: HermiteTable::new(grid, scaled, slopes)?,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.table.grid()
    }

    /// Interpolated η^{-β}F(η). Below the first node the value is blended
    /// linearly towards Ã at 0; beyond the last node F is replaced by A.
    pub fn scaled(&self, eta: f64) -> f64 {
        let p = self.grid().points();
        let (first, last) = (p[0], p[p.len() - 1]);
        if eta < first {
            let g0 = self.table.values()[0];
            self.a_tilde + (g0 - self.a_tilde) * eta / first
        } else if eta > last {
            self.a * eta.powf(-self.beta)
        } else {
            self.table.eval(eta)
        }
    }

    /// Interpolated F(η).
    pub fn eval(&self, eta: f64) -> f64 {
        self.scaled(eta) * eta.powf(self.beta)
    }

    /// Interpolated [S(t)φ](x).
    pub fn solution(&self, x_norm: f64, t: f64) -> f64 {
        self.c * t.powf(-self.beta / 4.0) * self.scaled(x_norm * t.powf(-0.25))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants() {
        assert!((a_limit(3, 1.0) - (PI / 2.0).sqrt()).abs() < 1e-14);
        // Γ(1/8)/4
        assert!((a_tilde(2, 0.5) - 1.883_485_399_699_403).abs() < 1e-12);
        for (n, b) in [(1, 0.3), (2, 1.1), (5, 2.5)] {
            assert!((c_const(n, b) * a_limit(n, b) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn large_and_small_eta() {
        let big = profile_value(3, 1.0, 1e3, 1e-6, BetaRange::Open).unwrap();
        assert!((big - 1.253_314_137_315_500_3).abs() < 1e-6);
        let small = profile_value(2, 0.5, 1e-3, 1e-6, BetaRange::Open).unwrap();
        assert!((small / 1e-3f64.sqrt() - a_tilde(2, 0.5)).abs() < 1e-5);
    }

    #[test]
    fn beta_range_is_enforced() {
        assert!(profile_value(2, 2.0, 1.0, 1e-6, BetaRange::Open).is_err());
        assert!(profile_value(2, 2.0, 1.0, 1e-6, BetaRange::IncludingN).is_ok());
        assert!(profile_value(2, 0.0, 1.0, 1e-6, BetaRange::Positive).is_err());
    }

    #[test]
    fn recurrence() {
        assert!(recurrence_residual(1, 0.5, 1.0).unwrap() <= 1e-8);
        assert!(recurrence_residual(2, 1.0, 2.0).unwrap() <= 1e-8);
        let e: Vec<f64> = [2.0, 4.0, 8.0, 16.0, 50.0]
            .iter()
            .map(|&eta| recurrence_extra_term(3, 1.0, eta).unwrap().abs())
            .collect();
        assert!(e[4] <= 1e-3);
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn solution_examples() {
        let u = linear_solution(1, 0.25, 1.0, 1.0).unwrap();
        let v = linear_solution(1, 0.25, 3.0, 81.0).unwrap();
        assert!((v - 3f64.powf(-0.25) * u).abs() < 1e-9);
        let at0 = linear_solution(2, 1.0, 0.0, 16.0).unwrap();
        assert!((at0 - c_const(2, 1.0) * a_tilde(2, 1.0) * 0.5).abs() < 1e-14);
        // short time: initial datum recovered
        let early = linear_solution(3, 1.0, 2.0, 1e-8).unwrap();
        assert!((early * 2.0 - 1.0).abs() < 1e-6);
        assert!(linear_solution(3, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn tabulated_profile() {
        let grid = RadialGrid::log(1e-3, 50.0, 300).unwrap();
        let p = SelfSimilarProfile::build(3, 1.0, grid).unwrap();
        for eta in [2e-4, 0.0123, 0.77, 3.3, 41.0, 200.0] {
            let exact = scaled_profile(3, 1.0, eta).unwrap();
            assert!((p.scaled(eta) - exact).abs() < 2e-6 * exact.abs().max(1.0), "eta={eta}");
        }
    }
}
