//! Two-sided bounds K_*/(|x|^β + t^{β/4}) ≤ S(t)φ ≤ K^*/(|x|^β + t^{β/4}).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::LOBE_TOL;

use super::positivity::scan_grid;
use super::profile::{a_limit, a_tilde, c_const, check_beta, profile_sum, BetaRange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeConstants {
    /// K_* = c·min(K₁, K₂).
    pub k_lower: f64,
    /// K^* = 2c·max(sup_{η≥1} |F|, sup_{η≤1} η^{-β}|F|).
    pub k_upper: f64,
    /// min(inf_{η≥1} F, A/2).
    pub k1: f64,
    /// inf_{η≤1} η^{-β}F, including the limit Ã.
    pub k2: f64,
    /// inf over η of c(1 + η^{-β})F(η), the best lower constant on the grid.
    pub sharp_lower: f64,
    /// sup over η of c(1 + η^{-β})|F(η)|.
    pub sharp_upper: f64,
    pub c: f64,
}

/// Envelope constants from F_{N,β} on the scan grid [1e-3, 1e3] and its two limits.
///
/// Fails with `PositivityRequired` when F takes a non-positive value, since no
/// lower envelope exists then; use [`upper_envelope`] for the upper constant alone.
pub fn envelope_constants(n: usize, beta: f64) -> Result<EnvelopeConstants> {
    let e = tabulate(n, beta)?;
    if let Some(&(eta, f)) = e.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::PositivityRequired(format!(
            "F_(N={n}, β={beta})({eta}) = {f:e} is not positive, so no lower envelope K_* exists"
        )));
    }
    Ok(constants(n, beta, &e))
}

/// K^* alone; valid whatever the sign of F.
pub fn upper_envelope(n: usize, beta: f64) -> Result<f64> {
    let e = tabulate(n, beta)?;
    Ok(constants(n, beta, &e).k_upper)
}

fn tabulate(n: usize, beta: f64) -> Result<Vec<(f64, f64)>> {
    check_beta(n, beta, BetaRange::Open)?;
    let grid = scan_grid();
    let rows: Vec<Result<(f64, f64)>> = grid
        .points()
        .par_iter()
        .map(|&eta| Ok((eta, profile_sum(n, beta, eta, LOBE_TOL)?.value)))
        .collect();
    rows.into_iter().collect()
}

fn constants(n: usize, beta: f64, table: &[(f64, f64)]) -> EnvelopeConstants {
    let c = c_const(n, beta);
    let a = a_limit(n, beta);
    let at = a_tilde(n, beta);
    let outer = table.iter().filter(|p| p.0 >= 1.0);
    let inner = table.iter().filter(|p| p.0 <= 1.0);
    let k1 = outer.clone().map(|p| p.1).fold(a / 2.0, f64::min);
    let k2 = inner.clone().map(|p| p.1 * p.0.powf(-beta)).fold(at, f64::min);
    let sup_outer = outer.map(|p| p.1.abs()).fold(a, f64::max);
    let sup_inner = inner.map(|p| p.1.abs() * p.0.powf(-beta)).fold(at, f64::max);
    let weighted = table.iter().map(|p| c * (1.0 + p.0.powf(-beta)) * p.1);
    // the limits η → 0 and η → ∞ of c(1 + η^{-β})F are cÃ and cA = 1
    let sharp_lower = weighted.clone().fold((c * at).min(c * a), f64::min);
    let sharp_upper = weighted.map(f64::abs).fold((c * at).max(c * a), f64::max);
    EnvelopeConstants {
        k_lower: c * k1.min(k2),
        k_upper: 2.0 * c * sup_outer.max(sup_inner),
        k1,
        k2,
        sharp_lower,
        sharp_upper,
        c,
    }
}
