//! The fundamental solution G(x,t) = α_N t^{-N/4} f_N(|x| t^{-1/4}) of ∂_t u + Δ²u = 0.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use parking_lot::Mutex;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::Order;
use crate::error::{domain, Error, Result};
use crate::gamma::gamma;
use crate::grid::{HermiteTable, RadialGrid};
use crate::quad::{alternating_sum, decompose_lobes, integrate, truncation_point, WeightSpec};

/// Per-lobe relative tolerance used for profile evaluations.
pub(crate) const LOBE_TOL: f64 = 1e-13;
/// e^{-(s/η)^4} is treated as zero below this.
pub(crate) const WEIGHT_CUT: f64 = 1e-30;
const MAX_LOBES: usize = 100_000;
/// Step of the central difference in the derivative identity check.
pub const FD_STEP: f64 = 1e-4;

pub(crate) fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > 64 {
        return domain(format!("dimension {n} outside 1..=64"));
    }
    Ok(())
}

/// α_N = (2π)^{-N/2}.
pub fn alpha(n: usize) -> f64 {
    (2.0 * PI).powf(-(n as f64) / 2.0)
}

/// Surface measure of the unit sphere in ℝ^N.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// lim_{η→0} f_N(η) = 2^{-(N-2)/2} Γ(N/4) / (4 Γ(N/2)).
pub fn f_profile_at_zero(n: usize) -> f64 {
    let nf = n as f64;
    2f64.powf(-(nf - 2.0) / 2.0) / gamma(nf / 2.0) * gamma(nf / 4.0) / 4.0
}

/// f_N(η) and an error bound.
pub(crate) fn f_profile_raw(n: usize, eta: f64) -> Result<(f64, f64)> {
    if eta == 0.0 {
        return Ok((f_profile_at_zero(n), 0.0));
    }
    let order = Order::radial(n)?;
    let power = (n as f64 - 1.0) / 2.0;
    let weight = WeightSpec::new(move |s: f64| (-(s / eta).powi(4)).exp() * s.powf(power))
        .small_s_exponent(power)
        .support(truncation_point(eta, WEIGHT_CUT));
    let d = decompose_lobes(order, &weight, MAX_LOBES, LOBE_TOL)?;
    let sum = alternating_sum(&d);
    let scale = eta.powi(-(n as i32));
    Ok((sum.value * scale, sum.error_bound * scale))
}

/// f_N(η) = η^{-N} ∫₀^∞ e^{-(s/η)^4} s^{N/2} J_{(N-2)/2}(s) ds to absolute accuracy `tol`.
pub fn f_profile(n: usize, eta: f64, tol: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(eta >= 0.0) || !eta.is_finite() {
        return domain(format!("profile argument {eta} must be finite and non-negative"));
    }
    let (value, error) = f_profile_raw(n, eta)?;
    if error > tol {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: error,
        });
    }
    Ok(value)
}

/// G(x, t) for |x| = `x_norm`.
pub fn kernel_value(n: usize, x_norm: f64, t: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(t > 0.0) {
        return domain(format!("time {t} must be positive"));
    }
    if !(x_norm >= 0.0) {
        return domain(format!("|x| = {x_norm} must be non-negative"));
    }
    let (f, _) = f_profile_raw(n, x_norm * t.powf(-0.25))?;
    Ok(alpha(n) * t.powf(-(n as f64) / 4.0) * f)
}

/// max over the grid of |Df_N(η) + η f_{N+2}(η)| with a central difference of step 1e-4.
pub fn derivative_identity_residual(n: usize, grid: &RadialGrid) -> Result<f64> {
    check_dimension(n)?;
    let pts = grid.points();
    if pts.iter().any(|&e| !(e > 0.0 && e <= 10.0)) {
        return domain("identity check needs abscissae in (0, 10]");
    }
    let residuals: Vec<Result<f64>> = pts
        .par_iter()
        .map(|&eta| {
            let lo = (eta - FD_STEP).max(0.0);
            let hi = eta + FD_STEP;
            let df = (f_profile_raw(n, hi)?.0 - f_profile_raw(n, lo)?.0) / (hi - lo);
            Ok((df + eta * f_profile_raw(n + 2, eta)?.0).abs())
        })
        .collect();
    residuals.into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

/// Zeros of f_N in (0, eta_max): scan with step 0.05, then bisection to 1e-8.
pub fn sign_changes(n: usize, eta_max: f64) -> Result<Vec<f64>> {
    check_dimension(n)?;
    let step = 0.05;
    let count = (eta_max / step).floor() as usize;
    let nodes: Vec<f64> = (1..=count).map(|i| i as f64 * step).filter(|&e| e < eta_max).collect();
    let values: Vec<Result<f64>> = nodes.par_iter().map(|&e| Ok(f_profile_raw(n, e)?.0)).collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let brackets: Vec<(f64, f64, f64)> = nodes
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0] != 0.0 && v[0].signum() != v[1].signum())
        .map(|(x, v)| (x[0], x[1], v[0]))
        .collect();
    brackets
        .into_par_iter()
        .map(|(mut a, mut b, fa)| {
            while b - a > 1e-8 {
                let m = 0.5 * (a + b);
                let fm = f_profile_raw(n, m)?.0;
                if fm == 0.0 {
                    return Ok(m);
                }
                if fm.signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(0.5 * (a + b))
        })
        .collect()
}

/// N ω_N ∫₀^∞ G(r, t) r^{N-1} dr, which equals 1.
pub fn mass(n: usize, t: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(t > 0.0) {
        return domain(format!("time {t} must be positive"));
    }
    let scale = t.powf(0.25);
    let nf = n as f64;
    // substitute r = scale·η; f_N is negligible beyond η = 40
    let r = integrate(
        |eta: f64| f_profile_raw(n, eta).map_or(f64::NAN, |(f, _)| f * eta.powf(nf - 1.0)),
        0.0,
        40.0,
        1e-10,
        1e-13,
        2000,
    )?;
    if !r.value.is_finite() {
        return Err(Error::InvalidInput("profile evaluation failed inside the mass integral".into()));
    }
    Ok(sphere_area(n) * alpha(n) * r.value * (scale * scale.powf(nf - 1.0)) / t.powf(nf / 4.0))
}

/// Decay envelope |f_N(η)| ≤ c₁ e^{-c₂ η^{4/3}}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
}

fn fit_cache() -> &'static Mutex<HashMap<usize, DecayFit>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, DecayFit>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fit (c₁, c₂) for dimension N.
///
/// c₂ is the least-squares decay rate of log|f_N| at its local maxima on
/// [5, 15]; c₁ is then the smallest constant for which the envelope holds at
/// every sample of [0, 15].
pub fn decay_fit(n: usize) -> Result<DecayFit> {
    check_dimension(n)?;
    if let Some(fit) = fit_cache().lock().get(&n) {
        return Ok(*fit);
    }
    let step = 0.01;
    let etas: Vec<f64> = (0..=1500).map(|i| i as f64 * step).collect();
    let values: Vec<Result<f64>> = etas.par_iter().map(|&e| Ok(f_profile_raw(n, e)?.0)).collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..etas.len() - 1 {
        let (a, b, c) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
        if etas[i] >= 5.0 && b > a && b >= c && b > 0.0 {
            xs.push(etas[i].powf(4.0 / 3.0));
            ys.push(b.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput(format!("too few local maxima of |f_{n}| on [5, 15] to fit the envelope")));
    }
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let c2 = -sxy / sxx;
    if !(c2 > 0.0) {
        return Err(Error::InvalidInput(format!("fitted decay rate {c2} is not positive")));
    }
    let c1 = etas
        .iter()
        .zip(&values)
        .map(|(e, f)| f.abs() * (c2 * e.powf(4.0 / 3.0)).exp())
        .fold(0.0, f64::max);
    let fit = DecayFit { c1, c2 };
    fit_cache().lock().insert(n, fit);
    Ok(fit)
}

/// Tabulated f_N on a hybrid grid with cubic Hermite interpolation.
///
/// Slopes come from the identity f_N' = -η f_{N+2}, so no differencing is needed.
#[derive(Debug, Clone, Serialize)]
pub struct KernelProfile {
    pub dimension: usize,
    pub alpha: f64,
    pub error_estimates: Vec<f64>,
    pub fit: DecayFit,
    table: HermiteTable,
}

impl KernelProfile {
    /// Linear step 0.02 on [0, 4], then `log_count` log-spaced nodes up to `eta_max`.
    pub fn build(n: usize, eta_max: f64, log_count: usize) -> Result<Self> {
        check_dimension(n)?;
        let grid = RadialGrid::hybrid(0.02, 4.0, eta_max, log_count)?;
        let rows: Vec<Result<(f64, f64, f64)>> = grid
            .points()
            .par_iter()
            .map(|&eta| {
                let (f, err) = f_profile_raw(n, eta)?;
                let (g, _) = f_profile_raw(n + 2, eta)?;
                Ok((f, -eta * g, err))
            })
            .collect();
        let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
        let values = rows.iter().map(|r| r.0).collect();
        let slopes = rows.iter().map(|r| r.1).collect();
        let error_estimates = rows.iter().map(|r| r.2).collect();
        Ok(KernelProfile {
            dimension: n,
            alpha: alpha(n),
            error_estimates,
            fit: decay_fit(n)?,
            table: HermiteTable::new(grid, values, slopes)?,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.table.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.table.values()
    }

    /// Interpolated f_N(η); zero beyond the last node.
    pub fn eval(&self, eta: f64) -> f64 {
        let last = *self.grid().points().last().expect("non-empty grid");
        if eta > last {
            0.0
        } else {
            self.table.eval(eta)
        }
    }

    /// Interpolated G(x, t).
    pub fn kernel(&self, x_norm: f64, t: f64) -> f64 {
        self.alpha * t.powf(-(self.dimension as f64) / 4.0) * self.eval(x_norm * t.powf(-0.25))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_eta_limits() {
        // √2 Γ(1/4) / (4√π) and √π/4
        assert!((f_profile_at_zero(1) - 0.723_204_542_316_039).abs() < 1e-14);
        assert!((f_profile_at_zero(2) - PI.sqrt() / 4.0).abs() < 1e-15);
        for n in 1..=5 {
            let near = f_profile(n, 1e-4, 1e-10).unwrap();
            assert!((near - f_profile_at_zero(n)).abs() < 1e-7, "N={n}");
        }
    }

    #[test]
    fn limit_by_direct_quadrature() {
        // ∫ e^{-s^4} ds over [0, 3] by plain quadrature, times 2^{1/2}/Γ(1/2)
        let r = integrate(|s: f64| (-s.powi(4)).exp(), 0.0, 3.0, 1e-14, 0.0, 100).unwrap();
        assert!((r.value * 2f64.sqrt() / PI.sqrt() - f_profile_at_zero(1)).abs() < 1e-12);
    }

    #[test]
    fn n1_profile_matches_cosine_transform() {
        // f_1(η) = √(2/π) η^{-1} ∫ e^{-(s/η)^4} cos s ds
        for eta in [0.5, 2.0, 7.0] {
            let direct = integrate(
                |s: f64| (-(s / eta).powi(4)).exp() * s.cos(),
                0.0,
                eta * 3.0,
                1e-14,
                0.0,
                2000,
            )
            .unwrap()
            .value
                * (2.0 / PI).sqrt()
                / eta;
            assert!((f_profile(1, eta, 1e-10).unwrap() - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn scaling_and_origin() {
        let g11 = kernel_value(1, 1.0, 1.0).unwrap();
        let g216 = kernel_value(1, 2.0, 16.0).unwrap();
        assert!((g216 - 0.5 * g11).abs() < 1e-15);
        assert!((kernel_value(1, 0.0, 1.0).unwrap() - 0.288_516_869_308_235).abs() < 1e-14);
        assert!(kernel_value(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn derivative_identity() {
        let grid = RadialGrid::linear(0.5, 5.0, 10).unwrap();
        assert!(derivative_identity_residual(1, &grid).unwrap() <= 1e-5);
        let one = RadialGrid::new(vec![1.0]).unwrap();
        assert!(derivative_identity_residual(3, &one).unwrap() <= 1e-5);
        let tiny = RadialGrid::new(vec![1e-3]).unwrap();
        assert!(derivative_identity_residual(2, &tiny).unwrap() <= 1e-5);
    }

    #[test]
    fn sign_change_examples() {
        assert!(sign_changes(1, 20.0).unwrap().len() >= 3);
        let z3 = sign_changes(3, 20.0).unwrap();
        assert!(!z3.is_empty());
        assert!(z3.windows(2).all(|w| w[0] < w[1]));
        assert!(sign_changes(1, 0.1).unwrap().is_empty());
    }

    #[test]
    fn mass_is_one() {
        for n in 1..=3 {
            for t in [0.1, 1.0, 10.0] {
                assert!((mass(n, t).unwrap() - 1.0).abs() < 1e-6, "N={n} t={t}");
            }
        }
    }

    #[test]
    fn decay_envelope_holds() {
        let fit = decay_fit(1).unwrap();
        assert!(fit.c1 > 0.0 && fit.c2 > 0.0);
        let f15 = f_profile(1, 15.0, 1e-12).unwrap();
        assert!(f15.abs() <= fit.c1 * (-fit.c2 * 15f64.powf(4.0 / 3.0)).exp());
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let p = KernelProfile::build(2, 30.0, 200).unwrap();
        for eta in [0.013, 1.234, 3.99, 6.7, 12.0] {
            let exact = f_profile(2, eta, 1e-10).unwrap();
            assert!((p.eval(eta) - exact).abs() < 1e-7, "eta={eta} {}", p.eval(eta) - exact);
        }
        assert!(p.eval(0.0) > 0.0);
    }
}
