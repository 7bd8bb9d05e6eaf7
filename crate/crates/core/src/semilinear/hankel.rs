//! Discrete radial Fourier transform pair ĝ(ζ) = ∫₀^∞ r^{N-1} g(r) Λ_μ(ζr) dr, Λ_μ(z) = z^{-μ}J_μ(z).

use rayon::prelude::*;

use crate::bessel::Order;
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::grid::{CubicSpline, RadialGrid};
use crate::quad::{alternating_sum, composite_gauss_legendre, decompose_lobes, WeightSpec};

/// Radial extent of the r quadrature.
pub const R_MAX: f64 = 60.0;
const R_PANEL: f64 = 0.5;
const ZETA_PANEL: f64 = 0.25;
const GL_ORDER: usize = 16;
const FORWARD_POINTS: usize = 401;
const ROUND_TRIP_TOL: f64 = 1e-6;

pub(crate) struct HankelPair {
    n: usize,
    pub r_nodes: Vec<f64>,
    /// Uniform grid on which ĝ is sampled and splined.
    zeta_uniform: RadialGrid,
    /// forward[m][i] = w_i r_i^{N-1} Λ(ζ_m r_i)
    forward: Vec<Vec<f64>>,
    /// Power-law decay rate assumed for g beyond the last r node.
    tail_rate: f64,
    /// ∫_{r_last}^∞ r^{N-1-γ} Λ(ζ_m r) dr
    tail: Vec<f64>,
    pub zeta_nodes: Vec<f64>,
    /// inverse[i][j] = v_j ζ_j^{N-1} Λ(r_i ζ_j)
    inverse: Vec<Vec<f64>>,
    pub round_trip_error: f64,
}

impl HankelPair {
    /// Transform pair for dimension `n`; inputs decay like r^{-tail_rate} beyond `R_MAX`.
    pub fn new(n: usize, zeta_max: f64, tail_rate: f64) -> Result<Self> {
        let nf = n as f64;
        if !(tail_rate > nf) {
            return Err(Error::InvalidInput(format!(
                "tail decay r^-{tail_rate} is not integrable against r^{} in dimension {n}",
                n - 1
            )));
        }
        let order = Order::radial(n)?;
        let (r_nodes, r_weights) = composite_gauss_legendre(0.0, R_MAX, (R_MAX / R_PANEL).round() as usize, GL_ORDER);
        let zeta_uniform = RadialGrid::linear(0.0, zeta_max, FORWARD_POINTS)?;
        let forward: Vec<Vec<f64>> = zeta_uniform
            .points()
            .par_iter()
            .map(|&z| {
                r_nodes
                    .iter()
                    .zip(&r_weights)
                    .map(|(&r, &w)| w * r.powi(n as i32 - 1) * order.j_scaled(z * r))
                    .collect()
            })
            .collect();
        let r_last = *r_nodes.last().expect("non-empty r grid");
        let tail: Vec<Result<f64>> = zeta_uniform
            .points()
            .par_iter()
            .map(|&z| tail_integral(order, n, tail_rate, r_last, z))
            .collect();
        let tail = tail.into_iter().collect::<Result<Vec<f64>>>()?;
        let panels = (zeta_max / ZETA_PANEL).ceil() as usize;
        let (zeta_nodes, zeta_weights) = composite_gauss_legendre(0.0, zeta_max, panels, GL_ORDER);
        let inverse: Vec<Vec<f64>> = r_nodes
            .par_iter()
            .map(|&r| {
                zeta_nodes
                    .iter()
                    .zip(&zeta_weights)
                    .map(|(&z, &v)| v * z.powi(n as i32 - 1) * order.j_scaled(r * z))
                    .collect()
            })
            .collect();
        let mut pair = HankelPair {
            n,
            r_nodes,
            zeta_uniform,
            forward,
            tail_rate,
            tail,
            zeta_nodes,
            inverse,
            round_trip_error: 0.0,
        };
        pair.round_trip_error = pair.gaussian_round_trip()?;
        if pair.round_trip_error > ROUND_TRIP_TOL {
            return Err(Error::Accuracy {
                requested: ROUND_TRIP_TOL,
                achieved: pair.round_trip_error,
            });
        }
        Ok(pair)
    }

    /// ĝ sampled on the uniform ζ grid from values of g at the r nodes.
    pub fn forward(&self, g: &[f64]) -> Result<CubicSpline> {
        let r_last = *self.r_nodes.last().expect("non-empty r grid");
        let amplitude = g[g.len() - 1] * r_last.powf(self.tail_rate);
        let values = self
            .forward
            .iter()
            .zip(&self.tail)
            .map(|(row, t)| row.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() + amplitude * t)
            .collect();
        CubicSpline::even(self.zeta_uniform.clone(), values)
    }

    /// g at the r nodes from ĝ at the ζ nodes.
    pub fn inverse(&self, g_hat: &[f64]) -> Vec<f64> {
        self.inverse
            .iter()
            .map(|row| row.iter().zip(g_hat).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max error of g ↦ ĝ ↦ g for g(r) = e^{-r²/4}, whose transform is 2^{N/2}e^{-ζ²}.
    fn gaussian_round_trip(&self) -> Result<f64> {
        let g: Vec<f64> = self.r_nodes.iter().map(|r| (-r * r / 4.0).exp()).collect();
        // the Gaussian has no power tail; a zero last value disables the tail term
        let mut g_tailless = g.clone();
        *g_tailless.last_mut().expect("non-empty") = 0.0;
        let spline = self.forward(&g_tailless)?;
        let g_hat: Vec<f64> = self.zeta_nodes.iter().map(|&z| spline.eval(z)).collect();
        let exact_hat = 2f64.powf(self.n as f64 / 2.0);
        let forward_err = self
            .zeta_nodes
            .iter()
            .zip(&g_hat)
            .map(|(&z, v)| (v - exact_hat * (-z * z).exp()).abs())
            .fold(0.0, f64::max);
        let back = self.inverse(&g_hat);
        let inverse_err = back.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok(forward_err.max(inverse_err))
    }
}

/// ∫_R^∞ r^{N-1-γ} Λ_μ(ζ r) dr.
fn tail_integral(order: Order, n: usize, rate: f64, r0: f64, zeta: f64) -> Result<f64> {
    let nf = n as f64;
    let mu = order.mu();
    if zeta == 0.0 {
        let lambda0 = 2f64.powf(-mu) / gamma(mu + 1.0);
        return Ok(lambda0 * r0.powf(nf - rate) / (rate - nf));
    }
    // s = ζr: ζ^{γ-N} ∫_{ζR}^∞ s^{N-1-γ-μ-1/2} s^{1/2} J_μ(s) ds
    let power = nf - 1.0 - rate - mu - 0.5;
    let weight = WeightSpec::new(move |s: f64| s.powf(power)).support_start(zeta * r0);
    let d = decompose_lobes(order, &weight, 100_000, 1e-12)?;
    Ok(zeta.powf(rate - nf) * alternating_sum(&d).value)
}
