//! S(t) applied to Riesz potentials ∫ f(y)|x - y|^{-β} dy of non-negative radial densities.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::RadialGrid;
use crate::kernel::sphere_area;
use crate::quad::integrate;

use super::profile::{check_beta, BetaRange, SelfSimilarProfile};

/// Non-negative radial density f(|y|), linear between samples and zero outside.
#[derive(Debug, Clone, Serialize)]
pub struct RadialDensity {
    pub q: f64,
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialDensity {
    pub fn new(q: f64, grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if !(q > 1.0) {
            return domain(format!("integrability exponent q = {q} must exceed 1"));
        }
        if values.len() != grid.len() {
            return domain("density needs one value per grid point");
        }
        if let Some(i) = values.iter().position(|&v| !(v >= 0.0) || !v.is_finite()) {
            return domain(format!("density sample {} at r = {} is negative or not finite", values[i], grid.points()[i]));
        }
        Ok(RadialDensity { q, grid, values })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, r: f64) -> f64 {
        let p = self.grid.points();
        if p.len() == 1 || r < p[0] || r > p[p.len() - 1] {
            return if p.len() == 1 && r == p[0] { self.values[0] } else { 0.0 };
        }
        let i = self.grid.bracket(r);
        let w = (r - p[i]) / (p[i + 1] - p[i]);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

fn sphere_average(n: usize, u: &dyn Fn(f64) -> f64, x: f64, r: f64) -> Result<f64> {
    // ∫_{S^{N-1}} u(|x - rθ|) dθ
    if n == 1 {
        return Ok(u((x - r).abs()) + u(x + r));
    }
    let dist = |c: f64| (x * x + r * r - 2.0 * x * r * c).max(0.0).sqrt();
    let lower = sphere_area(n - 1);
    let m = n as i32 - 2;
    let res = integrate(|th: f64| u(dist(th.cos())) * th.sin().powi(m), 0.0, std::f64::consts::PI, 1e-10, 1e-300, 2000)?;
    Ok(lower * res.value)
}

/// [S(t)ψ](x) for ψ = f * |·|^{-β}, i.e. ∫ [S(t)|·|^{-β}](x - z) f(|z|) dz.
pub fn riesz_smoothing(n: usize, beta: f64, density: &RadialDensity, x_norm: f64, t: f64) -> Result<f64> {
    check_beta(n, beta, BetaRange::Open)?;
    if !(t > 0.0) || !(x_norm >= 0.0) {
        return domain(format!("need t > 0 and |x| >= 0, got t = {t}, |x| = {x_norm}"));
    }
    let nf = n as f64;
    if density.q >= nf / (nf - beta) {
        return domain(format!("q = {} must lie below N/(N-β) = {}", density.q, nf / (nf - beta)));
    }
    if density.is_trivial() {
        return Ok(0.0);
    }
    let pts = density.grid().points();
    let r_max = pts[pts.len() - 1];
    let scale = t.powf(-0.25);
    let eta_max = ((x_norm + r_max) * scale).max(2e-3);
    let grid = RadialGrid::log(1e-3, eta_max.max(1.1e-3), 400)?;
    let profile = SelfSimilarProfile::build(n, beta, grid)?;
    let u = |y: f64| profile.solution(y, t);
    let radial = |r: f64| -> f64 {
        let f = density.eval(r);
        if f == 0.0 {
            return 0.0;
        }
        sphere_average(n, &u, x_norm, r).map_or(f64::NAN, |v| v * f * r.powi(n as i32 - 1))
    };
    // integrate panel by panel so the kinks of the interpolated density fall on panel ends
    let mut total = 0.0;
    for w in pts.windows(2) {
        let res = integrate(radial, w[0], w[1], 1e-9, 1e-300, 2000)?;
        total += res.value;
    }
    if !total.is_finite() {
        return Err(Error::InvalidInput("angular integration failed".into()));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::profile::linear_solution;

    #[test]
    fn rejects_negative_density() {
        let g = RadialGrid::linear(0.0, 1.0, 3).unwrap();
        assert!(RadialDensity::new(1.2, g, vec![1.0, -0.1, 0.0]).is_err());
    }

    #[test]
    fn zero_density() {
        let g = RadialGrid::linear(0.0, 1.0, 3).unwrap();
        let d = RadialDensity::new(1.2, g, vec![0.0; 3]).unwrap();
        assert_eq!(riesz_smoothing(3, 1.0, &d, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn bump_is_positive_and_narrow_bump_matches_point_mass() {
        let g = RadialGrid::linear(0.0, 1.0, 21).unwrap();
        let vals = g.points().iter().map(|&r| (1.0 - r * r).max(0.0)).collect();
        let d = RadialDensity::new(1.2, g, vals).unwrap();
        assert!(riesz_smoothing(3, 1.0, &d, 5.0, 0.5).unwrap() > 0.0);

        let w = 1e-2;
        let g = RadialGrid::linear(0.0, w, 11).unwrap();
        let shape: Vec<f64> = g.points().iter().map(|&r| 1.0 - r / w).collect();
        // normalize: 4π ∫ f r² dr = 1 for the hat profile on [0, w] is π w³/3
        let mass = std::f64::consts::PI * w.powi(3) / 3.0;
        let d = RadialDensity::new(1.2, g, shape.iter().map(|v| v / mass).collect()).unwrap();
        let smoothed = riesz_smoothing(3, 1.0, &d, 2.0, 1.0).unwrap();
        let point = linear_solution(3, 1.0, 2.0, 1.0).unwrap();
        assert!((smoothed - point).abs() < 1e-4 * point, "{smoothed} {point}");
    }

    #[test]
    fn one_dimensional_reduction() {
        let g = RadialGrid::linear(0.0, 2.0, 41).unwrap();
        let vals = g.points().iter().map(|&r| (-r * r).exp()).collect();
        let d = RadialDensity::new(1.1, g, vals).unwrap();
        assert!(riesz_smoothing(1, 0.3, &d, 1.5, 0.7).unwrap() > 0.0);
    }
}
