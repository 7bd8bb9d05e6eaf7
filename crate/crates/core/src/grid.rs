//! Sample abscissae and interpolation tables.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Spacing of a generated grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Strictly increasing, finite, non-negative sample abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    points: Vec<f64>,
}

impl RadialGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return domain("grid must contain at least one point");
        }
        if points.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return domain("grid points must be finite and non-negative");
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return domain("grid points must be strictly increasing");
        }
        Ok(RadialGrid { points })
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::spaced(min, max, count, Spacing::Linear)
    }

    pub fn log(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::spaced(min, max, count, Spacing::Log)
    }

    pub fn spaced(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if count == 0 {
            return domain("grid count must be positive");
        }
        if count == 1 {
            return Self::new(vec![min]);
        }
        if !(max > min) {
            return domain(format!("grid range [{min}, {max}] is empty"));
        }
        let last = (count - 1) as f64;
        let points = match spacing {
            Spacing::Linear => (0..count)
                .map(|i| min + (max - min) * i as f64 / last)
                .collect(),
            Spacing::Log => {
                if !(min > 0.0) {
                    return domain("log grid needs a positive lower end");
                }
                let (a, b) = (min.ln(), max.ln());
                (0..count)
                    .map(|i| (a + (b - a) * i as f64 / last).exp())
                    .collect()
            }
        };
        let mut points: Vec<f64> = points;
        points[0] = min;
        points[count - 1] = max;
        Self::new(points)
    }

    /// Linear step on [0, `knee`] followed by log spacing up to `max`.
    pub fn hybrid(step: f64, knee: f64, max: f64, log_count: usize) -> Result<Self> {
        if !(step > 0.0 && knee > step && max > knee) {
            return domain("hybrid grid needs 0 < step < knee < max");
        }
        let n_lin = (knee / step).round() as usize;
        let mut points: Vec<f64> = (0..=n_lin).map(|i| i as f64 * knee / n_lin as f64).collect();
        let tail = Self::log(knee, max, log_count + 1)?;
        points.extend(tail.points.into_iter().skip(1));
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index i with points[i] <= x < points[i+1], clamped to the valid range.
    pub(crate) fn bracket(&self, x: f64) -> usize {
        let p = &self.points;
        match p.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(p.len().saturating_sub(2)),
            Err(0) => 0,
            Err(i) => (i - 1).min(p.len().saturating_sub(2)),
        }
    }
}

/// Piecewise cubic Hermite interpolant from values and derivatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermiteTable {
    grid: RadialGrid,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    pub fn new(grid: RadialGrid, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || values.len() != grid.len() || slopes.len() != grid.len() {
            return domain("Hermite table needs >= 2 nodes with matching values and slopes");
        }
        Ok(HermiteTable {
            grid,
            values,
            slopes,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.grid.bracket(x);
        let p = self.grid.points();
        let (x0, x1) = (p[i], p[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

/// Natural cubic spline through (x_i, y_i).
#[derive(Debug, Clone)]
pub struct CubicSpline {
    grid: RadialGrid,
    values: Vec<f64>,
    second: Vec<f64>,
    /// Abscissa shift applied before lookup; nonzero for even splines.
    offset: f64,
}

impl CubicSpline {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if n < 3 || values.len() != n {
            return domain("spline needs >= 3 nodes with matching values");
        }
        let x = grid.points();
        // tridiagonal solve for second derivatives, natural end conditions
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let d = (values[i + 1] - values[i]) / (x[i + 1] - x[i])
                - (values[i] - values[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        Ok(CubicSpline {
            grid,
            values,
            second,
            offset: 0.0,
        })
    }

    /// Spline of an even function sampled on x_0 ≥ 0 < x_1 < ...; the data are
    /// mirrored to negative abscissae so the end condition at 0 is symmetry.
    pub fn even(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        let p = grid.points();
        let skip = usize::from(p[0] == 0.0);
        let mut xs: Vec<f64> = p.iter().skip(skip).rev().map(|x| -x).collect();
        let mut ys: Vec<f64> = values.iter().skip(skip).rev().copied().collect();
        xs.extend_from_slice(p);
        ys.extend_from_slice(&values);
        let offset = xs[0];
        let shifted = xs.iter().map(|x| x - offset).collect();
        let mut spline = Self::new(RadialGrid::new(shifted)?, ys)?;
        spline.offset = offset;
        Ok(spline)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = if self.offset != 0.0 { x.abs() - self.offset } else { x };
        let i = self.grid.bracket(x);
        let p = self.grid.points();
        let h = p[i + 1] - p[i];
        let a = (p[i + 1] - x) / h;
        let b = (x - p[i]) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unordered_and_negative() {
        assert!(RadialGrid::new(vec![1.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![2.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![-1.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![]).is_err());
        assert!(RadialGrid::log(0.0, 1.0, 4).is_err());
    }

    #[test]
    fn generated_grids_hit_endpoints() {
        let g = RadialGrid::log(1e-3, 1e3, 7).unwrap();
        assert_eq!(g.points()[0], 1e-3);
        assert_eq!(*g.points().last().unwrap(), 1e3);
        assert!((g.points()[3] - 1.0).abs() < 1e-12);
        let h = RadialGrid::hybrid(0.02, 4.0, 30.0, 50).unwrap();
        assert_eq!(h.points()[0], 0.0);
        assert!((h.points()[200] - 4.0).abs() < 1e-12);
        assert_eq!(h.len(), 251);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let g = RadialGrid::linear(0.0, 2.0, 5).unwrap();
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let t = HermiteTable::new(
            g.clone(),
            g.points().iter().map(|&x| f(x)).collect(),
            g.points().iter().map(|&x| df(x)).collect(),
        )
        .unwrap();
        for x in [0.1, 0.77, 1.5, 1.99] {
            assert!((t.eval(x) - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn even_spline_has_zero_slope_at_origin() {
        let g = RadialGrid::linear(0.0, 6.0, 401).unwrap();
        let f = |x: f64| (-x * x).exp();
        let s = CubicSpline::even(g.clone(), g.points().iter().map(|&x| f(x)).collect()).unwrap();
        for x in [0.001, 0.0075, 0.5, -0.3] {
            assert!((s.eval(x) - f(x)).abs() < 1e-8, "{x}");
        }
    }

    #[test]
    fn spline_is_accurate_on_smooth_data() {
        let g = RadialGrid::linear(0.0, 3.0, 301).unwrap();
        let s = CubicSpline::new(g.clone(), g.points().iter().map(|x| x.sin()).collect()).unwrap();
        for x in [0.5, 1.234, 2.9] {
            assert!((s.eval(x) - f64::sin(x)).abs() < 1e-7);
        }
    }
}
