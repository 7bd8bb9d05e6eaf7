//! Problem data and self-similar fields.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{CubicSpline, RadialGrid};
use crate::kernel::check_dimension;

/// Nonlinear term of the Duhamel map. `Off` drops F_p, leaving the linear flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    Power,
    Off,
}

/// ∂_t u + Δ²u = |u|^{p-1}u with u(0) = ε|x|^{-β}, β = 4/(p-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub nonlinearity: Nonlinearity,
}

impl ProblemSpec {
    pub fn new(n: usize, p: f64, epsilon: f64) -> Result<Self> {
        check_dimension(n)?;
        let fujita = 1.0 + 4.0 / n as f64;
        if !(p > fujita) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("p = {p} must exceed the Fujita exponent 1 + 4/N = {fujita}")));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidInput(format!("epsilon = {epsilon} must be finite and non-negative")));
        }
        Ok(ProblemSpec {
            n,
            p,
            epsilon,
            tol: 1e-8,
            max_iters: 15,
            nonlinearity: Nonlinearity::Power,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_nonlinearity(mut self, nonlinearity: Nonlinearity) -> Self {
        self.nonlinearity = nonlinearity;
        self
    }

    pub fn beta(&self) -> f64 {
        4.0 / (self.p - 1.0)
    }
}

/// u(x, t) = t^{-β/4} W(|x| t^{-1/4}) sampled at η nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedField {
    pub beta: f64,
    pub eta: Vec<f64>,
    pub values: Vec<f64>,
}

impl WeightedField {
    pub fn new(beta: f64, eta: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if eta.len() != values.len() || eta.is_empty() {
            return Err(Error::InvalidInput("field needs one value per node".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field values must be finite".into()));
        }
        Ok(WeightedField { beta, eta, values })
    }

    /// sup over nodes of (η^β + 1)|W(η)|.
    pub fn weighted_norm(&self) -> f64 {
        weighted_norm(self.beta, &self.eta, &self.values)
    }

    /// ‖self - other‖ on common nodes.
    pub fn distance(&self, other: &WeightedField) -> f64 {
        let diff: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        weighted_norm(self.beta, &self.eta, &diff)
    }

    /// W at arbitrary η: spline inside the nodes, W(η_last)(η_last/η)^β beyond.
    pub fn profile(&self) -> Result<impl Fn(f64) -> f64 + '_> {
        // W is even in η
        let spline = CubicSpline::even(RadialGrid::new(self.eta.clone())?, self.values.clone())?;
        let last = *self.eta.last().expect("non-empty");
        let w_last = *self.values.last().expect("non-empty");
        let beta = self.beta;
        Ok(move |eta: f64| {
            if eta > last {
                w_last * (last / eta).powf(beta)
            } else {
                spline.eval(eta)
            }
        })
    }

    /// u(x, t) from the self-similar form.
    pub fn solution(&self, x_norm: f64, t: f64) -> Result<f64> {
        let w = self.profile()?;
        Ok(t.powf(-self.beta / 4.0) * w(x_norm * t.powf(-0.25)))
    }
}

pub(crate) fn weighted_norm(beta: f64, eta: &[f64], values: &[f64]) -> f64 {
    eta.iter()
        .zip(values)
        .map(|(e, v)| (e.powf(beta) + 1.0) * v.abs())
        .fold(0.0, f64::max)
}
