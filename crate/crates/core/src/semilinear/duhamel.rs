//! The Picard map Φ[v] = εS(t)φ + ∫₀^t S(t-s)F_p(v(s)) ds in self-similar variables.
//!
//! For v(x,t) = t^{-β/4}W(|x|t^{-1/4}) the Fourier profile of Φ[v] is
//!
//!   ε c ζ^{β-N} e^{-ζ⁴} + ∫₀^1 σ^a e^{-(1-σ)ζ⁴} ĥ(ζσ^{1/4}) dσ,   a = (N-β)/4 - 1,
//!
//! with h = |W|^{p-1}W. The σ integral is taken in w = σ^{1/q}, q = 4/(N-β),
//! which removes the σ^a factor.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear::{c_const, upper_envelope};
use crate::quad::integrate;

use super::hankel::HankelPair;
use super::problem::{weighted_norm, Nonlinearity, ProblemSpec, WeightedField};

/// Precomputed transforms and linear profile for one (N, p).
pub struct DuhamelSolver {
    spec: ProblemSpec,
    pair: HankelPair,
    /// c η^{-β} F_{N,β}(η) at the r nodes (the linear profile for ε = 1).
    linear: Vec<f64>,
    /// K^* of the linear envelope.
    pub k_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardResult {
    pub u: WeightedField,
    /// ‖u_{k+1} - u_k‖ per iteration.
    pub contraction_log: Vec<f64>,
    pub iterations: usize,
    /// Whether every iterate stayed in ‖u_k‖ ≤ 2εK^*.
    pub in_ball: bool,
    /// ‖u - ε·linear profile‖.
    pub correction_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelopes {
    /// min (η^β + 1)W/ε when every sample is positive.
    pub m_star: Option<f64>,
    /// ‖u‖/ε.
    pub m_star_upper: f64,
    /// The same minimum and maximum for the linear profile on the same nodes.
    pub linear_lower: f64,
    pub linear_upper: f64,
}

impl DuhamelSolver {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        let beta = spec.beta();
        let n = spec.n;
        let zeta_max = (40.0 * spec.p.powi(3)).powf(0.25).max(6.0);
        let pair = HankelPair::new(n, zeta_max, beta * spec.p)?;
        let c = c_const(n, beta);
        let linear: Vec<Result<f64>> = pair
            .r_nodes
            .par_iter()
            .map(|&eta| Ok(c * crate::linear::scaled_profile(n, beta, eta)?))
            .collect();
        let linear = linear.into_iter().collect::<Result<Vec<f64>>>()?;
        Ok(DuhamelSolver {
            spec,
            pair,
            linear,
            k_upper: upper_envelope(n, beta)?,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[f64] {
        &self.pair.r_nodes
    }

    pub fn round_trip_error(&self) -> f64 {
        self.pair.round_trip_error
    }

    /// ε times the linear profile.
    pub fn linear_field(&self) -> WeightedField {
        let e = self.spec.epsilon;
        self.field(self.linear.iter().map(|v| e * v).collect())
    }

    fn field(&self, values: Vec<f64>) -> WeightedField {
        WeightedField {
            beta: self.spec.beta(),
            eta: self.pair.r_nodes.clone(),
            values,
        }
    }

    /// The Duhamel term alone for the profile v.
    fn duhamel_term(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.spec.nonlinearity == Nonlinearity::Off {
            return Ok(vec![0.0; v.len()]);
        }
        let p = self.spec.p;
        let h: Vec<f64> = v.iter().map(|w| w.abs().powf(p - 1.0) * w).collect();
        if h.iter().all(|&x| x == 0.0) {
            return Ok(vec![0.0; v.len()]);
        }
        let h_hat = self.pair.forward(&h)?;
        let q = 4.0 / (self.spec.n as f64 - self.spec.beta());
        let scale = h_hat.eval(0.0).abs().max(1e-300);
        let w_hat: Vec<Result<f64>> = self
            .pair
            .zeta_nodes
            .par_iter()
            .map(|&z| {
                let z4 = z.powi(4);
                let r = integrate(
                    |w: f64| (-(1.0 - w.powf(q)) * z4).exp() * h_hat.eval(z * w.powf(q / 4.0)),
                    0.0,
                    1.0,
                    1e-10,
                    1e-14 * scale,
                    4000,
                )?;
                Ok(q * r.value)
            })
            .collect();
        let w_hat = w_hat.into_iter().collect::<Result<Vec<f64>>>()?;
        Ok(self.pair.inverse(&w_hat))
    }

    /// Φ[v].
    pub fn apply(&self, v: &WeightedField) -> Result<WeightedField> {
        Ok(self.apply_parts(v)?.0)
    }

    fn apply_parts(&self, v: &WeightedField) -> Result<(WeightedField, f64)> {
        if v.values.len() != self.linear.len() {
            return Err(Error::InvalidInput("field is not sampled on the solver nodes".into()));
        }
        let beta = self.spec.beta();
        let e = self.spec.epsilon;
        let d = self.duhamel_term(&v.values)?;
        let correction = weighted_norm(beta, &self.pair.r_nodes, &d);
        let out: Vec<f64> = self.linear.iter().zip(&d).map(|(l, d)| e * l + d).collect();
        let out = self.field(out);
        let bound = v.weighted_norm().max(2.0 * e * self.k_upper);
        let norm = out.weighted_norm();
        if norm > 10.0 * bound {
            return Err(Error::NormOverflow { output: norm, bound });
        }
        Ok((out, correction))
    }

    /// ‖Φ[v] - Φ[w]‖ / ‖v - w‖.
    pub fn contraction_ratio(&self, v: &WeightedField, w: &WeightedField) -> Result<f64> {
        let dv = self.duhamel_term(&v.values)?;
        let dw = self.duhamel_term(&w.values)?;
        let diff: Vec<f64> = dv.iter().zip(&dw).map(|(a, b)| a - b).collect();
        Ok(weighted_norm(self.spec.beta(), &self.pair.r_nodes, &diff) / v.distance(w))
    }

    /// Largest ε for which the probe pairs in the ball ‖v‖ ≤ 2εK^* contract with ratio ≤ 1/2.
    ///
    /// The Duhamel term is homogeneous of degree p, so for fields ε·v̂ the ratio is
    /// ε^{p-1} times its value at ε = 1 and the threshold follows without bisection.
    /// Probes are the linear profile at the ball radius, its negative and half, and
    /// a cos η modulation of it.
    pub fn epsilon_threshold(&self) -> Result<f64> {
        let beta = self.spec.beta();
        let radius = 2.0 * self.k_upper;
        let at_radius = |vals: Vec<f64>| -> Vec<f64> {
            let s = radius / weighted_norm(beta, &self.pair.r_nodes, &vals);
            vals.into_iter().map(|v| v * s).collect()
        };
        let base = at_radius(self.linear.clone());
        let modulated = at_radius(self.linear.iter().zip(&self.pair.r_nodes).map(|(l, e)| l * e.cos()).collect());
        let negative: Vec<f64> = base.iter().map(|v| -v).collect();
        let half: Vec<f64> = base.iter().map(|v| 0.5 * v).collect();
        let terms = [&base, &modulated, &negative, &half]
            .par_iter()
            .map(|v| self.duhamel_term(v))
            .collect::<Result<Vec<_>>>()?;
        let fields = [&base, &modulated, &negative, &half];
        let mut worst: f64 = 0.0;
        for (i, j) in [(0, 3), (0, 2), (1, 0), (1, 3)] {
            let num: Vec<f64> = terms[i].iter().zip(&terms[j]).map(|(a, b)| a - b).collect();
            let den: Vec<f64> = fields[i].iter().zip(fields[j]).map(|(a, b)| a - b).collect();
            worst = worst.max(
                weighted_norm(beta, &self.pair.r_nodes, &num) / weighted_norm(beta, &self.pair.r_nodes, &den),
            );
        }
        if worst == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok((0.5 / worst).powf(1.0 / (self.spec.p - 1.0)))
    }

    /// Iterate u_{k+1} = Φ[u_k] from u_0 = ε·linear profile.
    pub fn picard_solve(&self) -> Result<PicardResult> {
        let radius = 2.0 * self.spec.epsilon * self.k_upper;
        let mut u = self.linear_field();
        let mut in_ball = u.weighted_norm() <= radius;
        let mut log = Vec::new();
        for k in 1..=self.spec.max_iters {
            let (next, correction) = self.apply_parts(&u)?;
            let diff = next.distance(&u);
            log.push(diff);
            in_ball &= next.weighted_norm() <= radius;
            u = next;
            if diff <= self.spec.tol {
                return Ok(PicardResult {
                    u,
                    contraction_log: log,
                    iterations: k,
                    in_ball,
                    correction_norm: correction,
                });
            }
        }
        let ratio = match log.as_slice() {
            [.., a, b] if *a > 0.0 => b / a,
            _ => f64::NAN,
        };
        Err(Error::NoConvergence {
            iterations: self.spec.max_iters,
            last_difference: *log.last().unwrap_or(&f64::NAN),
            ratio,
        })
    }

    /// Envelope constants of u on the solver nodes.
    pub fn verify_envelopes(&self, u: &WeightedField) -> Envelopes {
        let beta = self.spec.beta();
        let e = self.spec.epsilon;
        let weighted = |vals: &[f64]| -> Vec<f64> {
            self.pair
                .r_nodes
                .iter()
                .zip(vals)
                .map(|(x, v)| (x.powf(beta) + 1.0) * v)
                .collect()
        };
        let lin = weighted(&self.linear);
        let linear_lower = lin.iter().copied().fold(f64::INFINITY, f64::min);
        let linear_upper = lin.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let m_star = if e > 0.0 && u.values.iter().all(|&v| v > 0.0) {
            Some(weighted(&u.values).iter().copied().fold(f64::INFINITY, f64::min) / e)
        } else {
            None
        };
        let m_star_upper = if e > 0.0 { u.weighted_norm() / e } else { 0.0 };
        Envelopes {
            m_star,
            m_star_upper,
            linear_lower,
            linear_upper,
        }
    }
}

/// Φ[v] with a freshly built solver.
pub fn duhamel_apply(spec: ProblemSpec, v: &WeightedField) -> Result<WeightedField> {
    DuhamelSolver::new(spec)?.apply(v)
}

/// Picard iteration with a freshly built solver.
pub fn picard_solve(spec: ProblemSpec) -> Result<PicardResult> {
    DuhamelSolver::new(spec)?.picard_solve()
}
