//! Gamma function via the Lanczos approximation (g = 7, nine terms).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x, not a non-positive integer.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integer_and_half_integer_values() {
        let mut fact = 1.0;
        for n in 1..20 {
            assert!(rel(gamma(n as f64), fact) < 1e-13, "n={n}");
            fact *= n as f64;
        }
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(1.5), 0.5 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(-0.5), -2.0 * PI.sqrt()) < 1e-14);
    }

    #[test]
    fn quarter_values() {
        // Γ(1/4), Γ(1/8) reference values
        assert!(rel(gamma(0.25), 3.625_609_908_221_908_3) < 1e-13);
        assert!(rel(gamma(0.125), 7.533_941_598_797_612) < 1e-13);
        assert!(rel(gamma(0.75), 1.225_416_702_465_177_6) < 1e-13);
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 1.3, 4.5, 10.25, 30.0] {
            assert!((ln_gamma(x) - gamma(x).ln()).abs() < 1e-12, "x={x}");
        }
    }
}
