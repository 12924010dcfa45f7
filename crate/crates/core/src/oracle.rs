//! Closed-form reference values for monomials and disk automorphisms.

use num_complex::Complex64;
use serde::Serialize;

use crate::symbol::{build, AnalyticSymbol};

/// A reference value together with the formula and inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub formula_id: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
}

/// `‖z^{k-1}‖_{v_α} = sup_r r^{k-1} (1-r^2)^α`.
///
/// The maximum sits at `r^2 = (k-1)/(k-1+2α)`.
pub fn monomial_weighted_norm(k: u64, alpha: f64) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    let m = (k - 1) as f64;
    let denom = m + 2.0 * alpha;
    // (m/denom)^{m/2} = exp((m/2) ln(1 - 2α/denom))
    let radial = (0.5 * m * (-2.0 * alpha / denom).ln_1p()).exp();
    radial * (2.0 * alpha / denom).powf(alpha)
}

pub fn monomial_weighted_norm_value(k: u64, alpha: f64) -> OracleValue {
    OracleValue {
        value: monomial_weighted_norm(k, alpha),
        formula_id: "monomial_weighted_norm",
        inputs: vec![("k", k as f64), ("alpha", alpha)],
    }
}

/// Lanczos approximation (g = 7, 9 terms) of `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
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
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln n!` exactly summed for `n <= 170`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `‖z^k‖_{A^p_α} = ((α+1) B(kp/2 + 1, α + 1))^{1/p}`.
pub fn monomial_bergman_norm(k: u32, p: f64, alpha: f64) -> f64 {
    let a = k as f64 * p / 2.0 + 1.0;
    let b = alpha + 1.0;
    ((alpha + 1.0).ln() + ln_beta(a, b)).exp().powf(1.0 / p)
}

/// Same quantity by factorials, for `p = 2` and integer `α >= 0`:
/// `(α+1) k! α! / (k+α+1)!`.
pub fn monomial_bergman_norm_factorial(k: u32, alpha: u32) -> f64 {
    let ln = ((alpha + 1) as f64).ln() + ln_factorial(k) + ln_factorial(alpha) - ln_factorial(k + alpha + 1);
    ln.exp().sqrt()
}

/// Bloch seminorm of `z^k`: `k ‖z^{k-1}‖_{v_1}`.
pub fn bloch_seminorm_monomial(k: u64) -> f64 {
    k as f64 * monomial_weighted_norm(k, 1.0)
}

/// `(2α/e)^α`.
pub fn lemma33_limit(alpha: f64) -> f64 {
    (2.0 * alpha / std::f64::consts::E).powf(alpha)
}

/// `(a - z) / (1 - ā z)`.
pub fn mobius_symbol(a: Complex64) -> Option<AnalyticSymbol> {
    if !(a.norm() < 1.0) {
        return None;
    }
    let num = build::sub(build::constant(a), build::var());
    let den = build::sub(build::real(1.0), build::mul(build::constant(a.conj()), build::var()));
    Some(AnalyticSymbol::from_node(build::div(num, den)))
}

/// `|(1-|z|^2)|φ'(z)| - (1-|φ(z)|^2)|` for the automorphism `φ_a`.
pub fn schwarz_pick_residual(phi: &AnalyticSymbol, dphi: &AnalyticSymbol, z: Complex64) -> Option<f64> {
    let w = phi.evaluate(z).ok()?;
    let d = dphi.evaluate(z).ok()?;
    let lhs = crate::disk::one_minus_abs2(z) * d.norm();
    let rhs = crate::disk::one_minus_abs2(w);
    Some((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense scan of `r^{k-1}(1-r^2)^α` over `n` radii.
    fn scan(k: u64, alpha: f64, n: usize) -> f64 {
        (0..=n)
            .map(|i| {
                let r = i as f64 / n as f64;
                r.powi((k - 1) as i32) * (1.0 - r * r).powf(alpha)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn weighted_norm_examples() {
        assert_eq!(monomial_weighted_norm(1, 0.7), 1.0);
        assert!((monomial_weighted_norm(3, 1.0) - 0.25).abs() < 1e-15);
        let k11 = (10.0f64 / 12.0).powi(5) * (2.0 / 12.0);
        assert!((monomial_weighted_norm(11, 1.0) - k11).abs() < 1e-15);
        assert!((k11 - 0.066_980).abs() < 1e-6);
    }

    #[test]
    fn weighted_norm_dominates_dense_scan() {
        for &alpha in &[0.5, 1.0, 2.5] {
            for &k in &[2u64, 3, 7, 20, 100] {
                let exact = monomial_weighted_norm(k, alpha);
                let s = scan(k, alpha, 1_000_000);
                assert!(exact >= s, "k={k} alpha={alpha}");
                // the scan misses the peak by O(k^2 h^2)
                assert!(exact - s <= 1e-8 * exact, "k={k} alpha={alpha}: {exact} vs {s}");
            }
        }
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in 1u32..=170 {
            let lg = ln_gamma(n as f64 + 1.0);
            let lf = ln_factorial(n);
            assert!((lg - lf).abs() <= 1e-13 * lf.abs().max(1.0), "n={n}: {lg} vs {lf}");
        }
        // Γ(1/2) = √π
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        // Γ(3/2) = √π / 2
        assert!((ln_gamma(1.5) - (0.5 * std::f64::consts::PI.ln() - 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn bergman_monomials() {
        assert!((monomial_bergman_norm(0, 3.0, 1.5) - 1.0).abs() < 1e-14);
        assert!((monomial_bergman_norm(1, 2.0, 0.0) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((monomial_bergman_norm(2, 2.0, 1.0) - (1.0f64 / 6.0).sqrt()).abs() < 1e-14);
        for k in 0..=20 {
            for alpha in 0..=3 {
                let a = monomial_bergman_norm(k, 2.0, alpha as f64);
                let b = monomial_bergman_norm_factorial(k, alpha);
                assert!((a - b).abs() < 1e-13 * b, "k={k} alpha={alpha}");
            }
        }
    }

    #[test]
    fn bloch_monomials() {
        assert!((bloch_seminorm_monomial(1) - 1.0).abs() < 1e-15);
        assert!((bloch_seminorm_monomial(2) - 4.0 / (3.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((bloch_seminorm_monomial(3) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lemma33_limits() {
        assert!((lemma33_limit(1.0) - 0.735_758_882_342_884_6).abs() < 1e-15);
        assert!((lemma33_limit(0.5) - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!((lemma33_limit(2.5) - 4.588_690_921_400_36).abs() < 1e-13);
    }

    #[test]
    fn mobius_examples() {
        let z0 = Complex64::new(0.0, 0.0);
        let m0 = mobius_symbol(z0).unwrap();
        let p = Complex64::new(0.4, 0.1);
        assert!((m0.evaluate(p).unwrap() + p).norm() < 1e-15);
        let m = mobius_symbol(Complex64::new(0.3, 0.0)).unwrap();
        assert!((m.evaluate(z0).unwrap() - Complex64::new(0.3, 0.0)).norm() < 1e-15);
        let a = Complex64::new(0.0, 0.5);
        let mi = mobius_symbol(a).unwrap();
        assert!(mi.evaluate(a).unwrap().norm() < 1e-15);
        assert!(mobius_symbol(Complex64::new(1.0, 0.0)).is_none());
    }
}
