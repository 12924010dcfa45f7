//! Weighted composition operators between the weighted sup-norm spaces
//! `H^∞_{v_α}` with standard weights `v_α(z) = (1-|z|^2)^α`.

use serde::Serialize;

use super::pair::SymbolPair;
use super::CriteriaError;
use crate::disk::{
    default_cuts, grid_steps, one_minus_abs2, polish, sweep_max, tail_sup, DiskGrid, SupEstimate, TailEstimate,
    TrendRule, DEFAULT_POLISH_ITERS,
};
use crate::oracle::{lemma33_limit, monomial_weighted_norm};
use crate::symbol::{AnalyticSymbol, EvalError};

fn check_weights(alpha_src: f64, alpha_tgt: f64) -> Result<(), CriteriaError> {
    if !(alpha_src > 0.0 && alpha_tgt > 0.0) {
        return Err(CriteriaError::InvalidParameter(format!(
            "weight exponents must be > 0, got {alpha_src} and {alpha_tgt}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HinfSup {
    pub sup: SupEstimate,
    pub tail: TailEstimate,
}

/// `sup (1-|z|^2)^{α_tgt} |u(z)| / (1-|φ(z)|^2)^{α_src}` with its tail as `|φ| → 1`.
pub fn hinf_comp_sup(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    alpha_src: f64,
    alpha_tgt: f64,
    grid: &DiskGrid,
    rule: &TrendRule,
) -> Result<HinfSup, CriteriaError> {
    check_weights(alpha_src, alpha_tgt)?;
    let f = |z: num_complex::Complex64| {
        let w = phi.evaluate(z)?;
        let d = one_minus_abs2(w);
        if !(d > 0.0) {
            return Err(EvalError::NonFinite(z));
        }
        Ok(one_minus_abs2(z).powf(alpha_tgt) * u.evaluate(z)?.norm() / d.powf(alpha_src))
    };
    let (sup, tail) = tail_sup(
        f,
        |z| Ok(phi.evaluate(z)?.norm()),
        grid,
        &default_cuts(grid.r_max),
        DEFAULT_POLISH_ITERS,
        rule,
    )?;
    Ok(HinfSup { sup, tail })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HinfSequence {
    /// `‖u φ^k‖_{v_{α_tgt}} / ‖z^k‖_{v_{α_src}}` for `k = 0..=k_max`.
    pub ratios: Vec<f64>,
    pub sup: f64,
}

pub fn hinf_comp_sequence(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    alpha_src: f64,
    alpha_tgt: f64,
    grid: &DiskGrid,
    k_max: usize,
) -> Result<HinfSequence, CriteriaError> {
    check_weights(alpha_src, alpha_tgt)?;
    if k_max < 10 {
        return Err(CriteriaError::InvalidParameter(format!("k_max = {k_max} must be at least 10")));
    }
    let pair = SymbolPair::new(u, phi);
    let value = |z, k: i32| -> Result<f64, EvalError> {
        let base = one_minus_abs2(z).powf(alpha_tgt) * u.evaluate(z)?.norm();
        Ok(base * phi.evaluate(z)?.norm().powi(k))
    };
    let sweep = sweep_max(grid, k_max + 1, |z, out| {
        let base = one_minus_abs2(z).powf(alpha_tgt) * pair.u.evaluate(z)?.norm();
        let t = pair.phi.evaluate(z)?.norm();
        let mut tp = 1.0;
        for slot in out.iter_mut() {
            *slot = base * tp;
            tp *= t;
        }
        Ok(())
    })?;
    let ratios: Vec<f64> = {
        use rayon::prelude::*;
        (0..=k_max)
            .into_par_iter()
            .map(|k| {
                let hit = &sweep.hits[k];
                let num = if hit.is_empty() {
                    0.0
                } else {
                    polish(
                        |z| value(z, k as i32).ok(),
                        hit.point,
                        hit.value,
                        grid_steps(grid, hit.ring),
                        grid.r_max,
                        DEFAULT_POLISH_ITERS,
                    )
                    .0
                };
                num / monomial_weighted_norm(k as u64 + 1, alpha_src)
            })
            .collect()
    };
    let sup = ratios.iter().copied().fold(0.0, f64::max);
    Ok(HinfSequence { ratios, sup })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma33Row {
    pub k: u64,
    /// `k^α ‖z^{k-1}‖_{v_α}`
    pub value: f64,
    pub limit: f64,
    pub relative_error: f64,
}

pub fn lemma33_check(alpha: f64, ks: &[u64]) -> Result<Vec<Lemma33Row>, CriteriaError> {
    if !(alpha > 0.0) {
        return Err(CriteriaError::InvalidParameter(format!("alpha = {alpha} must be > 0")));
    }
    if ks.contains(&0) {
        return Err(CriteriaError::InvalidParameter("k must be >= 1".into()));
    }
    let limit = lemma33_limit(alpha);
    Ok(ks
        .iter()
        .map(|&k| {
            let value = (k as f64).powf(alpha) * monomial_weighted_norm(k, alpha);
            Lemma33Row {
                k,
                value,
                limit,
                relative_error: (value - limit).abs() / limit,
            }
        })
        .collect())
}
