//! Boundary behaviour of a function along a gate: sups over the level sets
//! `{gate > cut}` for an increasing schedule of cuts, and a coarse trend
//! classifier deciding whether those sups die out, level off or blow up.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sup::{grid_steps, polish, sweep_max, SupEstimate};
use super::{DiskGrid, NumericsError};
use crate::symbol::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    DecreasingToZero,
    Plateau,
    Growing,
    Indeterminate,
}

/// Thresholds of the trend classifier.
///
/// With `last` the final profile value and `earlier` the value `lookback`
/// entries before it, and `tol = abs_tol_rel * (1 + global)`:
/// decreasing-to-zero when `last < tol` and either `last <= decay * earlier`
/// or `earlier < tol`; growing when `last > growth * earlier` and
/// `last >= tol`; plateau when `last / earlier` lies in
/// `[plateau_low, plateau_high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRule {
    pub lookback: usize,
    pub decay_factor: f64,
    pub growth_factor: f64,
    pub plateau_low: f64,
    pub plateau_high: f64,
    pub abs_tol_rel: f64,
}

impl Default for TrendRule {
    fn default() -> Self {
        TrendRule {
            lookback: 3,
            decay_factor: 0.5,
            growth_factor: 2.0,
            plateau_low: 0.8,
            plateau_high: 1.25,
            abs_tol_rel: 1e-3,
        }
    }
}

impl TrendRule {
    pub fn abs_tol(&self, global: f64) -> f64 {
        self.abs_tol_rel * (1.0 + global)
    }

    pub fn classify(&self, profile: &[f64], global: f64) -> Trend {
        let Some(&last) = profile.last() else {
            return Trend::DecreasingToZero;
        };
        let back = self.lookback.min(profile.len() - 1);
        let earlier = profile[profile.len() - 1 - back];
        let tol = self.abs_tol(global);
        if last < tol && (last <= self.decay_factor * earlier || earlier < tol) {
            return Trend::DecreasingToZero;
        }
        if last >= tol && last > self.growth_factor * earlier {
            return Trend::Growing;
        }
        if earlier > 0.0 {
            let ratio = last / earlier;
            if (self.plateau_low..=self.plateau_high).contains(&ratio) {
                return Trend::Plateau;
            }
        }
        Trend::Indeterminate
    }
}

/// Sups of a function over the nested level sets `{gate > cuts[i]}`.
///
/// `band_values[i]` is the sup over the shell `cuts[i] < gate <= cuts[i+1]`
/// (the last shell is unbounded above); an empty shell contributes 0.
/// `sup_values` is the running sup from the outside in, so it is
/// nonincreasing in the cut. The trend is read off the shell profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub cuts: Vec<f64>,
    pub band_values: Vec<f64>,
    pub band_argmax: Vec<Option<Complex64>>,
    pub sup_values: Vec<f64>,
    pub limsup_estimate: f64,
    pub trend: Trend,
    /// Sup over the whole domain, used to scale the absolute tolerance.
    pub global_sup: f64,
    pub abs_tol: f64,
}

impl TailEstimate {
    pub fn from_bands(
        cuts: Vec<f64>,
        band_values: Vec<f64>,
        band_argmax: Vec<Option<Complex64>>,
        global_sup: f64,
        rule: &TrendRule,
    ) -> TailEstimate {
        let mut sup_values = band_values.clone();
        for i in (0..sup_values.len().saturating_sub(1)).rev() {
            sup_values[i] = sup_values[i].max(sup_values[i + 1]);
        }
        let limsup_estimate = sup_values.last().copied().unwrap_or(0.0);
        let trend = rule.classify(&band_values, global_sup);
        TailEstimate {
            cuts,
            band_values,
            band_argmax,
            sup_values,
            limsup_estimate,
            trend,
            global_sup,
            abs_tol: rule.abs_tol(global_sup),
        }
    }

    pub fn all_empty(&self) -> bool {
        self.band_argmax.iter().all(Option::is_none)
    }
}

/// Index of the shell containing `g`, if any.
pub fn band_index(cuts: &[f64], g: f64) -> Option<usize> {
    if cuts.is_empty() || !(g > cuts[0]) {
        return None;
    }
    // Number of cuts strictly below g, minus one.
    Some(cuts.partition_point(|&c| c < g) - 1)
}

pub fn validate_cuts(cuts: &[f64]) -> Result<(), NumericsError> {
    if cuts.len() < 3 {
        return Err(NumericsError::InvalidParameter(format!(
            "at least 3 cuts required, got {}",
            cuts.len()
        )));
    }
    if cuts.iter().any(|&c| !(0.0..1.0).contains(&c)) {
        return Err(NumericsError::InvalidParameter("cuts must lie in [0, 1)".into()));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NumericsError::InvalidParameter("cuts must be strictly increasing".into()));
    }
    Ok(())
}

/// `{1 - 10^{-k} : k = 1..=8}`, keeping only cuts below `r_max`.
pub fn default_cuts(r_max: f64) -> Vec<f64> {
    (1..=8)
        .map(|k| 1.0 - 10f64.powi(-k))
        .filter(|&c| c < r_max)
        .collect()
}

/// Whole-disk sup and per-shell sups of `f` along `gate` in one sweep.
pub fn tail_sup<F, G>(
    f: F,
    gate: G,
    grid: &DiskGrid,
    cuts: &[f64],
    polish_iters: usize,
    rule: &TrendRule,
) -> Result<(SupEstimate, TailEstimate), NumericsError>
where
    F: Fn(Complex64) -> Result<f64, EvalError> + Sync,
    G: Fn(Complex64) -> Result<f64, EvalError> + Sync,
{
    validate_cuts(cuts)?;
    let n = cuts.len();
    let sweep = sweep_max(grid, 1 + n, |z, out| {
        let v = f(z)?;
        out[0] = v;
        if let Some(b) = band_index(cuts, gate(z)?) {
            out[1 + b] = v;
        }
        Ok(())
    })?;
    let global_hit = sweep.hits[0];
    if global_hit.is_empty() {
        return Err(NumericsError::EmptyGrid);
    }
    let (gv, gz) = polish(
        |z| f(z).ok(),
        global_hit.point,
        global_hit.value,
        grid_steps(grid, global_hit.ring),
        grid.r_max,
        polish_iters,
    );
    let global = SupEstimate {
        value: gv,
        argmax: gz,
        refined: gv > global_hit.value,
        grid_value: global_hit.value,
    };
    let mut band_values = vec![0.0; n];
    let mut band_argmax = vec![None; n];
    for b in 0..n {
        let hit = sweep.hits[1 + b];
        if hit.is_empty() {
            continue;
        }
        let in_band = |z: Complex64| {
            let g = gate(z).ok()?;
            (band_index(cuts, g) == Some(b)).then(|| f(z).ok()).flatten()
        };
        let (v, z) = polish(
            in_band,
            hit.point,
            hit.value,
            grid_steps(grid, hit.ring),
            grid.r_max,
            polish_iters,
        );
        band_values[b] = v;
        band_argmax[b] = Some(z);
    }
    let tail = TailEstimate::from_bands(cuts.to_vec(), band_values, band_argmax, global.value, rule);
    Ok((global, tail))
}
