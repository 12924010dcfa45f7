//! One pass over the grid computes every pointwise quantity of the direct
//! and power-sequence criteria; each component is then polished on its own.

use num_complex::Complex64;
use serde::Serialize;

use super::pair::{PointValues, SymbolPair};
use super::CriteriaError;
use crate::disk::{
    band_index, grid_steps, one_minus_abs2, polish, sweep_max, validate_cuts, DiskGrid, GridHit, SupEstimate,
    TailEstimate, TrendRule,
};
use crate::spaces::SpaceSpec;
use crate::symbol::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prerequisites {
    /// `sup (1-|z|^2)|u'(z)|`
    pub u_bloch_seminorm: f64,
    /// `sup (1-|z|^2)|φ'(z)||u(z)|`
    #[serde(rename = "K_tilde")]
    pub k_tilde: f64,
}

/// Whole-disk sups and boundary tails of the two ratios
/// `P = (1-|z|^2)|u'| / (1-|φ|^2)^σ` and `Q = (1-|z|^2)|uφ'| / (1-|φ|^2)^{σ+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectCriterion {
    pub sigma: f64,
    pub p_sup: SupEstimate,
    pub q_sup: SupEstimate,
    pub p_tail: TailEstimate,
    pub q_tail: TailEstimate,
}

/// `sI_j = j^σ ‖I_u(φ^j)‖_B` and `sJ_j = j^σ ‖J_u(φ^{j-1})‖_B` over a schedule of `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceCriterion {
    pub exponent: f64,
    pub j_values: Vec<u64>,
    #[serde(rename = "sI")]
    pub s_i: Vec<f64>,
    #[serde(rename = "sJ")]
    pub s_j: Vec<f64>,
    pub sup_i: f64,
    pub sup_j: f64,
    /// Trend over `j`; the `cuts` field holds the `j` values.
    pub tail_i: TailEstimate,
    pub tail_j: TailEstimate,
}

/// `1, 2, ..., min(50, jmax)` followed by `jmax / 2^k` above 50, ascending.
pub fn default_j_schedule(jmax: u64) -> Vec<u64> {
    let dense = jmax.min(50);
    let mut out: Vec<u64> = (1..=dense).collect();
    let mut tail = Vec::new();
    let mut j = jmax;
    while j > dense {
        tail.push(j);
        j /= 2;
    }
    tail.reverse();
    out.extend(tail);
    out
}

pub(crate) fn validate_j_schedule(js: &[u64]) -> Result<(), CriteriaError> {
    if js.is_empty() || js[0] == 0 || js.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CriteriaError::InvalidParameter(
            "j schedule must be positive and strictly increasing".into(),
        ));
    }
    if *js.last().unwrap() > i32::MAX as u64 {
        return Err(CriteriaError::InvalidParameter(format!("j must not exceed {}", i32::MAX)));
    }
    if js.len() < 2 {
        return Err(CriteriaError::InvalidParameter("j schedule needs at least 2 entries".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Component {
    UBloch,
    KTilde,
    P,
    Q,
    PBand(usize),
    QBand(usize),
    I(i32),
    J(i32),
}

struct Layout<'a> {
    sigma: f64,
    cuts: &'a [f64],
    js: &'a [u64],
}

impl Layout<'_> {
    fn len(&self) -> usize {
        2 + if self.cuts.is_empty() { 0 } else { 2 + 2 * self.cuts.len() } + 2 * self.js.len()
    }

    fn seq_base(&self) -> usize {
        2 + if self.cuts.is_empty() { 0 } else { 2 + 2 * self.cuts.len() }
    }

    fn component(&self, i: usize) -> Component {
        let n = self.cuts.len();
        let m = self.js.len();
        let s = self.seq_base();
        match i {
            0 => Component::UBloch,
            1 => Component::KTilde,
            _ if i >= s => {
                let k = i - s;
                if k < m {
                    Component::I(self.js[k] as i32 - 1)
                } else {
                    Component::J(self.js[k - m] as i32 - 1)
                }
            }
            2 => Component::P,
            3 => Component::Q,
            _ if i < 4 + n => Component::PBand(i - 4),
            _ => Component::QBand(i - 4 - n),
        }
    }

    fn fill(&self, v: &PointValues, out: &mut [f64]) -> Result<(), EvalError> {
        let ub = v.w * v.du.norm();
        let kt = v.w * v.u.norm() * v.dphi.norm();
        out[0] = ub;
        out[1] = kt;
        let t = v.phi.norm();
        if !self.cuts.is_empty() {
            let d = one_minus_abs2(v.phi);
            if !(d > 0.0) {
                return Err(EvalError::NonFinite(v.z));
            }
            let ds = d.powf(self.sigma);
            let p = ub / ds;
            let q = kt / (ds * d);
            out[2] = p;
            out[3] = q;
            if let Some(b) = band_index(self.cuts, t) {
                out[4 + b] = p;
                out[4 + self.cuts.len() + b] = q;
            }
        }
        let s = self.seq_base();
        let m = self.js.len();
        for (k, &j) in self.js.iter().enumerate() {
            let tp = t.powi(j as i32 - 1);
            out[s + k] = kt * tp;
            out[s + m + k] = ub * tp;
        }
        Ok(())
    }

    /// Value of one component at `v`, `None` outside its gate.
    fn value(&self, c: Component, v: &PointValues) -> Option<f64> {
        let ub = v.w * v.du.norm();
        let kt = v.w * v.u.norm() * v.dphi.norm();
        let t = v.phi.norm();
        let ratio = |extra: f64| {
            let d = one_minus_abs2(v.phi);
            (d > 0.0).then(|| d.powf(self.sigma + extra))
        };
        let gated = |b: usize| band_index(self.cuts, t) == Some(b);
        match c {
            Component::UBloch => Some(ub),
            Component::KTilde => Some(kt),
            Component::P => Some(ub / ratio(0.0)?),
            Component::Q => Some(kt / ratio(1.0)?),
            Component::PBand(b) => gated(b).then(|| ratio(0.0).map(|d| ub / d)).flatten(),
            Component::QBand(b) => gated(b).then(|| ratio(1.0).map(|d| kt / d)).flatten(),
            Component::I(e) => Some(kt * t.powi(e)),
            Component::J(e) => Some(ub * t.powi(e)),
        }
    }
}

pub(crate) struct MainSweep {
    pub prerequisites: Prerequisites,
    pub direct: Option<DirectCriterion>,
    pub sequence: Option<SequenceCriterion>,
}

fn polish_component(
    pair: &SymbolPair,
    layout: &Layout,
    c: Component,
    grid: &DiskGrid,
    hit: &GridHit,
    iters: usize,
) -> Option<SupEstimate> {
    if hit.is_empty() {
        return None;
    }
    let (value, argmax) = polish(
        |z| layout.value(c, &pair.at(z).ok()?),
        hit.point,
        hit.value,
        grid_steps(grid, hit.ring),
        grid.r_max,
        iters,
    );
    Some(SupEstimate {
        value,
        argmax,
        refined: value > hit.value,
        grid_value: hit.value,
    })
}

fn zero_sup() -> SupEstimate {
    SupEstimate {
        value: 0.0,
        argmax: Complex64::new(0.0, 0.0),
        refined: false,
        grid_value: 0.0,
    }
}

pub(crate) fn main_sweep(
    pair: &SymbolPair,
    spec: &SpaceSpec,
    grid: &DiskGrid,
    cuts: &[f64],
    js: &[u64],
    polish_iters: usize,
    rule: &TrendRule,
) -> Result<MainSweep, CriteriaError> {
    if !cuts.is_empty() {
        validate_cuts(cuts)?;
    }
    if !js.is_empty() {
        validate_j_schedule(js)?;
    }
    let layout = Layout {
        sigma: spec.sigma(),
        cuts,
        js,
    };
    let sweep = sweep_max(grid, layout.len(), |z, out| layout.fill(&pair.at(z)?, out))?;
    let polished: Vec<Option<SupEstimate>> = {
        use rayon::prelude::*;
        (0..layout.len())
            .into_par_iter()
            .map(|i| polish_component(pair, &layout, layout.component(i), grid, &sweep.hits[i], polish_iters))
            .collect()
    };
    let get = |i: usize| polished[i].unwrap_or_else(zero_sup);
    let prerequisites = Prerequisites {
        u_bloch_seminorm: get(0).value,
        k_tilde: get(1).value,
    };
    let direct = (!cuts.is_empty()).then(|| {
        let n = cuts.len();
        let p_sup = get(2);
        let q_sup = get(3);
        let band = |offset: usize| -> (Vec<f64>, Vec<Option<Complex64>>) {
            (0..n)
                .map(|b| match polished[offset + b] {
                    Some(s) => (s.value, Some(s.argmax)),
                    None => (0.0, None),
                })
                .unzip()
        };
        let (pv, pa) = band(4);
        let (qv, qa) = band(4 + n);
        DirectCriterion {
            sigma: layout.sigma,
            p_sup,
            q_sup,
            p_tail: TailEstimate::from_bands(cuts.to_vec(), pv, pa, p_sup.value, rule),
            q_tail: TailEstimate::from_bands(cuts.to_vec(), qv, qa, q_sup.value, rule),
        }
    });
    let sequence = (!js.is_empty()).then(|| {
        let s = layout.seq_base();
        let m = js.len();
        let sigma = layout.sigma;
        let mut s_i = Vec::with_capacity(m);
        let mut s_j = Vec::with_capacity(m);
        let mut arg_i = Vec::with_capacity(m);
        let mut arg_j = Vec::with_capacity(m);
        for (k, &j) in js.iter().enumerate() {
            let jf = j as f64;
            let scale = jf.powf(sigma);
            let i_est = get(s + k);
            let j_est = get(s + m + k);
            s_i.push(scale * jf * i_est.value);
            s_j.push(scale * j_est.value);
            arg_i.push(polished[s + k].map(|e| e.argmax));
            arg_j.push(polished[s + m + k].map(|e| e.argmax));
        }
        let sup_i = s_i.iter().copied().fold(0.0, f64::max);
        let sup_j = s_j.iter().copied().fold(0.0, f64::max);
        let jcuts: Vec<f64> = js.iter().map(|&j| j as f64).collect();
        SequenceCriterion {
            exponent: sigma,
            j_values: js.to_vec(),
            tail_i: TailEstimate::from_bands(jcuts.clone(), s_i.clone(), arg_i, sup_i, rule),
            tail_j: TailEstimate::from_bands(jcuts, s_j.clone(), arg_j, sup_j, rule),
            s_i,
            s_j,
            sup_i,
            sup_j,
        }
    });
    Ok(MainSweep {
        prerequisites,
        direct,
        sequence,
    })
}
