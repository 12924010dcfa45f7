//! Bloch norms of `u · (k_a ∘ φ)` for the kernel families `k_a = c (1 - ā z)^{-s}`.
//!
//! The derivative is evaluated in closed form,
//! `(u · k_a∘φ)' = c d^{-s} (u' + s ā u φ' / d)` with `d = 1 - ā φ`,
//! on a table of point values shared by every `a`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::pair::{PointValues, SymbolPair};
use super::CriteriaError;
use crate::disk::{point_steps, polish, validate_cuts, DiskGrid, NumericsError, TailEstimate, TrendRule};
use crate::spaces::{bloch_norm, family_kernels, Kernel, SpaceSpec, TestFamily};
use crate::symbol::AnalyticSymbol;

/// One test point `a` with the radius it is filed under and the points
/// where the image of its kernel is expected to peak.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledPoint {
    pub a: Complex64,
    pub radius: f64,
    pub seeds: Vec<Complex64>,
}

/// `a = 0` and `a = ρ e^{2πik/n}` for every cut `ρ`.
pub fn default_a_schedule(cuts: &[f64], angles: usize) -> Vec<ScheduledPoint> {
    let mut out = vec![ScheduledPoint {
        a: Complex64::new(0.0, 0.0),
        radius: 0.0,
        seeds: Vec::new(),
    }];
    for &rho in cuts {
        for k in 0..angles {
            let theta = std::f64::consts::TAU * k as f64 / angles as f64;
            out.push(ScheduledPoint {
                a: Complex64::from_polar(rho, theta),
                radius: rho,
                seeds: Vec::new(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelNorms {
    pub a: Complex64,
    pub first: f64,
    pub second: f64,
}

/// `A` and `B` tails: the sup of `‖u C_φ f_a‖_B` (resp. `g_a`, or `p_a`, `q_a`
/// for Hardy spaces) over the scheduled `a` with `|a|` in each shell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFnCriterion {
    pub families: (TestFamily, TestFamily),
    /// Norms at `a = 0`, where both kernels are `1` and the norm is `‖u‖_B`.
    pub at_origin: Option<KernelNorms>,
    pub schedule_size: usize,
    pub a_tail: TailEstimate,
    pub b_tail: TailEstimate,
    pub angular_cap: usize,
}

fn kernel_value(k: &Kernel, a: Complex64, v: &PointValues) -> f64 {
    let d = Complex64::new(1.0, 0.0) - a.conj() * v.phi;
    let dn = d.norm();
    let mag = k.coefficient * (-k.power * dn.ln()).exp();
    let inner = v.du * d + a.conj() * k.power * v.u * v.dphi;
    v.w * mag * inner.norm() / dn
}

fn kernel_at_zero(k: &Kernel, a: Complex64, u0: Complex64, phi0: Complex64) -> f64 {
    let d = Complex64::new(1.0, 0.0) - a.conj() * phi0;
    u0.norm() * k.coefficient * (-k.power * d.norm().ln()).exp()
}

fn families(spec: &SpaceSpec) -> (TestFamily, TestFamily) {
    match spec {
        SpaceSpec::Bergman { .. } => (TestFamily::F, TestFamily::G),
        SpaceSpec::Hardy { .. } => (TestFamily::HardyP, TestFamily::HardyQ),
    }
}

struct Table<'a> {
    grid: &'a DiskGrid,
    values: Vec<Option<PointValues>>,
    rings: Vec<usize>,
}

impl<'a> Table<'a> {
    fn new(pair: &SymbolPair, grid: &'a DiskGrid) -> Result<Self, CriteriaError> {
        let values = pair.tabulate(grid);
        let skipped = values.iter().filter(|v| v.is_none()).count();
        if skipped * 100 > values.len() {
            return Err(NumericsError::TooManyFailures {
                skipped,
                total: values.len(),
                first: None,
            }
            .into());
        }
        let rings = (0..grid.radii.len())
            .flat_map(|r| std::iter::repeat(r).take(grid.angle_counts[r]))
            .collect();
        Ok(Table { grid, values, rings })
    }
}

/// Seminorm sups of both kernel images for one `a`: grid maximum, then
/// pattern search from the grid maximum and from every seed.
fn seminorms(
    pair: &SymbolPair,
    table: &Table,
    kernels: &(Kernel, Kernel),
    point: &ScheduledPoint,
    polish_iters: usize,
) -> (f64, f64) {
    let a = point.a;
    let mut best = [(f64::NEG_INFINITY, 0usize); 2];
    for (i, v) in table.values.iter().enumerate() {
        let Some(v) = v else { continue };
        let f = kernel_value(&kernels.0, a, v);
        let g = kernel_value(&kernels.1, a, v);
        if f > best[0].0 {
            best[0] = (f, i);
        }
        if g > best[1].0 {
            best[1] = (g, i);
        }
    }
    let grid = table.grid;
    let mut out = [0.0; 2];
    for (slot, k) in [&kernels.0, &kernels.1].into_iter().enumerate() {
        let f = |z: Complex64| pair.at(z).ok().map(|v| kernel_value(k, a, &v));
        let (gv, gi) = best[slot];
        let mut top = 0.0f64;
        if gv.is_finite() {
            let ring = table.rings[gi];
            let z = table.values[gi].unwrap().z;
            let steps = (grid.radial_step(ring), grid.angular_step(ring));
            top = polish(f, z, gv, steps, grid.r_max, polish_iters).0;
        }
        for &s in &point.seeds {
            if let Some(v) = f(s) {
                if v.is_finite() {
                    let (pv, _) = polish(f, s, v, point_steps(grid, s), grid.r_max, polish_iters);
                    top = top.max(pv);
                }
            }
        }
        out[slot] = top;
    }
    (out[0], out[1])
}

pub(crate) fn testfn_with_table(
    pair: &SymbolPair,
    spec: &SpaceSpec,
    grid: &DiskGrid,
    cuts: &[f64],
    schedule: &[ScheduledPoint],
    polish_iters: usize,
    rule: &TrendRule,
) -> Result<TestFnCriterion, CriteriaError> {
    validate_cuts(cuts)?;
    if schedule.iter().any(|p| !(p.a.norm() < 1.0)) {
        return Err(CriteriaError::InvalidParameter("scheduled points must lie in the disk".into()));
    }
    let table = Table::new(pair, grid)?;
    let zero = Complex64::new(0.0, 0.0);
    let u0 = pair.u.evaluate(zero).map_err(NumericsError::from)?;
    let phi0 = pair.phi.evaluate(zero).map_err(NumericsError::from)?;
    // Seeds: the given ones plus a preimage of `a` under φ, when one exists.
    let prepared: Vec<ScheduledPoint> = schedule
        .par_iter()
        .map(|p| {
            let mut p = p.clone();
            if p.radius > 0.0 {
                let start = table
                    .values
                    .iter()
                    .flatten()
                    .min_by(|x, y| (x.phi - p.a).norm().total_cmp(&(y.phi - p.a).norm()))
                    .map_or(zero, |v| v.z);
                if let Some(b) = pair.preimage(p.a, start) {
                    p.seeds.push(b);
                }
            }
            p
        })
        .collect();
    let norms: Vec<KernelNorms> = prepared
        .par_iter()
        .map(|p| {
            let kernels = family_kernels(spec, p.a)?;
            let (sf, sg) = seminorms(pair, &table, &kernels, p, polish_iters);
            Ok(KernelNorms {
                a: p.a,
                first: sf + kernel_at_zero(&kernels.0, p.a, u0, phi0),
                second: sg + kernel_at_zero(&kernels.1, p.a, u0, phi0),
            })
        })
        .collect::<Result<_, CriteriaError>>()?;
    let n = cuts.len();
    let mut av = vec![0.0; n];
    let mut bv = vec![0.0; n];
    let mut aa = vec![None; n];
    let mut ba = vec![None; n];
    let mut global = (0.0f64, 0.0f64);
    let mut at_origin = None;
    for (p, k) in prepared.iter().zip(&norms) {
        global = (global.0.max(k.first), global.1.max(k.second));
        if p.radius == 0.0 && p.a == zero {
            at_origin = Some(*k);
        }
        let Some(b) = shell_of(cuts, p.radius) else { continue };
        if k.first > av[b] || aa[b].is_none() {
            av[b] = k.first;
            aa[b] = Some(p.a);
        }
        if k.second > bv[b] || ba[b].is_none() {
            bv[b] = k.second;
            ba[b] = Some(p.a);
        }
    }
    Ok(TestFnCriterion {
        families: families(spec),
        at_origin,
        schedule_size: prepared.len(),
        a_tail: TailEstimate::from_bands(cuts.to_vec(), av, aa, global.0, rule),
        b_tail: TailEstimate::from_bands(cuts.to_vec(), bv, ba, global.1, rule),
        angular_cap: grid.angular_cap,
    })
}

/// Shell `cuts[i] <= r < cuts[i+1]`, the last one open above.
fn shell_of(cuts: &[f64], r: f64) -> Option<usize> {
    if cuts.is_empty() || r < cuts[0] {
        return None;
    }
    Some(cuts.partition_point(|&c| c <= r) - 1)
}

/// Tree-based reference: `‖u · (k_a ∘ φ)‖_B` with the composition built by
/// substitution and differentiated symbolically.
pub fn testfn_bloch_norm_tree(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    family: TestFamily,
    a: Complex64,
    spec: &SpaceSpec,
    grid: &DiskGrid,
) -> Result<f64, CriteriaError> {
    let k = crate::spaces::make_test_function(family, a, spec)?;
    let image = u.mul(&k.compose(phi));
    Ok(bloch_norm(&image, grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{build_grid, build_grid_capped};
    use crate::symbol::parse_symbol;

    #[test]
    fn shells() {
        let cuts = [0.9, 0.99, 0.999];
        assert_eq!(shell_of(&cuts, 0.5), None);
        assert_eq!(shell_of(&cuts, 0.9), Some(0));
        assert_eq!(shell_of(&cuts, 0.99), Some(1));
        assert_eq!(shell_of(&cuts, 0.9999), Some(2));
    }

    #[test]
    fn schedule_layout() {
        let s = default_a_schedule(&[0.9, 0.99, 0.999], 32);
        assert_eq!(s.len(), 1 + 3 * 32);
        assert_eq!(s[0].a, Complex64::new(0.0, 0.0));
        assert!((s[1 + 32 + 8].a - Complex64::new(0.0, 0.99)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_tree_path() {
        let grid = build_grid(14, 64).unwrap();
        let table_grid = build_grid_capped(14, 64, 1024).unwrap();
        let u = parse_symbol("(1-z)^2*exp(z/3)").unwrap();
        let phi = parse_symbol("(1+z)/2").unwrap();
        let pair = SymbolPair::new(&u, &phi);
        let table = Table::new(&pair, &table_grid).unwrap();
        for spec in [SpaceSpec::bergman(2.0, 0.0).unwrap(), SpaceSpec::bergman(3.0, 1.5).unwrap(), SpaceSpec::hardy(2.0).unwrap()] {
            let (f1, f2) = families(&spec);
            for a in [Complex64::new(0.5, 0.2), Complex64::new(-0.7, 0.0), Complex64::new(0.0, 0.0)] {
                let kernels = family_kernels(&spec, a).unwrap();
                let p = ScheduledPoint { a, radius: a.norm(), seeds: vec![] };
                let (sf, sg) = seminorms(&pair, &table, &kernels, &p, 40);
                let zero = Complex64::new(0.0, 0.0);
                let u0 = u.evaluate(zero).unwrap();
                let phi0 = phi.evaluate(zero).unwrap();
                let nf = sf + kernel_at_zero(&kernels.0, a, u0, phi0);
                let ng = sg + kernel_at_zero(&kernels.1, a, u0, phi0);
                let tf = testfn_bloch_norm_tree(&u, &phi, f1, a, &spec, &grid).unwrap();
                let tg = testfn_bloch_norm_tree(&u, &phi, f2, a, &spec, &grid).unwrap();
                assert!((nf - tf).abs() < 1e-9 * tf.max(1.0), "{spec} a={a}: {nf} vs {tf}");
                assert!((ng - tg).abs() < 1e-9 * tg.max(1.0), "{spec} a={a}: {ng} vs {tg}");
            }
        }
    }

    #[test]
    fn origin_entry_is_the_bloch_norm_of_u() {
        let grid = build_grid_capped(16, 64, 1024).unwrap();
        let u = parse_symbol("z^2+1").unwrap();
        let phi = parse_symbol("z/2").unwrap();
        let pair = SymbolPair::new(&u, &phi);
        let spec = SpaceSpec::bergman(2.0, 0.0).unwrap();
        let cuts = [0.9, 0.99, 0.999];
        let t = testfn_with_table(&pair, &spec, &grid, &cuts, &default_a_schedule(&cuts, 8), 40, &TrendRule::default())
            .unwrap();
        let o = t.at_origin.unwrap();
        let expect = 1.0 + crate::oracle::bloch_seminorm_monomial(2);
        assert!((o.first - expect).abs() < 1e-10);
        assert!((o.second - expect).abs() < 1e-10);
    }
}
