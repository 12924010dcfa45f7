//! Global suprema of nonnegative functions on the disk: a full grid sweep
//! followed by a derivative-free pattern search around the best point.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{DiskGrid, NumericsError};
use crate::symbol::EvalError;

/// Default number of pattern-search rounds.
pub const DEFAULT_POLISH_ITERS: usize = 40;

const CHUNK: usize = 2048;

/// Lower-bound estimate of `sup_{|z| <= r_max} f(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: Complex64,
    /// True when the polish step improved on the best grid value.
    pub refined: bool,
    pub grid_value: f64,
}

/// Best grid point of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHit {
    pub value: f64,
    pub point: Complex64,
    pub ring: usize,
    /// Global point index, used to break ties deterministically.
    pub index: usize,
}

impl GridHit {
    fn empty() -> Self {
        GridHit {
            value: f64::NEG_INFINITY,
            point: Complex64::new(0.0, 0.0),
            ring: 0,
            index: usize::MAX,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    fn beats(&self, other: &GridHit) -> bool {
        self.value > other.value || (self.value == other.value && self.index < other.index)
    }
}

/// Per-component maxima of one sweep.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub hits: Vec<GridHit>,
    pub skipped: usize,
    pub total: usize,
}

struct Partial {
    hits: Vec<GridHit>,
    skipped: usize,
    first_error: Option<(usize, EvalError)>,
}

impl Partial {
    fn new(n: usize) -> Self {
        Partial {
            hits: vec![GridHit::empty(); n],
            skipped: 0,
            first_error: None,
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            if b.beats(a) {
                *a = b;
            }
        }
        self.skipped += other.skipped;
        self.first_error = match (self.first_error, other.first_error) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Evaluates a vector-valued function at every grid point and keeps the
/// maximum of each component.
///
/// `eval` receives a buffer pre-filled with `-inf`; components it leaves
/// untouched do not take part at that point. A point whose evaluation fails
/// is skipped; more than 1% skipped points is an error.
pub fn sweep_max<F>(grid: &DiskGrid, components: usize, eval: F) -> Result<Sweep, NumericsError>
where
    F: Fn(Complex64, &mut [f64]) -> Result<(), EvalError> + Sync,
{
    sweep_max_with(grid, components, eval, true)
}

pub fn sweep_max_with<F>(
    grid: &DiskGrid,
    components: usize,
    eval: F,
    parallel: bool,
) -> Result<Sweep, NumericsError>
where
    F: Fn(Complex64, &mut [f64]) -> Result<(), EvalError> + Sync,
{
    let chunks = grid.chunks(CHUNK);
    let run = |&(ring, start, end): &(usize, usize, usize)| {
        let mut part = Partial::new(components);
        let mut buf = vec![f64::NEG_INFINITY; components];
        let offset = grid.ring_offset(ring);
        for k in start..end {
            let z = grid.point(ring, k);
            buf.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
            let index = offset + k;
            match eval(z, &mut buf) {
                Ok(()) => {
                    for (hit, &v) in part.hits.iter_mut().zip(buf.iter()) {
                        if v > hit.value {
                            *hit = GridHit {
                                value: v,
                                point: z,
                                ring,
                                index,
                            };
                        }
                    }
                }
                Err(e) => {
                    part.skipped += 1;
                    if part.first_error.is_none() {
                        part.first_error = Some((index, e));
                    }
                }
            }
        }
        part
    };
    let merged = if parallel {
        chunks
            .par_iter()
            .map(run)
            .reduce(|| Partial::new(components), Partial::merge)
    } else {
        chunks
            .iter()
            .map(run)
            .fold(Partial::new(components), Partial::merge)
    };
    let total = grid.len();
    if merged.skipped * 100 > total {
        return Err(NumericsError::TooManyFailures {
            skipped: merged.skipped,
            total,
            first: merged.first_error.map(|(_, e)| e),
        });
    }
    Ok(Sweep {
        hits: merged.hits,
        skipped: merged.skipped,
        total,
    })
}

/// Pattern search in `(r, θ)` around `start`.
///
/// Each round probes the 8 neighbours at the current steps, moves to the
/// best strictly improving one, and otherwise halves both steps. The
/// radius stays inside `[0, r_max]`. `f` returns `None` outside its domain.
pub fn polish<F>(
    f: F,
    start: Complex64,
    start_value: f64,
    steps: (f64, f64),
    r_max: f64,
    iters: usize,
) -> (f64, Complex64)
where
    F: Fn(Complex64) -> Option<f64>,
{
    let (mut r, mut theta) = (start.norm(), start.arg());
    let (mut hr, mut ht) = steps;
    let mut best = start_value;
    let mut best_z = start;
    for _ in 0..iters {
        let mut cand: Option<(f64, f64, f64, Complex64)> = None;
        for dr in [-1.0, 0.0, 1.0] {
            for dt in [-1.0, 0.0, 1.0] {
                if dr == 0.0 && dt == 0.0 {
                    continue;
                }
                let nr = (r + dr * hr).clamp(0.0, r_max);
                let nt = theta + dt * ht;
                let z = Complex64::from_polar(nr, nt);
                if let Some(v) = f(z) {
                    if v.is_finite() && v > best && cand.map_or(true, |c| v > c.0) {
                        cand = Some((v, nr, nt, z));
                    }
                }
            }
        }
        match cand {
            Some((v, nr, nt, z)) => {
                best = v;
                r = nr;
                theta = nt;
                best_z = z;
            }
            None => {
                hr *= 0.5;
                ht *= 0.5;
            }
        }
    }
    (best, best_z)
}

/// Default pattern-search steps at a grid hit: the local grid spacing.
pub fn grid_steps(grid: &DiskGrid, ring: usize) -> (f64, f64) {
    (grid.radial_step(ring), grid.angular_step(ring))
}

/// Steps for an arbitrary point: local grid spacing, shrunk to the
/// distance from the boundary.
pub fn point_steps(grid: &DiskGrid, z: Complex64) -> (f64, f64) {
    let ring = grid.nearest_ring(z.norm());
    let depth = (1.0 - z.norm()).max(1.0 - grid.r_max);
    let (hr, ht) = grid_steps(grid, ring);
    (hr.min(0.5 * depth), ht.min(depth))
}

/// Polishes a grid hit; returns the grid value unchanged when the hit is empty.
pub fn polish_hit<F>(grid: &DiskGrid, hit: &GridHit, f: F, iters: usize) -> SupEstimate
where
    F: Fn(Complex64) -> Option<f64>,
{
    if hit.is_empty() {
        return SupEstimate {
            value: 0.0,
            argmax: Complex64::new(0.0, 0.0),
            refined: false,
            grid_value: 0.0,
        };
    }
    let (value, argmax) = polish(f, hit.point, hit.value, grid_steps(grid, hit.ring), grid.r_max, iters);
    SupEstimate {
        value,
        argmax,
        refined: value > hit.value,
        grid_value: hit.value,
    }
}

/// Grid maximum of `f` followed by `polish_iters` pattern-search rounds.
pub fn sup_estimate<F>(f: F, grid: &DiskGrid, polish_iters: usize) -> Result<SupEstimate, NumericsError>
where
    F: Fn(Complex64) -> Result<f64, EvalError> + Sync,
{
    sup_estimate_with(f, grid, polish_iters, true)
}

pub fn sup_estimate_with<F>(
    f: F,
    grid: &DiskGrid,
    polish_iters: usize,
    parallel: bool,
) -> Result<SupEstimate, NumericsError>
where
    F: Fn(Complex64) -> Result<f64, EvalError> + Sync,
{
    let sweep = sweep_max_with(
        grid,
        1,
        |z, out| {
            out[0] = f(z)?;
            Ok(())
        },
        parallel,
    )?;
    let hit = sweep.hits[0];
    if hit.is_empty() {
        return Err(NumericsError::EmptyGrid);
    }
    Ok(polish_hit(grid, &hit, |z| f(z).ok(), polish_iters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::build_grid;

    fn one_minus_abs2(z: Complex64) -> f64 {
        1.0 - z.norm_sqr()
    }

    #[test]
    fn center_maximum() {
        let g = build_grid(8, 64).unwrap();
        let s = sup_estimate(|z| Ok(one_minus_abs2(z)), &g, 40).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.argmax, Complex64::new(0.0, 0.0));
        assert!(!s.refined);
    }

    #[test]
    fn bloch_integrand_of_square() {
        // max of 2r(1 - r^2) is 4/(3 sqrt 3) at r = 1/sqrt 3
        let g = build_grid(12, 64).unwrap();
        let s = sup_estimate(|z| Ok(one_minus_abs2(z) * 2.0 * z.norm()), &g, 40).unwrap();
        let expect = 4.0 / (3.0 * 3f64.sqrt());
        assert!((s.value - expect).abs() < 1e-12 * expect);
        assert!((s.argmax.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
        assert!(s.value >= s.grid_value);
    }

    #[test]
    fn cube_weighted_maximum() {
        let g = build_grid(12, 64).unwrap();
        let s = sup_estimate(|z| Ok(one_minus_abs2(z) * 3.0 * z.norm_sqr()), &g, 40).unwrap();
        assert!((s.value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn more_polish_never_hurts() {
        let g = build_grid(10, 64).unwrap();
        let f = |z: Complex64| Ok(one_minus_abs2(z) * z.norm().powi(7) * (1.0 + 0.3 * z.re));
        let mut last = 0.0;
        for iters in [0, 1, 2, 5, 10, 20, 40] {
            let s = sup_estimate(f, &g, iters).unwrap();
            assert!(s.value >= last);
            last = s.value;
        }
    }

    #[test]
    fn refined_grid_grid_value_is_monotone() {
        let f = |z: Complex64| Ok(one_minus_abs2(z) * (z - Complex64::new(0.2, 0.7)).norm());
        let mut last = 0.0;
        for levels in 4..12 {
            let g = build_grid(levels, 64).unwrap();
            let s = sup_estimate(f, &g, 0).unwrap();
            assert!(s.grid_value >= last);
            last = s.grid_value;
        }
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let g = build_grid(10, 64).unwrap();
        let f = |z: Complex64| Ok(one_minus_abs2(z) * (z * z + 0.1).norm());
        let a = sup_estimate_with(f, &g, 40, true).unwrap();
        let b = sup_estimate_with(f, &g, 40, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failing_points_are_skipped_or_reported() {
        let g = build_grid(10, 64).unwrap();
        // Only the centre ring fails: well below 1%.
        let s = sweep_max(&g, 1, |z, out| {
            if z.norm() == 0.0 {
                return Err(EvalError::DivisionByZero(z));
            }
            out[0] = z.norm();
            Ok(())
        })
        .unwrap();
        assert_eq!(s.skipped, 64);
        let err = sweep_max(&g, 1, |z, _| Err(EvalError::LogOfZero(z))).unwrap_err();
        assert!(matches!(err, NumericsError::TooManyFailures { .. }));
    }
}
