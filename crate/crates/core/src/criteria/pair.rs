use num_complex::Complex64;

use crate::disk::{one_minus_abs2, DiskGrid};
use crate::symbol::{AnalyticSymbol, EvalError};

/// `u`, `φ` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    pub z: Complex64,
    /// `1 - |z|^2`
    pub w: f64,
    pub u: Complex64,
    pub du: Complex64,
    pub phi: Complex64,
    pub dphi: Complex64,
}

/// The symbol pair `(u, φ)` with derivatives taken once.
#[derive(Debug, Clone)]
pub struct SymbolPair {
    pub u: AnalyticSymbol,
    pub du: AnalyticSymbol,
    pub phi: AnalyticSymbol,
    pub dphi: AnalyticSymbol,
}

impl SymbolPair {
    pub fn new(u: &AnalyticSymbol, phi: &AnalyticSymbol) -> Self {
        SymbolPair {
            u: u.clone(),
            du: u.derivative(),
            phi: phi.clone(),
            dphi: phi.derivative(),
        }
    }

    pub fn at(&self, z: Complex64) -> Result<PointValues, EvalError> {
        let v = PointValues {
            z,
            w: one_minus_abs2(z),
            u: self.u.evaluate(z)?,
            du: self.du.evaluate(z)?,
            phi: self.phi.evaluate(z)?,
            dphi: self.dphi.evaluate(z)?,
        };
        Ok(v)
    }

    /// Point values at every grid point, `None` where evaluation fails.
    pub fn tabulate(&self, grid: &DiskGrid) -> Vec<Option<PointValues>> {
        use rayon::prelude::*;
        (0..grid.radii.len())
            .into_par_iter()
            .flat_map_iter(|ring| (0..grid.angle_counts[ring]).map(move |k| (ring, k)))
            .map(|(ring, k)| self.at(grid.point(ring, k)).ok())
            .collect()
    }

    /// Solves `φ(z) = a` by Newton's method from `start`.
    pub fn preimage(&self, a: Complex64, start: Complex64) -> Option<Complex64> {
        let mut z = start;
        for _ in 0..80 {
            let f = self.phi.evaluate(z).ok()? - a;
            if f.norm() <= 1e-15 * (1.0 + a.norm()) {
                break;
            }
            let d = self.dphi.evaluate(z).ok()?;
            if d.norm() == 0.0 {
                return None;
            }
            let mut step = f / d;
            // keep the iterate inside the disk
            while (z - step).norm() >= 1.0 {
                step *= 0.5;
                if step.norm() < 1e-300 {
                    return None;
                }
            }
            z -= step;
        }
        let resid = (self.phi.evaluate(z).ok()? - a).norm();
        (resid <= 1e-12 * (1.0 + a.norm()) && z.norm() < 1.0).then_some(z)
    }
}
