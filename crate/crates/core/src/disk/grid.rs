use num_complex::Complex64;
use serde::Serialize;

use super::NumericsError;

/// Hard ceiling on angles per ring.
pub const DEFAULT_ANGULAR_CAP: usize = 1 << 16;

/// Polar grid on the closed disk of radius `r_max < 1`.
///
/// Radii approach the boundary geometrically, `1 - r = 2^{-l/4}`, and rings
/// close to the boundary carry more angles.
#[derive(Debug, Clone, Serialize)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    /// `1 - r` for each ring, kept separately to avoid cancellation.
    pub depths: Vec<f64>,
    pub angle_counts: Vec<usize>,
    pub r_max: f64,
    pub levels: u32,
    pub angular_base: usize,
    pub angular_cap: usize,
    /// Set when at least one ring was clipped to `angular_cap`.
    pub truncated: bool,
    #[serde(skip)]
    offsets: Vec<usize>,
}

pub fn build_grid(levels: u32, angular_base: usize) -> Result<DiskGrid, NumericsError> {
    build_grid_capped(levels, angular_base, DEFAULT_ANGULAR_CAP)
}

pub fn build_grid_capped(
    levels: u32,
    angular_base: usize,
    angular_cap: usize,
) -> Result<DiskGrid, NumericsError> {
    if levels < 4 {
        return Err(NumericsError::InvalidParameter(format!(
            "grid levels must be at least 4, got {levels}"
        )));
    }
    if levels > 200 {
        return Err(NumericsError::InvalidParameter(format!(
            "grid levels {levels} exceed double precision near the boundary"
        )));
    }
    if angular_base < 64 {
        return Err(NumericsError::InvalidParameter(format!(
            "angular base must be at least 64, got {angular_base}"
        )));
    }
    if angular_cap < angular_base {
        return Err(NumericsError::InvalidParameter(format!(
            "angular cap {angular_cap} below angular base {angular_base}"
        )));
    }
    let rings = 4 * levels as usize + 1;
    let mut radii = Vec::with_capacity(rings);
    let mut depths = Vec::with_capacity(rings);
    let mut angle_counts = Vec::with_capacity(rings);
    let mut truncated = false;
    for l in 0..rings {
        let depth = (-(l as f64) / 4.0).exp2();
        let r = if l == 0 { 0.0 } else { 1.0 - depth };
        let wanted = angle_count(angular_base, depth);
        let n = if wanted > angular_cap as f64 {
            truncated = true;
            angular_cap
        } else {
            wanted as usize
        };
        radii.push(r);
        depths.push(depth);
        angle_counts.push(n);
    }
    let mut offsets = Vec::with_capacity(rings + 1);
    let mut acc = 0;
    offsets.push(0);
    for &n in &angle_counts {
        acc += n;
        offsets.push(acc);
    }
    Ok(DiskGrid {
        r_max: *radii.last().unwrap(),
        radii,
        depths,
        angle_counts,
        levels,
        angular_base,
        angular_cap,
        truncated,
        offsets,
    })
}

/// `max(base, ceil(base / sqrt(1 - r)))`, before capping.
fn angle_count(base: usize, depth: f64) -> f64 {
    (base as f64).max((base as f64 / depth.sqrt()).ceil())
}

impl DiskGrid {
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ring_offset(&self, ring: usize) -> usize {
        self.offsets[ring]
    }

    pub fn angle(&self, ring: usize, k: usize) -> f64 {
        std::f64::consts::TAU * k as f64 / self.angle_counts[ring] as f64
    }

    pub fn point(&self, ring: usize, k: usize) -> Complex64 {
        Complex64::from_polar(self.radii[ring], self.angle(ring, k))
    }

    /// Half the distance to the neighbouring rings.
    pub fn radial_step(&self, ring: usize) -> f64 {
        let lo = if ring == 0 { 0.0 } else { self.radii[ring - 1] };
        let hi = if ring + 1 < self.radii.len() {
            self.radii[ring + 1]
        } else {
            self.r_max
        };
        let h = 0.5 * (hi - lo).max(self.radii[ring] - lo);
        if h > 0.0 {
            h
        } else {
            0.5 * self.depths[ring]
        }
    }

    pub fn angular_step(&self, ring: usize) -> f64 {
        std::f64::consts::TAU / self.angle_counts[ring] as f64
    }

    /// Ring whose radius is closest to `r`.
    pub fn nearest_ring(&self, r: f64) -> usize {
        match self
            .radii
            .binary_search_by(|x| x.partial_cmp(&r).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.radii.len() => self.radii.len() - 1,
            Err(i) => {
                if r - self.radii[i - 1] < self.radii[i] - r {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Work units of at most `size` consecutive points on one ring.
    pub(crate) fn chunks(&self, size: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for ring in 0..self.radii.len() {
            let n = self.angle_counts[ring];
            let mut start = 0;
            while start < n {
                let end = (start + size).min(n);
                out.push((ring, start, end));
                start = end;
            }
        }
        out
    }
}
