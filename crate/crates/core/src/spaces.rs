//! Norms on the Bloch, Bergman, Hardy and weighted sup-norm spaces, and the
//! test-function families used to probe composition operators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disk::{
    bergman_integral, circle_mean_adaptive, one_minus_abs2, sup_estimate, DiskGrid, NumericsError, QuadConfig,
    SupEstimate, DEFAULT_POLISH_ITERS,
};
use crate::symbol::{build, AnalyticSymbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("{family} test functions need a {needs} space")]
    FamilyMismatch { family: TestFamily, needs: &'static str },
    #[error("test-function parameter |a| = {0} must be < 1")]
    PointOutsideDisk(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Source space of the operator: `A^p_α` or `H^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceSpec {
    Bergman { p: f64, alpha: f64 },
    Hardy { p: f64 },
}

impl SpaceSpec {
    pub fn bergman(p: f64, alpha: f64) -> Result<Self, SpaceError> {
        let s = SpaceSpec::Bergman { p, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn hardy(p: f64) -> Result<Self, SpaceError> {
        let s = SpaceSpec::Hardy { p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        let p = self.p();
        if !(p >= 1.0) || !p.is_finite() {
            return Err(SpaceError::InvalidSpace(format!("p = {p} must be a finite number >= 1")));
        }
        if let SpaceSpec::Bergman { alpha, .. } = *self {
            if !(alpha > -1.0) || !alpha.is_finite() {
                return Err(SpaceError::InvalidSpace(format!("alpha = {alpha} must be > -1")));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        match *self {
            SpaceSpec::Bergman { p, .. } | SpaceSpec::Hardy { p } => p,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            SpaceSpec::Bergman { alpha, .. } => Some(alpha),
            SpaceSpec::Hardy { .. } => None,
        }
    }

    /// Growth exponent of point evaluations: `(2+α)/p` or `1/p`.
    pub fn sigma(&self) -> f64 {
        match *self {
            SpaceSpec::Bergman { p, alpha } => (2.0 + alpha) / p,
            SpaceSpec::Hardy { p } => 1.0 / p,
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceSpec::Bergman { p, alpha } => write!(f, "bergman:p={p},alpha={alpha}"),
            SpaceSpec::Hardy { p } => write!(f, "hardy:p={p}"),
        }
    }
}

/// Accepts `bergman:p=2,alpha=0`, `bergman:2,0`, `hardy:p=2` and `hardy:2`.
impl FromStr for SpaceSpec {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpaceError::InvalidSpace(format!("cannot parse space `{s}`"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let mut p = None;
        let mut alpha = None;
        for (i, item) in rest.split(',').enumerate() {
            let item = item.trim();
            let (key, value) = match item.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (if i == 0 { "p" } else { "alpha" }, item),
            };
            let value: f64 = value.parse().map_err(|_| bad())?;
            let slot = match key {
                "p" => &mut p,
                "alpha" | "a" => &mut alpha,
                _ => return Err(bad()),
            };
            if slot.replace(value).is_some() {
                return Err(bad());
            }
        }
        match kind.trim().to_ascii_lowercase().as_str() {
            "bergman" => SpaceSpec::bergman(p.ok_or_else(bad)?, alpha.ok_or_else(bad)?),
            "hardy" if alpha.is_none() => SpaceSpec::hardy(p.ok_or_else(bad)?),
            _ => Err(bad()),
        }
    }
}

/// `sup (1-|z|^2) |f'(z)|`.
pub fn bloch_seminorm(f: &AnalyticSymbol, grid: &DiskGrid) -> Result<SupEstimate, SpaceError> {
    let df = f.derivative();
    if df.as_constant() == Some(Complex64::new(0.0, 0.0)) {
        return Ok(SupEstimate {
            value: 0.0,
            argmax: Complex64::new(0.0, 0.0),
            refined: false,
            grid_value: 0.0,
        });
    }
    Ok(sup_estimate(
        |z| Ok(one_minus_abs2(z) * df.evaluate(z)?.norm()),
        grid,
        DEFAULT_POLISH_ITERS,
    )?)
}

/// `|f(0)| + ‖f‖_{B,semi}`.
pub fn bloch_norm(f: &AnalyticSymbol, grid: &DiskGrid) -> Result<f64, SpaceError> {
    let f0 = f.evaluate(Complex64::new(0.0, 0.0)).map_err(NumericsError::from)?;
    Ok(f0.norm() + bloch_seminorm(f, grid)?.value)
}

pub fn bergman_norm(f: &AnalyticSymbol, spec: &SpaceSpec, quad: &QuadConfig) -> Result<f64, SpaceError> {
    spec.validate()?;
    let SpaceSpec::Bergman { p, alpha } = *spec else {
        return Err(SpaceError::InvalidSpace("Bergman norm requested for a Hardy space".into()));
    };
    Ok(bergman_integral(f, p, alpha, quad)?.powf(1.0 / p))
}

/// Hardy norm read off the integral mean at a single radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyNorm {
    pub value: f64,
    pub radius: f64,
}

/// `M_p(f, r_max)`; integral means increase with the radius, so this is a
/// lower bound for the norm that improves with the grid levels.
pub fn hardy_norm(f: &AnalyticSymbol, p: f64, grid: &DiskGrid) -> Result<HardyNorm, SpaceError> {
    SpaceSpec::Hardy { p }.validate()?;
    let r = grid.r_max;
    let m = circle_mean_adaptive(f, r, p, 1e-12)?;
    Ok(HardyNorm {
        value: m.powf(1.0 / p),
        radius: r,
    })
}

/// `sup |f(z)| (1-|z|^2)^α`.
pub fn weighted_sup_norm(f: &AnalyticSymbol, alpha: f64, grid: &DiskGrid) -> Result<SupEstimate, SpaceError> {
    if !(alpha > 0.0) {
        return Err(SpaceError::InvalidSpace(format!("weight exponent {alpha} must be > 0")));
    }
    Ok(sup_estimate(
        |z| Ok(f.evaluate(z)?.norm() * one_minus_abs2(z).powf(alpha)),
        grid,
        DEFAULT_POLISH_ITERS,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFamily {
    F,
    G,
    H,
    K,
    HardyP,
    HardyQ,
}

impl fmt::Display for TestFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TestFamily::F => "f",
            TestFamily::G => "g",
            TestFamily::H => "h",
            TestFamily::K => "k",
            TestFamily::HardyP => "hardy_p",
            TestFamily::HardyQ => "hardy_q",
        };
        f.write_str(s)
    }
}

/// A kernel `c (1 - ā z)^{-s}` with `c = (1-|a|^2)^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub coefficient: f64,
    pub power: f64,
}

impl Kernel {
    fn new(a: Complex64, exponent: f64, power: f64) -> Self {
        Kernel {
            coefficient: one_minus_abs2(a).powf(exponent),
            power,
        }
    }

    pub fn symbol(&self, a: Complex64) -> AnalyticSymbol {
        let base = build::sub(build::real(1.0), build::mul(build::constant(a.conj()), build::var()));
        let s = self.power;
        let tree = if s == s.round() && s.abs() < i32::MAX as f64 {
            build::pow(base, -(s as i32))
        } else {
            build::exp(build::mul(build::real(-s), build::log(base)))
        };
        AnalyticSymbol::from_node(build::mul(build::real(self.coefficient), tree))
    }
}

/// The two kernels behind a family: `f_a, g_a` for Bergman spaces and
/// `p_a, q_a` for Hardy spaces.
pub fn family_kernels(spec: &SpaceSpec, a: Complex64) -> Result<(Kernel, Kernel), SpaceError> {
    spec.validate()?;
    if !(a.norm() < 1.0) {
        return Err(SpaceError::PointOutsideDisk(a.norm()));
    }
    Ok(match *spec {
        SpaceSpec::Bergman { p, alpha } => {
            let e = 1.0 + (2.0 + alpha) * (1.0 - 1.0 / p);
            (
                Kernel::new(a, e, 3.0 + alpha),
                Kernel::new(a, e + 1.0 / p, 3.0 + alpha + 1.0 / p),
            )
        }
        SpaceSpec::Hardy { p } => (Kernel::new(a, 2.0 - 1.0 / p, 2.0), Kernel::new(a, 2.0, 2.0 + 1.0 / p)),
    })
}

pub fn make_test_function(family: TestFamily, a: Complex64, spec: &SpaceSpec) -> Result<AnalyticSymbol, SpaceError> {
    let bergman = matches!(spec, SpaceSpec::Bergman { .. });
    let (needs, ok) = match family {
        TestFamily::HardyP | TestFamily::HardyQ => ("Hardy", !bergman),
        _ => ("Bergman", bergman),
    };
    if !ok {
        return Err(SpaceError::FamilyMismatch { family, needs });
    }
    let (first, second) = family_kernels(spec, a)?;
    let f = first.symbol(a);
    let g = second.symbol(a);
    Ok(match family {
        TestFamily::F | TestFamily::HardyP => f,
        TestFamily::G | TestFamily::HardyQ => g,
        TestFamily::H => f.sub(&g),
        TestFamily::K => {
            let alpha = spec.alpha().unwrap_or(0.0);
            let ratio = (3.0 + alpha) / (3.0 + alpha + 1.0 / spec.p());
            f.sub(&g.scale(Complex64::new(ratio, 0.0)))
        }
    })
}
