//! Boundedness, compactness and essential-norm diagnostics for `u C_φ` into
//! the Bloch space, from three independent characterizations: the direct
//! boundary ratios, the test-function families and the power sequences.

mod hinf;
mod pair;
mod sweep;
mod testfn;

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::disk::{
    build_grid_capped, default_cuts, validate_cuts, DiskGrid, NumericsError, SupEstimate, TailEstimate, Trend,
    TrendRule, DEFAULT_ANGULAR_CAP, DEFAULT_POLISH_ITERS,
};
use crate::spaces::{SpaceError, SpaceSpec};
use crate::symbol::{validate_self_map, AnalyticSymbol, SelfMapCheck};

pub use hinf::{hinf_comp_sequence, hinf_comp_sup, lemma33_check, HinfSequence, HinfSup, Lemma33Row};
pub use pair::{PointValues, SymbolPair};
pub use sweep::{default_j_schedule, DirectCriterion, Prerequisites, SequenceCriterion};
pub use testfn::{default_a_schedule, testfn_bloch_norm_tree, KernelNorms, ScheduledPoint, TestFnCriterion};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("φ is not a self-map of the disk: |φ({witness})| = {max_abs}")]
    NotSelfMap { max_abs: f64, witness: Complex64 },
    #[error("essential-norm proxies are undefined for an unbounded operator")]
    Unbounded,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl From<crate::symbol::EvalError> for CriteriaError {
    fn from(e: crate::symbol::EvalError) -> Self {
        CriteriaError::Numerics(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Unbounded,
    BoundedNonCompact,
    Compact,
    Indeterminate,
}

/// Verdict of one criterion from its tails: any growing tail means
/// unbounded, all tails dying out means compact, a plateau means bounded
/// but not compact.
pub fn classify_tails(tails: &[&TailEstimate]) -> Classification {
    if tails.iter().any(|t| t.trend == Trend::Growing) {
        Classification::Unbounded
    } else if tails.iter().all(|t| t.trend == Trend::DecreasingToZero) {
        Classification::Compact
    } else if tails.iter().any(|t| t.trend == Trend::Plateau) {
        Classification::BoundedNonCompact
    } else {
        Classification::Indeterminate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionVerdicts {
    pub direct: Classification,
    pub testfn: Classification,
    pub sequence: Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub direct_testfn: bool,
    pub direct_sequence: bool,
    pub testfn_sequence: bool,
    pub unanimous: bool,
}

/// Majority of the three verdicts, `Indeterminate` when all differ.
pub fn classify(v: &CriterionVerdicts) -> (Classification, Agreement) {
    let agreement = Agreement {
        direct_testfn: v.direct == v.testfn,
        direct_sequence: v.direct == v.sequence,
        testfn_sequence: v.testfn == v.sequence,
        unanimous: v.direct == v.testfn && v.testfn == v.sequence,
    };
    let c = if v.direct == v.testfn || v.direct == v.sequence {
        v.direct
    } else if v.testfn == v.sequence {
        v.testfn
    } else {
        Classification::Indeterminate
    };
    (c, agreement)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proxies {
    #[serde(rename = "PQ")]
    pub pq: f64,
    #[serde(rename = "AB")]
    pub ab: f64,
    pub seq: f64,
    /// Values at or below this are treated as zero when forming ratios.
    pub abs_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProxyRatios {
    #[serde(rename = "PQ_over_AB")]
    pub pq_ab: f64,
    #[serde(rename = "PQ_over_seq")]
    pub pq_seq: f64,
    #[serde(rename = "AB_over_seq")]
    pub ab_seq: f64,
    /// All ratios within `[1/factor, factor]`.
    pub comparable: bool,
    pub factor: f64,
}

impl ProxyRatios {
    pub fn max_spread(&self) -> f64 {
        [self.pq_ab, self.pq_seq, self.ab_seq]
            .iter()
            .map(|&r| r.max(1.0 / r))
            .fold(1.0, f64::max)
    }
}

fn ratio(x: f64, y: f64, tol: f64) -> f64 {
    match (x <= tol, y <= tol) {
        (true, true) => 1.0,
        (false, true) => f64::INFINITY,
        (true, false) => 0.0,
        (false, false) => x / y,
    }
}

/// The three essential-norm proxies `max{P,Q}`, `max{A,B}`, `max{lim sI, lim sJ}`
/// and their pairwise ratios.
pub fn essential_norm_proxies(report: &DiagnosticsReport) -> Result<(Proxies, ProxyRatios), CriteriaError> {
    if report.classification == Classification::Unbounded {
        return Err(CriteriaError::Unbounded);
    }
    let tails = [
        &report.p_tail,
        &report.q_tail,
        &report.a_tail,
        &report.b_tail,
        &report.seq.tail_i,
        &report.seq.tail_j,
    ];
    let abs_tol = tails.iter().map(|t| t.abs_tol).fold(0.0, f64::max);
    let p = Proxies {
        pq: report.p_tail.limsup_estimate.max(report.q_tail.limsup_estimate),
        ab: report.a_tail.limsup_estimate.max(report.b_tail.limsup_estimate),
        seq: report.seq.tail_i.limsup_estimate.max(report.seq.tail_j.limsup_estimate),
        abs_tol,
    };
    let factor = report.config.comparability_factor;
    let mut r = ProxyRatios {
        pq_ab: ratio(p.pq, p.ab, abs_tol),
        pq_seq: ratio(p.pq, p.seq, abs_tol),
        ab_seq: ratio(p.ab, p.seq, abs_tol),
        comparable: false,
        factor,
    };
    r.comparable = r.max_spread() <= factor;
    Ok((p, r))
}

/// Every knob of an analysis; echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub levels: u32,
    pub angular_base: usize,
    pub angular_cap: usize,
    /// Angular cap of the coarser grid used by the test-function criterion.
    pub testfn_angular_cap: usize,
    /// Gate cuts; empty means `1 - 10^{-k}` below the grid radius.
    pub cuts: Vec<f64>,
    pub jmax: u64,
    pub a_angles: usize,
    pub polish_iters: usize,
    pub trend: TrendRule,
    pub comparability_factor: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            levels: 40,
            angular_base: 64,
            angular_cap: DEFAULT_ANGULAR_CAP,
            testfn_angular_cap: 1024,
            cuts: Vec::new(),
            jmax: 1000,
            a_angles: 32,
            polish_iters: DEFAULT_POLISH_ITERS,
            trend: TrendRule::default(),
            comparability_factor: 25.0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), CriteriaError> {
        let bad = |m: String| Err(CriteriaError::InvalidParameter(m));
        if self.jmax < 2 || self.jmax > i32::MAX as u64 {
            return bad(format!("jmax = {} must lie in [2, {}]", self.jmax, i32::MAX));
        }
        if self.a_angles == 0 {
            return bad("a_angles must be positive".into());
        }
        if !(self.comparability_factor >= 1.0) {
            return bad(format!("comparability factor {} must be >= 1", self.comparability_factor));
        }
        let t = &self.trend;
        if t.lookback == 0
            || !(t.decay_factor > 0.0 && t.decay_factor < 1.0)
            || !(t.growth_factor > 1.0)
            || !(t.plateau_low > 0.0 && t.plateau_low <= 1.0 && t.plateau_high >= 1.0)
            || !(t.abs_tol_rel > 0.0)
        {
            return bad("trend thresholds out of range".into());
        }
        if !self.cuts.is_empty() {
            validate_cuts(&self.cuts)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub levels: u32,
    pub angular_base: usize,
    pub angular_cap: usize,
    pub testfn_angular_cap: usize,
    pub r_max: f64,
    pub grid_points: usize,
    pub testfn_grid_points: usize,
    pub cuts: Vec<f64>,
    pub jmax: u64,
    pub a_angles: usize,
    pub polish_iters: usize,
    pub trend: TrendRule,
    pub comparability_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timings {
    pub self_map_s: f64,
    pub sweep_s: f64,
    pub testfn_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub u: String,
    pub phi: String,
    pub spec: SpaceSpec,
    pub self_map: SelfMapCheck,
    pub prerequisites: Prerequisites,
    #[serde(rename = "P_sup")]
    pub p_sup: SupEstimate,
    #[serde(rename = "Q_sup")]
    pub q_sup: SupEstimate,
    #[serde(rename = "P_tail")]
    pub p_tail: TailEstimate,
    #[serde(rename = "Q_tail")]
    pub q_tail: TailEstimate,
    #[serde(rename = "A_tail")]
    pub a_tail: TailEstimate,
    #[serde(rename = "B_tail")]
    pub b_tail: TailEstimate,
    pub testfn: TestFnSummary,
    pub seq: SequenceCriterion,
    pub criteria: CriterionVerdicts,
    pub classification: Classification,
    pub proxies: Option<Proxies>,
    pub proxy_ratios: Option<ProxyRatios>,
    pub agreement: Agreement,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFnSummary {
    pub families: (crate::spaces::TestFamily, crate::spaces::TestFamily),
    pub at_origin: Option<KernelNorms>,
    pub schedule_size: usize,
}

pub fn check_self_map(phi: &AnalyticSymbol, grid: &DiskGrid) -> Result<SelfMapCheck, CriteriaError> {
    let check = validate_self_map(phi, grid)?;
    if !check.passed {
        return Err(CriteriaError::NotSelfMap {
            max_abs: check.max_abs_observed,
            witness: check.witness,
        });
    }
    Ok(check)
}

fn resolve_cuts(config: &AnalysisConfig, grid: &DiskGrid) -> Result<Vec<f64>, CriteriaError> {
    let cuts = if config.cuts.is_empty() {
        default_cuts(grid.r_max)
    } else {
        config.cuts.clone()
    };
    validate_cuts(&cuts)?;
    Ok(cuts)
}

pub fn prerequisites(u: &AnalyticSymbol, phi: &AnalyticSymbol, grid: &DiskGrid) -> Result<Prerequisites, CriteriaError> {
    let pair = SymbolPair::new(u, phi);
    let spec = SpaceSpec::Bergman { p: 2.0, alpha: 0.0 };
    let s = sweep::main_sweep(&pair, &spec, grid, &[], &[], DEFAULT_POLISH_ITERS, &TrendRule::default())?;
    Ok(s.prerequisites)
}

pub fn direct_criterion(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    spec: &SpaceSpec,
    grid: &DiskGrid,
    cuts: &[f64],
    rule: &TrendRule,
) -> Result<DirectCriterion, CriteriaError> {
    spec.validate()?;
    validate_cuts(cuts)?;
    let pair = SymbolPair::new(u, phi);
    let s = sweep::main_sweep(&pair, spec, grid, cuts, &[], DEFAULT_POLISH_ITERS, rule)?;
    Ok(s.direct.expect("cuts requested"))
}

pub fn sequence_criterion(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    spec: &SpaceSpec,
    grid: &DiskGrid,
    j_schedule: &[u64],
    rule: &TrendRule,
) -> Result<SequenceCriterion, CriteriaError> {
    spec.validate()?;
    let pair = SymbolPair::new(u, phi);
    let s = sweep::main_sweep(&pair, spec, grid, &[], j_schedule, DEFAULT_POLISH_ITERS, rule)?;
    Ok(s.sequence.expect("j schedule requested"))
}

/// `testfn_grid` should be a grid with a modest angular cap: the criterion
/// tabulates `u, φ` and their derivatives at every point once.
pub fn testfn_criterion(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    spec: &SpaceSpec,
    testfn_grid: &DiskGrid,
    cuts: &[f64],
    schedule: &[ScheduledPoint],
    rule: &TrendRule,
) -> Result<TestFnCriterion, CriteriaError> {
    spec.validate()?;
    let pair = SymbolPair::new(u, phi);
    testfn::testfn_with_table(&pair, spec, testfn_grid, cuts, schedule, DEFAULT_POLISH_ITERS, rule)
}

/// Runs every criterion and assembles the report. The report carries no
/// timings, so identical inputs give identical reports.
pub fn analyze(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    spec: &SpaceSpec,
    config: &AnalysisConfig,
) -> Result<DiagnosticsReport, CriteriaError> {
    analyze_inner(u, phi, spec, config).map(|(r, _)| r)
}

/// [`analyze`] with wall-clock timings attached.
pub fn analyze_timed(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    spec: &SpaceSpec,
    config: &AnalysisConfig,
) -> Result<DiagnosticsReport, CriteriaError> {
    let (mut r, t) = analyze_inner(u, phi, spec, config)?;
    r.timings = Some(t);
    Ok(r)
}

fn analyze_inner(
    u: &AnalyticSymbol,
    phi: &AnalyticSymbol,
    spec: &SpaceSpec,
    config: &AnalysisConfig,
) -> Result<(DiagnosticsReport, Timings), CriteriaError> {
    let t0 = Instant::now();
    spec.validate()?;
    config.validate()?;
    let grid = build_grid_capped(config.levels, config.angular_base, config.angular_cap)?;
    let tgrid = build_grid_capped(
        config.levels,
        config.angular_base,
        config.testfn_angular_cap.min(config.angular_cap).max(config.angular_base),
    )?;
    let cuts = resolve_cuts(config, &grid)?;
    let self_map = check_self_map(phi, &grid)?;
    let t1 = Instant::now();

    let pair = SymbolPair::new(u, phi);
    let js = default_j_schedule(config.jmax);
    let main = sweep::main_sweep(&pair, spec, &grid, &cuts, &js, config.polish_iters, &config.trend)?;
    let direct = main.direct.expect("cuts requested");
    let seq = main.sequence.expect("j schedule requested");
    let t2 = Instant::now();

    // Scheduled points: the cut circles plus the images of the points
    // where the direct ratios peak, which catch tangential approach.
    let mut schedule = default_a_schedule(&cuts, config.a_angles);
    for tail in [&direct.p_tail, &direct.q_tail] {
        for b in tail.band_argmax.iter().flatten() {
            let a = pair.phi.evaluate(*b)?;
            if a.norm() < 1.0 {
                schedule.push(ScheduledPoint {
                    a,
                    radius: a.norm(),
                    seeds: vec![*b],
                });
            }
        }
    }
    let tf = testfn::testfn_with_table(&pair, spec, &tgrid, &cuts, &schedule, config.polish_iters, &config.trend)?;
    let t3 = Instant::now();

    let criteria = CriterionVerdicts {
        direct: classify_tails(&[&direct.p_tail, &direct.q_tail]),
        testfn: classify_tails(&[&tf.a_tail, &tf.b_tail]),
        sequence: classify_tails(&[&seq.tail_i, &seq.tail_j]),
    };
    let (classification, agreement) = classify(&criteria);
    let mut report = DiagnosticsReport {
        u: u.source_text().to_string(),
        phi: phi.source_text().to_string(),
        spec: *spec,
        self_map,
        prerequisites: main.prerequisites,
        p_sup: direct.p_sup,
        q_sup: direct.q_sup,
        p_tail: direct.p_tail,
        q_tail: direct.q_tail,
        a_tail: tf.a_tail,
        b_tail: tf.b_tail,
        testfn: TestFnSummary {
            families: tf.families,
            at_origin: tf.at_origin,
            schedule_size: tf.schedule_size,
        },
        seq,
        criteria,
        classification,
        proxies: None,
        proxy_ratios: None,
        agreement,
        config: ConfigEcho {
            levels: config.levels,
            angular_base: config.angular_base,
            angular_cap: config.angular_cap,
            testfn_angular_cap: tgrid.angular_cap,
            r_max: grid.r_max,
            grid_points: grid.len(),
            testfn_grid_points: tgrid.len(),
            cuts,
            jmax: config.jmax,
            a_angles: config.a_angles,
            polish_iters: config.polish_iters,
            trend: config.trend,
            comparability_factor: config.comparability_factor,
        },
        timings: None,
    };
    if let Ok((p, r)) = essential_norm_proxies(&report) {
        report.proxies = Some(p);
        report.proxy_ratios = Some(r);
    }
    let secs = |a: Instant, b: Instant| (b - a).as_secs_f64();
    let timings = Timings {
        self_map_s: secs(t0, t1),
        sweep_s: secs(t1, t2),
        testfn_s: secs(t2, t3),
        total_s: secs(t0, Instant::now()),
    };
    Ok((report, timings))
}
