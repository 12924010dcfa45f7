//! Serialization of reports, the corpus format and the oracle self-checks
//! behind the command-line tool.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::criteria::{
    analyze, AnalysisConfig, Classification, CriteriaError, CriterionVerdicts, DiagnosticsReport, Proxies,
    ProxyRatios,
};
use crate::disk::{bergman_integral, build_grid, build_grid_capped, DiskGrid, QuadConfig};
use crate::oracle::{
    bloch_seminorm_monomial, mobius_symbol, monomial_bergman_norm, monomial_weighted_norm, schwarz_pick_residual,
};
use crate::spaces::{bloch_seminorm, weighted_sup_norm, SpaceSpec};
use crate::symbol::{parse_symbol, AnalyticSymbol, ParseError};

/// JSON formatter writing every float with 17 significant digits and
/// non-finite values as `null`.
#[derive(Debug, Clone, Default)]
pub struct PreciseFormatter {
    indent: usize,
    has_value: bool,
}

impl PreciseFormatter {
    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

fn write_float<W: ?Sized + io::Write>(w: &mut W, v: f64) -> io::Result<()> {
    if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        w.write_all(b"null")
    }
}

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write_float(w, v)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write_float(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter::default());
    value.serialize(&mut ser).expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("corpus contains no entries")]
    Empty,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub line: usize,
    pub u: AnalyticSymbol,
    pub phi: AnalyticSymbol,
    pub spec: SpaceSpec,
}

/// One analysis per line: `u | phi | bergman:p,alpha` or `u | phi | hardy:p`.
/// Blank lines and `#` comments are ignored.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(CorpusError::Malformed {
                line,
                msg: format!("expected `u | phi | space`, found {} field(s)", fields.len()),
            });
        }
        let u = parse_symbol(fields[0]).map_err(|source| CorpusError::Parse { line, source })?;
        let phi = parse_symbol(fields[1]).map_err(|source| CorpusError::Parse { line, source })?;
        let spec = fields[2]
            .parse::<SpaceSpec>()
            .map_err(|e| CorpusError::Malformed { line, msg: e.to_string() })?;
        out.push(CorpusEntry { line, u, phi, spec });
    }
    if out.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareEntry {
    pub line: usize,
    pub u: String,
    pub phi: String,
    pub spec: SpaceSpec,
    pub criteria: Option<CriterionVerdicts>,
    pub classification: Option<Classification>,
    pub unanimous: bool,
    pub proxies: Option<Proxies>,
    pub proxy_ratios: Option<ProxyRatios>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSummary {
    pub entries: Vec<CompareEntry>,
    pub all_unanimous: bool,
    pub all_comparable: bool,
    pub errors: usize,
}

impl CompareSummary {
    pub fn passed(&self) -> bool {
        self.errors == 0 && self.all_unanimous && self.all_comparable
    }
}

fn compare_entry(e: &CorpusEntry, r: Result<DiagnosticsReport, CriteriaError>) -> CompareEntry {
    let base = CompareEntry {
        line: e.line,
        u: e.u.source_text().to_string(),
        phi: e.phi.source_text().to_string(),
        spec: e.spec,
        criteria: None,
        classification: None,
        unanimous: false,
        proxies: None,
        proxy_ratios: None,
        error: None,
    };
    match r {
        Ok(r) => CompareEntry {
            criteria: Some(r.criteria),
            classification: Some(r.classification),
            unanimous: r.agreement.unanimous,
            proxies: r.proxies,
            proxy_ratios: r.proxy_ratios,
            ..base
        },
        Err(err) => CompareEntry {
            error: Some(err.to_string()),
            ..base
        },
    }
}

/// Analyzes every corpus entry; output follows input order.
pub fn compare(entries: &[CorpusEntry], config: &AnalysisConfig) -> CompareSummary {
    let results: Vec<CompareEntry> = entries
        .iter()
        .map(|e| compare_entry(e, analyze(&e.u, &e.phi, &e.spec, config)))
        .collect();
    let ok: Vec<&CompareEntry> = results.iter().filter(|e| e.error.is_none()).collect();
    CompareSummary {
        all_unanimous: ok.iter().all(|e| e.unanimous),
        all_comparable: ok
            .iter()
            .all(|e| e.proxy_ratios.map_or(true, |r| r.comparable)),
        errors: results.len() - ok.len(),
        entries: results,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub suite: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Case with the largest residual.
    pub worst: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCheck {
    pub levels: u32,
    pub sup_levels: u32,
    pub rows: Vec<ResidualRow>,
}

impl GridCheck {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

struct Worst {
    value: f64,
    case: String,
    cases: usize,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            case: String::new(),
            cases: 0,
        }
    }

    fn push(&mut self, value: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        if !(value <= self.value) {
            self.value = value;
            self.case = case();
        }
    }

    fn row(self, suite: &'static str, tolerance: f64) -> ResidualRow {
        ResidualRow {
            suite,
            cases: self.cases,
            passed: self.value <= tolerance,
            max_residual: self.value,
            tolerance,
            worst: self.case,
        }
    }
}

fn monomial(k: u64) -> AnalyticSymbol {
    parse_symbol(&format!("z^{k}")).expect("monomials parse")
}

/// `weighted_sup_norm(z^{k-1}, α)` against the closed form, `k <= 100`.
pub fn weighted_sup_suite(grid: &DiskGrid) -> Result<ResidualRow, CriteriaError> {
    let mut w = Worst::new();
    for alpha in [0.5, 1.0, 2.5] {
        for k in 1..=100u64 {
            let exact = monomial_weighted_norm(k, alpha);
            let got = weighted_sup_norm(&monomial(k - 1), alpha, grid)?.value;
            w.push((got - exact).abs() / exact, || format!("k={k} alpha={alpha}"));
        }
    }
    Ok(w.row("weighted_sup_monomials", 1e-6))
}

/// `bloch_seminorm(z^k)` against `k ‖z^{k-1}‖_{v_1}`, `k <= 30`.
pub fn bloch_suite(grid: &DiskGrid) -> Result<ResidualRow, CriteriaError> {
    let mut w = Worst::new();
    for k in 1..=30u64 {
        let exact = bloch_seminorm_monomial(k);
        let got = bloch_seminorm(&monomial(k), grid)?.value;
        w.push((got - exact).abs() / exact, || format!("k={k}"));
    }
    Ok(w.row("bloch_seminorm_monomials", 1e-6))
}

/// `‖z^k‖_{A^p_α}` by quadrature against the Beta closed form, `k <= 20`.
pub fn bergman_suite(levels: u32) -> Result<ResidualRow, CriteriaError> {
    let quad = QuadConfig {
        levels,
        ..QuadConfig::default()
    };
    let mut w = Worst::new();
    for (p, alpha) in [(2.0, 0.0), (2.0, 1.0), (2.0, 2.5)] {
        for k in 0..=20u32 {
            let exact = monomial_bergman_norm(k, p, alpha);
            let got = bergman_integral(&monomial(k as u64), p, alpha, &quad)
                .map_err(CriteriaError::from)?
                .powf(1.0 / p);
            w.push((got - exact).abs() / exact, || format!("k={k} p={p} alpha={alpha}"));
        }
    }
    Ok(w.row("bergman_norm_monomials", 1e-8))
}

/// `|(1-|z|^2)|φ_a'| - (1-|φ_a|^2)|` at every grid point for a few automorphisms.
pub fn schwarz_pick_suite(grid: &DiskGrid) -> Result<ResidualRow, CriteriaError> {
    let mut w = Worst::new();
    let points = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::from_polar(0.9, std::f64::consts::FRAC_PI_3),
    ];
    for a in points {
        let phi = mobius_symbol(a).expect("points lie in the disk");
        let dphi = phi.derivative();
        let mut worst = 0.0f64;
        let mut n = 0usize;
        for ring in 0..grid.radii.len() {
            for k in 0..grid.angle_counts[ring] {
                n += 1;
                let r = schwarz_pick_residual(&phi, &dphi, grid.point(ring, k)).unwrap_or(f64::INFINITY);
                worst = worst.max(r);
            }
        }
        w.push(worst, || format!("a={a} over {n} points"));
    }
    Ok(w.row("schwarz_pick", 1e-10))
}

pub fn gridcheck(levels: u32, sup_levels: u32) -> Result<GridCheck, CriteriaError> {
    let grid = build_grid(levels, 64)?;
    // the sup suites test radial functions, so a coarse angular cap is enough
    let sup_grid = build_grid_capped(sup_levels, 64, 1024)?;
    let rows = vec![
        weighted_sup_suite(&sup_grid)?,
        bloch_suite(&sup_grid)?,
        bergman_suite(levels)?,
        schwarz_pick_suite(&grid)?,
    ];
    Ok(GridCheck {
        levels,
        sup_levels,
        rows,
    })
}

/// `1..=10`, then `2·10^m` and `5·10^m` and `10^{m+1}` up to `kmax`, and `kmax`.
pub fn default_k_schedule(kmax: u64) -> Vec<u64> {
    let mut ks: Vec<u64> = (1..=kmax.min(10)).collect();
    let mut decade = 10u64;
    while decade < kmax {
        for m in [2, 5, 10] {
            let k = decade.saturating_mul(m);
            if k < kmax {
                ks.push(k);
            }
        }
        decade = decade.saturating_mul(10);
    }
    if kmax > 10 {
        ks.push(kmax);
    }
    ks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            y: Vec<f64>,
            n: Option<f64>,
        }
        let s = to_json(&S {
            x: 0.1,
            y: vec![1.0, f64::INFINITY],
            n: None,
        });
        assert!(s.contains("\"x\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn float_roundtrip_is_exact() {
        for v in [std::f64::consts::PI, 1e-300, 0.7357588823428847, 2f64.powi(-40), -123456.789] {
            let s = to_json(&v);
            // serde_json's default float parser is not correctly rounded
            let back: f64 = s.trim().parse().unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn corpus_parsing() {
        let text = "# header\n1 | z/2 | bergman:2,0\n\n(1-z)^2 | z | bergman:p=2,alpha=0  # trailing\n1 | z | hardy:2\n";
        let c = parse_corpus(text).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].line, 2);
        assert_eq!(c[1].line, 4);
        assert_eq!(c[2].spec, SpaceSpec::Hardy { p: 2.0 });
        assert_eq!(parse_corpus("# nothing\n\n").unwrap_err(), CorpusError::Empty);
        let e = parse_corpus("1 | z | hardy:2\n(1-z)^1.5 | z | bergman:2,0\n").unwrap_err();
        assert!(matches!(e, CorpusError::Parse { line: 2, .. }), "{e:?}");
        let e = parse_corpus("1 | z\n").unwrap_err();
        assert!(matches!(e, CorpusError::Malformed { line: 1, .. }));
        let e = parse_corpus("1 | z | lp:3\n").unwrap_err();
        assert!(matches!(e, CorpusError::Malformed { line: 1, .. }));
    }

    #[test]
    fn k_schedule() {
        assert_eq!(default_k_schedule(5), vec![1, 2, 3, 4, 5]);
        assert_eq!(
            default_k_schedule(1000),
            vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 50, 100, 200, 500, 1000]
        );
        assert_eq!(*default_k_schedule(100_000).last().unwrap(), 100_000);
    }

    #[test]
    fn coarse_grid_flags_the_bergman_suite() {
        let row = bergman_suite(4).unwrap();
        assert!(!row.passed);
        assert!(row.max_residual > 1e-8);
    }
}
