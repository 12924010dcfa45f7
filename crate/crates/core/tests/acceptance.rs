//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; the process exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use blochop::criteria::{
    analyze, essential_norm_proxies, lemma33_check, sequence_criterion, AnalysisConfig, Classification,
    DiagnosticsReport,
};
use blochop::disk::{build_grid, build_grid_capped};
use blochop::report::{bergman_suite, bloch_suite, schwarz_pick_suite, to_json, weighted_sup_suite};
use blochop::spaces::{bloch_seminorm, SpaceSpec};
use blochop::symbol::parse_symbol;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn space(text: &str) -> SpaceSpec {
    text.parse().expect("valid space")
}

fn run(u: &str, phi: &str, spec: &str, config: &AnalysisConfig) -> DiagnosticsReport {
    let u = parse_symbol(u).expect("u parses");
    let phi = parse_symbol(phi).expect("phi parses");
    analyze(&u, &phi, &space(spec), config).expect("analysis succeeds")
}

const CORPUS: [(&str, &str, &str); 10] = [
    ("1", "z/2", "bergman:2,0"),
    ("1", "z/2", "hardy:2"),
    ("1", "0.8*z+0.1", "bergman:2,1"),
    ("(1-z)^3", "z", "bergman:2,0"),
    ("(1-z)^2", "z", "bergman:2,0"),
    ("(1-z)", "z", "bergman:2,0"),
    ("1", "z", "bergman:2,0"),
    ("1", "z", "hardy:2"),
    ("exp(z)", "z/2", "bergman:4,0.5"),
    ("z", "0.95*(z+0.3)/(1+0.3*z)", "bergman:2,0"),
];

/// `(1-z)^γ` against a symbol touching the circle only at 1, where the
/// horocycle ratio `|1-z|^2/(1-|z|^2)` stays bounded with a positive limsup.
const HOROCYCLE: [(&str, &str, &str, Classification); 3] = [
    ("(1-z)", "(1+z)/2", "bergman:2,0", Classification::Unbounded),
    ("(1-z)^2", "(1+z)/2", "bergman:2,0", Classification::BoundedNonCompact),
    ("(1-z)^3", "(1+z)/2", "bergman:2,0", Classification::Compact),
];

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 2.5] {
        let row = lemma33_check(alpha, &[100_000]).expect("alpha > 0")[0];
        worst = worst.max(row.relative_error);
    }
    let grid = build_grid_capped(16, 64, 1024).expect("grid");
    let sup = weighted_sup_suite(&grid).expect("suite runs");
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst <= 0.01 && sup.passed && secs < 5.0,
        format!(
            "limit rel err at k=1e5 {worst:.3e} (<= 1e-2), weighted sup k<=100 max rel {:.3e} (<= 1e-6), {secs:.2}s (< 5s)",
            sup.max_residual
        ),
    )
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let bergman = bergman_suite(40).expect("suite runs");
    let bloch = bloch_suite(&build_grid_capped(16, 64, 1024).expect("grid")).expect("suite runs");
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        bergman.passed && bloch.passed && secs < 30.0,
        format!(
            "bergman k<=20 max rel {:.3e} (<= 1e-8), bloch k<=30 max rel {:.3e} (<= 1e-6), {secs:.2}s (< 30s)",
            bergman.max_residual, bloch.max_residual
        ),
    )
}

fn criterion_3() -> Outcome {
    let row = schwarz_pick_suite(&build_grid(40, 64).expect("grid")).expect("suite runs");
    outcome(
        row.passed,
        format!("max residual {:.3e} (<= 1e-10) at {}", row.max_residual, row.worst),
    )
}

struct CorpusRun {
    corpus: Vec<DiagnosticsReport>,
    horocycle: Vec<DiagnosticsReport>,
    secs: f64,
}

fn run_corpus() -> CorpusRun {
    let t0 = Instant::now();
    let config = AnalysisConfig::default();
    let corpus = CORPUS.iter().map(|(u, phi, s)| run(u, phi, s, &config)).collect();
    // the γ = 3 sequence tail needs large j before it leaves the plateau band
    let long = AnalysisConfig {
        jmax: 100_000_000,
        ..AnalysisConfig::default()
    };
    let horocycle = HOROCYCLE.iter().map(|(u, phi, s, _)| run(u, phi, s, &long)).collect();
    CorpusRun {
        corpus,
        horocycle,
        secs: t0.elapsed().as_secs_f64(),
    }
}

fn describe(r: &DiagnosticsReport) -> String {
    format!(
        "[{} | {} | {}] {:?} (direct {:?}, testfn {:?}, seq {:?})",
        r.u, r.phi, r.spec, r.classification, r.criteria.direct, r.criteria.testfn, r.criteria.sequence
    )
}

fn criterion_4_unanimity(run: &CorpusRun) -> Outcome {
    let split: Vec<String> = run
        .corpus
        .iter()
        .chain(&run.horocycle)
        .filter(|r| !r.agreement.unanimous)
        .map(describe)
        .collect();
    outcome(
        split.is_empty() && run.secs < 600.0,
        format!(
            "{} of {} entries unanimous, {:.0}s (< 600s){}",
            run.corpus.len() + run.horocycle.len() - split.len(),
            run.corpus.len() + run.horocycle.len(),
            run.secs,
            if split.is_empty() { String::new() } else { format!("; split: {}", split.join("; ")) }
        ),
    )
}

fn criterion_4_gamma_family(run: &CorpusRun) -> Outcome {
    // expected classes as stated for φ = z; rows 3..=5 of the corpus are γ = 3, 2, 1
    let expected = [
        Classification::Compact,
        Classification::BoundedNonCompact,
        Classification::Unbounded,
    ];
    let got: Vec<Classification> = run.corpus[3..6].iter().map(|r| r.classification).collect();
    let q: Vec<String> = run.corpus[3..6]
        .iter()
        .map(|r| format!("{:.3e}", r.q_sup.value))
        .collect();
    outcome(
        got == expected,
        format!(
            "phi=z, gamma=3,2,1: expected {expected:?}, got {got:?}; Q_sup {} (|1-z|^g/(1-|z|^2) is unbounded near z=-1)",
            q.join(", ")
        ),
    )
}

fn criterion_4_horocycle(run: &CorpusRun) -> Outcome {
    let got: Vec<Classification> = run.horocycle.iter().map(|r| r.classification).collect();
    let expected: Vec<Classification> = HOROCYCLE.iter().map(|h| h.3).collect();
    outcome(
        got == expected,
        format!("phi=(1+z)/2, gamma=1,2,3: expected {expected:?}, got {got:?}"),
    )
}

fn criterion_5(run: &CorpusRun) -> Outcome {
    let mut failures = Vec::new();
    let mut bnc = 0;
    let mut compact = 0;
    for r in run.corpus.iter().chain(&run.horocycle) {
        if r.classification != Classification::BoundedNonCompact && r.classification != Classification::Compact {
            continue;
        }
        let (p, ratios) = essential_norm_proxies(r).expect("bounded");
        let values = [p.pq, p.ab, p.seq];
        let ok = if r.classification == Classification::Compact {
            compact += 1;
            values.iter().all(|&v| v <= p.abs_tol)
        } else {
            bnc += 1;
            values.iter().all(|&v| v > 0.0) && ratios.max_spread() <= 25.0
        };
        if !ok {
            failures.push(format!(
                "{}: PQ={:.4e} AB={:.4e} seq={:.4e} abs_tol={:.3e}",
                describe(r),
                p.pq,
                p.ab,
                p.seq,
                p.abs_tol
            ));
        }
    }
    outcome(
        failures.is_empty() && bnc > 0,
        format!(
            "{bnc} bounded non-compact entries within factor 25, {compact} compact entries at or below abs_tol{}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join("; ")) }
        ),
    )
}

fn criterion_6() -> Outcome {
    let grid = build_grid_capped(40, 64, 1024).expect("grid");
    let one = parse_symbol("1").expect("parses");
    let js: Vec<u64> = (1..=30).collect();
    let mut worst = 0.0f64;
    let mut at = String::new();
    for phi_text in ["z/2", "0.8*z+0.1"] {
        let phi = parse_symbol(phi_text).expect("parses");
        for spec in [space("bergman:2,0"), space("bergman:2,1"), space("hardy:2")] {
            let seq = sequence_criterion(&one, &phi, &spec, &grid, &js, &Default::default()).expect("runs");
            for (i, &j) in seq.j_values.iter().enumerate() {
                let power = phi.powi(j as i32);
                let exact = (j as f64).powf(spec.sigma()) * bloch_seminorm(&power, &grid).expect("finite").value;
                let err = (seq.s_i[i] - exact).abs() / exact;
                if !(err <= worst) {
                    worst = err;
                    at = format!("phi={phi_text} {spec} j={j}");
                }
                if seq.s_j[i] != 0.0 {
                    return outcome(false, format!("sJ_{j} = {} for constant u", seq.s_j[i]));
                }
            }
        }
    }
    outcome(worst <= 1e-6, format!("max rel err {worst:.3e} (<= 1e-6) at {at}"))
}

fn criterion_7() -> Outcome {
    let config = AnalysisConfig::default();
    let mut notes = Vec::new();
    let zero_phi = run("1+z", "0", "bergman:2,0", &config);
    let seq_zero = zero_phi
        .seq
        .j_values
        .iter()
        .zip(zero_phi.seq.s_i.iter().zip(&zero_phi.seq.s_j))
        .filter(|(&j, _)| j >= 2)
        .all(|(_, (&i, &j))| i == 0.0 && j == 0.0);
    let ok_phi = seq_zero && zero_phi.classification == Classification::Compact;
    notes.push(format!(
        "phi=0: sI=sJ=0 for j>=2 {seq_zero}, {:?}",
        zero_phi.classification
    ));
    let zero_u = run("0", "z/2", "bergman:2,0", &config);
    let tails = [
        &zero_u.p_tail,
        &zero_u.q_tail,
        &zero_u.a_tail,
        &zero_u.b_tail,
        &zero_u.seq.tail_i,
        &zero_u.seq.tail_j,
    ];
    let all_zero = zero_u.p_sup.value == 0.0
        && zero_u.q_sup.value == 0.0
        && zero_u.seq.sup_i == 0.0
        && zero_u.seq.sup_j == 0.0
        && tails.iter().all(|t| t.band_values.iter().all(|&v| v == 0.0) && t.limsup_estimate == 0.0);
    let ok_u = all_zero && zero_u.classification == Classification::Compact;
    notes.push(format!("u=0: all quantities zero {all_zero}, {:?}", zero_u.classification));
    outcome(ok_phi && ok_u, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let config = AnalysisConfig::default();
    let a = to_json(&run("exp(z)", "z/2", "bergman:4,0.5", &config));
    let b = to_json(&run("exp(z)", "z/2", "bergman:4,0.5", &config));
    outcome(a == b, format!("{} bytes, identical {}", a.len(), a == b))
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are passed through; there is nothing to list
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut all = true;
    let mut report = |name: &str, o: Outcome| {
        all &= o.passed;
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    };
    report("criterion 1 (weighted monomial limit)", criterion_1());
    report("criterion 2 (oracle equivalence)", criterion_2());
    report("criterion 3 (Schwarz-Pick identity)", criterion_3());
    let corpus = run_corpus();
    report("criterion 4 (criteria agreement)", criterion_4_unanimity(&corpus));
    report("criterion 4 (expected classes, (1-z)^g with phi=z)", criterion_4_gamma_family(&corpus));
    report("criterion 4 (horocycle family, (1-z)^g with phi=(1+z)/2)", criterion_4_horocycle(&corpus));
    report("criterion 5 (essential-norm proxies)", criterion_5(&corpus));
    report("criterion 6 (constant-u sequence consistency)", criterion_6());
    report("criterion 7 (degenerate symbols)", criterion_7());
    report("criterion 8 (determinism)", criterion_8());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
