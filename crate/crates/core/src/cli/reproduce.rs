//! One-shot regeneration of every reference number into `report.json` and
//! `report.md`. A failing experiment is recorded as a failed entry; the
//! report is written regardless.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::backward_error::{
    energy_drift_with_threshold, euler_order_study, max_residual, EnergyDriftReport,
    DEFAULT_SPURIOUS_FRACTION,
};
use crate::chaos_metrics::{
    lyapunov_estimate, secular_envelope, separation_scaling, trajectory_statistics, DisturbanceSpec,
    DEFAULT_DELTA0, DEFAULT_RENORM_INTERVAL, DEFAULT_SEPARATION_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::integrators::{integrate_adaptive, leapfrog_dkd, SolverConfig};
use crate::lowprec::{enumerate_unit_interval, ArithmeticMode, FloatFormat, MapId};
use crate::orbit_graph::{build_graph, build_graph_with, decompose, shadow_refine_gauss, GraphOptions};
use crate::stats::least_squares_slope;
use crate::systems::{hamiltonian_h0, HamiltonianState, Lorenz, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub title: String,
    /// Reference value or acceptance window.
    pub expected: Value,
    pub measured: Value,
    pub status: Status,
    pub note: String,
}

impl Entry {
    fn new(id: &str, title: &str, expected: Value, measured: Value, pass: bool, note: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            expected,
            measured,
            status: if pass { Status::Pass } else { Status::Fail },
            note: note.into(),
        }
    }

    fn info(id: &str, title: &str, expected: Value, measured: Value, note: impl Into<String>) -> Self {
        Self {
            status: Status::Informational,
            ..Self::new(id, title, expected, measured, true, note)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub entries: Vec<Entry>,
    pub passed: usize,
    pub failed: usize,
    pub informational: usize,
}

const HH_H_STABLE: f64 = 81.0 / 64.0;
const HH_H_SMALL: f64 = 1.175;
const HH_H_UNSTABLE: f64 = 79.0 / 64.0;
const HH_STEPS: usize = 16000;

fn lorenz_y0() -> StateVector {
    StateVector::from([1.0, 0.0, 0.0])
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn drift_report(h: f64, fraction: f64) -> Result<EnergyDriftReport> {
    let run = leapfrog_dkd(HamiltonianState::standard(), h, HH_STEPS)?;
    energy_drift_with_threshold(&run, &[0, 2, 4], fraction)
}

fn drifts(r: &EnergyDriftReport) -> [f64; 3] {
    [0, 2, 4].map(|o| r.drift(o).unwrap_or(f64::NAN))
}

pub fn ac1() -> Result<Entry> {
    let sys = Lorenz::default();
    let reference = [1.57e-4, 2.36e-5, 3.67e-6];
    let mut measured = Vec::new();
    for tol in [1e-8, 1e-9, 1e-10] {
        let sol = integrate_adaptive(&sys, &lorenz_y0(), 0.0, 50.0, &SolverConfig::tol(tol))?;
        measured.push(max_residual(&sol, &sys, 8, false)?.value);
    }
    let decreasing = measured.windows(2).all(|w| w[1] < w[0]);
    let close = measured.iter().zip(&reference).all(|(m, r)| within(m / r, 0.01, 100.0));
    Ok(Entry::new(
        "AC1",
        "Lorenz max residual at tolerances 1e-8, 1e-9, 1e-10",
        json!({ "reference": reference, "window": "strictly decreasing, each within a factor 100" }),
        json!(measured),
        decreasing && close,
        "Dormand-Prince 5(4) with its quartic dense output, 8 samples per step",
    ))
}

pub fn ac2() -> Result<Entry> {
    let est = lyapunov_estimate(&Lorenz::default(), &lorenz_y0(), 1000.0, DEFAULT_RENORM_INTERVAL, DEFAULT_DELTA0)?;
    Ok(Entry::new(
        "AC2",
        "Lorenz largest Lyapunov exponent",
        json!({ "reference": 0.905, "window": [0.85, 0.96] }),
        json!(est.lambda),
        within(est.lambda, 0.85, 0.96),
        format!("T = 1000, renormalized every {DEFAULT_RENORM_INTERVAL}, delta0 = {DEFAULT_DELTA0}"),
    ))
}

pub const AC3_SEED_PAIRS: [[u64; 2]; 4] = [[1, 2], [3, 4], [5, 6], [7, 8]];

pub fn ac3() -> Result<Entry> {
    let template = DisturbanceSpec::multi_sine(1e-9, 0, 3)?;
    let sc = separation_scaling(
        &Lorenz::default(),
        &lorenz_y0(),
        &template,
        &[1e-6, 1e-8, 1e-10],
        &AC3_SEED_PAIRS,
        DEFAULT_SEPARATION_THRESHOLD,
        200.0,
    )?;
    Ok(Entry::new(
        "AC3",
        "Separation time against ln(1/eps)",
        json!({ "reference": 1.10, "window": [0.7, 1.6] }),
        json!({ "slope": sc.slope, "mean_times": sc.points.iter().map(|p| p.time).collect::<Vec<_>>() }),
        within(sc.slope, 0.7, 1.6),
        "multi-sine disturbances, four seed pairs, threshold 1",
    ))
}

pub fn ac4() -> Result<Entry> {
    let d = drifts(&drift_report(HH_H_STABLE, DEFAULT_SPURIOUS_FRACTION)?);
    let pass = within(d[0], 0.0045, 0.018) && within(d[1], 0.0015, 0.006) && d[2] <= 0.002 && d[2] < d[1] && d[1] < d[0];
    Ok(Entry::new(
        "AC4",
        "Leapfrog drift of H0, H0 + h^2 H2, full series at h = 81/64",
        json!({ "reference": [0.009, 0.003, 0.001], "window": [[0.0045, 0.018], [0.0015, 0.006], [0.0, 0.002]] }),
        json!(d),
        pass,
        "synchronized drift-kick-drift samples, N = 16000, all-0.12 start",
    ))
}

pub fn ac5() -> Result<Entry> {
    let d = drifts(&drift_report(HH_H_SMALL, DEFAULT_SPURIOUS_FRACTION)?);
    Ok(Entry::new(
        "AC5",
        "Leapfrog drift at h = 1.175",
        json!({ "reference": "drift(H0) <= 0.006", "window": "drift(H0) <= 0.009, higher orders smaller" }),
        json!(d),
        d[0] <= 0.009 && d[2] < d[1] && d[1] < d[0],
        "",
    ))
}

fn flags(fraction: f64) -> Result<[bool; 3]> {
    let mut out = [false; 3];
    for (o, h) in out.iter_mut().zip([HH_H_UNSTABLE, HH_H_STABLE, HH_H_SMALL]) {
        *o = drift_report(h, fraction)?.spurious_chaos;
    }
    Ok(out)
}

pub fn ac6() -> Result<Entry> {
    let f = flags(DEFAULT_SPURIOUS_FRACTION)?;
    Ok(Entry::new(
        "AC6",
        "Spurious chaos flagged at h = 79/64 only",
        json!({ "flagged": [true, false, false] }),
        json!({ "h": [HH_H_UNSTABLE, HH_H_STABLE, HH_H_SMALL], "flagged": f, "fraction": DEFAULT_SPURIOUS_FRACTION }),
        f == [true, false, false],
        "threshold is a fraction of |H0| at the start",
    ))
}

pub fn ac7() -> Result<Entry> {
    let sys = Lorenz::default();
    let hs = [1e-3, 5e-4, 2.5e-4];
    let mut studies = Vec::new();
    for c in [-0.5, 0.5, 1.0] {
        studies.push(euler_order_study(&sys, &lorenz_y0(), 0.0, 1.0, &hs, c, 8)?);
    }
    let original = studies[0].original_order;
    let raising: Vec<f64> = studies
        .iter()
        .filter(|s| within(s.modified_order, 1.7, 2.3))
        .map(|s| s.coefficient)
        .collect();
    let lf_hs = [0.05, 0.1, 0.2];
    let mut d0 = Vec::new();
    let mut d2 = Vec::new();
    for h in lf_hs {
        let d = drifts(&drift_report(h, DEFAULT_SPURIOUS_FRACTION)?);
        d0.push(d[0].ln());
        d2.push(d[1].ln());
    }
    let xs: Vec<f64> = lf_hs.iter().map(|h: &f64| h.ln()).collect();
    let s0 = least_squares_slope(&xs, &d0)?;
    let s2 = least_squares_slope(&xs, &d2)?;
    let pass = within(original, 0.8, 1.2) && !raising.is_empty() && within(s0, 1.6, 2.4) && within(s2, 3.4, 4.6);
    Ok(Entry::new(
        "AC7",
        "Observed orders: Euler residual, modified Euler, leapfrog drift",
        json!({ "euler": "1 +- 0.2", "modified": "2 +- 0.3 for one coefficient", "drift_order0": "2 +- 0.4", "drift_order2": "4 +- 0.6" }),
        json!({
            "euler": original,
            "modified": studies.iter().map(|s| json!({ "coefficient": s.coefficient, "order": s.modified_order })).collect::<Vec<_>>(),
            "raising_coefficients": raising,
            "drift_order0": s0,
            "drift_order2": s2,
        }),
        pass,
        "Lorenz on [0, 1] with h in {1e-3, 5e-4, 2.5e-4}; leapfrog N = 16000",
    ))
}

pub fn ac8() -> Result<Entry> {
    let formats = [
        FloatFormat::E3M4,
        FloatFormat::E4M3,
        FloatFormat::E5M2,
        FloatFormat::E4M5,
        FloatFormat::BINARY16,
        FloatFormat::new(3, 3)?,
    ];
    let mut rows = Vec::new();
    let mut closed_ok = true;
    for f in formats {
        let n = enumerate_unit_interval(f)?.len();
        let closed = f.bias() as usize * (1usize << f.mantissa_bits()) + 1;
        closed_ok &= n == closed;
        rows.push(json!({ "format": f, "enumerated": n, "closed_form": closed }));
    }
    let e3 = enumerate_unit_interval(FloatFormat::E3M4)?.len();
    let b16 = enumerate_unit_interval(FloatFormat::BINARY16)?.len();
    Ok(Entry::new(
        "AC8",
        "Values of each format in [0, 1]",
        json!({ "e3m4": 49, "binary16": 15361, "closed_form": "bias * 2^m + 1" }),
        json!(rows),
        e3 == 49 && b16 == 15361 && closed_ok,
        "",
    ))
}

pub fn ac9() -> Result<Entry> {
    let g = build_graph(FloatFormat::BINARY16, MapId::Gauss)?;
    let zero = g.len() - 1;
    let last_nonzero = (0..zero)
        .rev()
        .find(|&j| g.successors[j] != zero && !g.was_redirected(j))
        .map(|j| j + 1);
    let first_nan = g.redirected.first().map(|j| j + 1);
    let last_finite = first_nan.map(|j| j - 1);
    Ok(Entry::new(
        "AC9",
        "binary16 Gauss boundaries (1-based descending indices)",
        json!({ "last_nonzero_image": 10224, "last_non_nan": 15104, "first_nan": 15105 }),
        json!({ "last_nonzero_image": last_nonzero, "last_non_nan": last_finite, "first_nan": first_nan }),
        last_nonzero == Some(10224) && last_finite == Some(15104) && first_nan == Some(15105),
        "",
    ))
}

/// Out-degree one, every node reaches a cycle, components partition the nodes.
fn graph_invariants_hold(format: FloatFormat) -> Result<bool> {
    let g = build_graph(format, MapId::Gauss)?;
    let d = decompose(&g);
    let n = g.len();
    if g.successors.len() != n || g.successors.iter().any(|&s| s >= n) {
        return Ok(false);
    }
    if d.component_sizes.iter().sum::<usize>() != n {
        return Ok(false);
    }
    Ok((0..n).all(|v| {
        let mut u = v;
        for _ in 0..d.transient[v] {
            u = g.successors[u];
        }
        d.cycles[d.component[v]].contains(&u)
    }))
}

pub fn ac10() -> Result<Vec<Entry>> {
    let formats = [FloatFormat::E3M4, FloatFormat::E4M3, FloatFormat::E5M2, FloatFormat::BINARY16];
    let mut ok = Vec::new();
    for f in formats {
        ok.push(json!({ "format": f, "invariants": graph_invariants_hold(f)? }));
    }
    let all = ok.iter().all(|v| v["invariants"] == json!(true));
    let mut multisets = serde_json::Map::new();
    for (name, mode) in [("stepwise", ArithmeticMode::Stepwise), ("single-rounding", ArithmeticMode::SingleRounding)] {
        let g = build_graph_with(FloatFormat::E3M4, MapId::Gauss, GraphOptions { mode, ..Default::default() })?;
        multisets.insert(name.into(), json!(decompose(&g).cycle_lengths()));
    }
    let matches = multisets.iter().filter(|(_, v)| **v == json!([1, 2, 2, 3])).map(|(k, _)| k.clone()).collect::<Vec<_>>();
    Ok(vec![
        Entry::new(
            "AC10",
            "Gauss graph invariants on e3m4, e4m3, e5m2, binary16",
            json!("out-degree 1, every node reaches a cycle, component sizes sum to N"),
            json!(ok),
            all,
            "",
        ),
        Entry::info(
            "AC10-cycles",
            "e3m4 Gauss cycle-length multiset",
            json!([1, 2, 2, 3]),
            json!(multisets),
            format!(
                "round-to-nearest-even; matches the reference with: {}",
                if matches.is_empty() { "none".to_string() } else { matches.join(", ") }
            ),
        ),
    ])
}

/// Worst `max distance / unit roundoff` over `starts`, with counts.
fn shadow_batch(format: FloatFormat, starts: &[usize], max_len: usize) -> Result<(f64, usize, usize, bool)> {
    let g = build_graph(format, MapId::Gauss)?;
    let (mut worst, mut done, mut skipped, mut contract) = (0.0f64, 0, 0, true);
    for &s in starts {
        match shadow_refine_gauss(&g, s, max_len) {
            Ok(r) => {
                worst = worst.max(r.max_distance_units);
                contract &= r.contraction_holds;
                done += 1;
            }
            Err(Error::Unshadowable(_) | Error::InsufficientData(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((worst, done, skipped, contract))
}

pub const AC11_SEED: u64 = 2024;

pub fn ac11() -> Result<Vec<Entry>> {
    let e3 = enumerate_unit_interval(FloatFormat::E3M4)?.len();
    let all: Vec<usize> = (0..e3).collect();
    let a = shadow_batch(FloatFormat::E3M4, &all, 50)?;
    let n16 = enumerate_unit_interval(FloatFormat::BINARY16)?.len();
    let mut rng = ChaCha8Rng::seed_from_u64(AC11_SEED);
    let sample: Vec<usize> = (0..100).map(|_| rng.gen_range(0..n16)).collect();
    let b = shadow_batch(FloatFormat::BINARY16, &sample, 50)?;
    let row = |x: (f64, usize, usize, bool)| json!({ "max_distance_units": x.0, "shadowed": x.1, "skipped": x.2, "contraction_holds": x.3 });
    Ok(vec![
        Entry::new(
            "AC11",
            "Exact Gauss orbits shadow e3m4 (exhaustive) and binary16 (100 samples) pseudo-orbits",
            json!("construction succeeds on every in-domain orbit, contraction at every step"),
            json!({ "e3m4": row(a), "binary16": row(b) }),
            a.3 && b.3 && a.1 > 0 && b.1 > 0,
            format!("orbits of up to 50 points, binary16 starts drawn with ChaCha8 seed {AC11_SEED}"),
        ),
        Entry::info(
            "AC11-bound",
            "Shadow distance in units of the unit roundoff",
            json!("<= 4"),
            json!({ "e3m4": a.0, "binary16": b.0 }),
            if a.0 <= 4.0 && b.0 <= 4.0 { "within the bound" } else { "exceeds the bound" },
        ),
    ])
}

pub fn ac12() -> Result<Entry> {
    let sys = Lorenz::default();
    let mut z = Vec::new();
    let mut ends = Vec::new();
    for tol in [1e-8, 1e-10] {
        let sol = integrate_adaptive(&sys, &lorenz_y0(), 0.0, 50.0, &SolverConfig::tol(tol))?;
        z.push(trajectory_statistics(&sol, (10.0, 50.0), 40, 20000)?.means[2]);
        ends.push(sol.final_state().clone());
    }
    let rel = (z[0] - z[1]).abs() / z[1].abs();
    let gap = ends[0].distance_inf(&ends[1]);
    Ok(Entry::new(
        "AC12",
        "Mean of z on [10, 50] at tolerances 1e-8 and 1e-10",
        json!({ "relative_mean_difference": "<= 0.05", "endpoint_gap": ">= 1" }),
        json!({ "mean_z": z, "relative_mean_difference": rel, "endpoint_gap": gap }),
        rel <= 0.05 && gap >= 1.0,
        "",
    ))
}

pub fn ac13() -> Result<Entry> {
    let eps = 0.01;
    let res = secular_envelope(eps, 1.0, 500.0)?;
    let off = secular_envelope(eps, 2.0, 500.0)?;
    let pass = (res.slope - eps / 2.0).abs() <= 0.1 * eps / 2.0 && off.slope.abs() <= 1e-4;
    Ok(Entry::new(
        "AC13",
        "Envelope slope of the forced oscillator",
        json!({ "resonant": eps / 2.0, "non_resonant": "|slope| <= 1e-4" }),
        json!({ "resonant": res.slope, "non_resonant": off.slope }),
        pass,
        "eps = 0.01 on [0, 500] from rest",
    ))
}

fn informational() -> Result<Vec<Entry>> {
    let h0 = hamiltonian_h0(&HamiltonianState::standard());
    let f = flags(0.1)?;
    Ok(vec![
        Entry::info(
            "H0-start",
            "Henon-Heiles energy at the all-0.12 start",
            json!({ "quoted": "about 0.034" }),
            json!(h0),
            "direct evaluation of the Hamiltonian",
        ),
        Entry::info(
            "AC6-fraction-0.1",
            "Spurious-chaos flags with threshold 0.1 |H0|",
            json!({ "flagged": [true, false, false] }),
            json!({ "h": [HH_H_UNSTABLE, HH_H_STABLE, HH_H_SMALL], "flagged": f }),
            "the stable runs' best drift lies between 0.1 and 0.2 of |H0|, so this threshold flags them too",
        ),
    ])
}

fn run_all() -> Vec<Entry> {
    let single: [(&str, fn() -> Result<Entry>); 11] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC12", ac12),
        ("AC13", ac13),
    ];
    let multi: [(&str, fn() -> Result<Vec<Entry>>); 3] = [("AC10", ac10), ("AC11", ac11), ("info", informational)];
    let failed = |id: &str, e: Error| Entry::new(id, "experiment error", Value::Null, Value::Null, false, e.to_string());
    let mut out = Vec::new();
    for (id, f) in single {
        out.push(f().unwrap_or_else(|e| failed(id, e)));
    }
    for (id, f) in multi {
        match f() {
            Ok(v) => out.extend(v),
            Err(e) => out.push(failed(id, e)),
        }
    }
    let rank = |id: &str| -> (u32, String) {
        let digits: String = id.trim_start_matches("AC").chars().take_while(char::is_ascii_digit).collect();
        (digits.parse().unwrap_or(u32::MAX), id.to_string())
    };
    out.sort_by_key(|e| rank(&e.id));
    out
}

pub fn build_report() -> Report {
    let entries = run_all();
    let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
    Report {
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        informational: count(Status::Informational),
        entries,
    }
}

pub fn to_markdown(report: &Report) -> String {
    let mut s = String::from("# Reproduction report\n\n| id | status | measured | expected | note |\n|---|---|---|---|---|\n");
    for e in &report.entries {
        let status = match e.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Informational => "info",
        };
        let cell = |v: String| v.replace('|', "\\|");
        let _ = writeln!(
            s,
            "| {} | {} | `{}` | `{}` | {} |",
            e.id,
            status,
            cell(e.measured.to_string()),
            cell(e.expected.to_string()),
            cell(e.note.clone())
        );
    }
    let _ = writeln!(
        s,
        "\n{} passed, {} failed, {} informational.",
        report.passed, report.failed, report.informational
    );
    s
}

/// Runs everything and writes `report.json` and `report.md` into `dir`.
pub fn reproduce(dir: &Path) -> Result<Value> {
    std::fs::create_dir_all(dir)?;
    let report = build_report();
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    std::fs::write(dir.join("report.md"), to_markdown(&report))?;
    Ok(json!({
        "command": "reproduce",
        "passed": report.passed,
        "failed": report.failed,
        "informational": report.informational,
        "failed_ids": report.entries.iter().filter(|e| e.status == Status::Fail).map(|e| e.id.clone()).collect::<Vec<_>>(),
        "report": dir.join("report.json").display().to_string(),
    }))
}
