use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::output::{num, svg_plot, write_svg, Csv, Series};
use super::*;
use crate::backward_error::{
    energy_drift_with_threshold, h2_term, h4_term, k_terms, max_residual, modified_euler_rhs, modified_hamiltonian,
    per_step_sample_times, residual_series_at,
};
use crate::chaos_metrics::{
    lyapunov_estimate_with_transient, separation_scaling, separation_time, trajectory_statistics, DisturbanceKind,
    DisturbanceSpec,
};
use crate::error::Result;
use crate::integrators::{integrate_adaptive, integrate_euler_fixed, leapfrog_dkd, DenseSolution, SolverConfig};
use crate::lowprec::FloatFormat;
use crate::orbit_graph::{
    build_graph_with, decompose, export_edges, measure_compare, scaling_report, shadow_refine_gauss, to_dot,
    GraphOptions,
};
use crate::systems::{
    hamiltonian_h0, ForcedOscillator, ForcedOscillatorParams, HamiltonianState, HenonHeiles, Lorenz, LorenzParams,
    Matrix, OdeSystem, StateVector,
};

/// One of the named systems, chosen at run time.
#[derive(Clone, Debug)]
pub enum AnySystem {
    Lorenz(Lorenz),
    HenonHeiles(HenonHeiles),
    ForcedOscillator(ForcedOscillator),
}

impl AnySystem {
    fn inner(&self) -> &dyn OdeSystem {
        match self {
            Self::Lorenz(s) => s,
            Self::HenonHeiles(s) => s,
            Self::ForcedOscillator(s) => s,
        }
    }
}

impl OdeSystem for AnySystem {
    fn dimension(&self) -> usize {
        self.inner().dimension()
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self.inner().rhs(t, y, dy)
    }
    fn has_jacobian(&self) -> bool {
        self.inner().has_jacobian()
    }
    fn jacobian(&self, t: f64, y: &[f64]) -> Option<Matrix> {
        self.inner().jacobian(t, y)
    }
    fn energy(&self, y: &[f64]) -> Option<f64> {
        self.inner().energy(y)
    }
}

impl SystemOpts {
    pub fn build(&self) -> Result<(AnySystem, StateVector)> {
        let (sys, default) = match self.system {
            SystemArg::Lorenz => {
                let p = LorenzParams {
                    sigma: self.sigma,
                    rho: self.rho,
                    beta: self.beta,
                };
                (AnySystem::Lorenz(Lorenz::new(p)), vec![1.0, 0.0, 0.0])
            }
            SystemArg::HenonHeiles => (
                AnySystem::HenonHeiles(HenonHeiles),
                HamiltonianState::standard().to_array().to_vec(),
            ),
            SystemArg::ForcedOscillator => {
                let p = ForcedOscillatorParams::new(self.forcing, self.omega, self.phase)?;
                (AnySystem::ForcedOscillator(ForcedOscillator::new(p)), vec![0.0, 0.0])
            }
        };
        let y0 = StateVector::new(self.y0.clone().unwrap_or(default))?;
        if y0.dim() != sys.dimension() {
            return Err(Error::DimensionMismatch {
                expected: sys.dimension(),
                got: y0.dim(),
            });
        }
        Ok((sys, y0))
    }

    fn label(&self) -> &'static str {
        match self.system {
            SystemArg::Lorenz => "lorenz",
            SystemArg::HenonHeiles => "henon-heiles",
            SystemArg::ForcedOscillator => "forced-oscillator",
        }
    }
}

impl SolveOpts {
    fn config(&self) -> SolverConfig {
        SolverConfig::with_tolerances(self.rtol, self.atol).with_interpolant(self.interpolant.into())
    }
}

impl GraphOpts {
    fn format(&self) -> Result<FloatFormat> {
        self.format.parse()
    }

    fn options(&self) -> GraphOptions {
        GraphOptions {
            mode: self.mode.into(),
            nan_policy: self.nan_policy.into(),
        }
    }
}

fn ok(summary: Value) -> Result<Outcome> {
    Ok(Outcome {
        summary,
        numerical_failure: false,
    })
}

fn state_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Simulate(a) => simulate(&a),
        Command::Residual(a) => residual(&a),
        Command::Lyapunov(a) => lyapunov(&a),
        Command::Separation(a) => separation(&a),
        Command::Leapfrog(a) => leapfrog(&a),
        Command::Energy(a) => energy(&a),
        Command::OrbitGraph(a) => orbit_graph(&a),
        Command::Shadow(a) => shadow(&a),
        Command::Scaling(a) => scaling(&a),
        Command::Stats(a) => stats(&a),
        Command::Reproduce(a) => {
            let summary = reproduce::reproduce(&a.out_dir)?;
            ok(summary)
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let (sys, y0) = a.system.build()?;
    let sol = integrate_adaptive(&sys, &y0, a.solve.t0, a.solve.t_end, &a.solve.config())?;
    let times: Vec<f64> = match a.dt {
        None => sol.skeleton().times.clone(),
        Some(dt) if dt > 0.0 => {
            let n = ((a.solve.t_end - a.solve.t0) / dt).floor() as usize;
            let mut v: Vec<f64> = (0..=n).map(|k| a.solve.t0 + k as f64 * dt).collect();
            if *v.last().unwrap() < a.solve.t_end {
                v.push(a.solve.t_end);
            }
            v
        }
        Some(dt) => return Err(Error::InvalidArgument(format!("dt must be > 0 (got {dt})"))),
    };
    let n = sys.dimension();
    let mut header = vec!["t".to_string()];
    header.extend(state_header("y", n));
    let mut csv = Csv::create(&a.out, &header.iter().map(String::as_str).collect::<Vec<_>>())?;
    let mut buf = vec![0.0; n];
    let (px, py) = projection(n);
    let mut proj = Vec::with_capacity(times.len());
    for &t in &times {
        sol.eval_into(t.min(sol.t_end()), 0, &mut buf)?;
        let mut row = vec![t];
        row.extend_from_slice(&buf);
        csv.floats(&row)?;
        proj.push([buf[px], buf[py]]);
    }
    csv.finish()?;
    if let Some(path) = &a.svg {
        let (xl, yl) = (format!("y{}", px + 1), format!("y{}", py + 1));
        let s = Series { label: a.system.label(), points: &proj, color: "#1f77b4", line: true };
        write_svg(path, &svg_plot("trajectory", &xl, &yl, &[s]))?;
    }
    ok(json!({
        "command": "simulate",
        "system": a.system.label(),
        "steps": sol.skeleton().steps,
        "rejected_steps": sol.skeleton().rejected_steps,
        "t_end": sol.t_end(),
        "final_state": sol.final_state().as_slice(),
        "out": path_str(&a.out),
    }))
}

/// Components shown in 2-D plots: (x, z) for Lorenz, (q1, q2) for
/// Hénon–Heiles, (y, ẏ) otherwise.
fn projection(n: usize) -> (usize, usize) {
    match n {
        3 => (0, 2),
        4 => (2, 3),
        _ => (0, 1.min(n - 1)),
    }
}

fn residual(a: &ResidualArgs) -> Result<Outcome> {
    let (sys, y0) = a.system.build()?;
    let (t0, t1) = (a.solve.t0, a.solve.t_end);
    let write = |sol: &DenseSolution, field: &dyn OdeSystem| -> Result<(f64, f64, usize)> {
        let times = per_step_sample_times(sol, a.samples_per_step);
        let series = residual_series_at(sol, &field, &times)?;
        let n = sol.dim();
        let mut header = vec!["t".to_string()];
        header.extend(state_header("r", n));
        header.push("norm".into());
        let mut csv = Csv::create(&a.out, &header.iter().map(String::as_str).collect::<Vec<_>>())?;
        for i in 0..series.len() {
            let mut row = vec![series.times[i]];
            row.extend_from_slice(series.residuals[i].as_slice());
            row.push(if a.relative { series.relative_norms[i] } else { series.norms[i] });
            csv.floats(&row)?;
        }
        csv.finish()?;
        if let Some(path) = &a.svg {
            let pts: Vec<[f64; 2]> = series.times.iter().zip(&series.norms).map(|(&t, &r)| [t, r]).collect();
            let s = Series { label: "norm", points: &pts, color: "#d62728", line: true };
            write_svg(path, &svg_plot("residual", "t", "|r(t)|", &[s]))?;
        }
        let m = max_residual(sol, &field, a.samples_per_step, a.relative)?;
        Ok((m.value, m.t, sol.skeleton().steps))
    };
    let (max, at, steps) = match (a.method, a.modified_coefficient) {
        (MethodArg::Dp5, None) => {
            let sol = integrate_adaptive(&sys, &y0, t0, t1, &a.solve.config())?;
            write(&sol, &sys)?
        }
        (MethodArg::Dp5, Some(_)) => {
            return Err(Error::InvalidArgument("--modified-coefficient applies to --method euler".into()))
        }
        (MethodArg::Euler, None) => {
            let sol = integrate_euler_fixed(&sys, &y0, t0, t1, a.h)?;
            write(&sol, &sys)?
        }
        (MethodArg::Euler, Some(c)) => {
            let sol = integrate_euler_fixed(&sys, &y0, t0, t1, a.h)?;
            let field = modified_euler_rhs(sys.clone(), a.h, c)?;
            write(&sol.reinterpolate(&field)?, &field)?
        }
    };
    ok(json!({
        "command": "residual",
        "system": a.system.label(),
        "method": match a.method { MethodArg::Dp5 => "dp5", MethodArg::Euler => "euler" },
        "modified_coefficient": a.modified_coefficient,
        "relative": a.relative,
        "steps": steps,
        "max_residual": max,
        "t_at_max": at,
        "out": path_str(&a.out),
    }))
}

fn lyapunov(a: &LyapunovArgs) -> Result<Outcome> {
    let (sys, y0) = a.system.build()?;
    let est = lyapunov_estimate_with_transient(&sys, &y0, a.t_total, a.renorm_interval, a.delta0, a.transient)?;
    ok(json!({
        "command": "lyapunov",
        "system": a.system.label(),
        "lambda": est.lambda,
        "intervals": est.intervals,
        "transient": est.transient,
        "renorm_interval": est.renorm_interval,
        "delta0": est.delta0,
    }))
}

fn parse_seed_pairs(raw: &[String]) -> Result<Vec<[u64; 2]>> {
    raw.iter()
        .map(|p| {
            let bad = || Error::InvalidArgument(format!("seed pair {p:?} is not of the form a:b"));
            let (x, y) = p.split_once(':').ok_or_else(bad)?;
            Ok([x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?])
        })
        .collect()
}

fn separation(a: &SeparationArgs) -> Result<Outcome> {
    let (sys, y0) = a.system.build()?;
    let pairs = parse_seed_pairs(&a.seed_pairs)?;
    let kind = match a.disturbance {
        DisturbanceArg::MultiSine => DisturbanceKind::MultiSine,
        DisturbanceArg::SeededPiecewise => DisturbanceKind::SeededPiecewise,
    };
    let n = sys.dimension();
    if a.epsilons.len() == 1 {
        let eps = a.epsilons[0];
        let [s1, s2] = *pairs.first().ok_or_else(|| Error::InvalidArgument("no seed pair".into()))?;
        let d1 = DisturbanceSpec::new(eps, kind, s1, n)?;
        let d2 = DisturbanceSpec::new(eps, kind, s2, n)?;
        let res = separation_time(&sys, &y0, &d1, &d2, a.threshold, a.horizon)?;
        let mut csv = Csv::create(&a.out, &["t", "gap"])?;
        for p in &res.curve {
            csv.floats(p)?;
        }
        csv.finish()?;
        if let Some(path) = &a.svg {
            let pts: Vec<[f64; 2]> = res.curve.iter().filter(|p| p[1] > 0.0).map(|p| [p[0], p[1].log10()]).collect();
            let s = Series { label: "gap", points: &pts, color: "#2ca02c", line: true };
            write_svg(path, &svg_plot("separation", "t", "log10 gap", &[s]))?;
        }
        return Ok(Outcome {
            summary: json!({
                "command": "separation",
                "epsilon": eps,
                "seeds": [s1, s2],
                "threshold": a.threshold,
                "horizon": a.horizon,
                "separation_time": res.time,
                "status": if res.time.is_some() { "ok" } else { "not-reached" },
                "out": path_str(&a.out),
            }),
            numerical_failure: res.time.is_none(),
        });
    }
    let template = DisturbanceSpec::new(a.epsilons[0], kind, 0, n)?;
    let sc = separation_scaling(&sys, &y0, &template, &a.epsilons, &pairs, a.threshold, a.horizon)?;
    let mut csv = Csv::create(&a.out, &["epsilon", "ln_inv_epsilon", "mean_time", "runs"])?;
    for p in &sc.points {
        csv.fields([num(p.epsilon), num((1.0 / p.epsilon).ln()), num(p.time), p.times.len().to_string()])?;
    }
    csv.finish()?;
    if let Some(path) = &a.svg {
        let pts: Vec<[f64; 2]> = sc.points.iter().map(|p| [(1.0 / p.epsilon).ln(), p.time]).collect();
        let s = Series { label: "mean T", points: &pts, color: "#2ca02c", line: false };
        write_svg(path, &svg_plot("separation scaling", "ln(1/eps)", "T", &[s]))?;
    }
    ok(json!({
        "command": "separation",
        "slope": sc.slope,
        "intercept": sc.intercept,
        "implied_lambda": 1.0 / sc.slope,
        "excluded_runs": sc.excluded.len(),
        "out": path_str(&a.out),
    }))
}

fn hamiltonian_state(v: &[f64]) -> Result<HamiltonianState> {
    if v.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: v.len() });
    }
    Ok(HamiltonianState::from_slice(v))
}

fn leapfrog(a: &LeapfrogArgs) -> Result<Outcome> {
    let s0 = hamiltonian_state(&a.state)?;
    let run = leapfrog_dkd(s0, a.h, a.steps)?;
    let report = energy_drift_with_threshold(&run, &a.orders, a.threshold_fraction)?;
    let mut header = vec!["t", "p1", "p2", "q1", "q2"];
    let names: Vec<String> = a.orders.iter().map(|o| format!("h_order{o}")).collect();
    header.extend(names.iter().map(String::as_str));
    let mut csv = Csv::create(&a.out, &header)?;
    for (t, s) in run.times(0.0).zip(&run.states) {
        let mut row = vec![t];
        row.extend_from_slice(&s.to_array());
        for &o in &a.orders {
            row.push(modified_hamiltonian(s, a.h, o)?);
        }
        csv.floats(&row)?;
    }
    csv.finish()?;
    if let Some(path) = &a.svg {
        let pts: Vec<[f64; 2]> = run.states.iter().map(|s| [s.q1, s.q2]).collect();
        let s = Series { label: "(q1, q2)", points: &pts, color: "#9467bd", line: false };
        write_svg(path, &svg_plot(&format!("leapfrog h = {}", a.h), "q1", "q2", &[s]))?;
    }
    ok(json!({
        "command": "leapfrog",
        "h": a.h,
        "steps": a.steps,
        "initial_energy": report.initial_energy,
        "drift_order0": report.drift_order0,
        "drift_order2": report.drift_order2,
        "drift_order4": report.drift_order4,
        "threshold_fraction": report.threshold_fraction,
        "spurious_chaos": report.spurious_chaos,
        "out": path_str(&a.out),
    }))
}

fn energy(a: &EnergyArgs) -> Result<Outcome> {
    let s = hamiltonian_state(&a.state)?;
    let k = k_terms(&s);
    ok(json!({
        "command": "energy",
        "state": s.to_array(),
        "h": a.h,
        "k_terms": {
            "k1": k.k1, "k2": k.k2, "k4": k.k4, "k5": k.k5,
            "k7": k.k7, "k8": k.k8, "k10": k.k10, "k11": k.k11,
        },
        "h0": hamiltonian_h0(&s),
        "h2": h2_term(&s),
        "h4": h4_term(&s),
        "modified_order0": modified_hamiltonian(&s, a.h, 0)?,
        "modified_order2": modified_hamiltonian(&s, a.h, 2)?,
        "modified_order4": modified_hamiltonian(&s, a.h, 4)?,
    }))
}

fn orbit_graph(a: &OrbitGraphArgs) -> Result<Outcome> {
    let format = a.graph.format()?;
    let graph = build_graph_with(format, a.graph.map.into(), a.graph.options())?;
    let dec = decompose(&graph);
    let measure = measure_compare(&dec, &graph, a.measure.into())?;
    if let Some(p) = &a.edges_out {
        export_edges(&graph, p)?;
    }
    if let Some(p) = &a.dot_out {
        std::fs::write(p, to_dot(&graph)?)?;
    }
    let report = json!({
        "format": format,
        "map": graph.map,
        "nodes": graph.len(),
        "unit_interval_nodes": graph.unit_interval_len(),
        "redirected": graph.redirected.len(),
        "cycle_lengths": dec.cycle_lengths(),
        "cycles_one_based": dec.cycles.iter().map(|c| c.iter().map(|u| u + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "component_sizes": dec.component_sizes,
        "longest_cycle": dec.longest_cycle,
        "longest_transient": dec.longest_transient,
        "measure": measure,
    });
    if let Some(p) = &a.report_out {
        std::fs::write(p, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    ok(json!({
        "command": "orbit-graph",
        "format": format,
        "map": graph.map,
        "nodes": graph.len(),
        "cycles": dec.cycles.len(),
        "cycle_lengths": dec.cycle_lengths(),
        "longest_cycle": dec.longest_cycle,
        "longest_transient": dec.longest_transient,
        "ks_distance": measure.ks_distance,
    }))
}

fn shadow(a: &ShadowArgs) -> Result<Outcome> {
    let format = a.graph.format()?;
    let graph = build_graph_with(format, a.graph.map.into(), a.graph.options())?;
    let starts: Vec<usize> = match (a.start, a.samples) {
        (Some(s), _) if s == 0 => return Err(Error::InvalidArgument("--start is 1-based".into())),
        (Some(s), _) => vec![s - 1],
        (None, 0) => (0..graph.len()).collect(),
        (None, k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..k).map(|_| rng.gen_range(0..graph.unit_interval_len())).collect()
        }
    };
    let mut csv = Csv::create(&a.out, &["start", "length", "max_distance", "max_distance_units", "contraction_holds"])?;
    let (mut shadowed, mut skipped, mut worst, mut all_contract) = (0usize, 0usize, 0.0f64, true);
    for &s in &starts {
        match shadow_refine_gauss(&graph, s, a.max_len) {
            Ok(r) => {
                shadowed += 1;
                worst = worst.max(r.max_distance_units);
                all_contract &= r.contraction_holds;
                csv.fields([
                    (s + 1).to_string(),
                    r.indices.len().to_string(),
                    num(r.max_distance),
                    num(r.max_distance_units),
                    r.contraction_holds.to_string(),
                ])?;
            }
            Err(Error::Unshadowable(_) | Error::InsufficientData(_)) if a.start.is_none() => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    csv.finish()?;
    ok(json!({
        "command": "shadow",
        "format": format,
        "shadowed": shadowed,
        "skipped": skipped,
        "max_distance_units": worst,
        "contraction_holds": all_contract,
        "out": path_str(&a.out),
    }))
}

fn scaling(a: &ScalingArgs) -> Result<Outcome> {
    let formats = a.formats.iter().map(|f| f.parse()).collect::<Result<Vec<FloatFormat>>>()?;
    let options = GraphOptions { mode: a.mode.into(), ..Default::default() };
    let rep = scaling_report(a.map.into(), &formats, options)?;
    let mut csv = Csv::create(&a.out, &["format", "n", "longest_cycle", "longest_transient", "cycle_count"])?;
    for r in &rep.rows {
        csv.fields([
            r.format.to_string(),
            r.n.to_string(),
            r.longest_cycle.to_string(),
            r.longest_transient.to_string(),
            r.cycle_count.to_string(),
        ])?;
    }
    csv.finish()?;
    ok(json!({
        "command": "scaling",
        "map": rep.map,
        "slope": rep.slope,
        "intercept": rep.intercept,
        "out": path_str(&a.out),
    }))
}

fn stats(a: &StatsArgs) -> Result<Outcome> {
    let (sys, y0) = a.system.build()?;
    if a.window.len() != 2 {
        return Err(Error::InvalidArgument("--window takes two values a,b".into()));
    }
    let window = (a.window[0], a.window[1]);
    let sol = integrate_adaptive(&sys, &y0, a.solve.t0, a.solve.t_end, &a.solve.config())?;
    let rep = trajectory_statistics(&sol, window, a.bins, a.samples)?;
    let mut csv = Csv::create(&a.out, &["bin_lo", "bin_hi", "count", "frequency"])?;
    let h = &rep.histogram;
    for i in 0..h.counts.len() {
        csv.fields([num(h.edges[i]), num(h.edges[i + 1]), h.counts[i].to_string(), num(h.frequencies[i])])?;
    }
    csv.finish()?;
    let mut summary = json!({
        "command": "stats",
        "system": a.system.label(),
        "window": rep.window,
        "means": rep.means,
        "std_devs": rep.std_devs,
        "histogram_component": rep.histogram_component + 1,
        "out": path_str(&a.out),
    });
    if let Some(tol) = a.compare_tol {
        let cfg = SolverConfig::tol(tol).with_interpolant(a.solve.interpolant.into());
        let other = integrate_adaptive(&sys, &y0, a.solve.t0, a.solve.t_end, &cfg)?;
        let rep2 = trajectory_statistics(&other, window, a.bins, a.samples)?;
        let rel: Vec<f64> = rep
            .means
            .iter()
            .zip(&rep2.means)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
            .collect();
        summary["compare"] = json!({
            "tol": tol,
            "means": rep2.means,
            "relative_mean_difference": rel,
            "endpoint_difference": sol.final_state().distance_inf(other.final_state()),
        });
    }
    ok(summary)
}
