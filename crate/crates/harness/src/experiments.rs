//! Seeded experiments: coverage, width, timing, predictor, gated, ci, trace.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use betting_ope::ablation::el_asymptotic_ci;
use betting_ope::env::{
    env_suite, maxent_fit, sample_stream, synth_env, MaxEntSpec, SuiteKind, SynthKind, SynthParams,
};
use betting_ope::{
    ci_from_permutations, Config, Decision, GatedCs, Interval, LogSample,
    ProcessKind, RunningIntersection,
};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::ingest::ingest_jsonl;
use crate::method::Method;
use crate::pool::worker_pool;
use crate::report::{CsvOut, Report};
use crate::trace::trace_rows;

/// Runs the configured experiment, writing CSV files and `summary.txt` into
/// `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output).map_err(|e| HarnessError::io(&cfg.output, e))?;
    let report = match cfg.experiment {
        Experiment::Trace => trace(cfg)?,
        Experiment::Coverage => coverage(cfg)?,
        Experiment::Width => width(cfg)?,
        Experiment::Timing => timing(cfg)?,
        Experiment::Predictor => predictor(cfg)?,
        Experiment::Gated => gated(cfg)?,
        Experiment::Ci => ci(cfg)?,
    };
    report.write_summary(&cfg.output)?;
    Ok(report)
}

/// Every interval a streaming method emits over `samples`.
pub fn run_method(cfg: &ExperimentConfig, method: Method, samples: &[LogSample]) -> Result<Vec<Interval>> {
    let mut engine = method.engine(cfg.engine_config()?, cfg.history, cfg.grid_eps)?;
    Ok(betting_ope::run_to_vec(engine.as_mut(), samples)?)
}

/// Log-spaced steps from `min(100, n)` to `n`, without repeats.
pub fn checkpoints(n: usize, count: usize) -> Vec<usize> {
    let first = n.min(100) as f64;
    let last = n as f64;
    let mut out: Vec<usize> = (0..count)
        .map(|k| {
            if count == 1 {
                return n;
            }
            let s = k as f64 / (count - 1) as f64;
            (first.ln() + s * (last.ln() - first.ln())).exp().round() as usize
        })
        .map(|t| t.clamp(1, n))
        .collect();
    out.push(n);
    out.sort_unstable();
    out.dedup();
    out
}

/// Running intersections at each checkpoint.
fn intersected_at(intervals: &[Interval], steps: &[usize]) -> Vec<Interval> {
    let mut run = RunningIntersection::new();
    let mut out = Vec::with_capacity(steps.len());
    let mut next = steps.iter().peekable();
    for (i, iv) in intervals.iter().enumerate() {
        let cur = run.push(*iv);
        while next.peek().is_some_and(|&&t| t == i + 1) {
            out.push(cur);
            next.next();
        }
    }
    out
}

/// First 1-based step at which `truth` leaves the running intersection.
fn first_violation(intervals: &[Interval], truth: f64) -> Option<usize> {
    let mut run = RunningIntersection::new();
    intervals
        .iter()
        .position(|iv| !run.push(*iv).contains(truth))
        .map(|i| i + 1)
}

fn binomial(k: usize, n: usize) -> (f64, f64) {
    let p = k as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

fn fmt_f(x: f64) -> String {
    x.to_string()
}

fn streaming(methods: &[Method]) -> Vec<Method> {
    methods.iter().copied().filter(Method::is_streaming).collect()
}

fn coverage(cfg: &ExperimentConfig) -> Result<Report> {
    let envs = env_suite(SuiteKind::Coverage { n_envs: cfg.n_envs }, cfg.seed)?;
    let methods = streaming(&cfg.methods);
    let pool = worker_pool()?;
    let results: Vec<Vec<(Option<usize>, Interval)>> = pool.install(|| {
        envs.par_iter()
            .enumerate()
            .map(|(i, env)| {
                let samples = sample_stream(&env.dist, cfg.run_seed(i), cfg.samples)?;
                methods
                    .iter()
                    .map(|&m| {
                        let ivs = run_method(cfg, m, &samples)?;
                        let fin = *intersected_at(&ivs, &[ivs.len()]).last().expect("n >= 1");
                        Ok((first_violation(&ivs, env.truth), fin))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut out = CsvOut::create(
        &cfg.output,
        "coverage.csv",
        &["env", "truth", "method", "covered", "first_violation", "final_lo", "final_hi"],
    )?;
    let mut covered = vec![0usize; methods.len()];
    for (i, (env, per)) in envs.iter().zip(&results).enumerate() {
        for (j, (&m, (viol, fin))) in methods.iter().zip(per).enumerate() {
            covered[j] += usize::from(viol.is_none());
            out.row([
                i.to_string(),
                fmt_f(env.truth),
                m.id().to_string(),
                u8::from(viol.is_none()).to_string(),
                viol.map(|t| t.to_string()).unwrap_or_default(),
                fmt_f(fin.lo),
                fmt_f(fin.hi),
            ])?;
        }
    }
    let mut rep = Report::new(Experiment::Coverage);
    rep.line(format!(
        "{} environments x {} samples, alpha = {}",
        envs.len(),
        cfg.samples,
        cfg.alpha
    ));
    for (j, m) in methods.iter().enumerate() {
        let (p, se) = binomial(covered[j], envs.len());
        rep.line(format!(
            "{:<20} time-uniform coverage {:.4} +/- {:.4} ({}/{})",
            m.label(),
            p,
            se,
            covered[j],
            envs.len()
        ));
    }
    rep.file(out.finish()?, true);
    Ok(rep)
}

fn width(cfg: &ExperimentConfig) -> Result<Report> {
    let envs = env_suite(SuiteKind::Width, cfg.seed)?;
    let steps = checkpoints(cfg.samples, cfg.checkpoints);
    let ecfg = cfg.engine_config()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.seeds)
        .flat_map(|s| (0..envs.len()).map(move |e| (s, e)))
        .collect();
    let pool = worker_pool()?;
    let results: Vec<Vec<Vec<Interval>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, e)| {
                let samples = sample_stream(&envs[e].dist, cfg.run_seed(s), cfg.samples)?;
                cfg.methods
                    .iter()
                    .map(|&m| match m {
                        Method::El => steps
                            .iter()
                            .map(|&t| Ok(el_asymptotic_ci(&samples[..t], ecfg)?.interval))
                            .collect::<Result<Vec<_>>>(),
                        _ => Ok(intersected_at(&run_method(cfg, m, &samples)?, &steps)),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut out = CsvOut::create(
        &cfg.output,
        "width.csv",
        &["env", "seed", "method", "t", "lo", "hi", "width", "pointwise_only"],
    )?;
    let mut finals: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (&(s, e), per) in jobs.iter().zip(&results) {
        for (j, (&m, ivs)) in cfg.methods.iter().zip(per).enumerate() {
            for (&t, iv) in steps.iter().zip(ivs) {
                out.row([
                    envs[e].name.clone(),
                    s.to_string(),
                    m.id().to_string(),
                    t.to_string(),
                    fmt_f(iv.lo),
                    fmt_f(iv.hi),
                    fmt_f(iv.width()),
                    u8::from(m == Method::El).to_string(),
                ])?;
            }
            finals
                .entry((e, j))
                .or_default()
                .push(ivs.last().map_or(f64::NAN, Interval::width));
        }
    }
    let mut rep = Report::new(Experiment::Width);
    rep.line(format!(
        "{} seeds x {} samples, alpha = {}; mean width at t = {}",
        cfg.seeds, cfg.samples, cfg.alpha, cfg.samples
    ));
    for (e, env) in envs.iter().enumerate() {
        rep.line(format!("{} (truth {})", env.name, env.truth));
        for (j, m) in cfg.methods.iter().enumerate() {
            let w = &finals[&(e, j)];
            rep.line(format!("  {:<20} {:.5}", m.label(), mean(w)));
        }
    }
    rep.file(out.finish()?, true);
    Ok(rep)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Outcome of a timed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timed {
    pub seconds: f64,
    pub completed: usize,
    pub censored: bool,
}

/// Runs `method` over `samples`, stopping once `budget` is exhausted.
pub fn timed_run(
    cfg: &ExperimentConfig,
    method: Method,
    samples: &[LogSample],
    budget: Option<Duration>,
) -> Result<Timed> {
    let mut engine = method.engine(cfg.engine_config()?, cfg.history, cfg.grid_eps)?;
    let start = Instant::now();
    for (i, s) in samples.iter().enumerate() {
        engine.push(s)?;
        if i % 256 == 255 {
            if let Some(b) = budget {
                if start.elapsed() > b {
                    return Ok(Timed {
                        seconds: start.elapsed().as_secs_f64(),
                        completed: i + 1,
                        censored: true,
                    });
                }
            }
        }
    }
    Ok(Timed {
        seconds: start.elapsed().as_secs_f64(),
        completed: samples.len(),
        censored: false,
    })
}

/// Wall-clock per method on one environment. Methods other than MOPE and
/// `-Vector` are stopped after `censor_factor` times the slower of those two.
fn timing(cfg: &ExperimentConfig) -> Result<Report> {
    let dist = maxent_fit(&MaxEntSpec::standard(cfg.second_moment, cfg.value))?;
    let samples = sample_stream(&dist, cfg.seed, cfg.samples)?;
    let fast = [Method::Mope, Method::Scalar];
    let mut rows: Vec<(Method, usize, Timed)> = Vec::new();
    for &m in cfg.methods.iter().filter(|m| fast.contains(m)) {
        rows.push((m, cfg.samples, timed_run(cfg, m, &samples, None)?));
        if m == Method::Mope && cfg.samples >= 2 {
            let half = &samples[..cfg.samples / 2];
            rows.push((m, half.len(), timed_run(cfg, m, half, None)?));
        }
    }
    let baseline = rows
        .iter()
        .filter(|(_, n, _)| *n == cfg.samples)
        .map(|(_, _, t)| t.seconds)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
    let budget = baseline.map(|b| Duration::from_secs_f64(b * cfg.censor_factor));
    for &m in cfg.methods.iter().filter(|m| !fast.contains(m)) {
        rows.push((m, cfg.samples, timed_run(cfg, m, &samples, budget)?));
    }

    let mut out = CsvOut::create(
        &cfg.output,
        "timing.csv",
        &["method", "n", "seconds", "completed", "censored"],
    )?;
    let mut rep = Report::new(Experiment::Timing);
    rep.line(format!(
        "E[w^2] = {}, V = {}, n = {}; censoring at {}x the slower of MOPE and -Vector",
        cfg.second_moment, cfg.value, cfg.samples, cfg.censor_factor
    ));
    for (m, n, t) in &rows {
        out.row([
            m.id().to_string(),
            n.to_string(),
            format!("{:.6}", t.seconds),
            t.completed.to_string(),
            u8::from(t.censored).to_string(),
        ])?;
        let note = if t.censored {
            format!(" (censored after {} of {n} samples)", t.completed)
        } else {
            String::new()
        };
        rep.line(format!("  {:<20} n = {n:<8} {:.3} s{note}", m.label(), t.seconds));
    }
    rep.file(out.finish()?, false);
    Ok(rep)
}

fn synth_params(cfg: &ExperimentConfig) -> SynthParams {
    SynthParams {
        contexts: cfg.contexts,
        delta: cfg.delta,
        rho: cfg.rho,
        anti_correlated: cfg.anti_correlated,
    }
}

fn predictor(cfg: &ExperimentConfig) -> Result<Report> {
    let env = synth_env(SynthKind::Predictor, synth_params(cfg), cfg.seed)?;
    let truth = env.truth();
    let steps = checkpoints(cfg.samples, cfg.checkpoints);
    let pool = worker_pool()?;
    let results: Vec<Vec<(Vec<Interval>, bool)>> = pool.install(|| {
        (0..cfg.seeds)
            .into_par_iter()
            .map(|s| {
                let samples = env.samples(cfg.run_seed(s), cfg.samples);
                cfg.methods
                    .iter()
                    .map(|&m| {
                        let ivs = run_method(cfg, m, &samples)?;
                        Ok((intersected_at(&ivs, &steps), first_violation(&ivs, truth).is_none()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut out = CsvOut::create(
        &cfg.output,
        "predictor.csv",
        &["seed", "method", "t", "lo", "hi", "width"],
    )?;
    let mut finals = vec![Vec::new(); cfg.methods.len()];
    let mut covered = vec![0usize; cfg.methods.len()];
    for (s, per) in results.iter().enumerate() {
        for (j, (&m, (ivs, cov))) in cfg.methods.iter().zip(per).enumerate() {
            for (&t, iv) in steps.iter().zip(ivs) {
                out.row([
                    s.to_string(),
                    m.id().to_string(),
                    t.to_string(),
                    fmt_f(iv.lo),
                    fmt_f(iv.hi),
                    fmt_f(iv.width()),
                ])?;
            }
            finals[j].push(ivs.last().map_or(f64::NAN, Interval::width));
            covered[j] += usize::from(*cov);
        }
    }
    let mut rep = Report::new(Experiment::Predictor);
    rep.line(format!(
        "rho = {}{}, truth {truth}, {} seeds x {} samples",
        cfg.rho,
        if cfg.anti_correlated { " (anti-correlated)" } else { "" },
        cfg.seeds,
        cfg.samples
    ));
    for (j, m) in cfg.methods.iter().enumerate() {
        rep.line(format!(
            "  {:<20} mean final width {:.5}, covered {}/{}",
            m.label(),
            mean(&finals[j]),
            covered[j],
            cfg.seeds
        ));
    }
    rep.file(out.finish()?, true);
    Ok(rep)
}

struct GatedRun {
    rows: Vec<crate::trace::TraceRow>,
    decision: Option<(Decision, u64)>,
    covered: bool,
    last: Interval,
}

fn gated(cfg: &ExperimentConfig) -> Result<Report> {
    let env = synth_env(SynthKind::Gated, synth_params(cfg), cfg.seed)?;
    let truth = env.truth();
    let ecfg = cfg.engine_config()?;
    let pool = worker_pool()?;
    let runs: Vec<GatedRun> = pool.install(|| {
        (0..cfg.seeds)
            .into_par_iter()
            .map(|s| {
                let samples = env.samples(cfg.run_seed(s), cfg.samples);
                let mut cs = GatedCs::new(ecfg)?;
                let ivs = betting_ope::run_to_vec(&mut cs, &samples)?;
                let run = intersected_at(&ivs, &[ivs.len()]);
                Ok(GatedRun {
                    rows: trace_rows(&ivs, &format!("gated/seed={s}"), cfg.stride),
                    decision: cs.decision(),
                    covered: first_violation(&ivs, truth).is_none(),
                    last: run[0],
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut trace = CsvOut::create(
        &cfg.output,
        "gated_trace.csv",
        &["t", "v_lo", "v_hi", "v_lo_int", "v_hi_int", "method"],
    )?;
    let mut dec = CsvOut::create(
        &cfg.output,
        "gated_decisions.csv",
        &["seed", "decision", "t", "covered", "final_lo", "final_hi"],
    )?;
    let mut deploy_times = Vec::new();
    for (s, r) in runs.iter().enumerate() {
        for row in &r.rows {
            trace.row([
                row.t.to_string(),
                fmt_f(row.v_lo),
                fmt_f(row.v_hi),
                fmt_f(row.v_lo_int),
                fmt_f(row.v_hi_int),
                row.method.clone(),
            ])?;
        }
        let (name, t) = match r.decision {
            Some((Decision::Deploy, t)) => {
                deploy_times.push(t);
                ("deploy", t.to_string())
            }
            Some((Decision::Discard, t)) => ("discard", t.to_string()),
            None => ("none", String::new()),
        };
        dec.row([
            s.to_string(),
            name.to_string(),
            t,
            u8::from(r.covered).to_string(),
            fmt_f(r.last.lo),
            fmt_f(r.last.hi),
        ])?;
    }
    let covering = runs.iter().filter(|r| r.covered).count();
    let mut rep = Report::new(Experiment::Gated);
    rep.line(format!(
        "delta = {truth}, alpha = {}, {} seeds x {} samples",
        cfg.alpha, cfg.seeds, cfg.samples
    ));
    rep.line(format!("  covering runs: {covering}/{}", cfg.seeds));
    rep.line(format!("  deploy decisions: {}/{}", deploy_times.len(), cfg.seeds));
    if !deploy_times.is_empty() {
        deploy_times.sort_unstable();
        rep.line(format!(
            "  deploy time: median {}, max {}",
            deploy_times[deploy_times.len() / 2],
            deploy_times[deploy_times.len() - 1]
        ));
    }
    rep.file(trace.finish()?, true);
    rep.file(dec.finish()?, true);
    Ok(rep)
}

fn load_input(cfg: &ExperimentConfig, ecfg: &Config) -> Result<Vec<LogSample>> {
    match &cfg.input {
        Some(p) => ingest_jsonl(p, ecfg),
        None => {
            let dist = maxent_fit(&MaxEntSpec::standard(cfg.second_moment, cfg.value))?;
            Ok(sample_stream(&dist, cfg.seed, cfg.samples)?)
        }
    }
}

fn ci(cfg: &ExperimentConfig) -> Result<Report> {
    let ecfg = cfg.engine_config()?;
    let batch = load_input(cfg, &ecfg)?;
    let mut out = CsvOut::create(
        &cfg.output,
        "ci.csv",
        &["method", "n", "permutations", "lo", "hi", "pointwise_only"],
    )?;
    let mut rep = Report::new(Experiment::Ci);
    rep.line(format!("batch of {} samples, alpha = {}", batch.len(), cfg.alpha));
    for &m in &cfg.methods {
        let (iv, k, pointwise) = match m {
            Method::El => (el_asymptotic_ci(&batch, ecfg)?.interval, 1, true),
            _ => (
                ci_from_permutations(&batch, ProcessKind::Plain, ecfg, cfg.permutations, cfg.seed)?,
                cfg.permutations,
                false,
            ),
        };
        out.row([
            m.id().to_string(),
            batch.len().to_string(),
            k.to_string(),
            fmt_f(iv.lo),
            fmt_f(iv.hi),
            u8::from(pointwise).to_string(),
        ])?;
        rep.line(format!("  {:<20} {iv}", m.label()));
    }
    rep.file(out.finish()?, true);
    Ok(rep)
}

fn trace(cfg: &ExperimentConfig) -> Result<Report> {
    let ecfg = cfg.engine_config()?;
    let samples = load_input(cfg, &ecfg)?;
    let mut out = CsvOut::create(
        &cfg.output,
        "trace.csv",
        &["t", "v_lo", "v_hi", "v_lo_int", "v_hi_int", "method"],
    )?;
    let mut rep = Report::new(Experiment::Trace);
    rep.line(format!("{} samples, alpha = {}", samples.len(), cfg.alpha));
    for &m in &cfg.methods {
        let ivs = run_method(cfg, m, &samples)?;
        for row in trace_rows(&ivs, m.id(), cfg.stride) {
            out.row([
                row.t.to_string(),
                fmt_f(row.v_lo),
                fmt_f(row.v_hi),
                fmt_f(row.v_lo_int),
                fmt_f(row.v_hi_int),
                row.method,
            ])?;
        }
        if let Some(last) = intersected_at(&ivs, &[ivs.len()]).last() {
            rep.line(format!("  {:<20} final {last}", m.label()));
        }
    }
    rep.file(out.finish()?, true);
    Ok(rep)
}
