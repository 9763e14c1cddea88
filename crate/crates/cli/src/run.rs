//! Experiment dispatch, artifact writing and built-in thresholds.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qfilter_core::field::{random_field, FourierField, Vec3};
use qfilter_core::protocol::{exact_response, SensorConfig};
use qfilter_core::qdyn::default_steps;
use qfilter_core::xprmt::runner::role;
use qfilter_core::xprmt::{
    algebra_report, derive_seed, error_scaling, fit_mean_residual, frequency_sweep, heisenberg_study, resolve_jobs,
    summarize_sweep, write_rows, zero_signal_suite,
};

use crate::config::{Experiment, RunConfig};

pub struct Report {
    pub summary: String,
    pub passed: bool,
    pub dir: PathBuf,
}

struct Outcome {
    data: Vec<u8>,
    spec: Value,
    steps: usize,
    stats: Value,
    summary: String,
    passed: bool,
}

fn rows<T: Serialize>(cfg: &RunConfig, records: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_rows(records, cfg.format(), &mut buf)?;
    Ok(buf)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.sweep_spec();
    let records = frequency_sweep(&spec, cfg.jobs())?;
    let stats = summarize_sweep(&records);
    // Harmonics where the signal has weight are on target.
    let (on, off): (Vec<_>, Vec<_>) = stats.iter().partition(|s| spec.signal.weight_at(s.harmonic) > 0.0);
    let on_min = on.iter().map(|s| s.median).fold(f64::INFINITY, f64::min);
    let off_max = off.iter().map(|s| s.median).fold(0.0, f64::max);
    let failures: usize = stats.iter().map(|s| s.failures).sum();
    let selectivity = on_min / off_max;
    let passed = failures == 0 && (on.is_empty() || off.is_empty() || selectivity >= 1e2);
    Ok(Outcome {
        data: rows(cfg, &records)?,
        spec: serde_json::to_value(&spec)?,
        steps: spec.steps,
        stats: json!({ "per_frequency": stats, "failures": failures }),
        summary: format!(
            "sweep: min on-target median {on_min:.4e}, max off-target median {off_max:.4e}, selectivity {selectivity:.3e} (>= 1e2), {failures} failed trials: {}",
            verdict(passed)
        ),
        passed,
    })
}

fn scaling(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.scaling_spec();
    let (records, summary) = error_scaling(&spec, cfg.jobs())?;
    let fit = if spec.epsilons.len() >= 2 { Some(fit_mean_residual(&summary)?) } else { None };
    let violations = records.iter().filter(|r| r.error.is_empty() && r.in_bound_regime() && r.abs_r > r.bound).count();
    let failures = records.iter().filter(|r| !r.error.is_empty()).count();
    let r2_ok = fit.is_none_or(|f| f.r_squared >= 0.99);
    let passed = violations == 0 && failures == 0 && r2_ok;
    let fit_text = fit.map_or("fit n/a".to_string(), |f| format!("b={:.3e} c={:.3e} R^2={:.5} (>= 0.99)", f.b, f.c, f.r_squared));
    Ok(Outcome {
        data: rows(cfg, &records)?,
        spec: serde_json::to_value(&spec)?,
        steps: spec.steps,
        stats: json!({ "per_epsilon": summary, "fit": fit, "bound_violations": violations, "failures": failures }),
        summary: format!("scaling: {fit_text}, {violations} bound violations, {failures} failed trials: {}", verdict(passed)),
        passed,
    })
}

fn heisenberg(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.heisenberg_spec();
    let res = heisenberg_study(&spec, cfg.jobs())?;
    let fidelity = res.rows.iter().map(|r| r.min_zero_signal_fidelity).fold(f64::INFINITY, f64::min);
    let slope_ok = |s: Option<f64>, tol: f64| s.is_some_and(|v| (v - 2.0).abs() <= tol);
    let show = |s: Option<f64>| s.map_or("undefined".to_string(), |v| format!("{v:.4}"));
    let passed = slope_ok(res.p_slope, 0.15) && slope_ok(res.cfi_slope, 0.2) && fidelity >= 1.0 - 1e-9;
    Ok(Outcome {
        data: rows(cfg, &res.rows)?,
        spec: serde_json::to_value(&spec)?,
        steps: spec.steps,
        stats: json!({ "p_slope": res.p_slope, "cfi_slope": res.cfi_slope, "min_zero_signal_fidelity": fidelity }),
        summary: format!(
            "heisenberg: p(M) slope {} (2.0 +/- 0.15), CFI slope {} (2.0 +/- 0.2), min zero-signal fidelity {fidelity:.12}: {}",
            show(res.p_slope),
            show(res.cfi_slope),
            verdict(passed)
        ),
        passed,
    })
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    x: f64,
    y: f64,
    z: f64,
}

/// Field from JSON (`{period, terms, …}`) or from uniformly spaced samples
/// in a CSV file with columns `x,y,z` (further columns such as `t` are
/// ignored).
fn load_field(path: &Path, period: f64, max_harmonic: u32) -> Result<FourierField> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read field file {}", path.display()))?;
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let samples: Vec<Vec3> = reader
            .deserialize::<SampleRow>()
            .map(|r| r.map(|s| [s.x, s.y, s.z]))
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("invalid sample file {}", path.display()))?;
        Ok(FourierField::from_samples(period, &samples, max_harmonic)?)
    } else {
        let field: FourierField =
            serde_json::from_str(&text).with_context(|| format!("invalid field file {}", path.display()))?;
        Ok(field)
    }
}

#[derive(Debug, Serialize)]
struct DetectRow {
    omega0: f64,
    response: f64,
    bound: f64,
    detected: bool,
    first_order: f64,
    summed_response: f64,
    #[serde(rename = "I_s")]
    i_s: f64,
    #[serde(rename = "I_b")]
    i_b: f64,
}

fn detect(cfg: &RunConfig) -> Result<Outcome> {
    let d = &cfg.detect;
    let signal = match (&d.signal, &d.signal_file) {
        (Some(_), Some(_)) => bail!("detect: give either `signal` or `signal_file`, not both"),
        (Some(f), None) => f.clone(),
        (None, Some(p)) => load_field(p, d.period, d.max_harmonic)?,
        (None, None) => RunConfig::detect_signal_default(),
    };
    let background = match (&d.background, &d.background_file) {
        (Some(_), Some(_)) => bail!("detect: give either `background` or `background_file`, not both"),
        (Some(f), None) => f.clone(),
        (None, Some(p)) => load_field(p, d.period, d.max_harmonic)?,
        (None, None) => random_field(
            derive_seed(cfg.seed(), role::BACKGROUND, 0),
            &d.background_support,
            d.background_epsilon,
            d.period,
        )?,
    };
    let max_k = signal.max_harmonic().max(background.max_harmonic()).max(d.harmonic);
    let steps = d.steps.unwrap_or_else(|| default_steps(max_k));
    let config = SensorConfig::new(d.harmonic, d.period, steps)?;
    let r = exact_response(&signal, &background, &config)?;
    let detected = r.response > r.probability_bound;
    let row = DetectRow {
        omega0: config.omega0,
        response: r.response,
        bound: r.probability_bound,
        detected,
        first_order: r.first_order,
        summed_response: r.summed_response,
        i_s: r.i_s,
        i_b: r.i_b,
    };
    Ok(Outcome {
        data: rows(cfg, std::slice::from_ref(&row))?,
        spec: json!({ "config": config, "signal": signal, "background": background }),
        steps,
        stats: serde_json::to_value(&row)?,
        summary: format!(
            "{}: response {:.6e}, bound {:.6e}",
            if detected { "DETECTED" } else { "NOT-DETECTED" },
            r.response,
            r.probability_bound
        ),
        passed: true,
    })
}

fn check(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.zero_signal_spec();
    let records = zero_signal_suite(&spec, cfg.jobs())?;
    let worst = records.iter().map(|r| r.max_even_probability).fold(0.0, f64::max);
    let algebra = algebra_report(&cfg.check.algebra_n)?;
    let passed = worst <= 1e-10 && algebra.worst() <= 1e-10;
    Ok(Outcome {
        data: rows(cfg, &records)?,
        spec: json!({ "zero_signal": spec, "algebra_n": cfg.check.algebra_n }),
        steps: spec.steps,
        stats: json!({ "max_even_probability": worst, "algebra": algebra }),
        summary: format!(
            "check: max even-parity prob {worst:.3e} (<= 1e-10), max algebra defect {:.3e} (<= 1e-10): {}",
            algebra.worst(),
            verdict(passed)
        ),
        passed,
    })
}

pub fn run(experiment: Experiment, cfg: &RunConfig) -> Result<Report> {
    let dir = cfg.out().join(format!("{}-{}", experiment.name(), cfg.seed()));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let start = Instant::now();
    let outcome = match experiment {
        Experiment::Sweep => sweep(cfg),
        Experiment::Scaling => scaling(cfg),
        Experiment::Heisenberg => heisenberg(cfg),
        Experiment::Detect => detect(cfg),
        Experiment::Check => check(cfg),
    }?;
    let wall = start.elapsed().as_secs_f64();
    let data_name = format!("data.{}", cfg.format().extension());
    let manifest = json!({
        "experiment": experiment.name(),
        "spec": outcome.spec,
        "base_seed": cfg.seed(),
        "integrator": { "scheme": "midpoint exponential product", "steps": outcome.steps },
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": wall,
        "jobs": resolve_jobs(cfg.jobs()),
        "data": data_name,
        "results": outcome.stats,
        "summary": outcome.summary,
        "passed": outcome.passed,
    });
    let write = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| anyhow!("cannot write {}: {e}", path.display()))
    };
    write(&data_name, &outcome.data)?;
    write("manifest.json", format!("{}\n", serde_json::to_string_pretty(&manifest)?).as_bytes())?;
    write("config.toml", cfg.to_toml()?.as_bytes())?;
    Ok(Report { summary: outcome.summary, passed: outcome.passed, dir })
}
