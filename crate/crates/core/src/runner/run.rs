//! Executes a manifest. Every table is computed in memory first; files are
//! written only once the whole experiment has succeeded, and only inside the
//! declared output directory.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{AdditiveConfig, DisturbanceConfig, Experiment, Manifest, MethodConfig, StateConfig};
use crate::error::{invalid, Error, Result};
use crate::filter::{eval_filter, high_range_bound, FilterParams};
use crate::fluctuation::{
    additive_measure, fisher_neff, gap_variance_tradeoff, ground_tail_profile, lmg_scaling_fit, AdditiveOperator,
    FisherOptions,
};
use crate::meanfield::mf_deviation_sum;
use crate::models::HamiltonianSpec;
use crate::operator::Letter;
use crate::reversibility::{
    chebyshev_reverse, energy_tail_check, macroscopicity_witness, optimal_local_reverse, LsqOptions, ReverseRow,
    WitnessMethod,
};
use crate::spectral::{ground_state, GroundOptions, GroundSolution};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table held in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Table {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// Results of one experiment before anything is written.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub kind: &'static str,
    pub table: Table,
    /// Kind-specific summary (fits, totals, violation counts).
    pub summary: Value,
}

fn at<T>(coord: impl FnOnce() -> String, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(_) | Error::Experiment { .. } => e,
        other => Error::Experiment {
            at: coord(),
            source: Box::new(other),
        },
    })
}

fn solve(spec: &HamiltonianSpec, kind: &str) -> Result<GroundSolution> {
    at(
        || format!("{kind} model={} n={}: ground state", spec.name(), spec.n_sites()),
        ground_state(spec, &GroundOptions::default()),
    )
}

fn additive_for(cfg: &AdditiveConfig, n: usize) -> Result<AdditiveOperator> {
    let letter = Letter::from_symbol(cfg.letter.to_ascii_uppercase())
        .filter(|l| *l != Letter::I)
        .ok_or_else(|| Error::Config(format!("additive.letter '{}' is not X|Y|Z", cfg.letter)))?;
    let sites = cfg.sites.clone().unwrap_or_else(|| (0..n).collect());
    AdditiveOperator::pauli_sum(n, &sites, letter)
}

/// Runs the experiment without touching the filesystem.
pub fn execute(m: &Manifest) -> Result<RunOutput> {
    let kind = m.experiment.kind();
    let (table, summary) = match &m.experiment {
        Experiment::Reverse {
            model,
            q,
            disturbance,
            methods,
        } => reverse(&model.build()?, q, disturbance, methods)?,
        Experiment::Tail { model, disturbance } => tail(&model.build()?, disturbance)?,
        Experiment::Fluctuation { state, additive, fisher } => fluctuation(state, additive, *fisher, m.seed)?,
        Experiment::LmgScaling { n_list, lambda, gamma, h } => {
            let s = at(
                || format!("lmg_scaling lambda={lambda} gamma={gamma} h={h}"),
                lmg_scaling_fit(n_list, *lambda, *gamma, *h),
            )?;
            let mut t = Table::new(&["N", "deltaE", "variance", "value"]);
            for r in &s.rows {
                t.rows
                    .push(vec![r.n.to_string(), fmt_f64(r.delta_e), fmt_f64(r.variance), fmt_f64(r.value)]);
            }
            (t, json!({ "fits": s.summaries(), "gap_fit": s.gap_fit, "variance_fit": s.variance_fit }))
        }
        Experiment::Meanfield { state, i, l, delta_e } => {
            let p = state.prepare(m.seed)?;
            let n = p.psi.n_sites();
            let l = l.clone().unwrap_or_else(|| (0..n).filter(|j| j != i).collect());
            let gap = delta_e.or(p.model.as_ref().map(|(_, s)| s.gap));
            let d = at(|| format!("meanfield state={} i={i}", p.label), mf_deviation_sum(&p.psi, *i, &l, gap))?;
            let mut t = Table::new(&["j", "norm", "trace_norm"]);
            for term in &d.terms {
                t.rows
                    .push(vec![term.j.to_string(), fmt_f64(term.norm), fmt_f64(term.trace_norm)]);
            }
            (t, json!({ "i": d.i, "sum": d.sum, "scale": d.scale, "L_size": l.len() }))
        }
        Experiment::Macroscopicity {
            state,
            projector,
            q,
            method,
        } => macroscopicity(state, projector, q, *method, m.seed)?,
        Experiment::FilterProfile {
            model,
            q,
            l_size,
            points,
            x_max,
        } => filter_profile(&model.build()?, *q, *l_size, *points, *x_max)?,
    };
    Ok(RunOutput { kind, table, summary })
}

fn reverse(
    spec: &HamiltonianSpec,
    qs: &[usize],
    disturbance: &DisturbanceConfig,
    methods: &[MethodConfig],
) -> Result<(Table, Value)> {
    let sol = solve(spec, "reverse")?;
    let omega = at(|| "reverse: ground state".into(), sol.require_unique())?;
    let dist = at(|| "reverse: disturbance".into(), disturbance.build(omega))?;
    let phi = dist.op.apply(omega)?;
    let grid: Vec<(usize, MethodConfig)> = qs.iter().flat_map(|&q| methods.iter().map(move |&m| (q, m))).collect();
    let rows = grid
        .par_iter()
        .map(|&(q, method)| {
            let coord = || format!("reverse model={} q={q} method={method:?}", spec.name());
            let row = match method {
                MethodConfig::Chebyshev => {
                    let r = at(coord, chebyshev_reverse(spec, &sol, &dist, q))?;
                    ReverseRow::new(spec, &dist, &r, None)
                }
                MethodConfig::Optimal => {
                    let r = at(coord, optimal_local_reverse(omega, &phi, q, &LsqOptions::default()))?;
                    let p = FilterParams::new(q, spec.k(), spec.g(), dist.l_size(), sol.gap).ok();
                    ReverseRow::new(spec, &dist, &r, p.as_ref())
                }
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&ReverseRow::HEADER);
    let violations = rows.iter().filter(|r| r.margin < 0.0).count();
    t.rows = rows.iter().map(ReverseRow::record).collect();
    Ok((t, json!({ "rows": rows.len(), "violations": violations, "gap": sol.gap })))
}

fn tail(spec: &HamiltonianSpec, disturbance: &DisturbanceConfig) -> Result<(Table, Value)> {
    let sol = solve(spec, "tail")?;
    let omega = at(|| "tail: ground state".into(), sol.require_unique())?;
    let dist = at(|| "tail: disturbance".into(), disturbance.build(omega))?;
    let r = at(|| format!("tail model={}", spec.name()), energy_tail_check(spec, omega, &dist))?;
    let mut t = Table::new(&["energy", "weight", "bound", "margin"]);
    for p in &r.points {
        t.rows.push(vec![
            fmt_f64(p.energy),
            fmt_f64(p.weight),
            fmt_f64(p.bound),
            fmt_f64(p.bound - p.weight),
        ]);
    }
    Ok((
        t,
        json!({ "violations": r.violations, "worst_margin": r.worst_margin, "g": r.g, "k": r.k, "L_size": r.l_size }),
    ))
}

fn fluctuation(state: &StateConfig, additive: &AdditiveConfig, fisher: bool, seed: u64) -> Result<(Table, Value)> {
    let p = state.prepare(seed)?;
    let n = p.psi.n_sites();
    let a = additive_for(additive, n)?;
    let coord = || format!("fluctuation state={} n={n}", p.label);
    let m = at(coord, additive_measure(&a, &p.psi))?;
    let mut t = Table::new(&["value", "probability", "cdf"]);
    for (v, pr) in m.values.iter().zip(&m.probabilities) {
        t.rows.push(vec![fmt_f64(*v), fmt_f64(*pr), fmt_f64(m.cdf(*v))]);
    }
    let mut summary = json!({
        "L_size": a.l_size(),
        "mean": m.mean,
        "variance": m.variance,
        "median": m.median,
    });
    if let Some((spec, sol)) = &p.model {
        let tr = at(coord, gap_variance_tradeoff(spec, sol, &a))?;
        let prof = at(coord, ground_tail_profile(sol, &a))?;
        summary["tradeoff"] = serde_json::to_value(&tr)?;
        summary["tail_fit"] = json!({
            "fitted_rate": prof.fitted_rate,
            "reference_rate": prof.reference_rate,
            "fit_window": prof.fit_window,
        });
    }
    if fisher {
        let opts = FisherOptions {
            seed,
            ..Default::default()
        };
        let f = at(coord, fisher_neff(&p.psi, Some(&a), &opts))?;
        summary["fisher"] = json!({
            "F": f.fisher,
            "neff_of_a": f.neff_of_a,
            "neff_lower": f.lower,
            "neff_upper": f.upper,
        });
    }
    Ok((t, summary))
}

fn macroscopicity(
    state: &StateConfig,
    projector: &DisturbanceConfig,
    qs: &[usize],
    method: MethodConfig,
    seed: u64,
) -> Result<(Table, Value)> {
    let p = state.prepare(seed)?;
    let (p_l, _) = at(|| "macroscopicity: projector".into(), projector.operator(&p.psi))?;
    let rows = qs
        .par_iter()
        .map(|&q| {
            let coord = || format!("macroscopicity state={} q={q} method={method:?}", p.label);
            let wm = match method {
                MethodConfig::Chebyshev => match &p.model {
                    Some((spec, ground)) => WitnessMethod::Chebyshev { spec, ground },
                    None => return Err(Error::Config("chebyshev witness needs a ground state".into())),
                },
                MethodConfig::Optimal => WitnessMethod::Optimal(LsqOptions::default()),
            };
            at(coord, macroscopicity_witness(&p.psi, &p_l, q, &wm))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "q",
        "method",
        "alpha",
        "beta",
        "reverse_residual",
        "delta_norm",
        "rigorous_bound",
    ]);
    for w in &rows {
        t.rows.push(vec![
            w.q.to_string(),
            w.method.as_str().to_string(),
            fmt_f64(w.alpha),
            fmt_f64(w.beta),
            fmt_f64(w.reverse_residual),
            fmt_f64(w.delta_norm),
            fmt_f64(w.rigorous_bound.unwrap_or(f64::NAN)),
        ]);
    }
    let within = rows.iter().filter_map(|w| w.within_bound()).all(|b| b);
    Ok((t, json!({ "rows": rows.len(), "within_bound": within })))
}

fn filter_profile(
    spec: &HamiltonianSpec,
    q: usize,
    l_size: usize,
    points: usize,
    x_max: Option<f64>,
) -> Result<(Table, Value)> {
    let sol = solve(spec, "filter_profile")?;
    let params = at(
        || format!("filter_profile model={} q={q}", spec.name()),
        FilterParams::new(q, spec.k(), spec.g(), l_size, sol.gap),
    )?;
    let (lo, hi) = params.window();
    let x_max = x_max.unwrap_or(1.25 * hi);
    if !(x_max > 0.0) || points < 2 {
        return Err(Error::Config("filter_profile needs x_max > 0 and points >= 2".into()));
    }
    let mut t = Table::new(&["x", "F_R", "bound"]);
    for i in 0..points {
        let x = x_max * i as f64 / (points - 1) as f64;
        // no bound is claimed inside the gap
        let bound = if x < lo {
            f64::NAN
        } else if x <= hi {
            params.window_cap()
        } else {
            high_range_bound(&params, x)
        };
        t.rows.push(vec![fmt_f64(x), fmt_f64(eval_filter(&params, x)), fmt_f64(bound)]);
    }
    Ok((t, serde_json::to_value(&params)?))
}

#[derive(Serialize)]
struct Echo<'a> {
    manifest: &'a Manifest,
    kind: &'a str,
    tool_version: &'a str,
    summary: &'a Value,
    files: Vec<String>,
    started_unix: f64,
    elapsed_seconds: f64,
    threads: usize,
}

/// Paths written by a run.
#[derive(Clone, Debug)]
pub struct Written {
    pub csv: PathBuf,
    pub echo: PathBuf,
}

fn safe_stem(stem: &str) -> Result<&str> {
    let ok = !stem.is_empty()
        && stem != "."
        && stem != ".."
        && stem.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if ok {
        Ok(stem)
    } else {
        Err(Error::Config(format!("output.stem '{stem}' must be a plain file name")))
    }
}

/// Runs a manifest and writes `<dir>/<stem>.csv` and
/// `<dir>/<stem>.manifest.json`; relative `dir` resolves against `base`.
pub fn run(m: &Manifest, base: &Path) -> Result<Written> {
    let stem = safe_stem(&m.output.stem)?;
    let start = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let out = execute(m)?;
    let csv = out.table.to_csv()?;
    let dir = base.join(&m.output.dir);
    let csv_path = dir.join(format!("{stem}.csv"));
    let echo_path = dir.join(format!("{stem}.manifest.json"));
    let echo = Echo {
        manifest: m,
        kind: out.kind,
        tool_version: env!("CARGO_PKG_VERSION"),
        summary: &out.summary,
        files: vec![format!("{stem}.csv"), format!("{stem}.manifest.json")],
        started_unix,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
    };
    let echo_bytes = serde_json::to_vec_pretty(&echo)?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&csv_path, csv)?;
    std::fs::write(&echo_path, echo_bytes)?;
    Ok(Written {
        csv: csv_path,
        echo: echo_path,
    })
}

/// Ground-level summary of a model: energies, gap and degeneracy.
pub fn model_spectrum(spec: &HamiltonianSpec) -> Result<Value> {
    let sol = solve(spec, "spectrum")?;
    if sol.ground_states.is_empty() {
        return Err(invalid("solver returned no ground states"));
    }
    Ok(json!({
        "model": spec.name(),
        "n": spec.n_sites(),
        "k": spec.k(),
        "g": spec.g(),
        "ground_energy": sol.energy_shift,
        "gap": sol.gap,
        "degeneracy": sol.degeneracy,
        "solver": format!("{:?}", sol.solver).to_lowercase(),
    }))
}
