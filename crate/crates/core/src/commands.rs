//! The `run`, `compare`, `sweep` and `wing` harnesses. Each returns a report plus the
//! files it would write; nothing touches the disk until [`Outputs::write_to`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::compare::{self, Profile, RateFit};
use crate::config::{GeometrySpec, Regime, RunConfig};
use crate::engine::{self, EngineConfig, EventKind, SeedFront, Start, Trajectory};
use crate::error::{Error, Result};
use crate::gas::SimilarityParams;
use crate::geometry::{self, BoundaryPolyline};
use crate::riemann;

/// Floats in CSV/JSON text: 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Named text files produced by a command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub files: Vec<(String, String)>,
}

impl Outputs {
    fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_str())
    }

    /// Writes every file under a temporary name first, then renames them all.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut staged = Vec::new();
        for (name, body) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            if let Err(e) = fs::write(&tmp, body) {
                for t in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(e.into());
            }
            staged.push(tmp);
        }
        for ((name, _), tmp) in self.files.iter().zip(&staged) {
            fs::rename(tmp, dir.join(name))?;
        }
        Ok(())
    }
}

/// Pool sized by `HYPERFRONT_THREADS` when set.
fn pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HYPERFRONT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("HYPERFRONT_THREADS={v} is not a count")))?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

fn engine_config(
    cfg: &RunConfig,
    p: SimilarityParams<f64>,
    wall: Option<BoundaryPolyline>,
    lambda_hat: f64,
) -> EngineConfig {
    let mut e = EngineConfig::new(p, cfg.nu, wall, cfg.x_end);
    e.seed = cfg.seed;
    e.jitter = cfg.jitter;
    e.lambda_hat = Some(lambda_hat);
    e.max_fronts = cfg.max_fronts;
    e
}

/// Largest λ̂ over the given τ values; overridden by the config.
pub fn shared_lambda_hat(cfg: &RunConfig, taus: &[f64]) -> Result<f64> {
    if let Some(l) = cfg.lambda_hat {
        return Ok(l);
    }
    let mut best: f64 = 0.0;
    for &t in taus {
        best = best.max(riemann::lambda_hat(&cfg.params_at(t)?)?);
    }
    Ok(best)
}

/// One wedge or Cauchy run at `tau`.
pub fn simulate(cfg: &RunConfig, tau: f64, lambda_hat: f64) -> Result<Trajectory> {
    let p = cfg.params_at(tau)?;
    let wall = cfg.wall()?;
    if matches!(cfg.geometry, GeometrySpec::Wing { .. }) {
        return Err(Error::Config("wing geometry needs the wing command".into()));
    }
    let upper = wall.as_ref().map(|w| w.y_at(0.0));
    let data = engine::sample_initial_data(&cfg.initial_data, cfg.nu, upper, &p)?;
    engine::run(&engine_config(cfg, p, wall, lambda_hat), Start::Data(data))
}

/// Moves `x` off every event abscissa of the given runs.
pub fn nudge(mut x: f64, runs: &[&Trajectory]) -> f64 {
    while runs.iter().any(|t| t.events.iter().any(|e| e.x == x)) {
        x += 1e-12;
    }
    x
}

fn query_xs(cfg: &RunConfig) -> Vec<f64> {
    if cfg.query_xs.is_empty() {
        vec![cfg.x_end]
    } else {
        cfg.query_xs.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub tau: f64,
    pub nu: u32,
    pub h: f64,
    pub lambda_hat: f64,
    pub events: usize,
    pub fronts_created: usize,
    pub max_alive: usize,
    pub final_fronts: usize,
    pub max_rarefaction: f64,
    pub rarefaction_bound: f64,
    pub max_np_total: f64,
    pub np_bound: f64,
    pub max_order: u32,
    pub ars_interactions: usize,
    pub srs_interactions: usize,
    pub boundary_hits: usize,
    pub corners: usize,
    pub glimm_initial: f64,
    pub glimm_min: f64,
    pub glimm_max: f64,
    /// Interaction events whose total rose by more than 1e−12.
    pub glimm_interaction_increases: usize,
    pub weights: engine::GlimmWeights,
}

pub fn summarize(t: &Trajectory, h: f64) -> RunSummary {
    let s = t.stats;
    let increases = t
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Interaction { .. }))
        .filter(|e| e.glimm_after.total > e.glimm_before.total + 1e-12)
        .count();
    RunSummary {
        tau: t.params.tau,
        nu: t.nu,
        h,
        lambda_hat: t.lambda_hat,
        events: t.events.len(),
        fronts_created: s.fronts_created,
        max_alive: s.max_alive,
        final_fronts: t.alive_fronts(t.x_end).len(),
        max_rarefaction: s.max_rarefaction,
        rarefaction_bound: 1.0 / t.nu as f64,
        max_np_total: s.max_np_total,
        np_bound: 8.0 * 0.5f64.powi(t.nu as i32),
        max_order: s.max_order,
        ars_interactions: s.ars_interactions,
        srs_interactions: s.srs_interactions,
        boundary_hits: s.boundary_hits,
        corners: s.corners,
        glimm_initial: s.glimm_initial,
        glimm_min: s.glimm_min,
        glimm_max: s.glimm_max,
        glimm_interaction_increases: increases,
        weights: t.weights,
    }
}

pub fn events_csv(t: &Trajectory) -> String {
    let mut out = String::from(
        "event_index,x,kind,incoming_ids,incoming_strengths,outgoing_ids,outgoing_strengths,glimm_before,glimm_after\n",
    );
    let ids = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";");
    let strengths = |v: &[usize]| {
        v.iter()
            .map(|&i| fmt(t.fronts[i].strength))
            .collect::<Vec<_>>()
            .join(";")
    };
    for e in &t.events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            e.index,
            fmt(e.x),
            e.kind.label(),
            ids(&e.incoming),
            strengths(&e.incoming),
            ids(&e.outgoing),
            strengths(&e.outgoing),
            fmt(e.glimm_before.total),
            fmt(e.glimm_after.total)
        );
    }
    out
}

pub fn profiles_csv(t: &Trajectory, xs: &[f64]) -> Result<String> {
    let mut out = String::from("x,y_low,y_high,rho,v,u\n");
    for &x in xs {
        let x = nudge(x, &[t]);
        let pr = t.profile(x);
        let u = compare::reconstruct_u(&pr, &t.params)?;
        let top = pr.upper.unwrap_or(f64::INFINITY);
        for (i, s) in pr.states.iter().enumerate() {
            let lo = if i == 0 {
                pr.support_floor
                    .min(pr.breakpoints.first().copied().unwrap_or(pr.support_floor))
            } else {
                pr.breakpoints[i - 1]
            };
            let hi = pr.breakpoints.get(i).copied().unwrap_or(top);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt(x),
                fmt(lo),
                fmt(hi),
                fmt(s.rho),
                fmt(s.v),
                fmt(u.values[i])
            );
        }
    }
    Ok(out)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn cmd_run(cfg: &RunConfig) -> Result<(Trajectory, Outputs)> {
    let p = cfg.params()?;
    let lh = shared_lambda_hat(cfg, &[p.tau])?;
    let t = simulate(cfg, p.tau, lh)?;
    let mut out = Outputs::default();
    out.add("events.csv", events_csv(&t));
    out.add("profiles.csv", profiles_csv(&t, &query_xs(cfg))?);
    out.add("summary.json", to_json(&summarize(&t, cfg.h)));
    Ok((t, out))
}

/// One row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub x: f64,
    pub l1_rho_v: f64,
    pub l1_u: f64,
    pub l1_total: f64,
    pub tv_tau: f64,
    pub tv_0: f64,
    pub glimm_tau: f64,
    pub glimm_0: f64,
}

fn profile_distance(
    a: &Profile,
    pa: &SimilarityParams<f64>,
    b: &Profile,
    pb: &SimilarityParams<f64>,
) -> Result<(f64, f64)> {
    let d = compare::l1_distance(a, b, None)?;
    let du = compare::l1_distance_scalar(&compare::reconstruct_u(a, pa)?, &compare::reconstruct_u(b, pb)?, None)?;
    Ok((d, du))
}

pub fn compare_runs(a: &Trajectory, b: &Trajectory, xs: &[f64]) -> Result<Vec<ComparisonRow>> {
    xs.iter()
        .map(|&x| {
            let x = nudge(x, &[a, b]);
            let (pa, pb) = (a.profile(x), b.profile(x));
            let (d, du) = profile_distance(&pa, &a.params, &pb, &b.params)?;
            Ok(ComparisonRow {
                x,
                l1_rho_v: d,
                l1_u: du,
                l1_total: d + du,
                tv_tau: pa.total_variation(),
                tv_0: pb.total_variation(),
                glimm_tau: a.glimm(x).total,
                glimm_0: b.glimm(x).total,
            })
        })
        .collect()
}

fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("x,l1_rho_v,l1_u,l1_total,tv_tau,tv_0,glimm_tau,glimm_0\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt(r.x),
            fmt(r.l1_rho_v),
            fmt(r.l1_u),
            fmt(r.l1_total),
            fmt(r.tv_tau),
            fmt(r.tv_0),
            fmt(r.glimm_tau),
            fmt(r.glimm_0)
        );
    }
    out
}

fn scaled_tau(cfg: &RunConfig) -> Result<f64> {
    if cfg.regime == Regime::SmallDisturbance || !(cfg.params.tau > 0.0) {
        return Err(Error::Config("compare needs a scaled config with tau > 0".into()));
    }
    Ok(cfg.params.tau)
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<(Vec<ComparisonRow>, Outputs)> {
    let tau = scaled_tau(cfg)?;
    let lh = shared_lambda_hat(cfg, &[tau, 0.0])?;
    let runs: Vec<Result<Trajectory>> =
        pool()?.install(|| [tau, 0.0].par_iter().map(|&t| simulate(cfg, t, lh)).collect());
    let mut it = runs.into_iter();
    let (a, b) = (it.next().unwrap()?, it.next().unwrap()?);
    let rows = compare_runs(&a, &b, &query_xs(cfg))?;
    let mut out = Outputs::default();
    out.add("comparison.csv", comparison_csv(&rows));
    Ok((rows, out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauError {
    pub tau: f64,
    pub error: f64,
    /// `E / (x τ²)`.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeAtX {
    pub x: f64,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub errors: Vec<TauError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Linearity {
    pub tau: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub per_x: Vec<SlopeAtX>,
    pub x_linearity: Vec<Linearity>,
    pub slope_min: f64,
    pub slope_max: f64,
    pub max_c_ratio: f64,
}

/// Fits the τ-slope at every `x` from `errors[i][j]` = error at `xs[i]`, `taus[j]`.
pub fn summarize_sweep(xs: &[f64], taus: &[f64], errors: &[Vec<f64>]) -> Result<SweepSummary> {
    let mut per_x = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        if !(x > 0.0) {
            continue;
        }
        let pairs: Vec<(f64, f64)> = taus.iter().copied().zip(errors[i].iter().copied()).collect();
        let RateFit {
            slope,
            intercept,
            residual,
        } = compare::fit_rate(&pairs)?;
        let errors = pairs
            .iter()
            .map(|&(tau, error)| TauError {
                tau,
                error,
                c: error / (x * tau * tau),
            })
            .collect();
        per_x.push(SlopeAtX {
            x,
            slope,
            intercept,
            residual,
            errors,
        });
    }
    if per_x.is_empty() {
        return Err(Error::Degenerate("no positive query x".into()));
    }
    let x_linearity: Vec<Linearity> = taus
        .iter()
        .enumerate()
        .map(|(j, &tau)| {
            let cs = per_x.iter().map(|r| r.errors[j].c);
            let c_min = cs.clone().fold(f64::INFINITY, f64::min);
            let c_max = cs.fold(0.0, f64::max);
            Linearity {
                tau,
                c_min,
                c_max,
                ratio: c_max / c_min,
            }
        })
        .collect();
    Ok(SweepSummary {
        slope_min: per_x.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min),
        slope_max: per_x.iter().map(|r| r.slope).fold(f64::NEG_INFINITY, f64::max),
        max_c_ratio: x_linearity.iter().map(|l| l.ratio).fold(0.0, f64::max),
        per_x,
        x_linearity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<(f64, Vec<ComparisonRow>)>,
    pub summary: SweepSummary,
    pub runs: Vec<RunSummary>,
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(SweepReport, Outputs)> {
    if cfg.taus.len() < 3 {
        return Err(Error::Config("sweep needs at least three taus".into()));
    }
    if cfg.regime == Regime::SmallDisturbance {
        return Err(Error::Config("sweep needs the scaled regime".into()));
    }
    let mut all = cfg.taus.clone();
    all.push(0.0);
    let lh = shared_lambda_hat(cfg, &all)?;
    let runs: Vec<Result<Trajectory>> = pool()?.install(|| all.par_iter().map(|&t| simulate(cfg, t, lh)).collect());
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let (reference, scaled) = runs.split_last().unwrap();
    let xs = query_xs(cfg);
    let mut rows = Vec::new();
    for (t, traj) in cfg.taus.iter().zip(scaled) {
        rows.push((*t, compare_runs(traj, reference, &xs)?));
    }
    let errors: Vec<Vec<f64>> = (0..xs.len())
        .map(|i| rows.iter().map(|r| r.1[i].l1_total).collect())
        .collect();
    let summary = summarize_sweep(&xs, &cfg.taus, &errors)?;

    let mut csv = String::from("tau,x,l1_rho_v,l1_u,l1_total,c\n");
    for (tau, rs) in &rows {
        for r in rs {
            let c = if r.x > 0.0 {
                r.l1_total / (r.x * tau * tau)
            } else {
                f64::NAN
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt(*tau),
                fmt(r.x),
                fmt(r.l1_rho_v),
                fmt(r.l1_u),
                fmt(r.l1_total),
                fmt(c)
            );
        }
    }
    let run_summaries: Vec<RunSummary> = runs.iter().map(|t| summarize(t, cfg.h)).collect();
    let mut out = Outputs::default();
    out.add("sweep.csv", csv);
    out.add(
        "slope.json",
        to_json(&json!({ "summary": &summary, "runs": &run_summaries })),
    );
    Ok((
        SweepReport {
            rows,
            summary,
            runs: run_summaries,
        },
        out,
    ))
}

/// Wing run at one τ: two half problems glued at the trailing edge, then the Cauchy tail.
#[derive(Debug, Clone)]
pub struct WingRun {
    pub tau: f64,
    pub lower: Trajectory,
    pub upper_mirrored: Trajectory,
    pub tail: Trajectory,
}

impl WingRun {
    /// Full-line profile at `x ≥ ℓ_w`.
    pub fn profile(&self, x: f64) -> Profile {
        self.tail.profile(x)
    }
}

pub fn simulate_wing(cfg: &RunConfig, tau: f64, lambda_hat: f64, x_tail: f64) -> Result<WingRun> {
    let w = cfg
        .geometry
        .wing()
        .ok_or_else(|| Error::Config("wing command needs a wing geometry".into()))?;
    let halves = geometry::wing_to_half_problems(&w, cfg.h)?;
    let p = cfg.params_at(tau)?;
    let l = halves.trailing_edge;
    let half = |wall: BoundaryPolyline, data: &engine::InitialData, seed: u64| -> Result<Trajectory> {
        let mut e = engine_config(cfg, p, Some(wall), lambda_hat);
        e.x_end = l;
        e.seed = seed;
        let d = engine::sample_initial_data(data, cfg.nu, Some(0.0), &p)?;
        engine::run(&e, Start::Data(d))
    };
    let lower = half(halves.lower.clone(), &cfg.initial_data, cfg.seed)?;
    // a mirror-symmetric wing would otherwise replay identical event abscissae in both halves
    let upper_seed = cfg.seed ^ 0x9e37_79b9_7f4a_7c15;
    let upper_mirrored = half(halves.upper_mirrored.clone(), &cfg.initial_data.mirrored(), upper_seed)?;

    let mut fronts = Start::fronts_of(&lower, l);
    let below = fronts.last().map_or(lower.bottom, |f| f.right);
    let above = upper_mirrored
        .alive_fronts(l)
        .last()
        .map_or(upper_mirrored.bottom, |f| f.right)
        .mirrored();
    if below != above {
        fronts.push(SeedFront {
            kind: None,
            strength: 0.0,
            left: below,
            right: above,
            speed: 0.0,
            order: 1,
            y: 0.0,
        });
    }
    fronts.extend(Start::mirrored_fronts(&upper_mirrored, l));
    let mut e = engine_config(cfg, p, None, lambda_hat);
    e.x_start = l;
    e.x_end = x_tail;
    let floor = lower.support_floor(l) + 1.0;
    let tail = engine::run(
        &e,
        Start::Fronts {
            bottom: lower.bottom,
            fronts,
            floor,
        },
    )?;
    Ok(WingRun {
        tau,
        lower,
        upper_mirrored,
        tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub tau: f64,
    pub slope: f64,
    pub residual: f64,
    pub x_from: f64,
    pub x_to: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailError {
    pub tau: f64,
    pub sup_error: f64,
    pub x_at_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WingSummary {
    pub decay: Vec<DecayFit>,
    /// Decay slope of the longest scaled run (smallest τ).
    pub decay_slope: f64,
    pub tail_errors: Vec<TailError>,
    pub tail_slope: f64,
    pub tail_intercept: f64,
    pub tail_residual: f64,
}

const WING_SAMPLES: usize = 40;

fn sample_xs(from: f64, to: f64) -> Vec<f64> {
    (1..=WING_SAMPLES)
        .map(|k| from + (to - from) * k as f64 / WING_SAMPLES as f64)
        .collect()
}

/// Log-log slope of the total variation over `[2ℓ, x_to]`.
fn decay_fit(run: &Trajectory, tau: f64, l: f64, x_to: f64) -> Result<DecayFit> {
    let x_from = 2.0 * l;
    let pts: Vec<(f64, f64)> = sample_xs(x_from, x_to)
        .into_iter()
        .map(|x| {
            let x = nudge(x, &[run]);
            (x, run.profile(x).total_variation())
        })
        .filter(|p| p.1 > 0.0)
        .collect();
    if pts.len() < 3 || !(x_to > x_from) {
        return Ok(DecayFit {
            tau,
            slope: 0.0,
            residual: 0.0,
            x_from,
            x_to,
        });
    }
    let f = compare::fit_rate(&pts)?;
    Ok(DecayFit {
        tau,
        slope: f.slope,
        residual: f.residual,
        x_from,
        x_to,
    })
}

#[derive(Debug, Clone)]
pub struct WingReport {
    pub runs: Vec<WingRun>,
    pub reference: WingRun,
    pub summary: WingSummary,
}

pub fn cmd_wing(cfg: &RunConfig) -> Result<(WingReport, Outputs)> {
    let w = cfg
        .geometry
        .wing()
        .ok_or_else(|| Error::Config("wing command needs a wing geometry".into()))?;
    if cfg.taus.len() < 3 {
        return Err(Error::Config("wing needs at least three taus".into()));
    }
    let l = w.chord;
    let horizon = |t: f64| cfg.tail_constant / t;
    if cfg.taus.iter().any(|&t| horizon(t) <= l) {
        return Err(Error::Config("tail horizon c/tau must exceed the chord".into()));
    }
    let mut all = cfg.taus.clone();
    all.push(0.0);
    let lh = shared_lambda_hat(cfg, &all)?;
    let x_max = cfg.taus.iter().map(|&t| horizon(t)).fold(0.0, f64::max);
    let runs: Vec<Result<WingRun>> = pool()?.install(|| {
        all.par_iter()
            .map(|&t| simulate_wing(cfg, t, lh, if t > 0.0 { horizon(t) } else { x_max }))
            .collect()
    });
    let mut runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let reference = runs.pop().unwrap();

    let mut decay_csv = String::from("tau,x,tv\n");
    let mut tail_csv = String::from("tau,x,l1_rho_v,l1_u,l1_total\n");
    let mut decay = Vec::new();
    let mut tail_errors = Vec::new();
    for run in runs.iter().chain(std::iter::once(&reference)) {
        let to = if run.tau > 0.0 { horizon(run.tau) } else { x_max };
        for x in sample_xs(l, to) {
            let x = nudge(x, &[&run.tail]);
            let _ = writeln!(
                decay_csv,
                "{},{},{}",
                fmt(run.tau),
                fmt(x),
                fmt(run.profile(x).total_variation())
            );
        }
        decay.push(decay_fit(&run.tail, run.tau, l, to)?);
    }
    for run in &runs {
        let mut sup = TailError {
            tau: run.tau,
            sup_error: 0.0,
            x_at_sup: l,
        };
        for x in sample_xs(l, horizon(run.tau)) {
            let x = nudge(x, &[&run.tail, &reference.tail]);
            let (d, du) = profile_distance(
                &run.profile(x),
                &run.tail.params,
                &reference.profile(x),
                &reference.tail.params,
            )?;
            let _ = writeln!(
                tail_csv,
                "{},{},{},{},{}",
                fmt(run.tau),
                fmt(x),
                fmt(d),
                fmt(du),
                fmt(d + du)
            );
            if d + du > sup.sup_error {
                sup = TailError {
                    tau: run.tau,
                    sup_error: d + du,
                    x_at_sup: x,
                };
            }
        }
        tail_errors.push(sup);
    }
    let smallest = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.tau.total_cmp(&b.1.tau))
        .map(|(i, _)| i)
        .unwrap();
    let fit = if tail_errors.iter().all(|e| e.sup_error > 0.0) {
        compare::fit_rate(&tail_errors.iter().map(|e| (e.tau, e.sup_error)).collect::<Vec<_>>())?
    } else {
        RateFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            residual: f64::NAN,
        }
    };
    let summary = WingSummary {
        decay_slope: decay[smallest].slope,
        decay,
        tail_errors,
        tail_slope: fit.slope,
        tail_intercept: fit.intercept,
        tail_residual: fit.residual,
    };
    let mut out = Outputs::default();
    out.add("decay.csv", decay_csv);
    out.add("tail_error.csv", tail_csv);
    out.add("slope.json", to_json(&summary));
    Ok((
        WingReport {
            runs,
            reference,
            summary,
        },
        out,
    ))
}
