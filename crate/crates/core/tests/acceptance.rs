//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion, then fails if any did.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use hyperfront::commands;
use hyperfront::compare::fit_rate;
use hyperfront::config::RunConfig;
use hyperfront::engine::{entropy_production, Trajectory};
use hyperfront::gas::{self, flux_f, flux_g, SimilarityParams, State};
use hyperfront::riemann::{solve_boundary, solve_interior};
use hyperfront::wave::{integral_curve, shock_point, wave_curve, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type S = State<f64>;

fn params(tau: f64) -> SimilarityParams<f64> {
    SimilarityParams::new(1.4, 0.5, tau).unwrap()
}

fn config(name: &str) -> RunConfig {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(&p).unwrap()
}

fn near_background(rng: &mut ChaCha8Rng, r: f64) -> S {
    S::new(1.0 + rng.gen_range(-r..r), rng.gen_range(-r..r))
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn riemann_round_trip() -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for tau in [0.0, 0.1] {
        let p = params(tau);
        for _ in 0..1000 {
            let (l, r) = (near_background(&mut rng, 0.05), near_background(&mut rng, 0.05));
            match solve_interior(l, r, &p) {
                Ok(f) => {
                    let m = wave_curve(Family::One, f.strengths[0], l, &p).unwrap().state;
                    let back = wave_curve(Family::Two, f.strengths[1], m, &p).unwrap().state;
                    worst = worst.max(back.sup_dist(r));
                }
                Err(_) => failures += 1,
            }
        }
    }
    let dt = t0.elapsed();
    verdict(
        failures == 0 && worst <= 1e-9 && dt < Duration::from_secs(10),
        format!("2000 pairs, worst residual {worst:.2e}, {failures} failures, {dt:.2?}"),
    )
}

fn rankine_hugoniot_and_lax() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut lax_bad) = (0.0f64, 0);
    for tau in [0.0, 0.1] {
        let p = params(tau);
        for i in 0..200 {
            let u = near_background(&mut rng, 0.05);
            let alpha = -rng.gen_range(1e-6..0.05);
            let fam = if i % 2 == 0 { Family::One } else { Family::Two };
            let w = shock_point(fam, alpha, u, &p).unwrap();
            let (gl, gr) = (flux_g(u, &p).unwrap(), flux_g(w.state, &p).unwrap());
            let (fl, fr) = (flux_f(u, &p).unwrap(), flux_f(w.state, &p).unwrap());
            for k in 0..2 {
                worst = worst.max((w.speed * (gr[k] - gl[k]) - (fr[k] - fl[k])).abs());
            }
            let j = fam.index();
            let (ll, lr) = (
                gas::eigenvalues(u, &p).unwrap()[j],
                gas::eigenvalues(w.state, &p).unwrap()[j],
            );
            if !(lr < w.speed && w.speed < ll) {
                lax_bad += 1;
            }
        }
    }
    verdict(
        worst <= 1e-10 && lax_bad == 0,
        format!("400 shocks, worst residual {worst:.2e}, {lax_bad} Lax violations"),
    )
}

fn eigenstructure() -> Verdict {
    let mut worst_bg: f64 = 0.0;
    for tau in [0.0, 0.1, 0.2] {
        let p = params(tau);
        let l = gas::eigenvalues(S::background(), &p).unwrap();
        let exact = 1.0 / (0.25f64 - tau * tau).sqrt();
        worst_bg = worst_bg.max((l[0] + exact).abs()).max((l[1] - exact).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_gn: f64 = 0.0;
    let eps = 1e-5;
    for i in 0..100 {
        let p = params(if i % 2 == 0 { 0.0 } else { 0.1 });
        let u = near_background(&mut rng, 0.05);
        let r = gas::eigenvectors(u, &p).unwrap();
        for k in 0..2 {
            let d = S::new(r[k][0], r[k][1]) * eps;
            let lp = gas::eigenvalues(u + d, &p).unwrap()[k];
            let lm = gas::eigenvalues(u - d, &p).unwrap()[k];
            worst_gn = worst_gn.max(((lp - lm) / (2.0 * eps) - 1.0).abs());
        }
    }
    verdict(
        worst_bg <= 1e-14 && worst_gn <= 1e-6,
        format!("background eigenvalue error {worst_bg:.2e}, worst |grad lambda . r - 1| {worst_gn:.2e}"),
    )
}

fn reflection_coefficient() -> Verdict {
    let mut worst: f64 = 0.0;
    for tau in [0.0, 0.1] {
        let p = params(tau);
        let a2 = 1e-5;
        // weak 2-front arriving at a flat wall; the state above it is the tangent background
        let below = integral_curve(Family::Two, -a2, S::background(), &p).unwrap();
        let b1 = solve_boundary(below, 0.0, &p).unwrap().strength;
        worst = worst.max((b1 / a2 - 1.0).abs());
    }
    verdict(worst <= 1e-4, format!("worst |beta1/alpha2 - 1| {worst:.2e}"))
}

fn tau_squared_scaling() -> Verdict {
    let taus = [0.2, 0.1, 0.05, 0.025];
    let (l, r) = (S::new(1.02, 0.01), S::new(0.99, -0.015));
    let base = solve_interior(l, r, &params(0.0)).unwrap().strengths;
    let interior: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| {
            let a = solve_interior(l, r, &params(t)).unwrap().strengths;
            (t, (a[0] - base[0]).abs().max((a[1] - base[1]).abs()))
        })
        .collect();
    let (u, theta) = (S::new(1.01, 0.02), -0.03);
    let b0 = solve_boundary(u, theta, &params(0.0)).unwrap().strength;
    let boundary: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| (t, (solve_boundary(u, theta, &params(t)).unwrap().strength - b0).abs()))
        .collect();
    let si = fit_rate(&interior).unwrap().slope;
    let sb = fit_rate(&boundary).unwrap().slope;
    verdict(
        (si - 2.0).abs() <= 0.2 && (sb - 2.0).abs() <= 0.2,
        format!("interior slope {si:.4}, boundary slope {sb:.4}"),
    )
}

fn scheme_bounds(runs: &[commands::RunSummary]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in runs {
        let ok = s.max_rarefaction <= s.rarefaction_bound
            && s.max_np_total <= s.np_bound
            && s.glimm_interaction_increases == 0;
        pass &= ok;
        parts.push(format!(
            "tau={} rar {:.2e}/{:.2e} np {:.2e}/{:.2e} glimm+ {}",
            s.tau, s.max_rarefaction, s.rarefaction_bound, s.max_np_total, s.np_bound, s.glimm_interaction_increases
        ));
    }
    verdict(pass, parts.join("; "))
}

fn sweep_rate(rep: &commands::SweepReport, dt: Duration) -> Verdict {
    let s = &rep.summary;
    let slopes_ok = s.per_x.iter().all(|r| (1.7..=2.3).contains(&r.slope));
    let slopes: Vec<String> = s.per_x.iter().map(|r| format!("x={} {:.3}", r.x, r.slope)).collect();
    verdict(
        slopes_ok && s.per_x.len() == 3 && s.max_c_ratio <= 2.0 && dt <= Duration::from_secs(300),
        format!(
            "slopes [{}], max C ratio {:.3}, {dt:.2?}",
            slopes.join(", "),
            s.max_c_ratio
        ),
    )
}

/// Independent small-disturbance shock: Hugoniot locus explicit in rho, eigenvalues and
/// entropy pair in closed form. Returns the orientation sign of `s[E] - [Q]` for admissible shocks.
fn entropy_orientation() -> f64 {
    let (g, a) = (1.4f64, 0.5f64);
    let h = |r: f64| (r.powf(g - 1.0) - 1.0) / ((g - 1.0) * a * a);
    let lam1 = |r: f64, v: f64| v - r.powf(0.2) / a;
    let pair = |r: f64, v: f64| {
        let e = 0.5 * r * v * v + (r.powf(g) - 1.0 - g * (r - 1.0)) / (a * a * g * (g - 1.0));
        (e, 0.5 * r * v * v * v + r * v * h(r))
    };
    let (rl, vl) = (1.0, 0.0);
    for rr in [1.01, 0.99] {
        let dr = rr - rl;
        for sign in [1.0, -1.0] {
            let vr = vl + sign * (2.0 * (h(rr) - h(rl)) * dr / (rr + rl)).sqrt();
            let s = (rr * vr - rl * vl) / dr;
            if lam1(rr, vr) < s && s < lam1(rl, vl) {
                let ((el, ql), (er, qr)) = (pair(rl, vl), pair(rr, vr));
                return (s * (er - el) - (qr - ql)).signum();
            }
        }
    }
    panic!("no Lax-admissible 1-shock found");
}

fn entropy_check(runs: &[&Trajectory]) -> Verdict {
    let sigma = entropy_orientation();
    let (mut shocks, mut bad, mut worst) = (0, 0, f64::INFINITY);
    for t in runs {
        assert_eq!(t.params.tau, 0.0);
        for f in t.fronts.iter().filter(|f| f.is_shock()) {
            shocks += 1;
            let d = sigma * entropy_production(f, &t.params).unwrap();
            worst = worst.min(d);
            if d < 0.0 {
                bad += 1;
            }
        }
    }
    verdict(
        bad == 0 && shocks > 0,
        format!("orientation {sigma:+}, {shocks} shocks, {bad} negative, min oriented production {worst:.2e}"),
    )
}

fn wing(rep: &commands::WingReport, dt: Duration) -> Verdict {
    let s = &rep.summary;
    let ok = s.decay_slope <= -0.3 && (1.2..=1.8).contains(&s.tail_slope) && dt <= Duration::from_secs(600);
    let errs: Vec<String> = s
        .tail_errors
        .iter()
        .map(|e| format!("tau={} {:.3e}", e.tau, e.sup_error))
        .collect();
    verdict(
        ok,
        format!(
            "TV decay slope {:.3}, tail slope {:.3} (sup errors {}), {dt:.2?}",
            s.decay_slope,
            s.tail_slope,
            errs.join(", ")
        ),
    )
}

fn determinism(
    wedge: &RunConfig,
    wing_cfg: &RunConfig,
    sweep: &commands::Outputs,
    wing: &commands::Outputs,
) -> Verdict {
    let (_, a) = commands::cmd_run(wedge).unwrap();
    let (_, b) = commands::cmd_run(wedge).unwrap();
    let (_, s) = commands::cmd_sweep(wedge).unwrap();
    let (_, w) = commands::cmd_wing(wing_cfg).unwrap();
    let same = [a == b, &s == sweep, &w == wing];
    verdict(
        same.iter().all(|&x| x),
        format!("run/run {}, sweep/sweep {}, wing/wing {}", same[0], same[1], same[2]),
    )
}

#[test]
fn acceptance_criteria() {
    let wedge = config("wedge_small.json");
    let wing_cfg = config("wing_lens.json");
    let mut results = vec![
        (1, "Riemann round trip", riemann_round_trip()),
        (2, "Rankine-Hugoniot and Lax", rankine_hugoniot_and_lax()),
        (3, "eigenstructure", eigenstructure()),
        (4, "reflection coefficient", reflection_coefficient()),
        (5, "tau^2 scaling of the solvers", tau_squared_scaling()),
    ];

    let (run_traj, _) = commands::cmd_run(&wedge).unwrap();
    let t0 = Instant::now();
    let (sweep, sweep_out) = commands::cmd_sweep(&wedge).unwrap();
    let sweep_dt = t0.elapsed();
    let mut summaries = vec![commands::summarize(&run_traj, wedge.h)];
    summaries.extend(sweep.runs.iter().cloned());
    results.push((6, "scheme bounds and Glimm", scheme_bounds(&summaries)));
    results.push((7, "sweep rate", sweep_rate(&sweep, sweep_dt)));

    let t0 = Instant::now();
    let (wing_rep, wing_out) = commands::cmd_wing(&wing_cfg).unwrap();
    let wing_dt = t0.elapsed();
    let lh = commands::shared_lambda_hat(&wedge, &[0.0]).unwrap();
    let wedge_zero = commands::simulate(&wedge, 0.0, lh).unwrap();
    let r = &wing_rep.reference;
    results.push((
        8,
        "entropy admissibility",
        entropy_check(&[&wedge_zero, &r.lower, &r.upper_mirrored, &r.tail]),
    ));
    results.push((9, "wing decay and tail rate", wing(&wing_rep, wing_dt)));
    results.push((10, "determinism", determinism(&wedge, &wing_cfg, &sweep_out, &wing_out)));

    for (n, name, v) in &results {
        println!(
            "criterion {n:>2} {}: {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
