use std::path::{Path, PathBuf};

use hyperfront::commands::{self, Outputs};
use hyperfront::config::RunConfig;

fn config(name: &str) -> RunConfig {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(&p).unwrap()
}

fn rows<'a>(out: &'a Outputs, file: &str) -> (Vec<&'a str>, Vec<Vec<f64>>) {
    let mut lines = out.get(file).unwrap().lines();
    let header = lines.next().unwrap().split(',').collect();
    let body = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, body)
}

#[test]
fn wedge_comparison_baseline() {
    let (rows, out) = commands::cmd_compare(&config("wedge_small.json")).unwrap();
    assert_eq!(rows.len(), 3);
    let at1 = rows.iter().find(|r| (r.x - 1.0).abs() < 1e-9).unwrap();
    assert!(at1.l1_total.is_finite() && at1.l1_total > 0.0);
    assert!(
        (at1.l1_total / 1.68770955503769e-2 - 1.0).abs() < 1e-9,
        "{}",
        at1.l1_total
    );
    let (header, body) = self::rows(&out, "comparison.csv");
    assert_eq!(
        header,
        [
            "x",
            "l1_rho_v",
            "l1_u",
            "l1_total",
            "tv_tau",
            "tv_0",
            "glimm_tau",
            "glimm_0"
        ]
    );
    for r in body {
        assert!((r[1] + r[2] - r[3]).abs() <= 1e-15 * r[3].max(1.0));
    }
}

#[test]
fn run_outputs_are_consistent() {
    let cfg = config("wedge_small.json");
    let (t, out) = commands::cmd_run(&cfg).unwrap();
    let events = out.get("events.csv").unwrap();
    let mut n = 0;
    for line in events.lines().skip(1) {
        let c: Vec<&str> = line.split(',').collect();
        assert_eq!(c.len(), 9);
        assert!(["interaction_ars", "interaction_srs", "boundary_hit", "corner"].contains(&c[2]));
        let (before, after): (f64, f64) = (c[7].parse().unwrap(), c[8].parse().unwrap());
        if c[2].starts_with("interaction") {
            assert!(after <= before + 1e-12, "{line}");
        }
        n += 1;
    }
    assert_eq!(n, t.events.len());
    assert!(events.lines().filter(|l| l.contains(",corner,")).count() == 2);

    let (header, body) = rows(&out, "profiles.csv");
    assert_eq!(header, ["x", "y_low", "y_high", "rho", "v", "u"]);
    for w in body.windows(2) {
        if w[0][0] == w[1][0] {
            assert_eq!(w[0][2], w[1][1], "intervals must tile");
        }
    }
    let s: serde_json::Value = serde_json::from_str(out.get("summary.json").unwrap()).unwrap();
    for key in [
        "fronts_created",
        "max_rarefaction",
        "max_np_total",
        "glimm_min",
        "glimm_max",
    ] {
        assert!(s.get(key).is_some(), "{key}");
    }
}

#[test]
fn small_disturbance_regime_runs_at_zero_tau() {
    let mut cfg = config("wedge_small.json");
    cfg.regime = hyperfront::config::Regime::SmallDisturbance;
    cfg.x_end = 0.5;
    cfg.query_xs = vec![0.5];
    let (t, _) = commands::cmd_run(&cfg).unwrap();
    assert_eq!(t.params.tau, 0.0);
    assert!(commands::cmd_compare(&cfg).is_err());
}

#[test]
fn sweep_schema() {
    let mut cfg = config("wedge_small.json");
    cfg.x_end = 1.0;
    cfg.query_xs = vec![0.5, 1.0];
    cfg.taus = vec![0.2, 0.1, 0.05];
    let (rep, out) = commands::cmd_sweep(&cfg).unwrap();
    let (header, body) = rows(&out, "sweep.csv");
    assert_eq!(header, ["tau", "x", "l1_rho_v", "l1_u", "l1_total", "c"]);
    assert_eq!(body.len(), 6);
    let j: serde_json::Value = serde_json::from_str(out.get("slope.json").unwrap()).unwrap();
    let per_x = j["summary"]["per_x"].as_array().unwrap();
    assert_eq!(per_x.len(), 2);
    for r in per_x {
        assert!(r["residual"].is_number());
        assert_eq!(r["errors"].as_array().unwrap().len(), 3);
    }
    assert_eq!(rep.runs.len(), 4);
    cfg.taus.pop();
    assert!(commands::cmd_sweep(&cfg).is_err());
}

#[test]
fn wing_outputs() {
    let cfg = config("wing_lens.json");
    let (rep, out) = commands::cmd_wing(&cfg).unwrap();
    let (header, body) = rows(&out, "decay.csv");
    assert_eq!(header, ["tau", "x", "tv"]);
    assert!(body.iter().all(|r| r[2] > 0.0));
    let (header, body) = rows(&out, "tail_error.csv");
    assert_eq!(header, ["tau", "x", "l1_rho_v", "l1_u", "l1_total"]);
    assert!(body
        .iter()
        .all(|r| r[1] > 1.0 && r[1] <= cfg.tail_constant / r[0] + 1e-9));
    // the symmetric lens gives a flow symmetric about the chord line
    let x = commands::nudge(3.0, &[&rep.reference.tail]);
    let p = rep.reference.profile(x);
    assert!((p.total_variation() - p.mirrored().total_variation()).abs() < 1e-12);
    assert_eq!(
        rep.reference.lower.events.len(),
        rep.reference.upper_mirrored.events.len()
    );
}
