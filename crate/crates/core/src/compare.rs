//! Piecewise-constant profiles, exact `L¹` distances and rate fitting.

use serde::Serialize;

use crate::engine::Trajectory;
use crate::error::{Error, Result};
use crate::gas::{self, SimilarityParams, State};
use crate::riemann;

type S = State<f64>;

/// Piecewise-constant function of `y` with the wall (if any) on top.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub breakpoints: Vec<f64>,
    /// `states[i]` holds on `(breakpoints[i-1], breakpoints[i])`.
    pub states: Vec<S>,
    pub background: S,
    pub support_floor: f64,
    /// Wall height; `None` on the whole line.
    pub upper: Option<f64>,
}

impl Profile {
    /// Zero-width intervals are dropped.
    pub fn new(
        breakpoints: Vec<f64>,
        states: Vec<S>,
        background: S,
        support_floor: f64,
        upper: Option<f64>,
    ) -> Result<Self> {
        if states.len() != breakpoints.len() + 1 {
            return Err(Error::Degenerate(
                "profile needs one more state than breakpoints".into(),
            ));
        }
        let mut bp = Vec::with_capacity(breakpoints.len());
        let mut st = Vec::with_capacity(states.len());
        st.push(states[0]);
        for (i, &y) in breakpoints.iter().enumerate() {
            match bp.last() {
                Some(&last) if y < last => {
                    return Err(Error::Degenerate(format!("breakpoints decrease at {y}")));
                }
                Some(&last) if y == last => {
                    *st.last_mut().unwrap() = states[i + 1];
                }
                _ => {
                    bp.push(y);
                    st.push(states[i + 1]);
                }
            }
        }
        // drop jumps between equal states
        let mut k = 0;
        while k < bp.len() {
            if st[k] == st[k + 1] {
                bp.remove(k);
                st.remove(k + 1);
            } else {
                k += 1;
            }
        }
        Ok(Self {
            breakpoints: bp,
            states: st,
            background,
            support_floor,
            upper,
        })
    }

    pub fn constant(state: S, upper: Option<f64>) -> Self {
        Self {
            breakpoints: Vec::new(),
            states: vec![state],
            background: state,
            support_floor: 0.0,
            upper,
        }
    }

    pub fn value_at(&self, y: f64) -> S {
        self.states[self.breakpoints.partition_point(|&b| b <= y)]
    }

    pub fn top(&self) -> S {
        *self.states.last().unwrap()
    }

    /// Variation in the `|Δρ| + |Δv|` norm.
    pub fn total_variation(&self) -> f64 {
        self.states.windows(2).map(|w| w[0].abs_dist(w[1])).sum()
    }

    /// Reflection `y ↦ −y`, `v ↦ −v`.
    pub fn mirrored(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().rev().map(|y| -y).collect(),
            states: self.states.iter().rev().map(|s| s.mirrored()).collect(),
            background: self.top().mirrored(),
            support_floor: self.upper.map_or(f64::NEG_INFINITY, |u| -u),
            upper: None,
        }
    }
}

/// Joins a lower-half trace and a reflected upper-half trace along `y = 0`.
pub fn glue(lower: &Profile, upper_mirrored: &Profile) -> Result<Profile> {
    let up = upper_mirrored.mirrored();
    let mut bp: Vec<f64> = lower.breakpoints.iter().copied().filter(|&y| y < 0.0).collect();
    let mut st: Vec<S> = lower.states[..=bp.len()].to_vec();
    bp.push(0.0);
    let skip = up.breakpoints.partition_point(|&y| y <= 0.0);
    bp.extend(&up.breakpoints[skip..]);
    st.extend(&up.states[skip..]);
    Profile::new(bp, st, lower.background, lower.support_floor, None)
}

/// Scalar piecewise-constant profile (e.g. the axial velocity).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarProfile {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub upper: Option<f64>,
}

pub fn reconstruct_u(pr: &Profile, p: &SimilarityParams<f64>) -> Result<ScalarProfile> {
    let values = pr
        .states
        .iter()
        .map(|&s| gas::axial_velocity(s, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarProfile {
        breakpoints: pr.breakpoints.clone(),
        values,
        upper: pr.upper,
    })
}

/// `∫ diff(i, j)` over `(−∞, upper]` where `i, j` index the intervals of the two partitions.
fn merged_integral(a: &[f64], b: &[f64], upper: f64, diff: impl Fn(usize, usize) -> f64) -> Result<f64> {
    let mut ys: Vec<f64> = a.iter().chain(b).copied().filter(|&y| y < upper).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    if ys.is_empty() {
        return Ok(0.0);
    }
    let tail = diff(
        a.partition_point(|&v| v <= ys[ys.len() - 1]),
        b.partition_point(|&v| v <= ys[ys.len() - 1]),
    );
    let head = diff(0, 0);
    if head != 0.0 {
        return Err(Error::BackgroundMismatch);
    }
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    for w in ys.windows(2) {
        while i < a.len() && a[i] <= w[0] {
            i += 1;
        }
        while j < b.len() && b[j] <= w[0] {
            j += 1;
        }
        sum += diff(i, j) * (w[1] - w[0]);
    }
    if tail != 0.0 {
        if upper.is_infinite() {
            return Err(Error::BackgroundMismatch);
        }
        sum += tail * (upper - ys[ys.len() - 1]);
    }
    Ok(sum)
}

fn common_upper(a: Option<f64>, b: Option<f64>, upper: Option<f64>) -> f64 {
    [a, b, upper].into_iter().flatten().fold(f64::INFINITY, f64::min)
}

/// Exact `∫_{−∞}^{upper} |Δρ| + |Δv| dy`; `upper` defaults to the lower of the two walls.
pub fn l1_distance(pa: &Profile, pb: &Profile, upper: Option<f64>) -> Result<f64> {
    if pa.background.abs_dist(pb.background) > 1e-14 {
        return Err(Error::BackgroundMismatch);
    }
    let top = common_upper(pa.upper, pb.upper, upper);
    merged_integral(&pa.breakpoints, &pb.breakpoints, top, |i, j| {
        pa.states[i].abs_dist(pb.states[j])
    })
}

/// `l1_distance` on the common domain plus the strip between two different walls.
pub fn l1_distance_aligned(pa: &Profile, pb: &Profile) -> Result<f64> {
    let core = l1_distance(pa, pb, None)?;
    let strip = match (pa.upper, pb.upper) {
        (Some(a), Some(b)) => (a - b).abs() * pa.top().abs_dist(pb.top()),
        _ => 0.0,
    };
    Ok(core + strip)
}

pub fn l1_distance_scalar(pa: &ScalarProfile, pb: &ScalarProfile, upper: Option<f64>) -> Result<f64> {
    let top = common_upper(pa.upper, pb.upper, upper);
    merged_integral(&pa.breakpoints, &pb.breakpoints, top, |i, j| {
        (pa.values[i] - pb.values[j]).abs()
    })
}

/// `(1/s)‖P₀(x+s, x) U^{(τ)}(x) − U^{(τ)}(x+s)‖`: every front of `traj` at `x` is re-solved
/// under `p0` and moved with the resulting speeds (plus the front's own jitter) for a step `s`.
pub fn local_step_error(traj: &Trajectory, p0: &SimilarityParams<f64>, x: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Degenerate("step must be positive".into()));
    }
    if let Some(e) = traj.events.iter().find(|e| e.x > x && e.x <= x + s) {
        return Err(Error::EventInWindow(e.x));
    }
    let nu = traj.nu;
    let x1 = x + s;
    // (position at x1, speed for ordering, left, right)
    let mut pieces: Vec<(f64, f64, S, S)> = Vec::new();
    for f in traj.alive_fronts(x) {
        let fan = riemann::solve_interior(f.left, f.right, p0)?;
        let jitter = f.speed - f.nominal_speed;
        let y = f.y_at(x);
        let strong: Vec<_> = fan.waves.iter().filter(|w| w.strength.abs() >= 1e-12).collect();
        if strong.len() <= 1 {
            let speed = strong.first().map_or(f.nominal_speed, |w| w.speed) + jitter;
            pieces.push((y + speed * s, speed, f.left, f.right));
            continue;
        }
        for w in riemann::ars_fronts(&fan.waves, nu, p0)? {
            let speed = w.speed + jitter;
            pieces.push((y + speed * s, speed, w.left, w.right));
        }
    }
    let top = pieces.last().map_or(traj.bottom, |q| q.3);
    if let Some(wall) = traj.wall.as_ref() {
        let bf = riemann::solve_boundary(top, wall.angle_at(x), p0)?;
        let y = wall.y_at(x);
        for w in riemann::ars_fronts(&bf.waves, nu, p0)? {
            pieces.push((y + w.speed * s, w.speed, w.left, w.right));
        }
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut prev = traj.bottom;
    for q in &pieces {
        if q.2 != prev {
            return Err(Error::EventInWindow(x1));
        }
        prev = q.3;
    }
    let mut states = vec![traj.bottom];
    states.extend(pieces.iter().map(|q| q.3));
    let reference = Profile::new(
        pieces.iter().map(|q| q.0).collect(),
        states,
        traj.bottom,
        traj.support_floor(x1),
        traj.wall.as_ref().map(|w| w.y_at(x1)),
    )?;
    Ok(l1_distance(&traj.profile(x1), &reference, None)? / s)
}

/// Least-squares line through `(log τ, log error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::Degenerate("need at least three (tau, error) pairs".into()));
    }
    if pairs
        .iter()
        .any(|&(t, e)| !(t > 0.0 && e > 0.0 && t.is_finite() && e.is_finite()))
    {
        return Err(Error::Degenerate("tau and error must be positive".into()));
    }
    let mut taus: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    taus.sort_by(f64::total_cmp);
    if taus.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Degenerate("tau values must be distinct".into()));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
    })
}

/// Largest `|u(a) − u(b)| / |a − b|₁` over pairs of states in a profile pair.
pub fn u_lipschitz_estimate(states: &[S], p: &SimilarityParams<f64>) -> Result<f64> {
    let mut best: f64 = 0.0;
    let us = states
        .iter()
        .map(|&s| gas::axial_velocity(s, p))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let d = states[i].abs_dist(states[j]);
            if d > 0.0 {
                best = best.max((us[i] - us[j]).abs() / d);
            }
        }
    }
    Ok(best)
}
