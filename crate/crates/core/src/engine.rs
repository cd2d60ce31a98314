//! Event-driven front tracking on the half plane below a polyline wall, or on the
//! whole line (Cauchy mode).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compare::Profile;
use crate::error::{Error, Result};
use crate::gas::{self, SimilarityParams, State};
use crate::geometry::BoundaryPolyline;
use crate::riemann::{self, Wave, WaveKind};
use crate::wave::{self, Family};

type P = SimilarityParams<f64>;
type S = State<f64>;

/// Initial data on the line `x = x_start`; perturbations are taken about `(1, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant {
        state: [f64; 2],
    },
    /// `states[i]` holds below `positions[i]`, the last state above the last position.
    Jumps {
        positions: Vec<f64>,
        states: Vec<[f64; 2]>,
    },
    /// `(1, 0) + amplitude · cos²(π (y − center) / (2 width))` on `|y − center| < width`.
    Bump {
        center: f64,
        width: f64,
        amplitude: [f64; 2],
    },
}

impl InitialData {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidData(m.into()));
        match self {
            InitialData::Constant { state } => {
                if !state.iter().all(|v| v.is_finite()) {
                    return bad("non-finite state");
                }
            }
            InitialData::Jumps { positions, states } => {
                if states.len() != positions.len() + 1 {
                    return bad("jump data needs one more state than positions");
                }
                if positions.windows(2).any(|w| !(w[1] > w[0])) || positions.iter().any(|p| !p.is_finite()) {
                    return bad("jump positions must increase");
                }
                if states.iter().flatten().any(|v| !v.is_finite()) {
                    return bad("non-finite state");
                }
            }
            InitialData::Bump {
                center,
                width,
                amplitude,
            } => {
                if !(width.is_finite() && *width > 0.0)
                    || !center.is_finite()
                    || amplitude.iter().any(|a| !a.is_finite())
                {
                    return bad("bump needs positive width and finite amplitude");
                }
            }
        }
        Ok(())
    }

    /// Pointwise value of the data.
    pub fn value(&self, y: f64) -> S {
        match self {
            InitialData::Constant { state } => S::from_array(*state),
            InitialData::Jumps { positions, states } => S::from_array(states[positions.partition_point(|&p| p <= y)]),
            InitialData::Bump {
                center,
                width,
                amplitude,
            } => {
                let t = (y - center) / width;
                if t.abs() >= 1.0 {
                    S::background()
                } else {
                    let c = (std::f64::consts::FRAC_PI_2 * t).cos();
                    S::new(1.0 + amplitude[0] * c * c, amplitude[1] * c * c)
                }
            }
        }
    }

    /// Reflection `y ↦ −y`, `v ↦ −v`.
    pub fn mirrored(&self) -> Self {
        let m = |s: &[f64; 2]| [s[0], -s[1]];
        match self {
            InitialData::Constant { state } => InitialData::Constant { state: m(state) },
            InitialData::Jumps { positions, states } => InitialData::Jumps {
                positions: positions.iter().rev().map(|p| -p).collect(),
                states: states.iter().rev().map(m).collect(),
            },
            InitialData::Bump {
                center,
                width,
                amplitude,
            } => InitialData::Bump {
                center: -center,
                width: *width,
                amplitude: m(amplitude),
            },
        }
    }

    /// Total variation over `y < upper` in the `|Δρ| + |Δv|` norm.
    pub fn total_variation(&self, upper: Option<f64>) -> f64 {
        let top = upper.unwrap_or(f64::INFINITY);
        match self {
            InitialData::Constant { .. } => 0.0,
            InitialData::Jumps { positions, states } => positions
                .iter()
                .zip(states.windows(2))
                .filter(|(p, _)| **p < top)
                .map(|(_, w)| S::from_array(w[0]).abs_dist(S::from_array(w[1])))
                .sum(),
            InitialData::Bump {
                center,
                width,
                amplitude,
            } => {
                // cos² rises on [c−w, c] and falls on [c, c+w]
                let amp = amplitude[0].abs() + amplitude[1].abs();
                let c2 = |y: f64| {
                    let t = ((y - center) / width).clamp(-1.0, 1.0);
                    let c = (std::f64::consts::FRAC_PI_2 * t).cos();
                    c * c
                };
                let rise = c2(center.min(top)) - c2((center - width).min(top));
                let fall = if top > *center {
                    c2(*center) - c2((center + width).min(top))
                } else {
                    0.0
                };
                amp * (rise + fall)
            }
        }
    }
}

fn check_state(u: S, p: &P) -> Result<()> {
    if !(u.rho > 0.0) {
        return Err(Error::InvalidData(format!("density {} is not positive", u.rho)));
    }
    p.check_admissible(u).map_err(|e| Error::InvalidData(e.to_string()))
}

/// Piecewise-constant approximation with `L¹` error below `2^{−ν}` and no extra variation,
/// restricted to `y < upper` when a wall is present.
pub fn sample_initial_data(data: &InitialData, nu: u32, upper: Option<f64>, p: &P) -> Result<Profile> {
    data.validate()?;
    let top = upper.unwrap_or(f64::INFINITY);
    let (positions, states): (Vec<f64>, Vec<S>) = match data {
        InitialData::Constant { state } => (Vec::new(), vec![S::from_array(*state)]),
        InitialData::Jumps { positions, states } => {
            let keep = positions.partition_point(|&y| y < top);
            if keep < positions.len() && upper.is_some() && positions[keep] == top {
                return Err(Error::InvalidData("jump located on the wall".into()));
            }
            (
                positions[..keep].to_vec(),
                states[..=keep].iter().map(|s| S::from_array(*s)).collect(),
            )
        }
        InitialData::Bump { center, width, .. } => {
            let (lo, hi) = (center - width, (center + width).min(top));
            if hi <= lo {
                (Vec::new(), vec![S::background()])
            } else {
                sample_bump(data, lo, hi, nu)?
            }
        }
    };
    // nothing sits on or above the wall
    let keep = positions.partition_point(|&y| y < top);
    let (positions, states) = (positions[..keep].to_vec(), states[..=keep].to_vec());
    for &u in &states {
        check_state(u, p)?;
    }
    let floor = positions.first().copied().unwrap_or(0.0).min(0.0);
    let background = states[0];
    Profile::new(positions, states, background, floor, upper)
}

fn cell_average(data: &InitialData, a: f64, b: f64) -> S {
    let InitialData::Bump {
        center,
        width,
        amplitude,
    } = data
    else {
        return data.value(0.5 * (a + b));
    };
    // ∫cos²(πt/2) dt = t/2 + sin(πt)/(2π)
    let prim = |y: f64| {
        let t = ((y - center) / width).clamp(-1.0, 1.0);
        width * (0.5 * t + (std::f64::consts::PI * t).sin() / (2.0 * std::f64::consts::PI))
    };
    let m = (prim(b) - prim(a)) / (b - a);
    S::new(1.0 + amplitude[0] * m, amplitude[1] * m)
}

fn sample_bump(data: &InitialData, lo: f64, hi: f64, nu: u32) -> Result<(Vec<f64>, Vec<S>)> {
    let target = 0.5f64.powi(nu as i32);
    let mut n = 8usize;
    loop {
        let dy = (hi - lo) / n as f64;
        let edges: Vec<f64> = (0..=n).map(|i| if i == n { hi } else { lo + i as f64 * dy }).collect();
        let avg: Vec<S> = edges.windows(2).map(|e| cell_average(data, e[0], e[1])).collect();
        let err: f64 = edges
            .windows(2)
            .zip(&avg)
            .map(|(e, m)| {
                let k = 32;
                let h = (e[1] - e[0]) / k as f64;
                (0..k)
                    .map(|j| data.value(e[0] + (j as f64 + 0.5) * h).abs_dist(*m) * h)
                    .sum::<f64>()
            })
            .sum();
        if err < target {
            let mut states = vec![S::background()];
            states.extend(avg);
            if hi < data_upper_edge(data) {
                // bump cut by the wall: the last cell extends to it
                return Ok((edges[..n].to_vec(), states));
            }
            states.push(S::background());
            return Ok((edges, states));
        }
        n *= 2;
        if n > 1 << 22 {
            return Err(Error::InvalidData(
                "bump sampling did not reach the 2^-nu accuracy".into(),
            ));
        }
    }
}

fn data_upper_edge(data: &InitialData) -> f64 {
    match data {
        InitialData::Bump { center, width, .. } => center + width,
        _ => f64::INFINITY,
    }
}

/// Weights of the interaction functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlimmWeights {
    pub k: f64,
    pub k_b: f64,
    pub k_c: f64,
}

impl GlimmWeights {
    /// Reflection and corner coefficients measured at the background, plus a margin.
    pub fn calibrate(p: &P) -> Result<Self> {
        let alpha = 1e-5;
        let below = wave::integral_curve(Family::Two, -alpha, S::background(), p)?;
        let beta = riemann::solve_boundary(below, 0.0, p)?.strength;
        let k_b = (beta / alpha).abs().max(1.0) + 0.25;
        let w = 1e-6;
        let kc = (riemann::solve_boundary(S::background(), w, p)?.strength
            - riemann::solve_boundary(S::background(), -w, p)?.strength)
            / (2.0 * w);
        Ok(Self {
            k: 4.0,
            k_b,
            k_c: kc.abs() + 0.25,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GlimmSnapshot {
    pub v1: f64,
    pub v2: f64,
    pub vc: f64,
    pub q: f64,
    pub total: f64,
}

/// Functional of a bottom-to-top list of fronts plus the remaining corner turns.
pub fn glimm_of<'a>(fronts: impl IntoIterator<Item = &'a FrontRecord>, vc: f64, w: &GlimmWeights) -> GlimmSnapshot {
    let (mut v1, mut v2, mut q) = (0.0, 0.0, 0.0);
    let (mut s1, mut s1_shock, mut s2, mut s2_shock) = (0.0, 0.0, 0.0, 0.0);
    for f in fronts {
        let a = f.strength.abs();
        let shock = f.strength < 0.0;
        match f.kind {
            WaveKind::Physical(Family::One) => {
                q += a * s2 + a * if shock { s1 } else { s1_shock };
                v1 += a;
                s1 += a;
                if shock {
                    s1_shock += a;
                }
            }
            WaveKind::Physical(Family::Two) => {
                q += a * if shock { s2 } else { s2_shock };
                v2 += a;
                s2 += a;
                if shock {
                    s2_shock += a;
                }
            }
            WaveKind::NonPhysical => {}
        }
    }
    GlimmSnapshot {
        v1,
        v2,
        vc,
        q,
        total: v1 + w.k_b * v2 + w.k_c * vc + w.k * q,
    }
}

/// A tracked front; immutable once created.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontRecord {
    pub id: usize,
    pub kind: WaveKind,
    pub strength: f64,
    pub left: S,
    pub right: S,
    pub speed: f64,
    pub nominal_speed: f64,
    pub order: u32,
    pub x_birth: f64,
    pub y_birth: f64,
    pub x_death: f64,
}

impl FrontRecord {
    pub fn y_at(&self, x: f64) -> f64 {
        self.y_birth + self.speed * (x - self.x_birth)
    }

    pub fn alive_at(&self, x: f64) -> bool {
        self.x_birth <= x && x < self.x_death
    }

    pub fn is_shock(&self) -> bool {
        matches!(self.kind, WaveKind::Physical(_)) && self.strength < 0.0
    }

    fn as_wave(&self) -> Wave<f64> {
        Wave {
            kind: self.kind,
            strength: self.strength,
            left: self.left,
            right: self.right,
            speed: self.nominal_speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    Interaction { accurate: bool },
    BoundaryHit,
    Corner(usize),
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::Interaction { accurate: true } => "interaction_ars",
            EventKind::Interaction { accurate: false } => "interaction_srs",
            EventKind::BoundaryHit => "boundary_hit",
            EventKind::Corner(_) => "corner",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub kind: EventKind,
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
    pub glimm_before: GlimmSnapshot,
    pub glimm_after: GlimmSnapshot,
}

/// A front handed to a new run, e.g. a trace continued past a trailing edge.
/// `kind = None` marks a raw jump that is resolved at the start line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedFront {
    pub kind: Option<WaveKind>,
    pub strength: f64,
    pub left: S,
    pub right: S,
    pub speed: f64,
    pub order: u32,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// Raw data: every breakpoint is a Riemann problem.
    Data(Profile),
    /// Bottom state and fronts ordered bottom to top.
    Fronts {
        bottom: S,
        fronts: Vec<SeedFront>,
        floor: f64,
    },
}

impl Start {
    /// Converts the fronts of `traj` alive at `x`, reflected `y ↦ −y`, into seeds.
    pub fn mirrored_fronts(traj: &Trajectory, x: f64) -> Vec<SeedFront> {
        traj.alive_fronts(x)
            .iter()
            .rev()
            .map(|f| SeedFront {
                kind: Some(match f.kind {
                    WaveKind::Physical(k) => WaveKind::Physical(k.other()),
                    WaveKind::NonPhysical => WaveKind::NonPhysical,
                }),
                strength: f.strength,
                left: f.right.mirrored(),
                right: f.left.mirrored(),
                speed: -f.speed,
                order: f.order,
                y: -f.y_at(x),
            })
            .collect()
    }

    /// Fronts of `traj` alive at `x` as seeds.
    pub fn fronts_of(traj: &Trajectory, x: f64) -> Vec<SeedFront> {
        traj.alive_fronts(x)
            .iter()
            .map(|f| SeedFront {
                kind: Some(f.kind),
                strength: f.strength,
                left: f.left,
                right: f.right,
                speed: f.speed,
                order: f.order,
                y: f.y_at(x),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub params: P,
    pub nu: u32,
    pub seed: u64,
    pub jitter: bool,
    /// Overrides the non-physical speed; shared between paired runs.
    pub lambda_hat: Option<f64>,
    /// `None` runs the Cauchy problem.
    pub wall: Option<BoundaryPolyline>,
    pub x_start: f64,
    pub x_end: f64,
    pub max_fronts: usize,
    pub budget_guard: bool,
}

impl EngineConfig {
    pub fn new(params: P, nu: u32, wall: Option<BoundaryPolyline>, x_end: f64) -> Self {
        Self {
            params,
            nu,
            seed: 0,
            jitter: true,
            lambda_hat: None,
            wall,
            x_start: 0.0,
            x_end,
            max_fronts: 200_000,
            budget_guard: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunStats {
    pub fronts_created: usize,
    pub max_alive: usize,
    pub max_rarefaction: f64,
    pub max_np_total: f64,
    pub max_order: u32,
    pub ars_interactions: usize,
    pub srs_interactions: usize,
    pub boundary_hits: usize,
    pub corners: usize,
    pub glimm_initial: f64,
    pub glimm_min: f64,
    pub glimm_max: f64,
}

/// Completed run, queryable at any `x` in `[x_start, x_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: P,
    pub nu: u32,
    pub lambda_hat: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub wall: Option<BoundaryPolyline>,
    pub bottom: S,
    pub fronts: Vec<FrontRecord>,
    pub events: Vec<EventRecord>,
    pub weights: GlimmWeights,
    pub stats: RunStats,
    floor: f64,
}

impl Trajectory {
    /// Fronts alive at `x`, bottom to top.
    pub fn alive_fronts(&self, x: f64) -> Vec<FrontRecord> {
        let mut v: Vec<FrontRecord> = self.fronts.iter().filter(|f| f.alive_at(x)).copied().collect();
        v.sort_by(|a, b| a.y_at(x).total_cmp(&b.y_at(x)).then(a.speed.total_cmp(&b.speed)));
        v
    }

    pub fn remaining_turns(&self, x: f64) -> f64 {
        self.wall.as_ref().map_or(0.0, |w| {
            w.corner_schedule().iter().filter(|c| c.1 > x).map(|c| c.2.abs()).sum()
        })
    }

    pub fn glimm(&self, x: f64) -> GlimmSnapshot {
        glimm_of(&self.alive_fronts(x), self.remaining_turns(x), &self.weights)
    }

    /// Numerical support cutoff: the solution is the bottom state below it.
    pub fn support_floor(&self, x: f64) -> f64 {
        self.floor - self.lambda_hat * (x - self.x_start) - 1.0
    }

    pub fn profile(&self, x: f64) -> Profile {
        let fronts = self.alive_fronts(x);
        let mut states = Vec::with_capacity(fronts.len() + 1);
        states.push(self.bottom);
        states.extend(fronts.iter().map(|f| f.right));
        let ys = fronts.iter().map(|f| f.y_at(x)).collect();
        let upper = self.wall.as_ref().map(|w| w.y_at(x));
        Profile::new(ys, states, self.bottom, self.support_floor(x), upper).expect("front positions are ordered")
    }

    /// Event abscissae, for callers that must avoid them.
    pub fn event_xs(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.x).collect()
    }

    /// Total non-physical strength alive at `x`.
    pub fn np_total(&self, x: f64) -> f64 {
        self.alive_fronts(x)
            .iter()
            .filter(|f| f.kind == WaveKind::NonPhysical)
            .map(|f| f.strength.abs())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pending {
    Pair(usize, usize),
    Wall(usize),
    Corner(usize),
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    x: f64,
    seq: u64,
    what: Pending,
}

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        o.x.total_cmp(&self.x).then(o.seq.cmp(&self.seq))
    }
}

struct Tracker<'a> {
    cfg: &'a EngineConfig,
    p: P,
    lambda_hat: f64,
    weights: GlimmWeights,
    fronts: Vec<FrontRecord>,
    stack: Vec<usize>,
    bottom: S,
    heap: BinaryHeap<Queued>,
    seq: u64,
    events: Vec<EventRecord>,
    corners: Vec<(usize, f64, f64)>,
    corner_done: usize,
    stats: RunStats,
}

pub fn run(cfg: &EngineConfig, start: Start) -> Result<Trajectory> {
    let p = cfg.params;
    if cfg.nu < 1 {
        return Err(Error::InvalidParams("nu must be positive".into()));
    }
    if !(cfg.x_end >= cfg.x_start) || !cfg.x_end.is_finite() || !cfg.x_start.is_finite() {
        return Err(Error::InvalidParams("x range".into()));
    }
    let lambda_hat = match cfg.lambda_hat {
        Some(l) => l,
        None => riemann::lambda_hat(&p)?,
    };
    let weights = GlimmWeights::calibrate(&p)?;
    let corners = cfg.wall.as_ref().map_or(Vec::new(), |w| w.corner_schedule());
    let (bottom, floor) = match &start {
        Start::Data(pr) => (
            pr.states[0],
            pr.breakpoints
                .first()
                .copied()
                .unwrap_or(cfg.x_start * 0.0)
                .min(pr.support_floor),
        ),
        Start::Fronts { bottom, fronts, floor } => (*bottom, fronts.first().map_or(*floor, |f| f.y.min(*floor))),
    };
    let mut t = Tracker {
        cfg,
        p,
        lambda_hat,
        weights,
        fronts: Vec::new(),
        stack: Vec::new(),
        bottom,
        heap: BinaryHeap::new(),
        seq: 0,
        events: Vec::new(),
        corners,
        corner_done: 0,
        stats: RunStats::default(),
    };
    t.start(start)?;
    t.evolve()?;
    let x_end = cfg.x_end;
    for f in &mut t.fronts {
        if f.x_death > x_end {
            f.x_death = f64::INFINITY;
        }
    }
    Ok(Trajectory {
        params: p,
        nu: cfg.nu,
        lambda_hat,
        x_start: cfg.x_start,
        x_end,
        wall: cfg.wall.clone(),
        bottom,
        fronts: t.fronts,
        events: t.events,
        weights,
        stats: t.stats,
        floor,
    })
}

impl<'a> Tracker<'a> {
    fn jitter(&self, id: usize) -> f64 {
        if !self.cfg.jitter {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(id as u64);
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        u * 0.5f64.powi(self.cfg.nu as i32 + 1)
    }

    fn top_state(&self) -> S {
        self.stack.last().map_or(self.bottom, |&i| self.fronts[i].right)
    }

    fn wall_y(&self, x: f64) -> f64 {
        self.cfg.wall.as_ref().map_or(f64::INFINITY, |w| w.y_at(x))
    }

    fn vc(&self, x: f64, inclusive: bool) -> f64 {
        self.corners
            .iter()
            .filter(|c| if inclusive { c.1 >= x } else { c.1 > x })
            .map(|c| c.2.abs())
            .sum()
    }

    fn glimm_now(&self, vc: f64) -> GlimmSnapshot {
        glimm_of(self.stack.iter().map(|&i| &self.fronts[i]), vc, &self.weights)
    }

    /// Creates records for `waves` born at `(x, y)`; `order_of` maps a wave to its order.
    fn spawn(
        &mut self,
        waves: &[Wave<f64>],
        x: f64,
        y: f64,
        order_of: impl Fn(&Wave<f64>) -> u32,
    ) -> Result<Vec<usize>> {
        let mut ids = Vec::with_capacity(waves.len());
        let mut last_speed = f64::NEG_INFINITY;
        for w in waves {
            let id = self.fronts.len();
            let speed = match w.kind {
                WaveKind::NonPhysical => self.lambda_hat,
                WaveKind::Physical(_) => w.speed + self.jitter(id),
            };
            if !(speed > last_speed) {
                return Err(Error::InvalidInteraction(format!(
                    "outgoing fronts at x = {x} are not ordered by speed"
                )));
            }
            last_speed = speed;
            let order = order_of(w);
            if w.is_physical() && w.strength > 0.0 {
                self.stats.max_rarefaction = self.stats.max_rarefaction.max(w.strength);
            }
            self.stats.max_order = self.stats.max_order.max(order);
            self.fronts.push(FrontRecord {
                id,
                kind: w.kind,
                strength: w.strength,
                left: w.left,
                right: w.right,
                speed,
                nominal_speed: w.speed,
                order,
                x_birth: x,
                y_birth: y,
                x_death: f64::INFINITY,
            });
            ids.push(id);
        }
        self.stats.fronts_created = self.fronts.len();
        Ok(ids)
    }

    fn push(&mut self, x: f64, what: Pending) {
        if x <= self.cfg.x_end {
            self.seq += 1;
            self.heap.push(Queued { x, seq: self.seq, what });
        }
    }

    fn schedule_pair(&mut self, pos: usize, x_now: f64) {
        if pos + 1 >= self.stack.len() {
            return;
        }
        let (a, b) = (self.fronts[self.stack[pos]], self.fronts[self.stack[pos + 1]]);
        if a.speed <= b.speed {
            return;
        }
        let x = (b.y_birth - b.speed * b.x_birth - a.y_birth + a.speed * a.x_birth) / (a.speed - b.speed);
        // a non-positive gap means coincident fronts; reported when popped
        let x = x.max(x_now);
        self.push(x, Pending::Pair(a.id, b.id));
    }

    fn schedule_wall(&mut self, x_now: f64) {
        let (Some(wall), Some(&top)) = (self.cfg.wall.as_ref(), self.stack.last()) else {
            return;
        };
        let f = self.fronts[top];
        let mut k = wall.segment(x_now);
        loop {
            let xs = wall.segment_start(k).max(x_now);
            if xs > self.cfg.x_end {
                return;
            }
            let xe = wall.segment_end(k);
            let slope = wall.segment_slope(k);
            let rel = f.speed - slope;
            let gap = wall.y_at(xs) - f.y_at(xs);
            if rel > 0.0 {
                let x_hit = xs + gap / rel;
                if x_hit < xe {
                    let x_hit = x_hit.max(x_now);
                    self.push(x_hit, Pending::Wall(top));
                    return;
                }
            }
            if xe.is_infinite() {
                return;
            }
            k += 1;
        }
    }

    fn kill(&mut self, pos: usize, count: usize, x: f64) -> Vec<usize> {
        let ids: Vec<usize> = self.stack.drain(pos..pos + count).collect();
        for &i in &ids {
            self.fronts[i].x_death = x;
        }
        ids
    }

    fn after_event(&mut self, x: f64, lo: usize, n_new: usize) -> Result<()> {
        if lo > 0 {
            self.schedule_pair(lo - 1, x);
        }
        if n_new > 0 {
            self.schedule_pair(lo + n_new - 1, x);
        }
        if lo + n_new == self.stack.len() {
            self.schedule_wall(x);
        }
        let alive = self.stack.len();
        self.stats.max_alive = self.stats.max_alive.max(alive);
        if alive > self.cfg.max_fronts {
            return Err(Error::FrontOverflow(self.cfg.max_fronts));
        }
        let np: f64 = self
            .stack
            .iter()
            .map(|&i| &self.fronts[i])
            .filter(|f| f.kind == WaveKind::NonPhysical)
            .map(|f| f.strength.abs())
            .sum();
        self.stats.max_np_total = self.stats.max_np_total.max(np);
        Ok(())
    }

    fn record(
        &mut self,
        x: f64,
        y: f64,
        kind: EventKind,
        incoming: Vec<usize>,
        outgoing: Vec<usize>,
        before: GlimmSnapshot,
    ) -> Result<()> {
        let after = self.glimm_now(self.vc(x, false));
        self.stats.glimm_min = self.stats.glimm_min.min(after.total);
        self.stats.glimm_max = self.stats.glimm_max.max(after.total);
        let initial = self.stats.glimm_initial;
        self.events.push(EventRecord {
            index: self.events.len(),
            x,
            y,
            kind,
            incoming,
            outgoing,
            glimm_before: before,
            glimm_after: after,
        });
        if self.cfg.budget_guard && after.total > 2.0 * initial && after.total > 1e-14 {
            return Err(Error::BudgetExceeded {
                x,
                total: after.total,
                initial,
            });
        }
        Ok(())
    }

    fn start(&mut self, start: Start) -> Result<()> {
        let x0 = self.cfg.x_start;
        let p = self.p;
        let wall_y = self.wall_y(x0);
        let seeds: Vec<SeedFront> = match start {
            Start::Data(profile) => profile
                .breakpoints
                .iter()
                .enumerate()
                .map(|(i, &y)| SeedFront {
                    kind: None,
                    strength: 0.0,
                    left: profile.states[i],
                    right: profile.states[i + 1],
                    speed: 0.0,
                    order: 1,
                    y,
                })
                .collect(),
            Start::Fronts { fronts, .. } => fronts,
        };
        let mut prev = self.bottom;
        for s in seeds {
            if s.left != prev {
                return Err(Error::InvalidData(format!("state mismatch below y = {}", s.y)));
            }
            prev = s.right;
            if s.y >= wall_y {
                return Err(Error::InvalidData(format!(
                    "data jump at y = {} is not below the wall",
                    s.y
                )));
            }
            match s.kind {
                None => {
                    let fan = riemann::solve_interior(s.left, s.right, &p)?;
                    let waves = riemann::ars_fronts(&fan.waves, self.cfg.nu, &p)?;
                    let ids = self.spawn(&waves, x0, s.y, |_| 1)?;
                    self.stack.extend(ids);
                }
                Some(kind) => {
                    let id = self.fronts.len();
                    self.fronts.push(FrontRecord {
                        id,
                        kind,
                        strength: s.strength,
                        left: s.left,
                        right: s.right,
                        speed: s.speed,
                        nominal_speed: s.speed,
                        order: s.order,
                        x_birth: x0,
                        y_birth: s.y,
                        x_death: f64::INFINITY,
                    });
                    if kind.is_physical_rarefaction(s.strength) {
                        self.stats.max_rarefaction = self.stats.max_rarefaction.max(s.strength);
                    }
                    self.stack.push(id);
                }
            }
        }
        self.stats.fronts_created = self.fronts.len();
        for i in 1..self.stack.len() {
            let (a, b) = (self.fronts[self.stack[i - 1]], self.fronts[self.stack[i]]);
            if a.y_at(x0) == b.y_at(x0) && a.speed > b.speed {
                return Err(Error::SimultaneousEvents(x0));
            }
        }

        // wall Riemann problem on the start line
        if let Some(wall) = self.cfg.wall.clone() {
            let k = wall.segment(x0);
            let corner_here = self.corners.iter().position(|c| (c.1 - x0).abs() <= 1e-12 * wall.h);
            let before = self.glimm_now(self.vc(x0, true));
            let fan = riemann::solve_boundary(self.top_state(), wall.angles[k], &p)?;
            let waves = riemann::ars_fronts(&fan.waves, self.cfg.nu, &p)?;
            let ids = self.spawn(&waves, x0, wall_y, |_| 1)?;
            self.stack.extend(ids.iter().copied());
            if let Some(c) = corner_here {
                self.corner_done = c + 1;
            } else {
                self.corner_done = self.corners.partition_point(|c| c.1 <= x0);
            }
            self.stats.glimm_initial = self.glimm_now(self.vc(x0, false)).total;
            self.stats.glimm_min = self.stats.glimm_initial;
            self.stats.glimm_max = self.stats.glimm_initial;
            if corner_here.is_some() || !ids.is_empty() {
                let kind = match corner_here {
                    Some(c) => EventKind::Corner(self.corners[c].0),
                    None => EventKind::BoundaryHit,
                };
                if matches!(kind, EventKind::Corner(_)) {
                    self.stats.corners += 1;
                }
                self.record(x0, wall_y, kind, Vec::new(), ids, before)?;
            }
            for c in self.corner_done..self.corners.len() {
                let x = self.corners[c].1;
                self.push(x, Pending::Corner(c));
            }
        } else {
            self.stats.glimm_initial = self.glimm_now(0.0).total;
            self.stats.glimm_min = self.stats.glimm_initial;
            self.stats.glimm_max = self.stats.glimm_initial;
        }
        for i in 0..self.stack.len().saturating_sub(1) {
            self.schedule_pair(i, x0);
        }
        self.schedule_wall(x0);
        self.after_event(x0, 0, 0)?;
        Ok(())
    }

    fn position(&self, id: usize) -> Option<usize> {
        if self.fronts[id].x_death.is_finite() {
            return None;
        }
        self.stack.iter().position(|&i| i == id)
    }

    fn evolve(&mut self) -> Result<()> {
        let mut last_x = self.cfg.x_start;
        let mut first = true;
        while let Some(ev) = self.heap.pop() {
            let x = ev.x;
            if x > self.cfg.x_end {
                break;
            }
            // lazy invalidation
            let valid = match ev.what {
                Pending::Pair(a, b) => matches!(self.position(a), Some(i) if self.stack.get(i + 1) == Some(&b)),
                Pending::Wall(a) => self.stack.last() == Some(&a),
                Pending::Corner(_) => true,
            };
            if !valid {
                continue;
            }
            if x < last_x
                || (x == last_x && !first)
                || (x == self.cfg.x_start && matches!(ev.what, Pending::Pair(..) | Pending::Wall(_)))
            {
                return Err(Error::SimultaneousEvents(x));
            }
            first = false;
            last_x = x;
            match ev.what {
                Pending::Pair(a, b) => self.interact(x, a, b)?,
                Pending::Wall(a) => self.hit_wall(x, a)?,
                Pending::Corner(c) => self.corner(x, c)?,
            }
        }
        Ok(())
    }

    fn interact(&mut self, x: f64, a: usize, b: usize) -> Result<()> {
        let pos = self.position(a).expect("validated");
        let (fa, fb) = (self.fronts[a], self.fronts[b]);
        let y = 0.5 * (fa.y_at(x) + fb.y_at(x));
        let nu = self.cfg.nu;
        let p = self.p;
        let before = self.glimm_now(self.vc(x, false));
        let physical = fa.kind.is_physical() && fb.kind.is_physical();
        let accurate = physical
            && fa.order < nu
            && fb.order < nu
            && fa.strength.abs() * fb.strength.abs() > 0.5f64.powi(nu as i32);
        let waves = if accurate {
            let fan = riemann::solve_interior(fa.left, fb.right, &p)?;
            riemann::ars_fronts(&fan.waves, nu, &p)?
        } else {
            riemann::srs_fronts(&fa.as_wave(), &fb.as_wave(), &p, self.lambda_hat, nu)?
        };
        let incoming = [fa, fb];
        let max_order = fa.order.max(fb.order);
        let order_of = |w: &Wave<f64>| match w.kind {
            WaveKind::NonPhysical => nu + 1,
            WaveKind::Physical(k) => incoming
                .iter()
                .filter(|f| f.kind == WaveKind::Physical(k))
                .map(|f| f.order)
                .min()
                .unwrap_or(max_order + 1),
        };
        let ids = self.spawn(&waves, x, y, order_of)?;
        let dead = self.kill(pos, 2, x);
        for (j, &id) in ids.iter().enumerate() {
            self.stack.insert(pos + j, id);
        }
        if accurate {
            self.stats.ars_interactions += 1;
        } else {
            self.stats.srs_interactions += 1;
        }
        self.record(x, y, EventKind::Interaction { accurate }, dead, ids.clone(), before)?;
        self.after_event(x, pos, ids.len())
    }

    fn hit_wall(&mut self, x: f64, a: usize) -> Result<()> {
        let f = self.fronts[a];
        if f.kind == WaveKind::Physical(Family::One) {
            return Err(Error::InvalidInteraction(format!(
                "family-1 front {a} reached the wall at x = {x}"
            )));
        }
        let wall = self.cfg.wall.as_ref().expect("wall events need a wall");
        let (theta, y) = (wall.angle_at(x), wall.y_at(x));
        let before = self.glimm_now(self.vc(x, false));
        let p = self.p;
        // non-physical fronts are absorbed; the slip defect they leave is O(2^-ν)
        let waves = if f.kind == WaveKind::NonPhysical {
            Vec::new()
        } else {
            let fan = riemann::solve_boundary(f.left, theta, &p)?;
            riemann::ars_fronts(&fan.waves, self.cfg.nu, &p)?
        };
        let order = f.order;
        let ids = self.spawn(&waves, x, y, |_| order)?;
        let pos = self.stack.len() - 1;
        let dead = self.kill(pos, 1, x);
        self.stack.extend(ids.iter().copied());
        self.stats.boundary_hits += 1;
        self.record(x, y, EventKind::BoundaryHit, dead, ids.clone(), before)?;
        self.after_event(x, pos, ids.len())
    }

    fn corner(&mut self, x: f64, c: usize) -> Result<()> {
        let wall = self.cfg.wall.as_ref().expect("corners need a wall");
        let (k, _, _) = self.corners[c];
        let (theta, y) = (wall.angles[k], wall.corners[k].1);
        let before = self.glimm_now(self.vc(x, true));
        let p = self.p;
        let fan = riemann::solve_boundary(self.top_state(), theta, &p)?;
        let waves = riemann::ars_fronts(&fan.waves, self.cfg.nu, &p)?;
        let ids = self.spawn(&waves, x, y, |_| 1)?;
        let pos = self.stack.len();
        self.stack.extend(ids.iter().copied());
        self.corner_done = c + 1;
        self.stats.corners += 1;
        self.record(x, y, EventKind::Corner(k), Vec::new(), ids.clone(), before)?;
        if ids.is_empty() {
            // the top front's wall prediction was made past this corner and stays valid
            return Ok(());
        }
        self.after_event(x, pos, ids.len())
    }
}

trait KindExt {
    fn is_physical(&self) -> bool;
    fn is_physical_rarefaction(&self, strength: f64) -> bool;
}

impl KindExt for WaveKind {
    fn is_physical(&self) -> bool {
        matches!(self, WaveKind::Physical(_))
    }
    fn is_physical_rarefaction(&self, strength: f64) -> bool {
        self.is_physical() && strength > 0.0
    }
}

/// Entropy production `s[E] − [Q]` across a τ=0 front.
pub fn entropy_production(f: &FrontRecord, p: &P) -> Result<f64> {
    let (el, ql) = gas::entropy_pair(f.left, p)?;
    let (er, qr) = gas::entropy_pair(f.right, p)?;
    Ok(f.nominal_speed * (er - el) - (qr - ql))
}
