//! Interior and slip-wall Riemann solvers plus the accurate (ARS) and
//! simplified (SRS) front emitters used by the tracking engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{self, SimilarityParams, State};
use crate::scalar::{solve2, Real};
use crate::wave::{integral_curve, wave_curve, Family};

const MAX_ITER: usize = 50;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    Physical(Family),
    NonPhysical,
}

/// A single jump between two constant states, `left` below and `right` above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave<T> {
    pub kind: WaveKind,
    pub strength: T,
    pub left: State<T>,
    pub right: State<T>,
    pub speed: T,
}

impl<T: Real> Wave<T> {
    pub fn family(&self) -> Option<Family> {
        match self.kind {
            WaveKind::Physical(f) => Some(f),
            WaveKind::NonPhysical => None,
        }
    }

    pub fn is_physical(&self) -> bool {
        matches!(self.kind, WaveKind::Physical(_))
    }

    pub fn is_shock(&self) -> bool {
        self.is_physical() && self.strength < T::zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiemannFan<T> {
    pub strengths: [T; 2],
    pub left: State<T>,
    pub middle: State<T>,
    pub right: State<T>,
    /// Non-trivial waves, slowest first.
    pub waves: Vec<Wave<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFan<T> {
    pub strength: T,
    pub left: State<T>,
    pub wall_state: State<T>,
    /// Empty when the incoming state already satisfies the slip condition.
    pub waves: Vec<Wave<T>>,
}

fn physical_wave<T: Real>(family: Family, strength: T, left: State<T>, p: &SimilarityParams<T>) -> Result<Wave<T>> {
    let w = wave_curve(family, strength, left, p)?;
    Ok(Wave {
        kind: WaveKind::Physical(family),
        strength,
        left,
        right: w.state,
        speed: w.speed,
    })
}

fn compose<T: Real>(a: [T; 2], u_l: State<T>, p: &SimilarityParams<T>) -> Result<(State<T>, State<T>)> {
    let m = wave_curve(Family::One, a[0], u_l, p)?.state;
    let r = wave_curve(Family::Two, a[1], m, p)?.state;
    Ok((m, r))
}

/// Strengths `(α₁, α₂)` with `Φ₂(α₂; Φ₁(α₁; U_L)) = U_R`.
pub fn solve_interior<T: Real>(u_l: State<T>, u_r: State<T>, p: &SimilarityParams<T>) -> Result<RiemannFan<T>> {
    p.check_reachable(u_l)?;
    p.check_reachable(u_r)?;
    let tol = T::solve_tol();
    let delta = T::fd_step();
    let two = T::lit(2.0);

    let r = gas::eigenvectors(u_l, p)?;
    let diff = u_r - u_l;
    let mut a = solve2([[r[0][0], r[1][0]], [r[0][1], r[1][1]]], diff.to_array())
        .ok_or_else(|| Error::Domain("degenerate eigenbasis".into()))?;

    let residual = |a: [T; 2]| -> Option<(State<T>, T)> {
        let (m, r) = compose(a, u_l, p).ok()?;
        Some((m, r.sup_dist(u_r)))
    };
    let (mut middle, mut res) = residual(a).ok_or(Error::NoConvergence {
        what: "interior Riemann problem",
        iterations: 0,
        residual: f64::NAN,
    })?;
    let mut iter = 0;
    while res > tol {
        if iter == MAX_ITER {
            return Err(Error::NoConvergence {
                what: "interior Riemann problem",
                iterations: iter,
                residual: res.as_f64(),
            });
        }
        iter += 1;
        let f = compose(a, u_l, p)?.1 - u_r;
        let m_p = wave_curve(Family::One, a[0] + delta, u_l, p)?.state;
        let m_m = wave_curve(Family::One, a[0] - delta, u_l, p)?.state;
        let c1 = (wave_curve(Family::Two, a[1], m_p, p)?.state - wave_curve(Family::Two, a[1], m_m, p)?.state)
            * (T::one() / (two * delta));
        let c2 = (wave_curve(Family::Two, a[1] + delta, middle, p)?.state
            - wave_curve(Family::Two, a[1] - delta, middle, p)?.state)
            * (T::one() / (two * delta));
        let d = solve2([[c1.rho, c2.rho], [c1.v, c2.v]], [-f.rho, -f.v])
            .ok_or_else(|| Error::Domain("singular Riemann Jacobian".into()))?;
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = [a[0] + t * d[0], a[1] + t * d[1]];
            if let Some((m, r)) = residual(trial) {
                if r < res {
                    a = trial;
                    middle = m;
                    res = r;
                    accepted = true;
                    break;
                }
            }
            t = t / two;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                what: "interior Riemann problem",
                iterations: iter,
                residual: res.as_f64(),
            });
        }
    }

    // round-off strengths of an absent family
    for k in 0..2 {
        if a[k] != T::zero() && a[k].abs() < T::lit(1e3) * tol {
            let mut trial = a;
            trial[k] = T::zero();
            if let Some((m, r)) = residual(trial) {
                if r <= tol {
                    a = trial;
                    middle = m;
                }
            }
        }
    }

    let w1 = physical_wave(Family::One, a[0], u_l, p)?;
    let mut w2 = physical_wave(Family::Two, a[1], middle, p)?;
    w2.right = u_r;
    let waves = [w1, w2].into_iter().filter(|w| w.strength != T::zero()).collect();
    Ok(RiemannFan {
        strengths: a,
        left: u_l,
        middle,
        right: u_r,
        waves,
    })
}

/// Family-1 wave that turns `U_L` into a state tangent to a wall at angle `theta_out`.
pub fn solve_boundary<T: Real>(u_l: State<T>, theta_out: T, p: &SimilarityParams<T>) -> Result<BoundaryFan<T>> {
    p.check_reachable(u_l)?;
    let tol = T::solve_tol();
    let delta = T::fd_step();
    let two = T::lit(2.0);
    let slip = |a: T| -> Result<T> {
        let s = wave_curve(Family::One, a, u_l, p)?.state;
        gas::wall_slip_residual(s, theta_out, p)
    };

    let mut a = T::zero();
    let mut res = slip(a)?;
    let mut iter = 0;
    while res.abs() > tol {
        if iter == MAX_ITER {
            return Err(Error::NoConvergence {
                what: "boundary Riemann problem",
                iterations: iter,
                residual: res.as_f64(),
            });
        }
        iter += 1;
        let d = (slip(a + delta)? - slip(a - delta)?) / (two * delta);
        if d == T::zero() || !d.is_finite() {
            return Err(Error::Domain("slip condition insensitive to the 1-wave".into()));
        }
        let step = -res / d;
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            if let Ok(r) = slip(a + t * step) {
                if r.abs() < res.abs() {
                    a = a + t * step;
                    res = r;
                    accepted = true;
                    break;
                }
            }
            t = t / two;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                what: "boundary Riemann problem",
                iterations: iter,
                residual: res.as_f64(),
            });
        }
    }

    if a == T::zero() {
        return Ok(BoundaryFan {
            strength: a,
            left: u_l,
            wall_state: u_l,
            waves: Vec::new(),
        });
    }
    let w = physical_wave(Family::One, a, u_l, p)?;
    Ok(BoundaryFan {
        strength: a,
        left: u_l,
        wall_state: w.right,
        waves: vec![w],
    })
}

/// Non-physical front speed: twice the largest characteristic speed over the admissible neighborhood.
pub fn lambda_hat<T: Real>(p: &SimilarityParams<T>) -> Result<T> {
    let n = 40;
    let mut best = T::zero();
    for i in 0..=n {
        for k in 0..=n {
            let fi = T::lit(i as f64 / n as f64 * 2.0 - 1.0);
            let fk = T::lit(k as f64 / n as f64 * 2.0 - 1.0);
            let u = State::new(T::one() + p.radius * fi, p.radius * fk);
            if let Ok(l) = gas::eigenvalues(u, p) {
                best = best.max(l[0].abs()).max(l[1].abs());
            }
        }
    }
    if best == T::zero() {
        return Err(Error::Domain("no hyperbolic state in the neighborhood".into()));
    }
    Ok(best * T::lit(2.0))
}

/// Splits rarefactions into `ceil(α ν)` equal jumps, each moving at the speed of its right state.
pub fn split_rarefaction<T: Real>(w: &Wave<T>, nu: u32, p: &SimilarityParams<T>) -> Result<Vec<Wave<T>>> {
    let family = match w.kind {
        WaveKind::Physical(f) if w.strength > T::zero() => f,
        _ => return Ok(vec![*w]),
    };
    let m = (w.strength * T::lit(nu as f64)).ceil().to_usize().unwrap_or(1).max(1);
    let sub = w.strength / T::lit(m as f64);
    let mut out = Vec::with_capacity(m);
    let mut left = w.left;
    for i in 0..m {
        let right = if i + 1 == m {
            w.right
        } else {
            integral_curve(family, sub, left, p)?
        };
        let speed = gas::eigenvalues(right, p)?[family.index()];
        out.push(Wave {
            kind: w.kind,
            strength: sub,
            left,
            right,
            speed,
        });
        left = right;
    }
    Ok(out)
}

/// Accurate solver output: shocks unchanged, rarefactions split into sub-fronts of strength at most `1/ν`.
pub fn ars_fronts<T: Real>(waves: &[Wave<T>], nu: u32, p: &SimilarityParams<T>) -> Result<Vec<Wave<T>>> {
    let mut out = Vec::new();
    for w in waves {
        out.extend(split_rarefaction(w, nu, p)?);
    }
    Ok(out)
}

/// Simplified solver for `lower` meeting `upper`: physical strengths are transmitted
/// and the mismatch goes into one non-physical front on top.
pub fn srs_fronts<T: Real>(
    lower: &Wave<T>,
    upper: &Wave<T>,
    p: &SimilarityParams<T>,
    lambda_hat: T,
    nu: u32,
) -> Result<Vec<Wave<T>>> {
    let u_l = lower.left;
    let u_r = upper.right;
    let mut out: Vec<Wave<T>> = Vec::new();
    let emit = |fam: Family, strength: T, left: State<T>, out: &mut Vec<Wave<T>>| -> Result<State<T>> {
        if strength == T::zero() {
            return Ok(left);
        }
        let w = physical_wave(fam, strength, left, p)?;
        let right = w.right;
        out.extend(split_rarefaction(&w, nu, p)?);
        Ok(right)
    };
    let top = match (lower.kind, upper.kind) {
        (WaveKind::NonPhysical, WaveKind::Physical(k)) => emit(k, upper.strength, u_l, &mut out)?,
        (WaveKind::Physical(Family::Two), WaveKind::Physical(Family::One)) => {
            let m = emit(Family::One, upper.strength, u_l, &mut out)?;
            emit(Family::Two, lower.strength, m, &mut out)?
        }
        (WaveKind::Physical(a), WaveKind::Physical(b)) if a == b => {
            emit(a, lower.strength + upper.strength, u_l, &mut out)?
        }
        _ => {
            return Err(Error::InvalidInteraction(format!(
                "{:?} below {:?} cannot approach",
                lower.kind, upper.kind
            )))
        }
    };
    let mismatch = top.sup_dist(u_r);
    if mismatch > T::zero() {
        out.push(Wave {
            kind: WaveKind::NonPhysical,
            strength: mismatch,
            left: top,
            right: u_r,
            speed: lambda_hat,
        });
    }
    Ok(out)
}
