//! Elementary wave curves `α ↦ Φ_k(α; U_L)`.
//!
//! Both branches are parameterized by the characteristic speed,
//! `λ_k(Φ_k(α; U_L)) = λ_k(U_L) + α`, so the shock branch meets the
//! rarefaction branch with matching tangent `r_k(U_L)` and curvature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{self, eigenpair, SimilarityParams, State};
use crate::scalar::{solve3, Real};

const RK_STEPS: usize = 32;
const MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub fn index(self) -> usize {
        match self {
            Family::One => 0,
            Family::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(Family::One),
            2 => Some(Family::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Family::One => Family::Two,
            Family::Two => Family::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint<T> {
    /// Right state `Φ_k(α; U_L)`.
    pub state: State<T>,
    pub speed: T,
    pub family: Family,
    pub strength: T,
}

fn check_strength<T: Real>(alpha: T, p: &SimilarityParams<T>) -> Result<()> {
    if !(alpha.abs() < p.curve_radius()) {
        return Err(Error::Domain(format!(
            "|alpha| = {} exceeds the curve radius",
            alpha.abs()
        )));
    }
    Ok(())
}

/// RK4 integration of `dU/dα = r_k(U)` from `U_L`; `alpha` may have either sign.
pub fn integral_curve<T: Real>(family: Family, alpha: T, u_l: State<T>, p: &SimilarityParams<T>) -> Result<State<T>> {
    if alpha == T::zero() {
        return Ok(u_l);
    }
    let j = family.index();
    let dt = alpha / T::lit(RK_STEPS as f64);
    let half = T::lit(0.5);
    let field = |u: State<T>| -> Result<State<T>> {
        let (_, r) = eigenpair(u, p, j)?;
        Ok(State::from_array(r))
    };
    let mut u = u_l;
    for _ in 0..RK_STEPS {
        let k1 = field(u)?;
        let k2 = field(u + k1 * (dt * half))?;
        let k3 = field(u + k2 * (dt * half))?;
        let k4 = field(u + k3 * dt)?;
        u = u + (k1 + k2 * T::lit(2.0) + k3 * T::lit(2.0) + k4) * (dt / T::lit(6.0));
        p.check_reachable(u)?;
    }
    Ok(u)
}

pub fn rarefaction_point<T: Real>(
    family: Family,
    alpha: T,
    u_l: State<T>,
    p: &SimilarityParams<T>,
) -> Result<WavePoint<T>> {
    if alpha < T::zero() {
        return Err(Error::Domain(format!("rarefaction strength {alpha} is negative")));
    }
    check_strength(alpha, p)?;
    p.check_reachable(u_l)?;
    let state = integral_curve(family, alpha, u_l, p)?;
    let speed = gas::eigenvalues(state, p)?[family.index()];
    Ok(WavePoint {
        state,
        speed,
        family,
        strength: alpha,
    })
}

/// Point of the Hugoniot locus with `λ_k(U) = λ_k(U_L) + α` and its jump speed.
///
/// Accepts either sign of `α`; only `α ≤ 0` is Lax-admissible.
pub fn hugoniot_point<T: Real>(
    family: Family,
    alpha: T,
    u_l: State<T>,
    p: &SimilarityParams<T>,
) -> Result<(State<T>, T)> {
    let j = family.index();
    let (lam_l, r_l) = eigenpair(u_l, p, j)?;
    if alpha == T::zero() {
        return Ok((u_l, lam_l));
    }
    let g_l = gas::flux_g(u_l, p)?;
    let f_l = gas::flux_f(u_l, p)?;
    let tol = T::solve_tol();

    // unknowns: w = (U − U_L)/α and s
    let mut w = r_l;
    let mut s = lam_l + alpha / T::lit(2.0);
    let mut last = T::infinity();
    for _ in 0..MAX_ITER {
        let u = State::new(u_l.rho + alpha * w[0], u_l.v + alpha * w[1]);
        let g = gas::flux_g(u, p)?;
        let f = gas::flux_f(u, p)?;
        let (dg, df) = gas::flux_jacobians(u, p)?;
        let grad = gas::eigenvalue_gradients(u, p)?[j];
        let lam = gas::eigenvalues(u, p)?[j];
        let jg = [(g[0] - g_l[0]) / alpha, (g[1] - g_l[1]) / alpha];
        let jf = [(f[0] - f_l[0]) / alpha, (f[1] - f_l[1]) / alpha];
        let res = [s * jg[0] - jf[0], s * jg[1] - jf[1], (lam - lam_l) / alpha - T::one()];
        let m = [
            [s * dg[0][0] - df[0][0], s * dg[0][1] - df[0][1], jg[0]],
            [s * dg[1][0] - df[1][0], s * dg[1][1] - df[1][1], jg[1]],
            [grad[0], grad[1], T::zero()],
        ];
        let d = solve3(m, [-res[0], -res[1], -res[2]]).ok_or(Error::NoConvergence {
            what: "Hugoniot locus",
            iterations: 0,
            residual: f64::NAN,
        })?;
        w = [w[0] + d[0], w[1] + d[1]];
        s = s + d[2];
        let step = alpha.abs() * d[0].abs().max(d[1].abs()).max(d[2].abs());
        last = step;
        if step <= tol {
            let u = State::new(u_l.rho + alpha * w[0], u_l.v + alpha * w[1]);
            p.check_reachable(u)?;
            return Ok((u, s));
        }
    }
    Err(Error::NoConvergence {
        what: "Hugoniot locus",
        iterations: MAX_ITER,
        residual: last.as_f64(),
    })
}

pub fn shock_point<T: Real>(family: Family, alpha: T, u_l: State<T>, p: &SimilarityParams<T>) -> Result<WavePoint<T>> {
    if alpha > T::zero() {
        return Err(Error::Domain(format!("shock strength {alpha} is positive")));
    }
    check_strength(alpha, p)?;
    p.check_reachable(u_l)?;
    let (state, speed) = hugoniot_point(family, alpha, u_l, p)?;
    Ok(WavePoint {
        state,
        speed,
        family,
        strength: alpha,
    })
}

/// Admissible wave curve: shock branch for `α < 0`, rarefaction branch otherwise.
pub fn wave_curve<T: Real>(family: Family, alpha: T, u_l: State<T>, p: &SimilarityParams<T>) -> Result<WavePoint<T>> {
    if alpha < T::zero() {
        shock_point(family, alpha, u_l, p)
    } else {
        rarefaction_point(family, alpha, u_l, p)
    }
}
