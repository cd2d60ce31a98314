//! States, closures, fluxes and eigenstructure of the scaled potential-flow
//! system `∂x G(U, τ²) + ∂y F(U, τ²) = 0` and of its `τ = 0` limit.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default sup-norm radius of the admissible neighborhood around `(1, 0)`.
pub const DEFAULT_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams<T> {
    pub gamma: T,
    pub a_inf: T,
    pub tau: T,
    /// Sup-norm radius of the admissible neighborhood around the background state.
    pub radius: T,
}

impl<T: Real> SimilarityParams<T> {
    pub fn new(gamma: T, a_inf: T, tau: T) -> Result<Self> {
        Self::with_radius(gamma, a_inf, tau, T::lit(DEFAULT_RADIUS))
    }

    pub fn with_radius(gamma: T, a_inf: T, tau: T, radius: T) -> Result<Self> {
        if !(gamma > T::one()) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} must exceed 1")));
        }
        if !(a_inf > T::zero()) {
            return Err(Error::InvalidParams(format!("a_inf = {a_inf} must be positive")));
        }
        if !(tau >= T::zero() && tau < a_inf / T::lit(2.0)) {
            return Err(Error::InvalidParams(format!("tau = {tau} must lie in [0, a_inf/2)")));
        }
        if !(radius > T::zero() && radius < T::one()) {
            return Err(Error::InvalidParams(format!("radius = {radius} must lie in (0, 1)")));
        }
        Ok(Self {
            gamma,
            a_inf,
            tau,
            radius,
        })
    }

    /// Same gas, `τ = 0`.
    pub fn small_disturbance(&self) -> Self {
        Self {
            tau: T::zero(),
            ..*self
        }
    }

    pub fn with_tau(&self, tau: T) -> Result<Self> {
        Self::with_radius(self.gamma, self.a_inf, tau, self.radius)
    }

    pub fn is_small_disturbance(&self) -> bool {
        self.tau == T::zero()
    }

    /// Errors unless `u` is inside the sup-norm ball and the closure is real.
    pub fn check_admissible(&self, u: State<T>) -> Result<()> {
        if !(u.rho > T::zero()) || !u.v.is_finite() {
            return Err(Error::Domain(format!("{u:?}")));
        }
        let d = u.sup_dist(State::background());
        if !(d <= self.radius) {
            return Err(Error::Domain(format!(
                "{u:?} is {d} from the background (radius {})",
                self.radius
            )));
        }
        axial_velocity(u, self).map(|_| ())
    }

    /// Looser check used along wave curves and inside Riemann fans: twice the radius.
    pub fn check_reachable(&self, u: State<T>) -> Result<()> {
        if !(u.rho > T::zero()) || !u.v.is_finite() {
            return Err(Error::Domain(format!("{u:?}")));
        }
        let d = u.sup_dist(State::background());
        if !(d <= self.curve_radius()) {
            return Err(Error::Domain(format!(
                "{u:?} is {d} from the background (curve radius {})",
                self.curve_radius()
            )));
        }
        axial_velocity(u, self).map(|_| ())
    }

    /// Largest admissible `|α|` along a wave curve, and the radius of the hull Riemann fans live in.
    pub fn curve_radius(&self) -> T {
        self.radius * T::lit(2.0)
    }
}

/// Transverse flow state `(ρ, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State<T> {
    pub rho: T,
    pub v: T,
}

impl<T: Real> State<T> {
    pub fn new(rho: T, v: T) -> Self {
        Self { rho, v }
    }

    pub fn background() -> Self {
        Self {
            rho: T::one(),
            v: T::zero(),
        }
    }

    pub fn from_array(a: [T; 2]) -> Self {
        Self { rho: a[0], v: a[1] }
    }

    pub fn to_array(self) -> [T; 2] {
        [self.rho, self.v]
    }

    pub fn sup_dist(self, other: Self) -> T {
        (self.rho - other.rho).abs().max((self.v - other.v).abs())
    }

    /// Componentwise absolute sum `|Δρ| + |Δv|`.
    pub fn abs_dist(self, other: Self) -> T {
        (self.rho - other.rho).abs() + (self.v - other.v).abs()
    }

    pub fn is_finite(self) -> bool {
        self.rho.is_finite() && self.v.is_finite()
    }

    /// Reflection `v ↦ −v`.
    pub fn mirrored(self) -> Self {
        Self {
            rho: self.rho,
            v: -self.v,
        }
    }
}

impl<T: Real> Add for State<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            rho: self.rho + o.rho,
            v: self.v + o.v,
        }
    }
}

impl<T: Real> Sub for State<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            rho: self.rho - o.rho,
            v: self.v - o.v,
        }
    }
}

impl<T: Real> Mul<T> for State<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self {
            rho: self.rho * k,
            v: self.v * k,
        }
    }
}

impl<T: Real> Neg for State<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            rho: -self.rho,
            v: -self.v,
        }
    }
}

fn enthalpy<T: Real>(rho: T, p: &SimilarityParams<T>) -> T {
    let g1 = p.gamma - T::one();
    (rho.powf(g1) - T::one()) / (g1 * p.a_inf * p.a_inf)
}

/// Axial velocity perturbation `u` from the Bernoulli closure.
pub fn axial_velocity<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<T> {
    if !(u.rho > T::zero()) {
        return Err(Error::Domain(format!("rho = {} must be positive", u.rho)));
    }
    let h = enthalpy(u.rho, p);
    if p.is_small_disturbance() {
        return Ok(-(u.v * u.v / T::lit(2.0) + h));
    }
    let k = u.v * u.v + T::lit(2.0) * h;
    let t2 = p.tau * p.tau;
    let rad = T::one() - t2 * k;
    if !(rad > T::zero()) {
        return Err(Error::Domain(format!("radicand {rad} at {u:?}")));
    }
    // rationalized form of (−1 + √rad)/τ², free of cancellation for small τ
    Ok(-k / (T::one() + rad.sqrt()))
}

pub fn sonic_speed<T: Real>(rho: T, p: &SimilarityParams<T>) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain(format!("rho = {rho} must be positive")));
    }
    Ok(rho.powf((p.gamma - T::one()) / T::lit(2.0)))
}

pub fn flux_g<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<[T; 2]> {
    if p.is_small_disturbance() {
        return Ok(u.to_array());
    }
    let ax = axial_velocity(u, p)?;
    Ok([u.rho * (T::one() + p.tau * p.tau * ax), u.v])
}

pub fn flux_f<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<[T; 2]> {
    let ax = axial_velocity(u, p)?;
    if p.is_small_disturbance() {
        return Ok([u.rho * u.v, u.v * u.v / T::lit(2.0) + enthalpy(u.rho, p)]);
    }
    Ok([u.rho * u.v, -ax])
}

/// Quantities shared by the Jacobian and eigenstructure formulas.
#[derive(Debug, Clone, Copy)]
struct Closure<T> {
    q: T,
    c: T,
    c2: T,
    u_rho: T,
    u_v: T,
}

fn closure<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<Closure<T>> {
    let ax = axial_velocity(u, p)?;
    let q = T::one() + p.tau * p.tau * ax;
    let c2 = u.rho.powf(p.gamma - T::one());
    let a2 = p.a_inf * p.a_inf;
    Ok(Closure {
        q,
        c: c2.sqrt(),
        c2,
        u_rho: -c2 / (u.rho * a2 * q),
        u_v: -u.v / q,
    })
}

/// `(DG, DF)` as row-major 2x2 matrices.
pub fn flux_jacobians<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<([[T; 2]; 2], [[T; 2]; 2])> {
    let cl = closure(u, p)?;
    let t2 = p.tau * p.tau;
    let dg = [
        [cl.q + t2 * u.rho * cl.u_rho, t2 * u.rho * cl.u_v],
        [T::zero(), T::one()],
    ];
    let df = [[u.v, u.rho], [-cl.u_rho, -cl.u_v]];
    Ok((dg, df))
}

/// Both eigenvalues, their gradients and the un-normalized eigenvectors.
#[derive(Debug, Clone, Copy)]
struct Eigen<T> {
    lambda: [T; 2],
    grad: [[T; 2]; 2],
    raw: [[T; 2]; 2],
}

fn eigen<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<Eigen<T>> {
    let cl = closure(u, p)?;
    let two = T::lit(2.0);
    let a2 = p.a_inf * p.a_inf;
    let t2 = p.tau * p.tau;
    let (q, v) = (cl.q, u.v);
    let lead = a2 * q * q - t2 * cl.c2;
    let disc = a2 * q * q + t2 * (a2 * v * v - cl.c2);
    if !(lead > T::zero()) || !(disc > T::zero()) {
        return Err(Error::Domain(format!("loss of hyperbolicity at {u:?}")));
    }
    let root = cl.c * disc.sqrt();
    let lambda = [(a2 * q * v - root) / lead, (a2 * q * v + root) / lead];

    let q_rho = t2 * cl.u_rho;
    let q_v = t2 * cl.u_v;
    let c2_rho = (p.gamma - T::one()) * cl.c2 / u.rho;
    let mut grad = [[T::zero(); 2]; 2];
    let mut raw = [[T::zero(); 2]; 2];
    for j in 0..2 {
        let l = lambda[j];
        let p_l = two * lead * l - two * a2 * q * v;
        let p_q = two * a2 * q * l * l - two * a2 * v * l;
        let p_v = two * a2 * (v - q * l);
        let p_c2 = -(t2 * l * l + T::one());
        grad[j] = [-(p_q * q_rho + p_c2 * c2_rho) / p_l, -(p_q * q_v + p_v) / p_l];
        raw[j] = [a2 * u.rho * (q * l - v) / cl.c, cl.c];
    }
    Ok(Eigen { lambda, grad, raw })
}

/// `(λ₁, λ₂)` with `λ₁ < λ₂`.
pub fn eigenvalues<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<[T; 2]> {
    Ok(eigen(u, p)?.lambda)
}

/// Closed-form gradients `∇λ₁, ∇λ₂` with respect to `(ρ, v)`.
pub fn eigenvalue_gradients<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<[[T; 2]; 2]> {
    Ok(eigen(u, p)?.grad)
}

/// Factors `e_j = 1/(∇λ_j · r̃_j)` turning the raw eigenvectors into normalized ones.
pub fn normalization_factors<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<[T; 2]> {
    let e = eigen(u, p)?;
    let mut out = [T::zero(); 2];
    for j in 0..2 {
        let gn = e.grad[j][0] * e.raw[j][0] + e.grad[j][1] * e.raw[j][1];
        if !(gn > T::zero()) {
            return Err(Error::Domain(format!("genuine nonlinearity fails at {u:?}")));
        }
        out[j] = T::one() / gn;
    }
    Ok(out)
}

/// Right eigenvectors normalized so that `∇λ_j · r_j = 1`.
pub fn eigenvectors<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<[[T; 2]; 2]> {
    let e = eigen(u, p)?;
    let f = normalization_factors(u, p)?;
    Ok([
        [e.raw[0][0] * f[0], e.raw[0][1] * f[0]],
        [e.raw[1][0] * f[1], e.raw[1][1] * f[1]],
    ])
}

/// Eigenvalue and normalized eigenvector of one family (`j = 0` or `1`).
pub(crate) fn eigenpair<T: Real>(u: State<T>, p: &SimilarityParams<T>, j: usize) -> Result<(T, [T; 2])> {
    let e = eigen(u, p)?;
    let gn = e.grad[j][0] * e.raw[j][0] + e.grad[j][1] * e.raw[j][1];
    if !(gn > T::zero()) {
        return Err(Error::Domain(format!("genuine nonlinearity fails at {u:?}")));
    }
    Ok((e.lambda[j], [e.raw[j][0] / gn, e.raw[j][1] / gn]))
}

/// Convex entropy `E` and flux `Q` of the small-disturbance system, both zero at `(1, 0)`.
pub fn entropy_pair<T: Real>(u: State<T>, p: &SimilarityParams<T>) -> Result<(T, T)> {
    if !p.is_small_disturbance() {
        return Err(Error::UnsupportedRegime);
    }
    if !(u.rho > T::zero()) {
        return Err(Error::Domain(format!("rho = {} must be positive", u.rho)));
    }
    let g = p.gamma;
    let a2 = p.a_inf * p.a_inf;
    let half = T::lit(0.5);
    let internal = (u.rho.powf(g) - T::one() - g * (u.rho - T::one())) / (a2 * g * (g - T::one()));
    let e = half * u.rho * u.v * u.v + internal;
    let q = half * u.rho * u.v * u.v * u.v + u.rho * u.v * enthalpy(u.rho, p);
    Ok((e, q))
}

/// Slip residual `(1 + τ²u) sin θ − v cos θ`; zero when the flow is tangent to a wall of angle `θ`.
pub fn wall_slip_residual<T: Real>(u: State<T>, theta: T, p: &SimilarityParams<T>) -> Result<T> {
    let ax = axial_velocity(u, p)?;
    let q = T::one() + p.tau * p.tau * ax;
    Ok(q * theta.sin() - u.v * theta.cos())
}
