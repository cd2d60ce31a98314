//! Wall geometry: ingestion of `b(x)`, the mesh polyline `b_h`, corner events
//! and the split of a wing into two half-plane problems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const X_TOL: f64 = 1e-12;

/// User-facing wall description, `b(0) = 0`, flow below the wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// Continuous piecewise-linear `b` with `slopes.len() == breakpoints.len() + 1`.
    PiecewiseLinear { breakpoints: Vec<f64>, slopes: Vec<f64> },
    /// Dense samples, linearly interpolated; `x[0] = 0`.
    Samples {
        x: Vec<f64>,
        y: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        far_slope: Option<f64>,
    },
}

impl BoundarySpec {
    /// Straight wall `b(x) = slope · x`.
    pub fn straight(slope: f64) -> Self {
        BoundarySpec::PiecewiseLinear {
            breakpoints: Vec::new(),
            slopes: vec![slope],
        }
    }

    /// Reflection `b ↦ −b`.
    pub fn mirrored(&self) -> Self {
        match self {
            BoundarySpec::PiecewiseLinear { breakpoints, slopes } => BoundarySpec::PiecewiseLinear {
                breakpoints: breakpoints.clone(),
                slopes: slopes.iter().map(|s| -s).collect(),
            },
            BoundarySpec::Samples { x, y, far_slope } => BoundarySpec::Samples {
                x: x.clone(),
                y: y.iter().map(|v| -v).collect(),
                far_slope: far_slope.map(|s| -s),
            },
        }
    }

    fn check_shape(&self, h: f64) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            BoundarySpec::PiecewiseLinear { breakpoints, slopes } => {
                if slopes.len() != breakpoints.len() + 1 || !finite(slopes) || !finite(breakpoints) {
                    return Err(Error::InvalidBoundary("need one more slope than breakpoints".into()));
                }
                let mut prev = 0.0;
                for &b in breakpoints {
                    if !(b > prev) {
                        return Err(Error::InvalidBoundary("breakpoints must increase from 0".into()));
                    }
                    prev = b;
                }
            }
            BoundarySpec::Samples { x, y, far_slope } => {
                if x.len() != y.len() || x.len() < 2 || !finite(x) || !finite(y) {
                    return Err(Error::InvalidBoundary("samples need matching x/y arrays".into()));
                }
                if x[0] != 0.0 {
                    return Err(Error::InvalidBoundary("samples must start at x = 0".into()));
                }
                for w in x.windows(2) {
                    let dx = w[1] - w[0];
                    if !(dx > 0.0) {
                        return Err(Error::InvalidBoundary("sample abscissae must increase".into()));
                    }
                    if dx > h * (1.0 + 1e-9) {
                        return Err(Error::InvalidBoundary(format!(
                            "sample spacing {dx} is coarser than h = {h}"
                        )));
                    }
                }
                if let Some(s) = far_slope {
                    if !s.is_finite() {
                        return Err(Error::InvalidBoundary("far slope must be finite".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Slope pieces `(start, slope)`: `b'` equals `slope` on `[start, next start)`.
    fn pieces(&self, h: f64) -> Vec<(f64, f64)> {
        match self {
            BoundarySpec::PiecewiseLinear { breakpoints, slopes } => std::iter::once(0.0)
                .chain(breakpoints.iter().copied())
                .zip(slopes.iter().copied())
                .collect(),
            BoundarySpec::Samples { x, y, .. } => {
                let mut out: Vec<(f64, f64)> = x
                    .windows(2)
                    .zip(y.windows(2))
                    .map(|(xs, ys)| (xs[0], (ys[1] - ys[0]) / (xs[1] - xs[0])))
                    .collect();
                out.push((*x.last().unwrap(), self.far_slope(h)));
                out
            }
        }
    }

    /// `b'_∞`: the last slope, the supplied value, or the mean slope over the last `10h` of samples.
    pub fn far_slope(&self, h: f64) -> f64 {
        match self {
            BoundarySpec::PiecewiseLinear { slopes, .. } => *slopes.last().unwrap(),
            BoundarySpec::Samples { x, y, far_slope } => far_slope.unwrap_or_else(|| {
                let x_end = *x.last().unwrap();
                let y_end = *y.last().unwrap();
                let x0 = (x_end - 10.0 * h).max(0.0);
                (y_end - interpolate(x, y, x0)) / (x_end - x0)
            }),
        }
    }

    pub fn value(&self, x: f64, h: f64) -> f64 {
        match self {
            BoundarySpec::PiecewiseLinear { breakpoints, slopes } => {
                let mut b = 0.0;
                let mut start = 0.0;
                for (i, &slope) in slopes.iter().enumerate() {
                    let end = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
                    if x <= start {
                        break;
                    }
                    b += slope * (x.min(end) - start);
                    start = end;
                }
                b
            }
            BoundarySpec::Samples { x: xs, y: ys, .. } => {
                let x_end = *xs.last().unwrap();
                if x <= x_end {
                    interpolate(xs, ys, x)
                } else {
                    ys.last().unwrap() + (x - x_end) * self.far_slope(h)
                }
            }
        }
    }

    /// Right derivative `b'(x⁺)`.
    pub fn slope(&self, x: f64, h: f64) -> f64 {
        match self {
            BoundarySpec::PiecewiseLinear { breakpoints, slopes } => slopes[breakpoints.partition_point(|&b| b <= x)],
            BoundarySpec::Samples { x: xs, y: ys, .. } => {
                let i = xs.partition_point(|&v| v <= x);
                if i >= xs.len() {
                    self.far_slope(h)
                } else {
                    let i = i.max(1);
                    (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
                }
            }
        }
    }

    /// Total variation of `b'` on `(0, ∞)`.
    pub fn slope_variation(&self, h: f64) -> f64 {
        self.pieces(h).windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum()
    }
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let i = match x.binary_search_by(|v| v.partial_cmp(&at).unwrap()) {
        Ok(i) => return y[i],
        Err(i) => i.clamp(1, x.len() - 1),
    };
    let t = (at - x[i - 1]) / (x[i] - x[i - 1]);
    y[i - 1] + t * (y[i] - y[i - 1])
}

/// Mesh approximation `b_h` of the wall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPolyline {
    pub h: f64,
    /// `(x_k, b_k)` for `k = 0..=k_*`.
    pub corners: Vec<(f64, f64)>,
    /// `θ_k` of the segment starting at `x_k`; the last entry is the frozen far-field angle.
    pub angles: Vec<f64>,
    /// `ω_0 = θ_0` and `ω_k = θ_k − θ_{k−1}`.
    pub turns: Vec<f64>,
    pub far_slope: f64,
}

impl BoundaryPolyline {
    /// Builds `b_h` on the mesh `x_k = k h`. With `horizon = Some(ℓ)` the sign check
    /// `b < 0` only applies on `(0, ℓ)`.
    pub fn build(b: &BoundarySpec, h: f64, horizon: Option<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidBoundary(format!("mesh length h = {h}")));
        }
        b.check_shape(h)?;
        let pieces = b.pieces(h);
        if b.value(0.0, h).abs() > X_TOL {
            return Err(Error::InvalidBoundary("b(0) must vanish".into()));
        }
        if pieces[0].1 > 0.0 {
            return Err(Error::InvalidBoundary("b'(0) must be non-positive".into()));
        }
        let far = b.far_slope(h);

        // tail starts after the last piece whose slope differs from b'_∞
        let mut tail_from = 0.0;
        for (i, &(start, slope)) in pieces.iter().enumerate() {
            if slope != far {
                tail_from = pieces.get(i + 1).map_or(start, |p| p.0);
            }
        }
        let k_star = (tail_from / h - X_TOL).ceil().max(0.0) as usize;

        let corners: Vec<(f64, f64)> = (0..=k_star)
            .map(|k| {
                let x = k as f64 * h;
                (x, b.value(x, h))
            })
            .collect();
        let mut angles: Vec<f64> = corners.windows(2).map(|w| ((w[1].1 - w[0].1) / h).atan()).collect();
        angles.push(far.atan());
        // round-off in the chord slopes must not create spurious corners
        for k in 1..angles.len() {
            if (angles[k] - angles[k - 1]).abs() < 1e-12 {
                angles[k] = angles[k - 1];
            }
        }
        let mut turns = Vec::with_capacity(angles.len());
        turns.push(angles[0]);
        for w in angles.windows(2) {
            turns.push(w[1] - w[0]);
        }
        let poly = Self {
            h,
            corners,
            angles,
            turns,
            far_slope: far,
        };
        poly.check_sign(b, horizon)?;
        Ok(poly)
    }

    fn check_sign(&self, b: &BoundarySpec, horizon: Option<f64>) -> Result<()> {
        let limit = horizon.unwrap_or(f64::INFINITY);
        let mut probes: Vec<f64> = self.corners.iter().map(|c| c.0).collect();
        match b {
            BoundarySpec::PiecewiseLinear { breakpoints, .. } => probes.extend(breakpoints),
            BoundarySpec::Samples { x, .. } => probes.extend(x),
        }
        for x in probes {
            let y = b.value(x, self.h);
            let ok = if horizon.is_some() { y <= 0.0 } else { y < 0.0 };
            if x > X_TOL && x < limit - X_TOL && !ok {
                return Err(Error::InvalidBoundary(format!("b({x}) must be negative")));
            }
        }
        if horizon.is_none() {
            let (xl, yl) = *self.corners.last().unwrap();
            if self.far_slope > 0.0
                || (xl > 0.0 && yl >= 0.0)
                || (xl == 0.0 && self.far_slope >= 0.0 && self.corners.len() == 1 && self.far_slope != 0.0)
            {
                return Err(Error::InvalidBoundary("wall must stay below y = 0".into()));
            }
        }
        Ok(())
    }

    pub fn k_star(&self) -> usize {
        self.corners.len() - 1
    }

    /// Index of the segment containing `x` (right-continuous at corners).
    pub fn segment(&self, x: f64) -> usize {
        let k = (x / self.h + X_TOL).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.k_star())
        }
    }

    /// Start abscissa of segment `k`.
    pub fn segment_start(&self, k: usize) -> f64 {
        self.corners[k.min(self.k_star())].0
    }

    /// End abscissa of segment `k` (infinite for the tail).
    pub fn segment_end(&self, k: usize) -> f64 {
        if k >= self.k_star() {
            f64::INFINITY
        } else {
            self.corners[k + 1].0
        }
    }

    pub fn angle_at(&self, x: f64) -> f64 {
        self.angles[self.segment(x)]
    }

    pub fn y_at(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let (xk, bk) = self.corners[k];
        if k < self.k_star() {
            bk + (x - xk) * self.angles[k].tan()
        } else {
            bk + (x - xk) * self.far_slope
        }
    }

    /// Slope of `b_h` on segment `k`.
    pub fn segment_slope(&self, k: usize) -> f64 {
        if k >= self.k_star() {
            self.far_slope
        } else {
            (self.corners[k + 1].1 - self.corners[k].1) / self.h
        }
    }

    /// Nonzero turns `(k, x_k, ω_k)` in increasing `x`.
    pub fn corner_schedule(&self) -> Vec<(usize, f64, f64)> {
        self.turns
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, &w)| (k, self.corners[k].0, w))
            .collect()
    }

    /// Total variation of `b'_h` on `(0, ∞)`.
    pub fn slope_variation(&self) -> f64 {
        (1..=self.k_star())
            .map(|k| (self.segment_slope(k) - self.segment_slope(k - 1)).abs())
            .sum()
    }
}

/// Two-sided slender body `b_− < 0 < b_+` on `(0, ℓ_w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingGeometry {
    pub chord: f64,
    pub upper: BoundarySpec,
    pub lower: BoundarySpec,
}

/// The two half-plane problems of a wing; the upper one is reflected `y ↦ −y`, `v ↦ −v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WingHalves {
    pub lower: BoundaryPolyline,
    pub upper_mirrored: BoundaryPolyline,
    pub trailing_edge: f64,
}

impl WingGeometry {
    pub fn validate(&self, h: f64) -> Result<()> {
        let l = self.chord;
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidBoundary(format!("chord {l}")));
        }
        for (name, b) in [("upper", &self.upper), ("lower", &self.lower)] {
            b.check_shape(h)?;
            if b.value(0.0, h).abs() > X_TOL || b.value(l, h).abs() > 1e-9 {
                return Err(Error::InvalidBoundary(format!(
                    "{name} surface must close at 0 and at the chord"
                )));
            }
        }
        if self.upper.slope(0.0, h) < 0.0 || self.lower.slope(0.0, h) > 0.0 {
            return Err(Error::InvalidBoundary("leading edge must open the wing".into()));
        }
        let n = ((l / h).ceil() as usize).max(1) * 4;
        for i in 1..n {
            let x = l * i as f64 / n as f64;
            if !(self.lower.value(x, h) <= 0.0 && self.upper.value(x, h) >= 0.0) {
                return Err(Error::InvalidBoundary(format!("wing surfaces cross at x = {x}")));
            }
        }
        Ok(())
    }
}

pub fn wing_to_half_problems(w: &WingGeometry, h: f64) -> Result<WingHalves> {
    w.validate(h)?;
    let ratio = w.chord / h;
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::InvalidBoundary("chord must be a multiple of h".into()));
    }
    Ok(WingHalves {
        lower: BoundaryPolyline::build(&w.lower, h, Some(w.chord))?,
        upper_mirrored: BoundaryPolyline::build(&w.upper.mirrored(), h, Some(w.chord))?,
        trailing_edge: w.chord,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_slope() -> BoundarySpec {
        BoundarySpec::PiecewiseLinear {
            breakpoints: vec![1.0],
            slopes: vec![-0.05, -0.07],
        }
    }

    #[test]
    fn straight_wall_single_turn() {
        let b = BoundarySpec::straight(-(0.05f64).tan());
        let p = BoundaryPolyline::build(&b, 0.05, None).unwrap();
        let sched = p.corner_schedule();
        assert_eq!(sched.len(), 1);
        assert_eq!(sched[0].1, 0.0);
        assert!((sched[0].2 + 0.05).abs() < 1e-15);
        assert_eq!(p.k_star(), 0);
    }

    #[test]
    fn two_slope_wall() {
        let p = BoundaryPolyline::build(&two_slope(), 0.05, None).unwrap();
        let sched = p.corner_schedule();
        assert_eq!(sched.len(), 2);
        let (_, x, w) = sched[1];
        assert!((x - 1.0).abs() < 1e-12);
        assert!((w + ((0.07f64).atan() - (0.05f64).atan())).abs() < 1e-14);
        assert_eq!(p.k_star(), 20);
    }

    #[test]
    fn angles_follow_mesh_chords() {
        let b = BoundarySpec::PiecewiseLinear {
            breakpoints: vec![0.33, 0.71],
            slopes: vec![-0.02, -0.06, -0.03],
        };
        let h = 0.1;
        let p = BoundaryPolyline::build(&b, h, None).unwrap();
        for k in 0..p.k_star() {
            let (x0, b0) = p.corners[k];
            let (_, b1) = p.corners[k + 1];
            assert!((p.angles[k] - ((b1 - b0) / h).atan()).abs() < 1e-12);
            assert_eq!(b0, b.value(x0, h));
        }
        // corner turns telescope to the variation of arctan b'_h
        let tv: f64 = std::iter::once(p.angles[0].abs())
            .chain(p.angles.windows(2).map(|w| (w[1] - w[0]).abs()))
            .sum();
        let sum: f64 = p.corner_schedule().iter().map(|c| c.2.abs()).sum();
        assert!((tv - sum).abs() < 1e-12);
        assert!(p.slope_variation() <= b.slope_variation(h) + 1e-15);
    }

    fn l1_slope_error(b: &BoundarySpec, p: &BoundaryPolyline, x_max: f64) -> f64 {
        let n = 400_000;
        let dx = x_max / n as f64;
        (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * dx;
                (p.segment_slope(p.segment(x)) - b.slope(x, p.h)).abs() * dx
            })
            .sum()
    }

    #[test]
    fn slope_error_bounded_by_h() {
        // smooth-ish wall sampled densely: b(x) = −0.05 x − 0.02 sin(x)
        let xs: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.001).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -0.05 * x - 0.02 * x.sin()).collect();
        let b = BoundarySpec::Samples {
            x: xs,
            y: ys,
            far_slope: None,
        };
        for h in [0.1, 0.05, 0.025] {
            let p = BoundaryPolyline::build(&b, h, None).unwrap();
            let err = l1_slope_error(&b, &p, 4.0);
            assert!(err <= h, "h {h} err {err}");
            assert!(p.slope_variation() <= b.slope_variation(h) + 1e-12);
        }
    }

    #[test]
    fn uniform_error_is_first_order() {
        // kinks off the mesh: interpolation error at most h·|jump|/4 per kink
        let b = BoundarySpec::PiecewiseLinear {
            breakpoints: vec![0.37, 1.13],
            slopes: vec![-0.03, -0.08, -0.05],
        };
        for h in [0.1, 0.05, 0.025, 0.0125] {
            let p = BoundaryPolyline::build(&b, h, None).unwrap();
            let sup = (0..3000)
                .map(|i| i as f64 * 0.001)
                .map(|x| (p.y_at(x) - b.value(x, h)).abs())
                .fold(0.0, f64::max);
            assert!(sup <= h * 0.05 / 4.0 + 1e-15, "h {h} sup {sup}");
        }
    }

    #[test]
    fn coarse_samples_rejected() {
        let b = BoundarySpec::Samples {
            x: vec![0.0, 0.2, 0.4],
            y: vec![0.0, -0.01, -0.02],
            far_slope: None,
        };
        assert!(matches!(
            BoundaryPolyline::build(&b, 0.1, None),
            Err(Error::InvalidBoundary(_))
        ));
    }

    #[test]
    fn hypothesis_violations_rejected() {
        let up = BoundarySpec::straight(0.01);
        assert!(BoundaryPolyline::build(&up, 0.1, None).is_err());
        let recross = BoundarySpec::PiecewiseLinear {
            breakpoints: vec![0.5],
            slopes: vec![-0.01, 0.05],
        };
        assert!(BoundaryPolyline::build(&recross, 0.1, None).is_err());
        assert!(BoundaryPolyline::build(&two_slope(), 0.0, None).is_err());
    }

    #[test]
    fn schedule_is_stable() {
        let p = BoundaryPolyline::build(&two_slope(), 0.05, None).unwrap();
        let q = BoundaryPolyline::build(&two_slope(), 0.05, None).unwrap();
        assert_eq!(p.corner_schedule(), q.corner_schedule());
    }

    fn lens() -> WingGeometry {
        let mids: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let slopes: Vec<f64> = mids.iter().map(|m| 0.1 * (1.0 - 2.0 * m)).collect();
        let breakpoints: Vec<f64> = (1..10).map(|i| 0.1 * i as f64).collect();
        let upper = BoundarySpec::PiecewiseLinear {
            breakpoints: breakpoints.clone(),
            slopes: slopes.clone(),
        };
        WingGeometry {
            chord: 1.0,
            lower: upper.mirrored(),
            upper,
        }
    }

    #[test]
    fn symmetric_lens_halves_coincide() {
        let halves = wing_to_half_problems(&lens(), 0.05).unwrap();
        assert_eq!(halves.lower, halves.upper_mirrored);
        assert!(halves.lower.y_at(1.0).abs() < 1e-15);
        assert_eq!(halves.trailing_edge, 1.0);
    }

    #[test]
    fn wing_validation() {
        let mut w = lens();
        w.chord = 0.9;
        assert!(wing_to_half_problems(&w, 0.05).is_err());
        let flat = WingGeometry {
            chord: 1.0,
            upper: BoundarySpec::straight(0.0),
            lower: BoundarySpec::straight(0.0),
        };
        assert!(flat.validate(0.05).is_ok());
        let crossed = WingGeometry {
            chord: 1.0,
            upper: lens().lower,
            lower: lens().upper,
        };
        assert!(crossed.validate(0.05).is_err());
    }

    #[test]
    fn serde_round_trip_rejects_unknown() {
        let s = r#"{"kind":"piecewise_linear","breakpoints":[1.0],"slopes":[-0.05,-0.07]}"#;
        let b: BoundarySpec = serde_json::from_str(s).unwrap();
        assert_eq!(b, two_slope());
        let bad = r#"{"kind":"piecewise_linear","breakpoints":[],"slopes":[-0.05],"extra":1}"#;
        assert!(serde_json::from_str::<BoundarySpec>(bad).is_err());
    }
}
