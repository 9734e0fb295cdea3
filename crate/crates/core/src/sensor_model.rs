//! Range-dependent detection model and camera ground footprints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_contains, signed_area, Point2};
use crate::sweep_planner::UavState;

/// Footprints whose upper frustum edge is this close to horizontal are rejected.
pub const GRAZING_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRates {
    pub tpr: f64,
    pub fpr: f64,
    pub tnr: f64,
    pub fnr: f64,
}

impl DetectionRates {
    /// tpr = tnr = `p`; fpr = fnr = 1 - `p`.
    pub fn symmetric(p: f64) -> Self {
        Self {
            tpr: p,
            fpr: 1.0 - p,
            tnr: p,
            fnr: 1.0 - p,
        }
    }

    /// True when neither measurement polarity can move a belief.
    pub fn is_uninformative(&self) -> bool {
        self.tpr == self.fpr && self.tnr == self.fnr
    }
}

/// Piecewise-linear detector: `p_peak` out to `alpha`, linear down to
/// `p_floor` at `beta`, flat beyond. Angles are radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub alpha: f64,
    pub beta: f64,
    pub p_peak: f64,
    pub p_floor: f64,
    pub fov_h: f64,
    pub fov_v: f64,
    /// Optical-axis depression below the horizon.
    pub pitch: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            alpha: 300.0,
            beta: 800.0,
            p_peak: 0.9,
            p_floor: 0.5,
            fov_h: 40f64.to_radians(),
            fov_v: 30f64.to_radians(),
            pitch: 20f64.to_radians(),
        }
    }
}

impl SensorModel {
    pub fn new(alpha: f64, beta: f64, fov_h: f64, fov_v: f64, pitch: f64) -> Result<Self> {
        let m = Self {
            alpha,
            beta,
            fov_h,
            fov_v,
            pitch,
            ..Self::default()
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        use std::f64::consts::{FRAC_PI_2, PI};
        let bad = |m: String| Err(Error::InvalidSensor(m));
        if !(self.alpha > 0.0 && self.alpha < self.beta && self.beta.is_finite()) {
            return bad(format!("need 0 < alpha < beta, got {} / {}", self.alpha, self.beta));
        }
        if !(0.5..=1.0).contains(&self.p_peak) || self.p_floor != 0.5 {
            return bad(format!(
                "p_peak must be in [0.5, 1] and p_floor exactly 0.5, got {} / {}",
                self.p_peak, self.p_floor
            ));
        }
        if !(self.pitch > 0.0 && self.pitch < FRAC_PI_2) {
            return bad(format!("pitch {} rad outside (0, pi/2)", self.pitch));
        }
        for (name, f) in [("fov_h", self.fov_h), ("fov_v", self.fov_v)] {
            if !(f > 0.0 && f < PI) {
                return bad(format!("{name} {f} rad outside (0, pi)"));
            }
        }
        Ok(())
    }

    /// Slope `a` of the degrading branch, fixed by continuity at alpha and beta.
    pub fn slope(&self) -> f64 {
        (self.p_floor - self.p_peak) / (self.beta - self.alpha)
    }

    pub fn intercept(&self) -> f64 {
        self.p_peak - self.slope() * self.alpha
    }

    pub fn tpr_at_range(&self, r: f64) -> f64 {
        if r <= self.alpha {
            self.p_peak
        } else if r >= self.beta {
            self.p_floor
        } else {
            self.slope() * r + self.intercept()
        }
    }

    /// tnr follows the same range curve as tpr.
    pub fn rates_at_range(&self, r: f64) -> DetectionRates {
        DetectionRates::symmetric(self.tpr_at_range(r))
    }

    /// Projects the camera frustum at gimbal yaw `gimbal_yaw` (relative to the
    /// UAV heading) onto the ground plane z = 0.
    pub fn instantaneous_footprint(&self, uav: &UavState, gimbal_yaw: f64) -> Result<FootprintTrapezoid> {
        let top = self.pitch - 0.5 * self.fov_v;
        if top <= GRAZING_LIMIT {
            return Err(Error::GrazingFootprint(top));
        }
        if !(uav.z > 0.0) {
            return Err(Error::DegenerateGeometry("UAV altitude must be positive"));
        }
        let th = (0.5 * self.fov_h).tan();
        let tv = (0.5 * self.fov_v).tan();
        let (sp, cp) = self.pitch.sin_cos();
        // corner ray in the camera frame is (forward 1, left l, up u); pitch it
        // down and scale to meet the ground
        let corner = |l: f64, u: f64| {
            let fwd = cp + u * sp;
            let down = sp - u * cp;
            let s = uav.z / down;
            Point2::new(fwd * s, l * s)
        };
        let local = [
            corner(-th, -tv),
            corner(-th, tv),
            corner(th, tv),
            corner(th, -tv),
        ];
        let yaw = uav.psi + gimbal_yaw;
        let base = uav.position();
        Ok(FootprintTrapezoid {
            vertices: local.map(|v| base + v.rotate(yaw)),
        })
    }

    /// Trapezoid covering the footprints swept as the gimbal moves from `psi1`
    /// to `psi2`: the outer side edges of the two extreme footprints, cut by
    /// near and far lines perpendicular to the mid-sweep direction.
    pub fn swept_trapezoid(&self, uav: &UavState, psi1: f64, psi2: f64) -> Result<FootprintTrapezoid> {
        if psi1 > psi2 {
            return Err(Error::DegenerateGeometry("sweep bounds are inverted"));
        }
        let right = self.instantaneous_footprint(uav, psi1)?;
        let left = self.instantaneous_footprint(uav, psi2)?;
        let base = uav.position();
        let mid = Point2::from_angle(uav.psi + 0.5 * (psi1 + psi2));

        let proj = |p: Point2| (p - base).dot(mid);
        let all = right.vertices.iter().chain(left.vertices.iter());
        let near = all.clone().map(|&p| proj(p)).fold(f64::INFINITY, f64::min);
        let far = all.map(|&p| proj(p)).fold(f64::NEG_INFINITY, f64::max);

        let cut = |a: Point2, b: Point2, level: f64| -> Result<Point2> {
            let d = b - a;
            let denom = d.dot(mid);
            if denom.abs() < 1e-12 {
                return Err(Error::DegenerateGeometry("sweep too wide for a trapezoid"));
            }
            Ok(a + d * ((level - proj(a)) / denom))
        };
        let [r_near, r_far, ..] = right.vertices;
        let [_, _, l_far, l_near] = left.vertices;
        let vertices = [
            cut(r_near, r_far, near)?,
            cut(r_near, r_far, far)?,
            cut(l_near, l_far, far)?,
            cut(l_near, l_far, near)?,
        ];
        let fp = FootprintTrapezoid { vertices };
        if fp.area() <= 0.0 {
            return Err(Error::DegenerateGeometry("swept footprint has no area"));
        }
        Ok(fp)
    }
}

/// Slant range from the UAV to a ground point.
pub fn slant_range(uav: &UavState, ground: Point2) -> f64 {
    let dx = ground.x - uav.x;
    let dy = ground.y - uav.y;
    (dx * dx + dy * dy + uav.z * uav.z).sqrt()
}

/// Ground quadrilateral, counter-clockwise: near-right, far-right, far-left,
/// near-left (relative to the view direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootprintTrapezoid {
    vertices: [Point2; 4],
}

impl FootprintTrapezoid {
    pub fn vertices(&self) -> &[Point2; 4] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        convex_contains(&self.vertices, p, slack)
    }

    /// Axis-aligned bounds as (min, max).
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }
}
