//! The hyperbolic right half-plane {X > 0} with metric (dX² + dY²)/X².
//!
//! Geodesics are vertical rays (constant Y) and semicircles centered on the
//! boundary axis {X = 0}; both carry closed-form constant-speed
//! parametrizations, so distances here never need a solver. The geodesic-ODE
//! shooting route is kept as an independent audit oracle.

use super::{GeodesicCurve, GeodesicSample, TargetPoint};
use crate::{Error, Result};

/// A point of ℍ², the right half-plane X > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H2Point {
    x: f64,
    y: f64,
}

impl H2Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("non-finite ℍ² point ({x}, {y})")));
        }
        if x <= 0.0 {
            return Err(Error::Domain(format!("ℍ² requires X > 0, got X = {x}")));
        }
        Ok(H2Point { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Distance on ℍ².
///
/// Uses d = 2 asinh(½ |p−q| / √(X_p X_q)), the asinh form of the familiar
/// acosh expression, which stays accurate for nearby points.
pub fn h2_distance(p: &H2Point, q: &H2Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (0.5 * chord / (p.x * q.x).sqrt()).asinh()
}

/// The circle construction of a non-vertical geodesic: center (0, c) and
/// radius R of the semicircle through p and q, plus the angle coordinates.
struct Arc {
    c: f64,
    r: f64,
    /// Arclength coordinates u = ln tan(φ/2) of the endpoints.
    u_p: f64,
    u_q: f64,
}

fn arc_through(p: &H2Point, q: &H2Point) -> Arc {
    let c = (p.x * p.x + p.y * p.y - q.x * q.x - q.y * q.y) / (2.0 * (p.y - q.y));
    let r = (p.x * p.x + (p.y - c) * (p.y - c)).sqrt();
    // φ ∈ (0, π) measured from the +Y direction at the center; X = R sin φ.
    let phi_p = f64::atan2(p.x, p.y - c);
    let phi_q = f64::atan2(q.x, q.y - c);
    Arc {
        c,
        r,
        u_p: (phi_p / 2.0).tan().ln(),
        u_q: (phi_q / 2.0).tan().ln(),
    }
}

/// Point at parameter t ∈ [0,1] of the constant-speed geodesic from p to q,
/// so that d(p, γ(t)) = t·d(p, q).
///
/// When Y_p = Y_q the result is exactly (X_p (X_q/X_p)^t, Y_p), the vertical
/// geodesic.
pub fn h2_geodesic(p: &H2Point, q: &H2Point, t: f64) -> H2Point {
    if p.y == q.y {
        return H2Point {
            x: p.x * (q.x / p.x).powf(t),
            y: p.y,
        };
    }
    let arc = arc_through(p, q);
    let u = arc.u_p + t * (arc.u_q - arc.u_p);
    let phi = 2.0 * u.exp().atan();
    H2Point {
        x: arc.r * phi.sin(),
        y: arc.c + arc.r * phi.cos(),
    }
}

/// Coordinate velocity (dX/dt, dY/dt) of the constant-speed geodesic at t.
pub fn h2_geodesic_velocity(p: &H2Point, q: &H2Point, t: f64) -> [f64; 2] {
    if p.y == q.y {
        let alpha = (q.x / p.x).ln();
        let xt = p.x * (t * alpha).exp();
        return [alpha * xt, 0.0];
    }
    let arc = arc_through(p, q);
    let du = arc.u_q - arc.u_p;
    let u = arc.u_p + t * du;
    let phi = 2.0 * u.exp().atan();
    let phi_dot = du * phi.sin();
    [arc.r * phi.cos() * phi_dot, -arc.r * phi.sin() * phi_dot]
}

/// Sampled geodesic curve from p to q with `n` samples (n ≥ 2).
pub fn h2_geodesic_curve(p: &H2Point, q: &H2Point, n: usize) -> GeodesicCurve {
    let n = n.max(2);
    let length = h2_distance(p, q);
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            let pt = h2_geodesic(p, q, t);
            let v = h2_geodesic_velocity(p, q, t);
            GeodesicSample {
                t,
                point: TargetPoint::H2(pt),
                velocity: [v[0], v[1], 0.0, 0.0],
            }
        })
        .collect();
    GeodesicCurve {
        endpoints: (TargetPoint::H2(*p), TargetPoint::H2(*q)),
        samples,
        length,
    }
}

/// Geodesic ODE of the half-plane: Ẍ = (Ẋ² − Ẏ²)/X, Ÿ = 2 Ẋ Ẏ / X.
fn h2_ode(state: &[f64; 4]) -> [f64; 4] {
    let [x, _y, vx, vy] = *state;
    [vx, vy, (vx * vx - vy * vy) / x, 2.0 * vx * vy / x]
}

fn h2_rk4(mut state: [f64; 4], t_end: f64, steps: usize) -> [f64; 4] {
    let h = t_end / steps as f64;
    for _ in 0..steps {
        let k1 = h2_ode(&state);
        let s2 = add4(&state, &k1, h / 2.0);
        let k2 = h2_ode(&s2);
        let s3 = add4(&state, &k2, h / 2.0);
        let k3 = h2_ode(&s3);
        let s4 = add4(&state, &k3, h);
        let k4 = h2_ode(&s4);
        for i in 0..4 {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    state
}

fn add4(a: &[f64; 4], k: &[f64; 4], h: f64) -> [f64; 4] {
    [a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2], a[3] + h * k[3]]
}

/// Independent distance oracle: solve the geodesic boundary-value problem on
/// the half-plane ODE by Newton shooting and return the metric speed of the
/// solved initial velocity. Deliberately does not reuse the closed form it
/// cross-checks; distant targets are reached by continuation along the
/// coordinate chord (which stays in {X > 0} by convexity).
pub fn h2_distance_ode(p: &H2Point, q: &H2Point) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let steps = 512;
    let endpoint = |v: &[f64; 2]| -> [f64; 2] {
        let s = h2_rk4([p.x, p.y, v[0], v[1]], 1.0, steps);
        [s[0], s[1]]
    };
    let chord = [q.x - p.x, q.y - p.y];
    let chord_speed = (chord[0] * chord[0] + chord[1] * chord[1]).sqrt() / p.x.min(q.x);
    let mut stages = ((chord_speed / 1.0).ceil() as usize).max(1);
    'attempt: while stages <= 512 {
        let mut v = [chord[0] / stages as f64, chord[1] / stages as f64];
        for k in 1..=stages {
            let f = k as f64 / stages as f64;
            let inter = [p.x + f * chord[0], p.y + f * chord[1]];
            if k > 1 {
                let scale = k as f64 / (k - 1) as f64;
                v[0] *= scale;
                v[1] *= scale;
            }
            match h2_newton(&endpoint, &inter, v) {
                Some(sol) => v = sol,
                None => {
                    stages *= 2;
                    continue 'attempt;
                }
            }
        }
        return Ok((v[0] * v[0] + v[1] * v[1]).sqrt() / p.x);
    }
    Err(Error::Convergence {
        iterations: 60,
        residual: f64::NAN,
    })
}

fn h2_newton(
    endpoint: &dyn Fn(&[f64; 2]) -> [f64; 2],
    target: &[f64; 2],
    mut v: [f64; 2],
) -> Option<[f64; 2]> {
    let resid = |v: &[f64; 2]| -> f64 {
        let e = endpoint(v);
        (target[0] - e[0]).abs().max((target[1] - e[1]).abs())
    };
    let tol = 1e-12 * (1.0 + target[0].abs().max(target[1].abs()));
    let mut rnorm = resid(&v);
    if !rnorm.is_finite() {
        return None;
    }
    for _ in 0..60 {
        if rnorm <= tol {
            return Some(v);
        }
        let e = endpoint(&v);
        let res = [target[0] - e[0], target[1] - e[1]];
        let delta = 1e-7 * (1.0 + v[0].abs().max(v[1].abs()));
        let mut jac = [0.0; 4];
        for k in 0..2 {
            let mut vp = v;
            let mut vm = v;
            vp[k] += delta;
            vm[k] -= delta;
            let ep = endpoint(&vp);
            let em = endpoint(&vm);
            jac[k] = (ep[0] - em[0]) / (2.0 * delta);
            jac[2 + k] = (ep[1] - em[1]) / (2.0 * delta);
        }
        let det = jac[0] * jac[3] - jac[1] * jac[2];
        if !det.is_finite() || det.abs() < 1e-300 {
            return None;
        }
        let step = [
            (jac[3] * res[0] - jac[1] * res[1]) / det,
            (-jac[2] * res[0] + jac[0] * res[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let vt = [v[0] + lambda * step[0], v[1] + lambda * step[1]];
            let rt = resid(&vt);
            if rt.is_finite() && rt < rnorm {
                v = vt;
                rnorm = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if rnorm <= tol {
        Some(v)
    } else {
        None
    }
}
