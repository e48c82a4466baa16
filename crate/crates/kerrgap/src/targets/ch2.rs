//! The complex hyperbolic plane ℍ²_ℂ in horospherical coordinates
//! (u, v, χ, ψ) with metric
//!
//! ```text
//! ds² = du² + e⁴ᵘ(dv + χ dψ − ψ dχ)² + e²ᵘ(dχ² + dψ²).
//! ```
//!
//! No closed-form distance is used: geodesics are solved as boundary-value
//! problems by Newton shooting on the geodesic ODE (4th-order integrator,
//! velocity-scaled step count), with a path-relaxation fallback that
//! rebuilds the initial-velocity guess when plain shooting stalls. Distance
//! is the metric speed of the solved velocity. Christoffel symbols are
//! assembled from hand-differentiated metric partials and the closed-form
//! inverse metric; finite differences of [`ch2_metric`] validate them in
//! tests.

use super::{GeodesicCurve, GeodesicSample, TargetPoint};
use crate::numerics::solve_small;
use crate::{Error, Result};

/// Newton budget for the geodesic boundary-value solver.
const SHOOT_MAX_ITER: usize = 50;
/// Endpoint tolerance (coordinate sup-norm) for the solver.
const SHOOT_TOL: f64 = 1e-9;

/// A point of ℍ²_ℂ. All four coordinates are unconstrained reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ch2Point {
    pub u: f64,
    pub v: f64,
    pub chi: f64,
    pub psi: f64,
}

impl Ch2Point {
    pub fn new(u: f64, v: f64, chi: f64, psi: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite() && chi.is_finite() && psi.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite ℍ²_ℂ point ({u}, {v}, {chi}, {psi})"
            )));
        }
        Ok(Ch2Point { u, v, chi, psi })
    }

    fn coords(&self) -> [f64; 4] {
        [self.u, self.v, self.chi, self.psi]
    }

    fn from_coords(q: &[f64; 4]) -> Self {
        Ch2Point {
            u: q[0],
            v: q[1],
            chi: q[2],
            psi: q[3],
        }
    }
}

/// Metric tensor at p, row-major in coordinate order (u, v, χ, ψ).
///
/// With A = e⁴ᵘ, B = e²ᵘ and the contact covector σ = (0, 1, −ψ, χ):
/// g = du² ⊕ (A σσᵀ + B diag(0,0,1,1)).
pub fn ch2_metric(p: &Ch2Point) -> [[f64; 4]; 4] {
    let a = (4.0 * p.u).exp();
    let b = (2.0 * p.u).exp();
    let s = [0.0, 1.0, -p.psi, p.chi];
    let mut g = [[0.0; 4]; 4];
    g[0][0] = 1.0;
    for i in 1..4 {
        for j in 1..4 {
            g[i][j] = a * s[i] * s[j];
        }
    }
    g[2][2] += b;
    g[3][3] += b;
    g
}

/// Closed-form inverse of [`ch2_metric`].
pub fn ch2_metric_inverse(p: &Ch2Point) -> [[f64; 4]; 4] {
    let a = (4.0 * p.u).exp();
    let b = (2.0 * p.u).exp();
    let (chi, psi) = (p.chi, p.psi);
    let mut inv = [[0.0; 4]; 4];
    inv[0][0] = 1.0;
    inv[1][1] = 1.0 / a + (chi * chi + psi * psi) / b;
    inv[1][2] = psi / b;
    inv[2][1] = psi / b;
    inv[1][3] = -chi / b;
    inv[3][1] = -chi / b;
    inv[2][2] = 1.0 / b;
    inv[3][3] = 1.0 / b;
    inv
}

/// Hand-differentiated metric partials: `out[l][i][j] = ∂g_ij/∂x^l`.
///
/// Only the u, χ and ψ derivatives are nonzero; the metric is v-independent.
pub fn ch2_metric_partials(p: &Ch2Point) -> [[[f64; 4]; 4]; 4] {
    let a = (4.0 * p.u).exp();
    let b = (2.0 * p.u).exp();
    let s = [0.0, 1.0, -p.psi, p.chi];
    let mut dg = [[[0.0; 4]; 4]; 4];
    // ∂_u g = 4A σσᵀ + 2B diag(0,0,1,1)
    for i in 1..4 {
        for j in 1..4 {
            dg[0][i][j] = 4.0 * a * s[i] * s[j];
        }
    }
    dg[0][2][2] += 2.0 * b;
    dg[0][3][3] += 2.0 * b;
    // ∂_χ σ = e_ψ, ∂_ψ σ = −e_χ
    for i in 1..4 {
        dg[2][3][i] += a * s[i];
        dg[2][i][3] += a * s[i];
        dg[3][2][i] -= a * s[i];
        dg[3][i][2] -= a * s[i];
    }
    dg
}

/// Analytic Christoffel symbols Γ^k_{ij} at p.
pub fn ch2_christoffels(p: &Ch2Point) -> [[[f64; 4]; 4]; 4] {
    let dg = ch2_metric_partials(p);
    let inv = ch2_metric_inverse(p);
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += inv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
                gamma[k][j][i] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Squared metric norm of a coordinate vector at p.
pub fn ch2_norm_sq(p: &Ch2Point, vel: &[f64; 4]) -> f64 {
    let g = ch2_metric(p);
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += g[i][j] * vel[i] * vel[j];
        }
    }
    s
}

type State = [f64; 8];

fn geodesic_rhs(y: &State) -> State {
    let p = Ch2Point::from_coords(&[y[0], y[1], y[2], y[3]]);
    let gamma = ch2_christoffels(&p);
    let qd = [y[4], y[5], y[6], y[7]];
    let mut out = [0.0; 8];
    out[..4].copy_from_slice(&qd);
    for k in 0..4 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += gamma[k][i][j] * qd[i] * qd[j];
            }
        }
        out[4 + k] = -acc;
    }
    out
}

fn rk4_step(y: &State, h: f64) -> State {
    let k1 = geodesic_rhs(y);
    let k2 = geodesic_rhs(&axpy(y, &k1, h / 2.0));
    let k3 = geodesic_rhs(&axpy(y, &k2, h / 2.0));
    let k4 = geodesic_rhs(&axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..8 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn axpy(y: &State, k: &State, h: f64) -> State {
    let mut out = *y;
    for i in 0..8 {
        out[i] += h * k[i];
    }
    out
}

fn integrate(y0: State, t_end: f64, steps: usize) -> State {
    let mut y = y0;
    let h = t_end / steps as f64;
    for _ in 0..steps {
        y = rk4_step(&y, h);
    }
    y
}

/// Step count scaled to the metric speed so long geodesics keep accuracy.
fn step_count(p: &Ch2Point, vel: &[f64; 4]) -> usize {
    let speed = ch2_norm_sq(p, vel).sqrt();
    (64.0 * (1.0 + speed)).ceil().min(1024.0) as usize
}

fn endpoint(p: &Ch2Point, vel: &[f64; 4]) -> [f64; 4] {
    let y0 = [
        p.u, p.v, p.chi, p.psi, vel[0], vel[1], vel[2], vel[3],
    ];
    let y = integrate(y0, 1.0, step_count(p, vel));
    [y[0], y[1], y[2], y[3]]
}

fn sup_diff(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        m = m.max((a[i] - b[i]).abs());
    }
    m
}

/// Path-relaxation fallback: Gauss-Seidel sweeps of the discrete geodesic
/// equation on a polyline, used only to rebuild the shooting guess.
fn relax_velocity(p: &Ch2Point, q: &Ch2Point) -> [f64; 4] {
    const M: usize = 16;
    let a = p.coords();
    let b = q.coords();
    let mut path = [[0.0; 4]; M + 1];
    for (i, node) in path.iter_mut().enumerate() {
        let t = i as f64 / M as f64;
        for c in 0..4 {
            node[c] = a[c] + t * (b[c] - a[c]);
        }
    }
    let h = 1.0 / M as f64;
    for _ in 0..400 {
        let mut change: f64 = 0.0;
        for i in 1..M {
            let gamma = ch2_christoffels(&Ch2Point::from_coords(&path[i]));
            let mut qd = [0.0; 4];
            for c in 0..4 {
                qd[c] = (path[i + 1][c] - path[i - 1][c]) / (2.0 * h);
            }
            for c in 0..4 {
                let mut acc = 0.0;
                for x in 0..4 {
                    for y in 0..4 {
                        acc += gamma[c][x][y] * qd[x] * qd[y];
                    }
                }
                let new = 0.5 * (path[i + 1][c] + path[i - 1][c]) + 0.5 * h * h * acc;
                change = change.max((new - path[i][c]).abs());
                path[i][c] = new;
            }
        }
        if change < 1e-13 {
            break;
        }
    }
    let mut v = [0.0; 4];
    for c in 0..4 {
        v[c] = (path[1][c] - path[0][c]) / h;
    }
    v
}

/// Solve the geodesic boundary-value problem from p to q; returns the initial
/// coordinate velocity of the unit-interval geodesic.
///
/// The endpoint map is exponentially sensitive in the hyperbolic directions,
/// so plain Newton from the coordinate chord stalls for distant pairs. The
/// solver walks a continuation ladder of intermediate targets along the
/// coordinate chord, warm-starting each stage from the previous velocity,
/// doubling the number of stages on failure, with a path-relaxation fallback
/// as the last resort.
pub fn ch2_shoot(p: &Ch2Point, q: &Ch2Point) -> Result<[f64; 4]> {
    let target = q.coords();
    let start = p.coords();
    if sup_diff(&start, &target) == 0.0 {
        return Ok([0.0; 4]);
    }
    let chord = [q.u - p.u, q.v - p.v, q.chi - p.chi, q.psi - p.psi];
    let chord_speed = ch2_norm_sq(p, &chord).sqrt();
    let mut stages = ((chord_speed / 1.5).ceil() as usize).max(1);
    'attempt: while stages <= 256 {
        let mut v = [
            chord[0] / stages as f64,
            chord[1] / stages as f64,
            chord[2] / stages as f64,
            chord[3] / stages as f64,
        ];
        for k in 1..=stages {
            let f = k as f64 / stages as f64;
            let mut inter = [0.0; 4];
            for c in 0..4 {
                inter[c] = start[c] + f * (target[c] - start[c]);
            }
            // extend the previous solution proportionally as the warm start
            if k > 1 {
                let scale = k as f64 / (k - 1) as f64;
                for vc in v.iter_mut() {
                    *vc *= scale;
                }
            }
            match newton_shoot(p, &inter, v) {
                Some(sol) => v = sol,
                None => {
                    stages *= 2;
                    continue 'attempt;
                }
            }
        }
        return Ok(v);
    }
    // relaxation fallback, then one more Newton run from the improved guess
    let guess = relax_velocity(p, q);
    match newton_shoot(p, &target, guess) {
        Some(v) => Ok(v),
        None => {
            let res = sup_diff(&endpoint(p, &guess), &target);
            Err(Error::Convergence {
                iterations: SHOOT_MAX_ITER,
                residual: res,
            })
        }
    }
}

fn newton_shoot(p: &Ch2Point, target: &[f64; 4], mut v: [f64; 4]) -> Option<[f64; 4]> {
    let mut res_norm = sup_diff(&endpoint(p, &v), target);
    if !res_norm.is_finite() {
        return None;
    }
    for _ in 0..SHOOT_MAX_ITER {
        if res_norm <= SHOOT_TOL {
            return Some(v);
        }
        let e = endpoint(p, &v);
        let mut rhs = [0.0; 4];
        for c in 0..4 {
            rhs[c] = target[c] - e[c];
        }
        let scale = 1.0 + v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let delta = 1e-6 * scale;
        let mut jac = [0.0; 16];
        for k in 0..4 {
            let mut vp = v;
            let mut vm = v;
            vp[k] += delta;
            vm[k] -= delta;
            let ep = endpoint(p, &vp);
            let em = endpoint(p, &vm);
            for c in 0..4 {
                jac[c * 4 + k] = (ep[c] - em[c]) / (2.0 * delta);
            }
        }
        let mut step = rhs;
        solve_small(&mut jac, &mut step, 4)?;
        // damped update: accept the longest step that reduces the residual
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let mut vt = v;
            for c in 0..4 {
                vt[c] += lambda * step[c];
            }
            let rt = sup_diff(&endpoint(p, &vt), target);
            if rt < res_norm {
                v = vt;
                res_norm = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if res_norm <= SHOOT_TOL {
        Some(v)
    } else {
        None
    }
}

/// Points of the geodesic with initial velocity `vel` at the given sorted
/// parameters; one integration pass serves all requested samples.
pub fn ch2_exp_samples(p: &Ch2Point, vel: &[f64; 4], ts: &[f64]) -> Vec<Ch2Point> {
    let base_steps = step_count(p, vel) as f64;
    let mut y: State = [p.u, p.v, p.chi, p.psi, vel[0], vel[1], vel[2], vel[3]];
    let mut t_cur = 0.0;
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        debug_assert!(t >= t_cur - 1e-15, "sample parameters must be sorted");
        let dt = t - t_cur;
        if dt > 0.0 {
            let steps = ((base_steps * dt).ceil() as usize).max(1);
            y = {
                let mut yy = y;
                let h = dt / steps as f64;
                for _ in 0..steps {
                    yy = rk4_step(&yy, h);
                }
                yy
            };
            t_cur = t;
        }
        out.push(Ch2Point::from_coords(&[y[0], y[1], y[2], y[3]]));
    }
    out
}

/// Boundary-value geodesic from p to q as a sampled curve (33 samples).
pub fn ch2_geodesic(p: &Ch2Point, q: &Ch2Point) -> Result<GeodesicCurve> {
    let vel = ch2_shoot(p, q)?;
    let length = ch2_norm_sq(p, &vel).sqrt();
    let n = 33;
    let mut samples = Vec::with_capacity(n);
    let mut y: State = [p.u, p.v, p.chi, p.psi, vel[0], vel[1], vel[2], vel[3]];
    let steps_per_seg = (step_count(p, &vel) / (n - 1)).max(4);
    samples.push(GeodesicSample {
        t: 0.0,
        point: TargetPoint::Ch2(*p),
        velocity: vel,
    });
    for k in 1..n {
        let t0 = (k - 1) as f64 / (n - 1) as f64;
        let t1 = k as f64 / (n - 1) as f64;
        let h = (t1 - t0) / steps_per_seg as f64;
        for _ in 0..steps_per_seg {
            y = rk4_step(&y, h);
        }
        samples.push(GeodesicSample {
            t: t1,
            point: TargetPoint::Ch2(Ch2Point::from_coords(&[y[0], y[1], y[2], y[3]])),
            velocity: [y[4], y[5], y[6], y[7]],
        });
    }
    Ok(GeodesicCurve {
        endpoints: (TargetPoint::Ch2(*p), TargetPoint::Ch2(*q)),
        samples,
        length,
    })
}

/// Distance on ℍ²_ℂ: the length of the solved boundary-value geodesic.
pub fn ch2_distance(p: &Ch2Point, q: &Ch2Point) -> Result<f64> {
    let vel = ch2_shoot(p, q)?;
    Ok(ch2_norm_sq(p, &vel).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SplitMix64;
    use crate::targets::h2::{h2_distance, H2Point};

    fn pt(u: f64, v: f64, chi: f64, psi: f64) -> Ch2Point {
        Ch2Point::new(u, v, chi, psi).unwrap()
    }

    #[test]
    fn metric_special_values() {
        let g = ch2_metric(&pt(0.0, 0.0, 0.0, 0.0));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g[i][j], expect, "g[{i}][{j}]");
            }
        }
        let u = 0.3;
        let g = ch2_metric(&pt(u, 5.0, 0.0, 0.0));
        assert_eq!(g[1][1], (4.0 * u).exp());
        assert_eq!(g[2][2], (2.0 * u).exp());
        assert_eq!(g[3][3], (2.0 * u).exp());
        assert_eq!(g[1][2], 0.0);
        // χ = 1: g_vψ = e⁴ᵘχ = 1 and g_ψψ = e²ᵘ + χ²e⁴ᵘ = 2 at u = 0
        let g = ch2_metric(&pt(0.0, 0.0, 1.0, 0.0));
        assert_eq!(g[1][3], 1.0);
        assert_eq!(g[3][3], 2.0);
    }

    #[test]
    fn metric_inverse_is_exact() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let p = pt(
                rng.uniform(-1.0, 1.0),
                rng.uniform(-2.0, 2.0),
                rng.uniform(-1.5, 1.5),
                rng.uniform(-1.5, 1.5),
            );
            let g = ch2_metric(&p);
            let inv = ch2_metric_inverse(&p);
            for i in 0..4 {
                for j in 0..4 {
                    let mut s = 0.0;
                    for k in 0..4 {
                        s += g[i][k] * inv[k][j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "(g g⁻¹)[{i}][{j}] = {s}");
                }
            }
        }
    }

    #[test]
    fn metric_partials_match_finite_differences() {
        let mut rng = SplitMix64::new(17);
        let h = 1e-6;
        for _ in 0..25 {
            let c = [
                rng.uniform(-1.0, 1.0),
                rng.uniform(-2.0, 2.0),
                rng.uniform(-1.5, 1.5),
                rng.uniform(-1.5, 1.5),
            ];
            let p = pt(c[0], c[1], c[2], c[3]);
            let dg = ch2_metric_partials(&p);
            for l in 0..4 {
                let mut cp = c;
                let mut cm = c;
                cp[l] += h;
                cm[l] -= h;
                let gp = ch2_metric(&pt(cp[0], cp[1], cp[2], cp[3]));
                let gm = ch2_metric(&pt(cm[0], cm[1], cm[2], cm[3]));
                for i in 0..4 {
                    for j in 0..4 {
                        let fd = (gp[i][j] - gm[i][j]) / (2.0 * h);
                        assert!(
                            (dg[l][i][j] - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                            "∂_{l} g[{i}][{j}]: analytic {} vs fd {fd}",
                            dg[l][i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn geodesic_trivial_and_u_line() {
        let p = pt(0.0, 0.0, 0.0, 0.0);
        let curve = ch2_geodesic(&p, &p).unwrap();
        assert_eq!(curve.length, 0.0);
        // u-lines are unit-speed geodesics
        let alpha = 0.8;
        let q = pt(alpha, 0.0, 0.0, 0.0);
        let d = ch2_distance(&p, &q).unwrap();
        assert!((d - alpha).abs() < 1e-9, "u-line length {d}");
    }

    #[test]
    fn geodesic_slice_matches_rescaled_half_plane() {
        // On {χ=ψ=0} the metric is du² + e⁴ᵘdv², a curvature −4 hyperbolic
        // plane: distance = ½ d_ℍ²((½e^{−2u}, v), ·).
        let p = pt(0.0, 0.0, 0.0, 0.0);
        let q = pt(0.0, 1.0, 0.0, 0.0);
        let expect = 0.5
            * h2_distance(
                &H2Point::new(0.5, 0.0).unwrap(),
                &H2Point::new(0.5, 1.0).unwrap(),
            );
        let d = ch2_distance(&p, &q).unwrap();
        assert!((d - expect).abs() < 1e-8, "slice distance {d} vs {expect}");

        // generic slice pair
        let p = pt(-0.4, 0.7, 0.0, 0.0);
        let q = pt(0.3, -0.2, 0.0, 0.0);
        let expect = 0.5
            * h2_distance(
                &H2Point::new(0.5 * (-2.0 * -0.4f64).exp(), 0.7).unwrap(),
                &H2Point::new(0.5 * (-2.0 * 0.3f64).exp(), -0.2).unwrap(),
            );
        let d = ch2_distance(&p, &q).unwrap();
        assert!((d - expect).abs() < 1e-8, "slice distance {d} vs {expect}");
    }

    #[test]
    fn geodesic_stays_in_slice() {
        let p = pt(-0.2, 0.1, 0.0, 0.0);
        let q = pt(0.5, 0.9, 0.0, 0.0);
        let curve = ch2_geodesic(&p, &q).unwrap();
        for s in &curve.samples {
            if let TargetPoint::Ch2(c) = s.point {
                assert!(c.chi.abs() < 1e-9 && c.psi.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn endpoint_error_and_speed_constancy() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..20 {
            let p = pt(
                rng.uniform(-0.8, 0.8),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-0.8, 0.8),
                rng.uniform(-0.8, 0.8),
            );
            let q = pt(
                rng.uniform(-0.8, 0.8),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-0.8, 0.8),
                rng.uniform(-0.8, 0.8),
            );
            let curve = ch2_geodesic(&p, &q).unwrap();
            if let TargetPoint::Ch2(end) = curve.samples.last().unwrap().point {
                assert!(
                    sup_diff(&end.coords(), &q.coords()) <= 1e-7,
                    "endpoint misses target"
                );
            }
            assert!(
                curve.speed_defect() <= 1e-8,
                "speed defect {}",
                curve.speed_defect()
            );
        }
    }

    #[test]
    fn distance_symmetry_and_small_expansion() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..30 {
            let p = pt(
                rng.uniform(-0.8, 0.8),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-0.8, 0.8),
                rng.uniform(-0.8, 0.8),
            );
            let q = pt(
                rng.uniform(-0.8, 0.8),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-0.8, 0.8),
                rng.uniform(-0.8, 0.8),
            );
            let d1 = ch2_distance(&p, &q).unwrap();
            let d2 = ch2_distance(&q, &p).unwrap();
            assert!((d1 - d2).abs() <= 1e-8 * (1.0 + d1));
        }
        // d((0,0,0,0),(0,0,h,0)) = h + O(h³)
        let o = pt(0.0, 0.0, 0.0, 0.0);
        for h in [1e-2, 1e-3] {
            let d = ch2_distance(&o, &pt(0.0, 0.0, h, 0.0)).unwrap();
            assert!((d - h).abs() < 10.0 * h * h * h + 1e-12, "d = {d} at h = {h}");
        }
    }

    #[test]
    fn triangle_inequality_sampled() {
        let mut rng = SplitMix64::new(37);
        for _ in 0..50 {
            let mut pts = Vec::new();
            for _ in 0..3 {
                pts.push(pt(
                    rng.uniform(-0.6, 0.6),
                    rng.uniform(-0.8, 0.8),
                    rng.uniform(-0.6, 0.6),
                    rng.uniform(-0.6, 0.6),
                ));
            }
            let dpr = ch2_distance(&pts[0], &pts[2]).unwrap();
            let dpq = ch2_distance(&pts[0], &pts[1]).unwrap();
            let dqr = ch2_distance(&pts[1], &pts[2]).unwrap();
            assert!(dpr <= dpq + dqr + 1e-8);
        }
    }
}
