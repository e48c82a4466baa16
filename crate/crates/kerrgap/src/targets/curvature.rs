//! Finite-difference curvature of a coordinate metric, generic over the
//! sampler, plus the pointwise Kato-inequality margin along curves.
//!
//! The differencing route is deliberately independent of the analytic
//! Christoffel symbols in [`super::ch2`]: it is the oracle that validates
//! them and the measurement behind the nonpositive-curvature audits.

use super::{ch2_metric, Ch2Point};
use crate::numerics::solve_small;
use crate::{Error, Result};

/// Differencing step for curvature (with one Richardson level on top).
const CURVATURE_STEP: f64 = 1e-4;

/// A coordinate metric field, sampled at arbitrary points of a chart.
pub trait MetricSampler: Sync {
    fn dim(&self) -> usize;
    /// Fill `out` (row-major dim×dim) with the metric tensor at x.
    fn metric(&self, x: &[f64], out: &mut [f64]);
}

/// The half-plane metric (dX² + dY²)/X² in coordinates (X, Y).
pub struct H2MetricSampler;

impl MetricSampler for H2MetricSampler {
    fn dim(&self) -> usize {
        2
    }
    fn metric(&self, x: &[f64], out: &mut [f64]) {
        let f = 1.0 / (x[0] * x[0]);
        out.copy_from_slice(&[f, 0.0, 0.0, f]);
    }
}

/// The ℍ²_ℂ metric in coordinates (u, v, χ, ψ).
pub struct Ch2MetricSampler;

impl MetricSampler for Ch2MetricSampler {
    fn dim(&self) -> usize {
        4
    }
    fn metric(&self, x: &[f64], out: &mut [f64]) {
        let g = ch2_metric(&Ch2Point {
            u: x[0],
            v: x[1],
            chi: x[2],
            psi: x[3],
        });
        for i in 0..4 {
            for j in 0..4 {
                out[i * 4 + j] = g[i][j];
            }
        }
    }
}

fn metric_at(s: &dyn MetricSampler, x: &[f64]) -> Vec<f64> {
    let n = s.dim();
    let mut g = vec![0.0; n * n];
    s.metric(x, &mut g);
    g
}

fn metric_inverse(g: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        let mut a = g.to_vec();
        let mut b = vec![0.0; n];
        b[col] = 1.0;
        solve_small(&mut a, &mut b, n)?;
        for row in 0..n {
            inv[row * n + col] = b[row];
        }
    }
    Some(inv)
}

/// Christoffel symbols by central differences of the sampled metric.
/// Returned flat: gamma[(k*n + i)*n + j] = Γ^k_{ij}.
fn christoffels_fd(s: &dyn MetricSampler, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let n = s.dim();
    // dg[l][i*n+j] = ∂_l g_ij
    let mut dg = vec![vec![0.0; n * n]; n];
    for l in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[l] += h;
        xm[l] -= h;
        let gp = metric_at(s, &xp);
        let gm = metric_at(s, &xm);
        for e in 0..n * n {
            dg[l][e] = (gp[e] - gm[e]) / (2.0 * h);
        }
    }
    let g = metric_at(s, x);
    let inv = metric_inverse(&g, n)?;
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += inv[k * n + l] * (dg[i][l * n + j] + dg[j][l * n + i] - dg[l][i * n + j]);
                }
                gamma[(k * n + i) * n + j] = 0.5 * acc;
            }
        }
    }
    Some(gamma)
}

fn sectional_once(s: &dyn MetricSampler, x: &[f64], u: &[f64], w: &[f64], h: f64) -> Option<f64> {
    let n = s.dim();
    let gamma0 = christoffels_fd(s, x, h)?;
    // ∂_a Γ^l_{bc} by a second differencing level
    let mut dgamma = vec![vec![0.0; n * n * n]; n];
    for a in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[a] += h;
        xm[a] -= h;
        let gp = christoffels_fd(s, &xp, h)?;
        let gm = christoffels_fd(s, &xm, h)?;
        for e in 0..n * n * n {
            dgamma[a][e] = (gp[e] - gm[e]) / (2.0 * h);
        }
    }
    let g = metric_at(s, x);
    let gam = |k: usize, i: usize, j: usize| gamma0[(k * n + i) * n + j];

    // R(u,w)w then contract with u
    let mut riem_uw_w = vec![0.0; n];
    for l in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut term = dgamma[i][(l * n + j) * n + k] - dgamma[j][(l * n + i) * n + k];
                    for m in 0..n {
                        term += gam(l, i, m) * gam(m, j, k) - gam(l, j, m) * gam(m, i, k);
                    }
                    acc += term * u[i] * w[j] * w[k];
                }
            }
        }
        riem_uw_w[l] = acc;
    }
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += g[i * n + j] * a[i] * b[j];
            }
        }
        s
    };
    let numerator = ip(&riem_uw_w, u);
    let denom = ip(u, u) * ip(w, w) - ip(u, w) * ip(u, w);
    if denom.abs() < 1e-12 * (ip(u, u) * ip(w, w)).max(1e-300) {
        return None;
    }
    Some(numerator / denom)
}

/// Gauss sectional curvature of the 2-plane span(u, w) at x, by
/// finite-difference Christoffel symbols and the Riemann tensor, Richardson
/// extrapolated over one step halving.
pub fn sectional_curvature(
    sampler: &dyn MetricSampler,
    point: &[f64],
    u: &[f64],
    w: &[f64],
) -> Result<f64> {
    let n = sampler.dim();
    if point.len() != n || u.len() != n || w.len() != n {
        return Err(Error::Domain(format!(
            "expected dimension {n}, got point {}, span {}, {}",
            point.len(),
            u.len(),
            w.len()
        )));
    }
    let h = CURVATURE_STEP;
    let k_h = sectional_once(sampler, point, u, w, h)
        .ok_or_else(|| Error::Domain("degenerate span or singular metric".into()))?;
    let k_h2 = sectional_once(sampler, point, u, w, h / 2.0)
        .ok_or_else(|| Error::Domain("degenerate span or singular metric".into()))?;
    // central differences are O(h²): one Richardson level
    Ok((4.0 * k_h2 - k_h) / 3.0)
}

/// Kato margin at parameter s for a field V along a curve γ:
/// returns (|∇_e ‖V‖|, ‖∇_e V‖) with e = γ̇, both sampled by finite
/// differences. The Kato inequality asserts lhs ≤ rhs.
pub fn kato_margin(
    sampler: &dyn MetricSampler,
    curve: &dyn Fn(f64) -> Vec<f64>,
    field: &dyn Fn(f64) -> Vec<f64>,
    s: f64,
) -> Result<(f64, f64)> {
    let n = sampler.dim();
    let h = 1e-5;
    let x = curve(s);
    let norm_at = |t: f64| -> f64 {
        let xt = curve(t);
        let vt = field(t);
        let g = metric_at(sampler, &xt);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += g[i * n + j] * vt[i] * vt[j];
            }
        }
        acc.sqrt()
    };
    let lhs = ((norm_at(s + h) - norm_at(s - h)) / (2.0 * h)).abs();

    let gamma = christoffels_fd(sampler, &x, CURVATURE_STEP)
        .ok_or_else(|| Error::Domain("singular metric along curve".into()))?;
    let xp = curve(s + h);
    let xm = curve(s - h);
    let vp = field(s + h);
    let vm = field(s - h);
    let v0 = field(s);
    let mut cov = vec![0.0; n];
    for k in 0..n {
        let vdot = (vp[k] - vm[k]) / (2.0 * h);
        let mut acc = vdot;
        for i in 0..n {
            let gdot = (xp[i] - xm[i]) / (2.0 * h);
            for j in 0..n {
                acc += gamma[(k * n + i) * n + j] * gdot * v0[j];
            }
        }
        cov[k] = acc;
    }
    let g = metric_at(sampler, &x);
    let mut rhs = 0.0;
    for i in 0..n {
        for j in 0..n {
            rhs += g[i * n + j] * cov[i] * cov[j];
        }
    }
    Ok((lhs, rhs.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SplitMix64;
    use crate::targets::ch2_christoffels;

    #[test]
    fn half_plane_curvature_is_minus_one() {
        let k = sectional_curvature(&H2MetricSampler, &[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0])
            .unwrap();
        assert!((k + 1.0).abs() < 1e-6, "K = {k}");
        let k = sectional_curvature(&H2MetricSampler, &[0.37, 2.1], &[1.0, 0.2], &[-0.3, 1.0])
            .unwrap();
        assert!((k + 1.0).abs() < 1e-6, "K = {k}");
    }

    #[test]
    fn ch2_slice_curvature_is_minus_four() {
        let k = sectional_curvature(
            &Ch2MetricSampler,
            &[0.0, 0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        assert!((k + 4.0).abs() < 1e-5, "K = {k}");
        // the (u, χ) plane at the slice is real hyperbolic, K = −1
        let k = sectional_curvature(
            &Ch2MetricSampler,
            &[0.2, 0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        assert!((k + 1.0).abs() < 1e-5, "K = {k}");
    }

    #[test]
    fn ch2_curvature_sweep_is_nonpositive_and_pinched() {
        let mut rng = SplitMix64::new(101);
        for _ in 0..100 {
            let x = [
                rng.uniform(-0.7, 0.7),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-0.7, 0.7),
                rng.uniform(-0.7, 0.7),
            ];
            let mut u = [0.0; 4];
            let mut w = [0.0; 4];
            for i in 0..4 {
                u[i] = rng.uniform(-1.0, 1.0);
                w[i] = rng.uniform(-1.0, 1.0);
            }
            let k = sectional_curvature(&Ch2MetricSampler, &x, &u, &w).unwrap();
            assert!(k <= 1e-6, "positive curvature {k} at {x:?}");
            // expected pinching for this normalization, recorded as an
            // observation rather than a contract
            assert!(k >= -4.0 - 1e-3, "below pinching: {k}");
        }
    }

    #[test]
    fn degenerate_span_is_rejected() {
        let err = sectional_curvature(
            &Ch2MetricSampler,
            &[0.0, 0.0, 0.0, 0.0],
            &[1.0, 2.0, 0.0, 0.0],
            &[2.0, 4.0, 0.0, 0.0],
        );
        assert!(err.is_err());
    }

    #[test]
    fn fd_christoffels_validate_analytic_ones() {
        let mut rng = SplitMix64::new(13);
        for _ in 0..20 {
            let x = [
                rng.uniform(-0.8, 0.8),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-0.8, 0.8),
                rng.uniform(-0.8, 0.8),
            ];
            let p = Ch2Point {
                u: x[0],
                v: x[1],
                chi: x[2],
                psi: x[3],
            };
            let analytic = ch2_christoffels(&p);
            let fd = christoffels_fd(&Ch2MetricSampler, &x, 1e-6).unwrap();
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        let a = analytic[k][i][j];
                        let f = fd[(k * 4 + i) * 4 + j];
                        assert!(
                            (a - f).abs() < 1e-5 * (1.0 + a.abs()),
                            "Γ^{k}_{i}{j}: {a} vs {f}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kato_inequality_sampled() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..200 {
            // random polynomial curve and vector field in ℍ²_ℂ coordinates
            let mut c = [[0.0; 3]; 4];
            let mut f = [[0.0; 3]; 4];
            for i in 0..4 {
                for d in 0..3 {
                    c[i][d] = rng.uniform(-0.5, 0.5);
                    f[i][d] = rng.uniform(-0.5, 0.5);
                }
            }
            // keep ‖V‖ bounded away from zero so the norm is differentiable
            f[0][0] += 1.5;
            let curve = move |s: f64| -> Vec<f64> {
                (0..4).map(|i| c[i][0] + c[i][1] * s + c[i][2] * s * s).collect()
            };
            let field = move |s: f64| -> Vec<f64> {
                (0..4).map(|i| f[i][0] + f[i][1] * s + f[i][2] * s * s).collect()
            };
            let s = rng.uniform(-0.5, 0.5);
            let (lhs, rhs) = kato_margin(&Ch2MetricSampler, &curve, &field, s).unwrap();
            assert!(lhs <= rhs + 1e-8, "Kato violated: |∇‖V‖| = {lhs} > ‖∇V‖ = {rhs}");
        }
    }
}
