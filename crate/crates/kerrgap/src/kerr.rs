//! Closed-form evaluation of the extreme Kerr and extreme Kerr-Newman
//! harmonic maps, their analytic partial derivatives, axis limits, and
//! asymptotic-rate measurements.
//!
//! In spherical coordinates (r, θ), with r̃ = r + √|J| and
//! Σ = r̃² + |J|cos²θ, the extreme Kerr map into ℍ² is
//!
//! ```text
//! X₀ = (r̃² + |J| + 2|J|^{3/2} r̃ sin²θ / Σ) sin²θ
//! Y₀ = 2J(cos³θ − 3cosθ) − 2J² cosθ sin⁴θ / Σ
//! ```
//!
//! and the extreme Kerr-Newman map into ℍ²_ℂ (r̃ = r + m, Σ = r̃² + a²cos²θ,
//! m² = a² + q²) is
//!
//! ```text
//! u₀ = −½ log[(r̃² + a² + a²sin²θ(2mr̃ − q²)/Σ) sin²θ]
//! v₀ = ma cosθ(3 − cos²θ) − a(q²r̃ − ma²sin²θ) cosθ sin²θ / Σ
//! χ₀ = −q a r̃ sin²θ / Σ
//! ψ₀ = q (r̃² + a²) cosθ / Σ
//! ```
//!
//! Partials are hand-differentiated closed forms: the energy integrands need
//! the |∂Y₀|²/ρ-type cancellations near the axis that finite differences
//! resolve poorly. Central differences remain as a validation oracle in the
//! tests only.
//!
//! Orientation conventions are kept exactly as the two maps are printed,
//! which makes the Kerr axis value of w₀ = ½Y₀ equal to −2J on {z > 0} while
//! the Kerr-Newman v₀ is +2ma there. The two are linked only through the
//! verified q = 0 reduction v₀ = −Y₀/2.

use crate::numerics::fit_loglog_exponent;
use crate::targets::{Ch2Point, H2Point, TargetPoint};
use crate::{Error, Result};

/// Evaluations closer than this to θ ∈ {0, π} are refused by the map-level
/// evaluators; callers should use the axis limits instead.
pub const AXIS_GUARD: f64 = 1e-8;

/// Extreme Kerr parameters: the angular momentum J ≠ 0.
#[derive(Clone, Copy, Debug)]
pub struct KerrParams {
    j: f64,
}

impl KerrParams {
    pub fn new(j: f64) -> Result<Self> {
        if !j.is_finite() || j == 0.0 {
            return Err(Error::Domain(format!(
                "extreme Kerr requires a nonzero finite angular momentum, got J = {j}"
            )));
        }
        Ok(KerrParams { j })
    }

    pub fn j(&self) -> f64 {
        self.j
    }
}

/// Extreme Kerr-Newman parameters (m, a, q) with m > 0 and m² = a² + q².
#[derive(Clone, Copy, Debug)]
pub struct KerrNewmanParams {
    m: f64,
    a: f64,
    q: f64,
}

impl KerrNewmanParams {
    pub fn new(m: f64, a: f64, q: f64) -> Result<Self> {
        if !(m.is_finite() && a.is_finite() && q.is_finite()) || m <= 0.0 {
            return Err(Error::Domain(format!(
                "Kerr-Newman requires finite parameters with m > 0, got ({m}, {a}, {q})"
            )));
        }
        let lhs = m * m;
        let rhs = a * a + q * q;
        if (lhs - rhs).abs() > 1e-12 * lhs.max(rhs) {
            return Err(Error::Domain(format!(
                "extremality m² = a² + q² violated: m² = {lhs}, a² + q² = {rhs}"
            )));
        }
        Ok(KerrNewmanParams { m, a, q })
    }

    /// Extremal parameters from (a, q): m = √(a² + q²).
    pub fn from_aq(a: f64, q: f64) -> Result<Self> {
        Self::new((a * a + q * q).sqrt(), a, q)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    /// Angular momentum J = m a.
    pub fn angular_momentum(&self) -> f64 {
        self.m * self.a
    }
}

/// Side of the symmetry axis Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisBranch {
    /// {ρ = 0, z > 0}, reached as θ → 0.
    ZPositive,
    /// {ρ = 0, z < 0}, reached as θ → π.
    ZNegative,
}

/// A sampled extremal map value: target point, partials ∂(coordinate)/∂(r, θ)
/// in coordinate order, and the assembled one-form ω (ℍ²_ℂ maps only).
#[derive(Clone, Copy, Debug)]
pub struct MapSample {
    pub point: TargetPoint,
    /// partials[c] = [∂_r, ∂_θ] of target coordinate c; ℍ² uses slots 0, 1.
    pub partials: [[f64; 2]; 4],
    /// ω = Dv + χDψ − ψDχ as (r, θ) components.
    pub omega: Option<[f64; 2]>,
}

fn check_interior(r: f64, theta: f64) -> Result<()> {
    if !(r.is_finite() && theta.is_finite()) || r <= 0.0 {
        return Err(Error::Domain(format!(
            "need finite r > 0 and finite θ, got (r, θ) = ({r}, {theta})"
        )));
    }
    if theta < AXIS_GUARD || theta > std::f64::consts::PI - AXIS_GUARD {
        return Err(Error::Domain(format!(
            "θ = {theta} is on or within {AXIS_GUARD} of the axis; use axis_limits for Γ values"
        )));
    }
    Ok(())
}

/// Shared Kerr quantities: P = X₀/sin²θ and its partials, Σ, r̃.
struct KerrCore {
    p: f64,
    p_r: f64,
    p_th: f64,
    y: f64,
    y_r: f64,
    y_th: f64,
}

fn kerr_core(r: f64, theta: f64, params: &KerrParams) -> KerrCore {
    let jj = params.j;
    let j = jj.abs();
    let j32 = j * j.sqrt();
    let rt = r + j.sqrt();
    let (s, c) = theta.sin_cos();
    let s2 = s * s;
    let sigma = rt * rt + j * c * c;
    let sigma2 = sigma * sigma;

    let p = rt * rt + j + 2.0 * j32 * rt * s2 / sigma;
    let p_r = 2.0 * rt + 2.0 * j32 * s2 * (sigma - 2.0 * rt * rt) / sigma2;
    let p_th = 4.0 * j32 * rt * s * c * (sigma + j * s2) / sigma2;

    let y = 2.0 * jj * (c * c * c - 3.0 * c) - 2.0 * jj * jj * c * s2 * s2 / sigma;
    let y_r = 4.0 * jj * jj * c * s2 * s2 * rt / sigma2;
    let y_th = 6.0 * jj * s * s2
        - 2.0 * jj * jj
            * ((4.0 * c * c * s * s2 - s * s2 * s2) / sigma + 2.0 * j * c * c * s * s2 * s2 / sigma2);

    KerrCore {
        p,
        p_r,
        p_th,
        y,
        y_r,
        y_th,
    }
}

/// The extreme Kerr map (X₀, Y₀) with analytic partials.
pub fn extreme_kerr(r: f64, theta: f64, params: &KerrParams) -> Result<MapSample> {
    check_interior(r, theta)?;
    let (s, c) = theta.sin_cos();
    let core = kerr_core(r, theta, params);
    let s2 = s * s;
    let x = core.p * s2;
    let x_r = core.p_r * s2;
    let x_th = core.p_th * s2 + core.p * 2.0 * s * c;
    let point = TargetPoint::H2(H2Point::new(x, core.y)?);
    Ok(MapSample {
        point,
        partials: [[x_r, x_th], [core.y_r, core.y_th], [0.0; 2], [0.0; 2]],
        omega: None,
    })
}

/// The Brill potentials of the extreme Kerr map:
/// U₀ = log ρ − ½ log X₀ = log r − ½ log P and w₀ = ½ Y₀, with partials.
///
/// Written in the P-form these are regular across the axis, so no guard is
/// applied: grid samplers may evaluate arbitrarily close to Γ.
#[derive(Clone, Copy, Debug)]
pub struct KerrPotentials {
    pub u: f64,
    pub w: f64,
    pub du: [f64; 2],
    pub dw: [f64; 2],
}

pub fn kerr_potentials(r: f64, theta: f64, params: &KerrParams) -> Result<KerrPotentials> {
    if !(r.is_finite() && theta.is_finite()) || r <= 0.0 {
        return Err(Error::Domain(format!(
            "need finite r > 0, got (r, θ) = ({r}, {theta})"
        )));
    }
    let core = kerr_core(r, theta, params);
    Ok(KerrPotentials {
        u: r.ln() - 0.5 * core.p.ln(),
        w: 0.5 * core.y,
        du: [1.0 / r - 0.5 * core.p_r / core.p, -0.5 * core.p_th / core.p],
        dw: [0.5 * core.y_r, 0.5 * core.y_th],
    })
}

/// Shared Kerr-Newman quantities.
struct KnCore {
    q_fn: f64,
    q_r: f64,
    q_th: f64,
    v: f64,
    v_r: f64,
    v_th: f64,
    chi: f64,
    chi_r: f64,
    chi_th: f64,
    psi: f64,
    psi_r: f64,
    psi_th: f64,
}

fn kn_core(r: f64, theta: f64, params: &KerrNewmanParams) -> KnCore {
    let (m, a, q) = (params.m, params.a, params.q);
    let rt = r + m;
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let sigma = rt * rt + a * a * c2;
    let sigma2 = sigma * sigma;
    let sigma_th = -2.0 * a * a * c * s;
    let d = 2.0 * m * rt - q * q;

    let q_fn = rt * rt + a * a + a * a * s2 * d / sigma;
    let q_r = 2.0 * rt + a * a * s2 * (2.0 * m * sigma - 2.0 * rt * d) / sigma2;
    let q_th = 2.0 * a * a * s * c * d * (rt * rt + a * a) / sigma2;

    let n = a * (q * q * rt - m * a * a * s2);
    let n_r = a * q * q;
    let n_th = -2.0 * m * a * a * a * s * c;
    let v = m * a * c * (3.0 - c2) - n * c * s2 / sigma;
    let v_r = -c * s2 * (n_r * sigma - 2.0 * rt * n) / sigma2;
    let v_th = -3.0 * m * a * s * s2
        - ((n_th * c * s2 + n * s * (2.0 * c2 - s2)) * sigma - n * c * s2 * sigma_th) / sigma2;

    let chi = -q * a * rt * s2 / sigma;
    let chi_r = -q * a * s2 * (sigma - 2.0 * rt * rt) / sigma2;
    let chi_th = -2.0 * q * a * rt * s * c * (rt * rt + a * a) / sigma2;

    let psi = q * (rt * rt + a * a) * c / sigma;
    let psi_r = -2.0 * q * a * a * c * rt * s2 / sigma2;
    let psi_th = q * (rt * rt + a * a) * s * (a * a * c2 - rt * rt) / sigma2;

    KnCore {
        q_fn,
        q_r,
        q_th,
        v,
        v_r,
        v_th,
        chi,
        chi_r,
        chi_th,
        psi,
        psi_r,
        psi_th,
    }
}

/// The extreme Kerr-Newman map (u₀, v₀, χ₀, ψ₀) with analytic partials and
/// the assembled ω₀ = Dv₀ + χ₀Dψ₀ − ψ₀Dχ₀.
pub fn extreme_kerr_newman(r: f64, theta: f64, params: &KerrNewmanParams) -> Result<MapSample> {
    check_interior(r, theta)?;
    let s = theta.sin();
    let core = kn_core(r, theta, params);
    let u = -0.5 * core.q_fn.ln() - s.ln();
    let u_r = -0.5 * core.q_r / core.q_fn;
    let u_th = -0.5 * core.q_th / core.q_fn - theta.cos() / s;
    let omega = [
        core.v_r + core.chi * core.psi_r - core.psi * core.chi_r,
        core.v_th + core.chi * core.psi_th - core.psi * core.chi_th,
    ];
    Ok(MapSample {
        point: TargetPoint::Ch2(Ch2Point::new(u, core.v, core.chi, core.psi)?),
        partials: [
            [u_r, u_th],
            [core.v_r, core.v_th],
            [core.chi_r, core.chi_th],
            [core.psi_r, core.psi_th],
        ],
        omega: Some(omega),
    })
}

/// Kerr-Newman fields in the renormalized form used by the energy
/// integrands: U₀ = u₀ + log ρ = log r − ½ log Q and the unchanged
/// (v₀, χ₀, ψ₀), all with partials and ω₀. Regular across the axis.
#[derive(Clone, Copy, Debug)]
pub struct KnPotentials {
    pub cap_u: f64,
    pub v: f64,
    pub chi: f64,
    pub psi: f64,
    pub d_cap_u: [f64; 2],
    pub dv: [f64; 2],
    pub dchi: [f64; 2],
    pub dpsi: [f64; 2],
    pub omega: [f64; 2],
}

pub fn kerr_newman_potentials(
    r: f64,
    theta: f64,
    params: &KerrNewmanParams,
) -> Result<KnPotentials> {
    if !(r.is_finite() && theta.is_finite()) || r <= 0.0 {
        return Err(Error::Domain(format!(
            "need finite r > 0, got (r, θ) = ({r}, {theta})"
        )));
    }
    let core = kn_core(r, theta, params);
    Ok(KnPotentials {
        cap_u: r.ln() - 0.5 * core.q_fn.ln(),
        v: core.v,
        chi: core.chi,
        psi: core.psi,
        d_cap_u: [
            1.0 / r - 0.5 * core.q_r / core.q_fn,
            -0.5 * core.q_th / core.q_fn,
        ],
        dv: [core.v_r, core.v_th],
        dchi: [core.chi_r, core.chi_th],
        dpsi: [core.psi_r, core.psi_th],
        omega: [
            core.v_r + core.chi * core.psi_r - core.psi * core.chi_r,
            core.v_th + core.chi * core.psi_th - core.psi * core.chi_th,
        ],
    })
}

/// Exact axis limit of Y₀: −4J on {z > 0}, +4J on {z < 0}.
pub fn kerr_axis_limit(params: &KerrParams, branch: AxisBranch) -> f64 {
    match branch {
        AxisBranch::ZPositive => -4.0 * params.j,
        AxisBranch::ZNegative => 4.0 * params.j,
    }
}

/// Exact axis limits of (v₀, χ₀, ψ₀): (±2ma, 0, ±q) on {z ≷ 0}.
pub fn kn_axis_limits(params: &KerrNewmanParams, branch: AxisBranch) -> (f64, f64, f64) {
    let sgn = match branch {
        AxisBranch::ZPositive => 1.0,
        AxisBranch::ZNegative => -1.0,
    };
    (sgn * 2.0 * params.m * params.a, 0.0, sgn * params.q)
}

/// Scale regime of an asymptotic-rate claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    RToInfinity,
    RToZero,
    RhoToZero,
}

/// A claimed bound |f| ≤ C ρ^{rho_power} r^{r_power} in some regime.
#[derive(Clone, Copy, Debug)]
pub struct RateSpec {
    pub rho_power: f64,
    pub r_power: f64,
    /// O(·) claims are one-sided: pass when the measured exponent is at
    /// least as favorable as claimed (within slack).
    pub one_sided: bool,
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    pub pass: bool,
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
}

/// Exponent slack accepted by the rate checks.
pub const RATE_TOL: f64 = 0.1;

/// Fit the scaling exponent of `sampler(r, θ)` in the given regime after
/// factoring out the claimed ρ-power (r regimes) or r-power (axis regime),
/// over ≥ 8 geometric scales.
pub fn asymptotic_rate_check(
    sampler: &dyn Fn(f64, f64) -> f64,
    spec: RateSpec,
    regime: Regime,
) -> Result<RateReport> {
    let n_scales = 12;
    let mut scales = Vec::with_capacity(n_scales);
    let mut values = Vec::with_capacity(n_scales);
    match regime {
        Regime::RToInfinity | Regime::RToZero => {
            let thetas: Vec<f64> = (0..9)
                .map(|k| std::f64::consts::PI * (k as f64 + 0.5) / 9.0)
                .collect();
            for k in 0..n_scales {
                let r = match regime {
                    Regime::RToInfinity => 10f64.powf(1.0 + 0.25 * k as f64),
                    _ => 10f64.powf(-1.0 - 0.25 * k as f64),
                };
                let mut worst: f64 = 0.0;
                for &th in &thetas {
                    let rho = r * th.sin();
                    let f = sampler(r, th).abs();
                    if !f.is_finite() {
                        return Err(Error::Data(format!(
                            "non-finite sample at (r, θ) = ({r}, {th})"
                        )));
                    }
                    worst = worst.max(f / rho.powf(spec.rho_power));
                }
                scales.push(r);
                values.push(worst);
            }
        }
        Regime::RhoToZero => {
            let r = 1.37;
            for k in 0..n_scales {
                let theta = 10f64.powf(-0.5 - 0.25 * k as f64);
                let rho = r * theta.sin();
                let f = sampler(r, theta).abs();
                if !f.is_finite() {
                    return Err(Error::Data(format!(
                        "non-finite sample at (r, θ) = ({r}, {theta})"
                    )));
                }
                scales.push(rho);
                values.push(f / r.powf(spec.r_power));
            }
        }
    }
    let fitted = fit_loglog_exponent(&scales, &values);
    let expected = match regime {
        Regime::RhoToZero => spec.rho_power,
        _ => spec.r_power,
    };
    // For one-sided bounds: decay must be at least as fast as claimed
    // (exponent ≤ claimed + tol when the scale grows, ≥ claimed − tol when it
    // shrinks — both regimes reduce to "value_k / scale^expected bounded").
    let pass = if spec.one_sided {
        match regime {
            Regime::RToInfinity => fitted <= expected + RATE_TOL,
            Regime::RToZero | Regime::RhoToZero => fitted >= expected - RATE_TOL,
        }
    } else {
        (fitted - expected).abs() <= RATE_TOL
    };
    Ok(RateReport {
        fitted_exponent: fitted,
        expected_exponent: expected,
        pass,
        scales,
        values,
    })
}
