//! The energy functionals and their boundary identities.
//!
//! Vacuum side, maps (X, Y) into ℍ² with X = e^{g+x}, g = 2 log ρ:
//!
//! ```text
//! M_Ω(x, Y) = ∫_Ω |∂x|² + e^{−2g−2x} |∂Y|² dμ          (reduced energy)
//! E_Ω(X, Y) = ∫_Ω (|∂X|² + |∂Y|²) / X² dμ              (harmonic energy)
//! E_Ω = M_Ω + ∮_{∂Ω} (∂g/∂n)(g + 2x) dσ                 (boundary identity)
//! I_Ω(U, w) = ∫_Ω |DU|² + e^{4U} ρ⁻⁴ |Dw|² dx           (Brill form, U = −x/2, w = Y/2)
//! ```
//!
//! Electromagnetic side, maps Ψ = (U, v, χ, ψ) with ω = Dv + χDψ − ψDχ:
//!
//! ```text
//! I_Ω(Ψ) = ∫_Ω |DU|² + e^{4U} ρ⁻⁴ |ω|² + e^{2U} ρ⁻² (|Dχ|² + |Dψ|²) dx
//! I_Ω = E_Ω(Ψ̃) + ∮_{∂Ω} (∂ log ρ/∂n)(2U + log ρ) dσ,   Ψ̃ = (u = U − log ρ, v, χ, ψ)
//! ```
//!
//! The singular weight is always evaluated as e^{−2x}/ρ⁴ (or e^{4U}/ρ⁴) with
//! the analytic ρ of the node; nodes never sit on Γ. ω is assembled from the
//! component partials at each node rather than by differencing a potential.
//! Every unbounded-region request carries a tail bound fitted from the
//! outermost shells. The ADM mass lower bound is m ≥ I/(8π).

use crate::grid::{AxisymGrid, FaceNormal, Region, ScalarField};
use crate::kerr::{kerr_newman_potentials, kerr_potentials, KerrNewmanParams, KerrParams};
use crate::numerics::{fit_loglog_exponent, fmt_f64, pairwise_sum};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Which functional a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalId {
    /// Reduced vacuum energy M(x, Y).
    ReducedM,
    /// Harmonic map energy E(X, Y) (diverges on Γ for the singular class).
    HarmonicE,
    /// Vacuum Brill functional I(U, w).
    VacuumI,
    /// Electromagnetic functional I(Ψ).
    EmI,
}

impl fmt::Display for FunctionalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalId::ReducedM => write!(f, "M"),
            FunctionalId::HarmonicE => write!(f, "E"),
            FunctionalId::VacuumI => write!(f, "I"),
            FunctionalId::EmI => write!(f, "I_em"),
        }
    }
}

/// Value and per-term breakdown of one functional over one region.
#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub functional: FunctionalId,
    pub region: Region,
    pub value: f64,
    /// Per-term integrals; their sum is `value` (up to summation order).
    pub terms: Vec<f64>,
    /// Estimated truncated-tail contribution for unbounded regions, 0 else.
    pub tail_bound: f64,
}

pub const ENERGY_CSV_HEADER: &str = "functional,region,value,term1,term2,term3,tail_bound";

impl EnergyReport {
    pub fn csv_row(&self) -> String {
        let t = |i: usize| self.terms.get(i).copied().unwrap_or(0.0);
        format!(
            "{},{},{},{},{},{},{}",
            self.functional,
            self.region,
            fmt_f64(self.value),
            fmt_f64(t(0)),
            fmt_f64(t(1)),
            fmt_f64(t(2)),
            fmt_f64(self.tail_bound)
        )
    }
}

/// Tail estimate for a truncated all-space integral: fit the decay of the
/// per-shell integrals Q_i ~ r^t over the outer shells and extend beyond
/// r_max. Infinite when the fitted decay is not integrable.
fn estimate_tail(grid: &AxisymGrid, integrand: &[f64]) -> f64 {
    let ns = grid.n_s();
    let nt = grid.n_theta();
    let shells = 5.min(ns);
    let mut rs = Vec::with_capacity(shells);
    let mut qs = Vec::with_capacity(shells);
    for i in ns - shells..ns {
        let mut q = 0.0;
        for j in 0..nt {
            let k = grid.idx(i, j);
            q += grid.weights()[k] * integrand[k];
        }
        if q > 0.0 {
            rs.push(grid.r(i));
            qs.push(q);
        }
    }
    if qs.len() < 3 {
        return 0.0;
    }
    // Q_i ≈ c r^t Δs with t = 3 − p for integrand ~ r^{−p}
    let t = fit_loglog_exponent(&rs, &qs);
    if !t.is_finite() {
        return 0.0;
    }
    if t >= -0.1 {
        return f64::INFINITY;
    }
    // ∫_{r_max}^∞ c r^{t−1} dr / Δs-normalization = Q_last / (−t Δs) · ...
    let ds = grid.s_nodes()[1] - grid.s_nodes()[0];
    let q_last = *qs.last().unwrap();
    q_last / ds / (-t)
}

fn report(
    grid: &AxisymGrid,
    functional: FunctionalId,
    region: &Region,
    term_integrands: &[Vec<f64>],
) -> Result<EnergyReport> {
    let mut terms = Vec::with_capacity(term_integrands.len());
    for vals in term_integrands {
        terms.push(grid.integrate_values(vals, region)?);
    }
    let value = pairwise_sum(&terms);
    let tail_bound = if matches!(region, Region::All) {
        let total: Vec<f64> = (0..grid.len())
            .map(|k| term_integrands.iter().map(|t| t[k]).sum())
            .collect();
        estimate_tail(grid, &total)
    } else {
        0.0
    };
    Ok(EnergyReport {
        functional,
        region: *region,
        value,
        terms,
        tail_bound,
    })
}

fn same_grid<'a>(a: &'a ScalarField, b: &ScalarField) -> Result<&'a Arc<AxisymGrid>> {
    if !Arc::ptr_eq(a.grid(), b.grid()) {
        return Err(Error::Usage("fields live on different grids".into()));
    }
    Ok(a.grid())
}

/// Reduced energy M_Ω(x, Y) = ∫_Ω |∂x|² + e^{−2g−2x}|∂Y|² dμ.
pub fn reduced_energy_m(x: &ScalarField, y: &ScalarField, region: &Region) -> Result<EnergyReport> {
    let grid = same_grid(x, y)?.clone();
    let gx = x.gradient();
    let gy = y.gradient();
    let mut t1 = vec![0.0; grid.len()];
    let mut t2 = vec![0.0; grid.len()];
    for (i, j, _, _) in grid.nodes() {
        let k = grid.idx(i, j);
        let rho = grid.rho(i, j);
        t1[k] = gx.norm_sq(k);
        t2[k] = (-2.0 * x.values()[k]).exp() / rho.powi(4) * gy.norm_sq(k);
    }
    report(&grid, FunctionalId::ReducedM, region, &[t1, t2])
}

/// Harmonic map energy E_Ω(X, Y) = ∫_Ω (|∂X|² + |∂Y|²)/X² dμ.
/// The region must avoid Γ: E diverges on the axis for the singular class.
pub fn harmonic_energy_e(
    x_cap: &ScalarField,
    y: &ScalarField,
    region: &Region,
) -> Result<EnergyReport> {
    if region.touches_axis() {
        return Err(Error::Domain(format!(
            "harmonic energy needs a region avoiding Γ, got {region}"
        )));
    }
    let grid = same_grid(x_cap, y)?.clone();
    let gx = x_cap.gradient();
    let gy = y.gradient();
    let mut t1 = vec![0.0; grid.len()];
    let mut t2 = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let xx = x_cap.values()[k] * x_cap.values()[k];
        t1[k] = gx.norm_sq(k) / xx;
        t2[k] = gy.norm_sq(k) / xx;
    }
    report(&grid, FunctionalId::HarmonicE, region, &[t1, t2])
}

/// Brill functional I_Ω(U, w) = ∫_Ω |DU|² + e^{4U} ρ⁻⁴ |Dw|² dx.
pub fn functional_i_vacuum(
    u_cap: &ScalarField,
    w: &ScalarField,
    region: &Region,
) -> Result<EnergyReport> {
    let grid = same_grid(u_cap, w)?.clone();
    let gu = u_cap.gradient();
    let gw = w.gradient();
    let mut t1 = vec![0.0; grid.len()];
    let mut t2 = vec![0.0; grid.len()];
    for (i, j, _, _) in grid.nodes() {
        let k = grid.idx(i, j);
        let rho = grid.rho(i, j);
        t1[k] = gu.norm_sq(k);
        t2[k] = (4.0 * u_cap.values()[k]).exp() / rho.powi(4) * gw.norm_sq(k);
    }
    report(&grid, FunctionalId::VacuumI, region, &[t1, t2])
}

/// A map into ℍ²_ℂ sampled on a grid in the renormalized coordinates
/// (U = u + log ρ, v, χ, ψ).
#[derive(Clone, Debug)]
pub struct Ch2Field {
    pub cap_u: ScalarField,
    pub v: ScalarField,
    pub chi: ScalarField,
    pub psi: ScalarField,
}

impl Ch2Field {
    pub fn grid(&self) -> &Arc<AxisymGrid> {
        self.cap_u.grid()
    }

    /// Sample the extreme Kerr-Newman background with analytic partials.
    pub fn kerr_newman(grid: &Arc<AxisymGrid>, params: &KerrNewmanParams) -> Result<Self> {
        let p = *params;
        Ok(Ch2Field {
            cap_u: ScalarField::from_fn_with_partials(grid, &|r, th| {
                let s = kerr_newman_potentials(r, th, &p).unwrap();
                (s.cap_u, s.d_cap_u)
            })?,
            v: ScalarField::from_fn_with_partials(grid, &|r, th| {
                let s = kerr_newman_potentials(r, th, &p).unwrap();
                (s.v, s.dv)
            })?,
            chi: ScalarField::from_fn_with_partials(grid, &|r, th| {
                let s = kerr_newman_potentials(r, th, &p).unwrap();
                (s.chi, s.dchi)
            })?,
            psi: ScalarField::from_fn_with_partials(grid, &|r, th| {
                let s = kerr_newman_potentials(r, th, &p).unwrap();
                (s.psi, s.dpsi)
            })?,
        })
    }

    /// ω = Dv + χDψ − ψDχ per node, physical components (r, θ).
    pub fn omega(&self) -> Vec<[f64; 2]> {
        let gv = self.v.gradient();
        let gchi = self.chi.gradient();
        let gpsi = self.psi.gradient();
        (0..self.grid().len())
            .map(|k| {
                let chi = self.chi.values()[k];
                let psi = self.psi.values()[k];
                [
                    gv.d_r[k] + chi * gpsi.d_r[k] - psi * gchi.d_r[k],
                    gv.d_theta[k] + chi * gpsi.d_theta[k] - psi * gchi.d_theta[k],
                ]
            })
            .collect()
    }
}

/// Electromagnetic functional
/// I_Ω(Ψ) = ∫_Ω |DU|² + e^{4U} ρ⁻⁴ |ω|² + e^{2U} ρ⁻² (|Dχ|² + |Dψ|²) dx.
pub fn em_energy_i(psi: &Ch2Field, region: &Region) -> Result<EnergyReport> {
    let grid = psi.grid().clone();
    let gu = psi.cap_u.gradient();
    let gchi = psi.chi.gradient();
    let gpsi = psi.psi.gradient();
    let omega = psi.omega();
    let mut t1 = vec![0.0; grid.len()];
    let mut t2 = vec![0.0; grid.len()];
    let mut t3 = vec![0.0; grid.len()];
    for (i, j, _, _) in grid.nodes() {
        let k = grid.idx(i, j);
        let rho = grid.rho(i, j);
        let u4 = (4.0 * psi.cap_u.values()[k]).exp();
        let u2 = (2.0 * psi.cap_u.values()[k]).exp();
        t1[k] = gu.norm_sq(k);
        t2[k] = u4 / rho.powi(4) * (omega[k][0] * omega[k][0] + omega[k][1] * omega[k][1]);
        t3[k] = u2 / (rho * rho) * (gchi.norm_sq(k) + gpsi.norm_sq(k));
    }
    report(&grid, FunctionalId::EmI, region, &[t1, t2, t3])
}

/// ∂g/∂n on a face for g = 2 log ρ: ∇g = (2/r) r̂ + (2cotθ/r) θ̂.
fn dg_dn(r: f64, theta: f64, normal: FaceNormal) -> f64 {
    match normal {
        FaceNormal::RPlus => 2.0 / r,
        FaceNormal::RMinus => -2.0 / r,
        FaceNormal::ThetaPlus => 2.0 * theta.cos() / (theta.sin() * r),
        FaceNormal::ThetaMinus => -2.0 * theta.cos() / (theta.sin() * r),
    }
}

/// Defect of the vacuum energy/boundary identity on a region away from Γ:
///
/// ```text
/// E_Ω(X, Y) − M_Ω(x, Y) − ∮_{∂Ω} (∂g/∂n)(g + 2x) dσ
/// ```
///
/// The surface integral runs over the boundary of the same discrete cell
/// union that the volume quadrature uses, so the identity is exact in the
/// continuum for that polytope and the defect is pure discretization error,
/// O(h²) under refinement. `x_eval` supplies x on face midpoints.
pub fn boundary_identity_defect_vacuum(
    x: &ScalarField,
    y: &ScalarField,
    x_eval: &dyn Fn(f64, f64) -> f64,
    region: &Region,
) -> Result<f64> {
    if region.touches_axis() {
        return Err(Error::Domain(format!(
            "the boundary identity needs a region compactly inside ℝ³∖Γ, got {region}"
        )));
    }
    let grid = same_grid(x, y)?.clone();
    // E − M = ∫ |∂g + ∂x|² − |∂x|² dμ: the |∂Y|² terms cancel exactly
    let gx = x.gradient();
    let mut diff = vec![0.0; grid.len()];
    for (i, j, r, th) in grid.nodes() {
        let k = grid.idx(i, j);
        let dgr = 2.0 / r;
        let dgt = 2.0 * th.cos() / (th.sin() * r);
        diff[k] = (gx.d_r[k] + dgr).powi(2) + (gx.d_theta[k] + dgt).powi(2)
            - gx.norm_sq(k);
    }
    let volume = grid.integrate_values(&diff, region)?;
    let faces = grid.region_boundary_faces(region)?;
    let surface = AxisymGrid::surface_integral(&faces, &|r, th, normal| {
        let g = 2.0 * (r * th.sin()).ln();
        dg_dn(r, th, normal) * (g + 2.0 * x_eval(r, th))
    });
    Ok(volume - surface)
}

/// Defect of the electromagnetic identity on a region away from Γ:
///
/// ```text
/// I_Ω(Ψ) − E_Ω(Ψ̃) − ∮_{∂Ω} (∂ log ρ/∂n)(2U + log ρ) dσ
/// ```
///
/// with Ψ̃ = (u = U − log ρ, v, χ, ψ). The ω and (χ, ψ) terms of I and E
/// agree identically, so only the |DU|² − |du|² difference integrates.
pub fn boundary_identity_defect_em(
    psi: &Ch2Field,
    u_eval: &dyn Fn(f64, f64) -> f64,
    region: &Region,
) -> Result<f64> {
    if region.touches_axis() {
        return Err(Error::Domain(format!(
            "the boundary identity needs a region compactly inside ℝ³∖Γ, got {region}"
        )));
    }
    let grid = psi.grid().clone();
    let gu = psi.cap_u.gradient();
    let mut diff = vec![0.0; grid.len()];
    for (i, j, r, th) in grid.nodes() {
        let k = grid.idx(i, j);
        // |DU|² − |D(U − log ρ)|² = 2⟨DU, D log ρ⟩ − |D log ρ|²
        let dlr = 1.0 / r;
        let dlt = th.cos() / (th.sin() * r);
        diff[k] = 2.0 * (gu.d_r[k] * dlr + gu.d_theta[k] * dlt) - (dlr * dlr + dlt * dlt);
    }
    let volume = grid.integrate_values(&diff, region)?;
    let faces = grid.region_boundary_faces(region)?;
    let surface = AxisymGrid::surface_integral(&faces, &|r, th, normal| {
        let lrho = (r * th.sin()).ln();
        0.5 * dg_dn(r, th, normal) * (2.0 * u_eval(r, th) + lrho)
    });
    Ok(volume - surface)
}

/// ADM mass lower bound m ≥ I/(8π).
pub fn mass_lower_bound(i_value: f64) -> Result<f64> {
    if !(i_value >= 0.0) {
        return Err(Error::Domain(format!(
            "mass bound needs a nonnegative energy, got {i_value}"
        )));
    }
    Ok(i_value / (8.0 * std::f64::consts::PI))
}

/// Sample the Kerr background as (x₀, Y₀) fields with analytic partials.
pub fn kerr_xy_fields(
    grid: &Arc<AxisymGrid>,
    params: &KerrParams,
) -> Result<(ScalarField, ScalarField)> {
    let p = *params;
    let x = ScalarField::from_fn_with_partials(grid, &|r, th| {
        let s = kerr_potentials(r, th, &p).unwrap();
        (-2.0 * s.u, [-2.0 * s.du[0], -2.0 * s.du[1]])
    })?;
    let y = ScalarField::from_fn_with_partials(grid, &|r, th| {
        let s = kerr_potentials(r, th, &p).unwrap();
        (2.0 * s.w, [2.0 * s.dw[0], 2.0 * s.dw[1]])
    })?;
    Ok((x, y))
}

/// Sample the Kerr background as (U₀, w₀) fields with analytic partials.
pub fn kerr_uw_fields(
    grid: &Arc<AxisymGrid>,
    params: &KerrParams,
) -> Result<(ScalarField, ScalarField)> {
    let p = *params;
    let u = ScalarField::from_fn_with_partials(grid, &|r, th| {
        let s = kerr_potentials(r, th, &p).unwrap();
        (s.u, s.du)
    })?;
    let w = ScalarField::from_fn_with_partials(grid, &|r, th| {
        let s = kerr_potentials(r, th, &p).unwrap();
        (s.w, s.dw)
    })?;
    Ok((u, w))
}

/// Assemble X = e^{g + x} with partials from an x-field (g = 2 log ρ).
pub fn x_to_cap_x(x: &ScalarField) -> Result<ScalarField> {
    let grid = x.grid().clone();
    let parts = x.partials();
    let mut values = Vec::with_capacity(grid.len());
    let mut partials = Vec::with_capacity(grid.len());
    for (i, j, r, th) in grid.nodes() {
        let k = grid.idx(i, j);
        let rho = r * th.sin();
        let cap_x = rho * rho * x.values()[k].exp();
        values.push(cap_x);
        if let Some(p) = parts {
            let dgr = 2.0 / r;
            let dgt = 2.0 * th.cos() / th.sin();
            partials.push([cap_x * (dgr + p[k][0]), cap_x * (dgt + p[k][1])]);
        }
    }
    let mut f = ScalarField::from_values(grid, values)?;
    if parts.is_some() {
        f.set_partials(partials);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, bump_perturbation, BumpKind, GridSpec};
    use crate::numerics::SplitMix64;

    fn default_grid(n: usize) -> Arc<AxisymGrid> {
        build_grid(&GridSpec::new(0.05, 40.0, n, n / 2)).unwrap()
    }

    #[test]
    fn constants_give_zero_energy() {
        let g = default_grid(32);
        let c1 = ScalarField::from_fn(&g, &|_, _| 1.2).unwrap();
        let c2 = ScalarField::from_fn(&g, &|_, _| -0.4).unwrap();
        let m = reduced_energy_m(&c1, &c2, &Region::All).unwrap();
        assert_eq!(m.value, 0.0);
        let omega = Region::Omega {
            big_r: 10.0,
            eps: 0.5,
        };
        let e = harmonic_energy_e(&c1, &c2, &omega).unwrap();
        assert_eq!(e.value, 0.0);
        let i = functional_i_vacuum(&c1, &c2, &Region::All).unwrap();
        assert_eq!(i.value, 0.0);
        let psi = Ch2Field {
            cap_u: c1.clone(),
            v: c2.clone(),
            chi: c1.clone(),
            psi: c2.clone(),
        };
        let iem = em_energy_i(&psi, &Region::All).unwrap();
        assert_eq!(iem.value, 0.0);
    }

    #[test]
    fn breakdown_sums_to_value() {
        let g = default_grid(32);
        let params = KerrParams::new(1.0).unwrap();
        let (x, y) = kerr_xy_fields(&g, &params).unwrap();
        let rep = reduced_energy_m(
            &x,
            &y,
            &Region::Annulus {
                big_r: 10.0,
                eps: 0.1,
            },
        )
        .unwrap();
        let sum: f64 = rep.terms.iter().sum();
        assert!((rep.value - sum).abs() <= 1e-12 * rep.value.abs());
        assert!(rep.terms.iter().all(|t| *t >= 0.0));
    }

    #[test]
    fn kerr_reduced_energy_is_finite_and_stable() {
        let params = KerrParams::new(1.0).unwrap();
        let region = Region::Annulus {
            big_r: 10.0,
            eps: 0.1,
        };
        let mut vals = Vec::new();
        for n in [64usize, 128] {
            let g = default_grid(n);
            let (x, y) = kerr_xy_fields(&g, &params).unwrap();
            vals.push(reduced_energy_m(&x, &y, &region).unwrap().value);
        }
        assert!(vals[0] > 0.0 && vals[0].is_finite());
        assert!(
            (vals[1] - vals[0]).abs() < 1e-3 * vals[1].abs() * 10.0,
            "M values {vals:?}"
        );
    }

    #[test]
    fn harmonic_energy_of_rho_squared_matches_closed_form() {
        // X = ρ² (x ≡ 0), Y = 0: E = ∫ |∂g|² = ∫ 4/ρ² over Ω_{R,ε}
        let g = build_grid(&GridSpec::new(0.05, 12.0, 256, 256)).unwrap();
        let x = ScalarField::from_fn_with_partials(&g, &|r, th| {
            let rho = r * th.sin();
            (rho * rho, [2.0 * r * th.sin() * th.sin(), 2.0 * r * r * th.sin() * th.cos()])
        })
        .unwrap();
        let y = ScalarField::zeros(&g);
        let (big_r, eps) = (10.0, 0.5);
        let rep = harmonic_energy_e(&x, &y, &Region::Omega { big_r, eps }).unwrap();
        let anti = |a: f64, rho: f64| {
            let s = (a * a - rho * rho).sqrt();
            s - a * ((a + s) / rho).ln()
        };
        let exact = 16.0 * std::f64::consts::PI * (anti(big_r, big_r.min(big_r)) - anti(big_r, eps));
        let exact = -exact; // anti(R, R) = 0, integral = −16π anti(R, ε)
        assert!(
            (rep.value - exact).abs() < 0.02 * exact,
            "E = {} vs closed form {exact}",
            rep.value
        );
    }

    #[test]
    fn e_rejects_axis_regions() {
        let g = default_grid(16);
        let c = ScalarField::from_fn(&g, &|_, _| 1.0).unwrap();
        assert!(harmonic_energy_e(&c, &c, &Region::Ball { radius: 2.0 }).is_err());
    }

    #[test]
    fn i_equals_quarter_m_exactly() {
        // I(U, w) = ¼ M(x = −2U, Y = 2w) holds discretely because the
        // integrands match pointwise
        let g = default_grid(48);
        let mut rng = SplitMix64::new(9);
        let region = Region::Annulus {
            big_r: 8.0,
            eps: 0.25,
        };
        let omega = Region::Omega {
            big_r: 8.0,
            eps: 0.25,
        };
        let _ = rng.next_u64();
        let u = bump_perturbation(&g, &region, 0.8, 21, BumpKind::Alpha).unwrap().remove(0);
        let w = bump_perturbation(&g, &omega, 0.5, 22, BumpKind::Y).unwrap().remove(0);
        let i_rep = functional_i_vacuum(&u, &w, &Region::All).unwrap();
        let x = u.add_scaled(&ScalarField::zeros(&g), 0.0).unwrap();
        let x = x.scale(-2.0);
        let y2 = w.scale(2.0);
        let m_rep = reduced_energy_m(&x, &y2, &Region::All).unwrap();
        assert!(
            (4.0 * i_rep.value - m_rep.value).abs() <= 1e-12 * m_rep.value.abs(),
            "4I = {} vs M = {}",
            4.0 * i_rep.value,
            m_rep.value
        );
    }

    #[test]
    fn em_reduces_to_vacuum_when_chi_psi_vanish() {
        let g = default_grid(48);
        let omega = Region::Omega {
            big_r: 8.0,
            eps: 0.25,
        };
        let region = Region::Annulus {
            big_r: 8.0,
            eps: 0.25,
        };
        let u = bump_perturbation(&g, &region, 0.6, 31, BumpKind::Alpha).unwrap().remove(0);
        let v = bump_perturbation(&g, &omega, 0.4, 32, BumpKind::Y).unwrap().remove(0);
        let psi = Ch2Field {
            cap_u: u.clone(),
            v: v.clone(),
            chi: ScalarField::zeros(&g),
            psi: ScalarField::zeros(&g),
        };
        let em = em_energy_i(&psi, &Region::All).unwrap();
        let vac = functional_i_vacuum(&u, &v, &Region::All).unwrap();
        assert_eq!(em.terms[0], vac.terms[0]);
        assert_eq!(em.terms[1], vac.terms[1]);
        assert_eq!(em.terms[2], 0.0);
    }

    #[test]
    fn kn_zero_charge_matches_kerr_i() {
        let g = default_grid(48);
        let kn = KerrNewmanParams::new(1.0, 1.0, 0.0).unwrap();
        let kerr = KerrParams::new(1.0).unwrap();
        let region = Region::Omega {
            big_r: 10.0,
            eps: 0.2,
        };
        let psi = Ch2Field::kerr_newman(&g, &kn).unwrap();
        let em = em_energy_i(&psi, &region).unwrap();
        let (u, w) = kerr_uw_fields(&g, &kerr).unwrap();
        let vac = functional_i_vacuum(&u, &w, &region).unwrap();
        assert!(
            (em.value - vac.value).abs() < 1e-10 * vac.value,
            "I_em = {} vs I = {}",
            em.value,
            vac.value
        );
    }

    #[test]
    fn boundary_identity_trivial_and_kerr() {
        // M = 0 case: X = ρ², both sides equal the pure-g surface term
        let region = Region::Omega {
            big_r: 5.0,
            eps: 0.5,
        };
        let mut defects = Vec::new();
        for n in [48usize, 96] {
            let g = build_grid(&GridSpec::new(0.1, 8.0, n, n)).unwrap();
            let x = ScalarField::zeros(&g);
            let y = ScalarField::zeros(&g);
            let d = boundary_identity_defect_vacuum(&x, &y, &|_, _| 0.0, &region).unwrap();
            defects.push(d.abs());
        }
        assert!(defects[1] < defects[0] || defects[1] < 1e-12, "{defects:?}");

        let params = KerrParams::new(1.0).unwrap();
        let region = Region::Omega {
            big_r: 10.0,
            eps: 0.2,
        };
        let mut defects = Vec::new();
        let mut scale = 0.0;
        for n in [48usize, 96] {
            let g = build_grid(&GridSpec::new(0.1, 12.0, n, n)).unwrap();
            let (x, y) = kerr_xy_fields(&g, &params).unwrap();
            let d = boundary_identity_defect_vacuum(
                &x,
                &y,
                &|r, th| -2.0 * kerr_potentials(r, th, &params).unwrap().u,
                &region,
            )
            .unwrap();
            defects.push(d.abs());
            if n == 96 {
                let (u, w) = kerr_uw_fields(&g, &params).unwrap();
                scale = 4.0 * functional_i_vacuum(&u, &w, &region).unwrap().value;
            }
        }
        // decays under refinement and small against E ≈ M + boundary scale
        assert!(
            defects[1] < 0.6 * defects[0],
            "defects do not decay: {defects:?}"
        );
        assert!(defects[1] < 0.01 * scale, "defect {} vs scale {scale}", defects[1]);
    }

    #[test]
    fn mass_bound_values() {
        assert_eq!(mass_lower_bound(0.0).unwrap(), 0.0);
        assert!((mass_lower_bound(8.0 * std::f64::consts::PI).unwrap() - 1.0).abs() < 1e-15);
        assert!(mass_lower_bound(-1.0).is_err());
        // Kerr: increasing lower bounds on expanding regions by positivity
        let g = build_grid(&GridSpec::new(0.01, 400.0, 160, 64)).unwrap();
        let params = KerrParams::new(1.0).unwrap();
        let (u, w) = kerr_uw_fields(&g, &params).unwrap();
        let mut prev = 0.0;
        for big_r in [5.0, 20.0, 100.0, 390.0] {
            let rep = functional_i_vacuum(&u, &w, &Region::Ball { radius: big_r }).unwrap();
            let bound = mass_lower_bound(rep.value).unwrap();
            assert!(bound >= prev - 1e-12, "bound {bound} after {prev}");
            prev = bound;
        }
        assert!(prev > 0.5, "Kerr J=1 mass bound too small: {prev}");
    }

    #[test]
    fn region_monotonicity() {
        let g = default_grid(32);
        let params = KerrParams::new(1.0).unwrap();
        let (u, w) = kerr_uw_fields(&g, &params).unwrap();
        let small = functional_i_vacuum(
            &u,
            &w,
            &Region::Annulus {
                big_r: 5.0,
                eps: 0.5,
            },
        )
        .unwrap();
        let large = functional_i_vacuum(
            &u,
            &w,
            &Region::Annulus {
                big_r: 20.0,
                eps: 0.2,
            },
        )
        .unwrap();
        assert!(small.value <= large.value + 1e-12);
    }

    #[test]
    fn all_region_reports_tail() {
        let g = default_grid(64);
        let params = KerrParams::new(1.0).unwrap();
        let (u, w) = kerr_uw_fields(&g, &params).unwrap();
        let rep = functional_i_vacuum(&u, &w, &Region::All).unwrap();
        assert!(rep.tail_bound.is_finite() && rep.tail_bound > 0.0);
        assert!(rep.tail_bound < 0.1 * rep.value, "tail {}", rep.tail_bound);
    }

    #[test]
    fn csv_row_shape() {
        let rep = EnergyReport {
            functional: FunctionalId::VacuumI,
            region: Region::All,
            value: 1.5,
            terms: vec![1.0, 0.5],
            tail_bound: 0.0,
        };
        assert_eq!(ENERGY_CSV_HEADER.split(',').count(), rep.csv_row().split(',').count());
    }
}
