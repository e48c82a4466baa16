//! Axisymmetric grids, the integration regions, singular-weight quadrature,
//! finite-difference gradients and compactly supported bump generators.
//!
//! Grids are tensor products of a uniform partition in s = log r and a
//! partition of (0, π) in θ with nodes at cell midpoints, so no node ever
//! lies on the axis Γ or at the origin. Quadrature weights are the exact
//! integrals of the volume element 2π r² sinθ dr dθ over each cell, which
//! makes the total weight equal the exact shell volume (telescoping) while
//! midpoint sampling of the integrand keeps the rule second order, linear
//! and monotone.

use crate::numerics::{pairwise_sum, smoothstep5, smoothstep5_deriv, SplitMix64};
use crate::{Error, Result};
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Uniform-grid build request.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Self {
        GridSpec {
            r_min,
            r_max,
            n_r,
            n_theta,
        }
    }

    /// The same span at `factor`× the resolution.
    pub fn refined(&self, factor: usize) -> Self {
        GridSpec {
            n_r: self.n_r * factor,
            n_theta: self.n_theta * factor,
            ..*self
        }
    }
}

/// Logarithmic-spherical tensor grid with exact cell-volume weights.
#[derive(Clone, Debug)]
pub struct AxisymGrid {
    s_nodes: Vec<f64>,
    theta_nodes: Vec<f64>,
    r_nodes: Vec<f64>,
    /// Cell edges; absent on grids reconstructed from CSV, which support
    /// quadrature and gradients but not boundary-face integrals.
    s_edges: Option<Vec<f64>>,
    theta_edges: Option<Vec<f64>>,
    /// weights[i * n_theta + j], exact cell volumes.
    weights: Vec<f64>,
    r_min: f64,
    r_max: f64,
}

impl AxisymGrid {
    pub fn n_s(&self) -> usize {
        self.s_nodes.len()
    }
    pub fn n_theta(&self) -> usize {
        self.theta_nodes.len()
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn r_min(&self) -> f64 {
        self.r_min
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn s_nodes(&self) -> &[f64] {
        &self.s_nodes
    }
    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta_nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_theta() + j
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        self.r_nodes[i]
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        self.theta_nodes[j]
    }

    /// Cylindrical radius ρ = r sinθ at a node.
    #[inline]
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.r_nodes[i] * self.theta_nodes[j].sin()
    }

    /// (i, j, r, θ) of every node in index order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let nt = self.n_theta();
        (0..self.len())
            .map(move |k| (k / nt, k % nt, self.r_nodes[k / nt], self.theta_nodes[k % nt]))
    }

    /// Membership mask of a region over the nodes.
    pub fn region_mask(&self, region: &Region) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for (i, j, r, theta) in self.nodes() {
            mask[self.idx(i, j)] = region.contains(r, theta);
        }
        mask
    }

    /// Weighted sum of per-node values over a region.
    pub fn integrate_values(&self, values: &[f64], region: &Region) -> Result<f64> {
        self.check_coverage(region)?;
        debug_assert_eq!(values.len(), self.len());
        let mask = self.region_mask(region);
        let terms: Vec<f64> = (0..self.len())
            .map(|k| if mask[k] { self.weights[k] * values[k] } else { 0.0 })
            .collect();
        Ok(pairwise_sum(&terms))
    }

    fn check_coverage(&self, region: &Region) -> Result<()> {
        if let Some(outer) = region.outer_radius() {
            if outer > self.r_max * (1.0 + 1e-9) {
                return Err(Error::Coverage(format!(
                    "region {region} extends to r = {outer} but the grid ends at r_max = {}; \
                     uncovered range ({}, {outer}]",
                    self.r_max, self.r_max
                )));
            }
        }
        Ok(())
    }

    /// Faces of the region's discrete boundary (the boundary of the union of
    /// cells whose nodes lie in the region), with exact face areas. Needs a
    /// grid built by a builder (not reconstructed from CSV).
    pub fn region_boundary_faces(&self, region: &Region) -> Result<Vec<BoundaryFace>> {
        let (s_edges, theta_edges) = match (&self.s_edges, &self.theta_edges) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Usage(
                    "boundary faces need cell edges; this grid was reconstructed from CSV".into(),
                ))
            }
        };
        self.check_coverage(region)?;
        let mask = self.region_mask(region);
        let ns = self.n_s();
        let nt = self.n_theta();
        let inside = |i: isize, j: isize| -> bool {
            if i < 0 || j < 0 || i >= ns as isize || j >= nt as isize {
                false
            } else {
                mask[i as usize * nt + j as usize]
            }
        };
        let mut faces = Vec::new();
        for i in 0..ns {
            for j in 0..nt {
                if !mask[self.idx(i, j)] {
                    continue;
                }
                let (ii, jj) = (i as isize, j as isize);
                // r-faces: spheres r = exp(s_edge)
                for (di, normal) in [(-1isize, FaceNormal::RMinus), (1, FaceNormal::RPlus)] {
                    if !inside(ii + di, jj) {
                        let edge = if di < 0 { s_edges[i] } else { s_edges[i + 1] };
                        let rf = edge.exp();
                        let band = theta_edges[j].cos() - theta_edges[j + 1].cos();
                        faces.push(BoundaryFace {
                            r: rf,
                            theta: self.theta_nodes[j],
                            area: 2.0 * std::f64::consts::PI * rf * rf * band,
                            normal,
                        });
                    }
                }
                // θ-faces: cones θ = theta_edge
                for (dj, normal) in [(-1isize, FaceNormal::ThetaMinus), (1, FaceNormal::ThetaPlus)]
                {
                    if !inside(ii, jj + dj) {
                        let tf = if dj < 0 { theta_edges[j] } else { theta_edges[j + 1] };
                        let (r0, r1) = (s_edges[i].exp(), s_edges[i + 1].exp());
                        faces.push(BoundaryFace {
                            r: self.r_nodes[i],
                            theta: tf,
                            area: std::f64::consts::PI * tf.sin() * (r1 * r1 - r0 * r0),
                            normal,
                        });
                    }
                }
            }
        }
        Ok(faces)
    }

    /// Midpoint surface integral over boundary faces.
    pub fn surface_integral(faces: &[BoundaryFace], f: &dyn Fn(f64, f64, FaceNormal) -> f64) -> f64 {
        let terms: Vec<f64> = faces
            .iter()
            .map(|face| face.area * f(face.r, face.theta, face.normal))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Outward normal direction of a discrete boundary face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceNormal {
    RPlus,
    RMinus,
    ThetaPlus,
    ThetaMinus,
}

/// One face of a discrete region boundary, with its exact area and midpoint.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryFace {
    pub r: f64,
    pub theta: f64,
    pub area: f64,
    pub normal: FaceNormal,
}

fn build_from_edges(s_edges: Vec<f64>, theta_edges: Vec<f64>) -> AxisymGrid {
    let ns = s_edges.len() - 1;
    let nt = theta_edges.len() - 1;
    let s_nodes: Vec<f64> = (0..ns).map(|i| 0.5 * (s_edges[i] + s_edges[i + 1])).collect();
    let theta_nodes: Vec<f64> = (0..nt)
        .map(|j| 0.5 * (theta_edges[j] + theta_edges[j + 1]))
        .collect();
    let r_nodes: Vec<f64> = s_nodes.iter().map(|s| s.exp()).collect();
    // exact cell volumes: 2π · Δ(r³)/3 · Δ(−cosθ)
    let radial: Vec<f64> = (0..ns)
        .map(|i| {
            let r0 = s_edges[i].exp();
            let r1 = s_edges[i + 1].exp();
            (r1 * r1 * r1 - r0 * r0 * r0) / 3.0
        })
        .collect();
    let angular: Vec<f64> = (0..nt)
        .map(|j| theta_edges[j].cos() - theta_edges[j + 1].cos())
        .collect();
    let mut weights = vec![0.0; ns * nt];
    for i in 0..ns {
        for j in 0..nt {
            weights[i * nt + j] = 2.0 * std::f64::consts::PI * radial[i] * angular[j];
        }
    }
    let r_min = s_edges[0].exp();
    let r_max = s_edges[ns].exp();
    AxisymGrid {
        s_nodes,
        theta_nodes,
        r_nodes,
        s_edges: Some(s_edges),
        theta_edges: Some(theta_edges),
        weights,
        r_min,
        r_max,
    }
}

/// Build the standard grid: uniform cells in s = log r, and θ nodes at
/// midpoints of a uniform partition of (0, π).
pub fn build_grid(spec: &GridSpec) -> Result<Arc<AxisymGrid>> {
    if !(spec.r_min > 0.0 && spec.r_max > spec.r_min) || spec.n_r < 8 || spec.n_theta < 8 {
        return Err(Error::Config(format!(
            "invalid grid spec: need 0 < r_min < r_max and n_r, n_theta ≥ 8, \
             got r ∈ [{}, {}], {}×{}",
            spec.r_min, spec.r_max, spec.n_r, spec.n_theta
        )));
    }
    let (s0, s1) = (spec.r_min.ln(), spec.r_max.ln());
    let s_edges: Vec<f64> = (0..=spec.n_r)
        .map(|i| s0 + (s1 - s0) * i as f64 / spec.n_r as f64)
        .collect();
    let theta_edges: Vec<f64> = (0..=spec.n_theta)
        .map(|j| std::f64::consts::PI * j as f64 / spec.n_theta as f64)
        .collect();
    Ok(Arc::new(build_from_edges(s_edges, theta_edges)))
}

/// Build a grid whose θ partition is geometric below 0.5 rad near both axis
/// ends (log-uniform down to `theta_floor`) and uniform in between. The
/// cut-and-paste studies need log-resolution in ρ inside the axis wedge,
/// which a uniform partition cannot afford at small ε.
pub fn build_axis_graded_grid(
    r_min: f64,
    r_max: f64,
    n_r: usize,
    theta_floor: f64,
    cells_per_decade: usize,
    n_mid: usize,
) -> Result<Arc<AxisymGrid>> {
    let half = std::f64::consts::FRAC_PI_2;
    if !(r_min > 0.0 && r_max > r_min)
        || n_r < 8
        || n_mid < 4
        || cells_per_decade < 2
        || !(theta_floor > 0.0 && theta_floor < 0.1)
    {
        return Err(Error::Config(format!(
            "invalid graded grid: r ∈ [{r_min}, {r_max}], n_r = {n_r}, \
             θ_floor = {theta_floor}, {cells_per_decade}/decade, n_mid = {n_mid}"
        )));
    }
    let theta_break = 0.5;
    let decades = (theta_break / theta_floor).log10();
    let n_log = (decades * cells_per_decade as f64).ceil() as usize;
    let ratio = (theta_break / theta_floor).powf(1.0 / n_log as f64);
    // half partition: [0, θ_floor], geometric to θ_break, uniform to π/2
    let mut half_edges = vec![0.0, theta_floor];
    for k in 1..=n_log {
        half_edges.push(theta_floor * ratio.powi(k as i32));
    }
    *half_edges.last_mut().unwrap() = theta_break;
    for k in 1..=n_mid {
        half_edges.push(theta_break + (half - theta_break) * k as f64 / n_mid as f64);
    }
    *half_edges.last_mut().unwrap() = half;
    // mirror onto (π/2, π)
    let mut theta_edges = half_edges.clone();
    for k in (0..half_edges.len() - 1).rev() {
        theta_edges.push(std::f64::consts::PI - half_edges[k]);
    }
    let (s0, s1) = (r_min.ln(), r_max.ln());
    let s_edges: Vec<f64> = (0..=n_r)
        .map(|i| s0 + (s1 - s0) * i as f64 / n_r as f64)
        .collect();
    Ok(Arc::new(build_from_edges(s_edges, theta_edges)))
}

/// One of the integration domains, with membership exactly as printed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// B_R = {r < R}
    Ball { radius: f64 },
    /// A_{R,ε} = B_R ∖ B_ε
    Annulus { big_r: f64, eps: f64 },
    /// Ω_{R,ε} = A_{R,ε} ∖ C_ε with C_ε = {ρ ≤ ε}
    Omega { big_r: f64, eps: f64 },
    /// C_{δ,ε} = {ρ ≤ ε} ∩ {δ ≤ r ≤ 2/δ}
    Cylinder { delta: f64, eps: f64 },
    /// W_{δ,ε} = {ε ≤ ρ ≤ √ε} ∩ {δ ≤ r ≤ 2/δ}
    Wedge { delta: f64, eps: f64 },
    /// Ω_{δ,ε} = {δ < r < 2/δ, ρ > ε}
    OmegaDeltaEps { delta: f64, eps: f64 },
    /// A_{δ,ε} = B_{2/δ} ∖ Ω_{δ,ε}
    ComplementA { delta: f64, eps: f64 },
    /// The whole grid (truncated ℝ³; callers report tail bounds).
    All,
}

impl Region {
    pub fn contains(&self, r: f64, theta: f64) -> bool {
        let rho = r * theta.sin();
        match *self {
            Region::Ball { radius } => r < radius,
            Region::Annulus { big_r, eps } => eps <= r && r < big_r,
            Region::Omega { big_r, eps } => eps <= r && r < big_r && rho > eps,
            Region::Cylinder { delta, eps } => rho <= eps && delta <= r && r <= 2.0 / delta,
            Region::Wedge { delta, eps } => {
                eps <= rho && rho <= eps.sqrt() && delta <= r && r <= 2.0 / delta
            }
            Region::OmegaDeltaEps { delta, eps } => delta < r && r < 2.0 / delta && rho > eps,
            Region::ComplementA { delta, eps } => {
                r < 2.0 / delta && !Region::OmegaDeltaEps { delta, eps }.contains(r, theta)
            }
            Region::All => true,
        }
    }

    /// Largest radius the region reaches, None for All.
    pub fn outer_radius(&self) -> Option<f64> {
        match *self {
            Region::Ball { radius } => Some(radius),
            Region::Annulus { big_r, .. } | Region::Omega { big_r, .. } => Some(big_r),
            Region::Cylinder { delta, .. }
            | Region::Wedge { delta, .. }
            | Region::OmegaDeltaEps { delta, .. }
            | Region::ComplementA { delta, .. } => Some(2.0 / delta),
            Region::All => None,
        }
    }

    /// Whether the closure of the region touches the axis Γ.
    pub fn touches_axis(&self) -> bool {
        matches!(
            self,
            Region::Ball { .. }
                | Region::Annulus { .. }
                | Region::Cylinder { .. }
                | Region::ComplementA { .. }
                | Region::All
        )
    }

    /// Parse the CLI syntax: `ball:R`, `annulus:R:eps`, `omega:R:eps`,
    /// `cylinder:delta:eps`, `wedge:delta:eps`, `omegade:delta:eps`,
    /// `complement:delta:eps`, `all`.
    pub fn parse(text: &str) -> Result<Region> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{s}' in region '{text}'")))
        };
        let region = match parts.as_slice() {
            ["all"] => Region::All,
            ["ball", r] => Region::Ball { radius: num(r)? },
            ["annulus", r, e] => Region::Annulus {
                big_r: num(r)?,
                eps: num(e)?,
            },
            ["omega", r, e] => Region::Omega {
                big_r: num(r)?,
                eps: num(e)?,
            },
            ["cylinder", d, e] => Region::Cylinder {
                delta: num(d)?,
                eps: num(e)?,
            },
            ["wedge", d, e] => Region::Wedge {
                delta: num(d)?,
                eps: num(e)?,
            },
            ["omegade", d, e] => Region::OmegaDeltaEps {
                delta: num(d)?,
                eps: num(e)?,
            },
            ["complement", d, e] => Region::ComplementA {
                delta: num(d)?,
                eps: num(e)?,
            },
            _ => return Err(Error::Config(format!("unrecognized region '{text}'"))),
        };
        Ok(region)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Region::Ball { radius } => write!(f, "ball:{radius}"),
            Region::Annulus { big_r, eps } => write!(f, "annulus:{big_r}:{eps}"),
            Region::Omega { big_r, eps } => write!(f, "omega:{big_r}:{eps}"),
            Region::Cylinder { delta, eps } => write!(f, "cylinder:{delta}:{eps}"),
            Region::Wedge { delta, eps } => write!(f, "wedge:{delta}:{eps}"),
            Region::OmegaDeltaEps { delta, eps } => write!(f, "omegade:{delta}:{eps}"),
            Region::ComplementA { delta, eps } => write!(f, "complement:{delta}:{eps}"),
            Region::All => write!(f, "all"),
        }
    }
}

/// A scalar field sampled on a grid, with optional analytic (r, θ) partials.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<AxisymGrid>,
    values: Vec<f64>,
    partials: Option<Vec<[f64; 2]>>,
}

impl ScalarField {
    pub fn from_values(grid: Arc<AxisymGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("field contains non-finite values".into()));
        }
        Ok(ScalarField {
            grid,
            values,
            partials: None,
        })
    }

    pub fn from_fn(grid: &Arc<AxisymGrid>, f: &dyn Fn(f64, f64) -> f64) -> Result<Self> {
        let values = grid.nodes().map(|(_, _, r, th)| f(r, th)).collect();
        Self::from_values(grid.clone(), values)
    }

    /// Sample a function that also returns analytic partials (∂_r, ∂_θ).
    pub fn from_fn_with_partials(
        grid: &Arc<AxisymGrid>,
        f: &dyn Fn(f64, f64) -> (f64, [f64; 2]),
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let mut partials = Vec::with_capacity(grid.len());
        for (_, _, r, th) in grid.nodes() {
            let (v, d) = f(r, th);
            values.push(v);
            partials.push(d);
        }
        let mut field = Self::from_values(grid.clone(), values)?;
        field.partials = Some(partials);
        Ok(field)
    }

    pub fn zeros(grid: &Arc<AxisymGrid>) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            partials: Some(vec![[0.0; 2]; grid.len()]),
        }
    }

    pub fn grid(&self) -> &Arc<AxisymGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn partials(&self) -> Option<&[[f64; 2]]> {
        self.partials.as_deref()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Pointwise linear combination self + c·other on the same grid.
    pub fn add_scaled(&self, other: &ScalarField, c: f64) -> Result<ScalarField> {
        if !Arc::ptr_eq(&self.grid, &other.grid) {
            return Err(Error::Usage("fields live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        let partials = match (&self.partials, &other.partials) {
            (Some(pa), Some(pb)) => Some(
                pa.iter()
                    .zip(pb)
                    .map(|(a, b)| [a[0] + c * b[0], a[1] + c * b[1]])
                    .collect(),
            ),
            _ => None,
        };
        Ok(ScalarField {
            grid: self.grid.clone(),
            values,
            partials,
        })
    }

    /// Pointwise c·self.
    pub fn scale(&self, c: f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            partials: self
                .partials
                .as_ref()
                .map(|p| p.iter().map(|d| [c * d[0], c * d[1]]).collect()),
        }
    }

    pub(crate) fn set_partials(&mut self, partials: Vec<[f64; 2]>) {
        debug_assert_eq!(partials.len(), self.values.len());
        self.partials = Some(partials);
    }

    /// Sup of |f| over all nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Gradient as physical components (∂_r f, r⁻¹ ∂_θ f) per node: analytic
    /// partials when present, otherwise 2nd-order centered differences in
    /// (s, θ) with one-sided 2nd-order stencils at the patch edges.
    pub fn gradient(&self) -> Gradient {
        let nt = self.grid.n_theta();
        let ns = self.grid.n_s();
        let mut d_r = vec![0.0; self.grid.len()];
        let mut d_theta = vec![0.0; self.grid.len()];
        if let Some(parts) = &self.partials {
            for (i, j, r, _) in self.grid.nodes() {
                let k = self.grid.idx(i, j);
                d_r[k] = parts[k][0];
                d_theta[k] = parts[k][1] / r;
            }
            return Gradient { d_r, d_theta };
        }
        let ds = self.grid.s_nodes[1] - self.grid.s_nodes[0];
        for j in 0..nt {
            for i in 0..ns {
                let k = self.grid.idx(i, j);
                let v = |ii: usize| self.values[self.grid.idx(ii, j)];
                // difference forms so constants give exactly zero
                let df_ds = if i == 0 {
                    (4.0 * (v(1) - v(0)) - (v(2) - v(0))) / (2.0 * ds)
                } else if i == ns - 1 {
                    (4.0 * (v(ns - 1) - v(ns - 2)) - (v(ns - 1) - v(ns - 3))) / (2.0 * ds)
                } else {
                    (v(i + 1) - v(i - 1)) / (2.0 * ds)
                };
                d_r[k] = df_ds / self.grid.r_nodes[i];
            }
        }
        // θ-direction (possibly non-uniform): 3-point stencils exact on quadratics
        for i in 0..ns {
            for j in 0..nt {
                let k = self.grid.idx(i, j);
                let (j0, j1, j2) = if j == 0 {
                    (0, 1, 2)
                } else if j == nt - 1 {
                    (nt - 3, nt - 2, nt - 1)
                } else {
                    (j - 1, j, j + 1)
                };
                let (x0, x1, x2) = (
                    self.grid.theta_nodes[j0],
                    self.grid.theta_nodes[j1],
                    self.grid.theta_nodes[j2],
                );
                let (f0, f1, f2) = (
                    self.values[self.grid.idx(i, j0)],
                    self.values[self.grid.idx(i, j1)],
                    self.values[self.grid.idx(i, j2)],
                );
                let x = self.grid.theta_nodes[j];
                // derivative of the Lagrange quadratic through the three
                // nodes, written in difference form so constants give zero
                let a = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
                let c = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
                let df = a * (f0 - f1) + c * (f2 - f1);
                d_theta[k] = df / self.grid.r_nodes[i];
            }
        }
        Gradient { d_r, d_theta }
    }

    /// ∫_region f dμ with the grid weights.
    pub fn integrate(&self, region: &Region) -> Result<f64> {
        self.grid.integrate_values(&self.values, region)
    }
}

/// Physical gradient components (∂_r f, r⁻¹ ∂_θ f) per node.
pub struct Gradient {
    pub d_r: Vec<f64>,
    pub d_theta: Vec<f64>,
}

impl Gradient {
    /// |∇f|² at node k.
    #[inline]
    pub fn norm_sq(&self, k: usize) -> f64 {
        self.d_r[k] * self.d_r[k] + self.d_theta[k] * self.d_theta[k]
    }
}

/// Which perturbation a bump generator produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpKind {
    /// α = Δx-type bump, compactly supported in an annulus A_{R,ε}.
    Alpha,
    /// y = ΔY-type bump, compactly supported in Ω_{R,ε} (away from Γ).
    Y,
    /// (Δv, Δχ, Δψ) tuple, each supported in Ω_{R,ε}.
    EmTuple,
}

/// Deterministic C² bump with sup-norm = amplitude, supported in `region`,
/// built from quintic smoothstep windows in (log r, log ρ) with a seeded
/// center, width, sign and cosθ-modulation. Returns one field for Alpha/Y
/// and three for EmTuple.
pub fn bump_perturbation(
    grid: &Arc<AxisymGrid>,
    region: &Region,
    amplitude: f64,
    profile_seed: u64,
    kind: BumpKind,
) -> Result<Vec<ScalarField>> {
    match (kind, region) {
        (BumpKind::Alpha, Region::Annulus { .. }) => {}
        (BumpKind::Y | BumpKind::EmTuple, Region::Omega { .. }) => {}
        _ => {
            return Err(Error::Usage(format!(
                "bump kind {kind:?} is not admissible on region {region}; \
                 α-bumps need an annulus, Y/EM bumps an omega region"
            )))
        }
    }
    let count = if kind == BumpKind::EmTuple { 3 } else { 1 };
    let mut rng = SplitMix64::new(profile_seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(single_bump(grid, region, amplitude, &mut rng, kind)?);
    }
    Ok(out)
}

fn single_bump(
    grid: &Arc<AxisymGrid>,
    region: &Region,
    amplitude: f64,
    rng: &mut SplitMix64,
    kind: BumpKind,
) -> Result<ScalarField> {
    let (r_outer, r_inner) = match *region {
        Region::Annulus { big_r, eps } | Region::Omega { big_r, eps } => (big_r, eps),
        _ => unreachable!(),
    };
    let (s_lo, s_hi) = (r_inner.ln(), r_outer.ln());
    // seeded sub-window [a, b] of the admissible log-radial span
    let span = s_hi - s_lo;
    let w = rng.uniform(0.4, 0.9) * span;
    let c = rng.uniform(s_lo + 0.5 * w, s_hi - 0.5 * w);
    let (a, b) = (c - 0.5 * w, c + 0.5 * w);
    // θ-modulation: smooth polynomial in cosθ bounded away from 0
    let (m1, m2, m3) = (
        rng.uniform(-0.25, 0.25),
        rng.uniform(-0.25, 0.25),
        rng.uniform(-0.25, 0.25),
    );
    let sign = rng.sign();
    // axis window for Y-type bumps: rises over ρ ∈ [ε, ρ₁]
    let rho1 = r_inner * rng.uniform(2.0, 4.0);
    let (u_lo, u_hi) = (r_inner.ln(), rho1.ln());
    let needs_axis_window = kind != BumpKind::Alpha;
    let half_w = 0.5 * (b - a);

    let raw = |r: f64, theta: f64| -> (f64, [f64; 2]) {
        let s = r.ln();
        let rise = smoothstep5((s - a) / half_w);
        let fall = smoothstep5((b - s) / half_w);
        let s_win = rise * fall;
        let ds_win = (smoothstep5_deriv((s - a) / half_w) * fall
            - rise * smoothstep5_deriv((b - s) / half_w))
            / half_w;
        let cth = theta.cos();
        let m = 1.0 + m1 * cth + m2 * cth * cth + m3 * cth * cth * cth;
        let dm_dth = -(theta.sin()) * (m1 + 2.0 * m2 * cth + 3.0 * m3 * cth * cth);
        let (t, dt_du) = if needs_axis_window {
            let u = (r * theta.sin()).ln();
            let xu = (u - u_lo) / (u_hi - u_lo);
            (smoothstep5(xu), smoothstep5_deriv(xu) / (u_hi - u_lo))
        } else {
            (1.0, 0.0)
        };
        let val = sign * s_win * m * t;
        // u = log ρ = s + log sinθ: ∂u/∂r = 1/r, ∂u/∂θ = cotθ
        let d_r = sign * (ds_win * m * t + s_win * m * dt_du) / r;
        let d_th = sign * (s_win * dm_dth * t + s_win * m * dt_du * (cth / theta.sin()));
        (val, [d_r, d_th])
    };

    let field = ScalarField::from_fn_with_partials(grid, &raw)?;
    let max = field.sup_norm();
    if amplitude == 0.0 || max == 0.0 {
        return Ok(ScalarField::zeros(grid));
    }
    let scale = amplitude / max;
    let values = field.values.iter().map(|v| v * scale).collect();
    let partials = field
        .partials
        .as_ref()
        .map(|p| p.iter().map(|d| [d[0] * scale, d[1] * scale]).collect());
    Ok(ScalarField {
        grid: grid.clone(),
        values,
        partials,
    })
}

/// Write fields to CSV with header `s,theta,weight,<names...>`; floats use
/// the shortest round-trip representation so the file is bit-exact.
pub fn write_fields_csv<W: Write>(
    out: &mut W,
    grid: &AxisymGrid,
    fields: &[(&str, &ScalarField)],
) -> std::io::Result<()> {
    write!(out, "s,theta,weight")?;
    for (name, _) in fields {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for (i, j, _, _) in grid.nodes() {
        let k = grid.idx(i, j);
        write!(
            out,
            "{},{},{}",
            grid.s_nodes[i], grid.theta_nodes[j], grid.weights[k]
        )?;
        for (_, f) in fields {
            write!(out, ",{}", f.values[k])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Read a CSV produced by [`write_fields_csv`]. The reconstructed grid
/// supports quadrature and gradients (nodes and weights are authoritative);
/// boundary-face operations are not available on it.
pub fn read_fields_csv<R: BufRead>(
    input: R,
) -> Result<(Arc<AxisymGrid>, Vec<(String, ScalarField)>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Data("empty CSV".into()))?
        .map_err(|e| Error::Data(e.to_string()))?;
    let cols: Vec<String> = header.split(',').map(|s| s.to_string()).collect();
    if cols.len() < 3 || cols[0] != "s" || cols[1] != "theta" || cols[2] != "weight" {
        return Err(Error::Data(format!(
            "expected header s,theta,weight,<values>, got '{header}'"
        )));
    }
    let mut s_vals = Vec::new();
    let mut theta_vals = Vec::new();
    let mut weights = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); cols.len() - 3];
    for line in lines {
        let line = line.map_err(|e| Error::Data(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != cols.len() {
            return Err(Error::Data(format!("ragged CSV row '{line}'")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|e| Error::Data(e.to_string())))
            .collect::<Result<_>>()?;
        s_vals.push(nums[0]);
        theta_vals.push(nums[1]);
        weights.push(nums[2]);
        for (c, col) in columns.iter_mut().enumerate() {
            col.push(nums[3 + c]);
        }
    }
    // infer the tensor structure: θ varies fastest within a fixed s
    let mut nt = 0;
    for &s in &s_vals {
        if s != s_vals[0] {
            break;
        }
        nt += 1;
    }
    if nt == 0 || s_vals.len() % nt != 0 {
        return Err(Error::Data("CSV rows do not form a tensor grid".into()));
    }
    let ns = s_vals.len() / nt;
    let s_nodes: Vec<f64> = (0..ns).map(|i| s_vals[i * nt]).collect();
    let theta_nodes: Vec<f64> = theta_vals[..nt].to_vec();
    let r_nodes: Vec<f64> = s_nodes.iter().map(|s| s.exp()).collect();
    let grid = Arc::new(AxisymGrid {
        r_min: r_nodes[0],
        r_max: *r_nodes.last().unwrap(),
        s_nodes,
        theta_nodes,
        r_nodes,
        s_edges: None,
        theta_edges: None,
        weights,
    });
    let fields = cols[3..]
        .iter()
        .zip(columns)
        .map(|(name, vals)| ScalarField::from_values(grid.clone(), vals).map(|f| (name.clone(), f)))
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, fields))
}
