//! Geometry of the two target spaces: the hyperbolic right half-plane ℍ²
//! with metric (dX² + dY²)/X², and the complex hyperbolic plane ℍ²_ℂ with
//! metric du² + e⁴ᵘ(dv + χdψ − ψdχ)² + e²ᵘ(dχ² + dψ²).
//!
//! ℍ² admits closed-form distances and geodesics; ℍ²_ℂ geodesics are solved
//! as boundary-value problems by shooting on the geodesic ODE. Curvature of
//! either target is measured generically from a metric sampler by finite
//! differences, which doubles as the validation oracle for the analytic
//! Christoffel symbols.

mod ch2;
mod curvature;
mod h2;

pub use ch2::{
    ch2_christoffels, ch2_distance, ch2_exp_samples, ch2_geodesic, ch2_metric,
    ch2_metric_inverse, ch2_metric_partials, ch2_norm_sq, ch2_shoot, Ch2Point,
};
pub use curvature::{
    kato_margin, sectional_curvature, Ch2MetricSampler, H2MetricSampler, MetricSampler,
};
pub use h2::{
    h2_distance, h2_distance_ode, h2_geodesic, h2_geodesic_curve, h2_geodesic_velocity, H2Point,
};

/// A point of either target space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetPoint {
    H2(H2Point),
    Ch2(Ch2Point),
}

/// One sample along a geodesic: parameter, point and coordinate velocity
/// (the first two velocity slots are used for ℍ²).
#[derive(Clone, Copy, Debug)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: TargetPoint,
    pub velocity: [f64; 4],
}

/// A solved constant-speed geodesic segment γ: [0,1] → target.
#[derive(Clone, Debug)]
pub struct GeodesicCurve {
    pub endpoints: (TargetPoint, TargetPoint),
    pub samples: Vec<GeodesicSample>,
    /// Total metric length, equal to the constant speed ‖γ′‖.
    pub length: f64,
}

impl GeodesicCurve {
    /// Maximum relative deviation of the sampled metric speed from `length`.
    /// Zero-length curves report 0.
    pub fn speed_defect(&self) -> f64 {
        if self.length == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for s in &self.samples {
            let speed = match s.point {
                TargetPoint::H2(p) => {
                    ((s.velocity[0] * s.velocity[0] + s.velocity[1] * s.velocity[1]).sqrt()) / p.x()
                }
                TargetPoint::Ch2(p) => ch2_norm_sq(&p, &s.velocity).sqrt(),
            };
            worst = worst.max((speed - self.length).abs());
        }
        worst / self.length
    }
}
