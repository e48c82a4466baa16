//! Shared numerical utilities: deterministic summation, the reproducibility
//! RNG, smoothstep profiles, finite-difference stencils and least-squares
//! exponent fits.

/// Pairwise (cascade) summation over a slice.
///
/// Deterministic for a fixed element order and accurate to O(log n) ulps,
/// which is what makes CSV outputs byte-stable across runs and thread counts.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// SplitMix64: the fixed 64-bit mixing generator used for every seeded choice
/// in the crate. Small, documented and identical on all platforms, so a seed
/// fully determines a perturbation.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Random sign, ±1.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Quintic smoothstep: 0 for x ≤ 0, 1 for x ≥ 1, C² monotone in between with
/// S'(1/2) = 15/8 the maximal slope.
pub fn smoothstep5(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// Derivative of [`smoothstep5`].
pub fn smoothstep5_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        30.0 * x * x * (1.0 - x) * (1.0 - x)
    }
}

/// C² window that is 0 outside (0,1), 1 on [a, 1-a], smoothstepped in between.
pub fn window5(x: f64, a: f64) -> f64 {
    smoothstep5(x / a) * smoothstep5((1.0 - x) / a)
}

/// Least-squares slope of ln(y) against ln(x).
///
/// The standard log-log exponent fit used by every rate check. Requires the
/// samples to be positive; nonpositive pairs are skipped.
pub fn fit_loglog_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Solve a small (n ≤ 8) dense linear system in place by Gaussian elimination
/// with partial pivoting. Returns None when the pivot collapses.
pub fn solve_small(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}

/// Centered 5-point second derivative at step h.
pub fn second_derivative_5pt(fm2: f64, fm1: f64, f0: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
}

/// One-sided 5-point first derivative at step h (points f(x), f(x+h), ..., f(x+4h)).
pub fn forward_derivative_5pt(f0: f64, f1: f64, f2: f64, f3: f64, f4: f64, h: f64) -> f64 {
    (-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) / (12.0 * h)
}

/// One Richardson level for an O(h⁴) estimator: combines D(h) and D(h/2).
pub fn richardson_h4(d_h: f64, d_h2: f64) -> f64 {
    (16.0 * d_h2 - d_h) / 15.0
}

/// Format a float with the shortest representation that round-trips bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // keep integral values unambiguous in CSV columns
        format!("{:.1}", x)
    } else {
        format!("{}", x)
    }
}
