//! Closed-form constants and first-moment formulas for the crossing process
//! in dimension three.
//!
//! The mean number of crossings in a region `A` of a plane is approximated
//! by `(1/8)·c·t⁴·r⁸·f(A)`, where `f(A)` integrates the squared chord length
//! of the ball over `A` and `c` is a dimensional constant. Two values of `c`
//! are provided:
//!
//! * [`c_d_constant`], the reference constant `8π·κ₁²·B(3, 3/2)² =
//!   8192π/11025`. [`expected_crossings`] and [`ModelConstants::c_d`] use it.
//! * [`crossing_kernel_constant`], the integral `∫∫ |a' × b'| da db` over
//!   pairs of points of the unit ball, where `'` is projection onto a
//!   plane. This is the constant obtained when the mean is derived directly
//!   (the edge offsets `a`, `b` sweep a parallelogram of area `|a' × b'|`),
//!   and it equals `2π·κ₁²·B(3/2, 3/2)² = π³/8`. Simulated crossing counts
//!   follow this value; see [`expected_crossings_kernel`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{require, Error, Result};
use crate::geometry::{
    chord_length_at, BallWindow, Point2, ProjectionPlane, Region2, SpherePoint, Vec3,
};
use crate::math;
use crate::quadrature::integrate;

/// Dimension of the ambient space. Everything here is specific to it.
pub const DIMENSION: u32 = 3;

/// Volume of the one-dimensional unit ball, `κ₁ = 2`.
pub const KAPPA_1: f64 = 2.0;

/// Absolute tolerance used by [`f_region`].
pub const F_REGION_TOLERANCE: f64 = 1e-10;

/// Largest log-regime exponent for which existence of a crossing-free
/// plane is established.
pub const LOG_REGIME_EXPONENT_LIMIT: f64 = 0.125;

/// Γ(a)Γ(b)/Γ(a+b).
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    require(
        a > 0.0 && a.is_finite(),
        "beta argument a",
        "positive and finite",
        a,
    )?;
    require(
        b > 0.0 && b.is_finite(),
        "beta argument b",
        "positive and finite",
        b,
    )?;
    if a + b < 170.0 {
        Ok(math::tgamma(a) * math::tgamma(b) / math::tgamma(a + b))
    } else {
        Ok(math::exp(
            math::lgamma(a) + math::lgamma(b) - math::lgamma(a + b),
        ))
    }
}

/// `8π·κ₁²·B(3, 3/2)²` in reduced closed form, `8192π/11025`.
pub fn c_d_constant() -> f64 {
    8192.0 * PI / 11025.0
}

/// The same constant assembled from [`beta_function`].
pub fn c_d_from_beta() -> f64 {
    let b = beta_function(3.0, 1.5).expect("valid arguments");
    8.0 * PI * KAPPA_1 * KAPPA_1 * b * b
}

/// `∫∫_{B³×B³} |a' × b'| da db = π³/8`.
pub fn crossing_kernel_constant() -> f64 {
    PI * PI * PI / 8.0
}

/// [`crossing_kernel_constant`] through the Beta function: in cylindrical
/// coordinates the radial factor is `∫₀¹ ρ²·κ₁√(1-ρ²) dρ = κ₁·B(3/2, 3/2)/2`
/// and the angular factor `∫∫|sin(φ - ψ)| dφ dψ = 8π`.
pub fn crossing_kernel_from_beta() -> f64 {
    let radial = KAPPA_1 * beta_function(1.5, 1.5).expect("valid arguments") / 2.0;
    8.0 * PI * radial * radial
}

/// `∫_{L} λ₁((q + L^⊥) ∩ W)² dq = 2πR⁴` over a whole plane.
pub fn f_full_plane(window: &BallWindow) -> f64 {
    let r2 = window.radius() * window.radius();
    2.0 * PI * r2 * r2
}

/// Squared chord length integrated over `region ∩ disk(R)` by nested
/// adaptive quadrature.
///
/// By the symmetry of the ball the value does not depend on which plane
/// the region lives in; `plane` only fixes the coordinate frame.
pub fn f_region(window: &BallWindow, _plane: &ProjectionPlane, region: &Region2) -> Result<f64> {
    region.validate()?;
    let big_r = window.radius();
    let r2 = big_r * big_r;

    // Outer variable u; the inner v-range is the region's slice clipped to
    // the ball's shadow |v| ≤ √(R² - u²).
    type Slice = alloc::boxed::Box<dyn Fn(f64) -> (f64, f64)>;
    let (u_lo, u_hi, mut breaks, slice): (f64, f64, Vec<f64>, Slice) = match *region {
        Region2::Rect {
            u_min,
            u_max,
            v_min,
            v_max,
        } => {
            let mut breaks = Vec::new();
            for v in [v_min, v_max] {
                if math::abs(v) < big_r {
                    let u = math::sqrt(r2 - v * v);
                    breaks.extend([-u, u]);
                }
            }
            (
                u_min.max(-big_r),
                u_max.min(big_r),
                breaks,
                alloc::boxed::Box::new(move |_u: f64| (v_min, v_max)),
            )
        }
        Region2::Disk { center, radius } => {
            let breaks = circle_intersections_u(center, radius, big_r);
            (
                (center.u - radius).max(-big_r),
                (center.u + radius).min(big_r),
                breaks,
                alloc::boxed::Box::new(move |u: f64| {
                    let w =
                        math::sqrt((radius * radius - (u - center.u) * (u - center.u)).max(0.0));
                    (center.v - w, center.v + w)
                }),
            )
        }
    };
    if u_lo >= u_hi {
        return Ok(0.0);
    }

    let inner = |u: f64| -> f64 {
        let h = math::sqrt((r2 - u * u).max(0.0));
        let (a, b) = slice(u);
        let lo = a.max(-h);
        let hi = b.min(h);
        if lo >= hi {
            return 0.0;
        }
        // Cubic in v, so one Gauss–Kronrod panel is exact up to rounding.
        integrate(
            |v| {
                let c = chord_length_at(u * u + v * v, big_r);
                c * c
            },
            lo,
            hi,
            1e-14,
        )
        .unwrap_or(f64::NAN)
    };

    breaks.retain(|b| *b > u_lo && *b < u_hi);
    breaks.push(u_lo);
    breaks.push(u_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let pieces = (breaks.len() - 1) as f64;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate(&inner, w[0], w[1], 0.1 * F_REGION_TOLERANCE / pieces)?;
    }
    if !total.is_finite() {
        return Err(Error::Quadrature {
            tolerance: F_REGION_TOLERANCE,
            estimate: f64::INFINITY,
        });
    }
    Ok(total)
}

// u-coordinates where the circle |q - c| = ρ meets |q| = R.
fn circle_intersections_u(center: Point2, rho: f64, big_r: f64) -> Vec<f64> {
    let d2 = center.norm_squared();
    let d = math::sqrt(d2);
    let mut out = Vec::new();
    if d == 0.0 || d > rho + big_r || d < math::abs(rho - big_r) {
        return out;
    }
    // Distance from origin along the center direction to the chord.
    let a = (big_r * big_r - rho * rho + d2) / (2.0 * d);
    let h = math::sqrt((big_r * big_r - a * a).max(0.0));
    let (eu, ev) = (center.u / d, center.v / d);
    out.push(a * eu - h * ev);
    out.push(a * eu + h * ev);
    out
}

/// Mean-crossing approximation `(1/8)·c_d·t⁴·r⁸·f(A)` with the reference
/// constant [`c_d_constant`]. `region = None` means the whole plane.
pub fn expected_crossings(
    t: f64,
    r: f64,
    window: &BallWindow,
    region: Option<&Region2>,
) -> Result<f64> {
    intensity_with(c_d_constant(), t, r, window, region)
}

/// Same first-moment formula with [`crossing_kernel_constant`] in place of
/// `c_d`.
pub fn expected_crossings_kernel(
    t: f64,
    r: f64,
    window: &BallWindow,
    region: Option<&Region2>,
) -> Result<f64> {
    intensity_with(crossing_kernel_constant(), t, r, window, region)
}

fn intensity_with(
    constant: f64,
    t: f64,
    r: f64,
    window: &BallWindow,
    region: Option<&Region2>,
) -> Result<f64> {
    require(
        t >= 0.0 && t.is_finite(),
        "intensity t",
        "non-negative and finite",
        t,
    )?;
    require(
        r >= 0.0 && r.is_finite(),
        "connection radius",
        "non-negative and finite",
        r,
    )?;
    let f = match region {
        None => f_full_plane(window),
        Some(region) => f_region(window, &reference_plane(), region)?,
    };
    let t2 = t * t;
    let r4 = r * r * r * r;
    Ok(constant * t2 * t2 * r4 * r4 * f / 8.0)
}

fn reference_plane() -> ProjectionPlane {
    ProjectionPlane::from_sphere_point(SpherePoint::new(Vec3::E3).expect("unit"))
}

/// How the connection radius scales with the intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeSpec {
    /// `t²·r⁴ = c`: expected crossings per plane stay constant in `t`.
    Constant(f64),
    /// `r = (c'·ln t / t⁴)^{1/8}`: the existence regime.
    Log(f64),
}

impl RegimeSpec {
    pub fn parameter(&self) -> f64 {
        match *self {
            RegimeSpec::Constant(c) | RegimeSpec::Log(c) => c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.parameter();
        require(
            p > 0.0 && p.is_finite(),
            "regime parameter",
            "positive and finite",
            p,
        )
    }

    /// For the log regime, the exponent `c = (1/8)·c'·c_d·f_full` such that
    /// the mean crossing count per plane is `c·ln t`.
    pub fn log_exponent(&self, window: &BallWindow) -> Option<f64> {
        match *self {
            RegimeSpec::Log(c_prime) => Some(log_exponent(c_prime, window)),
            RegimeSpec::Constant(_) => None,
        }
    }

    /// True for a log regime whose exponent is at least 1/8.
    pub fn outside_existence_regime(&self, window: &BallWindow) -> bool {
        self.log_exponent(window)
            .is_some_and(|c| c >= LOG_REGIME_EXPONENT_LIMIT)
    }
}

/// `(1/8)·c'·c_d·f_full`.
pub fn log_exponent(c_prime: f64, window: &BallWindow) -> f64 {
    c_prime * c_d_constant() * f_full_plane(window) / 8.0
}

/// Inverse of [`log_exponent`].
pub fn c_prime_for_exponent(c: f64, window: &BallWindow) -> f64 {
    8.0 * c / (c_d_constant() * f_full_plane(window))
}

/// Open interval `(c, 1/4 - c)` of admissible α, empty when `c ≥ 1/8`.
pub fn admissible_alpha_window(c: f64) -> Option<(f64, f64)> {
    let hi = 0.25 - c;
    (c < hi).then_some((c, hi))
}

pub fn radius_for_regime(t: f64, spec: RegimeSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        RegimeSpec::Constant(c) => {
            require(
                t > 0.0 && t.is_finite(),
                "intensity t",
                "positive and finite",
                t,
            )?;
            Ok(math::sqrt(math::sqrt(c / (t * t))))
        }
        RegimeSpec::Log(c_prime) => {
            require(
                t > 1.0 && t.is_finite(),
                "intensity t",
                "greater than 1 for the log regime",
                t,
            )?;
            let t2 = t * t;
            Ok(math::pow(c_prime * math::ln(t) / (t2 * t2), 0.125))
        }
    }
}

/// `1 - (1 - e^{-M})^m`: probability that one of `m` independent planes,
/// each crossing-free with probability `e^{-M}`, is crossing-free.
pub fn geometric_cdf(m: u32, mean: f64) -> f64 {
    let miss = 1.0 - math::exp(-mean);
    1.0 - libm::pow(miss, m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerm {
    pub label: &'static str,
    pub value: f64,
}

/// Order terms (no constants) of the single-plane variance and of the
/// two-plane covariance bound, for log-log slope diagnostics.
pub fn bound_terms(t: f64, r: f64, alpha: f64) -> Result<Vec<BoundTerm>> {
    require(t > 0.0, "intensity t", "positive", t)?;
    require(r > 0.0, "connection radius", "positive", r)?;
    require(alpha >= 0.0, "alpha", "non-negative", alpha)?;
    let d = DIMENSION as i32;
    let term = |tp: f64, rp: i32| math::exp(tp * math::ln(t) + rp as f64 * math::ln(r));
    Ok(alloc::vec![
        BoundTerm {
            label: "var t^7 r^(4d+4)",
            value: term(7.0, 4 * d + 4)
        },
        BoundTerm {
            label: "var t^6 r^(3d+4)",
            value: term(6.0, 3 * d + 4)
        },
        BoundTerm {
            label: "var t^6 r^(4d+2)",
            value: term(6.0, 4 * d + 2)
        },
        BoundTerm {
            label: "var t^5 r^(3d+2)",
            value: term(5.0, 3 * d + 2)
        },
        BoundTerm {
            label: "cov t^6 r^(3d+4)",
            value: term(6.0, 3 * d + 4)
        },
        BoundTerm {
            label: "cov t^(4+alpha d) r^(3d)",
            value: term(4.0 + alpha * d as f64, 3 * d)
        },
    ])
}

/// Height `2r / sin(angle/2)` of the region where two cylinders of radius
/// `r` around lines at the given angle overlap.
pub fn two_cylinder_height(r: f64, angle: f64) -> Result<f64> {
    require(angle > 0.0 && angle <= PI, "angle", "in (0, π]", angle)?;
    Ok(2.0 * r / math::sin(angle / 2.0))
}

/// The constants of the model in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    pub d: u32,
    pub radius: f64,
    pub kappa1: f64,
    pub beta_3_32: f64,
    pub c_d: f64,
    pub crossing_kernel: f64,
    pub f_full: f64,
}

impl ModelConstants {
    pub fn for_window(window: &BallWindow) -> Self {
        ModelConstants {
            d: DIMENSION,
            radius: window.radius(),
            kappa1: KAPPA_1,
            beta_3_32: beta_function(3.0, 1.5).expect("valid arguments"),
            c_d: c_d_constant(),
            crossing_kernel: crossing_kernel_constant(),
            f_full: f_full_plane(window),
        }
    }

    pub fn unit_ball() -> Self {
        Self::for_window(&BallWindow::unit_volume())
    }

    /// `(1/8)·c_d·c²·f_full`, the constant-regime mean.
    pub fn constant_regime_mean(&self, c: f64) -> f64 {
        self.c_d * c * c * self.f_full / 8.0
    }

    pub fn constant_regime_mean_kernel(&self, c: f64) -> f64 {
        self.crossing_kernel * c * c * self.f_full / 8.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn plane() -> ProjectionPlane {
        reference_plane()
    }

    #[test]
    fn beta_examples() {
        assert!(close(beta_function(1.0, 1.0).unwrap(), 1.0, 1e-15));
        assert!(close(beta_function(3.0, 1.5).unwrap(), 16.0 / 105.0, 1e-14));
        // Γ(3/2)²/Γ(3) = π/8.
        assert!(close(beta_function(1.5, 1.5).unwrap(), PI / 8.0, 1e-14));
        for (a, b) in [(0.7, 2.3), (5.5, 0.5), (9.0, 1.25)] {
            assert!(close(
                beta_function(a, b).unwrap(),
                beta_function(b, a).unwrap(),
                1e-15
            ));
        }
        assert!(beta_function(0.0, 1.0).is_err());
        assert!(beta_function(1.0, -2.0).is_err());
    }

    #[test]
    fn gamma_at_half_integers() {
        // Γ(n + 1/2) = (2n)! √π / (4ⁿ n!).
        let sqrt_pi = PI.sqrt();
        let mut fact = [1.0f64; 21];
        for k in 1..21 {
            fact[k] = fact[k - 1] * k as f64;
        }
        for n in 0..10usize {
            let exact = fact[2 * n] * sqrt_pi / (4f64.powi(n as i32) * fact[n]);
            let g = math::tgamma(n as f64 + 0.5);
            assert!(((g - exact) / exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn c_d_two_paths() {
        assert!(close(c_d_constant(), c_d_from_beta(), 1e-12));
        assert!(close(c_d_constant(), 2.334_32, 1e-5));
        assert!(c_d_constant() > 0.0);
    }

    #[test]
    fn crossing_kernel_two_paths() {
        assert!(close(
            crossing_kernel_constant(),
            crossing_kernel_from_beta(),
            1e-12
        ));
    }

    #[test]
    fn f_full_examples() {
        let w = BallWindow::unit_volume();
        assert!(close(f_full_plane(&w), 0.930_53, 1e-5));
        let w2 = BallWindow::with_radius(2.0 * w.radius()).unwrap();
        assert!(close(f_full_plane(&w2), 16.0 * f_full_plane(&w), 1e-12));
    }

    #[test]
    fn f_region_whole_disk_matches_closed_form() {
        let w = BallWindow::unit_volume();
        let full = f_region(&w, &plane(), &Region2::centered_disk(w.radius())).unwrap();
        assert!(close(full, f_full_plane(&w), 1e-9), "{full}");
        let big = f_region(&w, &plane(), &Region2::centered_disk(10.0)).unwrap();
        assert!(close(big, f_full_plane(&w), 1e-9));
        let inf = Region2::Rect {
            u_min: f64::NEG_INFINITY,
            u_max: f64::INFINITY,
            v_min: f64::NEG_INFINITY,
            v_max: f64::INFINITY,
        };
        assert!(close(
            f_region(&w, &plane(), &inf).unwrap(),
            f_full_plane(&w),
            1e-9
        ));
    }

    #[test]
    fn f_region_half_radius_disk_matches_radial_oracle() {
        let w = BallWindow::unit_volume();
        let big_r = w.radius();
        // Radial oracle: ∫₀^{R/2} 4(R² - ρ²)·2πρ dρ, by a separate 1-D
        // quadrature.
        let oracle = integrate(
            |rho| 4.0 * (big_r * big_r - rho * rho) * 2.0 * PI * rho,
            0.0,
            big_r / 2.0,
            1e-14,
        )
        .unwrap();
        assert!(close(oracle, 7.0 * PI * big_r.powi(4) / 8.0, 1e-13));
        let v = f_region(&w, &plane(), &Region2::centered_disk(big_r / 2.0)).unwrap();
        assert!(close(v, oracle, 1e-10), "{v} vs {oracle}");
        assert!(close(v, 0.407_11, 1e-5));
    }

    #[test]
    fn f_region_empty_and_offset() {
        let w = BallWindow::unit_volume();
        assert_eq!(
            f_region(&w, &plane(), &Region2::centered_disk(0.0)).unwrap(),
            0.0
        );
        let outside = Region2::Rect {
            u_min: 1.0,
            u_max: 2.0,
            v_min: 0.0,
            v_max: 1.0,
        };
        assert_eq!(f_region(&w, &plane(), &outside).unwrap(), 0.0);
        // Off-center disk straddling the shadow boundary: compare against a
        // fine midpoint grid.
        let region = Region2::Disk {
            center: Point2::new(0.5, 0.1),
            radius: 0.3,
        };
        let v = f_region(&w, &plane(), &region).unwrap();
        let n = 1500;
        let (lo, hi) = (0.2, 0.8);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let q = Point2::new(lo + (i as f64 + 0.5) * h, -0.2 + (j as f64 + 0.5) * h);
                if region.contains(q) {
                    let c = chord_length_at(q.norm_squared(), w.radius());
                    acc += c * c * h * h;
                }
            }
        }
        assert!(close(v, acc, 2e-4), "{v} vs {acc}");
    }

    #[test]
    fn f_region_tiling_is_additive() {
        let w = BallWindow::unit_volume();
        let cuts = [f64::NEG_INFINITY, -0.4, -0.05, 0.2, 0.55, f64::INFINITY];
        let mut sum = 0.0;
        for a in cuts.windows(2) {
            for b in cuts.windows(2) {
                let rect = Region2::Rect {
                    u_min: a[0],
                    u_max: a[1],
                    v_min: b[0],
                    v_max: b[1],
                };
                sum += f_region(&w, &plane(), &rect).unwrap();
            }
        }
        assert!(close(sum, f_full_plane(&w), 1e-8));
    }

    #[test]
    fn expected_crossings_examples() {
        let w = BallWindow::unit_volume();
        let t = 2000.0;
        let r = radius_for_regime(t, RegimeSpec::Constant(1.0)).unwrap();
        let m = expected_crossings(t, r, &w, None).unwrap();
        assert!(close(m, 0.271_51, 1e-5), "{m}");
        assert!(close(
            m,
            ModelConstants::unit_ball().constant_regime_mean(1.0),
            1e-12
        ));
        assert_eq!(expected_crossings(t, 0.0, &w, None).unwrap(), 0.0);
        let r2 = radius_for_regime(t, RegimeSpec::Constant(2.0)).unwrap();
        assert!(close(
            expected_crossings(t, r2, &w, None).unwrap(),
            4.0 * m,
            1e-12
        ));
        // Independent of t in the constant regime.
        let t3 = 500.0;
        let r3 = radius_for_regime(t3, RegimeSpec::Constant(1.0)).unwrap();
        assert!(close(
            expected_crossings(t3, r3, &w, None).unwrap(),
            m,
            1e-12
        ));
        // Homogeneous of degree 8 in r.
        assert!(close(
            expected_crossings(t, 1.5 * r, &w, None).unwrap(),
            1.5f64.powi(8) * m,
            1e-12
        ));
    }

    #[test]
    fn radius_examples() {
        let r = radius_for_regime(1e4, RegimeSpec::Constant(2.0)).unwrap();
        assert!(close(r, 0.011_892_1, 1e-7));
        let r = radius_for_regime(2000.0, RegimeSpec::Constant(1.0)).unwrap();
        assert!(close(r, 2000f64.powf(-0.5), 1e-15));
        let t = 2000.0;
        let r = radius_for_regime(t, RegimeSpec::Log(0.184)).unwrap();
        assert!(close(r, 0.0233, 5e-5), "{r}");
        // Invert r ↦ r⁸t⁴/ln t.
        assert!(close(r.powi(8) * t.powi(4) / t.ln(), 0.184, 1e-12));
        assert!(radius_for_regime(1.0, RegimeSpec::Log(0.1)).is_err());
        assert!(radius_for_regime(0.5, RegimeSpec::Log(0.1)).is_err());
        assert!(radius_for_regime(10.0, RegimeSpec::Constant(0.0)).is_err());
    }

    #[test]
    fn geometric_cdf_examples() {
        assert_eq!(geometric_cdf(0, 0.5), 0.0);
        assert_eq!(geometric_cdf(1, 0.0), 1.0);
        assert_eq!(geometric_cdf(7, 0.0), 1.0);
        let m: f64 = 0.271_51;
        assert!(close((-m).exp(), 0.762_22, 1e-5));
        assert!(close(geometric_cdf(2, m), 0.943_47, 1e-5));
        assert!(close(geometric_cdf(1, m), (-m).exp(), 1e-15));
    }

    #[test]
    fn bound_term_examples() {
        let terms = bound_terms(1e3, 10f64.powf(-1.5), 0.0).unwrap();
        let v = terms
            .iter()
            .find(|b| b.label == "var t^6 r^(3d+4)")
            .unwrap()
            .value;
        assert!(close(v.log10(), -1.5, 1e-12));
        let cov = terms
            .iter()
            .find(|b| b.label == "cov t^(4+alpha d) r^(3d)")
            .unwrap()
            .value;
        assert!(close(cov, 1e12 * 10f64.powf(-13.5), 1e-12 * cov));

        let at = |t: f64| {
            let r = t.powf(-0.5);
            bound_terms(t, r, 0.1).unwrap()[1].value
        };
        assert!(close(at(1000.0) / at(2000.0), 2f64.sqrt(), 1e-10));
    }

    #[test]
    fn cylinder_height() {
        assert!(close(two_cylinder_height(0.1, PI).unwrap(), 0.2, 1e-15));
        assert!(close(
            two_cylinder_height(0.1, PI / 3.0).unwrap(),
            0.4,
            1e-14
        ));
        let mut prev = f64::INFINITY;
        for k in 1..=100 {
            let h = two_cylinder_height(0.1, PI * k as f64 / 100.0).unwrap();
            assert!(h < prev);
            prev = h;
        }
        assert!(two_cylinder_height(0.1, 0.0).is_err());
        assert!(two_cylinder_height(0.1, 4.0).is_err());
    }

    #[test]
    fn log_regime_diagnostics() {
        let w = BallWindow::unit_volume();
        let c_prime = c_prime_for_exponent(0.05, &w);
        assert!(close(log_exponent(c_prime, &w), 0.05, 1e-15));
        assert!(!RegimeSpec::Log(c_prime).outside_existence_regime(&w));
        assert!(
            RegimeSpec::Log(c_prime_for_exponent(0.125, &w) * 1.0001).outside_existence_regime(&w)
        );
        assert_eq!(admissible_alpha_window(0.05), Some((0.05, 0.2)));
        assert_eq!(admissible_alpha_window(0.2), None);
    }

    #[test]
    fn model_constants_invariants() {
        let k = ModelConstants::unit_ball();
        assert_eq!(k.d, 3);
        assert!(close(k.radius.powi(3) * 4.0 * PI / 3.0, 1.0, 1e-12));
        assert!(close(k.beta_3_32, 16.0 / 105.0, 1e-14));
        assert!(close(
            k.c_d,
            8.0 * PI * k.kappa1 * k.kappa1 * k.beta_3_32 * k.beta_3_32,
            1e-12
        ));
        assert!(close(k.f_full, 2.0 * PI * k.radius.powi(4), 1e-12));
    }
}
