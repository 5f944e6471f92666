//! Points, planes through the origin, projections and the unit-volume ball.
//!
//! A plane is identified with the unit normal `x` of the sphere: the plane
//! attached to `x` is its orthogonal complement, so `x` and `-x` name the
//! same plane. The in-plane basis is completed deterministically from the
//! normal; crossing counts never depend on that choice.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math;

/// Tolerance on `‖x‖ = 1` accepted by [`SpherePoint::new`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Tolerance on orthonormality of a user-supplied plane basis.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const E2: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_squared())
    }

    #[inline]
    pub fn distance_squared(self, other: Vec3) -> f64 {
        (self - other).norm_squared()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Scales to unit length; `None` for the zero vector or non-finite input.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A point on the unit sphere S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    /// Accepts `v` only if it is already unit length.
    pub fn new(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if v.is_finite() && math::abs(norm - 1.0) <= UNIT_TOLERANCE {
            Ok(SpherePoint(v))
        } else {
            Err(Error::NotUnit { norm })
        }
    }

    /// Projects any nonzero finite vector radially onto the sphere.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        v.normalized()
            .map(SpherePoint)
            .ok_or(Error::NotUnit { norm: v.norm() })
    }

    /// Point with colatitude `polar` (from +z) and azimuth `azimuth`.
    pub fn from_angles(polar: f64, azimuth: f64) -> Self {
        let s = math::sin(polar);
        SpherePoint(Vec3::new(
            s * math::cos(azimuth),
            s * math::sin(azimuth),
            math::cos(polar),
        ))
    }

    #[inline]
    pub fn vec(self) -> Vec3 {
        self.0
    }

    pub fn antipode(self) -> SpherePoint {
        SpherePoint(-self.0)
    }

    /// Moves `angle` radians along the great circle leaving `self` in the
    /// direction of `toward` (projected onto the tangent plane).
    pub fn geodesic_step(self, toward: Vec3, angle: f64) -> Result<SpherePoint> {
        let x = self.0;
        let tangent = (toward - x * toward.dot(x))
            .normalized()
            .ok_or(Error::NotUnit { norm: 0.0 })?;
        SpherePoint::from_direction(x * math::cos(angle) + tangent * math::sin(angle))
    }

    /// True when every coordinate is strictly positive, i.e. the point is in
    /// the open octant S²₊₊.
    pub fn in_positive_octant(self) -> bool {
        self.0.x > 0.0 && self.0.y > 0.0 && self.0.z > 0.0
    }
}

/// Great-circle distance in radians, in `[0, π]`.
pub fn spherical_distance(x: SpherePoint, y: SpherePoint) -> f64 {
    math::acos(x.0.dot(y.0).clamp(-1.0, 1.0))
}

/// Uniform point on S² (normalized standard Gaussian vector).
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
    loop {
        let g = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        // The 1e-150 floor keeps the division well-conditioned; the event is
        // practically impossible.
        if g.norm_squared() > 1e-300 {
            if let Some(u) = g.normalized() {
                return SpherePoint(u);
            }
        }
    }
}

/// Uniform point on the open octant S²₊₊: a uniform sphere point with each
/// coordinate replaced by its absolute value.
pub fn sample_sphere_pp<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
    loop {
        let p = sample_sphere(rng).0;
        let folded = Vec3::new(math::abs(p.x), math::abs(p.y), math::abs(p.z));
        if folded.x > 0.0 && folded.y > 0.0 && folded.z > 0.0 {
            return SpherePoint(folded);
        }
    }
}

/// Centers of a `g × g` equal-area grid on S²₊₊.
///
/// Cells are uniform in `z = cos(polar) ∈ (0, 1)` and in azimuth
/// `∈ (0, π/2)`; by Archimedes' theorem every cell has the same spherical
/// area, so the fraction of grid points with a property estimates its
/// normalized spherical measure. Ordering is row-major in `z`.
pub fn octant_grid(g: usize) -> alloc::vec::Vec<SpherePoint> {
    let mut out = alloc::vec::Vec::with_capacity(g * g);
    let step = 1.0 / g as f64;
    for i in 0..g {
        let z = (i as f64 + 0.5) * step;
        let rho = math::sqrt(1.0 - z * z);
        for j in 0..g {
            let phi = (j as f64 + 0.5) * step * (PI / 2.0);
            out.push(SpherePoint(Vec3::new(
                rho * math::cos(phi),
                rho * math::sin(phi),
                z,
            )));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub u: f64,
    pub v: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(u: f64, v: f64) -> Self {
        Point2 { u, v }
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_squared())
    }
}

/// A plane through the origin with an orthonormal in-plane basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionPlane {
    normal: SpherePoint,
    basis_u: Vec3,
    basis_v: Vec3,
}

impl ProjectionPlane {
    /// The plane `x^⊥` with the canonical basis completion
    /// `u = normalize(a × x)`, `v = x × u`, where `a = e₃` unless `x` is
    /// within ~26° of the z axis, in which case `a = e₁`.
    pub fn from_sphere_point(normal: SpherePoint) -> Self {
        let n = normal.0;
        let helper = if math::abs(n.z) < 0.9 {
            Vec3::E3
        } else {
            Vec3::E1
        };
        // |helper · n| < 0.9 in both branches, so the cross product is nonzero.
        let u = helper
            .cross(n)
            .normalized()
            .expect("helper not parallel to normal");
        let v = n.cross(u);
        ProjectionPlane {
            normal,
            basis_u: u,
            basis_v: v,
        }
    }

    /// A plane with a caller-supplied basis. The triple must be orthonormal.
    pub fn with_basis(normal: SpherePoint, basis_u: Vec3, basis_v: Vec3) -> Result<Self> {
        let n = normal.0;
        let deviation = [
            math::abs(basis_u.norm_squared() - 1.0),
            math::abs(basis_v.norm_squared() - 1.0),
            math::abs(basis_u.dot(basis_v)),
            math::abs(basis_u.dot(n)),
            math::abs(basis_v.dot(n)),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if deviation <= ORTHONORMAL_TOLERANCE {
            Ok(ProjectionPlane {
                normal,
                basis_u,
                basis_v,
            })
        } else {
            Err(Error::NotOrthonormal { deviation })
        }
    }

    /// Same plane, basis turned by `angle` about the normal.
    pub fn rotated_in_plane(&self, angle: f64) -> Self {
        let (s, c) = (math::sin(angle), math::cos(angle));
        ProjectionPlane {
            normal: self.normal,
            basis_u: self.basis_u * c + self.basis_v * s,
            basis_v: self.basis_v * c - self.basis_u * s,
        }
    }

    #[inline]
    pub fn normal(&self) -> SpherePoint {
        self.normal
    }

    #[inline]
    pub fn basis_u(&self) -> Vec3 {
        self.basis_u
    }

    #[inline]
    pub fn basis_v(&self) -> Vec3 {
        self.basis_v
    }

    /// Orthogonal projection into in-plane coordinates.
    #[inline]
    pub fn project(&self, p: Vec3) -> Point2 {
        Point2::new(p.dot(self.basis_u), p.dot(self.basis_v))
    }

    /// The 3-D point of the plane with in-plane coordinates `q`.
    #[inline]
    pub fn lift(&self, q: Point2) -> Vec3 {
        self.basis_u * q.u + self.basis_v * q.v
    }
}

/// Free-function form of [`ProjectionPlane::project`].
#[inline]
pub fn project(p: Vec3, plane: &ProjectionPlane) -> Point2 {
    plane.project(p)
}

/// Proper rotation of R³ stored as a row-major matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Rodrigues' formula. `axis` need not be normalized but must be nonzero.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        let k = axis.normalized().ok_or(Error::NotUnit { norm: 0.0 })?;
        let (s, c) = (math::sin(angle), math::cos(angle));
        let t = 1.0 - c;
        Ok(Rotation3 {
            m: [
                [
                    t * k.x * k.x + c,
                    t * k.x * k.y - s * k.z,
                    t * k.x * k.z + s * k.y,
                ],
                [
                    t * k.x * k.y + s * k.z,
                    t * k.y * k.y + c,
                    t * k.y * k.z - s * k.x,
                ],
                [
                    t * k.x * k.z - s * k.y,
                    t * k.y * k.z + s * k.x,
                    t * k.z * k.z + c,
                ],
            ],
        })
    }

    /// Uniform (Haar) random rotation: random axis, angle with density
    /// `(1 - cos θ)/π` on `[0, π]`, drawn by rejection.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let axis = sample_sphere(rng).0;
        let angle = loop {
            let theta = rng.random::<f64>() * PI;
            if rng.random::<f64>() * 2.0 <= 1.0 - math::cos(theta) {
                break theta;
            }
        };
        Rotation3::from_axis_angle(axis, angle).expect("unit axis")
    }

    #[inline]
    pub fn apply(&self, p: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        )
    }

    pub fn apply_sphere(&self, x: SpherePoint) -> SpherePoint {
        // Rotations preserve length; renormalize away rounding drift.
        SpherePoint::from_direction(self.apply(x.0)).expect("rotation of a unit vector")
    }
}

/// The observation window W: a ball centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallWindow {
    radius: f64,
}

impl BallWindow {
    /// The ball of volume one, `R = (3 / 4π)^{1/3}`.
    pub fn unit_volume() -> Self {
        BallWindow {
            radius: math::cbrt(3.0 / (4.0 * PI)),
        }
    }

    pub fn with_radius(radius: f64) -> Result<Self> {
        crate::error::require(
            radius > 0.0 && radius.is_finite(),
            "ball radius",
            "positive and finite",
            radius,
        )?;
        Ok(BallWindow { radius })
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius * self.radius * self.radius
    }

    #[inline]
    pub fn contains(&self, p: Vec3) -> bool {
        p.norm_squared() <= self.radius * self.radius
    }
}

/// Length of the chord cut from the ball by the line through the in-plane
/// point `q` perpendicular to `plane`.
///
/// The ball is centered at the origin, so the result only depends on `‖q‖`;
/// `plane` is accepted to keep the call site explicit about which plane `q`
/// lives in.
pub fn chord_length(_plane: &ProjectionPlane, q: Point2, ball: &BallWindow) -> f64 {
    chord_length_at(q.norm_squared(), ball.radius)
}

#[inline]
pub(crate) fn chord_length_at(rho_squared: f64, radius: f64) -> f64 {
    2.0 * math::sqrt((radius * radius - rho_squared).max(0.0))
}

/// A measurable sub-window of a projection plane, in in-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region2 {
    /// Closed disk.
    Disk { center: Point2, radius: f64 },
    /// Half-open rectangle `[u_min, u_max) × [v_min, v_max)`; infinite
    /// bounds are allowed so that rectangles can tile the whole plane.
    Rect {
        u_min: f64,
        u_max: f64,
        v_min: f64,
        v_max: f64,
    },
}

impl Region2 {
    pub fn centered_disk(radius: f64) -> Self {
        Region2::Disk {
            center: Point2::new(0.0, 0.0),
            radius,
        }
    }

    pub fn contains(&self, q: Point2) -> bool {
        match *self {
            Region2::Disk { center, radius } => {
                let d = Point2::new(q.u - center.u, q.v - center.v);
                d.norm_squared() <= radius * radius
            }
            Region2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => q.u >= u_min && q.u < u_max && q.v >= v_min && q.v < v_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Region2::Disk { center, radius } => {
                crate::error::require(
                    radius >= 0.0 && radius.is_finite(),
                    "disk radius",
                    "non-negative and finite",
                    radius,
                )?;
                crate::error::require(
                    center.u.is_finite() && center.v.is_finite(),
                    "disk center",
                    "finite",
                    if center.u.is_finite() {
                        center.v
                    } else {
                        center.u
                    },
                )
            }
            Region2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => {
                crate::error::require(
                    !u_min.is_nan() && !u_max.is_nan() && u_min <= u_max,
                    "rectangle u-range",
                    "ordered",
                    u_max - u_min,
                )?;
                crate::error::require(
                    !v_min.is_nan() && !v_max.is_nan() && v_min <= v_max,
                    "rectangle v-range",
                    "ordered",
                    v_max - v_min,
                )
            }
        }
    }
}
