//! Homogeneous Poisson point process on a ball window.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{require, Result};
use crate::geometry::{sample_sphere, BallWindow, Vec3};
use crate::math;

/// One realization of the Poisson process with intensity `t` on `window`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
    intensity: f64,
    window: BallWindow,
}

impl PointCloud {
    /// Wraps explicit points. Every point must lie in the closed ball.
    pub fn from_points(points: Vec<Vec3>, intensity: f64, window: BallWindow) -> Result<Self> {
        require(
            intensity >= 0.0 && intensity.is_finite(),
            "intensity",
            "non-negative and finite",
            intensity,
        )?;
        if let Some(p) = points
            .iter()
            .find(|p| !p.is_finite() || !window.contains(**p))
        {
            return Err(crate::Error::Domain {
                name: "point norm",
                requirement: "at most the window radius",
                value: p.norm(),
            });
        }
        Ok(PointCloud {
            points,
            intensity,
            window,
        })
    }

    #[inline]
    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    #[inline]
    pub fn window(&self) -> BallWindow {
        self.window
    }

    /// Applies `f` to every point, keeping intensity and window. Used for
    /// rigid motions in invariance checks; the caller is responsible for
    /// keeping points inside the window.
    pub fn map_points(&self, f: impl Fn(Vec3) -> Vec3) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| f(*p)).collect(),
            intensity: self.intensity,
            window: self.window,
        }
    }
}

/// Exact Poisson variate. `mean == 0` short-circuits to zero.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    require(
        mean >= 0.0 && mean.is_finite(),
        "Poisson mean",
        "non-negative and finite",
        mean,
    )?;
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|_| crate::Error::Domain {
        name: "Poisson mean",
        requirement: "within the sampler's supported range",
        value: mean,
    })?;
    Ok(dist.sample(rng) as u64)
}

/// Uniform point in the ball: uniform direction, radius `R·U^{1/3}`.
pub fn sample_uniform_ball<R: Rng + ?Sized>(window: &BallWindow, rng: &mut R) -> Vec3 {
    let dir = sample_sphere(rng).vec();
    let radius = window.radius() * math::cbrt(rng.random::<f64>());
    dir * radius
}

/// Samples `η_t` on `window`: a Poisson(`t · vol(W)`) number of i.i.d.
/// uniform points.
pub fn sample_poisson_ball<R: Rng + ?Sized>(
    t: f64,
    window: BallWindow,
    rng: &mut R,
) -> Result<PointCloud> {
    require(
        t >= 0.0 && t.is_finite(),
        "intensity t",
        "non-negative and finite",
        t,
    )?;
    let n = poisson_count(t * window.volume(), rng)?;
    let points = (0..n).map(|_| sample_uniform_ball(&window, rng)).collect();
    Ok(PointCloud {
        points,
        intensity: t,
        window,
    })
}
