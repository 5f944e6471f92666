//! Random geometric graph: vertices of a point cloud joined whenever their
//! distance is at most the connection radius.

use alloc::vec::Vec;
use core::f64::consts::PI;

use hashbrown::HashMap;

use crate::error::{require, Result};
use crate::geometry::{BallWindow, Vec3};
use crate::math;
use crate::pointprocess::PointCloud;

/// Upper limit on `t·r³` accepted by default; beyond it the graph is no
/// longer sparse.
pub const SPARSE_LIMIT: f64 = 0.1;

pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGraph {
    cloud: PointCloud,
    radius: f64,
    edges: Vec<Edge>,
}

impl GeometricGraph {
    #[inline]
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    #[inline]
    pub fn points(&self) -> &[Vec3] {
        self.cloud.points()
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Edges as `(i, j)` with `i < j`, sorted lexicographically.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The subgraph keeping only edges whose index satisfies `keep`.
    /// Vertices are untouched, so the result is generally not the full
    /// geometric graph of its cloud any more.
    pub fn retain_edges(&self, mut keep: impl FnMut(usize) -> bool) -> GeometricGraph {
        GeometricGraph {
            cloud: self.cloud.clone(),
            radius: self.radius,
            edges: self
                .edges
                .iter()
                .enumerate()
                .filter(|(k, _)| keep(*k))
                .map(|(_, e)| *e)
                .collect(),
        }
    }

    /// Moves every vertex by `motion` and keeps the edge list. Only
    /// meaningful for isometries, which preserve the edge rule exactly in
    /// real arithmetic.
    pub fn transformed(&self, motion: impl Fn(Vec3) -> Vec3) -> GeometricGraph {
        GeometricGraph {
            cloud: self.cloud.map_points(motion),
            radius: self.radius,
            edges: self.edges.clone(),
        }
    }

    /// Vertex degrees, indexed like the cloud.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0; self.cloud.len()];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }
}

fn check_radius(r: f64) -> Result<()> {
    require(
        r > 0.0 && r.is_finite(),
        "connection radius",
        "positive and finite",
        r,
    )
}

/// All-pairs construction. Quadratic; kept as the reference for
/// [`build_edges_grid`].
pub fn build_edges_bruteforce(cloud: &PointCloud, r: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    let pts = cloud.points();
    let r2 = r * r;
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].distance_squared(pts[j]) <= r2 {
                edges.push((i, j));
            }
        }
    }
    Ok(GeometricGraph {
        cloud: cloud.clone(),
        radius: r,
        edges,
    })
}

#[inline]
fn cell_of(p: Vec3, inv_side: f64) -> (i32, i32, i32) {
    (
        math::floor(p.x * inv_side) as i32,
        math::floor(p.y * inv_side) as i32,
        math::floor(p.z * inv_side) as i32,
    )
}

/// Cell-list construction with cubic cells of side `r`: any pair within
/// distance `r` lies in the same or an adjacent cell, so scanning the 27
/// neighbouring cells finds every edge.
pub fn build_edges_grid(cloud: &PointCloud, r: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    let pts = cloud.points();
    let inv = 1.0 / r;
    let r2 = r * r;

    // Bucket points by cell. Indices are pushed in increasing order, so each
    // bucket is sorted.
    let mut cells: HashMap<(i32, i32, i32), Vec<u32>> = HashMap::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        cells.entry(cell_of(*p, inv)).or_default().push(i as u32);
    }

    let mut edges = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let (cx, cy, cz) = cell_of(*p, inv);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = cells.get(&(cx + dx, cy + dy, cz + dz)) else {
                        continue;
                    };
                    for &j in bucket {
                        let j = j as usize;
                        if j > i && p.distance_squared(pts[j]) <= r2 {
                            edges.push((i, j));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(GeometricGraph {
        cloud: cloud.clone(),
        radius: r,
        edges,
    })
}

/// First-order edge count `t²·κ₃·r³/2` with `κ₃ = 4π/3`.
///
/// Ignores the boundary of the window, so it overestimates the true mean
/// slightly (vertices near the sphere lose part of their neighbourhood).
pub fn expected_edge_count(t: f64, r: f64, window: &BallWindow) -> Result<f64> {
    require(t >= 0.0, "intensity t", "non-negative", t)?;
    require(
        r >= 0.0 && r <= window.radius(),
        "connection radius",
        "in [0, R]",
        r,
    )?;
    Ok(t * t * (4.0 * PI / 3.0) * r * r * r / 2.0)
}

/// `t·r³ < SPARSE_LIMIT`.
pub fn is_sparse(t: f64, r: f64) -> bool {
    t * r * r * r < SPARSE_LIMIT
}
