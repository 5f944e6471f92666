//! Crossings of projected edges: the realization of the crossing point
//! process on one plane.
//!
//! A crossing is an unordered pair of vertex-disjoint edges whose projected
//! closed segments meet. Each such pair is counted once and placed at the
//! intersection point. Touching and collinear-overlap configurations count
//! as crossings; they have probability zero for sampled graphs and are
//! tallied in [`CrossingSet::degenerate_hits`] so they can be audited.

use alloc::vec::Vec;
use core::ops::ControlFlow;

use hashbrown::HashMap;

use crate::geometry::{Point2, ProjectionPlane, Region2};
use crate::math;
use crate::rgg::GeometricGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Index into [`GeometricGraph::edges`]; always `edge_a < edge_b`.
    pub edge_a: usize,
    pub edge_b: usize,
    pub location: Point2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSet {
    plane: ProjectionPlane,
    crossings: Vec<Crossing>,
    degenerate_hits: usize,
}

impl CrossingSet {
    #[inline]
    pub fn plane(&self) -> &ProjectionPlane {
        &self.plane
    }

    /// Crossings sorted by `(edge_a, edge_b)`.
    #[inline]
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.crossings.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Number of counted pairs whose intersection test hit an exactly zero
    /// orientation (touching endpoints or collinear overlap).
    #[inline]
    pub fn degenerate_hits(&self) -> usize {
        self.degenerate_hits
    }
}

/// Outcome of a closed-segment intersection test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentHit {
    /// Transversal intersection point, or the midpoint of a collinear
    /// overlap.
    pub point: Point2,
    /// Some orientation evaluated to exactly zero.
    pub degenerate: bool,
}

#[inline]
fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u)
}

#[inline]
fn lerp(a: Point2, b: Point2, s: f64) -> Point2 {
    Point2::new(a.u + (b.u - a.u) * s, a.v + (b.v - a.v) * s)
}

/// Intersection of closed segments `[p1, p2]` and `[q1, q2]` with
/// degeneracy classification.
pub fn classify_segments(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> Option<SegmentHit> {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);

    if o1 == 0.0 && o2 == 0.0 && o3 == 0.0 && o4 == 0.0 {
        return collinear_overlap(p1, p2, q1, q2).map(|point| SegmentHit {
            point,
            degenerate: true,
        });
    }
    if o1 * o2 > 0.0 || o3 * o4 > 0.0 {
        return None;
    }
    // Not all collinear and each segment straddles (or touches) the other's
    // line, so the lines meet in one point. `orient(q1, q2, ·)` is affine
    // along [p1, p2]; its root is the intersection. o3 != o4 here, otherwise
    // both would be zero and p would be collinear with q.
    let s = o3 / (o3 - o4);
    let degenerate = o1 == 0.0 || o2 == 0.0 || o3 == 0.0 || o4 == 0.0;
    Some(SegmentHit {
        point: lerp(p1, p2, s),
        degenerate,
    })
}

fn collinear_overlap(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> Option<Point2> {
    // Parameterize along the axis with the largest spread so zero-length
    // segments still compare correctly.
    let spread_u = math::abs(p1.u - p2.u)
        .max(math::abs(q1.u - q2.u))
        .max(math::abs(p1.u - q1.u));
    let spread_v = math::abs(p1.v - p2.v)
        .max(math::abs(q1.v - q2.v))
        .max(math::abs(p1.v - q1.v));
    let key = |p: Point2| if spread_u >= spread_v { p.u } else { p.v };
    let (pa, pb) = if key(p1) <= key(p2) {
        (p1, p2)
    } else {
        (p2, p1)
    };
    let (qa, qb) = if key(q1) <= key(q2) {
        (q1, q2)
    } else {
        (q2, q1)
    };
    let lo = if key(pa) >= key(qa) { pa } else { qa };
    let hi = if key(pb) <= key(qb) { pb } else { qb };
    if key(lo) > key(hi) {
        return None;
    }
    Some(lerp(lo, hi, 0.5))
}

/// Witness point of `[p1, p2] ∩ [q1, q2]`, if nonempty.
pub fn segment_intersection_2d(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> Option<Point2> {
    classify_segments(p1, p2, q1, q2).map(|h| h.point)
}

/// Projected endpoints of every edge, indexed like `graph.edges()`.
fn project_edges(graph: &GeometricGraph, plane: &ProjectionPlane) -> Vec<(Point2, Point2)> {
    let pts = graph.points();
    graph
        .edges()
        .iter()
        .map(|&(i, j)| (plane.project(pts[i]), plane.project(pts[j])))
        .collect()
}

#[inline]
fn share_vertex(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1
}

/// Tests one candidate pair and forwards hits to `visit`.
#[inline]
fn test_pair<B>(
    graph: &GeometricGraph,
    segs: &[(Point2, Point2)],
    a: usize,
    b: usize,
    region: Option<&Region2>,
    visit: &mut impl FnMut(usize, usize, SegmentHit) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let edges = graph.edges();
    if share_vertex(edges[a], edges[b]) {
        return ControlFlow::Continue(());
    }
    // Fixed argument order so the witness is bit-identical across kernels.
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (p1, p2) = segs[lo];
    let (q1, q2) = segs[hi];
    match classify_segments(p1, p2, q1, q2) {
        Some(hit) if region.is_none_or(|r| r.contains(hit.point)) => visit(lo, hi, hit),
        _ => ControlFlow::Continue(()),
    }
}

fn scan_bruteforce<B>(
    graph: &GeometricGraph,
    plane: &ProjectionPlane,
    region: Option<&Region2>,
    mut visit: impl FnMut(usize, usize, SegmentHit) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let segs = project_edges(graph, plane);
    for a in 0..segs.len() {
        for b in a + 1..segs.len() {
            test_pair(graph, &segs, a, b, region, &mut visit)?;
        }
    }
    ControlFlow::Continue(())
}

// Forward half of the 8-neighbourhood; together with the cell itself every
// unordered pair of adjacent cells is visited once.
const FORWARD_NEIGHBOURS: [(i64, i64); 4] = [(1, -1), (1, 0), (1, 1), (0, 1)];

/// Buckets edges by the cell of their projected midpoint (side `2r`). Two
/// projected segments of length at most `r` that meet have midpoints at
/// most `r` apart, hence in the same or adjacent cells.
fn scan_grid<B>(
    graph: &GeometricGraph,
    plane: &ProjectionPlane,
    region: Option<&Region2>,
    mut visit: impl FnMut(usize, usize, SegmentHit) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let segs = project_edges(graph, plane);
    if segs.len() < 2 {
        return ControlFlow::Continue(());
    }
    let inv_side = 1.0 / (2.0 * graph.radius());
    let mut keyed: Vec<((i64, i64), usize)> = segs
        .iter()
        .enumerate()
        .map(|(k, (p, q))| {
            let mu = 0.5 * (p.u + q.u) * inv_side;
            let mv = 0.5 * (p.v + q.v) * inv_side;
            ((math::floor(mu) as i64, math::floor(mv) as i64), k)
        })
        .collect();
    keyed.sort_unstable();

    let mut runs: HashMap<(i64, i64), (usize, usize)> = HashMap::with_capacity(keyed.len());
    let mut start = 0;
    while start < keyed.len() {
        let cell = keyed[start].0;
        let mut end = start + 1;
        while end < keyed.len() && keyed[end].0 == cell {
            end += 1;
        }
        runs.insert(cell, (start, end));
        start = end;
    }

    let mut start = 0;
    while start < keyed.len() {
        let cell = keyed[start].0;
        let (_, end) = runs[&cell];
        for x in start..end {
            for y in x + 1..end {
                test_pair(graph, &segs, keyed[x].1, keyed[y].1, region, &mut visit)?;
            }
        }
        for (du, dv) in FORWARD_NEIGHBOURS {
            if let Some(&(ns, ne)) = runs.get(&(cell.0 + du, cell.1 + dv)) {
                for x in start..end {
                    for y in ns..ne {
                        test_pair(graph, &segs, keyed[x].1, keyed[y].1, region, &mut visit)?;
                    }
                }
            }
        }
        start = end;
    }
    ControlFlow::Continue(())
}

fn collect(
    plane: &ProjectionPlane,
    scan: impl FnOnce(&mut dyn FnMut(usize, usize, SegmentHit) -> ControlFlow<()>),
) -> CrossingSet {
    let mut crossings = Vec::new();
    let mut degenerate_hits = 0;
    scan(&mut |a, b, hit| {
        degenerate_hits += usize::from(hit.degenerate);
        crossings.push(Crossing {
            edge_a: a,
            edge_b: b,
            location: hit.point,
        });
        ControlFlow::Continue(())
    });
    crossings.sort_unstable_by_key(|c| (c.edge_a, c.edge_b));
    CrossingSet {
        plane: *plane,
        crossings,
        degenerate_hits,
    }
}

/// Reference kernel: every unordered pair of edges.
pub fn count_crossings_bruteforce(
    graph: &GeometricGraph,
    plane: &ProjectionPlane,
    region: Option<&Region2>,
) -> CrossingSet {
    collect(plane, |visit| {
        let _ = scan_bruteforce(graph, plane, region, visit);
    })
}

/// Grid-accelerated kernel; returns exactly what
/// [`count_crossings_bruteforce`] returns.
pub fn count_crossings_grid(
    graph: &GeometricGraph,
    plane: &ProjectionPlane,
    region: Option<&Region2>,
) -> CrossingSet {
    collect(plane, |visit| {
        let _ = scan_grid(graph, plane, region, visit);
    })
}

/// Whether the drawing on `plane` has at least one crossing. Stops at the
/// first one found.
pub fn has_crossing(graph: &GeometricGraph, plane: &ProjectionPlane) -> bool {
    scan_grid(graph, plane, None, |_, _, _| ControlFlow::Break(())).is_break()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BallWindow, SpherePoint, Vec3};
    use crate::pointprocess::PointCloud;
    use crate::rgg::build_edges_bruteforce;

    fn p(u: f64, v: f64) -> Point2 {
        Point2::new(u, v)
    }

    #[test]
    fn axes_cross_at_origin() {
        let hit = classify_segments(p(0.0, -1.0), p(0.0, 1.0), p(-1.0, 0.0), p(1.0, 0.0)).unwrap();
        assert_eq!(hit.point, p(0.0, 0.0));
        assert!(!hit.degenerate);
    }

    #[test]
    fn disjoint_segments() {
        assert_eq!(
            segment_intersection_2d(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)),
            None
        );
        assert_eq!(
            segment_intersection_2d(p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(2.0, -1.0)),
            None
        );
        // Collinear but separated.
        assert_eq!(
            segment_intersection_2d(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0)),
            None
        );
    }

    #[test]
    fn degenerate_cases_count() {
        // T-junction: endpoint of q on p.
        let hit = classify_segments(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)).unwrap();
        assert!(hit.degenerate);
        assert_eq!(hit.point, p(1.0, 0.0));
        // Collinear overlap [1, 2] → midpoint 1.5.
        let hit = classify_segments(p(0.0, 0.0), p(2.0, 0.0), p(3.0, 0.0), p(1.0, 0.0)).unwrap();
        assert!(hit.degenerate);
        assert_eq!(hit.point, p(1.5, 0.0));
        // Shared endpoint.
        let hit = classify_segments(p(0.0, 0.0), p(1.0, 1.0), p(1.0, 1.0), p(2.0, 0.0)).unwrap();
        assert!(hit.degenerate);
        assert_eq!(hit.point, p(1.0, 1.0));
        // Vertical collinear overlap.
        let hit = classify_segments(p(0.0, 0.0), p(0.0, 2.0), p(0.0, 1.0), p(0.0, 4.0)).unwrap();
        assert_eq!(hit.point, p(0.0, 1.5));
    }

    fn x_graph(a: f64, r: f64) -> GeometricGraph {
        let pts = alloc::vec![
            Vec3::new(-a, -a, 0.0),
            Vec3::new(a, a, 0.0),
            Vec3::new(-a, a, 0.0),
            Vec3::new(a, -a, 0.0),
        ];
        let cloud = PointCloud::from_points(pts, 4.0, BallWindow::unit_volume()).unwrap();
        build_edges_bruteforce(&cloud, r).unwrap()
    }

    #[test]
    fn x_configuration_has_one_crossing() {
        let r = 0.1;
        let g = x_graph(r / 4.0, r);
        // Diagonals have length 2√2·a ≈ 0.0707 ≤ r, sides 2a = 0.05 ≤ r, so
        // the four points form K4; only the two diagonals cross.
        let plane = ProjectionPlane::from_sphere_point(SpherePoint::new(Vec3::E3).unwrap());
        for set in [
            count_crossings_bruteforce(&g, &plane, None),
            count_crossings_grid(&g, &plane, None),
        ] {
            assert_eq!(set.count(), 1);
            let c = set.crossings()[0];
            assert!(c.location.norm() < 1e-15);
            let ea = g.edges()[c.edge_a];
            let eb = g.edges()[c.edge_b];
            assert!(!share_vertex(ea, eb));
            assert_eq!(set.degenerate_hits(), 0);
        }
        assert!(has_crossing(&g, &plane));
    }

    #[test]
    fn adjacent_edges_never_cross() {
        // Path 0-1-2 folded so its projections overlap at the shared vertex.
        let pts = alloc::vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.05, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 0.05),
        ];
        let cloud = PointCloud::from_points(pts, 3.0, BallWindow::unit_volume()).unwrap();
        let g = build_edges_bruteforce(&cloud, 0.06).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
        // Viewed along x: both edges project onto overlapping segments.
        let plane = ProjectionPlane::from_sphere_point(SpherePoint::new(Vec3::E2).unwrap());
        assert_eq!(count_crossings_bruteforce(&g, &plane, None).count(), 0);
        assert_eq!(count_crossings_grid(&g, &plane, None).count(), 0);
    }

    #[test]
    fn empty_and_single_edge() {
        let w = BallWindow::unit_volume();
        let plane = ProjectionPlane::from_sphere_point(SpherePoint::new(Vec3::E3).unwrap());
        let cloud = PointCloud::from_points(Vec::new(), 1.0, w).unwrap();
        let g = build_edges_bruteforce(&cloud, 0.1).unwrap();
        assert!(count_crossings_grid(&g, &plane, None).is_empty());
        let cloud =
            PointCloud::from_points(alloc::vec![Vec3::ZERO, Vec3::new(0.01, 0.0, 0.0)], 1.0, w)
                .unwrap();
        let g = build_edges_bruteforce(&cloud, 0.1).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert!(count_crossings_grid(&g, &plane, None).is_empty());
        assert!(!has_crossing(&g, &plane));
    }

    #[test]
    fn region_filters_by_witness() {
        let r = 0.1;
        let g = x_graph(r / 4.0, r);
        let plane = ProjectionPlane::from_sphere_point(SpherePoint::new(Vec3::E3).unwrap());
        let near = Region2::centered_disk(0.001);
        let far = Region2::Disk {
            center: p(0.5, 0.5),
            radius: 0.1,
        };
        assert_eq!(count_crossings_grid(&g, &plane, Some(&near)).count(), 1);
        assert_eq!(count_crossings_grid(&g, &plane, Some(&far)).count(), 0);
    }
}
