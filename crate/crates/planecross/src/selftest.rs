//! Quick oracle-equivalence and invariance checks run by `planecross selftest`.

use planecross_core::crossings::{count_crossings_bruteforce, count_crossings_grid, has_crossing};
use planecross_core::geometry::Region2;
use planecross_core::geometry::{sample_sphere, Point2, ProjectionPlane, Rotation3};
use planecross_core::pointprocess::sample_poisson_ball;
use planecross_core::rgg::{build_edges_bruteforce, build_edges_grid, GeometricGraph};
use planecross_core::theory::{
    beta_function, c_d_constant, c_d_from_beta, crossing_kernel_constant,
    crossing_kernel_from_beta, f_full_plane, f_region, radius_for_regime, RegimeSpec,
};
use planecross_core::BallWindow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Whether the closed segments `[p1, p2]` and `[q1, q2]` meet, by solving
/// for the line parameters. Parallel pairs count as disjoint, which is exact
/// for points in general position.
pub fn segments_meet(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let (a, b) = (p2.u - p1.u, q1.u - q2.u);
    let (c, d) = (p2.v - p1.v, q1.v - q2.v);
    let det = a * d - b * c;
    if det == 0.0 {
        return false;
    }
    let (e, f) = (q1.u - p1.u, q1.v - p1.v);
    let s = (e * d - b * f) / det;
    let u = (a * f - e * c) / det;
    (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&u)
}

/// Number of ordered vertex tuples `(v1, v2, w1, w2)`, all distinct, with
/// `v1 ~ v2`, `w1 ~ w2` and crossing projected segments.
pub fn ordered_tuple_count(graph: &GeometricGraph, plane: &ProjectionPlane) -> usize {
    let n = graph.points().len();
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in graph.edges() {
        adj[i].push(j);
        adj[j].push(i);
    }
    let proj: Vec<Point2> = graph.points().iter().map(|p| plane.project(*p)).collect();
    let mut count = 0;
    for v1 in 0..n {
        for &v2 in &adj[v1] {
            for w1 in (0..n).filter(|&w| w != v1 && w != v2) {
                count += adj[w1]
                    .iter()
                    .filter(|&&w2| {
                        w2 != v1
                            && w2 != v2
                            && segments_meet(proj[v1], proj[v2], proj[w1], proj[w2])
                    })
                    .count();
            }
        }
    }
    count
}

fn sample(t: f64, c: f64, rng: &mut ChaCha8Rng) -> GeometricGraph {
    let r = radius_for_regime(t, RegimeSpec::Constant(c)).expect("valid regime");
    let cloud = sample_poisson_ball(t, BallWindow::unit_volume(), rng).expect("valid intensity");
    build_edges_grid(&cloud, r).expect("valid radius")
}

/// Runs every check with a fixed seed. `scale` multiplies the instance
/// counts; 1 takes a few seconds.
pub fn run(scale: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_7e57);
    let window = BallWindow::unit_volume();
    let mut out = Vec::new();

    let cd = (c_d_constant() - c_d_from_beta()).abs();
    out.push(check(
        "c_d closed form vs beta path",
        cd < 1e-12,
        format!("|diff| = {cd:.2e}"),
    ));
    let ck = (crossing_kernel_constant() - crossing_kernel_from_beta()).abs();
    out.push(check(
        "crossing kernel closed form vs beta path",
        ck < 1e-12,
        format!("|diff| = {ck:.2e}"),
    ));
    let b = (beta_function(3.0, 1.5).unwrap_or(f64::NAN) - 16.0 / 105.0).abs();
    out.push(check(
        "B(3, 3/2) = 16/105",
        b < 1e-14,
        format!("|diff| = {b:.2e}"),
    ));
    let big = Region2::centered_disk(2.0 * window.radius());
    let plane0 = ProjectionPlane::from_sphere_point(sample_sphere(&mut rng));
    let ff = f_region(&window, &plane0, &big).map(|q| (q - f_full_plane(&window)).abs());
    out.push(check(
        "f_full closed form vs quadrature",
        ff.as_ref().is_ok_and(|d| *d < 1e-9),
        format!("{ff:?}"),
    ));

    let n = 60 * scale;
    let mut mismatches = 0;
    let mut edge_mismatches = 0;
    let mut tuple_mismatches = 0;
    for k in 0..n {
        let g = sample(
            if k % 2 == 0 { 200.0 } else { 1000.0 },
            [0.5, 1.0, 2.0][k % 3],
            &mut rng,
        );
        let plane = ProjectionPlane::from_sphere_point(sample_sphere(&mut rng));
        let grid = count_crossings_grid(&g, &plane, None);
        if grid != count_crossings_bruteforce(&g, &plane, None)
            || has_crossing(&g, &plane) == grid.is_empty()
        {
            mismatches += 1;
        }
        if build_edges_bruteforce(g.cloud(), g.radius())
            .map(|b| b.edges() != g.edges())
            .unwrap_or(true)
        {
            edge_mismatches += 1;
        }
        if k % 3 == 0 && 8 * grid.count() != ordered_tuple_count(&g, &plane) {
            tuple_mismatches += 1;
        }
    }
    out.push(check(
        "grid vs brute-force crossings",
        mismatches == 0,
        format!("{mismatches}/{n} mismatches"),
    ));
    out.push(check(
        "grid vs brute-force edges",
        edge_mismatches == 0,
        format!("{edge_mismatches}/{n} mismatches"),
    ));
    out.push(check(
        "8 × unordered = ordered tuples",
        tuple_mismatches == 0,
        format!("{tuple_mismatches} mismatches"),
    ));

    let mut broken = 0;
    for _ in 0..n {
        let g = sample(1000.0, 2.0, &mut rng);
        let x = sample_sphere(&mut rng);
        let plane = ProjectionPlane::from_sphere_point(x);
        let base = count_crossings_grid(&g, &plane, None).count();
        let turned = plane.rotated_in_plane(rng.random::<f64>() * std::f64::consts::TAU);
        let flipped = ProjectionPlane::from_sphere_point(x.antipode());
        let rot = Rotation3::random(&mut rng);
        let moved = g.transformed(|p| rot.apply(p));
        let moved_plane = ProjectionPlane::from_sphere_point(rot.apply_sphere(x));
        let sub = g.retain_edges(|e| e % 2 == 0);
        let ok = count_crossings_grid(&g, &turned, None).count() == base
            && count_crossings_grid(&g, &flipped, None).count() == base
            && count_crossings_grid(&moved, &moved_plane, None).count() == base
            && count_crossings_grid(&sub, &plane, None).count() <= base;
        broken += usize::from(!ok);
    }
    out.push(check(
        "rotation, antipode and edge-removal invariants",
        broken == 0,
        format!("{broken}/{n} violated"),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_oracle_basics() {
        let p = |u, v| Point2::new(u, v);
        assert!(segments_meet(
            p(0.0, 0.0),
            p(1.0, 1.0),
            p(0.0, 1.0),
            p(1.0, 0.0)
        ));
        assert!(!segments_meet(
            p(0.0, 0.0),
            p(1.0, 1.0),
            p(2.0, 0.0),
            p(3.0, 1.0)
        ));
        assert!(!segments_meet(
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(0.0, 1.0),
            p(1.0, 1.0)
        ));
    }

    #[test]
    fn all_checks_pass() {
        for c in run(1) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
