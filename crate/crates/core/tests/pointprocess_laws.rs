use planecross_core::pointprocess::{poisson_count, sample_poisson_ball};
use planecross_core::stats::{mean_ci, tv_distance_to_poisson, EmpiricalPmf};
use planecross_core::BallWindow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn count_law_is_poisson() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let pmf =
        EmpiricalPmf::from_samples((0..100_000).map(|_| poisson_count(20.0, &mut rng).unwrap()));
    let tv = tv_distance_to_poisson(&pmf, 20.0).unwrap();
    assert!(tv < 0.01, "tv {tv}");
}

#[test]
fn sampled_points_are_centred() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut xs, mut ys, mut zs) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..2000 {
        let cloud = sample_poisson_ball(50.0, BallWindow::unit_volume(), &mut rng).unwrap();
        for p in cloud.points() {
            xs.push(p.x);
            ys.push(p.y);
            zs.push(p.z);
        }
    }
    for coord in [xs, ys, zs] {
        let (m, h) = mean_ci(&coord).unwrap();
        assert!(m.abs() < h, "mean {m} halfwidth {h}");
    }
}
