use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secrecy_ascent::channel::{build_channel, draw_paths, steering_vector, ChannelParams};

#[test]
fn mmwave_channel_has_unit_average_entry_power() {
    let params = ChannelParams::mmwave();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 1000;
    let entries = (params.n_rx * params.n_tx) as f64;
    let mut power = 0.0;
    let mut mean = num_complex::Complex64::new(0.0, 0.0);
    for _ in 0..draws {
        let h = build_channel(&params, &draw_paths(&params, &mut rng)).unwrap();
        power += h.norm_squared() / entries;
        mean += h.sum() / entries;
    }
    let power = power / draws as f64;
    let mean = mean / draws as f64;
    assert!((power - 1.0).abs() < 0.05, "mean entry power {power}");
    assert!(mean.norm() < 0.1, "mean entry {mean}");
}

#[test]
fn sub6_channel_has_unit_average_entry_power() {
    let params = ChannelParams::sub6();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 1000;
    let entries = (params.n_rx * params.n_tx) as f64;
    let power: f64 = (0..draws)
        .map(|_| {
            let h = build_channel(&params, &draw_paths(&params, &mut rng)).unwrap();
            h.norm_squared() / entries
        })
        .sum::<f64>()
        / draws as f64;
    assert!((power - 1.0).abs() < 0.05, "mean entry power {power}");
}

#[test]
fn steering_vectors_have_unit_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    use rand::Rng;
    for _ in 0..1000 {
        let n = rng.random_range(1..=256);
        let az = rng.random_range(0.0..std::f64::consts::TAU);
        let norm = steering_vector(n, az).norm();
        assert!((norm - 1.0).abs() < 1e-12, "n={n} az={az} norm={norm}");
    }
}
