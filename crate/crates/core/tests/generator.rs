mod oracles;

use daestruct::gen::{fit_power_law, generate_sigma, GenConfig};
use daestruct::lap::Assignment;
use daestruct::offsets::analyze;
use daestruct::sigma::write_sigma_file;

#[test]
fn templates_are_replicated() {
    let cfg = GenConfig::new(2, 3, 42);
    let m = generate_sigma(&cfg).unwrap();
    assert_eq!(m.n(), 6);
    let block = |bi: usize, bj: usize| -> Vec<Option<u32>> {
        (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c)))
            .map(|(r, c)| m.get(2 * bi + r, 2 * bj + c))
            .collect()
    };
    assert!(block(0, 0).iter().all(Option::is_some));
    assert_eq!(block(0, 0), block(1, 1));
    assert_eq!(block(1, 1), block(2, 2));
    assert_eq!(block(0, 1), block(1, 2));
    for (bi, bj) in [(0, 2), (1, 0), (2, 0), (2, 1)] {
        assert!(block(bi, bj).iter().all(Option::is_none), "block ({bi}, {bj})");
    }
}

#[test]
fn same_seed_same_bytes() {
    for seed in [0, 1, 42, u64::MAX] {
        let cfg = GenConfig::new(5, 4, seed);
        assert_eq!(
            write_sigma_file(&generate_sigma(&cfg).unwrap()),
            write_sigma_file(&generate_sigma(&cfg).unwrap())
        );
    }
}

#[test]
fn generated_instances_are_well_posed() {
    for seed in 0..100 {
        let m = generate_sigma(&GenConfig::new(1 + seed as usize % 7, 1 + seed as usize % 4, seed)).unwrap();
        assert!(Assignment::new(&m, (0..m.n()).collect()).is_ok());
        assert!(analyze(&m).is_ok());
    }
}

#[test]
fn frequencies_follow_the_configuration() {
    let m = generate_sigma(&GenConfig::new(200, 2, 9)).unwrap();
    let diag = (0..200).flat_map(|i| (0..200).map(move |j| (i, j)));
    let zeros = diag.filter(|&(i, j)| m.get(i, j) == Some(0)).count() as f64 / 40000.0;
    assert!((zeros - 0.7).abs() < 0.02, "{zeros}");
    let upper = (0..200).flat_map(|i| (200..400).map(move |j| (i, j)));
    let present = upper.filter(|&(i, j)| m.get(i, j).is_some()).count() as f64 / 40000.0;
    assert!((present - 0.075).abs() < 0.01, "{present}");
}

#[test]
fn fit_recovers_exact_power_laws() {
    for (mu, nu) in [(2.0, 1.5), (1e-6, 2.5), (3.0, 0.0), (0.5, 1.0)] {
        let pts: Vec<(f64, f64)> = [100.0f64, 200.0, 400.0, 800.0]
            .iter()
            .map(|&n| (n, mu * n.powf(nu)))
            .collect();
        let (m2, n2) = fit_power_law(&pts).unwrap();
        assert!(((m2 - mu) / mu).abs() < 1e-9, "{m2} vs {mu}");
        assert!((n2 - nu).abs() < 1e-9, "{n2} vs {nu}");
    }
}
