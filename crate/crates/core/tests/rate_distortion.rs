mod common;

use misobc_core::capacity::rd::water_level;
use misobc_core::{
    ergodic_wyner_rate, rd_reverse_waterfill, rd_suboptimal, Error, GainDistribution, SamplingConfig,
    SeededRng,
};

fn random_set(rng: &mut SeededRng) -> (Vec<f64>, f64) {
    let len = 1 + (rng.uniform() * 200.0) as usize;
    let scale = 0.1 + 10.0 * rng.uniform();
    let v: Vec<f64> = (0..len)
        .map(|_| if rng.uniform() < 0.05 { 0.0 } else { scale * -rng.uniform().ln() })
        .collect();
    (v, 0.01 + 5.0 * rng.uniform())
}

#[test]
fn waterfill_never_exceeds_suboptimal() {
    let mut rng = SeededRng::new(21, 0);
    for _ in 0..100 {
        let (v, d) = random_set(&mut rng);
        let opt = rd_reverse_waterfill(&v, d).unwrap();
        let sub = rd_suboptimal(&v, d).unwrap();
        assert!(opt <= sub + 1e-12, "{opt} > {sub}");
        assert!(opt >= 0.0);
    }
}

#[test]
fn waterfill_meets_the_budget_exactly() {
    let mut rng = SeededRng::new(22, 0);
    for _ in 0..100 {
        let (v, d) = random_set(&mut rng);
        if let Some(level) = water_level(&v, d).unwrap() {
            let used: f64 = v.iter().map(|&s| s.min(level)).sum::<f64>() / v.len() as f64;
            assert!((used - d).abs() < 1e-9 * d.max(1.0), "{used} vs {d}");
        }
    }
}

#[test]
fn constant_variance_closed_forms() {
    for s in [0.5, 1.0, 4.0, 17.0] {
        for d in [0.1, 0.5, s] {
            let v = vec![s; 37];
            assert_eq!(rd_reverse_waterfill(&v, d).unwrap(), (s / d).log2());
        }
        assert_eq!(rd_reverse_waterfill(&[s; 5], s * 2.0).unwrap(), 0.0);
        assert_eq!(rd_suboptimal(&[s; 5], s).unwrap(), 1.0);
    }
    assert_eq!(rd_reverse_waterfill(&[4.0], 1.0).unwrap(), 2.0);
    assert_eq!(rd_suboptimal(&[0.0; 8], 1.0).unwrap(), 0.0);
}

#[test]
fn two_level_matches_brute_force() {
    for (budget, golden) in [(1.0, None), (2.0, Some(0.207_518_749_639_421_9)), (0.3, None), (2.4, None)] {
        let fast = rd_reverse_waterfill(&[1.0, 4.0], budget).unwrap();
        let brute = common::two_level_rate_brute(1.0, 4.0, budget);
        assert!((fast - brute).abs() < 1e-6, "budget {budget}: {fast} vs {brute}");
        if let Some(g) = golden {
            assert!((fast - g).abs() < 1e-12);
        }
    }
    // Water level by golden section on the distortion mismatch.
    let level = common::golden_section(|l| ((1f64.min(l) + 4f64.min(l)) / 2.0 - 1.0).abs(), 0.0, 4.0, 1e-12);
    let rate = ((1.0 / level).log2().max(0.0) + (4.0 / level).log2().max(0.0)) / 2.0;
    assert!((rd_reverse_waterfill(&[1.0, 4.0], 1.0).unwrap() - rate).abs() < 1e-6);
}

#[test]
fn wyner_closed_forms() {
    let mc = SamplingConfig::new(1000, 9);
    let zero = GainDistribution::Constant { value: 0.0 };
    let one = GainDistribution::Constant { value: 1.0 };
    assert_eq!(ergodic_wyner_rate(1.0, 1.0, 0.5, &zero, &mc).unwrap().value, 1.0);
    assert_eq!(ergodic_wyner_rate(1.0, 1.0, 0.25, &one, &mc).unwrap().value, 1.0);
    assert_eq!(ergodic_wyner_rate(1.0, 1.0, 0.5, &one, &mc).unwrap().value, 0.0);
    match ergodic_wyner_rate(1.0, 1.0, 0.6, &one, &mc) {
        Err(Error::Domain(msg)) => assert!(msg.contains("0 <= D <= sigma^2_(X|Y)"), "{msg}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn wyner_with_random_gain_matches_quadrature() {
    // A ~ U[0, 1], σ_X² = σ_U² = 1: E log₂(1/((1 + A²) D)).
    let gain = GainDistribution::Uniform { low: 0.0, high: 1.0 };
    let est = ergodic_wyner_rate(1.0, 1.0, 0.25, &gain, &SamplingConfig::new(200_000, 3)).unwrap();
    let exact = 2.0 - common::simpson(&|a: f64| (1.0 + a * a).log2(), 0.0, 1.0, 1e-14);
    assert!((est.value - exact).abs() < 4.0 * est.stderr, "{} vs {exact}", est.value);
}
