use nalgebra::DMatrix;
use num_integer::Integer;
use permix::perm::sweep;
use permix::permcore::classify_fast;
use permix::specmat::circulant::{circulant_modulus, sum_zero_eigenvalues};
use permix::specmat::rate::rate_only;
use permix::specmat::{
    build_a, build_ap, build_c, build_p, decelerates_exact, lambda_sigma, stochastic_eta, worst_permutation,
    worst_rate_bound,
};
use permix::Permutation;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn circulant_modulus_peaks_next_to_zero() {
    for n in 3..=512usize {
        for m in 2..n {
            let top = circulant_modulus(m, n, 1);
            for j in 2..n - 1 {
                assert!(circulant_modulus(m, n, j) <= top * (1.0 + 1e-12), "m={m} N={n} j={j}");
            }
            let mirror = circulant_modulus(m, n, n - 1);
            assert!((mirror - top).abs() <= 1e-12 * top.max(1.0), "m={m} N={n}: {mirror} vs {top}");
        }
    }
}

#[test]
fn permuted_stochastic_matrices_respect_eta() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.random_range(2..=16usize);
        let mut b = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.0..1.0f64));
        for mut col in b.column_iter_mut() {
            let s = col.sum();
            col /= s;
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(&mut rng);
        let p = DMatrix::from_fn(n, n, |i, j| if j == images[i] { 1.0 } else { 0.0 });
        let eta = stochastic_eta(&b).unwrap();
        let bp = &b * &p;
        let top = sum_zero_eigenvalues(&bp).unwrap().iter().map(|l| l.norm()).fold(0.0, f64::max);
        assert!(top <= eta.sqrt() + 1e-10, "n={n}: {top} > sqrt({eta})");
    }
}

#[test]
fn worst_rate_is_attained_and_maximal() {
    for n in 3..=8usize {
        for m in (2..n).filter(|m| m.gcd(&n) == 1) {
            let bound = worst_rate_bound(m, n).unwrap();
            let max = sweep(n, || 0.0f64, |acc, p| *acc = acc.max(rate_only(p, m, 1e-9).unwrap()), f64::max);
            assert!((max - bound).abs() < 1e-8, "m={m} N={n}: {max} vs {bound}");
            let w = worst_permutation(m, n).unwrap();
            assert!((lambda_sigma(&w, m, 1e-9).unwrap().lambda_sigma - bound).abs() < 1e-10);
            assert_eq!(build_p(&w).unwrap().mul(&build_a(m, n).unwrap()), build_c(m, n).unwrap());
        }
    }
    assert_eq!(worst_permutation(2, 5).unwrap().images(), &[0, 3, 1, 4, 2]);
    assert!((worst_rate_bound(2, 5).unwrap() - 0.809_016_994_374_947_4).abs() < 1e-15);
}

#[test]
fn numeric_and_exact_deceleration_agree_on_s8() {
    let (m, n) = (2, 8);
    let (slow_numeric, slow_exact) = sweep(
        n,
        || (0u64, 0u64),
        |acc, p| {
            let sigma = Permutation::new(p.to_vec()).unwrap();
            let numeric = rate_only(p, m, 1e-9).unwrap() > 0.5 + 1e-9;
            acc.0 += numeric as u64;
            if classify_fast(&sigma, m, n).unwrap().is_mixing() {
                let exact = decelerates_exact(&sigma, m).unwrap();
                assert_eq!(numeric, exact, "{sigma}");
                acc.1 += exact as u64;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    assert_eq!(slow_numeric, slow_exact);
    assert_eq!(slow_exact % 16, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_transfer_is_doubly_stochastic(
        (m, images) in (2usize..8, 2usize..24)
            .prop_flat_map(|(m, n)| (Just(m), Just((0..n).collect::<Vec<usize>>()).prop_shuffle()))
    ) {
        let sigma = Permutation::new(images).unwrap();
        let ap = build_ap(&sigma, m).unwrap();
        let m = m as i64;
        prop_assert!(ap.row_sums().iter().all(|&s| s == m));
        prop_assert!(ap.col_sums().iter().all(|&s| s == m));
    }
}

#[test]
fn reports_round_trip_through_json() {
    use permix::specmat::{shrink_check, RateReport, ShrinkReport};
    let sigma: Permutation = "[0,3,1,4,2]".parse().unwrap();
    let report = lambda_sigma(&sigma, 2, 1e-9).unwrap();
    let back: RateReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back, report);
    let shrink = shrink_check(&sigma, 3, 1e-8).unwrap();
    let back: ShrinkReport = serde_json::from_str(&serde_json::to_string(&shrink).unwrap()).unwrap();
    assert_eq!(back, shrink);
}
