use permix::perm::sweep;
use permix::permcore::{
    classify_fast, classify_oracle, delta, has_subshift_witness, image, is_coset_union, spread, MapFamily,
    MixingStatus, Subset, DEFAULT_ORACLE_CAP,
};
use permix::Permutation;
use proptest::prelude::*;

fn divisor_pairs(max_n: usize) -> Vec<(usize, usize)> {
    (2..=max_n)
        .flat_map(|n| (2..=n).filter(move |m| n % m == 0).map(move |m| (m, n)))
        .collect()
}

fn spread_by_definition(a: u64, m: usize, n: usize) -> u64 {
    let mut out = 0u64;
    for x in (0..n).filter(|x| a >> x & 1 == 1) {
        for d in 0..m {
            out |= 1 << ((m * x + d) % n);
        }
    }
    out
}

fn rotate(a: u64, by: usize, n: usize) -> u64 {
    let mut out = 0u64;
    for x in (0..n).filter(|x| a >> x & 1 == 1) {
        out |= 1 << ((x + by) % n);
    }
    out
}

fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

#[test]
fn spread_keeps_size_exactly_on_coset_unions() {
    for (m, n) in divisor_pairs(12) {
        let ell = n / m;
        for a in 0..(1u64 << n) {
            let s = spread(Subset(a), m, n);
            assert_eq!(s.0, spread_by_definition(a, m, n));
            let invariant = rotate(a, ell, n) == a;
            assert_eq!(is_coset_union(Subset(a), ell, n), invariant);
            assert_eq!(s.len() == Subset(a).len(), invariant, "m={m} N={n} A={}", Subset(a));
            assert!(s.len() <= m * Subset(a).len());
        }
    }
}

#[test]
fn delta_covers_by_interval_arithmetic() {
    for m in 2..=5 {
        for ell in 1..=5 {
            let n = m * ell;
            let d = delta(m, n).unwrap();
            let mut seen = vec![false; n];
            for j in 0..n {
                let k = d.apply(j);
                // I_k ⊆ f(I_j) = [mj/N, m(j+1)/N) mod 1
                assert!((k + n - (m * j) % n) % n < m, "m={m} N={n} j={j}");
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
    }
    assert_eq!(delta(2, 4).unwrap().images(), &[0, 2, 1, 3]);
    assert_eq!(delta(2, 6).unwrap().images(), &[0, 2, 4, 1, 3, 5]);
    assert_eq!(delta(3, 3).unwrap().images(), &[0, 1, 2]);
}

#[test]
fn fast_and_subset_classifiers_agree() {
    for m in [2usize, 3, 4] {
        for n in 2..=8usize {
            let family = MapFamily::multiply(m, n).unwrap();
            let bad = sweep(
                n,
                || 0u64,
                |acc, p| {
                    let sigma = Permutation::new(p.to_vec()).unwrap();
                    let fast = classify_fast(&sigma, m, n).unwrap();
                    let slow = classify_oracle(&sigma, &family, DEFAULT_ORACLE_CAP).unwrap();
                    if fast.status != slow.status {
                        *acc += 1;
                    }
                    if let Some(w) = &fast.witness {
                        assert!(w.ell_stable(n / m));
                        let pi = sigma.compose(&delta(m, n).unwrap()).unwrap();
                        assert!(w.is_stabilized_by(&pi));
                    }
                },
                |a, b| a + b,
            );
            assert_eq!(bad, 0, "m={m} N={n}");
        }
    }
}

#[test]
fn subshift_witness_forces_non_mixing() {
    for ell in 1..=4 {
        let family = MapFamily::subshift(ell).unwrap();
        let n = 2 * ell;
        let bad = sweep(
            n,
            || 0u64,
            |acc, p| {
                if has_subshift_witness(p) {
                    let sigma = Permutation::new(p.to_vec()).unwrap();
                    let v = classify_oracle(&sigma, &family, DEFAULT_ORACLE_CAP).unwrap();
                    if v.status != MixingStatus::NonMixing {
                        *acc += 1;
                    }
                }
            },
            |a, b| a + b,
        );
        assert_eq!(bad, 0, "ell={ell}");
    }
}

#[test]
fn documented_examples() {
    assert_eq!(spread(Subset::from_indices([0]), 2, 6), Subset::from_indices([0, 1]));
    assert_eq!(spread(Subset::from_indices([0, 3]), 2, 6), Subset::from_indices([0, 1]));
    assert_eq!(spread(Subset::from_indices(0..5), 3, 5), Subset::full(5));
    let fam = MapFamily::multiply(2, 4).unwrap();
    let id = Permutation::identity(4);
    assert_eq!(image(Subset::from_indices([1]), &id, &fam).unwrap(), Subset::from_indices([2, 3]));
    let sub = MapFamily::subshift(2).unwrap();
    assert_eq!(image(Subset::from_indices([0, 2, 3]), &id, &sub).unwrap(), Subset::from_indices([0, 1]));

    let sigma = Permutation::new(vec![0, 2, 1, 3]).unwrap();
    let v = classify_fast(&sigma, 2, 4).unwrap();
    assert_eq!(v.status, MixingStatus::NonMixing);
    assert_eq!(v.witness.unwrap().blocks(), &[vec![0, 2], vec![1, 3]]);
    assert!(classify_fast(&id, 2, 4).unwrap().is_mixing());
    assert!(classify_oracle(&id, &fam, DEFAULT_ORACLE_CAP).unwrap().is_mixing());
    let swap = Permutation::new(vec![0, 2, 1]).unwrap();
    assert!(classify_oracle(&swap, &MapFamily::multiply(2, 3).unwrap(), DEFAULT_ORACLE_CAP)
        .unwrap()
        .is_mixing());
    let pinned = Permutation::new(vec![2, 0, 1, 3]).unwrap();
    assert!(!classify_oracle(&pinned, &sub, DEFAULT_ORACLE_CAP).unwrap().is_mixing());
    let id2 = Permutation::identity(2);
    assert!(classify_oracle(&id2, &MapFamily::multiply(2, 2).unwrap(), DEFAULT_ORACLE_CAP)
        .unwrap()
        .is_mixing());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructed_permutations_are_bijections(n in 1usize..=20, seed in any::<u64>()) {
        let rank = seed % (1..=n as u64).product::<u64>();
        let p = Permutation::unrank(n, rank);
        let mut sorted = p.images().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(p.compose(&p.inverse()).unwrap(), Permutation::identity(n));
        let back: Permutation = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn non_bijections_are_rejected(v in prop::collection::vec(0usize..6, 1..6)) {
        let mut sorted = v.clone();
        sorted.sort_unstable();
        let is_perm = sorted == (0..v.len()).collect::<Vec<_>>();
        prop_assert_eq!(Permutation::new(v).is_ok(), is_perm);
    }

    #[test]
    fn images_never_shrink((m, sigma) in (2usize..5, 2usize..11).prop_flat_map(|(m, n)| (Just(m), arb_perm(n)))) {
        let n = sigma.n();
        let fam = MapFamily::multiply(m, n).unwrap();
        for a in 0..(1u64 << n) {
            let img = image(Subset(a), &sigma, &fam).unwrap();
            prop_assert!(img.len() >= Subset(a).len());
        }
    }

    #[test]
    fn size_preserved_iff_coset_union_iff_block_map(
        (m, sigma) in (2usize..5, 1usize..5)
            .prop_filter("N <= 12", |(m, ell)| m * ell <= 12)
            .prop_flat_map(|(m, ell)| (Just(m), arb_perm(m * ell)))
    ) {
        let n = sigma.n();
        let ell = n / m;
        let fam = MapFamily::multiply(m, n).unwrap();
        let pi = sigma.compose(&delta(m, n).unwrap()).unwrap();
        for a in 0..(1u64 << n) {
            let g = image(Subset(a), &sigma, &fam).unwrap();
            let same_size = g.len() == Subset(a).len();
            let coset = rotate(a, ell, n) == a;
            let moved = Subset::from_indices(Subset(a).iter().map(|x| pi.apply(x)));
            prop_assert_eq!(same_size, coset);
            prop_assert_eq!(coset, moved == g);
        }
    }
}

#[test]
fn verdicts_round_trip_through_json() {
    use permix::permcore::MixingVerdict;
    let sigma = Permutation::new(vec![0, 2, 1, 3]).unwrap();
    let v = classify_fast(&sigma, 2, 4).unwrap();
    let text = serde_json::to_string(&v).unwrap();
    assert_eq!(text, r#"{"status":"NonMixing","witness":[[0,2],[1,3]]}"#);
    assert_eq!(serde_json::from_str::<MixingVerdict>(&text).unwrap(), v);
    let back: Permutation = serde_json::from_str(&serde_json::to_string(&sigma).unwrap()).unwrap();
    assert_eq!(back, sigma);
}
