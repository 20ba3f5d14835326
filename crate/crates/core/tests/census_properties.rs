use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use permix::bigcomb::factorial;
use permix::census::{
    b_j_exact, mc_slowdown, p_closed_form, p_exact_bruteforce, p_upper_bound_sum, slowdown_census,
    subshift_census, two_e_over_ell_pow_lower, CensusRow, MCEstimate, SubshiftCensus,
};
use permix::permcore::{stabilizer_order, BlockDecomposition};

/// All set partitions of `0..k` as restricted growth strings.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for label in 0..=max + 1 {
            cur.push(label);
            rec(i + 1, k, max.max(label), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        let mut cur = vec![0];
        rec(1, k, 0, &mut cur, &mut out);
    }
    out
}

#[test]
fn stabilizer_sum_matches_partition_formula() {
    for ell in 1..=6 {
        for m in 2..=3 {
            let n = m * ell;
            let mut by_blocks = vec![BigRational::zero(); ell + 1];
            for labels in set_partitions(ell) {
                let j = labels.iter().max().unwrap() + 1;
                // coset c of ℓZ/NZ is {c, c+ℓ, ...}
                let cells: Vec<usize> = (0..n).map(|x| labels[x % ell]).collect();
                let b = BlockDecomposition::from_labels(&cells);
                by_blocks[j] += BigRational::new(stabilizer_order(&b, m).unwrap(), factorial(n));
            }
            for (j, want) in by_blocks.iter().enumerate().skip(1) {
                assert_eq!(&b_j_exact(ell, m, j).unwrap(), want, "ell={ell} m={m} j={j}");
            }
        }
    }
}

#[test]
fn closed_forms_equal_sweeps() {
    for (ell, m) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
        assert_eq!(p_closed_form(ell, m).unwrap(), p_exact_bruteforce(ell, m, false).unwrap());
    }
}

#[test]
fn bound_chain_for_larger_ell() {
    for ell in 6..=14 {
        for m in 2..=4 {
            let sum = p_upper_bound_sum(ell, m).unwrap();
            let geometric: BigRational = (2..=ell).map(|j| two_e_over_ell_pow_lower(ell, (m - 1) * (j - 1))).sum();
            assert!(sum <= geometric, "ell={ell} m={m}");
            let x = 2.0 * std::f64::consts::E / ell as f64;
            let real: f64 = (2..=ell).map(|j| x.powi(((m - 1) * (j - 1)) as i32)).sum();
            assert!(real < 11.0 * x.powi(m as i32 - 1) * (1.0 + 1e-15));
        }
    }
    for ell in 2..=4 {
        assert!(p_exact_bruteforce(ell, 2, false).unwrap() <= p_upper_bound_sum(ell, 2).unwrap());
    }
}

#[test]
fn census_counts_are_proportions() {
    for n in 2..=7 {
        for m in 2..=4 {
            let row = slowdown_census(m, n, 1e-9, false).unwrap();
            assert_eq!(row.total, factorial(n));
            for c in [row.nonmixing_count.clone().unwrap(), row.slow_count.clone().unwrap()] {
                assert!(c >= BigInt::zero() && c <= row.total);
            }
            let p = row.slow_proportion().unwrap();
            assert!(p >= BigRational::zero() && p <= BigRational::one());
        }
    }
    assert!(slowdown_census(2, 9, 1e-9, false).is_err());
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_slowdown(2, 8, 2000, 99, 1e-9).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, mc_slowdown(2, 8, 2000, 99, 1e-9).unwrap());
    assert_ne!(one, mc_slowdown(2, 8, 2000, 100, 1e-9).unwrap());
    let exact = 16890.0 / 40320.0;
    assert!((one.proportion - exact).abs() < 4.0 * one.std_error);
}

#[test]
fn json_round_trips() {
    let row = slowdown_census(4, 6, 1e-9, false).unwrap();
    let text = serde_json::to_string(&row).unwrap();
    assert!(text.contains("\"slow_count\":\"144\""));
    assert_eq!(serde_json::from_str::<CensusRow>(&text).unwrap(), row);

    let mc = mc_slowdown(2, 6, 100, 1, 1e-9).unwrap();
    let back: MCEstimate = serde_json::from_str(&serde_json::to_string(&mc).unwrap()).unwrap();
    assert_eq!(back, mc);

    let sub = subshift_census(2).unwrap();
    let back: SubshiftCensus = serde_json::from_str(&serde_json::to_string(&sub).unwrap()).unwrap();
    assert_eq!(back, sub);
    assert_eq!(sub.witness_proportion, "5/12");
}
