mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use steiner::builder::{build, replay, BuildTrace};
use steiner::dimension;
use steiner::mu::MuFunction;
use steiner::primitives::enumerate_good_pairs;
use steiner::sampling::{random_k0, random_subset};
use steiner::{GoodPair, LinearSpace, PointSet};

fn space(seed: u64, n: usize, max_line: usize) -> (LinearSpace, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_k0(&mut rng, n, max_line);
    (m, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ls_text_round_trips(seed: u64, n in 0usize..=12, k in 3usize..=5) {
        let (m, _) = space(seed, n, k);
        let text = m.to_ls_string();
        let back = LinearSpace::parse_ls(&text).unwrap();
        prop_assert_eq!(back.to_ls_string(), text);
        prop_assert_eq!(back, m);
    }

    #[test]
    fn closures_are_consistent(seed: u64, n in 1usize..=10, k in 3usize..=5) {
        let (m, mut rng) = space(seed, n, k);
        let x = random_subset(&mut rng, n, 0.4);
        let icl = dimension::icl(&m, &x).unwrap();
        let d = dimension::d(&m, &x).unwrap();
        prop_assert!(x.is_subset(&icl));
        prop_assert!(dimension::is_strong(&m, &icl, &m.points()).unwrap().strong);
        prop_assert_eq!(m.delta(&icl).unwrap(), d);
        prop_assert!(d <= m.delta(&x).unwrap());
        prop_assert_eq!(icl.to_vec(), common::icl(&m, &x.to_vec()));
        let cl = dimension::d_closure(&m, &x).unwrap();
        prop_assert!(icl.is_subset(&cl));
        prop_assert_eq!(dimension::d(&m, &cl).unwrap(), d);
        prop_assert_eq!(dimension::d_closure(&m, &cl).unwrap(), cl);
        let y = x.union(&random_subset(&mut rng, n, 0.3));
        prop_assert!(dimension::d(&m, &y).unwrap() >= d);
    }

    #[test]
    fn codes_ignore_labels(seed: u64, n in 3usize..=8) {
        let (m, mut rng) = space(seed, n, 4);
        for p in enumerate_good_pairs(&m, 6).unwrap().into_iter().take(8) {
            let gp = &p.pair;
            let mut perm: Vec<usize> = (0..gp.size()).collect();
            perm.shuffle(&mut rng);
            let moved = gp.space().relabel(&perm, gp.size()).unwrap();
            let base: PointSet = gp.base().iter().map(|q| perm[q]).collect();
            let other = GoodPair::new_unchecked(moved, base);
            prop_assert_eq!(other.code(), gp.code());
            let decoded = gp.code().decode().unwrap();
            prop_assert_eq!(decoded.code(), gp.code());
        }
    }

    #[test]
    fn good_pair_text_round_trips(seed: u64, n in 3usize..=8) {
        let (m, _) = space(seed, n, 4);
        for p in enumerate_good_pairs(&m, 7).unwrap().into_iter().take(5) {
            let back = GoodPair::parse_gp(&p.pair.to_gp_string()).unwrap();
            prop_assert_eq!(back.code(), p.pair.code());
        }
    }

    #[test]
    fn mu_text_round_trips(alpha in 1i64..=4, v in 0i64..=5, k in 1usize..=3) {
        let mu = MuFunction::new(alpha).with(&steiner::gallery::cycle_ck(k), v);
        let back = MuFunction::parse_mu(&mu.to_mu_string()).unwrap();
        prop_assert_eq!(back.digest(), mu.digest());
        prop_assert_eq!(back, mu);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn short_builds_replay(seed: u64, alpha in 1i64..=2, steps in 0usize..=24) {
        let mu = MuFunction::new(alpha);
        let (m, trace) = build(&mu, steps, seed, 8).unwrap();
        prop_assert!(m.lines().iter().all(|l| l.len() == mu.line_length()));
        let text = trace.to_trace_string();
        let back = BuildTrace::parse_trace(&text).unwrap();
        prop_assert_eq!(back.to_trace_string(), text);
        prop_assert_eq!(replay(&back).unwrap(), m);
    }
}
