use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steiner::dimension::{check_flatness, FlatnessMode};
use steiner::sampling::{random_k0, random_subset};
use steiner::{LinearSpace, PointSet};

/// Violations of (*) for δ over random families of 1..=4 subsets.
fn violations(seed: u64, max_line: usize) -> Vec<(LinearSpace, Vec<PointSet>, i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let m = random_k0(&mut rng, n, max_line);
        let s = rng.gen_range(1..=4);
        let fam: Vec<PointSet> = (0..s).map(|_| random_subset(&mut rng, n, 0.6)).collect();
        let r = check_flatness(&m, &fam, FlatnessMode::Delta).unwrap();
        if !r.holds {
            bad.push((m, fam, r.lhs, r.rhs));
        }
    }
    bad
}

// With only 3-point lines each line's nullity is an indicator, and the
// alternating sum over a family counts a line at most once.
#[test]
fn delta_is_flat_on_triple_systems() {
    assert!(violations(302, 3).is_empty());
}

#[test]
fn two_sets_never_violate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let m = random_k0(&mut rng, 10, 6);
        let fam = [random_subset(&mut rng, 10, 0.6), random_subset(&mut rng, 10, 0.6)];
        assert!(check_flatness(&m, &fam, FlatnessMode::Delta).unwrap().holds);
    }
}

#[test]
fn six_point_line_breaks_three_set_bound() {
    let line = LinearSpace::from_lines(6, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
    let fam = [PointSet::from([2, 3, 4]), PointSet::from([2, 3, 5]), PointSet::from([0, 1, 2, 4, 5])];
    let r = check_flatness(&line, &fam, FlatnessMode::Delta).unwrap();
    assert_eq!((r.holds, r.lhs, r.rhs), (false, 2, 1));
}

// The full criterion, kept exact. It fails: see six_point_line_breaks_three_set_bound.
#[test]
#[ignore = "δ violates (*) once lines have four or more points"]
fn delta_is_flat_for_families_up_to_four() {
    let bad = violations(302, 5);
    assert!(bad.is_empty(), "{} violations, first: {:?}", bad.len(), bad.first());
}
