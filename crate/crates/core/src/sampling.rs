//! Seeded random structures for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dimension::in_k0;
use crate::pointset::PointSet;
use crate::space::{LinearSpace, Point};

/// A random linear space on `n` points: up to `attempts` random lines of
/// 3..=`max_line` points, each kept only if it meets every earlier line in at
/// most one point.
pub fn random_linear_space<R: Rng>(rng: &mut R, n: usize, attempts: usize, max_line: usize) -> LinearSpace {
    let mut lines: Vec<Vec<Point>> = Vec::new();
    if n >= 3 {
        let pts: Vec<Point> = (0..n).collect();
        for _ in 0..attempts {
            let k = rng.gen_range(3..=max_line.clamp(3, n));
            let mut l: Vec<Point> = pts.choose_multiple(rng, k).copied().collect();
            l.sort_unstable();
            if lines.iter().all(|m| m.iter().filter(|p| l.binary_search(p).is_ok()).count() <= 1) {
                lines.push(l);
            }
        }
    }
    LinearSpace::from_lines(n, lines).unwrap()
}

/// A random space in K_0: lines are dropped at random until every subset has
/// non-negative δ.
pub fn random_k0<R: Rng>(rng: &mut R, n: usize, max_line: usize) -> LinearSpace {
    let attempts = rng.gen_range(0..=2 * n);
    let mut s = random_linear_space(rng, n, attempts, max_line);
    while !in_k0(&s).expect("small spaces are searched exhaustively") {
        let mut lines: Vec<Vec<Point>> = s.lines().iter().map(|l| l.points().to_vec()).collect();
        let i = rng.gen_range(0..lines.len());
        lines.swap_remove(i);
        s = LinearSpace::from_lines(n, lines).unwrap();
    }
    s
}

/// Each point of `0..n` independently with probability `p`.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, p: f64) -> PointSet {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_and_valid() {
        let a = random_k0(&mut ChaCha8Rng::seed_from_u64(3), 9, 4);
        let b = random_k0(&mut ChaCha8Rng::seed_from_u64(3), 9, 4);
        assert_eq!(a, b);
        assert!(in_k0(&a).unwrap());
    }
}
