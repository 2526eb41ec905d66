mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steiner::primitives::{enumerate_good_pairs, good_pairs_touching};
use steiner::sampling::random_k0;

fn pairs_of(found: Vec<steiner::primitives::EmbeddedPair>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut v: Vec<_> = found.into_iter().map(|p| (p.base.to_vec(), p.ext.to_vec())).collect();
    v.sort();
    v.dedup();
    v
}

#[test]
fn pruned_enumeration_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let n = rng.gen_range(4..=9);
        let m = random_k0(&mut rng, n, 4);
        let bound = rng.gen_range(3..=n);
        assert_eq!(pairs_of(enumerate_good_pairs(&m, bound).unwrap()), common::good_pairs(&m, bound), "{m:?} bound {bound}");
    }
}

#[test]
fn touching_enumeration_is_the_touching_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..80 {
        let n = rng.gen_range(5..=9);
        let m = random_k0(&mut rng, n, 3);
        let t = common::set(&[rng.gen_range(0..n)]);
        let all = common::good_pairs(&m, n);
        let want: Vec<_> = all.into_iter().filter(|(b, c)| b.iter().chain(c).any(|&p| t.contains(p))).collect();
        assert_eq!(pairs_of(good_pairs_touching(&m, n, &t).unwrap()), want);
    }
}

#[test]
fn pruned_enumeration_matches_brute_force_on_gallery_pieces() {
    use steiner::amalgam::free_amalgam_mapped;
    use steiner::gallery::{chain_link, cycle_ck, fano, four_line_pair};
    let link = chain_link();
    // a link glued onto a triangle of the Fano plane
    let fano_link = free_amalgam_mapped(&fano(), link.space(), &[(0, 0), (1, 1), (2, 2)]).unwrap().0;
    let spaces = vec![fano(), cycle_ck(1).space().clone(), cycle_ck(2).space().clone(), link.space().clone(), four_line_pair().space().clone(), fano_link];
    for m in spaces {
        let bound = m.n();
        assert_eq!(pairs_of(enumerate_good_pairs(&m, bound).unwrap()), common::good_pairs(&m, bound), "{m:?}");
    }
}
