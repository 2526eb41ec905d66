//! Canonical labelling of small linear spaces by individualization and
//! refinement. Every leaf of the search tree is visited and the
//! lexicographically least relabelled line list is kept, so the result is a
//! complete invariant for the coloured structure.

type Sig = (u32, Vec<(usize, Vec<u32>)>);

fn refine(lines: &[Vec<usize>], inc: &[Vec<usize>], colors: &mut Vec<u32>) {
    let n = colors.len();
    let mut classes = distinct(colors);
    loop {
        let sigs: Vec<Sig> = (0..n)
            .map(|p| {
                let mut per: Vec<(usize, Vec<u32>)> = inc[p]
                    .iter()
                    .map(|&l| {
                        let mut cs: Vec<u32> = lines[l].iter().filter(|&&q| q != p).map(|&q| colors[q]).collect();
                        cs.sort_unstable();
                        (lines[l].len(), cs)
                    })
                    .collect();
                per.sort();
                (colors[p], per)
            })
            .collect();
        let mut sorted: Vec<&Sig> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<u32> = sigs.iter().map(|s| sorted.binary_search(&s).unwrap() as u32).collect();
        *colors = next;
        let now = sorted.len();
        if now == classes {
            return;
        }
        classes = now;
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct Best {
    lines: Option<Vec<Vec<usize>>>,
    order: Vec<usize>,
}

fn search(lines: &[Vec<usize>], inc: &[Vec<usize>], mut colors: Vec<u32>, best: &mut Best) {
    refine(lines, inc, &mut colors);
    let n = colors.len();
    let mut size = vec![0usize; n];
    for &c in &colors {
        size[c as usize] += 1;
    }
    match (0..n).find(|&c| size[c] > 1) {
        None => {
            let mut relabelled: Vec<Vec<usize>> = lines
                .iter()
                .map(|l| {
                    let mut v: Vec<usize> = l.iter().map(|&p| colors[p] as usize).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            relabelled.sort();
            if best.lines.as_ref().is_none_or(|b| relabelled < *b) {
                let mut order = vec![0; n];
                for (p, &c) in colors.iter().enumerate() {
                    order[c as usize] = p;
                }
                best.lines = Some(relabelled);
                best.order = order;
            }
        }
        Some(cell) => {
            let members: Vec<usize> = (0..n).filter(|&p| colors[p] as usize == cell).collect();
            for &v in &members {
                let next: Vec<u32> = colors
                    .iter()
                    .enumerate()
                    .map(|(q, &c)| if c as usize == cell && q != v { 2 * c + 1 } else { 2 * c })
                    .collect();
                search(lines, inc, next, best);
            }
        }
    }
}

/// Canonical form of a coloured linear space on `0..n`. Returns `order`
/// (canonical position → original point) and the relabelled, sorted lines.
/// Colours are respected: a point of colour c always precedes a point of a
/// larger colour.
pub(crate) fn canonical_form(n: usize, lines: &[Vec<usize>], colors: &[u32]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut inc = vec![Vec::new(); n];
    for (i, l) in lines.iter().enumerate() {
        for &p in l {
            inc[p].push(i);
        }
    }
    let mut best = Best { lines: None, order: Vec::new() };
    search(lines, &inc, colors.to_vec(), &mut best);
    (best.order, best.lines.unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fano_lines() -> Vec<Vec<usize>> {
        vec![vec![0, 1, 3], vec![1, 2, 4], vec![0, 2, 5], vec![0, 4, 6], vec![1, 5, 6], vec![2, 3, 6], vec![3, 4, 5]]
    }

    #[test]
    fn invariant_under_relabelling() {
        let lines = fano_lines();
        let (_, base) = canonical_form(7, &lines, &[0; 7]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let mut perm: Vec<usize> = (0..7).collect();
            perm.shuffle(&mut rng);
            let moved: Vec<Vec<usize>> = lines.iter().map(|l| l.iter().map(|&p| perm[p]).collect()).collect();
            assert_eq!(canonical_form(7, &moved, &[0; 7]).1, base);
        }
    }

    #[test]
    fn order_reproduces_lines() {
        let lines = fano_lines();
        let (order, canon) = canonical_form(7, &lines, &[0; 7]);
        let mut pos = [0; 7];
        for (i, &p) in order.iter().enumerate() {
            pos[p] = i;
        }
        let mut again: Vec<Vec<usize>> = lines
            .iter()
            .map(|l| {
                let mut v: Vec<usize> = l.iter().map(|&p| pos[p]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        again.sort();
        assert_eq!(again, canon);
    }

    #[test]
    fn colours_separate() {
        // a single 3-line: distinguishing one point changes nothing structural
        let lines = vec![vec![0, 1, 2]];
        let (order, _) = canonical_form(3, &lines, &[1, 0, 0]);
        assert_eq!(order[2], 0);
    }
}
