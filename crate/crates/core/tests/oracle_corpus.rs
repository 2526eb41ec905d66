mod common;

use steiner::dimension;

#[test]
#[ignore = "rewrites tests/data/corpus.txt"]
fn regenerate_corpus() {
    std::fs::write(common::corpus::PATH, common::corpus::generate()).unwrap();
}

#[test]
fn corpus_is_frozen() {
    assert_eq!(std::fs::read_to_string(common::corpus::PATH).unwrap(), common::corpus::generate());
}

#[test]
fn pruned_searches_match_frozen_values() {
    let corpus = common::corpus::load();
    assert_eq!(corpus.len(), 200);
    for inst in &corpus {
        let m = &inst.space;
        for q in &inst.queries {
            assert_eq!(dimension::is_strong(m, &q.x, &m.points()).unwrap().strong, q.strong);
            assert_eq!(dimension::is_strong(m, &q.x, &q.hi).unwrap().strong, q.hi_strong);
            assert_eq!(dimension::icl(m, &q.x).unwrap().to_vec(), q.icl);
            assert_eq!(dimension::d(m, &q.x).unwrap(), q.d);
        }
    }
}
