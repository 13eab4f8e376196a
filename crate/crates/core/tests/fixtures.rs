//! The alist files under tests/data are generated by the IRA construction;
//! these tests pin them to it. Regenerate with
//! `SPHERECODE_WRITE_FIXTURES=1 cargo test --test fixtures`.

use std::path::PathBuf;

use spherecode::fec::{ira_code, load_alist, parse_alist, SystematicEncoder};
use spherecode::Error;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

const IRA: [(&str, usize, usize); 2] = [("ira648_r34.alist", 486, 162), ("ira648_r12.alist", 324, 324)];
const IRA_SEED: u64 = 7;

#[test]
fn ira_fixtures_match_construction() {
    for (name, k, m) in IRA {
        let built = ira_code(k, m, 3, IRA_SEED).unwrap();
        if std::env::var_os("SPHERECODE_WRITE_FIXTURES").is_some() {
            std::fs::write(data(name), built.to_alist()).unwrap();
        }
        let loaded = load_alist(data(name)).unwrap();
        assert_eq!(loaded.n(), 648);
        assert_eq!(loaded.m(), m);
        assert_eq!(loaded.rows(), built.rows(), "{name}");
        assert_eq!(SystematicEncoder::new(&loaded).unwrap().k(), k);
    }
}

#[test]
fn small_fixture_round_trips() {
    let pc = load_alist(data("small_6_3.alist")).unwrap();
    assert_eq!((pc.n(), pc.m()), (6, 3));
    assert_eq!(parse_alist(&pc.to_alist()).unwrap().rows(), pc.rows());
}

#[test]
fn malformed_fixture_is_rejected_with_a_line() {
    match load_alist(data("malformed.alist")) {
        Err(Error::Parse { line, .. }) => assert!(line > 0),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(matches!(load_alist(data("missing.alist")), Err(Error::Io(_))));
}
