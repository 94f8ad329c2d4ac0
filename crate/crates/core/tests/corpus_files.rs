use tqnn::two_complex::{corpus, TwoComplex};

#[test]
fn bundled_files_match_builders() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/corpus");
    for (name, built) in corpus::all() {
        let text = std::fs::read_to_string(format!("{dir}/{name}.json")).unwrap();
        let parsed: TwoComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, built, "{name}");
        parsed.validate().unwrap();
    }
}
