// Rejects a broken default viseme map at build time.

use std::collections::BTreeMap;

const CODES: [&str; 33] = [
    "p", "b", "t", "d", "k", "g", "f", "v", "s", "z", "S", "Z", "m", "n", "J", "l", "L", "4", "R", "i", "e", "E", "a",
    "6", "O", "o", "u", "@", "6~", "e~", "i~", "o~", "u~",
];

fn main() {
    println!("cargo:rerun-if-changed=data/visemes.tsv");
    let text = std::fs::read_to_string("data/visemes.tsv").expect("data/visemes.tsv");
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        assert!(fields.len() == 3, "visemes.tsv:{}: expected 3 fields", n + 1);
        assert!(
            ["A", "B", "C", "E", "F", "O", "U"].contains(&fields[1]),
            "visemes.tsv:{}: unknown viseme {:?}",
            n + 1,
            fields[1]
        );
        assert!(
            CODES.contains(&fields[0]),
            "visemes.tsv:{}: unknown phoneme {:?}",
            n + 1,
            fields[0]
        );
        assert!(
            map.insert(fields[0], fields[1]).is_none(),
            "visemes.tsv:{}: duplicate {:?}",
            n + 1,
            fields[0]
        );
    }
    for code in CODES {
        assert!(map.contains_key(code), "visemes.tsv: phoneme {code:?} unmapped");
    }
    assert!(
        map["p"] == map["b"] && map["b"] == map["m"],
        "visemes.tsv: p, b and m must share a viseme"
    );
}
