//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use signsched::{GlossSequence, MouthFlags, SignDatabase};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn database(name: &str) -> SignDatabase {
    let bytes = std::fs::read(fixture(name)).expect("fixture database");
    SignDatabase::from_slice(&bytes, &MouthFlags::default()).expect("valid fixture database")
}

pub fn corpus() -> Vec<GlossSequence> {
    (1..=20)
        .map(|i| {
            let bytes = std::fs::read(fixture(&format!("corpus/s{i:02}.json"))).expect("corpus sentence");
            GlossSequence::from_json(&bytes).expect("valid corpus sentence")
        })
        .collect()
}

/// Every clip of the database once, in gloss order.
pub fn all_glosses(db: &SignDatabase) -> GlossSequence {
    GlossSequence::from_glosses(db.clips().map(|c| c.gloss().to_string()))
}
