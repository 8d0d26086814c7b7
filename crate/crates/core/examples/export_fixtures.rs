//! Writes the named structures as JSON files, each with a `_note`.
//!
//!     cargo run --example export_fixtures -- [dir]

use std::path::PathBuf;

use infostruct::fixtures::corpus;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir)?;
    for (name, note, mut doc) in corpus() {
        doc["_note"] = note.into();
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        println!("{}", path.display());
    }
    Ok(())
}
