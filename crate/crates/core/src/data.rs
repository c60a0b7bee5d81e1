use std::path::PathBuf;

/// `WEYLPAIN_DATA`, else the `data/` directory of the source tree.
pub fn data_dir() -> PathBuf {
    match std::env::var_os("WEYLPAIN_DATA") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")),
    }
}
