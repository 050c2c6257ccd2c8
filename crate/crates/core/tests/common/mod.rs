#![allow(dead_code)]

use std::path::PathBuf;

use collinlab::{load_csv, CsvSchema, Dataset};

/// Looks for a dataset CSV first in the environment variable, then under
/// `data/` at the workspace root.
fn locate(env: &str, file: &str) -> Option<PathBuf> {
    if let Ok(p) = std::env::var(env) {
        let p = PathBuf::from(p);
        return p.exists().then_some(p);
    }
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file);
    p.exists().then_some(p)
}

/// Klein–Goldberger consumption data: columns `C`, `I`, `InA`, `IA`.
pub fn klein_goldberger() -> Option<Dataset> {
    let path = locate("COLLINLAB_KG_CSV", "klein_goldberger.csv")?;
    let schema = CsvSchema::new("C", vec!["I".into(), "InA".into(), "IA".into()]).unwrap();
    Some(load_csv(path, &schema).expect("Klein–Goldberger CSV loads"))
}

/// Mortgage-debt data: columns `D`, `C`, `I`.
pub fn wissell() -> Option<Dataset> {
    let path = locate("COLLINLAB_WISSELL_CSV", "wissell.csv")?;
    let schema = CsvSchema::new("D", vec!["C".into(), "I".into()]).unwrap();
    Some(load_csv(path, &schema).expect("Wissell CSV loads"))
}

pub fn skip(what: &str, env: &str) {
    eprintln!("SKIPPED: {what} (set {env} to the dataset CSV to run)");
}

/// `|got − want| ≤ tol · max(1, |want|)`: the printed tables carry 4–5
/// significant digits, so comparisons are relative for large magnitudes.
pub fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}
