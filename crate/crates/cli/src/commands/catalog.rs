use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use biphoton_core::config::from_json;
use biphoton_core::crystal::validate_record;
use biphoton_core::CrystalRecord;

use crate::exit::{CliError, CliResult, ExitCode};

/// One line per record; exit 3 if any record fails.
pub fn catalog_validate(path: &Path, out: &mut dyn Write) -> CliResult<ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let records: Vec<CrystalRecord> = from_json(&text)?;
    let mut seen = HashSet::new();
    let mut failed = 0;
    for r in &records {
        let verdict = if !seen.insert(r.name.as_str()) {
            Err(format!("duplicate name `{}`", r.name))
        } else {
            validate_record(r).map_err(|e| e.to_string())
        };
        match verdict {
            Ok(()) => {
                let _ = writeln!(out, "PASS {}", r.name);
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(out, "FAIL {}: {e}", r.name);
            }
        }
    }
    let _ = writeln!(out, "{} records, {failed} failed", records.len());
    Ok(if failed == 0 { ExitCode::Ok } else { ExitCode::Validation })
}
