//! `sphere-gas report`: render verification JSON artifacts as aligned tables.

use crate::CliError;
use std::fmt::Write as _;
use std::path::Path;

pub fn run(files: &[std::path::PathBuf], out: Option<&Path>) -> Result<i32, CliError> {
    if files.is_empty() {
        return Err(CliError::config(
            "report needs at least one JSON file (positional or via --config)",
        ));
    }
    let mut table = String::new();
    writeln!(
        table,
        "{:<28} {:>6} {:>10} {:>14} {:>14} {:>6}",
        "check", "n", "beta", "bound", "empirical", "pass"
    )
    .unwrap();
    for file in files {
        let text = std::fs::read_to_string(file)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", file.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid JSON {}: {e}", file.display())))?;
        let reports = match value.get("reports").and_then(|r| r.as_array()) {
            Some(array) => array.clone(),
            // A bare CheckReport or an array of them.
            None => match value {
                serde_json::Value::Array(array) => array,
                other => vec![other],
            },
        };
        for r in reports {
            let field = |name: &str| r.get(name).cloned().unwrap_or(serde_json::Value::Null);
            let num = |v: serde_json::Value| v.as_f64();
            writeln!(
                table,
                "{:<28} {:>6} {:>10} {:>14} {:>14} {:>6}",
                field("check").as_str().unwrap_or("?"),
                field("n").as_u64().map_or("—".into(), |v| v.to_string()),
                num(field("beta")).map_or("—".into(), |v| format!("{v:.2}")),
                num(field("theoretical_bound")).map_or("—".into(), |v| format!("{v:.5}")),
                num(field("empirical_value")).map_or("—".into(), |v| format!("{v:.5}")),
                match field("pass").as_bool() {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "—",
                },
            )
            .unwrap();
            if let Some(note) = field("note").as_str() {
                if !note.is_empty() {
                    writeln!(table, "    {note}").unwrap();
                }
            }
        }
    }
    print!("{table}");
    if let Some(path) = out {
        std::fs::create_dir_all(path)?;
        std::fs::write(path.join("report.txt"), table)?;
    }
    Ok(0)
}
