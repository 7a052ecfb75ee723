use crate::CliError;
use std::io::Write;
use std::path::PathBuf;

/// Writes `content` to the requested path or stdout.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).map_err(|e| CliError {
                code: 2,
                message: format!("stdout: {e}"),
            })
        }
    }
}

/// Converts a CSV table (first line headers) into a JSON array of records
/// so both formats carry identical data.
pub fn csv_to_json(csv: &str) -> String {
    let mut lines = csv.lines();
    let headers: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let rows: Vec<serde_json::Value> = lines
        .map(|line| {
            let mut obj = serde_json::Map::new();
            for (h, v) in headers.iter().zip(line.split(',')) {
                let value = v
                    .parse::<f64>()
                    .map(|x| {
                        serde_json::Number::from_f64(x)
                            .map(serde_json::Value::Number)
                            .unwrap_or(serde_json::Value::Null)
                    })
                    .unwrap_or_else(|_| serde_json::Value::String(v.to_string()));
                obj.insert((*h).to_string(), value);
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).unwrap_or_else(|_| "[]".into());
    s.push('\n');
    s
}

/// Renders in the chosen format.
pub fn emit_table(out: &Option<PathBuf>, format: &str, csv: &str) -> Result<(), CliError> {
    match format {
        "json" => emit(out, &csv_to_json(csv)),
        _ => emit(out, csv),
    }
}
