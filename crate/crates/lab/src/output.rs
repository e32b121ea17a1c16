//! Data and summary sinks.
//!
//! Every data file starts with `# peelab <subcommand> schema=<n> config=<json>`.
//! CSV readers that honour `#` comments skip it.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::Format;
use crate::error::LabResult;

pub const SCHEMA: u32 = 1;

pub fn header_line(subcommand: &str, config: &str) -> String {
    format!("# peelab {subcommand} schema={SCHEMA} config={config}\n")
}

pub fn summary_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

pub fn open_data(output: Option<&Path>) -> io::Result<Box<dyn Write + Send>> {
    Ok(match output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_summary(output: Option<&Path>, summary: &Value) -> LabResult<()> {
    let text = serde_json::to_string_pretty(summary)?;
    match output {
        Some(p) => {
            let mut f = BufWriter::new(File::create(summary_path(p))?);
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => eprintln!("{text}"),
    }
    Ok(())
}

/// Rows as CSV under the config header, or as one JSON document.
pub fn write_table<T: Serialize>(
    w: &mut dyn Write,
    format: Format,
    subcommand: &str,
    config: &Value,
    rows: &[T],
) -> LabResult<()> {
    match format {
        Format::Csv => {
            w.write_all(header_line(subcommand, &config.to_string()).as_bytes())?;
            let mut c = csv::Writer::from_writer(&mut *w);
            for row in rows {
                c.serialize(row)?;
            }
            c.flush()?;
        }
        Format::Json => {
            let doc = json!({ "schema": SCHEMA, "subcommand": subcommand, "config": config, "rows": rows });
            serde_json::to_writer(&mut *w, &doc)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        r: u32,
        x: Option<f64>,
    }

    #[test]
    fn csv_table_has_header_and_blank_missing_cells() {
        let mut buf = Vec::new();
        let rows = [Row { r: 0, x: Some(0.5) }, Row { r: 1, x: None }];
        write_table(&mut buf, Format::Csv, "t", &json!({"a": 1}), &rows).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "# peelab t schema=1 config={\"a\":1}\nr,x\n0,0.5\n1,\n");
    }

    #[test]
    fn summary_sits_next_to_data() {
        assert_eq!(summary_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.summary.json"));
    }
}
