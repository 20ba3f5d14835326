use std::io::Write;

use serde::Serialize;

use crate::{CliError, Format};

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub trait Report: Serialize {
    fn text(&self) -> String;

    fn table(&self) -> Option<Table> {
        None
    }
}

fn io_error(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(format!("writing output: {e}"))
}

pub fn emit<R: Report>(report: &R, format: Format, runtime_ms: Option<u128>) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            let mut value = serde_json::to_value(report).map_err(io_error)?;
            if let (Some(ms), Some(obj)) = (runtime_ms, value.as_object_mut()) {
                obj.insert("runtime_ms".into(), (ms as u64).into());
            }
            let text = serde_json::to_string_pretty(&value).map_err(io_error)?;
            writeln!(out, "{text}").map_err(io_error)?;
        }
        Format::Csv => {
            let table = report
                .table()
                .ok_or_else(|| CliError::Usage("CSV output is not available for this command".into()))?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.header).map_err(io_error)?;
            for row in &table.rows {
                w.write_record(row).map_err(io_error)?;
            }
            w.flush().map_err(io_error)?;
        }
        Format::Text => {
            write!(out, "{}", report.text()).map_err(io_error)?;
        }
    }
    Ok(())
}
