//! CSV output: RFC 4180 with a mandatory header row; floats carry 17
//! significant digits so re-reading reproduces the doubles bit-exactly.

use std::path::Path;

use crate::CliResult;

/// 17 significant digits in scientific form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Optional value: empty field when absent (degenerate cells).
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub struct CsvTable {
    writer: csv::Writer<std::fs::File>,
}

impl CsvTable {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let file = std::fs::File::create(path)?;
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(file);
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}
