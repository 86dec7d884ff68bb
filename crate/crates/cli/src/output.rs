//! Artifact buffering and all-or-nothing writes.

use std::fs;
use std::path::Path;

use crate::CliError;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV document held in memory until the run succeeds.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_json(&mut self, name: &str, value: &serde_json::Value) {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        self.add(name, text.into_bytes());
    }

    /// Writes every file to a hidden temporary and renames once all succeeded.
    pub fn commit(self, dir: &Path) -> Result<Vec<String>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let mut staged = Vec::new();
        for (name, bytes) in &self.files {
            let tmp = dir.join(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, bytes) {
                for t in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(CliError::Io(format!("{}: {e}", tmp.display())));
            }
            staged.push(tmp);
        }
        for ((name, _), tmp) in self.files.iter().zip(&staged) {
            fs::rename(tmp, dir.join(name)).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        }
        Ok(self.files.into_iter().map(|(n, _)| n).collect())
    }
}
