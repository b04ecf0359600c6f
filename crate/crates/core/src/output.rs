//! Append-only output tables and the recorder that writes them.
//!
//! Every table is a delimited text file with a header row and `\n` line
//! endings, so runs can be compared byte for byte.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Steps between periodic flushes to disk.
pub const FLUSH_INTERVAL: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableKind {
    AgentEntry,
    AgentExit,
    Resources,
    Compositions,
    Transactions,
    TimeSeries,
    Power,
    ExchangeArcs,
    Diagnostics,
    /// Run settings as key/value pairs.
    Info,
}

impl TableKind {
    pub const ALL: [TableKind; 10] = [
        TableKind::AgentEntry,
        TableKind::AgentExit,
        TableKind::Resources,
        TableKind::Compositions,
        TableKind::Transactions,
        TableKind::TimeSeries,
        TableKind::Power,
        TableKind::ExchangeArcs,
        TableKind::Diagnostics,
        TableKind::Info,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::AgentEntry => "AgentEntry",
            TableKind::AgentExit => "AgentExit",
            TableKind::Resources => "Resources",
            TableKind::Compositions => "Compositions",
            TableKind::Transactions => "Transactions",
            TableKind::TimeSeries => "TimeSeries",
            TableKind::Power => "Power",
            TableKind::ExchangeArcs => "ExchangeArcs",
            TableKind::Diagnostics => "Diagnostics",
            TableKind::Info => "Info",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            TableKind::AgentEntry => {
                &["agent_id", "kind", "prototype", "archetype", "parent_id", "entered", "lifetime"]
            }
            TableKind::AgentExit => &["agent_id", "exit_time"],
            TableKind::Resources => {
                &["resource_id", "op", "time", "quantity", "comp_id", "quality", "parents", "creator"]
            }
            TableKind::Compositions => &["comp_id", "nuclide", "alias", "mass_frac"],
            TableKind::Transactions => {
                &["transaction_id", "time", "supplier", "requester", "commodity", "resource_id", "quantity"]
            }
            TableKind::TimeSeries => &["time", "agent_id", "nuclide", "alias", "kg"],
            TableKind::Power => &["time", "agent_id", "value"],
            TableKind::ExchangeArcs => &[
                "time", "arc", "request", "bid", "supplier", "requester", "commodity", "preference",
                "cost", "upper", "exclusive", "flow",
            ],
            TableKind::Diagnostics => &["time", "agent_id", "kind", "message"],
            TableKind::Info => &["key", "value"],
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }

    pub fn from_name(name: &str) -> Option<TableKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub kind: TableKind,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.kind.header().iter().position(|h| *h == name)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// All tables of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputTables {
    tables: Vec<Table>,
}

impl Default for OutputTables {
    fn default() -> Self {
        OutputTables {
            tables: TableKind::ALL.iter().map(|&kind| Table { kind, rows: Vec::new() }).collect(),
        }
    }
}

fn writer(file: File) -> csv::Writer<File> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file)
}

impl OutputTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn table(&self, kind: TableKind) -> &Table {
        &self.tables[kind as usize]
    }

    pub fn push(&mut self, kind: TableKind, row: Vec<String>) {
        debug_assert_eq!(row.len(), kind.header().len(), "{}", kind.name());
        self.tables[kind as usize].rows.push(row);
    }

    pub fn tables(&self) -> impl Iterator<Item = &Table> {
        self.tables.iter()
    }

    /// Write every table to `dir`, replacing existing files.
    pub fn write_dir(&self, dir: &Path) -> Result<(), csv::Error> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            let mut w = writer(File::create(dir.join(t.kind.file_name()))?);
            w.write_record(t.kind.header())?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(())
    }

    /// Read tables back from a run directory. Missing files load as empty.
    pub fn load_dir(dir: &Path) -> Result<OutputTables, csv::Error> {
        if !dir.is_dir() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} is not a directory", dir.display()),
            )
            .into());
        }
        let mut out = OutputTables::new();
        for kind in TableKind::ALL {
            let path = dir.join(kind.file_name());
            if !path.exists() {
                continue;
            }
            let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(&path)?;
            let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
            if header != kind.header() {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{}: unexpected header {:?}", path.display(), header),
                )
                .into());
            }
            for rec in r.records() {
                out.push(kind, rec?.iter().map(str::to_string).collect());
            }
        }
        Ok(out)
    }
}

/// Buffers rows in memory and appends them to disk periodically.
#[derive(Debug)]
pub struct Recorder {
    tables: OutputTables,
    dir: Option<PathBuf>,
    flushed: Vec<usize>,
    started: bool,
}

impl Recorder {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Recorder {
            tables: OutputTables::new(),
            dir,
            flushed: vec![0; TableKind::ALL.len()],
            started: false,
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn tables(&self) -> &OutputTables {
        &self.tables
    }

    pub fn into_tables(self) -> OutputTables {
        self.tables
    }

    pub fn record(&mut self, kind: TableKind, row: Vec<String>) {
        self.tables.push(kind, row);
    }

    /// Append rows recorded since the last flush.
    pub fn flush(&mut self) -> Result<(), csv::Error> {
        let Some(dir) = self.dir.clone() else {
            return Ok(());
        };
        fs::create_dir_all(&dir)?;
        for t in self.tables.tables() {
            let k = t.kind as usize;
            let path = dir.join(t.kind.file_name());
            let first = !self.started;
            let file = if first {
                File::create(&path)?
            } else {
                OpenOptions::new().append(true).open(&path)?
            };
            let mut w = writer(file);
            if first {
                w.write_record(t.kind.header())?;
            }
            for r in &t.rows[self.flushed[k]..] {
                w.write_record(r)?;
            }
            w.flush()?;
            w.into_inner().map_err(|e| e.into_error())?.flush()?;
            self.flushed[k] = t.rows.len();
        }
        self.started = true;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_flush_equals_single_write() {
        let tmp = tempfile::tempdir().unwrap();
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        let mut rec = Recorder::new(Some(a.clone()));
        rec.record(TableKind::Power, vec!["0".into(), "1".into(), "1".into()]);
        rec.flush().unwrap();
        rec.record(TableKind::Power, vec!["1".into(), "1".into(), "0.5".into()]);
        rec.record(TableKind::Diagnostics, vec!["1".into(), "1".into(), "note".into(), "a, b".into()]);
        rec.flush().unwrap();
        rec.tables().write_dir(&b).unwrap();
        for kind in TableKind::ALL {
            let x = fs::read(a.join(kind.file_name())).unwrap();
            let y = fs::read(b.join(kind.file_name())).unwrap();
            assert_eq!(x, y, "{}", kind.name());
        }
        let power = fs::read_to_string(a.join("Power.csv")).unwrap();
        assert_eq!(power, "time,agent_id,value\n0,1,1\n1,1,0.5\n");
        let back = OutputTables::load_dir(&a).unwrap();
        assert_eq!(&back, rec.tables());
    }

    #[test]
    fn load_rejects_missing_dir() {
        assert!(OutputTables::load_dir(Path::new("/nonexistent/fck")).is_err());
    }
}
