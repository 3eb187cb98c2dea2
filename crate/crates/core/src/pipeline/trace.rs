use std::io::{self, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::stage::Phase;

/// One observation point in one cycle.
///
/// `stage` names the unit (`in.l3`, `p0.s2`, `m1.l5`, `exit.l0`), `link` the
/// port observed, and `digit` the decimal digit on the link (`None` when the
/// link carries nothing that cycle).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub cycle: u64,
    pub stage: String,
    pub phase: Phase,
    pub link: &'static str,
    pub digit: Option<String>,
}

impl TraceRecord {
    pub const CSV_HEADER: &'static str = "cycle,stage,phase,link,digit";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.cycle,
            self.stage,
            self.phase.as_str(),
            self.link,
            self.digit.as_deref().unwrap_or("")
        )
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Collected trace with a running SHA-256 over its CSV rendering.
#[derive(Debug, Clone)]
pub struct Trace {
    records: Vec<TraceRecord>,
    hasher: Sha256,
}

impl Default for Trace {
    fn default() -> Self {
        let mut hasher = Sha256::new();
        hasher.update(TraceRecord::CSV_HEADER.as_bytes());
        hasher.update(b"\n");
        Self {
            records: Vec::new(),
            hasher,
        }
    }
}

impl Trace {
    pub(crate) fn push(&mut self, record: TraceRecord) {
        self.hasher.update(record.to_csv().as_bytes());
        self.hasher.update(b"\n");
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    /// Hex SHA-256 of the CSV form (header included).
    pub fn digest(&self) -> String {
        self.hasher
            .clone()
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn write_csv<Wr: Write>(&self, mut out: Wr) -> io::Result<()> {
        writeln!(out, "{}", TraceRecord::CSV_HEADER)?;
        for r in &self.records {
            writeln!(out, "{}", r.to_csv())?;
        }
        Ok(())
    }

    pub fn write_jsonl<Wr: Write>(&self, mut out: Wr) -> io::Result<()> {
        for r in &self.records {
            writeln!(out, "{}", r.to_json_line())?;
        }
        Ok(())
    }
}
