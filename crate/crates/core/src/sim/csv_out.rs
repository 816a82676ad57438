//! CSV rows for FER sweeps.
//!
//! Columns: `code,decoder,rule,nmax,theta,ebno_db,frames,frame_errors,fer,
//! ci95_low,ci95_high,bit_errors,ber,avg_iters,avg_fo_decodes,seed`, with a
//! mandatory header. Floats use the shortest representation that parses back
//! to the same value.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::fer::{FerPoint, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub code: String,
    pub decoder: String,
    pub rule: String,
    pub nmax: usize,
    pub theta: f64,
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub bit_errors: u64,
    pub ber: f64,
    pub avg_iters: f64,
    pub avg_fo_decodes: f64,
    pub seed: u64,
}

/// `RM(m,r)`.
pub fn code_label(m: usize, r: usize) -> String {
    format!("RM({m},{r})")
}

impl CsvRow {
    pub fn new(sim: &SimConfig, p: &FerPoint) -> Self {
        Self {
            code: code_label(sim.m, sim.r),
            decoder: sim.decoder.algorithm.name().to_string(),
            rule: sim.decoder.rule.name().to_string(),
            nmax: sim.decoder.max_iters,
            theta: sim.decoder.theta,
            ebno_db: p.ebno_db,
            frames: p.frames,
            frame_errors: p.frame_errors,
            fer: p.fer,
            ci95_low: p.ci95_low,
            ci95_high: p.ci95_high,
            bit_errors: p.bit_errors,
            ber: p.ber,
            avg_iters: p.avg_iterations,
            avg_fo_decodes: p.avg_first_order_decodes,
            seed: sim.seed,
        }
    }

    /// Whether this row was produced by `sim` (any grid point).
    pub fn matches(&self, sim: &SimConfig) -> bool {
        self.code == code_label(sim.m, sim.r)
            && self.decoder == sim.decoder.algorithm.name()
            && self.rule == sim.decoder.rule.name()
            && self.nmax == sim.decoder.max_iters
            && self.theta == sim.decoder.theta
            && self.seed == sim.seed
    }
}

/// Writes rows one at a time, flushing after each so partial sweeps survive.
pub struct FerCsvWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> FerCsvWriter<W> {
    /// A writer that emits the header before the first row.
    pub fn new(sink: W) -> Self {
        Self {
            inner: csv::WriterBuilder::new().has_headers(true).from_writer(sink),
        }
    }

    /// A writer for appending to a file that already has a header.
    pub fn appending(sink: W) -> Self {
        Self {
            inner: csv::WriterBuilder::new().has_headers(false).from_writer(sink),
        }
    }

    pub fn write(&mut self, row: &CsvRow) -> Result<()> {
        self.inner.serialize(row)?;
        self.inner.flush()?;
        Ok(())
    }
}

pub fn read_rows<R: Read>(source: R) -> Result<Vec<CsvRow>> {
    let mut reader = csv::Reader::from_reader(source);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::{Algorithm, DecoderConfig};

    fn point() -> FerPoint {
        FerPoint {
            ebno_db: 2.25,
            frames: 1000,
            frame_errors: 30,
            bit_errors: 412,
            fer: 0.03,
            ber: 412.0 / 128000.0,
            avg_iterations: 1.5,
            avg_first_order_decodes: 4000.5,
            ci95_low: 0.0203304856831096,
            ci95_high: 0.042551402470029046,
        }
    }

    #[test]
    fn header_and_round_trip() {
        let sim = SimConfig::new(7, 3, DecoderConfig::new(Algorithm::Rupa));
        let row = CsvRow::new(&sim, &point());
        let mut buf = Vec::new();
        {
            let mut w = FerCsvWriter::new(&mut buf);
            w.write(&row).unwrap();
        }
        let text = String::from_utf8(buf.clone()).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "code,decoder,rule,nmax,theta,ebno_db,frames,frame_errors,fer,ci95_low,ci95_high,bit_errors,ber,avg_iters,avg_fo_decodes,seed"
        );
        assert!(text.lines().nth(1).unwrap().starts_with("\"RM(7,3)\",rupa,minsum,3,0.05,2.25,1000,30,0.03,"));
        let back = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, vec![row.clone()]);
        assert!(back[0].matches(&sim));
        let mut other = sim.clone();
        other.seed = 2;
        assert!(!back[0].matches(&other));
    }
}
