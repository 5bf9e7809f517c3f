//! Counts CSV with columns `config_id,bits,count`.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CountsRow {
    pub config_id: String,
    pub bits: String,
    pub count: u64,
}

pub fn write_counts<W: Write>(w: W, rows: &[CountsRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_counts<R: Read>(r: R) -> Result<Vec<CountsRow>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    rd.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn counts_to_string(rows: &[CountsRow]) -> String {
    let mut buf = Vec::new();
    write_counts(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
