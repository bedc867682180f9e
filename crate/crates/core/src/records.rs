// Copyright 2026 The tgrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Shot record serialization (CSV and JSON lines) and aggregation into decay
//! curves.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::{stream_id, SequenceKind, ShotRecord, MAX_PAIRS};
use crate::error::{Error, Result};
use crate::estimation::{decay_points, DecayPoint, LengthSamples};

pub const CSV_HEADER: [&str; 4] = ["kind", "n", "ordinal", "outcome"];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    kind: SequenceKind,
    n: usize,
    ordinal: u32,
    outcome: u8,
}

impl Row {
    fn into_record(self, line: usize) -> Result<ShotRecord> {
        if self.outcome > 1 {
            return Err(Error::Records(format!("record {line}: outcome must be 0 or 1, got {}", self.outcome)));
        }
        if self.n == 0 || self.n > MAX_PAIRS {
            return Err(Error::Records(format!("record {line}: n must lie in 1..={MAX_PAIRS}")));
        }
        Ok(ShotRecord {
            kind: self.kind,
            n: self.n,
            ordinal: self.ordinal,
            sequence_seed: stream_id(self.kind, self.n, self.ordinal),
            outcome: self.outcome,
            survival_prob: None,
        })
    }
}

impl From<&ShotRecord> for Row {
    fn from(r: &ShotRecord) -> Self {
        Row {
            kind: r.kind,
            n: r.n,
            ordinal: r.ordinal,
            outcome: r.outcome,
        }
    }
}

pub fn write_csv<W: Write>(records: &[ShotRecord], out: W) -> Result<()> {
    // Header written by hand so that an empty record list still has one.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(|e| Error::Records(e.to_string()))?;
    for r in records {
        w.serialize(Row::from(r)).map_err(|e| Error::Records(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[ShotRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Parses shot CSV; the header must be exactly `kind,n,ordinal,outcome`.
pub fn parse_csv(input: &[u8]) -> Result<Vec<ShotRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| Error::Records(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Records(format!("expected header {:?}, got {:?}", CSV_HEADER, header)));
    }
    rdr.deserialize::<Row>()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Records(e.to_string()))
                .and_then(|r| r.into_record(i + 1))
        })
        .collect()
}

pub fn write_jsonl<W: Write>(records: &[ShotRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &Row::from(r))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses JSON lines; blank lines are skipped.
pub fn parse_jsonl<R: BufRead>(input: R) -> Result<Vec<ShotRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(&line).map_err(|e| Error::Records(format!("line {}: {e}", i + 1)))?;
        out.push(row.into_record(i + 1)?);
    }
    Ok(out)
}

/// Per-sequence mean outcomes grouped by length, for one sequence kind.
pub fn length_samples(records: &[ShotRecord], kind: SequenceKind) -> Vec<LengthSamples> {
    let mut by_seq: BTreeMap<(usize, u32), (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.kind == kind) {
        let e = by_seq.entry((r.n, r.ordinal)).or_default();
        e.0 += f64::from(r.outcome);
        e.1 += 1;
    }
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for ((n, _), (sum, k)) in by_seq {
        by_n.entry(n).or_default().push(sum / k as f64);
    }
    by_n.into_iter().map(|(n, values)| LengthSamples { n, values }).collect()
}

/// Mean survival per length with sequence-level standard errors.
pub fn survival_points(records: &[ShotRecord], kind: SequenceKind) -> Vec<DecayPoint> {
    decay_points(&length_samples(records, kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(kind: SequenceKind, n: usize, ordinal: u32, outcome: u8) -> ShotRecord {
        ShotRecord {
            kind,
            n,
            ordinal,
            sequence_seed: stream_id(kind, n, ordinal),
            outcome,
            survival_prob: None,
        }
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![rec(SequenceKind::Reference, 1, 0, 1), rec(SequenceKind::Interleaved, 49, 7, 0)];
        let text = to_csv_string(&recs);
        assert!(text.starts_with("kind,n,ordinal,outcome\nreference,1,0,1\n"));
        assert_eq!(parse_csv(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn empty_csv_keeps_header() {
        assert_eq!(to_csv_string(&[]), "kind,n,ordinal,outcome\n");
        assert!(parse_csv(b"kind,n,ordinal,outcome\n").unwrap().is_empty());
    }

    #[test]
    fn jsonl_round_trip() {
        let recs = vec![rec(SequenceKind::Standard, 3, 2, 1)];
        let mut buf = Vec::new();
        write_jsonl(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "{\"kind\":\"standard\",\"n\":3,\"ordinal\":2,\"outcome\":1}\n");
        assert_eq!(parse_jsonl(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(parse_csv(b"kind,n,ordinal,outcome\nreference,1,0,2\n").is_err());
        assert!(parse_csv(b"kind,n,ordinal,outcome\nreference,0,0,1\n").is_err());
        assert!(parse_csv(b"kind,n,ordinal,outcome\nbogus,1,0,1\n").is_err());
        assert!(parse_csv(b"n,kind,ordinal,outcome\n1,reference,0,1\n").is_err());
        assert!(parse_jsonl(&b"{\"kind\":\"reference\",\"n\":1,\"ordinal\":0,\"outcome\":1,\"x\":1}\n"[..]).is_err());
    }

    #[test]
    fn aggregation_averages_shots_per_sequence() {
        let recs = vec![
            rec(SequenceKind::Reference, 1, 0, 1),
            rec(SequenceKind::Reference, 1, 0, 0),
            rec(SequenceKind::Reference, 1, 1, 1),
            rec(SequenceKind::Reference, 1, 1, 1),
            rec(SequenceKind::Interleaved, 1, 0, 0),
        ];
        let pts = survival_points(&recs, SequenceKind::Reference);
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].count, pts[0].mean), (2, 0.75));
        assert!((pts[0].stderr - 0.25).abs() < 1e-15);
    }
}
