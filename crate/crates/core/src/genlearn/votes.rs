use std::collections::BTreeMap;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::JointAction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VoteMatrix {
    pub instances: Vec<JointAction>,
    /// Empty when unnamed.
    pub labels: Vec<String>,
}

impl VoteMatrix {
    pub fn new(instances: Vec<JointAction>, labels: Vec<String>) -> Result<Self> {
        let n = instances.first().map_or(labels.len(), JointAction::len);
        if let Some(x) = instances.iter().find(|x| x.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: x.len() });
        }
        if !labels.is_empty() && labels.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: labels.len() });
        }
        Ok(VoteMatrix { instances, labels })
    }

    pub fn num_players(&self) -> usize {
        self.instances.first().map_or(self.labels.len(), JointAction::len)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VoteCode {
    Yes,
    No,
    /// Takes the majority action of the rest of the instance.
    Majority,
}

/// Vote codes 1, 3, 4, 5 mean yes, 2 means no, 6 and 7 follow the majority.
/// Code 8 (an equally divided court) has no mapping.
pub fn court_code_map() -> BTreeMap<i64, VoteCode> {
    BTreeMap::from([
        (1, VoteCode::Yes),
        (2, VoteCode::No),
        (3, VoteCode::Yes),
        (4, VoteCode::Yes),
        (5, VoteCode::Yes),
        (6, VoteCode::Majority),
        (7, VoteCode::Majority),
    ])
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub majority_resolved: usize,
    /// `(row, player)` majority entries settled as `+1` by an even split.
    pub ties: Vec<(usize, usize)>,
}

/// Maps raw codes to votes. Majority entries take the sign of the sum of
/// the row's resolved entries; an even split gives `+1`.
pub fn ingest_votes(raw: &[Vec<i64>], code_map: &BTreeMap<i64, VoteCode>) -> Result<(VoteMatrix, IngestReport)> {
    let mut report = IngestReport::default();
    let mut instances = Vec::with_capacity(raw.len());
    let width = raw.first().map_or(0, Vec::len);
    for (r, row) in raw.iter().enumerate() {
        if row.len() != width {
            return Err(Error::LengthMismatch { expected: width, got: row.len() });
        }
        let codes: Vec<VoteCode> = row
            .iter()
            .enumerate()
            .map(|(c, code)| {
                code_map
                    .get(code)
                    .copied()
                    .ok_or_else(|| Error::InvalidInput(format!("row {r}, column {c}: unknown vote code {code}")))
            })
            .collect::<Result<_>>()?;
        let resolved: Vec<i64> = codes
            .iter()
            .filter_map(|c| match c {
                VoteCode::Yes => Some(1),
                VoteCode::No => Some(-1),
                VoteCode::Majority => None,
            })
            .collect();
        if resolved.is_empty() && !codes.is_empty() {
            return Err(Error::InvalidInput(format!("row {r} has only majority codes")));
        }
        let sum: i64 = resolved.iter().sum();
        let mut x = Vec::with_capacity(codes.len());
        for (c, code) in codes.iter().enumerate() {
            x.push(match code {
                VoteCode::Yes => 1,
                VoteCode::No => -1,
                VoteCode::Majority => {
                    report.majority_resolved += 1;
                    if sum == 0 {
                        report.ties.push((r, c));
                    }
                    if sum >= 0 {
                        1
                    } else {
                        -1
                    }
                }
            });
        }
        instances.push(JointAction::new(x)?);
    }
    Ok((VoteMatrix::new(instances, Vec::new())?, report))
}

/// Header row of labels, then one instance per row. A file whose values are
/// all `-1`/`1` is read as votes, anything else as raw codes.
pub fn read_votes_csv<R: Read>(reader: R, code_map: &BTreeMap<i64, VoteCode>) -> Result<(VoteMatrix, IngestReport)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let labels: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut raw: Vec<Vec<i64>> = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|v| v.parse::<i64>().map_err(|_| Error::InvalidInput(format!("row {r}: {v:?} is not an integer"))))
            .collect::<Result<Vec<i64>>>()?;
        raw.push(row);
    }
    let pm1 = raw.iter().flatten().all(|&v| v == 1 || v == -1);
    let (m, report) = if pm1 {
        let instances = raw
            .into_iter()
            .map(|row| JointAction::new(row.into_iter().map(|v| v as i8).collect()))
            .collect::<Result<Vec<_>>>()?;
        (VoteMatrix::new(instances, Vec::new())?, IngestReport::default())
    } else {
        ingest_votes(&raw, code_map)?
    };
    Ok((VoteMatrix::new(m.instances, labels)?, report))
}
