//! CSV log reader: rows are grouped by case id and ordered by timestamp when
//! a timestamp column is configured, otherwise by file order.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, FixedOffset, NaiveDateTime};

use crate::error::{Error, Result};
use crate::eventlog::{ActivityLabel, EventLog, Trace};

#[derive(Debug, Clone)]
pub struct CsvColumns {
    pub case: String,
    pub activity: String,
    pub timestamp: Option<String>,
}

impl Default for CsvColumns {
    fn default() -> Self {
        CsvColumns {
            case: "case".into(),
            activity: "activity".into(),
            timestamp: None,
        }
    }
}

fn parse_timestamp(s: &str, line: usize) -> Result<i64> {
    if let Ok(dt) = DateTime::<FixedOffset>::parse_from_rfc3339(s) {
        return Ok(dt.timestamp_millis());
    }
    for fmt in [
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y/%m/%d %H:%M:%S",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt.and_utc().timestamp_millis());
        }
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(n);
    }
    Err(Error::parse(line, format!("unparseable timestamp {s:?}")))
}

pub fn parse_csv(stream: impl Read, columns: &CsvColumns) -> Result<EventLog> {
    let mut reader = csv::Reader::from_reader(stream);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("missing configured column {name:?}")))
    };
    let case_idx = col(&columns.case)?;
    let activity_idx = col(&columns.activity)?;
    let ts_idx = columns.timestamp.as_deref().map(col).transpose()?;

    // case id -> rows (timestamp, file order, activity)
    let mut cases: BTreeMap<String, Vec<(i64, usize, String)>> = BTreeMap::new();
    let mut first_seen: Vec<String> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2; // header is line 1
        let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
        let field = |idx: usize| -> Result<&str> {
            record
                .get(idx)
                .ok_or_else(|| Error::parse(line, "row shorter than header"))
        };
        let case = field(case_idx)?.to_string();
        let activity = field(activity_idx)?.to_string();
        let ts = match ts_idx {
            Some(idx) => parse_timestamp(field(idx)?, line)?,
            None => 0,
        };
        if !cases.contains_key(&case) {
            first_seen.push(case.clone());
        }
        cases.entry(case).or_default().push((ts, row_no, activity));
    }

    let traces = first_seen
        .into_iter()
        .map(|case| {
            let mut rows = cases.remove(&case).unwrap();
            rows.sort_by_key(|(ts, order, _)| (*ts, *order));
            Trace::new(
                case,
                rows.into_iter()
                    .map(|(_, _, a)| ActivityLabel::new(a))
                    .collect(),
            )
        })
        .collect();
    Ok(EventLog::new(traces))
}
