//! CSV ingestion, splitting and persistence of observed series.
//!
//! Files are UTF-8 CSV with a header row, `.` as decimal separator and
//! RFC 4180 quoting. The time column holds ISO-8601 dates (`YYYY-MM-DD`) or
//! real numbers; the type is fixed by the first data row.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Timestamp {
    Date(NaiveDate),
    Real(f64),
}

impl Timestamp {
    /// Position on the real line; dates count days from 1970-01-01.
    pub fn as_f64(&self) -> f64 {
        match self {
            Timestamp::Date(d) => (*d - NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()).num_days() as f64,
            Timestamp::Real(t) => *t,
        }
    }

    /// Parses a date if the text looks like one, a real number otherwise.
    pub fn parse(s: &str) -> Option<Timestamp> {
        let s = s.trim();
        if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            return Some(Timestamp::Date(d));
        }
        s.parse::<f64>().ok().filter(|t| t.is_finite()).map(Timestamp::Real)
    }

    fn same_kind(&self, other: &Timestamp) -> bool {
        matches!((self, other), (Timestamp::Date(_), Timestamp::Date(_)) | (Timestamp::Real(_), Timestamp::Real(_)))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            Timestamp::Real(t) => write!(f, "{t}"),
        }
    }
}

/// Selects a column by header name or zero-based position.
#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl Column {
    fn resolve(&self, headers: &csv::StringRecord) -> Result<usize> {
        match self {
            Column::Index(i) if *i < headers.len() => Ok(*i),
            Column::Index(i) => Err(Error::Parse { line: 1, message: format!("no column {i} in header") }),
            Column::Name(n) => headers
                .iter()
                .position(|h| h.trim() == n)
                .ok_or_else(|| Error::Parse { line: 1, message: format!("no column named '{n}' in header") }),
        }
    }
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSpec {
    pub time: Column,
    pub value: Column,
    /// Declared sampling step; inferred as the smallest spacing when `None`.
    pub delta: Option<f64>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec { time: Column::Index(0), value: Column::Index(1), delta: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesFile {
    pub timestamps: Vec<Timestamp>,
    pub values: Vec<f64>,
    /// Sampling step in time units (days for dated series).
    pub delta: f64,
}

impl TimeSeriesFile {
    pub fn new(timestamps: Vec<Timestamp>, values: Vec<f64>, delta: f64) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::Input("timestamps and values differ in length".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("Δ must be positive, got {delta}")));
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if !w[0].same_kind(&w[1]) || w[1].as_f64() <= w[0].as_f64() {
                return Err(Error::Order { line: i + 2, message: format!("{} does not follow {}", w[1], w[0]) });
            }
        }
        Ok(TimeSeriesFile { timestamps, values, delta })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Duplicate {
    /// One-based line in the file (header is line 1).
    pub line: usize,
    pub timestamp: Timestamp,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub after: Timestamp,
    pub before: Timestamp,
    /// Number of grid points absent between the two observations.
    pub missing: usize,
}

/// Side output of [`load_csv`]: rows read, duplicate timestamps dropped
/// (first occurrence kept) and gaps in the sampling grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub duplicates: Vec<Duplicate>,
    pub gaps: Vec<Gap>,
}

impl IngestReport {
    pub fn is_clean(&self) -> bool {
        self.duplicates.is_empty() && self.gaps.is_empty()
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows read: {}", self.rows_read)?;
        writeln!(f, "duplicates dropped: {}", self.duplicates.len())?;
        for d in &self.duplicates {
            writeln!(f, "  line {}: {} = {}", d.line, d.timestamp, d.value)?;
        }
        writeln!(f, "gaps: {}", self.gaps.len())?;
        for g in &self.gaps {
            writeln!(f, "  {} .. {}: {} missing", g.after, g.before, g.missing)?;
        }
        Ok(())
    }
}

/// Reads a series from CSV text.
pub fn read_csv<R: Read>(mut reader: R, spec: &ColumnSpec) -> Result<(TimeSeriesFile, IngestReport)> {
    let mut text = Vec::new();
    reader.read_to_end(&mut text)?;
    // one-based line of the record starting at a byte offset; the reader
    // reports offsets before any skipped blank lines
    let line_at = |byte: u64| {
        let mut b = (byte as usize).min(text.len());
        while b < text.len() && matches!(text[b], b'\n' | b'\r') {
            b += 1;
        }
        1 + text[..b].iter().filter(|&&c| c == b'\n').count()
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_slice());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::Parse { line: 1, message: "empty file or missing header".into() });
    }
    let (tc, vc) = (spec.time.resolve(&headers)?, spec.value.resolve(&headers)?);
    let mut report = IngestReport::default();
    let mut timestamps: Vec<Timestamp> = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(i + 2, |p| line_at(p.byte())),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(i + 2, |p| line_at(p.byte()));
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        report.rows_read += 1;
        let field = |c: usize, what: &str| {
            rec.get(c).ok_or_else(|| Error::Parse { line, message: format!("missing {what} field") })
        };
        let ts_text = field(tc, "time")?;
        let ts = Timestamp::parse(ts_text)
            .ok_or_else(|| Error::Parse { line, message: format!("cannot parse time '{ts_text}'") })?;
        let v_text = field(vc, "value")?.trim();
        let value: f64 = v_text
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::Parse { line, message: format!("cannot parse value '{v_text}'") })?;
        if let Some(prev) = timestamps.last() {
            if !prev.same_kind(&ts) {
                return Err(Error::Parse { line, message: format!("time '{ts}' mixes dates and numbers") });
            }
            if ts.as_f64() == prev.as_f64() {
                report.duplicates.push(Duplicate { line, timestamp: ts, value });
                continue;
            }
            if ts.as_f64() < prev.as_f64() {
                return Err(Error::Order { line, message: format!("{ts} comes after {prev}") });
            }
        }
        timestamps.push(ts);
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse { line: 2, message: "no data rows".into() });
    }
    let delta = match spec.delta {
        Some(d) => d,
        None => timestamps
            .windows(2)
            .map(|w| w[1].as_f64() - w[0].as_f64())
            .fold(f64::INFINITY, f64::min),
    };
    let delta = if delta.is_finite() { delta } else { 1.0 };
    for w in timestamps.windows(2) {
        let steps = ((w[1].as_f64() - w[0].as_f64()) / delta).round() as usize;
        if steps > 1 {
            report.gaps.push(Gap { after: w[0], before: w[1], missing: steps - 1 });
        }
    }
    Ok((TimeSeriesFile::new(timestamps, values, delta)?, report))
}

pub fn load_csv(path: impl AsRef<Path>, spec: &ColumnSpec) -> Result<(TimeSeriesFile, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(file), spec)
}

/// Writes `time,value` CSV. Values use the shortest decimal form that
/// reads back to the same `f64`.
pub fn write_csv<W: Write>(writer: W, ts: &TimeSeriesFile) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let head = match ts.timestamps.first() {
        Some(Timestamp::Real(_)) => "t",
        _ => "date",
    };
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([head, "value"]).map_err(io)?;
    for (t, v) in ts.timestamps.iter().zip(&ts.values) {
        w.write_record([t.to_string(), v.to_string()]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, ts: &TimeSeriesFile) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(std::io::BufWriter::new(file), ts)
}

/// Splits at `boundary`: the first part holds every observation with
/// timestamp `≤ boundary`, the second the rest. Both parts must be
/// non-empty.
pub fn split_series(ts: &TimeSeriesFile, boundary: Timestamp) -> Result<(TimeSeriesFile, TimeSeriesFile)> {
    let (first, last) = match (ts.timestamps.first(), ts.timestamps.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::Domain("cannot split an empty series".into())),
    };
    if !first.same_kind(&boundary) {
        return Err(Error::Domain(format!("boundary {boundary} is not the same kind of timestamp as {first}")));
    }
    let b = boundary.as_f64();
    if b < first.as_f64() || b >= last.as_f64() {
        return Err(Error::Domain(format!("boundary {boundary} outside [{first}, {last})")));
    }
    let k = ts.timestamps.partition_point(|t| t.as_f64() <= b);
    let part = |r: std::ops::Range<usize>| TimeSeriesFile {
        timestamps: ts.timestamps[r.clone()].to_vec(),
        values: ts.values[r].to_vec(),
        delta: ts.delta,
    };
    Ok((part(0..k), part(k..ts.len())))
}

/// Splits so that the second part starts at the first observation at or
/// after `start_of_second`.
pub fn split_series_at(ts: &TimeSeriesFile, start_of_second: Timestamp) -> Result<(TimeSeriesFile, TimeSeriesFile)> {
    let s = start_of_second.as_f64();
    let k = ts.timestamps.partition_point(|t| t.as_f64() < s);
    if k == 0 || k == ts.len() || !ts.timestamps[0].same_kind(&start_of_second) {
        return Err(Error::Domain(format!(
            "split point {start_of_second} must lie after the first and not after the last observation"
        )));
    }
    split_series(ts, ts.timestamps[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<(TimeSeriesFile, IngestReport)> {
        read_csv(text.as_bytes(), &ColumnSpec::default())
    }

    fn date(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    #[test]
    fn reads_dates_and_infers_daily_step() {
        let (ts, rep) = read("date,value\n2020-01-01,1.5\n2020-01-02,-2\n2020-01-03,3e-1\n").unwrap();
        assert_eq!(ts.values, vec![1.5, -2.0, 0.3]);
        assert_eq!(ts.delta, 1.0);
        assert!(rep.is_clean());
        assert_eq!(rep.rows_read, 3);
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(read(""), Err(Error::Parse { .. })));
        assert!(matches!(read("date,value\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn malformed_row_reports_its_line() {
        match read("date,value\n2020-01-01,1\n2020-01-02,abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match read("date,value\n2020-01-01,1\n\n2020-13-02,1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shuffled_rows_are_an_order_error() {
        match read("date,value\n2020-01-02,1\n2020-01-01,2\n2020-01-03,3\n") {
            Err(Error::Order { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_and_gaps_are_reported() {
        let (ts, rep) = read("date,value\n2020-01-01,1\n2020-01-01,9\n2020-01-02,2\n2020-01-05,3\n").unwrap();
        assert_eq!(ts.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(rep.duplicates.len(), 1);
        assert_eq!(rep.duplicates[0].line, 3);
        assert_eq!(rep.gaps, vec![Gap { after: date("2020-01-02"), before: date("2020-01-05"), missing: 2 }]);
    }

    #[test]
    fn named_columns_and_quoting() {
        let text = "id,\"price, EUR\",day\n1,\"12.5\",2021-03-01\n2,13,2021-03-02\n";
        let spec = ColumnSpec { time: Column::Name("day".into()), value: Column::Name("price, EUR".into()), delta: None };
        let (ts, _) = read_csv(text.as_bytes(), &spec).unwrap();
        assert_eq!(ts.values, vec![12.5, 13.0]);
        assert!(read_csv(text.as_bytes(), &ColumnSpec { time: Column::Name("x".into()), ..spec }).is_err());
    }

    #[test]
    fn real_time_column() {
        let (ts, _) = read("t,value\n0,1\n0.5,2\n1.0,3\n").unwrap();
        assert_eq!(ts.delta, 0.5);
        assert_eq!(ts.timestamps[1], Timestamp::Real(0.5));
    }

    #[test]
    fn round_trip_is_exact() {
        let values = vec![0.1 + 0.2, -1e-300, 12345.678901234567, f64::MIN_POSITIVE, 1.0 / 3.0];
        let stamps = (0..5).map(|i| Timestamp::Real(i as f64 * 0.1)).collect();
        let ts = TimeSeriesFile::new(stamps, values, 0.1).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &ts).unwrap();
        let (back, _) = read_csv(buf.as_slice(), &ColumnSpec { delta: Some(0.1), ..Default::default() }).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn split_is_left_inclusive() {
        let start = NaiveDate::from_ymd_opt(2020, 12, 23).unwrap();
        let stamps: Vec<_> = (0..10).map(|d| Timestamp::Date(start + chrono::Days::new(d))).collect();
        let ts = TimeSeriesFile::new(stamps.clone(), (0..10).map(f64::from).collect(), 1.0).unwrap();
        let (a, b) = split_series(&ts, stamps[0]).unwrap();
        assert_eq!((a.len(), b.len()), (1, 9));
        let (a, b) = split_series(&ts, date("2020-12-31")).unwrap();
        assert_eq!((a.len(), b.len()), (9, 1));
        let (c, d) = split_series_at(&ts, date("2021-01-01")).unwrap();
        assert_eq!((c, d), (a, b));
        assert!(matches!(split_series(&ts, date("2020-01-01")), Err(Error::Domain(_))));
        assert!(split_series(&ts, stamps[9]).is_err());
        assert!(split_series(&ts, Timestamp::Real(3.0)).is_err());
    }
}
