//! Batch ingestion of JSON Lines (and CSV for games) telemetry.
//!
//! Malformed lines are recorded with their line number and skipped; when more
//! than 10% of the nonempty lines in a file are malformed the whole ingestion
//! fails.

use std::io::BufRead;

use super::{ClickEvent, EventError, EventStoreBuilder, GameEvent, RecommendationRecord};

/// Maximum tolerated fraction of malformed lines per file.
const MAX_MALFORMED_FRACTION: f64 = 0.10;

/// How many line errors to keep verbatim for reporting.
const MAX_RECORDED_ERRORS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Acceptance statistics for one ingested file.
#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: usize,
    /// Individual line errors in order, capped at 50 to bound memory.
    pub errors: Vec<LineError>,
}

impl IngestReport {
    fn record_error(&mut self, line: usize, message: String) {
        self.rejected += 1;
        if self.errors.len() < MAX_RECORDED_ERRORS {
            self.errors.push(LineError { line, message });
        }
    }

    fn finish(self) -> Result<IngestReport, EventError> {
        let total = self.accepted + self.rejected;
        if total > 0 && (self.rejected as f64) > MAX_MALFORMED_FRACTION * total as f64 {
            let first = self
                .errors
                .first()
                .map(|e| e.to_string())
                .unwrap_or_else(|| "unknown".to_string());
            return Err(EventError::TooManyMalformed {
                rejected: self.rejected,
                total,
                first,
            });
        }
        Ok(self)
    }
}

fn ingest_lines<R, T, F>(reader: R, mut accept: F) -> Result<IngestReport, EventError>
where
    R: BufRead,
    T: serde::de::DeserializeOwned,
    F: FnMut(T) -> Result<(), String>,
{
    let mut report = IngestReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<T>(&line) {
            Ok(value) => match accept(value) {
                Ok(()) => report.accepted += 1,
                Err(msg) => report.record_error(idx + 1, msg),
            },
            Err(e) => report.record_error(idx + 1, e.to_string()),
        }
    }
    report.finish()
}

impl EventStoreBuilder {
    /// Ingests `games.jsonl`: `{"child_id","app_id","start_time","duration_s"}`.
    pub fn ingest_games_jsonl<R: BufRead>(
        &mut self,
        reader: R,
    ) -> Result<IngestReport, EventError> {
        ingest_lines(reader, |event: GameEvent| {
            event.validate()?;
            self.add_game(event);
            Ok(())
        })
    }

    /// Ingests `clicks.jsonl`: `{"child_id","app_id","position","timestamp"}`.
    pub fn ingest_clicks_jsonl<R: BufRead>(
        &mut self,
        reader: R,
    ) -> Result<IngestReport, EventError> {
        ingest_lines(reader, |event: ClickEvent| {
            event.validate()?;
            self.add_click(event);
            Ok(())
        })
    }

    /// Ingests `recs.jsonl`:
    /// `{"child_id","generated_at","slots":[{"position","app_id","source"}]}`.
    pub fn ingest_recs_jsonl<R: BufRead>(&mut self, reader: R) -> Result<IngestReport, EventError> {
        ingest_lines(reader, |record: RecommendationRecord| {
            record.validate()?;
            self.add_recommendation(record);
            Ok(())
        })
    }

    /// CSV alternative for games only. The header must carry the same column
    /// names as the JSON schema; extra columns are ignored. Values must not
    /// contain commas (ids and timestamps never do).
    pub fn ingest_games_csv<R: BufRead>(&mut self, reader: R) -> Result<IngestReport, EventError> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(h) => h?,
            None => return IngestReport::default().finish(),
        };
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        let col = |name: &'static str| -> Result<usize, EventError> {
            columns
                .iter()
                .position(|c| *c == name)
                .ok_or(EventError::CsvMissingColumn(name))
        };
        let child_col = col("child_id")?;
        let app_col = col("app_id")?;
        let start_col = col("start_time")?;
        let duration_col = col("duration_s")?;

        let mut report = IngestReport::default();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            // Header sits on line 1, so data line numbers start at 2.
            let line_no = idx + 2;
            let parsed = parse_csv_game(&fields, child_col, app_col, start_col, duration_col);
            match parsed {
                Ok(event) => match event.validate() {
                    Ok(()) => {
                        self.add_game(event);
                        report.accepted += 1;
                    }
                    Err(msg) => report.record_error(line_no, msg),
                },
                Err(msg) => report.record_error(line_no, msg),
            }
        }
        report.finish()
    }
}

fn parse_csv_game(
    fields: &[&str],
    child_col: usize,
    app_col: usize,
    start_col: usize,
    duration_col: usize,
) -> Result<GameEvent, String> {
    let get = |i: usize, name: &str| -> Result<&str, String> {
        fields
            .get(i)
            .copied()
            .ok_or_else(|| format!("missing column {name}"))
    };
    let start_raw = get(start_col, "start_time")?;
    let start_time = start_raw
        .parse::<chrono::DateTime<chrono::Utc>>()
        .map_err(|e| format!("bad start_time {start_raw:?}: {e}"))?;
    let duration_raw = get(duration_col, "duration_s")?;
    let duration_s = duration_raw
        .parse::<f64>()
        .map_err(|e| format!("bad duration_s {duration_raw:?}: {e}"))?;
    Ok(GameEvent {
        child_id: get(child_col, "child_id")?.to_string(),
        app_id: get(app_col, "app_id")?.to_string(),
        start_time,
        duration_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_well_formed_lines() {
        let input = concat!(
            "{\"child_id\":\"c1\",\"app_id\":\"a\",\"start_time\":\"2018-10-15T09:00:00Z\",\"duration_s\":12.0}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"b\",\"start_time\":\"2018-10-15T09:05:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c2\",\"app_id\":\"a\",\"start_time\":\"2018-10-15T10:00:00+00:00\",\"duration_s\":7.0}\n",
        );
        let mut builder = EventStoreBuilder::new();
        let report = builder.ingest_games_jsonl(input.as_bytes()).unwrap();
        assert_eq!(report.accepted, 3);
        assert_eq!(report.rejected, 0);
        assert_eq!(builder.freeze().games().len(), 3);
    }

    #[test]
    fn missing_duration_rejects_line_keeps_going() {
        let input = concat!(
            "{\"child_id\":\"c1\",\"app_id\":\"a\",\"start_time\":\"2018-10-15T09:00:00Z\"}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"b\",\"start_time\":\"2018-10-15T09:05:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"c\",\"start_time\":\"2018-10-15T09:06:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"d\",\"start_time\":\"2018-10-15T09:07:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"e\",\"start_time\":\"2018-10-15T09:08:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"f\",\"start_time\":\"2018-10-15T09:09:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"g\",\"start_time\":\"2018-10-15T09:10:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"h\",\"start_time\":\"2018-10-15T09:11:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"i\",\"start_time\":\"2018-10-15T09:12:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"j\",\"start_time\":\"2018-10-15T09:13:00Z\",\"duration_s\":30.5}\n",
        );
        let mut builder = EventStoreBuilder::new();
        let report = builder.ingest_games_jsonl(input.as_bytes()).unwrap();
        assert_eq!(report.accepted, 9);
        assert_eq!(report.rejected, 1);
        assert_eq!(report.errors[0].line, 1);
        assert!(report.errors[0].message.contains("duration_s"));
    }

    #[test]
    fn negative_duration_rejected() {
        let input =
            "{\"child_id\":\"c\",\"app_id\":\"a\",\"start_time\":\"2018-10-15T09:00:00Z\",\"duration_s\":-3.0}\n";
        let mut builder = EventStoreBuilder::new();
        let err = builder.ingest_games_jsonl(input.as_bytes()).unwrap_err();
        // One line, one rejection: 100% malformed trips the overall failure.
        assert!(matches!(
            err,
            EventError::TooManyMalformed {
                rejected: 1,
                total: 1,
                ..
            }
        ));
    }

    #[test]
    fn more_than_ten_percent_malformed_fails() {
        let good = "{\"child_id\":\"c\",\"app_id\":\"a\",\"start_time\":\"2018-10-15T09:00:00Z\",\"duration_s\":8.0}\n";
        let mut input = String::new();
        for _ in 0..8 {
            input.push_str(good);
        }
        input.push_str("not json\n");
        input.push_str("also not json\n");
        let mut builder = EventStoreBuilder::new();
        let err = builder.ingest_games_jsonl(input.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            EventError::TooManyMalformed {
                rejected: 2,
                total: 10,
                ..
            }
        ));
    }

    #[test]
    fn clicks_positions_validated() {
        let input = concat!(
            "{\"child_id\":\"c\",\"app_id\":\"a\",\"position\":1,\"timestamp\":\"2018-10-15T09:00:00Z\"}\n",
            "{\"child_id\":\"c\",\"app_id\":\"a\",\"position\":7,\"timestamp\":\"2018-10-15T09:01:00Z\"}\n",
        );
        let mut builder = EventStoreBuilder::new();
        let report = builder.ingest_clicks_jsonl(input.as_bytes()).unwrap();
        assert_eq!(report.accepted, 2);
    }

    #[test]
    fn recs_roundtrip() {
        let input = "{\"child_id\":\"c\",\"generated_at\":\"2018-10-15T09:00:00Z\",\"slots\":[{\"position\":1,\"app_id\":\"a\",\"source\":\"popular\"},{\"position\":2,\"app_id\":\"b\",\"source\":\"random\"}]}\n";
        let mut builder = EventStoreBuilder::new();
        let report = builder.ingest_recs_jsonl(input.as_bytes()).unwrap();
        assert_eq!(report.accepted, 1);
        let store = builder.freeze();
        assert_eq!(store.recommendations()[0].slots.len(), 2);
    }

    #[test]
    fn games_csv_with_reordered_and_extra_columns() {
        let input = concat!(
            "app_id,extra,child_id,duration_s,start_time\n",
            "a,zzz,c1,12.5,2018-10-15T09:00:00Z\n",
            "b,zzz,c1,9,2018-10-15T09:30:00Z\n",
        );
        let mut builder = EventStoreBuilder::new();
        let report = builder.ingest_games_csv(input.as_bytes()).unwrap();
        assert_eq!(report.accepted, 2);
        let store = builder.freeze();
        assert_eq!(store.games().len(), 2);
        assert!((store.games()[0].duration_s - 12.5).abs() < 1e-12);
    }

    #[test]
    fn games_csv_missing_column_fails() {
        let input = "child_id,app_id,start_time\nc,a,2018-10-15T09:00:00Z\n";
        let mut builder = EventStoreBuilder::new();
        let err = builder.ingest_games_csv(input.as_bytes()).unwrap_err();
        assert!(matches!(err, EventError::CsvMissingColumn("duration_s")));
    }

    #[test]
    fn same_bytes_same_store() {
        let input = concat!(
            "{\"child_id\":\"c2\",\"app_id\":\"b\",\"start_time\":\"2018-10-15T09:05:00Z\",\"duration_s\":30.5}\n",
            "{\"child_id\":\"c1\",\"app_id\":\"a\",\"start_time\":\"2018-10-15T09:00:00Z\",\"duration_s\":12.0}\n",
        );
        let mut b1 = EventStoreBuilder::new();
        b1.ingest_games_jsonl(input.as_bytes()).unwrap();
        let mut b2 = EventStoreBuilder::new();
        b2.ingest_games_jsonl(input.as_bytes()).unwrap();
        assert_eq!(b1.freeze().games(), b2.freeze().games());
    }
}
