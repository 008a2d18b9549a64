//! Codecs for the two event-log files.
//!
//! Both files are RFC-4180 CSV in UTF-8 with LF record terminators and a
//! fixed header. A field is wrapped in double quotes only when it contains a
//! comma, a double quote, CR or LF; embedded quotes are doubled. Every record,
//! including the last one, ends with LF, so a file cut mid-record never
//! decodes.

use crate::error::MalformedCsv;
use crate::model::{iso_date, ActionRecord, EventType, SnapshotRecord};

pub const SNAPSHOT_HEADER: &str = "date,timestampMillis,taskKey,language,fileName,fragment";
pub const ACTION_HEADER: &str = "date,timestampMillis,eventType,actionId,detail";

/// A record type with a fixed CSV layout.
pub trait CsvRecord: Sized {
    const HEADER: &'static str;
    const COLUMNS: usize;

    fn fields(&self) -> Vec<String>;

    /// Builds a record from exactly `COLUMNS` cells; `line` is used for errors.
    fn from_fields(fields: Vec<String>, line: usize) -> Result<Self, MalformedCsv>;
}

impl CsvRecord for SnapshotRecord {
    const HEADER: &'static str = SNAPSHOT_HEADER;
    const COLUMNS: usize = 6;

    fn fields(&self) -> Vec<String> {
        vec![
            self.date_iso(),
            self.timestamp_millis.to_string(),
            self.task_key.clone(),
            self.language.clone(),
            self.file_name.clone(),
            self.fragment.clone(),
        ]
    }

    fn from_fields(fields: Vec<String>, line: usize) -> Result<Self, MalformedCsv> {
        let [date, ts, task_key, language, file_name, fragment]: [String; 6] =
            fields.try_into().map_err(|_| MalformedCsv::new(line, "wrong column count"))?;
        let timestamp_millis = parse_timestamp(&date, &ts, line)?;
        Ok(SnapshotRecord {
            timestamp_millis,
            task_key,
            language,
            file_name,
            fragment,
        })
    }
}

impl CsvRecord for ActionRecord {
    const HEADER: &'static str = ACTION_HEADER;
    const COLUMNS: usize = 5;

    fn fields(&self) -> Vec<String> {
        vec![
            self.date_iso(),
            self.timestamp_millis.to_string(),
            self.event_type.to_string(),
            self.action_id.clone(),
            self.detail.clone(),
        ]
    }

    fn from_fields(fields: Vec<String>, line: usize) -> Result<Self, MalformedCsv> {
        let [date, ts, event_type, action_id, detail]: [String; 5] =
            fields.try_into().map_err(|_| MalformedCsv::new(line, "wrong column count"))?;
        let timestamp_millis = parse_timestamp(&date, &ts, line)?;
        let event_type: EventType = event_type
            .parse()
            .map_err(|e| MalformedCsv::new(line, format!("{e}")))?;
        if action_id.is_empty() {
            return Err(MalformedCsv::new(line, "empty actionId"));
        }
        Ok(ActionRecord {
            timestamp_millis,
            event_type,
            action_id,
            detail,
        })
    }
}

fn parse_timestamp(date: &str, ts: &str, line: usize) -> Result<i64, MalformedCsv> {
    let millis: i64 = ts
        .parse()
        .map_err(|_| MalformedCsv::new(line, format!("non-integer timestamp {ts:?}")))?;
    let rendered = iso_date(millis);
    if rendered.is_empty() || rendered != date {
        return Err(MalformedCsv::new(
            line,
            format!("date {date:?} does not match timestamp {millis}"),
        ));
    }
    Ok(millis)
}

fn needs_quotes(field: &str) -> bool {
    field.contains([',', '"', '\n', '\r'])
}

fn push_field(out: &mut String, field: &str) {
    if needs_quotes(field) {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}

/// Encodes a single record as one CSV row including the trailing LF.
pub fn encode_row<R: CsvRecord>(record: &R) -> String {
    let mut out = String::new();
    for (i, field) in record.fields().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_field(&mut out, field);
    }
    out.push('\n');
    out
}

/// Header line with its LF terminator.
pub fn header_line<R: CsvRecord>() -> String {
    format!("{}\n", R::HEADER)
}

pub fn encode<R: CsvRecord>(records: &[R]) -> String {
    let mut out = header_line::<R>();
    for r in records {
        out.push_str(&encode_row(r));
    }
    out
}

pub fn decode<R: CsvRecord>(text: &str) -> Result<Vec<R>, MalformedCsv> {
    let body = match text.strip_prefix(R::HEADER) {
        Some("") => return Ok(Vec::new()),
        Some(rest) if rest.starts_with('\n') => &rest[1..],
        _ => {
            let found = text.lines().next().unwrap_or("");
            return Err(MalformedCsv::new(
                1,
                format!("expected header {:?}, found {:?}", R::HEADER, found),
            ));
        }
    };
    let rows = parse_rows(body, 2)?;
    rows.into_iter()
        .map(|(line, fields)| {
            if fields.len() != R::COLUMNS {
                return Err(MalformedCsv::new(
                    line,
                    format!("expected {} columns, found {}", R::COLUMNS, fields.len()),
                ));
            }
            R::from_fields(fields, line)
        })
        .collect()
}

pub fn encode_snapshots(records: &[SnapshotRecord]) -> String {
    encode(records)
}

pub fn decode_snapshots(text: &str) -> Result<Vec<SnapshotRecord>, MalformedCsv> {
    decode(text)
}

pub fn encode_actions(records: &[ActionRecord]) -> String {
    encode(records)
}

pub fn decode_actions(text: &str) -> Result<Vec<ActionRecord>, MalformedCsv> {
    decode(text)
}

/// Splits the body into rows of raw cells, each tagged with the line on
/// which the row starts.
fn parse_rows(body: &str, first_line: usize) -> Result<Vec<(usize, Vec<String>)>, MalformedCsv> {
    let bytes = body.as_bytes();
    let mut rows = Vec::new();
    let mut line = first_line;
    let mut pos = 0;

    while pos < bytes.len() {
        let row_line = line;
        let mut fields = Vec::new();
        loop {
            // One field starting at `pos`.
            if bytes.get(pos) == Some(&b'"') {
                let open_line = line;
                pos += 1;
                let mut field = String::new();
                let mut seg_start = pos;
                loop {
                    match bytes.get(pos) {
                        None => {
                            return Err(MalformedCsv::new(open_line, "unbalanced quotes"));
                        }
                        Some(b'"') if bytes.get(pos + 1) == Some(&b'"') => {
                            field.push_str(&body[seg_start..=pos]);
                            pos += 2;
                            seg_start = pos;
                        }
                        Some(b'"') => {
                            field.push_str(&body[seg_start..pos]);
                            pos += 1;
                            break;
                        }
                        Some(b'\n') => {
                            line += 1;
                            pos += 1;
                        }
                        Some(_) => pos += 1,
                    }
                }
                fields.push(field);
                match bytes.get(pos) {
                    Some(b',') | Some(b'\n') | None => {}
                    Some(_) => {
                        return Err(MalformedCsv::new(line, "text after closing quote"));
                    }
                }
            } else {
                let start = pos;
                while let Some(&b) = bytes.get(pos) {
                    match b {
                        b',' | b'\n' => break,
                        b'"' => return Err(MalformedCsv::new(line, "quote inside unquoted field")),
                        b'\r' => {
                            return Err(MalformedCsv::new(line, "carriage return outside quotes"))
                        }
                        _ => pos += 1,
                    }
                }
                fields.push(body[start..pos].to_string());
            }

            match bytes.get(pos) {
                Some(b',') => pos += 1,
                Some(b'\n') => {
                    pos += 1;
                    line += 1;
                    break;
                }
                None => {
                    return Err(MalformedCsv::new(line, "unterminated final record"));
                }
                Some(_) => unreachable!("field scanner stops only at delimiters"),
            }
        }
        rows.push((row_line, fields));
    }
    Ok(rows)
}
