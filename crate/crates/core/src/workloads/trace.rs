use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{AccessKind, TraceRecord, WorkloadError};

pub fn format_record(r: &TraceRecord) -> String {
    let kind = match r.kind {
        AccessKind::Read => 'R',
        AccessKind::Write => 'W',
    };
    format!("{} {} 0x{:x} {}", r.instruction_delta, kind, r.address, r.size_bytes)
}

/// Parses one trace line. Returns `Ok(None)` for blank and comment lines.
pub fn parse_line(text: &str, line: u64) -> Result<Option<TraceRecord>, WorkloadError> {
    let body = text.trim();
    if body.is_empty() || body.starts_with('#') {
        return Ok(None);
    }
    let bad = |token: &str| WorkloadError::MalformedTrace { line, token: token.to_string() };
    let mut fields = body.split_whitespace();
    let mut next = || fields.next().ok_or_else(|| bad("<end of line>"));

    let delta_tok = next()?;
    let instruction_delta = delta_tok.parse::<u64>().map_err(|_| bad(delta_tok))?;
    let kind = match next()? {
        "R" | "r" => AccessKind::Read,
        "W" | "w" => AccessKind::Write,
        other => return Err(bad(other)),
    };
    let addr_tok = next()?;
    let hex = addr_tok
        .strip_prefix("0x")
        .or_else(|| addr_tok.strip_prefix("0X"))
        .ok_or_else(|| bad(addr_tok))?;
    let address = u64::from_str_radix(hex, 16).map_err(|_| bad(addr_tok))?;
    let size_tok = next()?;
    let size_bytes = match size_tok.parse::<u32>() {
        Ok(s) if s > 0 => s,
        _ => return Err(bad(size_tok)),
    };
    if let Some(extra) = fields.next() {
        return Err(bad(extra));
    }
    Ok(Some(TraceRecord { instruction_delta, kind, address, size_bytes }))
}

/// Streaming line-by-line trace parser.
pub struct TraceReader<R> {
    reader: R,
    line: u64,
    buf: String,
    failed: bool,
}

impl<R: BufRead> TraceReader<R> {
    pub fn new(reader: R) -> Self {
        Self { reader, line: 0, buf: String::new(), failed: false }
    }
}

impl<R: BufRead> Iterator for TraceReader<R> {
    type Item = Result<TraceRecord, WorkloadError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            }
            self.line += 1;
            match parse_line(&self.buf, self.line) {
                Ok(None) => continue,
                Ok(Some(r)) => return Some(Ok(r)),
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

/// Opens a trace file; a `.gz` extension selects gzip decoding.
pub fn open_trace(path: &Path) -> Result<TraceReader<Box<dyn BufRead + Send>>, WorkloadError> {
    let file = File::open(path)?;
    let reader: Box<dyn BufRead + Send> = if is_gzip(path) {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    Ok(TraceReader::new(reader))
}

/// Writes records to `path`, gzip-compressed when it ends in `.gz`.
/// Returns the number of records written.
pub fn write_trace<I>(path: &Path, records: I) -> io::Result<u64>
where
    I: IntoIterator<Item = TraceRecord>,
{
    let file = File::create(path)?;
    if is_gzip(path) {
        let mut enc = GzEncoder::new(BufWriter::new(file), Compression::default());
        let n = write_records(&mut enc, records)?;
        enc.finish()?.flush()?;
        Ok(n)
    } else {
        let mut w = BufWriter::new(file);
        let n = write_records(&mut w, records)?;
        w.flush()?;
        Ok(n)
    }
}

fn write_records<W: Write, I: IntoIterator<Item = TraceRecord>>(w: &mut W, records: I) -> io::Result<u64> {
    let mut n = 0;
    for r in records {
        writeln!(w, "{}", format_record(&r))?;
        n += 1;
    }
    Ok(n)
}
