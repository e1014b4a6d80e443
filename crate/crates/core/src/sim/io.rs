use super::{SimError, TrajectoryRecord};

pub const WORLD_VERSION: &str = "synth-world/1";

/// Renders records as CSV with a header row.
pub fn render_trajectory_log(records: &[TrajectoryRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

/// Parses CSV records; lines starting with `#` are skipped.
pub fn parse_trajectory_log(text: &str) -> Result<Vec<TrajectoryRecord>, SimError> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    rd.deserialize()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| SimError::Format { line: e.position().map_or(i + 2, |p| p.line() as usize), msg: e.to_string() })
        })
        .collect()
}
