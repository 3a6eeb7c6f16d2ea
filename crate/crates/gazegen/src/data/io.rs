//! CSV formats: gaze recordings, velocity series, and sequence datasets.
//!
//! - Recording: header `t_ms,left_x,left_y,right_x,right_y`, one row per
//!   sample.
//! - Velocity series: header `t_ms,v`.
//! - Sequence dataset: no header, one sequence per row, every row the same
//!   width.
//!
//! All numeric output is written with full round-trip precision.

use std::fs;
use std::path::Path;

use crate::data::GazeRecording;
use crate::error::{Error, Result};

const RECORDING_HEADER: &str = "t_ms,left_x,left_y,right_x,right_y";
const VELOCITY_HEADER: &str = "t_ms,v";

fn parse_cell(path: &str, line: usize, field: &str, cell: &str) -> Result<f64> {
    cell.trim().parse::<f64>().map_err(|_| {
        Error::parse(
            path,
            line,
            format!("non-numeric value '{}' in column {field}", cell.trim()),
        )
    })
}

pub fn load_recording(path: impl AsRef<Path>) -> Result<GazeRecording> {
    let path_str = path.as_ref().display().to_string();
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path_str, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::EmptyInput(format!("{path_str}: empty file")))?;
    if header.trim() != RECORDING_HEADER {
        return Err(Error::parse(
            &path_str,
            1,
            format!("expected header '{RECORDING_HEADER}', got '{}'", header.trim()),
        ));
    }

    let mut timestamps = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::parse(
                &path_str,
                line_no,
                format!("expected 5 columns, got {}", cells.len()),
            ));
        }
        let t = parse_cell(&path_str, line_no, "t_ms", cells[0])?;
        let lx = parse_cell(&path_str, line_no, "left_x", cells[1])?;
        let ly = parse_cell(&path_str, line_no, "left_y", cells[2])?;
        let rx = parse_cell(&path_str, line_no, "right_x", cells[3])?;
        let ry = parse_cell(&path_str, line_no, "right_y", cells[4])?;
        for (v, col) in [(t, "t_ms"), (lx, "left_x"), (ly, "left_y"), (rx, "right_x"), (ry, "right_y")]
        {
            if !v.is_finite() {
                return Err(Error::parse(
                    &path_str,
                    line_no,
                    format!("non-finite value in column {col}"),
                ));
            }
        }
        timestamps.push(t);
        left.push((lx, ly));
        right.push((rx, ry));
    }
    if left.is_empty() {
        return Err(Error::EmptyInput(format!("{path_str}: no data rows")));
    }
    let sample_interval_ms = if timestamps.len() >= 2 {
        let dt = timestamps[1] - timestamps[0];
        if dt <= 0.0 {
            return Err(Error::parse(
                &path_str,
                3,
                "timestamps must be strictly increasing",
            ));
        }
        dt
    } else {
        1.0
    };
    Ok(GazeRecording {
        sample_interval_ms,
        left,
        right,
        timestamps_ms: Some(timestamps),
    })
}

pub fn save_velocity_csv(path: impl AsRef<Path>, values: &[f64], dt_ms: f64) -> Result<String> {
    let mut out = String::from(VELOCITY_HEADER);
    out.push('\n');
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{v}\n", i as f64 * dt_ms));
    }
    atomic_write(path, out.as_bytes())?;
    Ok(out)
}

pub fn load_velocity_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path_str = path.as_ref().display().to_string();
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path_str, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::EmptyInput(format!("{path_str}: empty file")))?;
    if header.trim() != VELOCITY_HEADER {
        return Err(Error::parse(
            &path_str,
            1,
            format!("expected header '{VELOCITY_HEADER}', got '{}'", header.trim()),
        ));
    }
    let mut values = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 2 {
            return Err(Error::parse(
                &path_str,
                line_no,
                format!("expected 2 columns, got {}", cells.len()),
            ));
        }
        values.push(parse_cell(&path_str, line_no, "v", cells[1])?);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput(format!("{path_str}: no data rows")));
    }
    Ok(values)
}

/// One sequence per row, no header. An empty slice writes an empty file.
pub fn save_sequences(path: impl AsRef<Path>, sequences: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    for seq in sequences {
        let row: Vec<String> = seq.iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

pub fn load_sequences(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path_str = path.as_ref().display().to_string();
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::io(&path_str, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|c| parse_cell(&path_str, line_no, "value", c))
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::parse(
                    &path_str,
                    line_no,
                    format!("row width {} differs from first row width {w}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Write via a temporary file in the same directory, then rename into place.
pub fn atomic_write(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(&path_str, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(&path_str, e))?;
    use std::io::Write;
    tmp.write_all(bytes).map_err(|e| Error::io(&path_str, e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(&path_str, e.error))?;
    Ok(())
}
