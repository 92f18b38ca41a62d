//! Trajectory CSV files: `t,x1,x2,x3,p1,p2,p3,E,c1,...,c6`.

use std::fmt::Write as _;
use std::path::Path;

use curvkep::{PhasePoint, Sample, Sheet};

use crate::CliError;

pub const HEADER: &str = "t,x1,x2,x3,p1,p2,p3,E,c1,c2,c3,c4,c5,c6";

/// Rows use the shortest decimal that round-trips each `f64`.
pub fn render(samples: &[Sample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for s in samples {
        let z = s.point.to_array();
        let row = std::iter::once(s.t).chain(z).chain(std::iter::once(s.energy)).chain(s.charges);
        for (i, v) in row.enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, samples: &[Sample]) -> Result<(), CliError> {
    std::fs::write(path, render(samples)).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<Vec<Sample>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        _ => return Err(CliError::Usage(format!("trajectory CSV must start with the header '{HEADER}'"))),
    }
    let mut samples = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let values = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(format!("row {}: {e}", n + 1)))?;
        if values.len() != 14 {
            return Err(CliError::Usage(format!("row {}: expected 14 columns, found {}", n + 1, values.len())));
        }
        let z: [f64; 6] = values[1..7].try_into().expect("six columns");
        samples.push(Sample {
            t: values[0],
            point: PhasePoint::from_slice(&z),
            energy: values[7],
            charges: values[8..14].try_into().expect("six columns"),
            sheet: Sheet::Primary,
        });
    }
    if samples.is_empty() {
        return Err(CliError::Usage("trajectory CSV has no rows".into()));
    }
    Ok(samples)
}

pub fn read(path: &Path) -> Result<Vec<Sample>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}
