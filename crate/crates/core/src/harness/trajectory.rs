//! Trajectories as CSV: `step,t,<state…>,H[,C]`, one header row, floats
//! with 17 significant digits so every `f64` survives a round trip.

use std::io::{Read, Write};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub t: f64,
    pub state: Vec<f64>,
    pub hamiltonian: f64,
    pub casimir: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub state_labels: Vec<String>,
    pub has_casimir: bool,
    pub rows: Vec<TrajectoryRow>,
}

/// Scientific notation with 16 digits after the point.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl TrajectoryRecord {
    pub fn new(state_labels: Vec<String>, has_casimir: bool) -> Self {
        Self {
            state_labels,
            has_casimir,
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["step".to_string(), "t".to_string()];
        cols.extend(self.state_labels.iter().cloned());
        cols.push("H".into());
        if self.has_casimir {
            cols.push("C".into());
        }
        cols
    }

    pub fn last(&self) -> Option<&TrajectoryRow> {
        self.rows.last()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec = vec![row.step.to_string(), format_float(row.t)];
            rec.extend(row.state.iter().map(|v| format_float(*v)));
            rec.push(format_float(row.hamiltonian));
            if let Some(c) = row.casimir {
                rec.push(format_float(c));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, HarnessError> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let has_casimir = header.last().map(String::as_str) == Some("C");
        let tail = if has_casimir { 2 } else { 1 };
        if header.len() < 3 + tail
            || header[0] != "step"
            || header[1] != "t"
            || header[header.len() - tail] != "H"
        {
            return Err(HarnessError::Config(format!(
                "unexpected trajectory header {header:?}"
            )));
        }
        let state_labels = header[2..header.len() - tail].to_vec();
        let n = state_labels.len();
        let mut record = Self::new(state_labels, has_casimir);
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64, HarnessError> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| HarnessError::Config(format!("bad value in column {i}")))
            };
            let step = rec
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| HarnessError::Config("bad step column".into()))?;
            record.rows.push(TrajectoryRow {
                step,
                t: num(1)?,
                state: (0..n).map(|i| num(2 + i)).collect::<Result<_, _>>()?,
                hamiltonian: num(2 + n)?,
                casimir: if has_casimir { Some(num(3 + n)?) } else { None },
            });
        }
        Ok(record)
    }
}
