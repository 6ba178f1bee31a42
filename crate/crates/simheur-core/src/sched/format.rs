//! Plain-text instance files. The format is line oriented; `#` starts a
//! comment anywhere in a line and blank lines are ignored:
//!
//! ```text
//! num_machines 4
//! w_tardiness 1
//! w_makespan 0.1
//! jobs 2                 # then one line per job: id mean_duration cv due_date
//! 0 3 0.5 5
//! 1 4 0.5 6
//! setup 3                # then (jobs + 1) rows of `jobs` entries; row 0 = from idle
//! 0 0
//! 0 1
//! 1 0
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a written file reproduces the instance bit for bit.

use super::{Instance, Job, SchedError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line in the input; the last line for end-of-file errors.
    pub line: usize,
    pub message: String,
}

struct Lines<'a> {
    /// Significant (non-blank, comment-stripped) lines with their 1-based numbers.
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            last_line = idx + 1;
            let stripped = match raw.find('#') {
                Some(hash) => &raw[..hash],
                None => raw,
            };
            let trimmed = stripped.trim();
            if !trimmed.is_empty() {
                items.push((idx + 1, trimmed));
            }
        }
        Self {
            items,
            pos: 0,
            last_line: last_line.max(1),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        match self.items.get(self.pos) {
            Some(&(line, text)) => {
                self.pos += 1;
                Ok((line, text))
            }
            None => Err(ParseError {
                line: self.last_line,
                message: format!("unexpected end of file, expected {what}"),
            }),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.items.get(self.pos) {
            Some(&(line, text)) => Err(ParseError {
                line,
                message: format!("unexpected trailing content: {text}"),
            }),
            None => Ok(()),
        }
    }
}

fn parse_field<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T, ParseError>
where
    T::Err: fmt::Display,
{
    token.parse().map_err(|e| ParseError {
        line,
        message: format!("invalid {what} `{token}`: {e}"),
    })
}

/// Reads `key <value>` where the key is fixed.
fn parse_kv<T: std::str::FromStr>(lines: &mut Lines, key: &str) -> Result<T, ParseError>
where
    T::Err: fmt::Display,
{
    let (line, text) = lines.next(&format!("`{key} <value>`"))?;
    let mut tokens = text.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(k), Some(v), None) if k == key => parse_field(v, line, key),
        _ => Err(ParseError {
            line,
            message: format!("expected `{key} <value>`, found `{text}`"),
        }),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    let num_machines: usize = parse_kv(&mut lines, "num_machines")?;
    let w_tardiness: f64 = parse_kv(&mut lines, "w_tardiness")?;
    let w_makespan: f64 = parse_kv(&mut lines, "w_makespan")?;
    let num_jobs: usize = parse_kv(&mut lines, "jobs")?;

    let mut jobs = Vec::with_capacity(num_jobs);
    for _ in 0..num_jobs {
        let (line, text) = lines.next("a job line `id mean_duration cv due_date`")?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(ParseError {
                line,
                message: format!(
                    "job line has {} fields, expected 4 (id mean_duration cv due_date)",
                    tokens.len()
                ),
            });
        }
        jobs.push(Job {
            id: parse_field(tokens[0], line, "job id")?,
            mean_duration: parse_field(tokens[1], line, "mean_duration")?,
            cv: parse_field(tokens[2], line, "cv")?,
            due_date: parse_field(tokens[3], line, "due_date")?,
        });
    }

    let setup_rows: usize = parse_kv(&mut lines, "setup")?;
    if setup_rows != num_jobs + 1 {
        return Err(ParseError {
            line: lines.items[lines.pos - 1].0,
            message: format!("setup declares {setup_rows} rows, expected jobs + 1 = {}", num_jobs + 1),
        });
    }
    let mut setup = Vec::with_capacity(setup_rows);
    for _ in 0..setup_rows {
        let (line, text) = lines.next("a setup row")?;
        let row: Vec<f64> = text
            .split_whitespace()
            .map(|tok| parse_field(tok, line, "setup time"))
            .collect::<Result<_, _>>()?;
        if row.len() != num_jobs {
            return Err(ParseError {
                line,
                message: format!("setup row has {} entries, expected {num_jobs}", row.len()),
            });
        }
        setup.push(row);
    }
    lines.finish()?;

    let last = lines.last_line;
    Instance::new(jobs, num_machines, setup, w_tardiness, w_makespan).map_err(|e| {
        let message = match e {
            SchedError::InvalidInstance(m) => m,
            other => other.to_string(),
        };
        ParseError { line: last, message }
    })
}

pub fn write_instance(instance: &Instance) -> String {
    use fmt::Write;
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "num_machines {}", instance.num_machines()).unwrap();
    writeln!(w, "w_tardiness {}", instance.w_tardiness()).unwrap();
    writeln!(w, "w_makespan {}", instance.w_makespan()).unwrap();
    writeln!(w, "jobs {}", instance.num_jobs()).unwrap();
    writeln!(w, "# id mean_duration cv due_date").unwrap();
    for job in instance.jobs() {
        writeln!(w, "{} {} {} {}", job.id, job.mean_duration, job.cv, job.due_date).unwrap();
    }
    writeln!(w, "setup {}", instance.num_jobs() + 1).unwrap();
    writeln!(w, "# row 0 = setup from idle, row i+1 = setup after job i").unwrap();
    for row in instance.setup() {
        let rendered: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(w, "{}", rendered.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sched::{generate_instance, GeneratorParams};

    #[test]
    fn round_trip_preserves_instance_exactly() {
        let instance = generate_instance(17, 3, 4242, &GeneratorParams::default());
        let text = write_instance(&instance);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed, instance);
        // Rendering the parsed instance reproduces the bytes.
        assert_eq!(write_instance(&parsed), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# header\nnum_machines 1 # one machine\n\nw_tardiness 1\nw_makespan 0.1\njobs 1\n0 3 0 5\nsetup 2\n0\n0\n";
        let instance = parse_instance(text).unwrap();
        assert_eq!(instance.num_machines(), 1);
        assert_eq!(instance.num_jobs(), 1);
    }

    #[test]
    fn error_reports_exact_line_for_bad_float() {
        let text = "num_machines 1\nw_tardiness 1\nw_makespan 0.1\njobs 1\n0 oops 0 5\nsetup 2\n0\n0\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("mean_duration"), "{}", err.message);
    }

    #[test]
    fn error_reports_line_for_short_job_line() {
        let text = "num_machines 1\nw_tardiness 1\nw_makespan 0.1\njobs 2\n0 3 0 5\n1 4 0\nsetup 3\n0 0\n0 0\n0 0\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 6);
        assert!(err.message.contains("expected 4"), "{}", err.message);
    }

    #[test]
    fn error_reports_line_for_wrong_setup_width() {
        let text = "num_machines 1\nw_tardiness 1\nw_makespan 0.1\njobs 2\n0 3 0 5\n1 4 0 6\nsetup 3\n0 0\n0 0 0\n0 0\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 9);
        assert!(err.message.contains("expected 2"), "{}", err.message);
    }

    #[test]
    fn error_on_missing_header() {
        let text = "w_tardiness 1\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("num_machines"), "{}", err.message);
    }

    #[test]
    fn error_on_truncated_file() {
        let text = "num_machines 1\nw_tardiness 1\nw_makespan 0.1\njobs 2\n0 3 0 5\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("end of file"), "{}", err.message);
    }

    #[test]
    fn error_on_trailing_content() {
        let text = "num_machines 1\nw_tardiness 1\nw_makespan 0.1\njobs 1\n0 3 0 5\nsetup 2\n0\n0\nextra\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 9);
        assert!(err.message.contains("trailing"), "{}", err.message);
    }

    #[test]
    fn semantic_errors_surface_from_validation() {
        // Job ids out of order.
        let text = "num_machines 1\nw_tardiness 1\nw_makespan 0.1\njobs 2\n1 3 0 5\n0 4 0 6\nsetup 3\n0 0\n0 0\n0 0\n";
        let err = parse_instance(text).unwrap_err();
        assert!(err.message.contains("ids must be 0..n"), "{}", err.message);
    }
}
