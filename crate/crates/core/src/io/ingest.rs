//! CSV ingestion of per-study summaries.
//!
//! Recognized columns: `study_id`, one statistic out of `t_stat`, `t_squared`,
//! `lambda`, `p_two_sided`, `two_log_bf`, then `n`, `n1`, `n2`, `ss_x`, `sign`.
//! `two_log_bf` may be qualified by `bf_prior` (`g` or `jzs`, default `g`) and
//! `g` (default n). Lines starting with `#` are comments. Every problem in the
//! file is collected before an error is raised.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use crate::bf::Sign;
use crate::error::{Error, Result};
use crate::synthesis::{Reported, StudyRecord};

const STATISTIC_COLUMNS: [&str; 5] = ["t_stat", "t_squared", "lambda", "p_two_sided", "two_log_bf"];
const INPUT_COLUMNS: [&str; 12] = [
    "study_id",
    "t_stat",
    "t_squared",
    "lambda",
    "p_two_sided",
    "two_log_bf",
    "bf_prior",
    "g",
    "n",
    "n1",
    "n2",
    "ss_x",
];

/// Columns written by the CSV report; tolerated so a report can be read back in.
pub(crate) const REPORT_COLUMNS: [&str; 7] = [
    "abs_t",
    "nu",
    "ss_x_used",
    "two_log_bf_g",
    "two_log_bf_jzs",
    "w2_omega",
    "w2_v",
];

/// One problem found in the input, tied to a line of the file when possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub line: Option<u64>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn violations_error(v: &[Violation]) -> Error {
    let lines: Vec<String> = v.iter().map(ToString::to_string).collect();
    Error::Input(format!("{} problem(s) in study table:\n  {}", v.len(), lines.join("\n  ")))
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Vec<StudyRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file)
}

pub fn ingest_str(text: &str) -> Result<Vec<StudyRecord>> {
    ingest_reader(text.as_bytes())
}

pub fn ingest_reader<R: Read>(reader: R) -> Result<Vec<StudyRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input(format!("cannot read CSV header: {e}")))?
        .clone();
    let columns: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();

    let mut violations = Vec::new();
    for c in &columns {
        if !INPUT_COLUMNS.contains(&c.as_str()) && !REPORT_COLUMNS.contains(&c.as_str()) && c != "sign" {
            violations.push(Violation {
                line: Some(1),
                message: format!("unknown column '{c}'"),
            });
        }
    }
    if !columns.iter().any(|c| c == "study_id") {
        violations.push(Violation {
            line: Some(1),
            message: "missing required column 'study_id'".into(),
        });
    }
    if !violations.is_empty() {
        return Err(violations_error(&violations));
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    let mut row_count = 0usize;
    for result in rdr.records() {
        let row = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line());
                violations.push(Violation {
                    line,
                    message: format!("unparseable row: {e}"),
                });
                continue;
            }
        };
        row_count += 1;
        let line = row.position().map(|p| p.line());
        let field = Row {
            columns: &columns,
            record: &row,
        };
        let mut problems = Vec::new();
        match parse_row(&field, &mut problems) {
            Some(rec) if problems.is_empty() => {
                if !seen.insert(rec.id.clone()) {
                    problems.push(format!("duplicate study_id '{}'", rec.id));
                } else {
                    records.push(rec);
                }
            }
            _ => {}
        }
        violations.extend(problems.into_iter().map(|message| Violation { line, message }));
    }
    if row_count == 0 {
        violations.push(Violation {
            line: None,
            message: "the table has no data rows".into(),
        });
    }
    if !violations.is_empty() {
        return Err(violations_error(&violations));
    }
    Ok(records)
}

/// Non-empty cells of one data row, looked up by column name.
struct Row<'a> {
    columns: &'a [String],
    record: &'a csv::StringRecord,
}

impl<'a> Row<'a> {
    fn get(&self, name: &str) -> Option<&'a str> {
        self.columns
            .iter()
            .position(|c| c == name)
            .and_then(|i| self.record.get(i))
            .filter(|s| !s.is_empty())
    }
}

fn parse_num<T: std::str::FromStr>(field: &Row<'_>, name: &str, problems: &mut Vec<String>) -> Option<T> {
    let raw = field.get(name)?;
    match raw.parse::<T>() {
        Ok(v) => Some(v),
        Err(_) => {
            problems.push(format!("column {name}: cannot parse '{raw}'"));
            None
        }
    }
}

fn parse_row(field: &Row<'_>, problems: &mut Vec<String>) -> Option<StudyRecord> {
    let id = match field.get("study_id") {
        Some(id) => id.to_string(),
        None => {
            problems.push("empty study_id".into());
            String::new()
        }
    };

    let present: Vec<&str> = STATISTIC_COLUMNS.iter().copied().filter(|c| field.get(c).is_some()).collect();
    let reported = match present.as_slice() {
        [] => {
            problems.push(format!("no statistic given (one of {})", STATISTIC_COLUMNS.join(", ")));
            None
        }
        [one] => parse_statistic(field, one, problems),
        many => {
            problems.push(format!("ambiguous statistic: {} are all populated", many.join(", ")));
            None
        }
    };
    if !matches!(reported, Some(Reported::BayesFactorG { .. } | Reported::BayesFactorJzs { .. })) {
        for qualifier in ["bf_prior", "g"] {
            if field.get(qualifier).is_some() {
                problems.push(format!("column {qualifier} only applies to two_log_bf rows"));
            }
        }
    }

    let n: Option<usize> = parse_num(field, "n", problems);
    let n1: Option<usize> = parse_num(field, "n1", problems);
    let n2: Option<usize> = parse_num(field, "n2", problems);
    let group_sizes = match (n1, n2) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => {
            problems.push("n1 and n2 must be given together".into());
            None
        }
    };
    let n = match (n, group_sizes) {
        (Some(n), Some((a, b))) if n != a + b => {
            problems.push(format!("n = {n} but n1 + n2 = {}", a + b));
            None
        }
        (Some(n), _) => Some(n),
        (None, Some((a, b))) => Some(a + b),
        (None, None) => {
            problems.push("sample size missing: give n or n1 and n2".into());
            None
        }
    };
    let ss_x: Option<f64> = parse_num(field, "ss_x", problems);

    let sign = match field.get("sign") {
        None => None,
        Some("+") => Some(Sign::Pos),
        Some("-") | Some("−") => Some(Sign::Neg),
        Some("?") => Some(Sign::Unknown),
        Some(other) => {
            problems.push(format!("sign must be '+', '-' or '?', got '{other}'"));
            None
        }
    };

    let (reported, n) = (reported?, n?);
    let mut record = StudyRecord::new(id, reported, n);
    record.group_sizes = group_sizes;
    record.ss_x = ss_x;
    if let Some(s) = sign {
        record.sign = s;
    }
    if let Err(e) = record.validate() {
        problems.push(match e {
            Error::Input(msg) => msg,
            other => other.to_string(),
        });
    }
    Some(record)
}

fn parse_statistic(field: &Row<'_>, column: &str, problems: &mut Vec<String>) -> Option<Reported> {
    let value: f64 = parse_num(field, column, problems)?;
    Some(match column {
        "t_stat" => Reported::TStat { t: value },
        "t_squared" => Reported::TSquared { t2: value },
        "lambda" => Reported::Lambda { lambda: value },
        "p_two_sided" => Reported::PValueTwoSided { p: value },
        _ => {
            let g: Option<f64> = parse_num(field, "g", problems);
            match field.get("bf_prior").map(str::to_ascii_lowercase).as_deref() {
                None | Some("g") => Reported::BayesFactorG { two_log_bf: value, g },
                Some("jzs") => {
                    if g.is_some() {
                        problems.push("column g does not apply to JZS Bayes factors".into());
                    }
                    Reported::BayesFactorJzs { two_log_bf: value }
                }
                Some(other) => {
                    problems.push(format!("bf_prior must be 'g' or 'jzs', got '{other}'"));
                    return None;
                }
            }
        }
    })
}
