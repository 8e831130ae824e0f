//! Rendering finished task runs: a machine-readable JSON document, a
//! terse text form, per-task CSV exports, and the process exit code.
//!
//! Output is deterministic byte for byte: object keys are sorted (the
//! serde_json `Map` preserves `BTreeMap` order), floats are printed in
//! fixed scientific notation, and tasks appear in file order.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::run::{Csv, TaskRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn result_json(run: &TaskRun) -> Value {
    match &run.outcome {
        Ok(output) => json!({
            "index": run.index,
            "task": run.kind,
            "status": "ok",
            "passed": output.passed,
            "detail": output.detail,
        }),
        Err(message) => json!({
            "index": run.index,
            "task": run.kind,
            "status": "error",
            "error": message,
        }),
    }
}

pub fn render_json(runs: &[TaskRun]) -> String {
    let doc = json!({
        "version": 1,
        "results": runs.iter().map(result_json).collect::<Vec<_>>(),
        "all_passed": all_passed(runs),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report values are plain data");
    text.push('\n');
    text
}

pub fn render_text(runs: &[TaskRun]) -> String {
    let mut out = String::new();
    for run in runs {
        match &run.outcome {
            Ok(output) => {
                let status = if output.passed { "pass" } else { "FAIL" };
                out.push_str(&format!("#{} {}: {}\n", run.index, run.kind, status));
                let detail =
                    serde_json::to_string(&output.detail).expect("detail is plain data");
                out.push_str(&format!("  {detail}\n"));
            }
            Err(message) => {
                out.push_str(&format!("#{} {}: error: {}\n", run.index, run.kind, message));
            }
        }
    }
    let passed = runs
        .iter()
        .filter(|r| matches!(&r.outcome, Ok(o) if o.passed))
        .count();
    out.push_str(&format!("{passed}/{} passed\n", runs.len()));
    out
}

pub fn render(runs: &[TaskRun], format: Format) -> String {
    match format {
        Format::Json => render_json(runs),
        Format::Text => render_text(runs),
    }
}

fn all_passed(runs: &[TaskRun]) -> bool {
    runs.iter()
        .all(|r| matches!(&r.outcome, Ok(o) if o.passed))
}

/// 0 when every task ran and passed, 1 when some task ran but reported a
/// failing check, 2 when any task could not run at all.
pub fn exit_code(runs: &[TaskRun]) -> u8 {
    if runs.iter().any(|r| r.outcome.is_err()) {
        2
    } else if all_passed(runs) {
        0
    } else {
        1
    }
}

/// Writes one CSV per task that produced a series, named
/// `task{index:03}_{kind}.csv`. Returns the files written.
pub fn write_csv_dir(runs: &[TaskRun], dir: &Path) -> anyhow::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for run in runs {
        let Ok(output) = &run.outcome else { continue };
        let Some(csv) = &output.csv else { continue };
        let name = format!("task{:03}_{}.csv", run.index, run.kind);
        let mut file = fs::File::create(dir.join(&name))?;
        match csv {
            Csv::Steps(rows) => {
                writeln!(file, "step,statistic")?;
                for (step, stat) in rows {
                    writeln!(file, "{step},{stat:.11e}")?;
                }
            }
            Csv::Statistics(sorted) => {
                writeln!(file, "statistic,ecdf")?;
                let count = sorted.len() as f64;
                for (i, stat) in sorted.iter().enumerate() {
                    let ecdf = (i + 1) as f64 / count;
                    writeln!(file, "{stat:.11e},{ecdf:.11e}")?;
                }
            }
        }
        written.push(name);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::TaskOutput;

    fn ok_run(index: usize, passed: bool) -> TaskRun {
        TaskRun {
            index,
            kind: "check-independence",
            outcome: Ok(TaskOutput {
                passed,
                detail: json!({"independent": passed}),
                csv: None,
            }),
        }
    }

    fn err_run(index: usize) -> TaskRun {
        TaskRun {
            index,
            kind: "extend",
            outcome: Err("unknown measure \"ghost\"".into()),
        }
    }

    #[test]
    fn exit_codes_rank_errors_over_failures() {
        assert_eq!(exit_code(&[ok_run(0, true)]), 0);
        assert_eq!(exit_code(&[ok_run(0, true), ok_run(1, false)]), 1);
        assert_eq!(exit_code(&[ok_run(0, false), err_run(1)]), 2);
        assert_eq!(exit_code(&[]), 0);
    }

    #[test]
    fn json_report_carries_every_task_in_order() {
        let runs = vec![ok_run(0, true), err_run(1), ok_run(2, false)];
        let text = render_json(&runs);
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["version"], 1);
        assert_eq!(doc["all_passed"], false);
        let results = doc["results"].as_array().unwrap();
        assert_eq!(results.len(), 3);
        assert_eq!(results[0]["status"], "ok");
        assert_eq!(results[0]["passed"], true);
        assert_eq!(results[1]["status"], "error");
        assert!(results[1]["error"].as_str().unwrap().contains("ghost"));
        assert_eq!(results[2]["passed"], false);
    }

    #[test]
    fn text_report_counts_passes() {
        let runs = vec![ok_run(0, true), ok_run(1, false)];
        let text = render_text(&runs);
        assert!(text.contains("#0 check-independence: pass"));
        assert!(text.contains("#1 check-independence: FAIL"));
        assert!(text.ends_with("1/2 passed\n"));
    }

    #[test]
    fn csv_files_are_named_by_task() {
        let dir = tempfile::tempdir().unwrap();
        let runs = vec![
            TaskRun {
                index: 0,
                kind: "lln",
                outcome: Ok(TaskOutput {
                    passed: true,
                    detail: json!({}),
                    csv: Some(Csv::Steps(vec![(1, 0.5), (2, 0.25)])),
                }),
            },
            TaskRun {
                index: 1,
                kind: "clt",
                outcome: Ok(TaskOutput {
                    passed: true,
                    detail: json!({}),
                    csv: Some(Csv::Statistics(vec![-1.0, 0.0, 1.0])),
                }),
            },
        ];
        let written = write_csv_dir(&runs, dir.path()).unwrap();
        assert_eq!(written, vec!["task000_lln.csv", "task001_clt.csv"]);
        let lln = fs::read_to_string(dir.path().join("task000_lln.csv")).unwrap();
        assert!(lln.starts_with("step,statistic\n1,"));
        let clt = fs::read_to_string(dir.path().join("task001_clt.csv")).unwrap();
        let lines: Vec<&str> = clt.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].ends_with(",1.00000000000e0"));
    }
}
