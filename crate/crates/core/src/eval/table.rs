use super::EvalReport;

const HEADERS: [&str; 5] = ["planner", "cases", "evaluated", "pl. success", "pl. efficiency"];

fn rows(report: &EvalReport) -> Vec<[String; 5]> {
    report
        .summaries
        .iter()
        .map(|s| {
            [
                s.planner.to_string(),
                s.cases.to_string(),
                s.evaluated.to_string(),
                format!("{:.3}", s.mean_success),
                s.mean_efficiency.map_or_else(|| "-".to_string(), |e| format!("{e:.3}")),
            ]
        })
        .collect()
}

/// Column-aligned plain text, one row per planner.
pub fn render_text_table(report: &EvalReport) -> String {
    let body = rows(report);
    let mut width = HEADERS.map(str::len);
    for r in &body {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{c:<w$}", w = width[i]) } else { format!("{c:>w$}", w = width[i]) })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = format!("suite: {}  gamma: {}\n", report.suite, report.gamma);
    out += &line(&HEADERS.map(String::from));
    out += &(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n");
    for r in &body {
        out += &line(r);
    }
    out
}

/// Comma-separated table with a header row.
pub fn render_csv_table(report: &EvalReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "planner", "cases", "evaluated", "mean_success", "mean_efficiency"]).expect("in-memory write");
    for s in &report.summaries {
        w.write_record([
            report.suite.clone(),
            s.planner.to_string(),
            s.cases.to_string(),
            s.evaluated.to_string(),
            s.mean_success.to_string(),
            s.mean_efficiency.map_or_else(String::new, |e| e.to_string()),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}
