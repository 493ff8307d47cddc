//! Plain-text tables. Unrecorded ratings print as "-".

use comptrack_core::reporting::Tabular;

pub fn table(report: &dyn Tabular) -> String {
    let mut rows = vec![report.header()];
    rows.extend(report.body());
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|i| {
            rows.iter()
                .filter_map(|r| r.get(i))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{:<w$}", c.replace(['\n', '\r', '\t'], " "), w = *w))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
