//! Aligned plain-text rendering of reports.

use std::fmt::Write;

use clustval::report::{Report, SeedSource};

fn num(v: Option<f64>) -> String {
    match v {
        None => "NA".to_string(),
        // Avoid printing tiny negatives as "-0.0000".
        Some(v) if v.abs() < 5e-5 => format!("{:.4}", 0.0),
        Some(v) => format!("{v:.4}"),
    }
}

fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for line in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            // Text columns left-aligned, numbers right-aligned.
            .map(|(i, (c, &w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn report_table(report: &Report) -> String {
    let meta = &report.metadata;
    let mut out = String::new();
    let _ = write!(out, "# {}: n={}", meta.command, meta.n);
    if let Some(mode) = meta.calibration {
        let _ = write!(out, ", calibration={mode}, B={}, kmax={}", meta.config.b, meta.config.k_max);
    }
    if let (Some(seed), Some(src)) = (meta.seed, meta.seed_source) {
        let src = match src {
            SeedSource::Flag => "flag",
            SeedSource::Config => "config",
            SeedSource::Entropy => "entropy",
        };
        let _ = write!(out, ", seed={seed} ({src})");
    }
    out.push('\n');
    let calibrated = meta.calibration.is_some();
    let _ = writeln!(
        out,
        "# values: {}",
        if calibrated { "calibrated" } else { "normalised" }
    );

    let has_ari = report.rows.iter().any(|r| r.ari.is_some());
    let mut header: Vec<String> = ["clustering", "method", "K"].map(String::from).to_vec();
    header.extend(meta.indexes.iter().map(|id| id.to_string()));
    if calibrated {
        header.push("A".into());
    }
    if has_ari {
        header.push("ARI".into());
    }
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.name.clone(), r.method.clone(), r.k.to_string()];
            for id in &meta.indexes {
                let v = match &r.calibrated {
                    Some(cal) => cal.get(id).and_then(|c| c.value()),
                    None => r.normalised.get(id).copied(),
                };
                cells.push(num(v));
            }
            if calibrated {
                cells.push(num(r.aggregate));
            }
            if has_ari {
                cells.push(num(r.ari));
            }
            cells
        })
        .collect();
    out.push_str(&render(&header, &rows));

    let notes: Vec<String> = report
        .rows
        .iter()
        .flat_map(|r| {
            let failed = r.failures.iter().map(move |(id, why)| format!("{} {id}: {why}", r.name));
            let uncal = r.calibrated.iter().flatten().filter_map(move |(id, c)| match c {
                clustval::CalibratedCell::Unavailable(why) if !r.failures.contains_key(id) => {
                    Some(format!("{} {id}: {why}", r.name))
                }
                _ => None,
            });
            failed.chain(uncal)
        })
        .collect();
    if !notes.is_empty() {
        out.push_str("\n# unavailable values\n");
        for n in notes {
            let _ = writeln!(out, "{n}");
        }
    }

    let excluded: Vec<String> = meta
        .exclusions
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(id, c)| format!("{id}={c}"))
        .collect();
    if !excluded.is_empty() {
        let _ = writeln!(out, "\n# random clusterings excluded per index: {}", excluded.join(", "));
    }

    if !report.random_aggregate.is_empty() {
        out.push_str("\n# A on random clusterings\n");
        let header = ["K", "count", "mean", "sd", "min", "max"].map(String::from).to_vec();
        let rows: Vec<Vec<String>> = report
            .random_aggregate
            .iter()
            .map(|s| {
                vec![
                    s.k.to_string(),
                    s.count.to_string(),
                    num(s.mean),
                    num(s.sd),
                    num(s.min),
                    num(s.max),
                ]
            })
            .collect();
        out.push_str(&render(&header, &rows));
    }
    out
}
