//! Evaluation output: an aligned table for people and a TSV for scripts.

use std::io::{self, Write};

use metavec_core::eval::SuiteSummary;

fn rho_cell(rho: Option<f64>) -> String {
    rho.map_or_else(|| "NA".into(), |r| format!("{r:.4}"))
}

/// Per-dataset rows, then Av/Sim/Rel rows when `summary_rows` is set.
pub fn print_table<W: Write>(summary: &SuiteSummary, summary_rows: bool, mut w: W) -> io::Result<()> {
    let width = summary.reports.iter().map(|r| r.dataset.len()).max().unwrap_or(0).max(7);
    writeln!(w, "{:<width$}  {:>8}  {:>9}  {:>11}", "dataset", "rho", "coverage", "pairs")?;
    for r in &summary.reports {
        writeln!(
            w,
            "{:<width$}  {:>8}  {:>8.1}%  {:>11}",
            r.dataset,
            rho_cell(r.spearman_rho),
            r.coverage_pct,
            format!("{}/{}", r.pairs_used, r.pairs_total)
        )?;
    }
    if summary_rows {
        for (name, v) in [("Av", summary.average), ("Sim", summary.similarity), ("Rel", summary.relatedness)] {
            writeln!(w, "{name:<width$}  {:>8}", rho_cell(v))?;
        }
    }
    if !summary.undefined.is_empty() {
        writeln!(w, "undefined rho (excluded from means): {}", summary.undefined.join(", "))?;
    }
    Ok(())
}

/// `dataset rho coverage pairs_used pairs_total`, tab-separated, with a header.
pub fn write_tsv<W: Write>(summary: &SuiteSummary, mut w: W) -> io::Result<()> {
    writeln!(w, "dataset\trho\tcoverage\tpairs_used\tpairs_total")?;
    for r in &summary.reports {
        let rho = r.spearman_rho.map_or_else(|| "NA".into(), |v| format!("{v:?}"));
        writeln!(w, "{}\t{}\t{:?}\t{}\t{}", r.dataset, rho, r.coverage_pct, r.pairs_used, r.pairs_total)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use metavec_core::eval::EvalReport;

    #[test]
    fn table_and_tsv() {
        let summary = SuiteSummary {
            reports: vec![EvalReport {
                dataset: "ws353".into(),
                spearman_rho: Some(0.5),
                coverage_pct: 70.0,
                pairs_total: 10,
                pairs_used: 7,
            }],
            average: Some(0.5),
            similarity: None,
            relatedness: Some(0.5),
            undefined: vec![],
        };
        let mut t = Vec::new();
        print_table(&summary, true, &mut t).unwrap();
        let t = String::from_utf8(t).unwrap();
        assert!(t.contains("ws353") && t.contains("0.5000") && t.contains("70.0%") && t.contains("7/10"));
        assert!(t.lines().any(|l| l.starts_with("Sim") && l.ends_with("NA")));
        let mut tsv = Vec::new();
        write_tsv(&summary, &mut tsv).unwrap();
        assert_eq!(
            String::from_utf8(tsv).unwrap(),
            "dataset\trho\tcoverage\tpairs_used\tpairs_total\nws353\t0.5\t70.0\t7\t10\n"
        );
    }
}
