//! Plain-text rendering of training, evaluation and comparison reports.
//! The serde forms of the same structs are the machine-readable side.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::modelsel::{EvaluationReport, Ratio, TrainingReport};

fn num(v: f64) -> String {
    format!("{v:.4}")
}

fn ratio(r: &Ratio) -> String {
    if r.degenerate {
        format!("{} (undefined)", num(r.value))
    } else {
        num(r.value)
    }
}

/// F1 reached by feature selection with the untuned estimator.
pub fn f1_before_tuning(t: &TrainingReport) -> f64 {
    t.selection.last().map_or(0.0, |s| s.f1)
}

/// Relative change of CV F1 from the untuned to the tuned estimator, in
/// percent.
pub fn tuning_increment(t: &TrainingReport) -> f64 {
    let before = f1_before_tuning(t);
    if before == 0.0 {
        0.0
    } else {
        100.0 * (t.grid.best.mean_f1 - before) / before
    }
}

pub fn render_training(t: &TrainingReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "training samples   {} ({} malicious, {} benign)", t.samples, t.malicious, t.benign);
    let _ = writeln!(s, "seed               {}", t.seed);
    let _ = writeln!(s, "\nfeature selection");
    for (i, step) in t.selection.iter().enumerate() {
        let _ = writeln!(s, "  {:>2}. {:<18} F1 {}", i + 1, step.feature, num(step.f1));
    }
    let _ = writeln!(s, "\nhyperparameter tuning ({} cells)", t.grid.cells.len());
    let _ = writeln!(s, "  {:>10} {:>8} {:>8}", "C", "gamma", "F1");
    for cell in &t.grid.cells {
        let _ = writeln!(s, "  {:>10} {:>8} {:>8}", cell.c, cell.gamma, num(cell.mean_f1));
    }
    let _ = writeln!(
        s,
        "  chosen C {} gamma {} (F1 {} -> {}, {:+.2}%)",
        t.grid.best.c,
        t.grid.best.gamma,
        num(f1_before_tuning(t)),
        num(t.grid.best.mean_f1),
        tuning_increment(t)
    );
    let r = &t.robustness;
    let _ = writeln!(s, "\nrobustness ({}-fold)", r.k);
    let _ = writeln!(s, "  F1 avg           {}", num(r.mean_f1));
    let _ = writeln!(s, "  F1 dev. std      {}", num(r.std_f1));
    let _ = writeln!(s, "  support vectors  {:.1} per fold", r.mean_support_vectors);
    let _ = writeln!(s, "\nfinal model        {} support vectors{}", t.support_vectors, if t.converged { "" } else { " (solver hit its iteration cap)" });
    s
}

pub fn render_evaluation(e: &EvaluationReport) -> String {
    let c = &e.confusion;
    let mut s = String::new();
    let _ = writeln!(s, "test samples       {}", e.samples);
    let _ = writeln!(s, "features           {}", e.selected_features.join(", "));
    let _ = writeln!(s, "C / gamma          {} / {}", e.c, e.gamma);
    let _ = writeln!(s, "support vectors    {}", e.support_vectors);
    let _ = writeln!(s, "F1 weighted avg    {}", ratio(&e.weighted_f1));
    let _ = writeln!(s, "benign             {} errors (false positives)", c.fp);
    let _ = writeln!(s, "  F1               {}", ratio(&e.f1_benign));
    let _ = writeln!(s, "  FPR              {}", ratio(&e.fpr));
    let _ = writeln!(s, "attacks            {} errors (false negatives)", c.fn_);
    let _ = writeln!(s, "  F1               {}", ratio(&e.f1_malicious));
    let _ = writeln!(s, "  FNR              {}", ratio(&e.fnr));
    let _ = writeln!(s, "confusion          TP {} FP {} TN {} FN {}", c.tp, c.fp, c.tn, c.fn_);
    if !e.false_negatives_by_label.is_empty() {
        let _ = writeln!(s, "missed attacks by label");
        for (label, n) in &e.false_negatives_by_label {
            let _ = writeln!(s, "  {label:<30} {n}");
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub training: TrainingReport,
    pub evaluation: EvaluationReport,
}

/// One `(sigma, omega)` run; `error` is set when the run failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub sigma: String,
    pub omega: String,
    pub result: Option<CellResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Comparison {
    pub cells: Vec<Cell>,
}

type Row = (&'static str, fn(&CellResult) -> String);

const BLOCKS: [(&str, &[Row]); 4] = [
    (
        "Feature selection",
        &[
            ("F1", |r| num(f1_before_tuning(&r.training))),
            ("# features", |r| r.training.selection.len().to_string()),
            ("Most significant feature", |r| {
                r.training.selection.first().map_or("-".into(), |s| s.feature.clone())
            }),
        ],
    ),
    (
        "Hyperparameters tuning",
        &[
            ("F1 score before tuning", |r| num(f1_before_tuning(&r.training))),
            ("F1 score after tuning", |r| num(r.training.grid.best.mean_f1)),
            ("Percentage increment", |r| format!("{:.2}%", tuning_increment(&r.training))),
            ("Chosen gamma", |r| r.training.grid.best.gamma.to_string()),
            ("Chosen C", |r| r.training.grid.best.c.to_string()),
        ],
    ),
    (
        "Model robustness",
        &[
            ("F1 avg", |r| num(r.training.robustness.mean_f1)),
            ("F1 dev. std", |r| num(r.training.robustness.std_f1)),
            ("Support vectors", |r| r.training.support_vectors.to_string()),
        ],
    ),
    (
        "Model performance on test data set",
        &[
            ("F1 weighted avg", |r| num(r.evaluation.weighted_f1.value)),
            ("Benign errors (FP)", |r| r.evaluation.confusion.fp.to_string()),
            ("Benign F1", |r| num(r.evaluation.f1_benign.value)),
            ("FPR", |r| num(r.evaluation.fpr.value)),
            ("Attack errors (FN)", |r| r.evaluation.confusion.fn_.to_string()),
            ("Attack F1", |r| num(r.evaluation.f1_malicious.value)),
            ("FNR", |r| num(r.evaluation.fnr.value)),
        ],
    ),
];

/// Row labels of the comparison table, block headers included.
pub fn comparison_rows() -> Vec<&'static str> {
    BLOCKS
        .iter()
        .flat_map(|(head, rows)| std::iter::once(*head).chain(rows.iter().map(|(l, _)| *l)))
        .collect()
}

pub fn render_comparison(cmp: &Comparison) -> String {
    let label_w = 36;
    let values: Vec<Vec<String>> = BLOCKS
        .iter()
        .flat_map(|(_, rows)| rows.iter())
        .map(|(_, get)| {
            cmp.cells
                .iter()
                .map(|c| c.result.as_ref().map_or_else(|| "failed".to_string(), get))
                .collect()
        })
        .collect();
    let col_w = values.iter().flatten().map(|v| v.len() + 2).fold(14, usize::max);
    let mut s = String::new();
    let _ = write!(s, "{:label_w$}", "");
    for cell in &cmp.cells {
        let _ = write!(s, "{:>col_w$}", format!("w={} s={}", cell.omega, cell.sigma));
    }
    s.push('\n');
    let mut values = values.iter();
    for (head, rows) in BLOCKS.iter() {
        let _ = writeln!(s, "{head}");
        for (label, _) in rows.iter() {
            let _ = write!(s, "  {:w$}", label, w = label_w - 2);
            for v in values.next().into_iter().flatten() {
                let _ = write!(s, "{v:>col_w$}");
            }
            s.push('\n');
        }
    }
    let failed: Vec<&Cell> = cmp.cells.iter().filter(|c| c.error.is_some()).collect();
    if !failed.is_empty() {
        let _ = writeln!(s, "\nfailed cells");
        for c in failed {
            let _ = writeln!(s, "  w={} s={}: {}", c.omega, c.sigma, c.error.as_deref().unwrap_or(""));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_mirror_the_four_blocks() {
        let rows = comparison_rows();
        assert_eq!(rows[0], "Feature selection");
        assert!(rows.contains(&"Model robustness"));
        assert!(rows.contains(&"F1 dev. std"));
        assert_eq!(rows.len(), 4 + 3 + 5 + 3 + 7);
    }

    #[test]
    fn failed_cells_are_listed() {
        let cmp = Comparison {
            cells: vec![Cell {
                sigma: "5".into(),
                omega: "m".into(),
                result: None,
                error: Some("only one class".into()),
            }],
        };
        let text = render_comparison(&cmp);
        assert!(text.contains("failed"));
        assert!(text.contains("w=m s=5: only one class"));
    }
}
