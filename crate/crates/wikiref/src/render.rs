//! Human-readable renderings.

use std::fmt::Write;

use wikiref_core::evaluate::{EvalReport, System};

use crate::artifacts::Stamp;
use crate::commands::RecommendationOutput;

fn f3(x: f64) -> String {
    format!("{x:.3}")
}

/// Markdown tables laid out like the published ones: WikiRef per k, then
/// every system side by side per (k, metric).
pub fn report_markdown(report: &EvalReport, stamp: &Stamp) -> String {
    let mut md = String::new();
    let w = &mut md;
    let _ = writeln!(w, "# Evaluation report\n");
    let _ = writeln!(
        w,
        "Test targets: {} (training targets: {}). Averages are macro averages over all test targets.\n",
        report.test_target_count,
        report.train_targets.len()
    );

    let _ = writeln!(w, "## Wikilink classification\n");
    let _ = writeln!(w, "| Class | Precision | Recall | F-Measure | Support |");
    let _ = writeln!(w, "|---|---|---|---|---|");
    for (name, m) in [("relevant", &report.step1.relevant), ("irrelevant", &report.step1.irrelevant)] {
        let _ = writeln!(
            w,
            "| {name} | {} | {} | {} | {} |",
            f3(m.precision),
            f3(m.recall),
            f3(m.f_measure),
            m.support
        );
    }
    let _ = writeln!(w, "\nAccuracy {} over {} wikilinks.\n", f3(report.step1.accuracy), report.step1.links);

    let _ = writeln!(w, "## Chi-square feature ranking\n");
    let _ = writeln!(w, "| Rank | Feature | Score |");
    let _ = writeln!(w, "|---|---|---|");
    for (i, s) in report.chi_square.iter().enumerate() {
        let _ = writeln!(w, "| {} | {} | {} |", i + 1, s.feature.name().to_uppercase(), f3(s.score));
    }

    if let Some(wikiref) = report.system(System::WikiRef) {
        let _ = writeln!(w, "\n## WikiRef by k\n");
        let _ = writeln!(w, "| k | Precision | Recall | F-Measure |");
        let _ = writeln!(w, "|---|---|---|---|");
        for m in &wikiref.at_k {
            let _ = writeln!(w, "| {} | {} | {} | {} |", m.k, f3(m.precision), f3(m.recall), f3(m.f_measure));
        }
    }

    let _ = writeln!(w, "\n## Systems\n");
    let _ = write!(w, "| k | Metric |");
    for s in &report.systems {
        let _ = write!(w, " {} |", s.system);
    }
    let _ = write!(w, "\n|---|---|");
    for _ in &report.systems {
        let _ = write!(w, "---|");
    }
    let _ = writeln!(w);
    for (i, k) in report.config.ks.iter().enumerate() {
        for (metric, pick) in [
            ("Precision", (|m: &wikiref_core::evaluate::MetricsAtK| m.precision) as fn(&_) -> f64),
            ("Recall", |m| m.recall),
            ("F-Measure", |m| m.f_measure),
        ] {
            let _ = write!(w, "| {k} | {metric} |");
            for s in &report.systems {
                let _ = write!(w, " {} |", f3(pick(&s.at_k[i])));
            }
            let _ = writeln!(w);
        }
    }

    let _ = writeln!(w, "\n## Targets with candidate links\n");
    let _ = writeln!(w, "| System | Targets | P@{0} | R@{0} | Reachable R@{0} |", report.config.ks[0]);
    let _ = writeln!(w, "|---|---|---|---|---|");
    for s in &report.systems {
        let _ = writeln!(
            w,
            "| {} | {} | {} | {} | {} |",
            s.system,
            s.with_candidates_targets,
            f3(s.with_candidates[0].precision),
            f3(s.with_candidates[0].recall),
            f3(s.reachable_recall[0])
        );
    }

    if let Some(sp) = &report.spearman {
        let _ = writeln!(w, "\n## Rank correlation with human votes\n");
        let _ = writeln!(w, "| System | Average rho | Targets |");
        let _ = writeln!(w, "|---|---|---|");
        for s in &sp.systems {
            let _ = writeln!(w, "| {} | {} | {} |", s.system, f3(s.average_rho), s.targets.len());
        }
    }

    let p = &report.published_reference;
    let _ = writeln!(w, "\n## Published reference values\n");
    let _ = writeln!(
        w,
        "For orientation only: CS WikiRef at k=1 P/R/F = {}/{}/{}, best baseline {} P@1 = {}; PH WikiRef P@1 = {}; average rho {} (WikiRef) vs {} (best baseline). {}\n",
        p.cs_wikiref_at_1.precision,
        p.cs_wikiref_at_1.recall,
        p.cs_wikiref_at_1.f_measure,
        p.cs_best_baseline,
        p.cs_best_baseline_precision_at_1,
        p.ph_wikiref_precision_at_1,
        p.average_rho_wikiref,
        p.average_rho_best_baseline,
        p.note
    );
    let _ = writeln!(
        w,
        "Version {}, seed {}, config {}, corpus {}.",
        stamp.artifact_version,
        stamp.master_seed,
        &stamp.config_sha256[..12.min(stamp.config_sha256.len())],
        &stamp.corpus_meta_sha256[..12.min(stamp.corpus_meta_sha256.len())]
    );
    md
}

/// Plain-text recommendation table.
pub fn recommendation_table(out: &RecommendationOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Recommendations for {}", out.target);
    if out.items.is_empty() {
        let _ = writeln!(s, "(none)");
        return s;
    }
    let _ = writeln!(s, "{:>4}  {:>8}  {:<24}  reference", "rank", "score", "from");
    for item in &out.items {
        let _ = writeln!(
            s,
            "{:>4}  {:>8.4}  {:<24}  {}",
            item.rank, item.score, item.source_wikilink, item.ref_title
        );
    }
    s
}
