//! Report generation: a Markdown summary with per-policy scaling
//! histograms (binned exactly at the scenario's plateaus) and an
//! actual-vs-predicted calibration plot for the trained model.
//!
//! Generation is single-threaded and a pure function of the experiment
//! directory's contents, so rerunning it reproduces every file byte for
//! byte.

use crate::harness::{load_dir_config, read_results, ResultRow, MODEL_NAME, RESULTS_NAME};
use crate::manifest::Manifest;
use anyhow::{bail, ensure, Context, Result};
use safescale_core::learn::load_model;
use safescale_core::sim::build_training_set;
use safescale_core::sim::log::read_log_file;
use safescale_core::Vec3;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const REPORT_DIR: &str = "report";
const PLATEAU_TOL: f64 = 1e-9;
/// Scatter plots cap their point count so the SVG stays lightweight.
const MAX_SCATTER_POINTS: usize = 2000;

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub report_path: PathBuf,
    pub histogram_labels: Vec<String>,
    /// MSE of the calibration pairs, when a trained model was available.
    pub calibration_mse: Option<f64>,
}

/// One policy's scaling occupancy: fraction of logged samples per plateau.
struct Histogram {
    label: String,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    fn fraction(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }
}

/// Generate the report for an experiment directory.
pub fn report_cmd(out: &Path) -> Result<ReportSummary> {
    let mut manifest = Manifest::load(out)?;
    let rows = read_results(&out.join(RESULTS_NAME))?;
    ensure!(!rows.is_empty(), "empty results: run evaluate first");
    let cfg = load_dir_config(out)?;
    let plateaus = cfg.safety.values.clone();

    let report_dir = out.join(REPORT_DIR);
    std::fs::create_dir_all(&report_dir)?;
    let mut written: Vec<String> = Vec::new();

    // ── Scaling histograms, one per result row ────────────────────────────
    let mut histograms = Vec::with_capacity(rows.len());
    for row in &rows {
        let records = read_eval_logs(out, &manifest, &row.label)?;
        let mut counts = vec![0u64; plateaus.len()];
        for r in &records {
            counts[plateau_index(&plateaus, r.s, &row.label)?] += 1;
        }
        histograms.push(Histogram { label: row.label.clone(), counts, total: records.len() as u64 });
    }

    let mut hist_csv = String::from("label,plateau,count,fraction\n");
    for h in &histograms {
        for (i, &v) in plateaus.iter().enumerate() {
            let _ = writeln!(hist_csv, "{},{v},{},{}", h.label, h.counts[i], h.fraction(i));
        }
    }
    std::fs::write(report_dir.join("histograms.csv"), hist_csv)?;
    written.push("histograms.csv".into());

    for h in &histograms {
        let name = format!("histogram_{}.svg", h.label);
        std::fs::write(report_dir.join(&name), histogram_svg(h, &plateaus))?;
        written.push(name);
    }

    // ── Predictor calibration ─────────────────────────────────────────────
    let calibration = calibration_pairs(out, &manifest, &rows)?;
    let calibration_mse = match &calibration {
        Some((label, pairs)) => {
            let mut csv = String::from("actual,predicted\n");
            for (a, p) in pairs {
                let _ = writeln!(csv, "{a},{p}");
            }
            std::fs::write(report_dir.join("density.csv"), csv)?;
            std::fs::write(report_dir.join("density.svg"), density_svg(label, pairs))?;
            written.push("density.csv".into());
            written.push("density.svg".into());
            let mse =
                pairs.iter().map(|(a, p)| (a - p).powi(2)).sum::<f64>() / pairs.len() as f64;
            Some(mse)
        }
        None => None,
    };

    // ── Markdown summary ──────────────────────────────────────────────────
    let md = render_markdown(&rows, &histograms, &plateaus, &calibration, calibration_mse, &manifest);
    let report_path = report_dir.join("report.md");
    std::fs::write(&report_path, md)?;
    written.push("report.md".into());

    for name in &written {
        manifest.record_file(out, &format!("{REPORT_DIR}/{name}"))?;
    }
    manifest.save(out)?;

    Ok(ReportSummary {
        report_path,
        histogram_labels: histograms.into_iter().map(|h| h.label).collect(),
        calibration_mse,
    })
}

fn plateau_index(plateaus: &[f64], s: f64, label: &str) -> Result<usize> {
    match plateaus.iter().position(|&v| (v - s).abs() <= PLATEAU_TOL) {
        Some(i) => Ok(i),
        None => bail!(
            "evaluation log for {label} holds scaling value {s} that is on no plateau of the \
             directory's scenario"
        ),
    }
}

fn read_eval_logs(
    out: &Path,
    manifest: &Manifest,
    label: &str,
) -> Result<Vec<safescale_core::LogRecord>> {
    let prefix = format!("eval_logs/{label}/");
    let names: Vec<&String> = manifest.files.keys().filter(|k| k.starts_with(&prefix)).collect();
    ensure!(!names.is_empty(), "no evaluation logs for {label}: run evaluate first");
    let mut records = Vec::new();
    for rel in names {
        records.extend(
            read_log_file(&out.join(rel)).with_context(|| format!("reading {rel}"))?,
        );
    }
    Ok(records)
}

/// Build (actual, predicted) windowed-mean pairs for the trained model, if
/// the directory has one. The pairs come from the evaluation logs of the
/// first result row driven by that model, falling back to the collected
/// logs when no evaluation used it yet.
fn calibration_pairs(
    out: &Path,
    manifest: &Manifest,
    rows: &[ResultRow],
) -> Result<Option<(String, Vec<(f64, f64)>)>> {
    let entry = match manifest.models.get(MODEL_NAME) {
        Some(e) => e,
        None => return Ok(None),
    };
    let model = load_model(&out.join(MODEL_NAME))?;

    let (label, records) = match rows
        .iter()
        .find(|r| r.model_sha256.as_deref() == Some(entry.sha256.as_str()))
    {
        Some(row) => (row.label.clone(), read_eval_logs(out, manifest, &row.label)?),
        None => {
            let names: Vec<&String> =
                manifest.files.keys().filter(|k| k.starts_with("logs/")).collect();
            if names.is_empty() {
                return Ok(None);
            }
            let mut records = Vec::new();
            for rel in names {
                records.extend(read_log_file(&out.join(rel))?);
            }
            ("collected logs".to_string(), records)
        }
    };

    let rows = build_training_set(&records, entry.window)?;
    ensure!(
        !rows.is_empty(),
        "evaluation episodes are shorter than the model's prediction window"
    );
    let mut pairs = Vec::with_capacity(rows.len());
    for r in &rows {
        let f = &r.features;
        let predicted = model.predict(
            Vec3::new(f[0], f[1], f[2]),
            Vec3::new(f[3], f[4], f[5]),
            Vec3::new(f[6], f[7], f[8]),
            Vec3::new(f[9], f[10], f[11]),
        )?;
        pairs.push((r.target, predicted));
    }
    Ok(Some((label, pairs)))
}

fn render_markdown(
    rows: &[ResultRow],
    histograms: &[Histogram],
    plateaus: &[f64],
    calibration: &Option<(String, Vec<(f64, f64)>)>,
    calibration_mse: Option<f64>,
    manifest: &Manifest,
) -> String {
    let mut md = String::new();
    md.push_str("# Experiment report\n\n");
    if let Some(cfg_hash) = &manifest.config_sha256 {
        let _ = writeln!(
            md,
            "Scenario config `{}…` ({} digests in `manifest.json`).\n",
            &cfg_hash[..12],
            manifest.hash_algorithm
        );
    }

    md.push_str("## Policy comparison\n\n");
    md.push_str("| label | policy | episodes | tasks | mean exec time (s) | std (s) | mean scaling | seed |\n");
    md.push_str("|---|---|---:|---:|---:|---:|---:|---:|\n");
    for r in rows {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {:.4} | {:.4} | {:.4} | {} |",
            r.label, r.policy, r.episodes, r.tasks, r.mean_exec_time, r.std_exec_time,
            r.mean_scaling, r.seed
        );
    }
    md.push('\n');
    md.push_str(
        "Execution time runs from the decision instant to action completion; \
         mean scaling is the time-weighted mean of the logged scaling over the whole run.\n\n",
    );

    md.push_str("## Scaling occupancy\n\n");
    md.push_str("Bins are exactly the scenario's scaling plateaus.\n\n");
    md.push_str("| label |");
    for v in plateaus {
        let _ = write!(md, " s={v} |");
    }
    md.push('\n');
    md.push_str("|---|");
    md.push_str(&"---:|".repeat(plateaus.len()));
    md.push('\n');
    for h in histograms {
        let _ = write!(md, "| {} |", h.label);
        for i in 0..plateaus.len() {
            let _ = write!(md, " {:.4} |", h.fraction(i));
        }
        md.push('\n');
    }
    md.push('\n');
    for h in histograms {
        let _ = writeln!(md, "![{}](histogram_{}.svg)", h.label, h.label);
    }
    md.push('\n');

    md.push_str("## Predictor calibration\n\n");
    match calibration {
        Some((label, pairs)) => {
            let _ = writeln!(
                md,
                "Actual vs predicted windowed mean scaling over {} ({} pairs), \
                 MSE {:.6}: [`density.csv`](density.csv)\n",
                label,
                pairs.len(),
                calibration_mse.unwrap_or(f64::NAN)
            );
            md.push_str("![calibration](density.svg)\n");
        }
        None => md.push_str("No trained model in this directory; calibration omitted.\n"),
    }
    md
}

// ──────────────────────────────────────────────────────────────────────────
// Hand-rolled SVG plots
// ──────────────────────────────────────────────────────────────────────────
//
// All coordinates are written with fixed precision so regeneration is
// byte-stable.

fn histogram_svg(h: &Histogram, plateaus: &[f64]) -> String {
    let (w, ht) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (56.0, 16.0, 40.0, 48.0);
    let plot_w = w - ml - mr;
    let plot_h = ht - mt - mb;
    let n = plateaus.len() as f64;
    let slot = plot_w / n;
    let bar_w = slot * 0.7;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{ht}" viewBox="0 0 {w} {ht}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{ht}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">Scaling occupancy: {}</text>"#,
        ml + plot_w / 2.0,
        h.label
    );

    for grid in 0..=4 {
        let frac = grid as f64 * 0.25;
        let y = mt + plot_h * (1.0 - frac);
        let _ = writeln!(
            s,
            r##"<line x1="{ml:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            ml + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{frac:.2}</text>"#,
            ml - 6.0,
            y + 4.0
        );
    }

    for (i, &v) in plateaus.iter().enumerate() {
        let frac = h.fraction(i);
        let x = ml + slot * i as f64 + (slot - bar_w) / 2.0;
        let bh = plot_h * frac;
        let y = mt + plot_h - bh;
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{bh:.2}" fill="#4878a8"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#,
            x + bar_w / 2.0,
            mt + plot_h + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{frac:.4}</text>"#,
            x + bar_w / 2.0,
            y - 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">scaling plateau</text>"#,
        ml + plot_w / 2.0,
        ht - 10.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ml:.2}" y1="{mt:.2}" x2="{ml:.2}" y2="{:.2}" stroke="black"/>"#,
        mt + plot_h
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ml:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        mt + plot_h,
        ml + plot_w,
        mt + plot_h
    );
    s.push_str("</svg>\n");
    s
}

fn density_svg(label: &str, pairs: &[(f64, f64)]) -> String {
    let (w, ht) = (480.0, 480.0);
    let (ml, mr, mt, mb) = (56.0, 16.0, 40.0, 48.0);
    let plot_w = w - ml - mr;
    let plot_h = ht - mt - mb;
    let to_x = |v: f64| ml + plot_w * v.clamp(0.0, 1.0);
    let to_y = |v: f64| mt + plot_h * (1.0 - v.clamp(0.0, 1.0));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{ht}" viewBox="0 0 {w} {ht}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{ht}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">Actual vs predicted ({label})</text>"#,
        ml + plot_w / 2.0
    );
    for grid in 0..=4 {
        let frac = grid as f64 * 0.25;
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{mt:.2}" x2="{:.2}" y2="{:.2}" stroke="#eee"/>"##,
            to_x(frac),
            to_x(frac),
            mt + plot_h
        );
        let _ = writeln!(
            s,
            r##"<line x1="{ml:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#eee"/>"##,
            to_y(frac),
            ml + plot_w,
            to_y(frac)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{frac:.2}</text>"#,
            to_x(frac),
            mt + plot_h + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{frac:.2}</text>"#,
            ml - 6.0,
            to_y(frac) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c44" stroke-dasharray="5 4"/>"##,
        to_x(0.0),
        to_y(0.0),
        to_x(1.0),
        to_y(1.0)
    );

    let stride = pairs.len().div_ceil(MAX_SCATTER_POINTS).max(1);
    for (a, p) in pairs.iter().step_by(stride) {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2" fill="#4878a8" fill-opacity="0.35"/>"##,
            to_x(*a),
            to_y(*p)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">actual windowed mean</text>"#,
        ml + plot_w / 2.0,
        ht - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">predicted</text>"#,
        mt + plot_h / 2.0,
        mt + plot_h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(label: &str, counts: Vec<u64>) -> Histogram {
        let total = counts.iter().sum();
        Histogram { label: label.into(), counts, total }
    }

    #[test]
    fn plateau_lookup_matches_exact_values_only() {
        let plateaus = [0.0, 0.25, 0.5, 0.75, 1.0];
        assert_eq!(plateau_index(&plateaus, 0.25, "x").unwrap(), 1);
        assert_eq!(plateau_index(&plateaus, 0.25 + 1e-12, "x").unwrap(), 1);
        assert!(plateau_index(&plateaus, 0.3, "x").is_err());
    }

    #[test]
    fn svg_rendering_is_deterministic() {
        let h = hist("greedy", vec![1, 2, 3, 4, 10]);
        let plateaus = [0.0, 0.25, 0.5, 0.75, 1.0];
        let a = histogram_svg(&h, &plateaus);
        let b = histogram_svg(&h, &plateaus);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));

        let pairs: Vec<(f64, f64)> =
            (0..5000).map(|i| (i as f64 / 4999.0, 1.0 - i as f64 / 4999.0)).collect();
        let d1 = density_svg("greedy", &pairs);
        let d2 = density_svg("greedy", &pairs);
        assert_eq!(d1, d2);
        // Point count stays bounded regardless of the pair count.
        assert!(d1.matches("<circle").count() <= MAX_SCATTER_POINTS);
    }

    #[test]
    fn markdown_lists_every_row_and_label() {
        let rows = vec![ResultRow {
            label: "greedy".into(),
            policy: "greedy".into(),
            episodes: 4,
            tasks: 32,
            mean_exec_time: 3.25,
            std_exec_time: 0.5,
            mean_scaling: 0.75,
            seed: 7,
            config_sha256: "ab".into(),
            model_sha256: Some("cd".into()),
        }];
        let hists = vec![hist("greedy", vec![0, 0, 1, 1, 2])];
        let plateaus = [0.0, 0.25, 0.5, 0.75, 1.0];
        let md = render_markdown(&rows, &hists, &plateaus, &None, None, &Manifest::default());
        assert!(md.contains("| greedy | greedy | 4 | 32 |"));
        assert!(md.contains("histogram_greedy.svg"));
        assert!(md.contains("calibration omitted"));
    }
}
