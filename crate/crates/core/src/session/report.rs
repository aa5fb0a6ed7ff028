//! Study report: four SVG charts and, for each, a CSV table holding exactly
//! the numbers drawn on it.
//!
//! | chart                    | kind          | table columns                              |
//! |--------------------------|---------------|--------------------------------------------|
//! | `avg_response_time`      | bar           | participant_id, mean_response_time_s       |
//! | `response_by_trial`      | line          | participant_id, trial_no, response_time_s  |
//! | `correct_incorrect`      | stacked bar   | participant_id, n_correct, n_incorrect     |
//! | `accuracy_pct`           | bar           | participant_id, accuracy_pct               |
//!
//! Numeric labels in the charts are the same strings as in the tables. The
//! SVGs use only the generic `sans-serif` family.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::log::write_atomic;
use super::{fmt3, SessionError, StudySummary};

pub const REPORT_FILES: [&str; 4] = [
    "avg_response_time",
    "response_by_trial",
    "correct_incorrect",
    "accuracy_pct",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];
const CORRECT_COLOR: &str = "#4caf50";
const INCORRECT_COLOR: &str = "#e53935";

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        let mut svg = Self { body: String::new() };
        svg.rect(0.0, 0.0, WIDTH, HEIGHT, "#ffffff");
        svg.text(WIDTH / 2.0, 28.0, 16.0, "middle", title);
        svg.text(LEFT + plot_w() / 2.0, HEIGHT - 15.0, 12.0, "middle", x_label);
        let _ = writeln!(
            svg.body,
            r#"<text x="18" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            TOP + plot_h() / 2.0,
            TOP + plot_h() / 2.0,
            escape(y_label)
        );
        svg.line(LEFT, TOP, LEFT, TOP + plot_h(), "#333333", "");
        svg.line(LEFT, TOP + plot_h(), LEFT + plot_w(), TOP + plot_h(), "#333333", "");
        svg
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="{fill}"/>"#
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, dash: &str) {
        let dash = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{stroke}"{dash}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    fn legend(&mut self, row: usize, color: &str, label: &str) {
        let x = WIDTH - RIGHT + 20.0;
        let y = TOP + 10.0 + row as f64 * 20.0;
        self.rect(x, y - 9.0, 12.0, 12.0, color);
        self.text(x + 18.0, y + 1.0, 12.0, "start", label);
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n{}</svg>\n",
            self.body
        )
    }
}

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

/// Bar centres and width for `n` categories.
fn slots(n: usize) -> (Vec<f64>, f64) {
    let slot = plot_w() / n.max(1) as f64;
    ((0..n).map(|i| LEFT + slot * (i as f64 + 0.5)).collect(), slot * 0.6)
}

fn y_of(value: f64, max: f64) -> f64 {
    TOP + plot_h() * (1.0 - value / max)
}

fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64, String)], max: f64) -> String {
    let mut svg = Svg::new(title, "Participant", y_label);
    let (centres, width) = slots(bars.len());
    for (i, ((label, value, text), x)) in bars.iter().zip(centres).enumerate() {
        let y = y_of(*value, max);
        svg.rect(
            x - width / 2.0,
            y,
            width,
            TOP + plot_h() - y,
            PALETTE[i % PALETTE.len()],
        );
        svg.text(x, y - 6.0, 11.0, "middle", text);
        svg.text(x, TOP + plot_h() + 18.0, 12.0, "middle", label);
    }
    svg.finish()
}

struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            rows: vec![header.iter().map(|s| s.to_string()).collect()],
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>, SessionError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for row in &self.rows {
            w.write_record(row)
                .map_err(|e| SessionError::IoFailure(std::io::Error::other(e)))?;
        }
        w.into_inner().map_err(|e| SessionError::IoFailure(e.into_error()))
    }
}

fn avg_response_time(summary: &StudySummary) -> (String, Table) {
    let mut table = Table::new(&["participant_id", "mean_response_time_s"]);
    let bars: Vec<_> = summary
        .participants
        .iter()
        .map(|p| {
            let text = fmt3(p.mean_response_time_s);
            table.push(vec![p.participant_id.clone(), text.clone()]);
            (p.participant_id.clone(), p.mean_response_time_s, text)
        })
        .collect();
    let max = bars.iter().map(|b| b.1).fold(0.0, f64::max).max(1e-9) * 1.15;
    let svg = bar_chart(
        "Average Response Time per Participant",
        "Mean response time (s)",
        &bars,
        max,
    );
    (svg, table)
}

fn response_by_trial(summary: &StudySummary) -> (String, Table) {
    let mut table = Table::new(&["participant_id", "trial_no", "response_time_s"]);
    let mut svg = Svg::new(
        "Response Time by Trial Number per Participant",
        "Trial number",
        "Response time (s)",
    );

    let values: Vec<f64> = summary.response_by_trial.iter().flatten().flatten().copied().collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.1).max(0.5);
    let (lo, hi) = (lo - pad, hi + pad);
    let y = |v: f64| TOP + plot_h() * (1.0 - (v - lo) / (hi - lo));

    let (xs, _) = slots(summary.trial_numbers.len());
    for (x, n) in xs.iter().zip(&summary.trial_numbers) {
        svg.text(*x, TOP + plot_h() + 18.0, 12.0, "middle", &n.to_string());
    }
    for (i, (p, times)) in summary.participants.iter().zip(&summary.response_by_trial).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for ((x, n), t) in xs.iter().zip(&summary.trial_numbers).zip(times) {
            let Some(t) = t else { continue };
            let text = fmt3(*t);
            table.push(vec![p.participant_id.clone(), n.to_string(), text.clone()]);
            let _ = write!(points, "{x:.1},{:.1} ", y(*t));
            let _ = writeln!(
                svg.body,
                r#"<circle cx="{x:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                y(*t)
            );
            svg.text(*x + 4.0, y(*t) - 4.0, 7.0, "start", &text);
        }
        let _ = writeln!(
            svg.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.trim_end()
        );
        svg.legend(i, color, &p.participant_id);
    }
    (svg.finish(), table)
}

fn correct_incorrect(summary: &StudySummary) -> (String, Table) {
    let mut table = Table::new(&["participant_id", "n_correct", "n_incorrect"]);
    let mut svg = Svg::new(
        "Correct vs Incorrect Responses per Participant",
        "Participant",
        "Trials",
    );
    let max = summary
        .participants
        .iter()
        .map(|p| p.n_trials)
        .max()
        .unwrap_or(1)
        .max(1) as f64
        * 1.1;
    let (centres, width) = slots(summary.participants.len());
    for (p, x) in summary.participants.iter().zip(centres) {
        table.push(vec![
            p.participant_id.clone(),
            p.n_correct.to_string(),
            p.n_incorrect.to_string(),
        ]);
        let base = TOP + plot_h();
        let y_correct = y_of(p.n_correct as f64, max);
        let y_total = y_of((p.n_correct + p.n_incorrect) as f64, max);
        svg.rect(x - width / 2.0, y_correct, width, base - y_correct, CORRECT_COLOR);
        svg.rect(x - width / 2.0, y_total, width, y_correct - y_total, INCORRECT_COLOR);
        if p.n_correct > 0 {
            svg.text(
                x,
                (y_correct + base) / 2.0 + 4.0,
                12.0,
                "middle",
                &p.n_correct.to_string(),
            );
        }
        if p.n_incorrect > 0 {
            svg.text(
                x,
                (y_total + y_correct) / 2.0 + 4.0,
                12.0,
                "middle",
                &p.n_incorrect.to_string(),
            );
        }
        svg.text(x, base + 18.0, 12.0, "middle", &p.participant_id);
    }
    svg.legend(0, CORRECT_COLOR, "Correct");
    svg.legend(1, INCORRECT_COLOR, "Incorrect");
    (svg.finish(), table)
}

fn accuracy_pct(summary: &StudySummary) -> (String, Table) {
    let mut table = Table::new(&["participant_id", "accuracy_pct"]);
    let bars: Vec<_> = summary
        .participants
        .iter()
        .map(|p| {
            let text = fmt3(p.accuracy_pct);
            table.push(vec![p.participant_id.clone(), text.clone()]);
            (p.participant_id.clone(), p.accuracy_pct, format!("{text}%"))
        })
        .collect();
    let overall = fmt3(summary.overall_accuracy_pct);
    table.push(vec!["overall".into(), overall.clone()]);

    let mut svg = bar_chart("Accuracy Percentage per Participant", "Accuracy (%)", &bars, 110.0);
    // Overall reference line, spliced in before the closing tag.
    let y = y_of(summary.overall_accuracy_pct, 110.0);
    let mut extra = Svg { body: String::new() };
    extra.line(LEFT, y, LEFT + plot_w(), y, "#333333", "6 4");
    extra.text(
        LEFT + plot_w() + 6.0,
        y + 4.0,
        11.0,
        "start",
        &format!("overall {overall}%"),
    );
    svg.insert_str(svg.len() - "</svg>\n".len(), &extra.body);
    (svg, table)
}

/// Writes the four charts and their tables into `out_dir`, returning the
/// paths written.
pub fn emit_report(summary: &StudySummary, out_dir: &Path) -> Result<Vec<PathBuf>, SessionError> {
    if summary.participants.is_empty() {
        return Err(SessionError::EmptyStudy);
    }
    std::fs::create_dir_all(out_dir)?;
    let charts = [
        avg_response_time(summary),
        response_by_trial(summary),
        correct_incorrect(summary),
        accuracy_pct(summary),
    ];
    let mut written = Vec::new();
    for (name, (svg, table)) in REPORT_FILES.iter().zip(charts) {
        let svg_path = out_dir.join(format!("{name}.svg"));
        let csv_path = out_dir.join(format!("{name}.csv"));
        write_atomic(&svg_path, svg.as_bytes())?;
        write_atomic(&csv_path, &table.to_csv()?)?;
        written.push(svg_path);
        written.push(csv_path);
    }
    Ok(written)
}
