use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::{aggregate, AggregateRow, GameplayStats, RunRecord};
use crate::stats::GenerationStats;

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

pub fn run_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best,mean,worst,stuck_cumulative,solved,elapsed_wall\n");
    for s in history {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.generation,
            s.best_fitness,
            s.mean_fitness,
            s.worst_fitness,
            s.stuck_events_cumulative,
            s.solved,
            s.elapsed_wall
        );
    }
    out
}

pub fn summary_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("generation,best,mean,worst\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.generation, r.best, r.mean, r.worst);
    }
    out
}

pub fn stats_csv(rows: &[(&RunRecord, GameplayStats)]) -> String {
    let mut out = String::from(
        "seed,algorithm,solved,fitness,distance,time_taken,coins,deaths,jumps,right_moves,left_moves,moves_used,mutations_performed,time_to_best\n",
    );
    for (r, s) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.algorithm.label(),
            r.solved,
            r.fitness,
            s.distance,
            s.time_taken,
            s.coins,
            s.deaths,
            s.jumps,
            s.right_moves,
            s.left_moves,
            s.moves_used,
            s.mutations_performed,
            s.time_to_best
        );
    }
    out
}

/// Line chart of best, mean and worst fitness against generation.
pub fn fitness_svg(rows: &[AggregateRow], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);

    let values = rows.iter().flat_map(|r| [r.best, r.mean, r.worst]).filter(|v| v.is_finite());
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    let last = rows.len().saturating_sub(1).max(1) as f64;
    let x = |g: usize| LEFT + pw * g as f64 / last;
    let y = |v: f64| TOP + ph * (1.0 - (v - lo) / (hi - lo));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT} {TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.1}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0,
            v
        );
        let g = (last * k as f64 / 4.0).round() as usize;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{g}</text>"#, x(g), TOP + ph + 18.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">generation</text>"#, LEFT + pw / 2.0, H - 8.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">fitness</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    type Series = (&'static str, &'static str, fn(&AggregateRow) -> f64);
    let series: [Series; 3] = [
        ("best", "#1b7837", |r| r.best),
        ("mean", "#2166ac", |r| r.mean),
        ("worst", "#b2182b", |r| r.worst),
    ];
    for (k, (name, color, get)) in series.iter().enumerate() {
        let points: Vec<String> = rows.iter().map(|r| format!("{:.2},{:.2}", x(r.generation), y(get(r)))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline id="{name}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            LEFT + pw - 90.0,
            LEFT + pw - 70.0,
            LEFT + pw - 64.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One row of the side-by-side comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub algorithm: String,
    pub success_rate: f64,
    pub mean_best_fitness: f64,
    /// Mean over folds of generations bred after the initial population.
    pub generations: f64,
    pub wall_seconds: f64,
}

impl CompareRow {
    pub fn from_records(algorithm: &str, records: &[RunRecord], wall_seconds: f64) -> Self {
        let k = records.len().max(1) as f64;
        CompareRow {
            algorithm: algorithm.to_string(),
            success_rate: super::success_rate(records),
            mean_best_fitness: records.iter().map(|r| r.fitness).sum::<f64>() / k,
            generations: records.iter().map(|r| r.generations_executed() as f64).sum::<f64>() / k,
            wall_seconds,
        }
    }

    pub fn csv(rows: &[CompareRow]) -> String {
        let mut out = String::from("algorithm,success_rate,mean_best_fitness,generations,wall_seconds\n");
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.3}",
                r.algorithm, r.success_rate, r.mean_best_fitness, r.generations, r.wall_seconds
            );
        }
        out
    }
}

/// Writes `run_<seed>.csv` and `best_<seed>.replay` per fold, plus
/// `summary.csv`, `stats.csv` and `fitness.svg`. Returns the written paths.
pub fn emit_outputs(
    records: &[RunRecord],
    stats: &[GameplayStats],
    dir: &Path,
    title: &str,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> io::Result<()> {
        let path = dir.join(name);
        write_atomic(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    for r in records {
        put(format!("run_{}.csv", r.seed), run_csv(&r.history))?;
        put(format!("best_{}.replay", r.seed), r.replay.to_text())?;
    }
    let rows = aggregate(records);
    put("summary.csv".into(), summary_csv(&rows))?;
    let paired: Vec<(&RunRecord, GameplayStats)> = records.iter().zip(stats.iter().cloned()).collect();
    put("stats.csv".into(), stats_csv(&paired))?;
    put("fitness.svg".into(), fitness_svg(&rows, title))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_csv_has_one_row_per_generation() {
        let history: Vec<GenerationStats> =
            (0..4).map(|g| GenerationStats::from_fitnesses(g, &[g as f64, 0.5], g, false, 0.0)).collect();
        let csv = run_csv(&history);
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(csv.lines().nth(1), Some("0,0.5,0.25,0,0,false,0"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn svg_has_three_series() {
        let rows: Vec<AggregateRow> = (0..5)
            .map(|g| AggregateRow { generation: g, best: g as f64, mean: g as f64 / 2.0, worst: -1.0 })
            .collect();
        let svg = fitness_svg(&rows, "a < b");
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains(">generation<") && svg.contains(">fitness<"));
        assert_eq!(svg, fitness_svg(&rows, "a < b"));
        // A single constant point still renders without NaN.
        let flat = fitness_svg(&rows[..1], "x");
        assert!(!flat.contains("NaN"));
    }
}
