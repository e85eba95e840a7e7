//! Gnuplot scripts for the CSV outputs of a run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::report::ReportSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotStyle {
    Lines,
    LogLog,
    LogY,
    /// Scattered `(x, y, value)` coloured by value.
    Heatmap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    /// 1-based CSV column.
    pub column: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub name: String,
    pub title: String,
    pub csv: String,
    pub style: PlotStyle,
    pub x_column: usize,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub annotation: Option<String>,
}

impl PlotSpec {
    pub fn new(name: &str, title: &str, csv: &str, style: PlotStyle, x: (usize, &str), y_label: &str) -> Self {
        PlotSpec {
            name: name.into(),
            title: title.into(),
            csv: csv.into(),
            style,
            x_column: x.0,
            x_label: x.1.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            annotation: None,
        }
    }

    pub fn series(mut self, column: usize, label: &str) -> Self {
        self.series.push(Series {
            column,
            label: label.into(),
        });
        self
    }

    pub fn annotate(mut self, text: impl Into<String>) -> Self {
        self.annotation = Some(text.into());
        self
    }

    pub fn script(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set terminal pngcairo size 900,600");
        let _ = writeln!(s, "set output '{}.png'", self.name);
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set title {}", quote(&self.title));
        let _ = writeln!(s, "set xlabel {}", quote(&self.x_label));
        let _ = writeln!(s, "set ylabel {}", quote(&self.y_label));
        let _ = writeln!(s, "set grid");
        match self.style {
            PlotStyle::LogLog => {
                let _ = writeln!(s, "set logscale xy");
                let _ = writeln!(s, "set format y '%.0e'");
            }
            PlotStyle::LogY => {
                let _ = writeln!(s, "set logscale y");
                let _ = writeln!(s, "set format y '%.0e'");
            }
            PlotStyle::Heatmap => {
                let _ = writeln!(s, "set palette rgbformulae 33,13,10");
            }
            PlotStyle::Lines => {}
        }
        if let Some(a) = &self.annotation {
            let _ = writeln!(s, "set label 1 {} at graph 0.05, graph 0.92", quote(a));
        }
        let x = self.x_column;
        let curves: Vec<String> = self
            .series
            .iter()
            .map(|c| match self.style {
                PlotStyle::Heatmap => format!(
                    "'{}' skip 1 using {x}:{}:{} with points pt 5 ps 0.6 palette title {}",
                    self.csv,
                    c.column,
                    c.column + 1,
                    quote(&c.label)
                ),
                _ => format!(
                    "'{}' skip 1 using {x}:{} with linespoints lw 2 title {}",
                    self.csv,
                    c.column,
                    quote(&c.label)
                ),
            })
            .collect();
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
        s
    }
}

fn quote(text: &str) -> String {
    format!("'{}'", text.replace('\'', "''"))
}

/// Writes one `<name>.gp` per plot of `summary` into `dir`, next to the CSVs
/// the scripts read.
pub fn emit_plots(summary: &ReportSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    if summary.plots.is_empty() {
        return Err(CliError::MissingInput(format!("summary {:?} lists no plots", summary.scenario)));
    }
    let mut written = Vec::with_capacity(summary.plots.len());
    for plot in &summary.plots {
        if !dir.join(&plot.csv).is_file() {
            return Err(CliError::MissingInput(format!(
                "plot {} reads {}, which does not exist in {}",
                plot.name,
                plot.csv,
                dir.display()
            )));
        }
        let path = dir.join(format!("{}.gp", plot.name));
        fs::write(&path, plot.script())?;
        written.push(path);
    }
    Ok(written)
}
