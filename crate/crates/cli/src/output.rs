//! CSV tables and companion gnuplot scripts.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// A CSV table with fixed column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Columns plotted against each other by the gnuplot script, 1-based.
    pub plot: Option<PlotSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub x: usize,
    pub ys: Vec<usize>,
    /// Column whose distinct values start separate curves.
    pub group: Option<usize>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new(), plot: None }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_plot(mut self, x: usize, ys: Vec<usize>, group: Option<usize>) -> Self {
        self.plot = Some(PlotSpec { x, ys, group });
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// A gnuplot script drawing the table stored at `csv_path`.
    pub fn gnuplot(&self, csv_path: &Path) -> String {
        let layout = self.plot.clone().unwrap_or(PlotSpec { x: 1, ys: (2..=self.columns.len()).collect(), group: None });
        let file = csv_path.display().to_string().replace('\'', "''");
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str("set key autotitle columnhead\n");
        s.push_str(&format!("set xlabel '{}'\n", self.columns[layout.x - 1]));
        s.push_str("set grid\n");
        let plots: Vec<String> = layout
            .ys
            .iter()
            .map(|&y| match layout.group {
                // Blank lines between groups are not in the CSV, so filter by group value.
                Some(g) => format!(
                    "for [k in groups] '{file}' using {}:(strcol({g}) eq k ? ${y} : NaN) with lines title sprintf('{} (%s)', k)",
                    layout.x,
                    self.columns[y - 1]
                ),
                None => format!("'{file}' using {}:{y} with lines", layout.x),
            })
            .collect();
        if let Some(g) = layout.group {
            let mut groups: Vec<&str> = self.rows.iter().map(|r| r[g - 1].as_str()).collect();
            groups.dedup();
            s.push_str(&format!("groups = \"{}\"\n", groups.join(" ")));
            s.push_str("set datafile missing NaN\n");
        }
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        s
    }

    pub fn write_plot(&self, script: &Path, csv_path: &Path) -> Result<()> {
        fs::write(script, self.gnuplot(csv_path)).with_context(|| format!("cannot write {}", script.display()))
    }
}

/// Shortest round-trip text of a float, with `inf`, `-inf` and `nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}
