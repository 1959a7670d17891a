//! One function per subcommand. Each loads its inputs, runs the library and
//! returns an [`Outcome`]; nothing is written until [`Outcome::emit`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use stochdom_core::dominance::{self, catalyst_1d, default_grid_step, uniform_grid};
use stochdom_core::ldp::{cramer_empirical, rate_function, relative_rate_rhs, relative_rate_table};
use stochdom_core::spectrum::{spectral_verdict, Projected, SpectralReport, SpectralVerdict, SpectrumOptions};
use stochdom_core::stochorder;
use stochdom_core::{rational, Cone, Direction, Measure, Point, Rational};

use crate::cli::{Common, EXIT_INCONCLUSIVE, EXIT_OK};
use crate::files::{self, load_cone, load_measure};
use crate::output::{num, Table};
use crate::report;

pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub table: Option<Table>,
    /// Tables with their own destinations, e.g. a curve next to the main table.
    pub extra: Vec<(PathBuf, Table)>,
    pub exit: u8,
}

impl Outcome {
    pub fn emit(&self, common: &Common) -> Result<()> {
        let json = format!("{}\n", serde_json::to_string_pretty(&self.report)?);
        match common.json.as_deref() {
            Some(p) if p == Path::new("-") => print!("{json}"),
            Some(p) => {
                fs::write(p, &json).with_context(|| format!("cannot write {}", p.display()))?;
                print!("{}", self.summary);
            }
            None => print!("{}", self.summary),
        }
        if let (Some(path), Some(table)) = (&common.csv, &self.table) {
            table.write(path)?;
            if let Some(script) = &common.plot {
                table.write_plot(script, path)?;
            }
        }
        for (path, table) in &self.extra {
            table.write(path)?;
        }
        Ok(())
    }
}

fn spectrum_options(c: &Common) -> SpectrumOptions {
    SpectrumOptions {
        grid_points: c.grid_points,
        margin_tol: c.margin_tol,
        n_samples: c.samples,
        seed: c.seed,
        ..SpectrumOptions::default()
    }
}

fn cone_json(cone: &Cone) -> Value {
    json!({
        "rays": cone.rays().iter().map(report::point).collect::<Vec<_>>(),
        "normals": cone.normals().iter().map(report::point).collect::<Vec<_>>(),
        "unit": report::point(cone.unit()),
    })
}

fn load_pair(x: &Path, y: &Path, c: &Common) -> Result<(Measure, Measure, Cone)> {
    let mx = load_measure(x, c.normalize)?;
    let my = load_measure(y, c.normalize)?;
    if mx.dim() != my.dim() {
        bail!("X has dimension {} but Y has dimension {}", mx.dim(), my.dim());
    }
    let cone = load_cone(&c.cone, mx.dim())?;
    Ok((mx, my, cone))
}

fn load_single(mu: &Path, c: &Common) -> Result<(Measure, Cone)> {
    let m = load_measure(mu, c.normalize)?;
    let cone = load_cone(&c.cone, m.dim())?;
    Ok((m, cone))
}

fn pair_inputs(x: &Measure, y: &Measure, cone: &Cone, options: Value) -> Value {
    json!({"x": report::measure(x), "y": report::measure(y), "cone": cone_json(cone), "options": options})
}

fn spectral_options_json(c: &Common) -> Value {
    json!({"grid_points": c.grid_points, "margin_tol": report::float(c.margin_tol), "samples": c.samples})
}

fn coords(p: &Point) -> String {
    p.coords().iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn order_check(x: &Path, y: &Path, c: &Common) -> Result<Outcome> {
    let (mx, my, cone) = load_pair(x, y, c)?;
    let v = stochorder::decide(&mx, &my, &cone)?;
    let mut table = Table::new(vec!["from", "to", "w"]);
    let mut summary = String::new();
    if let Some(plan) = &v.witness_coupling {
        writeln!(summary, "X <= Y: yes; coupling with {} pairs", plan.entries.len())?;
        for ((a, b), w) in &plan.entries {
            table.push(vec![coords(a), coords(b), w.to_string()]);
        }
    } else if let Some(up) = &v.witness_upset {
        let gens: Vec<String> = up.iter().map(ToString::to_string).collect();
        writeln!(summary, "X <= Y: no; violating upset generated by {}", gens.join(", "))?;
    }
    Ok(Outcome {
        report: report::envelope("order-check", c.seed, pair_inputs(&mx, &my, &cone, json!({})), report::order(&v)),
        summary,
        table: Some(table),
        extra: Vec::new(),
        exit: EXIT_OK,
    })
}

fn spectrum_table(s: &SpectralReport) -> Table {
    let mut t = Table::new(vec!["ray", "theta", "radial", "lev_x", "lev_y", "margin"]).with_plot(2, vec![6], Some(1));
    for (i, ray) in s.rays.iter().enumerate() {
        for p in &ray.samples {
            t.push(vec![
                i.to_string(),
                num(p.theta),
                num(p.radial.as_f64()),
                num(p.lev_x),
                num(p.lev_y),
                num(p.margin()),
            ]);
        }
    }
    t
}

fn spectral_exit(v: SpectralVerdict) -> u8 {
    if v == SpectralVerdict::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn spectral_summary(s: &SpectralReport) -> String {
    let worst = s.rays.iter().map(|r| r.min_margin).fold(f64::INFINITY, f64::min);
    let mut out = format!(
        "spectral verdict: {} ({} directions, smallest margin {})\n",
        report::spectral_name(s.verdict),
        s.rays.len(),
        num(worst)
    );
    if s.sampled_only {
        out.push_str("note: the dual cone was sampled, not exhausted\n");
    }
    out
}

pub fn spectrum(x: &Path, y: &Path, c: &Common) -> Result<Outcome> {
    let (mx, my, cone) = load_pair(x, y, c)?;
    let s = spectral_verdict(&mx, &my, &cone, &spectrum_options(c))?;
    Ok(Outcome {
        report: report::envelope(
            "spectrum",
            c.seed,
            pair_inputs(&mx, &my, &cone, spectral_options_json(c)),
            report::spectral(&s),
        ),
        summary: spectral_summary(&s),
        table: Some(spectrum_table(&s)),
        extra: Vec::new(),
        exit: spectral_exit(s.verdict),
    })
}

pub fn dominate(x: &Path, y: &Path, n_max: u64, c: &Common) -> Result<Outcome> {
    let (mx, my, cone) = load_pair(x, y, c)?;
    let s = spectral_verdict(&mx, &my, &cone, &spectrum_options(c))?;
    let mut summary = spectral_summary(&s);
    let certificate = if matches!(s.verdict, SpectralVerdict::Strict | SpectralVerdict::NonStrictOnly) {
        let r = dominance::min_n(&mx, &my, &cone, n_max, c.cap)?;
        match r.n0 {
            Some(n0) => writeln!(summary, "X^(*n) <= Y^(*n) for every n in [{n0}, {n_max}]")?,
            None => writeln!(summary, "no stable n0 up to {n_max}")?,
        }
        Some(report::min_n(&r))
    } else {
        None
    };
    let mut options = spectral_options_json(c);
    options["n_max"] = json!(n_max);
    let mut result = report::spectral(&s);
    result["min_n"] = certificate.into();
    Ok(Outcome {
        report: report::envelope("dominate", c.seed, pair_inputs(&mx, &my, &cone, options), result),
        summary,
        table: Some(spectrum_table(&s)),
        extra: Vec::new(),
        exit: spectral_exit(s.verdict),
    })
}

pub fn min_n(x: &Path, y: &Path, n_max: u64, c: &Common) -> Result<Outcome> {
    let (mx, my, cone) = load_pair(x, y, c)?;
    let r = dominance::min_n(&mx, &my, &cone, n_max, c.cap)?;
    let mut table = Table::new(vec!["n", "dominated"]).with_plot(1, vec![2], None);
    for n in 1..=n_max {
        let failed = r.failures.iter().any(|f| f.0 == n);
        table.push(vec![n.to_string(), if failed { "0" } else { "1" }.into()]);
    }
    let summary = match r.n0 {
        Some(n0) => format!("found: n0 = {n0}, stable through {n_max}\n"),
        None => format!("not found: dominance is not stable below n_max = {n_max}\n"),
    };
    Ok(Outcome {
        report: report::envelope(
            "min-n",
            c.seed,
            pair_inputs(&mx, &my, &cone, json!({"n_max": n_max})),
            report::min_n(&r),
        ),
        summary,
        table: Some(table),
        extra: Vec::new(),
        exit: if r.found { EXIT_OK } else { EXIT_INCONCLUSIVE },
    })
}

pub fn catalyst(x: &Path, y: &Path, step: Option<&str>, max: Option<&str>, c: &Common) -> Result<Outcome> {
    let (mx, my, cone) = load_pair(x, y, c)?;
    if !cone.is_standard_halfline() {
        bail!("catalyst search needs one-dimensional measures on the half-line");
    }
    let step = match step {
        Some(s) => files::parse_number(s)?,
        None => default_grid_step(&mx, &my),
    };
    let max = match max {
        Some(m) => files::parse_number(m)?,
        None => {
            let (lx, hx) = mx.scalar_range().context("X is empty")?;
            let (ly, hy) = my.scalar_range().context("Y is empty")?;
            let width = hx.max(hy) - lx.min(ly);
            if width > Rational::from_integer(0.into()) {
                width
            } else {
                step.clone()
            }
        }
    };
    let grid = uniform_grid(&step, &max)?;
    let found = catalyst_1d(&mx, &my, &grid)?;
    let options =
        json!({"grid_step": report::rational(&step), "grid_max": report::rational(&max), "grid_size": grid.len()});
    let mut table = Table::new(vec!["z", "w"]);
    let (result, summary, exit) = match &found {
        Some(cat) => {
            for (p, w) in cat.z.iter() {
                table.push(vec![coords(p), w.to_string()]);
            }
            let mut r = report::catalyst(cat);
            r["found"] = json!(true);
            let s = format!(
                "catalyst found on {} grid points ({} atoms), verified: {}\n",
                grid.len(),
                cat.z.len(),
                cat.verified
            );
            (r, s, EXIT_OK)
        }
        None => (
            json!({"found": false, "note": "no catalyst supported on this grid; a finer or wider grid may still admit one"}),
            format!("no catalyst on the grid 0, {step}, ..., {max}\n"),
            EXIT_INCONCLUSIVE,
        ),
    };
    Ok(Outcome {
        report: report::envelope("catalyst", c.seed, pair_inputs(&mx, &my, &cone, options), result),
        summary,
        table: Some(table),
        extra: Vec::new(),
        exit,
    })
}

/// Samples `f` on `[0, reach]`; `reach` comes from a finite optimizer, if any.
fn curve<F: Fn(f64) -> f64>(columns: Vec<&'static str>, reach: Option<f64>, f: F) -> Table {
    let reach = reach.filter(|r| r.is_finite() && *r > 0.0).map_or(10.0, |r| 2.0 * r);
    let mut t = Table::new(columns).with_plot(1, vec![2], None);
    for k in 0..=200 {
        let r = reach * k as f64 / 200.0;
        t.push(vec![num(r), num(f(r))]);
    }
    t
}

fn first_direction(cone: &Cone) -> Result<Direction> {
    Ok(Direction::new(cone, cone.normals()[0].clone())?.normalized())
}

pub fn rate_fn(mu: &Path, c_text: &str, c: &Common) -> Result<Outcome> {
    let (m, cone) = load_single(mu, c)?;
    let point = files::parse_point(c_text)?;
    let r = rate_function(&m, &point, &cone)?;
    let (dir, reach) = match &r.maximizer {
        Some((d, s)) => (d.clone(), Some(*s)),
        None => (first_direction(&cone)?, None),
    };
    let p = Projected::new(&m, &dir)?;
    let tc = rational::to_f64(&dir.normalized().t.dot(&point));
    let table = curve(vec!["r", "g"], reach, |s| s * tc - p.log_mgf(s));
    let inputs = json!({"mu": report::measure(&m), "c": report::point(&point), "cone": cone_json(&cone)});
    Ok(Outcome {
        report: report::envelope("rate-fn", c.seed, inputs, report::rate(&r)),
        summary: format!("rate {:.6} ({})\n", r.value, report::certification(r.certified)),
        table: Some(table),
        extra: Vec::new(),
        exit: EXIT_OK,
    })
}

fn parse_list<T, F: Fn(&str) -> Result<T>>(text: &str, f: F) -> Result<Vec<T>> {
    text.split(',').map(|s| f(s.trim())).collect()
}

fn parse_ns(text: &str) -> Result<Vec<u64>> {
    let ns = parse_list(text, |s| s.parse::<u64>().with_context(|| format!("bad n {s:?}")))?;
    if ns.contains(&0) {
        bail!("every n must be at least 1");
    }
    Ok(ns)
}

pub fn rel_rate(
    x: &Path,
    y: &Path,
    n_text: &str,
    eps_text: &str,
    curve_out: Option<&Path>,
    c: &Common,
) -> Result<Outcome> {
    let (mx, my, cone) = load_pair(x, y, c)?;
    let ns = parse_ns(n_text)?;
    let epss = parse_list(eps_text, files::parse_number)?;
    let rhs = relative_rate_rhs(&mx, &my, &cone, &spectrum_options(c))?;
    let rows = relative_rate_table(&mx, &my, &cone, &ns, &epss, c.cap)?;
    let mut table = Table::new(vec!["n", "eps", "lhs", "spread", "exhaustive"]).with_plot(1, vec![3], Some(2));
    let mut summary = format!(
        "rhs {} ({})\n{:>6} {:>10} {:>12} {:>12}\n",
        num(rhs.value),
        report::certification(rhs.certified),
        "n",
        "eps",
        "lhs",
        "spread"
    );
    for v in &rows {
        let spread = (v.value - rhs.value).abs();
        table.push(vec![v.n.to_string(), v.eps.to_string(), num(v.value), num(spread), v.exhaustive.to_string()]);
        writeln!(summary, "{:>6} {:>10} {:>12.6} {:>12.6}", v.n, v.eps.to_string(), v.value, spread)?;
    }
    let mut extra = Vec::new();
    if let Some(path) = curve_out {
        let (dir, reach) = match &rhs.maximizer {
            Some((d, s)) => (d.clone(), Some(*s)),
            None => (first_direction(&cone)?, None),
        };
        let px = Projected::new(&mx, &dir)?;
        let py = Projected::new(&my, &dir)?;
        extra.push((path.to_path_buf(), curve(vec!["r", "g"], reach, |r| px.log_mgf(r) - py.log_mgf(r))));
    }
    let mut options = spectral_options_json(c);
    options["n"] = json!(ns);
    options["eps"] = Value::Array(epss.iter().map(report::rational).collect());
    let result = json!({"rhs": report::rate(&rhs), "table": rows.iter().map(report::lhs).collect::<Vec<_>>()});
    Ok(Outcome {
        report: report::envelope("rel-rate", c.seed, pair_inputs(&mx, &my, &cone, options), result),
        summary,
        table: Some(table),
        extra,
        exit: EXIT_OK,
    })
}

pub fn cramer(mu: &Path, c_text: &str, n_text: &str, c: &Common) -> Result<Outcome> {
    let (m, cone) = load_single(mu, c)?;
    let point = files::parse_point(c_text)?;
    let ns = parse_ns(n_text)?;
    let rate = rate_function(&m, &point, &cone)?;
    let empirical: Vec<f64> =
        ns.iter().map(|&n| cramer_empirical(&m, &point, &cone, n, c.cap)).collect::<stochdom_core::Result<_>>()?;
    let mut table = Table::new(vec!["n", "empirical", "neg_rate"]).with_plot(1, vec![2, 3], None);
    let mut summary =
        format!("rate {:.6} ({})\n{:>8} {:>12}\n", rate.value, report::certification(rate.certified), "n", "empirical");
    let mut rows = Vec::new();
    for (n, e) in ns.iter().zip(&empirical) {
        table.push(vec![n.to_string(), num(*e), num(-rate.value)]);
        writeln!(summary, "{n:>8} {e:>12.6}")?;
        rows.push(json!({"n": n, "empirical": report::float(*e), "gap": report::float(e + rate.value)}));
    }
    let inputs =
        json!({"mu": report::measure(&m), "c": report::point(&point), "cone": cone_json(&cone), "options": {"n": ns}});
    Ok(Outcome {
        report: report::envelope("cramer", c.seed, inputs, json!({"rate": report::rate(&rate), "empirical": rows})),
        summary,
        table: Some(table),
        extra: Vec::new(),
        exit: EXIT_OK,
    })
}
