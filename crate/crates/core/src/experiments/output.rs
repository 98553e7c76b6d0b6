//! Run directories, CSV tables, SVG plots and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Nine significant digits, shortest form, no trailing zeros.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "NA".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn fmt_opt_u64(x: Option<u64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt_float)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
    }
}

/// Log-log scatter of `(x, y)` points with an optional fitted line
/// `log y = intercept + slope log x` drawn over `fit_span`.
pub fn loglog_svg(
    points: &[(f64, f64)],
    fit: Option<(f64, f64)>,
    fit_span: Option<(f64, f64)>,
    x_label: &str,
    y_label: &str,
) -> String {
    const W: f64 = 800.0;
    const H: f64 = 600.0;
    const ML: f64 = 90.0;
    const MR: f64 = 30.0;
    const MT: f64 = 30.0;
    const MB: f64 = 70.0;

    let pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .collect();
    let (mut lx0, mut lx1, mut ly0, mut ly1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        lx0 = lx0.min(x.log10());
        lx1 = lx1.max(x.log10());
        ly0 = ly0.min(y.log10());
        ly1 = ly1.max(y.log10());
    }
    if pts.is_empty() {
        (lx0, lx1, ly0, ly1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (lx0, lx1) = (lx0.floor(), lx1.ceil().max(lx0.floor() + 1.0));
    let (ly0, ly1) = (ly0.floor(), ly1.ceil().max(ly0.floor() + 1.0));
    let sx = |lx: f64| ML + (lx - lx0) / (lx1 - lx0) * (W - ML - MR);
    let sy = |ly: f64| H - MB - (ly - ly0) / (ly1 - ly0) * (H - MT - MB);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    for d in (lx0 as i32)..=(lx1 as i32) {
        let x = sx(d as f64);
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>\n",
            MT,
            H - MB
        ));
        s.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">1e{d}</text>\n",
            H - MB + 20.0
        ));
    }
    for d in (ly0 as i32)..=(ly1 as i32) {
        let y = sy(d as f64);
        s.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>\n",
            W - MR
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"end\">1e{d}</text>\n",
            ML - 8.0,
            y + 5.0
        ));
    }
    if let (Some((slope, intercept)), Some((a, b))) = (fit, fit_span) {
        if a > 0.0 && b > 0.0 {
            let (la, lb) = (a.log10(), b.log10());
            let ya = intercept / std::f64::consts::LN_10 + slope * la;
            let yb = intercept / std::f64::consts::LN_10 + slope * lb;
            s.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"firebrick\" stroke-width=\"2\"/>\n",
                sx(la),
                sy(ya),
                sx(lb),
                sy(yb)
            ));
        }
    }
    for &(x, y) in &pts {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"steelblue\"/>\n",
            sx(x.log10()),
            sy(y.log10())
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"16\" text-anchor=\"middle\">{x_label}</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 20.0
    ));
    s.push_str(&format!(
        "<text x=\"24\" y=\"{:.2}\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 24 {:.2})\">{y_label}</text>\n",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0
    ));
    s.push_str("</svg>\n");
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub status: String,
    /// File name to SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// One run's output directory, `<out>/<command>-<seed>/`.
///
/// The manifest is written on creation and rewritten by [`RunDir::finish`].
/// Dropping an unfinished run removes the files it wrote.
#[derive(Debug)]
pub struct RunDir {
    path: PathBuf,
    manifest: RunManifest,
    written: Vec<PathBuf>,
    created_dir: bool,
    finished: bool,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl RunDir {
    pub fn create<C: Serialize>(out: &Path, command: &str, seed: u64, config: &C) -> Result<Self> {
        let path = out.join(format!("{command}-{seed}"));
        let created_dir = !path.exists();
        fs::create_dir_all(&path)?;
        let mut run = RunDir {
            path,
            manifest: RunManifest {
                command: command.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                config: serde_json::to_value(config)?,
                started_at: now(),
                finished_at: None,
                status: "running".to_string(),
                outputs: BTreeMap::new(),
            },
            written: Vec::new(),
            created_dir,
            finished: false,
        };
        run.write_manifest()?;
        Ok(run)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn write_manifest(&mut self) -> Result<()> {
        let target = self.path.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(&target, text)?;
        if !self.written.contains(&target) {
            self.written.push(target);
        }
        Ok(())
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let target = self.path.join(name);
        fs::write(&target, bytes)?;
        self.manifest.outputs.insert(name.to_string(), sha256_hex(bytes));
        if !self.written.contains(&target) {
            self.written.push(target.clone());
        }
        Ok(target)
    }

    pub fn write_csv(&mut self, name: &str, table: &CsvTable) -> Result<PathBuf> {
        let bytes = table.to_bytes()?;
        self.write_bytes(name, &bytes)
    }

    pub fn finish(mut self, status: &str) -> Result<PathBuf> {
        self.manifest.finished_at = Some(now());
        self.manifest.status = status.to_string();
        self.write_manifest()?;
        self.finished = true;
        Ok(self.path.clone())
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        if self.finished {
            return;
        }
        for f in &self.written {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.path);
        }
    }
}
