//! Report payloads for the four commands, rendered as table, CSV, or JSON.
//!
//! Every scalar printed in table/CSV form goes through `sig`, so identical
//! runs serialize to identical bytes in every format.

use std::fs;
use std::path::PathBuf;

use localmean::feq::DerivedConstants;
use serde::{Deserialize, Serialize};

use crate::{Failure, OutputFormat};

/// Folds −0.0 into +0.0 so sign-flipped derivations of a zero constant
/// serialize identically everywhere.
pub fn zclean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub fn sig(v: f64) -> String {
    format!("{:.16e}", zclean(v))
}

fn opt_sig(v: Option<f64>) -> String {
    v.map(sig).unwrap_or_default()
}

pub fn pair(z: localmean::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Commas would break the row grammar; notes fold them away.
fn csv_text(s: &str) -> String {
    s.replace(',', ";")
}

/// Run header shared by every command: the derived constants of the
/// functional equation plus the run-shaping inputs.
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Meta {
    pub command: String,
    pub instance: String,
    pub seed: u64,
    pub delta: f64,
    pub big_a: f64,
    pub h: f64,
    pub e0: [f64; 2],
    pub omega: [f64; 2],
    pub theta: f64,
    pub xi: f64,
    pub kappa: f64,
    pub eta: f64,
    pub sigma_star: f64,
    pub sigma0: f64,
    pub coefficient_warnings: Vec<String>,
}

impl Meta {
    pub fn new(
        command: &str,
        instance: &str,
        consts: &DerivedConstants,
        seed: u64,
        delta: f64,
    ) -> Self {
        Meta {
            command: command.to_string(),
            instance: instance.to_string(),
            seed,
            delta,
            big_a: consts.big_a,
            h: consts.h,
            e0: pair(consts.e0),
            omega: pair(consts.omega),
            theta: zclean(consts.theta()),
            xi: zclean(consts.xi()),
            kappa: zclean(consts.kappa()),
            eta: zclean(consts.eta()),
            sigma_star: consts.sigma_star,
            sigma0: consts.sigma0(),
            coefficient_warnings: Vec::new(),
        }
    }

    fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("command".into(), self.command.clone()),
            ("instance".into(), self.instance.clone()),
            ("seed".into(), self.seed.to_string()),
            ("delta".into(), sig(self.delta)),
            ("bigA".into(), sig(self.big_a)),
            ("h".into(), sig(self.h)),
            ("e0Re".into(), sig(self.e0[0])),
            ("e0Im".into(), sig(self.e0[1])),
            ("omegaRe".into(), sig(self.omega[0])),
            ("omegaIm".into(), sig(self.omega[1])),
            ("theta".into(), sig(self.theta)),
            ("xi".into(), sig(self.xi)),
            ("kappa".into(), sig(self.kappa)),
            ("eta".into(), sig(self.eta)),
            ("sigmaStar".into(), sig(self.sigma_star)),
            ("sigma0".into(), sig(self.sigma0)),
        ];
        for (i, w) in self.coefficient_warnings.iter().enumerate() {
            out.push((format!("warning{i}"), w.clone()));
        }
        out
    }
}

pub trait Render: Serialize {
    fn table(&self) -> String;
    fn csv(&self) -> String;
}

/// Serializes `report` in the requested format to stdout or `--out`.
pub fn emit<R: Render>(
    report: &R,
    format: OutputFormat,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let body = match format {
        OutputFormat::Table => report.table(),
        OutputFormat::Csv => report.csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Failure::new(4, format!("serialization: {e}")))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::new(3, format!("output file {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn table_header(meta: &Meta) -> String {
    let mut s = String::new();
    for (k, v) in meta.lines() {
        s.push_str(&format!("{k:<18} {v}\n"));
    }
    s
}

fn csv_header(meta: &Meta) -> String {
    let mut s = String::new();
    for (k, v) in meta.lines() {
        s.push_str(&format!("# {k} = {}\n", csv_text(&v)));
    }
    s
}

fn csv_row(cells: &[String]) -> String {
    let mut s = cells.join(",");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- constants

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantsReport {
    pub meta: Meta,
    pub factor_count: usize,
    pub b: [f64; 2],
    pub b_tilde: [f64; 2],
    pub a: [f64; 2],
    pub k: [f64; 2],
    pub theta_ladder: Vec<f64>,
    pub expansion_order: usize,
    pub expansion: Vec<[f64; 2]>,
    pub fit_diagnostics: Vec<f64>,
}

impl ConstantsReport {
    fn value_rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("factorCount".into(), self.factor_count.to_string()),
            ("bRe".into(), sig(self.b[0])),
            ("bIm".into(), sig(self.b[1])),
            ("bTildeRe".into(), sig(self.b_tilde[0])),
            ("bTildeIm".into(), sig(self.b_tilde[1])),
            ("aRe".into(), sig(self.a[0])),
            ("aIm".into(), sig(self.a[1])),
            ("kRe".into(), sig(self.k[0])),
            ("kIm".into(), sig(self.k[1])),
            ("expansionOrder".into(), self.expansion_order.to_string()),
        ];
        for (j, t) in self.theta_ladder.iter().enumerate() {
            rows.push((format!("theta{j}"), sig(*t)));
        }
        for (j, e) in self.expansion.iter().enumerate() {
            rows.push((format!("expansion{j}Re"), sig(e[0])));
            rows.push((format!("expansion{j}Im"), sig(e[1])));
        }
        for (j, f) in self.fit_diagnostics.iter().enumerate() {
            rows.push((format!("fit{j}"), sig(*f)));
        }
        rows
    }
}

impl Render for ConstantsReport {
    fn table(&self) -> String {
        let mut s = table_header(&self.meta);
        for (k, v) in self.value_rows() {
            s.push_str(&format!("{k:<18} {v}\n"));
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_header(&self.meta);
        s.push_str("name,value\n");
        for (k, v) in self.value_rows() {
            s.push_str(&csv_row(&[k, v]));
        }
        s
    }
}

// ------------------------------------------------------------------ voronoi

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VoronoiRow {
    pub x: f64,
    pub direct: [f64; 2],
    pub residues: [f64; 2],
    pub s_phi: [f64; 2],
    pub leading: [f64; 2],
    pub series: [f64; 2],
    pub tail_bound: f64,
    pub term_count: usize,
    pub tolerance: f64,
    pub error_ratio: f64,
    pub series_gap: f64,
    pub normalized: f64,
    pub empty_window: bool,
    pub truncated: bool,
    pub note: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VoronoiReport {
    pub meta: Meta,
    pub x_anchor: f64,
    pub l_anchor: f64,
    pub expansion_order: usize,
    pub max_terms: usize,
    pub rows: Vec<VoronoiRow>,
}

const VORONOI_COLUMNS: &str = "x,directRe,directIm,residueRe,residueIm,sPhiRe,sPhiIm,\
leadingRe,leadingIm,seriesRe,seriesIm,tailBound,termCount,tolerance,errorRatio,\
seriesGap,normalized,emptyWindow,truncated,note";

fn voronoi_cells(r: &VoronoiRow) -> Vec<String> {
    vec![
        sig(r.x),
        sig(r.direct[0]),
        sig(r.direct[1]),
        sig(r.residues[0]),
        sig(r.residues[1]),
        sig(r.s_phi[0]),
        sig(r.s_phi[1]),
        sig(r.leading[0]),
        sig(r.leading[1]),
        sig(r.series[0]),
        sig(r.series[1]),
        sig(r.tail_bound),
        r.term_count.to_string(),
        sig(r.tolerance),
        sig(r.error_ratio),
        sig(r.series_gap),
        sig(r.normalized),
        r.empty_window.to_string(),
        r.truncated.to_string(),
        csv_text(&r.note),
    ]
}

impl Render for VoronoiReport {
    fn table(&self) -> String {
        let mut s = table_header(&self.meta);
        s.push_str(&format!("{:<18} {}\n", "xAnchor", sig(self.x_anchor)));
        s.push_str(&format!("{:<18} {}\n", "lAnchor", sig(self.l_anchor)));
        s.push_str(&format!(
            "{:<18} {}\n",
            "expansionOrder", self.expansion_order
        ));
        s.push_str(&format!("{:<18} {}\n", "maxTerms", self.max_terms));
        s.push('\n');
        s.push_str(&VORONOI_COLUMNS.replace(',', "  "));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&voronoi_cells(r).join("  "));
            s.push('\n');
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_header(&self.meta);
        s.push_str(&format!("# xAnchor = {}\n", sig(self.x_anchor)));
        s.push_str(&format!("# lAnchor = {}\n", sig(self.l_anchor)));
        s.push_str(&format!("# expansionOrder = {}\n", self.expansion_order));
        s.push_str(&format!("# maxTerms = {}\n", self.max_terms));
        s.push_str(VORONOI_COLUMNS);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&csv_row(&voronoi_cells(r)));
        }
        s
    }
}

// ----------------------------------------------------------------- signscan

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Checkpoint {
    pub x: f64,
    pub n_star: usize,
    pub ratio: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WindowRow {
    pub center: f64,
    pub found: bool,
    pub x_plus: Option<f64>,
    pub x_minus: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SignScanReport {
    pub meta: Meta,
    pub x_max: f64,
    pub exponent: f64,
    pub c0: f64,
    pub minimal_c0: Option<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_star: usize,
    pub x_low: f64,
    pub x_high: f64,
    pub max_gap_normalized: f64,
    pub windows_all_found: bool,
    pub checkpoints: Vec<Checkpoint>,
    pub windows: Vec<WindowRow>,
}

impl SignScanReport {
    fn summary_lines(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("xMax".into(), sig(self.x_max)),
            ("exponent".into(), sig(self.exponent)),
            ("c0".into(), sig(self.c0)),
            ("minimalC0".into(), opt_sig(self.minimal_c0)),
            ("nPlus".into(), self.n_plus.to_string()),
            ("nMinus".into(), self.n_minus.to_string()),
            ("nStar".into(), self.n_star.to_string()),
            ("xLow".into(), sig(self.x_low)),
            ("xHigh".into(), sig(self.x_high)),
            ("maxGapNormalized".into(), sig(self.max_gap_normalized)),
            (
                "windowsAllFound".into(),
                self.windows_all_found.to_string(),
            ),
        ];
        for c in &self.checkpoints {
            out.push((
                format!("checkpoint x={}", sig(c.x)),
                format!("nStar={} ratio={}", c.n_star, sig(c.ratio)),
            ));
        }
        out
    }
}

impl Render for SignScanReport {
    fn table(&self) -> String {
        let mut s = table_header(&self.meta);
        for (k, v) in self.summary_lines() {
            s.push_str(&format!("{k:<26} {v}\n"));
        }
        s.push('\n');
        s.push_str("center  found  xPlus  xMinus\n");
        for w in &self.windows {
            s.push_str(&format!(
                "{}  {}  {}  {}\n",
                sig(w.center),
                w.found,
                opt_sig(w.x_plus),
                opt_sig(w.x_minus)
            ));
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_header(&self.meta);
        for (k, v) in self.summary_lines() {
            s.push_str(&format!("# {k} = {}\n", csv_text(&v)));
        }
        s.push_str("center,found,xPlus,xMinus\n");
        for w in &self.windows {
            s.push_str(&csv_row(&[
                sig(w.center),
                w.found.to_string(),
                opt_sig(w.x_plus),
                opt_sig(w.x_minus),
            ]));
        }
        s
    }
}

// ------------------------------------------------------------------- detect

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetectRow {
    pub x: f64,
    pub l_value: f64,
    pub threshold_scale: f64,
    pub success: bool,
    pub skipped: bool,
    pub x_plus: Option<f64>,
    pub x_minus: Option<f64>,
    pub value_plus: Option<f64>,
    pub value_minus: Option<f64>,
    pub normalized_plus: Option<f64>,
    pub normalized_minus: Option<f64>,
    pub crossing: Option<f64>,
    pub note: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetectReport {
    pub meta: Meta,
    pub c0: f64,
    pub n_split: usize,
    pub t_grid: usize,
    pub side: String,
    pub expansion_order: usize,
    pub alpha: Option<f64>,
    pub x_floor: Option<f64>,
    pub rows: Vec<DetectRow>,
}

const DETECT_COLUMNS: &str = "x,lValue,thresholdScale,success,skipped,xPlus,xMinus,\
valuePlus,valueMinus,normalizedPlus,normalizedMinus,crossing,note";

fn detect_cells(r: &DetectRow) -> Vec<String> {
    vec![
        sig(r.x),
        sig(r.l_value),
        sig(r.threshold_scale),
        r.success.to_string(),
        r.skipped.to_string(),
        opt_sig(r.x_plus),
        opt_sig(r.x_minus),
        opt_sig(r.value_plus),
        opt_sig(r.value_minus),
        opt_sig(r.normalized_plus),
        opt_sig(r.normalized_minus),
        opt_sig(r.crossing),
        csv_text(&r.note),
    ]
}

impl Render for DetectReport {
    fn table(&self) -> String {
        let mut s = table_header(&self.meta);
        s.push_str(&format!("{:<18} {}\n", "c0", sig(self.c0)));
        s.push_str(&format!("{:<18} {}\n", "nSplit", self.n_split));
        s.push_str(&format!("{:<18} {}\n", "tGrid", self.t_grid));
        s.push_str(&format!("{:<18} {}\n", "side", self.side));
        s.push_str(&format!(
            "{:<18} {}\n",
            "expansionOrder", self.expansion_order
        ));
        s.push_str(&format!("{:<18} {}\n", "alpha", opt_sig(self.alpha)));
        s.push_str(&format!("{:<18} {}\n", "xFloor", opt_sig(self.x_floor)));
        s.push('\n');
        s.push_str(&DETECT_COLUMNS.replace(',', "  "));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&detect_cells(r).join("  "));
            s.push('\n');
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_header(&self.meta);
        s.push_str(&format!("# c0 = {}\n", sig(self.c0)));
        s.push_str(&format!("# nSplit = {}\n", self.n_split));
        s.push_str(&format!("# tGrid = {}\n", self.t_grid));
        s.push_str(&format!("# side = {}\n", self.side));
        s.push_str(&format!("# expansionOrder = {}\n", self.expansion_order));
        s.push_str(&format!("# alpha = {}\n", opt_sig(self.alpha)));
        s.push_str(&format!("# xFloor = {}\n", opt_sig(self.x_floor)));
        s.push_str(DETECT_COLUMNS);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&csv_row(&detect_cells(r)));
        }
        s
    }
}
