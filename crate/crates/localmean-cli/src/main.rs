use std::process::ExitCode;

use clap::{Parser, Subcommand};
use localmean::feq::DerivedConstants;
use localmean::gamma::expansion_coeffs;
use localmean::oscillation::{
    detect_extrema, minimal_c0, select_alpha, sign_changes, window_scan, DetectionParams,
    DetectionSide,
};
use localmean::streams::{coefficient_bound_warnings, CoefficientStream};
use localmean::voronoi::{default_expansion_order, voronoi_series, TruncationPolicy};
use localmean::weight::WeightProfile;
use localmean::Error;

use localmean_cli::inputs::{self, resolve};
use localmean_cli::reports::{
    emit, pair, Checkpoint, ConstantsReport, DetectReport, DetectRow, Meta, SignScanReport,
    VoronoiReport, VoronoiRow, WindowRow,
};
use localmean_cli::{CommonArgs, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "localmean",
    version,
    about = "Local weighted means of Dirichlet-series coefficients: derived constants, \
dual-series approximation, sign scans, and extremum detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived functional-equation constants and the ratio expansion
    Constants(CommonArgs),
    /// Direct vs dual-series evaluation over an x grid in [X, 4X]
    Voronoi(CommonArgs),
    /// Coefficient sign counts and sign-change window coverage up to X
    Signscan(CommonArgs),
    /// Positive and negative local extrema of the normalized mean near checkpoints
    Detect(CommonArgs),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Constants(args) => cmd_constants(args),
        Command::Voronoi(args) => cmd_voronoi(args),
        Command::Signscan(args) => cmd_signscan(args),
        Command::Detect(args) => cmd_detect(args),
    }
}

fn validated_x(args: &CommonArgs) -> Result<f64, Failure> {
    if args.x.is_finite() && args.x > 0.0 {
        Ok(args.x)
    } else {
        Err(Failure::new(2, format!("--X must be positive, got {}", args.x)))
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let step = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut grid: Vec<f64> = (0..n).map(|i| lo * step.powi(i as i32)).collect();
    grid[n - 1] = hi;
    grid
}

/// Advisory growth check against the divisor-power envelope for integral
/// degree; non-integral degrees carry no comparable envelope.
fn growth_warnings(stream: &CoefficientStream, two_a: f64) -> Vec<String> {
    let m = two_a.round();
    if m < 1.0 || (two_a - m).abs() > 1e-9 {
        return Vec::new();
    }
    coefficient_bound_warnings(stream, m as u32)
}

fn nonempty(stream: &CoefficientStream) -> Result<(), Failure> {
    if stream.is_empty() {
        Err(Failure::new(3, "coefficient stream has no points".to_string()))
    } else {
        Ok(())
    }
}

fn expansion_order_for(args: &CommonArgs, consts: &DerivedConstants) -> usize {
    args.j.unwrap_or_else(|| default_expansion_order(consts))
}

fn cmd_constants(args: CommonArgs) -> Result<(), Failure> {
    let setup = resolve(&args, None)?;
    let consts = &setup.consts;
    let order = expansion_order_for(&args, consts);
    let coeffs = expansion_coeffs(&setup.spec, consts, order).map_err(Failure::from)?;
    let report = ConstantsReport {
        meta: Meta::new("constants", &setup.label, consts, args.seed, args.delta),
        factor_count: consts.d,
        b: pair(consts.b),
        b_tilde: pair(consts.b_tilde),
        a: pair(consts.a),
        k: pair(consts.k),
        theta_ladder: (0..coeffs.e.len()).map(|j| consts.theta_j(j)).collect(),
        expansion_order: coeffs.j_count,
        expansion: coeffs.e.iter().map(|&e| pair(e)).collect(),
        fit_diagnostics: coeffs.fit_diagnostics.clone(),
    };
    emit(&report, args.format, &args.out)
}

fn cmd_voronoi(args: CommonArgs) -> Result<(), Failure> {
    let x_anchor = validated_x(&args)?;
    let grid_n = args.grid.unwrap_or(17).max(1);
    // Coverage past 4X; the extra factor is dual-side headroom so the tail
    // certification rarely runs out of terms (self-dual builtins share the
    // primal array).
    let setup = resolve(&args, Some(16.0 * x_anchor))?;
    let consts = &setup.consts;
    let stream = setup.stream.as_ref().expect("stream-bearing command");
    nonempty(stream)?;

    let order = expansion_order_for(&args, consts);
    let coeffs = expansion_coeffs(&setup.spec, consts, order).map_err(Failure::from)?;
    let profile =
        WeightProfile::new(args.delta, x_anchor, consts.big_a).map_err(Failure::from)?;
    let theta = consts.theta();
    let two_a = setup.two_a;
    let l_anchor = profile.l();
    let max_terms = stream.dual_points().len();

    let mut rows = Vec::with_capacity(grid_n);
    for x in log_grid(x_anchor, 4.0 * x_anchor, grid_n) {
        let tol_x = args
            .tol
            .unwrap_or_else(|| 2.0 * x.powf(1.0 - theta) / l_anchor);
        let (ev, truncated, note) = eval_row(&setup, &coeffs, stream, &profile, x, tol_x)?;
        let err_scale = x.powf(1.0 - theta - 1.0 / two_a) / l_anchor;
        rows.push(VoronoiRow {
            x,
            direct: pair(ev.direct_sum),
            residues: pair(ev.main_term_residues),
            s_phi: pair(ev.s_phi),
            leading: pair(ev.leading_term),
            series: pair(ev.series_value),
            tail_bound: ev.tail_bound,
            term_count: ev.term_count,
            tolerance: tol_x,
            error_ratio: (ev.s_phi - ev.leading_term).norm() / err_scale,
            series_gap: (ev.s_phi - ev.series_value).norm(),
            normalized: ev.s_phi.norm() * l_anchor / x.powf(1.0 - theta),
            empty_window: ev.empty_window,
            truncated,
            note,
        });
    }

    let mut meta = Meta::new("voronoi", &setup.label, consts, args.seed, args.delta);
    meta.coefficient_warnings = growth_warnings(stream, two_a);
    let report = VoronoiReport {
        meta,
        x_anchor,
        l_anchor,
        expansion_order: coeffs.j_count,
        max_terms,
        rows,
    };
    emit(&report, args.format, &args.out)
}

/// Series length cap when the tail certificate cannot reach the requested
/// tolerance; keeps failed certifications from evaluating the whole stream.
const FALLBACK_TERMS: usize = 4096;

/// One grid-point evaluation. When the certificate cannot reach `tol_x`, the
/// row is recomputed at a capped length with the certificate it did achieve,
/// flagged, and annotated — the run still exits 0.
fn eval_row(
    setup: &inputs::Setup,
    coeffs: &localmean::gamma::ExpansionCoefficients,
    stream: &CoefficientStream,
    profile: &WeightProfile,
    x: f64,
    tol_x: f64,
) -> Result<(localmean::voronoi::VoronoiEvaluation, bool, String), Failure> {
    let consts = &setup.consts;
    let policy = TruncationPolicy::new(tol_x);
    let requested = match voronoi_series(&setup.spec, consts, coeffs, stream, profile, x, &policy)
    {
        Ok(ev) => return Ok((ev, false, String::new())),
        Err(Error::Truncation { requested, .. }) => requested,
        Err(e) => return Err(e.into()),
    };
    // Probe the certificate at the capped length, then run there.
    let mut probe = TruncationPolicy::new(f64::MIN_POSITIVE);
    probe.max_terms = FALLBACK_TERMS;
    let achieved = match voronoi_series(&setup.spec, consts, coeffs, stream, profile, x, &probe) {
        Err(Error::Truncation { achieved, .. }) => achieved,
        Ok(ev) => return Ok((ev, false, String::new())),
        Err(e) => return Err(e.into()),
    };
    let mut capped = TruncationPolicy::new(achieved * (1.0 + 1e-9));
    capped.max_terms = FALLBACK_TERMS;
    let ev = voronoi_series(&setup.spec, consts, coeffs, stream, profile, x, &capped)
        .map_err(Failure::from)?;
    let note = format!(
        "certified tail {achieved:.3e} exceeds tolerance {requested:.3e}; series cut at {} terms",
        ev.term_count
    );
    Ok((ev, true, note))
}

fn cmd_signscan(args: CommonArgs) -> Result<(), Failure> {
    let x_max = validated_x(&args)?;
    let setup = resolve(&args, Some(x_max * 1.01))?;
    let consts = &setup.consts;
    let stream = setup.stream.as_ref().expect("stream-bearing command");
    nonempty(stream)?;

    let two_a = setup.two_a;
    let exponent = 1.0 - 1.0 / two_a;
    let c0 = args.c0.unwrap_or(2.0);
    // Counts first: a materially complex coefficient is a data error no
    // matter what the windows would have said.
    let scan = sign_changes(stream, x_max).map_err(Failure::from)?;

    let mut checkpoints = Vec::new();
    let mut x = 10.0;
    while x < x_max * (1.0 - 1e-9) {
        if x > scan.x_low {
            let at = sign_changes(stream, x).map_err(Failure::from)?;
            checkpoints.push(Checkpoint {
                x,
                n_star: at.n_star,
                ratio: at.n_star as f64 / x.powf(1.0 / two_a),
            });
        }
        x *= 10.0;
    }
    checkpoints.push(Checkpoint {
        x: x_max,
        n_star: scan.n_star,
        ratio: scan.n_star as f64 / x_max.powf(1.0 / two_a),
    });

    let scan_lo = (x_max / 100.0).max(2.0 * scan.x_low).max(10.0);
    let (windows, max_gap, all_found, min_c0) = if scan_lo < 0.999 * x_max {
        let w = window_scan(stream, scan_lo, x_max, c0, exponent).map_err(Failure::from)?;
        let all = w.windows.iter().all(|r| r.found);
        let min_c0 = match minimal_c0(stream, scan_lo, x_max, exponent) {
            Ok(v) => Some(v),
            Err(Error::NonConvergence { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let rows = w
            .windows
            .into_iter()
            .map(|r| WindowRow {
                center: r.center,
                found: r.found,
                x_plus: r.x_plus,
                x_minus: r.x_minus,
            })
            .collect();
        (rows, w.max_gap_normalized, all, min_c0)
    } else {
        (Vec::new(), 0.0, false, None)
    };

    let mut meta = Meta::new("signscan", &setup.label, consts, args.seed, args.delta);
    meta.coefficient_warnings = growth_warnings(stream, two_a);
    let report = SignScanReport {
        meta,
        x_max,
        exponent,
        c0,
        minimal_c0: min_c0,
        n_plus: scan.n_plus,
        n_minus: scan.n_minus,
        n_star: scan.n_star,
        x_low: scan.x_low,
        x_high: scan.x_high,
        max_gap_normalized: max_gap,
        windows_all_found: all_found,
        checkpoints,
        windows,
    };
    emit(&report, args.format, &args.out)
}

fn cmd_detect(args: CommonArgs) -> Result<(), Failure> {
    let x_top = validated_x(&args)?;
    let grid_n = args.grid.unwrap_or(2).max(1);
    let c0 = args.c0.unwrap_or(2.0);
    let detection = DetectionParams {
        delta: args.delta,
        c0,
        ..DetectionParams::default()
    };

    let mut xs = Vec::with_capacity(grid_n);
    for i in 0..grid_n {
        xs.push(x_top * 10f64.powi(i as i32 - (grid_n as i32 - 1)));
    }

    let setup = resolve(&args, Some(coverage_for_detect(&xs, c0)))?;
    let consts = &setup.consts;
    let stream = setup.stream.as_ref().expect("stream-bearing command");
    nonempty(stream)?;
    let theta = consts.theta();
    let two_a = setup.two_a;

    let (alpha, x_floor) = match select_alpha(consts, stream, &detection) {
        Ok(a) => (Some(a), Some((2.0 * a).powf(two_a))),
        Err(_) => (None, None),
    };

    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let l_x = x.powf(1.0 / two_a) / args.delta;
        let threshold_scale = x.powf(1.0 - theta) / l_x;
        match detect_extrema(&setup.spec, consts, stream, x, &detection, DetectionSide::Direct) {
            Ok(rep) => rows.push(DetectRow {
                x,
                l_value: l_x,
                threshold_scale,
                success: rep.success,
                skipped: false,
                x_plus: Some(rep.x_plus),
                x_minus: Some(rep.x_minus),
                value_plus: Some(rep.value_plus),
                value_minus: Some(rep.value_minus),
                normalized_plus: Some(rep.value_plus / threshold_scale),
                normalized_minus: Some(rep.value_minus / threshold_scale),
                crossing: rep.crossing,
                note: if rep.success {
                    String::new()
                } else {
                    "window holds no resolved sign change".to_string()
                },
            }),
            Err(e @ (Error::InsufficientData { .. } | Error::Domain(_))) => {
                rows.push(DetectRow {
                    x,
                    l_value: l_x,
                    threshold_scale,
                    success: false,
                    skipped: true,
                    x_plus: None,
                    x_minus: None,
                    value_plus: None,
                    value_minus: None,
                    normalized_plus: None,
                    normalized_minus: None,
                    crossing: None,
                    note: format!("skipped: {e}"),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut meta = Meta::new("detect", &setup.label, consts, args.seed, args.delta);
    meta.coefficient_warnings = growth_warnings(stream, two_a);
    let report = DetectReport {
        meta,
        c0,
        n_split: detection.n_split,
        t_grid: detection.t_grid,
        side: "direct".to_string(),
        expansion_order: expansion_order_for(&args, consts),
        alpha,
        x_floor,
        rows,
    };
    emit(&report, args.format, &args.out)
}

/// Primal coverage for detect: past the widest scan window. Window widths use
/// exponent < 1, so the largest checkpoint dominates; the support of the
/// weight adds only an O(δ²) sliver absorbed by the slack factor.
fn coverage_for_detect(xs: &[f64], c0: f64) -> f64 {
    let top = xs.iter().cloned().fold(1.0f64, f64::max);
    (top + c0 * top) * 1.05
}
