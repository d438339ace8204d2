//! Input resolution: builtin instances, spec files, and coefficient files.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use localmean::feq::{
    derive_constants, DerivedConstants, FunctionalEquationSpec, GammaFactor, PoleSpec,
};
use localmean::instances::{delta_spec, zeta_spec, zeta_squared_spec};
use localmean::streams::{parse_stream_csv, CoefficientStream, StreamKind, StreamPoint};
use localmean::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CommonArgs, Failure, Instance};

/// Functional-equation spec file schema (JSON).
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SpecFile {
    pub factors: Vec<FactorFile>,
    pub omega: [f64; 2],
    pub sigma_star: f64,
    pub pole_radius: f64,
    #[serde(default)]
    pub poles: Vec<PoleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FactorFile {
    pub alpha: f64,
    pub beta: [f64; 2],
    /// Defaults to `beta` (self-dual factor) when omitted.
    #[serde(default)]
    pub beta_tilde: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PoleFile {
    pub location: [f64; 2],
    pub order: usize,
    /// Coefficients of (s − location)^{i − order}, i = 0..order.
    pub principal_part: Vec<[f64; 2]>,
}

fn cplx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl SpecFile {
    pub fn into_spec(self) -> FunctionalEquationSpec {
        FunctionalEquationSpec {
            factors: self
                .factors
                .into_iter()
                .map(|f| {
                    let beta = cplx(f.beta);
                    GammaFactor::new(f.alpha, beta, f.beta_tilde.map_or(beta, cplx))
                })
                .collect(),
            omega: cplx(self.omega),
            sigma_star: self.sigma_star,
            pole_radius: self.pole_radius,
            poles: self
                .poles
                .into_iter()
                .map(|p| PoleSpec {
                    location: cplx(p.location),
                    order: p.order,
                    principal_part: p.principal_part.into_iter().map(cplx).collect(),
                })
                .collect(),
        }
    }
}

/// Coefficient stream file schema (JSON form).
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StreamFile {
    pub points: Vec<PointFile>,
    #[serde(default)]
    pub dual: Option<Vec<PointFile>>,
    #[serde(default)]
    pub self_dual: Option<bool>,
    #[serde(default, rename = "degree2A")]
    pub degree_two_a: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PointFile {
    pub lambda: f64,
    pub a: [f64; 2],
}

fn stream_from_json(text: &str) -> Result<CoefficientStream, Failure> {
    let file: StreamFile = serde_json::from_str(text)
        .map_err(|e| Failure::new(3, format!("coefficient file: {e}")))?;
    if file.self_dual == Some(true) && file.dual.is_some() {
        return Err(Failure::new(
            3,
            "coefficient file declares selfDual yet carries a dual array".to_string(),
        ));
    }
    if file.self_dual == Some(false) && file.dual.is_none() {
        return Err(Failure::new(
            3,
            "coefficient file declares selfDual = false but has no dual array".to_string(),
        ));
    }
    let to_points = |pts: Vec<PointFile>| -> Vec<StreamPoint> {
        pts.into_iter()
            .map(|p| StreamPoint {
                lambda: p.lambda,
                a: cplx(p.a),
            })
            .collect()
    };
    let points = to_points(file.points);
    let dual = file.dual.map(to_points);
    CoefficientStream::from_parts(StreamKind::FromFile, points, dual, file.degree_two_a)
        .map_err(Failure::from)
}

/// Reads a stream from a CSV or JSON file, chosen by extension.
pub fn load_stream(path: &Path) -> Result<CoefficientStream, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(3, format!("coefficient file {}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .map_or(false, |ext| ext.eq_ignore_ascii_case("json"));
    if is_json {
        stream_from_json(&text)
    } else {
        parse_stream_csv(&text).map_err(Failure::from)
    }
}

fn load_spec(path: &Path) -> Result<FunctionalEquationSpec, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("spec file {}: {e}", path.display())))?;
    let file: SpecFile = serde_json::from_str(&text)
        .map_err(|e| Failure::new(2, format!("spec file {}: {e}", path.display())))?;
    Ok(file.into_spec())
}

/// Everything a command needs to run: the functional data plus, when the
/// command works on coefficients, a stream covering `needed_lambda`.
pub struct Setup {
    pub label: String,
    pub spec: FunctionalEquationSpec,
    pub consts: DerivedConstants,
    pub stream: Option<CoefficientStream>,
    pub two_a: f64,
}

fn builtin_spec(instance: Instance) -> (FunctionalEquationSpec, &'static str) {
    match instance {
        Instance::Zeta => (zeta_spec(), "zeta"),
        Instance::Zeta2 => (zeta_squared_spec(), "zeta2"),
        Instance::Delta => (delta_spec(), "delta"),
    }
}

fn builtin_stream(instance: Instance, needed_lambda: f64) -> Result<CoefficientStream, Failure> {
    let spacing = match instance {
        Instance::Zeta => PI.sqrt(),
        Instance::Zeta2 => PI,
        Instance::Delta => 2.0 * PI,
    };
    let n = ((needed_lambda / spacing).ceil().max(0.0) as usize + 8).max(16);
    match instance {
        Instance::Zeta => Ok(localmean::streams::zeta_stream(n)),
        Instance::Zeta2 => Ok(localmean::streams::zeta_squared_stream(n)),
        Instance::Delta => {
            localmean::streams::delta_stream(n.min(1_000_000)).map_err(Failure::from)
        }
    }
}

/// Resolves --instance/--spec/--coeffs into functional data and a stream.
/// `needed_lambda` sizes builtin streams; pass None for spec-only commands.
pub fn resolve(args: &CommonArgs, needed_lambda: Option<f64>) -> Result<Setup, Failure> {
    let (spec, label) = match (args.instance, &args.spec) {
        (Some(instance), None) => {
            let (spec, name) = builtin_spec(instance);
            (spec, name.to_string())
        }
        (None, Some(path)) => (load_spec(path)?, path.display().to_string()),
        (None, None) => {
            return Err(Failure::new(
                2,
                "one of --instance or --spec is required".to_string(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap forbids --instance with --spec"),
    };
    let consts = derive_constants(&spec).map_err(Failure::from)?;
    let two_a = 2.0 * consts.big_a;
    let stream = match (needed_lambda, &args.coeffs) {
        (None, _) => None,
        (Some(_), Some(path)) => Some(load_stream(path)?),
        (Some(needed), None) => match args.instance {
            Some(instance) => Some(builtin_stream(instance, needed)?),
            None => {
                return Err(Failure::new(
                    3,
                    "--spec runs need --coeffs with the coefficient stream".to_string(),
                ))
            }
        },
    };
    Ok(Setup {
        label,
        spec,
        consts,
        stream,
        two_a,
    })
}
