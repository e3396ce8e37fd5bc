//! Command-line front end: manifests in, text or JSON reports out.

pub mod manifest;
mod report;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use szabo_core::extension::{
    extension_szabo_report, generic_cubic_phi, levi_civita, metric_compatibility_residual, twisted_extension,
    PhiTensor,
};
use szabo_core::homogeneous::{
    killing_residual, sweep_type_a, sweep_type_b, type_a_parallel_ricci, type_b_szabo_residuals, SweepReport,
    TYPE_A_COV_RICCI,
};
use szabo_core::szabo::{char_poly, direction_bindings, nilpotency_degree, szabo_matrix};
use szabo_core::tensorcalc::{cov_deriv_ricci, curvature, cyclic_sums, is_flat, ricci, torsion};
use szabo_core::{GeometryError, RatFn, Rational, SzaboMatrix, TensorField, VarId, VarKind};
use thiserror::Error;

pub use manifest::{load_manifest, parse_manifest, write_manifest, Manifest, ManifestError, PhiSpec};
pub use report::{emit_report, Format, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Curvature,
    Ricci,
    CovRicci,
    Torsion,
    CyclicParallel,
    Szabo,
    CharPoly,
    CheckSzabo,
    ClassifyTypeA,
    ClassifyTypeB,
    Killing,
    Extend,
    ExtendSzabo,
    Nilpotency,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Ricci => "ricci",
            Command::CovRicci => "cov-ricci",
            Command::Torsion => "torsion",
            Command::CyclicParallel => "cyclic-parallel",
            Command::Szabo => "szabo",
            Command::CharPoly => "char-poly",
            Command::CheckSzabo => "check-szabo",
            Command::ClassifyTypeA => "classify-type-a",
            Command::ClassifyTypeB => "classify-type-b",
            Command::Killing => "killing",
            Command::Extend => "extend",
            Command::ExtendSzabo => "extend-szabo",
            Command::Nilpotency => "nilpotency",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cannot write report: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for failures inside the engine.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Manifest(_) | CliError::Usage(_) => 2,
            CliError::Geometry(GeometryError::Expr(_))
            | CliError::Geometry(GeometryError::DimensionMismatch { .. })
            | CliError::Geometry(GeometryError::ForeignVariable(_))
            | CliError::Geometry(GeometryError::TypeBAsymmetricRicci(_)) => 2,
            CliError::Geometry(_) | CliError::Output(_) => 3,
        }
    }
}

impl From<szabo_core::ExprError> for CliError {
    fn from(e: szabo_core::ExprError) -> Self {
        CliError::Geometry(e.into())
    }
}

/// Options shared by all commands.
#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Restrict to one named direction.
    pub direction: Option<String>,
    /// Extra point bindings; override the manifest's `[point]`.
    pub point: Vec<(String, Rational)>,
    /// Integer parameter grid `lo..=hi` for family sweeps.
    pub grid: Option<(i64, i64)>,
}

/// `k=v,k=v` with rational values.
pub fn parse_point(s: &str) -> Result<Vec<(String, Rational)>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("point entry `{pair}` must look like name=value")))?;
            let v = Rational::from_str(v.trim())
                .map_err(|_| CliError::Usage(format!("`{}` is not a rational number", v.trim())))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// `lo..hi`, inclusive.
pub fn parse_grid(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("grid `{s}` must look like lo..hi"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi || hi - lo > 8 {
        return Err(CliError::Usage(format!("grid `{s}` must satisfy lo <= hi and hi - lo <= 8")));
    }
    Ok((lo, hi))
}

pub fn run_command(command: Command, m: &Manifest, opts: &Options) -> Result<Report, CliError> {
    let start = std::time::Instant::now();
    let point = resolve_point(m, opts)?;
    let mut data = Map::new();
    let c = m.connection();
    c.validate()?;
    let verdict = match command {
        Command::Curvature => {
            data.insert("components".into(), components(m, &curvature(&c), |i| {
                format!("R^{}_{}{}{}", i[0] + 1, i[1] + 1, i[2] + 1, i[3] + 1)
            }));
            data.insert("flat".into(), Value::Bool(is_flat(&c)));
            None
        }
        Command::Ricci => {
            let ric = ricci(&c);
            let symmetric = (0..c.dim()).all(|j| (0..c.dim()).all(|k| ric.get(&[j, k]) == ric.get(&[k, j])));
            data.insert("components".into(), components(m, &ric, |i| format!("Ric_{}{}", i[0] + 1, i[1] + 1)));
            data.insert("symmetric".into(), Value::Bool(symmetric));
            None
        }
        Command::CovRicci => {
            data.insert("components".into(), components(m, &cov_deriv_ricci(&c), |i| {
                format!("Ric_{}{};{}", i[1] + 1, i[2] + 1, i[0] + 1)
            }));
            None
        }
        Command::Torsion => {
            let t = torsion(&c);
            data.insert("components".into(), components(m, &t, |i| {
                format!("T^{}_{}{}", i[0] + 1, i[1] + 1, i[2] + 1)
            }));
            Some(t.is_zero())
        }
        Command::CyclicParallel => {
            let sums = cyclic_sums(&c);
            let mut comps = Map::new();
            for ((i, j, k), v) in &sums {
                if !v.is_zero() {
                    comps.insert(format!("C_{}{}{}", i + 1, j + 1, k + 1), Value::String(m.render(v)));
                }
            }
            let residual = szabo_core::tensorcalc::cyclic_parallel_residual(&c);
            data.insert("components".into(), Value::Object(comps));
            data.insert("residuals".into(), json!([m.render(&residual)]));
            Some(residual.is_zero())
        }
        Command::Szabo => {
            let s = szabo_matrix(&c);
            data.insert("components".into(), matrix_components(m, &s));
            None
        }
        Command::CharPoly => {
            let s = specialized(szabo_matrix(&c), &point)?;
            data.insert("sigma".into(), sigma(m, &s));
            None
        }
        Command::CheckSzabo => {
            let s = specialized(szabo_matrix(&c), &point)?;
            let coeffs = char_poly(&s);
            data.insert("sigma".into(), Value::Array(coeffs.sigma.iter().map(|x| m.render(x).into()).collect()));
            Some(coeffs.all_zero())
        }
        Command::ClassifyTypeA => classify_type_a(m, opts, &mut data)?,
        Command::ClassifyTypeB => classify_type_b(m, opts, &mut data)?,
        Command::Killing => {
            let mut fields = Map::new();
            let mut all = true;
            for (name, x) in selected_directions(m, opts, m.dim)? {
                let k = killing_residual(&c, x)?;
                all &= k.is_zero();
                let mut entry = Map::new();
                entry.insert("killing".into(), Value::Bool(k.is_zero()));
                entry.insert("components".into(), components(m, &k, |i| {
                    format!("K^{}_{}{}", i[0] + 1, i[1] + 1, i[2] + 1)
                }));
                fields.insert(name.clone(), Value::Object(entry));
            }
            data.insert("fields".into(), Value::Object(fields));
            Some(all)
        }
        Command::Extend => {
            let phi = phi_tensor(m)?;
            let g = twisted_extension(&c, &phi)?;
            let lc = levi_civita(&g)?;
            let mut metric = Map::new();
            for i in 0..g.dim() {
                for j in i..g.dim() {
                    if !g.get(i, j).is_zero() {
                        metric.insert(format!("g_{}{}", i + 1, j + 1), m.render(g.get(i, j)).into());
                    }
                }
            }
            let mut gamma = Map::new();
            for k in 0..lc.dim() {
                for i in 0..lc.dim() {
                    for j in i..lc.dim() {
                        if !lc.gamma(k, i, j).is_zero() {
                            gamma.insert(format!("Gamma^{}_{}{}", k + 1, i + 1, j + 1), m.render(lc.gamma(k, i, j)).into());
                        }
                    }
                }
            }
            data.insert("metric".into(), Value::Object(metric));
            data.insert("christoffel".into(), Value::Object(gamma));
            data.insert("compatible".into(), Value::Bool(metric_compatibility_residual(&g, &lc)?.is_zero()));
            data.insert("torsion_free".into(), Value::Bool(lc.is_torsion_free()));
            None
        }
        Command::ExtendSzabo => {
            let phi = phi_tensor(m)?;
            let dirs = selected_directions(m, opts, 2 * m.dim)?;
            let constants = dirs
                .iter()
                .map(|(name, x)| constant_direction(name, x))
                .collect::<Result<Vec<_>, _>>()?;
            let report = extension_szabo_report(&c, &phi, &constants, &point)?;
            let s = specialized(report.matrix.clone(), &point)?;
            let coeffs = char_poly(&s);
            data.insert("sigma".into(), Value::Array(coeffs.sigma.iter().map(|x| m.render(x).into()).collect()));
            data.insert(
                "support".into(),
                Value::Array(report.support.iter().map(|(r, c)| format!("S_{}{}", r + 1, c + 1).into()).collect()),
            );
            data.insert("components".into(), matrix_components(m, &s));
            let mut nil = Vec::new();
            let mut norms = Map::new();
            for (((name, _), degree), norm) in dirs.iter().zip(&report.nilpotency).zip(&report.pseudo_norms) {
                nil.push(json!({"direction": name, "degree": degree}));
                norms.insert(name.to_string(), norm.as_ref().map_or(Value::Null, |v| v.to_string().into()));
            }
            data.insert("nilpotency".into(), Value::Array(nil));
            data.insert("pseudo_norms".into(), Value::Object(norms));
            Some(coeffs.all_zero())
        }
        Command::Nilpotency => {
            let s = szabo_matrix(&c);
            let mut nil = Vec::new();
            for (name, x) in selected_directions(m, opts, m.dim)? {
                let dir = constant_direction(name, x)?;
                let degree = nilpotency_degree(&s, &direction_bindings(&s, &dir), &point)?;
                nil.push(json!({"direction": name, "degree": degree}));
            }
            data.insert("nilpotency".into(), Value::Array(nil));
            None
        }
    };
    Ok(Report {
        command: command.name().to_string(),
        verdict,
        data,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn classify_type_a(m: &Manifest, opts: &Options, data: &mut Map<String, Value>) -> Result<Option<bool>, CliError> {
    if let Some((lo, hi)) = opts.grid {
        return Ok(Some(sweep(sweep_type_a(lo, hi), data)));
    }
    let p = family_params(m, manifest::FamilyKind::TypeA)?;
    let report = type_a_parallel_ricci(&p);
    let mut comps = Map::new();
    let mut nonzero = Vec::new();
    for (((i, j, k), _), r) in TYPE_A_COV_RICCI.iter().zip(&report.residuals) {
        let label = format!("Ric_{j}{k};{i}");
        if !r.is_zero() {
            nonzero.push(Value::String(label.clone()));
        }
        comps.insert(label, m.render(r).into());
    }
    data.insert("components".into(), Value::Object(comps));
    data.insert("nonzero".into(), Value::Array(nonzero));
    data.insert("consistent".into(), Value::Bool(report.consistent));
    data.insert("szabo".into(), Value::Bool(szabo_core::szabo::is_affine_szabo(&m.connection()).is_szabo));
    Ok(Some(report.parallel))
}

fn classify_type_b(m: &Manifest, opts: &Options, data: &mut Map<String, Value>) -> Result<Option<bool>, CliError> {
    if let Some((lo, hi)) = opts.grid {
        return Ok(Some(sweep(sweep_type_b(lo, hi), data)));
    }
    let p = family_params(m, manifest::FamilyKind::TypeB)?;
    let conditions = type_b_szabo_residuals(&p)?;
    let holds = conditions.iter().all(RatFn::is_zero);
    data.insert("residuals".into(), Value::Array(conditions.iter().map(|r| m.render(r).into()).collect()));
    let szabo = szabo_core::szabo::is_affine_szabo(&m.connection()).is_szabo;
    data.insert("szabo".into(), Value::Bool(szabo));
    data.insert("consistent".into(), Value::Bool(szabo == holds));
    Ok(Some(holds))
}

fn sweep(report: SweepReport, data: &mut Map<String, Value>) -> bool {
    data.insert("total".into(), report.total.into());
    data.insert("szabo_count".into(), report.szabo_count.into());
    let dis: Vec<Value> = report
        .disagreements
        .iter()
        .map(|t| Value::String(t.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    data.insert("disagreements".into(), Value::Array(dis));
    report.disagreements.is_empty()
}

fn family_params(
    m: &Manifest,
    kind: manifest::FamilyKind,
) -> Result<szabo_core::homogeneous::FamilyParams, CliError> {
    match &m.family {
        Some(f) if f.kind == kind => Ok(m.family_params().expect("family present")),
        _ => Err(CliError::Usage(format!(
            "this command needs `family = {}` in [meta] (or --grid)",
            if kind == manifest::FamilyKind::TypeA { "typeA" } else { "typeB" }
        ))),
    }
}

fn resolve_point(m: &Manifest, opts: &Options) -> Result<BTreeMap<VarId, Rational>, CliError> {
    let mut point = m.point.clone();
    for (name, value) in &opts.point {
        let var = m
            .table
            .lookup(name)
            .filter(|v| v.kind() != VarKind::Direction)
            .ok_or_else(|| CliError::Usage(format!("--point: undeclared identifier `{name}`")))?;
        point.insert(var, value.clone());
    }
    Ok(point)
}

fn selected_directions<'a>(
    m: &'a Manifest,
    opts: &Options,
    len: usize,
) -> Result<Vec<(&'a String, &'a Vec<RatFn>)>, CliError> {
    let dirs: Vec<_> = m
        .directions
        .iter()
        .filter(|(name, _)| opts.direction.as_ref().is_none_or(|d| d == name))
        .map(|(n, x)| (n, x))
        .collect();
    if dirs.is_empty() {
        return Err(CliError::Usage(match &opts.direction {
            Some(d) => format!("no direction named `{d}` in [directions]"),
            None => "this command needs at least one entry in [directions]".into(),
        }));
    }
    for (name, x) in &dirs {
        if x.len() != len {
            return Err(CliError::Usage(format!(
                "direction `{name}` has {} components; this command needs {len}",
                x.len()
            )));
        }
    }
    Ok(dirs)
}

fn constant_direction(name: &str, x: &[RatFn]) -> Result<Vec<Rational>, CliError> {
    x.iter()
        .map(|c| {
            c.as_constant()
                .ok_or_else(|| CliError::Usage(format!("direction `{name}` must have constant components")))
        })
        .collect()
}

fn phi_tensor(m: &Manifest) -> Result<PhiTensor, CliError> {
    match &m.phi {
        PhiSpec::Generic => Ok(generic_cubic_phi(m.dim, m.next_free_param()).0),
        PhiSpec::Entries(entries) => Ok(PhiTensor::from_upper(m.dim, |i, j| {
            entries.get(&(i, j)).cloned().unwrap_or_else(RatFn::zero)
        })?),
    }
}

fn specialized(s: SzaboMatrix, point: &BTreeMap<VarId, Rational>) -> Result<SzaboMatrix, CliError> {
    if point.is_empty() {
        Ok(s)
    } else {
        Ok(s.specialize(point)?)
    }
}

fn components(m: &Manifest, t: &TensorField, label: impl Fn(&[usize]) -> String) -> Value {
    Value::Object(t.nonzero().map(|(idx, v)| (label(&idx), Value::String(m.render(v)))).collect())
}

fn matrix_components(m: &Manifest, s: &SzaboMatrix) -> Value {
    Value::Object(
        s.support()
            .into_iter()
            .map(|(r, c)| (format!("S_{}{}", r + 1, c + 1), Value::String(m.render(s.entry(r, c)))))
            .collect(),
    )
}

fn sigma(m: &Manifest, s: &SzaboMatrix) -> Value {
    Value::Array(char_poly(s).sigma.iter().map(|x| m.render(x).into()).collect())
}
