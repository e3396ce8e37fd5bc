//! Line-oriented manifest format.
//!
//! ```text
//! # comment
//! [meta]
//! dim = 2
//! torsion = symmetric        # or explicit
//! family = typeA             # optional: typeA | typeB
//! params = 0, 0, 0, 1, 1, 0  # a..f, required with family
//! phi = generic              # optional: generic cubic Φ instead of [phi]
//! [vars]
//! k = param 1
//! [christoffel]
//! 1,1,1 = u1 + u2            # Γ^k_ij keyed "k,i,j", 1-based
//! [phi]
//! 1,2 = k*u1                 # Φ_ij keyed "i,j"
//! [directions]
//! X1 = 1, 0, 1, 0
//! [point]
//! u1 = 1/2
//! ```
//!
//! Base and fiber coordinates are predeclared as `u1..un` and `u1'..un'`;
//! parameters must be declared in `[vars]`.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use szabo_core::homogeneous::{type_a_connection, type_b_connection, FamilyParams};
use szabo_core::symexpr::format_with;
use szabo_core::{Connection, ExprError, RatFn, Rational, VarId, VarKind, VarTable};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest: {0}")]
    Io(#[from] std::io::Error),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid manifest (line {line}): {message}")]
    Validation { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Torsion {
    Symmetric,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    TypeA,
    TypeB,
}

impl FamilyKind {
    fn as_str(self) -> &'static str {
        match self {
            FamilyKind::TypeA => "typeA",
            FamilyKind::TypeB => "typeB",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub kind: FamilyKind,
    pub params: [Rational; 6],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiSpec {
    /// Entries from the `[phi]` section; missing ones are zero.
    Entries(BTreeMap<(usize, usize), RatFn>),
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub dim: usize,
    pub torsion: Torsion,
    pub family: Option<Family>,
    /// User declarations in file order.
    pub vars: Vec<(String, VarId)>,
    pub table: VarTable,
    /// `Γ^k_ij` as written, 0-based `(k, i, j)`.
    pub christoffel: BTreeMap<(usize, usize, usize), RatFn>,
    pub phi: PhiSpec,
    pub directions: Vec<(String, Vec<RatFn>)>,
    pub point: BTreeMap<VarId, Rational>,
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    value: &'a str,
    /// 1-based column of the first character of `value`.
    value_column: usize,
}

const SECTIONS: [&str; 6] = ["meta", "vars", "christoffel", "phi", "directions", "point"];

pub fn load_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text)
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let sections = split_sections(text)?;
    let section = |name: &str| sections.get(name).map(Vec::as_slice).unwrap_or(&[]);

    let meta = parse_meta(section("meta"))?;
    let dim = meta.dim;
    let (vars, table) = parse_vars(section("vars"), dim)?;

    let mut christoffel = BTreeMap::new();
    for line in section("christoffel") {
        let idx = parse_key(line, 3, dim)?;
        let key = (idx[0], idx[1], idx[2]);
        let value = parse_value(line, line.value, line.value_column, &table)?;
        check_kinds(line, &value, &[VarKind::Base, VarKind::Parameter])?;
        if christoffel.insert(key, value).is_some() {
            return Err(invalid(line.number, format!("duplicate key `{}`", line.key)));
        }
    }
    if meta.torsion == Torsion::Symmetric {
        for (&(k, i, j), v) in &christoffel {
            if i > j {
                if let Some(w) = christoffel.get(&(k, j, i)) {
                    if w != v {
                        return Err(invalid(
                            line_of(section("christoffel"), &[k, i, j]),
                            format!(
                                "conflicting entries {},{},{} and {},{},{} under symmetric completion",
                                k + 1,
                                i + 1,
                                j + 1,
                                k + 1,
                                j + 1,
                                i + 1
                            ),
                        ));
                    }
                }
            }
        }
    }
    if meta.family.is_some() && !christoffel.is_empty() {
        return Err(invalid(
            section("christoffel")[0].number,
            "a family manifest takes its connection from the parameters; [christoffel] must be empty",
        ));
    }

    let mut phi_entries = BTreeMap::new();
    for line in section("phi") {
        let idx = parse_key(line, 2, dim)?;
        let value = parse_value(line, line.value, line.value_column, &table)?;
        check_kinds(line, &value, &[VarKind::Base, VarKind::Parameter])?;
        let key = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        if phi_entries.insert(key, value).is_some() {
            return Err(invalid(line.number, format!("duplicate key `{}` (Φ is symmetric)", line.key)));
        }
    }
    let phi = if meta.phi_generic {
        if let Some(line) = section("phi").first() {
            return Err(invalid(line.number, "`phi = generic` excludes a [phi] section"));
        }
        PhiSpec::Generic
    } else {
        PhiSpec::Entries(phi_entries)
    };

    let mut directions: Vec<(String, Vec<RatFn>)> = Vec::new();
    for line in section("directions") {
        if !is_name(line.key) {
            return Err(syntax(line.number, 1, format!("`{}` is not a direction name", line.key)));
        }
        if directions.iter().any(|(n, _)| n == line.key) {
            return Err(invalid(line.number, format!("duplicate direction `{}`", line.key)));
        }
        let mut comps = Vec::new();
        let mut column = line.value_column;
        for part in line.value.split(',') {
            let lead = part.len() - part.trim_start().len();
            comps.push(parse_value(line, part.trim(), column + lead, &table)?);
            column += part.len() + 1;
        }
        if comps.len() != dim && comps.len() != 2 * dim {
            return Err(invalid(
                line.number,
                format!("direction `{}` has {} components; expected {} or {}", line.key, comps.len(), dim, 2 * dim),
            ));
        }
        for c in &comps {
            check_kinds(line, c, &[VarKind::Base, VarKind::Fiber, VarKind::Parameter])?;
        }
        directions.push((line.key.to_string(), comps));
    }

    let mut point = BTreeMap::new();
    for line in section("point") {
        let var = table
            .lookup(line.key)
            .filter(|v| v.kind() != VarKind::Direction)
            .ok_or_else(|| invalid(line.number, format!("undeclared identifier `{}`", line.key)))?;
        let value = parse_value(line, line.value, line.value_column, &table)?;
        let value = value
            .as_constant()
            .ok_or_else(|| invalid(line.number, format!("point value for `{}` must be a number", line.key)))?;
        if point.insert(var, value).is_some() {
            return Err(invalid(line.number, format!("duplicate key `{}`", line.key)));
        }
    }

    Ok(Manifest {
        dim,
        torsion: meta.torsion,
        family: meta.family,
        vars,
        table,
        christoffel,
        phi,
        directions,
        point,
    })
}

struct Meta {
    dim: usize,
    torsion: Torsion,
    family: Option<Family>,
    phi_generic: bool,
}

fn parse_meta(lines: &[Line]) -> Result<Meta, ManifestError> {
    let mut seen: BTreeMap<&str, &Line> = BTreeMap::new();
    for line in lines {
        if !["dim", "torsion", "family", "params", "phi"].contains(&line.key) {
            return Err(invalid(line.number, format!("unknown [meta] key `{}`", line.key)));
        }
        if seen.insert(line.key, line).is_some() {
            return Err(invalid(line.number, format!("duplicate key `{}`", line.key)));
        }
    }
    let dim_line = seen.get("dim").ok_or_else(|| invalid(0, "[meta] must set `dim`"))?;
    let dim: usize = dim_line
        .value
        .parse()
        .ok()
        .filter(|d| (1..=8).contains(d))
        .ok_or_else(|| invalid(dim_line.number, "`dim` must be an integer between 1 and 8"))?;
    let torsion = match seen.get("torsion").map(|l| (l.value, l.number)) {
        None | Some(("symmetric", _)) => Torsion::Symmetric,
        Some(("explicit", _)) => Torsion::Explicit,
        Some((other, n)) => return Err(invalid(n, format!("torsion must be `symmetric` or `explicit`, not `{other}`"))),
    };
    let phi_generic = match seen.get("phi").map(|l| (l.value, l.number)) {
        None | Some(("given", _)) => false,
        Some(("generic", _)) => true,
        Some((other, n)) => return Err(invalid(n, format!("phi must be `given` or `generic`, not `{other}`"))),
    };
    let family = match seen.get("family") {
        None => {
            if let Some(l) = seen.get("params") {
                return Err(invalid(l.number, "`params` needs `family`"));
            }
            None
        }
        Some(l) => {
            let kind = match l.value {
                "typeA" => FamilyKind::TypeA,
                "typeB" => FamilyKind::TypeB,
                other => return Err(invalid(l.number, format!("family must be `typeA` or `typeB`, not `{other}`"))),
            };
            if dim != 2 {
                return Err(invalid(l.number, "Type A / Type B families are two-dimensional"));
            }
            let p = seen.get("params").ok_or_else(|| invalid(l.number, "`family` needs `params = a, b, c, d, e, f`"))?;
            let empty = VarTable::new();
            let mut values = Vec::new();
            let mut column = p.value_column;
            for part in p.value.split(',') {
                let lead = part.len() - part.trim_start().len();
                let v = parse_value(p, part.trim(), column + lead, &empty)?;
                values.push(v.as_constant().ok_or_else(|| invalid(p.number, "family parameters must be numbers"))?);
                column += part.len() + 1;
            }
            let params: [Rational; 6] = values
                .try_into()
                .map_err(|v: Vec<Rational>| invalid(p.number, format!("expected 6 parameters, got {}", v.len())))?;
            Some(Family { kind, params })
        }
    };
    Ok(Meta {
        dim,
        torsion,
        family,
        phi_generic,
    })
}

fn parse_vars(lines: &[Line], dim: usize) -> Result<(Vec<(String, VarId)>, VarTable), ManifestError> {
    let mut table = VarTable::new();
    let mut vars = Vec::new();
    for line in lines {
        let mut words = line.value.split_whitespace();
        let (kind, index) = match (words.next(), words.next(), words.next()) {
            (Some(k), Some(i), None) => (k, i),
            _ => return Err(syntax(line.number, line.value_column, "expected `<kind> <index>`")),
        };
        let kind = match kind {
            "base" => VarKind::Base,
            "fiber" => VarKind::Fiber,
            "param" | "parameter" => VarKind::Parameter,
            other => {
                return Err(invalid(line.number, format!("variable kind must be base, fiber or param, not `{other}`")))
            }
        };
        let index: u32 = index
            .parse()
            .ok()
            .filter(|&i| i >= 1)
            .ok_or_else(|| invalid(line.number, format!("bad variable index `{index}`")))?;
        if kind != VarKind::Parameter && index as usize > dim {
            return Err(invalid(line.number, format!("coordinate index {index} exceeds dim {dim}")));
        }
        let var = VarId::new(kind, index);
        if let Some(other) = canonical_var(line.key) {
            if other != var {
                return Err(invalid(
                    line.number,
                    format!("`{}` is reserved for {}", line.key, describe(other)),
                ));
            }
        }
        table.declare(line.key, var).map_err(|e| invalid(line.number, e.to_string()))?;
        vars.push((line.key.to_string(), var));
    }
    let n = dim as u32;
    let predeclared = (1..=n)
        .flat_map(|i| [VarId::base(i), VarId::fiber(i)])
        .chain((1..=2 * n).map(VarId::direction));
    for var in predeclared {
        if table.iter().any(|(_, v)| v == var) {
            continue;
        }
        let name = var.canonical_name();
        table
            .declare(&name, var)
            .map_err(|_| invalid(0, format!("`{name}` is declared for another variable")))?;
    }
    Ok((vars, table))
}

/// The variable whose canonical rendering is `name`, if any.
fn canonical_var(name: &str) -> Option<VarId> {
    let num = |s: &str| s.parse::<u32>().ok().filter(|&i| i >= 1 && !s.starts_with('0'));
    if let Some(rest) = name.strip_prefix('u') {
        if let Some(i) = rest.strip_suffix('\'') {
            return num(i).map(VarId::fiber);
        }
        return num(rest).map(VarId::base);
    }
    if let Some(rest) = name.strip_prefix('a') {
        if !rest.is_empty() {
            return num(rest).map(VarId::direction);
        }
    }
    if let Some(rest) = name.strip_prefix('p') {
        if let Some(i) = num(rest) {
            return Some(VarId::param(i));
        }
    }
    match name {
        "a" | "b" | "c" | "d" | "e" | "f" => Some(VarId::param(name.as_bytes()[0] as u32 - b'a' as u32 + 1)),
        _ => None,
    }
}

fn describe(v: VarId) -> String {
    format!("the {} variable {}", v.kind().as_str(), v.index())
}

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, Vec<Line<'_>>>, ManifestError> {
    let mut out: BTreeMap<&'static str, Vec<Line>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(number, indent + 1, "unterminated section header"))?
                .trim();
            let name = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| syntax(number, indent + 2, format!("unknown section `{name}`")))?;
            if out.contains_key(name) {
                return Err(invalid(number, format!("section [{name}] appears twice")));
            }
            out.insert(name, Vec::new());
            current = Some(name);
            continue;
        }
        let section = current.ok_or_else(|| syntax(number, indent + 1, "entry outside of a section"))?;
        let eq = content.find('=').ok_or_else(|| syntax(number, content.len() + 1, "expected `key = value`"))?;
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(syntax(number, indent + 1, "missing key"));
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        if value.is_empty() {
            return Err(syntax(number, eq + 2, "missing value"));
        }
        let value_column = eq + 2 + (after.len() - after.trim_start().len());
        out.get_mut(section).expect("section registered").push(Line {
            number,
            key,
            value,
            value_column,
        });
    }
    Ok(out)
}

fn parse_key(line: &Line, arity: usize, dim: usize) -> Result<Vec<usize>, ManifestError> {
    let parts: Vec<&str> = line.key.split(',').map(str::trim).collect();
    if parts.len() != arity {
        return Err(syntax(line.number, 1, format!("key `{}` needs {} comma-separated indices", line.key, arity)));
    }
    parts
        .iter()
        .map(|p| {
            let i: usize = p.parse().map_err(|_| syntax(line.number, 1, format!("`{p}` is not an index")))?;
            if i == 0 || i > dim {
                return Err(invalid(line.number, format!("index {i} in key `{}` is outside 1..={dim}", line.key)));
            }
            Ok(i - 1)
        })
        .collect()
}

fn parse_value(line: &Line, text: &str, column: usize, table: &VarTable) -> Result<RatFn, ManifestError> {
    szabo_core::parse_expr(text, table).map_err(|e| match e {
        ExprError::UnknownIdentifier { name, .. } => invalid(line.number, format!("undeclared identifier `{name}`")),
        ExprError::Syntax { offset, .. }
        | ExprError::NegativeExponent { offset }
        | ExprError::ExponentTooLarge { offset } => syntax(line.number, column + offset, e.to_string()),
        other => invalid(line.number, other.to_string()),
    })
}

fn check_kinds(line: &Line, value: &RatFn, allowed: &[VarKind]) -> Result<(), ManifestError> {
    for v in value.variables() {
        if !allowed.contains(&v.kind()) {
            return Err(invalid(
                line.number,
                format!("{} variables are not allowed in `{}`", v.kind().as_str(), line.key),
            ));
        }
    }
    Ok(())
}

fn line_of(lines: &[Line], idx: &[usize]) -> usize {
    lines
        .iter()
        .find(|l| {
            let parts: Vec<usize> = l.key.split(',').filter_map(|p| p.trim().parse().ok()).collect();
            parts.iter().zip(idx).all(|(a, b)| *a == b + 1)
        })
        .map_or(0, |l| l.number)
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ManifestError {
    ManifestError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn invalid(line: usize, message: impl Into<String>) -> ManifestError {
    ManifestError::Validation {
        line,
        message: message.into(),
    }
}

impl Manifest {
    /// The connection described by the manifest.
    pub fn connection(&self) -> Connection {
        if let Some(family) = &self.family {
            let p = FamilyParams::from_rationals(family.params.clone());
            return match family.kind {
                FamilyKind::TypeA => type_a_connection(&p),
                FamilyKind::TypeB => type_b_connection(&p),
            };
        }
        let mut c = Connection::zero(self.dim);
        for (&(k, i, j), v) in &self.christoffel {
            match self.torsion {
                Torsion::Symmetric => c.set_symmetric(k, i, j, v.clone()),
                Torsion::Explicit => c.set(k, i, j, v.clone()),
            }
        }
        c
    }

    pub fn family_params(&self) -> Option<FamilyParams> {
        self.family.as_ref().map(|f| FamilyParams::from_rationals(f.params.clone()))
    }

    pub fn render(&self, x: &RatFn) -> String {
        format_with(x, &self.table)
    }

    /// First parameter index free for generated coefficients; `a..f` stay
    /// reserved for family parameters.
    pub fn next_free_param(&self) -> u32 {
        self.vars
            .iter()
            .filter(|(_, v)| v.kind() == VarKind::Parameter)
            .map(|(_, v)| v.index() + 1)
            .fold(7, u32::max)
    }

    /// Serializes back to the manifest format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[meta]");
        let _ = writeln!(out, "dim = {}", self.dim);
        if self.torsion == Torsion::Explicit {
            let _ = writeln!(out, "torsion = explicit");
        }
        if let Some(f) = &self.family {
            let _ = writeln!(out, "family = {}", f.kind.as_str());
            let params: Vec<String> = f.params.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "params = {}", params.join(", "));
        }
        if self.phi == PhiSpec::Generic {
            let _ = writeln!(out, "phi = generic");
        }
        if !self.vars.is_empty() {
            let _ = writeln!(out, "\n[vars]");
            for (name, var) in &self.vars {
                let _ = writeln!(out, "{} = {} {}", name, var.kind().as_str(), var.index());
            }
        }
        if !self.christoffel.is_empty() {
            let _ = writeln!(out, "\n[christoffel]");
            for (&(k, i, j), v) in &self.christoffel {
                let _ = writeln!(out, "{},{},{} = {}", k + 1, i + 1, j + 1, self.render(v));
            }
        }
        if let PhiSpec::Entries(entries) = &self.phi {
            if !entries.is_empty() {
                let _ = writeln!(out, "\n[phi]");
                for (&(i, j), v) in entries {
                    let _ = writeln!(out, "{},{} = {}", i + 1, j + 1, self.render(v));
                }
            }
        }
        if !self.directions.is_empty() {
            let _ = writeln!(out, "\n[directions]");
            for (name, comps) in &self.directions {
                let comps: Vec<String> = comps.iter().map(|c| self.render(c)).collect();
                let _ = writeln!(out, "{} = {}", name, comps.join(", "));
            }
        }
        if !self.point.is_empty() {
            let _ = writeln!(out, "\n[point]");
            for (var, value) in &self.point {
                let _ = writeln!(out, "{} = {}", self.table.name_of(*var), value);
            }
        }
        out
    }
}

pub fn write_manifest(m: &Manifest, path: &Path) -> Result<(), ManifestError> {
    std::fs::write(path, m.to_text())?;
    Ok(())
}
