use std::collections::BTreeMap;
use std::fmt;

use crate::error::ExprError;

/// Variable classes. The declaration order is also the variable order used by
/// the monomial ordering: base < fiber < direction < parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Base coordinate `u_i`.
    Base,
    /// Cotangent fiber coordinate `u_i'`.
    Fiber,
    /// Direction component `a_i` of a generic tangent vector.
    Direction,
    /// Named constant.
    Parameter,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Base => "base",
            VarKind::Fiber => "fiber",
            VarKind::Direction => "direction",
            VarKind::Parameter => "parameter",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "base" => Some(VarKind::Base),
            "fiber" => Some(VarKind::Fiber),
            "direction" => Some(VarKind::Direction),
            "parameter" | "param" => Some(VarKind::Parameter),
            _ => None,
        }
    }
}

/// A variable: a kind plus a 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    kind: VarKind,
    index: u32,
}

const PARAM_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

impl VarId {
    pub fn new(kind: VarKind, index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VarId { kind, index }
    }

    pub fn base(index: u32) -> Self {
        Self::new(VarKind::Base, index)
    }

    pub fn fiber(index: u32) -> Self {
        Self::new(VarKind::Fiber, index)
    }

    pub fn direction(index: u32) -> Self {
        Self::new(VarKind::Direction, index)
    }

    pub fn param(index: u32) -> Self {
        Self::new(VarKind::Parameter, index)
    }

    pub fn kind(self) -> VarKind {
        self.kind
    }

    pub fn index(self) -> u32 {
        self.index
    }

    /// Canonical name: `u3`, `u3'`, `a3`, and `a`..`f` for the first six
    /// parameters (`p7`, `p8`, ... afterwards).
    pub fn canonical_name(self) -> String {
        match self.kind {
            VarKind::Base => format!("u{}", self.index),
            VarKind::Fiber => format!("u{}'", self.index),
            VarKind::Direction => format!("a{}", self.index),
            VarKind::Parameter => match PARAM_NAMES.get(self.index as usize - 1) {
                Some(name) => (*name).to_string(),
                None => format!("p{}", self.index),
            },
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_name())
    }
}

/// Bidirectional name table used by the parser and the printer.
///
/// Every variable has at most one display name and every name refers to
/// exactly one variable, so rendering through a table is injective.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTable {
    by_name: BTreeMap<String, VarId>,
    by_var: BTreeMap<VarId, String>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical names for `n` base coordinates, their fibers, `n` direction
    /// components and `params` parameters.
    pub fn standard(n: u32, params: u32) -> Self {
        let mut table = Self::new();
        for i in 1..=n {
            for var in [VarId::base(i), VarId::fiber(i), VarId::direction(i)] {
                table.declare(&var.canonical_name(), var).expect("canonical names are distinct");
            }
        }
        for i in 1..=params {
            let var = VarId::param(i);
            table.declare(&var.canonical_name(), var).expect("canonical names are distinct");
        }
        table
    }

    /// Binds `name` to `var`. Fails if either side is already bound elsewhere.
    pub fn declare(&mut self, name: &str, var: VarId) -> Result<(), ExprError> {
        if !is_identifier(name) {
            return Err(ExprError::InvalidName(name.to_string()));
        }
        match (self.by_name.get(name), self.by_var.get(&var)) {
            (Some(v), _) if *v == var => return Ok(()),
            (Some(_), _) => return Err(ExprError::DuplicateName(name.to_string())),
            (None, Some(existing)) => {
                return Err(ExprError::DuplicateVariable {
                    var: var.canonical_name(),
                    existing: existing.clone(),
                })
            }
            (None, None) => {}
        }
        self.by_name.insert(name.to_string(), var);
        self.by_var.insert(var, name.to_string());
        Ok(())
    }

    /// Declares `var` under its canonical name unless it already has a name.
    pub fn ensure(&mut self, var: VarId) -> Result<(), ExprError> {
        if self.by_var.contains_key(&var) {
            return Ok(());
        }
        self.declare(&var.canonical_name(), var)
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// Display name, falling back to the canonical one.
    pub fn name_of(&self, var: VarId) -> String {
        self.by_var.get(&var).cloned().unwrap_or_else(|| var.canonical_name())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VarId)> {
        self.by_var.iter().map(|(v, n)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.by_var.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_var.is_empty()
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '\'')
}
