use std::fmt::Write;

use num_traits::{One, Signed};

use super::monomial::Monomial;
use super::poly::Poly;
use super::ratfn::RatFn;
use super::var::{VarId, VarTable};
use super::Rational;

/// Renders with canonical variable names.
pub fn format_expr(x: &RatFn) -> String {
    render(x, &|v: VarId| v.canonical_name())
}

/// Renders using the display names of `table`.
pub fn format_with(x: &RatFn, table: &VarTable) -> String {
    render(x, &|v: VarId| table.name_of(v))
}

pub fn format_poly(p: &Poly, table: &VarTable) -> String {
    render_poly(p, &|v: VarId| table.name_of(v))
}

fn render(x: &RatFn, name: &dyn Fn(VarId) -> String) -> String {
    if x.is_polynomial() {
        render_poly(x.numer(), name)
    } else {
        format!("({})/({})", render_poly(x.numer(), name), render_poly(x.denom(), name))
    }
}

/// Terms are written from the leading monomial down.
fn render_poly(p: &Poly, name: &dyn Fn(VarId) -> String) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let negative = c.is_negative();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = c.abs();
        render_term(&mut out, &abs, m, name);
    }
    out
}

fn render_term(out: &mut String, abs: &Rational, m: &Monomial, name: &dyn Fn(VarId) -> String) {
    if m.is_one() {
        write!(out, "{abs}").unwrap();
        return;
    }
    if !abs.is_one() {
        write!(out, "{abs}*").unwrap();
    }
    for (j, &(v, e)) in m.factors().iter().enumerate() {
        if j > 0 {
            out.push('*');
        }
        out.push_str(&name(v));
        if e > 1 {
            write!(out, "^{e}").unwrap();
        }
    }
}
