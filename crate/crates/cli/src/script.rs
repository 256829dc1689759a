//! Export of the obstruction system as a data file or as a script for an
//! external computer algebra system.
//!
//! Lines whose generated polynomial agrees with the bundled reference keep
//! the reference's printed term order, so a pristine build reproduces the
//! reference listing byte for byte. A polynomial that disagrees (which would
//! already fail `verify-appendix`) is written in the requested monomial order.

use obstruct::cpoly::VarStyle;
use obstruct::identity::{IdentityError, ReferenceSystem};
use obstruct::{FieldSpec, MonomialOrder, ObstructionSystem, OrderKind, VarList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    /// `f<i> = <poly>` lines in `l1..l8, m1..m8`, readable by `verify-appendix --data`.
    Internal,
    /// `ring`/`poly`/`ideal` statements in `x(1..8), y(1..8)`.
    Script,
}

pub const SCRIPT_FOOTER: &str = "ideal i=f(1..128); ideal si=std(i); si;";

/// The spelling accepted by `--field`: `q` or `gf:P`.
pub fn field_flag(field: FieldSpec) -> String {
    match field {
        FieldSpec::Rationals => "q".into(),
        FieldSpec::Prime(p) => format!("gf:{p}"),
    }
}

pub fn script_header(field: FieldSpec, order: OrderKind) -> String {
    format!("ring r={},(x(1..8),y(1..8)),{};", field.characteristic(), order.script_name())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Export {
    pub text: String,
    /// 1-based indices written in monomial order because they differ from the reference.
    pub reordered: Vec<usize>,
}

pub fn export(
    system: &ObstructionSystem,
    reference: &ReferenceSystem,
    format: ExportFormat,
    order: OrderKind,
) -> Result<Export, IdentityError> {
    let vars = VarList::parameters();
    let field = system.field();
    let expected = reference.polys(field)?;
    let mono = MonomialOrder::new(order, vars.len());
    let style = match format {
        ExportFormat::Internal => VarStyle::Internal,
        ExportFormat::Script => VarStyle::Script,
    };

    let mut reordered = Vec::new();
    let mut body = Vec::with_capacity(system.len());
    for (i, poly) in system.polys().iter().enumerate() {
        let rendered = match (expected.get(i), reference.printed().get(i)) {
            (Some(r), Some(printed)) if r == poly => printed.render(&vars, style),
            _ => {
                reordered.push(i + 1);
                poly.render_in(&mono, style)
            }
        };
        body.push(match format {
            ExportFormat::Internal => format!("f{} = {rendered}", i + 1),
            ExportFormat::Script => format!("poly f({}) = {rendered};", i + 1),
        });
    }

    let mut text = String::new();
    match format {
        ExportFormat::Internal => {
            if field != FieldSpec::Rationals {
                text.push_str(&format!("# field: {}\n", field_flag(field)));
            }
        }
        ExportFormat::Script => {
            text.push_str(&script_header(field, order));
            text.push('\n');
        }
    }
    for line in body {
        text.push_str(&line);
        text.push('\n');
    }
    if format == ExportFormat::Script {
        text.push_str(SCRIPT_FOOTER);
        text.push('\n');
    }
    Ok(Export { text, reordered })
}

/// Whitespace-insensitive view of a script: one entry per `;`-terminated
/// statement with every run of whitespace (line breaks included) collapsed
/// to a single space. Wrapped listings and single-line exports compare equal.
pub fn statements(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            if !current.is_empty() && !current.ends_with(' ') {
                current.push(' ');
            }
            continue;
        }
        current.push(c);
        if c == ';' {
            out.push(current.trim_end().to_string());
            current.clear();
        }
    }
    let rest = current.trim_end();
    if !rest.is_empty() {
        out.push(rest.to_string());
    }
    out
}

/// Per-line normalization: collapse runs of spaces and trim line ends.
pub fn normalize_lines(text: &str) -> String {
    text.lines().map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("\n")
}
