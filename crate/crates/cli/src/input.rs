//! Reading polynomial systems from text: one polynomial per line, `#`
//! comments, an optional `label =` prefix and an optional trailing `;`.

use std::sync::Arc;

use obstruct::cpoly::MAX_VARS;
use obstruct::{FieldSpec, ParamPoly, VarList};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("the input contains no polynomials")]
    Empty,
    #[error("{0} distinct variables (at most {MAX_VARS} are supported)")]
    TooManyVariables(usize),
}

/// Identifiers in order of first appearance. An identifier is a letter or `_`
/// followed by letters, digits, `_` or `'`, optionally followed by `(<digits>)`.
pub fn scan_identifiers(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if !(c.is_alphabetic() || c == '_') {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
            i += 1;
        }
        if i < chars.len() && chars[i] == '(' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 && j < chars.len() && chars[j] == ')' {
                i = j + 1;
            }
        }
        let name: String = chars[start..i].iter().collect();
        if !out.contains(&name) {
            out.push(name);
        }
    }
    out
}

fn payload(raw: &str) -> &str {
    let line = raw.split('#').next().unwrap_or("").trim();
    let line = line.rsplit_once('=').map_or(line, |(_, rhs)| rhs).trim();
    line.trim_end_matches(';').trim_end()
}

/// The sixteen parameters when every identifier names one of them (in
/// either spelling), otherwise the identifiers in order of appearance.
pub fn infer_vars(text: &str) -> Result<Arc<VarList>, InputError> {
    let bodies: String = text.lines().map(payload).collect::<Vec<_>>().join("\n");
    let names = scan_identifiers(&bodies);
    let params = VarList::parameters();
    if names.iter().all(|n| params.index_of(n).is_some()) {
        return Ok(params);
    }
    if names.len() > MAX_VARS {
        return Err(InputError::TooManyVariables(names.len()));
    }
    VarList::new(names.clone()).map_err(|_| InputError::TooManyVariables(names.len()))
}

pub fn parse_system(text: &str, field: FieldSpec, vars: Arc<VarList>) -> Result<Vec<ParamPoly>, InputError> {
    let mut polys = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let body = payload(raw);
        if body.is_empty() {
            continue;
        }
        let p = ParamPoly::parse(body, field, vars.clone())
            .map_err(|e| InputError::Line { line: k + 1, msg: e.to_string() })?;
        polys.push(p);
    }
    if polys.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(polys)
}
