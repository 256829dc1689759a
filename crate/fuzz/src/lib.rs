//! Fuzz harness bodies, one per parser or decoder entry point. Each accepts
//! arbitrary bytes, must never panic, and checks a render/parse round trip
//! whenever the input is accepted.
//!
//! The same functions replay the checked-in corpus from the CLI crate's test
//! suite, so seeds stay valid even where `cargo fuzz` is unavailable.

use obstruct::cpoly::{PrintedPoly, VarStyle};
use obstruct::identity::ReferenceSystem;
use obstruct::{FieldSpec, OrderKind, ParamPoly, VarList, Word};
use obstruct_cli::input::{infer_vars, parse_system};
use obstruct_cli::report::RunReport;

/// Longer inputs only slow the fuzzer down without reaching new code.
const MAX_INPUT: usize = 1 << 16;

fn text(data: &[u8]) -> Option<&str> {
    if data.len() > MAX_INPUT {
        return None;
    }
    std::str::from_utf8(data).ok()
}

pub fn word_parse(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(w) = Word::parse(s) {
        let rendered = w.to_string();
        assert_eq!(Word::parse(&rendered).as_ref(), Ok(&w), "{rendered}");
        assert_eq!(w.leaves().len(), w.degree());
    }
}

pub fn poly_parse(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let vars = VarList::parameters();
    let Ok(printed) = PrintedPoly::parse(s, &vars) else { return };
    // Printed form survives rendering in either variable style.
    for style in [VarStyle::Internal, VarStyle::Script] {
        let again = PrintedPoly::parse(&printed.render(&vars, style), &vars).expect("rendered form parses");
        assert_eq!(
            again.to_poly(FieldSpec::Rationals, vars.clone()),
            printed.to_poly(FieldSpec::Rationals, vars.clone())
        );
    }
    for field in [FieldSpec::Rationals, FieldSpec::Prime(2), FieldSpec::Prime(32003)] {
        if let Ok(p) = printed.to_poly(field, vars.clone()) {
            let back =
                ParamPoly::parse(&p.render(VarStyle::Internal), field, vars.clone()).expect("canonical form parses");
            assert_eq!(back, p);
        }
    }
}

pub fn reference_parse(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(r) = ReferenceSystem::parse(s) {
        let _ = r.polys(FieldSpec::Rationals);
        let _ = r.polys(FieldSpec::Prime(7));
    }
}

pub fn system_input(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(vars) = infer_vars(s) {
        if let Ok(polys) = parse_system(s, FieldSpec::Prime(101), vars.clone()) {
            assert!(polys.iter().all(|p| p.nvars() == vars.len()));
        }
    }
}

pub fn flag_parse(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(f) = s.parse::<FieldSpec>() {
        if let FieldSpec::Prime(p) = f {
            assert!(obstruct::coeff::is_prime_u32(p as u64));
        }
        assert_eq!(obstruct_cli::script::field_flag(f).parse::<FieldSpec>().ok(), Some(f));
    }
    if let Ok(o) = s.parse::<OrderKind>() {
        assert_eq!(o.script_name().parse::<OrderKind>().ok(), Some(o));
    }
    if let Ok(r) = obstruct_cli::parse_range(s) {
        assert!(*r.start() >= 1 && r.start() <= r.end() && *r.end() <= 128);
    }
}

pub fn report_json(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(r) = serde_json::from_str::<RunReport>(s) {
        let again: RunReport = serde_json::from_str(&r.to_json()).expect("serialized report parses");
        assert_eq!(again.without_timings().to_json(), r.without_timings().to_json());
    }
}

/// Target name and body, in the order of the `fuzz_targets/` directory.
pub type Harness = fn(&[u8]);

pub const TARGETS: [(&str, Harness); 6] = [
    ("flag_parse", flag_parse),
    ("poly_parse", poly_parse),
    ("reference_parse", reference_parse),
    ("report_json", report_json),
    ("system_input", system_input),
    ("word_parse", word_parse),
];
