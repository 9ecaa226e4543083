//! Line-oriented text format for structures.
//!
//! ```text
//! signature
//!   E 2
//! structure K2
//!   elements a b
//!   E a b
//!   E b a
//! end
//! ```
//!
//! `#` starts a comment. The `signature` block is optional; without it symbols
//! are declared by their first use. A document may hold several structures,
//! all over the same signature.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, ParseErrorKind, Result};
use crate::structure::{is_token, Constraint, Signature, Structure};

fn perr(line: usize, kind: ParseErrorKind) -> Error {
    Error::Parse { line, kind }
}

struct Pending {
    name: String,
    line: usize,
    elements: Vec<String>,
    index: HashMap<String, usize>,
    constraints: Vec<(usize, Vec<usize>)>,
}

/// Parses every structure in a document. All returned structures share one
/// signature (the declared one, or the inferred one when none is declared).
pub fn parse_document(text: &str) -> Result<Vec<Structure>> {
    let mut signature: Option<Signature> = None;
    let mut inferred = Signature::default();
    let mut in_signature = false;
    let mut current: Option<Pending> = None;
    let mut done: Vec<Pending> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tokens.first() else { continue };

        if let Some(cur) = current.as_mut() {
            match head {
                "end" => {
                    if tokens.len() != 1 {
                        return Err(perr(line, ParseErrorKind::Syntax("`end` takes no arguments".into())));
                    }
                    let cur = current.take().expect("inside a structure");
                    if cur.elements.is_empty() {
                        return Err(perr(line, ParseErrorKind::EmptyUniverse(cur.name)));
                    }
                    done.push(cur);
                }
                "elements" => {
                    for &e in &tokens[1..] {
                        if cur.index.contains_key(e) {
                            return Err(perr(line, ParseErrorKind::DuplicateElement(e.into())));
                        }
                        cur.index.insert(e.to_string(), cur.elements.len());
                        cur.elements.push(e.to_string());
                    }
                }
                "signature" | "structure" => {
                    return Err(perr(
                        line,
                        ParseErrorKind::Syntax(format!("`{head}` inside structure `{}`; missing `end`", cur.name)),
                    ));
                }
                sym => {
                    let found = tokens.len() - 1;
                    let id = match &signature {
                        Some(sig) => sig
                            .lookup(sym)
                            .ok_or_else(|| perr(line, ParseErrorKind::UnknownSymbol(sym.into())))?,
                        None => match inferred.lookup(sym) {
                            Some(id) => id,
                            None => {
                                if found == 0 {
                                    return Err(perr(
                                        line,
                                        ParseErrorKind::Syntax(format!("symbol `{sym}` used without arguments")),
                                    ));
                                }
                                inferred
                                    .push(sym.to_string(), found)
                                    .map_err(|e| perr(line, ParseErrorKind::Syntax(e.to_string())))?
                            }
                        },
                    };
                    let sig = signature.as_ref().unwrap_or(&inferred);
                    if sig.arity(id) != found {
                        return Err(perr(
                            line,
                            ParseErrorKind::ArityMismatch {
                                symbol: sym.into(),
                                expected: sig.arity(id),
                                found,
                            },
                        ));
                    }
                    let mut args = Vec::with_capacity(found);
                    for &e in &tokens[1..] {
                        let idx = cur
                            .index
                            .get(e)
                            .ok_or_else(|| perr(line, ParseErrorKind::UnknownElement(e.into())))?;
                        args.push(*idx);
                    }
                    cur.constraints.push((id, args));
                }
            }
            continue;
        }

        match head {
            "signature" => {
                if tokens.len() != 1 {
                    return Err(perr(line, ParseErrorKind::Syntax("`signature` takes no arguments".into())));
                }
                if signature.is_some() || !done.is_empty() {
                    return Err(perr(
                        line,
                        ParseErrorKind::Syntax("the signature must be declared once, before any structure".into()),
                    ));
                }
                signature = Some(Signature::default());
                in_signature = true;
            }
            "structure" => {
                if tokens.len() != 2 || !is_token(tokens[1]) {
                    return Err(perr(line, ParseErrorKind::Syntax("expected `structure NAME`".into())));
                }
                in_signature = false;
                current = Some(Pending {
                    name: tokens[1].to_string(),
                    line,
                    elements: Vec::new(),
                    index: HashMap::new(),
                    constraints: Vec::new(),
                });
            }
            name if in_signature => {
                if tokens.len() != 2 {
                    return Err(perr(line, ParseErrorKind::Syntax("expected `NAME ARITY`".into())));
                }
                let arity: usize = tokens[1].parse().map_err(|_| {
                    perr(line, ParseErrorKind::Syntax(format!("`{}` is not an arity", tokens[1])))
                })?;
                let sig = signature.as_mut().expect("in signature block");
                if sig.lookup(name).is_some() {
                    return Err(perr(line, ParseErrorKind::DuplicateSymbol(name.into())));
                }
                sig.push(name.to_string(), arity)
                    .map_err(|e| perr(line, ParseErrorKind::Syntax(e.to_string())))?;
            }
            other => {
                return Err(perr(line, ParseErrorKind::Syntax(format!("unexpected `{other}`"))));
            }
        }
    }

    if let Some(cur) = current {
        return Err(perr(
            cur.line,
            ParseErrorKind::Syntax(format!("structure `{}` is missing `end`", cur.name)),
        ));
    }
    let sig = Arc::new(signature.unwrap_or(inferred));
    done.into_iter()
        .map(|p| {
            let cs = p
                .constraints
                .into_iter()
                .map(|(s, args)| Constraint::new(s, args))
                .collect();
            Structure::new(p.name, sig.clone(), p.elements, cs)
        })
        .collect()
}

/// Parses a document holding exactly one structure.
pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut all = parse_document(text)?;
    match all.len() {
        1 => Ok(all.pop().expect("one structure")),
        0 => Err(perr(1, ParseErrorKind::Syntax("no structure in document".into()))),
        n => Err(perr(1, ParseErrorKind::Syntax(format!("expected one structure, found {n}")))),
    }
}

const ELEMENTS_PER_LINE: usize = 16;

fn write_body(out: &mut String, s: &Structure) {
    let _ = writeln!(out, "structure {}", s.name());
    for chunk in s.elements().chunks(ELEMENTS_PER_LINE) {
        let _ = writeln!(out, "  elements {}", chunk.join(" "));
    }
    for c in s.constraints() {
        out.push_str("  ");
        out.push_str(s.signature().name(c.symbol));
        for &a in &c.args {
            out.push(' ');
            out.push_str(s.element_name(a));
        }
        out.push('\n');
    }
    out.push_str("end\n");
}

fn write_signature(out: &mut String, sig: &Signature) {
    out.push_str("signature\n");
    for sym in sig.symbols() {
        let _ = writeln!(out, "  {} {}", sym.name, sym.arity);
    }
}

pub fn serialize_structure(s: &Structure) -> String {
    let mut out = String::new();
    write_signature(&mut out, s.signature());
    write_body(&mut out, s);
    out
}

/// Serializes several structures over one signature into a single document.
pub fn serialize_document(structures: &[Structure]) -> Result<String> {
    let mut out = String::new();
    if let Some(first) = structures.first() {
        write_signature(&mut out, first.signature());
        for s in structures {
            first.check_same_signature(s)?;
            write_body(&mut out, s);
        }
    }
    Ok(out)
}
