//! Text and JSON formats: symbol aliases, element literals, and map files.
//!
//! Symbols always parse in the generic `g:layer:degree` / `c:layer` forms. On
//! orders 1 to 3 the usual letter names are accepted and produced as well:
//! `L`, `I`, `C`, `C1` on order 2, plus `J` and `C2` on order 3. Element
//! literals are `+`-separated terms `coeff*basis`, where a coefficient with an
//! irrational part is parenthesized: `(1/2+3/2√2)*L:1`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, BasisSymbol, Element};
use crate::error::FormatError;
use crate::maps::WindowedLinearMap;
use crate::scalar::QSqrt2;

/// Parses a preset name or `n=K[,centerless]`.
pub fn parse_algebra(s: &str) -> Result<AlgebraSpec, FormatError> {
    s.parse().map_err(|_| FormatError::BadAlgebra(s.to_string()))
}

fn graded_alias(order: u32, layer: u32) -> Option<&'static str> {
    match (order, layer) {
        (1..=3, 0) => Some("L"),
        (2, 1) | (3, 2) => Some("I"),
        (3, 1) => Some("J"),
        _ => None,
    }
}

fn central_alias(order: u32, layer: u32) -> Option<&'static str> {
    match (order, layer) {
        (1..=3, 0) => Some("C"),
        (2, 1) | (3, 1) => Some("C1"),
        (3, 2) => Some("C2"),
        _ => None,
    }
}

fn alias_lookup(order: u32, name: &str) -> Option<BasisSymbolKind> {
    for layer in 0..order {
        if graded_alias(order, layer) == Some(name) {
            return Some(BasisSymbolKind::Graded(layer));
        }
        if central_alias(order, layer) == Some(name) {
            return Some(BasisSymbolKind::Central(layer));
        }
    }
    None
}

fn alias_known_somewhere(name: &str) -> bool {
    (1..=3).any(|order| alias_lookup(order, name).is_some())
}

enum BasisSymbolKind {
    Graded(u32),
    Central(u32),
}

/// Renders a symbol with the letter aliases of small orders, falling back to
/// the generic form.
pub fn render_symbol(spec: AlgebraSpec, sym: BasisSymbol) -> String {
    let order = spec.truncation_order();
    match sym {
        BasisSymbol::Graded { layer, degree } => match graded_alias(order, layer) {
            Some(name) => format!("{name}:{degree}"),
            None => sym.to_string(),
        },
        BasisSymbol::Central { layer } => match central_alias(order, layer) {
            Some(name) => name.to_string(),
            None => sym.to_string(),
        },
    }
}

/// Parses a symbol in generic or alias form and validates it against the
/// algebra.
pub fn parse_symbol(spec: AlgebraSpec, s: &str) -> Result<BasisSymbol, FormatError> {
    let s = s.trim();
    let outside = |sym: BasisSymbol| FormatError::SymbolOutsideAlgebra {
        symbol: sym.to_string(),
        algebra: spec.name(),
    };
    if let Ok(sym) = s.parse::<BasisSymbol>() {
        return if spec.contains(sym) {
            Ok(sym)
        } else {
            Err(outside(sym))
        };
    }
    let order = spec.truncation_order();
    let (name, degree) = match s.split_once(':') {
        Some((name, deg)) => {
            let degree: i64 = deg
                .trim()
                .parse()
                .map_err(|_| FormatError::BadSymbol(s.to_string()))?;
            (name.trim(), Some(degree))
        }
        None => (s, None),
    };
    match (alias_lookup(order, name), degree) {
        (Some(BasisSymbolKind::Graded(layer)), Some(d)) => {
            let sym = BasisSymbol::graded(layer, d);
            if spec.contains(sym) {
                Ok(sym)
            } else {
                Err(outside(sym))
            }
        }
        (Some(BasisSymbolKind::Central(layer)), None) => {
            let sym = BasisSymbol::central(layer);
            if spec.contains(sym) {
                Ok(sym)
            } else {
                Err(outside(sym))
            }
        }
        (Some(_), _) => Err(FormatError::BadSymbol(s.to_string())),
        (None, _) if alias_known_somewhere(name) => Err(FormatError::SymbolOutsideAlgebra {
            symbol: s.to_string(),
            algebra: spec.name(),
        }),
        (None, _) => Err(FormatError::BadSymbol(s.to_string())),
    }
}

/// Parses a scalar literal like `3/4`, `-2+1/2√2`, or `sqrt2`.
pub fn parse_scalar(s: &str) -> Result<QSqrt2, FormatError> {
    s.trim()
        .parse()
        .map_err(|_| FormatError::BadScalar(s.to_string()))
}

/// Splits at top-level occurrences of `sep`, treating parentheses as nesting.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses an element literal: `0`, or `+`-separated terms `coeff*basis` with
/// the coefficient optional.
pub fn parse_element(spec: AlgebraSpec, literal: &str) -> Result<Element, FormatError> {
    let bad = |reason: &str| FormatError::BadElement {
        literal: literal.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = literal.trim();
    if trimmed.is_empty() {
        return Err(bad("empty literal"));
    }
    if trimmed == "0" {
        return Ok(Element::zero());
    }
    let mut out = Element::zero();
    for term in split_top_level(trimmed, '+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (coeff, sym_str) = match split_top_level(term, '*').as_slice() {
            [single] => (QSqrt2::one(), *single),
            [coeff_str, sym_str] => {
                let c = coeff_str.trim();
                let c = c
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .unwrap_or(c);
                (parse_scalar(c)?, *sym_str)
            }
            _ => return Err(bad("too many '*' in term")),
        };
        let sym = parse_symbol(spec, sym_str)?;
        out.add_term(sym, coeff);
    }
    Ok(out)
}

/// Renders an element with aliased symbols; irrational coefficients are
/// parenthesized so the literal parses back.
pub fn render_element(spec: AlgebraSpec, x: &Element) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<String> = x
        .iter()
        .map(|(sym, coeff)| {
            let name = render_symbol(spec, *sym);
            if coeff == &QSqrt2::one() {
                name
            } else if coeff.is_rational() {
                format!("{coeff}*{name}")
            } else {
                format!("({coeff})*{name}")
            }
        })
        .collect();
    terms.join(" + ")
}

#[derive(Debug, Serialize, Deserialize)]
struct WireTerm {
    basis: String,
    coeff: QSqrt2,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireEntry {
    basis: String,
    value: Vec<WireTerm>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireMap {
    algebra: String,
    window: i64,
    entries: Vec<WireEntry>,
}

/// Parses a JSON map file. Domain symbols missing from `entries` map to zero;
/// duplicate domain symbols are rejected.
pub fn parse_map_file(text: &str) -> Result<WindowedLinearMap, FormatError> {
    let wire: WireMap =
        serde_json::from_str(text).map_err(|e| FormatError::BadMapFile(e.to_string()))?;
    let spec = parse_algebra(&wire.algebra)?;
    let mut map = WindowedLinearMap::zero(spec, wire.window)?;
    let mut seen = std::collections::BTreeSet::new();
    for entry in &wire.entries {
        let sym = parse_symbol(spec, &entry.basis)?;
        if !seen.insert(sym) {
            return Err(FormatError::BadMapFile(format!(
                "duplicate entry for basis symbol {}",
                entry.basis
            )));
        }
        let mut value = Element::zero();
        for term in &entry.value {
            let vsym = parse_symbol(spec, &term.basis)?;
            value.add_term(vsym, term.coeff.clone());
        }
        map.set_entry(sym, value)?;
    }
    Ok(map)
}

/// Renders a map to the canonical JSON file form: aliased symbols, domain
/// order, zero entries omitted.
pub fn render_map_file(map: &WindowedLinearMap) -> String {
    let spec = map.spec();
    let wire = WireMap {
        algebra: spec.name(),
        window: map.window(),
        entries: map
            .nonzero_entries()
            .map(|(sym, value)| WireEntry {
                basis: render_symbol(spec, *sym),
                value: value
                    .iter()
                    .map(|(vsym, coeff)| WireTerm {
                        basis: render_symbol(spec, *vsym),
                        coeff: coeff.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&wire).expect("map wire form serializes");
    text.push('\n');
    text
}
