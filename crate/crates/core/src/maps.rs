//! Linear maps on a degree window of the algebra.
//!
//! A [`WindowedLinearMap`] is defined on every basis symbol whose degree lies
//! in [-window, window] (central symbols always belong to the domain). Values
//! are arbitrary elements and may leave the window; only the domain is
//! windowed. The two distinguished families are the adjoint maps ad(u) and the
//! layer-grading map δ_t, and a [`DerivationDescriptor`] names one map of the
//! combined family ad(u) + c·δ_t.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{basis_bracket, AlgebraSpec, BasisSymbol, Element};
use crate::error::MapError;
use crate::scalar::QSqrt2;

/// A linear map given entrywise on the window basis. Omitted entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowedLinearMap {
    spec: AlgebraSpec,
    window: i64,
    entries: BTreeMap<BasisSymbol, Element>,
}

impl WindowedLinearMap {
    /// The zero map on the given window.
    pub fn zero(spec: AlgebraSpec, window: i64) -> Result<Self, MapError> {
        if window < 0 {
            return Err(MapError::NegativeWindow(window));
        }
        Ok(WindowedLinearMap {
            spec,
            window,
            entries: BTreeMap::new(),
        })
    }

    /// The adjoint map x ↦ [u, x] restricted to the window.
    pub fn ad(spec: AlgebraSpec, window: i64, u: &Element) -> Result<Self, MapError> {
        let mut map = WindowedLinearMap::zero(spec, window)?;
        spec.validate_element(u)?;
        for sym in map.domain_symbols() {
            let mut value = Element::zero();
            for (&a, ca) in u.iter() {
                for (&out, coeff) in basis_bracket(spec, a, sym).iter() {
                    value.add_term(out, coeff * ca);
                }
            }
            map.entries.insert(sym, value);
        }
        map.prune();
        Ok(map)
    }

    /// The layer-grading map: g(k, m) ↦ k·g(k, m) and c(k) ↦ k·c(k).
    pub fn delta_t(spec: AlgebraSpec, window: i64) -> Result<Self, MapError> {
        let mut map = WindowedLinearMap::zero(spec, window)?;
        for sym in map.domain_symbols() {
            let k = sym.layer();
            if k > 0 {
                map.entries
                    .insert(sym, Element::term(sym, QSqrt2::from_int(k as i64)));
            }
        }
        Ok(map)
    }

    pub fn spec(&self) -> AlgebraSpec {
        self.spec
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    /// Every symbol the map is defined on, in basis order.
    pub fn domain_symbols(&self) -> Vec<BasisSymbol> {
        let mut symbols = self.spec.window_symbols(self.window);
        symbols.sort();
        symbols
    }

    fn check_domain(&self, sym: BasisSymbol) -> Result<(), MapError> {
        self.spec.validate_symbol(sym).map_err(MapError::Algebra)?;
        if let Some(d) = sym.degree() {
            if d.abs() > self.window {
                return Err(MapError::OutOfWindow(sym, self.window));
            }
        }
        Ok(())
    }

    /// The value on one domain symbol.
    pub fn entry(&self, sym: BasisSymbol) -> Result<Element, MapError> {
        self.check_domain(sym)?;
        Ok(self.entries.get(&sym).cloned().unwrap_or_default())
    }

    /// Overwrites the value on one domain symbol.
    pub fn set_entry(&mut self, sym: BasisSymbol, value: Element) -> Result<(), MapError> {
        self.check_domain(sym)?;
        self.spec.validate_element(&value)?;
        if value.is_zero() {
            self.entries.remove(&sym);
        } else {
            self.entries.insert(sym, value);
        }
        Ok(())
    }

    /// Applies the map to an element supported inside the window.
    pub fn apply(&self, x: &Element) -> Result<Element, MapError> {
        let mut out = Element::zero();
        for (&sym, coeff) in x.iter() {
            for (&t, c) in self.entry(sym)?.iter() {
                out.add_term(t, c * coeff);
            }
        }
        Ok(out)
    }

    /// The nonzero entries, in domain order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&BasisSymbol, &Element)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn prune(&mut self) {
        self.entries.retain(|_, v| !v.is_zero());
    }

    pub fn scaled(&self, c: &QSqrt2) -> Self {
        if c.is_zero() {
            return WindowedLinearMap {
                spec: self.spec,
                window: self.window,
                entries: BTreeMap::new(),
            };
        }
        WindowedLinearMap {
            spec: self.spec,
            window: self.window,
            entries: self
                .entries
                .iter()
                .map(|(&s, v)| (s, v.scale(c)))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, MapError> {
        if self.spec != other.spec || self.window != other.window {
            return Err(MapError::SpecMismatch);
        }
        let mut out = self.clone();
        for (&sym, value) in &other.entries {
            for (&t, c) in value.iter() {
                out.entries
                    .entry(sym)
                    .or_default()
                    .add_term(t, c.clone());
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, MapError> {
        self.try_add(&other.scaled(&QSqrt2::from_int(-1)))
    }

    /// Σ cᵢ·mapᵢ over a common (spec, window); the empty sum is the zero map.
    pub fn combine(
        spec: AlgebraSpec,
        window: i64,
        terms: &[(QSqrt2, &WindowedLinearMap)],
    ) -> Result<Self, MapError> {
        let mut out = WindowedLinearMap::zero(spec, window)?;
        for (c, map) in terms {
            if map.spec != spec || map.window != window {
                return Err(MapError::SpecMismatch);
            }
            out = out.try_add(&map.scaled(c))?;
        }
        Ok(out)
    }

    /// Checks D[x, y] = [Dx, y] + [x, Dy] over unordered pairs of domain
    /// symbols. A pair is skipped when [x, y] has graded support outside the
    /// window, since D[x, y] is not defined there.
    pub fn leibniz_check(&self) -> LeibnizReport {
        let symbols = self.domain_symbols();
        let mut checked = 0u64;
        let mut skipped = 0u64;
        let mut violations = Vec::new();
        for (i, &x) in symbols.iter().enumerate() {
            'pair: for &y in &symbols[i + 1..] {
                let xy = basis_bracket(self.spec, x, y);
                for (sym, _) in xy.iter() {
                    if let Some(d) = sym.degree() {
                        if d.abs() > self.window {
                            skipped += 1;
                            continue 'pair;
                        }
                    }
                }
                checked += 1;
                let lhs = self.apply(&xy).expect("bracket support checked");
                let dx = self.entry(x).expect("domain symbol");
                let dy = self.entry(y).expect("domain symbol");
                let rhs = &bracket_with_symbol(self.spec, &dx, y, false)
                    + &bracket_with_symbol(self.spec, &dy, x, true);
                if lhs != rhs {
                    violations.push(LeibnizViolation { x, y, lhs, rhs });
                }
            }
        }
        LeibnizReport {
            pairs_checked: checked,
            pairs_skipped: skipped,
            violations,
        }
    }
}

/// [v, y] when `flip` is false, [y, v] when true, for a basis symbol y.
fn bracket_with_symbol(spec: AlgebraSpec, v: &Element, y: BasisSymbol, flip: bool) -> Element {
    let mut out = Element::zero();
    for (&a, ca) in v.iter() {
        let prod = if flip {
            basis_bracket(spec, y, a)
        } else {
            basis_bracket(spec, a, y)
        };
        for (&sym, coeff) in prod.iter() {
            out.add_term(sym, coeff * ca);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LeibnizReport {
    pub pairs_checked: u64,
    pub pairs_skipped: u64,
    pub violations: Vec<LeibnizViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeibnizViolation {
    pub x: BasisSymbol,
    pub y: BasisSymbol,
    /// D[x, y]
    pub lhs: Element,
    /// [Dx, y] + [x, Dy]
    pub rhs: Element,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Names one member of the derivation family: x ↦ [inner, x] + outer·δ_t(x).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationDescriptor {
    pub inner: Element,
    pub outer: QSqrt2,
}

impl DerivationDescriptor {
    pub fn zero() -> Self {
        DerivationDescriptor {
            inner: Element::zero(),
            outer: QSqrt2::zero(),
        }
    }

    pub fn new(inner: Element, outer: QSqrt2) -> Self {
        DerivationDescriptor { inner, outer }
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero() && self.outer.is_zero()
    }

    /// The named map, restricted to a window.
    pub fn to_map(&self, spec: AlgebraSpec, window: i64) -> Result<WindowedLinearMap, MapError> {
        let ad = WindowedLinearMap::ad(spec, window, &self.inner)?;
        let delta = WindowedLinearMap::delta_t(spec, window)?;
        WindowedLinearMap::combine(
            spec,
            window,
            &[(QSqrt2::one(), &ad), (self.outer.clone(), &delta)],
        )
    }
}

impl fmt::Display for DerivationDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut wrote = false;
        if !self.inner.is_zero() {
            write!(f, "ad({})", self.inner)?;
            wrote = true;
        }
        if !self.outer.is_zero() {
            if wrote {
                write!(f, " + ")?;
            }
            if self.outer == QSqrt2::one() {
                write!(f, "delta_t")?;
            } else if self.outer.is_rational() {
                write!(f, "{}*delta_t", self.outer)?;
            } else {
                write!(f, "({})*delta_t", self.outer)?;
            }
        }
        Ok(())
    }
}
