//! Basis symbols, sparse elements and the bracket of the truncated-loop
//! Virasoro family.
//!
//! The algebra of order n has graded symbols g(k, m) for layers 0 <= k < n and
//! integer degrees m, plus (when centered) one central symbol c(k) per layer.
//! The single bracket rule
//!
//! ```text
//! [g(i, m), g(j, n)] = (m - n) g(i+j, m+n)  +  δ_{m+n,0} (m³ - m)/12 c(i+j)
//! ```
//!
//! with every layer i + j >= n discarded (and central symbols discarded on
//! centerless presentations) reproduces the Witt and Virasoro algebras at
//! n = 1, W(2,2) at n = 2 and the deformed bms3 algebra at n = 3. Central
//! symbols bracket to zero with everything.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::AlgebraError;
use crate::scalar::QSqrt2;

/// Which member of the family we are working in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    truncation_order: u32,
    centered: bool,
}

impl AlgebraSpec {
    /// A generic member. `truncation_order` is the number of loop layers and
    /// must be at least 1.
    pub fn new(truncation_order: u32, centered: bool) -> Self {
        assert!(truncation_order >= 1, "truncation order must be at least 1");
        AlgebraSpec {
            truncation_order,
            centered,
        }
    }

    pub fn witt() -> Self {
        AlgebraSpec::new(1, false)
    }

    pub fn virasoro() -> Self {
        AlgebraSpec::new(1, true)
    }

    pub fn w22() -> Self {
        AlgebraSpec::new(2, true)
    }

    pub fn w22_centerless() -> Self {
        AlgebraSpec::new(2, false)
    }

    pub fn bms3() -> Self {
        AlgebraSpec::new(3, true)
    }

    pub fn bms3_centerless() -> Self {
        AlgebraSpec::new(3, false)
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn layers(&self) -> impl Iterator<Item = u32> {
        0..self.truncation_order
    }

    /// Preset name where one exists, otherwise the generic `n=K[,centerless]`
    /// form. Parsed back by [`AlgebraSpec::from_str`].
    pub fn name(&self) -> String {
        match (self.truncation_order, self.centered) {
            (1, false) => "witt".into(),
            (1, true) => "virasoro".into(),
            (2, true) => "w22".into(),
            (2, false) => "w22-centerless".into(),
            (3, true) => "bms3".into(),
            (3, false) => "bms3-centerless".into(),
            (n, true) => format!("n={n}"),
            (n, false) => format!("n={n},centerless"),
        }
    }

    pub fn contains(&self, symbol: BasisSymbol) -> bool {
        match symbol {
            BasisSymbol::Graded { layer, .. } => layer < self.truncation_order,
            BasisSymbol::Central { layer } => self.centered && layer < self.truncation_order,
        }
    }

    pub fn validate_symbol(&self, symbol: BasisSymbol) -> Result<(), AlgebraError> {
        if self.contains(symbol) {
            Ok(())
        } else {
            Err(AlgebraError::InvalidSymbol(symbol))
        }
    }

    pub fn validate_element(&self, x: &Element) -> Result<(), AlgebraError> {
        for (&sym, _) in x.iter() {
            self.validate_symbol(sym)?;
        }
        Ok(())
    }

    /// All basis symbols with |degree| <= range: the graded window plus, on
    /// centered presentations, every central symbol.
    pub fn window_symbols(&self, range: i64) -> Vec<BasisSymbol> {
        let mut out = Vec::new();
        for layer in self.layers() {
            for degree in -range..=range {
                out.push(BasisSymbol::graded(layer, degree));
            }
        }
        if self.centered {
            for layer in self.layers() {
                out.push(BasisSymbol::central(layer));
            }
        }
        out
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for AlgebraSpec {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "witt" => return Ok(AlgebraSpec::witt()),
            "virasoro" => return Ok(AlgebraSpec::virasoro()),
            "w22" => return Ok(AlgebraSpec::w22()),
            "w22-centerless" => return Ok(AlgebraSpec::w22_centerless()),
            "bms3" => return Ok(AlgebraSpec::bms3()),
            "bms3-centerless" => return Ok(AlgebraSpec::bms3_centerless()),
            other => {
                let rest = other.strip_prefix("n=").ok_or(())?;
                let (num, centered) = match rest.strip_suffix(",centerless") {
                    Some(num) => (num, false),
                    None => (rest, true),
                };
                let n: u32 = num.trim().parse().map_err(|_| ())?;
                if n == 0 {
                    return Err(());
                }
                Ok(AlgebraSpec::new(n, centered))
            }
        }
    }
}

/// One basis symbol: a graded generator or a central generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisSymbol {
    Graded { layer: u32, degree: i64 },
    Central { layer: u32 },
}

impl BasisSymbol {
    pub fn graded(layer: u32, degree: i64) -> Self {
        BasisSymbol::Graded { layer, degree }
    }

    pub fn central(layer: u32) -> Self {
        BasisSymbol::Central { layer }
    }

    pub fn is_graded(&self) -> bool {
        matches!(self, BasisSymbol::Graded { .. })
    }

    pub fn layer(&self) -> u32 {
        match *self {
            BasisSymbol::Graded { layer, .. } | BasisSymbol::Central { layer } => layer,
        }
    }

    pub fn degree(&self) -> Option<i64> {
        match *self {
            BasisSymbol::Graded { degree, .. } => Some(degree),
            BasisSymbol::Central { .. } => None,
        }
    }
}

/// Layer-and-degree form `g:k:m` / `c:k`; the per-preset aliases (`L:m` and
/// friends) live in the format layer where an [`AlgebraSpec`] is in scope.
impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisSymbol::Graded { layer, degree } => write!(f, "g:{layer}:{degree}"),
            BasisSymbol::Central { layer } => write!(f, "c:{layer}"),
        }
    }
}

impl FromStr for BasisSymbol {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if let Some(rest) = s.strip_prefix("g:") {
            let (layer, degree) = rest.split_once(':').ok_or(())?;
            Ok(BasisSymbol::graded(
                layer.parse().map_err(|_| ())?,
                degree.parse().map_err(|_| ())?,
            ))
        } else if let Some(layer) = s.strip_prefix("c:") {
            Ok(BasisSymbol::central(layer.parse().map_err(|_| ())?))
        } else {
            Err(())
        }
    }
}

impl Serialize for BasisSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BasisSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|_| D::Error::custom(format!("bad basis symbol {s:?}")))
    }
}

/// A finite linear combination of basis symbols over Q(√2), stored sparsely.
/// Zero coefficients are never stored, so equality is coefficientwise.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<BasisSymbol, QSqrt2>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn symbol(sym: BasisSymbol) -> Self {
        Element::term(sym, QSqrt2::one())
    }

    pub fn term(sym: BasisSymbol, coeff: QSqrt2) -> Self {
        let mut e = Element::zero();
        e.add_term(sym, coeff);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisSymbol, QSqrt2)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (sym, coeff) in terms {
            e.add_term(sym, coeff);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisSymbol, &QSqrt2)> {
        self.terms.iter()
    }

    pub fn coeff(&self, sym: BasisSymbol) -> QSqrt2 {
        self.terms.get(&sym).cloned().unwrap_or_else(QSqrt2::zero)
    }

    /// Adds `coeff`·`sym`, dropping the entry if the total cancels.
    pub fn add_term(&mut self, sym: BasisSymbol, coeff: QSqrt2) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(sym).or_insert_with(QSqrt2::zero);
        *entry += &coeff;
        if entry.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn scale(&self, c: &QSqrt2) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(&s, v)| (s, v * c))
                .collect(),
        }
    }

    /// The graded terms only.
    pub fn graded_part(&self) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| s.is_graded())
                .map(|(&s, v)| (s, v.clone()))
                .collect(),
        }
    }

    /// The central terms only.
    pub fn central_part(&self) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| !s.is_graded())
                .map(|(&s, v)| (s, v.clone()))
                .collect(),
        }
    }

    pub fn is_pure_central(&self) -> bool {
        !self.is_zero() && self.terms.keys().all(|s| !s.is_graded())
    }

    /// Degrees carrying graded support, with multiplicity collapsed.
    pub fn graded_degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().filter_map(|s| s.degree())
    }

    /// (min, max) over the graded support, None when there is none.
    pub fn degree_span(&self) -> Option<(i64, i64)> {
        let mut it = self.graded_degrees();
        let first = it.next()?;
        let mut lo = first;
        let mut hi = first;
        for d in it {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Some((lo, hi))
    }

    pub fn max_abs_degree(&self) -> Option<i64> {
        self.degree_span().map(|(lo, hi)| lo.abs().max(hi.abs()))
    }

    /// Some(c) when the element is exactly c·`sym` (zero counts, with c = 0).
    pub fn as_multiple_of(&self, sym: BasisSymbol) -> Option<QSqrt2> {
        match self.terms.len() {
            0 => Some(QSqrt2::zero()),
            1 => {
                let (&s, c) = self.terms.iter().next().unwrap();
                (s == sym).then(|| c.clone())
            }
            _ => None,
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (&sym, coeff) in rhs.iter() {
            out.add_term(sym, coeff.clone());
        }
        out
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (&sym, coeff) in rhs.iter() {
            out.add_term(sym, -coeff);
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&QSqrt2::from_int(-1))
    }
}

use std::ops::{Add, Neg, Sub};

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (sym, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if coeff == &QSqrt2::one() {
                write!(f, "{sym}")?;
            } else if coeff.is_rational() {
                write!(f, "{coeff}*{sym}")?;
            } else {
                write!(f, "({coeff})*{sym}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            basis: &'a BasisSymbol,
            coeff: &'a QSqrt2,
        }
        serializer.collect_seq(self.terms.iter().map(|(basis, coeff)| Term { basis, coeff }))
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            basis: BasisSymbol,
            coeff: QSqrt2,
        }
        let terms = Vec::<Term>::deserialize(deserializer)?;
        Ok(Element::from_terms(
            terms.into_iter().map(|t| (t.basis, t.coeff)),
        ))
    }
}

/// The cocycle value (m³ - m)/12 as an exact scalar.
fn cocycle(m: i64) -> QSqrt2 {
    let m = BigInt::from(m);
    let num = &m * &m * &m - &m;
    QSqrt2::from_rational(BigRational::new(num, BigInt::from(12)))
}

/// Bracket of two basis symbols, assumed valid for `spec`.
pub(crate) fn basis_bracket(spec: AlgebraSpec, a: BasisSymbol, b: BasisSymbol) -> Element {
    let (i, m) = match a {
        BasisSymbol::Graded { layer, degree } => (layer, degree),
        BasisSymbol::Central { .. } => return Element::zero(),
    };
    let (j, n) = match b {
        BasisSymbol::Graded { layer, degree } => (layer, degree),
        BasisSymbol::Central { .. } => return Element::zero(),
    };
    let layer = i + j;
    if layer >= spec.truncation_order() {
        return Element::zero();
    }
    let mut out = Element::zero();
    out.add_term(
        BasisSymbol::graded(layer, m + n),
        QSqrt2::from_int(m - n),
    );
    if spec.centered() && m + n == 0 {
        out.add_term(BasisSymbol::central(layer), cocycle(m));
    }
    out
}

/// Bracket of two elements. Fails if either element uses symbols outside the
/// algebra.
pub fn bracket(spec: AlgebraSpec, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
    spec.validate_element(x)?;
    spec.validate_element(y)?;
    let mut out = Element::zero();
    for (&a, ca) in x.iter() {
        for (&b, cb) in y.iter() {
            let prod = ca * cb;
            if prod.is_zero() {
                continue;
            }
            for (&sym, coeff) in basis_bracket(spec, a, b).iter() {
                out.add_term(sym, coeff * &prod);
            }
        }
    }
    Ok(out)
}

/// Result of an exhaustive Jacobi sweep over window basis triples.
#[derive(Debug, Clone, Serialize)]
pub struct JacobiReport {
    pub triples_checked: u64,
    /// First violating triple, with the nonzero cyclic sum.
    pub violation: Option<JacobiViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobiViolation {
    pub x: BasisSymbol,
    pub y: BasisSymbol,
    pub z: BasisSymbol,
    pub residual: Element,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks [x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0 for every triple of window
/// basis symbols (all layers, degrees in [-range, range], centrals included).
pub fn jacobi_check(spec: AlgebraSpec, range: i64) -> JacobiReport {
    let symbols = spec.window_symbols(range);
    let mut checked = 0u64;
    for &x in &symbols {
        for &y in &symbols {
            for &z in &symbols {
                checked += 1;
                let residual = jacobi_residual(spec, x, y, z);
                if !residual.is_zero() {
                    return JacobiReport {
                        triples_checked: checked,
                        violation: Some(JacobiViolation { x, y, z, residual }),
                    };
                }
            }
        }
    }
    JacobiReport {
        triples_checked: checked,
        violation: None,
    }
}

fn jacobi_residual(spec: AlgebraSpec, x: BasisSymbol, y: BasisSymbol, z: BasisSymbol) -> Element {
    let ex = Element::symbol(x);
    let ey = Element::symbol(y);
    let ez = Element::symbol(z);
    let mut sum = bracket(spec, &ex, &bracket(spec, &ey, &ez).unwrap()).unwrap();
    sum = &sum + &bracket(spec, &ey, &bracket(spec, &ez, &ex).unwrap()).unwrap();
    &sum + &bracket(spec, &ez, &bracket(spec, &ex, &ey).unwrap()).unwrap()
}

/// Result of an exhaustive antisymmetry sweep over window basis pairs.
#[derive(Debug, Clone, Serialize)]
pub struct AntisymmetryReport {
    pub pairs_checked: u64,
    pub violation: Option<(BasisSymbol, BasisSymbol)>,
}

impl AntisymmetryReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks [x,y] = -[y,x] for every pair of window basis symbols.
pub fn antisymmetry_check(spec: AlgebraSpec, range: i64) -> AntisymmetryReport {
    let symbols = spec.window_symbols(range);
    let mut checked = 0u64;
    for &x in &symbols {
        for &y in &symbols {
            checked += 1;
            let xy = basis_bracket(spec, x, y);
            let yx = basis_bracket(spec, y, x);
            if !(&xy + &yx).is_zero() {
                return AntisymmetryReport {
                    pairs_checked: checked,
                    violation: Some((x, y)),
                };
            }
        }
    }
    AntisymmetryReport {
        pairs_checked: checked,
        violation: None,
    }
}

/// The basis constructions used to transport the layer-0 machinery into the
/// higher layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// g(0,m) + m·g(1,m); needs order >= 2.
    LPrime,
    /// g(0,m) + √2·m·g(1,m) + m²·g(2,m); needs order >= 3.
    LDoublePrime,
    /// g(1,m) + √2·m·g(2,m); needs order >= 3.
    JPrime,
}

impl Construction {
    fn needs_order(self) -> u32 {
        match self {
            Construction::LPrime => 2,
            Construction::LDoublePrime | Construction::JPrime => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Construction::LPrime => "lprime",
            Construction::LDoublePrime => "ldoubleprime",
            Construction::JPrime => "jprime",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for Construction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "lprime" => Ok(Construction::LPrime),
            "ldoubleprime" => Ok(Construction::LDoublePrime),
            "jprime" => Ok(Construction::JPrime),
            _ => Err(()),
        }
    }
}

/// The degree-m member of a primed basis.
pub fn primed_basis(
    spec: AlgebraSpec,
    construction: Construction,
    m: i64,
) -> Result<Element, AlgebraError> {
    let needs = construction.needs_order();
    if spec.truncation_order() < needs {
        return Err(AlgebraError::OrderTooSmall {
            construction: construction.name(),
            needs,
            has: spec.truncation_order(),
        });
    }
    let mi = QSqrt2::from_int(m);
    let sqrt2m = QSqrt2::sqrt2() * mi.clone();
    let m2 = &mi * &mi;
    Ok(match construction {
        Construction::LPrime => Element::from_terms([
            (BasisSymbol::graded(0, m), QSqrt2::one()),
            (BasisSymbol::graded(1, m), mi),
        ]),
        Construction::LDoublePrime => Element::from_terms([
            (BasisSymbol::graded(0, m), QSqrt2::one()),
            (BasisSymbol::graded(1, m), sqrt2m),
            (BasisSymbol::graded(2, m), m2),
        ]),
        Construction::JPrime => Element::from_terms([
            (BasisSymbol::graded(1, m), QSqrt2::one()),
            (BasisSymbol::graded(2, m), sqrt2m),
        ]),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub identities_checked: u64,
    pub violations: Vec<ConstructionViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionViolation {
    pub identity: String,
    pub m: i64,
    pub n: i64,
    pub lhs: Element,
    pub rhs: Element,
}

impl ConstructionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies the bracket identities of a primed basis for all degree pairs in
/// [-range, range], by exact equality.
///
/// The identities are those of the centerless presentations; on a centered
/// algebra the cocycle shows up at m + n = 0 and is reported as a violation,
/// which is the honest answer there.
pub fn verify_construction(
    spec: AlgebraSpec,
    construction: Construction,
    range: i64,
) -> Result<ConstructionReport, AlgebraError> {
    // (name, left family, right family, expected family), expected scaled by m - n
    type Family = Box<dyn Fn(i64) -> Result<Element, AlgebraError>>;
    let prime = move |c: Construction| -> Family {
        Box::new(move |m| primed_basis(spec, c, m))
    };
    let layer = move |k: u32| -> Family {
        Box::new(move |m| {
            spec.validate_symbol(BasisSymbol::graded(k, m))?;
            Ok(Element::symbol(BasisSymbol::graded(k, m)))
        })
    };

    let identities: Vec<(String, Family, Family, Family)> = match construction {
        Construction::LPrime => vec![
            (
                "[L', L']".into(),
                prime(Construction::LPrime),
                prime(Construction::LPrime),
                prime(Construction::LPrime),
            ),
            (
                "[L', g1]".into(),
                prime(Construction::LPrime),
                layer(1),
                layer(1),
            ),
        ],
        Construction::LDoublePrime => vec![
            (
                "[L'', L'']".into(),
                prime(Construction::LDoublePrime),
                prime(Construction::LDoublePrime),
                prime(Construction::LDoublePrime),
            ),
            (
                "[L'', J']".into(),
                prime(Construction::LDoublePrime),
                prime(Construction::JPrime),
                prime(Construction::JPrime),
            ),
            (
                "[L'', g2]".into(),
                prime(Construction::LDoublePrime),
                layer(2),
                layer(2),
            ),
            (
                "[J', J']".into(),
                prime(Construction::JPrime),
                prime(Construction::JPrime),
                layer(2),
            ),
        ],
        Construction::JPrime => vec![(
            "[J', J']".into(),
            prime(Construction::JPrime),
            prime(Construction::JPrime),
            layer(2),
        )],
    };

    let mut checked = 0u64;
    let mut violations = Vec::new();
    for (name, left, right, expected) in &identities {
        for m in -range..=range {
            for n in -range..=range {
                checked += 1;
                let lhs = bracket(spec, &left(m)?, &right(n)?)?;
                let rhs = expected(m + n)?.scale(&QSqrt2::from_int(m - n));
                if lhs != rhs {
                    violations.push(ConstructionViolation {
                        identity: name.clone(),
                        m,
                        n,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    Ok(ConstructionReport {
        identities_checked: checked,
        violations,
    })
}

/// Where an element's graded support sits, per layer, per residue class of
/// the degree modulo a fixed m. Central terms carry no degree and are not
/// profiled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportProfile {
    pub modulus: i64,
    /// (layer, residue in 0..|m|) -> inclusive degree range present there.
    pub classes: BTreeMap<(u32, i64), (i64, i64)>,
}

impl SupportProfile {
    pub fn present(&self, layer: u32, residue: i64) -> bool {
        self.classes.contains_key(&(layer, residue))
    }

    pub fn range(&self, layer: u32, residue: i64) -> Option<(i64, i64)> {
        self.classes.get(&(layer, residue)).copied()
    }

    /// The residue classes hit by a given layer.
    pub fn layer_residues(&self, layer: u32) -> Vec<i64> {
        self.classes
            .keys()
            .filter(|(l, _)| *l == layer)
            .map(|&(_, r)| r)
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Profiles the graded support of `x` modulo `modulus`.
pub fn support_profile(x: &Element, modulus: i64) -> Result<SupportProfile, AlgebraError> {
    if modulus == 0 {
        return Err(AlgebraError::ZeroModulus);
    }
    let md = modulus.abs();
    let mut classes: BTreeMap<(u32, i64), (i64, i64)> = BTreeMap::new();
    for (sym, _) in x.iter() {
        if let BasisSymbol::Graded { layer, degree } = *sym {
            let residue = degree.rem_euclid(md);
            classes
                .entry((layer, residue))
                .and_modify(|(lo, hi)| {
                    *lo = (*lo).min(degree);
                    *hi = (*hi).max(degree);
                })
                .or_insert((degree, degree));
        }
    }
    Ok(SupportProfile { modulus, classes })
}
