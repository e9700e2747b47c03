//! Exact linear algebra over Q(√2): solving with infeasibility certificates,
//! witness systems for the pointwise derivation problem, and window-scale
//! derivation spaces.
//!
//! Infeasibility is never a failure to find a solution; it is a checkable
//! object. When elimination hits an inconsistent row, the accumulated row
//! transform is returned as a vector z with z·A = 0 and z·b ≠ 0, which any
//! reader can re-verify against the untouched system.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{basis_bracket, AlgebraSpec, BasisSymbol, Element};
use crate::error::{MapError, SolveError};
use crate::maps::{DerivationDescriptor, WindowedLinearMap};
use crate::scalar::QSqrt2;

/// What an unknown stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum VarLabel {
    /// Coefficient of a basis symbol in the inner part u.
    Inner(BasisSymbol),
    /// Coefficient of δ_t.
    Outer,
    /// Matrix entry of an unknown map: coefficient of `to` in D(`from`).
    Entry { from: BasisSymbol, to: BasisSymbol },
    /// Anonymous unknown.
    Aux(usize),
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarLabel::Inner(s) => write!(f, "u[{s}]"),
            VarLabel::Outer => write!(f, "outer"),
            VarLabel::Entry { from, to } => write!(f, "D[{from} -> {to}]"),
            VarLabel::Aux(i) => write!(f, "x{i}"),
        }
    }
}

/// A dense linear system A·x = b with labeled columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    labels: Vec<VarLabel>,
    rows: Vec<Vec<QSqrt2>>,
    rhs: Vec<QSqrt2>,
}

/// Result of exact elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A particular solution (free variables set to zero) and a basis of the
    /// homogeneous solution space.
    Solution {
        particular: Vec<QSqrt2>,
        nullspace: Vec<Vec<QSqrt2>>,
    },
    /// No solution; `certificate`·A = 0 while `certificate`·b ≠ 0.
    Infeasible { certificate: Vec<QSqrt2> },
}

impl LinearSystem {
    pub fn new(labels: Vec<VarLabel>) -> Self {
        LinearSystem {
            labels,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<QSqrt2>, rhs: QSqrt2) -> Result<(), SolveError> {
        if coeffs.len() != self.labels.len() {
            return Err(SolveError::Shape(format!(
                "row has {} coefficients, system has {} variables",
                coeffs.len(),
                self.labels.len()
            )));
        }
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn row(&self, r: usize) -> (&[QSqrt2], &QSqrt2) {
        (&self.rows[r], &self.rhs[r])
    }

    /// A·x for a full assignment x.
    pub fn multiply(&self, x: &[QSqrt2]) -> Result<Vec<QSqrt2>, SolveError> {
        if x.len() != self.labels.len() {
            return Err(SolveError::Shape(format!(
                "assignment has {} entries, system has {} variables",
                x.len(),
                self.labels.len()
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| dot(row, x))
            .collect())
    }

    /// Checks that x solves every equation exactly.
    pub fn check_solution(&self, x: &[QSqrt2]) -> Result<bool, SolveError> {
        Ok(self
            .multiply(x)?
            .iter()
            .zip(&self.rhs)
            .all(|(lhs, rhs)| lhs == rhs))
    }

    /// Checks z·A = 0 and z·b ≠ 0.
    pub fn verify_certificate(&self, z: &[QSqrt2]) -> bool {
        if z.len() != self.rows.len() {
            return false;
        }
        for col in 0..self.labels.len() {
            let mut acc = QSqrt2::zero();
            for (r, zr) in z.iter().enumerate() {
                acc += &(zr * &self.rows[r][col]);
            }
            if !acc.is_zero() {
                return false;
            }
        }
        let mut acc = QSqrt2::zero();
        for (r, zr) in z.iter().enumerate() {
            acc += &(zr * &self.rhs[r]);
        }
        !acc.is_zero()
    }

    /// Gauss-Jordan elimination with first-nonzero pivoting, tracking the row
    /// transform so an inconsistent row yields its own certificate.
    pub fn solve(&self) -> SolveOutcome {
        let nrows = self.rows.len();
        let ncols = self.labels.len();
        let mut a = self.rows.clone();
        let mut b = self.rhs.clone();
        // t holds the row transform: t[r] · original = current row r
        let mut t: Vec<Vec<QSqrt2>> = (0..nrows)
            .map(|r| {
                let mut row = vec![QSqrt2::zero(); nrows];
                row[r] = QSqrt2::one();
                row
            })
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut next = 0usize;
        for col in 0..ncols {
            let Some(pr) = (next..nrows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(next, pr);
            b.swap(next, pr);
            t.swap(next, pr);
            let inv = a[next][col].checked_inv().expect("pivot is nonzero");
            for v in a[next].iter_mut() {
                *v *= &inv;
            }
            b[next] = &b[next] * &inv;
            for v in t[next].iter_mut() {
                *v *= &inv;
            }
            let pivot_a = a[next].clone();
            let pivot_b = b[next].clone();
            let pivot_t = t[next].clone();
            for r in 0..nrows {
                if r == next || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for (dst, src) in a[r].iter_mut().zip(&pivot_a) {
                    *dst -= &(&f * src);
                }
                b[r] -= &(&f * &pivot_b);
                for (dst, src) in t[r].iter_mut().zip(&pivot_t) {
                    *dst -= &(&f * src);
                }
            }
            pivots.push((col, next));
            next += 1;
            if next == nrows {
                break;
            }
        }
        for r in next..nrows {
            debug_assert!(a[r].iter().all(QSqrt2::is_zero));
            if !b[r].is_zero() {
                return SolveOutcome::Infeasible {
                    certificate: t.swap_remove(r),
                };
            }
        }
        let mut particular = vec![QSqrt2::zero(); ncols];
        for &(col, row) in &pivots {
            particular[col] = b[row].clone();
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(c, _)| c).collect();
        let mut nullspace = Vec::new();
        for f in 0..ncols {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![QSqrt2::zero(); ncols];
            v[f] = QSqrt2::one();
            for &(col, row) in &pivots {
                v[col] = -&a[row][f];
            }
            nullspace.push(v);
        }
        SolveOutcome::Solution {
            particular,
            nullspace,
        }
    }

    fn rank_with_order(&self, cols: impl Iterator<Item = usize>) -> usize {
        let nrows = self.rows.len();
        let mut a = self.rows.clone();
        let mut next = 0usize;
        for col in cols {
            let Some(pr) = (next..nrows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(next, pr);
            let inv = a[next][col].checked_inv().expect("pivot is nonzero");
            for v in a[next].iter_mut() {
                *v *= &inv;
            }
            let pivot = a[next].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == next || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (dst, src) in row.iter_mut().zip(&pivot) {
                    *dst -= &(&f * src);
                }
            }
            next += 1;
            if next == nrows {
                break;
            }
        }
        next
    }

    /// Rank by elimination scanning columns left to right.
    pub fn rank_forward(&self) -> usize {
        self.rank_with_order(0..self.labels.len())
    }

    /// Rank by elimination scanning columns right to left — an independent
    /// computation path for cross-checking.
    pub fn rank_reverse(&self) -> usize {
        self.rank_with_order((0..self.labels.len()).rev())
    }
}

fn dot(row: &[QSqrt2], x: &[QSqrt2]) -> QSqrt2 {
    let mut acc = QSqrt2::zero();
    for (a, b) in row.iter().zip(x) {
        acc += &(a * b);
    }
    acc
}

/// δ_t applied to an element, without building a whole map.
pub(crate) fn delta_t_value(x: &Element) -> Element {
    let mut out = Element::zero();
    for (&sym, coeff) in x.iter() {
        let k = sym.layer();
        if k > 0 {
            out.add_term(sym, coeff * &QSqrt2::from_int(k as i64));
        }
    }
    out
}

/// The pointwise witness problem posed as a linear system: find u (supported
/// on |degree| ≤ support_window) and optionally an outer coefficient c with
/// [u, probe] + c·δ_t(probe) = target.
///
/// Rows cover every symbol reachable from any unknown — not just the target
/// support — so degree chains terminate against the window boundary instead
/// of escaping it, which is what makes infeasibility meaningful.
#[derive(Debug, Clone)]
pub struct WitnessSystem {
    pub spec: AlgebraSpec,
    pub probe: Element,
    pub target: Element,
    pub support_window: i64,
    pub include_outer: bool,
    pub row_symbols: Vec<BasisSymbol>,
    pub system: LinearSystem,
}

/// Window default: how far the inner support must reach to map the probe onto
/// the target, plus slack, clamped to a cap.
pub fn default_support_window(probe: &Element, target: &Element, slack: i64, cap: i64) -> i64 {
    let (pmin, pmax) = probe.degree_span().unwrap_or((0, 0));
    let (tmin, tmax) = target.degree_span().unwrap_or((0, 0));
    let base = (tmin - pmax).abs().max((tmax - pmin).abs());
    (base + slack).min(cap).max(0)
}

pub const DEFAULT_WITNESS_SLACK: i64 = 2;
pub const DEFAULT_WITNESS_CAP: i64 = 64;

pub fn build_witness_system(
    spec: AlgebraSpec,
    probe: &Element,
    target: &Element,
    support_window: i64,
    include_outer: bool,
) -> Result<WitnessSystem, SolveError> {
    if support_window < 0 {
        return Err(SolveError::NegativeSupportWindow(support_window));
    }
    spec.validate_element(probe).map_err(MapError::from)?;
    spec.validate_element(target).map_err(MapError::from)?;

    let mut inner_symbols = spec.window_symbols(support_window);
    inner_symbols.sort();
    let mut labels: Vec<VarLabel> = inner_symbols.iter().map(|&s| VarLabel::Inner(s)).collect();
    if include_outer {
        labels.push(VarLabel::Outer);
    }

    // one column element per unknown: its contribution to the left-hand side
    let mut columns: Vec<Element> = Vec::with_capacity(labels.len());
    for &s in &inner_symbols {
        let mut col = Element::zero();
        for (&p, cp) in probe.iter() {
            for (&out, coeff) in basis_bracket(spec, s, p).iter() {
                col.add_term(out, coeff * cp);
            }
        }
        columns.push(col);
    }
    if include_outer {
        columns.push(delta_t_value(probe));
    }

    let mut row_set: std::collections::BTreeSet<BasisSymbol> = BTreeSet::new();
    for col in &columns {
        for (&s, _) in col.iter() {
            row_set.insert(s);
        }
    }
    for (&s, _) in target.iter() {
        row_set.insert(s);
    }
    let row_symbols: Vec<BasisSymbol> = row_set.into_iter().collect();

    let mut system = LinearSystem::new(labels);
    for &r in &row_symbols {
        let coeffs: Vec<QSqrt2> = columns.iter().map(|c| c.coeff(r)).collect();
        system.add_row(coeffs, target.coeff(r))?;
    }
    Ok(WitnessSystem {
        spec,
        probe: probe.clone(),
        target: target.clone(),
        support_window,
        include_outer,
        row_symbols,
        system,
    })
}

use std::collections::BTreeSet;

/// Verdict of a pointwise witness problem.
#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    /// Some derivation in the family maps probe to target; the descriptor is
    /// the particular solution (free coordinates zero) and `nullity` counts
    /// the degrees of freedom of the witness space.
    Witness {
        descriptor: DerivationDescriptor,
        nullity: usize,
    },
    /// No derivation in the family does, with an exact certificate.
    Infeasible(WitnessRejection),
}

impl WitnessOutcome {
    pub fn is_witnessed(&self) -> bool {
        matches!(self, WitnessOutcome::Witness { .. })
    }
}

/// A failed witness problem together with its certificate.
#[derive(Debug, Clone)]
pub struct WitnessRejection {
    pub system: WitnessSystem,
    pub certificate: Vec<QSqrt2>,
}

impl WitnessRejection {
    /// Re-verifies z·A = 0 ∧ z·b ≠ 0 against the stored system.
    pub fn verify(&self) -> bool {
        self.system.system.verify_certificate(&self.certificate)
    }

    /// The row symbols on which the certificate is supported.
    pub fn certificate_support(&self) -> Vec<BasisSymbol> {
        self.system
            .row_symbols
            .iter()
            .zip(&self.certificate)
            .filter(|(_, z)| !z.is_zero())
            .map(|(&s, _)| s)
            .collect()
    }
}

pub fn witness_solve(
    spec: AlgebraSpec,
    probe: &Element,
    target: &Element,
    support_window: Option<i64>,
    include_outer: bool,
) -> Result<WitnessOutcome, SolveError> {
    let window = support_window.unwrap_or_else(|| {
        default_support_window(probe, target, DEFAULT_WITNESS_SLACK, DEFAULT_WITNESS_CAP)
    });
    let ws = build_witness_system(spec, probe, target, window, include_outer)?;
    match ws.system.solve() {
        SolveOutcome::Solution {
            particular,
            nullspace,
        } => {
            let mut inner = Element::zero();
            let mut outer = QSqrt2::zero();
            for (label, value) in ws.system.labels().iter().zip(&particular) {
                match label {
                    VarLabel::Inner(s) => inner.add_term(*s, value.clone()),
                    VarLabel::Outer => outer = value.clone(),
                    _ => unreachable!("witness systems only use Inner/Outer"),
                }
            }
            Ok(WitnessOutcome::Witness {
                descriptor: DerivationDescriptor::new(inner, outer),
                nullity: nullspace.len(),
            })
        }
        SolveOutcome::Infeasible { certificate } => Ok(WitnessOutcome::Infeasible(
            WitnessRejection {
                system: ws,
                certificate,
            },
        )),
    }
}

/// Incremental sparse Gaussian elimination for large homogeneous systems.
/// Rows are inserted one at a time and reduced against the pivots found so
/// far; only independent rows are kept.
struct RowReducer {
    ncols: usize,
    /// pivot column -> normalized sparse row with leading 1 at that column
    pivots: BTreeMap<usize, BTreeMap<usize, QSqrt2>>,
}

impl RowReducer {
    fn new(ncols: usize) -> Self {
        RowReducer {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    fn insert(&mut self, mut row: BTreeMap<usize, QSqrt2>) {
        loop {
            row.retain(|_, v| !v.is_zero());
            let Some((&lead, _)) = row.iter().next() else {
                return;
            };
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    let f = row[&lead].clone();
                    for (&c, v) in pivot {
                        let delta = &f * v;
                        let entry = row.entry(c).or_insert_with(QSqrt2::zero);
                        *entry -= &delta;
                    }
                }
                None => {
                    let inv = row[&lead].checked_inv().expect("leading entry nonzero");
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    row.retain(|_, v| !v.is_zero());
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Back-substitutes to reduced echelon form and reads off a nullspace
    /// basis, one vector per free column.
    fn nullspace(mut self) -> Vec<Vec<QSqrt2>> {
        let cols: Vec<usize> = self.pivots.keys().copied().collect();
        for &pc in cols.iter().rev() {
            let prow = self.pivots[&pc].clone();
            for (&qc, qrow) in self.pivots.iter_mut() {
                if qc >= pc {
                    continue;
                }
                let Some(f) = qrow.get(&pc).cloned() else {
                    continue;
                };
                for (&c, v) in &prow {
                    let delta = &f * v;
                    let entry = qrow.entry(c).or_insert_with(QSqrt2::zero);
                    *entry -= &delta;
                }
                qrow.retain(|_, v| !v.is_zero());
            }
        }
        let mut basis = Vec::new();
        for f in 0..self.ncols {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut v = vec![QSqrt2::zero(); self.ncols];
            v[f] = QSqrt2::one();
            for (&pc, prow) in &self.pivots {
                if let Some(val) = prow.get(&f) {
                    v[pc] = -val;
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// The space of degree-homogeneous window derivations: maps D with
/// D(g(k, m)) supported on degree m + shift (any layer; central symbols
/// allowed exactly when m + shift = 0), D(c(k)) central when shift = 0 and
/// zero otherwise, satisfying the Leibniz identity on every window pair whose
/// bracket stays inside the window.
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub spec: AlgebraSpec,
    pub degree_shift: i64,
    pub window: i64,
    pub dimension: usize,
    pub basis: Vec<WindowedLinearMap>,
    pub labels: Vec<VarLabel>,
    pub basis_coords: Vec<Vec<QSqrt2>>,
    pub unknowns: usize,
    pub equations: u64,
}

pub fn derivation_space(
    spec: AlgebraSpec,
    degree_shift: i64,
    window: i64,
) -> Result<DerivationSpace, SolveError> {
    if window < 0 {
        return Err(SolveError::Map(MapError::NegativeWindow(window)));
    }
    if degree_shift.abs() > window {
        return Err(SolveError::DegreeOutsideWindow {
            degree: degree_shift,
            window,
        });
    }
    let n = spec.truncation_order();

    // unknown pattern: for each domain symbol, its allowed image symbols
    let mut labels: Vec<VarLabel> = Vec::new();
    let mut allowed: BTreeMap<BasisSymbol, Vec<(BasisSymbol, usize)>> = BTreeMap::new();
    let mut graded_domain: Vec<BasisSymbol> = Vec::new();
    for k in 0..n {
        for m in -window..=window {
            graded_domain.push(BasisSymbol::graded(k, m));
        }
    }
    graded_domain.sort();
    for &from in &graded_domain {
        let m = from.degree().unwrap();
        let mut images = Vec::new();
        for j in 0..n {
            images.push(BasisSymbol::graded(j, m + degree_shift));
        }
        if m + degree_shift == 0 && spec.centered() {
            for j in 0..n {
                images.push(BasisSymbol::central(j));
            }
        }
        let entry = allowed.entry(from).or_default();
        for to in images {
            entry.push((to, labels.len()));
            labels.push(VarLabel::Entry { from, to });
        }
    }
    if spec.centered() && degree_shift == 0 {
        for k in 0..n {
            let from = BasisSymbol::central(k);
            let entry = allowed.entry(from).or_default();
            for j in 0..n {
                let to = BasisSymbol::central(j);
                entry.push((to, labels.len()));
                labels.push(VarLabel::Entry { from, to });
            }
        }
    }

    let ncols = labels.len();
    let mut reducer = RowReducer::new(ncols);
    let mut equations = 0u64;

    // Leibniz rows over unordered graded pairs; pairs with a central member
    // never constrain anything (both sides vanish identically).
    for (i, &x) in graded_domain.iter().enumerate() {
        for &y in &graded_domain[i + 1..] {
            let xy = basis_bracket(spec, x, y);
            let in_window = xy.iter().all(|(s, _)| match s.degree() {
                Some(d) => d.abs() <= window,
                None => true,
            });
            if !in_window {
                continue;
            }
            // bucket: row symbol -> sparse coefficient row
            let mut bucket: BTreeMap<BasisSymbol, BTreeMap<usize, QSqrt2>> = BTreeMap::new();
            // D[x, y]
            for (&r, cr) in xy.iter() {
                if let Some(imgs) = allowed.get(&r) {
                    for &(to, idx) in imgs {
                        let entry = bucket
                            .entry(to)
                            .or_default()
                            .entry(idx)
                            .or_insert_with(QSqrt2::zero);
                        *entry += cr;
                    }
                }
            }
            // -[Dx, y] and -[x, Dy]
            for (dom, other, flip) in [(x, y, false), (y, x, true)] {
                for &(to, idx) in &allowed[&dom] {
                    let prod = if flip {
                        basis_bracket(spec, other, to)
                    } else {
                        basis_bracket(spec, to, other)
                    };
                    for (&s, c) in prod.iter() {
                        let entry = bucket
                            .entry(s)
                            .or_default()
                            .entry(idx)
                            .or_insert_with(QSqrt2::zero);
                        *entry -= c;
                    }
                }
            }
            for (_, row) in bucket {
                equations += 1;
                reducer.insert(row);
            }
        }
    }

    let rank = reducer.rank();
    let coords = reducer.nullspace();
    debug_assert_eq!(coords.len(), ncols - rank);
    let mut basis = Vec::with_capacity(coords.len());
    for v in &coords {
        let mut map = WindowedLinearMap::zero(spec, window)?;
        let mut entries: BTreeMap<BasisSymbol, Element> = BTreeMap::new();
        for (label, value) in labels.iter().zip(v) {
            if value.is_zero() {
                continue;
            }
            let VarLabel::Entry { from, to } = label else {
                unreachable!("derivation space uses Entry labels only");
            };
            entries.entry(*from).or_default().add_term(*to, value.clone());
        }
        for (from, elem) in entries {
            map.set_entry(from, elem)?;
        }
        basis.push(map);
    }

    Ok(DerivationSpace {
        spec,
        degree_shift,
        window,
        dimension: coords.len(),
        basis,
        labels,
        basis_coords: coords,
        unknowns: ncols,
        equations,
    })
}

impl DerivationSpace {
    /// Coordinates of a map in the unknown pattern, or None when the map has
    /// support outside the pattern (wrong degrees, graded central images, …).
    fn coordinates(&self, map: &WindowedLinearMap) -> Result<Option<Vec<QSqrt2>>, SolveError> {
        if map.spec() != self.spec || map.window() != self.window {
            return Err(SolveError::Map(MapError::SpecMismatch));
        }
        let mut v = Vec::with_capacity(self.labels.len());
        for label in &self.labels {
            let VarLabel::Entry { from, to } = label else {
                unreachable!()
            };
            v.push(map.entry(*from)?.coeff(*to));
        }
        // reconstruction must reproduce the map exactly
        let mut rebuilt: BTreeMap<BasisSymbol, Element> = BTreeMap::new();
        for (label, value) in self.labels.iter().zip(&v) {
            let VarLabel::Entry { from, to } = label else {
                unreachable!()
            };
            rebuilt.entry(*from).or_default().add_term(*to, value.clone());
        }
        for sym in map.domain_symbols() {
            let original = map.entry(sym)?;
            let re = rebuilt.remove(&sym).unwrap_or_default();
            if original != re {
                return Ok(None);
            }
        }
        Ok(Some(v))
    }

    /// Whether the map lies in the span of the computed basis.
    pub fn span_contains(&self, map: &WindowedLinearMap) -> Result<bool, SolveError> {
        let Some(target) = self.coordinates(map)? else {
            return Ok(false);
        };
        let labels: Vec<VarLabel> = (0..self.basis_coords.len()).map(VarLabel::Aux).collect();
        let mut system = LinearSystem::new(labels);
        for row_idx in 0..self.labels.len() {
            let coeffs: Vec<QSqrt2> = self
                .basis_coords
                .iter()
                .map(|b| b[row_idx].clone())
                .collect();
            system.add_row(coeffs, target[row_idx].clone())?;
        }
        Ok(matches!(system.solve(), SolveOutcome::Solution { .. }))
    }
}
