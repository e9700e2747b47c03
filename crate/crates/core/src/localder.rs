//! Reduction pipeline for local-derivation candidates.
//!
//! A candidate is a windowed linear map. The pipeline peels off an inner part
//! `ad(u)` and an outer multiple of the degree-weighted map `delta_t`, then
//! sweeps the remaining defect layer by layer. Every nonzero residual value is
//! attacked with a ladder of probe elements; a probe either produces a
//! pointwise witness (the value is locally explainable) or an exact
//! infeasibility certificate (the candidate is rejected). The certificates can
//! be re-verified independently of the solver that produced them.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraSpec, BasisSymbol, Element};
use crate::error::PipelineError;
use crate::maps::{DerivationDescriptor, WindowedLinearMap};
use crate::scalar::{rational, QSqrt2};
use crate::solver::{default_support_window, witness_solve, WitnessOutcome, WitnessRejection};
use crate::solver::{DEFAULT_WITNESS_CAP, DEFAULT_WITNESS_SLACK};

/// A probe element together with the family that produced it and the family
/// parameters, kept for reporting.
#[derive(Debug, Clone)]
pub struct ProbeSpec {
    pub family: &'static str,
    pub element: Element,
    pub params: BTreeMap<&'static str, String>,
}

impl ProbeSpec {
    fn new(family: &'static str, element: Element) -> Self {
        ProbeSpec {
            family,
            element,
            params: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &'static str, value: impl ToString) -> Self {
        self.params.insert(key, value.to_string());
        self
    }
}

impl fmt::Display for ProbeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, ") at {}", self.element)
    }
}

/// Transport element for a layer: a closed one-parameter family through
/// `g(layer, m)` whose degree-m member still satisfies the Witt relation
/// `[T(m), T(n)] = (m - n) T(m + n)`.
///
/// For `2*layer >= order` the pair `L_m + m*g(layer, m)` closes because the
/// quadratic cross terms land beyond the truncation. Below that threshold the
/// exponential tower `sum_j (sqrt2*m)^j / j! * g(j, m)` closes for every pair
/// of degrees.
pub fn probe_tower(spec: AlgebraSpec, layer: u32, m: i64) -> Result<Element, PipelineError> {
    spec.validate_symbol(BasisSymbol::graded(layer, m))?;
    if layer == 0 {
        return Ok(Element::symbol(BasisSymbol::graded(0, m)));
    }
    let n = spec.truncation_order();
    if 2 * layer >= n {
        let mut t = Element::symbol(BasisSymbol::graded(0, m));
        t.add_term(BasisSymbol::graded(layer, m), QSqrt2::from_int(m));
        Ok(t)
    } else {
        let step = QSqrt2::sqrt2() * QSqrt2::from_int(m);
        let mut coeff = QSqrt2::one();
        let mut t = Element::zero();
        for j in 0..n {
            if j > 0 {
                coeff = &coeff * &step;
                coeff = coeff.scale_rat(&rational(1, j as i64));
            }
            t.add_term(BasisSymbol::graded(j, m), coeff.clone());
        }
        Ok(t)
    }
}

/// How many scaled samples a target needs: one per degree in its graded span.
pub fn scaled_sample_count(target: &Element) -> i64 {
    target.degree_span().map(|(s, t)| t - s + 1).unwrap_or(1)
}

/// Scaled probes `L_m + x * L_0`, one per sample. Samples must be nonzero and
/// pairwise distinct; `m` must be nonzero and inside the window.
pub fn probe_scaled(
    spec: AlgebraSpec,
    m: i64,
    samples: &[QSqrt2],
    window: i64,
) -> Result<Vec<ProbeSpec>, PipelineError> {
    scaled_at_layer(spec, 0, m, samples, window)
}

fn scaled_at_layer(
    spec: AlgebraSpec,
    layer: u32,
    m: i64,
    samples: &[QSqrt2],
    window: i64,
) -> Result<Vec<ProbeSpec>, PipelineError> {
    const NAME: &str = "scaled";
    if m == 0 {
        return Err(PipelineError::BadProbeIndex { probe: NAME, m });
    }
    if m.abs() > window {
        return Err(PipelineError::WindowTooSmall {
            probe: NAME,
            needs: m.abs(),
            window,
        });
    }
    if samples.is_empty() {
        return Err(PipelineError::NoSamples { probe: NAME });
    }
    for (i, x) in samples.iter().enumerate() {
        if x.is_zero() {
            return Err(PipelineError::ZeroSample { probe: NAME });
        }
        if samples[..i].contains(x) {
            return Err(PipelineError::DuplicateSample { probe: NAME });
        }
    }
    let tower = probe_tower(spec, layer, m)?;
    let mut probes = Vec::with_capacity(samples.len());
    for x in samples {
        let mut e = tower.clone();
        e.add_term(BasisSymbol::graded(0, 0), x.clone());
        probes.push(
            ProbeSpec::new(NAME, e)
                .with("layer", layer)
                .with("m", m)
                .with("x", x),
        );
    }
    Ok(probes)
}

/// Shift probe `L_m + L_1`; `m` must avoid 0 and 1 and fit the window.
pub fn probe_shift(spec: AlgebraSpec, m: i64, window: i64) -> Result<ProbeSpec, PipelineError> {
    shift_at_layer(spec, 0, m, window)
}

fn shift_at_layer(
    spec: AlgebraSpec,
    layer: u32,
    m: i64,
    window: i64,
) -> Result<ProbeSpec, PipelineError> {
    const NAME: &str = "shift";
    if m == 0 || m == 1 {
        return Err(PipelineError::BadProbeIndex { probe: NAME, m });
    }
    if m.abs() > window {
        return Err(PipelineError::WindowTooSmall {
            probe: NAME,
            needs: m.abs(),
            window,
        });
    }
    let e = &probe_tower(spec, layer, m)? + &probe_tower(spec, layer, 1)?;
    Ok(ProbeSpec::new(NAME, e).with("layer", layer).with("m", m))
}

/// Anchored degree-zero probe `g(layer, 0) + L_p + L_q`. The offsets come from
/// the convex hull of the residual's graded degrees together with 0:
/// `p = min(s, 0) - 1` and `q = t - p + 1` for hull `[s, t]`.
pub fn probe_anchor(
    spec: AlgebraSpec,
    layer: u32,
    residual: &Element,
    window: i64,
) -> Result<ProbeSpec, PipelineError> {
    const NAME: &str = "anchor";
    spec.validate_symbol(BasisSymbol::graded(layer, 0))?;
    let (mut s, mut t) = residual.degree_span().unwrap_or((0, 0));
    s = s.min(0);
    t = t.max(0);
    let p = s - 1;
    let q = t - p + 1;
    let needs = p.abs().max(q.abs());
    if needs > window {
        return Err(PipelineError::WindowTooSmall {
            probe: NAME,
            needs,
            window,
        });
    }
    let mut e = Element::symbol(BasisSymbol::graded(layer, 0));
    e.add_term(BasisSymbol::graded(0, p), QSqrt2::one());
    e.add_term(BasisSymbol::graded(0, q), QSqrt2::one());
    Ok(ProbeSpec::new(NAME, e)
        .with("layer", layer)
        .with("p", p)
        .with("q", q))
}

/// Degree-zero sum probe `g(layer, 0) + g(layer, 1) + g(layer, 2)`.
pub fn probe_layer_sum(
    spec: AlgebraSpec,
    layer: u32,
    window: i64,
) -> Result<ProbeSpec, PipelineError> {
    const NAME: &str = "layer-sum";
    spec.validate_symbol(BasisSymbol::graded(layer, 0))?;
    if window < 2 {
        return Err(PipelineError::WindowTooSmall {
            probe: NAME,
            needs: 2,
            window,
        });
    }
    let e = Element::from_terms((0..=2).map(|d| (BasisSymbol::graded(layer, d), QSqrt2::one())));
    Ok(ProbeSpec::new(NAME, e).with("layer", layer))
}

/// Cross probes for a middle layer (`2*layer < order`): the pair
/// `g(layer, m) + L_1 + L_2` and `g(layer, m) + g(2*layer, 2*m)`. The second
/// is dropped when `2*m` leaves the window.
pub fn probe_cross(
    spec: AlgebraSpec,
    layer: u32,
    m: i64,
    window: i64,
) -> Result<Vec<ProbeSpec>, PipelineError> {
    const NAME: &str = "cross";
    spec.validate_symbol(BasisSymbol::graded(layer, m))?;
    let n = spec.truncation_order();
    if layer == 0 || 2 * layer >= n {
        return Err(PipelineError::CrossLayerUnavailable { layer, order: n });
    }
    if m.abs().max(2) > window {
        return Err(PipelineError::WindowTooSmall {
            probe: NAME,
            needs: m.abs().max(2),
            window,
        });
    }
    let mut probes = Vec::new();
    let mut shifted = Element::symbol(BasisSymbol::graded(layer, m));
    shifted.add_term(BasisSymbol::graded(0, 1), QSqrt2::one());
    shifted.add_term(BasisSymbol::graded(0, 2), QSqrt2::one());
    probes.push(
        ProbeSpec::new(NAME, shifted)
            .with("layer", layer)
            .with("m", m)
            .with("arm", "shifted"),
    );
    if (2 * m).abs() <= window {
        let mut doubled = Element::symbol(BasisSymbol::graded(layer, m));
        doubled.add_term(BasisSymbol::graded(2 * layer, 2 * m), QSqrt2::one());
        probes.push(
            ProbeSpec::new(NAME, doubled)
                .with("layer", layer)
                .with("m", m)
                .with("arm", "doubled"),
        );
    }
    Ok(probes)
}

fn probe_pointwise(sym: BasisSymbol) -> ProbeSpec {
    ProbeSpec::new("pointwise", Element::symbol(sym)).with("at", sym)
}

fn probe_central_anchor(k: u32, top: u32) -> ProbeSpec {
    let mut e = Element::symbol(BasisSymbol::central(k));
    e.add_term(BasisSymbol::graded(top, 0), QSqrt2::one());
    ProbeSpec::new("central-anchor", e)
        .with("layer", k)
        .with("partner", top)
}

/// Tuning knobs for [`decompose`] and [`check_center`].
#[derive(Debug, Clone)]
pub struct DecomposeConfig {
    /// Keep sweeping after the first certified rejection instead of stopping.
    pub audit_all: bool,
    /// Extra support-window slack handed to every witness solve.
    pub support_slack: i64,
    /// Hard cap for witness support windows.
    pub support_cap: i64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            audit_all: false,
            support_slack: DEFAULT_WITNESS_SLACK,
            support_cap: DEFAULT_WITNESS_CAP,
        }
    }
}

/// One witness solve against the current residual map.
#[derive(Debug, Clone)]
pub struct ProbeAttempt {
    pub probe: ProbeSpec,
    pub support_window: i64,
    pub outcome: WitnessOutcome,
}

impl ProbeAttempt {
    pub fn rejected(&self) -> bool {
        !self.outcome.is_witnessed()
    }
}

/// A residual value the sweep found, with every probe that was run on it.
#[derive(Debug, Clone)]
pub struct ViolationRecord {
    pub stage: &'static str,
    pub symbol: BasisSymbol,
    pub residual: Element,
    pub attempts: Vec<ProbeAttempt>,
}

impl ViolationRecord {
    /// The attempt that certified the rejection, if any probe did.
    pub fn certified(&self) -> Option<&ProbeAttempt> {
        self.attempts.iter().find(|a| a.rejected())
    }
}

/// What each pipeline stage pinned down.
#[derive(Debug, Clone)]
pub enum StageRecord {
    /// Witness solve at `L_0` and the inner part it fixed.
    PinBase {
        witness: DerivationDescriptor,
        nullity: usize,
    },
    /// Degree-zero corrections read off from the value at `L_1`, one
    /// coefficient per layer.
    PinDegreeOne { corrections: Vec<(u32, QSqrt2)> },
    /// The outer eigenvalue and the diagonal entry it was measured at.
    OuterEigenvalue {
        value: QSqrt2,
        measured_at: Option<(u32, i64)>,
    },
    /// A finished sweep over one graded layer.
    LayerCheck { layer: u32, violations: usize },
    /// A finished sweep over the central symbols.
    CentralCheck { violations: usize },
}

/// Final verdict of the pipeline.
#[derive(Debug, Clone)]
pub enum DecompositionOutcome {
    /// The candidate matches `ad(inner) + outer * delta_t` up to a residual
    /// every probe could witness; `residual_zero` says the match is exact on
    /// the window.
    Decomposed {
        descriptor: DerivationDescriptor,
        residual_zero: bool,
        residual_support: Vec<BasisSymbol>,
    },
    /// Some probe produced an exact infeasibility certificate.
    Rejected {
        probe: ProbeSpec,
        rejection: WitnessRejection,
    },
}

impl DecompositionOutcome {
    pub fn is_rejected(&self) -> bool {
        matches!(self, DecompositionOutcome::Rejected { .. })
    }
}

/// Everything the pipeline did: stage trace, every violation with its probe
/// attempts, and the verdict.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub spec: AlgebraSpec,
    pub window: i64,
    pub outcome: DecompositionOutcome,
    pub trace: Vec<StageRecord>,
    pub violations: Vec<ViolationRecord>,
}

fn run_probe(
    map: &WindowedLinearMap,
    probe: &ProbeSpec,
    config: &DecomposeConfig,
) -> Result<ProbeAttempt, PipelineError> {
    let target = map.apply(&probe.element)?;
    let sw = default_support_window(
        &probe.element,
        &target,
        config.support_slack,
        config.support_cap,
    );
    let outcome = witness_solve(map.spec(), &probe.element, &target, Some(sw), true)?;
    Ok(ProbeAttempt {
        probe: probe.clone(),
        support_window: sw,
        outcome,
    })
}

/// Runs the ladder on one residual value. Returns true when the sweep should
/// stop (a certificate was found and full audit is off).
fn examine(
    map: &WindowedLinearMap,
    stage: &'static str,
    symbol: BasisSymbol,
    residual: Element,
    probes: Vec<ProbeSpec>,
    config: &DecomposeConfig,
    violations: &mut Vec<ViolationRecord>,
    certified: &mut Option<(ProbeSpec, WitnessRejection)>,
) -> Result<bool, PipelineError> {
    let mut attempts = Vec::with_capacity(probes.len());
    let mut found = false;
    for probe in probes {
        let attempt = run_probe(map, &probe, config)?;
        let rejected = attempt.rejected();
        attempts.push(attempt);
        if rejected {
            found = true;
            if certified.is_none() {
                let last = attempts.last().expect("just pushed");
                if let WitnessOutcome::Infeasible(rej) = &last.outcome {
                    *certified = Some((last.probe.clone(), rej.clone()));
                }
            }
            break;
        }
    }
    violations.push(ViolationRecord {
        stage,
        symbol,
        residual,
        attempts,
    });
    Ok(found && !config.audit_all)
}

/// The probe ladder for a graded residual at `g(layer, m)`. Probes whose
/// support cannot fit the window are left out; the pointwise probe always
/// runs.
fn graded_ladder(
    spec: AlgebraSpec,
    layer: u32,
    m: i64,
    residual: &Element,
    current: &WindowedLinearMap,
    window: i64,
) -> Result<Vec<ProbeSpec>, PipelineError> {
    let n = spec.truncation_order();
    let mut probes = vec![probe_pointwise(BasisSymbol::graded(layer, m))];
    if m != 0 {
        let tower = probe_tower(spec, layer, m)?;
        let count = scaled_sample_count(&current.apply(&tower)?).max(1);
        let samples: Vec<QSqrt2> = (1..=count).map(QSqrt2::from_int).collect();
        probes.extend(scaled_at_layer(spec, layer, m, &samples, window)?);
        if m != 1 {
            probes.push(shift_at_layer(spec, layer, m, window)?);
        }
    } else if layer > 0 {
        match probe_anchor(spec, layer, residual, window) {
            Ok(p) => probes.push(p),
            Err(PipelineError::WindowTooSmall { .. }) => {}
            Err(e) => return Err(e),
        }
        probes.push(probe_layer_sum(spec, layer, window)?);
    }
    if layer > 0 && 2 * layer < n {
        probes.extend(probe_cross(spec, layer, m, window)?);
    }
    Ok(probes)
}

/// Decides whether a candidate map is `ad(u) + c * delta_t` up to locally
/// witnessable values, or produces a certified counterexample.
///
/// Stages: pin the inner part at `L_0`, read off degree-zero corrections at
/// `L_1`, sweep layer 0, measure the outer eigenvalue on the top layer and
/// subtract it, sweep the higher layers downward, then sweep the centrals on
/// a centered algebra. The first certified violation rejects unless
/// `audit_all` keeps the sweep going.
pub fn decompose(
    candidate: &WindowedLinearMap,
    config: &DecomposeConfig,
) -> Result<DecompositionReport, PipelineError> {
    let spec = candidate.spec();
    let window = candidate.window();
    if window < 3 {
        return Err(PipelineError::PipelineWindowTooSmall(window));
    }
    let n = spec.truncation_order();
    let mut trace = Vec::new();
    let mut violations: Vec<ViolationRecord> = Vec::new();
    let mut certified: Option<(ProbeSpec, WitnessRejection)> = None;

    // Pin the inner part: a witness for the value at L_0 exists for every
    // member of the family, so a miss here is already a rejection.
    let l0 = BasisSymbol::graded(0, 0);
    let base_probe = probe_pointwise(l0);
    let base = run_probe(candidate, &base_probe, config)?;
    let (mut inner, mut outer, delta1) = match &base.outcome {
        WitnessOutcome::Witness { descriptor, nullity } => {
            trace.push(StageRecord::PinBase {
                witness: descriptor.clone(),
                nullity: *nullity,
            });
            let pinned = descriptor.to_map(spec, window)?;
            (
                descriptor.inner.clone(),
                descriptor.outer.clone(),
                candidate.try_sub(&pinned)?,
            )
        }
        WitnessOutcome::Infeasible(rej) => {
            let rejection = rej.clone();
            violations.push(ViolationRecord {
                stage: "base",
                symbol: l0,
                residual: candidate.entry(l0)?,
                attempts: vec![base],
            });
            return Ok(DecompositionReport {
                spec,
                window,
                outcome: DecompositionOutcome::Rejected {
                    probe: base_probe,
                    rejection,
                },
                trace,
                violations,
            });
        }
    };

    // Degree-zero inner parts act invisibly on L_0; read them off from the
    // value at L_1 instead, one coefficient per layer.
    let l1 = BasisSymbol::graded(0, 1);
    let at_l1 = delta1.entry(l1)?;
    let mut corrections = Vec::with_capacity(n as usize);
    let mut correction = Element::zero();
    for k in 0..n {
        let c = at_l1.coeff(BasisSymbol::graded(k, 1));
        if !c.is_zero() {
            correction.add_term(BasisSymbol::graded(k, 0), c.clone());
        }
        corrections.push((k, c));
    }
    trace.push(StageRecord::PinDegreeOne { corrections });
    let delta2 = delta1.try_add(&WindowedLinearMap::ad(spec, window, &correction)?)?;
    inner = &inner - &correction;

    // The outer part survives both pins; measure it on the top layer's
    // diagonal and subtract. On order 1 the top layer is 0, where delta_t
    // vanishes, so the eigenvalue stays 0 there.
    let top = n - 1;
    let mut eigen = QSqrt2::zero();
    let mut measured_at = None;
    if top >= 1 {
        'measure: for mm in 1..=window {
            for m in [mm, -mm] {
                let diag = delta2
                    .entry(BasisSymbol::graded(top, m))?
                    .coeff(BasisSymbol::graded(top, m));
                if !diag.is_zero() {
                    let inv = QSqrt2::from_int(top as i64)
                        .checked_inv()
                        .expect("top >= 1");
                    eigen = &diag * &inv;
                    measured_at = Some((top, m));
                    break 'measure;
                }
            }
        }
    }
    let eigen_record = StageRecord::OuterEigenvalue {
        value: eigen.clone(),
        measured_at,
    };
    let delta3 = delta2.try_sub(&WindowedLinearMap::delta_t(spec, window)?.scaled(&eigen))?;
    outer += &eigen;

    // Residual sweeps. Layer 0 first (delta_t vanishes there, so delta3 and
    // delta2 agree), then the higher layers top-down, then the centrals.
    'sweeps: {
        let mut count = 0;
        for m in -window..=window {
            let sym = BasisSymbol::graded(0, m);
            let residual = delta3.entry(sym)?;
            if residual.is_zero() {
                continue;
            }
            count += 1;
            let probes = graded_ladder(spec, 0, m, &residual, &delta3, window)?;
            if examine(
                &delta3,
                "layer-0",
                sym,
                residual,
                probes,
                config,
                &mut violations,
                &mut certified,
            )? {
                break 'sweeps;
            }
        }
        trace.push(StageRecord::LayerCheck {
            layer: 0,
            violations: count,
        });
        trace.push(eigen_record);

        for layer in (1..n).rev() {
            let mut count = 0;
            for m in -window..=window {
                let sym = BasisSymbol::graded(layer, m);
                let residual = delta3.entry(sym)?;
                if residual.is_zero() {
                    continue;
                }
                count += 1;
                let probes = graded_ladder(spec, layer, m, &residual, &delta3, window)?;
                if examine(
                    &delta3,
                    "graded",
                    sym,
                    residual,
                    probes,
                    config,
                    &mut violations,
                    &mut certified,
                )? {
                    break 'sweeps;
                }
            }
            trace.push(StageRecord::LayerCheck {
                layer,
                violations: count,
            });
        }

        if spec.centered() {
            let mut count = 0;
            for k in 0..n {
                let sym = BasisSymbol::central(k);
                let residual = delta3.entry(sym)?;
                if residual.is_zero() {
                    continue;
                }
                count += 1;
                let mut probes = vec![probe_pointwise(sym)];
                if top >= 1 {
                    probes.push(probe_central_anchor(k, top));
                }
                if examine(
                    &delta3,
                    "central",
                    sym,
                    residual,
                    probes,
                    config,
                    &mut violations,
                    &mut certified,
                )? {
                    break 'sweeps;
                }
            }
            trace.push(StageRecord::CentralCheck { violations: count });
        }
    }

    let outcome = match certified {
        Some((probe, rejection)) => DecompositionOutcome::Rejected { probe, rejection },
        None => {
            let residual_support: Vec<BasisSymbol> = delta3
                .nonzero_entries()
                .map(|(s, _)| *s)
                .collect();
            DecompositionOutcome::Decomposed {
                descriptor: DerivationDescriptor::new(inner, outer),
                residual_zero: residual_support.is_empty(),
                residual_support,
            }
        }
    };
    Ok(DecompositionReport {
        spec,
        window,
        outcome,
        trace,
        violations,
    })
}

/// One nonzero value on a central symbol.
#[derive(Debug, Clone)]
pub struct CentralEntry {
    pub symbol: BasisSymbol,
    pub value: Element,
    /// Whether a pointwise witness for the value exists at all. Recorded for
    /// honesty: the check flags the entry either way.
    pub witnessed: bool,
}

/// Verdict on one graded symbol whose value is purely central.
#[derive(Debug, Clone)]
pub enum PureCentralOutcome {
    Rejected(WitnessRejection),
    Witnessed(DerivationDescriptor),
}

/// A graded symbol carrying a nonzero purely central value.
#[derive(Debug, Clone)]
pub struct PureCentralRecord {
    pub symbol: BasisSymbol,
    pub value: Element,
    pub outcome: PureCentralOutcome,
}

/// Report of [`check_center`].
#[derive(Debug, Clone)]
pub struct CenterCheckReport {
    pub spec: AlgebraSpec,
    pub window: i64,
    /// Central symbols the candidate fails to annihilate.
    pub central_entries: Vec<CentralEntry>,
    /// Graded symbols sent to nonzero purely central values.
    pub pure_central_rows: Vec<PureCentralRecord>,
}

impl CenterCheckReport {
    pub fn passed(&self) -> bool {
        self.central_entries.is_empty() && self.pure_central_rows.is_empty()
    }
}

/// Checks the central discipline of a candidate on a centered algebra: every
/// central symbol must map to zero, and no graded symbol may map to a nonzero
/// purely central value. Violations of the second kind come with a pointwise
/// witness solve, which is infeasible for every such value.
pub fn check_center(
    candidate: &WindowedLinearMap,
    config: &DecomposeConfig,
) -> Result<CenterCheckReport, PipelineError> {
    let spec = candidate.spec();
    if !spec.centered() {
        return Err(PipelineError::CenterlessCenterCheck);
    }
    let window = candidate.window();
    let mut central_entries = Vec::new();
    let mut pure_central_rows = Vec::new();
    for sym in candidate.domain_symbols() {
        let value = candidate.entry(sym)?;
        if value.is_zero() {
            continue;
        }
        if sym.is_graded() {
            if !value.is_pure_central() {
                continue;
            }
            let probe = Element::symbol(sym);
            let sw = default_support_window(&probe, &value, config.support_slack, config.support_cap);
            let outcome = match witness_solve(spec, &probe, &value, Some(sw), true)? {
                WitnessOutcome::Witness { descriptor, .. } => {
                    PureCentralOutcome::Witnessed(descriptor)
                }
                WitnessOutcome::Infeasible(rej) => PureCentralOutcome::Rejected(rej),
            };
            pure_central_rows.push(PureCentralRecord {
                symbol: sym,
                value,
                outcome,
            });
        } else {
            let probe = Element::symbol(sym);
            let sw = default_support_window(&probe, &value, config.support_slack, config.support_cap);
            let witnessed = witness_solve(spec, &probe, &value, Some(sw), true)?.is_witnessed();
            central_entries.push(CentralEntry {
                symbol: sym,
                value,
                witnessed,
            });
        }
    }
    Ok(CenterCheckReport {
        spec,
        window,
        central_entries,
        pure_central_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bracket, Construction, primed_basis, support_profile};

    fn w22() -> AlgebraSpec {
        "w22-centerless".parse().unwrap()
    }

    fn bms3() -> AlgebraSpec {
        "bms3-centerless".parse().unwrap()
    }

    fn g(k: u32, m: i64) -> BasisSymbol {
        BasisSymbol::graded(k, m)
    }

    fn q(n: i64) -> QSqrt2 {
        QSqrt2::from_int(n)
    }

    #[test]
    fn tower_matches_primed_constructions() {
        let spec = w22();
        for m in -4..=4 {
            assert_eq!(
                probe_tower(spec, 1, m).unwrap(),
                primed_basis(spec, Construction::LPrime, m).unwrap()
            );
        }
        let spec = bms3();
        for m in -4..=4 {
            assert_eq!(
                probe_tower(spec, 1, m).unwrap(),
                primed_basis(spec, Construction::LDoublePrime, m).unwrap()
            );
        }
        // Top layer of order 3 rides the sparse pair.
        let t = probe_tower(spec, 2, 3).unwrap();
        assert_eq!(t.coeff(g(0, 3)), q(1));
        assert_eq!(t.coeff(g(2, 3)), q(3));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn towers_close_under_bracket() {
        for name in ["witt", "w22-centerless", "bms3-centerless", "n=5,centerless"] {
            let spec: AlgebraSpec = name.parse().unwrap();
            for layer in spec.layers() {
                for m in -3..=3i64 {
                    for n in -3..=3i64 {
                        let tm = probe_tower(spec, layer, m).unwrap();
                        let tn = probe_tower(spec, layer, n).unwrap();
                        let lhs = bracket(spec, &tm, &tn).unwrap();
                        let rhs = probe_tower(spec, layer, m + n)
                            .unwrap()
                            .scale(&q(m - n));
                        assert_eq!(lhs, rhs, "{name} layer {layer} [{m},{n}]");
                    }
                }
            }
        }
    }

    #[test]
    fn probe_constructor_preconditions() {
        let spec = w22();
        assert!(matches!(
            probe_scaled(spec, 0, &[q(1)], 6),
            Err(PipelineError::BadProbeIndex { m: 0, .. })
        ));
        assert!(matches!(
            probe_scaled(spec, 2, &[], 6),
            Err(PipelineError::NoSamples { .. })
        ));
        assert!(matches!(
            probe_scaled(spec, 2, &[q(0)], 6),
            Err(PipelineError::ZeroSample { .. })
        ));
        assert!(matches!(
            probe_scaled(spec, 2, &[q(1), q(1)], 6),
            Err(PipelineError::DuplicateSample { .. })
        ));
        assert!(matches!(
            probe_scaled(spec, 7, &[q(1)], 6),
            Err(PipelineError::WindowTooSmall { needs: 7, .. })
        ));
        assert!(matches!(
            probe_shift(spec, 1, 6),
            Err(PipelineError::BadProbeIndex { m: 1, .. })
        ));
        assert!(matches!(
            probe_layer_sum(spec, 1, 1),
            Err(PipelineError::WindowTooSmall { needs: 2, .. })
        ));
        assert!(matches!(
            probe_cross(spec, 1, 1, 6),
            Err(PipelineError::CrossLayerUnavailable { .. })
        ));
        let probes = probe_scaled(spec, 2, &[q(1), q(2), q(3)], 6).unwrap();
        assert_eq!(probes.len(), 3);
        assert_eq!(probes[0].element.coeff(g(0, 0)), q(1));
        assert_eq!(probes[2].element.coeff(g(0, 0)), q(3));
    }

    #[test]
    fn anchor_offsets_follow_residual_hull() {
        let spec = w22();
        // Residual I_0 + I_3: hull [0, 3], p = -1, q = 5.
        let mut r = Element::symbol(g(1, 0));
        r.add_term(g(1, 3), q(1));
        let p = probe_anchor(spec, 1, &r, 6).unwrap();
        assert_eq!(p.params["p"], "-1");
        assert_eq!(p.params["q"], "5");
        // Zero residual: hull {0}, p = -1, q = 2.
        let p = probe_anchor(spec, 1, &Element::zero(), 6).unwrap();
        assert_eq!(p.params["p"], "-1");
        assert_eq!(p.params["q"], "2");
        // Residual I_{-2}: hull [-2, 0], p = -3, q = 4.
        let p = probe_anchor(spec, 1, &Element::symbol(g(1, -2)), 6).unwrap();
        assert_eq!(p.params["p"], "-3");
        assert_eq!(p.params["q"], "4");
    }

    #[test]
    fn round_trip_inner_outer() {
        let spec = w22();
        let mut u = Element::symbol(g(0, 1));
        u.add_term(g(0, 1), q(1));
        u.add_term(g(1, -2), -q(1));
        // u = 2 L_1 - I_{-2}
        let d = DerivationDescriptor::new(u.clone(), q(3));
        let map = d.to_map(spec, 6).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Decomposed {
                descriptor,
                residual_zero,
                ..
            } => {
                assert!(residual_zero);
                assert_eq!(descriptor.inner, u);
                assert_eq!(descriptor.outer, q(3));
                assert_eq!(descriptor.to_map(spec, 6).unwrap(), map);
            }
            other => panic!("expected decomposition, got {other:?}"),
        }
        assert!(report.violations.is_empty());
    }

    #[test]
    fn round_trip_on_centered_algebra() {
        let spec: AlgebraSpec = "bms3".parse().unwrap();
        let d = DerivationDescriptor::new(Element::symbol(g(0, 1)), q(2));
        let map = d.to_map(spec, 4).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Decomposed {
                descriptor,
                residual_zero,
                ..
            } => {
                assert!(residual_zero);
                assert_eq!(descriptor.outer, q(2));
                assert_eq!(descriptor.to_map(spec, 4).unwrap(), map);
            }
            other => panic!("expected decomposition, got {other:?}"),
        }
    }

    #[test]
    fn zero_map_decomposes_to_zero() {
        let map = WindowedLinearMap::zero(w22(), 4).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Decomposed {
                descriptor,
                residual_zero,
                ..
            } => {
                assert!(residual_zero);
                assert!(descriptor.is_zero());
            }
            other => panic!("expected decomposition, got {other:?}"),
        }
    }

    #[test]
    fn degree_zero_corrections_read_from_l1() {
        let spec = w22();
        let mut u = Element::term(g(0, 0), -q(5));
        u.add_term(g(1, 0), -q(7));
        let map = WindowedLinearMap::ad(spec, 6, &u).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        let corrections = report
            .trace
            .iter()
            .find_map(|s| match s {
                StageRecord::PinDegreeOne { corrections } => Some(corrections.clone()),
                _ => None,
            })
            .unwrap();
        assert_eq!(corrections, vec![(0, q(5)), (1, q(7))]);
        match &report.outcome {
            DecompositionOutcome::Decomposed {
                descriptor,
                residual_zero,
                ..
            } => {
                assert!(residual_zero);
                assert_eq!(descriptor.inner, u);
                assert!(descriptor.outer.is_zero());
            }
            other => panic!("expected decomposition, got {other:?}"),
        }
    }

    #[test]
    fn witt_chain_defect_rejected_by_scaled_probe() {
        let spec = w22();
        let mut map = WindowedLinearMap::zero(spec, 6).unwrap();
        map.set_entry(g(0, 2), Element::symbol(g(0, 5))).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { probe, rejection } => {
                assert_eq!(probe.family, "scaled");
                assert_eq!(probe.params["m"], "2");
                assert!(rejection.verify());
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        // The defect sits in a single residue class mod 2.
        let profile = support_profile(&map.entry(g(0, 2)).unwrap(), 2).unwrap();
        assert_eq!(profile.layer_residues(0), vec![1]);
        // The pointwise probe alone is satisfiable, so the record shows a
        // witnessed first rung.
        let record = &report.violations[0];
        assert_eq!(record.stage, "layer-0");
        assert!(!record.attempts[0].rejected());
        assert!(record.attempts[1].rejected());
    }

    #[test]
    fn higher_layer_defect_needs_tower_transport() {
        // A defect I_2 -> I_5 is invisible to plain scaled probes because
        // [J_j, I_2] vanishes; the layer-1 tower carries the chain argument
        // through layer 0.
        let spec = w22();
        let mut map = WindowedLinearMap::zero(spec, 6).unwrap();
        map.set_entry(g(1, 2), Element::symbol(g(1, 5))).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { probe, rejection } => {
                assert_eq!(probe.family, "scaled");
                assert_eq!(probe.params["layer"], "1");
                assert!(rejection.verify());
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn middle_layer_small_m_gap_and_cross_probes() {
        let spec = bms3();
        // b-type defect J_m -> I_m. The shifted cross probe certifies it for
        // m = 2 and m >= 5 but admits a stray witness at m = 3.
        for (m, expect_reject) in [(2i64, true), (3, false), (5, true)] {
            let probe = probe_cross(spec, 1, m, 12).unwrap()
                .into_iter()
                .find(|p| p.params["arm"] == "shifted")
                .unwrap();
            let target = Element::symbol(g(2, m));
            let outcome = witness_solve(spec, &probe.element, &target, None, true).unwrap();
            match outcome {
                WitnessOutcome::Infeasible(rej) => {
                    assert!(expect_reject, "unexpected rejection at m = {m}");
                    assert!(rej.verify());
                }
                WitnessOutcome::Witness { descriptor, .. } => {
                    assert!(!expect_reject, "missed rejection at m = {m}");
                    // The stray witness at m = 3 really maps probe to target.
                    let w = WindowedLinearMap::ad(spec, 16, &descriptor.inner)
                        .unwrap()
                        .try_add(
                            &WindowedLinearMap::delta_t(spec, 16)
                                .unwrap()
                                .scaled(&descriptor.outer),
                        )
                        .unwrap();
                    assert_eq!(w.apply(&probe.element).unwrap(), target);
                }
            }
        }
        // a-type defect J_m -> J_m at m = 5: the doubled cross probe rejects.
        let probe = probe_cross(spec, 1, 5, 12).unwrap()
            .into_iter()
            .find(|p| p.params["arm"] == "doubled")
            .unwrap();
        let target = Element::symbol(g(1, 5));
        match witness_solve(spec, &probe.element, &target, None, true).unwrap() {
            WitnessOutcome::Infeasible(rej) => assert!(rej.verify()),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn middle_layer_defect_rejected_in_pipeline() {
        let spec = bms3();
        let mut map = WindowedLinearMap::zero(spec, 12).unwrap();
        map.set_entry(g(1, 5), Element::symbol(g(2, 5))).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { rejection, .. } => assert!(rejection.verify()),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn layer_sum_pins_degree_zero_scaling() {
        // I_0 -> c I_0 with c != 0 is not locally explainable; the layer sum
        // probe certifies that.
        let spec = w22();
        let mut map = WindowedLinearMap::zero(spec, 6).unwrap();
        map.set_entry(g(1, 0), Element::symbol(g(1, 0))).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { probe, rejection } => {
                assert!(rejection.verify());
                assert!(
                    probe.family == "layer-sum" || probe.family == "anchor",
                    "unexpected family {}",
                    probe.family
                );
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn audit_all_collects_multiple_violations() {
        let spec = w22();
        let mut map = WindowedLinearMap::zero(spec, 6).unwrap();
        map.set_entry(g(0, 2), Element::symbol(g(0, 5))).unwrap();
        map.set_entry(g(0, -3), Element::symbol(g(0, 1))).unwrap();
        let config = DecomposeConfig {
            audit_all: true,
            ..DecomposeConfig::default()
        };
        let report = decompose(&map, &config).unwrap();
        assert!(report.outcome.is_rejected());
        assert_eq!(report.violations.len(), 2);
        assert!(report.violations.iter().all(|v| v.certified().is_some()));
        // Stage trace still reaches the final layer records.
        assert!(report
            .trace
            .iter()
            .any(|s| matches!(s, StageRecord::LayerCheck { layer: 1, .. })));
    }

    #[test]
    fn window_too_small_for_pipeline() {
        let map = WindowedLinearMap::zero(w22(), 2).unwrap();
        assert!(matches!(
            decompose(&map, &DecomposeConfig::default()),
            Err(PipelineError::PipelineWindowTooSmall(2))
        ));
    }

    #[test]
    fn check_center_flags_central_entries_and_pure_central_rows() {
        let spec: AlgebraSpec = "w22".parse().unwrap();
        let mut map = WindowedLinearMap::zero(spec, 4).unwrap();
        // L_2 -> C is a nonzero purely central value on a graded symbol.
        map.set_entry(g(0, 2), Element::symbol(BasisSymbol::central(0)))
            .unwrap();
        // C_1 -> C_1 fails the annihilation requirement even though delta_t
        // witnesses it pointwise.
        map.set_entry(
            BasisSymbol::central(1),
            Element::symbol(BasisSymbol::central(1)),
        )
        .unwrap();
        let report = check_center(&map, &DecomposeConfig::default()).unwrap();
        assert!(!report.passed());
        assert_eq!(report.central_entries.len(), 1);
        assert!(report.central_entries[0].witnessed);
        assert_eq!(report.pure_central_rows.len(), 1);
        match &report.pure_central_rows[0].outcome {
            PureCentralOutcome::Rejected(rej) => assert!(rej.verify()),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn check_center_passes_on_derivations_with_zero_central_column() {
        let spec: AlgebraSpec = "virasoro".parse().unwrap();
        let map = WindowedLinearMap::ad(spec, 4, &Element::symbol(g(0, 1))).unwrap();
        let report = check_center(&map, &DecomposeConfig::default()).unwrap();
        assert!(report.passed());
        assert!(matches!(
            check_center(
                &WindowedLinearMap::zero(w22(), 4).unwrap(),
                &DecomposeConfig::default()
            ),
            Err(PipelineError::CenterlessCenterCheck)
        ));
    }

    #[test]
    fn central_diagonal_mismatch_rejected() {
        // C_1 -> 3 C_1 pretends the outer eigenvalue is 3 on the center while
        // the graded part says 0; the anchored central probe certifies the
        // mismatch.
        let spec: AlgebraSpec = "w22".parse().unwrap();
        let mut map = WindowedLinearMap::zero(spec, 6).unwrap();
        map.set_entry(
            BasisSymbol::central(1),
            Element::term(BasisSymbol::central(1), q(3)),
        )
        .unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { probe, rejection } => {
                assert_eq!(probe.family, "central-anchor");
                assert!(rejection.verify());
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn central_zero_layer_value_rejected_pointwise() {
        // C -> C: nothing in the family moves the layer-0 center.
        let spec: AlgebraSpec = "virasoro".parse().unwrap();
        let mut map = WindowedLinearMap::zero(spec, 4).unwrap();
        map.set_entry(
            BasisSymbol::central(0),
            Element::symbol(BasisSymbol::central(0)),
        )
        .unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { probe, rejection } => {
                assert_eq!(probe.family, "pointwise");
                assert!(rejection.verify());
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn residual_survives_when_no_probe_certifies() {
        // J_3 -> I_3 on a narrow window: the small-m gap leaves the shifted
        // cross probe witnessed, and the remaining rungs may pass too; the
        // pipeline stays honest by reporting the violation without a
        // certificate or, if some rung certifies, a verified rejection.
        let spec = bms3();
        let mut map = WindowedLinearMap::zero(spec, 6).unwrap();
        map.set_entry(g(1, 3), Element::symbol(g(2, 3))).unwrap();
        let report = decompose(&map, &DecomposeConfig::default()).unwrap();
        match &report.outcome {
            DecompositionOutcome::Rejected { rejection, .. } => {
                assert!(rejection.verify());
            }
            DecompositionOutcome::Decomposed { residual_zero, .. } => {
                assert!(!residual_zero);
                assert!(!report.violations.is_empty());
                assert!(report.violations.iter().all(|v| v.certified().is_none()));
            }
        }
    }
}
