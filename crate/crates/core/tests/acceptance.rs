// Acceptance sweep. One test per contract item; each prints a single PASS
// line with the measured numbers. Every comparison here is exact — there are
// no tolerances anywhere, and the expected values are frozen independently of
// the code under test.

use loopvir::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_presets() -> Vec<AlgebraSpec> {
    vec![
        AlgebraSpec::witt(),
        AlgebraSpec::virasoro(),
        AlgebraSpec::w22(),
        AlgebraSpec::w22_centerless(),
        AlgebraSpec::bms3(),
        AlgebraSpec::bms3_centerless(),
    ]
}

// The cocycle weight (m^3 - m)/12, frozen as its own table.
fn phi(m: i64) -> QSqrt2 {
    QSqrt2::from_parts(m * m * m - m, 12, 0, 1)
}

// Bracket table of the centered order-2 algebra, written out by hand. Returns
// None for pairs listed only in transposed order; the caller flips the sign.
fn oracle_w22(x: BasisSymbol, y: BasisSymbol) -> Option<Element> {
    match (x, y) {
        (BasisSymbol::Central { .. }, _) | (_, BasisSymbol::Central { .. }) => {
            Some(Element::zero())
        }
        (
            BasisSymbol::Graded { layer: 0, degree: m },
            BasisSymbol::Graded { layer: 0, degree: n },
        ) => {
            let mut e = Element::term(BasisSymbol::graded(0, m + n), QSqrt2::from_int(m - n));
            if m + n == 0 {
                e.add_term(BasisSymbol::central(0), phi(m));
            }
            Some(e)
        }
        (
            BasisSymbol::Graded { layer: 0, degree: m },
            BasisSymbol::Graded { layer: 1, degree: n },
        ) => {
            let mut e = Element::term(BasisSymbol::graded(1, m + n), QSqrt2::from_int(m - n));
            if m + n == 0 {
                e.add_term(BasisSymbol::central(1), phi(m));
            }
            Some(e)
        }
        (BasisSymbol::Graded { layer: 1, .. }, BasisSymbol::Graded { layer: 1, .. }) => {
            Some(Element::zero())
        }
        _ => None,
    }
}

// Bracket table of the centered order-3 algebra, same conventions.
fn oracle_bms3(x: BasisSymbol, y: BasisSymbol) -> Option<Element> {
    match (x, y) {
        (BasisSymbol::Central { .. }, _) | (_, BasisSymbol::Central { .. }) => {
            Some(Element::zero())
        }
        (
            BasisSymbol::Graded { layer: 0, degree: m },
            BasisSymbol::Graded { layer: k, degree: n },
        ) => {
            // [L_m, x_n] = (m - n) x_{m+n} + φ(m) c_k at m + n = 0, for x in
            // each of the three layers.
            let mut e = Element::term(BasisSymbol::graded(k, m + n), QSqrt2::from_int(m - n));
            if m + n == 0 {
                e.add_term(BasisSymbol::central(k), phi(m));
            }
            Some(e)
        }
        (
            BasisSymbol::Graded { layer: 1, degree: m },
            BasisSymbol::Graded { layer: 1, degree: n },
        ) => {
            let mut e = Element::term(BasisSymbol::graded(2, m + n), QSqrt2::from_int(m - n));
            if m + n == 0 {
                e.add_term(BasisSymbol::central(2), phi(m));
            }
            Some(e)
        }
        (
            BasisSymbol::Graded { layer: 1, degree: _ },
            BasisSymbol::Graded { layer: 2, degree: _ },
        )
        | (BasisSymbol::Graded { layer: 2, .. }, BasisSymbol::Graded { layer: 2, .. }) => {
            Some(Element::zero())
        }
        _ => None,
    }
}

fn check_table(
    spec: AlgebraSpec,
    range: i64,
    oracle: impl Fn(BasisSymbol, BasisSymbol) -> Option<Element>,
) -> u64 {
    let symbols = spec.window_symbols(range);
    let mut pairs = 0u64;
    for &x in &symbols {
        for &y in &symbols {
            let expected = match oracle(x, y) {
                Some(e) => e,
                None => oracle(y, x)
                    .expect("oracle covers every pair up to transposition")
                    .scale(&QSqrt2::from_int(-1)),
            };
            let got = bracket(spec, &Element::symbol(x), &Element::symbol(y)).unwrap();
            assert_eq!(got, expected, "bracket table mismatch at [{x}, {y}]");
            pairs += 1;
        }
    }
    pairs
}

#[test]
fn criterion_1_bracket_tables() {
    // Frozen cocycle values on the inner window.
    assert_eq!(phi(0), QSqrt2::zero());
    assert_eq!(phi(1), QSqrt2::zero());
    assert_eq!(phi(-1), QSqrt2::zero());
    assert_eq!(phi(2), QSqrt2::from_parts(1, 2, 0, 1));
    assert_eq!(phi(-2), QSqrt2::from_parts(-1, 2, 0, 1));
    assert_eq!(phi(3), QSqrt2::from_int(2));
    assert_eq!(phi(-3), QSqrt2::from_int(-2));

    let mut algebras = all_presets();
    algebras.push(AlgebraSpec::new(4, true));
    for &spec in &algebras {
        let anti = antisymmetry_check(spec, 4);
        assert!(
            anti.passed(),
            "antisymmetry violated on {}: {:?}",
            spec.name(),
            anti.violation
        );
        let jac = jacobi_check(spec, 4);
        assert!(
            jac.passed(),
            "jacobi violated on {}: {:?}",
            spec.name(),
            jac.violation
        );
    }

    let w22_pairs = check_table(AlgebraSpec::w22(), 3, oracle_w22);
    let bms3_pairs = check_table(AlgebraSpec::bms3(), 3, oracle_bms3);

    println!(
        "acceptance 1: PASS — antisymmetry and jacobi exact on [-4,4] for {} algebras; \
         order-2 table matches the frozen oracle on {} pairs, order-3 on {} pairs",
        algebras.len(),
        w22_pairs,
        bms3_pairs
    );
}

#[test]
fn criterion_2_primed_bases() {
    let w22cl = AlgebraSpec::w22_centerless();
    let bms3cl = AlgebraSpec::bms3_centerless();

    let lp = verify_construction(w22cl, Construction::LPrime, 6).unwrap();
    assert!(lp.passed(), "violations: {:?}", lp.violations);
    let ldp = verify_construction(bms3cl, Construction::LDoublePrime, 6).unwrap();
    assert!(ldp.passed(), "violations: {:?}", ldp.violations);
    let jp = verify_construction(bms3cl, Construction::JPrime, 6).unwrap();
    assert!(jp.passed(), "violations: {:?}", jp.violations);

    // The order-3 constructions are genuinely irrational: the middle
    // coefficients are √2-multiples, not rationals in disguise.
    let ldp3 = primed_basis(bms3cl, Construction::LDoublePrime, 3).unwrap();
    let mid = ldp3.coeff(BasisSymbol::graded(1, 3));
    assert!(!mid.is_zero() && !mid.is_rational());
    assert_eq!(mid, QSqrt2::from_parts(0, 1, 3, 1));
    let jp3 = primed_basis(bms3cl, Construction::JPrime, 3).unwrap();
    let top = jp3.coeff(BasisSymbol::graded(2, 3));
    assert!(!top.is_zero() && !top.is_rational());
    assert_eq!(top, QSqrt2::from_parts(0, 1, 3, 1));

    println!(
        "acceptance 2: PASS — primed-basis identities exact on [-6,6] \
         ({} + {} + {} identities); order-3 coefficients genuinely irrational",
        lp.identities_checked, ldp.identities_checked, jp.identities_checked
    );
}

#[test]
fn criterion_3_grading_map() {
    for &spec in &all_presets() {
        let dt = WindowedLinearMap::delta_t(spec, 6).unwrap();
        let report = dt.leibniz_check();
        assert!(
            report.passed(),
            "grading map fails Leibniz on {}: {:?}",
            spec.name(),
            report.violations
        );
    }

    // Order 2: the grading map IS the usual outer derivation there (fix the
    // bottom layer, fix degree, weight 1 on the upper layer and its central).
    let w22 = AlgebraSpec::w22();
    let mut expected = WindowedLinearMap::zero(w22, 6).unwrap();
    for m in -6..=6 {
        let sym = BasisSymbol::graded(1, m);
        expected.set_entry(sym, Element::symbol(sym)).unwrap();
    }
    expected
        .set_entry(
            BasisSymbol::central(1),
            Element::symbol(BasisSymbol::central(1)),
        )
        .unwrap();
    assert_eq!(WindowedLinearMap::delta_t(w22, 6).unwrap(), expected);

    // Order 3: the conventional normalization halves the weights (1/2 on the
    // middle layer, 1 on the top, same on the matching centrals). Doubling it
    // recovers the grading map entry for entry.
    let bms3 = AlgebraSpec::bms3();
    let half = QSqrt2::from_parts(1, 2, 0, 1);
    let mut halved = WindowedLinearMap::zero(bms3, 6).unwrap();
    for m in -6..=6 {
        let j = BasisSymbol::graded(1, m);
        halved.set_entry(j, Element::term(j, half.clone())).unwrap();
        let i = BasisSymbol::graded(2, m);
        halved.set_entry(i, Element::symbol(i)).unwrap();
    }
    halved
        .set_entry(
            BasisSymbol::central(1),
            Element::term(BasisSymbol::central(1), half.clone()),
        )
        .unwrap();
    halved
        .set_entry(
            BasisSymbol::central(2),
            Element::symbol(BasisSymbol::central(2)),
        )
        .unwrap();
    assert!(halved.leibniz_check().passed());
    assert_eq!(
        halved.scaled(&QSqrt2::from_int(2)),
        WindowedLinearMap::delta_t(bms3, 6).unwrap()
    );

    println!(
        "acceptance 3: PASS — grading map passes Leibniz on all 6 presets (window 6); \
         equals the order-2 outer derivation and twice its halved order-3 normalization, \
         entry for entry"
    );
}

#[test]
fn criterion_4_derivation_spaces() {
    let window = 8;

    // Order 2, centerless: one outer direction (the grading map) on top of
    // the two degree-0 inner ones; pure inner at every nonzero shift.
    let w22cl = AlgebraSpec::w22_centerless();
    let mut w22_dims = Vec::new();
    for shift in [0i64, 1, -1, 2, -2] {
        let space = derivation_space(w22cl, shift, window).unwrap();
        w22_dims.push(space.dimension);
        if shift == 0 {
            assert_eq!(space.dimension, 3);
            for u in [BasisSymbol::graded(0, 0), BasisSymbol::graded(1, 0)] {
                let ad = WindowedLinearMap::ad(w22cl, window, &Element::symbol(u)).unwrap();
                assert!(space.span_contains(&ad).unwrap());
            }
            let dt = WindowedLinearMap::delta_t(w22cl, window).unwrap();
            assert!(space.span_contains(&dt).unwrap());
        } else {
            assert_eq!(space.dimension, 2);
            for layer in 0..2 {
                let ad = WindowedLinearMap::ad(
                    w22cl,
                    window,
                    &Element::symbol(BasisSymbol::graded(layer, shift)),
                )
                .unwrap();
                assert!(space.span_contains(&ad).unwrap());
            }
        }
    }

    // Order 3, centerless: the degree-0 space is five-dimensional — three
    // inner directions, the grading map, and its layer-raising companion
    // J_m ↦ I_m. The companion is Leibniz-checked here as its own oracle; it
    // vanishes identically at order 2, which is why the order-2 count above
    // is one smaller. Nonzero shifts are pure inner (a shifted layer-raising
    // pattern breaks Leibniz, so only the three ad's survive).
    let bms3cl = AlgebraSpec::bms3_centerless();
    let mut raise = WindowedLinearMap::zero(bms3cl, window).unwrap();
    for m in -window..=window {
        raise
            .set_entry(
                BasisSymbol::graded(1, m),
                Element::symbol(BasisSymbol::graded(2, m)),
            )
            .unwrap();
    }
    assert!(raise.leibniz_check().passed());

    let mut bms3_dims = Vec::new();
    for shift in [0i64, 1, -1, 2, -2] {
        let space = derivation_space(bms3cl, shift, window).unwrap();
        bms3_dims.push(space.dimension);
        if shift == 0 {
            assert_eq!(space.dimension, 5);
            for layer in 0..3 {
                let ad = WindowedLinearMap::ad(
                    bms3cl,
                    window,
                    &Element::symbol(BasisSymbol::graded(layer, 0)),
                )
                .unwrap();
                assert!(space.span_contains(&ad).unwrap());
            }
            let dt = WindowedLinearMap::delta_t(bms3cl, window).unwrap();
            assert!(space.span_contains(&dt).unwrap());
            assert!(space.span_contains(&raise).unwrap());

            // Sanity that span membership is not vacuous: weighting the
            // middle layer alone is not a derivation and must be outside.
            let mut bad = WindowedLinearMap::zero(bms3cl, window).unwrap();
            for m in -window..=window {
                let j = BasisSymbol::graded(1, m);
                bad.set_entry(j, Element::symbol(j)).unwrap();
            }
            assert!(!bad.leibniz_check().passed());
            assert!(!space.span_contains(&bad).unwrap());
        } else {
            assert_eq!(space.dimension, 3);
            for layer in 0..3 {
                let ad = WindowedLinearMap::ad(
                    bms3cl,
                    window,
                    &Element::symbol(BasisSymbol::graded(layer, shift)),
                )
                .unwrap();
                assert!(space.span_contains(&ad).unwrap());
            }
        }
    }

    println!(
        "acceptance 4: PASS — window-8 derivation spaces: order-2 centerless dims {:?} \
         for shifts [0,1,-1,2,-2] (inner + grading map at shift 0); order-3 centerless \
         dims {:?} (inner + grading map + layer-raising companion at shift 0, \
         all generators in span)",
        w22_dims, bms3_dims
    );
}

fn random_scalar(rng: &mut ChaCha8Rng) -> QSqrt2 {
    let num = rng.gen_range(-100..=100);
    let den = rng.gen_range(1..=100);
    if rng.gen_bool(0.5) {
        QSqrt2::from_parts(num, den, rng.gen_range(-100..=100), rng.gen_range(1..=100))
    } else {
        QSqrt2::from_parts(num, den, 0, 1)
    }
}

fn random_inner(rng: &mut ChaCha8Rng, spec: AlgebraSpec, reach: i64) -> Element {
    let terms = rng.gen_range(1..=5);
    let mut u = Element::zero();
    for _ in 0..terms {
        let layer = rng.gen_range(0..spec.truncation_order());
        let degree = rng.gen_range(-reach..=reach);
        u.add_term(BasisSymbol::graded(layer, degree), random_scalar(rng));
    }
    u
}

#[test]
fn criterion_5_descriptor_round_trips() {
    let window = 8;
    let config = DecomposeConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut rounds = 0u32;
    for _ in 0..50 {
        for spec in [AlgebraSpec::w22_centerless(), AlgebraSpec::bms3_centerless()] {
            let u = random_inner(&mut rng, spec, 3);
            let c = random_scalar(&mut rng);
            let original = DerivationDescriptor::new(u, c);
            let map = original.to_map(spec, window).unwrap();
            let report = decompose(&map, &config).unwrap();
            match report.outcome {
                DecompositionOutcome::Decomposed {
                    descriptor,
                    residual_zero,
                    residual_support,
                } => {
                    assert!(residual_zero, "nonzero residual on {:?}", residual_support);
                    assert_eq!(descriptor.to_map(spec, window).unwrap(), map);
                }
                DecompositionOutcome::Rejected { probe, .. } => {
                    panic!(
                        "round {rounds} on {}: family member rejected by probe {}",
                        spec.name(),
                        probe.family
                    );
                }
            }
            rounds += 1;
        }
    }
    assert_eq!(rounds, 100);
    println!(
        "acceptance 5: PASS — 100/100 seeded descriptor round-trips at window 8 \
         (50 per centerless algebra), zero residual and exact action equality"
    );
}

#[test]
fn criterion_6_rejection_certificates() {
    let config = DecomposeConfig::default();

    // (a) A single graded defect three degrees up: rejected by a scaled probe
    // with an exact certificate.
    let w22cl = AlgebraSpec::w22_centerless();
    let mut defect = WindowedLinearMap::zero(w22cl, 6).unwrap();
    defect
        .set_entry(
            BasisSymbol::graded(0, 2),
            Element::symbol(BasisSymbol::graded(0, 5)),
        )
        .unwrap();
    let report = decompose(&defect, &config).unwrap();
    let (probe_a, rej_a) = match report.outcome {
        DecompositionOutcome::Rejected { probe, rejection } => (probe, rejection),
        other => panic!("defect map not rejected: {other:?}"),
    };
    assert_eq!(probe_a.family, "scaled");
    assert!(rej_a.verify(), "certificate fails re-verification");
    assert!(!rej_a.certificate_support().is_empty());

    // (b) Degree-preserving junk on the upper layer at degree 0: pointwise
    // and anchored probes admit witnesses, the layer-sum probe does not.
    let mut diag = WindowedLinearMap::zero(w22cl, 6).unwrap();
    diag.set_entry(
        BasisSymbol::graded(1, 0),
        Element::symbol(BasisSymbol::graded(1, 0)),
    )
    .unwrap();
    let report = decompose(&diag, &config).unwrap();
    let (probe_b, rej_b) = match report.outcome {
        DecompositionOutcome::Rejected { probe, rejection } => (probe, rejection),
        other => panic!("degree-zero junk not rejected: {other:?}"),
    };
    assert_eq!(probe_b.family, "layer-sum");
    assert!(rej_b.verify());
    // The same certificate falls out of a direct solve against that probe.
    let ls = probe_layer_sum(w22cl, 1, 6).unwrap();
    let target = diag.apply(&ls.element).unwrap();
    match witness_solve(w22cl, &ls.element, &target, None, true).unwrap() {
        WitnessOutcome::Infeasible(r) => assert!(r.verify()),
        WitnessOutcome::Witness { .. } => panic!("layer-sum probe unexpectedly witnessed"),
    }

    // (c) Middle-layer junk at order 3, both shapes. Each cross arm witnesses
    // one shape and certifies the other, so the pair is what separates them.
    let bms3cl = AlgebraSpec::bms3_centerless();
    let j5 = BasisSymbol::graded(1, 5);
    let mut keep = WindowedLinearMap::zero(bms3cl, 12).unwrap();
    keep.set_entry(j5, Element::symbol(j5)).unwrap();
    let mut lift = WindowedLinearMap::zero(bms3cl, 12).unwrap();
    lift.set_entry(j5, Element::symbol(BasisSymbol::graded(2, 5)))
        .unwrap();

    // The pipeline stops at the first exact certificate it finds; which rung
    // of the ladder that is (transported shift towers come before the cross
    // pair) is an ordering detail, so only the family set is pinned here. The
    // cross mechanism itself is exercised directly below.
    let ladder = ["pointwise", "scaled", "shift", "cross"];
    let report = decompose(&keep, &config).unwrap();
    let (probe_k, rej_k) = match report.outcome {
        DecompositionOutcome::Rejected { probe, rejection } => (probe, rejection),
        other => panic!("middle-layer diagonal junk not rejected: {other:?}"),
    };
    assert!(ladder.contains(&probe_k.family));
    assert!(rej_k.verify());

    let report = decompose(&lift, &config).unwrap();
    let (probe_l, rej_l) = match report.outcome {
        DecompositionOutcome::Rejected { probe, rejection } => (probe, rejection),
        other => panic!("middle-layer raising junk not rejected: {other:?}"),
    };
    assert!(ladder.contains(&probe_l.family));
    assert!(rej_l.verify());

    // Direct cross-arm solves, both directions.
    let arms = probe_cross(bms3cl, 1, 5, 12).unwrap();
    assert_eq!(arms.len(), 2);
    let shifted = &arms[0];
    let doubled = &arms[1];
    assert_eq!(shifted.params.get("arm").map(String::as_str), Some("shifted"));
    assert_eq!(doubled.params.get("arm").map(String::as_str), Some("doubled"));
    // The shifted arm witnesses the diagonal shape but certifies the raising
    // shape; the doubled arm does the opposite.
    let t = keep.apply(&shifted.element).unwrap();
    assert!(witness_solve(bms3cl, &shifted.element, &t, None, true)
        .unwrap()
        .is_witnessed());
    let t = keep.apply(&doubled.element).unwrap();
    match witness_solve(bms3cl, &doubled.element, &t, None, true).unwrap() {
        WitnessOutcome::Infeasible(r) => assert!(r.verify()),
        WitnessOutcome::Witness { .. } => panic!("doubled arm missed the diagonal junk"),
    }
    let t = lift.apply(&shifted.element).unwrap();
    match witness_solve(bms3cl, &shifted.element, &t, None, true).unwrap() {
        WitnessOutcome::Infeasible(r) => assert!(r.verify()),
        WitnessOutcome::Witness { .. } => panic!("shifted arm missed the raising junk"),
    }
    let t = lift.apply(&doubled.element).unwrap();
    assert!(witness_solve(bms3cl, &doubled.element, &t, None, true)
        .unwrap()
        .is_witnessed());

    // (d) A graded symbol sent to a pure central value on the centered
    // algebra: flagged with an exact certificate.
    let w22 = AlgebraSpec::w22();
    let mut stray = WindowedLinearMap::zero(w22, 4).unwrap();
    stray
        .set_entry(
            BasisSymbol::graded(0, 2),
            Element::symbol(BasisSymbol::central(0)),
        )
        .unwrap();
    let report = check_center(&stray, &config).unwrap();
    assert!(!report.passed());
    assert!(report.central_entries.is_empty());
    assert_eq!(report.pure_central_rows.len(), 1);
    let row = &report.pure_central_rows[0];
    assert_eq!(row.symbol, BasisSymbol::graded(0, 2));
    match &row.outcome {
        PureCentralOutcome::Rejected(r) => assert!(r.verify()),
        PureCentralOutcome::Witnessed(_) => panic!("pure central value unexpectedly witnessed"),
    }

    println!(
        "acceptance 6: PASS — all four junk shapes rejected with exact re-verified \
         certificates (scaled / layer-sum / {} / {} / central); each cross arm \
         certifies exactly the middle-layer shape the other witnesses",
        probe_k.family, probe_l.family
    );
}

fn dot(row: &[QSqrt2], x: &[QSqrt2]) -> QSqrt2 {
    let mut acc = QSqrt2::zero();
    for (a, b) in row.iter().zip(x) {
        acc = acc + a * b;
    }
    acc
}

#[test]
fn criterion_7_solver_torture() {
    fn entry(rng: &mut ChaCha8Rng) -> QSqrt2 {
        if rng.gen_bool(0.6) {
            return QSqrt2::zero();
        }
        let irr = if rng.gen_bool(0.2) { rng.gen_range(-3..=3) } else { 0 };
        QSqrt2::from_parts(rng.gen_range(-5..=5), rng.gen_range(1..=3), irr, 1)
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut solved = 0u32;
    let mut rejected = 0u32;
    for round in 0..1000 {
        let rows = rng.gen_range(1..=12);
        let cols = rng.gen_range(1..=12);
        let labels: Vec<VarLabel> = (0..cols).map(VarLabel::Aux).collect();
        let mut sys = LinearSystem::new(labels);
        let matrix: Vec<Vec<QSqrt2>> = (0..rows)
            .map(|_| (0..cols).map(|_| entry(&mut rng)).collect())
            .collect();
        let planted = rng.gen_bool(0.5);
        let rhs: Vec<QSqrt2> = if planted {
            let x0: Vec<QSqrt2> = (0..cols).map(|_| entry(&mut rng)).collect();
            matrix.iter().map(|row| dot(row, &x0)).collect()
        } else {
            (0..rows).map(|_| entry(&mut rng)).collect()
        };
        for (row, b) in matrix.iter().zip(&rhs) {
            sys.add_row(row.clone(), b.clone()).unwrap();
        }
        match sys.solve() {
            SolveOutcome::Solution {
                particular,
                nullspace,
            } => {
                assert!(sys.check_solution(&particular).unwrap(), "round {round}");
                for v in &nullspace {
                    assert!(
                        sys.multiply(v).unwrap().iter().all(QSqrt2::is_zero),
                        "nullspace vector fails on round {round}"
                    );
                }
                // Rank must not depend on the elimination order, and the
                // nullity must complement it.
                assert_eq!(sys.rank_forward(), sys.rank_reverse(), "round {round}");
                assert_eq!(nullspace.len(), cols - sys.rank_forward(), "round {round}");
                solved += 1;
            }
            SolveOutcome::Infeasible { certificate } => {
                assert!(sys.verify_certificate(&certificate), "round {round}");
                assert!(
                    !planted,
                    "round {round}: system with a planted solution reported infeasible"
                );
                assert_eq!(sys.rank_forward(), sys.rank_reverse(), "round {round}");
                rejected += 1;
            }
        }
    }
    assert_eq!(solved + rejected, 1000);
    assert!(solved > 0 && rejected > 0);
    println!(
        "acceptance 7: PASS — 1000 seeded systems up to 12x12: {solved} solved \
         (resubstituted, nullspace checked, rank stable under reversed elimination), \
         {rejected} infeasible (certificates re-verified, none with a planted solution)"
    );
}

#[test]
fn criterion_8_generic_order() {
    let spec = AlgebraSpec::new(4, true);
    assert_eq!("n=4".parse::<AlgebraSpec>().unwrap(), spec);

    assert!(antisymmetry_check(spec, 4).passed());
    assert!(jacobi_check(spec, 4).passed());
    let dt = WindowedLinearMap::delta_t(spec, 4).unwrap();
    assert!(dt.leibniz_check().passed());

    let config = DecomposeConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut rounds = 0u32;
    for _ in 0..10 {
        let u = random_inner(&mut rng, spec, 3);
        let c = random_scalar(&mut rng);
        let original = DerivationDescriptor::new(u, c);
        let map = original.to_map(spec, 4).unwrap();
        let report = decompose(&map, &config).unwrap();
        match report.outcome {
            DecompositionOutcome::Decomposed {
                descriptor,
                residual_zero,
                ..
            } => {
                assert!(residual_zero);
                assert_eq!(descriptor.to_map(spec, 4).unwrap(), map);
            }
            DecompositionOutcome::Rejected { probe, .. } => {
                panic!("order-4 family member rejected by probe {}", probe.family);
            }
        }
        rounds += 1;
    }
    assert_eq!(rounds, 10);
    println!(
        "acceptance 8: PASS — order-4 centered algebra: jacobi and antisymmetry on \
         [-4,4], grading map Leibniz at window 4, 10/10 descriptor round-trips"
    );
}
