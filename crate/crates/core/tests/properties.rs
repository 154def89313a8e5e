mod common;

use bandwave::builder::{
    build_family, extend_bell, random_candidate, CandidateKind, Family, FrequencyWavelet,
};
use bandwave::cancel::{sum_is_zero, Term};
use bandwave::classes::{classify_verified, partial_self_similarity, DEFAULT_MAX_K};
use bandwave::descriptor::WaveletDescriptor;
use bandwave::dimension::{dimension_function, scaling_modulus_sq};
use bandwave::exact::{pow2, rat, PhasePi, Rational, RationalPi, SqrtRational};
use bandwave::profile::{common_refinement, lattice_sum, Lattice, Piece, Pullback, StepProfile};
use bandwave::sets::{Interval, IntervalSet, SnGeometry};
use bandwave::time_domain::{identity_defect, plancherel_norm_sq, sample_time, GramContext};
use bandwave::verifier::{check_thm32, t_m_cells, verify, verify_with_global_phase};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-400i64..400, 1i64..60).prop_map(|(p, q)| rat(p, q))
}

fn rational_pi() -> impl Strategy<Value = RationalPi> {
    rational().prop_map(RationalPi::new)
}

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((-60i64..60, 1i64..20), 0..6).prop_map(|v| {
        IntervalSet::from_intervals(
            v.into_iter().map(|(lo, len)| {
                Interval::new(RationalPi::frac(lo, 7), RationalPi::frac(lo + len, 7))
            }),
        )
    })
}

/// Nonnegative step profile on `[−4π, 4π)` with breakpoints on a `π/5` grid.
fn step_profile() -> impl Strategy<Value = StepProfile> {
    prop::collection::btree_set(-20i64..20, 2..8).prop_flat_map(|cuts| {
        let cuts: Vec<i64> = cuts.into_iter().collect();
        let n = cuts.len() - 1;
        prop::collection::vec(0i64..9, n).prop_map(move |vals| {
            let pieces = cuts
                .windows(2)
                .zip(vals)
                .filter(|(_, v)| *v > 0)
                .map(|(w, v)| {
                    Piece::new(
                        RationalPi::frac(w[0], 5),
                        RationalPi::frac(w[1], 5),
                        rat(v, 8),
                    )
                })
                .collect();
            StepProfile::from_pieces(pieces).unwrap()
        })
    })
}

fn phase() -> impl Strategy<Value = PhasePi> {
    (-24i64..24, 1i64..13).prop_map(|(p, q)| PhasePi::frac(p, q))
}

fn candidate_args() -> impl Strategy<Value = (u32, u64, CandidateKind, bool)> {
    (
        2u32..=8,
        any::<u64>(),
        prop_oneof![
            Just(CandidateKind::Valid),
            Just(CandidateKind::BrokenIii),
            Just(CandidateKind::BrokenV)
        ],
        any::<bool>(),
    )
}

fn candidate((n, seed, kind, even): (u32, u64, CandidateKind, bool)) -> FrequencyWavelet {
    random_candidate(&SnGeometry::new(n).unwrap(), seed, kind, even)
        .unwrap()
        .wavelet
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dilation_distributes_over_translation(x in rational_pi(), j in -20i32..20, k in -50i64..50) {
        let lhs = x.shift_2pi(k).scale_pow2(j);
        let rhs = &x.scale_pow2(j) + &RationalPi::int(2 * k).scale(&pow2(j));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sqrt_products_commute_and_square(a in rational(), b in rational(), c in rational()) {
        let (a, b, c) = (a.abs(), b.abs(), c.abs());
        let (sa, sb, sc) = (
            SqrtRational::new(a.clone()).unwrap(),
            SqrtRational::new(b).unwrap(),
            SqrtRational::new(c).unwrap(),
        );
        prop_assert_eq!(sa.mul(&sb), sb.mul(&sa));
        prop_assert_eq!(sa.mul(&sb).mul(&sc), sa.mul(&sb.mul(&sc)));
        prop_assert_eq!(sa.square(), a);
    }

    #[test]
    fn phase_addition_is_associative(a in phase(), b in phase(), c in phase()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.antipode().antipode(), a.clone());
        prop_assert_eq!(a.add(&a.neg()), PhasePi::zero());
    }

    #[test]
    fn normalization_is_idempotent(s in interval_set()) {
        prop_assert_eq!(s.normalize().normalize(), s.normalize());
    }

    #[test]
    fn dilation_scales_measure(s in interval_set(), j in -64i32..=64) {
        prop_assert_eq!(s.dilate(j).measure(), s.measure().scale(&pow2(j)));
    }

    #[test]
    fn set_algebra_measures(a in interval_set(), b in interval_set()) {
        let union = a.union(&b).measure();
        let inter = a.intersection(&b).measure();
        prop_assert_eq!(&union + &inter, &a.measure() + &b.measure());
        prop_assert_eq!(a.difference(&b).measure(), &a.measure() - &inter);
        prop_assert!(a.intersection(&b).is_subset(&a));
    }

    #[test]
    fn pullback_jacobian(p in step_profile(), j in -6i32..6, k in -4i64..4) {
        let area = p.integrate();
        prop_assert_eq!(p.pullback(Pullback::Dilate(j)).integrate(), area.scale(&pow2(-j)));
        prop_assert_eq!(p.pullback(Pullback::Translate(k)).integrate(), area);
    }

    #[test]
    fn periodization_ignores_pretranslation(p in step_profile(), m in -5i64..5) {
        let base = lattice_sum(&p, Lattice::Translations).unwrap();
        let moved = lattice_sum(&p.pullback(Pullback::Translate(m)), Lattice::Translations).unwrap();
        prop_assert_eq!(base.profile, moved.profile);
    }

    #[test]
    fn refinement_is_no_finer_than_breakpoints(ps in prop::collection::vec(step_profile(), 1..4)) {
        let r = common_refinement(&ps).unwrap();
        let breakpoints: usize = ps.iter().map(|p| p.breakpoints().len()).sum();
        prop_assert!(r.cells.len() <= breakpoints);
        for (cell, vals) in r.cells.iter().zip(&r.values) {
            for (p, v) in ps.iter().zip(vals) {
                prop_assert_eq!(&p.value_at(&cell.lo), v);
            }
        }
    }

    #[test]
    fn self_similarity_matches_definition(e in interval_set(), q in -12i64..12, k in 0i32..4) {
        let alpha = RationalPi::int(q).scale_pow2(k);
        let overlap = e.intersection(&e.shift(&alpha)).shift(&-&alpha);
        match partial_self_similarity(&e, &alpha) {
            Some(w) => {
                prop_assert!(w.measure.is_positive());
                prop_assert_eq!(&w.f, &overlap);
                prop_assert!(w.f.is_subset(&e) && w.f.shift(&alpha).is_subset(&e));
            }
            None => prop_assert!(overlap.measure().is_zero()),
        }
    }

    #[test]
    fn far_shifts_never_overlap(e in interval_set(), extra in 1i64..50) {
        if let Some(sup) = e.sup_abs() {
            let alpha = &sup.scale_pow2(1) + &RationalPi::frac(extra, 7);
            prop_assert!(partial_self_similarity(&e, &alpha).is_none());
            prop_assert!(partial_self_similarity(&e, &-&alpha).is_none());
        }
    }

    #[test]
    fn antipodal_pairs_cancel(mags in prop::collection::vec((1i64..20, 1i64..20), 1..5), turns in prop::collection::vec(phase(), 5)) {
        let mut terms = Vec::new();
        for ((p, q), t) in mags.iter().zip(&turns) {
            let m = SqrtRational::new(rat(*p, *q)).unwrap();
            terms.push(Term::new(m.clone(), t.clone()));
            terms.push(Term::new(m, t.antipode()));
        }
        let z = sum_is_zero(&terms);
        prop_assert!(z.is_zero && !z.numeric);
        terms.pop();
        prop_assert!(!sum_is_zero(&terms).is_zero);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eq1_and_eq2_imply_eq3_and_eq4(args in candidate_args()) {
        let r = verify(&candidate(args)).unwrap();
        if r.norm_ok() && r.eq1.ok && r.eq2.ok {
            prop_assert!(r.eq3.ok && r.eq4.ok);
        }
    }

    #[test]
    fn verdict_matches_support_conditions(args in candidate_args()) {
        let w = candidate(args);
        let r = verify(&w).unwrap();
        let thm = check_thm32(&w).unwrap();
        prop_assert_eq!(r.verdict, thm.all());
        prop_assert_eq!(r.verdict, args.2 == CandidateKind::Valid);
    }

    #[test]
    fn t_m_conjugate_symmetry(args in candidate_args()) {
        let w = candidate(args);
        let bound = bandwave::verifier::eq2_range(&w);
        for m in (1..=bound).step_by(2).flat_map(|m| [m, -m]) {
            let fwd = t_m_cells(&w, m);
            let back = t_m_cells(&w, -m);
            let shifted: Vec<(Interval, Vec<Term>)> = back
                .into_iter()
                .map(|(cell, terms)| (cell.shift(&RationalPi::int(-2 * m)), terms.iter().map(Term::conj).collect()))
                .collect();
            prop_assert_eq!(fwd, shifted, "m = {}", m);
        }
    }

    #[test]
    fn global_phase_preserves_verdict(args in candidate_args(), c in phase()) {
        let w = candidate(args);
        prop_assert_eq!(verify(&w).unwrap().verdict, verify_with_global_phase(&w, &c).unwrap().verdict);
    }

    #[test]
    fn extended_bells_satisfy_coupling(n in 3u32..=10, seed in any::<u64>(), even in any::<bool>()) {
        let g = SnGeometry::new(n).unwrap();
        let c = random_candidate(&g, seed, CandidateKind::Valid, even).unwrap();
        let out = extend_bell(&g, &c.bell2).unwrap();
        let k = g.coupling_exponent();
        let window = IntervalSet::from_intervals([g.bell_window()]);
        let one = Rational::one();
        let dil = out.pullback(Pullback::Dilate(k));
        let tr = out.pullback(Pullback::Translate(-1));
        prop_assert!(out.add(&dil).mismatches(&window, &one).is_empty());
        prop_assert!(out.add(&tr).mismatches(&window, &one).is_empty());
        let coupled = dil.pullback(Pullback::Translate(-1)).scale_values(&-Rational::one());
        prop_assert!(out.add(&coupled).mismatches(&window, &Rational::zero()).is_empty());
        prop_assert_eq!(out.integrate(), RationalPi::two_pi());
    }

    #[test]
    fn dimension_integrates_to_two_pi(n in 3u32..=8, seed in any::<u64>()) {
        let c = candidate((n, seed, CandidateKind::Valid, false));
        let d = dimension_function(&c).unwrap();
        prop_assert_eq!(d.profile.integrate(), RationalPi::two_pi());
        prop_assert!(d.is_even());
        let s = scaling_modulus_sq(&c).unwrap();
        let telescoped = s.pullback(Pullback::Dilate(1)).add(&c.mag2().pullback(Pullback::Dilate(1)));
        prop_assert_eq!(s, telescoped);
    }

    #[test]
    fn descriptors_round_trip(args in candidate_args()) {
        let w = candidate(args);
        let d = WaveletDescriptor::from_wavelet(&w);
        let back = WaveletDescriptor::from_json(&d.to_json()).unwrap();
        prop_assert_eq!(back.to_wavelet().unwrap(), w);
    }

    #[test]
    fn hermitian_spectra_give_real_samples(args in candidate_args()) {
        let w = candidate(args);
        let s = sample_time(&w, -10.0, 10.0, 41).unwrap();
        if s.real_valued {
            prop_assert!(s.values.iter().all(|v| v.im.abs() < 1e-12));
        }
        prop_assert!((plancherel_norm_sq(&w) - rat_to_f64(&bandwave::verifier::check_norm(&w))).abs() < 1e-12);
    }
}

fn rat_to_f64(q: &Rational) -> f64 {
    bandwave::exact::to_f64(q)
}

#[test]
fn family_supports() {
    for n in 3..=10 {
        let g = SnGeometry::new(n).unwrap();
        assert_eq!(
            build_family(Family::Gamma, n, None).unwrap().support(),
            g.w_n()
        );
        let p = (1u32 << (n - 2)) - 1;
        assert_eq!(
            build_family(Family::MsfB, n, Some(p)).unwrap().support(),
            g.w_n(),
            "n = {n}"
        );
    }
}

#[test]
fn descriptor_round_trip_all_families() {
    for n in 2..=10 {
        for f in Family::ALL {
            let ps: Vec<Option<u32>> = if f == Family::MsfB && n >= 3 {
                (1..=(1u32 << (n - 1)) - 2).map(Some).collect()
            } else {
                vec![None]
            };
            for p in ps {
                let Ok(w) = build_family(f, n, p) else {
                    assert_eq!(n, 2, "{f} failed at n = {n}");
                    continue;
                };
                let back =
                    WaveletDescriptor::from_json(&WaveletDescriptor::from_wavelet(&w).to_json())
                        .unwrap();
                assert_eq!(back.to_wavelet().unwrap(), w);
            }
        }
    }
}

#[test]
fn psi_sixone_lower_levels_are_clear() {
    for n in 3..=8 {
        let w = build_family(Family::PsiSixOne, n, None).unwrap();
        let label = classify_verified(&w, DEFAULT_MAX_K);
        let cleared: Vec<u32> = label.cleared.iter().map(|l| l.k).collect();
        assert_eq!(cleared, (1..=n - 2).collect::<Vec<_>>());
    }
}

#[test]
fn gram_identity_for_built_ins_and_defect_for_broken() {
    let js: Vec<i32> = (-2..=2).collect();
    let ks: Vec<i64> = (-8..=8).collect();
    for n in 3..=5 {
        for f in [
            Family::Gamma,
            Family::MsfA,
            Family::PsiSixOne,
            Family::WSixTwo,
            Family::Shannon,
        ] {
            let g = GramContext::new(&build_family(f, n, None).unwrap())
                .matrix(&js, &ks)
                .unwrap();
            assert!(identity_defect(&g) <= 1e-8, "{f} n = {n}");
        }
    }
    for kind in [CandidateKind::BrokenIii, CandidateKind::BrokenV] {
        for seed in 0..10 {
            let w = candidate((3 + (seed % 3) as u32, seed, kind, seed % 2 == 0));
            let g = GramContext::new(&w).matrix(&js, &ks).unwrap();
            let defect = identity_defect(&g);
            // well clear of the bound every valid wavelet meets above
            assert!(
                defect > 1e-4,
                "{} seed {seed}: identity defect {defect:e}",
                kind.name()
            );
        }
    }
}

#[test]
fn extension_total_weight() {
    for n in 3..=10 {
        let g = SnGeometry::new(n).unwrap();
        let half =
            StepProfile::constant_on(&IntervalSet::from_intervals([g.bell_window()]), rat(1, 2));
        assert_eq!(
            extend_bell(&g, &half).unwrap().integrate(),
            RationalPi::two_pi()
        );
    }
}
