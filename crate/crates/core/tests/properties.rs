use num_complex::Complex64;
use proptest::prelude::*;

use qbc_core::codes::{self, Bit, BitString, LinearCode};
use qbc_core::counterfactual::{fbs_evolve, FbsConfig};
use qbc_core::nogo::{self, CompositeSystem};
use qbc_core::optics::{self, BeamSplitterParams, Mode, PhotonState, Rail, MAX_BIN};
use qbc_core::protocol::{self, AlicePolicy, Announcement, BobMode, BobPolicy, ProtocolParams, UnveilVerdict};
use qbc_core::seeding::master_rng;
use qbc_core::strategies::{self, ResendStrategy};

fn reflectivity() -> impl Strategy<Value = f64> {
    (0.02f64..0.98).prop_filter("asymmetric", |r| (r - 0.5).abs() > 1e-6)
}

fn photon() -> impl Strategy<Value = PhotonState> {
    photon_within(MAX_BIN)
}

/// Random normalized photon with no X amplitude after `last_x_bin`.
fn photon_within(last_x_bin: usize) -> impl Strategy<Value = PhotonState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * (MAX_BIN + 1))
        .prop_map(move |mut v| {
            for (k, z) in v.iter_mut().enumerate() {
                if k % 2 == 0 && k / 2 > last_x_bin {
                    *z = (0.0, 0.0);
                }
            }
            v[1] = (1.0, 0.0);
            let norm: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            let amps: Vec<(Mode, Complex64)> = v
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let rail = if k % 2 == 0 { Rail::X } else { Rail::Y };
                    (Mode::new(rail, k / 2), Complex64::new(*a, *b) / norm)
                })
                .collect();
            PhotonState::from_amplitudes(&amps, 0.0).unwrap()
        })
}

/// Random full-rank code of length `n` and dimension `k`.
fn code(n: usize, k: usize) -> impl Strategy<Value = LinearCode> {
    any::<u64>().prop_filter_map("full rank", move |seed| {
        let mut rng = master_rng(seed);
        codes::random_code(n, k, &mut rng).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optical_elements_conserve_probability(state in photon(), r in reflectivity(), bin in 0..=MAX_BIN, theta in 0.0f64..std::f64::consts::TAU) {
        let beam = BeamSplitterParams::new(r).unwrap();
        let after = optics::bs_apply(&state, bin, &beam);
        prop_assert!((after.total_probability() - 1.0).abs() < 1e-12);
        let after = optics::phase_apply(&after, Rail::Y, theta);
        prop_assert!((after.total_probability() - 1.0).abs() < 1e-12);
        let inner = state.inner(&optics::bs_apply(&state, bin, &beam));
        prop_assert!(inner.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn beam_splitter_is_linear(a in photon(), b in photon(), r in reflectivity(), bin in 0..=MAX_BIN) {
        let beam = BeamSplitterParams::new(r).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mix = |x: &PhotonState, y: &PhotonState| -> Vec<(Mode, Complex64)> {
            Rail::BOTH
                .into_iter()
                .flat_map(|rail| (0..=MAX_BIN).map(move |t| Mode::new(rail, t)))
                .map(|m| (m, (x.amp(m) + y.amp(m)) * s))
                .collect()
        };
        let raw = mix(&a, &b);
        let norm: f64 = raw.iter().map(|(_, z)| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let sum = PhotonState::from_amplitudes(
            &raw.iter().map(|(m, z)| (*m, z / norm)).collect::<Vec<_>>(),
            0.0,
        )
        .unwrap();
        let lhs = optics::bs_apply(&sum, bin, &beam);
        let rhs = mix(&optics::bs_apply(&a, bin, &beam), &optics::bs_apply(&b, bin, &beam));
        for (m, z) in rhs {
            prop_assert!((lhs.amp(m) - z / norm).norm() < 1e-12);
        }
    }

    #[test]
    fn global_phase_never_changes_detection(state in photon_within(MAX_BIN - 1), r in reflectivity(), theta in 0.0f64..std::f64::consts::TAU) {
        let beam = BeamSplitterParams::new(r).unwrap();
        let rotated = optics::phase_apply(&optics::phase_apply(&state, Rail::X, theta), Rail::Y, theta);
        let d0 = optics::detection_distribution(&state, &beam).unwrap();
        let d1 = optics::detection_distribution(&rotated, &beam).unwrap();
        prop_assert!(d0.max_deviation(&d1) < 1e-12);
    }

    #[test]
    fn honest_encodings_are_orthogonal_and_deterministic(r in reflectivity()) {
        let beam = BeamSplitterParams::asymmetric(r).unwrap();
        let s0 = optics::encode(Bit::Zero, &beam);
        let s1 = optics::encode(Bit::One, &beam);
        prop_assert!(s0.inner(&s1).norm() < 1e-12);
        for (bit, s) in [(Bit::Zero, s0), (Bit::One, s1)] {
            let d = optics::detection_distribution(&s, &beam).unwrap();
            prop_assert!(d.mismatch_prob(bit) < 1e-12);
        }
    }

    #[test]
    fn codewords_close_under_xor(c in code(10, 4), m1 in 0u64..16, m2 in 0u64..16) {
        let a = c.encode_message(m1);
        let b = c.encode_message(m2);
        prop_assert!(c.contains(&a.xor(&b).unwrap()));
        prop_assert!(a.distance(&b).unwrap() >= c.d() || m1 == m2);
    }

    #[test]
    fn coset_split_is_balanced_when_both_classes_exist(c in code(9, 4), mask in 1u64..512) {
        let r = BitString::from_word(9, mask).unwrap();
        let split = codes::coset_split(&c, &r).unwrap();
        if !split.class(Bit::Zero).is_empty() && !split.class(Bit::One).is_empty() {
            prop_assert!(split.is_balanced());
            prop_assert_eq!(split.class(Bit::Zero).len() + split.class(Bit::One).len(), 16);
            for b in [Bit::Zero, Bit::One] {
                for w in split.class(b) {
                    prop_assert_eq!(codes::parity(w, &r).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn honest_sessions_always_accept(c in code(8, 3), mask in 1u64..256, r in reflectivity(), f in 0.0f64..1.0, seed in any::<u64>(), one in any::<bool>()) {
        let rmask = BitString::from_word(8, mask).unwrap();
        let split = codes::coset_split(&c, &rmask).unwrap();
        prop_assume!(!split.class(Bit::One).is_empty());
        let params = ProtocolParams::new(c, rmask, r, f, None, seed).unwrap();
        let mut rng = master_rng(seed);
        let b = Bit::from(one);
        let t = protocol::run_commit(&AlicePolicy::Honest(b), &BobPolicy::Honest, &params, &mut rng).unwrap();
        prop_assert_eq!(t.committed_b, b);
        // every honest strategy learns the true bit, so an honest unveil always passes
        let v = protocol::run_unveil(&params, &t, &Announcement::honest(&t)).unwrap();
        prop_assert_eq!(v, UnveilVerdict::Accept);
        let bypassed = t.modes.iter().enumerate().filter(|(_, m)| **m == BobMode::Bypass);
        for (i, _) in bypassed {
            prop_assert!(!t.alice_events[i].is_mismatch(t.codeword.get(i)));
        }
    }

    #[test]
    fn resent_branches_are_normalized(r in reflectivity(), one in any::<bool>()) {
        let beam = BeamSplitterParams::asymmetric(r).unwrap();
        let bit = Bit::from(one);
        for s in strategies::closed_form_family() {
            let branches = strategies::resent_branches(&s, bit, &beam);
            let total: f64 = branches.iter().map(|(w, _)| w).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let p = strategies::detection_prob(&s, bit, &beam);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn fbs_conserves_probability(m in 1usize..300, theta in -7.0f64..7.0, blocked in any::<bool>()) {
        let st = fbs_evolve(&FbsConfig::new(m, theta).unwrap(), blocked);
        prop_assert!((st.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_is_a_probability(f in 0.0f64..1.0, eps in 0.0f64..1.0) {
        let p = protocol::intercept_posterior_p(f, eps).unwrap();
        prop_assert!((0.0..=f + 1e-15).contains(&p));
        prop_assert!(protocol::escape_probability(p, 2) <= protocol::escape_probability(p, 1) + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composite_pipeline_keeps_valid_states(
        modes in prop::collection::vec(any::<bool>(), 2),
        seed in any::<u64>(),
        one in any::<bool>(),
    ) {
        let system = CompositeSystem::new(2).unwrap();
        let code = LinearCode::from_text_rows(&["11", "01"]).unwrap();
        let r: BitString = "01".parse().unwrap();
        let modes: Vec<BobMode> = modes
            .into_iter()
            .map(|i| if i { BobMode::Intercept } else { BobMode::Bypass })
            .collect();
        let state = system.committed_state(&code, &r, Bit::from(one)).unwrap();
        let after = nogo::apply_ub(&system, &modes, &state).unwrap();
        let mut rng = master_rng(seed);
        let v = qbc_core::linalg::random_unitary(4, &mut rng);
        let moved = nogo::apply_beta_local(&system, &v, &after).unwrap();
        let red = nogo::bob_reduced_state(&moved, &system).unwrap();
        red.validate(1e-9).unwrap();
        prop_assert!((moved.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(moved.hermiticity_deviation() < 1e-9);
    }
}

#[test]
fn estimator_is_unbiased_for_matching_strategy() {
    // BlindGuessOnTime mismatches with probability 1/2, equal to epsilon
    let f = 0.3;
    let params = ProtocolParams::new(
        codes::BuiltinCode::ExtendedHamming84.code(),
        "10000000".parse().unwrap(),
        0.3,
        f,
        Some(0.5),
        11,
    )
    .unwrap()
    .with_strategy(ResendStrategy::BlindGuessOnTime);
    let trials = 20_000u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in 0..trials {
        let mut rng = qbc_core::seeding::trial_rng(params.seed(), t);
        let s = protocol::run_commit(&AlicePolicy::Honest(Bit::Zero), &BobPolicy::Honest, &params, &mut rng).unwrap();
        sum += s.f_estimate;
        sum_sq += s.f_estimate * s.f_estimate;
    }
    let mean = sum / trials as f64;
    let var = sum_sq / trials as f64 - mean * mean;
    let se = (var / trials as f64).sqrt();
    assert!((mean - f).abs() <= 3.0 * se, "mean {mean} vs {f} (se {se})");
}
