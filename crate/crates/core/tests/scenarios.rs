use qbc_core::codes::{self, Bit, BuiltinCode};
use qbc_core::counterfactual::{self, FbsConfig};
use qbc_core::protocol::{self, AlicePolicy, AliceVerdict, Announcement, BobPolicy, ProtocolParams, UnveilVerdict};
use qbc_core::seeding::trial_rng;

fn hamming84(f: f64, eps: Option<f64>, seed: u64) -> ProtocolParams {
    ProtocolParams::new(
        BuiltinCode::ExtendedHamming84.code(),
        "10000000".parse().unwrap(),
        0.3,
        f,
        eps,
        seed,
    )
    .unwrap()
}

#[test]
fn probing_attack_reads_modes_without_the_defense() {
    let params = hamming84(0.5, Some(0.5), 5);
    let fbs = FbsConfig::new(200, 0.0).unwrap();
    let off = counterfactual::attack_experiment(&params, false, &fbs, 300).unwrap();
    let on = counterfactual::attack_experiment(&params, true, &fbs, 300).unwrap();
    assert!(off.mode_accuracy >= 0.99, "{off:?}");
    assert!(on.mode_accuracy < 0.9, "{on:?}");
    assert!(on.cheat_success_rate <= off.cheat_success_rate);
    assert_eq!(off.flip_budget, 2.0);
    assert_eq!(counterfactual::min_cheat_flips(&params).unwrap(), 4);
}

#[test]
fn full_interception_is_caught_and_unveil_checks_bob_records() {
    let params = hamming84(1.0, Some(0.5), 9);
    let mut aborted = 0;
    for t in 0..200 {
        let mut rng = trial_rng(params.seed(), t);
        let s = protocol::run_commit(&AlicePolicy::Honest(Bit::One), &BobPolicy::FullIntercept, &params, &mut rng)
            .unwrap();
        if s.alice_verdict == AliceVerdict::AbortCheatingBob {
            aborted += 1;
            continue;
        }
        // every bit is known to Bob, so any other codeword contradicts his records
        let (pos, _) = s.known_to_bob();
        assert_eq!(pos.len(), 8);
        let other = params
            .split()
            .class(Bit::Zero)
            .first()
            .copied()
            .unwrap();
        let v = protocol::run_unveil(&params, &s, &Announcement { b: Bit::Zero, c: other }).unwrap();
        assert_eq!(v, UnveilVerdict::RejectInterceptMismatch);
    }
    assert!(aborted > 150, "{aborted}");
}

#[test]
fn midpoint_session_commits_to_neither_class() {
    let params = hamming84(0.0, Some(0.5), 3);
    let mut rng = trial_rng(3, 0);
    let s = protocol::run_commit(&AlicePolicy::MidpointCheat, &BobPolicy::Honest, &params, &mut rng).unwrap();
    assert!(!params.code().contains(&s.codeword));
    let (c0, c1) = s.midpoint_pair.unwrap();
    assert_eq!(codes::parity(&c0, params.r()).unwrap(), Bit::Zero);
    assert_eq!(codes::parity(&c1, params.r()).unwrap(), Bit::One);
    assert_eq!(s.codeword.distance(&c0).unwrap(), 2);
    assert_eq!(s.codeword.distance(&c1).unwrap(), 2);
    // with no interceptions either announcement is accepted
    for (b, c) in [(Bit::Zero, c0), (Bit::One, c1)] {
        let v = protocol::run_unveil(&params, &s, &Announcement { b, c }).unwrap();
        assert_eq!(v, UnveilVerdict::Accept);
    }
}

#[test]
fn default_epsilon_is_the_closed_form_minimum() {
    for r in [0.1, 0.3, 0.7, 0.9] {
        let params = ProtocolParams::new(
            BuiltinCode::Hamming74.code(),
            "1000000".parse().unwrap(),
            r,
            0.2,
            None,
            0,
        )
        .unwrap();
        let expected = f64::min(r, 1.0 - r);
        assert!((params.epsilon() - expected).abs() < 1e-12);
    }
}
