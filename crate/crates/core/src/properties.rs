//! Randomized invariants across modules.

use proptest::prelude::*;

use crate::battery_sim::{alpha_from_battery, LinkBudget};
use crate::codec::{extended_bch, pack_bits, parse_code, write_code, BitMatrix, CodeSpec};
use crate::fb_bounds::{q_func, q_inv, NormalApproximation};
use crate::moop::{attainable_contains, optimize_on, pareto_boundary, ReferencePair, ScalarizationSpec, Theta};
use crate::os_decoder::{decode, DecoderConfig};
use crate::rng::trial_rng;
use crate::codec::transmit;
use crate::fb_bounds::SnrDb;
use crate::tradeoff::{min_power_penalty, ConstrainedChannel, ConstraintSet, TradeoffModel};

fn bits(len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, len)
}

fn eb64() -> &'static CodeSpec {
    use std::sync::OnceLock;
    static CODE: OnceLock<CodeSpec> = OnceLock::new();
    CODE.get_or_init(|| extended_bch(7, 10).unwrap())
}

fn channel() -> &'static ConstrainedChannel<f64> {
    use std::sync::OnceLock;
    static CH: OnceLock<ConstrainedChannel<f64>> = OnceLock::new();
    CH.get_or_init(|| ConstrainedChannel::new(128, TradeoffModel::preset(), ConstraintSet::reference()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_inverse_round_trip(x in -6.0f64..8.0) {
        let back = q_inv(q_func(x)).unwrap();
        prop_assert!((back - x).abs() < 1e-7 * (1.0 + x.abs()), "{x} -> {back}");
    }

    #[test]
    fn rate_grows_with_snr_and_blocklength(a in -5.0f64..20.0, d in 0.05f64..5.0, n in 32usize..2048) {
        let na = NormalApproximation::new(n, 1e-5).unwrap();
        let longer = NormalApproximation::new(2 * n, 1e-5).unwrap();
        let (lo, hi) = (na.max_rate_db(a), na.max_rate_db(a + d));
        prop_assert!(hi >= lo);
        if lo > 0.0 {
            prop_assert!(hi > lo);
            prop_assert!(longer.max_rate_db(a) > lo);
        }
    }

    #[test]
    fn required_snr_inverts_rate(r in 0.05f64..0.95) {
        let na = NormalApproximation::new(128, 1e-5).unwrap();
        let db = na.required_snr_db(r).unwrap();
        prop_assert!((na.max_rate_db(db) - r).abs() < 1e-8);
    }

    #[test]
    fn single_precision_tracks_double(db in -2.0f64..15.0) {
        let na64 = NormalApproximation::new(128, 1e-5).unwrap();
        let na32 = NormalApproximation::<f32>::new(128, 1e-5).unwrap();
        let r64 = na64.max_rate_db(db);
        let r32 = na32.max_rate_db(db as f32) as f64;
        prop_assert!((r64 - r32).abs() < 2e-3, "{r64} vs {r32}");
    }

    #[test]
    fn encoding_is_linear(a in bits(64), b in bits(64)) {
        let code = eb64();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = code.encode(&a).unwrap();
        let cb = code.encode(&b).unwrap();
        let cs = code.encode(&sum).unwrap();
        let xor: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(&cs, &xor);
        let packed = pack_bits(&ca);
        prop_assert!(code.contains(&packed));
        prop_assert_eq!(code.message_of(&packed), pack_bits(&a));
    }

    #[test]
    fn code_text_round_trip(rows in prop::collection::vec(bits(23), 1..8)) {
        let g = BitMatrix::from_bit_rows(23, &rows);
        prop_assume!(g.rank() == rows.len());
        let code = CodeSpec::new(g, None).unwrap();
        let back = parse_code(&write_code(&code)).unwrap();
        prop_assert_eq!(back.generator(), code.generator());
    }

    #[test]
    fn inverse_is_two_sided(rows in prop::collection::vec(bits(9), 9)) {
        let m = BitMatrix::from_bit_rows(9, &rows);
        match m.inverse() {
            Some(inv) => {
                prop_assert_eq!(m.mul(&inv), BitMatrix::identity(9));
                prop_assert_eq!(inv.mul(&m), BitMatrix::identity(9));
            }
            None => prop_assert!(m.rank() < 9),
        }
    }

    #[test]
    fn decoder_returns_codewords(seed in any::<u64>(), db in 0.0f64..6.0, s in 0usize..3) {
        let code = eb64();
        let mut rng = trial_rng(seed, 0);
        let msg: Vec<u8> = (0..64).map(|_| rand::Rng::random_range(&mut rng, 0..2)).collect();
        let y = transmit(&code.encode(&msg).unwrap(), SnrDb(db).to_linear(), &mut rng);
        let slow = decode(&y, code, &DecoderConfig::new(s)).unwrap();
        let fast = decode(&y, code, &DecoderConfig::new(s).fast()).unwrap();
        prop_assert!(code.contains(&slow.codeword));
        prop_assert_eq!(&slow.codeword, &fast.codeword);
        prop_assert_eq!(slow.pattern_index, fast.pattern_index);
    }

    #[test]
    fn penalty_falls_as_budget_grows(k1 in 1.5f64..1e6, f in 1.01f64..100.0) {
        let m = TradeoffModel::<f64>::preset();
        prop_assert!(min_power_penalty(&m, k1 * f) <= min_power_penalty(&m, k1));
    }

    #[test]
    fn constrained_rate_is_below_unconstrained(db in -2.0f64..20.0) {
        let ch = channel();
        let m = ch.constrained_max_rate(db);
        prop_assert!(m >= 0.0 && m <= ch.max_rate_db(db) + 1e-12);
    }

    #[test]
    fn weight_rises_with_battery(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!(a < b);
        prop_assert!(alpha_from_battery(a).unwrap() < alpha_from_battery(b).unwrap());
    }

    #[test]
    fn three_db_doubles_power(db in -10.0f64..30.0) {
        let link = LinkBudget::default();
        let ratio = link.tx_power_watts(db + 10.0 * 2f64.log10()) / link.tx_power_watts(db);
        prop_assert!((ratio - 2.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boundary_is_monotone_and_optimal_points_lie_on_it(r_s in 0.3f64..0.95, alpha in 0.0f64..1.0) {
        let ch = channel();
        let reference = ReferencePair::new(ch, r_s).unwrap();
        let b = pareto_boundary(ch, &reference, 0.05).unwrap();
        for w in b.points.windows(2) {
            prop_assert!(w[1].delta_rho_db > w[0].delta_rho_db && w[1].delta_r < w[0].delta_r);
        }
        for theta in [Theta::One, Theta::Inf] {
            let pick = optimize_on(&b, &ScalarizationSpec::normalized(theta, alpha).unwrap());
            let p = pick.point;
            // slack covers the fixed-point solver tolerance
            prop_assert!(attainable_contains(ch, &reference, p.delta_r + 1e-9, p.delta_rho_db));
            prop_assert!((p.rate - ch.constrained_max_rate(p.snr_db)).abs() < 1e-8);
        }
    }

    #[test]
    fn single_precision_boundary_tracks_double(r_s in 0.4f64..0.9) {
        let ch32 = ConstrainedChannel::<f32>::new(128, TradeoffModel::preset(), ConstraintSet::reference()).unwrap();
        let ref32 = ReferencePair::new(&ch32, r_s as f32).unwrap();
        let ref64 = ReferencePair::new(channel(), r_s).unwrap();
        let b32 = pareto_boundary(&ch32, &ref32, 0.1).unwrap();
        let b64 = pareto_boundary(channel(), &ref64, 0.1).unwrap();
        prop_assert!((b32.delta_rho_s_min as f64 - b64.delta_rho_s_min).abs() < 1e-3);
        prop_assert!((b32.delta_r_s_min as f64 - b64.delta_r_s_min).abs() < 2e-3);
    }
}
