use polarcm::channel::{level_capacities, total_capacity, Demapper};
use polarcm::constellation::{Constellation, Labeling};
use polarcm::crc::CrcConfig;
use polarcm::polar::{polar_encode, polar_transform, PolarCodeLevel, PolarDecoder};
use proptest::prelude::*;

fn labeling(m: usize) -> impl Strategy<Value = Labeling> {
    Just((0..1usize << m).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(move |t| Labeling::new(m, t).unwrap())
}

fn bits(len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, len)
}

proptest! {
    #[test]
    fn transform_is_an_involution(log_n in 0usize..9, seed in any::<u64>()) {
        let n = 1 << log_n;
        let u: Vec<u8> = (0..n).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
        let mut x = u.clone();
        polar_transform(&mut x);
        polar_transform(&mut x);
        prop_assert_eq!(x, u);
    }

    #[test]
    fn noiseless_list_decoding_recovers_info(
        mask in prop::collection::vec(any::<bool>(), 32),
        payload in bits(32),
        list in prop::sample::select(vec![1usize, 2, 4, 8]),
    ) {
        let code = PolarCodeLevel::new(mask).unwrap();
        let info = payload[..code.info_count()].to_vec();
        let x = polar_encode(&code, &code.embed(&info).unwrap()).unwrap();
        let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
        let mut dec = PolarDecoder::new(32).unwrap();
        prop_assert_eq!(&dec.sc(&code, &llr).unwrap().info_bits, &info);
        let res = dec.scl(&code, &llr, list).unwrap();
        prop_assert_eq!(&res.info_bits, &info);
        prop_assert_eq!(res.path_metric, 0.0);
    }

    #[test]
    fn canonical_form_is_a_class_invariant(
        lab in labeling(3),
        level in 1usize..=3,
        prefix_seed in any::<usize>(),
    ) {
        let prefix = prefix_seed % (1 << (level - 1));
        let canon = lab.canonical();
        prop_assert!(canon.is_canonical());
        prop_assert_eq!(canon.canonical(), canon.clone());
        prop_assert_eq!(lab.complement_component(level, prefix).canonical(), canon);
    }

    #[test]
    fn labeling_text_round_trips(lab in labeling(4)) {
        prop_assert_eq!(Labeling::from_text(&lab.to_text()).unwrap(), lab.clone());
        prop_assert_eq!(Labeling::from_dash_string(&lab.dash_string()).unwrap(), lab);
    }

    #[test]
    fn chain_rule_holds(lab in labeling(3), sigma in 0.1f64..3.0) {
        let c = Constellation::pam(3).unwrap();
        let caps = level_capacities(&lab, &c, sigma).unwrap();
        prop_assert!(caps.iter().all(|&v| (0.0..=1.0).contains(&v)));
        let sum: f64 = caps.iter().sum();
        prop_assert!((sum - total_capacity(&lab, &c, sigma).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn llr_sign_follows_nearest_point(lab in labeling(2), y in -2.0f64..2.0) {
        // With one candidate per bit value, the LLR sign picks the closer point.
        let c = Constellation::pam(2).unwrap();
        let d = Demapper::new(&lab, &c, 0.5).unwrap();
        for prior in 0..2 {
            let p0 = c.point(lab.point_index(prior));
            let p1 = c.point(lab.point_index(prior | 2));
            let llr = d.level_llr(2, prior, y);
            let closer0 = (y - p0).abs() < (y - p1).abs();
            if ((y - p0).abs() - (y - p1).abs()).abs() > 1e-9 {
                prop_assert_eq!(llr > 0.0, closer0);
            }
        }
    }

    #[test]
    fn crc_detects_any_single_flip(payload in prop::collection::vec(0u8..2, 1..200), pos in any::<usize>()) {
        let crc = CrcConfig::default();
        let mut word = crc.attach(&payload).unwrap();
        prop_assert!(crc.check(&word));
        let i = pos % word.len();
        word[i] ^= 1;
        prop_assert!(!crc.check(&word));
    }
}
