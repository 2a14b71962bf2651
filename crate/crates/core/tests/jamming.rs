use jamdof::jamming::sample_sequence;
use jamdof::{JammerDistribution, JammerState};
use proptest::prelude::*;

fn joint(max_k: usize) -> impl Strategy<Value = JammerDistribution> {
    (1..=max_k).prop_flat_map(|k| {
        prop::collection::vec(0.0f64..1.0, 1 << k).prop_filter_map("all zero", move |w| {
            let total: f64 = w.iter().sum();
            if total <= 1e-9 {
                return None;
            }
            let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
            let head: f64 = p[..p.len() - 1].iter().sum();
            *p.last_mut().unwrap() = (1.0 - head).max(0.0);
            JammerDistribution::new(k, p).ok()
        })
    })
}

proptest! {
    #[test]
    fn text_round_trip(d in joint(5)) {
        let back: JammerDistribution = d.to_string().parse().unwrap();
        let (a, b) = (d.joint_table().unwrap(), back.joint_table().unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn marginals_add_up(d in joint(6)) {
        let k = d.num_receivers();
        let table = d.joint_table().unwrap();
        for r in 0..k {
            let oracle: f64 = table
                .iter()
                .enumerate()
                .filter(|(m, _)| m >> r & 1 == 0)
                .map(|(_, p)| p)
                .sum();
            prop_assert!((d.marginal(r).unwrap() - oracle).abs() < 1e-12);
        }
        let classes: f64 = d.class_probabilities().iter().sum();
        prop_assert!((classes - 1.0).abs() < 1e-12);
        let avg: f64 = d.marginals().iter().sum::<f64>() / k as f64;
        prop_assert!((d.lambda_eta() - avg).abs() < 1e-12);
    }

    #[test]
    fn bitstring_round_trip(mask in 0u64..(1 << 12), k in 12usize..20) {
        let s = JammerState(mask).to_bitstring(k);
        prop_assert_eq!(JammerState::parse_bitstring(&s).unwrap(), (JammerState(mask), k));
    }

    #[test]
    fn sequences_are_seeded(seed in any::<u64>()) {
        let d = JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap();
        prop_assert_eq!(sample_sequence(&d, 50, seed).unwrap(), sample_sequence(&d, 50, seed).unwrap());
    }
}

#[test]
fn empirical_frequencies() {
    let d = JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap();
    let seq = sample_sequence(&d, 200_000, 42).unwrap();
    let mut counts = [0usize; 4];
    for s in &seq.states {
        counts[s.0 as usize] += 1;
    }
    for (c, p) in counts.iter().zip([0.3, 0.3, 0.3, 0.1]) {
        assert!((*c as f64 / 2e5 - p).abs() < 0.005);
    }
}

#[test]
fn symmetric_sampler_spreads_classes() {
    let d = JammerDistribution::uniform(30).unwrap();
    let seq = sample_sequence(&d, 20_000, 1).unwrap();
    let mean_ones: f64 = seq.states.iter().map(|s| s.ones_count() as f64).sum::<f64>() / 2e4;
    assert!((mean_ones - 15.0).abs() < 0.1);
    let receiver_7 = seq.states.iter().filter(|s| s.is_jammed(7)).count() as f64 / 2e4;
    assert!((receiver_7 - 0.5).abs() < 0.02);
}

#[test]
fn file_format() {
    let text = "# standard\nK: 2\n00: 0.3\n01: 0.3\n10: 0.3\n11: 0.1\n";
    let d: JammerDistribution = text.parse().unwrap();
    assert_eq!(d.two_user_probs().unwrap(), [0.3, 0.3, 0.3, 0.1]);
    let s: JammerDistribution = "symmetric: [0.25, 0.5, 0.25]".parse().unwrap();
    assert!((s.prob(JammerState(0b01)) - 0.25).abs() < 1e-15);
    assert!("00:0.3,01:0.3".parse::<JammerDistribution>().is_err());
    assert!("00:0.5,00:0.5".parse::<JammerDistribution>().is_err());
}
