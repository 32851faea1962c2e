mod common;

use common::generator;
use greenstream::generators::{
    make_generator, Generator, GeneratorConfig, GeneratorKind, GeneratorParams, HyperplaneGenerator, HyperplaneParams, LedParams,
};
use greenstream::{StreamSource, Value};

#[test]
fn empirical_priors_match_declared_priors() {
    for kind in GeneratorKind::ALL {
        let mut g = generator(kind, 11);
        let priors = g.class_priors();
        let mut counts = vec![0u64; priors.len()];
        let n = 1_000_000;
        for _ in 0..n {
            counts[g.next_example().unwrap().label as usize] += 1;
        }
        for (c, p) in priors.iter().enumerate() {
            let observed = counts[c] as f64 / n as f64;
            assert!((observed - p).abs() < 0.02, "{kind} class {c}: {observed} vs {p}");
        }
    }
}

#[test]
fn seeds_reproduce_and_differ() {
    for kind in GeneratorKind::ALL {
        let take = |seed| {
            let mut g = generator(kind, seed);
            (0..10_000).map(|_| g.next_example().unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(take(4), take(4), "{kind}");
        assert_ne!(take(4), take(5), "{kind}");
    }
}

#[test]
fn every_example_fits_the_schema() {
    for kind in GeneratorKind::ALL {
        let mut g = generator(kind, 2);
        let schema = g.schema().clone();
        for _ in 0..20_000 {
            greenstream::stream::validate_example(&schema, &g.next_example().unwrap()).unwrap();
        }
    }
}

/// Segment patterns for digits 0..=9 in the usual a..g order.
const SEGMENTS: [[u32; 7]; 10] = [
    [1, 1, 1, 0, 1, 1, 1],
    [0, 0, 1, 0, 0, 1, 0],
    [1, 0, 1, 1, 1, 0, 1],
    [1, 0, 1, 1, 0, 1, 1],
    [0, 1, 1, 1, 0, 1, 0],
    [1, 1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 0, 1, 0],
    [1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 1, 1],
];

#[test]
fn led_segments_flip_at_the_noise_rate() {
    let mut g = generator(GeneratorKind::Led, 3);
    let n = 200_000;
    let mut flips = 0u64;
    let mut irrelevant_ones = 0u64;
    let mut irrelevant_total = 0u64;
    for _ in 0..n {
        let e = g.next_example().unwrap();
        let truth = SEGMENTS[e.label as usize];
        for (i, v) in e.instance.values.iter().enumerate() {
            let Value::Nominal(bit) = *v else { panic!("led attributes are binary") };
            if i < 7 {
                flips += u64::from(bit != truth[i]);
            } else {
                irrelevant_ones += u64::from(bit);
                irrelevant_total += 1;
            }
        }
    }
    let rate = flips as f64 / (7 * n) as f64;
    assert!((rate - 0.10).abs() < 0.005, "flip rate {rate}");
    let ones = irrelevant_ones as f64 / irrelevant_total as f64;
    assert!((ones - 0.5).abs() < 0.005, "irrelevant ones {ones}");
}

#[test]
fn led_attribute_count_follows_params() {
    let config = GeneratorConfig {
        seed: 1,
        params: GeneratorParams::Led(LedParams {
            noise: 0.0,
            irrelevant_attributes: 0,
        }),
    };
    let mut g = make_generator(&config).unwrap();
    assert_eq!(g.schema().attribute_count(), 7);
    for _ in 0..1_000 {
        let e = g.next_example().unwrap();
        let bits: Vec<u32> = e.instance.values.iter().map(|v| match v {
            Value::Nominal(b) => *b,
            Value::Numeric(_) => unreachable!(),
        }).collect();
        assert_eq!(bits, SEGMENTS[e.label as usize]);
    }
}

fn plane(g: &Generator) -> &HyperplaneGenerator {
    match g {
        Generator::Hyperplane(h) => h,
        _ => unreachable!(),
    }
}

#[test]
fn noiseless_hyperplane_labels_follow_the_plane() {
    let params = HyperplaneParams {
        noise: 0.0,
        ..HyperplaneParams::default()
    };
    let mut g = Generator::Hyperplane(HyperplaneGenerator::new(params, 8).unwrap());
    let total: f64 = plane(&g).weights().iter().sum();
    assert!((plane(&g).threshold() - total / 2.0).abs() < 1e-12);
    for _ in 0..10_000 {
        let e = g.next_example().unwrap();
        assert_eq!(plane(&g).true_label(&e.instance), e.label);
    }
}

#[test]
fn noisy_hyperplane_flips_at_the_noise_rate() {
    let mut g = Generator::Hyperplane(HyperplaneGenerator::new(HyperplaneParams::default(), 8).unwrap());
    let n = 200_000;
    let flipped = (0..n)
        .filter(|_| {
            let e = g.next_example().unwrap();
            plane(&g).true_label(&e.instance) != e.label
        })
        .count();
    let rate = flipped as f64 / n as f64;
    assert!((rate - 0.05).abs() < 0.003, "flip rate {rate}");
}

#[test]
fn numeric_attributes_stay_in_range() {
    for kind in [GeneratorKind::RandomTree, GeneratorKind::RandomRbf, GeneratorKind::Hyperplane] {
        let mut g = generator(kind, 5);
        for _ in 0..20_000 {
            for v in g.next_example().unwrap().instance.values {
                if let Value::Numeric(x) = v {
                    let ok = if kind == GeneratorKind::RandomRbf { x.is_finite() } else { (0.0..=1.0).contains(&x) };
                    assert!(ok, "{kind}: {x}");
                }
            }
        }
    }
}

#[test]
fn generator_state_round_trips() {
    for kind in GeneratorKind::ALL {
        let mut g = generator(kind, 6);
        for _ in 0..100 {
            g.next_example().unwrap();
        }
        let bytes = greenstream::io::encode(&g).unwrap();
        let mut back: Generator = greenstream::io::decode(&bytes).unwrap();
        for _ in 0..100 {
            assert_eq!(g.next_example(), back.next_example());
        }
    }
}
