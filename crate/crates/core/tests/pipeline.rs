use proptest::prelude::*;

use so3_energy::construct::{build_configuration_with_phases, Configuration, Format};
use so3_energy::energy::{log_energy, predicted_energy};
use so3_energy::ensembles::{sample, EnsembleKind, EnsembleSpec, FiberCount};
use so3_energy::experiment::generate;
use so3_energy::geometry::{haar_rotation, uniform_sphere_point, Rotation3, SpherePoint};
use so3_energy::rng::stream;

#[test]
fn every_sampler_feeds_the_construction() {
    for kind in EnsembleKind::SAMPLED {
        let spec = EnsembleSpec::new(kind, 12, FiberCount::Auto, 4).unwrap();
        let config = generate(&spec).unwrap();
        assert_eq!(config.len(), 12 * spec.fiber_count().unwrap());
        let e = log_energy(config.matrices());
        assert!(!e.is_infinite && e.value.is_finite(), "{kind}");
        for m in config.matrices() {
            assert!(m.orthogonality_error() < 1e-10 && (m.determinant() - 1.0).abs() < 1e-10);
        }
    }
    assert!(sample(EnsembleKind::Harmonic, 4, &mut stream(0, 0)).is_err());
}

#[test]
fn files_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let config = generate(&EnsembleSpec::new(EnsembleKind::Zeros, 9, FiberCount::Fixed(3), 8).unwrap()).unwrap();
    for (format, name) in [(Format::Json, "c.json"), (Format::Csv, "c.csv")] {
        let path = dir.path().join(name);
        config.write(&path, format).unwrap();
        let back = Configuration::read(&path).unwrap();
        assert_eq!(back.matrices(), config.matrices());
        assert_eq!(log_energy(back.matrices()), log_energy(config.matrices()));
    }
}

#[test]
fn coincident_fibers_have_infinite_energy() {
    let p = uniform_sphere_point(&mut stream(1, 0));
    let config = build_configuration_with_phases(&[p, p], 2, &[0.5, 0.5]).unwrap();
    assert!(log_energy(config.matrices()).is_infinite);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energy_is_invariant_under_left_and_right_rotation(seed in any::<u64>(), r in 1usize..8, s in 1usize..5) {
        let mut rng = stream(seed, 0);
        let points: Vec<_> = (0..r).map(|_| uniform_sphere_point(&mut rng)).collect();
        let phases: Vec<f64> = (0..r).map(|i| i as f64 * 0.7 + 0.1).collect();
        let config = build_configuration_with_phases(&points, s, &phases).unwrap();
        let (g, h) = (haar_rotation(&mut rng), haar_rotation(&mut rng));
        let moved: Vec<Rotation3> = config.matrices().iter().map(|m| g * *m * h).collect();
        let (a, b) = (log_energy(config.matrices()), log_energy(&moved));
        prop_assume!(!a.is_infinite);
        prop_assert!((a.value - b.value).abs() <= 1e-9 * a.value.abs().max(1.0));
    }

    #[test]
    fn prediction_is_independent_of_global_rotation(seed in any::<u64>(), r in 1usize..10, s in 1usize..6) {
        let mut rng = stream(seed, 1);
        let points: Vec<_> = (0..r).map(|_| uniform_sphere_point(&mut rng)).collect();
        let g = haar_rotation(&mut rng);
        let turned: Vec<_> = points.iter().map(|p| { let [x, y, z] = g.apply(p); SpherePoint::new(x, y, z).unwrap() }).collect();
        let (a, b) = (predicted_energy(&points, s).unwrap(), predicted_energy(&turned, s).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
