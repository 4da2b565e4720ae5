//! Short runs on the real five-point dataset. The full 150-epoch run and its
//! error thresholds live in the acceptance suite.

use surjmap_core::dataset::{enumerate_triples, EnumConfig};
use surjmap_core::Case;
use surjnet::{evaluate, mean_prediction, predict, read_model, split, train, write_model, TrainConfig};

fn five_point() -> Vec<surjmap_core::dataset::DatasetRecord> {
    enumerate_triples(&EnumConfig::for_case(Case::FivePoint, 2).unwrap()).unwrap()
}

#[test]
fn short_run_is_finite_and_deterministic() {
    let records = five_point();
    let cfg = TrainConfig { epochs: 2, ..TrainConfig::default() };
    let t = train(&records, &cfg).unwrap();
    assert_eq!(t.test.len(), 648);
    assert_eq!(t.train.len(), 2592);
    assert_eq!((t.train.clone(), t.test.clone()), split(&records, &cfg).unwrap());
    assert_eq!(t.model.params.arch.flatten_len(), 2048);
    assert!(t.history.iter().all(|l| l.is_finite()));
    assert!(t.history[1] < t.history[0]);
    assert!(evaluate(&t.model, &t.test).unwrap().is_finite());
    assert!(mean_prediction(&t.model, &t.test).unwrap().is_finite());

    let again = train(&records, &cfg).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_model(&t.model, &mut a).unwrap();
    write_model(&again.model, &mut b).unwrap();
    assert!(a == b, "reruns differ");

    let loaded = read_model(&a[..]).unwrap();
    for r in t.test.iter().take(20) {
        let y = predict(&loaded, r.triple()).unwrap();
        assert!(y.is_finite());
        assert_eq!(y, predict(&t.model, r.triple()).unwrap());
    }
}

#[test]
fn six_point_width_is_supported() {
    let records = enumerate_triples(&EnumConfig::for_case(Case::SixPoint, 2).unwrap()).unwrap();
    let cfg = TrainConfig { epochs: 1, filters: 8, hidden: 8, ..TrainConfig::default() };
    let t = train(&records, &cfg).unwrap();
    assert_eq!(t.model.params.arch.flatten_len(), 2 * 3 * 8);
    // Every label is 0, so the target scaler centres on 0 and predictions stay there.
    assert_eq!(t.model.target.mean, 0.0);
    assert!(t.history.iter().all(|l| l.is_finite()));
}
