//! Split, fit and evaluate.
//!
//! All randomness comes from one ChaCha8 stream seeded with `TrainConfig::seed`
//! and consumed in a fixed order: the train/test shuffle, then weight
//! initialization, then one shuffle of the training indices per epoch.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use surjmap_core::dataset::DatasetRecord;

use crate::adam::{Adam, AdamConfig};
use crate::features::{scale_features, TargetScaler, HEIGHT};
use crate::network::{Architecture, NetworkParams};
use crate::NetError;

pub const MIN_RECORDS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub filters: usize,
    pub hidden: usize,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 150,
            batch_size: 32,
            test_fraction: 0.2,
            seed: 42,
            filters: 256,
            hidden: 256,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        if self.epochs == 0 || self.batch_size == 0 || self.filters == 0 || self.hidden == 0 {
            return Err(NetError::Config("epochs, batch size and layer sizes must be positive".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(NetError::Config(format!("test fraction {} not in (0, 1)", self.test_fraction)));
        }
        self.adam.validate()
    }
}

/// Trained parameters plus everything needed to resume or to predict.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub config: TrainConfig,
    pub params: NetworkParams,
    pub adam: Adam,
    pub target: TargetScaler,
}

#[derive(Clone, Debug)]
pub struct Training {
    pub model: Model,
    /// Sample-weighted mean training loss of each epoch.
    pub history: Vec<f64>,
    pub train: Vec<DatasetRecord>,
    pub test: Vec<DatasetRecord>,
}

fn split_indices<R: Rng>(n: usize, fraction: f64, rng: &mut R) -> Result<(Vec<usize>, Vec<usize>), NetError> {
    if n < MIN_RECORDS {
        return Err(NetError::TooFew { need: MIN_RECORDS, got: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    // The small slack keeps e.g. 0.2 * 3240 from rounding up to 649.
    let test = ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n - 1);
    let test_idx = idx.split_off(n - test);
    Ok((idx, test_idx))
}

fn pick(records: &[DatasetRecord], idx: &[usize]) -> Vec<DatasetRecord> {
    idx.iter().map(|&i| records[i].clone()).collect()
}

/// Shuffles with the seeded stream and puts the last `ceil(fraction * n)` records in the test set.
pub fn split(records: &[DatasetRecord], cfg: &TrainConfig) -> Result<(Vec<DatasetRecord>, Vec<DatasetRecord>), NetError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (tr, te) = split_indices(records.len(), cfg.test_fraction, &mut rng)?;
    Ok((pick(records, &tr), pick(records, &te)))
}

/// Common row width of a record set.
pub fn record_width(records: &[DatasetRecord]) -> Result<usize, NetError> {
    let first = records.first().ok_or(NetError::Empty)?;
    let w = first.v.len();
    if records.iter().any(|r| r.triple().iter().any(|row| row.len() != w)) {
        return Err(NetError::Shape("records of different widths".into()));
    }
    Ok(w)
}

/// One flattened, standardized `3 x w` matrix per record.
pub fn feature_matrix(records: &[DatasetRecord], width: usize) -> Result<Array2<f64>, NetError> {
    let mut x = Array2::zeros((records.len(), HEIGHT * width));
    for (r, mut row) in records.iter().zip(x.outer_iter_mut()) {
        let s = scale_features(r.triple())?;
        if s.matrix.ncols() != width {
            return Err(NetError::Shape(format!("record of width {}, model width {width}", s.matrix.ncols())));
        }
        row.assign(&ndarray::ArrayView1::from(s.matrix.as_slice().expect("standard layout")));
    }
    Ok(x)
}

fn labels(records: &[DatasetRecord]) -> Vec<f64> {
    records.iter().map(|r| r.label as f64).collect()
}

pub fn train(records: &[DatasetRecord], cfg: &TrainConfig) -> Result<Training, NetError> {
    cfg.validate()?;
    let width = record_width(records)?;
    let arch = Architecture::new(width, cfg.filters, cfg.hidden)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (tr, te) = split_indices(records.len(), cfg.test_fraction, &mut rng)?;
    let train_set = pick(records, &tr);
    let test_set = pick(records, &te);

    let target = TargetScaler::fit(&labels(&train_set))?;
    let x = feature_matrix(&train_set, width)?;
    let y: Array1<f64> = labels(&train_set).iter().map(|&l| target.transform(l)).collect();

    let mut params = NetworkParams::glorot(arch, &mut rng);
    let mut adam = Adam::new(cfg.adam, arch.param_count());
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut grad = vec![0.0; arch.param_count()];
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let xb = x.select(Axis(0), batch);
            let yb = y.select(Axis(0), batch);
            let loss = params.loss_and_grad_into(xb.view(), yb.view(), &mut grad)?;
            adam.update(params.values_mut(), &grad);
            total += loss * batch.len() as f64;
        }
        history.push(total / train_set.len() as f64);
    }
    Ok(Training {
        model: Model { config: *cfg, params, adam, target },
        history,
        train: train_set,
        test: test_set,
    })
}

fn standardized_outputs(model: &Model, records: &[DatasetRecord]) -> Result<Array1<f64>, NetError> {
    if records.is_empty() {
        return Err(NetError::Empty);
    }
    let x = feature_matrix(records, model.params.arch.width)?;
    model.params.forward_batch(x.view())
}

/// Mean squared error against standardized targets.
pub fn evaluate(model: &Model, records: &[DatasetRecord]) -> Result<f64, NetError> {
    let out = standardized_outputs(model, records)?;
    let se: f64 = out
        .iter()
        .zip(records)
        .map(|(o, r)| (o - model.target.transform(r.label as f64)).powi(2))
        .sum();
    Ok(se / records.len() as f64)
}

/// The regressor's value on a raw triple, on the label scale.
pub fn predict(model: &Model, triple: [&[u64]; 3]) -> Result<f64, NetError> {
    let s = scale_features(triple)?;
    Ok(model.target.inverse(model.params.forward(&s.matrix)?))
}

/// Mean label-scale prediction over `records`.
pub fn mean_prediction(model: &Model, records: &[DatasetRecord]) -> Result<f64, NetError> {
    let out = standardized_outputs(model, records)?;
    Ok(out.iter().map(|&o| model.target.inverse(o)).sum::<f64>() / records.len() as f64)
}
