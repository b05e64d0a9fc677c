//! Minibatch SGD with momentum.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::model::{loss_and_gradients, mse, NetParams};
use crate::synth::PatchSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub weight_init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.02,
            momentum: 0.9,
            epochs: 12,
            batch_size: 16,
            seed: 0,
            weight_init_scale: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // a zero learning rate is accepted: it leaves the weights untouched
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::validation("train.learning_rate", "must be finite and >= 0"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::validation("train.momentum", "must lie in [0,1)"));
        }
        if self.epochs < 1 {
            return Err(Error::validation("train.epochs", "must be >= 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::validation("train.batch_size", "must be >= 1"));
        }
        if !(self.weight_init_scale > 0.0) {
            return Err(Error::validation("train.weight_init_scale", "must be > 0"));
        }
        Ok(())
    }
}

/// Training-set MSE measured after each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub initial_mse: f64,
    pub epoch_mse: Vec<f64>,
}

pub fn train(params: NetParams, dataset: &[PatchSample], cfg: &TrainConfig) -> Result<NetParams> {
    train_with_history(params, dataset, cfg).map(|(p, _)| p)
}

pub fn train_with_history(
    mut params: NetParams,
    dataset: &[PatchSample],
    cfg: &TrainConfig,
) -> Result<(NetParams, TrainHistory)> {
    cfg.validate()?;
    if dataset.len() < cfg.batch_size {
        return Err(Error::Param(format!(
            "dataset of {} samples smaller than batch size {}",
            dataset.len(),
            cfg.batch_size
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = params.to_flat();
    let mut velocity = vec![0.0; weights.len()];
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let initial_mse = mse(&params, dataset)?;
    let mut epoch_mse = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<PatchSample> = chunk.iter().map(|&i| dataset[i].clone()).collect();
            let (loss, grads) = loss_and_gradients(&params, &batch)?;
            if !loss.is_finite() {
                return Err(Error::Training {
                    epoch,
                    reason: format!("non-finite batch loss {loss}"),
                });
            }
            for ((w, v), g) in weights.iter_mut().zip(velocity.iter_mut()).zip(grads.to_flat()) {
                *v = cfg.momentum * *v - cfg.learning_rate * g;
                *w += *v;
            }
            if weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::Training {
                    epoch,
                    reason: "non-finite weights".into(),
                });
            }
            params.set_flat(&weights)?;
        }
        let m = mse(&params, dataset)?;
        if !m.is_finite() {
            return Err(Error::Training {
                epoch,
                reason: format!("non-finite epoch loss {m}"),
            });
        }
        epoch_mse.push(m);
    }
    Ok((
        params,
        TrainHistory {
            initial_mse,
            epoch_mse,
        },
    ))
}
