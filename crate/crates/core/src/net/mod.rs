//! A small CNN that regresses patch transmission: conv features, maxout,
//! multi-scale convs, max-pooling and a BReLU output in [0, 1].

pub mod gradcheck;
pub mod layers;
pub mod model;
pub mod persist;
pub mod predict;
pub mod train;

pub use gradcheck::{gradient_check, GradCheck};
pub use layers::{brelu, maxout};
pub use model::{forward, loss_and_gradients, mse, trace, Architecture, NetParams};
pub use predict::predict_map;
pub use train::{train, train_with_history, TrainConfig, TrainHistory};
