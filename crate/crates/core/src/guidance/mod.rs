//! The learned guidance function: a small feed-forward network on tableau
//! entries, trained so its outputs rank-correlate with walk lengths.

mod network;
mod pearson;
mod persist;
mod train;

pub use network::{
    featurize, input_dim, Dense, GuidanceModel, ModelMeta, DEFAULT_LAYER_DIMS, EXP_CLAMP, FEATURE_LAYOUT_VERSION,
};
pub use pearson::{pearson, pearson_grad_y};
pub use persist::{load_model, load_model_for, model_from_json, model_to_json, save_model, MODEL_FORMAT_VERSION};
pub use train::{
    features, loss, loss_and_grad, train, train_with, write_loss_csv, BatchSource, TrainConfig, TrainReport,
};
