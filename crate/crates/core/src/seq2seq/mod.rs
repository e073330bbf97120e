//! LSTM encoder / GRU decoder captioner with SGD training.

mod checkpoint;
mod gru;
mod lstm;
mod model;
mod tensor;
mod train;

use thiserror::Error;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint};
pub use gru::{gru_step, GruParams};
pub use lstm::{lstm_step, EncoderState, GateParams, LstmParams};
pub use model::{backward, forward_loss, greedy_decode, ForwardCache, Seq2SeqParams, Weights};
pub use tensor::{sigmoid, softmax, Matrix};
pub use train::{sgd_train, validation_meteor, EpochRecord, TrainConfig, TrainingLog, DEFAULT_MAX_LEN};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("vocabulary error: {0}")]
    Vocab(String),
    #[error("training diverged (non-finite loss) in epoch {epoch}")]
    Divergence { epoch: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("malformed checkpoint: {0}")]
    MalformedCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
