//! Token-to-signal codecs and the AWGN channel.
//!
//! Two routes carry a semantic vector over the air: a trainable complex
//! codebook (one unit-power codeword per label, trained with channel noise
//! in the loop) and a classical digital baseline (7-bit labels, Hamming(7,4)
//! blocks, Gray-mapped QPSK).

mod awgn;
mod codebook;
mod digital;
mod qfunc;

pub use awgn::{awgn_apply, ChannelConfig, ComplexSignal};
pub use codebook::{
    codebook_train, codebook_train_trace, CodebookCodec, CodebookTrainConfig, TrainSample,
};
pub use codebook::{sample_noise_matrix, softmax_batch_loss, softmax_batch_loss_grad};
pub use digital::{
    digital_roundtrip, hamming74_decode, hamming74_encode, qpsk_demodulate_hard, qpsk_modulate,
};
pub use qfunc::q_function;
