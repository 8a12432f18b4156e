//! Dense finite-alphabet probability tensors and information measures.

mod conditional;
mod joint;
mod measures;
mod tensor;

pub use conditional::ConditionalPmf;
pub(crate) use conditional::RawConditional;
pub use joint::JointPmf;
pub use measures::{
    binary_entropy, conditional_entropy, entropy, entropy_vector, fano_bound, hypothesis_error, hypothesis_information,
    mutual_information, product_power, tv_distance, tv_tensorized, tv_vectors,
};
pub use tensor::{format_tuple, tuples, Alphabet, Tuples, DEFAULT_TOLERANCE};
pub(crate) use tensor::{ravel, volume};
