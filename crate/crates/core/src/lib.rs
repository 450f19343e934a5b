pub mod algebra;
pub mod analysis;
pub mod conditions;
pub mod connection;
pub mod error;
pub mod expr;
pub mod frontend;
pub mod invariants;
pub mod jet;
pub mod numeric;
pub mod tensor;

pub use error::{Error, Result};
pub use expr::{Expr, RationalForm, SamplePoint, VarId};
pub use jet::{affine_transform, total_derivative, AffineChange, OdeSystem};
pub use tensor::{Shape, Tensor, TensorField};
