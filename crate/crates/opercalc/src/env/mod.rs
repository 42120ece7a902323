//! Truncated completed enveloping algebras of the affine algebras over the
//! five example function rings, with PBW straightening and certified levels.
//!
//! Indices are doubled everywhere (`gamma2`, `level2`), so half-integral
//! indices stay integral.

mod cpoly;
mod element;
mod filtration;
mod maps;
pub mod ring;
mod sugawara;

use thiserror::Error;

pub use cpoly::CPoly;
pub use element::{fmt_gen, fmt_monomial, is_ordered, parse_monomial, EnvElement, Gen, Monomial};
pub use filtration::{jdeg_cmp, jdeg_lt, window_congruent, JdegLt};
pub use maps::{derivation_act, expand_env, specialize_env};
pub use ring::{Algebra, RingElt};
pub use sugawara::{lstorto, normal_pair, sugawara1, sugawara2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("elements of {0} and {1} cannot be combined")]
    AlgebraMismatch(Algebra, Algebra),
    #[error("index {gamma2}/2 is not an index of {algebra}")]
    InvalidIndex { algebra: Algebra, gamma2: i64 },
    #[error("product is not determined: left factor known modulo J({left}/2), right monomial {monomial}")]
    ResultLevelEmpty { left: i64, monomial: String },
    #[error("negative power of a survives specialisation")]
    NegativePowerOfA,
    #[error("the zero element has no leading term")]
    ZeroElement,
    #[error("operation {op} needs algebra {expected}, got {got}")]
    WrongAlgebra {
        op: &'static str,
        expected: &'static str,
        got: Algebra,
    },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}
