//! rankforge: a rank-metric cryptography laboratory.
//!
//! Implements Gabidulin codes, the GPT public-key encryption scheme with its
//! column-scrambler variants, and the structural key-recovery attack that
//! strips the scrambler via the Frobenius stacking operator Λ_i.

pub mod attack;
pub mod bench;
pub mod error;
pub mod field;
pub mod gabidulin;
pub mod gpt;
pub mod linalg;
pub mod serio;

pub use error::{Error, Result};
