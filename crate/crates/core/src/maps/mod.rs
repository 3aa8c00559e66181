//! Birational maps of the plane and quadratic generators.

pub mod birmap;
pub mod generator;
pub mod genericity;
pub mod linear;
pub mod word;

pub use birmap::BirMap;
pub use generator::{sample_generators, GeneratorData, GeneratorJson, Quadratic};
pub use genericity::{check_genericity, GenericityFailure, GenericityReport};
pub use linear::{LinearMap, Mat3};
pub use word::{format_word, parse_word, reduced_words, word_map, Letter, WordChain};

/// Default cap on the degree of explicitly composed words.
pub const DEFAULT_DEGREE_CAP: u64 = 256;
