//! Random generators, reference enumerations and the property suites that
//! check the metatheory of the language against the implementation.

pub mod brute;
pub mod corpus;
pub mod gen;
pub mod report;
pub mod suites;

pub use brute::{brute_count_values, brute_values};
pub use corpus::{corpus_programs, corpus_types, CORPUS};
pub use gen::{constructors, GenConfig, Generator};
pub use report::{SuiteReport, VerifyReport};
pub use suites::{run_suite, verify, Suite, VerifyOptions};
