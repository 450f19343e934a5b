pub mod cli;
pub mod parser;
pub mod report;
pub mod system_file;

pub use parser::parse_expression;
pub use report::Report;
pub use system_file::{parse_system_file, read_system_file, Expectation, SystemFile};
