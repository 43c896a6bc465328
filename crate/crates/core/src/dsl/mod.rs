//! Textual surface syntax (`.parch`) for architectures and property queries.

mod error;
mod lexer;
mod parser;
mod render;

pub use error::{ParseError, SourceSpan};
pub use parser::{declared_params, parse_architecture, parse_architecture_with, parse_query, parse_query_for};
pub use render::render;
