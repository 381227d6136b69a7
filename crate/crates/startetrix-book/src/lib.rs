//! Compiles the guide's code snippets as doc-tests so `cargo test` keeps
//! the book in sync with the library.
