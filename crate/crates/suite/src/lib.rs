//! Holds the `acceptance` test target, which exercises the solver and the CLI
//! library together. There is no library code.
