//! Holds the acceptance harness under `tests/`.
