//! Holds the `acceptance` test target (`cargo test -p verification --test acceptance`).
