//! Acceptance criteria for toy-cascade, run as the `acceptance` test target.
