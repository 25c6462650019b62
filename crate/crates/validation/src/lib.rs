//! Holds the `acceptance` test target, which checks the physics claims end
//! to end and prints one PASS/FAIL line per criterion:
//!
//! ```text
//! cargo test -p rotorlab-validation --test acceptance
//! ```
