//! Holds the `acceptance` test target; run it with
//! `cargo test -p qldpc-dc-verify --test acceptance`.
