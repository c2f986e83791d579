//! Report types and rendering shared between the `metlie` binary and its
//! integration tests.

pub mod human;
pub mod report;
