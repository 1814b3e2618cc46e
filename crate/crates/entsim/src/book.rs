//! Attaches the guide chapters in `book/` as documentation of these empty
//! modules, so `cargo test` compiles and runs every code block in the
//! book. A failing snippet here means the guide and the library drifted
//! apart.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
mod model {}

#[doc = include_str!("../../../book/src/pulses.md")]
mod pulses {}

#[doc = include_str!("../../../book/src/dynamics.md")]
mod dynamics {}

#[doc = include_str!("../../../book/src/spectrum.md")]
mod spectrum {}

#[doc = include_str!("../../../book/src/entanglement.md")]
mod entanglement {}

#[doc = include_str!("../../../book/src/protocols.md")]
mod protocols {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
