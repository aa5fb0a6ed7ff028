//! Blink-driven Morse code engine.
//!
//! Eye landmarks become EAR values ([`signal`]), closures become blink
//! events, blinks become dots, dashes and letters ([`codec`]). [`engine`]
//! wires the two stages together, [`io`] carries the line protocol, replay
//! and the simulator, and [`session`] logs and analyses trials.

pub mod codec;
pub mod engine;
pub mod io;
pub mod session;
pub mod signal;
