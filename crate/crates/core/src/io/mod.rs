//! Wire protocol, file replay and the blink simulator.

pub mod protocol;
pub mod replay;
pub mod sim;

pub use protocol::{parse_event_line, parse_frame_line, serialize_event, serialize_frame, EventMessage, ProtocolError};
pub use replay::{read_events, read_frames, LineReader, Pacer, ReplayMode};
pub use sim::{message_duration, simulate_blink_events, simulate_ear_trace, SimError, SimProfile};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}
