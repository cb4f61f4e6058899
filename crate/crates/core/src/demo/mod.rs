//! Interactive air-writing service: canvas strokes become emitter paths,
//! each sample is reconstructed as it arrives, and a finished stroke is
//! segmented and smoothed.

mod server;
mod session;
mod wire;

pub use server::{replay_lines, serve, Connection};
pub use session::{create_session, replay_offline, Session, SessionConfig, StepOutcome};
pub use wire::{segment_messages, WireMessage};

#[cfg(test)]
mod tests;
