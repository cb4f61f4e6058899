use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use crate::error::Result;

use super::session::{create_session, Session, SessionConfig};
use super::wire::{segment_messages, WireMessage};

/// Protocol state of one client. Each connection owns its session, so
/// concurrent clients never share data.
#[derive(Debug, Default)]
pub struct Connection {
    session: Option<Session>,
}

impl Connection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    pub fn handle(&mut self, msg: WireMessage) -> Vec<WireMessage> {
        match msg {
            WireMessage::Config(config) => {
                if self.session.as_ref().is_some_and(|s| !s.knots().is_empty()) {
                    return vec![WireMessage::error("config", "stroke already in progress; finalize it first")];
                }
                match create_session(config) {
                    Ok(s) => {
                        let echo = WireMessage::Config(s.config().clone());
                        self.session = Some(s);
                        vec![echo]
                    }
                    Err(e) => vec![WireMessage::error("config", e)],
                }
            }
            WireMessage::StrokePoint { t, u, v } => {
                if self.session.is_none() {
                    match create_session(SessionConfig::default()) {
                        Ok(s) => self.session = Some(s),
                        Err(e) => return vec![WireMessage::error("config", e)],
                    }
                }
                let session = self.session.as_mut().expect("session was just created");
                match session.ingest_stroke_point(t, u, v) {
                    Ok(outcome) => vec![outcome.into()],
                    Err(e) => vec![WireMessage::error("ingest", e)],
                }
            }
            WireMessage::Finalize => {
                let Some(session) = self.session.take() else {
                    return vec![WireMessage::error("finalize", "no stroke to finalize")];
                };
                let config = session.config().clone();
                let out = match session.finalize_session() {
                    Ok((_, segments)) => segment_messages(&segments),
                    Err(e) => vec![WireMessage::error("finalize", e)],
                };
                // the next stroke starts from scratch with the same settings
                self.session = create_session(config).ok();
                out
            }
            other => vec![WireMessage::error("protocol", format!("unexpected client message {}", other.to_line()))],
        }
    }

    pub fn handle_line(&mut self, line: &str) -> Vec<String> {
        let replies = match WireMessage::from_line(line) {
            Ok(msg) => self.handle(msg),
            Err(e) => vec![WireMessage::error("protocol", e)],
        };
        replies.iter().map(WireMessage::to_line).collect()
    }
}

/// Feeds recorded client lines through a fresh connection, returning the
/// replies a live client would have received.
pub fn replay_lines<'a>(lines: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut conn = Connection::new();
    lines
        .into_iter()
        .filter(|l| !l.trim().is_empty())
        .flat_map(|l| conn.handle_line(l))
        .collect()
}

fn serve_client(stream: TcpStream) -> Result<()> {
    let mut writer = stream.try_clone()?;
    let mut conn = Connection::new();
    for line in BufReader::new(stream).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for reply in conn.handle_line(&line) {
            writeln!(writer, "{reply}")?;
        }
        writer.flush()?;
    }
    Ok(())
}

/// Line-delimited JSON over TCP, one thread and one session per client.
pub fn serve(listener: TcpListener) -> Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        thread::spawn(move || {
            if let Err(e) = serve_client(stream) {
                eprintln!("client error: {e}");
            }
        });
    }
    Ok(())
}
