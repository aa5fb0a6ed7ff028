//! Where protocol lines come from and where event lines go.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{Ipv4Addr, TcpListener};
use std::path::Path;

use blinkmorse_core::io::{serialize_event, EventMessage};

use crate::error::CliError;

pub struct Input {
    pub reader: Box<dyn BufRead>,
    /// TCP peer that also receives every event line.
    pub peer: Option<Box<dyn Write>>,
    /// Recorded file, as opposed to a live stream.
    pub recorded: bool,
}

pub fn open(source: Option<&Path>, port: Option<u16>) -> Result<Input, CliError> {
    if let Some(port) = port {
        let listener = TcpListener::bind((Ipv4Addr::LOCALHOST, port))
            .map_err(|e| CliError::io(format!("bind 127.0.0.1:{port}"), e))?;
        let addr = listener.local_addr().map_err(|e| CliError::io("listener address", e))?;
        eprintln!("listening on {addr}");
        let (stream, peer) = listener.accept().map_err(|e| CliError::io("accept", e))?;
        log::info!("client connected from {peer}");
        let writer = stream.try_clone().map_err(|e| CliError::io("socket", e))?;
        return Ok(Input {
            reader: Box::new(BufReader::new(stream)),
            peer: Some(Box::new(writer)),
            recorded: false,
        });
    }
    match source {
        None => Ok(stdin()),
        Some(p) if p.as_os_str() == "-" => Ok(stdin()),
        Some(p) => {
            let file = File::open(p).map_err(|e| CliError::io(p.display().to_string(), e))?;
            Ok(Input {
                reader: Box::new(BufReader::new(file)),
                peer: None,
                recorded: true,
            })
        }
    }
}

fn stdin() -> Input {
    Input {
        reader: Box::new(io::stdin().lock()),
        peer: None,
        recorded: false,
    }
}

/// Writes event lines to standard output and, while it stays connected, the
/// TCP peer.
pub struct EventSink {
    stdout: io::StdoutLock<'static>,
    peer: Option<Box<dyn Write>>,
}

impl EventSink {
    pub fn new(peer: Option<Box<dyn Write>>) -> Self {
        Self {
            stdout: io::stdout().lock(),
            peer,
        }
    }

    pub fn emit(&mut self, events: &[EventMessage]) -> Result<(), CliError> {
        if events.is_empty() {
            return Ok(());
        }
        let mut text = String::new();
        for e in events {
            text.push_str(&serialize_event(e));
            text.push('\n');
        }
        let stdout_err = |e| CliError::io("stdout", e);
        self.stdout.write_all(text.as_bytes()).map_err(stdout_err)?;
        self.stdout.flush().map_err(stdout_err)?;
        if let Some(peer) = &mut self.peer {
            if let Err(e) = peer.write_all(text.as_bytes()).and_then(|_| peer.flush()) {
                log::warn!("client stopped accepting events: {e}");
                self.peer = None;
            }
        }
        Ok(())
    }
}
