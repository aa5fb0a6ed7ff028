//! Flat `key = value` settings file shared by `calibrate` and `decode`.

use std::fs;
use std::path::Path;

use blinkmorse_core::codec::TimingConfig;
use blinkmorse_core::signal::DetectorConfig;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngineConfig {
    pub detector: DetectorConfig,
    pub timing: TimingConfig,
}

const KEYS: [&str; 8] = [
    "close_threshold",
    "open_threshold",
    "min_closure_s",
    "tracking_loss_timeout_s",
    "dot_min_s",
    "dash_min_s",
    "letter_gap_s",
    "word_gap_s",
];

impl EngineConfig {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        let (d, t) = (&mut self.detector, &mut self.timing);
        Some(match key {
            "close_threshold" => &mut d.close_threshold,
            "open_threshold" => &mut d.open_threshold,
            "min_closure_s" => &mut d.min_closure_s,
            "tracking_loss_timeout_s" => &mut d.tracking_loss_timeout_s,
            "dot_min_s" => &mut t.dot_min_s,
            "dash_min_s" => &mut t.dash_min_s,
            "letter_gap_s" => &mut t.letter_gap_s,
            "word_gap_s" => &mut t.word_gap_s,
            _ => return None,
        })
    }

    /// Parses config text on top of the defaults. `#` starts a comment;
    /// missing keys keep their default.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| CliError::Usage(format!("config line {}: {why}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let v: f64 = value.parse().map_err(|_| bad(&format!("{value:?} is not a number")))?;
            *cfg.slot(key).ok_or_else(|| bad(&format!("unknown key {key:?}")))? = v;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Values use the shortest text that reads back to the same number.
    pub fn render(&self) -> String {
        let mut copy = *self;
        let mut out = String::new();
        for key in KEYS {
            let v = *copy.slot(key).expect("known key");
            out.push_str(&format!("{key} = {v}\n"));
        }
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.detector.validate()?;
        self.timing.validate()?;
        Ok(())
    }
}
