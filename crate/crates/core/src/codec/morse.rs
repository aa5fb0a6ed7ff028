//! International Morse code table for letters and digits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CodecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseSymbol {
    Dot,
    Dash,
}

impl MorseSymbol {
    pub fn as_char(self) -> char {
        match self {
            Self::Dot => '.',
            Self::Dash => '-',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Dot => "dot",
            Self::Dash => "dash",
        }
    }
}

/// Ordered dots and dashes. Valid codes have 1 to 5 symbols; longer
/// sequences can still accumulate while decoding and are reported as invalid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MorseSequence(Vec<MorseSymbol>);

impl MorseSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, symbol: MorseSymbol) {
        self.0.push(symbol);
    }

    pub fn symbols(&self) -> &[MorseSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn clear(&mut self) {
        self.0.clear();
    }
}

impl From<Vec<MorseSymbol>> for MorseSequence {
    fn from(symbols: Vec<MorseSymbol>) -> Self {
        Self(symbols)
    }
}

impl fmt::Display for MorseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for MorseSequence {
    type Err = CodecError;

    /// Parses `.`/`-` notation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '.' => Ok(MorseSymbol::Dot),
                '-' => Ok(MorseSymbol::Dash),
                other => Err(CodecError::InvalidCode(format!("unexpected symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

/// ITU-R M.1677-1 codes for A-Z and 0-9.
pub const MORSE_TABLE: [(char, &str); 36] = [
    ('A', ".-"),
    ('B', "-..."),
    ('C', "-.-."),
    ('D', "-.."),
    ('E', "."),
    ('F', "..-."),
    ('G', "--."),
    ('H', "...."),
    ('I', ".."),
    ('J', ".---"),
    ('K', "-.-"),
    ('L', ".-.."),
    ('M', "--"),
    ('N', "-."),
    ('O', "---"),
    ('P', ".--."),
    ('Q', "--.-"),
    ('R', ".-."),
    ('S', "..."),
    ('T', "-"),
    ('U', "..-"),
    ('V', "...-"),
    ('W', ".--"),
    ('X', "-..-"),
    ('Y', "-.--"),
    ('Z', "--.."),
    ('0', "-----"),
    ('1', ".----"),
    ('2', "..---"),
    ('3', "...--"),
    ('4', "....-"),
    ('5', "....."),
    ('6', "-...."),
    ('7', "--..."),
    ('8', "---.."),
    ('9', "----."),
];

pub fn is_supported(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

pub fn encode_char(c: char) -> Result<MorseSequence, CodecError> {
    let upper = c.to_ascii_uppercase();
    MORSE_TABLE
        .iter()
        .find(|(ch, _)| *ch == upper)
        .map(|(_, code)| code.parse().expect("table codes are well formed"))
        .ok_or(CodecError::UnsupportedCharacter(c))
}

pub fn decode_sequence(seq: &MorseSequence) -> Option<char> {
    let code = seq.to_string();
    MORSE_TABLE.iter().find(|(_, c)| *c == code).map(|(ch, _)| *ch)
}

/// One unit of an encoded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessageItem {
    Letter(char, MorseSequence),
    WordBoundary,
}

/// Encode `text` letter by letter.
///
/// Runs of whitespace become a single word boundary; leading and trailing
/// whitespace is dropped.
pub fn encode_message(text: &str) -> Result<Vec<MessageItem>, CodecError> {
    let mut items = Vec::new();
    for (i, word) in text.split_whitespace().enumerate() {
        if i > 0 {
            items.push(MessageItem::WordBoundary);
        }
        for c in word.chars() {
            items.push(MessageItem::Letter(c.to_ascii_uppercase(), encode_char(c)?));
        }
    }
    Ok(items)
}
