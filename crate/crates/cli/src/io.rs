//! Reading and writing the JSON file formats; `-` means stdin/stdout.

use std::fs;
use std::io::{self, Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub fn read_text(path: &str) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

/// Byte offset of a 1-based (line, column) position as reported by serde_json.
pub fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn parse<T: DeserializeOwned>(text: &str, path: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = match e.path().to_string() {
            p if p == "." => "<root>".to_string(),
            p => p,
        };
        let inner = e.inner();
        CliError::Parse {
            path: path.to_string(),
            field,
            offset: byte_offset(text, inner.line(), inner.column()),
            message: inner.to_string(),
        }
    })?;
    Ok(value)
}

pub fn load<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    parse(&read_text(path)?, path)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &str, text: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(io_err)?;
        out.flush().map_err(io_err)
    } else {
        fs::write(path, text).map_err(io_err)
    }
}
