//! Session files: named bindings plus a command list, replayed to a single
//! deterministic report. In JSON mode (the default) replaying a given file
//! always produces byte-identical output.

use std::collections::BTreeMap;

use serde::Deserialize;

use ultraprod::{Error, Result};

use crate::commands::{check_window, dispatch, Ctx};
use crate::report::{SessionReport, SCHEMA};

#[derive(Deserialize)]
pub struct SessionFile {
    #[serde(default)]
    pub window: Option<u64>,
    /// Output mode: "json" (default) or "text".
    #[serde(default)]
    pub mode: Option<String>,
    /// Named expression bindings; `$name` in command arguments expands.
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
    #[serde(default)]
    pub assume: Vec<String>,
    pub commands: Vec<Vec<String>>,
}

pub enum SessionOutput {
    Json(SessionReport),
    Text(String),
}

pub fn run(text: &str, default_window: u64) -> Result<SessionOutput> {
    let file: SessionFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
        pos: 0,
        msg: format!("bad session file: {e}"),
    })?;
    let window = check_window(file.window.unwrap_or(default_window))?;
    let ctx = Ctx::new(window, &file.assume)?;
    let mode = file.mode.as_deref().unwrap_or("json");
    if !matches!(mode, "json" | "text") {
        return Err(Error::Unsupported {
            msg: format!("unknown session mode `{mode}`"),
        });
    }
    let mut results = Vec::new();
    let mut lines = Vec::new();
    for argv in &file.commands {
        let expanded: Vec<String> = argv
            .iter()
            .map(|arg| expand(arg, &file.bindings))
            .collect::<Result<_>>()?;
        let (value, text) = dispatch(&ctx, &expanded)?;
        results.push(value);
        lines.push(text);
    }
    if mode == "text" {
        return Ok(SessionOutput::Text(lines.join("\n")));
    }
    Ok(SessionOutput::Json(SessionReport {
        schema: SCHEMA,
        command: "session",
        results,
    }))
}

fn expand(arg: &str, bindings: &BTreeMap<String, String>) -> Result<String> {
    if let Some(name) = arg.strip_prefix('$') {
        return bindings.get(name).cloned().ok_or_else(|| Error::Unsupported {
            msg: format!("unknown binding `${name}`"),
        });
    }
    Ok(arg.to_string())
}
