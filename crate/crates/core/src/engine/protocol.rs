//! JSON command boundary for hosts embedding a [`Session`].
//!
//! Requests and responses are UTF-8 JSON objects. Bulk data travels out of
//! band: request payloads are referenced by index into the slice passed to
//! [`Session::execute`], and a response carries at most one binary payload
//! described by its `payload` field. The full schema is in `docs/protocol.md`.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::dsp::WindowSpec;
use crate::viz::ViewRange;

use super::{AddOutcome, EngineError, FileId, RenderFormat, Session, ViewMode, Visualization};

/// Protocol revision carried by every response.
pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResponse {
    pub text: String,
    pub payload: Option<Vec<u8>>,
}

impl CommandResponse {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).expect("responses are valid JSON")
    }
}

const COMMANDS: &[&str] = &[
    "version",
    "add_files",
    "remove_file",
    "reorder",
    "list_files",
    "set_shared_range",
    "clear_shared_range",
    "set_file_range",
    "effective_range",
    "set_view_mode",
    "set_window_spec",
    "set_view_buckets",
    "thumbnail",
    "generate",
    "render",
    "export_f32le",
    "stats",
];

#[derive(Debug, Deserialize)]
struct FileRef {
    name: String,
    payload: usize,
}

fn default_width() -> usize {
    1024
}

fn default_height() -> usize {
    384
}

#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
enum Command {
    Version {
        #[serde(default)]
        protocol: Option<u32>,
    },
    AddFiles {
        #[serde(default)]
        protocol: Option<u32>,
        files: Vec<FileRef>,
    },
    RemoveFile {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
    },
    Reorder {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
        index: usize,
    },
    ListFiles {
        #[serde(default)]
        protocol: Option<u32>,
    },
    SetSharedRange {
        #[serde(default)]
        protocol: Option<u32>,
        range: ViewRange,
    },
    ClearSharedRange {
        #[serde(default)]
        protocol: Option<u32>,
    },
    SetFileRange {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
        range: ViewRange,
    },
    EffectiveRange {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
    },
    SetViewMode {
        #[serde(default)]
        protocol: Option<u32>,
        mode: ViewMode,
    },
    SetWindowSpec {
        #[serde(default)]
        protocol: Option<u32>,
        window_size: usize,
        hop_size: usize,
    },
    SetViewBuckets {
        #[serde(default)]
        protocol: Option<u32>,
        buckets: usize,
    },
    Thumbnail {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
    },
    Generate {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
    },
    Render {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
        format: RenderFormat,
        #[serde(default = "default_width")]
        width: usize,
        #[serde(default = "default_height")]
        height: usize,
    },
    ExportF32le {
        #[serde(default)]
        protocol: Option<u32>,
        id: FileId,
    },
    Stats {
        #[serde(default)]
        protocol: Option<u32>,
    },
}

impl Command {
    fn protocol(&self) -> Option<u32> {
        match self {
            Command::Version { protocol }
            | Command::AddFiles { protocol, .. }
            | Command::RemoveFile { protocol, .. }
            | Command::Reorder { protocol, .. }
            | Command::ListFiles { protocol }
            | Command::SetSharedRange { protocol, .. }
            | Command::ClearSharedRange { protocol }
            | Command::SetFileRange { protocol, .. }
            | Command::EffectiveRange { protocol, .. }
            | Command::SetViewMode { protocol, .. }
            | Command::SetWindowSpec { protocol, .. }
            | Command::SetViewBuckets { protocol, .. }
            | Command::Thumbnail { protocol, .. }
            | Command::Generate { protocol, .. }
            | Command::Render { protocol, .. }
            | Command::ExportF32le { protocol, .. }
            | Command::Stats { protocol } => *protocol,
        }
    }
}

enum Failure {
    Protocol(&'static str, String),
    Engine(EngineError),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Engine(e)
    }
}

type Reply = (Map<String, Value>, Option<(&'static str, Vec<u8>)>);

impl Session {
    /// Execute a request that carries no binary payloads.
    pub fn execute_command(&mut self, request: &str) -> CommandResponse {
        self.execute(request, &[])
    }

    /// Execute one JSON request. Never panics on bad input; every failure is
    /// reported as `{"ok": false, "error": <Kind>, "message": ...}`.
    pub fn execute(&mut self, request: &str, payloads: &[Vec<u8>]) -> CommandResponse {
        match self.dispatch(request, payloads) {
            Ok((mut body, payload)) => {
                let mut head = Map::new();
                head.insert("ok".into(), Value::Bool(true));
                head.insert("version".into(), Value::String(crate::VERSION.into()));
                head.append(&mut body);
                let payload = payload.map(|(kind, bytes)| {
                    head.insert(
                        "payload".into(),
                        json!({"kind": kind, "length": bytes.len()}),
                    );
                    bytes
                });
                CommandResponse {
                    text: Value::Object(head).to_string(),
                    payload,
                }
            }
            Err(f) => {
                let (kind, message) = match f {
                    Failure::Protocol(kind, message) => (kind, message),
                    Failure::Engine(e) => (e.kind(), e.to_string()),
                };
                CommandResponse {
                    text: json!({
                        "ok": false,
                        "version": crate::VERSION,
                        "error": kind,
                        "message": message,
                    })
                    .to_string(),
                    payload: None,
                }
            }
        }
    }

    fn dispatch(&mut self, request: &str, payloads: &[Vec<u8>]) -> Result<Reply, Failure> {
        let value: Value = serde_json::from_str(request)
            .map_err(|e| Failure::Protocol("MalformedRequest", e.to_string()))?;
        let name = value.get("cmd").and_then(Value::as_str).ok_or_else(|| {
            Failure::Protocol("MalformedRequest", "missing string field \"cmd\"".into())
        })?;
        if !COMMANDS.contains(&name) {
            return Err(Failure::Protocol(
                "UnknownCommand",
                format!("unknown command {name:?}"),
            ));
        }
        let cmd: Command = serde_json::from_value(value)
            .map_err(|e| Failure::Protocol("MalformedRequest", e.to_string()))?;
        if let Some(p) = cmd.protocol() {
            if p != PROTOCOL_VERSION {
                return Err(Failure::Protocol(
                    "UnsupportedProtocol",
                    format!("protocol {p} requested, {PROTOCOL_VERSION} supported"),
                ));
            }
        }

        let mut out = Map::new();
        let mut payload = None;
        match cmd {
            Command::Version { .. } => {}
            Command::AddFiles { files, .. } => {
                let mut batch = Vec::with_capacity(files.len());
                for f in files {
                    let bytes = payloads.get(f.payload).ok_or_else(|| {
                        Failure::Protocol(
                            "MalformedRequest",
                            format!("payload index {} out of range", f.payload),
                        )
                    })?;
                    batch.push((f.name, bytes.clone()));
                }
                let results: Vec<Value> = self
                    .add_files(batch)
                    .into_iter()
                    .map(|r| match r.outcome {
                        AddOutcome::Added(id) => {
                            json!({"name": r.name, "status": "added", "id": id})
                        }
                        AddOutcome::Duplicate(id) => {
                            json!({"name": r.name, "status": "duplicate", "id": id})
                        }
                        AddOutcome::Failed { id, error } => {
                            json!({"name": r.name, "status": "failed", "id": id, "error": error})
                        }
                    })
                    .collect();
                out.insert("results".into(), Value::Array(results));
            }
            Command::RemoveFile { id, .. } => self.remove_file(id)?,
            Command::Reorder { id, index, .. } => self.reorder(id, index)?,
            Command::ListFiles { .. } => {
                out.insert("files".into(), to_value(self.entries()));
            }
            Command::SetSharedRange { range, .. } => self.set_shared_range(range)?,
            Command::ClearSharedRange { .. } => self.clear_shared_range(),
            Command::SetFileRange { id, range, .. } => self.set_file_range(id, range)?,
            Command::EffectiveRange { id, .. } => {
                out.insert("range".into(), to_value(&self.effective_range(id)?));
            }
            Command::SetViewMode { mode, .. } => self.set_view_mode(mode),
            Command::SetWindowSpec {
                window_size,
                hop_size,
                ..
            } => {
                let spec = WindowSpec::new(window_size, hop_size).map_err(EngineError::from)?;
                self.set_window_spec(spec)?;
            }
            Command::SetViewBuckets { buckets, .. } => self.set_view_buckets(buckets)?,
            Command::Thumbnail { id, .. } => {
                payload = Some(("waveform", self.thumbnail(id)?.to_bytes()));
            }
            Command::Generate { id, .. } => {
                let v = self.generate_visualization(id)?;
                let kind = match &v {
                    Visualization::Waveform(w) => {
                        out.insert("buckets".into(), json!(w.len()));
                        "waveform"
                    }
                    Visualization::Spectrogram(m) => {
                        out.insert("frames".into(), json!(m.frames()));
                        out.insert("bins".into(), json!(m.bins()));
                        "spectrogram"
                    }
                };
                payload = Some((kind, v.to_bytes()));
            }
            Command::Render {
                id,
                format,
                width,
                height,
                ..
            } => {
                let bytes = self.render(id, format, width, height)?;
                let kind = match format {
                    RenderFormat::Svg => "svg",
                    RenderFormat::Png => "png",
                };
                payload = Some((kind, bytes));
            }
            Command::ExportF32le { id, .. } => {
                payload = Some(("f32le", self.export_f32le(id)?));
            }
            Command::Stats { .. } => {
                out.insert("stats".into(), to_value(&self.stats()));
            }
        }
        Ok((out, payload))
    }
}

fn to_value<T: serde::Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("session types serialize")
}
