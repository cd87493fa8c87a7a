//! Session orchestration: file registry, duplicate filtering, ordering,
//! shared view ranges and the dual decode paths.
//!
//! Files are fully decoded when added (waveform path). Spectrograms are
//! computed on demand from a byte-range slice of the original file covering
//! only the effective time range.

mod cache;
mod protocol;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Cursor;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{spectrogram, DspError, SpectrogramMatrix, WindowSpec};
use crate::render::{self, RenderError};
use crate::viz::{
    self, crop_to_range, decimate_minmax, decimate_range, ViewRange, VizError, WaveformSummary,
};
use crate::wav::{
    decode_full, decode_slice_from, export_f32le, parse_wav_header, AudioClip, ClipWarning,
    CountingReader, SliceRequest, WavError,
};

pub use cache::DEFAULT_CACHE_BUDGET;
use cache::{CacheKey, VizCache};
pub use protocol::{CommandResponse, PROTOCOL_VERSION};

/// Buckets in the thumbnail summary computed for every added file.
pub const THUMBNAIL_BUCKETS: usize = 1000;
/// Default main-view buckets: two per pixel of a 1024 px plot.
pub const DEFAULT_VIEW_BUCKETS: usize = 2048;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unknown file id {0}")]
    UnknownId(String),
    #[error("file {0} is not decoded")]
    NotDecoded(String),
    #[error("index {index} is out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Viz(#[from] VizError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

impl EngineError {
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::UnknownId(_) => "UnknownId",
            EngineError::NotDecoded(_) => "NotDecoded",
            EngineError::IndexOutOfRange { .. } => "IndexOutOfRange",
            EngineError::Wav(e) => e.kind(),
            EngineError::Dsp(e) => e.kind(),
            EngineError::Viz(e) => e.kind(),
            EngineError::Render(e) => e.kind(),
        }
    }
}

/// Opaque per-session file token, printed as `f<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileId(pub(crate) u64);

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

impl std::str::FromStr for FileId {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('f')
            .and_then(|n| n.parse().ok())
            .map(FileId)
            .ok_or_else(|| EngineError::UnknownId(s.to_string()))
    }
}

impl Serialize for FileId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FileId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FileStatus {
    Pending,
    Decoded,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClipMeta {
    pub duration_seconds: f64,
    pub sample_rate: u32,
    pub channels: u16,
    pub bits_per_sample: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub id: FileId,
    pub name: String,
    pub byte_length: usize,
    pub status: FileStatus,
    pub clip_meta: Option<ClipMeta>,
    pub warning_flags: Vec<ClipWarning>,
    /// Decode error for failed entries, as `Kind: message`.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewMode {
    #[default]
    Waveform,
    Spectrogram,
}

/// Output of [`Session::generate_visualization`]. Cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub enum Visualization {
    Waveform(Arc<WaveformSummary<f32>>),
    Spectrogram(Arc<SpectrogramMatrix<f32>>),
}

impl Visualization {
    pub fn approx_bytes(&self) -> usize {
        match self {
            Visualization::Waveform(w) => w.buckets.len() * 8 + 64,
            Visualization::Spectrogram(m) => m.values.len() * 4 + 64,
        }
    }

    pub fn as_waveform(&self) -> Option<&WaveformSummary<f32>> {
        match self {
            Visualization::Waveform(w) => Some(w),
            Visualization::Spectrogram(_) => None,
        }
    }

    pub fn as_spectrogram(&self) -> Option<&SpectrogramMatrix<f32>> {
        match self {
            Visualization::Spectrogram(m) => Some(m),
            Visualization::Waveform(_) => None,
        }
    }

    /// Serialized form: `WSWF` for waveforms, `WSPM` for spectrograms.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Visualization::Waveform(w) => w.to_bytes(),
            Visualization::Spectrogram(m) => m.to_bytes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AddOutcome {
    Added(FileId),
    /// Same name and byte length as an entry already in the session.
    Duplicate(FileId),
    Failed {
        id: FileId,
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddResult {
    pub name: String,
    pub outcome: AddOutcome,
}

/// Output format for [`Session::render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Svg,
    Png,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SessionStats {
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub slices_decoded: u64,
    /// Bytes read from the source by the most recent slice decode.
    pub last_slice_bytes_read: u64,
    pub cache_entries: usize,
    pub cache_bytes: usize,
}

struct LoadedFile {
    bytes: Arc<[u8]>,
    clip: Option<AudioClip<f32>>,
    thumbnail: Option<Arc<WaveformSummary<f32>>>,
}

struct Decoded {
    entry: FileEntry,
    file: LoadedFile,
}

/// Ordered registry of loaded files with shared view state.
///
/// Commands mutate the session serially; per-file decoding inside a batch
/// runs in parallel but results are applied in input order.
pub struct Session {
    entries: Vec<FileEntry>,
    files: BTreeMap<FileId, LoadedFile>,
    shared_range: Option<ViewRange>,
    per_file_ranges: BTreeMap<FileId, ViewRange>,
    view_mode: ViewMode,
    window_spec: WindowSpec,
    view_buckets: usize,
    next_id: u64,
    cache: VizCache,
    stats: SessionStats,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self::with_cache_budget(DEFAULT_CACHE_BUDGET)
    }

    pub fn with_cache_budget(bytes: usize) -> Self {
        Self {
            entries: Vec::new(),
            files: BTreeMap::new(),
            shared_range: None,
            per_file_ranges: BTreeMap::new(),
            view_mode: ViewMode::default(),
            window_spec: WindowSpec::default(),
            view_buckets: DEFAULT_VIEW_BUCKETS,
            next_id: 1,
            cache: VizCache::new(bytes),
            stats: SessionStats::default(),
        }
    }

    pub fn entries(&self) -> &[FileEntry] {
        &self.entries
    }

    pub fn ids(&self) -> Vec<FileId> {
        self.entries.iter().map(|e| e.id).collect()
    }

    pub fn entry(&self, id: FileId) -> Result<&FileEntry, EngineError> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| EngineError::UnknownId(id.to_string()))
    }

    pub fn view_mode(&self) -> ViewMode {
        self.view_mode
    }

    pub fn set_view_mode(&mut self, mode: ViewMode) {
        self.view_mode = mode;
    }

    pub fn window_spec(&self) -> WindowSpec {
        self.window_spec
    }

    pub fn set_window_spec(&mut self, spec: WindowSpec) -> Result<(), EngineError> {
        spec.validate()?;
        self.window_spec = spec;
        Ok(())
    }

    pub fn view_buckets(&self) -> usize {
        self.view_buckets
    }

    pub fn set_view_buckets(&mut self, buckets: usize) -> Result<(), EngineError> {
        if buckets == 0 {
            return Err(VizError::InvalidBucketCount(0).into());
        }
        self.view_buckets = buckets;
        Ok(())
    }

    pub fn set_cache_budget(&mut self, bytes: usize) {
        self.cache.set_budget(bytes);
    }

    pub fn shared_range(&self) -> Option<ViewRange> {
        self.shared_range
    }

    pub fn stats(&self) -> SessionStats {
        SessionStats {
            cache_entries: self.cache.len(),
            cache_bytes: self.cache.used_bytes(),
            ..self.stats
        }
    }

    /// The 1000-bucket preview computed when the file was added.
    pub fn thumbnail(&self, id: FileId) -> Result<Arc<WaveformSummary<f32>>, EngineError> {
        self.entry(id)?;
        self.files
            .get(&id)
            .and_then(|f| f.thumbnail.clone())
            .ok_or_else(|| EngineError::NotDecoded(id.to_string()))
    }

    /// The fully decoded clip of a file.
    pub fn clip(&self, id: FileId) -> Result<&AudioClip<f32>, EngineError> {
        self.entry(id)?;
        self.files
            .get(&id)
            .and_then(|f| f.clip.as_ref())
            .ok_or_else(|| EngineError::NotDecoded(id.to_string()))
    }

    /// Add a batch of named files.
    ///
    /// A file whose name and byte length match an existing entry (or an
    /// earlier file of the same batch) is skipped as a duplicate. Others are
    /// appended and decoded; a decode failure is recorded on that entry and
    /// never affects the rest of the batch.
    pub fn add_files<I, N>(&mut self, files: I) -> Vec<AddResult>
    where
        I: IntoIterator<Item = (N, Vec<u8>)>,
        N: Into<String>,
    {
        let mut results = Vec::new();
        let mut accepted: Vec<(usize, FileId, String, Vec<u8>)> = Vec::new();
        for (name, bytes) in files {
            let name = name.into();
            let existing = self
                .entries
                .iter()
                .find(|e| e.name == name && e.byte_length == bytes.len())
                .map(|e| e.id)
                .or_else(|| {
                    accepted
                        .iter()
                        .find(|(_, _, n, b)| *n == name && b.len() == bytes.len())
                        .map(|(_, id, _, _)| *id)
                });
            if let Some(id) = existing {
                results.push(AddResult {
                    name,
                    outcome: AddOutcome::Duplicate(id),
                });
                continue;
            }
            let id = FileId(self.next_id);
            self.next_id += 1;
            accepted.push((results.len(), id, name.clone(), bytes));
            results.push(AddResult {
                name,
                outcome: AddOutcome::Added(id),
            });
        }

        let decoded: Vec<(usize, Decoded)> = accepted
            .into_par_iter()
            .map(|(slot, id, name, bytes)| (slot, decode_entry(id, name, bytes)))
            .collect();
        for (slot, d) in decoded {
            if let Some(err) = &d.entry.error {
                results[slot].outcome = AddOutcome::Failed {
                    id: d.entry.id,
                    error: err.clone(),
                };
            }
            self.files.insert(d.entry.id, d.file);
            self.entries.push(d.entry);
        }
        results
    }

    /// Remove an entry with its cached visualizations and range override.
    pub fn remove_file(&mut self, id: FileId) -> Result<(), EngineError> {
        let pos = self
            .entries
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| EngineError::UnknownId(id.to_string()))?;
        self.entries.remove(pos);
        self.files.remove(&id);
        self.per_file_ranges.remove(&id);
        self.cache.purge(id);
        Ok(())
    }

    /// Move an entry to `new_index`, keeping the others in relative order.
    pub fn reorder(&mut self, id: FileId, new_index: usize) -> Result<(), EngineError> {
        let pos = self
            .entries
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| EngineError::UnknownId(id.to_string()))?;
        if new_index >= self.entries.len() {
            return Err(EngineError::IndexOutOfRange {
                index: new_index,
                len: self.entries.len(),
            });
        }
        let e = self.entries.remove(pos);
        self.entries.insert(new_index, e);
        Ok(())
    }

    /// Apply one range to every file. Per-file overrides are cleared.
    pub fn set_shared_range(&mut self, range: ViewRange) -> Result<(), EngineError> {
        range.validate()?;
        self.shared_range = Some(range);
        self.per_file_ranges.clear();
        Ok(())
    }

    pub fn clear_shared_range(&mut self) {
        self.shared_range = None;
    }

    /// Override the range of one file.
    pub fn set_file_range(&mut self, id: FileId, range: ViewRange) -> Result<(), EngineError> {
        self.entry(id)?;
        range.validate()?;
        self.per_file_ranges.insert(id, range);
        Ok(())
    }

    /// The file's own range, else the shared range, else everything; clamped
    /// to the file's duration and Nyquist frequency.
    pub fn effective_range(&self, id: FileId) -> Result<ViewRange, EngineError> {
        let entry = self.entry(id)?;
        let meta = entry
            .clip_meta
            .ok_or_else(|| EngineError::NotDecoded(id.to_string()))?;
        let nyquist = meta.sample_rate as f64 / 2.0;
        let base = self
            .per_file_ranges
            .get(&id)
            .copied()
            .or(self.shared_range)
            .unwrap_or_else(|| ViewRange::full(meta.duration_seconds, nyquist));
        Ok(base.clamp_to(meta.duration_seconds, nyquist)?)
    }

    /// Compute the current view of a file in the session's view mode.
    pub fn generate_visualization(&mut self, id: FileId) -> Result<Visualization, EngineError> {
        self.visualize(id, self.view_mode)
    }

    /// Compute the view of a file in an explicit mode.
    ///
    /// Waveforms are decimated from the decoded clip. Spectrograms decode a
    /// byte-range slice of the original file for the effective time range
    /// and never touch the full decode. Results are cached by file, mode,
    /// effective range, window spec and bucket count.
    pub fn visualize(&mut self, id: FileId, mode: ViewMode) -> Result<Visualization, EngineError> {
        let range = self.effective_range(id)?;
        let key = CacheKey::new(id, mode, &range, self.window_spec, self.view_buckets);
        if let Some(v) = self.cache.get(&key) {
            self.stats.cache_hits += 1;
            return Ok(v);
        }
        self.stats.cache_misses += 1;
        let v = match mode {
            ViewMode::Waveform => {
                let clip = self.clip(id)?;
                Visualization::Waveform(Arc::new(decimate_range(
                    clip,
                    range.time,
                    self.view_buckets,
                )?))
            }
            ViewMode::Spectrogram => {
                let slice = self.slice(id, &range)?;
                let m = spectrogram(&slice, &self.window_spec)?;
                Visualization::Spectrogram(Arc::new(crop_to_range(&m, &range)?))
            }
        };
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    fn slice(&mut self, id: FileId, range: &ViewRange) -> Result<AudioClip<f32>, EngineError> {
        let bytes = self
            .files
            .get(&id)
            .map(|f| f.bytes.clone())
            .ok_or_else(|| EngineError::UnknownId(id.to_string()))?;
        let req = SliceRequest::new(range.time.lo, range.time.span());
        let mut reader = CountingReader::new(Cursor::new(&bytes[..]));
        let clip = decode_slice_from(&mut reader, req)?;
        self.stats.slices_decoded += 1;
        self.stats.last_slice_bytes_read = reader.bytes_read();
        Ok(clip.with_name(self.entry(id)?.name.clone()))
    }

    /// Render the current view of a file.
    ///
    /// Waveforms default to SVG; spectrograms to PNG (a bare raster) or SVG
    /// (raster plus axes and legend).
    pub fn render(
        &mut self,
        id: FileId,
        format: RenderFormat,
        width: usize,
        height: usize,
    ) -> Result<Vec<u8>, EngineError> {
        let range = self.effective_range(id)?;
        let title = self.entry(id)?.name.clone();
        let out = match self.generate_visualization(id)? {
            Visualization::Waveform(w) => match format {
                RenderFormat::Svg => {
                    render::render_waveform_svg(&*w, &range, width, height, &title)?.into_bytes()
                }
                RenderFormat::Png => {
                    let grid = viz::rasterize_waveform(&*w, &range, width, height)?;
                    render::encode_png(&grid)?
                }
            },
            Visualization::Spectrogram(m) => match format {
                RenderFormat::Png => render::render_spectrogram_png(&viz::rasterize_spectrogram(
                    &*m, width, height,
                )?)?,
                RenderFormat::Svg => {
                    let area = render::PlotArea::for_canvas(width, height)?;
                    let grid = viz::rasterize_spectrogram(
                        &*m,
                        area.width.round() as usize,
                        area.height.round() as usize,
                    )?;
                    render::render_spectrogram_svg(&grid, &m.meta, width, height, &title)?
                        .into_bytes()
                }
            },
        };
        Ok(out)
    }

    /// Mono F32LE samples of the file's effective time range, decoded
    /// through the slice path.
    pub fn export_f32le(&mut self, id: FileId) -> Result<Vec<u8>, EngineError> {
        let range = self.effective_range(id)?;
        let clip = self.slice(id, &range)?;
        Ok(export_f32le(&clip))
    }
}

fn decode_entry(id: FileId, name: String, bytes: Vec<u8>) -> Decoded {
    let byte_length = bytes.len();
    let mut entry = FileEntry {
        id,
        name: name.clone(),
        byte_length,
        status: FileStatus::Pending,
        clip_meta: None,
        warning_flags: Vec::new(),
        error: None,
    };
    let decoded = parse_wav_header(&bytes).and_then(|fmt| {
        let clip: AudioClip<f32> = decode_full(&bytes)?;
        Ok((fmt, clip.with_name(name)))
    });
    let file = match decoded {
        Ok((fmt, clip)) => {
            let thumb = if clip.is_empty() {
                None
            } else {
                decimate_minmax(&clip, THUMBNAIL_BUCKETS).ok().map(Arc::new)
            };
            entry.status = FileStatus::Decoded;
            entry.clip_meta = Some(ClipMeta {
                duration_seconds: clip.duration_seconds(),
                sample_rate: clip.sample_rate(),
                channels: fmt.channel_count,
                bits_per_sample: fmt.bits_per_sample,
            });
            entry.warning_flags = clip.warnings().to_vec();
            LoadedFile {
                bytes: bytes.into(),
                clip: Some(clip),
                thumbnail: thumb,
            }
        }
        Err(e) => {
            entry.status = FileStatus::Failed;
            entry.error = Some(format!("{}: {e}", e.kind()));
            LoadedFile {
                bytes: Arc::from(Vec::new()),
                clip: None,
                thumbnail: None,
            }
        }
    };
    Decoded { entry, file }
}
