//! File helpers: images, JSON/JSONL, lexicon and WordNet loading, score maps.

use std::fs;
use std::path::Path;

use curator_core::imaging::{netpbm, RasterImage};
use curator_core::lexicon::{ClassLexicon, PluralExpansion};
use curator_core::semfilter::{parse_stopwords, WordnetGraph};
use curator_core::wilss::codec;
use curator_core::wilss::{FeatureMap, ScoreMap};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CuratorError, Result};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CuratorError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CuratorError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CuratorError::io(dir, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| CuratorError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

/// Pretty JSON with a trailing newline.
pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_text(path, &to_json(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CuratorError::io(path, e))
}

pub fn parse_jsonl<T: DeserializeOwned>(text: &str, origin: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line)
            .map_err(|e| CuratorError::data(format!("{} line {}: {e}", origin.display(), i + 1)))?;
        out.push(item);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    parse_jsonl(&read_text(path)?, path)
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut s = String::new();
    for item in items {
        s.push_str(&serde_json::to_string(item).expect("serializable"));
        s.push('\n');
    }
    s
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    write_text(path, &to_jsonl(items))
}

/// Decodes PPM/PGM always, PNG when built with the `png` feature.
pub fn load_image(path: &Path) -> Result<RasterImage> {
    let bytes = read_bytes(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "ppm" | "pgm" | "pnm" => netpbm::decode(&bytes).map_err(|e| CuratorError::io(path, e)),
        #[cfg(feature = "png")]
        "png" => decode_png(&bytes).map_err(|e| CuratorError::io(path, e)),
        other => Err(CuratorError::data(format!(
            "{}: unsupported image type `{other}`",
            path.display()
        ))),
    }
}

#[cfg(feature = "png")]
fn decode_png(bytes: &[u8]) -> std::result::Result<RasterImage, String> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| e.to_string())?
        .to_rgb8();
    let (w, h) = img.dimensions();
    let data = img.as_raw().iter().map(|&v| v as f64 / 255.0).collect();
    RasterImage::new(w as usize, h as usize, data).map_err(|e| e.to_string())
}

/// The shipped VOC lexicon when `path` is `None`.
pub fn load_lexicon(path: Option<&Path>) -> Result<ClassLexicon> {
    match path {
        None => Ok(ClassLexicon::voc()),
        Some(p) => ClassLexicon::parse(&read_text(p)?, PluralExpansion::On).map_err(|e| CuratorError::io(p, e)),
    }
}

/// Loads `index.noun` and `data.noun` from `dir`, or the bundled mini
/// database when `dir` is `None`.
pub fn load_wordnet(dir: Option<&Path>, stopwords: Option<&Path>) -> Result<WordnetGraph> {
    let graph = match dir {
        None => WordnetGraph::mini(),
        Some(d) => {
            let index = read_text(&d.join("index.noun"))?;
            let data = read_text(&d.join("data.noun"))?;
            WordnetGraph::parse(&index, &data).map_err(|e| CuratorError::io(d, e))?
        }
    };
    Ok(match stopwords {
        None => graph,
        Some(p) => graph.with_stopwords(parse_stopwords(&read_text(p)?)),
    })
}

pub fn read_score_map(path: &Path) -> Result<ScoreMap> {
    codec::decode_score_map(&read_bytes(path)?).map_err(|e| CuratorError::io(path, e))
}

pub fn write_score_map(path: &Path, map: &ScoreMap) -> Result<()> {
    write_bytes(path, &codec::encode_score_map(map))
}

pub fn read_feature_map(path: &Path) -> Result<FeatureMap> {
    codec::decode_feature_map(&read_bytes(path)?).map_err(|e| CuratorError::io(path, e))
}

pub fn write_feature_map(path: &Path, map: &FeatureMap) -> Result<()> {
    write_bytes(path, &codec::encode_feature_map(map))
}
