//! Static gallery of scored styles: thumbnails, a JSON manifest and an HTML index.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::ScoredStyle;
use crate::error::Result;
use crate::imaging::{fit_max_dim, io, ImageBuffer};
use crate::pipeline::{execute, serialize};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalleryEntry {
    pub rank: usize,
    pub name: String,
    pub score: f64,
    pub scorer_id: String,
    pub style_file: String,
    pub thumbnails: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalleryManifest {
    pub probes: Vec<String>,
    pub entries: Vec<GalleryEntry>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_index(m: &GalleryManifest) -> String {
    let mut html = String::from(
        "<!doctype html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Style gallery</title>\n\
         <style>body{font-family:sans-serif}td{padding:4px;vertical-align:top}img{display:block}</style>\n\
         </head>\n<body>\n<h1>Style gallery</h1>\n<table>\n<tr><th>#</th><th>style</th><th>score</th>",
    );
    for p in &m.probes {
        let _ = write!(html, "<th>{}</th>", escape(p));
    }
    html.push_str("</tr>\n");
    for e in &m.entries {
        let _ = write!(
            html,
            "<tr><td>{}</td><td><a href=\"{}\">{}</a></td><td>{:.4}</td>",
            e.rank,
            escape(&e.style_file),
            escape(&e.name),
            e.score
        );
        for t in &e.thumbnails {
            let _ = write!(html, "<td><img src=\"{}\" alt=\"\"></td>", escape(t));
        }
        html.push_str("</tr>\n");
    }
    html.push_str("</table>\n</body>\n</html>\n");
    html
}

/// Writes the gallery under `out_dir`, best score first (ties by name).
pub fn explore_report(
    scored: &[ScoredStyle],
    probes: &[(String, ImageBuffer)],
    out_dir: &Path,
    thumb_max: usize,
) -> Result<GalleryManifest> {
    fs::create_dir_all(out_dir.join("thumbs"))?;
    fs::create_dir_all(out_dir.join("styles"))?;
    let mut order: Vec<&ScoredStyle> = scored.iter().collect();
    order.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.style.name.cmp(&b.style.name))
    });
    let small: Vec<ImageBuffer> = probes
        .iter()
        .map(|(_, img)| fit_max_dim(img, thumb_max))
        .collect::<Result<_>>()?;

    let mut entries = Vec::with_capacity(order.len());
    for (i, s) in order.iter().enumerate() {
        let rank = i + 1;
        let style_file = format!("styles/{rank:04}.json");
        fs::write(out_dir.join(&style_file), serialize(&s.style))?;
        let mut thumbnails = Vec::with_capacity(small.len());
        for (j, probe) in small.iter().enumerate() {
            let rel = format!("thumbs/{rank:04}-{j:02}.png");
            io::save_png(&execute(&s.style, probe)?, out_dir.join(&rel))?;
            thumbnails.push(rel);
        }
        entries.push(GalleryEntry {
            rank,
            name: s.style.name.clone(),
            score: s.score,
            scorer_id: s.scorer_id.clone(),
            style_file,
            thumbnails,
        });
    }
    let manifest = GalleryManifest {
        probes: probes.iter().map(|(n, _)| n.clone()).collect(),
        entries,
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    fs::write(out_dir.join("index.html"), render_index(&manifest))?;
    Ok(manifest)
}
