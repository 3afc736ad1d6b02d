//! Page layout templates: normalized panel rectangles, gutters and merge groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::framing::PixelRect;
use crate::error::{Error, Result};

/// Published JSON schema for layout files.
pub const LAYOUT_SCHEMA: &str = include_str!("../../assets/schemas/layout.schema.json");

const BUNDLED: &str = include_str!("../../assets/layouts/bundled.json");

/// Overlap area (in normalized units) below which two panels count as touching.
const OVERLAP_TOLERANCE: f64 = 1e-9;

fn default_gutter() -> f64 {
    0.015
}

fn default_border() -> f64 {
    0.003
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Panel {
    pub id: String,
    /// `[x, y, w, h]`; x and w in page widths, y and h in page heights.
    pub rect: [f64; 4],
    /// Border thickness as a fraction of the page width.
    #[serde(default = "default_border")]
    pub border_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutTemplate {
    pub id: String,
    /// Page width and height ratio, e.g. `[16, 9]`.
    pub page_aspect: [f64; 2],
    /// Space between panels as a fraction of the page width.
    #[serde(default = "default_gutter")]
    pub gutter: f64,
    pub panels: Vec<Panel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merge_groups: Vec<Vec<String>>,
}

/// One image slot of a page: a lone panel or a merge group.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    /// Indices into `LayoutTemplate::panels`.
    pub panels: Vec<usize>,
}

/// Pixel geometry of one panel after gutters are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PanelPixels {
    pub rect: PixelRect,
    pub border: usize,
}

impl LayoutTemplate {
    pub fn aspect(&self) -> f64 {
        self.page_aspect[0] / self.page_aspect[1]
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Layout {
            id: self.id.clone(),
            message: message.into(),
        }
    }

    /// Checks geometry, ids and merge groups.
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Layout {
                id: String::new(),
                message: "template id is empty".into(),
            });
        }
        let [aw, ah] = self.page_aspect;
        if !(aw.is_finite() && ah.is_finite() && aw > 0.0 && ah > 0.0) {
            return Err(self.error("page_aspect must be two positive numbers"));
        }
        if !(0.0..=0.1).contains(&self.gutter) {
            return Err(self.error(format!("gutter {} outside [0, 0.1]", self.gutter)));
        }
        if self.panels.is_empty() {
            return Err(self.error("no panels"));
        }
        let mut ids = BTreeSet::new();
        for p in &self.panels {
            if !ids.insert(p.id.as_str()) {
                return Err(self.error(format!("duplicate panel id `{}`", p.id)));
            }
            let [x, y, w, h] = p.rect;
            if !p.rect.iter().all(|v| v.is_finite()) || w <= 0.0 || h <= 0.0 {
                return Err(self.error(format!("panel `{}` needs positive width and height", p.id)));
            }
            let eps = 1e-9;
            if x < -eps || y < -eps || x + w > 1.0 + eps || y + h > 1.0 + eps {
                return Err(self.error(format!("panel `{}` leaves the page", p.id)));
            }
            if !(0.0..=0.05).contains(&p.border_width) {
                return Err(self.error(format!("panel `{}` border_width outside [0, 0.05]", p.id)));
            }
        }
        let mut group_of: BTreeMap<&str, usize> = BTreeMap::new();
        for (g, group) in self.merge_groups.iter().enumerate() {
            if group.len() < 2 {
                return Err(self.error(format!("merge group {g} needs at least two panels")));
            }
            for id in group {
                if !ids.contains(id.as_str()) {
                    return Err(self.error(format!("merge group {g} names unknown panel `{id}`")));
                }
                if group_of.insert(id, g).is_some() {
                    return Err(self.error(format!("panel `{id}` is in more than one merge group")));
                }
            }
        }
        for (i, a) in self.panels.iter().enumerate() {
            for b in &self.panels[i + 1..] {
                let same_group = matches!(
                    (group_of.get(a.id.as_str()), group_of.get(b.id.as_str())),
                    (Some(x), Some(y)) if x == y
                );
                if !same_group && overlap_area(&a.rect, &b.rect) > OVERLAP_TOLERANCE {
                    return Err(self.error(format!("panels `{}` and `{}` overlap", a.id, b.id)));
                }
            }
        }
        Ok(())
    }

    /// Image slots in reading order: top to bottom, then left to right, by
    /// the center of each slot's bounding box.
    pub fn slots(&self) -> Vec<Slot> {
        let index: BTreeMap<&str, usize> = self
            .panels
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), i))
            .collect();
        let mut grouped = vec![false; self.panels.len()];
        let mut slots = Vec::new();
        for group in &self.merge_groups {
            let members: Vec<usize> = group.iter().filter_map(|id| index.get(id.as_str()).copied()).collect();
            for &m in &members {
                grouped[m] = true;
            }
            slots.push(Slot { panels: members });
        }
        for (i, g) in grouped.iter().enumerate() {
            if !g {
                slots.push(Slot { panels: vec![i] });
            }
        }
        let center = |s: &Slot| {
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for &i in &s.panels {
                let [x, y, w, h] = self.panels[i].rect;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x + w);
                y1 = y1.max(y + h);
            }
            ((x0 + x1) / 2.0, (y0 + y1) / 2.0)
        };
        slots.sort_by(|a, b| {
            let (ax, ay) = center(a);
            let (bx, by) = center(b);
            ay.total_cmp(&by).then(ax.total_cmp(&bx))
        });
        slots
    }

    /// Number of images one page consumes.
    pub fn demand(&self) -> usize {
        let grouped: usize = self.merge_groups.iter().map(Vec::len).sum();
        self.panels.len() - grouped + self.merge_groups.len()
    }

    /// Page size for a given width.
    pub fn page_size(&self, page_w: usize) -> (usize, usize) {
        let h = (page_w as f64 / self.aspect()).round().max(1.0) as usize;
        (page_w, h)
    }

    /// Panel rectangles on a `page_w`-wide page. Every panel is inset so that
    /// neighbors are one gutter apart and outer panels sit one gutter from the
    /// page edge.
    pub fn panel_pixels(&self, page_w: usize) -> Result<Vec<PanelPixels>> {
        let (pw, ph) = self.page_size(page_w);
        let g = (self.gutter * pw as f64).round() as usize;
        let edge = |v: f64, size: usize| (v * size as f64).round() as usize;
        self.panels
            .iter()
            .map(|p| {
                let [x, y, w, h] = p.rect;
                let (x0, x1) = (edge(x, pw), edge(x + w, pw).min(pw));
                let (y0, y1) = (edge(y, ph), edge(y + h, ph).min(ph));
                let lead = |v: usize| if v == 0 { g } else { g / 2 };
                let trail = |v: usize, size: usize| if v == size { g } else { g - g / 2 };
                let (l, r) = (x0 + lead(x0), x1.saturating_sub(trail(x1, pw)));
                let (t, b) = (y0 + lead(y0), y1.saturating_sub(trail(y1, ph)));
                if r <= l || b <= t {
                    return Err(self.error(format!("panel `{}` vanishes at page width {page_w}", p.id)));
                }
                let border = if p.border_width > 0.0 {
                    ((p.border_width * pw as f64).round() as usize).max(1)
                } else {
                    0
                };
                Ok(PanelPixels {
                    rect: PixelRect::new(l, t, r - l, b - t),
                    border,
                })
            })
            .collect()
    }
}

fn overlap_area(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let w = (a[0] + a[2]).min(b[0] + b[2]) - a[0].max(b[0]);
    let h = (a[1] + a[3]).min(b[1] + b[3]) - a[1].max(b[1]);
    if w > 0.0 && h > 0.0 {
        w * h
    } else {
        0.0
    }
}

/// Parses a single template or an array of templates and validates each.
pub fn parse_layouts(text: &str) -> Result<Vec<LayoutTemplate>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Many(Vec<LayoutTemplate>),
        One(LayoutTemplate),
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| Error::parse("layout", e.to_string()))?;
    let layouts = match doc {
        Doc::Many(v) => v,
        Doc::One(t) => vec![t],
    };
    let mut seen = BTreeSet::new();
    for t in &layouts {
        t.validate()?;
        if !seen.insert(t.id.clone()) {
            return Err(t.error("duplicate template id"));
        }
    }
    Ok(layouts)
}

/// Loads templates from a JSON file, or from every `.json` file of a
/// directory in name order.
pub fn load_layouts(path: impl AsRef<Path>) -> Result<Vec<LayoutTemplate>> {
    let path = path.as_ref();
    if !path.is_dir() {
        return parse_layouts(&fs::read_to_string(path)?);
    }
    let mut files: Vec<_> = fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")))
        .collect();
    files.sort();
    let mut all = Vec::new();
    let mut seen = BTreeSet::new();
    for f in files {
        for t in parse_layouts(&fs::read_to_string(&f)?)? {
            if !seen.insert(t.id.clone()) {
                return Err(t.error(format!("duplicate template id in {}", f.display())));
            }
            all.push(t);
        }
    }
    Ok(all)
}

/// The bundled template set.
pub fn bundled_layouts() -> Vec<LayoutTemplate> {
    parse_layouts(BUNDLED).expect("bundled layouts are valid")
}
