//! The filter-block catalog: every block is a pure image transform with a
//! declared parameter schema.

mod bilateral;
mod edges;
mod etf;
mod fastmath;
mod gaussian;
mod halftone;
mod histogram;
mod pattern;
mod pixel;
mod plane;
mod tvf;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{resize, to_color, to_gray, ChromaPlanes, ImageBuffer};

pub use bilateral::{bilateral, bilateral_plane, detail_control, BilateralParams, DETAIL_BILATERAL};
pub use edges::{sobel, xdog, XDOG_K};
pub use etf::{edge_tangent_flow, etf, line_integral_convolution, TangentField};
pub use gaussian::{blur_plane, gaussian, gaussian_kernel};
pub use halftone::{dot_radius, halftone, HalftoneMode, CMYK_ANGLES};
pub use histogram::{linear_equalize, luma_histogram, min_dynamic_range, percentile};
pub use pattern::{default_tiles, pattern_fill, pattern_fill_with, Tile};
pub use pixel::{
    brightness, colorize, hsl_to_rgb, hue, luma_posterize, posterize, posterize_value, saturate,
    soft_threshold, soft_threshold_value,
};
pub use plane::{plane_to_gray, planes_to_image, Plane};
pub use tvf::{total_variation, tv_flow_step, tvf, tvf_planes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterKind {
    ToGray,
    ToColor,
    Posterize,
    LumaPosterize,
    Brightness,
    SoftThreshold,
    Saturation,
    Hue,
    Colorize,
    Gaussian,
    #[serde(rename = "ETF")]
    Etf,
    #[serde(rename = "TVF")]
    Tvf,
    Sobel,
    #[serde(rename = "XDoG")]
    XDoG,
    Size,
    PatternFill,
    Halftone,
    DetailControl,
    LinearEqualize,
    MinDynamicRange,
}

/// The three block families of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pixel,
    Advanced,
    Histogram,
}

/// How a block changes the channel count of its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelRule {
    /// Any input, same channel count out.
    Preserve,
    /// Needs RGB, returns RGB.
    RequiresRgb,
    /// RGB in, luma out; the chroma is saved for a later ToColor.
    SplitChroma,
    /// Luma in, RGB out using the saved chroma.
    MergeChroma,
    /// Any input, single channel out.
    OutputsGray,
    /// Any input, RGB out.
    OutputsRgb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub default: f64,
    pub step: f64,
    pub integer: bool,
}

const fn real(name: &'static str, min: f64, max: f64, default: f64, step: f64) -> ParamSchema {
    ParamSchema {
        name,
        min,
        max,
        default,
        step,
        integer: false,
    }
}

const fn int(name: &'static str, min: f64, max: f64, default: f64) -> ParamSchema {
    ParamSchema {
        name,
        min,
        max,
        default,
        step: 1.0,
        integer: true,
    }
}

const POSTERIZE: &[ParamSchema] = &[int("levels", 2.0, 255.0, 10.0)];
const LUMA_POSTERIZE: &[ParamSchema] = &[int("levels", 2.0, 255.0, 8.0)];
const BRIGHTNESS: &[ParamSchema] = &[real("factor", 0.0, 4.0, 1.0, 0.01)];
const SOFT_THRESHOLD: &[ParamSchema] = &[
    real("phi", 0.013, 0.059, 0.04, 0.001),
    real("epsilon", 50.0, 110.0, 80.0, 1.0),
];
const SATURATION: &[ParamSchema] = &[real("saturation", 1.5, 2.2, 1.5, 0.01)];
const HUE: &[ParamSchema] = &[
    real("angle", 0.0, 360.0, 0.0, 1.0),
    real("bias_r", -128.0, 128.0, 0.0, 1.0),
    real("bias_g", -128.0, 128.0, 0.0, 1.0),
    real("bias_b", -128.0, 128.0, 0.0, 1.0),
];
const COLORIZE: &[ParamSchema] = &[
    real("hue", 0.0, 360.0, 30.0, 1.0),
    real("saturation", 0.0, 1.0, 0.5, 0.01),
];
const GAUSSIAN: &[ParamSchema] = &[real("sigma", 0.3, 20.0, 2.0, 0.1)];
const ETF: &[ParamSchema] = &[int("radius", 1.0, 10.0, 4.0), int("iterations", 1.0, 5.0, 2.0)];
const TVF: &[ParamSchema] = &[
    int("iterations", 1.0, 100.0, 10.0),
    real("dt", 0.01, 0.25, tvf::DEFAULT_DT, 0.01),
    real("eps", 0.01, 25.5, tvf::DEFAULT_EPS, 0.005),
];
const XDOG: &[ParamSchema] = &[
    real("sigma", 0.5, 8.0, 1.0, 0.1),
    real("p", 1.0, 40.0, 20.0, 0.5),
];
const SIZE: &[ParamSchema] = &[real("percent", 10.0, 400.0, 100.0, 1.0)];
const PATTERN_FILL: &[ParamSchema] = &[int("levels", 2.0, 8.0, 4.0), int("tile_scale", 1.0, 8.0, 1.0)];
const HALFTONE: &[ParamSchema] = &[int("cell", 2.0, 32.0, 8.0), int("mode", 0.0, 1.0, 0.0)];
const DETAIL_CONTROL: &[ParamSchema] = &[real("delta", -100.0, 60.0, 0.0, 1.0)];
const LINEAR_EQUALIZE: &[ParamSchema] = &[
    real("low", 0.0, 49.0, 5.0, 0.5),
    real("high", 51.0, 100.0, 95.0, 0.5),
];
const MIN_DYNAMIC_RANGE: &[ParamSchema] = &[int("range", 0.0, 255.0, 128.0)];

impl FilterKind {
    pub const ALL: [FilterKind; 20] = [
        FilterKind::ToGray,
        FilterKind::ToColor,
        FilterKind::Posterize,
        FilterKind::LumaPosterize,
        FilterKind::Brightness,
        FilterKind::SoftThreshold,
        FilterKind::Saturation,
        FilterKind::Hue,
        FilterKind::Colorize,
        FilterKind::Gaussian,
        FilterKind::Etf,
        FilterKind::Tvf,
        FilterKind::Sobel,
        FilterKind::XDoG,
        FilterKind::Size,
        FilterKind::PatternFill,
        FilterKind::Halftone,
        FilterKind::DetailControl,
        FilterKind::LinearEqualize,
        FilterKind::MinDynamicRange,
    ];

    /// Name used in style documents and the catalog.
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::ToGray => "ToGray",
            FilterKind::ToColor => "ToColor",
            FilterKind::Posterize => "Posterize",
            FilterKind::LumaPosterize => "LumaPosterize",
            FilterKind::Brightness => "Brightness",
            FilterKind::SoftThreshold => "SoftThreshold",
            FilterKind::Saturation => "Saturation",
            FilterKind::Hue => "Hue",
            FilterKind::Colorize => "Colorize",
            FilterKind::Gaussian => "Gaussian",
            FilterKind::Etf => "ETF",
            FilterKind::Tvf => "TVF",
            FilterKind::Sobel => "Sobel",
            FilterKind::XDoG => "XDoG",
            FilterKind::Size => "Size",
            FilterKind::PatternFill => "PatternFill",
            FilterKind::Halftone => "Halftone",
            FilterKind::DetailControl => "DetailControl",
            FilterKind::LinearEqualize => "LinearEqualize",
            FilterKind::MinDynamicRange => "MinDynamicRange",
        }
    }

    pub fn from_name(name: &str) -> Option<FilterKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Short label used in timing reports.
    pub fn label(self) -> &'static str {
        match self {
            FilterKind::ToColor => "ToRgb",
            FilterKind::SoftThreshold => "Thresh.",
            FilterKind::DetailControl => "Detail C.",
            FilterKind::Posterize | FilterKind::LumaPosterize => "Posteriz.",
            FilterKind::Saturation => "Saturate",
            FilterKind::PatternFill => "Pattern",
            FilterKind::LinearEqualize => "Equalize",
            FilterKind::MinDynamicRange => "Min. DR",
            other => other.name(),
        }
    }

    pub fn family(self) -> Family {
        use FilterKind::*;
        match self {
            ToGray | ToColor | Posterize | LumaPosterize | Brightness | SoftThreshold
            | Saturation | Hue | Colorize => Family::Pixel,
            LinearEqualize | MinDynamicRange => Family::Histogram,
            _ => Family::Advanced,
        }
    }

    pub fn channel_rule(self) -> ChannelRule {
        use FilterKind::*;
        match self {
            ToGray => ChannelRule::SplitChroma,
            ToColor => ChannelRule::MergeChroma,
            Saturation | Hue => ChannelRule::RequiresRgb,
            Sobel | XDoG => ChannelRule::OutputsGray,
            Colorize => ChannelRule::OutputsRgb,
            _ => ChannelRule::Preserve,
        }
    }

    pub fn params(self) -> &'static [ParamSchema] {
        use FilterKind::*;
        match self {
            ToGray | ToColor | Sobel => &[],
            Posterize => POSTERIZE,
            LumaPosterize => LUMA_POSTERIZE,
            Brightness => BRIGHTNESS,
            SoftThreshold => SOFT_THRESHOLD,
            Saturation => SATURATION,
            Hue => HUE,
            Colorize => COLORIZE,
            Gaussian => GAUSSIAN,
            Etf => ETF,
            Tvf => TVF,
            XDoG => XDOG,
            Size => SIZE,
            PatternFill => PATTERN_FILL,
            Halftone => HALFTONE,
            DetailControl => DETAIL_CONTROL,
            LinearEqualize => LINEAR_EQUALIZE,
            MinDynamicRange => MIN_DYNAMIC_RANGE,
        }
    }

    pub fn param(self, name: &str) -> Option<&'static ParamSchema> {
        self.params().iter().find(|p| p.name == name)
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    kind: &'static str,
    label: &'static str,
    family: Family,
    channels: ChannelRule,
    params: &'static [ParamSchema],
}

#[derive(Serialize)]
struct Catalog {
    schema_version: u32,
    filters: Vec<CatalogEntry>,
}

/// Machine-readable catalog of every block kind with its parameter schema.
pub fn catalog_json() -> String {
    let catalog = Catalog {
        schema_version: 1,
        filters: FilterKind::ALL
            .iter()
            .map(|&k| CatalogEntry {
                kind: k.name(),
                label: k.label(),
                family: k.family(),
                channels: k.channel_rule(),
                params: k.params(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&catalog).expect("catalog serializes")
}

/// A block kind plus a complete, validated set of parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBlock {
    kind: FilterKind,
    params: BTreeMap<String, f64>,
}

impl FilterBlock {
    /// Block with every parameter at its default.
    pub fn new(kind: FilterKind) -> Self {
        let params = kind
            .params()
            .iter()
            .map(|p| (p.name.to_string(), p.default))
            .collect();
        Self { kind, params }
    }

    /// Sets one parameter, rejecting unknown names and out-of-range values.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let schema = self.kind.param(name).ok_or_else(|| {
            Error::invalid(format!("{} has no parameter `{name}`", self.kind))
        })?;
        check_value(self.kind, schema, value)?;
        self.params.insert(name.to_string(), value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Value of a declared parameter.
    pub fn get(&self, name: &str) -> f64 {
        self.params[name]
    }

    fn get_u32(&self, name: &str) -> u32 {
        self.get(name) as u32
    }

    /// Runs the block. ToGray stores its chroma in `saved`, ToColor consumes it.
    pub fn apply(&self, img: &ImageBuffer, saved: &mut Option<ChromaPlanes>) -> Result<ImageBuffer> {
        use FilterKind::*;
        match self.kind {
            ToGray => {
                let (luma, chroma) = to_gray(img)?;
                *saved = Some(chroma);
                Ok(luma)
            }
            ToColor => {
                let chroma = saved
                    .take()
                    .ok_or_else(|| Error::invalid("ToColor without a saved chroma"))?;
                let chroma = if chroma.dimensions() == img.dimensions() {
                    chroma
                } else {
                    chroma.resized(img.width(), img.height())
                };
                to_color(img, &chroma)
            }
            Posterize => posterize(img, self.get_u32("levels")),
            LumaPosterize => luma_posterize(img, self.get_u32("levels")),
            Brightness => brightness(img, self.get("factor")),
            SoftThreshold => soft_threshold(img, self.get("phi"), self.get("epsilon")),
            Saturation => saturate(img, self.get("saturation")),
            Hue => hue(
                img,
                self.get("angle"),
                [self.get("bias_r"), self.get("bias_g"), self.get("bias_b")],
            ),
            Colorize => colorize(img, self.get("hue"), self.get("saturation")),
            Gaussian => gaussian(img, self.get("sigma")),
            Etf => etf(img, self.get_u32("radius") as usize, self.get_u32("iterations")),
            Tvf => tvf(img, self.get_u32("iterations"), self.get("dt"), self.get("eps")),
            Sobel => Ok(sobel(img)),
            XDoG => xdog(img, self.get("sigma"), self.get("p")),
            Size => {
                let s = self.get("percent") / 100.0;
                let w = ((img.width() as f64 * s).round() as usize).max(1);
                let h = ((img.height() as f64 * s).round() as usize).max(1);
                resize(img, w, h)
            }
            PatternFill => pattern_fill(
                img,
                self.get_u32("levels"),
                self.get_u32("tile_scale") as usize,
            ),
            Halftone => {
                let mode = if self.get_u32("mode") == 1 {
                    HalftoneMode::Cmyk
                } else {
                    HalftoneMode::Gray
                };
                halftone(img, self.get_u32("cell") as usize, mode)
            }
            DetailControl => detail_control(img, self.get("delta")),
            LinearEqualize => linear_equalize(img, self.get("low"), self.get("high")),
            MinDynamicRange => min_dynamic_range(img, self.get("range")),
        }
    }
}

fn check_value(kind: FilterKind, schema: &ParamSchema, value: f64) -> Result<()> {
    if !value.is_finite() || value < schema.min || value > schema.max {
        return Err(Error::invalid(format!(
            "{kind}.{} = {value} is outside [{}, {}]",
            schema.name, schema.min, schema.max
        )));
    }
    if schema.integer && value.fract() != 0.0 {
        return Err(Error::invalid(format!(
            "{kind}.{} must be an integer, got {value}",
            schema.name
        )));
    }
    Ok(())
}
