//! Batch entry points behind the `storyboard` binary.

pub mod commands;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use storyboard_core::imaging::io::{is_image_path, load};
use storyboard_core::pipeline::{bundled_styles, parse, validate, StylePipeline};
use storyboard_core::{Error as CoreError, ImageBuffer};

/// A failed command: message plus process exit code (1 I/O, 2 validation).
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io(_) | CoreError::Codec(_) => CliError::io(e.to_string()),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(format!("{}: {e}", path.display()))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn load_image(path: &Path) -> CliResult<ImageBuffer> {
    load(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// Image files directly inside `dir`, sorted by file name.
pub fn image_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && is_image_path(&path) {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::io(format!("no images in {}", dir.display())));
    }
    Ok(files)
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// A style from a JSON file, or a bundled style by name when no such file
/// exists. The style must pass validation.
pub fn load_style(arg: &str) -> CliResult<StylePipeline> {
    let path = Path::new(arg);
    let style = if path.exists() {
        parse(&read_text(path)?).map_err(|e| CliError::invalid(format!("{arg}: {e}")))?
    } else if let Some(s) = bundled_styles().into_iter().find(|s| s.name == arg) {
        s
    } else {
        return Err(CliError::io(format!("{arg}: no such file or bundled style")));
    };
    let errors = validate(&style);
    if !errors.is_empty() {
        let lines: Vec<String> = errors.iter().map(|e| format!("  {e}")).collect();
        return Err(CliError::invalid(format!("style `{}` is invalid:\n{}", style.name, lines.join("\n"))));
    }
    Ok(style)
}

/// Styles from files and directories of `.json` files; bundled styles when empty.
pub fn load_styles(args: &[PathBuf]) -> CliResult<Vec<StylePipeline>> {
    if args.is_empty() {
        return Ok(bundled_styles());
    }
    let mut out = Vec::new();
    for arg in args {
        let mut files = Vec::new();
        if arg.is_dir() {
            for entry in fs::read_dir(arg).map_err(io_err(arg))? {
                let p = entry.map_err(io_err(arg))?.path();
                if p.extension().and_then(|e| e.to_str()) == Some("json") {
                    files.push(p);
                }
            }
            files.sort();
        } else {
            files.push(arg.clone());
        }
        for f in files {
            out.push(load_style(&f.to_string_lossy())?);
        }
    }
    Ok(out)
}
