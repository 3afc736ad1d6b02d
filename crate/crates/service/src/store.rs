//! On-disk session store: one directory per session holding uploaded images,
//! saved styles and rendered storyboard pages.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use sha2::{Digest, Sha256};

use storyboard_core::imaging::io::{decode, encode_png};
use storyboard_core::pipeline::{parse, serialize, StylePipeline};
use storyboard_core::{ImageBuffer, Result as CoreResult};

pub const DEFAULT_SESSION: &str = "default";

/// Hex digest prefix used for image and page ids.
pub fn short_hash(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn is_token(s: &str, max: usize) -> bool {
    !s.is_empty() && s.len() <= max && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

pub fn valid_session_id(id: &str) -> bool {
    is_token(id, 64)
}

/// Style names double as file names.
pub fn valid_style_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= 100
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, ' ' | '-' | '_' | '.'))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    sessions: Mutex<HashMap<String, Arc<Session>>>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Self {
            root,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// The session with `id`, created on first use. `id` must pass [`valid_session_id`].
    pub fn session(&self, id: &str) -> io::Result<Arc<Session>> {
        assert!(valid_session_id(id), "session id must be validated by the caller");
        let mut map = self.sessions.lock().expect("session map poisoned");
        if let Some(s) = map.get(id) {
            return Ok(s.clone());
        }
        let s = Arc::new(Session::open(self.root.join("sessions").join(id))?);
        map.insert(id.to_string(), s.clone());
        Ok(s)
    }
}

#[derive(Debug)]
pub struct Session {
    dir: PathBuf,
    images: RwLock<HashMap<String, Arc<ImageBuffer>>>,
    /// Serializes style writes; guards the version counter file.
    style_writes: Mutex<()>,
}

impl Session {
    fn open(dir: PathBuf) -> io::Result<Self> {
        for sub in ["images", "styles", "pages"] {
            fs::create_dir_all(dir.join(sub))?;
        }
        Ok(Self {
            dir,
            images: RwLock::new(HashMap::new()),
            style_writes: Mutex::new(()),
        })
    }

    fn image_path(&self, id: &str) -> PathBuf {
        self.dir.join("images").join(format!("{id}.png"))
    }

    /// Decodes and stores an upload; the id is derived from its bytes, so
    /// uploading the same file twice yields the same id.
    pub fn put_image(&self, bytes: &[u8]) -> CoreResult<String> {
        let img = decode(bytes)?;
        let id = short_hash(&[bytes]);
        let path = self.image_path(&id);
        if !path.exists() {
            write_atomic(&path, &encode_png(&img)?)?;
        }
        self.images.write().expect("image cache poisoned").insert(id.clone(), Arc::new(img));
        Ok(id)
    }

    pub fn image(&self, id: &str) -> CoreResult<Option<Arc<ImageBuffer>>> {
        if !is_token(id, 64) {
            return Ok(None);
        }
        if let Some(img) = self.images.read().expect("image cache poisoned").get(id) {
            return Ok(Some(img.clone()));
        }
        let path = self.image_path(id);
        if !path.exists() {
            return Ok(None);
        }
        let img = Arc::new(storyboard_core::imaging::io::load(&path)?);
        self.images.write().expect("image cache poisoned").insert(id.to_string(), img.clone());
        Ok(Some(img))
    }

    fn version_path(&self) -> PathBuf {
        self.dir.join("styles.version")
    }

    pub fn style_version(&self) -> io::Result<u64> {
        match fs::read_to_string(self.version_path()) {
            Ok(s) => Ok(s.trim().parse().unwrap_or(0)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(0),
            Err(e) => Err(e),
        }
    }

    /// Saves (or replaces) a style and returns the new store version.
    pub fn save_style(&self, style: &StylePipeline) -> io::Result<u64> {
        let _guard = self.style_writes.lock().expect("style lock poisoned");
        let path = self.dir.join("styles").join(format!("{}.json", style.name));
        write_atomic(&path, serialize(style).as_bytes())?;
        let version = self.style_version()? + 1;
        write_atomic(&self.version_path(), version.to_string().as_bytes())?;
        Ok(version)
    }

    /// Saved styles by name. Files that no longer parse are skipped.
    pub fn styles(&self) -> io::Result<BTreeMap<String, StylePipeline>> {
        let mut out = BTreeMap::new();
        for entry in fs::read_dir(self.dir.join("styles"))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            match parse(&fs::read_to_string(&path)?) {
                Ok(style) => {
                    out.insert(style.name.clone(), style);
                }
                Err(e) => tracing::warn!(path = %path.display(), "skipping saved style: {e}"),
            }
        }
        Ok(out)
    }

    pub fn style(&self, name: &str) -> io::Result<Option<StylePipeline>> {
        if !valid_style_name(name) {
            return Ok(None);
        }
        let path = self.dir.join("styles").join(format!("{name}.json"));
        match fs::read_to_string(path) {
            Ok(text) => Ok(parse(&text).ok()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn page_path(&self, page_ref: &str) -> PathBuf {
        self.dir.join("pages").join(format!("{page_ref}.png"))
    }

    pub fn put_page(&self, page_ref: &str, png: &[u8]) -> io::Result<()> {
        write_atomic(&self.page_path(page_ref), png)
    }

    pub fn page(&self, page_ref: &str) -> io::Result<Option<Vec<u8>>> {
        if !is_token(page_ref, 64) {
            return Ok(None);
        }
        match fs::read(self.page_path(page_ref)) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }
}
