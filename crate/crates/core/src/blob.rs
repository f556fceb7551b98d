//! Content-addressed blob storage and the raster image type.
//!
//! Every screenshot the simulator produces is referenced as `sha256:<hex>`
//! over its serialized bytes. The on-disk layout is
//! `blobs/sha256/<first two hex chars>/<hex>`, so datasets can share
//! identical screens without duplication.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Reference to a content-addressed blob, e.g. `sha256:ab12...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlobRef(String);

impl BlobRef {
    pub fn for_bytes(bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        BlobRef(format!("sha256:{}", hex::encode(digest)))
    }

    /// Parse an existing reference string, checking the `sha256:<hex>` shape.
    pub fn parse(s: &str) -> Result<Self, BlobError> {
        let hex_part = s
            .strip_prefix("sha256:")
            .ok_or_else(|| BlobError::BadRef(s.to_string()))?;
        if hex_part.len() != 64 || !hex_part.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(BlobError::BadRef(s.to_string()));
        }
        Ok(BlobRef(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn hex(&self) -> &str {
        &self.0["sha256:".len()..]
    }
}

impl fmt::Display for BlobRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BlobError {
    #[error("malformed blob reference `{0}`, expected sha256:<64 hex chars>")]
    BadRef(String),
    #[error("blob {0} not found in store")]
    NotFound(BlobRef),
    #[error("blob store io error: {0}")]
    Io(#[from] io::Error),
}

/// Directory-backed content-addressed store.
#[derive(Debug, Clone)]
pub struct BlobStore {
    root: PathBuf,
}

impl BlobStore {
    /// Open (creating if needed) a store rooted at `root`; blobs live under
    /// `root/sha256/..`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, BlobError> {
        let root = root.into();
        fs::create_dir_all(root.join("sha256"))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_of(&self, r: &BlobRef) -> PathBuf {
        let hex = r.hex();
        self.root.join("sha256").join(&hex[..2]).join(hex)
    }

    /// Store bytes, returning their reference. Writing an already-present
    /// blob is a no-op.
    pub fn put(&self, bytes: &[u8]) -> Result<BlobRef, BlobError> {
        let r = BlobRef::for_bytes(bytes);
        let path = self.path_of(&r);
        if !path.exists() {
            fs::create_dir_all(path.parent().unwrap())?;
            // Write via temp file then rename so concurrent writers of the
            // same content cannot observe a partial blob.
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, &path)?;
        }
        Ok(r)
    }

    pub fn contains(&self, r: &BlobRef) -> bool {
        self.path_of(r).exists()
    }

    pub fn get(&self, r: &BlobRef) -> Result<Vec<u8>, BlobError> {
        let path = self.path_of(r);
        if !path.exists() {
            return Err(BlobError::NotFound(r.clone()));
        }
        Ok(fs::read(path)?)
    }
}

/// An RGB8 raster. Serialized as binary PPM (P6), which is deterministic
/// byte-for-byte and keeps the content addressing stable across platforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB triples, length = width * height * 3.
    pub rgb: Vec<u8>,
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        let mut rgb = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..(width * height) {
            rgb.extend_from_slice(&color);
        }
        Self { width, height, rgb }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, color: [u8; 3]) {
        if x >= self.width || y >= self.height {
            return;
        }
        let i = ((y * self.width + x) * 3) as usize;
        self.rgb[i..i + 3].copy_from_slice(&color);
    }

    /// Fill a rectangle, clipped to the image.
    pub fn fill_rect(&mut self, x0: i32, y0: i32, x1: i32, y1: i32, color: [u8; 3]) {
        let x0 = x0.max(0) as u32;
        let y0 = y0.max(0) as u32;
        let x1 = (x1.max(0) as u32).min(self.width);
        let y1 = (y1.max(0) as u32).min(self.height);
        for y in y0..y1 {
            let row = ((y * self.width + x0) * 3) as usize;
            for dx in 0..(x1.saturating_sub(x0)) {
                let i = row + (dx * 3) as usize;
                self.rgb[i..i + 3].copy_from_slice(&color);
            }
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let header = format!("P6\n{} {}\n255\n", self.width, self.height);
        let mut out = Vec::with_capacity(header.len() + self.rgb.len());
        out.extend_from_slice(header.as_bytes());
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Option<Self> {
        let mut fields = Vec::new();
        let mut pos = 0usize;
        // P6 header: magic, width, height, maxval, single whitespace, raster.
        while fields.len() < 4 && pos < bytes.len() {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?.to_string());
        }
        pos += 1; // the single whitespace after maxval
        if fields.len() != 4 || fields[0] != "P6" || fields[3] != "255" {
            return None;
        }
        let width: u32 = fields[1].parse().ok()?;
        let height: u32 = fields[2].parse().ok()?;
        let need = (width * height * 3) as usize;
        if bytes.len() < pos + need {
            return None;
        }
        Some(Self {
            width,
            height,
            rgb: bytes[pos..pos + need].to_vec(),
        })
    }

    pub fn blob_ref(&self) -> BlobRef {
        BlobRef::for_bytes(&self.to_ppm())
    }
}

/// Stable 64-bit content hash used for deterministic color derivation.
/// Not a security boundary; just the first 8 bytes of SHA-256.
pub fn stable_hash64(data: &str) -> u64 {
    let digest = Sha256::digest(data.as_bytes());
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let store = BlobStore::open(dir.path()).unwrap();
        let r = store.put(b"hello").unwrap();
        assert!(store.contains(&r));
        assert_eq!(store.get(&r).unwrap(), b"hello");
        // idempotent
        let r2 = store.put(b"hello").unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn ref_parse_rejects_garbage() {
        assert!(BlobRef::parse("sha256:zz").is_err());
        assert!(BlobRef::parse("md5:abcd").is_err());
        let good = BlobRef::for_bytes(b"x");
        assert!(BlobRef::parse(good.as_str()).is_ok());
    }

    #[test]
    fn ppm_roundtrip() {
        let mut img = RasterImage::filled(4, 3, [10, 20, 30]);
        img.set_pixel(2, 1, [1, 2, 3]);
        let back = RasterImage::from_ppm(&img.to_ppm()).unwrap();
        assert_eq!(img, back);
    }
}
