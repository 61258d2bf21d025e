//! In-memory 8-bit images plus PPM (P6) and PNG codecs.
//!
//! Binary PPM is implemented directly (test fixtures use it to stay free of
//! codec variance); PNG goes through the `image` crate.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::geometry::ImageSize;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: {reason}")]
    Decode { path: String, reason: String },
    #[error("encode failed: {0}")]
    Encode(String),
    #[error("unsupported channel count {0} (need a three-channel image)")]
    UnsupportedChannels(u8),
    #[error("unrecognized image format for {0} (expected PPM P6 or PNG)")]
    UnknownFormat(String),
    #[error("unsupported output extension for {0} (use .ppm or .png)")]
    UnknownExtension(String),
}

/// Interleaved 8-bit image with 1, 3, or 4 channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl Image {
    /// Solid-color RGB image.
    pub fn filled_rgb(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            data.extend_from_slice(&rgb);
        }
        Self {
            width,
            height,
            channels: 3,
            data,
        }
    }

    pub fn from_raw(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Option<Self> {
        if width == 0
            || height == 0
            || !matches!(channels, 1 | 3 | 4)
            || data.len() != width as usize * height as usize * channels as usize
        {
            return None;
        }
        Some(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn size(&self) -> ImageSize {
        ImageSize::new(self.width, self.height).expect("image dimensions are nonzero")
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    /// RGB triple at (x, y). Panics out of bounds; requires 3 channels.
    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        assert_eq!(self.channels, 3, "rgb() needs a three-channel image");
        let i = self.offset(x, y);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_rgb(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        assert_eq!(self.channels, 3, "set_rgb() needs a three-channel image");
        let i = self.offset(x, y);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Load a PPM (P6) or PNG file, sniffing the format from its magic bytes.
    pub fn load(path: &Path) -> Result<Self, ImageIoError> {
        let bytes = fs::read(path)?;
        let name = path.display().to_string();
        if bytes.starts_with(b"P6") {
            Self::decode_ppm(&bytes).map_err(|reason| ImageIoError::Decode { path: name, reason })
        } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
            Self::decode_png(&bytes).map_err(|reason| ImageIoError::Decode { path: name, reason })
        } else {
            Err(ImageIoError::UnknownFormat(name))
        }
    }

    /// Save as PPM or PNG depending on the file extension.
    pub fn save(&self, path: &Path) -> Result<(), ImageIoError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        let bytes = match ext.as_deref() {
            Some("ppm") => self.encode_ppm()?,
            Some("png") => self.encode_png()?,
            _ => return Err(ImageIoError::UnknownExtension(path.display().to_string())),
        };
        fs::write(path, bytes)?;
        Ok(())
    }

    pub fn decode_ppm(bytes: &[u8]) -> Result<Self, String> {
        let mut pos = 0usize;
        let magic = read_token(bytes, &mut pos).ok_or("missing PPM magic")?;
        if magic != b"P6" {
            return Err(format!(
                "bad PPM magic {:?}",
                String::from_utf8_lossy(&magic)
            ));
        }
        let width: u32 = parse_token(bytes, &mut pos, "width")?;
        let height: u32 = parse_token(bytes, &mut pos, "height")?;
        let maxval: u32 = parse_token(bytes, &mut pos, "maxval")?;
        if width == 0 || height == 0 {
            return Err("zero image dimension".into());
        }
        if maxval != 255 {
            return Err(format!("unsupported maxval {maxval} (only 255)"));
        }
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err("missing raster separator".into());
        }
        pos += 1;
        let expected = width as usize * height as usize * 3;
        let raster = &bytes[pos..];
        if raster.len() < expected {
            return Err(format!(
                "raster truncated: expected {expected} bytes, found {}",
                raster.len()
            ));
        }
        Ok(Self {
            width,
            height,
            channels: 3,
            data: raster[..expected].to_vec(),
        })
    }

    pub fn encode_ppm(&self) -> Result<Vec<u8>, ImageIoError> {
        if self.channels != 3 {
            return Err(ImageIoError::UnsupportedChannels(self.channels));
        }
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        Ok(out)
    }

    fn decode_png(bytes: &[u8]) -> Result<Self, String> {
        let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
            .map_err(|e| e.to_string())?;
        let (width, height) = (decoded.width(), decoded.height());
        let (channels, data) = match decoded {
            image::DynamicImage::ImageLuma8(buf) => (1u8, buf.into_raw()),
            image::DynamicImage::ImageRgb8(buf) => (3u8, buf.into_raw()),
            image::DynamicImage::ImageRgba8(buf) => (4u8, buf.into_raw()),
            other => (3u8, other.to_rgb8().into_raw()),
        };
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, ImageIoError> {
        let mut out = std::io::Cursor::new(Vec::new());
        let color = match self.channels {
            1 => image::ExtendedColorType::L8,
            3 => image::ExtendedColorType::Rgb8,
            4 => image::ExtendedColorType::Rgba8,
            c => return Err(ImageIoError::UnsupportedChannels(c)),
        };
        image::write_buffer_with_format(
            &mut out,
            &self.data,
            self.width,
            self.height,
            color,
            image::ImageFormat::Png,
        )
        .map_err(|e| ImageIoError::Encode(e.to_string()))?;
        Ok(out.into_inner())
    }
}

/// Next whitespace-delimited token, skipping `#` comments.
fn read_token(bytes: &[u8], pos: &mut usize) -> Option<Vec<u8>> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(bytes[start..*pos].to_vec())
}

fn parse_token(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32, String> {
    let tok = read_token(bytes, pos).ok_or_else(|| format!("missing {what}"))?;
    std::str::from_utf8(&tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad {what}: {:?}", String::from_utf8_lossy(&tok)))
}
