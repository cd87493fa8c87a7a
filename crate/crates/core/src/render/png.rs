use std::io::Write;

use flate2::write::ZlibEncoder;
use flate2::Compression;

use crate::viz::PixelGrid;

use super::RenderError;

pub const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// Encode a grid as an 8-bit RGB, non-interlaced PNG.
///
/// Every scanline uses filter type 0, so identical grids always produce
/// identical bytes.
pub fn render_spectrogram_png(grid: &PixelGrid) -> Result<Vec<u8>, RenderError> {
    encode_png(grid)
}

pub fn encode_png(grid: &PixelGrid) -> Result<Vec<u8>, RenderError> {
    let (w, h) = (grid.width, grid.height);
    if w == 0 || h == 0 || w > u32::MAX as usize || h > u32::MAX as usize {
        return Err(RenderError::InvalidDimensions {
            width: w,
            height: h,
        });
    }
    if grid.pixels.len() != w * h {
        return Err(RenderError::InvalidDimensions {
            width: w,
            height: h,
        });
    }

    let mut ihdr = Vec::with_capacity(13);
    ihdr.extend_from_slice(&(w as u32).to_be_bytes());
    ihdr.extend_from_slice(&(h as u32).to_be_bytes());
    // depth 8, color type 2 (RGB), deflate, adaptive filtering, no interlace
    ihdr.extend_from_slice(&[8, 2, 0, 0, 0]);

    let mut z = ZlibEncoder::new(Vec::new(), Compression::default());
    let mut line = Vec::with_capacity(1 + w * 3);
    for row in grid.pixels.chunks_exact(w) {
        line.clear();
        line.push(0);
        line.extend(row.iter().flatten());
        z.write_all(&line)?;
    }
    let idat = z.finish()?;

    let mut out = Vec::with_capacity(idat.len() + 64);
    out.extend_from_slice(&PNG_SIGNATURE);
    chunk(&mut out, b"IHDR", &ihdr);
    chunk(&mut out, b"IDAT", &idat);
    chunk(&mut out, b"IEND", &[]);
    Ok(out)
}

fn chunk(out: &mut Vec<u8>, kind: &[u8; 4], data: &[u8]) {
    out.extend_from_slice(&(data.len() as u32).to_be_bytes());
    out.extend_from_slice(kind);
    out.extend_from_slice(data);
    let mut crc = crc32fast::Hasher::new();
    crc.update(kind);
    crc.update(data);
    out.extend_from_slice(&crc.finalize().to_be_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_with_signature() {
        let png = encode_png(&PixelGrid::filled(3, 2, [1, 2, 3])).unwrap();
        assert_eq!(&png[..8], &PNG_SIGNATURE);
        assert_eq!(&png[12..16], b"IHDR");
        assert_eq!(&png[png.len() - 8..png.len() - 4], b"IEND");
    }

    #[test]
    fn iend_crc_is_the_well_known_constant() {
        let png = encode_png(&PixelGrid::filled(1, 1, [0, 0, 0])).unwrap();
        assert_eq!(&png[png.len() - 4..], &[0xAE, 0x42, 0x60, 0x82]);
    }

    #[test]
    fn rejects_inconsistent_grid() {
        let g = PixelGrid {
            width: 2,
            height: 2,
            pixels: vec![[0; 3]; 3],
        };
        assert!(encode_png(&g).is_err());
    }
}
