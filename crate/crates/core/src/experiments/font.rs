use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridSpec};

// 5x7 glyphs, top row first, most significant of the low five bits on the left.
const GLYPHS: &[(char, [u8; 7])] = &[
    ('A', [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11]),
    ('B', [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E]),
    ('C', [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E]),
    ('D', [0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E]),
    ('E', [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F]),
    ('F', [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10]),
    ('G', [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F]),
    ('H', [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11]),
    ('I', [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E]),
    ('L', [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F]),
    ('M', [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11]),
    ('N', [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11]),
    ('O', [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E]),
    ('P', [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10]),
    ('R', [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11]),
    ('S', [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E]),
    ('T', [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04]),
    ('U', [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E]),
    ('V', [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04]),
    ('W', [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A]),
    ('X', [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11]),
    ('Y', [0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04]),
    (' ', [0; 7]),
];

fn glyph(c: char) -> Option<&'static [u8; 7]> {
    GLYPHS.iter().find(|(g, _)| *g == c.to_ascii_uppercase()).map(|(_, rows)| rows)
}

/// Renders `text` in a 5x7 bitmap font on a unit-spacing pixel grid: each
/// font pixel becomes a `scale x scale` block, glyphs are one font pixel
/// apart, and `margin` empty cells surround the text. Row 0 is the top line.
pub fn text_mask(text: &str, scale: usize, margin: usize) -> Result<BinaryMask> {
    if text.is_empty() || scale == 0 {
        return Err(Error::BadConfig("text must be non-empty and scale positive".into()));
    }
    let glyphs: Vec<&[u8; 7]> = text
        .chars()
        .map(|c| glyph(c).ok_or_else(|| Error::BadConfig(format!("no glyph for {c:?}"))))
        .collect::<Result<_>>()?;
    let n = glyphs.len();
    let rows = 7 * scale + 2 * margin;
    let cols = (6 * n - 1) * scale + 2 * margin;
    let mut mask = BinaryMask::empty(GridSpec::pixels(rows, cols)?);
    for (k, g) in glyphs.iter().enumerate() {
        for (gr, bits) in g.iter().enumerate() {
            for gc in 0..5 {
                if bits >> (4 - gc) & 1 == 0 {
                    continue;
                }
                for di in 0..scale {
                    for dj in 0..scale {
                        mask.set(margin + gr * scale + di, margin + (6 * k + gc) * scale + dj, true);
                    }
                }
            }
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_t_shape() {
        let m = text_mask("T", 1, 0).unwrap();
        assert_eq!((m.grid().rows, m.grid().cols), (7, 5));
        assert_eq!(m.count(), 5 + 6);
        assert!((0..5).all(|j| m.get(0, j)));
        assert!((1..7).all(|i| m.get(i, 2)));
    }

    #[test]
    fn scaling_and_margin() {
        let m = text_mask("ODF SETS", 3, 4).unwrap();
        assert_eq!(m.grid().rows, 21 + 8);
        assert_eq!(m.count() % 9, 0);
        assert!(text_mask("odf", 1, 0).is_ok());
        assert!(text_mask("Q?", 1, 0).is_err());
    }
}
