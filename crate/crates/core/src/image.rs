//! Grayscale rasters and their intensity histograms.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// An intensity level. PGM allows at most 16-bit samples.
pub type Level = u16;

/// Upper bound on pixel count. Keeps `n * ss` and `s * s` inside `u128`.
pub const MAX_PIXELS: u64 = 1 << 40;

/// Row-major single-channel image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<Level>,
}

impl Image {
    pub fn new(width: usize, height: usize, maxval: u16, pixels: Vec<Level>) -> Result<Self, Error> {
        if width == 0 || height == 0 || maxval == 0 {
            return Err(Error::ZeroDimension);
        }
        let expected = width.checked_mul(height).ok_or(Error::ZeroDimension)?;
        if pixels.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: pixels.len() });
        }
        if expected as u64 > MAX_PIXELS {
            return Err(Error::TooManyPixels(expected as u64));
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &p)| p > maxval) {
            return Err(Error::PixelOutOfRange { index, value: value as u32, maxval });
        }
        Ok(Image { width, height, maxval, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[Level] {
        &self.pixels
    }

    pub fn n_pixels(&self) -> u64 {
        self.pixels.len() as u64
    }

    pub fn histogram(&self) -> Histogram {
        let mut counts = vec![0u64; self.maxval as usize + 1];
        for &p in &self.pixels {
            counts[p as usize] += 1;
        }
        Histogram { maxval: self.maxval, total: self.pixels.len() as u64, counts }
    }

    /// Every pixel repeated `m` times along each row (`m * width` columns).
    pub fn duplicated(&self, m: usize) -> Image {
        let mut pixels = Vec::with_capacity(self.pixels.len() * m);
        for &p in &self.pixels {
            pixels.extend(core::iter::repeat(p).take(m));
        }
        Image { width: self.width * m, height: self.height, maxval: self.maxval, pixels }
    }

    /// Photographic negative: `maxval - p`.
    pub fn negated(&self) -> Image {
        let pixels = self.pixels.iter().map(|&p| self.maxval - p).collect();
        Image { pixels, ..self.clone() }
    }
}

/// Per-level pixel counts over `0..=maxval`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    maxval: u16,
    total: u64,
    counts: Vec<u64>,
}

impl Histogram {
    /// `counts[v]` is the number of pixels at level `v`; missing tail levels count zero.
    pub fn from_counts(maxval: u16, mut counts: Vec<u64>) -> Result<Self, Error> {
        if maxval == 0 {
            return Err(Error::ZeroDimension);
        }
        if counts.len() > maxval as usize + 1 {
            return Err(Error::CountsOutOfRange { len: counts.len(), maxval });
        }
        counts.resize(maxval as usize + 1, 0);
        let mut total: u64 = 0;
        for &c in &counts {
            total = total.checked_add(c).ok_or(Error::TooManyPixels(u64::MAX))?;
        }
        if total == 0 {
            return Err(Error::EmptyHistogram);
        }
        if total > MAX_PIXELS {
            return Err(Error::TooManyPixels(total));
        }
        Ok(Histogram { maxval, total, counts })
    }

    /// Builds from `(level, count)` pairs; repeated levels accumulate.
    pub fn from_pairs(maxval: u16, pairs: &[(Level, u64)]) -> Result<Self, Error> {
        let mut counts = vec![0u64; maxval as usize + 1];
        for &(level, count) in pairs {
            if level > maxval {
                return Err(Error::PixelOutOfRange { index: 0, value: level as u32, maxval });
            }
            counts[level as usize] += count;
        }
        Histogram::from_counts(maxval, counts)
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    /// Pixel count N.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, level: Level) -> u64 {
        self.counts.get(level as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Occupied levels with their counts, ascending.
    pub fn occupied(&self) -> impl Iterator<Item = (Level, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (v as Level, c))
    }

    pub fn occupied_levels(&self) -> Vec<Level> {
        self.occupied().map(|(v, _)| v).collect()
    }

    /// Number of occupied levels g.
    pub fn occupied_count(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Histogram of the image with every pixel duplicated `m` times.
    pub fn scaled(&self, m: u64) -> Result<Histogram, Error> {
        let counts = self.counts.iter().map(|&c| c * m).collect();
        Histogram::from_counts(self.maxval, counts)
    }

    /// Histogram of the negative image.
    pub fn negated(&self) -> Histogram {
        let mut counts = self.counts.clone();
        counts.reverse();
        Histogram { counts, ..self.clone() }
    }

    /// Moves each occupied level through `f`, which must be strictly increasing
    /// and stay within `new_maxval`.
    pub fn relabeled<F: Fn(Level) -> Level>(&self, new_maxval: u16, f: F) -> Result<Histogram, Error> {
        let pairs: Vec<(Level, u64)> = self.occupied().map(|(v, c)| (f(v), c)).collect();
        Histogram::from_pairs(new_maxval, &pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_levels() {
        let img = Image::new(2, 2, 3, vec![0, 0, 1, 3]).unwrap();
        let h = img.histogram();
        assert_eq!(h.total(), 4);
        assert_eq!(h.occupied().collect::<Vec<_>>(), vec![(0, 2), (1, 1), (3, 1)]);
        assert_eq!(h.occupied_count(), 3);
    }

    #[test]
    fn constant_image_has_one_level() {
        let img = Image::new(5, 2, 255, vec![7; 10]).unwrap();
        let h = img.histogram();
        assert_eq!(h.occupied().collect::<Vec<_>>(), vec![(7, 10)]);
    }

    #[test]
    fn distinct_levels() {
        let h = Image::new(4, 1, 3, vec![0, 1, 2, 3]).unwrap().histogram();
        assert_eq!(h.counts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn rejects_bad_images() {
        assert_eq!(
            Image::new(2, 2, 3, vec![0, 1, 2]),
            Err(Error::DimensionMismatch { expected: 4, actual: 3 })
        );
        assert!(matches!(Image::new(1, 1, 3, vec![4]), Err(Error::PixelOutOfRange { .. })));
        assert_eq!(Image::new(0, 1, 3, vec![]), Err(Error::ZeroDimension));
    }

    #[test]
    fn empty_histogram_rejected() {
        assert_eq!(Histogram::from_counts(3, vec![0, 0]), Err(Error::EmptyHistogram));
    }

    #[test]
    fn negation_mirrors_counts() {
        let h = Histogram::from_pairs(3, &[(0, 2), (1, 1)]).unwrap();
        assert_eq!(h.negated().occupied().collect::<Vec<_>>(), vec![(2, 1), (3, 2)]);
    }
}
