//! Image segmentation as max-3-cut over a sampled pixel graph.

use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{PartitionAssignment, WeightedGraph};
use crate::solve::{solve, Solution, SolveOptions, Solver};

/// Lower bound on the patch standard deviation used as `sigma`.
pub const SIGMA_FLOOR: f64 = 1e-3;

/// Largest log-weight kept unscaled; beyond it the graph is rescaled.
const LOG_WEIGHT_CAP: f64 = 700.0;

/// RGB image with channel values in `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<[f64; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                got: data.len(),
            });
        }
        if data.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("pixel values must lie in [0, 1]".into()));
        }
        Ok(Image { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [f64; 3]) -> Result<Self> {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        self.data[y * self.width + x] = rgb;
    }

    /// Same image with the color layers reordered: output layer `c` is input layer `perm[c]`.
    pub fn permute_layers(&self, perm: [usize; 3]) -> Self {
        let data = self.data.iter().map(|p| [p[perm[0]], p[perm[1]], p[perm[2]]]).collect();
        Image {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn read_ppm(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::parse_ppm(&bytes).map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::parse(path, msg),
            other => other,
        })
    }

    /// Parses P3 (ASCII) or P6 (binary) PPM.
    pub fn parse_ppm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("ppm: {m}"));
        let mut pos = 0;
        let mut header = Vec::new();
        while header.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            header.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ASCII"))?);
        }
        let magic = header[0];
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
        let (width, height, maxval) = (num(header[1])?, num(header[2])?, num(header[3])?);
        if maxval == 0 || maxval > 65535 {
            return Err(bad("maxval out of range"));
        }
        let count = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(3))
            .ok_or_else(|| bad("dimensions overflow"))?;
        let raw: Vec<usize> = match magic {
            "P3" => {
                let text = std::str::from_utf8(&bytes[pos..]).map_err(|_| bad("body is not ASCII"))?;
                let vals = text
                    .split_ascii_whitespace()
                    .take(count)
                    .map(num)
                    .collect::<Result<Vec<_>>>()?;
                vals
            }
            "P6" => {
                pos += 1; // single whitespace byte after maxval
                let body = bytes.get(pos..).unwrap_or(&[]);
                if maxval < 256 {
                    body.iter().take(count).map(|&b| b as usize).collect()
                } else {
                    body.chunks_exact(2)
                        .take(count)
                        .map(|c| u16::from_be_bytes([c[0], c[1]]) as usize)
                        .collect()
                }
            }
            _ => return Err(bad("expected P3 or P6")),
        };
        if raw.len() != count {
            return Err(bad("truncated pixel data"));
        }
        if raw.iter().any(|&v| v > maxval) {
            return Err(bad("sample exceeds maxval"));
        }
        let m = maxval as f64;
        let data = raw
            .chunks_exact(3)
            .map(|c| [c[0] as f64 / m, c[1] as f64 / m, c[2] as f64 / m])
            .collect();
        Self::new(width, height, data)
    }

    /// Binary P6, 8 bits per channel.
    pub fn to_ppm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for p in &self.data {
            out.extend(p.iter().map(|v| (v * 255.0).round() as u8));
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_ppm_bytes())?;
        Ok(())
    }
}

fn neighborhood(img: &Image, x: usize, y: usize) -> impl Iterator<Item = [f64; 3]> + '_ {
    let xs = x.saturating_sub(1)..=(x + 1).min(img.width - 1);
    let ys = y.saturating_sub(1)..=(y + 1).min(img.height - 1);
    ys.flat_map(move |yy| xs.clone().map(move |xx| img.get(xx, yy)))
}

/// Per-layer sums over each pixel's 3x3 patch (clipped at borders), divided
/// by the layer maximum.
pub fn patch_sums(img: &Image) -> Vec<[f64; 3]> {
    let mut sums: Vec<[f64; 3]> = (0..img.height)
        .flat_map(|y| (0..img.width).map(move |x| (x, y)))
        .map(|(x, y)| {
            neighborhood(img, x, y).fold([0.0; 3], |mut acc, p| {
                for c in 0..3 {
                    acc[c] += p[c];
                }
                acc
            })
        })
        .collect();
    for c in 0..3 {
        let max = sums.iter().map(|s| s[c]).fold(0.0, f64::max);
        if max > 0.0 {
            sums.iter_mut().for_each(|s| s[c] /= max);
        }
    }
    sums
}

/// Per-layer population standard deviation of each pixel's patch.
pub fn patch_stds(img: &Image) -> Vec<[f64; 3]> {
    (0..img.height)
        .flat_map(|y| (0..img.width).map(move |x| (x, y)))
        .map(|(x, y)| {
            let patch: Vec<[f64; 3]> = neighborhood(img, x, y).collect();
            let n = patch.len() as f64;
            let mut out = [0.0; 3];
            for c in 0..3 {
                let mean = patch.iter().map(|p| p[c]).sum::<f64>() / n;
                out[c] = (patch.iter().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / n).sqrt();
            }
            out
        })
        .collect()
}

/// Fraction of pixels sharing each pixel's color. With `levels`, each
/// channel is first quantized to that many levels.
pub fn color_weights(img: &Image, levels: Option<u32>) -> Result<Vec<f64>> {
    if levels == Some(0) {
        return Err(Error::InvalidArgument("quantization levels must be >= 1".into()));
    }
    let key = |p: &[f64; 3]| -> [u64; 3] {
        match levels {
            None => [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()],
            Some(l) => p.map(|v| ((v * l as f64).floor() as u64).min(l as u64 - 1)),
        }
    };
    let mut counts: HashMap<[u64; 3], usize> = HashMap::new();
    for p in &img.data {
        *counts.entry(key(p)).or_default() += 1;
    }
    let total = img.data.len() as f64;
    Ok(img.data.iter().map(|p| counts[&key(p)] as f64 / total).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSign {
    /// `exp(+x)`: weights >= 1, larger for more different pixels.
    Dissimilarity,
    /// `exp(-x)`: weights in `(0, 1]`.
    Similarity,
}

impl std::str::FromStr for WeightSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dissimilarity" => Ok(WeightSign::Dissimilarity),
            "similarity" => Ok(WeightSign::Similarity),
            other => Err(Error::InvalidArgument(format!("unknown weight sign {other:?}"))),
        }
    }
}

/// Everything the weight formulas read about one pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelFeatures {
    pub value: [f64; 3],
    pub patch: [f64; 3],
    pub std: [f64; 3],
    pub color_weight: f64,
}

pub fn pixel_features(img: &Image, levels: Option<u32>) -> Result<Vec<PixelFeatures>> {
    let patch = patch_sums(img);
    let std = patch_stds(img);
    let c = color_weights(img, levels)?;
    Ok((0..img.data.len())
        .map(|i| PixelFeatures {
            value: img.data[i],
            patch: patch[i],
            std: std[i],
            color_weight: c[i],
        })
        .collect())
}

/// The per-layer difference each method compares.
fn method_difference(method: u8, a: &PixelFeatures, b: &PixelFeatures, layer: usize) -> f64 {
    match method {
        1 => a.patch[layer] - b.patch[layer],
        2 => a.color_weight * a.patch[layer] - b.color_weight * b.patch[layer],
        3 => a.color_weight - b.color_weight,
        4 => a.value[layer] - b.value[layer],
        5 => a.value[layer] * a.color_weight - b.value[layer] * b.color_weight,
        _ => unreachable!("method validated"),
    }
}

/// `±|diff|^q / max(sigma, floor)`, the exponent of one layer's weight.
pub fn layer_exponent(diff: f64, q: f64, sigma: f64, sign: WeightSign) -> f64 {
    let e = diff.abs().powf(q) / sigma.max(SIGMA_FLOOR);
    match sign {
        WeightSign::Dissimilarity => e,
        WeightSign::Similarity => -e,
    }
}

fn check_method(method: u8) -> Result<()> {
    if (1..=5).contains(&method) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("method must be 1..=5, got {method}")))
    }
}

/// `ln W_ij`: log of the layer-averaged weight, computed without overflow.
fn log_weight(method: u8, a: &PixelFeatures, b: &PixelFeatures, q: f64, sign: WeightSign) -> f64 {
    let e: [f64; 3] = std::array::from_fn(|c| {
        let sigma = 0.5 * (a.std[c] + b.std[c]);
        layer_exponent(method_difference(method, a, b, c), q, sigma, sign)
    });
    let m = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + (e.iter().map(|x| (x - m).exp()).sum::<f64>() / 3.0).ln()
}

/// Weight between two pixels at the given positions; zero beyond `r`.
/// May overflow to infinity for extreme exponents.
pub fn edge_weight(
    a: &PixelFeatures,
    pa: (usize, usize),
    b: &PixelFeatures,
    pb: (usize, usize),
    params: &SegmentationParams,
) -> Result<f64> {
    check_method(params.method)?;
    if distance(pa, pb) > params.r {
        return Ok(0.0);
    }
    Ok(log_weight(params.method, a, b, params.q, params.sign).exp())
}

fn distance(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = a.0 as f64 - b.0 as f64;
    let dy = a.1 as f64 - b.1 as f64;
    dx.hypot(dy)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentationParams {
    /// Number of sampled pixels.
    pub m: usize,
    /// Connectivity radius in pixels.
    pub r: f64,
    pub q: f64,
    pub method: u8,
    pub sign: WeightSign,
    /// Per-channel color quantization for the color weights; `None` keeps exact colors.
    pub levels: Option<u32>,
    pub seed: u64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        SegmentationParams {
            m: 200,
            r: 400.0,
            q: 0.1,
            method: 1,
            sign: WeightSign::Dissimilarity,
            levels: None,
            seed: 0,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self, img: &Image) -> Result<()> {
        check_method(self.method)?;
        let pixels = img.width * img.height;
        if self.m == 0 || self.m > pixels {
            return Err(Error::InvalidArgument(format!(
                "m must be in 1..={pixels}, got {}",
                self.m
            )));
        }
        if !(self.r > 0.0) {
            return Err(Error::InvalidArgument(format!("r must be positive, got {}", self.r)));
        }
        if !(self.q > 0.0) {
            return Err(Error::InvalidArgument(format!("q must be positive, got {}", self.q)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PixelGraph {
    /// `(x, y)` of each vertex, in row-major pixel order.
    pub samples: Vec<(usize, usize)>,
    pub graph: WeightedGraph,
    /// Stored weights equal the true weights times `exp(-log_scale)`; zero
    /// unless the true weights would overflow.
    pub log_scale: f64,
}

/// Seeded sample of `m` distinct pixels and their pairwise weights.
pub fn build_pixel_graph(img: &Image, params: &SegmentationParams) -> Result<PixelGraph> {
    params.validate(img)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut idx = rand::seq::index::sample(&mut rng, img.width * img.height, params.m).into_vec();
    idx.sort_unstable();
    let samples: Vec<(usize, usize)> = idx.iter().map(|&i| (i % img.width, i / img.width)).collect();
    let feats = pixel_features(img, params.levels)?;
    let m = params.m;

    let logs: Vec<Vec<Option<f64>>> = (0..m)
        .into_par_iter()
        .map(|a| {
            (0..m)
                .map(|b| {
                    if a == b || distance(samples[a], samples[b]) > params.r {
                        None
                    } else {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        Some(log_weight(params.method, &feats[idx[lo]], &feats[idx[hi]], params.q, params.sign))
                    }
                })
                .collect()
        })
        .collect();
    let max_log = logs.iter().flatten().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_scale = if max_log > LOG_WEIGHT_CAP { max_log } else { 0.0 };
    let dense = logs
        .into_iter()
        .flatten()
        .map(|l| l.map_or(0.0, |l| (l - log_scale).exp()))
        .collect();
    Ok(PixelGraph {
        samples,
        graph: WeightedGraph::from_dense(m, dense)?,
        log_scale,
    })
}

/// Label colors for overlays: cyan, magenta, yellow, white.
pub const LABEL_COLORS: [[f64; 3]; 4] = [
    [0.0, 1.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 0.0],
    [1.0, 1.0, 1.0],
];

#[derive(Clone, Debug, PartialEq)]
pub struct Segmentation {
    pub pixel_graph: PixelGraph,
    pub labels: PartitionAssignment,
    /// Cut weight in stored (possibly rescaled) units.
    pub weight: f64,
    pub solution: Solution,
}

pub fn segment(
    img: &Image,
    params: &SegmentationParams,
    solver: Solver,
    opts: &SolveOptions,
) -> Result<Segmentation> {
    let pixel_graph = build_pixel_graph(img, params)?;
    if pixel_graph.graph.n() < 2 {
        let labels = PartitionAssignment::new(opts.k, vec![0; pixel_graph.graph.n()])?;
        return Ok(Segmentation {
            pixel_graph,
            labels: labels.clone(),
            weight: 0.0,
            solution: Solution {
                weight: 0.0,
                assignment: labels,
                boundary: None,
                runs: Vec::new(),
            },
        });
    }
    let solution = solve(&pixel_graph.graph, solver, opts)?;
    Ok(Segmentation {
        labels: solution.assignment.clone(),
        weight: solution.weight,
        pixel_graph,
        solution,
    })
}

/// Copy of the image with a label-colored square at each sample.
pub fn overlay(img: &Image, samples: &[(usize, usize)], labels: &PartitionAssignment) -> Image {
    let mut out = img.clone();
    let half = img.width.min(img.height) / 100;
    for (&(x, y), &l) in samples.iter().zip(labels.labels()) {
        let color = LABEL_COLORS[l as usize % LABEL_COLORS.len()];
        for yy in y.saturating_sub(half)..=(y + half).min(img.height - 1) {
            for xx in x.saturating_sub(half)..=(x + half).min(img.width - 1) {
                out.set(xx, yy, color);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: usize,
    pub y: usize,
    pub label: u8,
}

/// Contents of `labels.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelsFile {
    pub samples: Vec<LabeledSample>,
    pub method: u8,
    pub params: SegmentationParams,
}

impl LabelsFile {
    pub fn new(seg: &Segmentation, params: &SegmentationParams) -> Self {
        LabelsFile {
            samples: seg
                .pixel_graph
                .samples
                .iter()
                .zip(seg.labels.labels())
                .map(|(&(x, y), &label)| LabeledSample { x, y, label })
                .collect(),
            method: params.method,
            params: params.clone(),
        }
    }
}

/// `width x height` image of vertical color stripes.
pub fn stripes_image(width: usize, height: usize, stripes: &[(usize, [f64; 3])]) -> Result<Image> {
    let total: usize = stripes.iter().map(|s| s.0).sum();
    if total != width {
        return Err(Error::InvalidArgument(format!(
            "stripe widths sum to {total}, image width is {width}"
        )));
    }
    let mut col_color = Vec::with_capacity(width);
    for &(w, c) in stripes {
        col_color.extend(std::iter::repeat(c).take(w));
    }
    Image::from_fn(width, height, |x, _| col_color[x])
}

/// The 5x5 three-block test image: stripes of width 2, 2 and 1 whose colors
/// differ in every channel.
pub fn three_block_image() -> Image {
    stripes_image(
        5,
        5,
        &[
            (2, [0.9, 0.1, 0.1]),
            (2, [0.1, 0.8, 0.3]),
            (1, [0.5, 0.4, 0.9]),
        ],
    )
    .expect("widths sum to 5")
}
