//! Foreground/background segmentation inside a bounding box.
//!
//! Pixels of the box become vertices of a 4-connected grid whose edge weights
//! decay with color difference. Two extra vertices act as the foreground and
//! background terminals: the box border is tied to the background, a central
//! rectangle to the foreground. Each round solves the two-terminal cut and
//! re-seeds from the resulting mask.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::{Duration, Instant};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat, ImageReader};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{min_st_cut, FlowNetwork};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::mep::{anneal, AnnealConfig};

pub const DEFAULT_SIGMA: f64 = 0.1;
/// Terminal links are this many times the heaviest neighbor edge.
pub const LINK_FACTOR: f64 = 10.0;
/// Unseeded band kept on each side of the current boundary when re-seeding.
pub const RESEED_MARGIN: usize = 2;

/// 8-bit RGB raster, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Image { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        Image {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        self.pixels[y * self.width + x] = c;
    }

    /// Reads a binary or ASCII PPM (PGM is promoted to gray RGB).
    pub fn read_pnm(path: &Path) -> Result<Self> {
        let reader = ImageReader::with_format(BufReader::new(File::open(path)?), ImageFormat::Pnm);
        let rgb = reader.decode()?.to_rgb8();
        let (w, h) = rgb.dimensions();
        let pixels = rgb.pixels().map(|p| p.0).collect();
        Image::new(w as usize, h as usize, pixels)
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        let flat: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        let enc = PnmEncoder::new(BufWriter::new(File::create(path)?))
            .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary));
        enc.write_image(&flat, self.width as u32, self.height as u32, ExtendedColorType::Rgb8)?;
        Ok(())
    }
}

/// Writes a binary mask as a PGM: 255 for foreground, 0 for background.
pub fn write_mask_pgm(mask: &[bool], width: usize, height: usize, path: &Path) -> Result<()> {
    if mask.len() != width * height {
        return Err(Error::Dimension(format!("mask has {} entries for {width}x{height}", mask.len())));
    }
    let data: Vec<u8> = mask.iter().map(|&m| if m { 255 } else { 0 }).collect();
    let enc = PnmEncoder::new(BufWriter::new(File::create(path)?))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary));
    enc.write_image(&data, width as u32, height as u32, ExtendedColorType::L8)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl BBox {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        BBox { x, y, width, height }
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    fn on_border(&self, bx: usize, by: usize) -> bool {
        bx == 0 || by == 0 || bx + 1 == self.width || by + 1 == self.height
    }
}

impl std::str::FromStr for BBox {
    type Err = Error;

    /// `x,y,w,h`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parameter(format!("bounding box `{s}`: {e}")))?;
        match nums[..] {
            [x, y, w, h] => Ok(BBox::new(x, y, w, h)),
            _ => Err(Error::Parameter(format!("bounding box `{s}` must be x,y,w,h"))),
        }
    }
}

/// Grid graph over the pixels of a bounding box plus two terminals.
///
/// Pixel `(bx, by)` of the box is vertex `by * width + bx`; the foreground
/// terminal follows the last pixel and the background terminal comes after
/// it. Label 0 is foreground.
#[derive(Clone, Debug)]
pub struct PixelGraph {
    pub image_width: usize,
    pub image_height: usize,
    pub bbox: BBox,
    pub sigma: f64,
    /// Neighbor edges only, between box pixels.
    pub neighbor_edges: Vec<Edge>,
    pub link_weight: f64,
    pub fg_seed: Vec<bool>,
    pub bg_seed: Vec<bool>,
    pub graph: Graph,
}

impl PixelGraph {
    pub fn n_pixels(&self) -> usize {
        self.bbox.area()
    }

    pub fn foreground(&self) -> usize {
        self.n_pixels()
    }

    pub fn background(&self) -> usize {
        self.n_pixels() + 1
    }

    /// Same neighbor edges with new terminal links.
    pub fn with_seeds(&self, fg_seed: Vec<bool>, bg_seed: Vec<bool>) -> Result<Self> {
        let graph = assemble(self.n_pixels(), &self.neighbor_edges, self.link_weight, &fg_seed, &bg_seed)?;
        Ok(PixelGraph {
            fg_seed,
            bg_seed,
            graph,
            ..self.clone()
        })
    }

    /// Total weight of neighbor edges whose endpoints disagree in `mask`.
    pub fn boundary_cut(&self, mask: &[bool]) -> f64 {
        self.neighbor_edges
            .iter()
            .filter(|e| mask[e.source] != mask[e.target])
            .map(|e| e.weight)
            .sum()
    }
}

fn assemble(n: usize, neighbors: &[Edge], link: f64, fg: &[bool], bg: &[bool]) -> Result<Graph> {
    if fg.len() != n || bg.len() != n {
        return Err(Error::Dimension(format!("seed masks must have {n} entries")));
    }
    if let Some(i) = (0..n).find(|&i| fg[i] && bg[i]) {
        return Err(Error::Parameter(format!("pixel {i} is seeded as both foreground and background")));
    }
    let (fg_node, bg_node) = (n, n + 1);
    let mut edges = neighbors.to_vec();
    for i in 0..n {
        if fg[i] {
            edges.push(Edge::new(fg_node, i, link));
        } else if bg[i] {
            edges.push(Edge::new(bg_node, i, link));
        }
    }
    Graph::new(n + 2, edges, vec![fg_node, bg_node])
}

/// `exp(-|c_l - c_m|^2 / (2 sigma^2))` with colors scaled to `[0, 1]`.
pub fn color_affinity(a: [u8; 3], b: [u8; 3], sigma: f64) -> f64 {
    let d2: f64 = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let d = (x as f64 - y as f64) / 255.0;
            d * d
        })
        .sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

pub fn build_pixel_graph(img: &Image, bbox: BBox, sigma: f64) -> Result<PixelGraph> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    if bbox.width < 3 || bbox.height < 3 {
        return Err(Error::Bounds(format!(
            "bounding box {}x{} is smaller than 3x3",
            bbox.width, bbox.height
        )));
    }
    if bbox.x + bbox.width > img.width || bbox.y + bbox.height > img.height {
        return Err(Error::Bounds(format!(
            "bounding box {},{},{},{} exceeds the {}x{} image",
            bbox.x, bbox.y, bbox.width, bbox.height, img.width, img.height
        )));
    }
    let (w, h) = (bbox.width, bbox.height);
    let color = |bx: usize, by: usize| img.get(bbox.x + bx, bbox.y + by);
    let mut neighbor_edges = Vec::with_capacity(2 * w * h);
    for by in 0..h {
        for bx in 0..w {
            let v = by * w + bx;
            if bx + 1 < w {
                neighbor_edges.push(Edge::new(v, v + 1, color_affinity(color(bx, by), color(bx + 1, by), sigma)));
            }
            if by + 1 < h {
                neighbor_edges.push(Edge::new(v, v + w, color_affinity(color(bx, by), color(bx, by + 1), sigma)));
            }
        }
    }
    let max_w = neighbor_edges.iter().map(|e| e.weight).fold(0.0, f64::max);
    let link_weight = LINK_FACTOR * if max_w > 0.0 { max_w } else { 1.0 };

    // central rectangle of half the width and half the height
    let (cw, ch) = ((w / 2).max(1), (h / 2).max(1));
    let (cx, cy) = ((w - cw) / 2, (h - ch) / 2);
    let mut fg_seed = vec![false; w * h];
    let mut bg_seed = vec![false; w * h];
    for by in 0..h {
        for bx in 0..w {
            let v = by * w + bx;
            if bbox.on_border(bx, by) {
                bg_seed[v] = true;
            } else if (cx..cx + cw).contains(&bx) && (cy..cy + ch).contains(&by) {
                fg_seed[v] = true;
            }
        }
    }
    let graph = assemble(w * h, &neighbor_edges, link_weight, &fg_seed, &bg_seed)?;
    Ok(PixelGraph {
        image_width: img.width,
        image_height: img.height,
        bbox,
        sigma,
        neighbor_edges,
        link_weight,
        fg_seed,
        bg_seed,
        graph,
    })
}

#[derive(Clone, Debug)]
pub enum SegmentSolver {
    Mep(AnnealConfig),
    MaxFlow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundStats {
    /// Neighbor-edge weight across the mask boundary.
    pub boundary_cut: f64,
    pub foreground_pixels: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Segmentation {
    /// Row-major over the bounding box; `true` is foreground.
    pub mask: Vec<bool>,
    pub rounds: Vec<RoundStats>,
    pub warnings: Vec<String>,
}

/// Solves the two-terminal cut, then `rounds - 1` times re-seeds from the
/// current mask (interior to foreground, exterior and box border to
/// background, leaving a band of [`RESEED_MARGIN`] pixels free on each side)
/// and solves again.
pub fn segment(pg: &PixelGraph, rounds: usize, solver: &SegmentSolver) -> Result<Segmentation> {
    if rounds < 1 {
        return Err(Error::Parameter("rounds must be at least 1".into()));
    }
    let mut current = pg.clone();
    let mut out = Segmentation {
        mask: Vec::new(),
        rounds: Vec::with_capacity(rounds),
        warnings: Vec::new(),
    };
    for round in 0..rounds {
        if round > 0 {
            let (fg, bg) = reseed(&out.mask, pg.bbox);
            current = current.with_seeds(fg, bg)?;
        }
        let start = Instant::now();
        let mask = solve_mask(&current, solver, &mut out.warnings)?;
        out.rounds.push(RoundStats {
            boundary_cut: pg.boundary_cut(&mask),
            foreground_pixels: mask.iter().filter(|&&m| m).count(),
            elapsed: start.elapsed(),
        });
        out.mask = mask;
    }
    Ok(out)
}

fn solve_mask(pg: &PixelGraph, solver: &SegmentSolver, warnings: &mut Vec<String>) -> Result<Vec<bool>> {
    let n = pg.n_pixels();
    match solver {
        SegmentSolver::Mep(cfg) => {
            let trace = anneal(&pg.graph, cfg)?;
            warnings.extend(trace.warnings);
            Ok(trace.partition.assignment[..n].iter().map(|&a| a == 0).collect())
        }
        SegmentSolver::MaxFlow => {
            let mut net = FlowNetwork::new(n + 2, pg.foreground(), pg.background())?;
            for e in pg.graph.edges() {
                net.add_edge(e.source, e.target, e.weight)?;
            }
            Ok(min_st_cut(&net).source_side[..n].to_vec())
        }
    }
}

/// Seeds that agree with `mask` away from its boundary.
fn reseed(mask: &[bool], bbox: BBox) -> (Vec<bool>, Vec<bool>) {
    let inverse: Vec<bool> = mask.iter().map(|m| !m).collect();
    let fg = erode(mask, bbox, RESEED_MARGIN, false);
    let mut bg = erode(&inverse, bbox, RESEED_MARGIN, true);
    for by in 0..bbox.height {
        for bx in 0..bbox.width {
            let v = by * bbox.width + bx;
            if bbox.on_border(bx, by) && !fg[v] {
                bg[v] = true;
            }
        }
    }
    (fg, bg)
}

/// 4-neighborhood erosion; `outside` is the value assumed beyond the box.
fn erode(mask: &[bool], bbox: BBox, times: usize, outside: bool) -> Vec<bool> {
    let (w, h) = (bbox.width, bbox.height);
    let mut cur = mask.to_vec();
    for _ in 0..times {
        let at = |x: isize, y: isize, m: &[bool]| {
            if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
                outside
            } else {
                m[y as usize * w + x as usize]
            }
        };
        let next = (0..w * h)
            .map(|v| {
                let (x, y) = ((v % w) as isize, (v / w) as isize);
                cur[v] && at(x - 1, y, &cur) && at(x + 1, y, &cur) && at(x, y - 1, &cur) && at(x, y + 1, &cur)
            })
            .collect();
        cur = next;
    }
    cur
}

/// A disk on a plain field with uniform per-channel noise, and its
/// ground-truth mask over the bounding box.
#[derive(Clone, Debug)]
pub struct DiskScene {
    pub image: Image,
    pub bbox: BBox,
    /// Row-major over the box; a pixel is inside when its center is.
    pub truth: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct DiskSceneConfig {
    pub width: usize,
    pub height: usize,
    pub bbox: BBox,
    pub radius: f64,
    pub disk_color: [u8; 3],
    pub field_color: [u8; 3],
    /// Each channel is shifted by a uniform integer in `-noise..=noise`.
    pub noise: u8,
    pub seed: u64,
}

impl Default for DiskSceneConfig {
    /// 200x200 image, 150x160 box, disk of radius 62 centered in the box.
    fn default() -> Self {
        DiskSceneConfig {
            width: 200,
            height: 200,
            bbox: BBox::new(25, 20, 150, 160),
            radius: 62.0,
            disk_color: [200, 60, 60],
            field_color: [40, 40, 120],
            noise: 12,
            seed: 7,
        }
    }
}

pub fn disk_scene(cfg: &DiskSceneConfig) -> Result<DiskScene> {
    let b = cfg.bbox;
    if b.x + b.width > cfg.width || b.y + b.height > cfg.height {
        return Err(Error::Bounds("bounding box exceeds the image".into()));
    }
    if !(cfg.radius > 0.0) {
        return Err(Error::Parameter(format!("radius must be positive, got {}", cfg.radius)));
    }
    let cx = b.x as f64 + b.width as f64 / 2.0;
    let cy = b.y as f64 + b.height as f64 / 2.0;
    let inside = |x: usize, y: usize| {
        let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
        dx * dx + dy * dy <= cfg.radius * cfg.radius
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = cfg.noise as i32;
    let mut image = Image::filled(cfg.width, cfg.height, cfg.field_color);
    for y in 0..cfg.height {
        for x in 0..cfg.width {
            let base = if inside(x, y) { cfg.disk_color } else { cfg.field_color };
            let c = base.map(|ch| (ch as i32 + rng.random_range(-noise..=noise)).clamp(0, 255) as u8);
            image.set(x, y, c);
        }
    }
    let truth = (0..b.area())
        .map(|v| inside(b.x + v % b.width, b.y + v / b.width))
        .collect();
    Ok(DiskScene { image, bbox: b, truth })
}

/// Fraction of box pixels where `mask` and `truth` disagree.
pub fn pixel_error(mask: &[bool], truth: &[bool]) -> f64 {
    let wrong = mask.iter().zip(truth).filter(|(a, b)| a != b).count();
    wrong as f64 / truth.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbox_parsing() {
        assert_eq!("1,2,30,40".parse::<BBox>().unwrap(), BBox::new(1, 2, 30, 40));
        assert!("1,2,3".parse::<BBox>().is_err());
        assert!("a,2,3,4".parse::<BBox>().is_err());
    }

    #[test]
    fn erosion_peels_one_layer_per_pass() {
        let bbox = BBox::new(0, 0, 5, 5);
        let full = vec![true; 25];
        let once = erode(&full, bbox, 1, false);
        assert_eq!(once.iter().filter(|&&m| m).count(), 9);
        let kept = erode(&full, bbox, 1, true);
        assert!(kept.iter().all(|&m| m));
    }
}
