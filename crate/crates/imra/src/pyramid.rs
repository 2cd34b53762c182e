//! Pyramid directories: `meta.json`, `c.imra` and one `d_<j>_<bits>.imra`
//! per detail channel.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use imra_core::filters::FilterBank;
use imra_core::grid::{GridFunction, IndexBox};
use imra_core::tensor::{detail_orientations, Orientation};
use imra_core::transform::{coarse_range, detail_range, LevelDetails, WaveletPyramid};

use crate::io::{read_grid, write_grid};
use crate::{ImraError, Result};

pub const META_FILE: &str = "meta.json";
pub const COARSE_FILE: &str = "c.imra";
pub const FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxMeta {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl From<&IndexBox> for BoxMeta {
    fn from(b: &IndexBox) -> Self {
        BoxMeta { lo: b.lo().to_vec(), hi: b.hi().to_vec() }
    }
}

impl BoxMeta {
    fn to_box(&self) -> Result<IndexBox> {
        IndexBox::new(self.lo.clone(), self.hi.clone()).map_err(|e| ImraError::Meta(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelMeta {
    pub orientation: String,
    pub file: String,
    #[serde(rename = "box")]
    pub bbox: BoxMeta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelMeta {
    pub level: i32,
    pub fine_box: BoxMeta,
    pub channels: Vec<ChannelMeta>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PyramidMeta {
    pub format: u32,
    pub dim: usize,
    pub bank: String,
    pub filters: String,
    pub j0: i32,
    #[serde(rename = "J")]
    pub finest: i32,
    pub coarse: ChannelMeta,
    pub levels: Vec<LevelMeta>,
}

pub fn detail_file(j: i32, s: Orientation) -> String {
    format!("d_{j}_{}.imra", s.bit_string())
}

pub fn pyramid_meta(pyr: &WaveletPyramid, bank: &FilterBank) -> Result<PyramidMeta> {
    let orients = detail_orientations(pyr.dim)?;
    let levels = pyr
        .levels
        .iter()
        .map(|l| LevelMeta {
            level: l.level,
            fine_box: (&l.fine_box).into(),
            channels: orients
                .iter()
                .zip(&l.channels)
                .map(|(s, g)| ChannelMeta { orientation: s.bit_string(), file: detail_file(l.level, *s), bbox: g.bbox().into() })
                .collect(),
        })
        .collect();
    Ok(PyramidMeta {
        format: FORMAT,
        dim: pyr.dim,
        bank: pyr.bank_id.clone(),
        filters: bank.to_text(),
        j0: pyr.j0,
        finest: pyr.finest_level(),
        coarse: ChannelMeta {
            orientation: Orientation::scaling(pyr.dim)?.bit_string(),
            file: COARSE_FILE.into(),
            bbox: pyr.coarse.bbox().into(),
        },
        levels,
    })
}

/// Writes the pyramid into `dir`, creating it if needed.
pub fn write_pyramid(dir: &Path, pyr: &WaveletPyramid, bank: &FilterBank) -> Result<()> {
    if bank.id() != pyr.bank_id {
        return Err(ImraError::Validation(format!("bank {} does not match pyramid bank {}", bank.id(), pyr.bank_id)));
    }
    fs::create_dir_all(dir).map_err(|e| ImraError::io(dir, e))?;
    let meta = pyramid_meta(pyr, bank)?;
    let mut text = serde_json::to_string_pretty(&meta).map_err(|e| ImraError::Meta(e.to_string()))?;
    text.push('\n');
    let mp = dir.join(META_FILE);
    fs::write(&mp, text).map_err(|e| ImraError::io(&mp, e))?;
    write_grid(&dir.join(COARSE_FILE), &pyr.coarse)?;
    for (l, lm) in pyr.levels.iter().zip(&meta.levels) {
        for (g, cm) in l.channels.iter().zip(&lm.channels) {
            write_grid(&dir.join(&cm.file), g)?;
        }
    }
    Ok(())
}

fn read_channel(dir: &Path, cm: &ChannelMeta, level: i32) -> Result<GridFunction> {
    if cm.file.contains(['/', '\\']) || cm.file.starts_with('.') {
        return Err(ImraError::Meta(format!("channel file name {:?} must be a plain file name", cm.file)));
    }
    let g = read_grid(&dir.join(&cm.file))?;
    if g.level() != level || g.bbox() != &cm.bbox.to_box()? {
        return Err(ImraError::Meta(format!("{} disagrees with meta.json (level or box)", cm.file)));
    }
    Ok(g)
}

fn channel_box(bank: &FilterBank, fine: &IndexBox, s: Orientation) -> Result<IndexBox> {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for l in 0..fine.dim() {
        let (a, b) = if s.bit(l) == 1 { detail_range(bank, fine.lo()[l], fine.hi()[l]) } else { coarse_range(fine.lo()[l], fine.hi()[l]) };
        lo.push(a);
        hi.push(b);
    }
    Ok(IndexBox::new(lo, hi)?)
}

/// Reads a pyramid directory and the filter bank recorded with it. Checks
/// that every box is the one `decompose` would produce.
pub fn read_pyramid(dir: &Path) -> Result<(WaveletPyramid, FilterBank)> {
    let mp = dir.join(META_FILE);
    let text = fs::read_to_string(&mp).map_err(|e| ImraError::io(&mp, e))?;
    let meta: PyramidMeta = serde_json::from_str(&text).map_err(|e| ImraError::Meta(e.to_string()))?;
    if meta.format != FORMAT {
        return Err(ImraError::Meta(format!("unsupported format {}", meta.format)));
    }
    let bank = FilterBank::from_text(&meta.filters).map_err(|e| ImraError::Meta(e.to_string()))?;
    if bank.id() != meta.bank {
        return Err(ImraError::Meta(format!("bank id {} but filters describe {}", meta.bank, bank.id())));
    }
    if meta.finest - meta.j0 != meta.levels.len() as i32 {
        return Err(ImraError::Meta("J - j0 differs from the number of levels".into()));
    }
    let orients = detail_orientations(meta.dim).map_err(|e| ImraError::Meta(e.to_string()))?;
    let coarse = read_channel(dir, &meta.coarse, meta.j0)?;
    if coarse.dim() != meta.dim {
        return Err(ImraError::Meta("coarse grid dimension differs from dim".into()));
    }
    let mut prev_box = coarse.bbox().clone();
    let mut levels = Vec::with_capacity(meta.levels.len());
    for (i, lm) in meta.levels.iter().enumerate() {
        let j = meta.j0 + i as i32;
        if lm.level != j || lm.channels.len() != orients.len() {
            return Err(ImraError::Meta(format!("level entry {i} is malformed")));
        }
        let fine_box = lm.fine_box.to_box()?;
        if fine_box.dim() != meta.dim || channel_box(&bank, &fine_box, Orientation::scaling(meta.dim)?)? != prev_box {
            return Err(ImraError::Meta(format!("level {j}: fine box does not refine the level-{j} box")));
        }
        let mut channels = Vec::with_capacity(orients.len());
        for (s, cm) in orients.iter().zip(&lm.channels) {
            if cm.orientation != s.bit_string() || cm.bbox.to_box()? != channel_box(&bank, &fine_box, *s)? {
                return Err(ImraError::Meta(format!("level {j}: channel {} has the wrong orientation or box", cm.orientation)));
            }
            channels.push(read_channel(dir, cm, j)?);
        }
        prev_box = fine_box.clone();
        levels.push(LevelDetails { level: j, fine_box, channels });
    }
    let pyr = WaveletPyramid { dim: meta.dim, bank_id: meta.bank, j0: meta.j0, coarse, levels };
    Ok((pyr, bank))
}
