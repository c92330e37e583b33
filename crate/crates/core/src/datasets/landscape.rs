use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{EknnModel, PknnModel};
use crate::error::{Error, Result};
use crate::scoring::{evidential_score, probabilistic_score, ScoreParams};
use crate::uncertainty::UncertaintyKind;

/// Rectangle covered by a raster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite())
            && x_min < x_max
            && y_min < y_max;
        if !ok {
            return Err(Error::invalid(
                "bounds",
                "expected finite x_min < x_max and y_min < y_max",
            ));
        }
        Ok(Bounds {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Bounding box of the 2-D points, padded by `margin` times its size on each side.
    pub fn around<'a>(points: impl IntoIterator<Item = &'a [f64]>, margin: f64) -> Result<Self> {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in points {
            if p.len() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: p.len(),
                });
            }
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let dx = (x1 - x0).max(1e-9) * margin;
        let dy = (y1 - y0).max(1e-9) * margin;
        Bounds::new(x0 - dx, x1 + dx, y0 - dy, y1 + dy)
    }
}

/// The model evaluated on the grid.
#[derive(Clone, Copy, Debug)]
pub enum LandscapeModel<'a> {
    Evidential(&'a EknnModel),
    Probabilistic(&'a PknnModel),
}

/// A `resolution × resolution` grid of uncertainty values. Row 0 is the top
/// edge (`y = y_max`), column 0 the left edge (`x = x_min`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRaster {
    pub bounds: Bounds,
    pub resolution: usize,
    pub measure: UncertaintyKind,
    grid: Vec<f64>,
}

impl LandscapeRaster {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.grid[row * self.resolution + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.grid
    }

    pub fn x_at(&self, col: usize) -> f64 {
        grid_coord(self.bounds.x_min, self.bounds.x_max, col, self.resolution)
    }

    pub fn y_at(&self, row: usize) -> f64 {
        grid_coord(self.bounds.y_max, self.bounds.y_min, row, self.resolution)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.grid
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// One CSV line per grid row, top row first.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in self.grid.chunks(self.resolution) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// 16-bit binary PGM, values rescaled to `[0, 65535]` by the raster's own range.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (lo, hi) = self.min_max();
        let span = hi - lo;
        let mut out = format!("P5\n{} {}\n65535\n", self.resolution, self.resolution).into_bytes();
        for &v in &self.grid {
            let level = if span > 0.0 {
                ((v - lo) / span * 65535.0).round() as u16
            } else {
                0
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_csv_string().as_bytes())
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), &self.to_pgm())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let ctx = || path.display().to_string();
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(ctx(), e))
}

fn grid_coord(start: f64, end: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        end
    } else {
        start + (end - start) * i as f64 / (n - 1) as f64
    }
}

/// Evaluates `measure` at every node of a regular grid over `bounds`.
pub fn landscape(
    model: LandscapeModel<'_>,
    bounds: Bounds,
    resolution: usize,
    measure: UncertaintyKind,
    params: &ScoreParams,
) -> Result<LandscapeRaster> {
    if resolution < 2 {
        return Err(Error::invalid(
            "resolution",
            format!("need at least 2 grid nodes per side, got {resolution}"),
        ));
    }
    let grid = (0..resolution * resolution)
        .into_par_iter()
        .map(|cell| {
            let (row, col) = (cell / resolution, cell % resolution);
            let x = [
                grid_coord(bounds.x_min, bounds.x_max, col, resolution),
                grid_coord(bounds.y_max, bounds.y_min, row, resolution),
            ];
            match model {
                LandscapeModel::Evidential(m) => evidential_score(m, &x, measure, params),
                LandscapeModel::Probabilistic(m) => probabilistic_score(m, &x, measure),
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LandscapeRaster {
        bounds,
        resolution,
        measure,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{FocalSet, Frame, MassFunction};
    use crate::classifiers::{EknnParams, FeatureMatrix, GammaMode};

    fn symmetric_model() -> EknnModel {
        let f = Frame::indexed(2).unwrap();
        let labels = (0..2)
            .map(|c| MassFunction::categorical(f.clone(), FocalSet::singleton(c)).unwrap())
            .collect();
        let xs = FeatureMatrix::from_rows(&[[-1.0, 0.0], [1.0, 0.0]]).unwrap();
        EknnModel::fit(
            xs,
            labels,
            EknnParams {
                k: 2,
                alpha0: 0.95,
                gamma: GammaMode::Fixed(0.5),
            },
        )
        .unwrap()
    }

    #[test]
    fn grid_orientation() {
        let model = symmetric_model();
        let b = Bounds::new(-2.0, 2.0, -1.0, 3.0).unwrap();
        let r = landscape(
            LandscapeModel::Evidential(&model),
            b,
            5,
            UncertaintyKind::Klir,
            &ScoreParams::default(),
        )
        .unwrap();
        assert_eq!((r.x_at(0), r.x_at(4)), (-2.0, 2.0));
        assert_eq!((r.y_at(0), r.y_at(4)), (3.0, -1.0));
        assert_eq!(r.values().len(), 25);
    }

    #[test]
    fn pgm_layout() {
        let model = symmetric_model();
        let b = Bounds::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let r = landscape(
            LandscapeModel::Evidential(&model),
            b,
            3,
            UncertaintyKind::Discord,
            &ScoreParams::default(),
        )
        .unwrap();
        let pgm = r.to_pgm();
        let header = b"P5\n3 3\n65535\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(pgm.len(), header.len() + 18);
        assert_eq!(r.to_csv_string().lines().count(), 3);
    }

    #[test]
    fn rejects_tiny_resolution() {
        let model = symmetric_model();
        let b = Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(landscape(
            LandscapeModel::Evidential(&model),
            b,
            1,
            UncertaintyKind::Klir,
            &ScoreParams::default()
        )
        .is_err());
    }
}
