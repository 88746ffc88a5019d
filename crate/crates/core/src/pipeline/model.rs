//! Fitted models and their text archive.
//!
//! ```text
//! rotgrid-model 1
//! [config]          one JSON line
//! [standardization] `none`, or `mean …` and `std …` lines
//! [q]               `d k`, then d rows of k values
//! [surrogate]       `none`, or `poly n count` then `e₁ … e_n | c` lines
//! [grid]            sparse-grid text form
//! [end]
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::config::PipelineConfig;
use super::transform::{nrmse, transform_dataset, transform_point, Standardization};
use crate::anova::{MultiIndex, Polynomial};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rotation::StiefelPoint;
use crate::sparse_grid::{AdaptiveGrid, DesignMatrix};

/// `t ↦ f(C(Qᵀ s(t)))` with `s` the optional standardization.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    pub config: PipelineConfig,
    pub q: StiefelPoint,
    pub grid: AdaptiveGrid,
    pub surrogate: Option<Polynomial>,
    pub standardization: Option<Standardization>,
}

const MAGIC: &str = "rotgrid-model 1";

impl FittedModel {
    pub fn input_dim(&self) -> usize {
        self.q.d()
    }

    /// Maps raw inputs onto the grid's unit cube.
    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        match &self.standardization {
            Some(s) => transform_dataset(&s.apply(data)?, &self.q, self.config.clamp),
            None => transform_dataset(data, &self.q, self.config.clamp),
        }
    }

    pub fn predict(&self, t: &[f64]) -> Result<f64> {
        let z = match &self.standardization {
            Some(s) => {
                if t.len() != s.mean.len() {
                    return Err(Error::DimensionMismatch { expected: s.mean.len(), got: t.len() });
                }
                transform_point(&s.apply_point(t), &self.q, self.config.clamp)?
            }
            None => transform_point(t, &self.q, self.config.clamp)?,
        };
        self.grid.evaluate(&z)
    }

    pub fn predict_many(&self, data: &Dataset) -> Result<Vec<f64>> {
        let z = self.transform(data)?;
        predict_transformed(&self.grid, &z)
    }

    pub fn nrmse(&self, test: &Dataset) -> Result<f64> {
        nrmse(&self.predict_many(test)?, test.targets())
    }

    pub fn to_text(&self) -> Result<String> {
        let mut s = String::new();
        let fmt_row = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        writeln!(s, "{MAGIC}").unwrap();
        writeln!(s, "[config]\n{}", serde_json::to_string(&self.config)?).unwrap();
        writeln!(s, "[standardization]").unwrap();
        match &self.standardization {
            Some(st) => writeln!(s, "mean {}\nstd {}", fmt_row(&st.mean), fmt_row(&st.std)).unwrap(),
            None => writeln!(s, "none").unwrap(),
        }
        let m = self.q.matrix();
        writeln!(s, "[q]\n{} {}", m.nrows(), m.ncols()).unwrap();
        for r in 0..m.nrows() {
            let row: Vec<f64> = m.row(r).iter().copied().collect();
            writeln!(s, "{}", fmt_row(&row)).unwrap();
        }
        writeln!(s, "[surrogate]").unwrap();
        match &self.surrogate {
            Some(p) => {
                writeln!(s, "poly {} {}", p.n_vars(), p.len()).unwrap();
                for (alpha, c) in p.terms() {
                    let exps: Vec<String> = alpha.exponents().iter().map(u32::to_string).collect();
                    writeln!(s, "{} | {c:?}", exps.join(" ")).unwrap();
                }
            }
            None => writeln!(s, "none").unwrap(),
        }
        writeln!(s, "[grid]").unwrap();
        s.push_str(&self.grid.to_text());
        writeln!(s, "[end]").unwrap();
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let mut cur = Cursor { lines: &lines, pos: 0 };
        cur.expect(MAGIC)?;
        cur.expect("[config]")?;
        let (line, json) = cur.next()?;
        let config: PipelineConfig =
            serde_json::from_str(json).map_err(|e| Error::Parse { line, msg: e.to_string() })?;

        cur.expect("[standardization]")?;
        let (line, first) = cur.next()?;
        let standardization = if first.trim() == "none" {
            None
        } else {
            let mean = parse_floats(first.strip_prefix("mean").ok_or_else(|| perr(line, "expected `mean`"))?, line)?;
            let (line, second) = cur.next()?;
            let std = parse_floats(second.strip_prefix("std").ok_or_else(|| perr(line, "expected `std`"))?, line)?;
            Some(Standardization { mean, std })
        };

        cur.expect("[q]")?;
        let (line, shape) = cur.next()?;
        let dims: Vec<usize> = shape.split_whitespace().map(|v| v.parse().map_err(|_| perr(line, "bad shape"))).collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(perr(line, "expected `d k`"));
        }
        let (d, k) = (dims[0], dims[1]);
        let mut values = Vec::with_capacity(d * k);
        for _ in 0..d {
            let (line, row) = cur.next()?;
            let row = parse_floats(row, line)?;
            if row.len() != k {
                return Err(perr(line, "wrong row length"));
            }
            values.extend(row);
        }
        let q = StiefelPoint::new(DMatrix::from_row_slice(d, k, &values))
            .map_err(|e| perr(line, &e.to_string()))?;

        cur.expect("[surrogate]")?;
        let (line, head) = cur.next()?;
        let surrogate = if head.trim() == "none" {
            None
        } else {
            let f: Vec<&str> = head.split_whitespace().collect();
            if f.len() != 3 || f[0] != "poly" {
                return Err(perr(line, "expected `poly <n> <count>`"));
            }
            let n: usize = f[1].parse().map_err(|_| perr(line, "bad variable count"))?;
            let count: usize = f[2].parse().map_err(|_| perr(line, "bad term count"))?;
            let mut p = Polynomial::zero(n);
            for _ in 0..count {
                let (line, term) = cur.next()?;
                let (e, c) = term.split_once('|').ok_or_else(|| perr(line, "expected `exponents | coefficient`"))?;
                let exps: Vec<u32> =
                    e.split_whitespace().map(|v| v.parse().map_err(|_| perr(line, "bad exponent"))).collect::<Result<_>>()?;
                if exps.len() != n {
                    return Err(perr(line, "wrong exponent count"));
                }
                let c: f64 = c.trim().parse().map_err(|_| perr(line, "bad coefficient"))?;
                p.add_term(MultiIndex::new(exps), c);
            }
            Some(p)
        };

        cur.expect("[grid]")?;
        let start = cur.pos;
        let end = lines[start..]
            .iter()
            .position(|l| l.trim() == "[end]")
            .map(|i| start + i)
            .ok_or_else(|| perr(lines.len(), "missing [end]"))?;
        let grid = AdaptiveGrid::from_lines(lines[start..end].iter().copied(), start)?;
        if grid.dim() != k {
            return Err(perr(start + 1, "grid dimension does not match Q"));
        }
        Ok(Self { config, q, grid, surrogate, standardization })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Predictions for points already on the grid's unit cube.
pub(crate) fn predict_transformed(grid: &AdaptiveGrid, z: &Dataset) -> Result<Vec<f64>> {
    let design = DesignMatrix::assemble(grid, z)?;
    Ok(design.apply(&grid.coefficients()))
}

fn perr(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

fn parse_floats(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split_whitespace().map(|v| v.parse().map_err(|_| perr(line, &format!("`{v}` is not a number")))).collect()
}

struct Cursor<'a> {
    lines: &'a [&'a str],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Returns the 1-based line number with the line.
    fn next(&mut self) -> Result<(usize, &'a str)> {
        let line = self.lines.get(self.pos).ok_or_else(|| perr(self.pos + 1, "unexpected end of file"))?;
        self.pos += 1;
        Ok((self.pos, line))
    }

    fn expect(&mut self, tag: &str) -> Result<()> {
        let (line, text) = self.next()?;
        if text.trim() != tag {
            return Err(perr(line, &format!("expected `{tag}`")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse_grid::regular_grid;

    fn sample_model(standardize: bool) -> FittedModel {
        let mut grid = regular_grid(2, 3).unwrap();
        let beta: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.37).sin() / 7.0).collect();
        grid.set_coefficients(&beta);
        let q = StiefelPoint::random(4, 2, 5).unwrap();
        let surrogate = Polynomial::from_terms(4, [(vec![1, 0, 0, 2], -0.25), (vec![0, 0, 0, 0], 1.0 / 3.0)]).unwrap();
        let standardization =
            standardize.then(|| Standardization { mean: vec![0.1, -0.2, 0.0, 3.0], std: vec![1.0, 2.0, 0.5, 1.0 / 3.0] });
        FittedModel { config: PipelineConfig::default(), q, grid, surrogate: Some(surrogate), standardization }
    }

    #[test]
    fn archive_round_trip() {
        for standardize in [false, true] {
            let m = sample_model(standardize);
            let back = FittedModel::from_text(&m.to_text().unwrap()).unwrap();
            assert_eq!(back, m);
            let t = [0.3, -1.0, 0.7, 2.0];
            assert_eq!(back.predict(&t).unwrap(), m.predict(&t).unwrap());
        }
        let mut m = sample_model(false);
        m.surrogate = None;
        assert_eq!(FittedModel::from_text(&m.to_text().unwrap()).unwrap(), m);
    }

    #[test]
    fn predict_paths_agree() {
        let m = sample_model(true);
        let pts: Vec<f64> = (0..40).map(|i| (i as f64 * 0.91).sin() * 2.0).collect();
        let d = Dataset::new(4, pts, vec![1.0; 10]).unwrap();
        let many = m.predict_many(&d).unwrap();
        for (i, t) in d.points().enumerate() {
            assert!((many[i] - m.predict(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn truncated_archive_rejected() {
        let text = sample_model(false).to_text().unwrap();
        let cut: String = text.lines().take(12).collect::<Vec<_>>().join("\n");
        assert!(matches!(FittedModel::from_text(&cut), Err(Error::Parse { .. })));
        assert!(FittedModel::from_text("nonsense").is_err());
    }
}
