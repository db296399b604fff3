//! Data tables behind the standard plots.
//!
//! | Table | Columns |
//! |-------|---------|
//! | 1 | κ, ⟨I⟩ for ĉ = ẑ and for isotropic ĉ |
//! | 2 | κ, ⟨F⟩ and ⟨𝒢⟩ for both classes (parametric F–𝒢 curves) |
//! | 3 | κ, relative differences δ𝒢 and δF between the classes |
//! | 4 | λ, ⟨F⟩ and ⟨𝒢^U⟩ for pure states |
//! | 5 | (κ, b), ⟨F^opt⟩ and ⟨𝒢^U⟩ for the isotropic family with polarized B |
//! | 6 | (κ, b), ⟨F^U⟩ − ⟨F^opt⟩ for the same family |
//!
//! Grids of tables 5 and 6 keep only points where the state is positive.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::mutual_info::{avg_mi_classical, avg_mi_isotropic};
use crate::rsp::{
    avg_f_2iso0, avg_f_3iso, avg_gain_2iso0, avg_gain_3iso, average_over_relevant, isotropic_nonmmms, pure_state,
    BetaPolicy,
};
use crate::sphere::QuadratureSpec;
use crate::Error as CrateError;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Rectangular numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidInput(format!("row has {} values for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Comment lines (prefixed `# `), the header, then one line per row with
    /// 17 significant digits.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_sig17(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Resolution of the figure grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureGrid {
    /// Points along κ or λ for tables 1–4.
    pub points: usize,
    pub kappa_points: usize,
    pub b_points: usize,
}

impl Default for FigureGrid {
    fn default() -> Self {
        Self { points: 21, kappa_points: 20, b_points: 20 }
    }
}

impl FigureGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 || self.kappa_points < 1 || self.b_points < 1 {
            return Err(Error::InvalidInput("figure grids need ≥ 2 points (≥ 1 per 2-D axis)".into()));
        }
        Ok(())
    }

    /// κ values of tables 5 and 6: √3·i/K for i = 1..=K.
    pub fn kappas(&self) -> Vec<f64> {
        (1..=self.kappa_points).map(|i| SQRT3 * i as f64 / self.kappa_points as f64).collect()
    }

    /// b values of tables 5 and 6: j/B for j = 0..B.
    pub fn bs(&self) -> Vec<f64> {
        (0..self.b_points).map(|j| j as f64 / self.b_points as f64).collect()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn figure(id: u8, grid: &FigureGrid, quad: &QuadratureSpec) -> Result<Table> {
    grid.validate()?;
    match id {
        1 => figure1(grid),
        2 => figure2(grid),
        3 => figure3(grid),
        4 => figure4(grid, quad),
        5 => figure5(grid, quad),
        6 => figure6(grid, quad),
        _ => Err(Error::InvalidInput(format!("no figure {id}; choose 1–6"))),
    }
}

pub fn figure1(grid: &FigureGrid) -> Result<Table> {
    let mut t = Table::new(["kappa", "<I>_2iso0", "<I>_3iso"]);
    for k in linspace(0.0, 1.0, grid.points) {
        t.push(vec![k, avg_mi_classical(k)?, avg_mi_isotropic(k)?])?;
    }
    Ok(t)
}

pub fn figure2(grid: &FigureGrid) -> Result<Table> {
    let mut t = Table::new(["kappa", "<F>_3iso", "<G>_3iso", "<F>_2iso0", "<G>_2iso0"]);
    for k in linspace(0.0, 1.0, grid.points) {
        t.push(vec![k, avg_f_3iso(k)?, avg_gain_3iso(k)?, avg_f_2iso0(k)?, avg_gain_2iso0(k)?])?;
    }
    Ok(t)
}

/// δX = (X_2iso0 − X_3iso)/X_3iso. The last two columns normalize by the
/// single-axis value instead.
pub fn figure3(grid: &FigureGrid) -> Result<Table> {
    let mut t = Table::new(["kappa", "dG", "dF", "dG_over_2iso0", "dF_over_2iso0"]);
    for k in linspace(0.0, 1.0, grid.points + 1).into_iter().skip(1) {
        let (g3, g2) = (avg_gain_3iso(k)?, avg_gain_2iso0(k)?);
        let (f3, f2) = (avg_f_3iso(k)?, avg_f_2iso0(k)?);
        t.push(vec![k, (g2 - g3) / g3, (f2 - f3) / f3, (g2 - g3) / g2, (f2 - f3) / f2])?;
    }
    Ok(t)
}

pub fn figure4(grid: &FigureGrid, quad: &QuadratureSpec) -> Result<Table> {
    let mut t = Table::new(["lambda", "<F>", "<G^U>"]);
    for l in linspace(0.0, 1.0, grid.points) {
        let avg = average_over_relevant(&pure_state(l)?, &BetaPolicy::default(), quad)?;
        t.push(vec![l, avg.f_u, avg.gain])?;
    }
    Ok(t)
}

fn isotropic_grid<F>(grid: &FigureGrid, columns: &[&str], mut row: F) -> Result<Table>
where
    F: FnMut(f64, f64, &crate::TwoQubitState) -> Result<Vec<f64>>,
{
    let mut t = Table::new(columns.iter().copied());
    for &k in &grid.kappas() {
        for &b in &grid.bs() {
            let state = match isotropic_nonmmms(k, b) {
                Ok(s) => s,
                Err(CrateError::NonPhysical { .. }) => continue,
                Err(e) => return Err(e),
            };
            t.push(row(k, b, &state)?)?;
        }
    }
    Ok(t)
}

pub fn figure5(grid: &FigureGrid, quad: &QuadratureSpec) -> Result<Table> {
    isotropic_grid(grid, &["kappa", "b", "<F^opt>", "<G^U>"], |k, b, s| {
        let avg = average_over_relevant(s, &BetaPolicy::default(), quad)?;
        Ok(vec![k, b, avg.f_opt, avg.gain])
    })
}

pub fn figure6(grid: &FigureGrid, quad: &QuadratureSpec) -> Result<Table> {
    isotropic_grid(grid, &["kappa", "b", "Delta<F>"], |k, b, s| {
        let avg = average_over_relevant(s, &BetaPolicy::default(), quad)?;
        Ok(vec![k, b, avg.delta_f])
    })
}
