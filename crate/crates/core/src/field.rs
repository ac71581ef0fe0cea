//! Non-negative functions sampled at the cell centers of a bounded box.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SantaloError};

/// Exact pointwise evaluator attached to a sampled field.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(SantaloError::invalid("box corners must have equal, positive length"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(SantaloError::invalid("box needs finite lo < hi on every axis"));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }
}

/// A non-negative function on a box, stored as one value per grid cell
/// (row-major, last axis fastest) and zero outside the box.
///
/// Fields built with [`ScalarField::from_fn`] also keep the generating
/// closure; [`ScalarField::value_at`] then evaluates exactly instead of
/// looking up the containing cell.
#[derive(Clone)]
pub struct ScalarField {
    bounds: BoxBounds,
    shape: Vec<usize>,
    values: Vec<f64>,
    exact: Option<Evaluator>,
}

/// The density of a measure given on a grid.
pub type GridDensity = ScalarField;

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.bounds == other.bounds && self.shape == other.shape && self.values == other.values
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("bounds", &self.bounds)
            .field("shape", &self.shape)
            .field("values", &format_args!("[{} values]", self.values.len()))
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(bounds: BoxBounds, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if shape.len() != bounds.dim() || shape.contains(&0) {
            return Err(SantaloError::invalid("shape must give a positive resolution per axis"));
        }
        let n: usize = shape.iter().product();
        if values.len() != n {
            return Err(SantaloError::invalid(format!(
                "expected {n} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(SantaloError::invalid("field values must be finite and non-negative"));
        }
        Ok(Self {
            bounds,
            shape,
            values,
            exact: None,
        })
    }

    /// Samples `f` at cell centers and keeps it for exact evaluation.
    pub fn from_fn<F>(bounds: BoxBounds, shape: Vec<usize>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let mut field = Self::new(bounds, shape.clone(), vec![0.0; shape.iter().product()])?;
        let mut x = vec![0.0; field.dim()];
        for i in 0..field.len() {
            field.cell_center_into(i, &mut x);
            let v = f(&x);
            if !(v.is_finite() && v >= 0.0) {
                return Err(SantaloError::invalid("function must be finite and non-negative"));
            }
            field.values[i] = v;
        }
        field.exact = Some(Arc::new(f));
        Ok(field)
    }

    pub fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Drops the attached closure, keeping only grid samples.
    pub fn sampled_only(mut self) -> Self {
        self.exact = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_widths(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| (self.bounds.hi[k] - self.bounds.lo[k]) / self.shape[k] as f64)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_widths().iter().product()
    }

    pub fn cell_center_into(&self, index: usize, out: &mut [f64]) {
        let mut rem = index;
        for k in (0..self.dim()).rev() {
            let i = rem % self.shape[k];
            rem /= self.shape[k];
            let w = (self.bounds.hi[k] - self.bounds.lo[k]) / self.shape[k] as f64;
            out[k] = self.bounds.lo[k] + (i as f64 + 0.5) * w;
        }
    }

    pub fn cell_center(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.cell_center_into(index, &mut out);
        out
    }

    /// Flat index of the cell containing `x` (upper faces belong to the last cell).
    pub fn cell_index(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() || !self.bounds.contains(x) {
            return None;
        }
        let mut idx = 0usize;
        for k in 0..self.dim() {
            let w = (self.bounds.hi[k] - self.bounds.lo[k]) / self.shape[k] as f64;
            let i = (((x[k] - self.bounds.lo[k]) / w).floor() as usize).min(self.shape[k] - 1);
            idx = idx * self.shape[k] + i;
        }
        Some(idx)
    }

    /// Value at an arbitrary point: the exact closure when present,
    /// otherwise the containing cell's sample; zero outside the box.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        if !self.bounds.contains(x) {
            return 0.0;
        }
        match &self.exact {
            Some(f) => f(x),
            None => self.cell_index(x).map_or(0.0, |i| self.values[i]),
        }
    }

    /// Midpoint-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Indices of cells with positive value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.values[i] > 0.0).collect()
    }

    /// `alpha * f` for `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let exact = self.exact.clone().map(|f| {
            let g: Evaluator = Arc::new(move |x: &[f64]| alpha * f(x));
            g
        });
        Self {
            bounds: self.bounds.clone(),
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
            exact,
        }
    }
}
