//! Boundary data on a subset `Δ` of the real line: finite Hilbert transform, Loewner-type
//! forms, the Cayley-basis coefficient series and the dual construction.
//!
//! Functions on `Δ` are expanded in the hat basis of a uniform panel mesh on each interval.

use std::fmt;
use std::sync::Arc;

use crate::error::{KappaError, Result};
use crate::C64;

mod forms;
mod hilbert;
pub mod quadrature;

pub use forms::{
    basis_coefficients, boundary_form_halfplane, cauchy_transform, dual_construction_defect, dual_loewner_form,
    halfplane_assembly, loewner_form, loewner_real_form, series_order, HalfPlaneAssembly, HalfPlaneForm,
    LineForm, DEFAULT_SERIES_ORDER,
};
pub use hilbert::{convolution_residual, finite_hilbert, hilbert_of_fn, inner_product};

pub const DEFAULT_PANELS: usize = 64;

/// `Δ = ∪ [αᵢ, βᵢ]` with `P` equal panels per interval. Hat `p` sits on node `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
    panels: usize,
    nodes: Vec<f64>,
}

impl IntervalSet {
    pub fn new(intervals: &[(f64, f64)], panels: usize) -> Result<Self> {
        if intervals.is_empty() || panels == 0 {
            return Err(KappaError::InvalidInput("empty interval set".into()));
        }
        let mut iv = intervals.to_vec();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(a, b) in &iv {
            if !(a.is_finite() && b.is_finite()) || b <= a {
                return Err(KappaError::InvalidInput(format!("interval [{a}, {b}] has no length")));
            }
        }
        for w in iv.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(KappaError::InvalidInput("intervals overlap".into()));
            }
        }
        let mut nodes = Vec::with_capacity(iv.len() * (panels + 1));
        for &(a, b) in &iv {
            let h = (b - a) / panels as f64;
            nodes.extend((0..panels).map(|k| a + k as f64 * h));
            nodes.push(b);
        }
        Ok(Self { intervals: iv, panels, nodes })
    }

    pub fn interval(a: f64, b: f64, panels: usize) -> Result<Self> {
        Self::new(&[(a, b)], panels)
    }

    /// Same intervals with twice the panels.
    pub fn refined(&self) -> Self {
        Self::new(&self.intervals, 2 * self.panels).expect("refinement of a valid set")
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn panels_per_interval(&self) -> usize {
        self.panels
    }

    pub fn n_panels(&self) -> usize {
        self.intervals.len() * self.panels
    }

    /// Number of hat functions.
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    fn left_node(&self, g: usize) -> usize {
        g + g / self.panels
    }

    pub fn panel(&self, g: usize) -> (f64, f64) {
        let l = self.left_node(g);
        (self.nodes[l], self.nodes[l + 1])
    }

    /// The two hats that are nonzero on panel `g`.
    pub fn panel_hats(&self, g: usize) -> [usize; 2] {
        let l = self.left_node(g);
        [l, l + 1]
    }

    /// Whether panel `g` touches an endpoint of its interval.
    pub fn panel_at_edge(&self, g: usize) -> bool {
        let k = g % self.panels;
        k == 0 || k + 1 == self.panels
    }

    /// Panels on which hat `p` is nonzero.
    pub fn hat_support(&self, p: usize) -> Vec<usize> {
        let i = p / (self.panels + 1);
        let k = p % (self.panels + 1);
        let base = i * self.panels;
        let mut out = Vec::with_capacity(2);
        if k > 0 {
            out.push(base + k - 1);
        }
        if k < self.panels {
            out.push(base + k);
        }
        out
    }

    /// Hats at an endpoint of an interval (discontinuous after extension by zero).
    pub fn is_edge_hat(&self, p: usize) -> bool {
        let k = p % (self.panels + 1);
        k == 0 || k == self.panels
    }

    /// Linear piece of hat `p` on panel `g`, extended to all of `R`.
    pub fn hat_on_panel(&self, p: usize, g: usize, t: f64) -> f64 {
        let (a, b) = self.panel(g);
        let [l, r] = self.panel_hats(g);
        if p == l {
            (b - t) / (b - a)
        } else if p == r {
            (t - a) / (b - a)
        } else {
            0.0
        }
    }

    /// Panel containing `x`, if any (right-closed at the last panel of each interval).
    pub fn locate(&self, x: f64) -> Option<usize> {
        for (i, &(a, b)) in self.intervals.iter().enumerate() {
            if x >= a && x <= b {
                let h = (b - a) / self.panels as f64;
                let k = (((x - a) / h).floor() as usize).min(self.panels - 1);
                return Some(i * self.panels + k);
            }
        }
        None
    }

    pub fn hat(&self, p: usize, x: f64) -> f64 {
        self.hat_support(p)
            .into_iter()
            .find(|&g| {
                let (a, b) = self.panel(g);
                x >= a && x <= b
            })
            .map_or(0.0, |g| self.hat_on_panel(p, g, x))
    }

    /// Whether `x` is an endpoint of one of the intervals.
    pub fn is_endpoint(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| x == a || x == b)
    }

    /// Distance from `[a, b]` to the closure of the union of panels `gs`.
    pub(crate) fn distance_to_panels(&self, a: f64, b: f64, gs: &[usize]) -> f64 {
        gs.iter()
            .map(|&g| {
                let (c, d) = self.panel(g);
                (c - b).max(a - d).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Nodal values of `f`.
    pub fn sample<F: Fn(f64) -> C64>(&self, f: F) -> Vec<C64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// `Σ vₚ φₚ` in the hat basis of an interval set; zero off `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFunction {
    set: IntervalSet,
    values: Vec<C64>,
}

impl PiecewiseLinearFunction {
    pub fn new(set: IntervalSet, values: Vec<C64>) -> Result<Self> {
        if values.len() != set.dim() {
            return Err(KappaError::DimensionMismatch(format!("{} values for {} nodes", values.len(), set.dim())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KappaError::InvalidInput("non-finite nodal value".into()));
        }
        Ok(Self { set, values })
    }

    pub fn from_fn<F: Fn(f64) -> C64>(set: IntervalSet, f: F) -> Self {
        let values = set.sample(f);
        Self { set, values }
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Linear piece on panel `g`, extended.
    pub fn on_panel(&self, g: usize, t: f64) -> C64 {
        let [l, r] = self.set.panel_hats(g);
        self.values[l] * self.set.hat_on_panel(l, g, t) + self.values[r] * self.set.hat_on_panel(r, g, t)
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.set.locate(x).map_or(C64::new(0.0, 0.0), |g| self.on_panel(g, x))
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A function on `Δ`: either nodal samples (interpolated linearly) or a callable.
#[derive(Clone)]
pub enum LineFunction {
    Nodal(PiecewiseLinearFunction),
    Analytic(Arc<dyn Fn(f64) -> C64 + Send + Sync>),
}

impl fmt::Debug for LineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Nodal(p) => f.debug_tuple("Nodal").field(p).finish(),
            Self::Analytic(_) => f.write_str("Analytic(..)"),
        }
    }
}

impl LineFunction {
    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Self::Nodal(p) => p.eval(x),
            Self::Analytic(f) => f(x),
        }
    }
}

/// Boundary data `f₀` (or `b`, `c`, `g₀`) on `Δ`.
#[derive(Debug, Clone)]
pub struct BoundaryDataLine {
    func: LineFunction,
    real: bool,
    bound: f64,
}

impl BoundaryDataLine {
    pub fn from_samples(set: IntervalSet, values: Vec<C64>) -> Result<Self> {
        let p = PiecewiseLinearFunction::new(set, values)?;
        let real = p.values.iter().all(|v| v.im == 0.0);
        let bound = p.sup();
        Ok(Self { func: LineFunction::Nodal(p), real, bound })
    }

    pub fn from_real_samples(set: IntervalSet, values: &[f64]) -> Result<Self> {
        Self::from_samples(set, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// A callable, assumed analytic on each open panel. Realness and the bound are read off
    /// the nodes of `set`. An integrable singularity at an endpoint of `Δ` is allowed (the
    /// callable is never evaluated there); the bound is then infinite.
    pub fn from_fn<F>(set: &IntervalSet, f: F) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        let mut vals = Vec::with_capacity(set.dim());
        let mut bound: f64 = 0.0;
        for &x in set.nodes() {
            let v = f(x);
            if v.is_finite() {
                bound = bound.max(v.norm());
                vals.push(v);
            } else if set.is_endpoint(x) {
                bound = f64::INFINITY;
            } else {
                return Err(KappaError::InvalidInput(format!("data not finite at node {x}")));
            }
        }
        let real = vals.iter().all(|v| v.im.abs() <= 1e-14 * v.norm().max(1.0));
        Ok(Self { func: LineFunction::Analytic(Arc::new(f)), real, bound })
    }

    pub fn from_real_fn<F>(set: &IntervalSet, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_fn(set, move |x| C64::new(f(x), 0.0))
    }

    pub fn constant(v: C64) -> Self {
        Self { func: LineFunction::Analytic(Arc::new(move |_| v)), real: v.im == 0.0, bound: v.norm() }
    }

    pub fn function(&self) -> &LineFunction {
        &self.func
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.func.eval(x)
    }

    pub(crate) fn is_analytic(&self) -> bool {
        matches!(self.func, LineFunction::Analytic(_))
    }

    /// Piece on panel `g` of `set`, extended off the panel (linear for nodal data).
    pub(crate) fn on_panel(&self, set: &IntervalSet, g: usize, t: f64) -> C64 {
        match &self.func {
            LineFunction::Analytic(f) => f(t),
            LineFunction::Nodal(p) => {
                let (a, b) = set.panel(g);
                let fa = p.eval(a);
                let fb = p.eval(b);
                fa + (fb - fa) * ((t - a) / (b - a))
            }
        }
    }

    /// `d/dt` of the panel piece at `t`.
    pub(crate) fn slope_on_panel(&self, set: &IntervalSet, g: usize, t: f64) -> C64 {
        match &self.func {
            LineFunction::Nodal(p) => {
                let (a, b) = set.panel(g);
                (p.eval(b) - p.eval(a)) / (b - a)
            }
            LineFunction::Analytic(f) => {
                let d = 1e-5 * t.abs().max(1.0);
                (f(t + d) - f(t - d)) / (2.0 * d)
            }
        }
    }

    /// Whether panel `g` needs the endpoint-robust rule (callable data may be singular at `∂Δ`).
    pub(crate) fn rough_on(&self, set: &IntervalSet, g: usize) -> bool {
        self.is_analytic() && set.panel_at_edge(g)
    }
}
