//! Paul-trap amplitudes `β(τ) = β₀ + 2β₁ cos τ`: monodromy matrices, the
//! stability/squeezing raster and the `u₁₂ = 0`, `u₂₁ = 0` curves.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymplecticMatrix;
use crate::profile::{AmplitudeProfile, Domain};
use crate::propagate::{propagate, rk4_step, StepControl};
use crate::regime::Regime;

/// Bracket width at which curve bisection stops.
pub const ROOT_TOL: f64 = 1e-8;

/// Maximum off-diagonal magnitude accepted at a polished intersection.
pub const INTERSECTION_TOL: f64 = 1e-6;

/// Default operation interval `[π/2, 5π/2]`. On it `β` is not symmetric
/// about the midpoint, which would forbid squeezing.
pub const DEFAULT_INTERVAL: (f64, f64) = (PI / 2.0, 5.0 * PI / 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuParams {
    pub beta0: f64,
    pub beta1: f64,
}

impl MathieuParams {
    pub fn new(beta0: f64, beta1: f64) -> Self {
        Self { beta0, beta1 }
    }

    #[inline]
    pub fn beta(&self, tau: f64) -> f64 {
        self.beta0 + 2.0 * self.beta1 * tau.cos()
    }
}

/// `β(τ) = β₀ + 2β₁ cos τ`, `γ ≡ 1`, defined for all τ, period 2π.
pub fn mathieu_profile(params: MathieuParams) -> AmplitudeProfile {
    AmplitudeProfile::new(move |tau| params.beta(tau), Domain::ALL)
}

/// One-period matrix `u(τ₀ + 2π, τ₀)`.
pub fn monodromy(params: MathieuParams, tau0: f64, step: StepControl) -> Result<SymplecticMatrix> {
    propagate(&mathieu_profile(params), tau0, tau0 + 2.0 * PI, step)
}

/// Evolution matrix over an arbitrary operation interval.
pub fn operation_matrix(
    params: MathieuParams,
    interval: (f64, f64),
    step: StepControl,
) -> Result<SymplecticMatrix> {
    propagate(&mathieu_profile(params), interval.0, interval.1, step)
}

/// Rectangular parameter grid and the operation interval it is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub beta0_range: (f64, f64),
    pub beta1_range: (f64, f64),
    pub n0: usize,
    pub n1: usize,
    pub interval: (f64, f64),
}

impl ScanGrid {
    pub fn new(
        beta0_range: (f64, f64),
        beta1_range: (f64, f64),
        n0: usize,
        n1: usize,
        interval: (f64, f64),
    ) -> Result<Self> {
        let grid = Self {
            beta0_range,
            beta1_range,
            n0,
            n1,
            interval,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Region bracketing the four reference points of the second squeezing
    /// area: `β₀ ∈ [0.9, 2.0]`, `β₁ ∈ [0.5, 1.6]`, 221 × 221 nodes.
    pub fn default_region() -> Self {
        Self {
            beta0_range: (0.9, 2.0),
            beta1_range: (0.5, 1.6),
            n0: 221,
            n1: 221,
            interval: DEFAULT_INTERVAL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite();
        if !finite(self.beta0_range) || !finite(self.beta1_range) || !finite(self.interval) {
            return Err(Error::Argument("grid bounds must be finite".into()));
        }
        if self.beta0_range.0 >= self.beta0_range.1 || self.beta1_range.0 >= self.beta1_range.1 {
            return Err(Error::Argument("grid ranges need lo < hi".into()));
        }
        if self.n0 < 2 || self.n1 < 2 {
            return Err(Error::Argument("grid needs at least 2 nodes per axis".into()));
        }
        if self.interval.0 == self.interval.1 {
            return Err(Error::Argument("operation interval has zero length".into()));
        }
        Ok(())
    }

    pub fn beta0_at(&self, i: usize) -> f64 {
        lerp(self.beta0_range, i, self.n0)
    }

    pub fn beta1_at(&self, j: usize) -> f64 {
        lerp(self.beta1_range, j, self.n1)
    }

    pub fn beta1_spacing(&self) -> f64 {
        (self.beta1_range.1 - self.beta1_range.0) / (self.n1 - 1) as f64
    }

    pub fn beta0_spacing(&self) -> f64 {
        (self.beta0_range.1 - self.beta0_range.0) / (self.n0 - 1) as f64
    }
}

fn lerp(r: (f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        r.1
    } else {
        r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64
    }
}

/// `cos τ` tabulated on the RK4 half-step nodes of an operation interval, so
/// that every parameter point of a scan reuses the same trigonometry.
#[derive(Debug, Clone)]
pub struct CosineTable {
    cos: Vec<f64>,
    h: f64,
}

impl CosineTable {
    pub fn new(interval: (f64, f64), step: StepControl) -> Self {
        let span = interval.1 - interval.0;
        let n = step.steps_for(span);
        let h = span / n as f64;
        // Same node placement as the generic propagator: t_k and t_k + h/2.
        let cos = (0..=2 * n)
            .map(|j| {
                let k = j / 2;
                let t = interval.0 + k as f64 * h;
                if j % 2 == 0 {
                    t.cos()
                } else {
                    (t + 0.5 * h).cos()
                }
            })
            .collect();
        Self { cos, h }
    }

    pub fn steps(&self) -> usize {
        (self.cos.len() - 1) / 2
    }

    /// `u(τ₁, τ₀)` for the given parameters; `None` if it became non-finite.
    pub fn propagate(&self, params: MathieuParams) -> Option<SymplecticMatrix> {
        let (b0, b1) = (params.beta0, 2.0 * params.beta1);
        let mut u = SymplecticMatrix::IDENTITY;
        let mut start = b0 + b1 * self.cos[0];
        for pair in self.cos[1..].chunks_exact(2) {
            let mid = b0 + b1 * pair[0];
            let end = b0 + b1 * pair[1];
            u = rk4_step(&u, self.h, (1.0, start), (1.0, mid), (1.0, end));
            start = end;
        }
        u.is_finite().then_some(u)
    }
}

/// One raster node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell {
    pub params: MathieuParams,
    /// `None` when integration failed at this node.
    pub matrix: Option<SymplecticMatrix>,
}

impl ScanCell {
    pub fn trace(&self) -> f64 {
        self.matrix.map_or(f64::NAN, |m| m.trace())
    }

    pub fn regime(&self) -> Option<Regime> {
        self.matrix.map(|m| Regime::from_trace(m.trace()))
    }

    pub fn is_flagged(&self) -> bool {
        self.matrix.is_none()
    }
}

/// Raster of operation matrices over a [`ScanGrid`], β₀-major: cell
/// `(i, j)` is at index `i * n1 + j`.
#[derive(Debug, Clone)]
pub struct StruttMap {
    pub grid: ScanGrid,
    pub step: StepControl,
    pub cells: Vec<ScanCell>,
}

impl StruttMap {
    pub fn cell(&self, i: usize, j: usize) -> &ScanCell {
        &self.cells[i * self.grid.n1 + j]
    }

    pub fn flagged_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_flagged()).count()
    }

    pub fn count(&self, regime: Regime) -> usize {
        self.cells.iter().filter(|c| c.regime() == Some(regime)).count()
    }
}

/// Evaluates every grid node. Nodes are independent and evaluated in
/// parallel; the result is assembled in grid order.
pub fn strutt_map(grid: &ScanGrid, step: StepControl) -> Result<StruttMap> {
    grid.validate()?;
    let table = CosineTable::new(grid.interval, step);
    let cells = (0..grid.n0 * grid.n1)
        .into_par_iter()
        .map(|idx| {
            let params = MathieuParams::new(grid.beta0_at(idx / grid.n1), grid.beta1_at(idx % grid.n1));
            ScanCell {
                params,
                matrix: table.propagate(params),
            }
        })
        .collect();
    Ok(StruttMap {
        grid: *grid,
        step,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    U12Zero,
    U21Zero,
}

impl CurveKind {
    pub fn element(&self, u: &SymplecticMatrix) -> f64 {
        match self {
            CurveKind::U12Zero => u.u12,
            CurveKind::U21Zero => u.u21,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CurveKind::U12Zero => "u12",
            CurveKind::U21Zero => "u21",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub beta0: f64,
    pub beta1: f64,
    /// `u₁₁` at the root.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezeCurve {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

/// Traces the zero set of the chosen element by scanning constant-β₀ lines
/// for sign changes and bisecting in β₁ to [`ROOT_TOL`].
pub fn trace_curve(kind: CurveKind, grid: &ScanGrid, step: StepControl) -> Result<SqueezeCurve> {
    let map = strutt_map(grid, step)?;
    Ok(trace_curve_in(&map, kind))
}

/// As [`trace_curve`], reusing the node matrices of an existing raster.
pub fn trace_curve_in(map: &StruttMap, kind: CurveKind) -> SqueezeCurve {
    let grid = &map.grid;
    let table = CosineTable::new(grid.interval, map.step);
    let mut points: Vec<CurvePoint> = (0..grid.n0)
        .into_par_iter()
        .flat_map_iter(|i| {
            let beta0 = grid.beta0_at(i);
            let value = |j: usize| map.cell(i, j).matrix.map(|m| kind.element(&m));
            let mut line = Vec::new();
            for j in 0..grid.n1 - 1 {
                let (Some(fa), Some(fb)) = (value(j), value(j + 1)) else {
                    continue;
                };
                // a node zero counts only where the element changes sign across it
                if fa == 0.0 {
                    let crosses = j > 0 && value(j - 1).is_some_and(|fp| fp * fb < 0.0);
                    if crosses {
                        line.push(CurvePoint {
                            beta0,
                            beta1: grid.beta1_at(j),
                            lambda: map.cell(i, j).matrix.map_or(f64::NAN, |m| m.u11),
                        });
                    }
                    continue;
                }
                if fa * fb >= 0.0 {
                    continue;
                }
                if let Some(p) = bisect_line(&table, kind, beta0, (grid.beta1_at(j), grid.beta1_at(j + 1)), fa) {
                    line.push(p);
                }
            }
            line
        })
        .collect();
    points.sort_by(|a, b| a.beta0.total_cmp(&b.beta0).then(a.beta1.total_cmp(&b.beta1)));
    SqueezeCurve { kind, points }
}

fn bisect_line(
    table: &CosineTable,
    kind: CurveKind,
    beta0: f64,
    bracket: (f64, f64),
    f_lo: f64,
) -> Option<CurvePoint> {
    let (mut lo, mut hi) = bracket;
    let mut f_lo = f_lo;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = kind.element(&table.propagate(MathieuParams::new(beta0, mid))?);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let beta1 = 0.5 * (lo + hi);
    let u = table.propagate(MathieuParams::new(beta0, beta1))?;
    Some(CurvePoint {
        beta0,
        beta1,
        lambda: u.u11,
    })
}

/// Joins curve points on adjacent β₀ lines into polyline segments. Points on
/// neighbouring lines are linked when their β₁ differ by at most `max_jump`.
fn segments(curve: &SqueezeCurve, max_jump: f64) -> Vec<(CurvePoint, CurvePoint)> {
    let mut lines: Vec<Vec<CurvePoint>> = Vec::new();
    for p in &curve.points {
        match lines.last_mut() {
            Some(line) if line[0].beta0 == p.beta0 => line.push(*p),
            _ => lines.push(vec![*p]),
        }
    }
    let mut out = Vec::new();
    for pair in lines.windows(2) {
        for p in &pair[0] {
            let nearest = pair[1]
                .iter()
                .min_by(|a, b| (a.beta1 - p.beta1).abs().total_cmp(&(b.beta1 - p.beta1).abs()));
            if let Some(q) = nearest {
                if (q.beta1 - p.beta1).abs() <= max_jump {
                    out.push((*p, *q));
                }
            }
        }
    }
    out
}

fn segment_crossing(a: (CurvePoint, CurvePoint), b: (CurvePoint, CurvePoint)) -> Option<(f64, f64)> {
    let (p, r) = ((a.0.beta0, a.0.beta1), (a.1.beta0 - a.0.beta0, a.1.beta1 - a.0.beta1));
    let (q, s) = ((b.0.beta0, b.0.beta1), (b.1.beta0 - b.0.beta0, b.1.beta1 - b.0.beta1));
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return None;
    }
    let qp = (q.0 - p.0, q.1 - p.1);
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| (p.0 + t * r.0, p.1 + t * r.1))
}

/// Point where both off-diagonal elements vanish: `u = diag(λ, 1/λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intersection {
    pub params: MathieuParams,
    pub matrix: SymplecticMatrix,
    /// Crossing estimate from the polylines, before polishing.
    pub estimate: (f64, f64),
}

impl Intersection {
    pub fn lambda(&self) -> f64 {
        self.matrix.u11
    }
}

/// All crossings of the two traced curves, each polished by a 2-D Newton
/// iteration on `(u₁₂, u₂₁) = 0`, ordered by β₀.
pub fn find_intersections(
    c1: &SqueezeCurve,
    c2: &SqueezeCurve,
    grid: &ScanGrid,
    step: StepControl,
) -> Result<Vec<Intersection>> {
    let max_jump = 10.0 * grid.beta1_spacing().max(grid.beta0_spacing());
    let s1 = segments(c1, max_jump);
    let s2 = segments(c2, max_jump);
    let mut estimates: Vec<(f64, f64)> = Vec::new();
    for a in &s1 {
        for b in &s2 {
            if let Some(x) = segment_crossing(*a, *b) {
                // neighbouring segments can report the same crossing twice
                let dup = estimates.iter().any(|e| {
                    (e.0 - x.0).abs() <= grid.beta0_spacing() && (e.1 - x.1).abs() <= grid.beta1_spacing()
                });
                if !dup {
                    estimates.push(x);
                }
            }
        }
    }
    let mut found = Vec::new();
    for est in estimates {
        if let Some(ix) = polish(est, grid.interval, step)? {
            if !found.iter().any(|f: &Intersection| {
                (f.params.beta0 - ix.params.beta0).abs() < 1e-6 && (f.params.beta1 - ix.params.beta1).abs() < 1e-6
            }) {
                found.push(ix);
            }
        }
    }
    found.sort_by(|a, b| a.params.beta0.total_cmp(&b.params.beta0));
    Ok(found)
}

/// The first (lowest β₀) polished crossing of the two curves.
pub fn find_intersection(
    c1: &SqueezeCurve,
    c2: &SqueezeCurve,
    grid: &ScanGrid,
    step: StepControl,
) -> Result<Intersection> {
    find_intersections(c1, c2, grid, step)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::NotFound("the traced curves do not cross in the scanned region".into()))
}

fn polish(estimate: (f64, f64), interval: (f64, f64), step: StepControl) -> Result<Option<Intersection>> {
    let table = CosineTable::new(interval, step);
    let eval = |x: (f64, f64)| -> Result<SymplecticMatrix> {
        table
            .propagate(MathieuParams::new(x.0, x.1))
            .ok_or(Error::IntegrationFailure { last_tau: interval.0 })
    };
    let fd = 1e-7;
    let mut x = estimate;
    for _ in 0..50 {
        let u = eval(x)?;
        let f = (u.u12, u.u21);
        if f.0.abs().max(f.1.abs()) < 1e-12 {
            break;
        }
        let u0 = eval((x.0 + fd, x.1))?;
        let u1 = eval((x.0, x.1 + fd))?;
        let j = [
            [(u0.u12 - f.0) / fd, (u1.u12 - f.0) / fd],
            [(u0.u21 - f.1) / fd, (u1.u21 - f.1) / fd],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let dx0 = (j[1][1] * f.0 - j[0][1] * f.1) / det;
        let dx1 = (-j[1][0] * f.0 + j[0][0] * f.1) / det;
        x = (x.0 - dx0, x.1 - dx1);
        if dx0.abs().max(dx1.abs()) < 1e-14 {
            break;
        }
    }
    let matrix = eval(x)?;
    if matrix.u12.abs().max(matrix.u21.abs()) > INTERSECTION_TOL {
        return Ok(None);
    }
    Ok(Some(Intersection {
        params: MathieuParams::new(x.0, x.1),
        matrix,
        estimate,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        let p = mathieu_profile(MathieuParams::new(1.0, 0.0));
        assert_eq!(p.beta(0.3), 1.0);
        let p = mathieu_profile(MathieuParams::new(0.0, 0.5));
        assert_eq!(p.beta(0.0), 1.0);
        assert!((p.beta(PI) + 1.0).abs() < 1e-15);
        let p = mathieu_profile(MathieuParams::new(1.217, 0.844));
        assert!((p.beta(PI / 2.0) - 1.217).abs() < 1e-15);
        assert_eq!(p.gamma(1.0), 1.0);
    }

    #[test]
    fn grid_validation() {
        assert!(ScanGrid::new((1.0, 0.0), (0.0, 1.0), 3, 3, DEFAULT_INTERVAL).is_err());
        assert!(ScanGrid::new((0.0, 1.0), (0.0, 1.0), 1, 3, DEFAULT_INTERVAL).is_err());
        assert!(ScanGrid::new((0.0, 1.0), (0.0, 1.0), 2, 2, (1.0, 1.0)).is_err());
        let g = ScanGrid::default_region();
        assert!(g.validate().is_ok());
        assert_eq!(g.beta0_at(0), 0.9);
        assert_eq!(g.beta0_at(220), 2.0);
        assert!((g.beta1_at(110) - 1.05).abs() < 1e-12);
    }

    #[test]
    fn table_matches_generic_propagator() {
        let step = StepControl::with_step(1e-3);
        let params = MathieuParams::new(1.3, 0.9);
        let table = CosineTable::new(DEFAULT_INTERVAL, step);
        let a = table.propagate(params).unwrap();
        let b = operation_matrix(params, DEFAULT_INTERVAL, step).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn constant_line_has_closed_form_trace() {
        let step = StepControl::with_step(1e-3);
        for beta0 in [0.1, 0.5, 1.3] {
            let u = monodromy(MathieuParams::new(beta0, 0.0), 0.7, step).unwrap();
            let expected = 2.0 * (2.0 * PI * f64::sqrt(beta0)).cos();
            assert!((u.trace() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn small_map_regimes() {
        let grid = ScanGrid::new((0.0, 0.1), (0.0, 0.01), 2, 2, DEFAULT_INTERVAL).unwrap();
        let map = strutt_map(&grid, StepControl::with_step(1e-3)).unwrap();
        assert_eq!(map.cells.len(), 4);
        assert_eq!(map.cell(0, 0).regime(), Some(Regime::Threshold));
        assert_eq!(map.cell(1, 0).regime(), Some(Regime::Stable));
        assert_eq!(map.flagged_count(), 0);
    }

    #[test]
    fn u12_zero_on_constant_line_at_quarter() {
        // β₁ = 0: u12 = sin(2πκ)/κ vanishes at κ = 1/2, i.e. β₀ = 1/4
        let step = StepControl::with_step(1e-3);
        let table = CosineTable::new(DEFAULT_INTERVAL, step);
        let u = table.propagate(MathieuParams::new(0.25, 0.0)).unwrap();
        assert!(u.u12.abs() < 1e-9);
        let below = table.propagate(MathieuParams::new(0.24, 0.0)).unwrap();
        let above = table.propagate(MathieuParams::new(0.26, 0.0)).unwrap();
        assert!(below.u12 * above.u12 < 0.0);
    }

    #[test]
    fn curve_points_are_roots() {
        let step = StepControl::with_step(1e-3);
        let grid = ScanGrid::new((1.15, 1.3), (0.75, 0.95), 4, 9, DEFAULT_INTERVAL).unwrap();
        let map = strutt_map(&grid, step).unwrap();
        for kind in [CurveKind::U12Zero, CurveKind::U21Zero] {
            let c = trace_curve_in(&map, kind);
            assert!(!c.points.is_empty(), "{kind:?}");
            for p in &c.points {
                let u = operation_matrix(MathieuParams::new(p.beta0, p.beta1), DEFAULT_INTERVAL, step).unwrap();
                assert!(kind.element(&u).abs() < 1e-6);
                assert!((u.u11 - p.lambda).abs() < 1e-9);
            }
            assert!(c.points.windows(2).all(|w| w[0].beta0 <= w[1].beta0));
        }
    }

    #[test]
    fn empty_region_gives_empty_curves() {
        let grid = ScanGrid::new((0.0, 0.01), (0.0, 1e-3), 3, 3, DEFAULT_INTERVAL).unwrap();
        let step = StepControl::with_step(1e-3);
        let c = trace_curve(CurveKind::U21Zero, &grid, step).unwrap();
        assert!(c.points.is_empty());
        let c12 = trace_curve(CurveKind::U12Zero, &grid, step).unwrap();
        assert!(matches!(find_intersection(&c12, &c, &grid, step), Err(Error::NotFound(_))));
    }

    #[test]
    fn segment_crossing_geometry() {
        let p = |a, b| CurvePoint { beta0: a, beta1: b, lambda: 0.0 };
        let x = segment_crossing((p(0.0, 0.0), p(1.0, 1.0)), (p(0.0, 1.0), p(1.0, 0.0))).unwrap();
        assert!((x.0 - 0.5).abs() < 1e-15 && (x.1 - 0.5).abs() < 1e-15);
        assert!(segment_crossing((p(0.0, 0.0), p(1.0, 0.0)), (p(0.0, 1.0), p(1.0, 1.0))).is_none());
    }
}
