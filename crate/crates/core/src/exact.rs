//! Exact entropy solutions of the inviscid Burgers equation on the periodic
//! unit interval, used as references for the convergence studies.
//!
//! Smooth data before shock formation: solve `u = u0(x - u t)` by damped
//! fixed-point iteration with a bisection fallback.
//!
//! Piecewise-linear data at any time: exact front tracking. Every shock is
//! parameterized by the interval `[xi_l, xi_r]` of characteristics it has
//! absorbed. Writing `u0` for the initial profile and `H` for its
//! antiderivative, the shock satisfies the arrival condition
//!
//!   xi_l + u0(xi_l) t = xi_r + u0(xi_r) t
//!
//! (both extreme characteristics land on the shock) and the conservation
//! condition
//!
//!   H(xi_r) - H(xi_l) = (u0(xi_l) + u0(xi_r)) (xi_r - xi_l) / 2,
//!
//! which is the Rankine-Hugoniot equal-area rule. The conservation form is
//! preserved exactly along the evolution, additive under shock merging, and
//! zero at shock birth, so both conditions hold globally in time. On each
//! linear piece of `u0` the conservation condition is bilinear in
//! `(xi_l, xi_r)`, so states and event times come out of linear and
//! quadratic equations.

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodalField};

const TOL: f64 = 1e-12;

/// One breakpoint of a piecewise-linear profile. At a continuous breakpoint
/// the two values agree; at a shock the left value exceeds the right one
/// (entropy condition).
#[derive(Debug, Clone, Copy)]
pub struct Breakpoint {
    /// Position in [0, 1).
    pub pos: f64,
    pub value_left: f64,
    pub value_right: f64,
    pub is_shock: bool,
}

/// Piecewise-linear periodic profile: linear between consecutive
/// breakpoints (wrapping around 1), with optional entropy shocks.
#[derive(Debug, Clone)]
pub struct PwLinearExact {
    pub breakpoints: Vec<Breakpoint>,
    pub time: f64,
}

impl PwLinearExact {
    /// Continuous initial profile through `(position, value)` points at
    /// t = 0. Positions must be strictly increasing in [0, 1).
    pub fn continuous(points: &[(f64, f64)]) -> Result<Self> {
        let breakpoints = points
            .iter()
            .map(|&(pos, v)| Breakpoint {
                pos,
                value_left: v,
                value_right: v,
                is_shock: false,
            })
            .collect();
        let profile = Self {
            breakpoints,
            time: 0.0,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.len() < 2 {
            return Err(Error::InvalidInput(
                "profile needs at least two breakpoints".into(),
            ));
        }
        for (k, bp) in self.breakpoints.iter().enumerate() {
            if !(0.0..1.0).contains(&bp.pos) {
                return Err(Error::InvalidInput(format!(
                    "breakpoint {k} position {} outside [0,1)",
                    bp.pos
                )));
            }
            if bp.is_shock {
                if bp.value_left <= bp.value_right {
                    return Err(Error::InvalidInput(format!(
                        "breakpoint {k} violates the entropy condition"
                    )));
                }
            } else if bp.value_left != bp.value_right {
                return Err(Error::InvalidInput(format!(
                    "breakpoint {k} has unequal values but is not a shock"
                )));
            }
            if k > 0 {
                let prev = self.breakpoints[k - 1].pos;
                if bp.pos - prev <= TOL {
                    return Err(Error::InvalidInput(format!(
                        "zero-length segment between breakpoints {} and {k}",
                        k - 1
                    )));
                }
            }
        }
        Ok(())
    }

    fn segment_len(&self, j: usize) -> f64 {
        let m = self.breakpoints.len();
        let a = self.breakpoints[j].pos;
        let b = if j + 1 < m {
            self.breakpoints[j + 1].pos
        } else {
            self.breakpoints[0].pos + 1.0
        };
        b - a
    }

    fn segment_slope(&self, j: usize) -> f64 {
        let m = self.breakpoints.len();
        let v0 = self.breakpoints[j].value_right;
        let v1 = self.breakpoints[(j + 1) % m].value_left;
        (v1 - v0) / self.segment_len(j)
    }

    /// Evaluate at `x` (1-periodic). At a shock position the right value is
    /// returned.
    pub fn eval(&self, x: f64) -> f64 {
        let xr = x.rem_euclid(1.0);
        let m = self.breakpoints.len();
        let j = match self.breakpoints.partition_point(|bp| bp.pos <= xr) {
            0 => m - 1,
            k => k - 1,
        };
        let start = self.breakpoints[j].pos;
        let offset = (xr - start).rem_euclid(1.0);
        self.breakpoints[j].value_right + self.segment_slope(j) * offset
    }

    /// Exact integral over one period (trapezoid between breakpoints).
    pub fn mean(&self) -> f64 {
        let m = self.breakpoints.len();
        (0..m)
            .map(|j| {
                let v0 = self.breakpoints[j].value_right;
                let v1 = self.breakpoints[(j + 1) % m].value_left;
                0.5 * (v0 + v1) * self.segment_len(j)
            })
            .sum()
    }

    /// Largest segment slope.
    pub fn max_slope(&self) -> f64 {
        (0..self.breakpoints.len())
            .map(|j| self.segment_slope(j))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.breakpoints.iter().fold(0.0f64, |m, bp| {
            m.max(bp.value_left.abs()).max(bp.value_right.abs())
        })
    }

    pub fn shocks(&self) -> impl Iterator<Item = &Breakpoint> {
        self.breakpoints.iter().filter(|bp| bp.is_shock)
    }
}

/// Solve `u = u0(x - u t)` for the pre-shock entropy solution value at
/// `(x, t)`. Plain iteration with 0.5 damping when it oscillates, falling
/// back to bisection on the monotone residual; errors out past the
/// iteration budget, which signals use beyond shock formation.
pub fn characteristics_fixed_point(
    u0: impl Fn(f64) -> f64,
    x: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    const MAX_ITERS: usize = 10_000;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let residual = |u: f64| u - u0(x - u * t);

    let mut u = u0(x);
    let mut r = residual(u);
    let mut damping = 1.0;
    let mut prev_abs = f64::INFINITY;
    let mut iters = 0usize;
    while r.abs() > tol && iters < 200 {
        if r.abs() >= prev_abs {
            damping = 0.5;
        }
        prev_abs = r.abs();
        u -= damping * r;
        r = residual(u);
        iters += 1;
    }
    if r.abs() <= tol {
        return Ok(u);
    }

    // bisection fallback: bracket from a scan of u0 over one period
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=256 {
        let v = u0(k as f64 / 256.0);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let pad = 1e-9 * (1.0 + hi.abs().max(lo.abs()));
    let (mut lo, mut hi) = (lo - pad, hi + pad);
    let (rlo, rhi) = (residual(lo), residual(hi));
    if rlo * rhi > 0.0 {
        return Err(Error::NoConvergence {
            iterations: iters,
            residual: r.abs(),
        });
    }
    let mut flo = rlo;
    while iters < MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let rm = residual(mid);
        if rm.abs() <= tol {
            return Ok(mid);
        }
        if (hi - lo) < f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
        if flo * rm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = rm;
        }
        iters += 1;
    }
    Err(Error::NoConvergence {
        iterations: iters,
        residual: residual(0.5 * (lo + hi)).abs(),
    })
}

/// Sample the pre-shock solution at the nodes of `mesh`.
pub fn sample_characteristics(
    u0: impl Fn(f64) -> f64,
    t: f64,
    mesh: Mesh,
    tol: f64,
) -> Result<NodalField> {
    let mut values = Vec::with_capacity(mesh.n_elems());
    for i in 0..mesh.n_elems() {
        values.push(characteristics_fixed_point(&u0, mesh.node(i), t, tol)?);
    }
    NodalField::new(mesh, values)
}

/// Nodal sampling of a front-tracked profile.
pub fn sample_front_tracked(sol: &PwLinearExact, mesh: Mesh) -> NodalField {
    NodalField::interpolate(mesh, |x| sol.eval(x))
}

// ---------------------------------------------------------------------------
// front tracking
// ---------------------------------------------------------------------------

/// Initial data in characteristic coordinates.
struct CharData {
    /// base breakpoint positions, strictly increasing in [0,1)
    xi: Vec<f64>,
    /// value immediately right of breakpoint j
    vr: Vec<f64>,
    /// value immediately left of breakpoint j
    vl: Vec<f64>,
    slope: Vec<f64>,
    /// H(xi[j]) with H(xi[0]) = 0
    hcum: Vec<f64>,
    mean: f64,
}

/// One linear piece in unwrapped coordinates: `u0(xi) = a + s xi` on
/// [start, end], with antiderivative `H(xi) = c + a xi + s xi^2 / 2`.
#[derive(Debug, Clone, Copy)]
struct SegmentLine {
    a: f64,
    s: f64,
    c: f64,
    start: f64,
    end: f64,
}

impl CharData {
    fn new(profile: &PwLinearExact) -> Self {
        let m = profile.breakpoints.len();
        let xi: Vec<f64> = profile.breakpoints.iter().map(|b| b.pos).collect();
        let vr: Vec<f64> = profile.breakpoints.iter().map(|b| b.value_right).collect();
        let vl: Vec<f64> = profile.breakpoints.iter().map(|b| b.value_left).collect();
        let slope: Vec<f64> = (0..m).map(|j| profile.segment_slope(j)).collect();
        let mut hcum = vec![0.0; m];
        for j in 0..m - 1 {
            let len = profile.segment_len(j);
            hcum[j + 1] = hcum[j] + 0.5 * (vr[j] + vl[j + 1]) * len;
        }
        let mean = profile.mean();
        Self {
            xi,
            vr,
            vl,
            slope,
            hcum,
            mean,
        }
    }

    fn n_segments(&self) -> usize {
        self.xi.len()
    }

    fn segment(&self, idx: i64) -> SegmentLine {
        let m = self.xi.len() as i64;
        let b = idx.rem_euclid(m) as usize;
        let p = idx.div_euclid(m) as f64;
        let start = self.xi[b] + p;
        let end = if b + 1 < self.xi.len() {
            self.xi[b + 1] + p
        } else {
            self.xi[0] + p + 1.0
        };
        let s = self.slope[b];
        let v = self.vr[b];
        let a = v - s * start;
        let h_start = p * self.mean + self.hcum[b];
        let c = h_start - v * start + 0.5 * s * start * start;
        SegmentLine {
            a,
            s,
            c,
            start,
            end,
        }
    }
}

impl SegmentLine {
    fn u0(&self, xi: f64) -> f64 {
        self.a + self.s * xi
    }
}

#[derive(Debug, Clone, Copy)]
struct Shock {
    xi_l: f64,
    xi_r: f64,
    /// unwrapped segment index holding the characteristics just left of xi_l
    seg_l: i64,
    /// unwrapped segment index holding the characteristics just right of xi_r
    seg_r: i64,
}

/// Given the left endpoint, the conservation condition
/// `(cR - cL) + (aR - aL)(R + L)/2 + (sR - sL) L R / 2 = 0`
/// is linear in the right endpoint (and vice versa).
fn solve_r_given_l(left: &SegmentLine, right: &SegmentLine, l: f64) -> Option<f64> {
    let denom = 0.5 * (right.a - left.a) + 0.5 * (right.s - left.s) * l;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some(-((right.c - left.c) + 0.5 * (right.a - left.a) * l) / denom)
}

fn solve_l_given_r(left: &SegmentLine, right: &SegmentLine, r: f64) -> Option<f64> {
    let denom = 0.5 * (right.a - left.a) + 0.5 * (right.s - left.s) * r;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some(-((right.c - left.c) + 0.5 * (right.a - left.a) * r) / denom)
}

/// Time at which the characteristics from `l` and `r` meet:
/// `t = (r - l) / (u0(l) - u0(r))`.
fn arrival_time(left: &SegmentLine, right: &SegmentLine, l: f64, r: f64) -> Option<f64> {
    let du = left.u0(l) - right.u0(r);
    if du <= 0.0 {
        return None;
    }
    Some((r - l) / du)
}

struct FrontTracker {
    data: CharData,
    shocks: Vec<Shock>,
    time: f64,
}

impl FrontTracker {
    fn new(profile: &PwLinearExact) -> Result<Self> {
        profile.validate()?;
        if profile.time != 0.0 {
            return Err(Error::InvalidInput(
                "front tracking starts from t = 0 initial data".into(),
            ));
        }
        let data = CharData::new(profile);
        let mut shocks = Vec::new();
        for (j, bp) in profile.breakpoints.iter().enumerate() {
            if bp.is_shock {
                let m = data.n_segments() as i64;
                let j = j as i64;
                shocks.push(Shock {
                    xi_l: bp.pos,
                    xi_r: bp.pos,
                    seg_l: j - 1,
                    seg_r: j.rem_euclid(m),
                });
            }
        }
        Ok(Self {
            data,
            shocks,
            time: 0.0,
        })
    }

    /// Solve the coupled arrival + conservation system for one shock at
    /// absolute time `t`, selecting the root continuous from the shock's
    /// current interval. Pure: does not commit the result.
    fn shock_state_at(&self, shock: &Shock, t: f64) -> Result<(f64, f64)> {
        let left = self.data.segment(shock.seg_l);
        let right = self.data.segment(shock.seg_r);
        let al = 1.0 + left.s * t;
        let ar = 1.0 + right.s * t;
        let dab = right.a - left.a;
        let dsl = right.s - left.s;

        let scale = 1.0 + shock.xi_r.abs();
        let (l, r);
        if al.abs() < 1e-11 {
            // left flank exactly at its focusing time: the arrival
            // condition fixes R alone
            let rr = if ar.abs() < 1e-11 {
                shock.xi_r
            } else {
                -dab * t / ar
            };
            let ll = solve_l_given_r(&left, &right, rr)
                .ok_or_else(|| Error::SolverFailure("degenerate conservation solve".into()))?;
            l = ll;
            r = rr;
        } else {
            // substitute L = (R ar + dab t) / al into the conservation form
            let aq = dsl * ar;
            let bq = dab * (al + ar) + dsl * dab * t;
            let cq = 2.0 * al * (right.c - left.c) + dab * dab * t;
            let candidates: Vec<f64> = if aq.abs() < 1e-13 * (bq.abs() + 1.0) {
                if bq.abs() < 1e-300 {
                    return Err(Error::SolverFailure(
                        "degenerate shock state equation".into(),
                    ));
                }
                vec![-cq / bq]
            } else {
                let disc = bq * bq - 4.0 * aq * cq;
                if disc < 0.0 {
                    if disc > -1e-10 * (bq * bq + 1.0) {
                        vec![-bq / (2.0 * aq)]
                    } else {
                        return Err(Error::SolverFailure(
                            "no real shock state; tracker invariant broken".into(),
                        ));
                    }
                } else {
                    let sq = disc.sqrt();
                    let q = -0.5 * (bq + bq.signum() * sq);
                    if q.abs() < 1e-300 {
                        vec![-bq / (2.0 * aq)]
                    } else {
                        vec![q / aq, cq / q]
                    }
                }
            };
            let mut best: Option<(f64, f64, f64)> = None;
            for rr in candidates {
                let ll = (rr * ar + dab * t) / al;
                // endpoints only move outward and stay in their segments
                if rr < shock.xi_r - 1e-9 * scale || ll > shock.xi_l + 1e-9 * scale {
                    continue;
                }
                if rr > right.end + 1e-7 || ll < left.start - 1e-7 {
                    continue;
                }
                let d = (rr - shock.xi_r).abs();
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((ll, rr, d));
                }
            }
            let (ll, rr, _) = best
                .ok_or_else(|| Error::SolverFailure("no admissible shock state root".into()))?;
            l = ll;
            r = rr;
        }

        let ul = left.u0(l);
        let ur = right.u0(r);
        if !(ul > ur - 1e-9 * (1.0 + ul.abs())) {
            return Err(Error::SolverFailure(
                "entropy condition lost during tracking".into(),
            ));
        }
        Ok((l, r))
    }

    /// Earliest time > `t_now` at which the shock's left endpoint reaches
    /// the start of its current left segment, if the right endpoint is
    /// still inside its own segment then.
    fn left_crossing_time(&self, shock: &Shock, t_now: f64) -> Option<f64> {
        let left = self.data.segment(shock.seg_l);
        let right = self.data.segment(shock.seg_r);
        let l = left.start;
        let r = solve_r_given_l(&left, &right, l)?;
        if r < shock.xi_r - 1e-9 || r > right.end + 1e-9 {
            return None;
        }
        let t = arrival_time(&left, &right, l, r)?;
        (t > t_now + 1e-15).then_some(t)
    }

    fn right_crossing_time(&self, shock: &Shock, t_now: f64) -> Option<f64> {
        let left = self.data.segment(shock.seg_l);
        let right = self.data.segment(shock.seg_r);
        let r = right.end;
        let l = solve_l_given_r(&left, &right, r)?;
        if l > shock.xi_l + 1e-9 || l < left.start - 1e-9 {
            return None;
        }
        let t = arrival_time(&left, &right, l, r)?;
        (t > t_now + 1e-15).then_some(t)
    }

    fn commit_states(&mut self, t: f64) -> Result<()> {
        let updated: Result<Vec<(f64, f64)>> = self
            .shocks
            .iter()
            .map(|s| self.shock_state_at(s, t))
            .collect();
        for (shock, (l, r)) in self.shocks.iter_mut().zip(updated?) {
            shock.xi_l = l;
            shock.xi_r = r;
        }
        self.time = t;
        Ok(())
    }

    /// Gaps of unconsumed characteristics between interval-sorted shocks.
    fn gaps(shocks: &[Shock]) -> Vec<f64> {
        let k = shocks.len();
        (0..k)
            .map(|i| {
                let j = (i + 1) % k;
                let next_l = if j == 0 {
                    shocks[j].xi_l + 1.0
                } else {
                    shocks[j].xi_l
                };
                next_l - shocks[i].xi_r
            })
            .collect()
    }

    fn states_at(&self, t: f64) -> Result<Vec<(f64, f64)>> {
        self.shocks
            .iter()
            .map(|s| self.shock_state_at(s, t))
            .collect()
    }

    /// Earliest merge time in `(t_now, horizon]`, located by bisection on
    /// the monotone gap functions built from the exact per-shock states.
    fn merge_time(&self, t_now: f64, horizon: f64) -> Result<Option<f64>> {
        if self.shocks.len() < 2 {
            return Ok(None);
        }
        let gap_min = |states: &[(f64, f64)]| -> f64 {
            let shocks: Vec<Shock> = self
                .shocks
                .iter()
                .zip(states)
                .map(|(s, &(l, r))| Shock {
                    xi_l: l,
                    xi_r: r,
                    ..*s
                })
                .collect();
            Self::gaps(&shocks).into_iter().fold(f64::INFINITY, f64::min)
        };
        let end_states = self.states_at(horizon)?;
        if gap_min(&end_states) > TOL {
            return Ok(None);
        }
        let mut lo = t_now;
        let mut hi = horizon;
        for _ in 0..200 {
            if hi - lo < 1e-15 * (1.0 + hi.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let s = self.states_at(mid)?;
            if gap_min(&s) > TOL {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(hi))
    }

    /// Unconsumed subintervals of an unwrapped segment span, clipped by the
    /// committed shock intervals (shifted across periods as needed).
    fn free_arcs(&self, start: f64, end: f64) -> Vec<(f64, f64)> {
        let mut consumed: Vec<(f64, f64)> = Vec::new();
        for s in &self.shocks {
            for k in -2..=2 {
                let a = s.xi_l + k as f64;
                let b = s.xi_r + k as f64;
                if b > start + TOL && a < end - TOL {
                    consumed.push((a.max(start), b.min(end)));
                }
            }
        }
        consumed.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut arcs = Vec::new();
        let mut cursor = start;
        for (a, b) in consumed {
            if a > cursor + TOL {
                arcs.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if end > cursor + TOL {
            arcs.push((cursor, end));
        }
        arcs
    }

    /// Merge shocks whose gap has closed, until all gaps are positive.
    fn merge_sweep(&mut self) {
        loop {
            if self.shocks.len() < 2 {
                return;
            }
            self.normalize();
            let gaps = Self::gaps(&self.shocks);
            let Some(i) = gaps.iter().position(|g| *g <= TOL) else {
                return;
            };
            let k = self.shocks.len();
            let j = (i + 1) % k;
            let (period, m) = if j == 0 {
                (1.0, self.data.n_segments() as i64)
            } else {
                (0.0, 0)
            };
            let right = self.shocks[j];
            let left = &mut self.shocks[i];
            left.xi_r = right.xi_r + period;
            left.seg_r = right.seg_r + m;
            self.shocks.remove(j);
        }
    }

    /// Keep every interval's left endpoint in [0, 1).
    fn normalize(&mut self) {
        let m = self.data.n_segments() as i64;
        for s in &mut self.shocks {
            let shift = s.xi_l.div_euclid(1.0);
            if shift != 0.0 {
                s.xi_l -= shift;
                s.xi_r -= shift;
                s.seg_l -= shift as i64 * m;
                s.seg_r -= shift as i64 * m;
            }
        }
        self.shocks
            .sort_by(|a, b| a.xi_l.partial_cmp(&b.xi_l).unwrap());
    }

    /// Shock births from base segment `b` at the committed time: one new
    /// shock per maximal unconsumed subinterval (they all focus at once).
    fn process_birth(&mut self, b: usize) {
        let seg = self.data.segment(b as i64);
        let arcs = self.free_arcs(seg.start, seg.end);
        for (a, bb) in arcs {
            let seg_l = if (a - seg.start).abs() <= TOL {
                b as i64 - 1
            } else {
                b as i64
            };
            let seg_r = if (bb - seg.end).abs() <= TOL {
                b as i64 + 1
            } else {
                b as i64
            };
            self.shocks.push(Shock {
                xi_l: a,
                xi_r: bb,
                seg_l,
                seg_r,
            });
        }
        self.normalize();
    }

    /// Advance to absolute time `t_target`, processing birth, crossing and
    /// merge events in order.
    fn advance_to(&mut self, t_target: f64) -> Result<()> {
        const MAX_EVENTS: usize = 100_000;
        let mut events = 0usize;
        while self.time < t_target {
            events += 1;
            if events > MAX_EVENTS {
                return Err(Error::SolverFailure(
                    "front tracking exceeded the event budget".into(),
                ));
            }

            #[derive(Clone, Copy, PartialEq)]
            enum Event {
                Reach,
                Birth(usize),
                CrossLeft(usize),
                CrossRight(usize),
                Merge,
            }
            let mut t_next = t_target;
            let mut event = Event::Reach;

            for b in 0..self.data.n_segments() {
                let s = self.data.slope[b];
                if s < 0.0 {
                    let tb = -1.0 / s;
                    if tb > self.time && tb <= t_next {
                        let seg = self.data.segment(b as i64);
                        // consumption only grows, so a free arc now is a
                        // conservative witness that the birth can still fire
                        if !self.free_arcs(seg.start, seg.end).is_empty() {
                            t_next = tb;
                            event = Event::Birth(b);
                        }
                    }
                }
            }
            for (i, s) in self.shocks.iter().enumerate() {
                if let Some(t) = self.left_crossing_time(s, self.time) {
                    if t <= t_next {
                        t_next = t;
                        event = Event::CrossLeft(i);
                    }
                }
                if let Some(t) = self.right_crossing_time(s, self.time) {
                    if t <= t_next {
                        t_next = t;
                        event = Event::CrossRight(i);
                    }
                }
            }
            if let Some(tm) = self.merge_time(self.time, t_next)? {
                if tm <= t_next {
                    t_next = tm;
                    event = Event::Merge;
                }
            }

            self.commit_states(t_next)?;
            match event {
                Event::Reach => {}
                Event::Birth(b) => self.process_birth(b),
                Event::CrossLeft(i) => self.shocks[i].seg_l -= 1,
                Event::CrossRight(i) => self.shocks[i].seg_r += 1,
                Event::Merge => {}
            }
            // births and crossings can close gaps exactly at the event time
            self.merge_sweep();
            self.normalize();
        }
        Ok(())
    }

    /// Assemble the visible profile at the committed time.
    fn profile(&self) -> Result<PwLinearExact> {
        let t = self.time;
        let mut bps: Vec<Breakpoint> = Vec::new();

        for s in &self.shocks {
            let left = self.data.segment(s.seg_l);
            let right = self.data.segment(s.seg_r);
            let vl = left.u0(s.xi_l);
            let vr = right.u0(s.xi_r);
            let pos = (s.xi_l + vl * t).rem_euclid(1.0);
            bps.push(Breakpoint {
                pos,
                value_left: vl,
                value_right: vr,
                is_shock: vl > vr + TOL,
            });
        }

        // surviving continuous breakpoints: outside every consumed interval
        let m = self.data.n_segments();
        for j in 0..m {
            let xi = self.data.xi[j];
            if self.data.vl[j] != self.data.vr[j] {
                continue; // initial discontinuities are tracked as shocks
            }
            let consumed = self.shocks.iter().any(|s| {
                (-2..=2).any(|k| {
                    let a = s.xi_l + k as f64;
                    let b = s.xi_r + k as f64;
                    xi >= a - TOL && xi <= b + TOL
                })
            });
            if !consumed {
                let v = self.data.vr[j];
                bps.push(Breakpoint {
                    pos: (xi + v * t).rem_euclid(1.0),
                    value_left: v,
                    value_right: v,
                    is_shock: false,
                });
            }
        }

        bps.sort_by(|a, b| a.pos.partial_cmp(&b.pos).unwrap());
        // collapse positions that collide within tolerance (a breakpoint
        // absorbed exactly at the query time)
        let mut cleaned: Vec<Breakpoint> = Vec::new();
        for bp in bps {
            match cleaned.last() {
                Some(last) if (bp.pos - last.pos).abs() <= 10.0 * TOL => {
                    if bp.is_shock {
                        *cleaned.last_mut().unwrap() = bp;
                    }
                }
                _ => cleaned.push(bp),
            }
        }
        if cleaned.len() == 1 && self.shocks.len() == 1 {
            // a lone shock: all original breakpoints are consumed, so the
            // unconsumed characteristics (xi_r, xi_l + 1) lie in a single
            // linear piece. Mark its midpoint so the two-breakpoint profile
            // invariant holds; the midpoint is never consumed.
            let s = &self.shocks[0];
            let seg = self.data.segment(s.seg_r);
            let xi_mid = 0.5 * (s.xi_r + s.xi_l + 1.0);
            let v = seg.u0(xi_mid);
            cleaned.push(Breakpoint {
                pos: (xi_mid + v * t).rem_euclid(1.0),
                value_left: v,
                value_right: v,
                is_shock: false,
            });
            cleaned.sort_by(|a, b| a.pos.partial_cmp(&b.pos).unwrap());
        }
        Ok(PwLinearExact {
            breakpoints: cleaned,
            time: t,
        })
    }
}

/// Evolve piecewise-linear periodic initial data to time `t` exactly.
pub fn front_tracking_solve(initial: &PwLinearExact, t: f64) -> Result<PwLinearExact> {
    if t < 0.0 {
        return Err(Error::InvalidInput("time must be nonnegative".into()));
    }
    let mut tracker = FrontTracker::new(initial)?;
    if t == 0.0 {
        return Ok(initial.clone());
    }
    tracker.advance_to(t)?;
    tracker.profile()
}

/// First shock-formation time of a continuous piecewise-linear profile:
/// the smallest `-1/s` over its negative segment slopes.
pub fn first_shock_time(initial: &PwLinearExact) -> Option<f64> {
    let m = initial.breakpoints.len();
    (0..m)
        .filter_map(|j| {
            let s = initial.segment_slope(j);
            (s < 0.0).then(|| -1.0 / s)
        })
        .fold(None, |acc, t| Some(acc.map_or(t, |a: f64| a.min(t))))
}
