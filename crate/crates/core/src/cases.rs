//! The built-in experiment cases and their exact references.
//!
//! Smooth case: `u0(x) = 3/4 + cos(2 pi x)/4`. This is 1-periodic, spans
//! [1/2, 1] so the projected sup is 1, has maximum slope pi/2, and first
//! forms a shock at t = 2/pi ~ 0.637, comfortably after the default final
//! time 0.5. Up to a constant background drift it is the unit-domain
//! rescaling of the half-cosine bump profile.
//!
//! Nonsmooth case: the triangular wave rising with slope 4/3 on [0, 3/4]
//! and falling with slope -4 on [3/4, 1]; the fall focuses into a shock at
//! exactly t = 1/4, fully developed by the default final time.

use crate::error::Result;
use crate::exact::{
    front_tracking_solve, sample_characteristics, sample_front_tracked, PwLinearExact,
};
use crate::mesh::{Mesh, NodalField};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Initial profile with an optional analytic derivative.
#[derive(Clone)]
pub struct InitialData {
    pub f: ScalarFn,
    pub df: Option<ScalarFn>,
}

impl InitialData {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            df: None,
        }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Analytic derivative when available, central difference otherwise.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.df {
            Some(df) => df(x),
            None => {
                let d = 1e-6;
                ((self.f)(x + d) - (self.f)(x - d)) / (2.0 * d)
            }
        }
    }
}

pub const SMOOTH_SHOCK_TIME: f64 = 2.0 / std::f64::consts::PI;

pub fn smooth_initial() -> InitialData {
    use std::f64::consts::PI;
    InitialData::with_derivative(
        |x| 0.75 + 0.25 * (2.0 * PI * x).cos(),
        |x| -0.5 * PI * (2.0 * PI * x).sin(),
    )
}

/// Breakpoint form of the triangular wave.
pub fn triangular_profile() -> PwLinearExact {
    PwLinearExact::continuous(&[(0.0, 0.0), (0.75, 1.0)]).expect("valid by construction")
}

pub fn triangular_initial() -> InitialData {
    InitialData::with_derivative(
        |x| {
            let xr = x.rem_euclid(1.0);
            if xr <= 0.75 {
                4.0 / 3.0 * xr
            } else {
                4.0 * (1.0 - xr)
            }
        },
        |x| {
            let xr = x.rem_euclid(1.0);
            if xr <= 0.75 {
                4.0 / 3.0
            } else {
                -4.0
            }
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Case {
    Smooth,
    Nonsmooth,
    /// `mean + amp cos(2 pi freq x)`; reference available before its shock
    /// time `1/(2 pi amp freq)` only.
    Cosine { mean: f64, amp: f64, freq: usize },
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::Smooth => "smooth",
            Case::Nonsmooth => "nonsmooth",
            Case::Cosine { .. } => "custom",
        }
    }

    pub fn initial(&self) -> InitialData {
        use std::f64::consts::PI;
        match *self {
            Case::Smooth => smooth_initial(),
            Case::Nonsmooth => triangular_initial(),
            Case::Cosine { mean, amp, freq } => InitialData::with_derivative(
                move |x| mean + amp * (2.0 * PI * freq as f64 * x).cos(),
                move |x| -amp * 2.0 * PI * freq as f64 * (2.0 * PI * freq as f64 * x).sin(),
            ),
        }
    }

    /// First shock-formation time of the exact solution.
    pub fn shock_time(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Case::Smooth => SMOOTH_SHOCK_TIME,
            Case::Nonsmooth => 0.25,
            Case::Cosine { amp, freq, .. } => 1.0 / (2.0 * PI * amp.abs() * freq as f64),
        }
    }

    /// Default reference resolution for error measurement.
    pub fn default_ref_n(&self) -> usize {
        match self {
            Case::Nonsmooth => 12_800,
            _ => 6_400,
        }
    }

    /// Exact solution sampled on `mesh` at time `t`: characteristics for
    /// smooth profiles (valid before shock formation), front tracking for
    /// the piecewise-linear case at any time.
    pub fn reference(&self, t: f64, mesh: Mesh) -> Result<NodalField> {
        match self {
            Case::Nonsmooth => {
                let sol = front_tracking_solve(&triangular_profile(), t)?;
                Ok(sample_front_tracked(&sol, mesh))
            }
            _ => {
                let u0 = self.initial();
                sample_characteristics(move |x| u0.value(x), t, mesh, 1e-12)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_case_constants() {
        let u0 = smooth_initial();
        assert!((u0.value(0.0) - 1.0).abs() < 1e-15);
        assert!((u0.value(0.5) - 0.5).abs() < 1e-15);
        // max slope pi/2 at x = 3/4
        assert!((u0.derivative(0.75) - 0.5 * std::f64::consts::PI).abs() < 1e-12);
        assert!(Case::Smooth.shock_time() > 0.5);
    }

    #[test]
    fn triangular_closure_matches_profile() {
        let f = triangular_initial();
        let p = triangular_profile();
        for k in 0..100 {
            let x = k as f64 / 100.0;
            assert!((f.value(x) - p.eval(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_reproduces_initial_data_at_t0() {
        let mesh = Mesh::new(128).unwrap();
        for case in [Case::Smooth, Case::Nonsmooth] {
            let r = case.reference(0.0, mesh).unwrap();
            let u0 = case.initial();
            for i in 0..128 {
                let x = mesh.node(i);
                assert!((r.value(i) - u0.value(x)).abs() < 1e-12, "{case:?} at {x}");
            }
        }
    }

    #[test]
    fn reference_mean_is_conserved() {
        // nodal means: O(h^2) quadrature pre-shock, exact profile integral
        // for front tracking
        let mesh = Mesh::new(6400).unwrap();
        let r = Case::Smooth.reference(0.5, mesh).unwrap();
        assert!((r.mean() - 0.75).abs() < 1e-6);

        let sol = front_tracking_solve(&triangular_profile(), 0.5).unwrap();
        assert!((sol.mean() - 0.5).abs() < 1e-13);
    }
}
