//! Macro-scale concrete response by spatial averaging over a fiber's meso
//! structure.
//!
//! A fiber cross-section carries N_f^2 meso points sharing one homogeneous
//! strain E. The macro stress is the arithmetic mean of the point stresses
//! and the macro tangent the mean of the point tangents, so D always lies in
//! [CH/(C+H), C]. Tension is cut off at macro scale: when the mean stress
//! would turn positive, the strain E_c with Sigma(E_c) = 0 is located by a
//! bracketed Newton search, the meso structure is frozen there, and the fiber
//! reports Sigma = 0, D = 0 until recompression closes the crack.

use crate::error::{ModelError, Result};
use crate::field::FiberYieldAssignment;
use crate::meso::{
    dissipation_increment, return_map, stored_energy_density, ElastoPlasticParams, MesoPointState,
};

/// Newton iterations allowed when locating the cutoff strain.
const CUTOFF_NEWTON_ITERS: usize = 50;
/// Bisection iterations allowed after Newton gives up.
const CUTOFF_BISECT_ITERS: usize = 200;
/// Stiffness floor (fraction of C) used in Jacobian assembly only.
pub const STIFFNESS_FLOOR: f64 = 1e-6;

/// Meso structure of one concrete fiber.
#[derive(Debug, Clone)]
pub struct FiberMesoStructure {
    points: Vec<MesoPointState>,
    params: ElastoPlasticParams,
    n_f: usize,
    edge: f64,
    strain: f64,
    stress: f64,
    /// Frozen strain E_c while the crack is open.
    cutoff: Option<f64>,
    /// Mean yield stress; sets the stress scale of the cutoff tolerance.
    stress_scale: f64,
    dissipated: f64,
}

/// Result of evaluating or committing a macro strain.
#[derive(Debug, Clone, Copy)]
pub struct MacroResponse {
    pub stress: f64,
    /// Physical tangent (exactly zero while the cutoff is active).
    pub tangent: f64,
    /// Frozen strain when the cutoff is (or would be) active.
    pub cutoff: Option<f64>,
}

impl MacroResponse {
    pub fn cutoff_active(&self) -> bool {
        self.cutoff.is_some()
    }
}

impl FiberMesoStructure {
    /// Builds the fiber from mapped yield stresses.
    pub fn from_yields(yields: &FiberYieldAssignment, params: ElastoPlasticParams) -> Result<Self> {
        Self::from_values(yields.values(), yields.mesh_count(), yields.edge(), params)
    }

    /// Uniform yield stress over the section (collapses to the meso model).
    pub fn uniform(n_f: usize, yield_stress: f64, params: ElastoPlasticParams) -> Result<Self> {
        let values = vec![yield_stress; n_f * n_f];
        Self::from_values(&values, n_f, 1.0, params)
    }

    /// Direct construction from explicit point yield stresses.
    pub fn from_values(
        values: &[f64],
        n_f: usize,
        edge: f64,
        params: ElastoPlasticParams,
    ) -> Result<Self> {
        if n_f == 0 || values.len() != n_f * n_f {
            return Err(ModelError::Config(format!(
                "expected {} yield values, got {}",
                n_f * n_f,
                values.len()
            )));
        }
        if values.iter().any(|&v| !(v > 0.0)) {
            return Err(ModelError::InvalidState(
                "every yield stress must be strictly positive".into(),
            ));
        }
        let scale = values.iter().sum::<f64>() / values.len() as f64;
        Ok(Self {
            points: values.iter().map(|&v| MesoPointState::virgin(v)).collect(),
            params,
            n_f,
            edge,
            strain: 0.0,
            stress: 0.0,
            cutoff: None,
            stress_scale: scale,
            dissipated: 0.0,
        })
    }

    pub fn params(&self) -> &ElastoPlasticParams {
        &self.params
    }

    pub fn mesh_count(&self) -> usize {
        self.n_f
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[MesoPointState] {
        &self.points
    }

    /// Committed macro strain.
    pub fn strain(&self) -> f64 {
        self.strain
    }

    /// Committed macro stress (zero while the crack is open).
    pub fn stress(&self) -> f64 {
        self.stress
    }

    pub fn cutoff_active(&self) -> bool {
        self.cutoff.is_some()
    }

    /// Cumulative plastic dissipation density.
    pub fn dissipated_density(&self) -> f64 {
        self.dissipated
    }

    /// Mean recoverable energy density over the points.
    pub fn stored_energy_density(&self) -> f64 {
        self.points
            .iter()
            .map(|p| stored_energy_density(p, &self.params))
            .sum::<f64>()
            / self.points.len() as f64
    }

    /// Mean stress and tangent with every point advanced to total strain `e`
    /// from its committed state; does not mutate.
    fn mean_response(&self, e: f64) -> Result<(f64, f64)> {
        let mut stress = 0.0;
        let mut tangent = 0.0;
        for p in &self.points {
            let (n, t) = return_map(p, e - p.strain, &self.params)?;
            stress += n.stress;
            tangent += t;
        }
        let count = self.points.len() as f64;
        Ok((stress / count, tangent / count))
    }

    /// Pure evaluation of the macro response at total strain `e`,
    /// including the cutoff transition logic.
    pub fn eval(&self, e: f64) -> Result<MacroResponse> {
        match self.cutoff {
            None => {
                let (stress, tangent) = self.mean_response(e)?;
                if stress > 0.0 {
                    let ec = self.tension_cutoff_resolve(self.points[0].strain, e)?;
                    Ok(MacroResponse {
                        stress: 0.0,
                        tangent: 0.0,
                        cutoff: Some(ec),
                    })
                } else {
                    Ok(MacroResponse {
                        stress,
                        tangent,
                        cutoff: None,
                    })
                }
            }
            Some(ec) => {
                let (stress, tangent) = self.mean_response(e)?;
                if stress <= 0.0 {
                    // crack closes: resume from the frozen meso state
                    Ok(MacroResponse {
                        stress,
                        tangent,
                        cutoff: None,
                    })
                } else {
                    Ok(MacroResponse {
                        stress: 0.0,
                        tangent: 0.0,
                        cutoff: Some(ec),
                    })
                }
            }
        }
    }

    /// Commits the state at total strain `e`. Returns the response and the
    /// exact stress-path work density of the step (the crack carries no
    /// stress, so strain excursions beyond the frozen strain do no work).
    pub fn commit(&mut self, e: f64) -> Result<(MacroResponse, f64)> {
        let resp = self.eval(e)?;
        let work;
        match (self.cutoff, resp.cutoff) {
            (None, None) | (Some(_), None) => {
                // normal advance, or reactivation from the frozen state
                work = self.advance_points(e)?;
                self.cutoff = None;
            }
            (None, Some(ec)) => {
                // entering the cutoff: points stop at E_c, crack opens
                work = self.advance_points(ec)?;
                self.cutoff = Some(ec);
            }
            (Some(_), Some(_)) => {
                // crack stays open: meso state frozen, no work
                work = 0.0;
            }
        }
        self.strain = e;
        self.stress = resp.stress;
        Ok((resp, work))
    }

    /// Advances every point to total strain `e`, accumulating dissipation;
    /// returns the mean trapezoidal work density of the move.
    fn advance_points(&mut self, e: f64) -> Result<f64> {
        let mut work = 0.0;
        for p in self.points.iter_mut() {
            let (n, _) = return_map(p, e - p.strain, &self.params)?;
            work += 0.5 * (p.stress + n.stress) * (n.strain - p.strain);
            self.dissipated += dissipation_increment(p, &n, &self.params)
                / self.points.len() as f64;
            *p = n;
        }
        Ok(work / self.points.len() as f64)
    }

    /// Spec-named increment update: advances by `d_e` and returns (Sigma, D).
    pub fn macro_update(&mut self, d_e: f64) -> Result<(f64, f64)> {
        let target = self.strain + d_e;
        let (resp, _) = self.commit(target)?;
        Ok((resp.stress, resp.tangent))
    }

    /// Locates E_c in [e_prev, e_next] with Sigma(E_c) = 0 by a bracketed
    /// Newton search with bisection fallback.
    pub fn tension_cutoff_resolve(&self, e_prev: f64, e_next: f64) -> Result<f64> {
        let tol = STIFFNESS_FLOOR * self.stress_scale;
        let (s_lo, _) = self.mean_response(e_prev)?;
        let (s_hi, _) = self.mean_response(e_next)?;
        if s_lo.abs() <= tol {
            return Ok(e_prev);
        }
        if s_lo > 0.0 || s_hi <= 0.0 {
            return Err(ModelError::Domain(format!(
                "no compression-to-tension sign change in [{e_prev}, {e_next}]: \
                 Sigma = [{s_lo}, {s_hi}]"
            )));
        }
        let (mut lo, mut hi) = (e_prev, e_next);
        let mut e = hi;
        for _ in 0..CUTOFF_NEWTON_ITERS {
            let (s, d) = self.mean_response(e)?;
            if s.abs() <= tol {
                return Ok(e);
            }
            if s > 0.0 {
                hi = e;
            } else {
                lo = e;
            }
            let step_ok = d > 0.0;
            let mut next = if step_ok { e - s / d } else { 0.5 * (lo + hi) };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            e = next;
        }
        for _ in 0..CUTOFF_BISECT_ITERS {
            let mid = 0.5 * (lo + hi);
            let (s, _) = self.mean_response(mid)?;
            if s.abs() <= tol || (hi - lo) < f64::EPSILON * lo.abs().max(1e-12) {
                return Ok(mid);
            }
            if s > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(ModelError::Convergence(
            "tension cutoff strain not resolved".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(c: f64, h: f64) -> ElastoPlasticParams {
        ElastoPlasticParams::new(c, h).unwrap()
    }

    #[test]
    fn all_elastic_tangent_is_c() {
        let mut f = FiberMesoStructure::uniform(8, 30e6, params(30e9, 10e9)).unwrap();
        let (sig, d) = f.macro_update(-5e-4).unwrap();
        assert_relative_eq!(d, 30e9);
        assert_relative_eq!(sig, -15e6, max_relative = 1e-12);
    }

    #[test]
    fn half_yielding_tangent_is_the_area_mix() {
        // half the points far into yield, half far from it
        let n = 8usize;
        let mut values = vec![1e6; n * n / 2];
        values.extend(vec![1e9; n * n / 2]);
        let mut f = FiberMesoStructure::from_values(&values, n, 1.0, params(30e9, 10e9)).unwrap();
        let (_, d) = f.macro_update(-1e-3).unwrap();
        // D = 0.5 C + 0.5 CH/(C+H) = 0.5*30 + 0.5*7.5 GPa
        assert_relative_eq!(d, 18.75e9, max_relative = 1e-12);
    }

    #[test]
    fn uniform_fiber_collapses_to_meso_curve() {
        let p = params(30e9, 10e9);
        let mut fiber = FiberMesoStructure::uniform(4, 30e6, p).unwrap();
        let mut point = crate::meso::MesoPointState::virgin(30e6);
        let mut e = 0.0;
        for _ in 0..50 {
            e -= 1e-4;
            let (sig, _) = fiber.commit(e).map(|(r, _)| (r.stress, r.tangent)).unwrap();
            let (n, _) = crate::meso::return_map(&point, -1e-4, &p).unwrap();
            point = n;
            assert_relative_eq!(sig, point.stress, max_relative = 1e-12);
        }
    }

    #[test]
    fn averaging_is_exact() {
        let values: Vec<f64> = (0..16).map(|i| 10e6 + 1e6 * i as f64).collect();
        let mut f = FiberMesoStructure::from_values(&values, 4, 1.0, params(30e9, 0.0)).unwrap();
        let (resp, _) = f.commit(-1e-3).unwrap();
        let mean_stress =
            f.points().iter().map(|p| p.stress).sum::<f64>() / f.point_count() as f64;
        assert_eq!(resp.stress, mean_stress);
    }

    #[test]
    fn tangent_bounds_hold() {
        let values: Vec<f64> = (1..=64).map(|i| 5e5 * i as f64).collect();
        let p = params(30e9, 10e9);
        let mut f = FiberMesoStructure::from_values(&values, 8, 1.0, p).unwrap();
        let mut e = 0.0;
        for _ in 0..60 {
            e -= 1e-4;
            let (resp, _) = f.commit(e).unwrap();
            assert!(resp.tangent <= 30e9 + 1.0);
            assert!(resp.tangent >= p.plastic_tangent() - 1.0);
        }
    }

    #[test]
    fn elastic_unload_cutoff_at_zero_strain() {
        // uniform elastic fiber: Sigma = C E, so the residual-strain point is
        // the origin
        let f = FiberMesoStructure::uniform(4, 1e9, params(30e9, 0.0)).unwrap();
        let ec = f.tension_cutoff_resolve(-1e-3, 1e-3).unwrap();
        assert!(ec.abs() < 1e-12);
    }

    #[test]
    fn single_point_cutoff_is_the_elastic_unloading_root() {
        let p = params(30e9, 0.0);
        let mut f = FiberMesoStructure::uniform(1, 30e6, p).unwrap();
        f.commit(-2e-3).unwrap();
        // stress is -sigma_y = -30 MPa; unloading line slope C crosses zero
        // at E = -2e-3 + 1e-3
        let ec = f.tension_cutoff_resolve(-2e-3, 1e-3).unwrap();
        assert_relative_eq!(ec, -1e-3, max_relative = 1e-6);
    }

    #[test]
    fn cutoff_freezes_and_reactivates() {
        let p = params(30e9, 0.0);
        let mut f = FiberMesoStructure::uniform(1, 30e6, p).unwrap();
        f.commit(-2e-3).unwrap();
        // pull through the cutoff into open-crack territory
        let (resp, w) = f.commit(0.5e-3).unwrap();
        assert!(resp.cutoff_active());
        assert_eq!(resp.stress, 0.0);
        assert_eq!(resp.tangent, 0.0);
        let frozen = resp.cutoff.unwrap();
        assert_relative_eq!(frozen, -1e-3, max_relative = 1e-6);
        // stress path work of the entry step: mean of (sigma_old + 0)/2 over
        // the traveled part only
        assert_relative_eq!(w, 0.5 * (-30e6) * (frozen - (-2e-3)), max_relative = 1e-6);

        // while open: no stress, no tangent, no work, frozen state
        let before = f.points()[0];
        let (resp2, w2) = f.commit(1e-3).unwrap();
        assert!(resp2.cutoff_active());
        assert_eq!(resp2.stress, 0.0);
        assert_eq!(w2, 0.0);
        assert_eq!(f.points()[0], before);

        // recompression below the frozen strain closes the crack
        let (resp3, _) = f.commit(-1.5e-3).unwrap();
        assert!(!resp3.cutoff_active());
        assert!(resp3.stress < 0.0);
        assert_relative_eq!(resp3.stress, 30e9 * (-1.5e-3 - frozen), max_relative = 1e-6);
    }

    #[test]
    fn cutoff_requires_a_bracket() {
        let mut f = FiberMesoStructure::uniform(1, 30e6, params(30e9, 0.0)).unwrap();
        f.commit(-2e-3).unwrap();
        let err = f.tension_cutoff_resolve(-2e-3, -1.5e-3).unwrap_err();
        assert!(matches!(err, ModelError::Domain(_)));
    }

    #[test]
    fn pointwise_yield_dominance_is_monotone() {
        // raising every yield stress can only raise |Sigma| under monotone
        // compression
        let lo: Vec<f64> = (1..=16).map(|i| 2e6 * i as f64).collect();
        let hi: Vec<f64> = lo.iter().map(|v| v * 1.3).collect();
        let p = params(30e9, 0.0);
        let mut fl = FiberMesoStructure::from_values(&lo, 4, 1.0, p).unwrap();
        let mut fh = FiberMesoStructure::from_values(&hi, 4, 1.0, p).unwrap();
        let mut e = 0.0;
        for _ in 0..40 {
            e -= 1e-4;
            let (rl, _) = fl.commit(e).unwrap();
            let (rh, _) = fh.commit(e).unwrap();
            assert!(rh.stress.abs() >= rl.stress.abs() - 1e-9);
        }
    }

    #[test]
    fn cycle_area_equals_point_dissipation() {
        // an unloading-reloading cycle: trapezoidal loop area over the
        // sampled path must equal the dissipation bookkeeping
        let values: Vec<f64> = (1..=64).map(|i| 1.5e6 * i as f64).collect();
        let p = params(30e9, 10e9);
        let mut f = FiberMesoStructure::from_values(&values, 8, 1.0, p).unwrap();
        let steps = 300usize;
        let mut path = vec![(0.0f64, 0.0f64)];
        let mut drive = |f: &mut FiberMesoStructure, from: f64, to: f64, path: &mut Vec<(f64, f64)>| {
            for k in 1..=steps {
                let e = from + (to - from) * k as f64 / steps as f64;
                let (r, _) = f.commit(e).unwrap();
                path.push((e, r.stress));
            }
        };
        drive(&mut f, 0.0, -3e-3, &mut path);
        let d0 = f.dissipated_density();
        let n0 = path.len() - 1;
        drive(&mut f, -3e-3, -1.4e-3, &mut path);
        drive(&mut f, -1.4e-3, -3e-3, &mut path);
        let cycle = &path[n0..];
        let area: f64 = cycle
            .windows(2)
            .map(|w| 0.5 * (w[1].1 + w[0].1) * (w[1].0 - w[0].0))
            .sum();
        let diss = f.dissipated_density() - d0;
        // kinematic hardening closes the cycle state, so the trapezoidal
        // loop area is exactly the dissipated density
        assert!(area >= 0.0);
        assert_relative_eq!(area, diss, max_relative = 1e-6);
    }
}
