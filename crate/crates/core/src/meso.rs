//! 1D rate-independent elasto-plasticity with linear kinematic hardening.
//!
//! Per meso point: additive split eps = eps_e + eps_p, state equation
//! sigma = C (eps - eps_p), yield function phi = |sigma + alpha| - sigma_y
//! and back-stress evolution alpha' = -H eps_p'. The algorithmic update is
//! the classical one-step return map, which is algebraically exact in 1D:
//! elastic slope C, plastic slope CH/(C+H).
//!
//! The same kernel doubles as the deterministic rebar steel model.

use crate::error::{ModelError, Result};

/// Relative tolerance on the yield condition; the return map is exact in 1D,
/// this only absorbs floating-point rounding.
pub const YIELD_TOL: f64 = 1e-9;

/// Elastic modulus C and kinematic hardening modulus H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElastoPlasticParams {
    pub elastic_modulus: f64,
    pub hardening_modulus: f64,
}

impl ElastoPlasticParams {
    pub fn new(elastic_modulus: f64, hardening_modulus: f64) -> Result<Self> {
        if !(elastic_modulus > 0.0) {
            return Err(ModelError::Domain(format!(
                "elastic modulus must be positive, got {elastic_modulus}"
            )));
        }
        if !(hardening_modulus >= 0.0) {
            return Err(ModelError::Domain(format!(
                "hardening modulus must be nonnegative, got {hardening_modulus}"
            )));
        }
        Ok(Self {
            elastic_modulus,
            hardening_modulus,
        })
    }

    /// Elasto-plastic tangent CH/(C+H); zero for perfect plasticity.
    pub fn plastic_tangent(&self) -> f64 {
        let c = self.elastic_modulus;
        let h = self.hardening_modulus;
        c * h / (c + h)
    }
}

/// State of one meso point (one material point of a fiber cross-section).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MesoPointState {
    pub stress: f64,
    pub back_stress: f64,
    pub plastic_strain: f64,
    pub strain: f64,
    pub yield_stress: f64,
}

impl MesoPointState {
    /// Unstrained virgin point with the given yield stress.
    pub fn virgin(yield_stress: f64) -> Self {
        Self {
            yield_stress,
            ..Self::default()
        }
    }

    /// Yield function phi = |sigma + alpha| - sigma_y at the current state.
    pub fn yield_function(&self) -> f64 {
        (self.stress + self.back_stress).abs() - self.yield_stress
    }
}

/// Elastic predictor for a strain increment.
#[derive(Debug, Clone, Copy)]
pub struct TrialState {
    pub stress: f64,
    pub back_stress: f64,
    pub yield_function: f64,
}

/// sigma_tr = sigma + C d_eps, alpha_tr = alpha,
/// phi_tr = |sigma_tr + alpha_tr| - sigma_y.
pub fn trial_state(
    state: &MesoPointState,
    d_strain: f64,
    params: &ElastoPlasticParams,
) -> TrialState {
    let stress = state.stress + params.elastic_modulus * d_strain;
    let back_stress = state.back_stress;
    TrialState {
        stress,
        back_stress,
        yield_function: (stress + back_stress).abs() - state.yield_stress,
    }
}

/// One-step return map. Returns the updated state and the consistent tangent
/// modulus (C on elastic steps, CH/(C+H) on plastic steps).
///
/// phi_tr = 0 exactly is treated as elastic: both branches coincide there and
/// this avoids the sign(0) ambiguity.
pub fn return_map(
    state: &MesoPointState,
    d_strain: f64,
    params: &ElastoPlasticParams,
) -> Result<(MesoPointState, f64)> {
    if !(state.yield_stress > 0.0) {
        return Err(ModelError::InvalidState(format!(
            "yield stress must be positive, got {}",
            state.yield_stress
        )));
    }
    let c = params.elastic_modulus;
    let h = params.hardening_modulus;
    let trial = trial_state(state, d_strain, params);
    let mut new = *state;
    new.strain += d_strain;
    if trial.yield_function <= 0.0 {
        new.stress = trial.stress;
        Ok((new, c))
    } else {
        let dir = if trial.stress + trial.back_stress >= 0.0 {
            1.0
        } else {
            -1.0
        };
        let d_gamma = trial.yield_function / (c + h);
        new.plastic_strain += d_gamma * dir;
        new.back_stress -= d_gamma * h * dir;
        new.stress = c * (new.strain - new.plastic_strain);
        Ok((new, params.plastic_tangent()))
    }
}

/// Energy density dissipated between two consecutive states: the trapezoidal
/// stress work minus the change of elastic energy sigma^2/2C and of the
/// hardening store alpha^2/2H (zero when H = 0). Exactly zero on elastic
/// steps by the algebra of the trapezoid, nonnegative on every admissible
/// step.
pub fn dissipation_increment(
    old: &MesoPointState,
    new: &MesoPointState,
    params: &ElastoPlasticParams,
) -> f64 {
    let c = params.elastic_modulus;
    let h = params.hardening_modulus;
    let d_strain = new.strain - old.strain;
    let work = 0.5 * (old.stress + new.stress) * d_strain;
    let d_elastic = (new.stress * new.stress - old.stress * old.stress) / (2.0 * c);
    let d_hardening = if h > 0.0 {
        (new.back_stress * new.back_stress - old.back_stress * old.back_stress) / (2.0 * h)
    } else {
        0.0
    };
    work - d_elastic - d_hardening
}

/// Recoverable energy density stored at a state.
pub fn stored_energy_density(state: &MesoPointState, params: &ElastoPlasticParams) -> f64 {
    let c = params.elastic_modulus;
    let h = params.hardening_modulus;
    let elastic = state.stress * state.stress / (2.0 * c);
    let hardening = if h > 0.0 {
        state.back_stress * state.back_stress / (2.0 * h)
    } else {
        0.0
    };
    elastic + hardening
}
