//! Retrospective cost optimization.
//!
//! The adaptive law is `u_k = Phi_k theta_k`. The gains minimize the
//! retrospective cost
//!
//! ```text
//! J_k(theta) = sum_i lambda^(k-i) [ zhat_i(theta)' Rz zhat_i(theta) + (Phi_i theta)' Ru (Phi_i theta) ]
//!            + lambda^(k+1) (theta - theta0)' P0^-1 (theta - theta0)
//! zhat_i(theta) = z_i + Phi_f,i theta - u_f,i
//! ```
//!
//! where `Phi_f` and `u_f` are the regressor and input passed through the FIR
//! filter `G_f(q) = sum_j N_j q^-j`. [`rls_step`] computes the minimizer
//! recursively; [`batch_cost`] and [`batch_minimizer`] evaluate the same cost
//! directly and exist to check the recursion.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::RlsError;

/// Condition number above which the 2x2 innovation block is rejected.
pub const MAX_INNOVATION_CONDITION: f64 = 1e12;

/// Scalar FIR filter `G_f(q) = sum_{i=1}^{n_f} N_i q^-i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    coefficients: Vec<f64>,
}

impl FirFilter {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, RlsError> {
        if coefficients.is_empty() {
            return Err(RlsError::Config("FIR filter needs at least one coefficient".into()));
        }
        if !coefficients.iter().all(|c| c.is_finite()) {
            return Err(RlsError::Config("FIR coefficients must be finite".into()));
        }
        Ok(Self { coefficients })
    }

    /// `G_f(q) = q^-1`.
    pub fn unit_delay() -> Self {
        Self {
            coefficients: vec![1.0],
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlsConfig {
    pub l_theta: usize,
    pub p0_scale: f64,
    pub theta0: DVector<f64>,
    pub rz: f64,
    pub ru: f64,
    pub filter: FirFilter,
    pub lambda: f64,
}

impl RlsConfig {
    /// Three-gain PID configuration: `N_1 = 1`, `P_0 = 0.1 I`, `lambda = 1`,
    /// `theta_0 = 0`, `Rz = 1`, `Ru = 0`.
    pub fn pid() -> Self {
        Self {
            l_theta: 3,
            p0_scale: 0.1,
            theta0: DVector::zeros(3),
            rz: 1.0,
            ru: 0.0,
            filter: FirFilter::unit_delay(),
            lambda: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), RlsError> {
        if self.l_theta == 0 {
            return Err(RlsError::Config("l_theta must be positive".into()));
        }
        if self.theta0.len() != self.l_theta {
            return Err(RlsError::Dimension {
                expected: self.l_theta,
                got: self.theta0.len(),
            });
        }
        if !(self.p0_scale > 0.0 && self.p0_scale.is_finite()) {
            return Err(RlsError::Config(format!("P0 scale must be positive, got {}", self.p0_scale)));
        }
        if !(self.rz > 0.0 && self.rz.is_finite()) {
            return Err(RlsError::Config(format!("Rz must be positive, got {}", self.rz)));
        }
        if !(self.ru >= 0.0 && self.ru.is_finite()) {
            return Err(RlsError::Config(format!("Ru must be non-negative, got {}", self.ru)));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(RlsError::Config(format!("lambda must lie in (0, 1], got {}", self.lambda)));
        }
        Ok(())
    }
}

impl Default for RlsConfig {
    fn default() -> Self {
        Self::pid()
    }
}

/// Gains, covariance and the regressor/input history feeding `G_f`.
///
/// Histories are ordered most recent first and zero-padded before time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    pub theta: DVector<f64>,
    pub p: DMatrix<f64>,
    phi_history: VecDeque<DVector<f64>>,
    u_history: VecDeque<f64>,
    filter: FirFilter,
    pub lambda: f64,
}

impl RlsState {
    pub fn new(cfg: &RlsConfig) -> Result<Self, RlsError> {
        cfg.validate()?;
        let n = cfg.filter.order();
        Ok(Self {
            theta: cfg.theta0.clone(),
            p: DMatrix::identity(cfg.l_theta, cfg.l_theta) * cfg.p0_scale,
            phi_history: std::iter::repeat_n(DVector::zeros(cfg.l_theta), n).collect(),
            u_history: std::iter::repeat_n(0.0, n).collect(),
            filter: cfg.filter.clone(),
            lambda: cfg.lambda,
        })
    }

    pub fn l_theta(&self) -> usize {
        self.theta.len()
    }

    /// `(Phi_{k-i}, u_{k-i})` for `i = 1..=n_f`.
    pub fn history(&self) -> impl Iterator<Item = (&DVector<f64>, f64)> {
        self.phi_history.iter().zip(self.u_history.iter().copied())
    }

    /// Gain and covariance update from `z_k` and `Phi_k`, without advancing
    /// the histories. Returns `theta_{k+1}`, `P_{k+1}`.
    pub fn update(&self, z: f64, phi: &DVector<f64>, cfg: &RlsConfig) -> Result<RlsState, RlsError> {
        let l = self.l_theta();
        if phi.len() != l {
            return Err(RlsError::Dimension {
                expected: l,
                got: phi.len(),
            });
        }
        let (phi_f, u_f) = filtered_signals(self);
        let lambda = self.lambda;

        // Stacked regressor rows [Phi_f; Phi] and weights diag(Rz, Ru).
        let mut stacked = DMatrix::zeros(2, l);
        stacked.row_mut(0).copy_from(&phi_f.transpose());
        stacked.row_mut(1).copy_from(&phi.transpose());
        let weights = Matrix2::new(cfg.rz, 0.0, 0.0, cfg.ru);

        // P+ = (P - P S^T (lambda I + R S P S^T)^-1 R S P) / lambda, which stays
        // finite when Ru = 0.
        let ps_t = &self.p * stacked.transpose();
        let sps = &stacked * &ps_t;
        let sps = Matrix2::new(sps[(0, 0)], sps[(0, 1)], sps[(1, 0)], sps[(1, 1)]);
        let innovation = Matrix2::identity() * lambda + weights * sps;
        let inv = innovation
            .try_inverse()
            .ok_or(RlsError::SingularInnovation {
                condition: f64::INFINITY,
            })?;
        let condition = innovation.norm() * inv.norm();
        if !condition.is_finite() || condition > MAX_INNOVATION_CONDITION {
            return Err(RlsError::SingularInnovation { condition });
        }
        let gain_core = inv * weights;
        let gain_core = DMatrix::from_column_slice(2, 2, gain_core.as_slice());
        let mut p_next = (&self.p - &ps_t * gain_core * ps_t.transpose()) / lambda;
        p_next = (&p_next + p_next.transpose()) * 0.5;

        let residual = z + phi_f.dot(&self.theta) - u_f;
        let penalty = phi.dot(&self.theta);
        let grad = Vector2::new(cfg.rz * residual, cfg.ru * penalty);
        let theta_next = &self.theta - &p_next * (stacked.transpose() * DVector::from_column_slice(grad.as_slice()));

        Ok(RlsState {
            theta: theta_next,
            p: p_next,
            phi_history: self.phi_history.clone(),
            u_history: self.u_history.clone(),
            filter: self.filter.clone(),
            lambda,
        })
    }

    /// Shifts `(Phi_k, u_k)` into the filter histories.
    pub fn push(&mut self, phi: DVector<f64>, u: f64) {
        self.phi_history.pop_back();
        self.phi_history.push_front(phi);
        self.u_history.pop_back();
        self.u_history.push_front(u);
    }
}

/// `Phi_f,k = sum_i N_i Phi_{k-i}` and `u_f,k = sum_i N_i u_{k-i}`.
pub fn filtered_signals(state: &RlsState) -> (DVector<f64>, f64) {
    let mut phi_f = DVector::zeros(state.l_theta());
    let mut u_f = 0.0;
    for (n, (phi, u)) in state.filter.coefficients.iter().zip(state.history()) {
        phi_f.axpy(*n, phi, 1.0);
        u_f += n * u;
    }
    (phi_f, u_f)
}

/// One full recursive step: gain/covariance update from `(z_k, Phi_k)`, then
/// `(Phi_k, u_k)` enters the histories.
pub fn rls_step(
    state: &RlsState,
    z: f64,
    phi: &DVector<f64>,
    u: f64,
    cfg: &RlsConfig,
) -> Result<RlsState, RlsError> {
    let mut next = state.update(z, phi, cfg)?;
    next.push(phi.clone(), u);
    Ok(next)
}

/// Adaptive signal `u = Phi theta`.
pub fn compute_u(phi: &DVector<f64>, theta: &DVector<f64>) -> f64 {
    phi.dot(theta)
}

/// One term of the retrospective cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrospectiveRecord {
    pub z: f64,
    pub phi: DVector<f64>,
    pub u: f64,
    pub phi_f: DVector<f64>,
    pub u_f: f64,
}

fn p0_inverse(cfg: &RlsConfig) -> DMatrix<f64> {
    DMatrix::identity(cfg.l_theta, cfg.l_theta) / cfg.p0_scale
}

/// Direct evaluation of `J_k(theta)` over `records[0..=k]`.
pub fn batch_cost(theta: &DVector<f64>, records: &[RetrospectiveRecord], cfg: &RlsConfig) -> f64 {
    let k = records.len();
    let mut cost = 0.0;
    for (i, r) in records.iter().enumerate() {
        let w = cfg.lambda.powi((k - 1 - i) as i32);
        let zhat = r.z + r.phi_f.dot(theta) - r.u_f;
        let ctrl = r.phi.dot(theta);
        cost += w * (zhat * cfg.rz * zhat + ctrl * cfg.ru * ctrl);
    }
    let d = theta - &cfg.theta0;
    cost + cfg.lambda.powi(k as i32) * (d.transpose() * p0_inverse(cfg) * &d)[(0, 0)]
}

/// Minimizer of [`batch_cost`] from the normal equations.
pub fn batch_minimizer(records: &[RetrospectiveRecord], cfg: &RlsConfig) -> Option<DVector<f64>> {
    let k = records.len();
    let reg = p0_inverse(cfg) * cfg.lambda.powi(k as i32);
    let mut hessian = reg.clone();
    let mut rhs = &reg * &cfg.theta0;
    for (i, r) in records.iter().enumerate() {
        let w = cfg.lambda.powi((k - 1 - i) as i32);
        hessian += (&r.phi_f * r.phi_f.transpose()) * (w * cfg.rz) + (&r.phi * r.phi.transpose()) * (w * cfg.ru);
        rhs -= &r.phi_f * (w * cfg.rz * (r.z - r.u_f));
    }
    hessian.cholesky().map(|c| c.solve(&rhs))
}
