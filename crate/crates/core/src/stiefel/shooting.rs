//! Log map by shooting.
//!
//! The pair is reduced to the span of its columns (padded to `min(n, 2p)`
//! dimensions), the initial velocity is parametrized as `x̃a + x̃⊥b` with `a`
//! skew and `b` free, and `‖exp_x̃(v) − ỹ‖_F` is driven to zero by
//! Levenberg–Marquardt with a forward-difference Jacobian. Several seeded
//! starts run independently; the shortest converged velocity wins.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exp::exp_raw;
use super::{project_raw, reduce_to_span, StiefelPoint, SubspaceReduction, TangentVector};
use crate::error::{Error, Result};
use crate::matcore::{complement_basis, solve, Matrix};
use crate::random::{gaussian_matrix, stream_rng};

/// Knobs for the shooting solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub max_iterations: usize,
    /// Endpoint residual `‖exp_x(v) − y‖_F` accepted as converged.
    pub residual_tol: f64,
    pub restarts: usize,
    pub rng_seed: u64,
    /// Forward-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            max_iterations: 200,
            residual_tol: 1e-10,
            restarts: 8,
            rng_seed: 0,
            fd_step: 1e-7,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iterations > 0
            && self.restarts > 0
            && self.residual_tol > 0.0
            && self.fd_step > 0.0;
        if !positive || !self.residual_tol.is_finite() || !self.fd_step.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shooting configuration must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Full result of a log-map solve.
#[derive(Debug, Clone)]
pub struct LogOutcome {
    /// Shortest converged initial velocity, at `x`.
    pub velocity: TangentVector,
    /// `‖exp_x(velocity) − y‖_F` in the ambient space.
    pub residual: f64,
    /// Number of starts that reached the residual tolerance.
    pub converged_runs: usize,
    /// Two converged velocities had norms within `1e-6` but directions more
    /// than `1e-3` apart: the pair is likely (near) the cut locus and the
    /// minimizer is not unique.
    pub ambiguous: bool,
    /// Dimension of the space the problem was solved in.
    pub reduced_dim: usize,
}

/// Initial velocity `v` with `exp_x(v) = y` of minimal norm among the
/// converged shooting runs.
pub fn stiefel_log(
    x: &StiefelPoint,
    y: &StiefelPoint,
    cfg: &ShootingConfig,
) -> Result<TangentVector> {
    stiefel_log_detailed(x, y, cfg).map(|o| o.velocity)
}

/// Geodesic distance, the norm of [`stiefel_log`].
pub fn stiefel_distance(x: &StiefelPoint, y: &StiefelPoint, cfg: &ShootingConfig) -> Result<f64> {
    stiefel_log(x, y, cfg).map(|v| v.norm())
}

pub fn stiefel_log_detailed(
    x: &StiefelPoint,
    y: &StiefelPoint,
    cfg: &ShootingConfig,
) -> Result<LogOutcome> {
    solve_log(x, y, None, Target::Frame, cfg)
}

/// Single horizontal shooting run from `initial` (ambient coordinates)
/// towards any frame spanning the columns of `y`. The returned velocity
/// satisfies `xᵀv = 0`; `residual` is `‖(I − yyᵀ)·exp_x(v)‖_F`.
pub(crate) fn shoot_to_span(
    x: &StiefelPoint,
    y: &StiefelPoint,
    initial: &Matrix,
    cfg: &ShootingConfig,
) -> Result<LogOutcome> {
    solve_log(x, y, Some(initial), Target::Span, cfg)
}

fn solve_log(
    x: &StiefelPoint,
    y: &StiefelPoint,
    initial: Option<&Matrix>,
    target: Target,
    cfg: &ShootingConfig,
) -> Result<LogOutcome> {
    cfg.validate()?;
    x.same_shape(y)?;
    let p = x.frame_dim();
    let red = reduce_to_span(x, y)?.padded(2 * p)?;
    let problem = Problem::new(&red, target)?;

    let starts: Vec<Vec<f64>> = match initial {
        Some(v0) => {
            if v0.shape() != x.matrix().shape() {
                return Err(Error::ShapeMismatch("initial velocity shape".into()));
            }
            let reduced = project_raw(problem.x.matrix(), &red.basis.tr_mul(v0));
            vec![problem.params_of(&reduced)]
        }
        None => problem.default_starts(cfg),
    };

    let runs: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|theta| problem.levenberg_marquardt(theta, cfg))
        .collect();

    let candidates: Vec<(usize, Matrix, f64)> = runs
        .iter()
        .enumerate()
        .filter(|(_, (_, res))| *res <= cfg.residual_tol)
        .map(|(i, (theta, _))| {
            let v = problem.velocity(theta);
            let norm = v.norm_fro();
            (i, v, norm)
        })
        .collect();

    let best_residual = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let Some(best) = candidates
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
    else {
        return Err(Error::NoConvergence { best_residual });
    };

    let ambiguous = candidates.iter().any(|(i, v, norm)| {
        *i != best.0 && (norm - best.2).abs() <= 1e-6 && direction_gap(v, &best.1) > 1e-3
    });

    let full = red.lift(&best.1);
    let (end, _) = exp_raw(x.matrix(), &full, 1.0);
    let residual = match target {
        Target::Frame => (&end - y.matrix()).norm_fro(),
        Target::Span => {
            let ym = y.matrix();
            (&end - &ym.matmul(&ym.tr_mul(&end))).norm_fro()
        }
    };
    if residual > 10.0 * cfg.residual_tol {
        return Err(Error::NoConvergence {
            best_residual: residual,
        });
    }
    Ok(LogOutcome {
        velocity: TangentVector::new_unchecked(x.clone(), full),
        residual,
        converged_runs: candidates.len(),
        ambiguous,
        reduced_dim: red.effective_dim(),
    })
}

fn direction_gap(a: &Matrix, b: &Matrix) -> f64 {
    let (na, nb) = (a.norm_fro(), b.norm_fro());
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { 2.0 };
    }
    (a.scale(1.0 / na) - b.scale(1.0 / nb)).norm_fro()
}

/// What the endpoint of the geodesic has to hit.
#[derive(Clone, Copy, PartialEq)]
enum Target {
    /// The frame `ỹ` itself; velocities range over the whole tangent space.
    Frame,
    /// Any frame spanning the columns of `ỹ`; velocities are horizontal
    /// (`x̃ᵀv = 0`) and the residual is `(I − ỹỹᵀ)·γ(1)`.
    Span,
}

/// The reduced shooting problem.
struct Problem {
    x: StiefelPoint,
    y: Matrix,
    normal: Option<Matrix>,
    p: usize,
    m: usize,
    target: Target,
}

impl Problem {
    fn new(red: &SubspaceReduction, target: Target) -> Result<Self> {
        let (m, p) = red.reduced_x.matrix().shape();
        let normal = if m > p {
            Some(complement_basis(red.reduced_x.matrix(), m - p)?)
        } else {
            None
        };
        Ok(Problem {
            x: red.reduced_x.clone(),
            y: red.reduced_y.matrix().clone(),
            normal,
            p,
            m,
            target,
        })
    }

    fn n_skew(&self) -> usize {
        match self.target {
            Target::Frame => self.p * (self.p - 1) / 2,
            Target::Span => 0,
        }
    }

    fn n_params(&self) -> usize {
        self.n_skew() + (self.m - self.p) * self.p
    }

    /// `x̃·a + x̃⊥·b` from the packed parameters.
    fn velocity(&self, theta: &[f64]) -> Matrix {
        let p = self.p;
        let mut a = Matrix::zeros(p, p);
        let mut k = 0;
        if self.target == Target::Frame {
            for i in 0..p {
                for j in i + 1..p {
                    a.set(i, j, theta[k]);
                    a.set(j, i, -theta[k]);
                    k += 1;
                }
            }
        }
        let mut v = self.x.matrix().matmul(&a);
        if let Some(normal) = &self.normal {
            let b = Matrix::from_vec(self.m - p, p, theta[k..].to_vec())
                .expect("parameter vector is finite");
            v = v + normal.matmul(&b);
        }
        v
    }

    fn params_of(&self, v: &Matrix) -> Vec<f64> {
        let p = self.p;
        let a = self.x.matrix().tr_mul(v).skew();
        let mut theta = Vec::with_capacity(self.n_params());
        if self.target == Target::Frame {
            for i in 0..p {
                for j in i + 1..p {
                    theta.push(a.get(i, j));
                }
            }
        }
        if let Some(normal) = &self.normal {
            theta.extend_from_slice(normal.tr_mul(v).data());
        }
        theta
    }

    fn residual(&self, theta: &[f64]) -> Vec<f64> {
        let v = self.velocity(theta);
        let (end, _) = exp_raw(self.x.matrix(), &v, 1.0);
        match self.target {
            Target::Frame => (&end - &self.y).into_data(),
            Target::Span => (&end - &self.y.matmul(&self.y.tr_mul(&end))).into_data(),
        }
    }

    /// Start 0 is the tangent projection of `ỹ − x̃`; start `k > 0` rescales
    /// it by a factor in `[0.5, 2]` and adds a random perturbation of
    /// velocity norm at most `0.5`, drawn from stream `k` of the seed.
    fn default_starts(&self, cfg: &ShootingConfig) -> Vec<Vec<f64>> {
        let diff = &self.y - self.x.matrix();
        let v0 = project_raw(self.x.matrix(), &diff);
        let theta0 = self.params_of(&v0);
        let d = theta0.len();
        (0..cfg.restarts)
            .map(|k| {
                if k == 0 || d == 0 {
                    return theta0.clone();
                }
                let mut rng = stream_rng(cfg.rng_seed, k as u64);
                let factor: f64 = rng.random_range(0.5..=2.0);
                let mag: f64 = rng.random_range(0.0..=0.5);
                let dir = gaussian_matrix(&mut rng, 1, d).into_data();
                let dir_norm = self.velocity(&dir).norm_fro();
                let step = if dir_norm > 0.0 { mag / dir_norm } else { 0.0 };
                theta0
                    .iter()
                    .zip(&dir)
                    .map(|(t, e)| factor * t + step * e)
                    .collect()
            })
            .collect()
    }

    /// Returns the final parameters and endpoint residual norm.
    fn levenberg_marquardt(&self, mut theta: Vec<f64>, cfg: &ShootingConfig) -> (Vec<f64>, f64) {
        let d = theta.len();
        let mut r = self.residual(&theta);
        let mut cost = norm(&r);
        if d == 0 {
            return (theta, cost);
        }
        let mut lambda = -1.0;
        let mut nu = 2.0;
        let mut polish_steps = 0;

        for _ in 0..cfg.max_iterations {
            if cost <= cfg.residual_tol {
                // a few extra steps push the residual well below tolerance
                polish_steps += 1;
                if polish_steps > 3 || cost <= 1e-4 * cfg.residual_tol {
                    break;
                }
            }
            let jac = self.jacobian(&theta, &r, cfg.fd_step);
            let jtj = jac.tr_mul(&jac);
            let rm = Matrix::column_vector(&r);
            let grad = jac.tr_mul(&rm);
            if grad.max_abs() == 0.0 {
                break;
            }
            if lambda < 0.0 {
                let dmax = (0..d).map(|i| jtj.get(i, i)).fold(0.0, f64::max);
                lambda = 1e-3 * if dmax > 0.0 { dmax } else { 1.0 };
            }

            let mut accepted = false;
            for _ in 0..40 {
                let mut lhs = jtj.clone();
                for i in 0..d {
                    *lhs.at_mut(i, i) += lambda;
                }
                let Ok(step) = solve(&lhs, &(-&grad)) else {
                    lambda *= nu;
                    nu *= 2.0;
                    continue;
                };
                let step = step.into_data();
                let theta_norm = norm(&theta);
                if norm(&step) <= 1e-15 * (theta_norm + 1e-15) {
                    break;
                }
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + s).collect();
                let r_trial = self.residual(&trial);
                let cost_trial = norm(&r_trial);
                let predicted: f64 = 0.5
                    * step
                        .iter()
                        .zip(grad.data())
                        .map(|(s, g)| s * (lambda * s - g))
                        .sum::<f64>();
                let actual = 0.5 * (cost * cost - cost_trial * cost_trial);
                if cost_trial < cost && predicted > 0.0 {
                    let rho = actual / predicted;
                    lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                    nu = 2.0;
                    theta = trial;
                    r = r_trial;
                    cost = cost_trial;
                    accepted = true;
                    break;
                }
                lambda *= nu;
                nu *= 2.0;
            }
            if !accepted {
                break;
            }
        }
        (theta, cost)
    }

    fn jacobian(&self, theta: &[f64], r0: &[f64], fd_step: f64) -> Matrix {
        let d = theta.len();
        let mut jac = Matrix::zeros(r0.len(), d);
        let mut probe = theta.to_vec();
        for j in 0..d {
            let h = fd_step * theta[j].abs().max(1.0);
            probe[j] = theta[j] + h;
            let r = self.residual(&probe);
            probe[j] = theta[j];
            for (i, (a, b)) in r.iter().zip(r0).enumerate() {
                jac.set(i, j, (a - b) / h);
            }
        }
        jac
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_stiefel, random_tangent};
    use crate::stiefel::stiefel_exp;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit(n: usize, i: usize) -> StiefelPoint {
        let mut m = Matrix::zeros(n, 1);
        m.set(i, 0, 1.0);
        StiefelPoint::new(m).unwrap()
    }

    #[test]
    fn log_of_same_point_is_zero() {
        let mut rng = stream_rng(30, 0);
        let x = random_stiefel(&mut rng, 8, 3);
        let v = stiefel_log(&x, &x, &ShootingConfig::default()).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn sphere_quarter_turn() {
        let cfg = ShootingConfig::default();
        let v = stiefel_log(&unit(3, 0), &unit(3, 1), &cfg).unwrap();
        assert!((v.norm() - FRAC_PI_2).abs() < 1e-9);
        assert!((v.matrix().get(1, 0) - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn antipodal_unit_vectors() {
        let cfg = ShootingConfig::default();
        let x = unit(3, 0);
        let y = StiefelPoint::new(x.matrix().scale(-1.0)).unwrap();
        let out = stiefel_log_detailed(&x, &y, &cfg).unwrap();
        assert!((out.velocity.norm() - PI).abs() < 1e-8);
        assert_eq!(out.reduced_dim, 2);
    }

    #[test]
    fn round_trip_small_velocity() {
        let mut rng = stream_rng(31, 0);
        let x = random_stiefel(&mut rng, 20, 2);
        let v = random_tangent(&mut rng, &x, 0.4);
        let y = stiefel_exp(&v, 1.0).0;
        let got = stiefel_log(&x, &y, &ShootingConfig::default()).unwrap();
        assert!((got.matrix() - v.matrix()).norm_fro() < 1e-7);
    }

    #[test]
    fn config_validation() {
        let cfg = ShootingConfig {
            restarts: 0,
            ..ShootingConfig::default()
        };
        let x = unit(3, 0);
        assert!(matches!(
            stiefel_log(&x, &x, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn no_convergence_is_reported() {
        let cfg = ShootingConfig {
            max_iterations: 1,
            restarts: 1,
            ..ShootingConfig::default()
        };
        let mut rng = stream_rng(32, 0);
        let x = random_stiefel(&mut rng, 6, 3);
        let y = random_stiefel(&mut rng, 6, 3);
        match stiefel_log(&x, &y, &cfg) {
            Err(Error::NoConvergence { best_residual }) => assert!(best_residual > 1e-10),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
