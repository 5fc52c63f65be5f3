use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::fidelity::{GateTarget, Objective};
use super::system::GateSystem;
use crate::dynamics::{EnvelopeMode, FourierTerm, PulseKind, PulseSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    pub max_iters: usize,
    /// Forward-difference step in scaled coordinates.
    pub fd_step: f64,
    /// First trial step length along the normalized gradient.
    pub initial_step: f64,
    pub shrink: f64,
    pub grow: f64,
    pub max_backtracks: usize,
    pub min_step: f64,
    /// Stop once the objective is at least this.
    pub target: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            max_iters: 50,
            fd_step: 1e-5,
            initial_step: 0.05,
            shrink: 0.5,
            grow: 2.0,
            max_backtracks: 6,
            min_step: 1e-7,
            target: 1.0 - 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxIterations,
    TargetReached,
    StepTooSmall,
    FlatGradient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Objective of the last trial point of this iteration.
    pub trial: f64,
    pub best: f64,
    pub step: f64,
    pub accepted: bool,
    /// Evaluations that failed during this iteration (scored as −∞).
    pub failures: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub best: f64,
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
    pub stop: StopReason,
}

/// Finite-difference gradient ascent with backtracking. `f` returning an
/// error scores −∞.
pub fn gradient_ascent<F>(mut f: F, x0: &[f64], settings: &OptimizerSettings) -> Outcome
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut evaluations = 0;
    let mut failures = 0;
    let mut eval = |x: &[f64], evaluations: &mut usize, failures: &mut usize| {
        *evaluations += 1;
        match f(x) {
            Ok(v) if v.is_finite() => v,
            _ => {
                *failures += 1;
                f64::NEG_INFINITY
            }
        }
    };
    let mut x = x0.to_vec();
    let mut best = eval(&x, &mut evaluations, &mut failures);
    let mut trace = vec![TraceEntry {
        iteration: 0,
        trial: best,
        best,
        step: 0.0,
        accepted: true,
        failures,
        evaluations,
    }];
    let mut step = settings.initial_step;
    let mut stop = StopReason::MaxIterations;
    for iteration in 1..=settings.max_iters {
        if best >= settings.target {
            stop = StopReason::TargetReached;
            break;
        }
        let (ev0, fail0) = (evaluations, failures);
        let h = settings.fd_step;
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let mut xp = x.clone();
            xp[i] += h;
            let v = eval(&xp, &mut evaluations, &mut failures);
            grad[i] = if v.is_finite() && best.is_finite() {
                (v - best) / h
            } else {
                0.0
            };
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            stop = StopReason::FlatGradient;
            trace.push(TraceEntry {
                iteration,
                trial: best,
                best,
                step: 0.0,
                accepted: false,
                failures: failures - fail0,
                evaluations: evaluations - ev0,
            });
            break;
        }
        let mut accepted = false;
        let mut trial = f64::NEG_INFINITY;
        for _ in 0..=settings.max_backtracks {
            let xt: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, g)| xi + step * g / gnorm)
                .collect();
            trial = eval(&xt, &mut evaluations, &mut failures);
            if trial > best {
                x = xt;
                best = trial;
                accepted = true;
                break;
            }
            step *= settings.shrink;
            if step < settings.min_step {
                break;
            }
        }
        trace.push(TraceEntry {
            iteration,
            trial,
            best,
            step,
            accepted,
            failures: failures - fail0,
            evaluations: evaluations - ev0,
        });
        if accepted {
            step *= settings.grow;
        } else if step < settings.min_step {
            stop = StopReason::StepTooSmall;
            break;
        }
    }
    if best >= settings.target {
        stop = StopReason::TargetReached;
    }
    Outcome {
        x,
        best,
        trace,
        evaluations,
        stop,
    }
}

/// Maps a CRAB pulse to scaled coordinates [β₀, A₁, B₁, ξ₁τ/π, A₂, …].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrabParametrization {
    pub tau: f64,
    pub terms: usize,
    pub mode: EnvelopeMode,
}

impl CrabParametrization {
    pub fn of(pulse: &PulseSpec) -> Self {
        CrabParametrization {
            tau: pulse.tau,
            terms: pulse.fourier.len(),
            mode: pulse.mode,
        }
    }

    pub fn len(&self) -> usize {
        1 + 3 * self.terms
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn encode(&self, pulse: &PulseSpec) -> Vec<f64> {
        let mut x = vec![pulse.beta0];
        for f in &pulse.fourier {
            x.extend([f.a, f.b, f.xi * self.tau / PI]);
        }
        x
    }

    pub fn decode(&self, x: &[f64]) -> PulseSpec {
        let fourier = x[1..]
            .chunks(3)
            .map(|c| FourierTerm {
                a: c[0],
                b: c[1],
                xi: c[2] * PI / self.tau,
            })
            .collect();
        PulseSpec {
            mode: self.mode,
            ..PulseSpec::crab(x[0], self.tau, fourier)
        }
    }
}

/// Plain sine start (A = B = 0) with seeded frequencies ξ_i = i·(π/τ)·(1 ± 0.2).
pub fn crab_start(beta0: f64, tau: f64, terms: usize, seed: u64) -> PulseSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fourier = (1..=terms)
        .map(|i| FourierTerm {
            a: 0.0,
            b: 0.0,
            xi: i as f64 * PI / tau * (1.0 + rng.gen_range(-0.2..=0.2)),
        })
        .collect();
    PulseSpec::crab(beta0, tau, fourier)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub objective: Objective,
    pub internal_fidelity: f64,
    pub full_fidelity: f64,
    pub pulse: PulseSpec,
    pub initial_pulse: PulseSpec,
    pub initial_internal: f64,
    pub initial_full: f64,
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
    pub stop: StopReason,
}

/// Optimizes the CRAB coefficients and β₀ of `initial` at fixed τ.
pub fn optimize(
    system: &GateSystem,
    initial: &PulseSpec,
    target: &GateTarget,
    objective: Objective,
    settings: &OptimizerSettings,
) -> Result<GateResult> {
    initial.validate()?;
    if initial.kind != PulseKind::Crab {
        return Err(Error::invalid(
            "PulseSpec.kind",
            "optimization needs a crab pulse",
        ));
    }
    let param = CrabParametrization::of(initial);
    let start = system.evaluate(initial, target)?;
    let pick = |e: &super::system::GateEvaluation| match objective {
        Objective::Internal => e.internal,
        Objective::Full => e.full,
    };
    let x0 = param.encode(initial);
    let outcome = gradient_ascent(
        |x| system.evaluate(&param.decode(x), target).map(|e| pick(&e)),
        &x0,
        settings,
    );
    let pulse = param.decode(&outcome.x);
    let end = system.evaluate(&pulse, target)?;
    Ok(GateResult {
        objective,
        internal_fidelity: end.internal,
        full_fidelity: end.full,
        pulse,
        initial_pulse: initial.clone(),
        initial_internal: start.internal,
        initial_full: start.full,
        trace: outcome.trace,
        evaluations: outcome.evaluations + 2,
        stop: outcome.stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::EigenSystem;
    use crate::dynamics::{InitialState, PropagationSettings, Propagator};
    use faer::Mat;

    fn toy() -> Propagator {
        let eig = EigenSystem {
            energies: vec![0.0, 3.0],
            vectors: Mat::identity(2, 2),
        };
        let mut w = Mat::zeros(2, 2);
        w[(0, 0)] = 2.0;
        w[(1, 1)] = -1.0;
        Propagator::new(&eig, &w, 1e6, &[0, 1], None, PropagationSettings::default()).unwrap()
    }

    fn pulse_area(p: &PulseSpec) -> f64 {
        // composite Simpson
        let n = 2000;
        let h = p.tau / n as f64;
        (0..=n)
            .map(|i| {
                let c = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * p.value(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0
    }

    #[test]
    fn toy_phase_target() {
        let prop = toy();
        let target = 1.0;
        let start = crab_start(0.1, 1e-6, 2, 7);
        let param = CrabParametrization::of(&start);
        let phase = |p: &PulseSpec| -> Result<f64> {
            let r = prop.run(p, &InitialState::Eigenstate(0), &[p.tau])?;
            Ok(r.final_amplitudes()[0].arg())
        };
        let fid = |x: &[f64]| phase(&param.decode(x)).map(|a| 0.5 * (1.0 + (a - target).cos()));
        let out = gradient_ascent(fid, &param.encode(&start), &OptimizerSettings::default());
        assert!(out.best > 0.99, "{:?}", out.trace.last());
        assert!(out.trace.len() <= 51);
        // pulse-area oracle: arg c = −2ω∫β dt
        let best = param.decode(&out.x);
        let predicted = -2.0 * 1e6 * pulse_area(&best);
        let got = phase(&best).unwrap();
        let diff = (got - predicted).rem_euclid(2.0 * PI);
        assert!(diff.min(2.0 * PI - diff) < 1e-6, "{got} {predicted}");
    }

    #[test]
    fn trace_is_monotone_and_deterministic() {
        let f = |x: &[f64]| {
            Ok(-(x[0] - 1.0).powi(2) - 2.0 * (x[1] + 0.5).powi(2) + (3.0 * x[0]).sin() * 0.1)
        };
        let s = OptimizerSettings {
            max_iters: 30,
            ..OptimizerSettings::default()
        };
        let a = gradient_ascent(f, &[0.0, 0.0], &s);
        let b = gradient_ascent(f, &[0.0, 0.0], &s);
        assert!(a.trace.windows(2).all(|w| w[1].best >= w[0].best));
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.x, b.x);
        assert!(a.best > a.trace[0].best);
    }

    #[test]
    fn zero_iterations_returns_start() {
        let s = OptimizerSettings {
            max_iters: 0,
            ..OptimizerSettings::default()
        };
        let out = gradient_ascent(|x: &[f64]| Ok(x[0]), &[0.25], &s);
        assert_eq!(out.x, vec![0.25]);
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.best, 0.25);
        assert_eq!(out.evaluations, 1);
    }

    #[test]
    fn failures_score_minus_infinity() {
        let f = |x: &[f64]| {
            if x[0] > 0.5 {
                Err(Error::Numerical("blow-up".into()))
            } else {
                Ok(x[0])
            }
        };
        let s = OptimizerSettings {
            max_iters: 20,
            initial_step: 0.4,
            ..OptimizerSettings::default()
        };
        let out = gradient_ascent(f, &[0.0], &s);
        assert!(out.x[0] <= 0.5);
        assert!(out.trace.iter().map(|e| e.failures).sum::<usize>() > 0);
        assert!(out.best.is_finite());
    }

    #[test]
    fn crab_start_is_seeded() {
        let a = crab_start(0.1, 150e-9, 3, 42);
        assert_eq!(a, crab_start(0.1, 150e-9, 3, 42));
        assert_ne!(a, crab_start(0.1, 150e-9, 3, 43));
        for (i, f) in a.fourier.iter().enumerate() {
            let h = (i + 1) as f64 * PI / 150e-9;
            assert!((f.xi / h - 1.0).abs() <= 0.2 + 1e-12);
            assert_eq!((f.a, f.b), (0.0, 0.0));
        }
        let sine = PulseSpec::sine(0.1, 150e-9);
        for t in [0.0, 20e-9, 75e-9, 149e-9] {
            assert_eq!(a.value(t), sine.value(t));
        }
        let p = CrabParametrization::of(&a);
        assert_eq!(p.len(), 10);
        let back = p.decode(&p.encode(&a));
        for (x, y) in back.fourier.iter().zip(&a.fourier) {
            assert!((x.xi / y.xi - 1.0).abs() < 1e-15);
        }
    }
}
