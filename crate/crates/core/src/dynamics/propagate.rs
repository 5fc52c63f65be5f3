use faer::Mat;
use std::collections::HashMap;

use super::pulse::PulseSpec;
use super::C64;
use crate::assembly::EigenSystem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationSettings {
    /// Local error bound per step (max-norm on amplitudes).
    pub tolerance: f64,
    /// Steps are capped at resolution / ω_max.
    pub resolution: f64,
    /// |W̃_kl| above which a pair enters ω_max (ħω).
    pub coupling_threshold: f64,
    /// Blocks of W̃ below this fraction of max |W̃| are skipped.
    pub sparsity: f64,
    pub max_norm_drift: f64,
    pub max_steps: usize,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        PropagationSettings {
            tolerance: 1e-10,
            resolution: 0.05,
            coupling_threshold: 1e-12,
            sparsity: 1e-10,
            max_norm_drift: 1e-6,
            max_steps: 200_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Eigen-index in the field-free eigensystem.
    Eigenstate(usize),
    /// Amplitudes over the full eigenbasis.
    Amplitudes(Vec<C64>),
}

#[derive(Clone, Debug)]
pub struct PropagationResult {
    /// Seconds.
    pub times: Vec<f64>,
    /// Eigen-indices of the propagated states.
    pub active: Vec<usize>,
    pub energies: Vec<f64>,
    /// `amplitudes[t][i]`: interaction-picture amplitude of `active[i]`.
    pub amplitudes: Vec<Vec<C64>>,
    pub initial: InitialState,
    pub steps: usize,
}

impl PropagationResult {
    pub fn position(&self, eig_index: usize) -> Option<usize> {
        self.active.iter().position(|&k| k == eig_index)
    }

    pub fn initial_index(&self) -> Option<usize> {
        match self.initial {
            InitialState::Eigenstate(i) => Some(i),
            InitialState::Amplitudes(_) => None,
        }
    }

    /// c_k(t) for one eigenstate; zero if it was not propagated.
    pub fn amplitude(&self, eig_index: usize) -> Vec<C64> {
        match self.position(eig_index) {
            Some(i) => self.amplitudes.iter().map(|a| a[i]).collect(),
            None => vec![C64::new(0.0, 0.0); self.times.len()],
        }
    }

    pub fn population(&self, eig_index: usize) -> Vec<f64> {
        self.amplitude(eig_index)
            .iter()
            .map(|c| c.norm_sqr())
            .collect()
    }

    pub fn final_amplitudes(&self) -> &[C64] {
        self.amplitudes.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// max_t |Σ|c_k|² − 1|.
    pub fn norm_defect(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| (a.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// |c_k(t)|² time series for each requested eigen-index.
pub fn populations(result: &PropagationResult, indices: &[usize]) -> Result<Vec<Vec<f64>>> {
    indices
        .iter()
        .map(|&k| {
            result
                .position(k)
                .map(|_| result.population(k))
                .ok_or_else(|| Error::invalid("indices", format!("state {k} was not propagated")))
        })
        .collect()
}

struct Block {
    rows: (usize, usize),
    cols: (usize, usize),
    data: Vec<f64>,
}

/// Solves i dc_k/dτ = β(t) Σ_l W̃_kl e^{i(E_k−E_l)τ} c_l on a set of
/// field-free eigenstates, τ = ωt, with an adaptive Dormand–Prince 5(4)
/// scheme whose steps never exceed resolution/ω_max.
pub struct Propagator {
    omega: f64,
    active: Vec<usize>,
    energies: Vec<f64>,
    shifted: Vec<f64>,
    coupling: Mat<f64>,
    blocks: Vec<Block>,
    omega_max: f64,
    settings: PropagationSettings,
    lookup: HashMap<usize, usize>,
    full_dim: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Propagator {
    /// `w` is the field operator in the basis of `eig.vectors`; `groups`
    /// labels each active state (equal labels contiguous) so that vanishing
    /// blocks of W̃ can be skipped.
    pub fn new(
        eig: &EigenSystem,
        w: &Mat<f64>,
        omega: f64,
        active: &[usize],
        groups: Option<&[u32]>,
        settings: PropagationSettings,
    ) -> Result<Self> {
        let n = eig.dim();
        if w.nrows() != n || w.ncols() != n {
            return Err(Error::invalid(
                "w",
                format!("expected {n}x{n}, got {}x{}", w.nrows(), w.ncols()),
            ));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", "must be positive"));
        }
        let m = active.len();
        let mut lookup = HashMap::with_capacity(m);
        for (i, &k) in active.iter().enumerate() {
            if k >= n || lookup.insert(k, i).is_some() {
                return Err(Error::invalid(
                    "active",
                    format!("index {k} out of range or repeated"),
                ));
            }
        }
        if m == 0 {
            return Err(Error::invalid("active", "empty"));
        }
        let va = Mat::from_fn(n, m, |r, c| eig.vectors[(r, active[c])]);
        let wv = w * &va;
        let raw = va.transpose() * &wv;
        let coupling = Mat::from_fn(m, m, |r, c| 0.5 * (raw[(r, c)] + raw[(c, r)]));

        let energies: Vec<f64> = active.iter().map(|&k| eig.energies[k]).collect();
        let (lo, hi) = energies
            .iter()
            .fold((f64::MAX, f64::MIN), |(l, h), &e| (l.min(e), h.max(e)));
        let shifted: Vec<f64> = energies.iter().map(|e| e - 0.5 * (lo + hi)).collect();

        let mut omega_max = 0.0f64;
        let mut wmax = 0.0f64;
        for r in 0..m {
            for c in 0..m {
                let x = coupling[(r, c)].abs();
                wmax = wmax.max(x);
                if x > settings.coupling_threshold {
                    omega_max = omega_max.max((energies[r] - energies[c]).abs());
                }
            }
        }

        let labels: Vec<u32> = groups.map(|g| g.to_vec()).unwrap_or_else(|| vec![0; m]);
        if labels.len() != m {
            return Err(Error::invalid("groups", "length differs from active set"));
        }
        let mut ranges = Vec::new();
        let mut start = 0;
        for i in 1..=m {
            if i == m || labels[i] != labels[start] {
                ranges.push((start, i));
                start = i;
            }
        }
        let mut blocks = Vec::new();
        for &rows in &ranges {
            for &cols in &ranges {
                let mut big = 0.0f64;
                for r in rows.0..rows.1 {
                    for c in cols.0..cols.1 {
                        big = big.max(coupling[(r, c)].abs());
                    }
                }
                if big > settings.sparsity * wmax && big > 0.0 {
                    let mut data = Vec::with_capacity((rows.1 - rows.0) * (cols.1 - cols.0));
                    for r in rows.0..rows.1 {
                        for c in cols.0..cols.1 {
                            data.push(coupling[(r, c)]);
                        }
                    }
                    blocks.push(Block { rows, cols, data });
                }
            }
        }
        Ok(Propagator {
            omega,
            active: active.to_vec(),
            energies,
            shifted,
            coupling,
            blocks,
            omega_max,
            settings,
            lookup,
            full_dim: n,
        })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// W̃ on the active set, ħω.
    pub fn coupling(&self) -> &Mat<f64> {
        &self.coupling
    }

    /// Largest coupled transition frequency, units of ω.
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// Step cap in seconds.
    pub fn max_step(&self) -> f64 {
        if self.omega_max > 0.0 {
            self.settings.resolution / self.omega_max / self.omega
        } else {
            f64::INFINITY
        }
    }

    pub fn settings(&self) -> &PropagationSettings {
        &self.settings
    }

    /// Initial state restricted to the active set.
    pub fn initial_vector(&self, initial: &InitialState) -> Result<Vec<C64>> {
        let m = self.active.len();
        let mut c = vec![C64::new(0.0, 0.0); m];
        match initial {
            InitialState::Eigenstate(k) => {
                let i = self.lookup.get(k).ok_or_else(|| {
                    Error::invalid("initial", format!("state {k} is not in the active set"))
                })?;
                c[*i] = C64::new(1.0, 0.0);
            }
            InitialState::Amplitudes(v) => {
                if v.len() != self.full_dim {
                    return Err(Error::invalid(
                        "initial",
                        format!("expected {} amplitudes", self.full_dim),
                    ));
                }
                let total: f64 = v.iter().map(|x| x.norm_sqr()).sum();
                if (total - 1.0).abs() > 1e-8 {
                    return Err(Error::invalid(
                        "initial",
                        format!("norm² = {total}, expected 1"),
                    ));
                }
                let mut kept = 0.0;
                for (i, &k) in self.active.iter().enumerate() {
                    c[i] = v[k];
                    kept += v[k].norm_sqr();
                }
                if (total - kept).abs() > 1e-10 {
                    return Err(Error::invalid("initial", "weight outside the active set"));
                }
            }
        }
        Ok(c)
    }

    fn apply(&self, x: &[C64], y: &mut [C64], nb: usize) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for blk in &self.blocks {
            let nc = blk.cols.1 - blk.cols.0;
            for (ri, r) in (blk.rows.0..blk.rows.1).enumerate() {
                let row = &blk.data[ri * nc..(ri + 1) * nc];
                if nb == 1 {
                    let mut acc = C64::new(0.0, 0.0);
                    for (w, xc) in row.iter().zip(&x[blk.cols.0..blk.cols.1]) {
                        acc += xc * w;
                    }
                    y[r] += acc;
                } else {
                    let yr = &mut y[r * nb..(r + 1) * nb];
                    for (ci, w) in row.iter().enumerate() {
                        let c = blk.cols.0 + ci;
                        for (yv, xv) in yr.iter_mut().zip(&x[c * nb..(c + 1) * nb]) {
                            *yv += xv * w;
                        }
                    }
                }
            }
        }
    }

    /// dc/dτ at phase factors `ph` = e^{−iε τ}.
    fn rhs(
        &self,
        beta: f64,
        ph: &[C64],
        c: &[C64],
        out: &mut [C64],
        scratch: &mut [C64],
        nb: usize,
    ) {
        if beta == 0.0 {
            out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            return;
        }
        for (l, p) in ph.iter().enumerate() {
            for j in 0..nb {
                scratch[l * nb + j] = p * c[l * nb + j];
            }
        }
        self.apply(scratch, out, nb);
        let f = C64::new(0.0, -beta);
        for (l, p) in ph.iter().enumerate() {
            let g = f * p.conj();
            for j in 0..nb {
                out[l * nb + j] *= g;
            }
        }
    }

    /// Integrates `state` (active × nb, row-major) from t0 to t1 seconds.
    /// Backward integration (t1 < t0) is allowed.  Returns the step count.
    pub fn evolve(
        &self,
        beta: &dyn Fn(f64) -> f64,
        state: &mut [C64],
        nb: usize,
        t0: f64,
        t1: f64,
    ) -> Result<usize> {
        let m = self.active.len();
        assert_eq!(state.len(), m * nb);
        let (tau0, tau1) = (t0 * self.omega, t1 * self.omega);
        if tau0 == tau1 {
            return Ok(0);
        }
        let dir = (tau1 - tau0).signum();
        let span = (tau1 - tau0).abs();
        let cap = if self.omega_max > 0.0 {
            self.settings.resolution / self.omega_max
        } else {
            span
        };
        let tol = self.settings.tolerance;
        let mut h = cap.min(span);
        let mut t = tau0;
        let len = m * nb;
        let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); len]; 7];
        let mut tmp = vec![C64::new(0.0, 0.0); len];
        let mut y5 = vec![C64::new(0.0, 0.0); len];
        let mut scratch = vec![C64::new(0.0, 0.0); len];
        let mut base = vec![C64::new(0.0, 0.0); m];
        let mut ph = vec![C64::new(0.0, 0.0); m];
        let mut stage_factor: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0); m]; 7];
        let mut factor_h = f64::NAN;
        let phase_at = |tau: f64, out: &mut [C64]| {
            for (o, e) in out.iter_mut().zip(&self.shifted) {
                let (s, c) = (-e * tau).sin_cos();
                *o = C64::new(c, s);
            }
        };
        let beta_at = |tau: f64| beta(tau / self.omega);

        phase_at(t, &mut base);
        self.rhs(beta_at(t), &base, state, &mut k[0], &mut scratch, nb);
        let mut steps = 0usize;
        let mut last = false;
        while !last {
            if (tau1 - t).abs() <= h * (1.0 + 1e-12) {
                h = (tau1 - t).abs();
                last = true;
            }
            let hs = dir * h;
            if hs != factor_h {
                for (j, sf) in stage_factor.iter_mut().enumerate().skip(1) {
                    for (o, e) in sf.iter_mut().zip(&self.shifted) {
                        let (s, c) = (-e * C[j] * hs).sin_cos();
                        *o = C64::new(c, s);
                    }
                }
                factor_h = hs;
            }
            for j in 1..7 {
                tmp.copy_from_slice(state);
                for (i, a) in A[j].iter().enumerate().take(j) {
                    if *a != 0.0 {
                        let f = a * hs;
                        for (tv, kv) in tmp.iter_mut().zip(&k[i]) {
                            *tv += kv * f;
                        }
                    }
                }
                for ((p, b), s) in ph.iter_mut().zip(&base).zip(&stage_factor[j]) {
                    *p = b * s;
                }
                let (head, tail) = k.split_at_mut(j);
                let _ = head;
                self.rhs(
                    beta_at(t + C[j] * hs),
                    &ph,
                    &tmp,
                    &mut tail[0],
                    &mut scratch,
                    nb,
                );
                if j == 6 {
                    y5.copy_from_slice(&tmp);
                }
            }
            let mut err = 0.0f64;
            for i in 0..len {
                let mut e = C64::new(0.0, 0.0);
                for (j, ej) in E.iter().enumerate() {
                    if *ej != 0.0 {
                        e += k[j][i] * ej;
                    }
                }
                err = err.max((e * hs).norm());
            }
            steps += 1;
            if steps > self.settings.max_steps {
                return Err(Error::Propagation {
                    time: t / self.omega,
                    reason: format!("step limit {} exceeded", self.settings.max_steps),
                });
            }
            let grow = if err > 0.0 {
                0.9 * (tol / err).powf(0.2)
            } else {
                5.0
            };
            if err <= tol || h < 1e-14 * span {
                if !(err.is_finite()) {
                    return Err(Error::Propagation {
                        time: t / self.omega,
                        reason: "non-finite amplitudes".into(),
                    });
                }
                state.copy_from_slice(&y5);
                t += hs;
                k.swap(0, 6);
                if !last {
                    phase_at(t, &mut base);
                    h = (h * grow.clamp(0.2, 5.0)).min(cap);
                }
            } else {
                h *= grow.clamp(0.1, 0.9);
                last = false;
                if !err.is_finite() && h < 1e-14 * span {
                    return Err(Error::Propagation {
                        time: t / self.omega,
                        reason: "tolerance not reachable".into(),
                    });
                }
            }
        }
        Ok(steps)
    }

    pub fn run(
        &self,
        pulse: &PulseSpec,
        initial: &InitialState,
        sample_times: &[f64],
    ) -> Result<PropagationResult> {
        Ok(self
            .run_batch(pulse, std::slice::from_ref(initial), sample_times)?
            .remove(0))
    }

    /// Several initial states under the same pulse, propagated together.
    pub fn run_batch(
        &self,
        pulse: &PulseSpec,
        initials: &[InitialState],
        sample_times: &[f64],
    ) -> Result<Vec<PropagationResult>> {
        pulse.validate()?;
        let beta = |t: f64| pulse.value(t);
        self.run_with(&beta, pulse.tau, initials, sample_times)
    }

    /// As [`run_batch`](Self::run_batch) for an arbitrary field β(t) on [0, t_end].
    pub fn run_with(
        &self,
        beta: &dyn Fn(f64) -> f64,
        t_end: f64,
        initials: &[InitialState],
        sample_times: &[f64],
    ) -> Result<Vec<PropagationResult>> {
        if sample_times
            .iter()
            .any(|&t| !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)))
            || sample_times.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::invalid(
                "sample_times",
                "must be ascending within [0, tau]",
            ));
        }
        let m = self.active.len();
        let nb = initials.len();
        let mut state = vec![C64::new(0.0, 0.0); m * nb];
        for (j, init) in initials.iter().enumerate() {
            for (l, c) in self.initial_vector(init)?.into_iter().enumerate() {
                state[l * nb + j] = c;
            }
        }
        let mut out: Vec<PropagationResult> = initials
            .iter()
            .map(|init| PropagationResult {
                times: Vec::with_capacity(sample_times.len()),
                active: self.active.clone(),
                energies: self.energies.clone(),
                amplitudes: Vec::with_capacity(sample_times.len()),
                initial: init.clone(),
                steps: 0,
            })
            .collect();
        let mut t = 0.0;
        let mut steps = 0;
        for &ts in sample_times {
            steps += self.evolve(beta, &mut state, nb, t, ts)?;
            t = ts;
            for (j, res) in out.iter_mut().enumerate() {
                let amps: Vec<C64> = (0..m).map(|l| state[l * nb + j]).collect();
                let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
                if (norm - 1.0).abs() > self.settings.max_norm_drift {
                    return Err(Error::Propagation {
                        time: ts,
                        reason: format!(
                            "norm drift {:e} exceeds {:e}",
                            norm - 1.0,
                            self.settings.max_norm_drift
                        ),
                    });
                }
                res.times.push(ts);
                res.amplitudes.push(amps);
            }
        }
        for r in out.iter_mut() {
            r.steps = steps;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level(delta: f64, wc: f64) -> (EigenSystem, Mat<f64>) {
        let eig = EigenSystem {
            energies: vec![0.0, delta],
            vectors: Mat::identity(2, 2),
        };
        let w = Mat::from_fn(2, 2, |r, c| if r == c { 0.0 } else { wc });
        (eig, w)
    }

    #[test]
    fn zero_field_is_identity() {
        let (eig, w) = two_level(3.0, 0.7);
        let p = Propagator::new(&eig, &w, 1.0, &[0, 1], None, Default::default()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let init = InitialState::Amplitudes(vec![C64::new(s, 0.0), C64::new(0.0, s)]);
        let r = p
            .run(&PulseSpec::quench(0.0, 5.0), &init, &[0.0, 2.5, 5.0])
            .unwrap();
        for a in &r.amplitudes {
            assert_eq!(a[0], C64::new(s, 0.0));
            assert_eq!(a[1], C64::new(0.0, s));
        }
    }

    #[test]
    fn rabi_formula() {
        let (delta, wc, beta) = (2.0, 0.8, 0.9);
        let (eig, w) = two_level(delta, wc);
        let p = Propagator::new(&eig, &w, 1.0, &[0, 1], None, Default::default()).unwrap();
        let times: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
        let r = p
            .run(
                &PulseSpec::quench(beta, 10.0),
                &InitialState::Eigenstate(0),
                &times,
            )
            .unwrap();
        let g = beta * wc;
        let omega = (g * g + delta * delta / 4.0).sqrt();
        for (t, pop) in times.iter().zip(r.population(1)) {
            let want = g * g / (omega * omega) * (omega * t).sin().powi(2);
            assert!((pop - want).abs() < 1e-6, "{t}: {pop} vs {want}");
        }
        assert!(r.norm_defect() < 1e-8);
    }

    #[test]
    fn rejects_bad_initial_states() {
        let (eig, w) = two_level(1.0, 1.0);
        let p = Propagator::new(&eig, &w, 1.0, &[1], None, Default::default()).unwrap();
        assert!(p.initial_vector(&InitialState::Eigenstate(0)).is_err());
        let v = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(p.initial_vector(&InitialState::Amplitudes(v)).is_err());
        let v = vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)];
        assert!(p.initial_vector(&InitialState::Amplitudes(v)).is_err());
    }
}
