//! Oscillator basis centred at z = 0 and the quasi-1D dipolar profile.

use faer::Mat;
use std::f64::consts::{PI, SQRT_2};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::special::{erfc_fraction, erfcx, gauss_legendre};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpatialBasis {
    pub n_max: usize,
}

impl SpatialBasis {
    pub fn new(n_max: usize) -> Self {
        SpatialBasis { n_max }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn values_at(&self, z: f64) -> Vec<f64> {
        hermite_functions(self.n_max, z)
    }
}

/// ψ₀(z) … ψ_{n_max}(z), normalised oscillator eigenfunctions.
///
/// Upward recurrence on the Gaussian-free part with a running log scale, so
/// neither the polynomial nor the Gaussian overflow separately.
pub fn hermite_functions(n_max: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    let gauss = -0.5 * z * z;
    let mut p0 = PI.powf(-0.25);
    let mut log_scale = 0.0;
    out[0] = p0 * gauss.exp();
    if n_max == 0 {
        return out;
    }
    let mut p1 = SQRT_2 * z * p0;
    out[1] = p1 * gauss.exp();
    const BIG: f64 = 1e150;
    for n in 2..=n_max {
        let nf = n as f64;
        let mut p2 = (2.0 / nf).sqrt() * z * p1 - ((nf - 1.0) / nf).sqrt() * p0;
        if p2.abs() > BIG {
            p2 /= BIG;
            p1 /= BIG;
            log_scale += BIG.ln();
        }
        out[n] = p2 * (gauss + log_scale).exp();
        p0 = p1;
        p1 = p2;
    }
    out
}

pub fn ho_wavefunction(n: usize, z: f64) -> f64 {
    hermite_functions(n, z)[n]
}

/// ⟨n|p²/2 + (z−a)²/2|n′⟩ in ħω, a in a_ho.
pub fn trap_element(n: usize, n_prime: usize, a: f64) -> f64 {
    if n == n_prime {
        n as f64 + 0.5 + 0.5 * a * a
    } else if n == n_prime + 1 {
        -a / SQRT_2 * (n_prime as f64 + 1.0).sqrt()
    } else if n + 1 == n_prime {
        -a / SQRT_2 * (n_prime as f64).sqrt()
    } else {
        0.0
    }
}

pub fn trap_matrix(n_max: usize, a: f64) -> Mat<f64> {
    let d = n_max + 1;
    Mat::from_fn(d, d, |r, c| trap_element(r, c, a))
}

/// Regular part of the effective quasi-1D dipolar profile,
/// −2|u| + √(2π)(1+u²) e^{u²/2} erfc(|u|/√2).
pub fn v_profile(u: f64) -> f64 {
    let x = u.abs() / SQRT_2;
    if x < 4.0 {
        return -2.0 * u.abs() + (2.0 * PI).sqrt() * (1.0 + u * u) * erfcx(x);
    }
    // with F = x + ½/(x + 1/G) the cancelling −2|u| drops out exactly
    let g = erfc_fraction(x, 3);
    let f = x + 0.5 / (x + 1.0 / g);
    SQRT_2 / ((x * g + 1.0) * f)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub order: usize,
    pub initial_width: f64,
    pub max_depth: u32,
    /// Panel bisections allowed before refinement stops.
    pub max_panels: usize,
    pub include_delta: bool,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-9,
            order: 16,
            initial_width: 0.5,
            max_depth: 24,
            max_panels: 1 << 16,
            include_delta: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpatialCoupling {
    /// ⟨n| f(z/l_⊥) |n′⟩.
    pub matrix: Mat<f64>,
    pub n_max: usize,
    pub lperp: f64,
    pub tolerance: f64,
    pub delta_included: bool,
    /// Largest absolute entry error estimate from the panel refinement.
    pub achieved_error: f64,
}

struct PanelRule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl PanelRule {
    /// Σ w f(z/l) ψψᵀ over [lo, hi].
    fn integrate(&self, n_max: usize, lperp: f64, lo: f64, hi: f64) -> Vec<f64> {
        let d = n_max + 1;
        let mut acc = vec![0.0; d * d];
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in self.x.iter().zip(&self.w) {
            let z = mid + half * x;
            let psi = hermite_functions(n_max, z);
            let wf = w * half * v_profile(z / lperp);
            if wf == 0.0 {
                continue;
            }
            for r in 0..d {
                let pr = wf * psi[r];
                if pr == 0.0 {
                    continue;
                }
                // parity: only n+n' even survives the mirrored integral
                let row = &mut acc[r * d..(r + 1) * d];
                for c in (r % 2..=r).step_by(2) {
                    row[c] += pr * psi[c];
                }
            }
        }
        acc
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> (f64, usize) {
    let mut worst = (0.0, 0);
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let e = (x - y).abs();
        if e > worst.0 {
            worst = (e, i);
        }
    }
    worst
}

/// Matrix of the effective profile between oscillator states, delta term
/// −(8/3) l_⊥ ψ_n(0)ψ_{n′}(0) included when requested.
///
/// The integrand is even in z for n+n′ even and odd otherwise, so the
/// adaptive panels cover [0, L] and the result is doubled.
pub fn spatial_coupling(
    basis: SpatialBasis,
    lperp: f64,
    opts: &QuadratureOptions,
) -> Result<SpatialCoupling> {
    if !(lperp.is_finite() && lperp > 0.0) {
        return Err(Error::invalid(
            "lperp_over_aho",
            format!("must be positive, got {lperp}"),
        ));
    }
    let n_max = basis.n_max;
    let d = n_max + 1;
    let (x, w) = gauss_legendre(opts.order);
    let rule = PanelRule { x, w };
    let length = (8.0 * (n_max as f64).sqrt()).max(40.0);

    let n_init = (length / opts.initial_width).ceil() as usize;
    let edges: Vec<f64> = (0..=n_init)
        .map(|i| length * i as f64 / n_init as f64)
        .collect();
    let coarse: Vec<Vec<f64>> = edges
        .windows(2)
        .map(|e| rule.integrate(n_max, lperp, e[0], e[1]))
        .collect();
    let mut scale = 0.0f64;
    {
        let mut sum = vec![0.0; d * d];
        for c in &coarse {
            for (s, v) in sum.iter_mut().zip(c) {
                *s += v;
            }
        }
        for v in &sum {
            scale = scale.max(v.abs());
        }
    }
    let budget = opts.rel_tol * scale.max(1e-300);

    let mut total = vec![0.0; d * d];
    let mut err_total = 0.0;
    let mut worst_entry = 0usize;
    let mut worst_err = 0.0;
    let mut stack: Vec<(f64, f64, u32, Vec<f64>)> = edges
        .windows(2)
        .zip(coarse)
        .map(|(e, c)| (e[0], e[1], 0, c))
        .rev()
        .collect();
    let mut panels = 0usize;
    while let Some((lo, hi, depth, whole)) = stack.pop() {
        panels += 1;
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(n_max, lperp, lo, mid);
        let right = rule.integrate(n_max, lperp, mid, hi);
        let fine: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a + b).collect();
        let (err, at) = max_abs_diff(&whole, &fine);
        let allowed = budget * (hi - lo) / length;
        if err <= allowed || depth >= opts.max_depth || panels >= opts.max_panels {
            for (t, v) in total.iter_mut().zip(&fine) {
                *t += v;
            }
            err_total += err;
            if err > worst_err {
                worst_err = err;
                worst_entry = at;
            }
        } else {
            stack.push((mid, hi, depth + 1, right));
            stack.push((lo, mid, depth + 1, left));
        }
    }
    if err_total > budget {
        return Err(Error::Quadrature {
            n: worst_entry / d,
            n_prime: worst_entry % d,
            achieved: err_total / scale,
            requested: opts.rel_tol,
        });
    }

    let psi0 = hermite_functions(n_max, 0.0);
    let delta = if opts.include_delta {
        -8.0 / 3.0 * lperp
    } else {
        0.0
    };
    let matrix = Mat::from_fn(d, d, |r, c| {
        let (hi, lo) = if r >= c { (r, c) } else { (c, r) };
        2.0 * total[hi * d + lo] + delta * psi0[r] * psi0[c]
    });
    Ok(SpatialCoupling {
        matrix,
        n_max,
        lperp,
        tolerance: opts.rel_tol,
        delta_included: opts.include_delta,
        achieved_error: 2.0 * err_total,
    })
}

const CACHE_MAGIC: &[u8; 8] = b"TWZSPC01";

impl SpatialCoupling {
    /// Little-endian binary: magic, n_max (u32), l_⊥, tolerance (f64),
    /// delta flag (u8), achieved error (f64), then (n_max+1)² f64 row-major.
    pub fn write_to(&self, mut out: impl Write) -> std::io::Result<()> {
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&(self.n_max as u32).to_le_bytes())?;
        out.write_all(&self.lperp.to_le_bytes())?;
        out.write_all(&self.tolerance.to_le_bytes())?;
        out.write_all(&[self.delta_included as u8])?;
        out.write_all(&self.achieved_error.to_le_bytes())?;
        let d = self.n_max + 1;
        for r in 0..d {
            for c in 0..d {
                out.write_all(&self.matrix[(r, c)].to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(mut inp: impl Read, path: &Path) -> Result<Self> {
        let bad = |reason: &str| Error::Format {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        };
        let io = |e| Error::io(path, e);
        let mut magic = [0u8; 8];
        inp.read_exact(&mut magic).map_err(io)?;
        if &magic != CACHE_MAGIC {
            return Err(bad("not a spatial-coupling cache file"));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        let mut b1 = [0u8; 1];
        inp.read_exact(&mut b4).map_err(io)?;
        let n_max = u32::from_le_bytes(b4) as usize;
        let mut f64_next = |inp: &mut dyn Read| -> Result<f64> {
            inp.read_exact(&mut b8).map_err(io)?;
            Ok(f64::from_le_bytes(b8))
        };
        let lperp = f64_next(&mut inp)?;
        let tolerance = f64_next(&mut inp)?;
        inp.read_exact(&mut b1).map_err(io)?;
        let achieved_error = f64_next(&mut inp)?;
        let d = n_max + 1;
        let mut vals = vec![0.0; d * d];
        for v in vals.iter_mut() {
            *v = f64_next(&mut inp)?;
        }
        Ok(SpatialCoupling {
            matrix: Mat::from_fn(d, d, |r, c| vals[r * d + c]),
            n_max,
            lperp,
            tolerance,
            delta_included: b1[0] != 0,
            achieved_error,
        })
    }

    pub fn cache_file_name(n_max: usize, lperp: f64, opts: &QuadratureOptions) -> String {
        format!(
            "spatial_n{}_l{:016x}_t{:.0e}_d{}.bin",
            n_max,
            lperp.to_bits(),
            opts.rel_tol,
            opts.include_delta as u8
        )
    }
}

/// Reads the coupling from `dir` if cached, otherwise computes and stores it.
pub fn cached_spatial_coupling(
    dir: &Path,
    basis: SpatialBasis,
    lperp: f64,
    opts: &QuadratureOptions,
) -> Result<SpatialCoupling> {
    let path: PathBuf = dir.join(SpatialCoupling::cache_file_name(basis.n_max, lperp, opts));
    if let Ok(f) = std::fs::File::open(&path) {
        let s = SpatialCoupling::read_from(std::io::BufReader::new(f), &path)?;
        if s.n_max == basis.n_max && s.lperp == lperp && s.delta_included == opts.include_delta {
            return Ok(s);
        }
    }
    let s = spatial_coupling(basis, lperp, opts)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = path.with_extension("tmp");
    let f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    let mut w = std::io::BufWriter::new(f);
    s.write_to(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    Ok(s)
}
