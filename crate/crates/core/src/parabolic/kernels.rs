//! Cell-averaged heat and Duhamel kernels for piecewise-constant data.
//!
//! With `a = 2√(ετ)` and `D = d·h` the offset between target and source cells:
//! - heat: `A_τ(d) = δ_{d0} + Δ²R(D)/h`, `R(z) = (a/2) ierfc(|z|/a)`;
//! - `C0_τ(d) = ∫_0^τ (cell-averaged ∂_x G^ε)(σ) dσ`;
//! - `C1_τ(d) = ∫_0^τ σ (cell-averaged ∂_x G^ε)(σ) dσ`,
//!
//! where `Δ²` is the centred second difference with step `h`. A source value `f_k`
//! contributes `−C(j−k) f_k` to cell `j`.

use crate::numerics::{i2erfc, i4erfc, ierfc};

/// Weights `w[d + radius]` for offsets `d ∈ [−radius, radius]`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Kernel {
    pub radius: usize,
    pub w: Vec<f64>,
}

impl Kernel {
    pub fn zeros(radius: usize) -> Self {
        Self {
            radius,
            w: vec![0.0; 2 * radius + 1],
        }
    }

    pub fn at(&self, d: isize) -> f64 {
        let r = self.radius as isize;
        if d.abs() > r {
            0.0
        } else {
            self.w[(d + r) as usize]
        }
    }

    /// `a·self + b·other`, on the larger support.
    pub fn combine(&self, a: f64, other: &Kernel, b: f64) -> Kernel {
        let radius = self.radius.max(other.radius);
        let r = radius as isize;
        Kernel {
            radius,
            w: (-r..=r).map(|d| a * self.at(d) + b * other.at(d)).collect(),
        }
    }

    /// `out_j += scale · Σ_d w(d) f_{j−d}` where `padded` holds `f` with `pad ≥ radius`
    /// ghost cells on each side.
    pub fn apply_add(&self, out: &mut [f64], padded: &[f64], pad: usize, scale: f64) {
        let r = self.radius;
        debug_assert!(pad >= r && padded.len() == out.len() + 2 * pad);
        // reversed weights: s_j = Σ_i w[2r − i] · f[j − r + i]
        let rev: Vec<f64> = self.w.iter().rev().map(|v| v * scale).collect();
        let base = pad - r;
        for (j, o) in out.iter_mut().enumerate() {
            let window = &padded[base + j..base + j + 2 * r + 1];
            let mut s = 0.0;
            for (wi, fi) in rev.iter().zip(window) {
                s += wi * fi;
            }
            *o += s;
        }
    }
}

/// Copies `f` with `pad` constant-extension ghost cells on each side.
pub(crate) fn pad_constant(f: &[f64], pad: usize, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend(std::iter::repeat_n(f[0], pad));
    buf.extend_from_slice(f);
    buf.extend(std::iter::repeat_n(f[f.len() - 1], pad));
}

pub(crate) fn radius_for(eps: f64, tau: f64, h: f64, factor: f64) -> usize {
    ((factor * (eps * tau).sqrt() / h).ceil() as usize) + 1
}

fn second_difference(g: impl Fn(f64) -> f64, d: isize, h: f64) -> f64 {
    let dd = d as f64 * h;
    g(dd + h) - 2.0 * g(dd) + g(dd - h)
}

pub(crate) fn heat(eps: f64, tau: f64, h: f64, radius: usize) -> Kernel {
    let mut k = Kernel::zeros(radius);
    let r = radius as isize;
    if tau <= 0.0 {
        k.w[radius] = 1.0;
        return k;
    }
    let a = 2.0 * (eps * tau).sqrt();
    let big_r = |z: f64| 0.5 * a * ierfc(z.abs() / a);
    for d in -r..=r {
        let delta = if d == 0 { 1.0 } else { 0.0 };
        k.w[(d + r) as usize] = delta + second_difference(big_r, d, h) / h;
    }
    k
}

/// `(C0_τ, C1_τ)`.
pub(crate) fn duhamel(eps: f64, tau: f64, h: f64, radius: usize) -> (Kernel, Kernel) {
    let mut c0 = Kernel::zeros(radius);
    let mut c1 = Kernel::zeros(radius);
    if tau <= 0.0 {
        return (c0, c1);
    }
    let r = radius as isize;
    let a = 2.0 * (eps * tau).sqrt();
    // S0 = sign(z)·τ/2 − g0, S1 = sign(z)·τ²/4 − g1; Δ²sign is nonzero only at d = ±1
    let g0 = |z: f64| {
        z.signum()
            * (if z == 0.0 {
                0.0
            } else {
                2.0 * tau * i2erfc(z.abs() / a)
            })
    };
    let g1 = |z: f64| {
        if z == 0.0 {
            0.0
        } else {
            let s = z.abs() / a;
            z.signum() * 0.5 * (4.0 * tau * tau * i2erfc(s) - 16.0 * tau * tau * i4erfc(s))
        }
    };
    for d in -r..=r {
        let i = (d + r) as usize;
        let sign2 = -(d.signum() as f64) * if d.abs() == 1 { 1.0 } else { 0.0 };
        c0.w[i] = (0.5 * tau * sign2 - second_difference(g0, d, h)) / h;
        c1.w[i] = (0.25 * tau * tau * sign2 - second_difference(g1, d, h)) / h;
    }
    (c0, c1)
}

/// Weights for a source `f` that is linear in time on `[s_m, s_m + dt]`, seen from an
/// evaluation time `t = s_m + ell·dt` with `ell ≥ 1` or a partial interval `0 < ell < 1`.
///
/// Returns the kernels multiplying `f(s_m)` and `f(s_m + dt)`.
pub(crate) fn interval_weights(
    eps: f64,
    h: f64,
    dt: f64,
    ell: f64,
    factor: f64,
) -> (Kernel, Kernel) {
    let hi = ell * dt;
    let lo = ((ell - 1.0) * dt).max(0.0);
    let radius = radius_for(eps, hi, h, factor);
    let (c0h, c1h) = duhamel(eps, hi, h, radius);
    let (c0l, c1l) = duhamel(eps, lo, h, radius);
    let k0 = c0h.combine(1.0, &c0l, -1.0);
    let k1 = c1h.combine(1.0, &c1l, -1.0);
    // f(s) = f_m + (s − s_m)/dt (f_{m+1} − f_m) with σ = t − s
    let p = k0.combine(1.0 - ell, &k1, 1.0 / dt);
    let q = k0.combine(ell, &k1, -1.0 / dt);
    (p, q)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // ε = 0.1, h = 0.1, τ = 0.05, 30-digit reference values
    const A: [f64; 4] = [
        0.368_746_380_372_507_24,
        0.240_802_041_842_889_72,
        0.066_716_219_671_074_747,
        0.007_733_539_241_166_596,
    ];
    const C0: [f64; 4] = [
        0.0,
        -0.177_544_580_013_489_21,
        -0.032_002_882_497_608_906,
        -0.002_682_473_380_824_791,
    ];
    const C1: [f64; 4] = [
        0.0,
        -0.003_723_221_116_779_043_4,
        -0.001_091_644_399_069_507,
        -0.000_108_610_176_150_761_67,
    ];

    #[test]
    fn heat_kernel_reference_values() {
        let k = heat(0.1, 0.05, 0.1, 12);
        for (d, a) in A.iter().enumerate() {
            assert!((k.at(d as isize) - a).abs() < 1e-13, "d={d}");
            assert_eq!(k.at(d as isize), k.at(-(d as isize)));
        }
        let total: f64 = k.w.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn duhamel_reference_values() {
        let (c0, c1) = duhamel(0.1, 0.05, 0.1, 12);
        for d in 0..4 {
            let di = d as isize;
            assert!((c0.at(di) - C0[d]).abs() < 1e-13, "C0 d={d}: {}", c0.at(di));
            assert!((c1.at(di) - C1[d]).abs() < 1e-14, "C1 d={d}: {}", c1.at(di));
            assert_eq!(c0.at(di), -c0.at(-di));
            assert_eq!(c1.at(di), -c1.at(-di));
        }
    }

    #[test]
    fn constant_source_has_no_effect() {
        let (p, q) = interval_weights(0.2, 0.05, 0.01, 2.0, 10.0);
        assert!(p.w.iter().sum::<f64>().abs() < 1e-15);
        assert!(q.w.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn convolution_with_ghosts() {
        let k = Kernel {
            radius: 1,
            w: vec![0.25, 0.5, 0.25],
        };
        let f = [1.0, 2.0, 3.0];
        let mut buf = Vec::new();
        pad_constant(&f, 2, &mut buf);
        let mut out = [0.0; 3];
        k.apply_add(&mut out, &buf, 2, 1.0);
        assert_eq!(out, [1.25, 2.0, 2.75]);
    }

    #[test]
    fn antisymmetric_kernel_sign() {
        // d = j − k > 0 means target to the right of the source
        let k = Kernel {
            radius: 1,
            w: vec![0.0, 0.0, 1.0],
        };
        let f = [0.0, 1.0, 0.0, 0.0];
        let mut buf = Vec::new();
        pad_constant(&f, 1, &mut buf);
        let mut out = [0.0; 4];
        k.apply_add(&mut out, &buf, 1, 1.0);
        assert_eq!(out, [0.0, 0.0, 1.0, 0.0]);
    }
}
