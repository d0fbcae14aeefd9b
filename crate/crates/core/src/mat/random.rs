//! Seeded random matrix generation.
//!
//! All randomness in the crate flows from a single `u64` seed through
//! [`SeedSplitter`], which derives independent, reproducible streams
//! for named purposes. Two runs with the same seed produce identical
//! results; changing one consumer's draw count never perturbs another
//! stream.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::cmatrix::{re, ComplexMatrix, C64};
use super::linalg::eigh;

/// Derives independent deterministic RNG streams from one base seed.
#[derive(Debug, Clone, Copy)]
pub struct SeedSplitter {
    base: u64,
}

impl SeedSplitter {
    /// Wraps a base seed.
    pub fn new(base: u64) -> Self {
        Self { base }
    }

    /// The base seed.
    pub fn base(&self) -> u64 {
        self.base
    }

    /// A named stream: the same `(base, tag)` always yields the same
    /// generator.
    pub fn stream(&self, tag: &str) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(splitmix(self.base ^ fnv1a(tag.as_bytes())))
    }

    /// A named and indexed stream, for per-instance derivation inside
    /// loops.
    pub fn stream_indexed(&self, tag: &str, index: u64) -> ChaCha12Rng {
        let mixed = splitmix(self.base ^ fnv1a(tag.as_bytes())) ^ splitmix(index.wrapping_add(1));
        ChaCha12Rng::seed_from_u64(splitmix(mixed))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard normal sample via Box-Muller.
pub fn std_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Standard complex Gaussian entry (real and imaginary parts i.i.d.
/// normal with variance 1/2, so `E|z|^2 = 1`).
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    Complex::new(
        std_normal(rng) / f64::sqrt(2.0),
        std_normal(rng) / f64::sqrt(2.0),
    )
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed random unitary via QR of a Ginibre matrix with the
/// phase convention that makes the factor unique (positive real
/// diagonal of R).
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / re(d.norm()) } else { re(1.0) };
        let col = u.column(j) * phase.conj();
        u.set_column(j, &col);
    }
    u
}

/// Random Hermitian matrix from the Gaussian unitary ensemble, scaled
/// to operator norm 1.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let h = (&g + g.adjoint()).scale(0.5);
    let norm = h.clone().singular_values()[0];
    if norm > 0.0 {
        h.unscale(norm)
    } else {
        h
    }
}

/// Random density matrix (unit trace, PSD) from the Hilbert-Schmidt
/// ensemble: `G G^dagger / tr(G G^dagger)`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let m = &g * g.adjoint();
    let t: f64 = m.diagonal().iter().map(|x| x.re).sum();
    m.unscale(t)
}

/// Random rank-`rank` orthogonal projection: conjugates a coordinate
/// projection by a Haar unitary.
pub fn random_projection(dim: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(rank <= dim, "random_projection: rank exceeds dimension");
    let u = random_unitary(dim, rng);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for k in 0..rank {
        p[(k, k)] = re(1.0);
    }
    let out = &u * p * u.adjoint();
    (&out + out.adjoint()).scale(0.5)
}

/// Random Kraus family of a CPTP map `M_in -> M_out`: Ginibre draws
/// normalized by the inverse square root of `sum_i K_i^dagger K_i`.
pub fn random_kraus_family(
    dim_in: usize,
    dim_out: usize,
    n_kraus: usize,
    rng: &mut impl Rng,
) -> Vec<ComplexMatrix> {
    assert!(n_kraus > 0, "random_kraus_family: need at least one Kraus operator");
    let raw: Vec<ComplexMatrix> = (0..n_kraus).map(|_| ginibre(dim_out, dim_in, rng)).collect();
    let mut s = ComplexMatrix::zeros(dim_in, dim_in);
    for k in &raw {
        s += k.adjoint() * k;
    }
    // S is positive definite almost surely; form S^{-1/2} spectrally.
    let (vals, vecs) = eigh(&s);
    let inv_sqrt = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| re(1.0 / v.max(1e-300).sqrt())),
    ));
    let s_inv_sqrt = &vecs * inv_sqrt * vecs.adjoint();
    raw.into_iter().map(|k| k * &s_inv_sqrt).collect()
}
