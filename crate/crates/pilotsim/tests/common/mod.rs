//! Helpers shared by the integration tests: random instances and literal dense oracles.
#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;

use pilotsim::channel::{sample_paths, stats_from_paths, AngleRange, ArrayConfig};
use pilotsim::pilot::{build_scheme, PilotScheme, Scenario};
use pilotsim::random::{derive_stream, Stream};
use pilotsim::{CMatrix, Stats, C64};

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn random_matrix(rng: &mut Stream, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `X Xᴴ + shift·I`.
pub fn random_pd(rng: &mut Stream, n: usize, shift: f64) -> CMatrix {
    let x = random_matrix(rng, n, n);
    let mut a = x.mul_adjoint(&x).unwrap();
    a.add_diagonal(c(shift, 0.0));
    a.hermitian_part()
}

/// Gauss-Jordan inverse with partial pivoting, kept apart from the library solvers.
pub fn dense_inverse(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut w: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        a[(i, j)]
                    } else if j - n == i {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| w[x][col].norm().total_cmp(&w[y][col].norm()))
            .unwrap();
        w.swap(col, pivot);
        let p = w[col][col];
        assert!(p.norm() > 1e-300, "singular oracle system");
        for v in w[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = w[r][col];
                if f != c(0.0, 0.0) {
                    let src = w[col].clone();
                    for (v, s) in w[r].iter_mut().zip(src) {
                        *v -= f * s;
                    }
                }
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| w[i][j + n])
}

/// Naive triple loop.
pub fn naive_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.cols(), b.rows());
    CMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|p| a[(i, p)] * b[(p, j)]).sum()
    })
}

/// Column-stacking vectorization by index.
pub fn naive_vec(a: &CMatrix) -> CMatrix {
    let (r, cols) = a.shape();
    CMatrix::from_fn(r * cols, 1, |i, _| a[(i % r, i / r)])
}

/// `R = γ A Aᴴ` with `A[(m + M n), ℓ] = conj(U[n, ℓ]) B[m, ℓ]`, assembled entry by entry.
pub fn dense_covariance(st: &Stats) -> CMatrix {
    let (b, u) = (st.bs_steering(), st.ue_steering());
    let (m, n, l) = (b.rows(), u.rows(), b.cols());
    let a = CMatrix::from_fn(m * n, l, |i, p| u[(i / m, p)].conj() * b[(i % m, p)]);
    naive_mul(&a, &a.adjoint()).scale_real(st.gain_variance())
}

/// `P̆ᴴ = Xᵀ ⊗ Wᴴ` for transmitted block `X` (N × T) and combiner `W` (M × w), by index.
pub fn dense_pilot_adjoint(x: &CMatrix, w: &CMatrix) -> CMatrix {
    let (n, t) = x.shape();
    let (m, width) = w.shape();
    CMatrix::from_fn(t * width, n * m, |row, col| {
        x[(col / m, row / width)] * w[(col % m, row % width)].conj()
    })
}

/// Literal MMSE of `vec(H_k)` from `vec(Y_k)`: returns (estimate M × N, error covariance MN × MN).
pub fn dense_mmse(
    scheme: &PilotScheme<f64>,
    stats: &[Stats],
    y: &CMatrix,
    sigma_z_sq: f64,
    k: usize,
) -> (CMatrix, CMatrix) {
    let w = scheme.combiner(k).to_matrix();
    let r_k = dense_covariance(&stats[k]);
    let t = scheme.pilot_length();
    let mut sigma = CMatrix::zeros(t * w.cols(), t * w.cols());
    for (j, st) in stats.iter().enumerate() {
        let ph = dense_pilot_adjoint(scheme.transmitted(j), &w);
        let term = naive_mul(&naive_mul(&ph, &dense_covariance(st)), &ph.adjoint());
        sigma = sigma.add(&term).unwrap();
    }
    let wtw = naive_mul(&w.adjoint(), &w);
    let noise = CMatrix::from_fn(t * w.cols(), t * w.cols(), |i, j| {
        if i / w.cols() == j / w.cols() {
            wtw[(i % w.cols(), j % w.cols())] * sigma_z_sq
        } else {
            c(0.0, 0.0)
        }
    });
    sigma = sigma.add(&noise).unwrap();
    let ph_kk = dense_pilot_adjoint(scheme.transmitted(k), &w);
    let gain = naive_mul(&naive_mul(&r_k, &ph_kk.adjoint()), &dense_inverse(&sigma));
    let vec_h = naive_mul(&gain, &naive_vec(y));
    let (m, n) = (stats[k].bs_antennas(), stats[k].ue_antennas());
    let estimate = CMatrix::from_fn(m, n, |i, j| vec_h[(i + m * j, 0)]);
    let error = r_k.sub(&naive_mul(&naive_mul(&gain, &ph_kk), &r_k)).unwrap();
    (estimate, error)
}

/// Per-UE statistics for ULAs with default angle ranges.
pub fn ula_stats(seed: u64, realization: u64, m: usize, n: usize, l: usize, sigmas: &[f64]) -> Vec<Stats> {
    let mut rng = derive_stream(seed, realization, 0);
    let (cb, cu) = (ArrayConfig::ula(m), ArrayConfig::ula(n));
    sigmas
        .iter()
        .map(|&s| {
            let p = sample_paths(
                &mut rng,
                l,
                AngleRange::default_arrival(),
                AngleRange::default_departure(),
                s,
            )
            .unwrap();
            stats_from_paths(&cb, &cu, &p).unwrap()
        })
        .collect()
}

/// A small random problem with `M·N·K ≤ 64`.
pub struct Instance {
    pub scheme: PilotScheme<f64>,
    pub stats: Vec<Stats>,
    pub sigma_z_sq: f64,
    pub received: Vec<CMatrix>,
}

pub fn small_instance(scenario: Scenario, seed: u64) -> Instance {
    let mut rng = derive_stream(seed, 99, 7);
    loop {
        let k = rng.random_range(1..=3usize);
        let l = rng.random_range(1..=2usize);
        let n = rng.random_range(l..=3usize);
        let m = rng.random_range(l.max(2)..=8usize);
        if m * n * k > 64 {
            continue;
        }
        let t = match scenario {
            Scenario::NPuC => k * n,
            Scenario::PuC => k * l,
            Scenario::PC => rng.random_range(1..=l),
        };
        let sigmas: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..2.0)).collect();
        let stats = ula_stats(seed, 3, m, n, l, &sigmas);
        let rho = rng.random_range(0.1..5.0);
        let sigma_z_sq = rng.random_range(0.2..2.0);
        let scheme = build_scheme(scenario, k, n, l, t, rho, &stats).unwrap();
        let received = (0..k)
            .map(|u| random_matrix(&mut rng, scheme.combiner(u).output_dim(), t))
            .collect();
        return Instance {
            scheme,
            stats,
            sigma_z_sq,
            received,
        };
    }
}
