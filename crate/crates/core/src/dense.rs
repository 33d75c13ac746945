//! Full-space oracle: the `2^n × 2^n` device Hamiltonian and its exact
//! propagator.
//!
//! The matrix is assembled orbit by orbit from the explicit sum
//! `H_ab = (1/ℓ) Σ_k E_k e^{2πi(a−b)k/ℓ}` over member indices `a, b`. The
//! propagator never uses that structure: it splits the matrix into the
//! connected components of its nonzero pattern and diagonalises each block
//! with a generic Hermitian eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::dynamics::{PhaseConvention, Propagator};
use crate::error::{Error, Result};
use crate::orbit::{orbit_representatives, rotate_index, ApparatusSpec};
use crate::state::{Basis, SectorState};

/// Default ceiling on `n` for anything dense (state dimension 4096).
pub const DEFAULT_DENSE_CAP: usize = 12;

#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    spec: ApparatusSpec,
    matrix: DMatrix<Complex64>,
}

/// Member indices of every orbit, each list starting at the canonical
/// representative and following the shift.
pub fn dense_orbits(n: usize) -> Vec<Vec<usize>> {
    orbit_representatives(n)
        .into_iter()
        .map(|rep| {
            let mut members = vec![rep];
            let mut x = rotate_index(rep, n);
            while x != rep {
                members.push(x);
                x = rotate_index(x, n);
            }
            members
        })
        .collect()
}

pub fn build_dense_hamiltonian(spec: ApparatusSpec) -> Result<DenseHamiltonian> {
    build_dense_hamiltonian_capped(spec, DEFAULT_DENSE_CAP)
}

pub fn build_dense_hamiltonian_capped(spec: ApparatusSpec, cap: usize) -> Result<DenseHamiltonian> {
    let n = spec.n();
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for members in dense_orbits(n) {
        let l = members.len();
        let energy = |k: usize| (k * (n / l)) as f64 * spec.h_n();
        for (a, &ia) in members.iter().enumerate() {
            for (b, &ib) in members.iter().enumerate() {
                let d = a as f64 - b as f64;
                let entry: Complex64 = (0..l)
                    .map(|k| Complex64::from_polar(energy(k), std::f64::consts::TAU * d * k as f64 / l as f64))
                    .sum();
                matrix[(ia, ib)] = entry / l as f64;
            }
        }
    }
    Ok(DenseHamiltonian { spec, matrix })
}

impl DenseHamiltonian {
    pub fn spec(&self) -> &ApparatusSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |H − H†|`.
    pub fn self_adjoint_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Sorted eigenvalues of the principal submatrix on `indices`.
    pub fn block_spectrum(&self, indices: &[usize]) -> Vec<f64> {
        let block = self.submatrix(indices);
        let mut eig: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    fn submatrix(&self, indices: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
            self.matrix[(indices[r], indices[c])]
        })
    }

    /// Index sets of the connected components of the nonzero pattern.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let dim = self.dim();
        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if self.matrix[(i, j)] != Complex64::new(0.0, 0.0) || self.matrix[(j, i)] != Complex64::new(0.0, 0.0) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for i in 0..dim {
            let r = find(&mut parent, i);
            by_root[r].push(i);
        }
        by_root.into_iter().filter(|b| !b.is_empty()).collect()
    }
}

struct EigenBlock {
    indices: Vec<usize>,
    vectors: DMatrix<Complex64>,
    values: Vec<f64>,
}

/// `U(t) = exp(−i·s·t·H/h_n)` with `s` from the [`PhaseConvention`].
pub struct DensePropagator {
    spec: ApparatusSpec,
    convention: PhaseConvention,
    blocks: Vec<EigenBlock>,
}

impl DensePropagator {
    pub fn new(hamiltonian: &DenseHamiltonian) -> Self {
        let blocks = hamiltonian
            .blocks()
            .into_iter()
            .map(|indices| {
                let eig = SymmetricEigen::new(hamiltonian.submatrix(&indices));
                EigenBlock {
                    indices,
                    vectors: eig.eigenvectors,
                    values: eig.eigenvalues.iter().copied().collect(),
                }
            })
            .collect();
        Self {
            spec: *hamiltonian.spec(),
            convention: PhaseConvention::Standard,
            blocks,
        }
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn evolve_amplitudes(&self, amplitudes: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.spec.n();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let angle = self.convention.scale() * t / self.spec.h_n();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for block in &self.blocks {
            let local = DVector::from_iterator(block.indices.len(), block.indices.iter().map(|&i| amplitudes[i]));
            let mut coeffs = block.vectors.adjoint() * local;
            for (c, &e) in coeffs.iter_mut().zip(&block.values) {
                *c *= Complex64::from_polar(1.0, -angle * e);
            }
            let back = &block.vectors * coeffs;
            for (&i, v) in block.indices.iter().zip(back.iter()) {
                out[i] = *v;
            }
        }
        Ok(out)
    }
}

impl Propagator for DensePropagator {
    fn n(&self) -> usize {
        self.spec.n()
    }

    fn evolve(&self, state: &SectorState, t: f64) -> Result<SectorState> {
        match state.basis() {
            Basis::Dense { n } if *n == self.spec.n() => {
                Ok(state.with_amplitudes(self.evolve_amplitudes(state.amplitudes(), t)?))
            }
            Basis::Dense { n } => Err(Error::DimensionMismatch {
                expected: 1 << self.spec.n(),
                found: 1 << n,
            }),
            Basis::Orbit(_) => Err(Error::MixedRepresentation),
        }
    }
}

/// Evolves a dense state under `hamiltonian`. Builds the eigen-blocks on every
/// call; reuse a [`DensePropagator`] for repeated evolution.
pub fn evolve_dense(state: &SectorState, t: f64, hamiltonian: &DenseHamiltonian) -> Result<SectorState> {
    DensePropagator::new(hamiltonian).evolve(state, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{make_cocked_pattern, Pattern};
    use crate::state::norm_sqr;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_site_spectrum() {
        let spec = ApparatusSpec::with_size(2).unwrap();
        let h = build_dense_hamiltonian(spec).unwrap();
        assert_eq!(h.dim(), 4);
        // fixed points 00 and 11 have zero energy
        assert_eq!(h.matrix()[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(h.matrix()[(3, 3)], Complex64::new(0.0, 0.0));
        let spectrum = h.block_spectrum(&[1, 2]);
        assert!(spectrum[0].abs() < 1e-14);
        assert!((spectrum[1] - spec.h_n()).abs() < 1e-14);
        let mut all = h.block_spectrum(&[0, 1, 2, 3]);
        all.retain(|e| e.abs() > 1e-12);
        assert_eq!(all.len(), 1);
    }

    #[test]
    fn full_orbits_carry_the_ladder_spectrum() {
        let spec = ApparatusSpec::with_size(5).unwrap();
        let h = build_dense_hamiltonian(spec).unwrap();
        let full: Vec<_> = dense_orbits(5).into_iter().filter(|m| m.len() == 5).collect();
        assert_eq!(full.len(), 6);
        for members in full {
            let spectrum = h.block_spectrum(&members);
            for (k, e) in spectrum.iter().enumerate() {
                assert!((e - k as f64 * spec.h_n()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn self_adjoint() {
        for n in [2, 3, 5, 7] {
            let h = build_dense_hamiltonian(ApparatusSpec::with_size(n).unwrap()).unwrap();
            assert!(h.self_adjoint_deviation() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn blocks_recover_orbits() {
        let h = build_dense_hamiltonian(ApparatusSpec::with_size(6).unwrap()).unwrap();
        let mut found: Vec<Vec<usize>> = h.blocks();
        // fixed points give singleton blocks; the rest are the nontrivial orbits
        let mut expected: Vec<Vec<usize>> = dense_orbits(6)
            .into_iter()
            .map(|mut m| {
                m.sort();
                m
            })
            .collect();
        found.sort();
        expected.sort();
        assert_eq!(found, expected);
    }

    #[test]
    fn cap_enforced() {
        let spec = ApparatusSpec::with_size(13).unwrap();
        assert_eq!(
            build_dense_hamiltonian(spec).unwrap_err(),
            Error::DenseCapExceeded { n: 13, cap: 12 }
        );
    }

    #[test]
    fn repeated_permutation_oracle() {
        for n in [3, 5, 6, 7] {
            let spec = ApparatusSpec::with_size(n).unwrap();
            let prop = DensePropagator::new(&build_dense_hamiltonian(spec).unwrap());
            let start = make_cocked_pattern(n).unwrap();
            let s = SectorState::dense_basis_vector(&start);
            let mut expected = start.clone();
            for m in 0..=n {
                let out = prop.evolve(&s, m as f64 / n as f64).unwrap();
                let target = expected.to_index();
                let off: f64 = out
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != target)
                    .map(|(_, c)| c.norm_sqr())
                    .sum();
                assert!((out.amplitudes()[target].norm() - 1.0).abs() < 1e-12, "n={n} m={m}");
                assert!(off < 1e-20, "n={n} m={m} off={off}");
                expected = expected.shift();
            }
        }
    }

    #[test]
    fn unitary_and_identity_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = ApparatusSpec::with_size(7).unwrap();
        let h = build_dense_hamiltonian(spec).unwrap();
        let prop = DensePropagator::new(&h);
        let raw: Vec<Complex64> = (0..128)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let s = SectorState::normalized(Basis::Dense { n: 7 }, raw).unwrap();
        let same = prop.evolve(&s, 0.0).unwrap();
        let diff = same
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-13);
        for _ in 0..20 {
            let t = rng.random_range(-2.0..2.0);
            let out = evolve_dense(&s, t, &h).unwrap();
            assert!((norm_sqr(out.amplitudes()).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let prop = DensePropagator::new(&build_dense_hamiltonian(ApparatusSpec::with_size(3).unwrap()).unwrap());
        let s = SectorState::dense_basis_vector(&Pattern::zeros(4).unwrap());
        assert!(matches!(prop.evolve(&s, 0.1), Err(Error::DimensionMismatch { .. })));
        assert!(prop.evolve_amplitudes(&[Complex64::new(1.0, 0.0)], 0.0).is_err());
    }
}
