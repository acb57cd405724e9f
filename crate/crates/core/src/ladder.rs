//! Two-band Wannier–Stark ladder of Floquet synthetic levels.
//!
//! Levels `|±, n⟩` sit at `E = ±ω₀/2 + nω`. Writing `A sin(ωt) σx` as
//! `(A/2i)(e^{iωt} − e^{−iωt}) σx`, the drive couples `|β, n⟩` to
//! `|α, n+1⟩` with amplitude `−i (A/2) ⟨α|σx|β⟩`, where in the static
//! eigenbasis `⟨±|σx|±⟩ = ±sin θ` and `⟨+|σx|−⟩ = cos θ`. Truncating `n` gives
//! a finite Hermitian matrix whose spectrum reproduces the quasienergies.

use crate::dynamics::DriveParams;
use crate::error::{Error, Result};
use crate::floquet::{eigenbasis, resonance_window};
use crate::optimize::golden_min;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Default truncation `n ∈ [−5, 5]`.
pub const DEFAULT_N_RANGE: (i32, i32) = (-5, 5);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    #[serde(rename = "+")]
    Upper,
    #[serde(rename = "-")]
    Lower,
}

impl Band {
    pub fn sign(self) -> f64 {
        match self {
            Band::Upper => 1.0,
            Band::Lower => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Band::Upper => '+',
            Band::Lower => '-',
        }
    }

    fn offset(self) -> usize {
        match self {
            Band::Upper => 0,
            Band::Lower => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderLevel {
    pub band: Band,
    pub n: i32,
    /// `±ω₀/2 + nω`, rad/s.
    pub energy: f64,
}

/// Truncated ladder with its effective Hamiltonian.
#[derive(Clone, Debug)]
pub struct LadderModel {
    pub n_min: i32,
    pub n_max: i32,
    pub levels: Vec<LadderLevel>,
    /// Full effective Hamiltonian: level energies on the diagonal, drive
    /// couplings off the diagonal.
    pub hamiltonian: DMatrix<C64>,
    /// `(A/2ω₀)Δx`, the intra-band coupling magnitude.
    pub intra_coupling: f64,
    /// `(A/2ω₀)|Δz|`, the inter-band coupling magnitude.
    pub inter_coupling: f64,
}

/// Splitting of the two levels that become degenerate at an order-`m`
/// resonance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairSplitting {
    /// Dressed eigenvalues of the pair, ascending.
    pub eigenvalues: [f64; 2],
    /// Bare energies of `|+, p⟩` and `|−, p+m⟩`.
    pub bare: [f64; 2],
    pub splitting: f64,
}

impl LadderModel {
    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn index(&self, band: Band, n: i32) -> Option<usize> {
        (self.n_min..=self.n_max)
            .contains(&n)
            .then(|| 2 * (n - self.n_min) as usize + band.offset())
    }

    /// Matrix element `⟨a|H|b⟩` between two levels.
    pub fn coupling(&self, a: (Band, i32), b: (Band, i32)) -> Option<C64> {
        Some(self.hamiltonian[(self.index(a.0, a.1)?, self.index(b.0, b.1)?)])
    }

    /// The pair `|+, p⟩`, `|−, p+m⟩` with `p = −⌊m/2⌋`; for `m = 2` this is
    /// `|+, −1⟩`, `|−, 1⟩` and for `m = 3` it is `|+, −1⟩`, `|−, 2⟩`.
    pub fn resonant_pair(m: u32) -> ((Band, i32), (Band, i32)) {
        let p = -((m / 2) as i32);
        ((Band::Upper, p), (Band::Lower, p + m as i32))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.hamiltonian.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Diagonalizes the ladder and returns the splitting of the resonant
    /// pair. The two dressed states are picked by their weight on the pair,
    /// not by energy order.
    pub fn resonant_splitting(&self, m: u32) -> Result<PairSplitting> {
        let (a, b) = Self::resonant_pair(m);
        let (ia, ib) = match (self.index(a.0, a.1), self.index(b.0, b.1)) {
            (Some(ia), Some(ib)) => (ia, ib),
            _ => {
                return Err(Error::PreconditionViolated(format!(
                    "ladder range [{}, {}] does not contain the order-{m} pair",
                    self.n_min, self.n_max
                )))
            }
        };
        let eig = SymmetricEigen::new(self.hamiltonian.clone());
        let mut weighted: Vec<(f64, f64)> = (0..self.dim())
            .map(|k| {
                let v = eig.eigenvectors.column(k);
                (v[ia].norm_sqr() + v[ib].norm_sqr(), eig.eigenvalues[k])
            })
            .collect();
        weighted.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut pair = [weighted[0].1, weighted[1].1];
        pair.sort_by(f64::total_cmp);
        Ok(PairSplitting {
            eigenvalues: pair,
            bare: [self.levels[ia].energy, self.levels[ib].energy],
            splitting: pair[1] - pair[0],
        })
    }
}

/// Builds the truncated ladder for an unmodulated drive.
pub fn ladder_model(params: &DriveParams, n_min: i32, n_max: i32) -> Result<LadderModel> {
    params.validate()?;
    if n_max - n_min < 2 {
        return Err(Error::PreconditionViolated(format!(
            "ladder range [{n_min}, {n_max}] must span at least 2"
        )));
    }
    if params.is_modulated() {
        return Err(Error::PreconditionViolated(
            "the single-frequency ladder does not describe a phase-modulated drive".into(),
        ));
    }
    let basis = eigenbasis(params)?;
    let (s, c) = basis.theta.sin_cos();
    // ⟨α|σx|β⟩ in the (+, −) basis
    let sx = [[s, c], [c, -s]];
    let half_a = 0.5 * params.amp_a;

    let levels: Vec<LadderLevel> = (n_min..=n_max)
        .flat_map(|n| {
            [Band::Upper, Band::Lower].map(|band| LadderLevel {
                band,
                n,
                energy: band.sign() * 0.5 * basis.omega0 + n as f64 * params.omega,
            })
        })
        .collect();
    let dim = levels.len();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for (i, l) in levels.iter().enumerate() {
        h[(i, i)] = C64::new(l.energy, 0.0);
    }
    for n in n_min..n_max {
        for alpha in [Band::Upper, Band::Lower] {
            for beta in [Band::Upper, Band::Lower] {
                let up = 2 * (n + 1 - n_min) as usize + alpha.offset();
                let down = 2 * (n - n_min) as usize + beta.offset();
                let g = C64::new(0.0, -half_a * sx[alpha.offset()][beta.offset()]);
                h[(up, down)] = g;
                h[(down, up)] = g.conj();
            }
        }
    }
    Ok(LadderModel {
        n_min,
        n_max,
        levels,
        hamiltonian: h,
        intra_coupling: half_a * params.delta_x / basis.omega0,
        inter_coupling: half_a * params.delta_z.abs() / basis.omega0,
    })
}

/// Raman Rabi frequency from the ladder: the smallest splitting of the
/// resonant pair as ω is scanned through the order-`m` resonance window.
/// Returns `(ω_res, Ω_F)`.
pub fn ladder_min_splitting(params: &DriveParams, m: u32, n_range: (i32, i32)) -> Result<(f64, f64)> {
    let (lo, hi) = resonance_window(params, m)?;
    let xtol = 1e-8 * params.omega0();
    golden_min(
        |w| ladder_model(&params.with_omega(w), n_range.0, n_range.1)?.resonant_splitting(m).map(|p| p.splitting),
        lo,
        hi,
        xtol,
    )
}
