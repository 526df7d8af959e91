//! Fading realizations drawn from [`ChannelStatistics`].

use rand::Rng;

use crate::rng::complex_normal;
use crate::scenario::ChannelStatistics;
use crate::{CMatrix, CVector, C64};

pub use crate::linalg::matrix_sqrt_psd;

/// One draw of every channel in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Stacked BS-IRS channel, `NL x M`.
    pub h: CMatrix,
    /// Diagonal of the IRS-user matrix: `conj(g_n)` stacked over IRSs.
    pub g_diag: CVector,
    /// Direct BS-user channel, length `M`.
    pub h_d: CVector,
    /// Cascaded channel `diag(g_diag) * h`, `NL x M`.
    pub z: CMatrix,
}

impl ChannelRealization {
    pub fn g_diag_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.g_diag)
    }

    /// IRS-user channel `g_n` of each IRS (un-conjugated).
    pub fn user_links(&self, l: usize) -> Vec<CVector> {
        self.g_diag
            .as_slice()
            .chunks(l)
            .map(|c| CVector::from_iterator(l, c.iter().map(|z| z.conj())))
            .collect()
    }

    /// Rows of `h` belonging to IRS `n` (`H_n`, `L x M`).
    pub fn bs_link(&self, n: usize, l: usize) -> CMatrix {
        self.h.rows(n * l, l).into_owned()
    }
}

/// Draws `H = Hbar + K1 R^{1/2} W`, `g_n` per IRS and `h_d ~ CN(0, I_M)`.
///
/// Columns of the scattered BS-IRS part are i.i.d. `CN(0, R)` (the `R (x) I_M`
/// covariance). Draw order is fixed: `W` row by row, then the scattered
/// IRS-user part, then `h_d`.
pub fn sample_channels<R: Rng + ?Sized>(stats: &ChannelStatistics, rng: &mut R) -> ChannelRealization {
    let (nl, m, l) = (stats.nl(), stats.m, stats.l);

    let mut w = CMatrix::zeros(nl, m);
    for i in 0..nl {
        for j in 0..m {
            w[(i, j)] = complex_normal(rng);
        }
    }
    let g_scatter: Vec<C64> = (0..nl).map(|_| complex_normal(rng)).collect();
    let h_d = CVector::from_fn(m, |_, _| complex_normal(rng));

    let mut h = stats.hbar.clone();
    for (n, block_sqrt) in stats.r_sqrt_blocks.iter().enumerate() {
        let rows = n * l;
        let w_block = w.rows(rows, l);
        let correlated = if stats.corr_r == 0.0 {
            w_block.into_owned()
        } else {
            block_sqrt * w_block
        };
        for i in 0..l {
            let scale = C64::new(stats.k1[rows + i], 0.0);
            for j in 0..m {
                h[(rows + i, j)] += scale * correlated[(i, j)];
            }
        }
    }

    let g_diag = CVector::from_fn(nl, |i, _| stats.gbar[i] + g_scatter[i].conj() * stats.k2[i]);

    let mut z = h.clone();
    for i in 0..nl {
        let gi = g_diag[i];
        for j in 0..m {
            z[(i, j)] *= gi;
        }
    }

    ChannelRealization { h, g_diag, h_d, z }
}
