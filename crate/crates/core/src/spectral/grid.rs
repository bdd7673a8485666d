use serde::{Deserialize, Serialize};

/// Discretization of the torus `[0, 2π)²`.
///
/// A grid of bandwidth `K` represents the modes `k = (k1, k2)` with
/// `|k1|, |k2| ≤ K` on `M = 2K + 1` physical points per axis. `M` is always
/// odd, so every mode has its conjugate partner and there is no Nyquist mode.
///
/// Storage order (shared by spectral coefficients, physical samples and
/// binary snapshots): entry `a * M + b` holds axis-1 index `a` and axis-2
/// index `b`. Axis index `i` carries wavenumber `i` for `i ≤ K` and `i - M`
/// otherwise, i.e. the usual FFT ordering `0, 1, …, K, -K, …, -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    bandwidth: usize,
}

impl TorusGrid {
    pub fn new(bandwidth: usize) -> Self {
        Self { bandwidth }
    }

    /// Modal bandwidth `K`.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Physical points per axis, `M = 2K + 1`.
    pub fn points(&self) -> usize {
        2 * self.bandwidth + 1
    }

    /// Total number of stored coefficients, `M²`.
    pub fn len(&self) -> usize {
        self.points() * self.points()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber stored at axis index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        axis_wavenumber(i, self.points())
    }

    /// Axis index holding wavenumber `k`, if representable.
    pub fn axis_index(&self, k: i64) -> Option<usize> {
        let kk = self.bandwidth as i64;
        if k.abs() > kk {
            None
        } else {
            Some(axis_index(k, self.points()))
        }
    }

    /// Flat storage index of mode `k`, if representable.
    pub fn index_of(&self, k: [i64; 2]) -> Option<usize> {
        let a = self.axis_index(k[0])?;
        let b = self.axis_index(k[1])?;
        Some(a * self.points() + b)
    }

    /// Mode stored at flat index `idx`.
    pub fn mode_at(&self, idx: usize) -> [i64; 2] {
        let m = self.points();
        [self.wavenumber(idx / m), self.wavenumber(idx % m)]
    }

    /// Iterator over `(flat index, mode)` in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, [i64; 2])> + '_ {
        (0..self.len()).map(move |idx| (idx, self.mode_at(idx)))
    }

    pub fn contains(&self, k: [i64; 2]) -> bool {
        let kk = self.bandwidth as i64;
        k[0].abs() <= kk && k[1].abs() <= kk
    }
}

/// Wavenumber at index `i` of a length-`n` FFT axis.
pub(crate) fn axis_wavenumber(i: usize, n: usize) -> i64 {
    if 2 * i < n + 1 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Index of wavenumber `k` on a length-`n` FFT axis (`|k| < n / 2` assumed).
pub(crate) fn axis_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Squared Euclidean length of a mode.
pub fn mode_norm_sq(k: [i64; 2]) -> i64 {
    k[0] * k[0] + k[1] * k[1]
}
