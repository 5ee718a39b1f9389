use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Integer wavevector. The third entry is always zero on a 2D torus.
pub type Wavevector = [i64; 3];

/// Periodic box `[0, L)^d` resolved by `M` Fourier modes per axis.
///
/// Wavevectors are integers `k` with `-M/2 < k_i <= M/2`; the physical
/// wavenumber is `(2π/L)·k`. Coefficients are stored in FFT order, with
/// the last axis contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusDomain {
    edge_length: f64,
    resolution: usize,
    dimension: usize,
}

impl TorusDomain {
    pub fn new(dimension: usize, resolution: usize, edge_length: f64) -> Result<Self, SpectralError> {
        if dimension != 2 && dimension != 3 {
            return Err(SpectralError::InvalidDomain(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        if resolution < 4 || !resolution.is_multiple_of(2) {
            return Err(SpectralError::InvalidDomain(format!(
                "resolution per axis must be even and at least 4, got {resolution}"
            )));
        }
        if !(edge_length.is_finite() && edge_length > 0.0) {
            return Err(SpectralError::InvalidDomain(format!(
                "edge length must be positive and finite, got {edge_length}"
            )));
        }
        Ok(Self {
            edge_length,
            resolution,
            dimension,
        })
    }

    /// The `2π`-periodic cube, where the first Stokes eigenvalue is 1.
    pub fn periodic_cube(resolution: usize) -> Result<Self, SpectralError> {
        Self::new(3, resolution, 2.0 * PI)
    }

    /// The `2π`-periodic square (fast 2D mode).
    pub fn periodic_square(resolution: usize) -> Result<Self, SpectralError> {
        Self::new(2, resolution, 2.0 * PI)
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Grid points (equivalently, stored wavevectors) per scalar component.
    pub fn n_points(&self) -> usize {
        self.resolution.pow(self.dimension as u32)
    }

    /// Factor converting integer wavevectors into physical wavenumbers.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.edge_length
    }

    /// Smallest eigenvalue of the Stokes operator on zero-mean fields.
    pub fn lambda1(&self) -> f64 {
        self.wavenumber_scale().powi(2)
    }

    /// Measure of the torus, `L^d`. Norms are `volume · Σ|û_k|²`.
    pub fn volume(&self) -> f64 {
        self.edge_length.powi(self.dimension as i32)
    }

    /// Quadrature weight of one grid cell, `(L/M)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.n_points() as f64
    }

    pub fn grid_spacing(&self) -> f64 {
        self.edge_length / self.resolution as f64
    }

    /// Largest `|k_i|` kept by the two-thirds rule.
    pub fn dealias_limit(&self) -> i64 {
        (self.resolution / 3) as i64
    }

    fn axis_wavenumber(&self, i: usize) -> i64 {
        let m = self.resolution;
        if i <= m / 2 {
            i as i64
        } else {
            i as i64 - m as i64
        }
    }

    fn axis_index(&self, k: i64) -> Option<usize> {
        let half = (self.resolution / 2) as i64;
        if k <= -half || k > half {
            return None;
        }
        Some(k.rem_euclid(self.resolution as i64) as usize)
    }

    /// Wavevector stored at flat index `idx`.
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        let m = self.resolution;
        match self.dimension {
            2 => [self.axis_wavenumber(idx / m), self.axis_wavenumber(idx % m), 0],
            _ => [
                self.axis_wavenumber(idx / (m * m)),
                self.axis_wavenumber((idx / m) % m),
                self.axis_wavenumber(idx % m),
            ],
        }
    }

    /// Flat index of `k`, or `None` when `k` is outside the stored range.
    pub fn index_of(&self, k: Wavevector) -> Option<usize> {
        let m = self.resolution;
        let ix = self.axis_index(k[0])?;
        let iy = self.axis_index(k[1])?;
        if self.dimension == 2 {
            return if k[2] == 0 { Some(ix * m + iy) } else { None };
        }
        let iz = self.axis_index(k[2])?;
        Some((ix * m + iy) * m + iz)
    }

    /// Flat index of `-k`. Nyquist entries map onto themselves.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let m = self.resolution;
        let neg = |i: usize| (m - i) % m;
        match self.dimension {
            2 => neg(idx / m) * m + neg(idx % m),
            _ => (neg(idx / (m * m)) * m + neg((idx / m) % m)) * m + neg(idx % m),
        }
    }

    /// Flat index of `-k` for a stored `k`, without integer division.
    pub(crate) fn conjugate_of(&self, k: Wavevector) -> usize {
        let m = self.resolution;
        let neg = |ki: i64| if ki <= 0 { (-ki) as usize } else { m - ki as usize };
        match self.dimension {
            2 => neg(k[0]) * m + neg(k[1]),
            _ => (neg(k[0]) * m + neg(k[1])) * m + neg(k[2]),
        }
    }

    /// True if some component of `k` sits on the Nyquist plane `k_i = M/2`.
    pub fn is_nyquist(&self, k: Wavevector) -> bool {
        let half = (self.resolution / 2) as i64;
        k[..self.dimension].contains(&half)
    }

    /// Nonzero wavevectors that survive two-thirds dealiasing.
    pub fn is_resolved(&self, k: Wavevector) -> bool {
        let lim = self.dealias_limit();
        k != [0, 0, 0] && k.iter().all(|ki| ki.abs() <= lim)
    }

    /// Integer `|k|²`.
    pub fn k_squared(&self, k: Wavevector) -> i64 {
        k.iter().map(|ki| ki * ki).sum()
    }

    /// Stokes eigenvalue `(2π/L)²|k|²` of the Fourier mode `k`.
    pub fn stokes_eigenvalue(&self, k: Wavevector) -> f64 {
        self.lambda1() * self.k_squared(k) as f64
    }

    /// `(flat index, wavevector)` for every stored mode.
    pub fn wavevectors(&self) -> impl Iterator<Item = (usize, Wavevector)> + use<> {
        Wavevectors {
            resolution: self.resolution,
            dimension: self.dimension,
            counters: [0; 3],
            k: [0; 3],
            idx: 0,
            end: self.n_points(),
        }
    }

    /// Coordinates of grid point `idx`, same ordering as the wavevectors.
    pub fn grid_point(&self, idx: usize) -> [f64; 3] {
        let h = self.grid_spacing();
        let m = self.resolution;
        match self.dimension {
            2 => [(idx / m) as f64 * h, (idx % m) as f64 * h, 0.0],
            _ => [
                (idx / (m * m)) as f64 * h,
                ((idx / m) % m) as f64 * h,
                (idx % m) as f64 * h,
            ],
        }
    }
}

/// Storage-order walk that steps the wavevector directly instead of
/// decoding each flat index.
struct Wavevectors {
    resolution: usize,
    dimension: usize,
    counters: [usize; 3],
    k: Wavevector,
    idx: usize,
    end: usize,
}

impl Iterator for Wavevectors {
    type Item = (usize, Wavevector);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        if self.idx == self.end {
            return None;
        }
        let item = (self.idx, self.k);
        self.idx += 1;
        let m = self.resolution;
        let half = (m / 2) as i64;
        for axis in (0..self.dimension).rev() {
            self.counters[axis] += 1;
            if self.counters[axis] < m {
                self.k[axis] = if self.k[axis] == half { 1 - half } else { self.k[axis] + 1 };
                break;
            }
            self.counters[axis] = 0;
            self.k[axis] = 0;
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.end - self.idx;
        (left, Some(left))
    }
}
