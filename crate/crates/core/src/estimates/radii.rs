use serde::{Deserialize, Serialize};

use crate::dynamics::GmnseParams;

/// Explicit radii of the absorbing sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingRadii {
    /// `H`-ball radius², `2‖f‖₂²/(ν²λ₁²)`.
    pub rho_h_sq: f64,
    /// Bound on `∫_t^{t+1}‖u‖² ds`, `(1 + 2/(νλ₁))‖f‖₂²/(ν²λ₁)`.
    pub enstrophy_int_bound: f64,
    /// `V`-ball radius², `(2/ν)‖f‖₂² + (C N⁴ + 1)·enstrophy_int_bound`.
    pub rho_v_sq_formula: f64,
    pub lambda1: f64,
    /// The constant `C` used in `rho_v_sq_formula`.
    pub fitted_c: f64,
    /// `2/(ν²λ₁²)·…` needs `‖f‖₂²`; kept for entry-time bounds.
    pub forcing_h_norm_sq: f64,
    pub nu: f64,
}

/// Evaluates the absorbing radii for `p`, with `fitted_c` standing in for
/// the generic constant of the enstrophy inequality.
pub fn absorbing_radii(p: &GmnseParams, fitted_c: f64) -> AbsorbingRadii {
    let nu = p.nu();
    let lam = p.lambda1();
    let f2 = p.forcing_h_norm_sq();
    let rho_h_sq = 2.0 * f2 / (nu * nu * lam * lam);
    let enstrophy_int_bound = (1.0 + 2.0 / (nu * lam)) * f2 / (nu * nu * lam);
    let rho_v_sq_formula = 2.0 / nu * f2 + (fitted_c * p.n_cap().powi(4) + 1.0) * enstrophy_int_bound;
    AbsorbingRadii {
        rho_h_sq,
        enstrophy_int_bound,
        rho_v_sq_formula,
        lambda1: lam,
        fitted_c,
        forcing_h_norm_sq: f2,
        nu,
    }
}

impl AbsorbingRadii {
    /// Time after which the scalar bound `‖u₀‖₂² e^{−νλ₁t} + ‖f‖₂²/(ν²λ₁²)`
    /// is below `rho_h_sq`: `(1/(νλ₁)) ln(‖u₀‖₂² ν²λ₁² / ‖f‖₂²)`, clamped at 0.
    /// Infinite when `f = 0` and `u₀ ≠ 0`.
    pub fn h_entry_time_bound(&self, h0_sq: f64) -> f64 {
        let nl = self.nu * self.lambda1;
        if h0_sq == 0.0 {
            return 0.0;
        }
        if self.forcing_h_norm_sq == 0.0 {
            return f64::INFINITY;
        }
        ((h0_sq * nl * nl / self.forcing_h_norm_sq).ln() / nl).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{leray_project, TorusDomain, VectorCoefficients};
    use num_complex::Complex64;

    fn unit_forcing_params() -> GmnseParams {
        // ‖f‖₂ = 1 on the 2π cube: one |k| = 1 mode with (2π)³·2|a|² = 1
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let a = (1.0 / (2.0 * (2.0 * std::f64::consts::PI).powi(3))).sqrt();
        let z = Complex64::new(0.0, 0.0);
        let mut raw = VectorCoefficients::zeros(dom);
        raw.set_real_mode([0, 0, 1], [Complex64::new(a, 0.0), z, z]).unwrap();
        GmnseParams::new(1.0, 10.0, 1e-3, leray_project(&raw)).unwrap()
    }

    #[test]
    fn unit_parameters_give_book_values() {
        let p = unit_forcing_params();
        assert!((p.forcing_h_norm_sq() - 1.0).abs() < 1e-14);
        let r = absorbing_radii(&p, 0.0);
        assert!((r.rho_h_sq - 2.0).abs() < 1e-13);
        assert!((r.enstrophy_int_bound - 3.0).abs() < 1e-13);
        // (2/ν)‖f‖² + (0 + 1)·3
        assert!((r.rho_v_sq_formula - 5.0).abs() < 1e-13);
        let r = absorbing_radii(&p, 1e-4);
        assert!((r.rho_v_sq_formula - (2.0 + 2.0 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_forcing_zero_radii() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
        let r = absorbing_radii(&p, 3.0);
        assert_eq!((r.rho_h_sq, r.enstrophy_int_bound, r.rho_v_sq_formula), (0.0, 0.0, 0.0));
        assert_eq!(r.h_entry_time_bound(1.0), f64::INFINITY);
    }

    #[test]
    fn entry_time_bound_formula() {
        let r = absorbing_radii(&unit_forcing_params(), 0.0);
        // ‖u₀‖₂² = 100·ρ = 200  ⇒  ln 200
        assert!((r.h_entry_time_bound(200.0) - 200f64.ln()).abs() < 1e-12);
        assert_eq!(r.h_entry_time_bound(0.5), 0.0);
    }
}
