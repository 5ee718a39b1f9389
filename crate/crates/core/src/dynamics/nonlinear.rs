use num_complex::Complex64;

use crate::spectral::{leray_project, SpectralTransform, SpectralVelocityField, TorusDomain, VectorCoefficients};

/// Pseudo-spectral evaluator of the projected advection `P[(u·∇)u]`.
///
/// The product is formed in divergence form, `∂_j(u_i u_j)`, which equals
/// `(u·∇)u` for divergence-free `u`. Inputs are truncated to the dealiased
/// modes `|k_i| ≤ M/3`, so the product is alias-free on the retained
/// modes and the result is the exact Galerkin projection.
#[derive(Debug, Clone)]
pub struct Advection {
    transform: SpectralTransform,
}

/// Output of one advection evaluation.
#[derive(Debug, Clone)]
pub struct AdvectionOutput {
    pub term: SpectralVelocityField,
    /// `max_x |u(x)|` on the grid, for the step-size heuristic.
    pub max_speed: f64,
}

impl Advection {
    pub fn new(domain: TorusDomain) -> Self {
        Self {
            transform: SpectralTransform::new(domain),
        }
    }

    pub fn domain(&self) -> &TorusDomain {
        self.transform.domain()
    }

    pub fn evaluate(&self, u: &SpectralVelocityField) -> AdvectionOutput {
        let dom = *self.domain();
        assert_eq!(u.domain(), &dom, "advection planned for a different domain");
        let n = dom.n_points();
        let d = dom.dimension();
        let zero = Complex64::new(0.0, 0.0);
        let resolved: Vec<bool> = dom.wavevectors().map(|(_, k)| dom.is_resolved(k)).collect();

        let mut phys = vec![0.0; d * n];
        let mut buf = vec![zero; n];
        for c in 0..d {
            for ((z, src), keep) in buf.iter_mut().zip(u.component(c)).zip(&resolved) {
                *z = if *keep { *src } else { zero };
            }
            self.transform.inverse_scalar(&mut buf);
            for (dst, z) in phys[c * n..(c + 1) * n].iter_mut().zip(&buf) {
                *dst = z.re;
            }
        }
        let max_speed = (0..n)
            .map(|j| (0..d).map(|c| phys[c * n + j].powi(2)).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt();

        // spectra of the symmetric products u_i u_j, i ≤ j
        let mut products = vec![vec![zero; n]; d * (d + 1) / 2];
        let pair = |i: usize, j: usize| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            a * d - a * (a + 1) / 2 + b
        };
        for i in 0..d {
            for j in i..d {
                let slot = &mut products[pair(i, j)];
                for ((z, a), b) in slot.iter_mut().zip(&phys[i * n..(i + 1) * n]).zip(&phys[j * n..(j + 1) * n]) {
                    *z = Complex64::new(a * b, 0.0);
                }
                self.transform.forward_scalar(slot);
            }
        }

        let scale = dom.wavenumber_scale();
        let mut out = VectorCoefficients::zeros(dom);
        for c in 0..d {
            let comp = out.component_mut(c);
            for (idx, k) in dom.wavevectors() {
                if !resolved[idx] {
                    continue;
                }
                let mut acc = zero;
                for (j, kj) in k.iter().enumerate().take(d) {
                    acc += products[pair(c, j)][idx] * (*kj as f64);
                }
                comp[idx] = Complex64::new(0.0, scale) * acc;
            }
        }
        AdvectionOutput {
            term: leray_project(&out),
            max_speed,
        }
    }
}

/// Unmodulated, projected, dealiased `P[(u·∇)u]`.
pub fn convective_term(u: &SpectralVelocityField) -> SpectralVelocityField {
    Advection::new(*u.domain()).evaluate(u).term
}
