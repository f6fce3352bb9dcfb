//! The evolving state and the split-step integrator.
//!
//! The state is stored as the spectra of the real fields w and w_t (w = u in
//! a box, w = r u on the radial line), together with w in physical space.
//! The complex field of the first-order form is v = ⟨∇⟩u - i u̇, with
//! spectrum v̂ = ⟨k⟩ŵ - i ŵ_t, and the free flow is v̂ ↦ e^{i⟨k⟩t} v̂.
//!
//! One step of length τ is the Strang composition: half kick
//! u̇ += (τ/2) f'(u), exact free rotation by τ, half kick. The force at the
//! end of a step is also the force at the start of the next one, so it is
//! cached and each step costs one inverse and one forward transform.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::lattice::{Geometry, Lattice};
use crate::error::{NlkgError, Result};
use crate::exec::{self, Exec};
use crate::field::{BoxField, NonlinearityModel, RadialField, ScalingPair};
use crate::functionals::{BaseIntegrals, StatePair};

/// Time-dependent state of one run.
#[derive(Debug, Clone)]
pub struct EvolState {
    lat: Arc<Lattice>,
    t: f64,
    /// ŵ.
    psi: Vec<Complex64>,
    /// ŵ_t.
    psi_t: Vec<Complex64>,
    /// w in physical space, in step with `psi`.
    w: Vec<f64>,
    /// Spectrum of the force at `w`, with the model it was computed for.
    force: Option<(NonlinearityModel, Vec<Complex64>)>,
}

/// Monitored quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    /// E = ½(‖u̇‖² + ‖∇u‖² + ‖u‖²) - F(u).
    pub energy: f64,
    /// E^Q = ½(‖u̇‖² + ‖∇u‖² + ‖u‖²).
    pub energy_quad: f64,
    /// y = ‖u‖².
    pub y: f64,
    /// ẏ = 2⟨u, u̇⟩.
    pub y_dot: f64,
    /// ÿ = 2‖u̇‖² - 2K_{1,0}(u).
    pub y_ddot: f64,
    /// ‖u‖_∞.
    pub sup: f64,
    pub k10: f64,
    pub kd2: f64,
    /// Momentum ∫ u̇ ∇u (zero components beyond the dimension).
    pub momentum: [f64; 3],
}

impl EvolState {
    /// State from the stored fields w and w_t in physical space.
    pub fn from_values(geometry: Geometry, w: Vec<f64>, w_t: Vec<f64>, exec: Exec) -> Result<Self> {
        Self::with_lattice(Arc::new(Lattice::new(geometry, exec)), w, w_t)
    }

    fn with_lattice(lat: Arc<Lattice>, w: Vec<f64>, w_t: Vec<f64>) -> Result<Self> {
        let n = lat.len();
        if w.len() != n || w_t.len() != n {
            return Err(NlkgError::InvalidGrid(format!(
                "state needs {n} values, got {} and {}",
                w.len(),
                w_t.len()
            )));
        }
        if w.iter().chain(&w_t).any(|v| !v.is_finite()) {
            return Err(NlkgError::NumericalBreakdown { t: 0.0, reason: "non-finite initial data".into() });
        }
        let psi = lat.spectral.forward_real(&w);
        let psi_t = lat.spectral.forward_real(&w_t);
        Ok(Self { lat, t: 0.0, psi, psi_t, w, force: None })
    }

    /// Radial data (u(0), u̇(0)) placed in the geometry: interpolated about
    /// the box centre, or sampled as w = x u(|x|) on the radial line.
    pub fn from_state_pair(geometry: Geometry, s: &StatePair, exec: Exec) -> Result<Self> {
        if s.d() != geometry.dim() {
            return Err(NlkgError::InvalidGrid(format!(
                "data live in dimension {}, geometry in {}",
                s.d(),
                geometry.dim()
            )));
        }
        let lat = Arc::new(Lattice::new(geometry, exec));
        let (w, w_t) = match &lat.geometry {
            Geometry::Box(g) => (
                BoxField::from_radial(g.clone(), &s.u0).into_values(),
                BoxField::from_radial(g.clone(), &s.u1).into_values(),
            ),
            Geometry::Radial3 { .. } => {
                let line = |u: &RadialField| lat.x.iter().map(|&x| x * u.sample(x.abs())).collect();
                (line(&s.u0), line(&s.u1))
            }
        };
        Self::with_lattice(lat, w, w_t)
    }

    /// State from fields on a periodic box.
    pub fn from_box(u0: &BoxField, u1: &BoxField, exec: Exec) -> Result<Self> {
        if u0.grid() != u1.grid() {
            return Err(NlkgError::GridMismatch);
        }
        Self::from_values(
            Geometry::Box(u0.grid().clone()),
            u0.values().to_vec(),
            u1.values().to_vec(),
            exec,
        )
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn geometry(&self) -> &Geometry {
        &self.lat.geometry
    }

    pub fn exec(&self) -> Exec {
        self.lat.exec
    }

    /// Space dimension of the physical problem.
    pub fn dim(&self) -> usize {
        self.lat.geometry.dim()
    }

    /// Stored field w (u itself in a box).
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Stored velocity w_t in physical space.
    pub fn w_t(&self) -> Vec<f64> {
        self.lat.spectral.inverse_real(&self.psi_t)
    }

    /// u at the stored nodes.
    pub fn u(&self) -> Vec<f64> {
        self.w.iter().enumerate().map(|(j, &w)| self.lat.u_at(j, w)).collect()
    }

    /// u̇ at the stored nodes.
    pub fn u_t(&self) -> Vec<f64> {
        self.w_t().into_iter().enumerate().map(|(j, w)| self.lat.u_at(j, w)).collect()
    }

    /// (u, u̇) as box fields (box geometry only).
    pub fn box_fields(&self) -> Option<(BoxField, BoxField)> {
        match &self.lat.geometry {
            Geometry::Box(g) => Some((
                BoxField::new(g.clone(), self.w.clone()).ok()?,
                BoxField::new(g.clone(), self.w_t()).ok()?,
            )),
            Geometry::Radial3 { .. } => None,
        }
    }

    /// Spectrum of v = ⟨∇⟩u - i u̇ (of the stored fields).
    pub fn v_hat(&self) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        self.psi
            .iter()
            .zip(&self.psi_t)
            .zip(&self.lat.omega)
            .map(|((p, pt), w)| p * *w - i * pt)
            .collect()
    }

    /// v = ⟨∇⟩u - i u̇ in physical space.
    pub fn v(&self) -> Vec<Complex64> {
        let mut z = self.v_hat();
        self.lat.spectral.inverse(&mut z);
        z
    }

    /// ‖z‖_{L²} for a spectrum z on this lattice.
    pub fn spectral_norm(&self, z: &[Complex64]) -> f64 {
        self.lat.spectral_quad(z, |_| 1.0).sqrt()
    }

    /// ‖u‖_∞.
    pub fn sup_norm(&self) -> f64 {
        let lat = &self.lat;
        exec::max_range(lat.exec, self.w.len(), |j| lat.u_at(j, self.w[j]).abs())
    }

    /// Free flow e^{it⟨∇⟩} applied to a spectrum on this lattice.
    pub fn free_propagate(&self, v_hat: &[Complex64], t: f64) -> Vec<Complex64> {
        rotate(&self.lat.omega, v_hat, t)
    }

    fn force_hat(&self, model: &NonlinearityModel) -> Vec<Complex64> {
        let lat = &self.lat;
        let values = exec::map_range(lat.exec, self.w.len(), |j| lat.force_at(model, j, self.w[j]));
        lat.spectral.forward_real(&values)
    }

    /// Advance by `dt` with one Strang step.
    pub fn step(&mut self, dt: f64, model: &NonlinearityModel) -> Result<()> {
        let cached = matches!(&self.force, Some((m, _)) if m == model);
        if !cached {
            self.force = Some((model.clone(), self.force_hat(model)));
        }
        let half = 0.5 * dt;
        let (_, f) = self.force.as_ref().expect("force cached above");
        kick(&mut self.psi_t, f, half);
        free_rotate(&self.lat.omega, &mut self.psi, &mut self.psi_t, dt);
        self.w = self.lat.spectral.inverse_real(&self.psi);
        self.t += dt;
        if self.w.iter().any(|v| !v.is_finite()) {
            return Err(NlkgError::NumericalBreakdown { t: self.t, reason: "non-finite field after a step".into() });
        }
        let f = self.force_hat(model);
        kick(&mut self.psi_t, &f, half);
        if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NlkgError::NumericalBreakdown { t: self.t, reason: "non-finite force".into() });
        }
        self.force = Some((model.clone(), f));
        Ok(())
    }

    /// Advance by `dt` with the fourth-order triple-jump composition of three
    /// Strang steps of lengths γ₁dt, γ₂dt, γ₁dt, with
    /// γ₁ = 1/(2 - 2^{1/3}) and γ₂ = 1 - 2γ₁ < 0.
    pub fn step_fourth(&mut self, dt: f64, model: &NonlinearityModel) -> Result<()> {
        let g1 = 1.0 / (2.0 - 2f64.cbrt());
        let g2 = 1.0 - 2.0 * g1;
        let t = self.t;
        self.step(g1 * dt, model)?;
        self.step(g2 * dt, model)?;
        self.step(g1 * dt, model)?;
        self.t = t + dt;
        Ok(())
    }

    /// The base integrals ‖∇u‖², ‖u‖², F(u), ∫Df(u) of the current u.
    pub fn base_integrals(&self, model: &NonlinearityModel) -> BaseIntegrals {
        let lat = &self.lat;
        BaseIntegrals {
            grad: lat.spectral_quad(&self.psi, |k| lat.k2[k]),
            mass: lat.inner(&self.w, &self.w),
            f: lat.integrate(&self.w, |u| model.f(u)),
            df: lat.integrate(&self.w, |u| model.dop(u)),
        }
    }

    /// Evaluate every monitored quantity.
    pub fn sample(&self, model: &NonlinearityModel) -> Sample {
        let lat = &self.lat;
        let d = self.dim();
        let b = self.base_integrals(model);
        let w_t = self.w_t();
        let kin = lat.inner(&w_t, &w_t);
        let quad = 0.5 * (kin + b.grad + b.mass);
        let k10 = b.k(ScalingPair::new(1.0, 0.0), d);
        let kd2 = b.k(ScalingPair::new(d as f64, -2.0), d);
        Sample {
            t: self.t,
            energy: quad - b.f,
            energy_quad: quad,
            y: b.mass,
            y_dot: 2.0 * lat.inner(&self.w, &w_t),
            y_ddot: 2.0 * kin - 2.0 * k10,
            sup: self.sup_norm(),
            k10,
            kd2,
            momentum: self.momentum(),
        }
    }

    /// P = ∫ u̇ ∇u, by Parseval (zero in the radial geometry).
    pub fn momentum(&self) -> [f64; 3] {
        let mut p = [0.0; 3];
        let Geometry::Box(g) = &self.lat.geometry else { return p };
        let lat = &self.lat;
        let n = lat.len() as f64;
        let kx: Vec<f64> = (0..g.n()).map(|j| g.wavenumber(j)).collect();
        for (a, pa) in p.iter_mut().enumerate().take(g.d()) {
            // Re Σ conj(ŵ_t) i k_a ŵ = Σ k_a Im(ŵ_t conj(ŵ)).
            *pa = lat.weight / n
                * exec::sum_range(lat.exec, lat.len(), |k| {
                    let ka = kx[g.unflatten(k)[a]];
                    ka * (self.psi_t[k] * self.psi[k].conj()).im
                });
        }
        p
    }

    /// Ẽ(v), K̃_{α,β}(v) and K_{α,β}(u) for the current state: the vector
    /// functionals assign to v = ⟨∇⟩u - i u̇ the energy E(u, u̇) and
    /// K̃ = K(u) + K^Q(⟨∇⟩^{-1} u̇).
    pub fn vector_functionals(&self, model: &NonlinearityModel, pair: ScalingPair) -> VectorFunctionals {
        let lat = &self.lat;
        let d = self.dim();
        let s = self.sample(model);
        let b = self.base_integrals(model);
        let k = b.k(pair, d);
        let g_grad = lat.spectral_quad(&self.psi_t, |j| lat.k2[j] / (1.0 + lat.k2[j]));
        let g_mass = lat.spectral_quad(&self.psi_t, |j| 1.0 / (1.0 + lat.k2[j]));
        let kq_t = 0.5 * pair.grad_weight(d) * g_grad + 0.5 * pair.mass_weight(d) * g_mass;
        VectorFunctionals { energy: s.energy, k_tilde: k + kq_t, k_real: k }
    }
}

/// Output of [`EvolState::vector_functionals`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorFunctionals {
    pub energy: f64,
    pub k_tilde: f64,
    pub k_real: f64,
}

fn kick(psi_t: &mut [Complex64], force: &[Complex64], tau: f64) {
    for (p, f) in psi_t.iter_mut().zip(force) {
        *p += f * tau;
    }
}

/// Exact free flow of each mode: (ŵ, ŵ_t) rotated by the angle ⟨k⟩t.
fn free_rotate(omega: &[f64], psi: &mut [Complex64], psi_t: &mut [Complex64], t: f64) {
    for ((p, pt), &w) in psi.iter_mut().zip(psi_t.iter_mut()).zip(omega) {
        let (s, c) = (w * t).sin_cos();
        let (a, b) = (*p, *pt);
        *p = a * c + b * (s / w);
        *pt = b * c - a * (w * s);
    }
}

fn rotate(omega: &[f64], v: &[Complex64], t: f64) -> Vec<Complex64> {
    v.iter()
        .zip(omega)
        .map(|(z, &w)| {
            let (s, c) = (w * t).sin_cos();
            z * Complex64::new(c, s)
        })
        .collect()
}

/// e^{it⟨∇⟩} on a spectrum of the given geometry.
pub fn free_propagate(geometry: &Geometry, v_hat: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    let lat = Lattice::new(geometry.clone(), Exec::Sequential);
    if v_hat.len() != lat.len() {
        return Err(NlkgError::InvalidGrid(format!(
            "spectrum has {} values, geometry has {}",
            v_hat.len(),
            lat.len()
        )));
    }
    Ok(rotate(&lat.omega, v_hat, t))
}
