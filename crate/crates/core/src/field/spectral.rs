//! Multi-dimensional FFTs on periodic lattices of n^d points.
//!
//! Transforms along the last (contiguous) axis are batched directly; other
//! axes are handled by swapping them with the last axis, transforming, and
//! swapping back. Each line is transformed independently, so the parallel
//! schedule cannot change the result.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::exec::{self, Exec};

/// Forward and inverse plans for lattices with `n` points per side.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    d: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    exec: Exec,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("exec", &self.exec)
            .finish()
    }
}

impl Spectral {
    pub fn new(d: usize, n: usize, exec: Exec) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Self { n, d, fwd, inv, exec }
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalised forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    /// Inverse transform in place, normalised so that
    /// `inverse(forward(x)) == x`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, false);
        let s = 1.0 / self.len() as f64;
        exec::for_each_chunk_mut(self.exec, data, exec::CHUNK, |_, c| {
            for z in c {
                *z *= s;
            }
        });
    }

    /// Forward transform of a real array.
    pub fn forward_real(&self, data: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut z);
        z
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, spec: &[Complex64]) -> Vec<f64> {
        let mut z = spec.to_vec();
        self.inverse(&mut z);
        z.into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        assert_eq!(data.len(), self.len());
        let plan = if forward { &self.fwd } else { &self.inv };
        let n = self.n;
        let exec = self.exec;
        // rustfft transforms every length-n line of a buffer in one call;
        // groups of lines are handed to workers.
        let group = n * (16384 / n).max(1);
        let batch = |buf: &mut [Complex64]| {
            if exec.is_parallel() {
                exec::for_each_chunk_mut(exec, buf, group, |_, lines| plan.process(lines));
            } else {
                plan.process(buf);
            }
        };
        batch(data);
        if self.d == 1 {
            return;
        }
        let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in 0..self.d - 1 {
            swap_axis_with_last(exec, self.d, n, axis, data, &mut tmp);
            batch(&mut tmp);
            swap_axis_with_last(exec, self.d, n, axis, &tmp, data);
        }
    }
}

/// out = input with `axis` and the last axis exchanged. The permutation is
/// an involution, so applying it twice restores the layout.
fn swap_axis_with_last(
    exec: Exec,
    d: usize,
    n: usize,
    axis: usize,
    input: &[Complex64],
    out: &mut [Complex64],
) {
    let stride = |a: usize| n.pow((d - 1 - a) as u32);
    let s_axis = stride(axis);
    exec::for_each_chunk_mut(exec, out, n, |line, chunk| {
        // `line` enumerates all indices except the last axis of `out`.
        let base_out = line * n;
        for (k, z) in chunk.iter_mut().enumerate() {
            let flat = base_out + k;
            let i_axis = (flat / s_axis) % n;
            let i_last = flat % n;
            let src = flat - i_axis * s_axis - i_last + i_last * s_axis + i_axis;
            *z = input[src];
        }
    });
}
