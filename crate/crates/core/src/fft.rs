//! Multi-dimensional complex FFT over row-major buffers.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// In-place unnormalized transform of one row-major block of `shape`.
pub(crate) fn transform(data: &mut [Complex64], shape: &[usize], dir: Direction) {
    let total: usize = shape.iter().product();
    debug_assert_eq!(data.len(), total);
    let mut gathered: Vec<Complex64> = Vec::new();
    for (axis, &len) in shape.iter().enumerate() {
        if len == 1 {
            continue;
        }
        let fft = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            match dir {
                Direction::Forward => p.plan_fft_forward(len),
                Direction::Inverse => p.plan_fft_inverse(len),
            }
        });
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            fft.process(data);
            continue;
        }
        // Gather every line along `axis` into contiguous storage.
        let outer = total / (len * stride);
        gathered.resize(total, Complex64::default());
        let mut line = 0;
        for o in 0..outer {
            let base = o * len * stride;
            for s in 0..stride {
                let dst = &mut gathered[line * len..(line + 1) * len];
                for (i, d) in dst.iter_mut().enumerate() {
                    *d = data[base + i * stride + s];
                }
                line += 1;
            }
        }
        fft.process(&mut gathered);
        let mut line = 0;
        for o in 0..outer {
            let base = o * len * stride;
            for s in 0..stride {
                let src = &gathered[line * len..(line + 1) * len];
                for (i, v) in src.iter().enumerate() {
                    data[base + i * stride + s] = *v;
                }
                line += 1;
            }
        }
    }
}
