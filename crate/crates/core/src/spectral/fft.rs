use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::exec::Execution;

type Plan = Arc<dyn Fft<f64>>;

fn plan(len: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, direction == FftDirection::Forward);
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(len, direction))
        .clone()
}

fn transpose(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

fn rows(data: &mut [Complex64], m: usize, plan: &Plan, exec: Execution) {
    exec.for_each_chunk(data, m, |row| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(row, &mut scratch);
    });
}

/// In-place 2-D transform of a row-major `m x m` array.
///
/// The forward transform is normalized by `1 / m^2` so that a constant field
/// `c` maps to the single coefficient `c` at zero frequency.
pub(crate) fn fft2(data: &mut [Complex64], m: usize, forward: bool) {
    debug_assert_eq!(data.len(), m * m);
    let direction = if forward {
        FftDirection::Forward
    } else {
        FftDirection::Inverse
    };
    let p = plan(m, direction);
    // Small grids are cheaper without the thread pool.
    let exec = if m >= 64 {
        Execution::default()
    } else {
        Execution::Sequential
    };
    rows(data, m, &p, exec);
    transpose(data, m);
    rows(data, m, &p, exec);
    transpose(data, m);
    if forward {
        let scale = 1.0 / (m * m) as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}
