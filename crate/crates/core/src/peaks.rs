use alloc::vec::Vec;

/// Indices of interior local maxima of `samples` whose topographic
/// prominence is at least `min_prominence`. Flat tops report their
/// leftmost index.
pub fn find_peaks(samples: &[f64], min_prominence: f64) -> Vec<usize> {
    let n = samples.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if samples[i - 1] < samples[i] {
            let mut end = i;
            while end + 1 < n && samples[end + 1] == samples[i] {
                end += 1;
            }
            if end + 1 < n && samples[end + 1] < samples[i] && prominence(samples, i, end) >= min_prominence {
                peaks.push(i);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

fn prominence(x: &[f64], start: usize, end: usize) -> f64 {
    let h = x[start];
    let mut left_min = h;
    for &v in x[..start].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[end + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Number of local maxima whose prominence reaches `fraction` of the
/// largest sample.
pub fn count_peaks(samples: &[f64], fraction: f64) -> usize {
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() || max <= 0.0 {
        return 0;
    }
    find_peaks(samples, fraction * max).len()
}
