//! Extrema of sampled series.

/// Indices of strict local maxima. A plateau counts once, at its first
/// sample, when it is entered from below and left downwards; plateaus
/// touching either end of the series are not maxima.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    extrema(values, |a, b| a > b)
}

/// Indices of strict local minima, with the same plateau convention.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    extrema(values, |a, b| a < b)
}

fn extrema(values: &[f64], beats: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if beats(values[i], values[i - 1]) {
            let mut j = i + 1;
            while j < n && values[j] == values[i] {
                j += 1;
            }
            if j < n && beats(values[i], values[j]) {
                out.push(i);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    out
}
