//! Locating the large-h limit of FS0.

pub const WINDOW: usize = 20;
pub const SPREAD_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plateau {
    pub value: f64,
    /// First and last harmonic covered by the window.
    pub h_first: u32,
    pub h_last: u32,
}

/// `values[i]` holds FS0 at harmonic `h0 + i`.
///
/// FS0 approaches its limit while alternating about it, so the window is laid
/// over the running means of neighbouring harmonics. The last window of
/// [`WINDOW`] means whose relative spread is below [`SPREAD_TOLERANCE`] wins.
pub fn find_plateau(values: &[f64], h0: u32) -> Option<Plateau> {
    if values.len() < WINDOW + 1 {
        return None;
    }
    let means: Vec<f64> = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    for start in (0..=means.len() - WINDOW).rev() {
        let win = &means[start..start + WINDOW];
        let mean = win.iter().sum::<f64>() / WINDOW as f64;
        let lo = win.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = win.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if mean != 0.0 && mean.is_finite() && (hi - lo) / mean.abs() < SPREAD_TOLERANCE {
            return Some(Plateau {
                value: mean,
                h_first: h0 + start as u32,
                h_last: h0 + (start + WINDOW) as u32,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_approach_is_averaged() {
        let limit = -0.25;
        let v: Vec<f64> = (1..=80)
            .map(|h| limit + 0.02 * (-1f64).powi(h) / (h as f64).sqrt())
            .collect();
        let p = find_plateau(&v, 1).unwrap();
        assert!((p.value - limit).abs() < 1e-3);
        assert_eq!(p.h_last, 80);
    }

    #[test]
    fn drifting_sequence_has_no_plateau() {
        let v: Vec<f64> = (1..=60).map(|h| h as f64).collect();
        assert!(find_plateau(&v, 1).is_none());
        assert!(find_plateau(&[1.0; 10], 1).is_none());
    }
}
