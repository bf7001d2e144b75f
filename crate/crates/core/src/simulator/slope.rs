use super::SimResult;
use crate::error::{Error, Result};

/// Which points of a BER curve enter the slope fit. Bounds are inclusive
/// and may be given in either order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeWindow {
    SnrDb(f64, f64),
    Ber(f64, f64),
}

impl SlopeWindow {
    fn contains(&self, snr_db: f64, ber: f64) -> bool {
        let within = |v: f64, a: f64, b: f64| v >= a.min(b) && v <= a.max(b);
        match *self {
            SlopeWindow::SnrDb(a, b) => within(snr_db, a, b),
            SlopeWindow::Ber(a, b) => within(ber, a, b),
        }
    }
}

/// Negated least-squares slope of `log10(ber)` against `snr_db / 10`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::SlopeUndefined(format!(
            "{} usable point(s), need at least 2",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::SlopeUndefined("all points share one SNR".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(-sxy / sxx)
}

/// Slope over the points of `result` inside `window` that have at least
/// one bit error.
pub fn estimate_diversity_slope(result: &SimResult, window: SlopeWindow) -> Result<f64> {
    let points: Vec<(f64, f64)> = result
        .points
        .iter()
        .filter(|p| p.bit_errors > 0 && window.contains(p.snr_db, p.ber))
        .map(|p| (p.snr_db, p.ber))
        .collect();
    fit_slope(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::SnrPoint;

    fn result(points: Vec<SnrPoint>) -> SimResult {
        SimResult {
            scheme: "synthetic".into(),
            seed: 0,
            bpcu: 4.0,
            nr: 2,
            points,
        }
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let snr = 10.0 + 2.0 * i as f64;
                (snr, 0.3 * 10f64.powf(-snr / 10.0 * 4.0))
            })
            .collect();
        assert!((fit_slope(&pts).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn flat_curve() {
        let pts = [(0.0, 0.1), (5.0, 0.1), (10.0, 0.1)];
        assert_eq!(fit_slope(&pts).unwrap(), 0.0);
    }

    #[test]
    fn window_and_zero_errors() {
        let r = result(vec![
            SnrPoint::new(0.0, 100, 1000, 100),
            SnrPoint::new(10.0, 100, 1000, 10),
            SnrPoint::new(20.0, 100, 1000, 1),
            SnrPoint::new(30.0, 100, 1000, 0),
        ]);
        let s = estimate_diversity_slope(&r, SlopeWindow::Ber(1e-3, 1e-1)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        let s = estimate_diversity_slope(&r, SlopeWindow::SnrDb(0.0, 10.0)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(matches!(
            estimate_diversity_slope(&r, SlopeWindow::SnrDb(25.0, 40.0)),
            Err(Error::SlopeUndefined(_))
        ));
    }
}
