use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One row of a convergence table. Orders refer to the previous row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConvergenceRecord {
    pub h: f64,
    /// Time step; `None` for stationary runs.
    pub r: Option<f64>,
    pub error_l2: f64,
    /// Broken H¹ error.
    pub error_x: f64,
    pub error_neg: Option<f64>,
    /// L² order against `h`.
    pub p: Option<f64>,
    /// L² order against `r`.
    pub q: Option<f64>,
    /// Broken H¹ order against `h`.
    pub p_x: Option<f64>,
    /// Negative-seminorm order against `h`.
    pub p_neg: Option<f64>,
}

/// `log(e0 / e1) / log(s0 / s1)`
pub fn order(e0: f64, e1: f64, s0: f64, s1: f64) -> f64 {
    libm::log(e0 / e1) / libm::log(s0 / s1)
}

/// Least-squares slope of `log e` against `log s`.
pub fn fitted_slope(s: &[f64], e: &[f64]) -> Result<f64> {
    if s.len() != e.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            got: e.len(),
        });
    }
    if s.len() < 2 {
        return Err(Error::TooFewResolutions);
    }
    let n = s.len() as f64;
    let lx: Vec<f64> = s.iter().map(|&v| libm::log(v)).collect();
    let ly: Vec<f64> = e.iter().map(|&v| libm::log(v)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Fills `p`, `p_x`, `p_neg` (and `q` where both rows carry distinct time
/// steps) from consecutive rows. Needs strictly decreasing `h`.
pub fn eoc(records: &[ConvergenceRecord]) -> Result<Vec<ConvergenceRecord>> {
    if records.len() < 2 {
        return Err(Error::TooFewResolutions);
    }
    if records.windows(2).any(|w| !(w[1].h < w[0].h)) {
        return Err(Error::NonMonotoneMeshSize);
    }
    let mut out = records.to_vec();
    for i in 0..out.len() {
        let r = &mut out[i];
        (r.p, r.q, r.p_x, r.p_neg) = (None, None, None, None);
        if i == 0 {
            continue;
        }
        let a = &records[i - 1];
        let b = &records[i];
        r.p = Some(order(a.error_l2, b.error_l2, a.h, b.h));
        r.p_x = Some(order(a.error_x, b.error_x, a.h, b.h));
        if let (Some(ea), Some(eb)) = (a.error_neg, b.error_neg) {
            r.p_neg = Some(order(ea, eb, a.h, b.h));
        }
        if let (Some(ra), Some(rb)) = (a.r, b.r) {
            if ra != rb {
                r.q = Some(order(a.error_l2, b.error_l2, ra, rb));
            }
        }
    }
    Ok(out)
}

/// Fills `q` for a time-refinement table (fixed mesh, strictly decreasing
/// `r`); spatial orders stay empty.
pub fn time_eoc(records: &[ConvergenceRecord]) -> Result<Vec<ConvergenceRecord>> {
    if records.len() < 2 {
        return Err(Error::TooFewResolutions);
    }
    let steps: Vec<f64> = records
        .iter()
        .map(|r| {
            r.r.ok_or(Error::InvalidParameter {
                name: "r",
                reason: "time refinement needs a time step on every row",
            })
        })
        .collect::<Result<_>>()?;
    if steps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::NonMonotoneMeshSize);
    }
    let mut out = records.to_vec();
    for i in 0..out.len() {
        let r = &mut out[i];
        (r.p, r.q, r.p_x, r.p_neg) = (None, None, None, None);
        if i > 0 {
            r.q = Some(order(records[i - 1].error_l2, records[i].error_l2, steps[i - 1], steps[i]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(h: f64, e: f64) -> ConvergenceRecord {
        ConvergenceRecord {
            h,
            r: Some(h * h),
            error_l2: e,
            error_x: e,
            ..Default::default()
        }
    }

    #[test]
    fn table_orders() {
        let out = eoc(&[rec(1.0 / 8.0, 0.016035), rec(1.0 / 10.0, 0.010766)]).unwrap();
        assert!(out[0].p.is_none());
        let p = out[1].p.unwrap();
        assert!((p - 1.785311).abs() < 5e-4, "{p}");
        assert!((out[1].q.unwrap() - p / 2.0).abs() < 1e-12);
        let out = eoc(&[rec(1.0 / 10.0, 0.010766), rec(1.0 / 12.0, 0.0077316)]).unwrap();
        assert!((out[1].p.unwrap() - 1.815897).abs() < 5e-4);
    }

    #[test]
    fn halving_gives_order_one() {
        let out = eoc(&[rec(0.5, 0.2), rec(0.25, 0.1), rec(0.125, 0.05)]).unwrap();
        assert_eq!(out[1].p, Some(1.0));
        assert_eq!(out[2].p, Some(1.0));
        assert!((fitted_slope(&[0.5, 0.25, 0.125], &[0.2, 0.1, 0.05]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(eoc(&[rec(0.5, 0.1)]), Err(Error::TooFewResolutions));
        assert_eq!(eoc(&[rec(0.25, 0.1), rec(0.5, 0.1)]), Err(Error::NonMonotoneMeshSize));
        assert_eq!(eoc(&[rec(0.25, 0.1), rec(0.25, 0.1)]), Err(Error::NonMonotoneMeshSize));
        let mut a = rec(0.1, 0.1);
        a.r = None;
        assert!(time_eoc(&[a, rec(0.1, 0.05)]).is_err());
    }

    #[test]
    fn time_orders() {
        let mut a = rec(0.1, 0.4);
        let mut b = rec(0.1, 0.2);
        a.r = Some(0.1);
        b.r = Some(0.05);
        let out = time_eoc(&[a, b]).unwrap();
        assert_eq!(out[1].q, Some(1.0));
        assert!(out[1].p.is_none());
    }
}
