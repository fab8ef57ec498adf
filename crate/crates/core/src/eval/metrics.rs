use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts with Positive as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub pre: f64,
    pub rec: f64,
    pub f1: f64,
    pub confusion: Confusion,
    /// Set when any ratio had a zero denominator and was reported as 0.
    pub zero_division: bool,
}

fn ratio(num: usize, den: usize, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(y_true: &[bool], y_pred: &[bool]) -> Result<MetricsReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::InvalidConfig("metrics need at least one sample".into()));
    }
    let mut c = Confusion::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(from_confusion(c))
}

pub fn from_confusion(c: Confusion) -> MetricsReport {
    let mut zero_division = false;
    let acc = (c.tp + c.tn) as f64 / c.total() as f64;
    let pre = ratio(c.tp, c.tp + c.fp, &mut zero_division);
    let rec = ratio(c.tp, c.tp + c.fn_, &mut zero_division);
    let f1 = if pre + rec > 0.0 {
        2.0 * pre * rec / (pre + rec)
    } else {
        zero_division = true;
        0.0
    };
    MetricsReport {
        acc,
        pre,
        rec,
        f1,
        confusion: c,
        zero_division,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_confusion() {
        let m = from_confusion(Confusion { tp: 3, fp: 1, fn_: 2, tn: 4 });
        assert_eq!(m.acc, 0.7);
        assert_eq!(m.pre, 0.75);
        assert_eq!(m.rec, 0.6);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!(!m.zero_division);
    }

    #[test]
    fn perfect_and_degenerate() {
        let y = [true, false, true];
        let m = compute_metrics(&y, &y).unwrap();
        assert_eq!((m.acc, m.pre, m.rec, m.f1), (1.0, 1.0, 1.0, 1.0));

        let m = compute_metrics(&[true, false], &[false, false]).unwrap();
        assert_eq!((m.pre, m.f1), (0.0, 0.0));
        assert!(m.zero_division);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            compute_metrics(&[true], &[true, false]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }
}
