use serde::{Deserialize, Serialize};

/// Binary confusion counts with malicious as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// A rate together with a flag set when its denominator was zero (the value
/// is then reported as 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    pub degenerate: bool,
}

impl Ratio {
    fn of(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Ratio {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Ratio {
                value: num / den,
                degenerate: false,
            }
        }
    }
}

impl Confusion {
    pub fn from_predictions(truth: &[bool], predicted: &[bool]) -> Self {
        assert_eq!(truth.len(), predicted.len(), "label and prediction counts differ");
        let mut c = Confusion::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            c.record(t, p);
        }
        c
    }

    pub fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }
}

impl std::ops::Add for Confusion {
    type Output = Confusion;

    fn add(self, o: Confusion) -> Confusion {
        Confusion {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// F1 of the malicious class.
pub fn f1(c: &Confusion) -> Ratio {
    Ratio::of(2.0 * c.tp as f64, (2 * c.tp + c.fp + c.fn_) as f64)
}

/// F1 of the benign class.
pub fn f1_benign(c: &Confusion) -> Ratio {
    Ratio::of(2.0 * c.tn as f64, (2 * c.tn + c.fp + c.fn_) as f64)
}

/// Support-weighted mean of per-class F1 scores, given as `(f1, support)`.
pub fn weighted_f1(per_class: &[(f64, u64)]) -> Ratio {
    let total: u64 = per_class.iter().map(|&(_, s)| s).sum();
    if total == 0 {
        return Ratio::of(0.0, 0.0);
    }
    // weights first, so a single supported class gives back its own F1 exactly
    let value = per_class
        .iter()
        .map(|&(f, s)| f * (s as f64 / total as f64))
        .sum();
    Ratio {
        value,
        degenerate: false,
    }
}

pub fn weighted_f1_of(c: &Confusion) -> Ratio {
    weighted_f1(&[
        (f1_benign(c).value, c.negatives()),
        (f1(c).value, c.positives()),
    ])
}

/// `FP / (FP + TN)`.
pub fn fpr(c: &Confusion) -> Ratio {
    Ratio::of(c.fp as f64, (c.fp + c.tn) as f64)
}

/// `FN / (FN + TP)`.
pub fn fnr(c: &Confusion) -> Ratio {
    Ratio::of(c.fn_ as f64, (c.fn_ + c.tp) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn conf(tp: u64, fp: u64, tn: u64, fn_: u64) -> Confusion {
        Confusion { tp, fp, tn, fn_ }
    }

    #[test]
    fn perfect_classifier() {
        let c = conf(1, 0, 1, 0);
        assert_eq!(f1(&c).value, 1.0);
        assert_eq!(fpr(&c).value, 0.0);
        assert_eq!(fnr(&c).value, 0.0);
        assert_eq!(weighted_f1_of(&c).value, 1.0);
    }

    #[test]
    fn published_error_rates() {
        let c = conf(541_795, 272, 1_310_833, 2016);
        assert_eq!(c.negatives(), 1_311_105);
        assert_eq!(c.positives(), 543_811);
        assert!((fpr(&c).value - 0.0002).abs() < 0.00005);
        assert!((fnr(&c).value - 0.0037).abs() < 0.00005);
    }

    #[test]
    fn degenerate_denominators_are_flagged() {
        let c = conf(0, 0, 5, 0);
        assert_eq!(f1(&c), Ratio { value: 0.0, degenerate: true });
        assert!(fnr(&c).degenerate);
        assert!(!fpr(&c).degenerate);
        assert!(weighted_f1(&[]).degenerate);
    }

    #[test]
    fn all_malicious() {
        let c = Confusion::from_predictions(&[true; 4], &[true; 4]);
        assert_eq!(f1(&c).value, 1.0);
        assert_eq!(weighted_f1_of(&c).value, 1.0);
    }

    proptest! {
        #[test]
        fn single_class_weighted_equals_class_f1(tp in 0u64..50, fn_ in 0u64..50) {
            prop_assume!(tp + fn_ > 0);
            let c = conf(tp, 0, 0, fn_);
            prop_assert_eq!(weighted_f1_of(&c).value, f1(&c).value);
        }

        #[test]
        fn rates_in_unit_interval(tp in 0u64..100, fp in 0u64..100, tn in 0u64..100, fn_ in 0u64..100) {
            let c = conf(tp, fp, tn, fn_);
            for r in [f1(&c), f1_benign(&c), weighted_f1_of(&c), fpr(&c), fnr(&c)] {
                prop_assert!((0.0..=1.0).contains(&r.value));
            }
        }
    }
}
