use crate::error::{Error, Result};

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

/// Weight of the worst-case phase for the cardinality hybrid:
/// the maximizer of `min{β(1 − e^{−q}), (1 − β)(1 − e^{−(1−q)})}`.
pub fn optimal_q_cardinality(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let a = 2.0 * beta - 1.0;
    let disc = a * a + 4.0 * beta * (1.0 - beta) / std::f64::consts::E;
    Ok(-((a + disc.sqrt()) / (2.0 * beta)).ln())
}

/// Weight of the worst-case meta-rounds for the partition-matroid hybrid:
/// the maximizer of `min{β/(1 + 1/q), (1 − β)/(1 + 1/(1 − q))}`.
pub fn optimal_q_matroid(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok((1.0 - beta) / (beta + (3.0 * beta * beta - 3.0 * beta + 1.0).sqrt()))
}

/// `⌊q·k⌋`, tolerant of `q·k` landing a hair below an integer.
pub fn wc_slots(q: f64, k: usize) -> usize {
    (q * k as f64 + 1e-9).floor() as usize
}

/// `⌈(1 − q)·k⌉`, tolerant of `(1 − q)·k` landing a hair above an integer.
pub fn avg_slots(q: f64, k: usize) -> usize {
    ((1.0 - q) * k as f64 - 1e-9).ceil().max(0.0) as usize
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_is_the_unweighted_case() {
        assert!((optimal_q_cardinality(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!((optimal_q_matroid(0.5).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn beta_outside_the_open_interval_is_rejected() {
        for b in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(optimal_q_cardinality(b).is_err());
            assert!(optimal_q_matroid(b).is_err());
        }
    }

    #[test]
    fn slot_arithmetic() {
        assert_eq!((wc_slots(0.5, 1), avg_slots(0.5, 1)), (0, 1));
        assert_eq!((wc_slots(0.5, 4), avg_slots(0.5, 4)), (2, 2));
        assert_eq!((wc_slots(0.3, 10), avg_slots(0.3, 10)), (3, 7));
        assert_eq!((wc_slots(1.0, 3), avg_slots(1.0, 3)), (3, 0));
    }
}
