use crate::error::{Error, Result};

/// Area under the ROC curve from rank sums, ties counted as half.
pub fn auc(labels: &[u8], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut pos_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Ranks start..end (1-based: start+1..=end) share their average.
        let avg = (start + 1 + end) as f64 / 2.0;
        let positives = order[start..end].iter().filter(|&&i| labels[i] == 1).count();
        pos_rank_sum += avg * positives as f64;
        start = end;
    }
    let n_pos = n_pos as f64;
    let n_neg = n_neg as f64;
    Ok((pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}

/// Largest share of applicants that can be approved, lowest predicted
/// default first, while the observed default rate among them stays at or
/// below `max_default_rate`.
///
/// Equal scores keep their input order. Returns 0 when no prefix qualifies.
pub fn approval_ratio(labels: &[u8], scores: &[f64], max_default_rate: f64) -> f64 {
    let n = labels.len().min(scores.len());
    if n == 0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut defaults = 0usize;
    let mut best = 0usize;
    for (k, &i) in order.iter().enumerate() {
        defaults += usize::from(labels[i] == 1);
        let approved = k + 1;
        if defaults as f64 / approved as f64 <= max_default_rate {
            best = approved;
        }
    }
    best as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_ranking() {
        assert_eq!(auc(&[1, 0], &[0.9, 0.1]).unwrap(), 1.0);
    }

    #[test]
    fn all_ties_give_half() {
        assert_eq!(auc(&[1, 0, 1, 0, 0], &[0.3; 5]).unwrap(), 0.5);
    }

    #[test]
    fn degenerate_labels() {
        assert!(matches!(auc(&[1, 1], &[0.1, 0.2]), Err(Error::DegenerateLabels)));
    }

    #[test]
    fn no_defaults_approves_everyone() {
        assert_eq!(approval_ratio(&[0; 6], &[0.1, 0.5, 0.2, 0.9, 0.0, 0.3], 0.05), 1.0);
    }

    #[test]
    fn all_defaults_approves_no_one() {
        assert_eq!(approval_ratio(&[1; 4], &[0.1, 0.2, 0.3, 0.4], 0.5), 0.0);
    }

    #[test]
    fn ten_rows_with_defaults_at_five_and_ten() {
        let scores: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut labels = vec![0u8; 10];
        labels[4] = 1;
        labels[9] = 1;
        // Oracle: scan every prefix.
        let mut best = 0.0;
        for k in 1..=10 {
            let d = labels[..k].iter().filter(|&&y| y == 1).count() as f64;
            if d / k as f64 <= 0.2 {
                best = k as f64 / 10.0;
            }
        }
        assert_eq!(best, 1.0);
        assert_eq!(approval_ratio(&labels, &scores, 0.2), best);
    }
}
