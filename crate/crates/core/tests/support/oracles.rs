//! Brute-force reference implementations, written without reusing any of
//! the library's code paths.
#![allow(dead_code)]

use std::collections::BTreeSet;

use wikiref_core::linkclassify::Label;

/// (precision, recall, F) at `k` by direct counting.
pub fn metrics_at_k(recs: &[String], gold: &BTreeSet<String>, k: usize) -> (f64, f64, f64) {
    let mut shown = 0usize;
    let mut hits = 0usize;
    for (i, r) in recs.iter().enumerate() {
        if i >= k {
            break;
        }
        shown += 1;
        for g in gold {
            if g == r {
                hits += 1;
            }
        }
    }
    let p = if shown == 0 { 0.0 } else { hits as f64 / shown as f64 };
    let r = if gold.is_empty() { 0.0 } else { hits as f64 / gold.len() as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Average rank (1 = largest) by counting larger and equal values.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let greater = values.iter().filter(|&&w| w > v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            greater + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Spearman ρ of two value lists: Pearson of average ranks, computed with
/// the one-pass sum formula. Constant sides give 0.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    (n * sxy - sx * sy) / (vx * vy).sqrt()
}

/// Tie-free Spearman via `1 − 6Σd² / (n(n² − 1))`.
pub fn spearman_no_ties(a: &[f64], b: &[f64]) -> f64 {
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// Repeated ENN: each round fully sorts every point's neighbours by
/// (distance, index), removes every majority point whose k nearest
/// neighbours mostly carry the other label, and stops when nothing changes.
/// Returns the kept indices.
pub fn enn(points: &[[f64; 8]], labels: &[Label], k: usize, max_rounds: usize) -> Vec<usize> {
    let relevant = labels.iter().filter(|&&l| l == Label::Relevant).count();
    let minority = if relevant * 2 <= labels.len() { Label::Relevant } else { Label::Irrelevant };
    let mut alive = vec![true; points.len()];
    for _ in 0..max_rounds {
        let live: Vec<usize> = (0..points.len()).filter(|&i| alive[i]).collect();
        let kk = k.min(live.len() - 1);
        if kk == 0 {
            break;
        }
        let mut doomed = Vec::new();
        for &i in &live {
            if labels[i] == minority {
                continue;
            }
            let mut others: Vec<(f64, usize)> = live
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| {
                    let d: f64 = (0..8).map(|c| (points[i][c] - points[j][c]).powi(2)).sum();
                    (d, j)
                })
                .collect();
            others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let disagree = others[..kk].iter().filter(|(_, j)| labels[*j] != labels[i]).count();
            if disagree * 2 > kk {
                doomed.push(i);
            }
        }
        if doomed.is_empty() {
            break;
        }
        for i in doomed {
            alive[i] = false;
        }
    }
    (0..points.len()).filter(|&i| alive[i]).collect()
}

/// χ² of `values` (binned into `bins` equal-width bins over [0, 1]) against
/// binary labels, from an explicit contingency table.
pub fn chi_square(values: &[f64], relevant: &[bool], bins: usize) -> f64 {
    let mut observed = vec![vec![0.0f64; 2]; bins];
    for (v, &r) in values.iter().zip(relevant) {
        let mut b = (v.clamp(0.0, 1.0) * bins as f64).floor() as usize;
        if b == bins {
            b -= 1;
        }
        observed[b][usize::from(r)] += 1.0;
    }
    let n = values.len() as f64;
    let col = [0, 1].map(|c| observed.iter().map(|row| row[c]).sum::<f64>());
    let mut stat = 0.0;
    for row in &observed {
        let row_total = row[0] + row[1];
        for c in 0..2 {
            let e = row_total * col[c] / n;
            if e != 0.0 {
                stat += (row[c] - e).powi(2) / e;
            }
        }
    }
    stat
}
