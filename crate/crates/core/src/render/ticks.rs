use super::RenderError;

const MANTISSAS: [i64; 3] = [1, 2, 5];

/// Evenly spaced axis ticks with a step of the form `{1, 2, 5} x 10^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSet {
    pub values: Vec<f64>,
    pub step: f64,
    /// Digits after the decimal point needed to print the ticks exactly.
    pub decimals: usize,
}

impl TickSet {
    pub fn label(&self, v: f64) -> String {
        let s = format!("{:.*}", self.decimals, v);
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            s[1..].to_string()
        } else {
            s
        }
    }
}

/// Tick positions for `[lo, hi]`, aiming for about `target_count` ticks.
///
/// The chosen count lies in `[target_count/2, 2*target_count]`, with two or
/// more ticks preferred whenever a step allows it; every tick lies inside
/// the range.
pub fn nice_ticks(lo: f64, hi: f64, target_count: usize) -> Result<Vec<f64>, RenderError> {
    Ok(tick_set(lo, hi, target_count)?.values)
}

pub fn tick_set(lo: f64, hi: f64, target_count: usize) -> Result<TickSet, RenderError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(RenderError::DegenerateRange { lo, hi });
    }
    if target_count < 2 {
        return Err(RenderError::InvalidTickCount(target_count));
    }
    let target = target_count as i64;
    let raw = (hi - lo) / target_count as f64;
    let base = raw.log10().floor() as i32;

    // Rank: inside the band with at least two ticks, then inside the band,
    // then anything; within a rank prefer the count nearest the target.
    // Ties go to the coarser step, which comes later.
    let rank = |count: i64| {
        let in_band = 2 * count >= target && count <= 2 * target;
        let tier = match (in_band, count >= 2) {
            (true, true) => 0,
            (true, false) => 1,
            _ => 2,
        };
        (tier, (count - target).abs())
    };
    let mut best: Option<(i64, i64, i32, (i64, i64))> = None;
    for exp in base - 2..=base + 2 {
        for m in MANTISSAS {
            let step = scaled(m, exp);
            let tol = 1e-9;
            let first = (lo / step - tol).ceil() as i64;
            let last = (hi / step + tol).floor() as i64;
            let count = last - first + 1;
            if best.is_none_or(|(best_count, ..)| rank(count) <= rank(best_count)) {
                best = Some((count, m, exp, (first, last)));
            }
        }
    }
    let (_, m, exp, (first, last)) = best.expect("candidate list is never empty");
    let values = (first..=last)
        .map(|i| scaled(i * m, exp).clamp(lo, hi))
        .collect();
    Ok(TickSet {
        values,
        step: scaled(m, exp),
        decimals: if exp < 0 { (-exp) as usize } else { 0 },
    })
}

/// `m * 10^exp`, dividing for negative exponents so that values such as 0.6
/// come out as the nearest double rather than `6 * 0.1`.
fn scaled(m: i64, exp: i32) -> f64 {
    if exp >= 0 {
        m as f64 * 10f64.powi(exp)
    } else {
        m as f64 / 10f64.powi(-exp)
    }
}
