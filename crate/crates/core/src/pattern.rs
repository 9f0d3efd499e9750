//! Point configurations `b₀ < b₁ < … < b_k` as grid-commensurable rationals.
//!
//! Irrational configurations are approximated by the caller, never silently:
//! everything downstream works with an exact common denominator `Q`, and the
//! torus-side counting operations require `Q | n` so that the admissible
//! dilations form a subgroup of the grid.

use serde::Serialize;

use crate::error::{precondition, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pattern {
    /// Numerators `p_t`, strictly increasing; the point set is `p_t / Q`.
    numerators: Vec<i64>,
    /// Common denominator `Q ≥ 1`, reduced against the numerators.
    denominator: i64,
}

impl Pattern {
    pub fn from_rationals(numerators: &[i64], denominator: i64) -> Result<Self> {
        if denominator < 1 {
            return Err(precondition("pattern denominator must be positive"));
        }
        if numerators.len() < 2 {
            return Err(precondition("a pattern needs at least 2 points"));
        }
        let mut nums = numerators.to_vec();
        nums.sort_unstable();
        for w in nums.windows(2) {
            if w[0] == w[1] {
                return Err(precondition("pattern points must be pairwise distinct"));
            }
        }
        let mut g = denominator;
        for &v in &nums {
            g = gcd(g, v.abs());
        }
        let g = g.max(1);
        Ok(Pattern {
            numerators: nums.iter().map(|v| v / g).collect(),
            denominator: denominator / g,
        })
    }

    pub fn from_integers(points: &[i64]) -> Result<Self> {
        Self::from_rationals(points, 1)
    }

    /// The arithmetic progression `0, 1, …, k`.
    pub fn progression(k: u32) -> Self {
        Pattern {
            numerators: (0..=k as i64).collect(),
            denominator: 1,
        }
    }

    /// Parses `"0,1,2"` or `"0,1/3,2/3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fracs: Vec<(i64, i64)> = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let (num, den) = match part.split_once('/') {
                Some((a, b)) => {
                    let num: i64 = a
                        .trim()
                        .parse()
                        .map_err(|_| precondition(format!("bad pattern point {part:?}")))?;
                    let den: i64 = b
                        .trim()
                        .parse()
                        .map_err(|_| precondition(format!("bad pattern point {part:?}")))?;
                    if den <= 0 {
                        return Err(precondition("pattern denominators must be positive"));
                    }
                    (num, den)
                }
                None => (
                    part.parse()
                        .map_err(|_| precondition(format!("bad pattern point {part:?}")))?,
                    1,
                ),
            };
            fracs.push((num, den));
        }
        let mut q: i64 = 1;
        for &(_, d) in &fracs {
            q = lcm(q, d);
        }
        let nums: Vec<i64> = fracs.iter().map(|&(p, d)| p * (q / d)).collect();
        Self::from_rationals(&nums, q)
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// Number of points, `k + 1`.
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Configuration order `k`.
    pub fn order(&self) -> u32 {
        (self.numerators.len() - 1) as u32
    }

    pub fn points_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&p| p as f64 / self.denominator as f64)
            .collect()
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .numerators
            .iter()
            .map(|&p| {
                if self.denominator == 1 {
                    p.to_string()
                } else {
                    format!("{p}/{}", self.denominator)
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        let p = Pattern::parse("0,1,2").unwrap();
        assert_eq!(p.numerators(), &[0, 1, 2]);
        assert_eq!(p.denominator(), 1);
        assert_eq!(p.order(), 2);

        let q = Pattern::parse("0, 1/3, 2/3").unwrap();
        assert_eq!(q.numerators(), &[0, 1, 2]);
        assert_eq!(q.denominator(), 3);
    }

    #[test]
    fn reduces_common_factors() {
        let p = Pattern::from_rationals(&[0, 2, 4], 6).unwrap();
        assert_eq!(p.numerators(), &[0, 1, 2]);
        assert_eq!(p.denominator(), 3);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(Pattern::from_integers(&[0, 1, 1]).is_err());
    }

    #[test]
    fn sorts_points() {
        let p = Pattern::from_integers(&[2, 0, 1]).unwrap();
        assert_eq!(p.numerators(), &[0, 1, 2]);
    }
}
