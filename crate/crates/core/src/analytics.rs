//! Closed-form and exact combinatorial success probabilities.
//!
//! `p(eta) = [1-(1-eta)^m]^n - [1-(1-eta)^m - eta^m/2]^n` is the probability
//! that every block keeps a photon and at least one block is both intact and
//! in a `k=1` state. Conditioning on the number `mu` of lost photons gives the
//! table `p_mu`, computed here as the coefficient of `x^mu` in
//!
//! ```text
//! [(1+x)^m - x^m]^n - [(1+x)^m - x^m - 1/2]^n
//! ```
//!
//! divided by `C(nm, mu)`. The explicit sum over the number of corrupted
//! blocks is kept as an independent cross-check.

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bm::{check_rational_probability, Apparatus};
use crate::code::CodeParams;
use crate::error::{check_probability, Error, Result};

/// Largest `n*m` accepted by [`p_mu_direct`].
pub const MAX_DIRECT_PHOTONS: u32 = 60;

/// Logical Bell measurement success probability at transmission `eta`.
pub fn bm_success_probability(code: CodeParams, eta: f64) -> Result<f64> {
    success_probability(Apparatus::LinearOptics, code, eta)
}

/// Same as [`bm_success_probability`] for an ideal physical Bell measurement:
/// an intact block reveals `l` whatever its `s_i`, so `eta^m/2` becomes `eta^m`.
pub fn perfect_bm_success_probability(code: CodeParams, eta: f64) -> Result<f64> {
    success_probability(Apparatus::Perfect, code, eta)
}

/// `a^n - b^n` with `a = 1-(1-eta)^m` and `b = a - c`, where `c` is the
/// probability that a block identifies `l`.
///
/// Evaluated as `c * sum_j a^(n-1-j) b^j` with `0 <= b <= a`, which keeps the
/// relative error near machine precision even when `p` is tiny.
pub fn success_probability(apparatus: Apparatus, code: CodeParams, eta: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    let m = code.m() as f64;
    let n = code.n() as i32;
    // 1 - (1-eta)^m without cancellation for small eta.
    let keeps_photon = -(m * (-eta).ln_1p()).exp_m1();
    let identifies_l = match apparatus {
        Apparatus::LinearOptics => 0.5 * eta.powf(m),
        Apparatus::Perfect => eta.powf(m),
    };
    let a = keeps_photon;
    let b = (keeps_photon - identifies_l).max(0.0);
    if a == 0.0 {
        return Ok(0.0);
    }
    // sum_j a^(n-1-j) b^j = a^(n-1) * sum_j (b/a)^j
    let ratio = b / a;
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..n {
        sum += term;
        term *= ratio;
    }
    Ok(identifies_l * a.powi(n - 1) * sum)
}

/// Exact rational evaluation of the closed form.
pub fn bm_success_probability_exact(code: CodeParams, eta: &BigRational) -> Result<BigRational> {
    success_probability_exact(Apparatus::LinearOptics, code, eta)
}

pub fn success_probability_exact(apparatus: Apparatus, code: CodeParams, eta: &BigRational) -> Result<BigRational> {
    check_rational_probability(eta)?;
    let one = BigRational::one();
    let m = code.m() as usize;
    let n = code.n() as usize;
    let a = &one - num_traits::pow(&one - eta, m);
    let eta_m = num_traits::pow(eta.clone(), m);
    let c = match apparatus {
        Apparatus::LinearOptics => eta_m / BigRational::from_integer(2.into()),
        Apparatus::Perfect => eta_m,
    };
    let b = &a - c;
    Ok(num_traits::pow(a, n) - num_traits::pow(b, n))
}

/// Largest number of lost photons compatible with success: `(n-1)(m-1)`.
pub fn max_loss(code: CodeParams) -> u32 {
    code.max_loss()
}

/// Number of ways to spread `mu` losses over exactly `i` given blocks so that
/// every one of them loses between 1 and `m-1` of its `m` photons.
///
/// Evaluated block by block as a sum over compositions, without generating
/// functions: `N(i, mu) = sum_j C(m, j) N(i-1, mu-j)`.
pub fn n_combinatorial(i: u32, mu: u32, m: u32) -> BigUint {
    let mu = mu as usize;
    let mut ways = vec![BigUint::zero(); mu + 1];
    ways[0] = BigUint::one();
    let per_block: Vec<BigUint> = (0..m as usize)
        .map(|j| if j == 0 { BigUint::zero() } else { binomial(BigUint::from(m), BigUint::from(j)) })
        .collect();
    for _ in 0..i {
        let mut next = vec![BigUint::zero(); mu + 1];
        for (total, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (j, c) in per_block.iter().enumerate().skip(1) {
                if total + j > mu {
                    break;
                }
                next[total + j] += w * c;
            }
        }
        ways = next;
    }
    std::mem::take(&mut ways[mu])
}

/// Exact `p_mu` by the explicit sum over the number `i` of corrupted blocks,
/// each weighted by the chance `1 - 2^-(n-i)` that an intact block has `s=1`.
pub fn p_mu_direct(code: CodeParams, mu: u32) -> Result<BigRational> {
    if code.photons() > MAX_DIRECT_PHOTONS {
        return Err(Error::CapacityExceeded {
            what: "photons per logical qubit for the direct p_mu sum",
            value: code.photons() as u64,
            limit: MAX_DIRECT_PHOTONS as u64,
        });
    }
    if mu > code.max_loss() {
        return Err(Error::LossCountOutOfRange {
            mu,
            max: code.max_loss(),
        });
    }
    let n = code.n();
    let mut total = BigRational::zero();
    for i in 0..=mu.min(n - 1) {
        let weight = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << (n - i));
        let count = BigInt::from(binomial(BigUint::from(n), BigUint::from(i)) * n_combinatorial(i, mu, code.m()));
        total += weight * BigRational::from_integer(count);
    }
    let configs = binomial(BigUint::from(code.photons()), BigUint::from(mu));
    Ok(total / BigRational::from_integer(configs.into()))
}

/// Polynomial product truncated to degree `max_degree`.
fn mul_truncated(a: &[BigInt], b: &[BigInt], max_degree: usize) -> Vec<BigInt> {
    let len = (a.len() + b.len() - 1).min(max_degree + 1);
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(len.saturating_sub(i)) {
            out[i + j] += x * y;
        }
    }
    out
}

fn pow_truncated(base: &[BigInt], exp: u32, max_degree: usize) -> Vec<BigInt> {
    let mut result = vec![BigInt::one()];
    let mut square = base.to_vec();
    square.truncate(max_degree + 1);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_truncated(&result, &square, max_degree);
        }
        e >>= 1;
        if e > 0 {
            square = mul_truncated(&square, &square, max_degree);
        }
    }
    result
}

/// Integer coefficients of `2^n {[(1+x)^m - x^m]^n - [(1+x)^m - x^m - 1/2]^n}`
/// up to `x^max_degree`.
fn scaled_generating_coefficients(code: CodeParams, max_degree: usize) -> Vec<BigInt> {
    let m = code.m() as usize;
    // 2(1+x)^m - 2x^m
    let mut kept: Vec<BigInt> = (0..=m)
        .map(|j| BigInt::from(binomial(BigUint::from(m), BigUint::from(j))) * 2)
        .collect();
    kept[m] -= 2;
    let mut shifted = kept.clone();
    shifted[0] -= 1;
    let first = pow_truncated(&kept, code.n(), max_degree);
    let second = pow_truncated(&shifted, code.n(), max_degree);
    (0..=max_degree)
        .map(|d| {
            let x = first.get(d).cloned().unwrap_or_default();
            let y = second.get(d).cloned().unwrap_or_default();
            x - y
        })
        .collect()
}

fn p_mu_from_coefficient(code: CodeParams, mu: u32, coefficient: &BigInt) -> BigRational {
    let configs = BigInt::from(binomial(BigUint::from(code.photons()), BigUint::from(mu)));
    BigRational::new(coefficient.clone(), configs << code.n())
}

/// Exact success probability given that exactly `mu` signal photons were lost.
pub fn p_mu(code: CodeParams, mu: u32) -> Result<BigRational> {
    if mu > code.photons() {
        return Err(Error::LossCountOutOfRange {
            mu,
            max: code.photons(),
        });
    }
    if mu > code.max_loss() {
        return Ok(BigRational::zero());
    }
    let coefficients = scaled_generating_coefficients(code, mu as usize);
    Ok(p_mu_from_coefficient(code, mu, &coefficients[mu as usize]))
}

/// `p_mu` for `mu = 0 ..= (n-1)(m-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PMuTable {
    pub code: CodeParams,
    #[serde(serialize_with = "serialize_rationals")]
    pub values: Vec<BigRational>,
}

fn serialize_rationals<S: serde::Serializer>(values: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

impl PMuTable {
    /// All entries from a single truncated polynomial expansion.
    pub fn compute(code: CodeParams) -> Self {
        let top = code.max_loss();
        let coefficients = scaled_generating_coefficients(code, top as usize);
        let values = (0..=top)
            .map(|mu| p_mu_from_coefficient(code, mu, &coefficients[mu as usize]))
            .collect();
        Self { code, values }
    }

    pub fn get(&self, mu: u32) -> BigRational {
        self.values.get(mu as usize).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// `sum_mu p_mu C(nm, mu) eta^(nm-mu) (1-eta)^mu`; equals the closed form.
pub fn reconstruct_p_from_pmu(code: CodeParams, eta: &BigRational) -> Result<BigRational> {
    check_rational_probability(eta)?;
    let table = PMuTable::compute(code);
    let photons = code.photons() as usize;
    let loss = BigRational::one() - eta;
    let mut total = BigRational::zero();
    for (mu, p) in table.values.iter().enumerate() {
        let configs = BigInt::from(binomial(BigUint::from(photons), BigUint::from(mu)));
        let weight = num_traits::pow(eta.clone(), photons - mu) * num_traits::pow(loss.clone(), mu);
        total += p * weight * BigRational::from_integer(configs);
    }
    Ok(total)
}

/// Rounds `value * 100` half away from zero to two decimals and returns the
/// result in hundredths of a percent.
pub fn percent_hundredths(value: &BigRational) -> BigInt {
    let scaled = value * BigRational::from_integer(10_000.into());
    let half = BigRational::new(1.into(), 2.into());
    if scaled.is_negative() {
        -(-scaled + half).floor().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    }
}

/// `value` as a percentage with exactly two decimals, e.g. `32.14`.
pub fn format_percent(value: &BigRational) -> String {
    let h = percent_hundredths(value);
    let sign = if h.is_negative() { "-" } else { "" };
    let h = h.abs();
    let (whole, frac) = h.div_rem(&BigInt::from(100));
    format!("{sign}{whole}.{:0>2}", frac.to_string())
}

/// Converts an exact probability to the nearest `f64`.
pub fn to_f64(value: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: u32, m: u32) -> CodeParams {
        CodeParams::new(n, m).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn closed_form_examples() {
        assert!((bm_success_probability(code(10, 3), 0.90).unwrap() - 0.9795).abs() < 5e-5);
        assert!((bm_success_probability(code(23, 5), 0.75).unwrap() - 0.9244).abs() < 5e-5);
        for (n, m) in [(1, 1), (2, 2), (23, 5), (3, 10)] {
            assert_eq!(bm_success_probability(code(n, m), 0.0).unwrap(), 0.0);
        }
        assert!(bm_success_probability(code(2, 2), -0.1).is_err());
        assert!(bm_success_probability(code(2, 2), 1.1).is_err());
    }

    #[test]
    fn perfect_lossless_always_succeeds() {
        assert_eq!(perfect_bm_success_probability(code(1, 1), 1.0).unwrap(), 1.0);
        assert_eq!(perfect_bm_success_probability(code(2, 2), 1.0).unwrap(), 1.0);
        assert!(perfect_bm_success_probability(code(2, 2), 2.0).is_err());
    }

    #[test]
    fn single_pair_is_half_eta() {
        assert_eq!(bm_success_probability_exact(code(1, 1), &rat(1, 3)).unwrap(), rat(1, 6));
        assert_eq!(reconstruct_p_from_pmu(code(1, 1), &rat(1, 3)).unwrap(), rat(1, 6));
    }

    #[test]
    fn float_matches_exact_tightly() {
        for (n, m) in [(1, 1), (2, 2), (3, 10), (6, 5), (10, 3), (23, 5), (40, 8)] {
            for (num, den) in [(1, 1000), (1, 10), (3, 10), (1, 2), (3, 4), (9, 10), (99, 100), (1, 1)] {
                let eta = rat(num, den);
                let exact = to_f64(&bm_success_probability_exact(code(n, m), &eta).unwrap());
                let float = bm_success_probability(code(n, m), num as f64 / den as f64).unwrap();
                let rel = if exact == 0.0 { float.abs() } else { ((float - exact) / exact).abs() };
                assert!(rel <= 1e-12, "({n},{m}) eta={num}/{den}: {float} vs {exact}");
            }
        }
    }

    #[test]
    fn n_combinatorial_examples() {
        assert_eq!(n_combinatorial(0, 0, 5), BigUint::from(1u32));
        assert_eq!(n_combinatorial(0, 3, 5), BigUint::from(0u32));
        assert_eq!(n_combinatorial(2, 0, 5), BigUint::from(0u32));
        assert_eq!(n_combinatorial(1, 2, 3), BigUint::from(3u32));
        assert_eq!(n_combinatorial(2, 3, 3), BigUint::from(18u32));
        // A block losing all m photons is not counted.
        assert_eq!(n_combinatorial(1, 3, 3), BigUint::from(0u32));
    }

    #[test]
    fn p_mu_examples() {
        assert_eq!(format_percent(&p_mu(code(3, 3), 3).unwrap()), "32.14");
        assert_eq!(format_percent(&p_mu(code(5, 4), 12).unwrap()), "0.51");
        assert_eq!(p_mu(code(2, 2), 2).unwrap(), BigRational::zero());
        assert_eq!(format_percent(&p_mu_direct(code(3, 3), 4).unwrap()), "10.71");
        assert!(matches!(p_mu(code(2, 2), 5), Err(Error::LossCountOutOfRange { .. })));
        assert!(matches!(p_mu_direct(code(2, 2), 2), Err(Error::LossCountOutOfRange { .. })));
        assert!(matches!(p_mu_direct(code(61, 1), 0), Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn p_zero_is_block_efficiency() {
        for n in 1..=12 {
            for m in 1..=5 {
                let expected = BigRational::one() - BigRational::new(1.into(), BigInt::one() << n);
                assert_eq!(p_mu(code(n, m), 0).unwrap(), expected);
                assert_eq!(p_mu_direct(code(n, m), 0).unwrap(), expected);
            }
        }
    }

    #[test]
    fn p_mu_matches_direct_sum_on_2_3() {
        assert_eq!(p_mu(code(2, 3), 1).unwrap(), p_mu_direct(code(2, 3), 1).unwrap());
    }

    #[test]
    fn max_loss_examples() {
        assert_eq!(max_loss(code(1, 1)), 0);
        assert_eq!(max_loss(code(7, 4)), 18);
        assert_eq!(max_loss(code(3, 5)), 8);
    }

    #[test]
    fn table_shape() {
        let t = PMuTable::compute(code(7, 4));
        assert_eq!(t.values.len(), 19);
        assert_eq!(format_percent(&t.values[18]), "0.11");
        assert!(t.get(19).is_zero());
    }

    #[test]
    fn percent_rounding_is_half_away_from_zero() {
        assert_eq!(format_percent(&rat(1, 8)), "12.50");
        assert_eq!(format_percent(&rat(1, 80000)), "0.00");
        assert_eq!(format_percent(&rat(1, 20000)), "0.01");
        assert_eq!(format_percent(&rat(-1, 20000)), "-0.01");
        assert_eq!(format_percent(&rat(1, 1)), "100.00");
    }
}
