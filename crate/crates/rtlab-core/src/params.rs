//! Parameter derivation for the two construction regimes, the prime scan,
//! and closed-form evaluators for every displayed bound. Asymptotic
//! hypotheses that fail at desk scale become feasibility flags, never hard
//! errors: the structures stay constructible and the flags travel with them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::next_prime_at_least;
use crate::util::{binomial, ceil_div, ceil_tol};

/// Tolerance for floating-point equality checks on exponents.
pub const EXPONENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SmallDelta,
    MidDelta,
    SqrtN,
    Manual,
}

/// The full parameter tuple for one construction, with every violated
/// asymptotic hypothesis recorded in `feasibility`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub regime: Regime,
    pub r: u32,
    pub s: u32,
    pub delta: f64,
    pub epsilon: f64,
    pub n: u64,
    pub q: u64,
    pub kappa: f64,
    pub lambda: f64,
    pub p: f64,
    pub alpha: f64,
    pub a: u32,
    pub b: u32,
    pub lambda_exponent: f64,
    pub feasibility: Vec<String>,
}

fn kappa_of(s: u32) -> f64 {
    20.0 * s as f64 * (s as f64).ln()
}

fn b_of(r: u32, s: u32, a: u32) -> u32 {
    let pairs = binomial(a as u64 - 1, 2).max(1);
    (ceil_div((s + r) as u64, pairs) + r as u64) as u32
}

fn common_flags(params: &ConstructionParams, flags: &mut Vec<String>) {
    let log_q = (params.q as f64).ln();
    if params.p > 1.0 {
        flags.push("p > 1".into());
    }
    if params.lambda > params.q as f64 {
        flags.push("lambda > q".into());
    }
    if params.lambda <= log_q {
        flags.push("lambda <= log q".into());
    }
    if params.p <= log_q / params.lambda {
        flags.push("p <= log(q)/lambda".into());
    }
    let alpha_floor = 10.0 * params.s as f64 * (params.s as f64).ln() * params.q as f64
        / params.p.min(1.0);
    if params.alpha < alpha_floor {
        flags.push("alpha < 10 s log(s) q / p".into());
    }
}

/// Parameters for the sparse regime `1/2 <= delta <= 1/2 + 1/(2(2r+1))`.
/// At `delta = 1/2` this is the C*sqrt(n) variant: p = 1 and
/// `alpha = kappa * sqrt(n)`.
pub fn derive_params_small_delta(
    r: u32,
    s: u32,
    epsilon: f64,
    delta: f64,
    n: u64,
) -> Result<ConstructionParams> {
    if r < 1 || s < 2 {
        return Err(Error::BadParam("need r >= 1 and s >= 2".into()));
    }
    let top = 0.5 + 1.0 / (2.0 * (2.0 * r as f64 + 1.0));
    if !(0.5 - EXPONENT_TOLERANCE..=top + EXPONENT_TOLERANCE).contains(&delta) {
        return Err(Error::BadRange(format!(
            "delta {delta} outside [0.5, {top}] for the sparse regime"
        )));
    }
    let q = next_prime_at_least((n as f64).sqrt());
    let kappa = kappa_of(s);
    let a = 20 * r;
    let b = b_of(r, s, a);
    let rf = r as f64;
    let lambda_exponent =
        1.0 - 1.0 / rf + (2.0 * delta - 1.0) * (2.0 + 1.0 / rf) - 10.0 * rf * rf / b as f64;
    let lambda = (q as f64).powf(lambda_exponent);
    let at_half = (delta - 0.5).abs() <= EXPONENT_TOLERANCE;
    let (p, alpha) = if at_half {
        (1.0, kappa * (n as f64).sqrt())
    } else {
        (
            kappa * (q as f64).powf(-(2.0 * delta - 1.0)),
            (n as f64).powf(delta),
        )
    };
    let regime = if at_half { Regime::SqrtN } else { Regime::SmallDelta };
    let mut params = ConstructionParams {
        regime,
        r,
        s,
        delta,
        epsilon,
        n,
        q,
        kappa,
        lambda,
        p,
        alpha,
        a,
        b,
        lambda_exponent,
        feasibility: Vec::new(),
    };
    let mut flags = Vec::new();
    if epsilon <= 5.0 * rf * rf / b as f64 {
        flags.push("epsilon <= 5r^2/b".into());
    }
    common_flags(&params, &mut flags);
    params.feasibility = flags;
    Ok(params)
}

/// The lambda exponent of the dense regime as a function of (r, delta, b).
pub fn mid_delta_lambda_exponent(r: u32, delta: f64, b: u32) -> f64 {
    let rf = r as f64;
    let r3 = rf * rf * rf;
    let bf = b as f64;
    ((1.0 - delta) * (2.0 * rf + 1.0) * bf - 4.0 * (1.0 - delta) * r3 + rf + 3.0)
        / ((delta * (2.0 * rf + 1.0) - 1.0) * bf - 4.0 * delta * r3)
}

/// The b -> infinity limit of the dense-regime lambda exponent.
pub fn mid_delta_limit(r: u32, delta: f64) -> f64 {
    let rf = r as f64;
    (1.0 - delta) * (2.0 * rf + 1.0) / (delta * (2.0 * rf + 1.0) - 1.0)
}

/// Parameters for the dense regime `1/2 + 1/(2(2r+1)) < delta < 1`.
pub fn derive_params_mid_delta(
    r: u32,
    s: u32,
    epsilon: f64,
    delta: f64,
    n: u64,
) -> Result<ConstructionParams> {
    if r < 1 || s < 2 {
        return Err(Error::BadParam("need r >= 1 and s >= 2".into()));
    }
    let bottom = 0.5 + 1.0 / (2.0 * (2.0 * r as f64 + 1.0));
    if !(delta > bottom + EXPONENT_TOLERANCE && delta < 1.0 - EXPONENT_TOLERANCE) {
        return Err(Error::BadRange(format!(
            "delta {delta} outside ({bottom}, 1) for the dense regime"
        )));
    }
    let rf = r as f64;
    // Two-term maximum; the second term simplifies algebraically to
    // 2r / (1 - delta).
    let a = 2 + (ceil_tol(1.0 / delta) as u32).max(ceil_tol(2.0 * rf / (1.0 - delta)) as u32);
    let b = b_of(r, s, a);
    let exponent = mid_delta_lambda_exponent(r, delta, b);
    let q = next_prime_at_least((n as f64).powf(1.0 / (exponent + 1.0)));
    let kappa = kappa_of(s);
    let lambda = (q as f64).powf(exponent);
    let p = kappa * (q as f64).powf(1.0 - delta * (exponent + 1.0));
    let alpha = (n as f64).powf(delta);
    let mut params = ConstructionParams {
        regime: Regime::MidDelta,
        r,
        s,
        delta,
        epsilon,
        n,
        q,
        kappa,
        lambda,
        p,
        alpha,
        a,
        b,
        lambda_exponent: exponent,
        feasibility: Vec::new(),
    };
    let mut flags = Vec::new();
    if epsilon <= 104.0 * rf * rf / b as f64 {
        flags.push("epsilon <= 104r^2/b".into());
    }
    if !(exponent > 0.0 && exponent < 1.0) {
        flags.push("lambda exponent outside (0,1)".into());
    }
    if (b as f64) < 20.0 * rf * rf {
        flags.push("b < 20r^2".into());
    }
    common_flags(&params, &mut flags);
    params.feasibility = flags;
    Ok(params)
}

/// Packages explicitly chosen values, deriving q from n and recording the
/// same feasibility flags as the derived regimes.
pub fn derive_params_manual(
    r: u32,
    s: u32,
    epsilon: f64,
    delta: f64,
    n: u64,
    lambda: f64,
    p: f64,
    alpha: f64,
) -> Result<ConstructionParams> {
    if r < 1 || s < 2 {
        return Err(Error::BadParam("need r >= 1 and s >= 2".into()));
    }
    if lambda <= 0.0 || p <= 0.0 || alpha <= 0.0 {
        return Err(Error::BadParam("lambda, p, alpha must be positive".into()));
    }
    let q = next_prime_at_least((n as f64).sqrt());
    let a = 20 * r;
    let b = b_of(r, s, a);
    let mut params = ConstructionParams {
        regime: Regime::Manual,
        r,
        s,
        delta,
        epsilon,
        n,
        q,
        kappa: kappa_of(s),
        lambda,
        p,
        alpha,
        a,
        b,
        lambda_exponent: lambda.ln() / (q as f64).ln(),
        feasibility: Vec::new(),
    };
    let mut flags = Vec::new();
    common_flags(&params, &mut flags);
    params.feasibility = flags;
    Ok(params)
}

/// Named bound evaluation with the inputs echoed back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    pub formula: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

impl BoundReport {
    fn new(name: &str, inputs: &BTreeMap<String, f64>, value: f64, formula: &str) -> Self {
        BoundReport {
            name: name.into(),
            inputs: inputs.clone(),
            value,
            formula: formula.into(),
            details: BTreeMap::new(),
            holds: None,
        }
    }
}

/// Deviation bound for a fraction with perturbed numerator and denominator:
/// `|(x+ex)/(y+ey) - x/y| <= (|ex*y| + 3|ey*x|)/y^2`, valid whenever both
/// relative perturbations are at most 1/2.
pub fn fraction_error_bound(x: f64, y: f64, ex: f64, ey: f64) -> Result<BoundReport> {
    if x == 0.0 || y == 0.0 {
        return Err(Error::BadRange("x and y must be nonzero".into()));
    }
    if (ex / x).abs() > 0.5 || (ey / y).abs() > 0.5 {
        return Err(Error::BadRange(
            "relative perturbations must be at most 1/2".into(),
        ));
    }
    let bound = ((ex * y).abs() + 3.0 * (ey * x).abs()) / (y * y);
    let deviation = ((x + ex) / (y + ey) - x / y).abs();
    let mut inputs = BTreeMap::new();
    inputs.insert("x".into(), x);
    inputs.insert("y".into(), y);
    inputs.insert("ex".into(), ex);
    inputs.insert("ey".into(), ey);
    let mut report = BoundReport::new(
        "fraction-error",
        &inputs,
        bound,
        "(|ex*y| + 3|ey*x|) / y^2",
    );
    report.details.insert("deviation".into(), deviation);
    report.holds = Some(deviation <= bound);
    Ok(report)
}

fn get(inputs: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    inputs
        .get(key)
        .copied()
        .ok_or_else(|| Error::BadInputs(format!("missing input '{key}'")))
}

/// Expected count of size-a general-position complete sets surviving line
/// subsampling.
pub fn expected_type1_bound_h1(lambda: f64, q: f64, a: u32) -> f64 {
    let af = a as f64;
    4.0 * lambda.powf(af * af / 2.0) / q.powf((af * af - 5.0 * af) / 2.0)
}

/// Expected count of size-b spine configurations surviving line subsampling.
pub fn expected_type2_bound_h1(lambda: f64, q: f64, b: u32, r: u32) -> f64 {
    let (bf, rf) = (b as f64, r as f64);
    4.0 * lambda.powf(bf * rf) / q.powf(bf * (rf - 1.0) - 5.0 * rf * rf * rf)
}

/// Expected count of size-a general-position complete sets surviving vertex
/// elimination.
pub fn expected_type1_bound_h2(lambda: f64, q: f64, a: u32) -> f64 {
    let af = a as f64;
    4.0 * lambda.powf(af) * q.powf(af)
}

/// Expected count of size-b spine configurations surviving vertex
/// elimination.
pub fn expected_type2_bound_h2(lambda: f64, q: f64, b: u32, r: u32) -> f64 {
    4.0 * lambda.powf(b as f64) * q.powf(r as f64 + 2.0)
}

/// Expected number of K_{s+r} copies in the line-subsampled construction.
pub fn expected_ksr_g1(lambda: f64, q: f64, p: f64, a: u32, b: u32, r: u32) -> f64 {
    let (af, bf, rf) = (a as f64, b as f64, r as f64);
    let r3 = rf * rf * rf;
    8.0 * (lambda.powf(af * af / 2.0) * p.powf(af * af - af)
        / q.powf((af * af - 5.0 * af) / 2.0)
        + lambda.powf(bf * rf) * p.powf((2.0 * rf + 1.0) * bf - 4.0 * r3)
            / q.powf(bf * (rf - 1.0) - 5.0 * r3))
}

/// Expected number of K_{s+r} copies in the vertex-eliminated construction.
pub fn expected_ksr_g2(lambda: f64, q: f64, p: f64, a: u32, b: u32, r: u32) -> f64 {
    let (af, bf, rf) = (a as f64, b as f64, r as f64);
    let r3 = rf * rf * rf;
    8.0 * (lambda.powf(af) * q.powf(af) * p.powf(af * af - af)
        + lambda.powf(bf) * q.powf(rf + 2.0) * p.powf((2.0 * rf + 1.0) * bf - 4.0 * r3))
}

/// Upper-bound exponent for the maximum edge count at a given (r, delta):
/// the case split depends on whether (r - delta)/(1 - delta) is an integer.
pub fn rt_upper_exponent(r: u32, delta: f64) -> f64 {
    let rf = r as f64;
    let ratio = (rf - delta) / (1.0 - delta);
    if (ratio - ratio.round()).abs() <= EXPONENT_TOLERANCE {
        2.0 - (1.0 - delta) * (1.0 - delta) / (rf - delta)
    } else {
        2.0 - (1.0 - delta) * (1.0 - delta) / (rf + 1.0 - 2.0 * delta)
    }
}

/// Evaluates a named closed-form bound. Unknown names list the registry.
pub fn evaluate_bound(name: &str, inputs: &BTreeMap<String, f64>) -> Result<BoundReport> {
    let report = match name {
        "f-ss1-lower" => {
            let n = get(inputs, "n")?;
            BoundReport::new(name, inputs, (n * n.ln() / n.ln().ln()).sqrt(),
                "sqrt(n log n / log log n)")
        }
        "f-ss1-upper" => {
            let n = get(inputs, "n")?;
            let s = get(inputs, "s")?;
            BoundReport::new(name, inputs, n.ln().powf(4.0 * s * s) * n.sqrt(),
                "(log n)^(4 s^2) sqrt(n)")
        }
        "f-23-lower" => {
            let n = get(inputs, "n")?;
            BoundReport::new(name, inputs, (n * n.ln()).sqrt() / 2f64.sqrt(),
                "(1/sqrt(2)) sqrt(n log n)")
        }
        "f-23-upper" => {
            let n = get(inputs, "n")?;
            BoundReport::new(name, inputs, 2f64.sqrt() * (n * n.ln()).sqrt(),
                "sqrt(2) sqrt(n log n)")
        }
        "f-ssr-lower" => {
            let n = get(inputs, "n")?;
            let eps = get(inputs, "epsilon")?;
            BoundReport::new(name, inputs, n.powf(0.5 - eps), "n^(1/2 - epsilon)")
        }
        "f-ssr-upper" => {
            let n = get(inputs, "n")?;
            BoundReport::new(name, inputs, n.sqrt(), "sqrt(n)")
        }
        "h1-type1" => {
            let (l, q, a) = (get(inputs, "lambda")?, get(inputs, "q")?, get(inputs, "a")?);
            BoundReport::new(name, inputs, expected_type1_bound_h1(l, q, a as u32),
                "4 lambda^(a^2/2) / q^((a^2-5a)/2)")
        }
        "h1-type2" => {
            let (l, q) = (get(inputs, "lambda")?, get(inputs, "q")?);
            let (b, r) = (get(inputs, "b")? as u32, get(inputs, "r")? as u32);
            BoundReport::new(name, inputs, expected_type2_bound_h1(l, q, b, r),
                "4 lambda^(b r) / q^(b(r-1) - 5r^3)")
        }
        "h2-type1" => {
            let (l, q, a) = (get(inputs, "lambda")?, get(inputs, "q")?, get(inputs, "a")?);
            BoundReport::new(name, inputs, expected_type1_bound_h2(l, q, a as u32),
                "4 lambda^a q^a")
        }
        "h2-type2" => {
            let (l, q) = (get(inputs, "lambda")?, get(inputs, "q")?);
            let (b, r) = (get(inputs, "b")? as u32, get(inputs, "r")? as u32);
            BoundReport::new(name, inputs, expected_type2_bound_h2(l, q, b, r),
                "4 lambda^b q^(r+2)")
        }
        "g1-ksr" => {
            let (l, q, p) = (get(inputs, "lambda")?, get(inputs, "q")?, get(inputs, "p")?);
            let (a, b, r) = (
                get(inputs, "a")? as u32,
                get(inputs, "b")? as u32,
                get(inputs, "r")? as u32,
            );
            BoundReport::new(name, inputs, expected_ksr_g1(l, q, p, a, b, r),
                "8 (lambda^(a^2/2) p^(a^2-a) / q^((a^2-5a)/2) + lambda^(br) p^((2r+1)b-4r^3) / q^(b(r-1)-5r^3))")
        }
        "g2-ksr" => {
            let (l, q, p) = (get(inputs, "lambda")?, get(inputs, "q")?, get(inputs, "p")?);
            let (a, b, r) = (
                get(inputs, "a")? as u32,
                get(inputs, "b")? as u32,
                get(inputs, "r")? as u32,
            );
            BoundReport::new(name, inputs, expected_ksr_g2(l, q, p, a, b, r),
                "8 (lambda^a q^a p^(a^2-a) + lambda^b q^(r+2) p^((2r+1)b-4r^3))")
        }
        "rt-upper-exponent" => {
            let r = get(inputs, "r")? as u32;
            let delta = get(inputs, "delta")?;
            let mut rep = BoundReport::new(name, inputs, rt_upper_exponent(r, delta),
                "2 - (1-d)^2/(r-d) when (r-d)/(1-d) is an integer, else 2 - (1-d)^2/(r+1-2d)");
            let ratio = (r as f64 - delta) / (1.0 - delta);
            rep.details.insert("ratio".into(), ratio);
            rep.details.insert(
                "integer_case".into(),
                if (ratio - ratio.round()).abs() <= EXPONENT_TOLERANCE { 1.0 } else { 0.0 },
            );
            rep
        }
        "rt-lower-exponent" => {
            let r = get(inputs, "r")?;
            let delta = get(inputs, "delta")?;
            let eps = get(inputs, "epsilon")?;
            BoundReport::new(name, inputs, 2.0 - (1.0 - delta) / r - eps,
                "2 - (1-delta)/r - epsilon")
        }
        "join-main-term" => {
            let k = get(inputs, "k")?;
            let n = get(inputs, "n")?;
            BoundReport::new(name, inputs, 0.5 * (1.0 - 1.0 / k) * n * n,
                "(1/2)(1 - 1/k) n^2")
        }
        "z-lower" => {
            let n = get(inputs, "n")?;
            let s = get(inputs, "s")?;
            BoundReport::new(
                name,
                inputs,
                n.powf(2.0 - 2.0 / (s + 1.0)) * n.ln().powf(1.0 / (s * s - 1.0)),
                "n^(2 - 2/(s+1)) (log n)^(1/(s^2-1))",
            )
        }
        "g1a-union" => {
            let (alpha, q) = (get(inputs, "alpha")?, get(inputs, "q")?);
            let (lambda, p, s) = (get(inputs, "lambda")?, get(inputs, "p")?, get(inputs, "s")?);
            let exponent =
                2.0 * alpha * q.ln() + 3.0 * s.ln() * lambda * q - lambda * alpha * p / (2.0 * s);
            let mut rep = BoundReport::new(name, inputs, exponent.exp(),
                "exp(2 alpha log q + 3 (log s) lambda q - lambda alpha p / (2s))");
            rep.details.insert("exponent".into(), exponent);
            rep
        }
        "mid-lambda-exponent" => {
            let r = get(inputs, "r")? as u32;
            let delta = get(inputs, "delta")?;
            let b = get(inputs, "b")? as u32;
            let mut rep = BoundReport::new(name, inputs, mid_delta_lambda_exponent(r, delta, b),
                "((1-d)(2r+1)b - 4(1-d)r^3 + r + 3) / ((d(2r+1)-1)b - 4 d r^3)");
            rep.details.insert("limit".into(), mid_delta_limit(r, delta));
            rep
        }
        "gq-n" => {
            let (p, q) = (get(inputs, "p")?, get(inputs, "q")?);
            BoundReport::new(name, inputs, (p * q + 1.0) * (p + 1.0), "(pq+1)(p+1)")
        }
        "gq-alpha" => {
            let (s, p, q) = (get(inputs, "s")?, get(inputs, "p")?, get(inputs, "q")?);
            BoundReport::new(name, inputs, s * s * p * q, "s^2 p q")
        }
        "gq-edges" => {
            let (p, q) = (get(inputs, "p")?, get(inputs, "q")?);
            BoundReport::new(name, inputs, p.powi(3) * q.powi(2), "p^3 q^2")
        }
        "gq-delta" => {
            // Exponent bookkeeping for quadrangle families: sides scale as
            // r^pe and r^qe, the order as r^(2pe+qe), the alpha target as
            // r^(pe+qe); the reported value is their ratio.
            let (pe, qe) = (get(inputs, "pe")?, get(inputs, "qe")?);
            let delta = (pe + qe) / (2.0 * pe + qe);
            let mut rep = BoundReport::new(name, inputs, delta, "(pe+qe)/(2pe+qe)");
            rep.details
                .insert("edge_exponent_ratio".into(), (3.0 * pe + 2.0 * qe) / (2.0 * pe + qe));
            rep
        }
        other => {
            return Err(Error::UnknownBound(format!(
                "{other}; known: f-ss1-lower, f-ss1-upper, f-23-lower, f-23-upper, \
                 f-ssr-lower, f-ssr-upper, h1-type1, h1-type2, h2-type1, h2-type2, \
                 g1-ksr, g2-ksr, rt-upper-exponent, rt-lower-exponent, join-main-term, \
                 z-lower, g1a-union, mid-lambda-exponent, gq-n, gq-alpha, gq-edges, gq-delta"
            )))
        }
    };
    Ok(report)
}

/// Exact rational versions of the exponent formulas, used by tests to pin
/// the floating-point path.
pub mod exact {
    use num_rational::Ratio;

    pub type Rat = Ratio<i128>;

    pub fn rat(num: i128, den: i128) -> Rat {
        Ratio::new(num, den)
    }

    /// 1 - 1/r + (2d - 1)(2 + 1/r) - 10r^2/b
    pub fn small_delta_lambda_exponent(r: i128, delta: Rat, b: i128) -> Rat {
        let one = Ratio::from_integer(1);
        one - rat(1, r)
            + (delta * 2 - one) * (Ratio::from_integer(2) + rat(1, r))
            - rat(10 * r * r, b)
    }

    /// ((1-d)(2r+1)b - 4(1-d)r^3 + r + 3) / ((d(2r+1)-1)b - 4 d r^3)
    pub fn mid_delta_lambda_exponent(r: i128, delta: Rat, b: i128) -> Rat {
        let one = Ratio::from_integer(1);
        let rr = Ratio::from_integer(r);
        let bb = Ratio::from_integer(b);
        let r3 = Ratio::from_integer(r * r * r);
        let two_r_plus_1 = Ratio::from_integer(2 * r + 1);
        let num = (one - delta) * two_r_plus_1 * bb - (one - delta) * r3 * 4
            + rr
            + Ratio::from_integer(3);
        let den = (delta * two_r_plus_1 - one) * bb - delta * r3 * 4;
        num / den
    }

    /// (1-d)(2r+1) / (d(2r+1)-1)
    pub fn mid_delta_limit(r: i128, delta: Rat) -> Rat {
        let one = Ratio::from_integer(1);
        let two_r_plus_1 = Ratio::from_integer(2 * r + 1);
        (one - delta) * two_r_plus_1 / (delta * two_r_plus_1 - one)
    }

    /// Case-split upper-bound exponent; exact integrality test.
    pub fn rt_upper_exponent(r: i128, delta: Rat) -> Rat {
        let one = Ratio::from_integer(1);
        let two = Ratio::from_integer(2);
        let rr = Ratio::from_integer(r);
        let ratio = (rr - delta) / (one - delta);
        if ratio.is_integer() {
            two - (one - delta) * (one - delta) / (rr - delta)
        } else {
            two - (one - delta) * (one - delta) / (rr + one - delta * 2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn small_delta_example_values() {
        // r=1, delta=0.6, s=3, n=10^6: q = 1009, p ~ 16.5 (flagged p > 1).
        let p = derive_params_small_delta(1, 3, 0.05, 0.6, 1_000_000).unwrap();
        assert_eq!(p.q, 1009);
        assert!((p.kappa - 20.0 * 3.0 * 3f64.ln()).abs() < 1e-9);
        assert!((p.p - 16.5).abs() < 0.1, "p = {}", p.p);
        assert!(p.feasibility.iter().any(|f| f == "p > 1"));
        assert_eq!(p.a, 20);
        assert_eq!(p.b, 2);
    }

    #[test]
    fn sqrt_variant_sets_p_one() {
        let p = derive_params_small_delta(1, 3, 0.05, 0.5, 10_000).unwrap();
        assert_eq!(p.regime, Regime::SqrtN);
        assert_eq!(p.p, 1.0);
        assert!((p.alpha - 20.0 * 3.0 * 3f64.ln() * 100.0).abs() < 1e-6);
        assert!((p.alpha - 6591.67).abs() < 1.0);
    }

    #[test]
    fn a_is_twenty_r() {
        let p = derive_params_small_delta(2, 4, 0.05, 0.55, 100_000).unwrap();
        assert_eq!(p.a, 40);
    }

    #[test]
    fn small_delta_rejects_out_of_range() {
        assert!(matches!(
            derive_params_small_delta(1, 3, 0.05, 0.7, 1000),
            Err(Error::BadRange(_))
        ));
        assert!(matches!(
            derive_params_small_delta(1, 3, 0.05, 0.4, 1000),
            Err(Error::BadRange(_))
        ));
    }

    #[test]
    fn boundary_lambda_exponent_matches_closed_form() {
        // At the regime top the exponent collapses to 1 - 10 r^2 / b.
        for r in 1u32..=3 {
            let top = 0.5 + 1.0 / (2.0 * (2.0 * r as f64 + 1.0));
            let p = derive_params_small_delta(r, 40, 0.9, top, 1_000_000).unwrap();
            let expected = 1.0 - 10.0 * (r as f64).powi(2) / p.b as f64;
            assert!(
                (p.lambda_exponent - expected).abs() < EXPONENT_TOLERANCE,
                "r={r}: {} vs {expected}",
                p.lambda_exponent
            );
        }
    }

    #[test]
    fn mid_delta_regime_boundary_rejected() {
        let bottom = 0.5 + 1.0 / 6.0;
        assert!(matches!(
            derive_params_mid_delta(1, 3, 0.05, bottom, 1000),
            Err(Error::BadRange(_))
        ));
        assert!(derive_params_mid_delta(1, 3, 0.05, 0.8, 1000).is_ok());
    }

    #[test]
    fn mid_delta_exponent_approaches_limit() {
        let e = mid_delta_lambda_exponent(1, 0.8, 10_000);
        let limit = mid_delta_limit(1, 0.8);
        assert!((limit - 0.6 / 1.4).abs() < 1e-12);
        assert!((e - limit).abs() <= 52.0 / 10_000.0, "e={e} limit={limit}");
    }

    #[test]
    fn mid_delta_a_expression() {
        // r=1, delta=0.8: a = 2 + max(ceil(1.25), ceil(10)) = 12.
        let p = derive_params_mid_delta(1, 100, 0.9, 0.8, 1_000_000).unwrap();
        assert_eq!(p.a, 12);
        assert!(p.lambda_exponent > 0.0 && p.lambda_exponent < 1.0);
    }

    #[test]
    fn exact_and_float_exponents_agree() {
        use exact::rat;
        // Sparse regime at delta = 3/5.
        let f = {
            let p = derive_params_small_delta(1, 3, 0.05, 0.6, 1_000_000).unwrap();
            p.lambda_exponent
        };
        let e = exact::small_delta_lambda_exponent(1, rat(3, 5), 2)
            .to_f64()
            .unwrap();
        assert!((f - e).abs() < EXPONENT_TOLERANCE, "{f} vs {e}");

        // Dense regime at delta = 4/5, b = 346.
        let f = mid_delta_lambda_exponent(1, 0.8, 346);
        let e = exact::mid_delta_lambda_exponent(1, rat(4, 5), 346)
            .to_f64()
            .unwrap();
        assert!((f - e).abs() < EXPONENT_TOLERANCE, "{f} vs {e}");
    }

    #[test]
    fn upper_exponent_case_split() {
        assert!((rt_upper_exponent(1, 0.6) - 1.6).abs() < EXPONENT_TOLERANCE);
        let expected = 2.0 - 0.16 / 1.8;
        assert!((rt_upper_exponent(2, 0.6) - expected).abs() < EXPONENT_TOLERANCE);
        // Exact rational path agrees.
        use exact::rat;
        let e1 = exact::rt_upper_exponent(1, rat(3, 5)).to_f64().unwrap();
        assert!((e1 - 1.6).abs() < 1e-15);
        let e2 = exact::rt_upper_exponent(2, rat(3, 5)).to_f64().unwrap();
        assert!((e2 - expected).abs() < 1e-12);
    }

    #[test]
    fn fraction_error_examples() {
        let r = fraction_error_bound(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.holds, Some(true));

        let r = fraction_error_bound(2.0, 4.0, 1.0, -2.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!((r.details["deviation"] - 1.0).abs() < 1e-15);
        assert_eq!(r.holds, Some(true));

        assert!(fraction_error_bound(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(fraction_error_bound(1.0, 1.0, 0.6, 0.0).is_err());
    }

    #[test]
    fn bound_registry_basics() {
        let mut inputs = BTreeMap::new();
        inputs.insert("k".into(), 2.0);
        inputs.insert("n".into(), 10.0);
        let r = evaluate_bound("join-main-term", &inputs).unwrap();
        assert_eq!(r.value, 25.0);

        assert!(matches!(
            evaluate_bound("no-such-bound", &inputs),
            Err(Error::UnknownBound(_))
        ));
        assert!(matches!(
            evaluate_bound("z-lower", &BTreeMap::new()),
            Err(Error::BadInputs(_))
        ));
    }

    #[test]
    fn quadrangle_family_deltas() {
        let rows = [
            ((1.0, 1.0), 2.0 / 3.0),
            ((1.0, 2.0), 3.0 / 4.0),
            ((2.0, 1.0), 3.0 / 5.0),
            ((2.0, 3.0), 5.0 / 7.0),
            ((3.0, 2.0), 5.0 / 8.0),
        ];
        for ((pe, qe), want) in rows {
            let mut inputs = BTreeMap::new();
            inputs.insert("pe".into(), pe);
            inputs.insert("qe".into(), qe);
            let r = evaluate_bound("gq-delta", &inputs).unwrap();
            assert!((r.value - want).abs() < 1e-12, "({pe},{qe})");
            // Edge exponent over order exponent is always 1 + delta.
            assert!((r.details["edge_exponent_ratio"] - (1.0 + want)).abs() < 1e-12);
        }
    }

    #[test]
    fn gq_row_values() {
        let mut inputs = BTreeMap::new();
        inputs.insert("p".into(), 2.0);
        inputs.insert("q".into(), 2.0);
        assert_eq!(evaluate_bound("gq-n", &inputs).unwrap().value, 15.0);
        assert_eq!(evaluate_bound("gq-edges", &inputs).unwrap().value, 32.0);
    }

    #[test]
    fn manual_params_pass_through() {
        let p = derive_params_manual(1, 3, 0.1, 0.6, 121, 4.0, 0.5, 40.0).unwrap();
        assert_eq!(p.regime, Regime::Manual);
        assert_eq!(p.q, 11);
        assert_eq!(p.lambda, 4.0);
        assert!(!p.feasibility.is_empty());
    }
}
