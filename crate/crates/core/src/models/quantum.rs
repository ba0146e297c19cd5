//! End-to-end quantum correlation report: build `P`, check its algebra,
//! bracket the number of hidden values and optionally simulate.

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::hidden::{hv_model_from_factorization, hv_sample, tv_threshold, SampleReport};
use crate::bounds::{cover_lower_bound, SupportPattern};
use crate::constructions::{complete_unitary_columns, correlation_objects, CorrelationSpec};
use crate::error::Result;
use crate::io::format_rational;
use crate::numkit::NonnegFactorization;
use crate::ratlinalg::{RatMatrix, Rational};
use crate::tensor::DenseTensor;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationSummary {
    pub trials: u64,
    pub tv: f64,
    /// 3σ multinomial threshold for this many trials.
    pub tv_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuantumReport {
    pub n: usize,
    /// `s²` as an exact string.
    pub scale_sq: String,
    pub lambda_magnitude: f64,
    /// `max |C − (λu0u0* − λu1u1*)|`.
    pub reconstruction_error: f64,
    /// `max |P − ½|u0v0 + u1v1|²|`.
    pub max_deviation: f64,
    pub zero_diagonal: bool,
    pub symmetric: bool,
    pub sum_is_one: bool,
    /// `det(λI − D) = λ^N + Σ_{x<y}(b_y − b_x)² λ^{N−2}`, exactly.
    pub char_poly_matches: bool,
    pub unitary_extendable: bool,
    /// Certified lower bound on `|Ω|` from box covers of the support of `P`.
    pub cover_lower: usize,
    pub cover_exact: bool,
    /// Hidden values used by the exact row-split model.
    pub omega_size: usize,
    pub log2_omega: f64,
    pub lower_bound_holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSummary>,
}

#[derive(Clone, Debug)]
pub struct QuantumOutcome {
    pub report: QuantumReport,
    pub p: RatMatrix,
    /// Exact model: one hidden value per nonzero row of `P`.
    pub witness: NonnegFactorization<Rational>,
    pub sample: Option<SampleReport>,
}

/// `P = Σ_x e_x ⊗ P_{x,·}` over nonzero rows.
pub fn row_split_factorization(p: &RatMatrix) -> NonnegFactorization<Rational> {
    let (r, c) = p.shape();
    let terms = (0..r)
        .filter(|&x| p.row(x).iter().any(|v| !v.is_zero()))
        .map(|x| {
            let e = (0..r)
                .map(|i| {
                    if i == x {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            vec![e, p.row(x).to_vec()]
        })
        .collect();
    NonnegFactorization::new(vec![r, c], terms).expect("rows have matching lengths")
}

pub fn quantum_report(
    n: usize,
    simulate: Option<u64>,
    seed: u64,
    budget: u64,
) -> Result<QuantumOutcome> {
    let spec = CorrelationSpec::new(n)?;
    let obj = correlation_objects(&spec)?;
    let p = obj.p.clone();

    let s = obj.scale();
    let recon = obj.spectral.reconstruct();
    let mut reconstruction_error = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let c = obj.difference.get(x, y).clone();
            let target = Complex64::new(s * c.to_f64().unwrap_or(f64::NAN), 0.0);
            reconstruction_error = reconstruction_error.max((recon[(x, y)] - target).norm());
        }
    }

    let mut total = Rational::zero();
    for x in 0..n {
        for y in x + 1..n {
            let d = obj.difference.get(x, y);
            total += d * d;
        }
    }
    let poly = obj.difference.char_poly()?;
    let char_poly_matches = (0..=n).all(|k| {
        let expected = if k == n {
            Rational::one()
        } else if k + 2 == n {
            total.clone()
        } else {
            Rational::zero()
        };
        poly.coeff(k) == expected
    });

    let cover = cover_lower_bound(&SupportPattern::of_matrix(&p), budget);
    let witness = row_split_factorization(&p);
    let omega_size = witness.len();

    let sample = match simulate {
        Some(trials) => {
            let pt = DenseTensor::from_matrix(&p);
            let model = hv_model_from_factorization(&pt, &witness)?.to_f64();
            Some(hv_sample(&model, trials, seed)?)
        }
        None => None,
    };
    let simulation = sample.as_ref().map(|sr| SimulationSummary {
        trials: sr.trials,
        tv: sr.tv,
        tv_threshold: tv_threshold(&p.to_f64_entries(), sr.trials),
    });

    let report = QuantumReport {
        n,
        scale_sq: format_rational(&obj.scale_sq),
        lambda_magnitude: obj.spectral.lambda_magnitude,
        reconstruction_error,
        max_deviation: obj.max_deviation,
        zero_diagonal: (0..n).all(|x| p.get(x, x).is_zero()),
        symmetric: p.is_symmetric(),
        sum_is_one: p.sum().is_one(),
        char_poly_matches,
        unitary_extendable: complete_unitary_columns(&obj.u0, &obj.u1).extendable,
        cover_lower: cover.lower,
        cover_exact: cover.exact,
        omega_size,
        log2_omega: (omega_size as f64).log2(),
        lower_bound_holds: omega_size >= cover.lower,
        simulation,
    };
    Ok(QuantumOutcome {
        report,
        p,
        witness,
        sample,
    })
}
