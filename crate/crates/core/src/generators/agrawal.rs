use serde::{Deserialize, Serialize};

use super::{check_probability, instance_rng, Synthetic};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{AttributeSpec, LabeledExample, Schema, Value};

const AGE_MIN: u64 = 20;
const AGE_VALUES: u64 = 61;
const EDUCATION_LEVELS: u32 = 5;
const CAR_MAKES: u32 = 20;
const ZIP_CODES: u32 = 9;
const HOUSE_VALUE_MAX: f64 = 1_350_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgrawalParams {
    /// Classification function, 1 to 3.
    pub function: u8,
    /// Numeric perturbation as a fraction of each attribute's range.
    pub perturbation: f64,
}

impl Default for AgrawalParams {
    fn default() -> Self {
        Self {
            function: 1,
            perturbation: 0.05,
        }
    }
}

/// Loan-applicant records labeled by a fixed rule over salary, age and
/// education. The label is computed before numeric perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgrawalGenerator {
    params: AgrawalParams,
    schema: Schema,
    rng: SplitMix64,
}

struct Person {
    salary: f64,
    commission: f64,
    age: f64,
    elevel: u32,
    car: u32,
    zipcode: u32,
    hvalue: f64,
    hyears: f64,
    loan: f64,
}

impl AgrawalGenerator {
    pub fn new(params: AgrawalParams, seed: u64) -> Result<Self> {
        if !(1..=3).contains(&params.function) {
            return Err(Error::InvalidConfig(format!(
                "Agrawal function must be 1, 2 or 3, got {}",
                params.function
            )));
        }
        check_probability("Agrawal perturbation", params.perturbation)?;
        let schema = Schema::new(
            vec![
                AttributeSpec::numeric("salary"),
                AttributeSpec::numeric("commission"),
                AttributeSpec::numeric("age"),
                AttributeSpec::nominal("elevel", EDUCATION_LEVELS),
                AttributeSpec::nominal("car", CAR_MAKES),
                AttributeSpec::nominal("zipcode", ZIP_CODES),
                AttributeSpec::numeric("hvalue"),
                AttributeSpec::numeric("hyears"),
                AttributeSpec::numeric("loan"),
            ],
            2,
        )
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(Self {
            params,
            schema,
            rng: instance_rng(seed),
        })
    }

    fn classify(&self, p: &Person) -> u32 {
        let young = p.age < 40.0;
        let old = p.age >= 60.0;
        let group_a = match self.params.function {
            1 => young || old,
            2 => {
                let (lo, hi) = if young {
                    (50_000.0, 100_000.0)
                } else if old {
                    (25_000.0, 75_000.0)
                } else {
                    (75_000.0, 125_000.0)
                };
                (lo..=hi).contains(&p.salary)
            }
            _ => {
                let levels = if young {
                    0..=1
                } else if old {
                    2..=4
                } else {
                    1..=3
                };
                levels.contains(&p.elevel)
            }
        };
        u32::from(!group_a)
    }

    fn perturb(&mut self, value: f64, min: f64, max: f64) -> f64 {
        let shift = (2.0 * self.rng.next_f64() - 1.0) * (max - min) * self.params.perturbation;
        (value + shift).clamp(min, max)
    }
}

impl Synthetic for AgrawalGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn generate(&mut self) -> LabeledExample {
        let rng = &mut self.rng;
        let salary = 20_000.0 + 130_000.0 * rng.next_f64();
        let commission = if salary >= 75_000.0 {
            0.0
        } else {
            10_000.0 + 65_000.0 * rng.next_f64()
        };
        let age = (AGE_MIN + rng.below(AGE_VALUES)) as f64;
        let elevel = rng.below(u64::from(EDUCATION_LEVELS)) as u32;
        let car = rng.below(u64::from(CAR_MAKES)) as u32;
        let zipcode = rng.below(u64::from(ZIP_CODES)) as u32;
        let hvalue = f64::from(ZIP_CODES - zipcode) * 100_000.0 * (0.5 + rng.next_f64());
        let hyears = (1 + rng.below(30)) as f64;
        let loan = 500_000.0 * rng.next_f64();
        let mut p = Person {
            salary,
            commission,
            age,
            elevel,
            car,
            zipcode,
            hvalue,
            hyears,
            loan,
        };
        let label = self.classify(&p);
        if self.params.perturbation > 0.0 {
            p.salary = self.perturb(p.salary, 20_000.0, 150_000.0);
            if p.commission > 0.0 {
                p.commission = self.perturb(p.commission, 10_000.0, 75_000.0);
            }
            p.age = self.perturb(p.age, 20.0, 80.0);
            p.hvalue = self.perturb(p.hvalue, 0.0, HOUSE_VALUE_MAX);
            p.hyears = self.perturb(p.hyears, 1.0, 30.0);
            p.loan = self.perturb(p.loan, 0.0, 500_000.0);
        }
        let values = vec![
            Value::Numeric(p.salary),
            Value::Numeric(p.commission),
            Value::Numeric(p.age),
            Value::Nominal(p.elevel),
            Value::Nominal(p.car),
            Value::Nominal(p.zipcode),
            Value::Numeric(p.hvalue),
            Value::Numeric(p.hyears),
            Value::Numeric(p.loan),
        ];
        LabeledExample::new(values, label)
    }

    /// Age is uniform over 61 integers; function 2 keeps a 50k-wide salary
    /// band out of 130k in every age group.
    fn class_priors(&self) -> Vec<f64> {
        let first = match self.params.function {
            1 => 41.0 / 61.0,
            2 => 5.0 / 13.0,
            _ => 163.0 / 305.0,
        };
        vec![first, 1.0 - first]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_labels_follow_age_rule() {
        let params = AgrawalParams {
            function: 1,
            perturbation: 0.0,
        };
        let mut g = AgrawalGenerator::new(params, 2).unwrap();
        for _ in 0..1000 {
            let e = g.generate();
            let age = e.instance.values[2].as_f64();
            let expected = u32::from((40.0..60.0).contains(&age));
            assert_eq!(e.label, expected);
        }
    }

    #[test]
    fn rejects_unsupported_function() {
        let params = AgrawalParams {
            function: 7,
            ..AgrawalParams::default()
        };
        assert!(AgrawalGenerator::new(params, 0).is_err());
    }
}
