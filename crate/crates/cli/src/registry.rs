//! Name registries for models, step methods and start points.

use pareto_trm::sampling::Halton;
use pareto_trm::{Family, MOProblem, ModelSpec, RbfKernel, ShapeParameter, StepKind};

use crate::CliError;

pub const MODEL_NAMES: [&str; 8] = [
    "rbf-cubic",
    "rbf-mq",
    "rbf-mq-adaptive",
    "rbf-gauss",
    "rbf-gauss-adaptive",
    "lagrange-1",
    "lagrange-2",
    "taylor-fd1",
];

pub const STEP_NAMES: [&str; 4] = ["steepest", "strict-pc", "ps", "exact-pc"];

pub fn model_spec(name: &str) -> Result<ModelSpec, CliError> {
    let fixed = ShapeParameter::Fixed { alpha: 1.0 };
    let spec = match name {
        "rbf-cubic" => ModelSpec::rbf_cubic(),
        "rbf-mq" => ModelSpec::rbf(RbfKernel::Multiquadric, 1, fixed),
        "rbf-mq-adaptive" => ModelSpec::rbf(RbfKernel::Multiquadric, 1, ShapeParameter::adaptive()),
        "rbf-gauss" => ModelSpec::rbf(RbfKernel::Gaussian, 1, fixed),
        "rbf-gauss-adaptive" => ModelSpec::rbf(RbfKernel::Gaussian, 1, ShapeParameter::adaptive()),
        "lagrange-1" => ModelSpec::lagrange(1),
        "lagrange-2" => ModelSpec::lagrange(2),
        "taylor-fd1" => ModelSpec::taylor_fd1(),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown model `{name}`; known models: {}",
                MODEL_NAMES.join(", ")
            )))
        }
    };
    Ok(spec)
}

pub fn step_kind(name: &str) -> Result<StepKind, CliError> {
    match name {
        "steepest" => Ok(StepKind::ModifiedParetoCauchy),
        "strict-pc" => Ok(StepKind::StrictParetoCauchy),
        "ps" => Ok(StepKind::PascolettiSerafini),
        "exact-pc" => Ok(StepKind::ExactParetoCauchy),
        _ => Err(CliError::Usage(format!(
            "unknown step method `{name}`; known methods: {}",
            STEP_NAMES.join(", ")
        ))),
    }
}

pub fn family(name: &str) -> Result<Family, CliError> {
    name.parse::<Family>().map_err(|e| CliError::Usage(e.to_string()))
}

/// FNV-1a over the key parts; stable across platforms and releases.
fn start_key(seed: u64, family: Family, n: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = seed
        .to_le_bytes()
        .into_iter()
        .chain(family.name().bytes())
        .chain((n as u64).to_le_bytes());
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Fraction of each box side kept clear of the faces for start points.
const START_MARGIN: f64 = 0.05;

/// Deterministic interior start points (original coordinates) for a cell.
pub fn start_points(seed: u64, family: Family, prob: &MOProblem, count: usize) -> Vec<Vec<f64>> {
    let n = prob.n_vars;
    let mut halton = Halton::new(n, start_key(seed, family, n));
    (0..count)
        .map(|_| {
            let u: Vec<f64> = halton
                .next_point()
                .into_iter()
                .map(|t| START_MARGIN + (1.0 - 2.0 * START_MARGIN) * t)
                .collect();
            let x = prob.feasible.unscale(&u).expect("dimension matches");
            prob.feasible.project(&x).expect("dimension matches")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use pareto_trm::{make_problem, TestProblemSpec};

    #[test]
    fn every_registered_name_resolves() {
        for name in MODEL_NAMES {
            model_spec(name).unwrap().validate().unwrap();
        }
        for name in STEP_NAMES {
            step_kind(name).unwrap();
        }
    }

    #[test]
    fn unknown_names_list_the_registry() {
        let msg = model_spec("kriging").unwrap_err().to_string();
        assert!(msg.contains("rbf-cubic") && msg.contains("taylor-fd1"));
        assert!(step_kind("newton").unwrap_err().to_string().contains("exact-pc"));
    }

    #[test]
    fn start_points_are_interior_and_repeatable() {
        let prob = make_problem(&TestProblemSpec::new(Family::ZDT1, 4)).unwrap();
        let a = start_points(3, Family::ZDT1, &prob, 5);
        assert_eq!(a, start_points(3, Family::ZDT1, &prob, 5));
        assert_ne!(a, start_points(4, Family::ZDT1, &prob, 5));
        for x in &a {
            assert!(x.iter().all(|v| (0.05..=0.95).contains(v)));
        }
    }
}
