use serde::{Deserialize, Serialize};

use super::special::{student_t_cdf, student_t_sf};
use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// H1: mean(a) > mean(b).
    Greater,
    /// H1: mean(a) < mean(b).
    Less,
    TwoSided,
}

impl Alternative {
    pub fn as_str(self) -> &'static str {
        match self {
            Alternative::Greater => "greater",
            Alternative::Less => "less",
            Alternative::TwoSided => "two_sided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t_stat: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    pub p_value: f64,
    pub alternative: Alternative,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Two-sample t-test without the equal-variance assumption.
pub fn welch_t_test(a: &[f64], b: &[f64], alternative: Alternative) -> Result<WelchResult, AnalysisError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(AnalysisError::DegenerateSample(format!(
            "need at least 2 observations per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(AnalysisError::DegenerateSample("non-finite observation".into()));
    }
    let (mean_a, var_a) = mean_and_variance(a);
    let (mean_b, var_b) = mean_and_variance(b);
    if var_a == 0.0 && var_b == 0.0 {
        return Err(AnalysisError::DegenerateSample("both samples have zero variance".into()));
    }

    let (n_a, n_b) = (a.len() as f64, b.len() as f64);
    let se2_a = var_a / n_a;
    let se2_b = var_b / n_b;
    let se2 = se2_a + se2_b;
    let t_stat = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (se2_a * se2_a / (n_a - 1.0) + se2_b * se2_b / (n_b - 1.0));

    let p_value = match alternative {
        Alternative::Greater => student_t_sf(t_stat, df),
        Alternative::Less => student_t_cdf(t_stat, df),
        Alternative::TwoSided => (2.0 * student_t_sf(t_stat, df).min(student_t_cdf(t_stat, df))).min(1.0),
    };

    Ok(WelchResult {
        t_stat,
        df,
        p_value,
        alternative,
        n_a: a.len(),
        n_b: b.len(),
        mean_a,
        mean_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_samples_give_half() {
        let a = [0.1, 0.4, -0.2, 0.3];
        let r = welch_t_test(&a, &a, Alternative::Greater).unwrap();
        assert_eq!(r.t_stat, 0.0);
        assert_eq!(r.p_value, 0.5);
    }

    #[test]
    fn shifted_samples() {
        let r = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0, 1.0, 2.0, 3.0, 4.0], Alternative::Greater).unwrap();
        assert_eq!(r.t_stat, 1.0);
        assert_eq!(r.df, 8.0);
        // scipy.stats.t.sf(1.0, 8)
        assert!((r.p_value - 0.17329675354366708).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            welch_t_test(&[1.0, 1.0], &[1.0, 1.0], Alternative::Greater),
            Err(AnalysisError::DegenerateSample(_))
        ));
        assert!(welch_t_test(&[1.0], &[1.0, 2.0], Alternative::Greater).is_err());
        assert!(welch_t_test(&[1.0, f64::NAN], &[1.0, 2.0], Alternative::Greater).is_err());
    }

    #[test]
    fn one_constant_sample_is_fine() {
        let r = welch_t_test(&[1.0, 1.0, 1.0], &[0.0, 0.5, 1.0], Alternative::Greater).unwrap();
        assert!(r.df > 0.0);
        assert!(r.p_value < 0.5);
    }
}
