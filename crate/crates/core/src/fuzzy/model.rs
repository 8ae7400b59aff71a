use serde::{Deserialize, Serialize};

use super::MembershipFunction;
use crate::data::Dataset;
use crate::{Error, Predictor, Result};

/// Total firing below this is treated as "no rule fired".
pub const DEGENERATE_FIRING: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyVariable {
    pub name: String,
    pub range: [f64; 2],
    pub terms: Vec<MembershipFunction>,
}

impl FuzzyVariable {
    pub fn new(name: impl Into<String>, range: [f64; 2], terms: Vec<MembershipFunction>) -> Result<Self> {
        let v = Self {
            name: name.into(),
            range,
            terms,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidModel(format!(
                "variable `{}` has invalid range [{lo}, {hi}]",
                self.name
            )));
        }
        if self.terms.is_empty() {
            return Err(Error::InvalidModel(format!("variable `{}` has no terms", self.name)));
        }
        self.terms.iter().try_for_each(MembershipFunction::validate)
    }

    pub fn width(&self) -> f64 {
        self.range[1] - self.range[0]
    }
}

/// First-order Sugeno consequent `p0 + p1·x1 + … + pn·xn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConsequentCoeffs(pub Vec<f64>);

impl ConsequentCoeffs {
    pub fn zeros(inputs: usize) -> Self {
        Self(vec![0.0; inputs + 1])
    }

    pub fn bias(&self) -> f64 {
        self.0[0]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0[1..].iter().zip(x).fold(self.0[0], |acc, (p, xi)| acc + p * xi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: Vec<usize>,
    pub consequent: ConsequentCoeffs,
}

/// Per-layer values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// Layer 1, indexed `[variable][term]`.
    pub memberships: Vec<Vec<f64>>,
    /// Layer 2.
    pub firing: Vec<f64>,
    /// Layer 3.
    pub normalized: Vec<f64>,
    /// Layer 4, `w̄_i · f_i(x)`.
    pub contributions: Vec<f64>,
    /// Layer 5.
    pub output: f64,
    /// Set when every firing strength underflowed; `normalized` is then
    /// uniform.
    pub degenerate: bool,
}

/// Memberships, firing, normalized firing and the degeneracy flag.
pub(crate) type FiringLayers = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, bool);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr")]
pub struct AnfisModel {
    variables: Vec<FuzzyVariable>,
    rules: Vec<Rule>,
}

#[derive(Deserialize)]
struct ModelRepr {
    variables: Vec<FuzzyVariable>,
    rules: Vec<Rule>,
}

impl TryFrom<ModelRepr> for AnfisModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        Self::new(r.variables, r.rules)
    }
}

impl AnfisModel {
    pub fn new(variables: Vec<FuzzyVariable>, rules: Vec<Rule>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidModel("no input variables".into()));
        }
        if rules.is_empty() {
            return Err(Error::InvalidModel("no rules".into()));
        }
        variables.iter().try_for_each(FuzzyVariable::validate)?;
        let n = variables.len();
        for (i, rule) in rules.iter().enumerate() {
            check_antecedent(&variables, &rule.antecedent)
                .map_err(|e| Error::InvalidModel(format!("rule {i}: {e}")))?;
            if rule.consequent.0.len() != n + 1 {
                return Err(Error::InvalidModel(format!(
                    "rule {i}: consequent has {} coefficients, expected {}",
                    rule.consequent.0.len(),
                    n + 1
                )));
            }
        }
        Ok(Self { variables, rules })
    }

    pub fn variables(&self) -> &[FuzzyVariable] {
        &self.variables
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn input_dim(&self) -> usize {
        self.variables.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Number of consequent coefficients across all rules.
    pub fn consequent_len(&self) -> usize {
        self.rules.len() * (self.variables.len() + 1)
    }

    pub fn consequents_flat(&self) -> Vec<f64> {
        self.rules.iter().flat_map(|r| r.consequent.0.iter().copied()).collect()
    }

    /// Replaces every rule consequent from a rule-major flat vector.
    pub fn with_consequents(&self, flat: &[f64]) -> Result<Self> {
        if flat.len() != self.consequent_len() {
            return Err(Error::DimensionMismatch {
                expected: self.consequent_len(),
                got: flat.len(),
            });
        }
        let mut out = self.clone();
        let k = self.variables.len() + 1;
        for (rule, chunk) in out.rules.iter_mut().zip(flat.chunks(k)) {
            rule.consequent = ConsequentCoeffs(chunk.to_vec());
        }
        Ok(out)
    }

    pub(crate) fn variables_mut(&mut self) -> &mut [FuzzyVariable] {
        &mut self.variables
    }

    /// Layer-1 degrees, indexed `[variable][term]`.
    pub fn memberships(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(x)?;
        Ok(self
            .variables
            .iter()
            .zip(x)
            .map(|(v, &xi)| v.terms.iter().map(|mf| mf.eval(xi)).collect())
            .collect())
    }

    /// Layers 1–3: memberships, firing strengths, normalized strengths and
    /// the degeneracy flag.
    pub(crate) fn normalized_firing(&self, x: &[f64]) -> Result<FiringLayers> {
        let memberships = self.memberships(x)?;
        let firing: Vec<f64> = self
            .rules
            .iter()
            .map(|r| {
                r.antecedent
                    .iter()
                    .enumerate()
                    .map(|(j, &t)| memberships[j][t])
                    .product()
            })
            .collect();
        let total: f64 = firing.iter().sum();
        let m = self.rules.len();
        let (normalized, degenerate) = if total < DEGENERATE_FIRING {
            (vec![1.0 / m as f64; m], true)
        } else {
            (firing.iter().map(|w| w / total).collect(), false)
        };
        Ok((memberships, firing, normalized, degenerate))
    }

    pub fn forward(&self, x: &[f64]) -> Result<ForwardTrace> {
        let (memberships, firing, normalized, degenerate) = self.normalized_firing(x)?;
        let contributions: Vec<f64> = self
            .rules
            .iter()
            .zip(&normalized)
            .map(|(r, wn)| wn * r.consequent.eval(x))
            .collect();
        let output = contributions.iter().sum();
        Ok(ForwardTrace {
            memberships,
            firing,
            normalized,
            contributions,
            output,
            degenerate,
        })
    }

    pub fn try_predict(&self, x: &[f64]) -> Result<f64> {
        self.forward(x).map(|t| t.output)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.variables.len() {
            return Err(Error::DimensionMismatch {
                expected: self.variables.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Predictor for AnfisModel {
    /// Panics on a dimension mismatch; use [`AnfisModel::try_predict`] for
    /// untrusted input.
    fn predict(&self, x: &[f64]) -> f64 {
        self.try_predict(x).expect("input dimension matches model")
    }
}

fn check_antecedent(variables: &[FuzzyVariable], antecedent: &[usize]) -> Result<()> {
    if antecedent.len() != variables.len() {
        return Err(Error::InvalidModel(format!(
            "antecedent has {} entries for {} variables",
            antecedent.len(),
            variables.len()
        )));
    }
    for (v, &t) in variables.iter().zip(antecedent) {
        if t >= v.terms.len() {
            return Err(Error::InvalidModel(format!(
                "term index {t} out of range for `{}` ({} terms)",
                v.name,
                v.terms.len()
            )));
        }
    }
    Ok(())
}

/// Rule base over the given variables with zero consequents.
///
/// Without a subset every combination of terms becomes a rule (in
/// lexicographic order, last variable fastest); otherwise exactly the listed
/// antecedent tuples are used.
pub fn build_grid_model(variables: Vec<FuzzyVariable>, subset: Option<&[Vec<usize>]>) -> Result<AnfisModel> {
    if variables.is_empty() {
        return Err(Error::InvalidModel("no input variables".into()));
    }
    let n = variables.len();
    let antecedents: Vec<Vec<usize>> = match subset {
        Some(s) => {
            for a in s {
                check_antecedent(&variables, a)?;
            }
            s.to_vec()
        }
        None => {
            let counts: Vec<usize> = variables.iter().map(|v| v.terms.len()).collect();
            let mut all = vec![vec![]];
            for &c in &counts {
                all = all
                    .into_iter()
                    .flat_map(|prefix: Vec<usize>| {
                        (0..c).map(move |t| {
                            let mut p = prefix.clone();
                            p.push(t);
                            p
                        })
                    })
                    .collect();
            }
            all
        }
    };
    let rules = antecedents
        .into_iter()
        .map(|antecedent| Rule {
            antecedent,
            consequent: ConsequentCoeffs::zeros(n),
        })
        .collect();
    AnfisModel::new(variables, rules)
}

/// Gaussian grid partition fitted to the observed range of each input.
///
/// Centres are evenly spaced over `[min, max]`; every term shares
/// `σ = (max − min) / (2·max(1, terms − 1))`. A single term sits at the
/// midpoint.
pub fn init_from_data(data: &Dataset, terms_per_input: &[usize]) -> Result<AnfisModel> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if terms_per_input.len() != data.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: data.input_dim(),
            got: terms_per_input.len(),
        });
    }
    if let Some(j) = terms_per_input.iter().position(|&c| c == 0) {
        return Err(Error::InvalidConfig(format!("input {j} needs at least one term")));
    }
    let mut variables = Vec::with_capacity(terms_per_input.len());
    for (j, &count) in terms_per_input.iter().enumerate() {
        let (lo, hi) = data
            .inputs()
            .iter()
            .map(|row| row[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let range = hi - lo;
        if range <= 0.0 || !range.is_finite() {
            return Err(Error::ConstantColumn { column: j });
        }
        let sigma = range / (2.0 * (count.saturating_sub(1)).max(1) as f64);
        let terms = if count == 1 {
            vec![MembershipFunction::gaussian(lo + range / 2.0, sigma)?]
        } else {
            let step = range / (count - 1) as f64;
            (0..count)
                .map(|k| MembershipFunction::gaussian(lo + step * k as f64, sigma))
                .collect::<Result<_>>()?
        };
        variables.push(FuzzyVariable::new(format!("x{}", j + 1), [lo, hi], terms)?);
    }
    build_grid_model(variables, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, terms: usize) -> FuzzyVariable {
        let ts = (0..terms)
            .map(|k| MembershipFunction::gaussian(k as f64, 0.7).unwrap())
            .collect();
        FuzzyVariable::new(name, [0.0, terms as f64], ts).unwrap()
    }

    #[test]
    fn grid_sizes() {
        let m = build_grid_model(vec![var("x1", 3), var("x2", 2)], None).unwrap();
        assert_eq!(m.rule_count(), 6);
        assert!(m.rules().iter().all(|r| r.consequent.0 == vec![0.0; 3]));
        let m = build_grid_model(vec![var("x", 1)], None).unwrap();
        assert_eq!(m.rule_count(), 1);
    }

    #[test]
    fn four_rule_subset_of_three_by_two_grid() {
        let subset = vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 1]];
        let m = build_grid_model(vec![var("x1", 3), var("x2", 2)], Some(&subset)).unwrap();
        assert_eq!(m.rule_count(), 4);
        assert_eq!(m.rules()[3].antecedent, vec![2, 1]);
    }

    #[test]
    fn subset_with_bad_term_index_fails() {
        let subset = vec![vec![0, 2]];
        assert!(build_grid_model(vec![var("x1", 3), var("x2", 2)], Some(&subset)).is_err());
        let short = vec![vec![0]];
        assert!(build_grid_model(vec![var("x1", 3), var("x2", 2)], Some(&short)).is_err());
    }

    #[test]
    fn single_rule_dominates() {
        let mut m = build_grid_model(vec![var("x", 1)], None).unwrap();
        m.rules[0].consequent = ConsequentCoeffs(vec![1.5, -2.0]);
        for x in [-3.0, 0.0, 0.4, 10.0] {
            let t = m.forward(&[x]).unwrap();
            if !t.degenerate {
                assert_eq!(t.normalized, vec![1.0]);
            }
            assert!((t.output - (1.5 - 2.0 * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_rules_give_consequent() {
        let v = var("x", 1);
        let f = ConsequentCoeffs(vec![0.3, 0.9]);
        let rules = vec![
            Rule {
                antecedent: vec![0],
                consequent: f.clone(),
            },
            Rule {
                antecedent: vec![0],
                consequent: f.clone(),
            },
        ];
        let m = AnfisModel::new(vec![v], rules).unwrap();
        for x in [-1.0, 0.25, 2.0] {
            let y = m.try_predict(&[x]).unwrap();
            assert!((y - f.eval(&[x])).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_firing_falls_back_to_uniform() {
        let v = FuzzyVariable::new("x", [0.0, 1.0], vec![MembershipFunction::gaussian(0.0, 0.01).unwrap()]).unwrap();
        let rules = vec![
            Rule {
                antecedent: vec![0],
                consequent: ConsequentCoeffs(vec![1.0, 0.0]),
            },
            Rule {
                antecedent: vec![0],
                consequent: ConsequentCoeffs(vec![3.0, 0.0]),
            },
        ];
        let m = AnfisModel::new(vec![v], rules).unwrap();
        let t = m.forward(&[5.0]).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.normalized, vec![0.5, 0.5]);
        assert_eq!(t.output, 2.0);
    }

    #[test]
    fn dimension_mismatch() {
        let m = build_grid_model(vec![var("x1", 2), var("x2", 2)], None).unwrap();
        assert!(matches!(
            m.forward(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn init_centres_and_widths() {
        let data = Dataset::new(vec![vec![0.0, 1.0], vec![4.0, 3.0], vec![2.0, 2.0]], vec![0.0; 3]).unwrap();
        let m = init_from_data(&data, &[3, 1]).unwrap();
        let centres: Vec<f64> = m.variables()[0].terms.iter().map(|t| t.params()[0]).collect();
        assert_eq!(centres, vec![0.0, 2.0, 4.0]);
        assert!(m.variables()[0].terms.iter().all(|t| t.params()[1] == 1.0));
        assert_eq!(m.variables()[1].terms[0].params(), vec![2.0, 1.0]);
        assert_eq!(m.rule_count(), 3);
        assert_eq!(m.variables()[0].range, [0.0, 4.0]);
    }

    #[test]
    fn init_rejects_constant_column() {
        let data = Dataset::new(vec![vec![0.0, 1.0], vec![4.0, 1.0]], vec![0.0; 2]).unwrap();
        let err = init_from_data(&data, &[2, 2]).unwrap_err();
        assert!(matches!(err, Error::ConstantColumn { column: 1 }));
        assert!(err.to_string().contains("column 1"));
    }

    #[test]
    fn init_rejects_zero_terms() {
        let data = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0.0; 2]).unwrap();
        assert!(init_from_data(&data, &[0]).is_err());
    }

    #[test]
    fn json_layout() {
        let m = build_grid_model(vec![var("x1", 2)], None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(v["variables"][0]["name"], "x1");
        assert_eq!(v["variables"][0]["terms"][1]["kind"], "gaussian");
        assert_eq!(v["rules"][1]["antecedent"], serde_json::json!([1]));
        assert_eq!(v["rules"][1]["consequent"], serde_json::json!([0.0, 0.0]));
        let bad = r#"{"variables":[{"name":"x","range":[0,1],"terms":[{"kind":"gaussian","params":[0,1]}]}],
                     "rules":[{"antecedent":[3],"consequent":[0,0]}]}"#;
        assert!(AnfisModel::from_json(bad).is_err());
    }
}
