use crate::data::Dataset;
use crate::fuzzy::{AnfisModel, DEGENERATE_FIRING};

/// Training MSE and its exact gradient with respect to every antecedent
/// parameter, in [`super::antecedent_params`] order.
///
/// Samples whose total firing underflows contribute to the loss but not to
/// the gradient (the uniform fallback weights do not depend on the
/// memberships).
pub fn loss_and_gradients(model: &AnfisModel, data: &Dataset) -> (f64, Vec<f64>) {
    let vars = model.variables();
    // Offset of each (variable, term) block in the flat parameter vector.
    let mut offsets = Vec::with_capacity(vars.len());
    let mut total = 0;
    for v in vars {
        let mut per_term = Vec::with_capacity(v.terms.len());
        for t in &v.terms {
            per_term.push(total);
            total += t.param_count();
        }
        offsets.push(per_term);
    }

    let k = data.len() as f64;
    let m = model.rule_count();
    let mut grad = vec![0.0; total];
    let mut loss = 0.0;
    let mut mu: Vec<Vec<(f64, [f64; 3])>> = vars.iter().map(|v| vec![(0.0, [0.0; 3]); v.terms.len()]).collect();
    let mut firing = vec![0.0; m];
    let mut outputs = vec![0.0; m];
    let mut dmu: Vec<Vec<f64>> = vars.iter().map(|v| vec![0.0; v.terms.len()]).collect();

    for (x, target) in data.rows() {
        for (j, v) in vars.iter().enumerate() {
            for (t, mf) in v.terms.iter().enumerate() {
                mu[j][t] = mf.eval_with_grad(x[j]);
            }
        }
        for (i, rule) in model.rules().iter().enumerate() {
            firing[i] = rule.antecedent.iter().enumerate().map(|(j, &t)| mu[j][t].0).product();
            outputs[i] = rule.consequent.eval(x);
        }
        let s: f64 = firing.iter().sum();
        if s < DEGENERATE_FIRING {
            let y = outputs.iter().sum::<f64>() / m as f64;
            loss += (y - target) * (y - target);
            continue;
        }
        let y = firing.iter().zip(&outputs).map(|(w, f)| w * f).sum::<f64>() / s;
        let err = y - target;
        loss += err * err;
        let de_dy = 2.0 * err / k;

        dmu.iter_mut().for_each(|r| r.fill(0.0));
        for (i, rule) in model.rules().iter().enumerate() {
            let de_dw = de_dy * (outputs[i] - y) / s;
            if de_dw == 0.0 {
                continue;
            }
            for (j, &t) in rule.antecedent.iter().enumerate() {
                let others: f64 = rule
                    .antecedent
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != j)
                    .map(|(l, &tl)| mu[l][tl].0)
                    .product();
                dmu[j][t] += de_dw * others;
            }
        }
        for (j, v) in vars.iter().enumerate() {
            for (t, mf) in v.terms.iter().enumerate() {
                let d = dmu[j][t];
                if d == 0.0 {
                    continue;
                }
                let base = offsets[j][t];
                for p in 0..mf.param_count() {
                    grad[base + p] += d * mu[j][t].1[p];
                }
            }
        }
    }
    (loss / k, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{build_grid_model, FuzzyVariable, MembershipFunction};

    #[test]
    fn exact_fit_has_zero_gradient() {
        let v = FuzzyVariable::new(
            "x",
            [0.0, 1.0],
            vec![
                MembershipFunction::gaussian(0.0, 0.4).unwrap(),
                MembershipFunction::gaussian(1.0, 0.4).unwrap(),
            ],
        )
        .unwrap();
        let m = build_grid_model(vec![v], None).unwrap();
        let xs: Vec<f64> = (0..15).map(|i| i as f64 / 14.0).collect();
        // A global line is representable exactly by identical consequents.
        let data = Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|x| 0.5 - x).collect(),
        )
        .unwrap();
        let fit = m.with_consequents(&[0.5, -1.0, 0.5, -1.0]).unwrap();
        let (loss, g) = loss_and_gradients(&fit, &data);
        assert!(loss < 1e-20);
        assert!(g.iter().all(|d| d.abs() < 1e-10), "{g:?}");
    }

    #[test]
    fn single_gaussian_rule_is_constant_in_antecedents() {
        // One rule normalises to weight 1, so the output cannot depend on
        // the membership parameters.
        let v = FuzzyVariable::new("x", [0.0, 1.0], vec![MembershipFunction::gaussian(0.2, 0.3).unwrap()]).unwrap();
        let m = build_grid_model(vec![v], None)
            .unwrap()
            .with_consequents(&[1.0, 2.0])
            .unwrap();
        let data = Dataset::new(vec![vec![0.7]], vec![0.0]).unwrap();
        let (loss, g) = loss_and_gradients(&m, &data);
        assert!((loss - 2.4f64.powi(2)).abs() < 1e-12);
        assert_eq!(g, vec![0.0, 0.0]);
    }
}
