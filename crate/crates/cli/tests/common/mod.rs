use mott1d::params::scaling_family;
use mott1d::report::ComparisonRow;

/// Synthetic sweep rows: same-side ratios drifting like `1 + 20/Lambda`,
/// opposite-side ratios like `Lambda^-2`.
pub fn fixture_rows(lambdas: &[f64]) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    for &l in lambdas {
        for sign in [1, -1] {
            let eps = 1.0 / l;
            let p = scaling_family(eps, sign).unwrap();
            let (p_oracle, ratio, p_leading, p_bound) = if sign > 0 {
                let lead = 1e-3 * eps;
                let q = 1.0 + 20.0 / l;
                (q * lead, q, Some(lead), None)
            } else {
                let q = l.powi(-2);
                (q * 1e-3 * eps, q, None, Some(1.0))
            };
            rows.push(ComparisonRow {
                epsilon: eps,
                lambda1: l,
                lambda2: 2.0 * l,
                t_over_tau2: 1.5,
                n1: 1,
                n2: 1,
                a2_sign: sign,
                p_oracle: Some(p_oracle),
                p_leading,
                p_bound,
                ratio: Some(ratio),
                converged: true,
                at_noise_floor: false,
                time_nodes: 64,
                error: None,
                params: *p.constants(),
            });
        }
    }
    rows
}
