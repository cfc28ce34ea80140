use super::polys::w_table;
use crate::polarized::{BlockOperator, ExtendedPoint};
use crate::C64;

/// `I^k_ε(γ, μ) = Tr_res((μ − εγP₊)^{k+1} − (−εγ)^k(μ − εγP₊))`.
///
/// With `β = −εγ` the bracket expands as `Σ_{n≤k} βⁿ Tr W^{k+1}_n − β^k Tr μ`;
/// the `β^{k+1}P₊` terms cancel and are never formed.
pub fn casimir(k: usize, p: &ExtendedPoint, epsilon: f64) -> C64 {
    let beta = -p.gamma * epsilon;
    let table = w_table(k + 1, &p.mu);
    let row = &table[k + 1];
    let mut acc = C64::default();
    let mut pow = C64::new(1.0, 0.0);
    for w in row.iter().take(k + 1) {
        acc += pow * w.restricted_trace();
        pow *= beta;
    }
    let beta_k = beta.powu(k as u32);
    acc - beta_k * p.mu.restricted_trace()
}

/// The same value from dense powers of `μ − εγP₊`, free term included.
pub fn casimir_dense(k: usize, p: &ExtendedPoint, epsilon: f64) -> C64 {
    let beta = -p.gamma * epsilon;
    let x = p.mu.add_p_plus(beta);
    let mut power = x.clone();
    for _ in 0..k {
        power = &power * &x;
    }
    power.restricted_trace() - beta.powu(k as u32) * x.restricted_trace()
}

/// `D₂I^k_ε = (k+1)(μ − εγP₊)^k − (−εγ)^k`.
pub fn casimir_gradient(k: usize, p: &ExtendedPoint, epsilon: f64) -> BlockOperator {
    let beta = -p.gamma * epsilon;
    let x = p.mu.add_p_plus(beta);
    let mut power = BlockOperator::identity(p.dims());
    for _ in 0..k {
        power = &power * &x;
    }
    power.scale_re((k + 1) as f64).add_identity(-beta.powu(k as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_poisson::{group_coad, pencil_parts};
    use crate::polarized::Dims;
    use crate::random::Sampler;

    #[test]
    fn vanishes_at_zero_mu() {
        let mut s = Sampler::seeded(21);
        let d = Dims::new(2, 3).unwrap();
        for k in 1..7 {
            let p = ExtendedPoint::new(s.complex(2.0), BlockOperator::zeros(d));
            assert_eq!(casimir(k, &p, 1.0), C64::default());
        }
    }

    #[test]
    fn epsilon_zero_is_power_trace() {
        let mut s = Sampler::seeded(22);
        let p = s.point(Dims::new(2, 3).unwrap(), 1.0, 1.0);
        let mut power = p.mu.clone();
        for _ in 0..3 {
            power = &power * &p.mu;
        }
        assert!((casimir(3, &p, 0.0) - power.restricted_trace()).norm() < 1e-13);
    }

    #[test]
    fn matches_dense_expansion() {
        let mut s = Sampler::seeded(23);
        let p = s.point(Dims::new(3, 2).unwrap(), 1.0, 1.0);
        for k in 1..7 {
            for eps in [0.0, 0.5, 1.0] {
                let a = casimir(k, &p, eps);
                let b = casimir_dense(k, &p, eps);
                assert!((a - b).norm() <= 1e-11 * (1.0 + b.norm()), "k={k} eps={eps}");
            }
        }
    }

    #[test]
    fn invariant_under_group_coadjoint_action() {
        let mut s = Sampler::seeded(24);
        let d = Dims::new(2, 3).unwrap();
        let p = s.point(d, 1.0, 0.5);
        let a = s.near_identity(d, 0.3);
        let q = group_coad(&a, &p).unwrap();
        for k in 1..=5 {
            assert!((casimir(k, &q, 1.0) - casimir(k, &p, 1.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn casimir_of_matching_pencil_member() {
        let mut s = Sampler::seeded(25);
        let d = Dims::new(2, 2).unwrap();
        let p = s.point(d, 1.0, 1.0);
        let x = s.block_operator(d, 1.0);
        for eps in [0.0, 0.5, 1.0] {
            let g = casimir_gradient(3, &p, eps);
            let (first, second) = pencil_parts(&g, &x, &p).unwrap();
            assert!((first + second * eps).norm() < 1e-11);
        }
    }
}
