//! The policy network: maps per-step observations to one categorical
//! distribution per decision head (PE level, buffer level, and optionally
//! dataflow style).
//!
//! Two cores are available: a single-layer LSTM whose state threads the
//! partial assignment through the episode, and a stateless two-layer tanh
//! MLP for ablation. Both are implemented directly — forward passes cache
//! what the hand-written backward pass needs, and gradients are exact
//! (they are checked against finite differences in the tests). Keeping
//! the math in one visible place is the point: the learner has no
//! dependencies to configure and nothing hidden behind an autograd.

use ndarray::{s, Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};

/// Which network core computes the per-step features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyVariant {
    /// Recurrent core: an LSTM carries episode state between steps.
    Rnn,
    /// Stateless core: two tanh layers see only the current observation.
    Mlp,
}

impl PolicyVariant {
    pub fn name(self) -> &'static str {
        match self {
            PolicyVariant::Rnn => "rnn",
            PolicyVariant::Mlp => "mlp",
        }
    }

    pub fn parse(s: &str) -> Option<PolicyVariant> {
        match s {
            "rnn" => Some(PolicyVariant::Rnn),
            "mlp" => Some(PolicyVariant::Mlp),
            _ => None,
        }
    }
}

/// LSTM gate layout inside stacked `(4H, _)` matrices: input, forget,
/// cell, output.
enum Core {
    Rnn {
        w_x: Array2<f64>,
        w_h: Array2<f64>,
        b: Array1<f64>,
    },
    Mlp {
        w1: Array2<f64>,
        b1: Array1<f64>,
        w2: Array2<f64>,
        b2: Array1<f64>,
    },
}

struct Head {
    u: Array2<f64>,
    c: Array1<f64>,
}

pub struct PolicyNet {
    core: Core,
    heads: Vec<Head>,
    in_dim: usize,
    hidden: usize,
}

/// Per-step forward cache; holds exactly what backprop reads back.
enum StepCache {
    Rnn {
        x: Array1<f64>,
        h_prev: Array1<f64>,
        c_prev: Array1<f64>,
        i: Array1<f64>,
        f: Array1<f64>,
        g: Array1<f64>,
        o: Array1<f64>,
        tc: Array1<f64>,
        h: Array1<f64>,
        probs: Vec<Array1<f64>>,
    },
    Mlp {
        x: Array1<f64>,
        a1: Array1<f64>,
        a2: Array1<f64>,
        probs: Vec<Array1<f64>>,
    },
}

/// Accumulated state of one episode's forward passes.
pub struct EpisodeState {
    h: Array1<f64>,
    c: Array1<f64>,
    steps: Vec<StepCache>,
}

impl EpisodeState {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps = logits.mapv(|v| (v - max).exp());
    let sum = exps.sum();
    exps / sum
}

/// `acc += col * row^T` without allocating the outer product.
fn outer_add(acc: &mut Array2<f64>, col: &Array1<f64>, row: &Array1<f64>) {
    for (i, &ci) in col.iter().enumerate() {
        if ci != 0.0 {
            acc.row_mut(i).scaled_add(ci, row);
        }
    }
}

fn uniform_init(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
    let bound = 1.0 / (cols as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..bound))
}

impl PolicyNet {
    /// Builds a fresh network. Weights start uniform in
    /// `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases at zero; the
    /// distributions start near-uniform as a result.
    pub fn new(
        variant: PolicyVariant,
        in_dim: usize,
        hidden: usize,
        head_dims: &[usize],
        rng: &mut impl Rng,
    ) -> PolicyNet {
        assert!(in_dim >= 1 && hidden >= 1 && !head_dims.is_empty());
        let core = match variant {
            PolicyVariant::Rnn => Core::Rnn {
                w_x: uniform_init(4 * hidden, in_dim, rng),
                w_h: uniform_init(4 * hidden, hidden, rng),
                b: Array1::zeros(4 * hidden),
            },
            PolicyVariant::Mlp => Core::Mlp {
                w1: uniform_init(hidden, in_dim, rng),
                b1: Array1::zeros(hidden),
                w2: uniform_init(hidden, hidden, rng),
                b2: Array1::zeros(hidden),
            },
        };
        let heads = head_dims
            .iter()
            .map(|&k| Head {
                u: uniform_init(k, hidden, rng),
                c: Array1::zeros(k),
            })
            .collect();
        PolicyNet {
            core,
            heads,
            in_dim,
            hidden,
        }
    }

    pub fn variant(&self) -> PolicyVariant {
        match self.core {
            Core::Rnn { .. } => PolicyVariant::Rnn,
            Core::Mlp { .. } => PolicyVariant::Mlp,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn head_dims(&self) -> Vec<usize> {
        self.heads.iter().map(|h| h.c.len()).collect()
    }

    pub fn begin_episode(&self) -> EpisodeState {
        EpisodeState {
            h: Array1::zeros(self.hidden),
            c: Array1::zeros(self.hidden),
            steps: Vec::new(),
        }
    }

    /// Runs one step of the episode and returns each head's distribution.
    /// The observation must have length [`PolicyNet::in_dim`].
    pub fn step(&self, state: &mut EpisodeState, obs: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(obs.len(), self.in_dim, "observation length mismatch");
        let x = Array1::from_vec(obs.to_vec());
        let (features, cache) = match &self.core {
            Core::Rnn { w_x, w_h, b } => {
                let hd = self.hidden;
                let z = w_x.dot(&x) + w_h.dot(&state.h) + b;
                let i = z.slice(s![0..hd]).mapv(sigmoid);
                let f = z.slice(s![hd..2 * hd]).mapv(sigmoid);
                let g = z.slice(s![2 * hd..3 * hd]).mapv(f64::tanh);
                let o = z.slice(s![3 * hd..4 * hd]).mapv(sigmoid);
                let c = &f * &state.c + &i * &g;
                let tc = c.mapv(f64::tanh);
                let h = &o * &tc;
                let cache = StepCache::Rnn {
                    x,
                    h_prev: state.h.clone(),
                    c_prev: state.c.clone(),
                    i,
                    f,
                    g,
                    o,
                    tc,
                    h: h.clone(),
                    probs: Vec::new(),
                };
                state.h = h.clone();
                state.c = c;
                (h, cache)
            }
            Core::Mlp { w1, b1, w2, b2 } => {
                let a1 = (w1.dot(&x) + b1).mapv(f64::tanh);
                let a2 = (w2.dot(&a1) + b2).mapv(f64::tanh);
                let cache = StepCache::Mlp {
                    x,
                    a1,
                    a2: a2.clone(),
                    probs: Vec::new(),
                };
                (a2, cache)
            }
        };
        let probs: Vec<Array1<f64>> = self
            .heads
            .iter()
            .map(|head| softmax(&(head.u.dot(&features) + &head.c)))
            .collect();
        let out = probs.iter().map(|p| p.to_vec()).collect();
        let mut cache = cache;
        match &mut cache {
            StepCache::Rnn { probs: pr, .. } | StepCache::Mlp { probs: pr, .. } => *pr = probs,
        }
        state.steps.push(cache);
        out
    }

    /// Total number of scalar parameters.
    pub fn num_params(&self) -> usize {
        self.flatten().len()
    }

    /// All parameters as one vector, in a fixed order (core arrays in
    /// declaration order, then each head's matrix and bias).
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::new();
        match &self.core {
            Core::Rnn { w_x, w_h, b } => {
                v.extend(w_x.iter());
                v.extend(w_h.iter());
                v.extend(b.iter());
            }
            Core::Mlp { w1, b1, w2, b2 } => {
                v.extend(w1.iter());
                v.extend(b1.iter());
                v.extend(w2.iter());
                v.extend(b2.iter());
            }
        }
        for head in &self.heads {
            v.extend(head.u.iter());
            v.extend(head.c.iter());
        }
        v
    }

    /// Writes parameters back from [`PolicyNet::flatten`]'s layout.
    pub fn load_flat(&mut self, flat: &[f64]) {
        let mut it = flat.iter();
        let fill1 = |a: &mut Array1<f64>, it: &mut std::slice::Iter<f64>| {
            for v in a.iter_mut() {
                *v = *it.next().expect("flat vector too short");
            }
        };
        fn fill2(a: &mut Array2<f64>, it: &mut std::slice::Iter<f64>) {
            for v in a.iter_mut() {
                *v = *it.next().expect("flat vector too short");
            }
        }
        match &mut self.core {
            Core::Rnn { w_x, w_h, b } => {
                fill2(w_x, &mut it);
                fill2(w_h, &mut it);
                fill1(b, &mut it);
            }
            Core::Mlp { w1, b1, w2, b2 } => {
                fill2(w1, &mut it);
                fill1(b1, &mut it);
                fill2(w2, &mut it);
                fill1(b2, &mut it);
            }
        }
        for head in &mut self.heads {
            fill2(&mut head.u, &mut it);
            fill1(&mut head.c, &mut it);
        }
        assert!(it.next().is_none(), "flat vector too long");
    }

    fn zeros_like(&self) -> PolicyNet {
        let core = match &self.core {
            Core::Rnn { w_x, w_h, b } => Core::Rnn {
                w_x: Array2::zeros(w_x.dim()),
                w_h: Array2::zeros(w_h.dim()),
                b: Array1::zeros(b.len()),
            },
            Core::Mlp { w1, b1, w2, b2 } => Core::Mlp {
                w1: Array2::zeros(w1.dim()),
                b1: Array1::zeros(b1.len()),
                w2: Array2::zeros(w2.dim()),
                b2: Array1::zeros(b2.len()),
            },
        };
        let heads = self
            .heads
            .iter()
            .map(|h| Head {
                u: Array2::zeros(h.u.dim()),
                c: Array1::zeros(h.c.len()),
            })
            .collect();
        PolicyNet {
            core,
            heads,
            in_dim: self.in_dim,
            hidden: self.hidden,
        }
    }

    /// Scalar training loss for a recorded episode:
    /// `sum_t coeff_t * sum_heads -ln pi(action_t)`. Pure forward pass;
    /// used by the finite-difference checks.
    pub fn loss(&self, observations: &[Vec<f64>], actions: &[Vec<usize>], coeffs: &[f64]) -> f64 {
        assert_eq!(observations.len(), actions.len());
        assert_eq!(observations.len(), coeffs.len());
        let mut state = self.begin_episode();
        let mut total = 0.0;
        for ((obs, acts), &coeff) in observations.iter().zip(actions).zip(coeffs) {
            let probs = self.step(&mut state, obs);
            for (head_probs, &a) in probs.iter().zip(acts) {
                total += coeff * -head_probs[a].ln();
            }
        }
        total
    }

    /// Exact gradient of [`PolicyNet::loss`] with respect to every
    /// parameter, computed by backpropagation (through time, for the
    /// recurrent core) over the cached episode. Returned in
    /// [`PolicyNet::flatten`] order.
    pub fn backward(
        &self,
        state: &EpisodeState,
        actions: &[Vec<usize>],
        coeffs: &[f64],
    ) -> Vec<f64> {
        assert_eq!(state.steps.len(), actions.len());
        assert_eq!(state.steps.len(), coeffs.len());
        let mut grads = self.zeros_like();
        let hd = self.hidden;

        // d(loss)/d(logit_j) for one head at one step.
        let head_delta = |probs: &Array1<f64>, action: usize, coeff: f64| {
            let mut d = probs * coeff;
            d[action] -= coeff;
            d
        };

        match (&self.core, &mut grads.core) {
            (
                Core::Rnn { w_h, .. },
                Core::Rnn {
                    w_x: gw_x,
                    w_h: gw_h,
                    b: gb,
                },
            ) => {
                let mut dh_next = Array1::<f64>::zeros(hd);
                let mut dc_next = Array1::<f64>::zeros(hd);
                for t in (0..state.steps.len()).rev() {
                    let StepCache::Rnn {
                        x,
                        h_prev,
                        c_prev,
                        i,
                        f,
                        g,
                        o,
                        tc,
                        h,
                        probs,
                    } = &state.steps[t]
                    else {
                        unreachable!("recurrent net with non-recurrent cache");
                    };
                    let mut dh = dh_next.clone();
                    for (hi, head) in self.heads.iter().enumerate() {
                        let dl = head_delta(&probs[hi], actions[t][hi], coeffs[t]);
                        outer_add(&mut grads.heads[hi].u, &dl, h);
                        grads.heads[hi].c += &dl;
                        dh += &head.u.t().dot(&dl);
                    }
                    let do_ = &dh * tc;
                    let dc = &dh * o * &tc.mapv(|v| 1.0 - v * v) + &dc_next;
                    let di = &dc * g;
                    let dg = &dc * i;
                    let df = &dc * c_prev;
                    dc_next = &dc * f;

                    let mut dz = Array1::<f64>::zeros(4 * hd);
                    dz.slice_mut(s![0..hd]).assign(&(&di * i * &i.mapv(|v| 1.0 - v)));
                    dz.slice_mut(s![hd..2 * hd])
                        .assign(&(&df * f * &f.mapv(|v| 1.0 - v)));
                    dz.slice_mut(s![2 * hd..3 * hd])
                        .assign(&(&dg * &g.mapv(|v| 1.0 - v * v)));
                    dz.slice_mut(s![3 * hd..4 * hd])
                        .assign(&(&do_ * o * &o.mapv(|v| 1.0 - v)));

                    outer_add(gw_x, &dz, x);
                    outer_add(gw_h, &dz, h_prev);
                    *gb += &dz;
                    dh_next = w_h.t().dot(&dz);
                }
            }
            (
                Core::Mlp { w2, .. },
                Core::Mlp {
                    w1: gw1,
                    b1: gb1,
                    w2: gw2,
                    b2: gb2,
                },
            ) => {
                for t in 0..state.steps.len() {
                    let StepCache::Mlp { x, a1, a2, probs } = &state.steps[t] else {
                        unreachable!("feed-forward net with recurrent cache");
                    };
                    let mut da2 = Array1::<f64>::zeros(hd);
                    for (hi, head) in self.heads.iter().enumerate() {
                        let dl = head_delta(&probs[hi], actions[t][hi], coeffs[t]);
                        outer_add(&mut grads.heads[hi].u, &dl, a2);
                        grads.heads[hi].c += &dl;
                        da2 += &head.u.t().dot(&dl);
                    }
                    let dz2 = &da2 * &a2.mapv(|v| 1.0 - v * v);
                    outer_add(gw2, &dz2, a1);
                    *gb2 += &dz2;
                    let da1 = w2.t().dot(&dz2);
                    let dz1 = &da1 * &a1.mapv(|v| 1.0 - v * v);
                    outer_add(gw1, &dz1, x);
                    *gb1 += &dz1;
                }
            }
            _ => unreachable!("gradient core shape matches by construction"),
        }
        grads.flatten()
    }

    /// One SGD step with global-norm gradient clipping. Rejects non-finite
    /// gradients or parameters instead of silently corrupting the policy.
    pub fn apply_update(&mut self, grads: &[f64], lr: f64, clip: f64) -> Result<()> {
        let mut theta = self.flatten();
        assert_eq!(theta.len(), grads.len(), "gradient length mismatch");
        let norm_sq: f64 = grads.iter().map(|g| g * g).sum();
        if !norm_sq.is_finite() {
            return Err(Error::NonFiniteUpdate(format!(
                "gradient norm^2 = {}",
                norm_sq
            )));
        }
        let norm = norm_sq.sqrt();
        let scale = if norm > clip { clip / norm } else { 1.0 };
        for (t, g) in theta.iter_mut().zip(grads) {
            *t -= lr * scale * g;
            if !t.is_finite() {
                return Err(Error::NonFiniteUpdate(format!("parameter became {}", t)));
            }
        }
        self.load_flat(&theta);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture(variant: PolicyVariant, seed: u64) -> PolicyNet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PolicyNet::new(variant, 5, 6, &[3, 2], &mut rng)
    }

    fn fixture_episode(rng: &mut ChaCha8Rng, steps: usize) -> (Vec<Vec<f64>>, Vec<Vec<usize>>, Vec<f64>) {
        let obs = (0..steps)
            .map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let actions = (0..steps)
            .map(|_| vec![rng.gen_range(0..3), rng.gen_range(0..2)])
            .collect();
        let coeffs = (0..steps).map(|_| rng.gen_range(-1.5..1.5)).collect();
        (obs, actions, coeffs)
    }

    #[test]
    fn distributions_are_normalized() {
        for variant in [PolicyVariant::Rnn, PolicyVariant::Mlp] {
            let net = fixture(variant, 1);
            let mut state = net.begin_episode();
            for step in 0..3 {
                let probs = net.step(&mut state, &[0.1, -0.5, 1.0, -1.0, 0.3]);
                assert_eq!(probs.len(), 2);
                assert_eq!(probs[0].len(), 3);
                assert_eq!(probs[1].len(), 2);
                for head in &probs {
                    let sum: f64 = head.iter().sum();
                    assert!((sum - 1.0).abs() < 1e-12, "step {}: sum {}", step, sum);
                    assert!(head.iter().all(|&p| p > 0.0));
                }
            }
        }
    }

    #[test]
    fn recurrent_state_changes_the_distribution() {
        let net = fixture(PolicyVariant::Rnn, 2);
        let obs = [0.5, -0.5, 0.25, 0.0, -1.0];
        let mut state = net.begin_episode();
        let first = net.step(&mut state, &obs);
        let second = net.step(&mut state, &obs);
        assert_ne!(first, second, "same input, different state");

        // the MLP by contrast is stateless
        let net = fixture(PolicyVariant::Mlp, 2);
        let mut state = net.begin_episode();
        let first = net.step(&mut state, &obs);
        let second = net.step(&mut state, &obs);
        assert_eq!(first, second);
    }

    #[test]
    fn flatten_round_trips() {
        for variant in [PolicyVariant::Rnn, PolicyVariant::Mlp] {
            let net = fixture(variant, 3);
            let flat = net.flatten();
            assert_eq!(flat.len(), net.num_params());
            let mut other = fixture(variant, 99);
            other.load_flat(&flat);
            assert_eq!(other.flatten(), flat);
        }
    }

    /// Central finite differences over every parameter must agree with the
    /// analytic gradient.
    fn finite_difference_check(variant: PolicyVariant) {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let net = fixture(variant, 4);
        let (obs, actions, coeffs) = fixture_episode(&mut rng, 3);

        let mut state = net.begin_episode();
        for o in &obs {
            net.step(&mut state, o);
        }
        let analytic = net.backward(&state, &actions, &coeffs);

        let h = 1e-5;
        let theta = net.flatten();
        let mut worst = 0.0f64;
        let mut probe = fixture(variant, 4);
        for idx in 0..theta.len() {
            let mut plus = theta.clone();
            plus[idx] += h;
            probe.load_flat(&plus);
            let lp = probe.loss(&obs, &actions, &coeffs);
            let mut minus = theta.clone();
            minus[idx] -= h;
            probe.load_flat(&minus);
            let lm = probe.loss(&obs, &actions, &coeffs);
            let fd = (lp - lm) / (2.0 * h);
            let rel = (analytic[idx] - fd).abs() / analytic[idx].abs().max(fd.abs()).max(1e-5);
            worst = worst.max(rel);
        }
        assert!(
            worst < 1e-4,
            "{}: worst relative gradient error {}",
            variant.name(),
            worst
        );
    }

    #[test]
    fn recurrent_gradients_match_finite_differences() {
        finite_difference_check(PolicyVariant::Rnn);
    }

    #[test]
    fn feed_forward_gradients_match_finite_differences() {
        finite_difference_check(PolicyVariant::Mlp);
    }

    #[test]
    fn update_moves_against_the_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut net = fixture(PolicyVariant::Rnn, 5);
        let (obs, actions, coeffs) = fixture_episode(&mut rng, 2);
        let before = net.loss(&obs, &actions, &coeffs);
        for _ in 0..20 {
            let mut state = net.begin_episode();
            for o in &obs {
                net.step(&mut state, o);
            }
            let grads = net.backward(&state, &actions, &coeffs);
            net.apply_update(&grads, 0.05, 5.0).unwrap();
        }
        let after = net.loss(&obs, &actions, &coeffs);
        assert!(after < before, "{} !< {}", after, before);
    }

    #[test]
    fn clipping_caps_the_step_size() {
        let mut net = fixture(PolicyVariant::Mlp, 6);
        let before = net.flatten();
        let grads = vec![100.0; before.len()];
        net.apply_update(&grads, 1.0, 5.0).unwrap();
        let after = net.flatten();
        let step: f64 = before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!((step - 5.0).abs() < 1e-9, "step norm {}", step);
    }

    #[test]
    fn non_finite_gradients_are_rejected() {
        let mut net = fixture(PolicyVariant::Rnn, 7);
        let mut grads = vec![0.0; net.num_params()];
        grads[3] = f64::NAN;
        assert!(matches!(
            net.apply_update(&grads, 0.01, 5.0),
            Err(Error::NonFiniteUpdate(_))
        ));
    }

    #[test]
    fn init_is_seed_deterministic() {
        let a = fixture(PolicyVariant::Rnn, 8);
        let b = fixture(PolicyVariant::Rnn, 8);
        let c = fixture(PolicyVariant::Rnn, 9);
        assert_eq!(a.flatten(), b.flatten());
        assert_ne!(a.flatten(), c.flatten());
    }
}
