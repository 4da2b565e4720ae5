//! The regressor: conv(2x2, valid, stride 1) -> ReLU -> flatten -> dense ->
//! ReLU -> dense, with parameters stored in one flat buffer.
//!
//! Buffer layout, in order: conv kernels (`filters x 4`, entry `2*di + dj`),
//! conv biases, dense weights (`flatten_len x hidden`), dense biases, output
//! weights (`hidden`), output bias. Inputs are batches of row-major `3 x w`
//! matrices, one per row. The conv output is flattened with height outermost,
//! then width, then channel.

use ndarray::linalg::{general_mat_mul, general_mat_vec_mul};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::features::HEIGHT;
use crate::NetError;

const KERNEL: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub width: usize,
    pub filters: usize,
    pub hidden: usize,
}

#[derive(Clone, Copy)]
struct Layout {
    conv_k: usize,
    conv_b: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    total: usize,
}

impl Architecture {
    pub fn new(width: usize, filters: usize, hidden: usize) -> Result<Architecture, NetError> {
        if width < 2 || filters == 0 || hidden == 0 {
            return Err(NetError::Shape(format!(
                "width {width}, filters {filters}, hidden {hidden}"
            )));
        }
        Ok(Architecture { width, filters, hidden })
    }

    /// 256 filters and 256 hidden units.
    pub fn standard(width: usize) -> Result<Architecture, NetError> {
        Architecture::new(width, 256, 256)
    }

    pub fn input_len(&self) -> usize {
        HEIGHT * self.width
    }

    pub fn positions(&self) -> usize {
        (HEIGHT - 1) * (self.width - 1)
    }

    pub fn flatten_len(&self) -> usize {
        self.positions() * self.filters
    }

    fn layout(&self) -> Layout {
        let conv_k = 0;
        let conv_b = conv_k + self.filters * KERNEL;
        let w1 = conv_b + self.filters;
        let b1 = w1 + self.flatten_len() * self.hidden;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.hidden;
        Layout { conv_k, conv_b, w1, b1, w2, b2, total: b2 + 1 }
    }

    pub fn param_count(&self) -> usize {
        self.layout().total
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    pub arch: Architecture,
    values: Vec<f64>,
}

struct Cache {
    patches: Array2<f64>,
    conv_pre: Array2<f64>,
    h0: Array2<f64>,
    a1: Array2<f64>,
    h1: Array2<f64>,
    out: Array1<f64>,
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// ReLU derivative, taken to be 0 at 0.
fn relu_mask(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

impl NetworkParams {
    pub fn zeros(arch: Architecture) -> NetworkParams {
        NetworkParams { arch, values: vec![0.0; arch.param_count()] }
    }

    /// Glorot-uniform weights, drawn conv then dense then output; zero biases.
    /// Fans follow the usual convention for a conv kernel: receptive field
    /// times input channels in, times filters out.
    pub fn glorot<R: Rng>(arch: Architecture, rng: &mut R) -> NetworkParams {
        let mut p = NetworkParams::zeros(arch);
        let l = arch.layout();
        let flat = arch.flatten_len();
        let blocks = [
            (l.conv_k, l.conv_b, KERNEL, KERNEL * arch.filters),
            (l.w1, l.b1, flat, arch.hidden),
            (l.w2, l.b2, arch.hidden, 1),
        ];
        for (start, end, fan_in, fan_out) in blocks {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new(-limit, limit);
            for x in &mut p.values[start..end] {
                *x = dist.sample(rng);
            }
        }
        p
    }

    pub fn from_values(arch: Architecture, values: Vec<f64>) -> Result<NetworkParams, NetError> {
        if values.len() != arch.param_count() {
            return Err(NetError::Shape(format!(
                "{} parameters for an architecture needing {}",
                values.len(),
                arch.param_count()
            )));
        }
        Ok(NetworkParams { arch, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn conv_kernels(&self) -> ArrayView2<'_, f64> {
        let l = self.arch.layout();
        ArrayView2::from_shape((self.arch.filters, KERNEL), &self.values[l.conv_k..l.conv_b]).unwrap()
    }

    pub fn conv_biases(&self) -> ArrayView1<'_, f64> {
        let l = self.arch.layout();
        ArrayView1::from(&self.values[l.conv_b..l.w1])
    }

    pub fn dense_weights(&self) -> ArrayView2<'_, f64> {
        let l = self.arch.layout();
        ArrayView2::from_shape((self.arch.flatten_len(), self.arch.hidden), &self.values[l.w1..l.b1]).unwrap()
    }

    pub fn dense_biases(&self) -> ArrayView1<'_, f64> {
        let l = self.arch.layout();
        ArrayView1::from(&self.values[l.b1..l.w2])
    }

    pub fn output_weights(&self) -> ArrayView1<'_, f64> {
        let l = self.arch.layout();
        ArrayView1::from(&self.values[l.w2..l.b2])
    }

    pub fn output_bias(&self) -> f64 {
        self.values[self.arch.layout().b2]
    }

    fn check_input(&self, x: &ArrayView2<f64>) -> Result<(), NetError> {
        if x.nrows() == 0 {
            return Err(NetError::Empty);
        }
        if x.ncols() != self.arch.input_len() {
            return Err(NetError::Shape(format!(
                "input rows of length {}, expected {}",
                x.ncols(),
                self.arch.input_len()
            )));
        }
        Ok(())
    }

    /// One row per (sample, position), the four kernel inputs in kernel order.
    fn patches(&self, x: &ArrayView2<f64>) -> Array2<f64> {
        let w = self.arch.width;
        let pos = self.arch.positions();
        let mut out = Array2::zeros((x.nrows() * pos, KERNEL));
        for (b, sample) in x.outer_iter().enumerate() {
            for i in 0..HEIGHT - 1 {
                for j in 0..w - 1 {
                    let mut row = out.row_mut(b * pos + i * (w - 1) + j);
                    row[0] = sample[i * w + j];
                    row[1] = sample[i * w + j + 1];
                    row[2] = sample[(i + 1) * w + j];
                    row[3] = sample[(i + 1) * w + j + 1];
                }
            }
        }
        out
    }

    fn forward_cache(&self, x: &ArrayView2<f64>) -> Cache {
        let batch = x.nrows();
        let patches = self.patches(x);
        let mut conv_pre = Array2::zeros((patches.nrows(), self.arch.filters));
        general_mat_mul(1.0, &patches, &self.conv_kernels().t(), 0.0, &mut conv_pre);
        conv_pre += &self.conv_biases();
        let h0 = conv_pre
            .mapv(relu)
            .into_shape_with_order((batch, self.arch.flatten_len()))
            .expect("row-major conv output");
        let a1 = h0.dot(&self.dense_weights()) + &self.dense_biases();
        let h1 = a1.mapv(relu);
        let out = h1.dot(&self.output_weights()) + self.output_bias();
        Cache { patches, conv_pre, h0, a1, h1, out }
    }

    /// Outputs for a batch of flattened `3 x w` inputs.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array1<f64>, NetError> {
        self.check_input(&x)?;
        Ok(self.forward_cache(&x).out)
    }

    /// Output for one `3 x w` matrix.
    pub fn forward(&self, sample: &Array2<f64>) -> Result<f64, NetError> {
        if sample.dim() != (HEIGHT, self.arch.width) {
            return Err(NetError::Shape(format!(
                "sample of shape {:?}, expected ({HEIGHT}, {})",
                sample.dim(),
                self.arch.width
            )));
        }
        let row = sample.to_shape((1, self.arch.input_len())).unwrap();
        Ok(self.forward_cache(&row.view()).out[0])
    }

    /// Batch-mean squared error and its exact gradient in buffer order.
    pub fn loss_and_grad(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<(f64, Vec<f64>), NetError> {
        let mut grad = vec![0.0; self.arch.param_count()];
        let loss = self.loss_and_grad_into(x, y, &mut grad)?;
        Ok((loss, grad))
    }

    /// As [`NetworkParams::loss_and_grad`], overwriting `grad`.
    pub fn loss_and_grad_into(&self, x: ArrayView2<f64>, y: ArrayView1<f64>, grad: &mut [f64]) -> Result<f64, NetError> {
        self.check_input(&x)?;
        if y.len() != x.nrows() {
            return Err(NetError::Shape(format!("{} targets for {} inputs", y.len(), x.nrows())));
        }
        let arch = self.arch;
        if grad.len() != arch.param_count() {
            return Err(NetError::Shape(format!("gradient buffer of length {}", grad.len())));
        }
        let batch = x.nrows();
        let l = arch.layout();
        let c = self.forward_cache(&x);
        let resid = &c.out - &y;
        let loss = resid.dot(&resid) / batch as f64;

        let (g_conv, rest) = grad.split_at_mut(l.w1);
        let (g_k, g_cb) = g_conv.split_at_mut(l.conv_b);
        let (g_dense, g_out) = rest.split_at_mut(l.w2 - l.w1);
        let (g_w1, g_b1) = g_dense.split_at_mut(l.b1 - l.w1);
        let (g_w2, g_b2) = g_out.split_at_mut(arch.hidden);

        let d_out = resid * (2.0 / batch as f64);
        general_mat_vec_mul(1.0, &c.h1.t(), &d_out, 0.0, &mut ArrayViewMut1::from(g_w2));
        g_b2[0] = d_out.sum();

        let mut d_a1 = &d_out.view().insert_axis(Axis(1)) * &self.output_weights().insert_axis(Axis(0));
        d_a1.zip_mut_with(&c.a1, |d, &a| *d *= relu_mask(a));
        let mut g_w1 = ArrayViewMut2::from_shape((arch.flatten_len(), arch.hidden), g_w1).expect("layout");
        general_mat_mul(1.0, &c.h0.t(), &d_a1, 0.0, &mut g_w1);
        ArrayViewMut1::from(g_b1).assign(&d_a1.sum_axis(Axis(0)));

        let mut d_h0 = Array2::zeros((batch, arch.flatten_len()));
        general_mat_mul(1.0, &d_a1, &self.dense_weights().t(), 0.0, &mut d_h0);
        let mut d_conv = d_h0
            .into_shape_with_order((batch * arch.positions(), arch.filters))
            .expect("row-major");
        d_conv.zip_mut_with(&c.conv_pre, |d, &z| *d *= relu_mask(z));
        let mut g_k = ArrayViewMut2::from_shape((arch.filters, KERNEL), g_k).expect("layout");
        general_mat_mul(1.0, &d_conv.t(), &c.patches, 0.0, &mut g_k);
        ArrayViewMut1::from(g_cb).assign(&d_conv.sum_axis(Axis(0)));
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, Array};
    use rand::Rng;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tiny() -> NetworkParams {
        // w = 2, one filter, two hidden units.
        let arch = Architecture::new(2, 1, 2).unwrap();
        #[rustfmt::skip]
        let values = vec![
            1.0, 0.0, 0.0, 1.0, // kernel
            0.5,                // conv bias
            1.0, -1.0,          // dense weights, input 0
            0.5, 0.5,           // dense weights, input 1
            0.0, 0.0,           // dense biases
            2.0, 3.0,           // output weights
            -1.0,               // output bias
        ];
        NetworkParams::from_values(arch, values).unwrap()
    }

    #[test]
    fn shapes() {
        assert_eq!(Architecture::standard(5).unwrap().flatten_len(), 2048);
        assert_eq!(Architecture::standard(4).unwrap().flatten_len(), 1536);
        let a = Architecture::standard(5).unwrap();
        assert_eq!(a.param_count(), 4 * 256 + 256 + 2048 * 256 + 256 + 256 + 1);
        assert!(Architecture::new(1, 1, 1).is_err());
    }

    #[test]
    fn hand_computed_tiny_instance() {
        // Conv at the two positions: 1+4+0.5 = 5.5 and 3+6+0.5 = 9.5.
        // Dense: 5.5 + 4.75 = 10.25 and -5.5 + 4.75 = -0.75 -> ReLU 0.
        // Output: 2 * 10.25 - 1 = 19.5.
        let net = tiny();
        let x = arr2(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]);
        assert_eq!(net.forward(&x).unwrap(), 19.5);
        let (loss, grad) = net
            .loss_and_grad(x.to_shape((1, 6)).unwrap().view(), arr1(&[19.5]).view())
            .unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));

        // Residual 1: d_out = 2. Output weights get 2*h1, output bias 2.
        let (loss, grad) = net
            .loss_and_grad(x.to_shape((1, 6)).unwrap().view(), arr1(&[18.5]).view())
            .unwrap();
        assert_eq!(loss, 1.0);
        assert_eq!(&grad[11..], &[20.5, 0.0, 2.0]);
        // Only the live hidden unit passes gradient: d_a1 = (4, 0).
        assert_eq!(&grad[9..11], &[4.0, 0.0]);
        assert_eq!(&grad[5..9], &[22.0, 0.0, 38.0, 0.0]);
        // d_h0 = (4, 2); kernel gradient = 4*(1,2,3,4) + 2*(3,4,5,6).
        assert_eq!(&grad[0..5], &[10.0, 16.0, 22.0, 28.0, 6.0]);
    }

    #[test]
    fn zero_weights_give_output_bias() {
        let arch = Architecture::new(5, 3, 4).unwrap();
        let mut net = NetworkParams::zeros(arch);
        let b2 = arch.layout().b2;
        net.values_mut()[b2] = 0.75;
        let x = Array::from_shape_fn((4, 15), |(i, j)| (i * 15 + j) as f64 - 20.0);
        assert!(net.forward_batch(x.view()).unwrap().iter().all(|&o| o == 0.75));
    }

    #[test]
    fn dead_hidden_layer_gives_output_bias() {
        let arch = Architecture::new(3, 2, 3).unwrap();
        let mut net = NetworkParams::glorot(arch, &mut ChaCha8Rng::seed_from_u64(1));
        let l = arch.layout();
        for v in &mut net.values_mut()[l.w1..l.b1] {
            *v = 0.0;
        }
        for v in &mut net.values_mut()[l.b1..l.w2] {
            *v = -1.0;
        }
        net.values_mut()[l.b2] = -0.3;
        let x = Array::from_shape_fn((2, 9), |(i, j)| (i + j) as f64);
        assert!(net.forward_batch(x.view()).unwrap().iter().all(|&o| o == -0.3));
    }

    #[test]
    fn shape_errors() {
        let net = tiny();
        assert!(matches!(net.forward_batch(Array2::zeros((1, 5)).view()), Err(NetError::Shape(_))));
        assert!(matches!(net.forward_batch(Array2::zeros((0, 6)).view()), Err(NetError::Empty)));
        assert!(net.forward(&Array2::zeros((2, 3))).is_err());
        assert!(net.loss_and_grad(Array2::zeros((2, 6)).view(), arr1(&[0.0]).view()).is_err());
    }

    #[test]
    fn duplicated_batch_same_gradient() {
        let arch = Architecture::new(4, 3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let net = NetworkParams::glorot(arch, &mut rng);
        let x = Array::from_shape_fn((3, 12), |(i, j)| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let y = arr1(&[0.5, -1.0, 2.0]);
        let (l1, g1) = net.loss_and_grad(x.view(), y.view()).unwrap();
        let x2 = ndarray::concatenate(Axis(0), &[x.view(), x.view()]).unwrap();
        let y2 = ndarray::concatenate(Axis(0), &[y.view(), y.view()]).unwrap();
        let (l2, g2) = net.loss_and_grad(x2.view(), y2.view()).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    /// `|analytic - numeric| / max(|analytic| + |numeric|, tiny)` over the whole vector.
    fn gradient_check_error(net: &NetworkParams, x: ArrayView2<f64>, y: ArrayView1<f64>) -> f64 {
        let (_, analytic) = net.loss_and_grad(x, y).unwrap();
        let h = 1e-5;
        let mut diff = 0.0;
        let mut norm_a = 0.0;
        let mut norm_n = 0.0;
        for i in 0..analytic.len() {
            let mut plus = net.clone();
            plus.values_mut()[i] += h;
            let mut minus = net.clone();
            minus.values_mut()[i] -= h;
            let numeric = (plus.loss_and_grad(x, y).unwrap().0 - minus.loss_and_grad(x, y).unwrap().0) / (2.0 * h);
            diff += (analytic[i] - numeric).powi(2);
            norm_a += analytic[i].powi(2);
            norm_n += numeric.powi(2);
        }
        diff.sqrt() / (norm_a.sqrt() + norm_n.sqrt()).max(1e-300)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn gradients_match_finite_differences(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let arch = Architecture::new(3, 3, 4).unwrap();
            let mut net = NetworkParams::glorot(arch, &mut rng);
            for v in net.values_mut() {
                *v += rng.gen_range(-0.5..0.5);
            }
            let x = Array::from_shape_fn((5, 9), |_| rng.gen_range(-2.0..2.0));
            let y = Array::from_shape_fn(5, |_| rng.gen_range(-1.0..1.0));
            let err = gradient_check_error(&net, x.view(), y.view());
            prop_assert!(err < 1e-4, "relative error {}", err);
        }
    }
}
