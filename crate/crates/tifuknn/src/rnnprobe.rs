//! A small recurrent network probe on synthetic one-hot sequences whose
//! target is the running element-wise sum. The task has an exact closed-form
//! parameterization (identity recurrence), which makes it a sharp test of
//! whether gradient descent can find a known global optimum: the trainer
//! here demonstrates that it reliably does not.

use std::io::{self, Write};
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

/// A batch of synthetic one-hot input sequences, stored as hot indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    /// One-hot dimension of every vector.
    pub dim: usize,
    /// Length of every sequence.
    pub len: usize,
    pub seed: u64,
    /// Each sequence is `len` hot indices, all `< dim`.
    pub sequences: Vec<Vec<u32>>,
}

/// Generates `count` sequences of `length` one-hot vectors of dimension
/// `dim`: the first `length - 2` vectors pick distinct dimensions, and the
/// last 2 duplicate 2 distinct vectors among those. The element-wise sum of
/// a sequence therefore always has `length - 2` nonzero entries — two equal
/// to 2 and the rest equal to 1.
pub fn generate_sequences(count: usize, length: usize, dim: usize, seed: u64) -> Result<SequenceSet> {
    if length < 4 {
        return Err(Error::config(format!(
            "sequence length must be at least 4 so the last 2 vectors can duplicate 2 distinct earlier ones, got {length}"
        )));
    }
    if dim < length {
        return Err(Error::config(format!(
            "dimension {dim} is smaller than sequence length {length}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let distinct = length - 2;
    let sequences = (0..count)
        .map(|_| {
            let mut seq: Vec<u32> = rand::seq::index::sample(&mut rng, dim, distinct)
                .iter()
                .map(|i| i as u32)
                .collect();
            let repeats = rand::seq::index::sample(&mut rng, distinct, 2);
            seq.push(seq[repeats.index(0)]);
            seq.push(seq[repeats.index(1)]);
            seq
        })
        .collect();
    Ok(SequenceSet { dim, len: length, seed, sequences })
}

/// Weights of the recurrent network
/// `h_t = act(W_h · h_{t-1} + W_x · x_t)`, `y_t = W_o · h_t`, `h_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnParams {
    /// `W_x`, hidden × input.
    pub w_input: Array2<f64>,
    /// `W_h`, hidden × hidden.
    pub w_hidden: Array2<f64>,
    /// `W_o`, output × hidden.
    pub w_output: Array2<f64>,
}

impl RnnParams {
    pub fn hidden(&self) -> usize {
        self.w_hidden.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_input.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.w_output.nrows()
    }

    /// Checks the three matrices agree on the hidden size and hold only
    /// finite values.
    pub fn validate(&self) -> Result<()> {
        let m = self.w_hidden.nrows();
        if self.w_hidden.ncols() != m {
            return Err(Error::config(format!(
                "recurrent matrix must be square, got {}×{}",
                m,
                self.w_hidden.ncols()
            )));
        }
        if self.w_input.nrows() != m || self.w_output.ncols() != m {
            return Err(Error::config(format!(
                "hidden size disagrees: recurrent {}×{}, input {}×{}, output {}×{}",
                m,
                m,
                self.w_input.nrows(),
                self.w_input.ncols(),
                self.w_output.nrows(),
                self.w_output.ncols()
            )));
        }
        for matrix in [&self.w_input, &self.w_hidden, &self.w_output] {
            if matrix.iter().any(|v| !v.is_finite()) {
                return Err(Error::data("network weights contain non-finite values"));
            }
        }
        Ok(())
    }

    /// Random initialization: every entry uniform in [−1/√hidden, 1/√hidden],
    /// drawn in a fixed order (input matrix row-major, then recurrent, then
    /// output) so the same seed always gives the same weights.
    pub fn random(hidden: usize, dim: usize, seed: u64) -> RnnParams {
        let bound = 1.0 / (hidden as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut matrix = |rows: usize, cols: usize| {
            let data: Vec<f64> =
                (0..rows * cols).map(|_| rng.random_range(-bound..=bound)).collect();
            Array2::from_shape_vec((rows, cols), data).expect("data length matches shape")
        };
        let w_input = matrix(hidden, dim);
        let w_hidden = matrix(hidden, hidden);
        let w_output = matrix(dim, hidden);
        RnnParams { w_input, w_hidden, w_output }
    }

    /// The exact solution of the running-sum task: identity recurrence with
    /// the input embedded into (and read back out of) the first `dim` hidden
    /// units, so `y_t = Σ_{i≤t} x_i` exactly. Requires `hidden ≥ dim`.
    pub fn identity_addition(hidden: usize, dim: usize) -> Result<RnnParams> {
        if hidden < dim {
            return Err(Error::config(format!(
                "the exact running-sum solution needs hidden size ≥ dimension, got {hidden} < {dim}"
            )));
        }
        let eye = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |(i, j)| if i == j { 1.0 } else { 0.0 })
        };
        Ok(RnnParams {
            w_input: eye(hidden, dim),
            w_hidden: Array2::eye(hidden),
            w_output: eye(dim, hidden),
        })
    }

    /// The all-zero network: every output is the zero vector regardless of
    /// input. Its loss is the scale bar trained models are compared against.
    pub fn zeroed(hidden: usize, dim: usize) -> RnnParams {
        RnnParams {
            w_input: Array2::zeros((hidden, dim)),
            w_hidden: Array2::zeros((hidden, hidden)),
            w_output: Array2::zeros((dim, hidden)),
        }
    }
}

/// Hidden-state activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// No nonlinearity — the regime with an exact closed-form optimum.
    Linear,
    /// tanh on the hidden state.
    Tanh,
}

impl FromStr for Activation {
    type Err = Error;
    fn from_str(text: &str) -> Result<Activation> {
        match text {
            "linear" => Ok(Activation::Linear),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::config(format!("unknown activation '{other}'"))),
        }
    }
}

/// Which steps the loss covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossSteps {
    /// Only the final step's output against the full sum.
    LastStep,
    /// Every step's output against the running sum up to that step.
    EveryStep,
}

impl FromStr for LossSteps {
    type Err = Error;
    fn from_str(text: &str) -> Result<LossSteps> {
        match text {
            "last-step" => Ok(LossSteps::LastStep),
            "every-step" => Ok(LossSteps::EveryStep),
            other => Err(Error::config(format!("unknown loss mode '{other}'"))),
        }
    }
}

/// How the squared error is normalized. Both conventions are supported
/// because reported baselines differ on which one they divide by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossNorm {
    /// Divide by the output dimension (and the step count in every-step
    /// mode): a true mean over predicted entries.
    Dimension,
    /// Divide by the sequence length only.
    SequenceLength,
}

impl FromStr for LossNorm {
    type Err = Error;
    fn from_str(text: &str) -> Result<LossNorm> {
        match text {
            "per-dimension" => Ok(LossNorm::Dimension),
            "per-sequence-length" => Ok(LossNorm::SequenceLength),
            other => Err(Error::config(format!("unknown loss normalization '{other}'"))),
        }
    }
}

fn norm_factor(steps: LossSteps, norm: LossNorm, dim: usize, len: usize) -> f64 {
    match (steps, norm) {
        (LossSteps::LastStep, LossNorm::Dimension) => 1.0 / dim as f64,
        (LossSteps::EveryStep, LossNorm::Dimension) => 1.0 / (dim * len) as f64,
        (_, LossNorm::SequenceLength) => 1.0 / len as f64,
    }
}

/// Runs the recurrence over one sequence of hot indices and returns every
/// step's output vector y_1..y_T.
pub fn forward(params: &RnnParams, sequence: &[u32], activation: Activation) -> Result<Vec<Array1<f64>>> {
    params.validate()?;
    if sequence.is_empty() {
        return Err(Error::data("cannot run the network on an empty sequence"));
    }
    let n = params.input_dim();
    if let Some(&bad) = sequence.iter().find(|&&i| i as usize >= n) {
        return Err(Error::data(format!(
            "hot index {bad} out of range for input dimension {n}"
        )));
    }
    let mut h = Array1::<f64>::zeros(params.hidden());
    let mut outputs = Vec::with_capacity(sequence.len());
    for &hot in sequence {
        let mut a = params.w_hidden.dot(&h);
        a += &params.w_input.column(hot as usize);
        h = match activation {
            Activation::Linear => a,
            Activation::Tanh => a.mapv(f64::tanh),
        };
        outputs.push(params.w_output.dot(&h));
    }
    Ok(outputs)
}

/// Squared error of the outputs against the running-sum targets of
/// `sequence`, under the chosen step mode and normalization.
pub fn mse_loss(
    outputs: &[Array1<f64>],
    sequence: &[u32],
    steps: LossSteps,
    norm: LossNorm,
) -> Result<f64> {
    if outputs.is_empty() || outputs.len() != sequence.len() {
        return Err(Error::data(format!(
            "{} outputs for a sequence of {} steps",
            outputs.len(),
            sequence.len()
        )));
    }
    let dim = outputs[0].len();
    if outputs.iter().any(|y| y.len() != dim) {
        return Err(Error::data("output vectors have inconsistent dimensions"));
    }
    if let Some(&bad) = sequence.iter().find(|&&i| i as usize >= dim) {
        return Err(Error::data(format!(
            "hot index {bad} out of range for output dimension {dim}"
        )));
    }
    let len = sequence.len();
    let mut target = Array1::<f64>::zeros(dim);
    let mut total = 0.0;
    for (t, (&hot, y)) in sequence.iter().zip(outputs).enumerate() {
        target[hot as usize] += 1.0;
        let counted = match steps {
            LossSteps::EveryStep => true,
            LossSteps::LastStep => t + 1 == len,
        };
        if counted {
            total += y
                .iter()
                .zip(&target)
                .map(|(p, c)| {
                    let e = p - c;
                    e * e
                })
                .sum::<f64>();
        }
    }
    Ok(total * norm_factor(steps, norm, dim, len))
}

/// Mean loss over a whole sequence set.
pub fn mse_over_set(
    params: &RnnParams,
    set: &SequenceSet,
    activation: Activation,
    steps: LossSteps,
    norm: LossNorm,
) -> Result<f64> {
    if set.sequences.is_empty() {
        return Err(Error::data("the sequence set is empty"));
    }
    let losses: Vec<f64> = set
        .sequences
        .par_iter()
        .map(|seq| mse_loss(&forward(params, seq, activation)?, seq, steps, norm))
        .collect::<Result<_>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// Gradients of the batch-mean loss with respect to each weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnGradients {
    pub w_input: Array2<f64>,
    pub w_hidden: Array2<f64>,
    pub w_output: Array2<f64>,
}

/// Computes the batch-mean loss and its exact gradients by backpropagation
/// through the full recurrence. All sequences in the batch must have the
/// same length.
pub fn loss_and_gradients(
    params: &RnnParams,
    batch: &[Vec<u32>],
    activation: Activation,
    steps: LossSteps,
    norm: LossNorm,
) -> Result<(f64, RnnGradients)> {
    params.validate()?;
    let first = batch.first().ok_or_else(|| Error::data("empty training batch"))?;
    let len = first.len();
    if len == 0 {
        return Err(Error::data("cannot train on empty sequences"));
    }
    if batch.iter().any(|s| s.len() != len) {
        return Err(Error::data("all sequences in a batch must have the same length"));
    }
    let (m, n) = (params.hidden(), params.input_dim());
    if params.output_dim() != n {
        return Err(Error::config(format!(
            "running-sum training needs output dimension {} to equal input dimension {n}",
            params.output_dim()
        )));
    }
    for seq in batch {
        if let Some(&bad) = seq.iter().find(|&&i| (i as usize) >= n) {
            return Err(Error::data(format!(
                "hot index {bad} out of range for input dimension {n}"
            )));
        }
    }
    let b = batch.len();
    let coeff = 2.0 * norm_factor(steps, norm, n, len) / b as f64;

    // Forward pass, keeping every hidden state; errors are stored only for
    // steps the loss covers.
    let mut states: Vec<Array2<f64>> = Vec::with_capacity(len + 1);
    states.push(Array2::zeros((b, m)));
    let mut errors: Vec<Option<Array2<f64>>> = Vec::with_capacity(len);
    let mut targets = Array2::<f64>::zeros((b, n));
    let mut loss = 0.0;
    for t in 0..len {
        let mut a = states[t].dot(&params.w_hidden.t());
        for (row, seq) in batch.iter().enumerate() {
            let mut r = a.row_mut(row);
            r += &params.w_input.column(seq[t] as usize);
            targets[(row, seq[t] as usize)] += 1.0;
        }
        let h = match activation {
            Activation::Linear => a,
            Activation::Tanh => a.mapv(f64::tanh),
        };
        let counted = match steps {
            LossSteps::EveryStep => true,
            LossSteps::LastStep => t + 1 == len,
        };
        if counted {
            let diff = h.dot(&params.w_output.t()) - &targets;
            loss += 0.5 * coeff * diff.iter().map(|e| e * e).sum::<f64>();
            errors.push(Some(diff * coeff));
        } else {
            errors.push(None);
        }
        states.push(h);
    }

    // Backward pass.
    let mut g_input = Array2::<f64>::zeros((m, n));
    let mut g_hidden = Array2::<f64>::zeros((m, m));
    let mut g_output = Array2::<f64>::zeros((n, m));
    let mut carry = Array2::<f64>::zeros((b, m));
    for t in (0..len).rev() {
        let h = &states[t + 1];
        let delta_h = match &errors[t] {
            Some(e) => {
                g_output += &e.t().dot(h);
                e.dot(&params.w_output) + &carry
            }
            None => carry.clone(),
        };
        let delta_a = match activation {
            Activation::Linear => delta_h,
            Activation::Tanh => delta_h * h.mapv(|v| 1.0 - v * v),
        };
        g_hidden += &delta_a.t().dot(&states[t]);
        for (row, seq) in batch.iter().enumerate() {
            let mut col = g_input.column_mut(seq[t] as usize);
            col += &delta_a.row(row);
        }
        carry = delta_a.dot(&params.w_hidden);
    }

    Ok((loss, RnnGradients { w_input: g_input, w_hidden: g_hidden, w_output: g_output }))
}

/// Everything the trainer needs besides the initial weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub activation: Activation,
    pub steps: LossSteps,
    pub norm: LossNorm,
    /// Recorded in the trace; also the conventional seed for the random
    /// initial weights.
    pub seed: u64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            learning_rate: 0.001,
            epochs: 200,
            batch_size: 64,
            activation: Activation::Linear,
            steps: LossSteps::EveryStep,
            norm: LossNorm::SequenceLength,
            seed: 42,
        }
    }
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::config(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::config("training needs at least one epoch"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1"));
        }
        Ok(())
    }
}

/// Training record: the mean per-sequence loss of every epoch (measured on
/// the batches before each update), the final weights, and the settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    pub epoch_loss: Vec<f64>,
    pub params: RnnParams,
    pub settings: TrainSettings,
}

/// Plain gradient descent from the given initial weights, visiting batches
/// in their stored order every epoch (no shuffling — runs are exactly
/// reproducible). Aborts with a diagnostic if the loss leaves the finite
/// range.
pub fn train(init: RnnParams, set: &SequenceSet, settings: &TrainSettings) -> Result<TrainTrace> {
    settings.validate()?;
    init.validate()?;
    if set.sequences.is_empty() {
        return Err(Error::data("the training set is empty"));
    }
    let mut params = init;
    let mut epoch_loss = Vec::with_capacity(settings.epochs);
    for epoch in 0..settings.epochs {
        let mut total = 0.0;
        for chunk in set.sequences.chunks(settings.batch_size) {
            let (loss, grads) =
                loss_and_gradients(&params, chunk, settings.activation, settings.steps, settings.norm)?;
            if !loss.is_finite() {
                return Err(Error::data(format!(
                    "training diverged to a non-finite loss in epoch {} — lower the learning rate",
                    epoch + 1
                )));
            }
            total += loss * chunk.len() as f64;
            params.w_input.scaled_add(-settings.learning_rate, &grads.w_input);
            params.w_hidden.scaled_add(-settings.learning_rate, &grads.w_hidden);
            params.w_output.scaled_add(-settings.learning_rate, &grads.w_output);
        }
        epoch_loss.push(total / set.sequences.len() as f64);
    }
    Ok(TrainTrace { epoch_loss, params, settings: settings.clone() })
}

/// Writes the loss curve as a tab-separated (epoch, loss) table.
pub fn write_trace(trace: &TrainTrace, writer: &mut impl Write) -> Result<()> {
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "#epoch\tloss")?;
    for (i, loss) in trace.epoch_loss.iter().enumerate() {
        writeln!(w, "{}\t{}", i + 1, loss)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes weights in the text matrix format: a header with the three sizes,
/// then each matrix as one whitespace-separated row per line, preceded by
/// its name on a `#` line. Values round-trip exactly through [`read_params`].
pub fn write_params(params: &RnnParams, writer: &mut impl Write) -> Result<()> {
    params.validate().map_err(|e| Error::data(format!("refusing to write invalid weights: {e}")))?;
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "tifuknn-rnn-params v1")?;
    writeln!(w, "hidden: {}", params.hidden())?;
    writeln!(w, "input: {}", params.input_dim())?;
    writeln!(w, "output: {}", params.output_dim())?;
    for (name, matrix) in [
        ("w_input", &params.w_input),
        ("w_hidden", &params.w_hidden),
        ("w_output", &params.w_output),
    ] {
        writeln!(w, "#{name}")?;
        for row in matrix.rows() {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads weights written by [`write_params`].
pub fn read_params(text: &str) -> Result<RnnParams> {
    let mut lines = text.lines();
    if lines.next() != Some("tifuknn-rnn-params v1") {
        return Err(Error::data("not a weights file: missing 'tifuknn-rnn-params v1' header"));
    }
    let mut size = |key: &str| -> Result<usize> {
        let line = lines.next().ok_or_else(|| Error::data("truncated weights header"))?;
        let value = line
            .strip_prefix(key)
            .ok_or_else(|| Error::data(format!("expected '{key}<size>', got '{line}'")))?;
        value.trim().parse().map_err(|_| Error::data(format!("bad size in '{line}'")))
    };
    let hidden = size("hidden:")?;
    let input = size("input:")?;
    let output = size("output:")?;
    let mut matrix = |name: &str, rows: usize, cols: usize| -> Result<Array2<f64>> {
        let header = lines.next();
        if header != Some(&format!("#{name}")[..]) {
            return Err(Error::data(format!("expected '#{name}' section")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines.next().ok_or_else(|| Error::data(format!("truncated {name} matrix")))?;
            let before = data.len();
            for token in line.split_whitespace() {
                let value: f64 = token
                    .parse()
                    .map_err(|_| Error::data(format!("bad weight value '{token}' in {name}")))?;
                data.push(value);
            }
            if data.len() - before != cols {
                return Err(Error::data(format!(
                    "{name} row has {} values, expected {cols}",
                    data.len() - before
                )));
            }
        }
        Array2::from_shape_vec((rows, cols), data)
            .map_err(|e| Error::data(format!("{name} shape error: {e}")))
    };
    let params = RnnParams {
        w_input: matrix("w_input", hidden, input)?,
        w_hidden: matrix("w_hidden", hidden, hidden)?,
        w_output: matrix("w_output", output, hidden)?,
    };
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn running_sums(sequence: &[u32], dim: usize) -> Vec<Array1<f64>> {
        let mut c = Array1::<f64>::zeros(dim);
        sequence
            .iter()
            .map(|&hot| {
                c[hot as usize] += 1.0;
                c.clone()
            })
            .collect()
    }

    #[test]
    fn generated_sequences_follow_the_duplication_construction() {
        let set = generate_sequences(50, 10, 100, 7).unwrap();
        assert_eq!(set.sequences.len(), 50);
        for seq in &set.sequences {
            assert_eq!(seq.len(), 10);
            assert!(seq.iter().all(|&i| i < 100));
            let first: Vec<u32> = seq[..8].to_vec();
            let mut distinct = first.clone();
            distinct.sort_unstable();
            distinct.dedup();
            assert_eq!(distinct.len(), 8, "first 8 dims must be distinct");
            assert!(first.contains(&seq[8]) && first.contains(&seq[9]));
            assert_ne!(seq[8], seq[9], "the two duplicated dims are distinct");

            // Sum vector: exactly 8 nonzeros — six 1s and two 2s.
            let sum = running_sums(seq, 100).pop().unwrap();
            let ones = sum.iter().filter(|&&v| v == 1.0).count();
            let twos = sum.iter().filter(|&&v| v == 2.0).count();
            let zeros = sum.iter().filter(|&&v| v == 0.0).count();
            assert_eq!((ones, twos, zeros), (6, 2, 92));
        }
        assert_eq!(set, generate_sequences(50, 10, 100, 7).unwrap());
        assert_ne!(set.sequences, generate_sequences(50, 10, 100, 8).unwrap().sequences);

        assert!(generate_sequences(5, 3, 100, 0).is_err());
        assert!(generate_sequences(5, 10, 9, 0).is_err());
    }

    #[test]
    fn identity_solution_reproduces_running_sums_exactly() {
        let set = generate_sequences(20, 6, 12, 3).unwrap();
        for hidden in [12, 20] {
            let params = RnnParams::identity_addition(hidden, 12).unwrap();
            for seq in &set.sequences {
                let outputs = forward(&params, seq, Activation::Linear).unwrap();
                let expect = running_sums(seq, 12);
                for (y, c) in outputs.iter().zip(&expect) {
                    for (a, b) in y.iter().zip(c) {
                        assert!((a - b).abs() < 1e-12);
                    }
                }
                let loss =
                    mse_loss(&outputs, seq, LossSteps::EveryStep, LossNorm::Dimension).unwrap();
                assert!(loss < 1e-24);
            }
        }
        assert!(RnnParams::identity_addition(5, 10).is_err());
    }

    #[test]
    fn zero_weights_output_zero_everywhere() {
        let params = RnnParams {
            w_input: Array2::zeros((4, 3)),
            w_hidden: Array2::zeros((4, 4)),
            w_output: Array2::zeros((3, 4)),
        };
        let outputs = forward(&params, &[0, 2, 1], Activation::Linear).unwrap();
        assert!(outputs.iter().all(|y| y.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn forward_matches_the_unrolled_matrix_power_oracle() {
        // y_t = Σ_{i≤t} W_o · W_h^{t-i} · W_x · x_i, checked at t = 3.
        let params = RnnParams::random(4, 3, 11);
        let seq = [2u32, 0, 1];
        let outputs = forward(&params, &seq, Activation::Linear).unwrap();

        let powers = [
            Array2::<f64>::eye(4),
            params.w_hidden.clone(),
            params.w_hidden.dot(&params.w_hidden),
        ];
        for t in 0..3 {
            let mut expect = Array1::<f64>::zeros(3);
            for i in 0..=t {
                let x = params.w_input.column(seq[i] as usize).to_owned();
                expect += &params.w_output.dot(&powers[t - i].dot(&x));
            }
            for (a, b) in outputs[t].iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12, "step {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_predictor_loss_is_fixed_by_the_construction() {
        // The final sum always has six 1s and two 2s, so a zero predictor's
        // last-step squared error is 6 + 2·4 = 14 on every sequence:
        // 14/10 = 1.4 per sequence length, 14/100 = 0.14 per dimension.
        let dim = 100;
        let set = generate_sequences(25, 10, dim, 5).unwrap();
        let zero = RnnParams {
            w_input: Array2::zeros((8, dim)),
            w_hidden: Array2::zeros((8, 8)),
            w_output: Array2::zeros((dim, 8)),
        };
        for seq in &set.sequences {
            let outputs = forward(&zero, seq, Activation::Linear).unwrap();
            let per_len =
                mse_loss(&outputs, seq, LossSteps::LastStep, LossNorm::SequenceLength).unwrap();
            let per_dim = mse_loss(&outputs, seq, LossSteps::LastStep, LossNorm::Dimension).unwrap();
            assert!((per_len - 1.4).abs() < 1e-12);
            assert!((per_dim - 0.14).abs() < 1e-12);
        }
        let mean = mse_over_set(&zero, &set, Activation::Linear, LossSteps::LastStep, LossNorm::Dimension)
            .unwrap();
        assert!((mean - 0.14).abs() < 1e-12);
    }

    #[test]
    fn batched_loss_agrees_with_per_sequence_losses() {
        let set = generate_sequences(9, 5, 8, 21).unwrap();
        let params = RnnParams::random(6, 8, 2);
        for steps in [LossSteps::LastStep, LossSteps::EveryStep] {
            for norm in [LossNorm::Dimension, LossNorm::SequenceLength] {
                let (batched, _) =
                    loss_and_gradients(&params, &set.sequences, Activation::Tanh, steps, norm)
                        .unwrap();
                let mean = mse_over_set(&params, &set, Activation::Tanh, steps, norm).unwrap();
                assert!((batched - mean).abs() < 1e-12, "{steps:?} {norm:?}");
            }
        }
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        let set = generate_sequences(3, 4, 5, 13).unwrap();
        let base = RnnParams::random(5, 5, 17);
        let eps = 1e-5;
        for activation in [Activation::Linear, Activation::Tanh] {
            for (steps, norm) in [
                (LossSteps::LastStep, LossNorm::Dimension),
                (LossSteps::EveryStep, LossNorm::SequenceLength),
            ] {
                let (_, grads) =
                    loss_and_gradients(&base, &set.sequences, activation, steps, norm).unwrap();
                let loss_at = |p: &RnnParams| {
                    loss_and_gradients(p, &set.sequences, activation, steps, norm).unwrap().0
                };
                let mut max_rel = 0.0f64;
                // All three matrices are 5×5 in this toy shape.
                for which in 0..3 {
                    for r in 0..5 {
                        for c in 0..5 {
                            let mut plus = base.clone();
                            let mut minus = base.clone();
                            let (p, m, g) = match which {
                                0 => (&mut plus.w_input, &mut minus.w_input, grads.w_input[(r, c)]),
                                1 => {
                                    (&mut plus.w_hidden, &mut minus.w_hidden, grads.w_hidden[(r, c)])
                                }
                                _ => {
                                    (&mut plus.w_output, &mut minus.w_output, grads.w_output[(r, c)])
                                }
                            };
                            p[(r, c)] += eps;
                            m[(r, c)] -= eps;
                            let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * eps);
                            let rel = (g - numeric).abs() / g.abs().max(numeric.abs()).max(1e-8);
                            max_rel = max_rel.max(rel);
                        }
                    }
                }
                assert!(max_rel < 1e-5, "{activation:?} {steps:?} {norm:?}: max rel {max_rel}");
            }
        }
    }

    #[test]
    fn training_from_the_exact_solution_stays_at_the_optimum() {
        let set = generate_sequences(40, 6, 10, 9).unwrap();
        let init = RnnParams::identity_addition(10, 10).unwrap();
        let settings = TrainSettings {
            epochs: 5,
            batch_size: 16,
            ..TrainSettings::default()
        };
        let trace = train(init, &set, &settings).unwrap();
        assert_eq!(trace.epoch_loss.len(), 5);
        assert!(trace.epoch_loss.iter().all(|&l| l < 1e-20), "{:?}", trace.epoch_loss);
    }

    #[test]
    fn training_is_deterministic_and_does_not_blow_up() {
        let set = generate_sequences(60, 6, 12, 4).unwrap();
        let settings = TrainSettings { epochs: 8, batch_size: 16, ..TrainSettings::default() };
        let run = || train(RnnParams::random(8, 12, settings.seed), &set, &settings).unwrap();
        let a = run();
        let b = run();
        assert_eq!(a.epoch_loss, b.epoch_loss);
        assert_eq!(a.params, b.params);
        assert_eq!(a.epoch_loss.len(), settings.epochs);
        assert!(a.epoch_loss.iter().all(|l| l.is_finite()));
        let (first, last) = (a.epoch_loss[0], *a.epoch_loss.last().unwrap());
        assert!(last <= first * 1.05 + 1e-12, "loss grew: {first} → {last}");
        assert!(last >= 0.0);
    }

    #[test]
    fn runaway_learning_rate_aborts_with_a_data_error() {
        let set = generate_sequences(30, 6, 12, 4).unwrap();
        let settings = TrainSettings {
            learning_rate: 1e6,
            epochs: 50,
            batch_size: 8,
            ..TrainSettings::default()
        };
        let err = train(RnnParams::random(8, 12, 1), &set, &settings).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }

    #[test]
    fn settings_validation_rejects_nonsense() {
        let bad_lr = TrainSettings { learning_rate: 0.0, ..TrainSettings::default() };
        assert!(bad_lr.validate().is_err());
        let bad_epochs = TrainSettings { epochs: 0, ..TrainSettings::default() };
        assert!(bad_epochs.validate().is_err());
        let bad_batch = TrainSettings { batch_size: 0, ..TrainSettings::default() };
        assert!(bad_batch.validate().is_err());
    }

    #[test]
    fn params_dump_round_trips_bitwise() {
        let params = RnnParams::random(6, 9, 123);
        let mut buf = Vec::new();
        write_params(&params, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tifuknn-rnn-params v1\nhidden: 6\ninput: 9\noutput: 9\n"));
        let back = read_params(&text).unwrap();
        assert_eq!(params, back);
        assert!(read_params("garbage").is_err());
    }

    #[test]
    fn trace_dump_is_a_tab_separated_loss_curve() {
        let set = generate_sequences(10, 5, 8, 2).unwrap();
        let settings = TrainSettings { epochs: 3, batch_size: 4, ..TrainSettings::default() };
        let trace = train(RnnParams::random(6, 8, 5), &set, &settings).unwrap();
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "#epoch\tloss");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1\t"));
        let loss: f64 = lines[1].split('\t').nth(1).unwrap().parse().unwrap();
        assert_eq!(loss, trace.epoch_loss[0]);
    }

    #[test]
    fn parsers_accept_the_documented_names() {
        assert_eq!("linear".parse::<Activation>().unwrap(), Activation::Linear);
        assert_eq!("tanh".parse::<Activation>().unwrap(), Activation::Tanh);
        assert_eq!("last-step".parse::<LossSteps>().unwrap(), LossSteps::LastStep);
        assert_eq!("every-step".parse::<LossSteps>().unwrap(), LossSteps::EveryStep);
        assert_eq!("per-dimension".parse::<LossNorm>().unwrap(), LossNorm::Dimension);
        assert_eq!(
            "per-sequence-length".parse::<LossNorm>().unwrap(),
            LossNorm::SequenceLength
        );
        assert!("relu".parse::<Activation>().is_err());
    }
}
