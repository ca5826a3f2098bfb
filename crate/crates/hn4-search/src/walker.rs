//! Coin-position (optionally ancilla-coin-position) state vectors and the
//! evolution operators acting on them.
//!
//! A walker state over `N = 2^n` vertices stores `4N` complex amplitudes in
//! vertex-major layout (`k * 4 + coin`), doubled to `8N` when an ancilla
//! qubit is present (ancilla slice outermost, slice 1 after slice 0). The
//! coin block of a vertex is contiguous, so a coin application is a blocked
//! 4x4 multiply and a shift application is a precomputed index permutation.
//!
//! Three one-step evolutions are provided:
//!
//! * the plain walk `U = S (C x I)` via [`WalkerState::apply_coin`] and
//!   [`WalkerState::apply_shift`];
//! * the search walk `U' = S C'`, where the coin acts as `-I` on a marked
//!   vertex ([`WalkerState::step_search`]);
//! * the ancilla-controlled variant `U''` that conjugates the controlled
//!   reflection with an ancilla rotation and flips the phase of the idle
//!   slice ([`WalkerState::step_tulsi`]).
//!
//! No renormalization is performed during evolution; norm drift is the
//! caller's to monitor (the steppers are compositions of orthogonal maps, so
//! drift stays near machine precision).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::topology::{NetworkTopology, NUM_PORTS};

/// One-parameter family of 4x4 real orthogonal coins.
///
/// The matrix is the reflection `2 v v^T - I` about the weight vector
/// `v(epsilon)` of [`coin_vector`]; `epsilon = 1` gives the Grover coin
/// (all entries `+-1/2`). Smaller `epsilon` drains probability flux from the
/// long-range ports 0/1 toward the backbone ports 2/3, larger `epsilon`
/// feeds it.
#[derive(Debug, Clone)]
pub struct CoinSpec {
    epsilon: f64,
    matrix: [[f64; 4]; 4],
}

/// Inclusive upper end of the coin parameter domain; beyond it the
/// off-diagonal entry `sqrt(eps (2 - eps)) / 2` turns imaginary.
pub const EPSILON_MAX: f64 = 2.0;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= EPSILON_MAX) {
        return Err(Error::domain(format!(
            "epsilon = {epsilon} outside (0, {EPSILON_MAX}]: a real orthogonal coin needs \
             epsilon * (2 - epsilon) >= 0"
        )));
    }
    Ok(())
}

/// Coin weight vector `v(epsilon)`; unit norm for every valid `epsilon`,
/// uniform at `epsilon = 1`.
pub fn coin_vector(epsilon: f64) -> Result<[f64; 4]> {
    check_epsilon(epsilon)?;
    let w01 = (epsilon / 4.0).sqrt();
    let w23 = ((4.0 - 2.0 * epsilon) / 8.0).sqrt();
    Ok([w01, w01, w23, w23])
}

/// Build the coin matrix for a flux parameter `epsilon` in `(0, 2]`.
pub fn epsilon_coin(epsilon: f64) -> Result<CoinSpec> {
    check_epsilon(epsilon)?;
    let a = epsilon / 2.0;
    let b = (epsilon * (2.0 - epsilon)).sqrt() / 2.0;
    let c = (2.0 - epsilon) / 2.0;
    let matrix = [
        [a - 1.0, a, b, b],
        [a, a - 1.0, b, b],
        [b, b, c - 1.0, c],
        [b, b, c, c - 1.0],
    ];
    Ok(CoinSpec { epsilon, matrix })
}

impl CoinSpec {
    /// The Grover coin, `epsilon_coin(1)`.
    pub fn grover() -> CoinSpec {
        epsilon_coin(1.0).expect("epsilon = 1 is in the domain")
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.matrix
    }
}

/// How the ancilla rotation angle of the Tulsi step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CosDeltaRule {
    /// Use the explicit angle stored in [`TulsiParams::delta`].
    Explicit,
    /// `cos(delta) = min(1, c / log2 N)`.
    #[default]
    InvLog,
    /// `cos(delta) = min(1, c / sqrt(log2 N))`.
    InvSqrtLog,
}

/// Ancilla rotation parameters for the Tulsi step.
#[derive(Debug, Clone, Copy)]
pub struct TulsiParams {
    /// Rotation angle in radians; only consulted under [`CosDeltaRule::Explicit`].
    pub delta: f64,
    pub rule: CosDeltaRule,
    /// Scale factor of the size-dependent rules.
    pub c: f64,
}

impl Default for TulsiParams {
    fn default() -> Self {
        TulsiParams { delta: 0.0, rule: CosDeltaRule::InvLog, c: 1.0 }
    }
}

impl TulsiParams {
    pub fn explicit_cos(cos_delta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&cos_delta) {
            return Err(Error::domain(format!("cos(delta) = {cos_delta} outside [-1, 1]")));
        }
        Ok(TulsiParams { delta: cos_delta.acos(), rule: CosDeltaRule::Explicit, c: 1.0 })
    }

    pub fn with_scale(rule: CosDeltaRule, c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::domain(format!("delta scale c = {c} must be positive")));
        }
        Ok(TulsiParams { delta: 0.0, rule, c })
    }

    /// Resolve `cos(delta)` for a `2^n`-vertex network (`log2 N = n`).
    pub fn resolve_cos_delta(&self, n: u32) -> f64 {
        match self.rule {
            CosDeltaRule::Explicit => self.delta.cos(),
            CosDeltaRule::InvLog => (self.c / n as f64).min(1.0),
            CosDeltaRule::InvSqrtLog => (self.c / (n as f64).sqrt()).min(1.0),
        }
    }
}

/// State vector of the walker, with or without the ancilla register.
#[derive(Debug, Clone)]
pub struct WalkerState {
    n: u32,
    num_vertices: usize,
    has_ancilla: bool,
    amplitudes: Vec<Complex64>,
    scratch: Vec<Complex64>,
    time: u64,
}

impl WalkerState {
    /// The biased initial condition `v(epsilon) (x) |u_P>`: coin weights from
    /// [`coin_vector`], uniform over vertices. With the ancilla the state is
    /// prepared on the `|1>` slice. `epsilon = 1` is the uniform
    /// superposition of the whole coin-position basis.
    pub fn initial(epsilon: f64, n: u32, with_ancilla: bool) -> Result<Self> {
        if !(crate::topology::MIN_LEVELS..=crate::topology::MAX_LEVELS).contains(&n) {
            return Err(Error::domain(format!("n = {n} out of range")));
        }
        let v = coin_vector(epsilon)?;
        let num_vertices = 1usize << n;
        let slice_len = NUM_PORTS * num_vertices;
        let len = if with_ancilla { 2 * slice_len } else { slice_len };
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        let root_n = (num_vertices as f64).sqrt();
        let offset = if with_ancilla { slice_len } else { 0 };
        for k in 0..num_vertices {
            for a in 0..NUM_PORTS {
                amplitudes[offset + k * NUM_PORTS + a] = Complex64::new(v[a] / root_n, 0.0);
            }
        }
        let scratch = vec![Complex64::new(0.0, 0.0); slice_len];
        Ok(WalkerState { n, num_vertices, has_ancilla: with_ancilla, amplitudes, scratch, time: 0 })
    }

    pub fn levels(&self) -> u32 {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn has_ancilla(&self) -> bool {
        self.has_ancilla
    }

    /// Steps taken so far.
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, ancilla: usize, coin: usize, vertex: usize) -> Complex64 {
        self.amplitudes[ancilla * self.slice_len() + vertex * NUM_PORTS + coin]
    }

    /// Number of ancilla slices (1 or 2).
    pub fn num_slices(&self) -> usize {
        if self.has_ancilla {
            2
        } else {
            1
        }
    }

    fn slice_len(&self) -> usize {
        NUM_PORTS * self.num_vertices
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Probability of measuring the position register at `vertex`, summing
    /// over the coin and (when present) the ancilla.
    pub fn marked_probability(&self, vertex: usize) -> f64 {
        let mut p = 0.0;
        for slice in 0..self.num_slices() {
            let base = slice * self.slice_len() + vertex * NUM_PORTS;
            for a in 0..NUM_PORTS {
                p += self.amplitudes[base + a].norm_sqr();
            }
        }
        p
    }

    /// Full position measurement distribution.
    pub fn position_distribution(&self) -> Vec<f64> {
        (0..self.num_vertices).map(|k| self.marked_probability(k)).collect()
    }

    /// Apply the coin to every vertex (identity on position and ancilla).
    pub fn apply_coin(&mut self, coin: &CoinSpec) {
        for slice in 0..self.num_slices() {
            self.coin_on_slice(slice, coin);
        }
    }

    /// Apply the shift permutation (identity on the ancilla).
    pub fn apply_shift(&mut self, topo: &NetworkTopology) {
        assert_eq!(topo.num_vertices(), self.num_vertices, "topology size mismatch");
        for slice in 0..self.num_slices() {
            self.shift_on_slice(slice, topo);
        }
    }

    /// Apply the marked coin `C'`: the coin everywhere except `k0`, where the
    /// amplitudes are negated.
    pub fn apply_marked_coin(&mut self, coin: &CoinSpec, k0: usize) {
        for slice in 0..self.num_slices() {
            self.marked_coin_on_slice(slice, coin, k0);
        }
    }

    /// Reflect the coin block at `k0` about `v(epsilon)`:
    /// `psi -> psi - 2 (v . psi) v`. Other vertices untouched.
    pub fn apply_reflection(&mut self, epsilon: f64, k0: usize) -> Result<()> {
        let v = coin_vector(epsilon)?;
        for slice in 0..self.num_slices() {
            self.reflect_on_slice(slice, &v, k0);
        }
        Ok(())
    }

    /// One step of the search walk `U' = S C'(epsilon, k0)`.
    pub fn step_search(&mut self, coin: &CoinSpec, topo: &NetworkTopology, k0: usize) {
        debug_assert!(!self.has_ancilla, "step_search acts on ancilla-free states");
        self.apply_marked_coin(coin, k0);
        self.apply_shift(topo);
        self.time += 1;
    }

    /// One step of the ancilla-controlled walk: ancilla rotation, controlled
    /// reflection at `k0`, inverse rotation, controlled walk step, and a
    /// phase flip of the ancilla `|0>` slice.
    pub fn step_tulsi(
        &mut self,
        coin: &CoinSpec,
        topo: &NetworkTopology,
        k0: usize,
        cos_delta: f64,
    ) {
        assert!(self.has_ancilla, "step_tulsi needs the ancilla register");
        let sin_delta = (1.0 - cos_delta * cos_delta).max(0.0).sqrt();
        let v = coin_vector(coin.epsilon()).expect("coin epsilon already validated");

        self.ancilla_rotation(cos_delta, sin_delta);
        self.reflect_on_slice(1, &v, k0);
        self.ancilla_rotation(cos_delta, -sin_delta);
        self.coin_on_slice(1, coin);
        self.shift_on_slice(1, topo);
        // -Z on the ancilla: |0> -> -|0>, |1> -> +|1>.
        for amp in &mut self.amplitudes[..self.slice_len()] {
            *amp = -*amp;
        }
        self.time += 1;
    }

    // -- slice-level kernels ------------------------------------------------

    fn coin_on_slice(&mut self, slice: usize, coin: &CoinSpec) {
        let len = self.slice_len();
        let base = slice * len;
        let m = &coin.matrix;
        for block in self.amplitudes[base..base + len].chunks_exact_mut(NUM_PORTS) {
            let x = [block[0], block[1], block[2], block[3]];
            for (row, out) in m.iter().zip(block.iter_mut()) {
                *out = x[0] * row[0] + x[1] * row[1] + x[2] * row[2] + x[3] * row[3];
            }
        }
    }

    fn marked_coin_on_slice(&mut self, slice: usize, coin: &CoinSpec, k0: usize) {
        self.coin_on_slice(slice, coin);
        // Undo the coin at k0 and negate: C' restricted to the marked block is -I.
        let base = slice * self.slice_len() + k0 * NUM_PORTS;
        let block = &mut self.amplitudes[base..base + NUM_PORTS];
        let y = [block[0], block[1], block[2], block[3]];
        // The coin is a symmetric involution, so applying it again recovers
        // the pre-coin block exactly.
        let m = &coin.matrix;
        for (row, out) in m.iter().zip(block.iter_mut()) {
            *out = -(y[0] * row[0] + y[1] * row[1] + y[2] * row[2] + y[3] * row[3]);
        }
    }

    fn reflect_on_slice(&mut self, slice: usize, v: &[f64; 4], k0: usize) {
        let base = slice * self.slice_len() + k0 * NUM_PORTS;
        let block = &mut self.amplitudes[base..base + NUM_PORTS];
        let overlap = block[0] * v[0] + block[1] * v[1] + block[2] * v[2] + block[3] * v[3];
        let twice = overlap * 2.0;
        for (out, &w) in block.iter_mut().zip(v.iter()) {
            *out -= twice * w;
        }
    }

    fn shift_on_slice(&mut self, slice: usize, topo: &NetworkTopology) {
        let base = slice * self.slice_len();
        let src = &self.amplitudes[base..base + self.slice_len()];
        let perm = topo.shift_permutation();
        // The permutation is its own inverse, so gather and scatter agree.
        for (dst, &p) in self.scratch.iter_mut().zip(perm.iter()) {
            *dst = src[p];
        }
        self.amplitudes[base..base + self.slice_len()].copy_from_slice(&self.scratch);
    }

    fn ancilla_rotation(&mut self, cos_delta: f64, sin_delta: f64) {
        let half = self.slice_len();
        let (zero, one) = self.amplitudes.split_at_mut(half);
        for (a0, a1) in zero.iter_mut().zip(one.iter_mut()) {
            let new0 = *a0 * cos_delta + *a1 * sin_delta;
            let new1 = *a1 * cos_delta - *a0 * sin_delta;
            *a0 = new0;
            *a1 = new1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::EdgeMode;

    const EPS_GRID: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];

    fn matmul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|l| a[i][l] * b[l][j]).sum();
            }
        }
        out
    }

    #[test]
    fn grover_coin_is_exact() {
        let g = CoinSpec::grover();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { -0.5 } else { 0.5 };
                assert_eq!(g.matrix[i][j], expected);
            }
        }
    }

    #[test]
    fn epsilon_two_coin() {
        let c = epsilon_coin(2.0).unwrap();
        let expected = [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ];
        assert_eq!(c.matrix, expected);
    }

    #[test]
    fn epsilon_075_entries() {
        let c = epsilon_coin(0.75).unwrap();
        assert!((c.matrix[0][1] - 0.375).abs() < 1e-15);
        assert!((c.matrix[0][2] - 0.484_122_918_275_927_1).abs() < 1e-12);
        assert!((c.matrix[2][3] - 0.625).abs() < 1e-15);
    }

    #[test]
    fn coin_is_orthogonal_symmetric_involution() {
        for eps in EPS_GRID {
            let c = epsilon_coin(eps).unwrap();
            let sq = matmul4(&c.matrix, &c.matrix);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((c.matrix[i][j] - c.matrix[j][i]).abs() < 1e-15);
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((sq[i][j] - id).abs() < 1e-12, "C^2 != I at eps={eps}");
                }
            }
        }
    }

    #[test]
    fn coin_equals_reflection_about_weight_vector() {
        for eps in EPS_GRID {
            let c = epsilon_coin(eps).unwrap();
            let v = coin_vector(eps).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((c.matrix[i][j] - (2.0 * v[i] * v[j] - id)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coin_vector_values() {
        let v = coin_vector(1.0).unwrap();
        assert_eq!(v, [0.5, 0.5, 0.5, 0.5]);
        let v = coin_vector(2.0).unwrap();
        assert!((v[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
        for eps in EPS_GRID {
            let v = coin_vector(eps).unwrap();
            let norm: f64 = v.iter().map(|w| w * w).sum();
            assert!((norm - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn epsilon_domain_checks() {
        assert!(epsilon_coin(0.0).is_err());
        assert!(epsilon_coin(-0.5).is_err());
        assert!(epsilon_coin(2.0 + 1e-9).is_err());
        assert!(epsilon_coin(f64::NAN).is_err());
    }

    #[test]
    fn initial_state_uniform_at_eps_one() {
        let state = WalkerState::initial(1.0, 4, false).unwrap();
        assert_eq!(state.amplitudes().len(), 64);
        for amp in state.amplitudes() {
            assert!((amp.re - 0.125).abs() < 1e-15 && amp.im == 0.0);
        }
        assert!((state.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn initial_state_marked_probability_is_one_over_n() {
        for eps in EPS_GRID {
            for with_ancilla in [false, true] {
                let state = WalkerState::initial(eps, 5, with_ancilla).unwrap();
                assert!((state.marked_probability(3) - 1.0 / 32.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn initial_ancilla_state_lives_on_slice_one() {
        let state = WalkerState::initial(1.0, 4, true).unwrap();
        let half = state.amplitudes().len() / 2;
        for amp in &state.amplitudes()[..half] {
            assert_eq!(*amp, Complex64::new(0.0, 0.0));
        }
        for amp in &state.amplitudes()[half..] {
            assert!((amp.re - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn grover_fixes_uniform_coin_and_flips_first_basis_state() {
        let g = CoinSpec::grover();
        let mut state = WalkerState::initial(1.0, 2, false).unwrap();
        state.apply_coin(&g);
        for amp in state.amplitudes() {
            assert!((amp.re - 0.25).abs() < 1e-14);
        }
        // |0>|k> maps to the first Grover column.
        let mut state = WalkerState::initial(1.0, 2, false).unwrap();
        state.amplitudes.fill(Complex64::new(0.0, 0.0));
        state.amplitudes[2 * NUM_PORTS] = Complex64::new(1.0, 0.0);
        state.apply_coin(&g);
        let block: Vec<f64> =
            state.amplitudes[2 * NUM_PORTS..3 * NUM_PORTS].iter().map(|a| a.re).collect();
        assert_eq!(block, vec![-0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn coin_fixes_its_weight_vector() {
        for eps in EPS_GRID {
            let coin = epsilon_coin(eps).unwrap();
            let mut state = WalkerState::initial(eps, 3, false).unwrap();
            let before = state.amplitudes().to_vec();
            state.apply_coin(&coin);
            for (a, b) in state.amplitudes().iter().zip(before.iter()) {
                assert!((a - b).norm() < 1e-14, "C(eps) v != v at eps={eps}");
            }
        }
    }

    #[test]
    fn shift_is_an_exact_involution() {
        let topo = NetworkTopology::new(4, EdgeMode::Paired).unwrap();
        let mut state = WalkerState::initial(0.75, 4, false).unwrap();
        // Perturb into a generic rational state to rule out symmetry accidents.
        for (i, amp) in state.amplitudes.iter_mut().enumerate() {
            *amp += Complex64::new(0.01 * (i as f64), -0.003 * (i as f64));
        }
        let before = state.amplitudes().to_vec();
        state.apply_shift(&topo);
        state.apply_shift(&topo);
        for (a, b) in state.amplitudes().iter().zip(before.iter()) {
            assert_eq!(*a, *b, "S^2 must restore amplitudes bit-exactly");
        }
    }

    #[test]
    fn shift_moves_single_amplitude() {
        let topo = NetworkTopology::new(4, EdgeMode::Paired).unwrap();
        let mut state = WalkerState::initial(1.0, 4, false).unwrap();
        state.amplitudes.fill(Complex64::new(0.0, 0.0));
        state.amplitudes[3 * NUM_PORTS] = Complex64::new(1.0, 0.0); // |0>|3>
        state.apply_shift(&topo);
        assert_eq!(state.amplitude(0, 1, 1), Complex64::new(1.0, 0.0));
        // |2>|N-1> -> |3>|0>
        state.amplitudes.fill(Complex64::new(0.0, 0.0));
        state.amplitudes[15 * NUM_PORTS + 2] = Complex64::new(1.0, 0.0);
        state.apply_shift(&topo);
        assert_eq!(state.amplitude(0, 3, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn marked_coin_branches() {
        let coin = CoinSpec::grover();
        // Supported only on k0: pure negation.
        let mut state = WalkerState::initial(1.0, 3, false).unwrap();
        state.amplitudes.fill(Complex64::new(0.0, 0.0));
        state.amplitudes[3 * NUM_PORTS + 1] = Complex64::new(0.6, -0.8);
        state.apply_marked_coin(&coin, 3);
        assert!((state.amplitude(0, 1, 3) - Complex64::new(-0.6, 0.8)).norm() < 1e-14);
        // Supported away from k0: identical to the plain coin.
        let mut a = WalkerState::initial(1.0, 3, false).unwrap();
        a.amplitudes.fill(Complex64::new(0.0, 0.0));
        a.amplitudes[5 * NUM_PORTS] = Complex64::new(1.0, 0.0);
        let mut b = a.clone();
        a.apply_marked_coin(&coin, 3);
        b.apply_coin(&coin);
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes().iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn reflection_negates_axis_and_fixes_orthogonal() {
        let mut state = WalkerState::initial(1.0, 3, false).unwrap();
        state.amplitudes.fill(Complex64::new(0.0, 0.0));
        let base = 3 * NUM_PORTS;
        for a in 0..4 {
            state.amplitudes[base + a] = Complex64::new(0.5, 0.0); // |u_C>|3>
        }
        state.apply_reflection(1.0, 3).unwrap();
        for a in 0..4 {
            assert!((state.amplitudes[base + a].re + 0.5).abs() < 1e-14);
        }
        // Orthogonal coin vector at k0 is untouched.
        state.amplitudes.fill(Complex64::new(0.0, 0.0));
        state.amplitudes[base] = Complex64::new(0.5, 0.0);
        state.amplitudes[base + 1] = Complex64::new(-0.5, 0.0);
        let before = state.amplitudes().to_vec();
        state.apply_reflection(1.0, 3).unwrap();
        for (x, y) in state.amplitudes().iter().zip(before.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn unmarked_walk_fixes_biased_initial_state() {
        for mode in [EdgeMode::Paired, EdgeMode::Chain] {
            for eps in [0.25, 0.75, 1.0, 1.6] {
                let topo = NetworkTopology::new(5, mode).unwrap();
                let coin = epsilon_coin(eps).unwrap();
                let mut state = WalkerState::initial(eps, 5, false).unwrap();
                let reference = state.amplitudes().to_vec();
                for _ in 0..1000 {
                    state.apply_coin(&coin);
                    state.apply_shift(&topo);
                }
                let max_dev = state
                    .amplitudes()
                    .iter()
                    .zip(reference.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(max_dev < 1e-12, "stationarity broken: eps={eps} {mode} dev={max_dev}");
            }
        }
    }

    #[test]
    fn tulsi_step_reduces_to_search_step_at_cos_delta_one() {
        let topo = NetworkTopology::new(4, EdgeMode::Paired).unwrap();
        let coin = CoinSpec::grover();
        let mut with_ancilla = WalkerState::initial(1.0, 4, true).unwrap();
        let mut plain = WalkerState::initial(1.0, 4, false).unwrap();
        for _ in 0..25 {
            with_ancilla.step_tulsi(&coin, &topo, 3, 1.0);
            plain.apply_reflection(1.0, 3).unwrap();
            plain.apply_coin(&coin);
            plain.apply_shift(&topo);
        }
        let half = with_ancilla.amplitudes().len() / 2;
        for amp in &with_ancilla.amplitudes()[..half] {
            assert!(amp.norm() < 1e-13, "idle ancilla slice must stay empty");
        }
        for (a, b) in with_ancilla.amplitudes()[half..].iter().zip(plain.amplitudes().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn steppers_preserve_norm() {
        let topo = NetworkTopology::new(5, EdgeMode::Chain).unwrap();
        let coin = epsilon_coin(0.75).unwrap();
        let mut state = WalkerState::initial(0.75, 5, false).unwrap();
        for _ in 0..200 {
            state.step_search(&coin, &topo, 3);
        }
        assert!((state.norm() - 1.0).abs() < 1e-13);
        assert_eq!(state.time(), 200);

        let mut state = WalkerState::initial(1.0, 5, true).unwrap();
        let grover = CoinSpec::grover();
        let cos_delta = TulsiParams::default().resolve_cos_delta(5);
        for _ in 0..200 {
            state.step_tulsi(&grover, &topo, 3, cos_delta);
        }
        assert!((state.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn resolve_cos_delta_rules() {
        let p = TulsiParams::default();
        assert!((p.resolve_cos_delta(8) - 0.125).abs() < 1e-15);
        let p = TulsiParams::with_scale(CosDeltaRule::InvSqrtLog, 1.0).unwrap();
        assert!((p.resolve_cos_delta(4) - 0.5).abs() < 1e-15);
        // Scales above log2 N clamp to 1.
        let p = TulsiParams::with_scale(CosDeltaRule::InvLog, 10.0).unwrap();
        assert_eq!(p.resolve_cos_delta(4), 1.0);
        let p = TulsiParams::explicit_cos(0.5).unwrap();
        assert!((p.resolve_cos_delta(12) - 0.5).abs() < 1e-15);
    }
}
