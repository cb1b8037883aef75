use super::samples::PosteriorSamples;
use super::state::{initialize_state, ChainState};
use super::updates::{update_b, update_eta, update_nu, update_r, update_sigma, update_u, update_w};
use super::{ChainConfig, Hyperparameters};
use crate::distributions::RandomStream;
use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::scalar::Real;

/// One block of the Gibbs sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    B,
    U,
    R,
    W,
    Nu,
    Eta,
    Sigma,
}

impl Block {
    /// Sweep order.
    pub const ORDER: [Block; 7] = [Block::B, Block::U, Block::R, Block::W, Block::Nu, Block::Eta, Block::Sigma];

    fn stream_index(self) -> u64 {
        self as u64
    }
}

/// A configurable chain. Blocks may be frozen at their current value, which
/// turns the sampler into one for the remaining conditional posterior.
pub struct Chain<'a, T: Real> {
    data: &'a Dataset<T>,
    hyper: Hyperparameters,
    config: ChainConfig,
    state: ChainState<T>,
    frozen: Vec<Block>,
    root: RandomStream,
}

impl<'a, T: Real> Chain<'a, T> {
    pub fn new(data: &'a Dataset<T>, hyper: Hyperparameters, config: ChainConfig) -> Result<Self> {
        hyper.validate(data.q())?;
        config.validate()?;
        let state = initialize_state(data, &hyper)?;
        let root = RandomStream::new(config.seed, 0);
        Ok(Self { data, hyper, config, state, frozen: Vec::new(), root })
    }

    /// Replaces the starting state.
    pub fn with_state(mut self, state: ChainState<T>) -> Result<Self> {
        state.check_invariants(self.data).map_err(Error::contract)?;
        self.state = state;
        Ok(self)
    }

    pub fn freeze(mut self, block: Block) -> Self {
        if !self.frozen.contains(&block) {
            self.frozen.push(block);
        }
        self
    }

    pub fn state(&self) -> &ChainState<T> {
        &self.state
    }

    /// Runs sweep `iteration` (0-based); its draws come from a stream keyed
    /// by the iteration index.
    pub fn step(&mut self, iteration: usize) -> Result<()> {
        let it = self.root.child(iteration as u64);
        for block in Block::ORDER {
            if self.frozen.contains(&block) {
                continue;
            }
            let s = it.child(block.stream_index());
            let (st, d, h) = (&mut self.state, self.data, &self.hyper);
            let res = match block {
                Block::B => update_b(st, d, h, &s),
                Block::U => update_u(st, d, h, &s),
                Block::R => update_r(st, d, h, &s),
                Block::W => update_w(st, d, h, &s),
                Block::Nu => update_nu(st, d, h, &s),
                Block::Eta => update_eta(st, d, h, &s),
                Block::Sigma => update_sigma(st, d, h, &s),
            };
            res.map_err(|e| Error::Chain { iteration, source: Box::new(e) })?;
        }
        #[cfg(debug_assertions)]
        if let Err(msg) = self.state.check_invariants(self.data) {
            panic!("invariant broken after iteration {iteration}: {msg}");
        }
        Ok(())
    }

    pub fn run(mut self) -> Result<PosteriorSamples<T>> {
        let mut samples = PosteriorSamples::with_capacity(
            self.data.p(),
            self.data.q(),
            self.data.schema().negbinomial_columns(),
            self.config.clone(),
        );
        for t in 0..self.config.iterations {
            self.step(t)?;
            if self.config.keeps(t) {
                samples.push(&self.state.b, &self.state.sigma, &self.state.r);
            }
        }
        Ok(samples)
    }
}

/// Runs the full sampler from the default starting state.
pub fn run_chain<T: Real>(d: &Dataset<T>, h: &Hyperparameters, cfg: &ChainConfig) -> Result<PosteriorSamples<T>> {
    Chain::new(d, h.clone(), cfg.clone())?.run()
}
