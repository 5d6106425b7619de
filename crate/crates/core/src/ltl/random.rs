use rand::Rng;
use thiserror::Error;

use super::formula::{BinaryOp, Formula, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenConfigError {
    #[error("expression-tree size must be at least 1")]
    ZeroSize,
    #[error("variable pool size must be in 1..=26, got {0}")]
    VarPool(usize),
    #[error("weights must be finite and nonnegative")]
    NegativeWeight,
    #[error("at least one of var/true/false must have positive weight")]
    NoLeaves,
    #[error("size > 1 needs at least one operator with positive weight")]
    NoOperators,
}

/// Selection weights for leaves and operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OpWeights {
    pub var: f64,
    pub r#true: f64,
    pub r#false: f64,
    pub unary: [f64; 4],
    pub binary: [f64; 6],
}

impl Default for OpWeights {
    fn default() -> Self {
        OpWeights { var: 3.0, r#true: 1.0, r#false: 1.0, unary: [1.0; 4], binary: [1.0; 6] }
    }
}

impl OpWeights {
    pub fn unary_weight(&self, op: UnaryOp) -> f64 {
        self.unary[op as usize]
    }

    pub fn binary_weight(&self, op: BinaryOp) -> f64 {
        self.binary[op as usize]
    }

    pub fn set_unary(&mut self, op: UnaryOp, w: f64) {
        self.unary[op as usize] = w;
    }

    pub fn set_binary(&mut self, op: BinaryOp, w: f64) {
        self.binary[op as usize] = w;
    }

    fn all(&self) -> impl Iterator<Item = f64> + '_ {
        [self.var, self.r#true, self.r#false].into_iter().chain(self.unary).chain(self.binary)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Target number of AST nodes.
    pub size: usize,
    /// Variables are drawn from the first `num_vars` letters.
    pub num_vars: usize,
    pub weights: OpWeights,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { size: 15, num_vars: 4, weights: OpWeights::default(), seed: 0 }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenConfigError> {
        if self.size == 0 {
            return Err(GenConfigError::ZeroSize);
        }
        if !(1..=Var::COUNT).contains(&self.num_vars) {
            return Err(GenConfigError::VarPool(self.num_vars));
        }
        if self.weights.all().any(|w| !(w.is_finite() && w >= 0.0)) {
            return Err(GenConfigError::NegativeWeight);
        }
        let w = &self.weights;
        if w.var + w.r#true + w.r#false <= 0.0 {
            return Err(GenConfigError::NoLeaves);
        }
        if self.size > 1 && w.unary.iter().chain(&w.binary).sum::<f64>() <= 0.0 {
            return Err(GenConfigError::NoOperators);
        }
        Ok(())
    }

    pub fn with_size(&self, size: usize) -> GenConfig {
        GenConfig { size, ..self.clone() }
    }
}

enum Choice {
    Unary(UnaryOp),
    Binary(BinaryOp),
}

fn pick<T: Copy, R: Rng + ?Sized>(rng: &mut R, options: &[(T, f64)]) -> Option<T> {
    let total: f64 = options.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.random::<f64>() * total;
    for &(item, w) in options {
        if x < w {
            return Some(item);
        }
        x -= w;
    }
    options.iter().rev().find(|(_, w)| *w > 0.0).map(|(item, _)| *item)
}

/// Draws a random formula by recursive size splitting: pick an operator by
/// weight, then split the remaining node budget uniformly between children.
///
/// The result has exactly `cfg.size` nodes except when the weights make that
/// shape impossible (size 2 with every unary weight zero yields size 3).
/// Panics if `cfg` does not validate.
pub fn random_formula<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Formula {
    cfg.validate().expect("invalid GenConfig");
    generate(cfg, cfg.size, rng)
}

fn generate<R: Rng + ?Sized>(cfg: &GenConfig, size: usize, rng: &mut R) -> Formula {
    let w = &cfg.weights;
    if size <= 1 {
        return match pick(rng, &[(0u8, w.var), (1, w.r#true), (2, w.r#false)]).unwrap() {
            0 => Formula::Var(Var::new(rng.random_range(0..cfg.num_vars) as u8).unwrap()),
            1 => Formula::True,
            _ => Formula::False,
        };
    }
    let mut options: Vec<(Choice, f64)> =
        UnaryOp::ALL.iter().map(|&op| (Choice::Unary(op), w.unary_weight(op))).collect();
    if size >= 3 || w.unary.iter().sum::<f64>() <= 0.0 {
        options.extend(BinaryOp::ALL.iter().map(|&op| (Choice::Binary(op), w.binary_weight(op))));
    }
    let indexed: Vec<(usize, f64)> = options.iter().enumerate().map(|(i, (_, w))| (i, *w)).collect();
    let choice = match pick(rng, &indexed) {
        Some(i) => &options[i].0,
        None => return generate(cfg, 1, rng),
    };
    match *choice {
        Choice::Unary(op) => Formula::unary(op, generate(cfg, size - 1, rng)),
        Choice::Binary(op) => {
            let budget = size.saturating_sub(1).max(2);
            let left = rng.random_range(1..budget);
            Formula::binary(op, generate(cfg, left, rng), generate(cfg, budget - left, rng))
        }
    }
}
