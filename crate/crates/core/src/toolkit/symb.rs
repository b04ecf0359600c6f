//! Symbolic functions of time used for demand curves.

use super::ToolkitError;

#[derive(Debug, Clone, PartialEq)]
pub enum SymbFunction {
    /// `slope * t + intercept`
    Linear { slope: f64, intercept: f64 },
    /// `scale * exp(rate * t) + offset`
    Exponential { scale: f64, rate: f64, offset: f64 },
    /// Segments sorted by start time. Each covers `[start, next start)` and
    /// is evaluated at the absolute time `t`. Zero before the first segment.
    Piecewise(Vec<(f64, SymbFunction)>),
}

impl SymbFunction {
    pub fn linear(slope: f64, intercept: f64) -> Self {
        SymbFunction::Linear { slope, intercept }
    }

    pub fn exponential(scale: f64, rate: f64, offset: f64) -> Self {
        SymbFunction::Exponential { scale, rate, offset }
    }

    pub fn piecewise(mut pieces: Vec<(f64, SymbFunction)>) -> Result<Self, ToolkitError> {
        if pieces.is_empty() {
            return Err(ToolkitError::BadFunction("piecewise function with no pieces".into()));
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pieces.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ToolkitError::BadFunction("overlapping piecewise segments".into()));
        }
        Ok(SymbFunction::Piecewise(pieces))
    }

    /// Build from a type name and whitespace-separated parameters, e.g.
    /// `("linear", "0.1 0")` or `("exponential", "1 0.01 0")`.
    pub fn from_params(kind: &str, params: &str) -> Result<Self, ToolkitError> {
        let nums: Vec<f64> = params
            .split_whitespace()
            .map(|p| p.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| ToolkitError::BadFunction(format!("{kind} params '{params}': {e}")))?;
        let need = |n: usize| {
            if nums.len() == n {
                Ok(())
            } else {
                Err(ToolkitError::BadFunction(format!(
                    "{kind} needs {n} parameters, got {}",
                    nums.len()
                )))
            }
        };
        match kind {
            "linear" => {
                need(2)?;
                Ok(Self::linear(nums[0], nums[1]))
            }
            "exp" | "exponential" => {
                need(3)?;
                Ok(Self::exponential(nums[0], nums[1], nums[2]))
            }
            other => Err(ToolkitError::BadFunction(format!("unknown function type '{other}'"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SymbFunction::Linear { slope, intercept } => slope * t + intercept,
            SymbFunction::Exponential { scale, rate, offset } => scale * (rate * t).exp() + offset,
            SymbFunction::Piecewise(pieces) => {
                let idx = pieces.partition_point(|(start, _)| *start <= t);
                if idx == 0 {
                    0.0
                } else {
                    pieces[idx - 1].1.eval(t)
                }
            }
        }
    }
}
