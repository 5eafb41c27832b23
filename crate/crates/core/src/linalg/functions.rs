use std::fmt;

/// A real function applied to eigenvalues. `value` returns `None` outside the domain.
pub trait ScalarFunction: Send + Sync {
    fn name(&self) -> String;
    fn value(&self, x: f64) -> Option<f64>;
}

/// Open or half-open interval used to describe where a function is evaluable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// The closed set of scalar functions with known derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elementary {
    Identity,
    Square,
    Exp,
    Log,
    /// `x^p`; defined at zero only for `p > 0`, and for negative `x` only when `p` is an integer.
    Power(f64),
    /// `x log x`, continuously extended by `0` at `x = 0`.
    XLogX,
    NegLog,
    /// `(x - 1)^2`.
    SquaredDeviation,
}

fn is_integer(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() < 1e15
}

impl Elementary {
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match *self {
            Elementary::Identity => Some(1.0),
            Elementary::Square => Some(2.0 * x),
            Elementary::Exp => Some(x.exp()),
            Elementary::Log => (x > 0.0).then(|| 1.0 / x),
            Elementary::NegLog => (x > 0.0).then(|| -1.0 / x),
            Elementary::XLogX => (x > 0.0).then(|| x.ln() + 1.0),
            Elementary::SquaredDeviation => Some(2.0 * (x - 1.0)),
            Elementary::Power(p) => {
                if x > 0.0 || (x < 0.0 && is_integer(p)) {
                    Some(p * x.powf(p - 1.0))
                } else if x == 0.0 {
                    if p == 1.0 {
                        Some(1.0)
                    } else if p > 1.0 {
                        Some(0.0)
                    } else {
                        None
                    }
                } else {
                    None
                }
            }
        }
    }

    /// Open interval on which both value and derivative are defined.
    pub fn domain(&self) -> Interval {
        match *self {
            Elementary::Identity | Elementary::Square | Elementary::Exp | Elementary::SquaredDeviation => {
                Interval::REAL
            }
            Elementary::Power(p) if is_integer(p) && p >= 0.0 => Interval::REAL,
            _ => Interval::POSITIVE,
        }
    }
}

impl ScalarFunction for Elementary {
    fn name(&self) -> String {
        self.to_string()
    }

    fn value(&self, x: f64) -> Option<f64> {
        let v = match *self {
            Elementary::Identity => x,
            Elementary::Square => x * x,
            Elementary::Exp => x.exp(),
            Elementary::Log => {
                if x > 0.0 {
                    x.ln()
                } else {
                    return None;
                }
            }
            Elementary::NegLog => {
                if x > 0.0 {
                    -x.ln()
                } else {
                    return None;
                }
            }
            Elementary::XLogX => {
                if x > 0.0 {
                    x * x.ln()
                } else if x == 0.0 {
                    0.0
                } else {
                    return None;
                }
            }
            Elementary::SquaredDeviation => (x - 1.0) * (x - 1.0),
            Elementary::Power(p) => {
                if x > 0.0 || (x < 0.0 && is_integer(p)) {
                    x.powf(p)
                } else if x == 0.0 && p > 0.0 {
                    0.0
                } else if x == 0.0 && p == 0.0 {
                    1.0
                } else {
                    return None;
                }
            }
        };
        v.is_finite().then_some(v)
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elementary::Identity => write!(f, "x"),
            Elementary::Square => write!(f, "x^2"),
            Elementary::Exp => write!(f, "exp"),
            Elementary::Log => write!(f, "log"),
            Elementary::Power(p) => write!(f, "x^{p}"),
            Elementary::XLogX => write!(f, "x log x"),
            Elementary::NegLog => write!(f, "-log"),
            Elementary::SquaredDeviation => write!(f, "(x-1)^2"),
        }
    }
}
