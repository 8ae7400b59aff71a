use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest admissible width / slope after a training step.
pub(crate) const PARAM_FLOOR: f64 = 1e-6;

/// A parameterised membership function.
///
/// Every parameter is in input units except the generalized-bell slope `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TermRepr", into = "TermRepr")]
pub enum MembershipFunction {
    Gaussian {
        center: f64,
        sigma: f64,
    },
    /// `1 / (1 + |(x − c)/a|^(2b))`
    Bell {
        a: f64,
        b: f64,
        c: f64,
    },
    /// Hat with feet at `a` and `c` and peak at `b`.
    Triangular {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl MembershipFunction {
    pub fn gaussian(center: f64, sigma: f64) -> Result<Self> {
        Self::Gaussian { center, sigma }.validated()
    }

    pub fn bell(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::Bell { a, b, c }.validated()
    }

    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::Triangular { a, b, c }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.params().iter().all(|p| p.is_finite()) {
            return Err(Error::InvalidMembership(format!("non-finite parameter in {self:?}")));
        }
        match *self {
            Self::Gaussian { sigma, .. } if sigma <= 0.0 => Err(Error::InvalidMembership(format!(
                "gaussian sigma must be > 0, got {sigma}"
            ))),
            Self::Bell { a, b, .. } if a <= 0.0 || b <= 0.0 => Err(Error::InvalidMembership(format!(
                "bell width and slope must be > 0, got a={a}, b={b}"
            ))),
            Self::Triangular { a, b, c } if !(a <= b && b <= c && a < c) => Err(Error::InvalidMembership(format!(
                "triangular needs a <= b <= c and a < c, got ({a}, {b}, {c})"
            ))),
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Bell { .. } => "gbell",
            Self::Triangular { .. } => "triangular",
        }
    }

    /// Degree of membership of `x`, always in `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_grad(x).0
    }

    pub fn param_count(&self) -> usize {
        match self {
            Self::Gaussian { .. } => 2,
            Self::Bell { .. } | Self::Triangular { .. } => 3,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Gaussian { center, sigma } => vec![center, sigma],
            Self::Bell { a, b, c } | Self::Triangular { a, b, c } => vec![a, b, c],
        }
    }

    /// Same family with new parameters, unchecked.
    pub(crate) fn with_params(&self, p: &[f64]) -> Self {
        match self {
            Self::Gaussian { .. } => Self::Gaussian {
                center: p[0],
                sigma: p[1],
            },
            Self::Bell { .. } => Self::Bell {
                a: p[0],
                b: p[1],
                c: p[2],
            },
            Self::Triangular { .. } => Self::Triangular {
                a: p[0],
                b: p[1],
                c: p[2],
            },
        }
    }

    /// Pulls parameters back inside the family's invariants after a
    /// gradient or swarm step.
    pub(crate) fn repaired(&self) -> Self {
        match *self {
            Self::Gaussian { center, sigma } => Self::Gaussian {
                center,
                sigma: sigma.max(PARAM_FLOOR),
            },
            Self::Bell { a, b, c } => Self::Bell {
                a: a.max(PARAM_FLOOR),
                b: b.max(PARAM_FLOOR),
                c,
            },
            Self::Triangular { a, b, c } => {
                let mut v = [a, b, c];
                v.sort_by(f64::total_cmp);
                if v[2] - v[0] < PARAM_FLOOR {
                    v[0] -= PARAM_FLOOR;
                    v[2] += PARAM_FLOOR;
                }
                Self::Triangular {
                    a: v[0],
                    b: v[1],
                    c: v[2],
                }
            }
        }
    }

    /// Degree and its partial derivatives with respect to [`Self::params`].
    ///
    /// Triangular kinks use the derivative of the piece active immediately
    /// to the right of `x`.
    pub fn eval_with_grad(&self, x: f64) -> (f64, [f64; 3]) {
        match *self {
            Self::Gaussian { center, sigma } => {
                let d = x - center;
                let s2 = sigma * sigma;
                let mu = (-(d * d) / (2.0 * s2)).exp();
                (mu, [mu * d / s2, mu * d * d / (s2 * sigma), 0.0])
            }
            Self::Bell { a, b, c } => {
                let u = (x - c) / a;
                let au = u.abs();
                if au == 0.0 {
                    return (1.0, [0.0; 3]);
                }
                let t = au.powf(2.0 * b);
                let mu = 1.0 / (1.0 + t);
                let dmu_dt = -mu * mu;
                let dt_da = -2.0 * b * t / a;
                let dt_db = 2.0 * t * au.ln();
                let dt_dc = -2.0 * b * t / (u * a);
                (mu, [dmu_dt * dt_da, dmu_dt * dt_db, dmu_dt * dt_dc])
            }
            Self::Triangular { a, b, c } => triangular(a, b, c, x),
        }
    }
}

fn triangular(a: f64, b: f64, c: f64, x: f64) -> (f64, [f64; 3]) {
    if x >= a && x < b {
        let w = b - a;
        let mu = (x - a) / w;
        (mu, [(x - b) / (w * w), -(x - a) / (w * w), 0.0])
    } else if x >= b && x < c {
        let w = c - b;
        let mu = (c - x) / w;
        (mu, [0.0, (c - x) / (w * w), (x - b) / (w * w)])
    } else if x == b {
        // b == c: the falling piece is empty, x sits on the peak.
        (1.0, [0.0; 3])
    } else {
        (0.0, [0.0; 3])
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    kind: String,
    params: Vec<f64>,
}

impl From<MembershipFunction> for TermRepr {
    fn from(mf: MembershipFunction) -> Self {
        Self {
            kind: mf.kind().to_string(),
            params: mf.params(),
        }
    }
}

impl TryFrom<TermRepr> for MembershipFunction {
    type Error = Error;

    fn try_from(r: TermRepr) -> Result<Self> {
        let want = match r.kind.as_str() {
            "gaussian" => 2,
            "gbell" | "triangular" => 3,
            other => return Err(Error::InvalidMembership(format!("unknown kind `{other}`"))),
        };
        if r.params.len() != want {
            return Err(Error::InvalidMembership(format!(
                "{} takes {want} parameters, got {}",
                r.kind,
                r.params.len()
            )));
        }
        let p = &r.params;
        let mf = match r.kind.as_str() {
            "gaussian" => Self::Gaussian {
                center: p[0],
                sigma: p[1],
            },
            "gbell" => Self::Bell {
                a: p[0],
                b: p[1],
                c: p[2],
            },
            _ => Self::Triangular {
                a: p[0],
                b: p[1],
                c: p[2],
            },
        };
        mf.validated()
    }
}
