//! Truncated Taylor arithmetic along a ray `x + t d`, `t -> 0+`.
//!
//! A [`Jet`] holds `(c0, c1, c2)` with `e(x + t d) = c0 + c1 t + c2 t^2 + o(t^2)`.
//! `abs`, `min` and `max` are expanded one-sidedly, so `c1` is always the
//! one-sided directional derivative. When one of them is evaluated exactly
//! at its kink the tracker records the node; `c2` is then not trusted as an
//! analytic value by callers.

use crate::expr::{is_integer, real_pow, BinaryOp, EvalError, Node, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Jet {
    fn constant(c0: f64) -> Jet {
        Jet {
            c0,
            c1: 0.0,
            c2: 0.0,
        }
    }

    fn neg(self) -> Jet {
        Jet {
            c0: -self.c0,
            c1: -self.c1,
            c2: -self.c2,
        }
    }

    fn add(self, o: Jet) -> Jet {
        Jet {
            c0: self.c0 + o.c0,
            c1: self.c1 + o.c1,
            c2: self.c2 + o.c2,
        }
    }

    fn sub(self, o: Jet) -> Jet {
        self.add(o.neg())
    }

    fn mul(self, o: Jet) -> Jet {
        Jet {
            c0: self.c0 * o.c0,
            c1: self.c0 * o.c1 + self.c1 * o.c0,
            c2: self.c0 * o.c2 + self.c1 * o.c1 + self.c2 * o.c0,
        }
    }

    fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite() && self.c2.is_finite()
    }

    /// Compares the expansions for small `t > 0`.
    fn less_than(&self, o: &Jet) -> bool {
        (self.c0, self.c1, self.c2) < (o.c0, o.c1, o.c2)
    }
}

/// First kink met during a jet evaluation, if any.
#[derive(Debug, Default)]
pub(crate) struct KinkTracker {
    pub first: Option<String>,
    pub count: usize,
}

impl KinkTracker {
    fn hit(&mut self, node: &Node, names: &[String]) {
        if self.first.is_none() {
            self.first = Some(node.render(names));
        }
        self.count += 1;
    }
}

pub(crate) fn eval_jet(
    node: &Node,
    x: &[f64],
    d: &[f64],
    names: &[String],
    kinks: &mut KinkTracker,
) -> Result<Jet, EvalError> {
    let jet = match node {
        Node::Const(c) => Jet::constant(*c),
        Node::Var(i) => Jet {
            c0: x[*i],
            c1: d[*i],
            c2: 0.0,
        },
        Node::Unary(op, a) => {
            let a = eval_jet(a, x, d, names, kinks)?;
            unary(*op, a, node, names, kinks)?
        }
        Node::Binary(op, a, b) => {
            let a = eval_jet(a, x, d, names, kinks)?;
            let b = eval_jet(b, x, d, names, kinks)?;
            binary(*op, a, b, node, names, kinks)?
        }
    };
    if jet.is_finite() {
        Ok(jet)
    } else {
        Err(EvalError::domain(node, names, "non-finite result"))
    }
}

fn unary(
    op: UnaryOp,
    a: Jet,
    node: &Node,
    names: &[String],
    kinks: &mut KinkTracker,
) -> Result<Jet, EvalError> {
    let Jet { c0, c1, c2 } = a;
    Ok(match op {
        UnaryOp::Neg => a.neg(),
        UnaryOp::Abs => {
            if c0 > 0.0 {
                a
            } else if c0 < 0.0 {
                a.neg()
            } else {
                kinks.hit(node, names);
                let positive = if c1 != 0.0 { c1 > 0.0 } else { c2 >= 0.0 };
                if positive {
                    a
                } else {
                    a.neg()
                }
            }
        }
        UnaryOp::Sqrt => {
            if c0 < 0.0 {
                return Err(EvalError::domain(node, names, "square root of a negative number"));
            }
            if c0 == 0.0 {
                return Err(EvalError::NonDifferentiable {
                    node: node.render(names),
                });
            }
            let s0 = c0.sqrt();
            let s1 = c1 / (2.0 * s0);
            Jet {
                c0: s0,
                c1: s1,
                c2: (c2 - s1 * s1) / (2.0 * s0),
            }
        }
        UnaryOp::Exp => {
            let e0 = c0.exp();
            Jet {
                c0: e0,
                c1: e0 * c1,
                c2: e0 * (c2 + 0.5 * c1 * c1),
            }
        }
        UnaryOp::Log => {
            if c0 <= 0.0 {
                return Err(EvalError::domain(node, names, "logarithm of a non-positive number"));
            }
            Jet {
                c0: c0.ln(),
                c1: c1 / c0,
                c2: c2 / c0 - 0.5 * (c1 / c0) * (c1 / c0),
            }
        }
        UnaryOp::Sin => {
            let (s, c) = c0.sin_cos();
            Jet {
                c0: s,
                c1: c * c1,
                c2: c * c2 - 0.5 * s * c1 * c1,
            }
        }
        UnaryOp::Cos => {
            let (s, c) = c0.sin_cos();
            Jet {
                c0: c,
                c1: -s * c1,
                c2: -s * c2 - 0.5 * c * c1 * c1,
            }
        }
    })
}

fn binary(
    op: BinaryOp,
    a: Jet,
    b: Jet,
    node: &Node,
    names: &[String],
    kinks: &mut KinkTracker,
) -> Result<Jet, EvalError> {
    Ok(match op {
        BinaryOp::Add => a.add(b),
        BinaryOp::Sub => a.sub(b),
        BinaryOp::Mul => a.mul(b),
        BinaryOp::Div => {
            if b.c0 == 0.0 {
                return Err(EvalError::domain(node, names, "division by zero"));
            }
            let q0 = a.c0 / b.c0;
            let q1 = (a.c1 - q0 * b.c1) / b.c0;
            let q2 = (a.c2 - q0 * b.c2 - q1 * b.c1) / b.c0;
            Jet {
                c0: q0,
                c1: q1,
                c2: q2,
            }
        }
        BinaryOp::Pow => pow(a, b, node, names)?,
        BinaryOp::Min | BinaryOp::Max => {
            if a.c0 == b.c0 {
                kinks.hit(node, names);
            }
            let a_smaller = a.less_than(&b);
            match (op, a_smaller) {
                (BinaryOp::Min, true) | (BinaryOp::Max, false) => a,
                _ => b,
            }
        }
    })
}

fn pow(a: Jet, b: Jet, node: &Node, names: &[String]) -> Result<Jet, EvalError> {
    let constant_exponent = b.c1 == 0.0 && b.c2 == 0.0;
    if constant_exponent {
        let p = b.c0;
        let p0 = real_pow(a.c0, p).map_err(|r| EvalError::domain(node, names, r))?;
        if p == 0.0 {
            return Ok(Jet::constant(p0));
        }
        if a.c0 == 0.0 && !(is_integer(p) && p >= 1.0) {
            return Err(EvalError::NonDifferentiable {
                node: node.render(names),
            });
        }
        // power-rule terms; a0^(p-1) and a0^(p-2) only appear with nonzero weight
        let d1 = p * real_pow(a.c0, p - 1.0).map_err(|r| EvalError::domain(node, names, r))?;
        let d2 = if p == 1.0 {
            0.0
        } else {
            0.5 * p * (p - 1.0) * real_pow(a.c0, p - 2.0).map_err(|r| EvalError::domain(node, names, r))?
        };
        return Ok(Jet {
            c0: p0,
            c1: d1 * a.c1,
            c2: d1 * a.c2 + d2 * a.c1 * a.c1,
        });
    }
    if a.c0 <= 0.0 {
        return Err(EvalError::domain(
            node,
            names,
            "power with a varying exponent needs a positive base",
        ));
    }
    // a^b = exp(b log a)
    let la = Jet {
        c0: a.c0.ln(),
        c1: a.c1 / a.c0,
        c2: a.c2 / a.c0 - 0.5 * (a.c1 / a.c0) * (a.c1 / a.c0),
    };
    let z = b.mul(la);
    let e0 = z.c0.exp();
    Ok(Jet {
        c0: e0,
        c1: e0 * z.c1,
        c2: e0 * (z.c2 + 0.5 * z.c1 * z.c1),
    })
}
