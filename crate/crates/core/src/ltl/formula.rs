use std::fmt;

/// An atomic proposition, one of the 26 lowercase letters `a`..`z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

impl Var {
    pub const COUNT: usize = 26;

    pub fn new(index: u8) -> Option<Var> {
        (usize::from(index) < Self::COUNT).then_some(Var(index))
    }

    pub fn from_char(c: char) -> Option<Var> {
        c.is_ascii_lowercase().then(|| Var(c as u8 - b'a'))
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn as_char(self) -> char {
        char::from(b'a' + self.0)
    }

    /// Single-bit mask of this variable inside a 26-bit variable set.
    pub fn bit(self) -> u32 {
        1 << self.0
    }

    /// All variables `< count`, i.e. the pool `a`, `b`, ... of the given size.
    pub fn pool(count: usize) -> impl Iterator<Item = Var> {
        (0..count.min(Self::COUNT) as u8).map(Var)
    }

    /// Iterates the variables whose bits are set in `mask`.
    pub fn iter_mask(mask: u32) -> impl Iterator<Item = Var> {
        (0..Self::COUNT as u8).filter(move |i| mask & (1 << i) != 0).map(Var)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Not,
    Globally,
    Finally,
    Next,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Not, UnaryOp::Globally, UnaryOp::Finally, UnaryOp::Next];

    pub fn symbol(self) -> char {
        match self {
            UnaryOp::Not => '!',
            UnaryOp::Globally => 'G',
            UnaryOp::Finally => 'F',
            UnaryOp::Next => 'X',
        }
    }

    pub fn from_symbol(c: char) -> Option<UnaryOp> {
        UnaryOp::ALL.into_iter().find(|op| op.symbol() == c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Until,
    Release,
    WeakUntil,
    StrongRelease,
    And,
    Or,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 6] =
        [BinaryOp::Until, BinaryOp::Release, BinaryOp::WeakUntil, BinaryOp::StrongRelease, BinaryOp::And, BinaryOp::Or];

    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Until => 'U',
            BinaryOp::Release => 'R',
            BinaryOp::WeakUntil => 'W',
            BinaryOp::StrongRelease => 'M',
            BinaryOp::And => '&',
            BinaryOp::Or => '|',
        }
    }

    pub fn from_symbol(c: char) -> Option<BinaryOp> {
        BinaryOp::ALL.into_iter().find(|op| op.symbol() == c)
    }

    /// Binding strength: temporal operators bind tighter than `&` and `|`.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::And | BinaryOp::Or => 1,
            _ => 2,
        }
    }
}

/// LTL abstract syntax tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Var(Var),
    Unary(UnaryOp, Box<Formula>),
    Binary(BinaryOp, Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Panics if `c` is not a lowercase ASCII letter.
    pub fn var(c: char) -> Formula {
        Formula::Var(Var::from_char(c).expect("variable must be in a..z"))
    }

    pub fn unary(op: UnaryOp, f: Formula) -> Formula {
        Formula::Unary(op, Box::new(f))
    }

    pub fn binary(op: BinaryOp, l: Formula, r: Formula) -> Formula {
        Formula::Binary(op, Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::unary(UnaryOp::Not, f)
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::unary(UnaryOp::Globally, f)
    }

    pub fn finally(f: Formula) -> Formula {
        Formula::unary(UnaryOp::Finally, f)
    }

    pub fn next(f: Formula) -> Formula {
        Formula::unary(UnaryOp::Next, f)
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::binary(BinaryOp::Until, l, r)
    }

    pub fn release(l: Formula, r: Formula) -> Formula {
        Formula::binary(BinaryOp::Release, l, r)
    }

    pub fn weak_until(l: Formula, r: Formula) -> Formula {
        Formula::binary(BinaryOp::WeakUntil, l, r)
    }

    pub fn strong_release(l: Formula, r: Formula) -> Formula {
        Formula::binary(BinaryOp::StrongRelease, l, r)
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::binary(BinaryOp::And, l, r)
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::binary(BinaryOp::Or, l, r)
    }

    /// Number of AST nodes. `a U !b` has length 4.
    pub fn len(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => 1,
            Formula::Unary(_, f) => 1 + f.len(),
            Formula::Binary(_, l, r) => 1 + l.len() + r.len(),
        }
    }

    /// Bit mask of the variables occurring in the formula.
    pub fn vars(&self) -> u32 {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Var(v) => v.bit(),
            Formula::Unary(_, f) => f.vars(),
            Formula::Binary(_, l, r) => l.vars() | r.vars(),
        }
    }

    /// True when `!` only ever sits directly above a variable.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => true,
            Formula::Unary(UnaryOp::Not, f) => matches!(**f, Formula::Var(_)),
            Formula::Unary(_, f) => f.is_nnf(),
            Formula::Binary(_, l, r) => l.is_nnf() && r.is_nnf(),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Number of AST nodes of `f`; the formula length used in dataset statistics.
pub fn formula_length(f: &Formula) -> usize {
    f.len()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "1"),
            Formula::False => write!(f, "N"),
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Unary(op, inner) => {
                match op {
                    UnaryOp::Not => write!(f, "!")?,
                    _ => write!(f, "{} ", op.symbol())?,
                }
                inner.fmt_operand(f, matches!(**inner, Formula::Binary(..)))
            }
            Formula::Binary(op, l, r) => {
                // Binary operators are right-associative within a precedence level.
                let level = op.precedence();
                let left_parens = matches!(**l, Formula::Binary(lop, ..) if lop.precedence() <= level);
                let right_parens = matches!(**r, Formula::Binary(rop, ..) if rop.precedence() < level);
                l.fmt_operand(f, left_parens)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_operand(f, right_parens)
            }
        }
    }
}
