use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

/// Byte range into the parsed source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => PREC_ADD,
            BinaryOp::Mul | BinaryOp::Div => PREC_MUL,
            BinaryOp::Pow => PREC_POW,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Pow,
}

impl Function {
    pub const ALL: [Function; 6] = [
        Function::Exp,
        Function::Log,
        Function::Sin,
        Function::Cos,
        Function::Sqrt,
        Function::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Sqrt => "sqrt",
            Function::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Function::Pow => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Number(f64),
    /// Index into the field's coordinate list.
    Variable(usize),
    Neg(Box<Ast>),
    Binary(BinaryOp, Box<Ast>, Box<Ast>),
    Call(Function, Vec<Ast>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub kind: NodeKind,
    pub span: Span,
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Ast {
    pub fn new(kind: NodeKind) -> Ast {
        Ast {
            kind,
            span: Span::default(),
        }
    }

    pub fn number(v: f64) -> Ast {
        Ast::new(NodeKind::Number(v))
    }

    pub fn variable(i: usize) -> Ast {
        Ast::new(NodeKind::Variable(i))
    }

    pub fn binary(op: BinaryOp, lhs: Ast, rhs: Ast) -> Ast {
        Ast::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn negated(a: Ast) -> Ast {
        Ast::new(NodeKind::Neg(Box::new(a)))
    }

    pub fn call(f: Function, args: Vec<Ast>) -> Ast {
        Ast::new(NodeKind::Call(f, args))
    }

    /// True when the tree mentions no coordinate.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            NodeKind::Number(_) => true,
            NodeKind::Variable(_) => false,
            NodeKind::Neg(a) => a.is_constant(),
            NodeKind::Binary(_, a, b) => a.is_constant() && b.is_constant(),
            NodeKind::Call(_, args) => args.iter().all(Ast::is_constant),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        match &self.kind {
            NodeKind::Number(_) => None,
            NodeKind::Variable(i) => Some(*i),
            NodeKind::Neg(a) => a.max_variable(),
            NodeKind::Binary(_, a, b) => a.max_variable().max(b.max_variable()),
            NodeKind::Call(_, args) => args.iter().filter_map(Ast::max_variable).max(),
        }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            NodeKind::Number(v) if *v < 0.0 || v.is_sign_negative() => PREC_UNARY,
            NodeKind::Number(_) | NodeKind::Variable(_) | NodeKind::Call(..) => PREC_ATOM,
            NodeKind::Neg(_) => PREC_UNARY,
            NodeKind::Binary(op, ..) => op.precedence(),
        }
    }

    /// Printer that re-parses to the same tree (negative literals come back
    /// as a negation of their magnitude, which evaluates identically).
    pub fn display<'a>(&'a self, coordinates: &'a [alloc::string::String]) -> AstDisplay<'a> {
        AstDisplay {
            ast: self,
            coordinates,
        }
    }
}

pub struct AstDisplay<'a> {
    ast: &'a Ast,
    coordinates: &'a [alloc::string::String],
}

impl AstDisplay<'_> {
    fn child<'b>(&'b self, ast: &'b Ast) -> AstDisplay<'b> {
        AstDisplay {
            ast,
            coordinates: self.coordinates,
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, ast: &Ast, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.child(ast))
        } else {
            write!(f, "{}", self.child(ast))
        }
    }
}

impl fmt::Display for AstDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ast.kind {
            NodeKind::Number(v) => {
                if v.is_sign_negative() {
                    write!(f, "-{}", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            NodeKind::Variable(i) => match self.coordinates.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "${i}"),
            },
            NodeKind::Neg(a) => {
                f.write_str("-")?;
                self.wrapped(f, a, a.precedence() < PREC_UNARY)
            }
            NodeKind::Binary(op, a, b) => {
                let prec = op.precedence();
                let (left_parens, right_parens) = match op {
                    // right-associative; the exponent is parsed as a unary
                    BinaryOp::Pow => (a.precedence() <= PREC_POW, b.precedence() < PREC_UNARY),
                    _ => (a.precedence() < prec, b.precedence() <= prec),
                };
                self.wrapped(f, a, left_parens)?;
                write!(f, "{}", op.symbol())?;
                self.wrapped(f, b, right_parens)
            }
            NodeKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", self.child(a))?;
                }
                f.write_str(")")
            }
        }
    }
}
