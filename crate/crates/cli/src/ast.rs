//! Abstract syntax for the descriptor language, and its lowering.
//!
//! A parsed program is a list of `let` bindings followed by one descriptor
//! expression.  Lowering resolves names, validates primes and counts, and
//! produces exactly one descriptor; every node carries a source span so
//! semantic errors can point at the offending text.

use propg_core::multiplicity::is_prime;
use propg_core::torsion::product;
use propg_core::{
    CardinalCount, CartesianDescriptor, Error, MultiplicitySeq, ProPDescriptor, Segment, Tail,
    TorsionSequence,
};
use std::collections::HashMap;

/// A half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    /// The smallest span covering both.
    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

/// A multiplicity as written: a natural number or `aleph0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountExpr {
    Finite(u64),
    Aleph0,
}

impl CountExpr {
    pub fn value(self) -> CardinalCount {
        match self {
            CountExpr::Finite(n) => CardinalCount::Finite(n),
            CountExpr::Aleph0 => CardinalCount::Aleph0,
        }
    }
}

/// The tail keyword of a `layer(...)` literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailExpr {
    Zero,
    Aleph0,
    Rep(Vec<CountExpr>),
}

/// One Cartesian-layer expression.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerExpr {
    /// `C(p,e)`, optionally raised to a count.
    Cyclic { prime: u64, exponent: u64, count: Option<CountExpr>, span: Span },
    /// `prod(C(p,i) for i in N)`, optionally raised to a count.
    ProdAll { prime: u64, count: Option<CountExpr>, span: Span },
    /// `layer(p,[prefix],tail)`: an explicit multiplicity sequence.
    General { prime: u64, prefix: Vec<CountExpr>, tail: TailExpr, span: Span },
    /// A `*`-product of layers: multiplicities add termwise.
    Product { factors: Vec<LayerExpr>, span: Span },
}

impl LayerExpr {
    pub fn span(&self) -> Span {
        match self {
            LayerExpr::Cyclic { span, .. }
            | LayerExpr::ProdAll { span, .. }
            | LayerExpr::General { span, .. }
            | LayerExpr::Product { span, .. } => *span,
        }
    }
}

/// One item of a `seq[...]` literal.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqItem {
    /// A single entry of the sequence.
    Layer(LayerExpr),
    /// `repeat(L)`: closes an omega-run whose prefix is every item since
    /// the previous marker and whose repeating layer is `L`.
    Repeat(LayerExpr, Span),
}

/// A descriptor expression.
#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorExpr {
    /// `seq[item, ...]`: a torsion sequence with zero free rank.
    Seq { items: Vec<SeqItem>, span: Span },
    /// `Zp(p)^rank`: the free group of the given rank.
    Free { prime: u64, rank: CountExpr, span: Span },
    /// `trivial(p)`: the trivial group.
    Trivial { prime: u64, span: Span },
    /// A bound name.
    Name { name: String, span: Span },
    /// A `*`-product of descriptors.
    Product { factors: Vec<DescriptorExpr>, span: Span },
}

impl DescriptorExpr {
    pub fn span(&self) -> Span {
        match self {
            DescriptorExpr::Seq { span, .. }
            | DescriptorExpr::Free { span, .. }
            | DescriptorExpr::Trivial { span, .. }
            | DescriptorExpr::Name { span, .. }
            | DescriptorExpr::Product { span, .. } => *span,
        }
    }
}

/// One `let name = expr;` binding.
#[derive(Debug, Clone, PartialEq)]
pub struct Binding {
    pub name: String,
    pub name_span: Span,
    pub expr: DescriptorExpr,
}

/// A parsed program: bindings, then the final expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub bindings: Vec<Binding>,
    pub expr: DescriptorExpr,
}

/// A lowering failure, pointing at the offending node.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerError {
    pub span: Span,
    pub message: String,
}

impl LowerError {
    fn new(span: Span, message: impl Into<String>) -> Self {
        LowerError { span, message: message.into() }
    }

    fn from_core(span: Span, err: Error) -> Self {
        LowerError { span, message: err.to_string() }
    }
}

/// Lower a program to a single descriptor.
pub fn lower(program: &Program) -> Result<ProPDescriptor, LowerError> {
    let mut env: HashMap<String, ProPDescriptor> = HashMap::new();
    for binding in &program.bindings {
        if env.contains_key(&binding.name) {
            return Err(LowerError::new(
                binding.name_span,
                format!("`{}` is bound twice", binding.name),
            ));
        }
        let value = lower_expr(&binding.expr, &env)?;
        env.insert(binding.name.clone(), value);
    }
    lower_expr(&program.expr, &env)
}

fn lower_expr(
    expr: &DescriptorExpr,
    env: &HashMap<String, ProPDescriptor>,
) -> Result<ProPDescriptor, LowerError> {
    match expr {
        DescriptorExpr::Trivial { prime, span } => {
            ProPDescriptor::trivial(*prime).map_err(|e| LowerError::from_core(*span, e))
        }
        DescriptorExpr::Free { prime, rank, span } => {
            ProPDescriptor::free(*prime, rank.value()).map_err(|e| LowerError::from_core(*span, e))
        }
        DescriptorExpr::Name { name, span } => env
            .get(name)
            .cloned()
            .ok_or_else(|| LowerError::new(*span, format!("unbound name `{name}`"))),
        DescriptorExpr::Seq { items, span } => lower_seq(items, *span),
        DescriptorExpr::Product { factors, .. } => {
            let mut lowered = lower_expr(&factors[0], env)?;
            for factor in &factors[1..] {
                let rhs = lower_expr(factor, env)?;
                lowered =
                    product(&lowered, &rhs).map_err(|e| LowerError::from_core(factor.span(), e))?;
            }
            Ok(lowered)
        }
    }
}

fn lower_seq(items: &[SeqItem], span: Span) -> Result<ProPDescriptor, LowerError> {
    if items.is_empty() {
        return Err(LowerError::new(
            span,
            "a sequence needs at least one layer; write trivial(p) for the trivial group",
        ));
    }
    let mut segments = Vec::new();
    let mut pending = Vec::new();
    let mut prime = None;
    for item in items {
        let (layer_expr, repeating) = match item {
            SeqItem::Layer(l) => (l, false),
            SeqItem::Repeat(l, _) => (l, true),
        };
        let layer = lower_layer(layer_expr)?;
        match prime {
            None => prime = Some(layer.prime()),
            Some(p) if p != layer.prime() => {
                return Err(LowerError::from_core(
                    layer_expr.span(),
                    Error::MixedPrimes(p, layer.prime()),
                ));
            }
            Some(_) => {}
        }
        if repeating {
            segments.push(Segment::Omega { prefix: std::mem::take(&mut pending), repeating: layer });
        } else {
            pending.push(layer);
        }
    }
    if !pending.is_empty() {
        segments.push(Segment::Run(pending));
    }
    let seq =
        TorsionSequence::from_segments(segments).map_err(|e| LowerError::from_core(span, e))?;
    let prime = prime.expect("a nonempty item list fixes the prime");
    ProPDescriptor::new(prime, seq, CardinalCount::ZERO)
        .map_err(|e| LowerError::from_core(span, e))
}

fn lower_layer(expr: &LayerExpr) -> Result<CartesianDescriptor, LowerError> {
    let (prime, mults) = lower_mults(expr)?;
    CartesianDescriptor::new(prime, mults).map_err(|e| LowerError::from_core(expr.span(), e))
}

fn lower_mults(expr: &LayerExpr) -> Result<(u64, MultiplicitySeq), LowerError> {
    match expr {
        LayerExpr::Cyclic { prime, exponent, count, span } => {
            check_prime(*prime, *span)?;
            let count = count.map(CountExpr::value).unwrap_or(CardinalCount::ONE);
            if *exponent == 0 || count.is_zero() {
                return Ok((*prime, MultiplicitySeq::zero()));
            }
            let exponent = u32::try_from(*exponent)
                .map_err(|_| LowerError::new(*span, format!("exponent {exponent} is too large")))?;
            Ok((*prime, MultiplicitySeq::single(exponent, count)))
        }
        LayerExpr::ProdAll { prime, count, span } => {
            check_prime(*prime, *span)?;
            let mults = match count.map(CountExpr::value).unwrap_or(CardinalCount::ONE) {
                CardinalCount::Finite(0) => MultiplicitySeq::zero(),
                CardinalCount::Finite(k) => {
                    MultiplicitySeq::new(Vec::new(), Tail::Periodic(vec![CardinalCount::Finite(k)]))
                }
                CardinalCount::Aleph0 => MultiplicitySeq::new(Vec::new(), Tail::AllAleph0),
            };
            Ok((*prime, mults))
        }
        LayerExpr::General { prime, prefix, tail, span } => {
            check_prime(*prime, *span)?;
            let tail = match tail {
                TailExpr::Zero => Tail::Zero,
                TailExpr::Aleph0 => Tail::AllAleph0,
                TailExpr::Rep(pattern) => {
                    if pattern.is_empty() {
                        return Err(LowerError::new(*span, "rep[] needs a nonempty pattern"));
                    }
                    Tail::Periodic(pattern.iter().map(|c| c.value()).collect())
                }
            };
            let prefix = prefix.iter().map(|c| c.value()).collect();
            Ok((*prime, MultiplicitySeq::new(prefix, tail)))
        }
        LayerExpr::Product { factors, .. } => {
            let (prime, mut mults) = lower_mults(&factors[0])?;
            for factor in &factors[1..] {
                let (q, more) = lower_mults(factor)?;
                if q != prime {
                    return Err(LowerError::from_core(
                        factor.span(),
                        Error::MixedPrimes(prime, q),
                    ));
                }
                mults = mults.pointwise_add(&more);
            }
            Ok((prime, mults))
        }
    }
}

fn check_prime(prime: u64, span: Span) -> Result<(), LowerError> {
    if is_prime(prime) {
        Ok(())
    } else {
        Err(LowerError::from_core(span, Error::NotPrime(prime)))
    }
}
