//! Recursive-descent parser for Open QASM 2.0 with eager gate expansion.
//!
//! Gate applications are expanded as they are parsed. A gate whose
//! definition comes from the embedded `qelib1.inc` and that has a native
//! [`GateKind`] is emitted directly; everything else (user definitions and
//! the remaining library gates) is unrolled through its body.

use std::collections::HashMap;
use std::rc::Rc;

use crate::circuit::{Circuit, GateKind, GateSpec};
use crate::error::{ParseError, Pos};
use crate::expr::{BinOp, Func, ParamExpr};
use crate::lexer::{tokenize, Tok, Token};

const QELIB1: &str = include_str!("qelib1.inc");

/// Maximum nesting of gate-definition expansion.
pub const MAX_EXPANSION_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Expand every library gate down to the `U`/`CX` builtins instead of
    /// emitting native gates.
    pub expand_library: bool,
}

/// Parse a program with default options.
pub fn parse(source: &str) -> Result<Circuit, ParseError> {
    parse_with(source, ParseOptions::default())
}

pub fn parse_with(source: &str, options: ParseOptions) -> Result<Circuit, ParseError> {
    let mut parser = Parser::new(tokenize(source)?, options);
    parser.program()?;
    Ok(parser.circuit)
}

pub(crate) fn parse_expr(text: &str) -> Result<ParamExpr, ParseError> {
    let mut parser = Parser::new(tokenize(text)?, ParseOptions::default());
    let e = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("end of expression"));
    }
    Ok(e)
}

#[derive(Debug)]
struct BodyStmt {
    name: String,
    params: Vec<ParamExpr>,
    qargs: Vec<usize>,
    pos: Pos,
}

#[derive(Debug)]
struct GateDef {
    params: Vec<String>,
    num_qargs: usize,
    body: Vec<BodyStmt>,
    native: Option<GateKind>,
}

#[derive(Debug, Clone, Copy)]
struct Register {
    start: usize,
    size: usize,
}

#[derive(Debug, Clone, Copy)]
enum Arg {
    Bit(usize),
    Reg(Register),
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    options: ParseOptions,
    in_library: bool,
    gates: HashMap<String, Rc<GateDef>>,
    qregs: HashMap<String, Register>,
    cregs: HashMap<String, Register>,
    circuit: Circuit,
}

impl Parser {
    fn new(tokens: Vec<Token>, options: ParseOptions) -> Self {
        Parser {
            tokens,
            idx: 0,
            options,
            in_library: false,
            gates: HashMap::new(),
            qregs: HashMap::new(),
            cregs: HashMap::new(),
            circuit: Circuit::default(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.idx].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::syntax(
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().pos)),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn int(&mut self) -> Result<usize, ParseError> {
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(v as usize)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn program(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "OPENQASM") {
            self.bump();
            let pos = self.pos();
            let version = match *self.peek() {
                Tok::Real(v) => v,
                Tok::Int(v) => v as f64,
                _ => return Err(self.unexpected("a version number")),
            };
            self.bump();
            if !(2.0..3.0).contains(&version) {
                return Err(ParseError::unsupported(
                    pos,
                    format!("Open QASM version {version} (only 2.x is supported)"),
                ));
            }
            self.expect(Tok::Semi)?;
        }
        while *self.peek() != Tok::Eof {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (word, pos) = match self.peek().clone() {
            Tok::Ident(s) => (s, self.pos()),
            _ => return Err(self.unexpected("a statement")),
        };
        match word.as_str() {
            "include" => self.include(),
            "qreg" | "creg" => self.register(word == "qreg"),
            "gate" => self.gate_def(),
            "opaque" => Err(ParseError::unsupported(pos, "`opaque` gate declarations")),
            "if" => Err(ParseError::unsupported(pos, "`if` statements (classical control)")),
            "reset" => Err(ParseError::unsupported(pos, "`reset` operations")),
            "OPENQASM" => Err(ParseError::syntax(pos, "`OPENQASM` header must come first")),
            "barrier" => {
                self.bump();
                self.arg_list(true)?;
                self.expect(Tok::Semi)?;
                Ok(())
            }
            "measure" => self.measure(),
            _ => self.application(),
        }
    }

    fn include(&mut self) -> Result<(), ParseError> {
        self.bump();
        let pos = self.pos();
        let file = match self.peek().clone() {
            Tok::Str(s) => s,
            _ => return Err(self.unexpected("a file name string")),
        };
        self.bump();
        self.expect(Tok::Semi)?;
        if file != "qelib1.inc" {
            return Err(ParseError::unsupported(
                pos,
                format!("include of \"{file}\" (only \"qelib1.inc\" is available)"),
            ));
        }
        let tokens = tokenize(QELIB1)?;
        let mut lib = Parser::new(tokens, self.options);
        lib.in_library = true;
        lib.gates = std::mem::take(&mut self.gates);
        lib.program()?;
        self.gates = lib.gates;
        Ok(())
    }

    fn register(&mut self, quantum: bool) -> Result<(), ParseError> {
        self.bump();
        let (name, pos) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let size = self.int()?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        if self.qregs.contains_key(&name) || self.cregs.contains_key(&name) {
            return Err(ParseError::semantic(pos, format!("register `{name}` already declared")));
        }
        if quantum {
            let reg = Register {
                start: self.circuit.num_qubits,
                size,
            };
            self.circuit.num_qubits += size;
            self.qregs.insert(name, reg);
        } else {
            let reg = Register {
                start: self.circuit.num_clbits,
                size,
            };
            self.circuit.num_clbits += size;
            self.cregs.insert(name, reg);
        }
        Ok(())
    }

    fn gate_def(&mut self) -> Result<(), ParseError> {
        self.bump();
        let (name, pos) = self.ident()?;
        if name == "U" || name == "CX" {
            return Err(ParseError::semantic(pos, format!("cannot redefine builtin `{name}`")));
        }
        let mut params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                loop {
                    params.push(self.ident()?.0);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        let mut qargs = Vec::new();
        loop {
            let (q, qpos) = self.ident()?;
            if qargs.contains(&q) {
                return Err(ParseError::semantic(qpos, format!("duplicate qubit argument `{q}`")));
            }
            qargs.push(q);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            let (stmt, spos) = self.ident()?;
            match stmt.as_str() {
                "barrier" => {
                    loop {
                        let (q, qpos) = self.ident()?;
                        if !qargs.contains(&q) {
                            return Err(ParseError::semantic(qpos, format!("unknown qubit `{q}`")));
                        }
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::Semi)?;
                }
                "opaque" | "if" | "reset" | "measure" | "gate" => {
                    return Err(ParseError::semantic(
                        spos,
                        format!("`{stmt}` is not allowed inside a gate body"),
                    ));
                }
                _ => {
                    let exprs = self.param_list()?;
                    let mut operands = Vec::new();
                    loop {
                        let (q, qpos) = self.ident()?;
                        let idx = qargs.iter().position(|a| *a == q).ok_or_else(|| {
                            ParseError::semantic(qpos, format!("unknown qubit `{q}`"))
                        })?;
                        operands.push(idx);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::Semi)?;
                    body.push(BodyStmt {
                        name: stmt,
                        params: exprs,
                        qargs: operands,
                        pos: spos,
                    });
                }
            }
        }
        self.expect(Tok::RBrace)?;
        let native = if self.in_library && !self.options.expand_library {
            GateKind::from_name(&name).filter(|k| {
                k.num_params() == params.len() && k.num_qubits() == qargs.len()
            })
        } else {
            None
        };
        let def = GateDef {
            params,
            num_qargs: qargs.len(),
            body,
            native,
        };
        self.gates.insert(name, Rc::new(def));
        Ok(())
    }

    fn param_list(&mut self) -> Result<Vec<ParamExpr>, ParseError> {
        let mut exprs = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                loop {
                    exprs.push(self.expr()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(exprs)
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<ParamExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ParamExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<ParamExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = ParamExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // unary := '-' unary | '+' unary | power
    fn unary(&mut self) -> Result<ParamExpr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(ParamExpr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    // power := atom ('^' unary)?   (right associative)
    fn power(&mut self) -> Result<ParamExpr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(ParamExpr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ParamExpr, ParseError> {
        match self.peek().clone() {
            Tok::Real(v) => {
                self.bump();
                Ok(ParamExpr::Num(v))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(ParamExpr::Num(v as f64))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "pi" {
                    return Ok(ParamExpr::Pi);
                }
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() == Tok::LParen {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        return Ok(ParamExpr::Call(f, Box::new(arg)));
                    }
                }
                Ok(ParamExpr::Ident(name))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn arg(&mut self, quantum: bool) -> Result<Arg, ParseError> {
        let (name, pos) = self.ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let reg = *regs.get(&name).ok_or_else(|| {
            let kind = if quantum { "quantum" } else { "classical" };
            ParseError::semantic(pos, format!("unknown {kind} register `{name}`"))
        })?;
        if *self.peek() == Tok::LBracket {
            self.bump();
            let ipos = self.pos();
            let idx = self.int()?;
            self.expect(Tok::RBracket)?;
            if idx >= reg.size {
                return Err(ParseError::semantic(
                    ipos,
                    format!("index {idx} out of range for register `{name}` of size {}", reg.size),
                ));
            }
            Ok(Arg::Bit(reg.start + idx))
        } else {
            Ok(Arg::Reg(reg))
        }
    }

    fn arg_list(&mut self, quantum: bool) -> Result<Vec<Arg>, ParseError> {
        let mut args = vec![self.arg(quantum)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.arg(quantum)?);
        }
        Ok(args)
    }

    /// Unroll register arguments into one operand list per application.
    fn broadcast(args: &[Arg], pos: Pos) -> Result<Vec<Vec<usize>>, ParseError> {
        let mut width: Option<usize> = None;
        for a in args {
            if let Arg::Reg(r) = a {
                match width {
                    Some(w) if w != r.size => {
                        return Err(ParseError::semantic(
                            pos,
                            format!("register size mismatch in broadcast ({w} vs {})", r.size),
                        ))
                    }
                    _ => width = Some(r.size),
                }
            }
        }
        let rows = width.unwrap_or(1);
        Ok((0..rows)
            .map(|i| {
                args.iter()
                    .map(|a| match a {
                        Arg::Bit(b) => *b,
                        Arg::Reg(r) => r.start + i,
                    })
                    .collect()
            })
            .collect())
    }

    fn measure(&mut self) -> Result<(), ParseError> {
        let pos = self.bump().pos;
        let q = self.arg(true)?;
        self.expect(Tok::Arrow)?;
        let c = self.arg(false)?;
        self.expect(Tok::Semi)?;
        match (q, c) {
            (Arg::Bit(q), Arg::Bit(c)) => self.circuit.measurements.push((q, c)),
            (Arg::Reg(qr), Arg::Reg(cr)) if qr.size == cr.size => {
                for i in 0..qr.size {
                    self.circuit.measurements.push((qr.start + i, cr.start + i));
                }
            }
            _ => {
                return Err(ParseError::semantic(
                    pos,
                    "measure operands must both be bits or equally sized registers",
                ))
            }
        }
        Ok(())
    }

    fn application(&mut self) -> Result<(), ParseError> {
        let (name, pos) = self.ident()?;
        let exprs = self.param_list()?;
        let args = self.arg_list(true)?;
        self.expect(Tok::Semi)?;
        let params = exprs
            .iter()
            .map(|e| e.eval(&HashMap::new()).map_err(|source| ParseError::Eval { pos, source }))
            .collect::<Result<Vec<_>, _>>()?;
        for operands in Self::broadcast(&args, pos)? {
            self.apply(&name, &params, &operands, pos, 0)?;
        }
        Ok(())
    }

    fn apply(
        &mut self,
        name: &str,
        params: &[f64],
        qubits: &[usize],
        pos: Pos,
        depth: usize,
    ) -> Result<(), ParseError> {
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(ParseError::semantic(
                    pos,
                    format!("qubit {q} used more than once in `{name}`"),
                ));
            }
        }
        let builtin = match name {
            "U" => Some(GateKind::U3),
            "CX" => Some(GateKind::Cx),
            _ => None,
        };
        if let Some(kind) = builtin {
            let gate = GateSpec::new(kind, params.to_vec(), qubits)
                .map_err(|e| ParseError::from_gate(pos, e))?;
            self.circuit.ops.push(gate);
            return Ok(());
        }
        let def = self
            .gates
            .get(name)
            .cloned()
            .ok_or_else(|| ParseError::UnknownGate {
                pos,
                name: name.to_string(),
            })?;
        if def.params.len() != params.len() || def.num_qargs != qubits.len() {
            return Err(ParseError::ArityMismatch {
                pos,
                message: format!(
                    "gate `{name}` takes {} parameter(s) and {} qubit(s), got {} and {}",
                    def.params.len(),
                    def.num_qargs,
                    params.len(),
                    qubits.len()
                ),
            });
        }
        if let Some(kind) = def.native {
            let gate = GateSpec::new(kind, params.to_vec(), qubits)
                .map_err(|e| ParseError::from_gate(pos, e))?;
            self.circuit.ops.push(gate);
            return Ok(());
        }
        if depth >= MAX_EXPANSION_DEPTH {
            return Err(ParseError::ExpansionDepth {
                pos,
                name: name.to_string(),
                limit: MAX_EXPANSION_DEPTH,
            });
        }
        let bindings: HashMap<String, f64> =
            def.params.iter().cloned().zip(params.iter().copied()).collect();
        for stmt in &def.body {
            let values = stmt
                .params
                .iter()
                .map(|e| {
                    e.eval(&bindings).map_err(|source| ParseError::Eval {
                        pos: stmt.pos,
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let operands: Vec<usize> = stmt.qargs.iter().map(|&i| qubits[i]).collect();
            // Errors deep inside a definition are reported at the call site.
            self.apply(&stmt.name, &values, &operands, pos, depth + 1)?;
        }
        Ok(())
    }
}
