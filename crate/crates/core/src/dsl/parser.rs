use std::collections::{BTreeMap, HashMap};

use super::lexer::{tokenize, Tok, Token};
use super::validate::validate_located;
use super::{is_reserved, Diagnostic, Location, Parsed};
use crate::builtins::Registry;
use crate::machine::{CarrierId, LabelId, Machine, Statement, TapeIndex};

#[derive(Clone, Debug)]
struct Named {
    name: String,
    at: Location,
}

#[derive(Debug)]
enum Body {
    Right(TapeIndex, Named),
    Left(TapeIndex, Named),
    Write(TapeIndex, char, Named),
    Assign(TapeIndex, Named, Vec<TapeIndex>, Named),
    IfSymbol(TapeIndex, char, Named, Named),
    IfTest(Named, Vec<TapeIndex>, Named, Named),
}

#[derive(Debug)]
struct StmtAst {
    label: Named,
    body: Body,
}

#[derive(Debug, Default)]
struct Ast {
    at: Option<Location>,
    name: String,
    tapes: Vec<(Location, usize, String)>,
    inputs: Option<usize>,
    work: Option<Vec<char>>,
    blank: Option<char>,
    labels: Vec<(Named, bool)>,
    stmts: Vec<StmtAst>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn at(&self) -> Location {
        self.toks[self.pos].at
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(Diagnostic::error(
            "syntax",
            format!("expected {wanted}, found {}", self.peek().describe()),
            Some(self.at()),
        ))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Named> {
        let at = self.at();
        match self.peek().clone() {
            Tok::Ident(name) if !is_reserved(&name) => {
                self.bump();
                Ok(Named { name, at })
            }
            Tok::Ident(name) => Err(Diagnostic::error(
                "syntax",
                format!("`{name}` is a reserved word and cannot be a {what}"),
                Some(at),
            )),
            _ => self.unexpected(what),
        }
    }

    fn nat(&mut self) -> PResult<usize> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("a tape number"),
        }
    }

    fn symbol(&mut self) -> PResult<char> {
        match *self.peek() {
            Tok::Sym(c) => {
                self.bump();
                Ok(c)
            }
            _ => self.unexpected("a symbol like '#'"),
        }
    }

    fn args(&mut self) -> PResult<Vec<TapeIndex>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.nat()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(args)
    }

    fn machine(&mut self) -> PResult<Ast> {
        let mut ast = Ast {
            at: Some(self.at()),
            ..Ast::default()
        };
        self.keyword("machine")?;
        ast.name = self.ident("machine name")?.name;
        self.eat(&Tok::Semi);
        loop {
            let at = self.at();
            let section = match self.peek() {
                Tok::Ident(s) if matches!(s.as_str(), "tapes" | "inputs" | "work" | "blank") => {
                    s.clone()
                }
                _ => break,
            };
            self.bump();
            let duplicate = match section.as_str() {
                "tapes" => {
                    let dup = !ast.tapes.is_empty();
                    loop {
                        let at = self.at();
                        let index = self.nat()?;
                        self.expect(Tok::Colon)?;
                        let carrier = self.ident("carrier id")?.name;
                        ast.tapes.push((at, index, carrier));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    dup
                }
                "inputs" => ast.inputs.replace(self.nat()?).is_some(),
                "work" => {
                    let mut symbols = vec![self.symbol()?];
                    while let Tok::Sym(c) = *self.peek() {
                        self.bump();
                        symbols.push(c);
                    }
                    let dup = ast.work.replace(symbols).is_some();
                    if self.is_keyword("blank") {
                        self.bump();
                        ast.blank = Some(self.symbol()?);
                    }
                    dup
                }
                _ => ast.blank.replace(self.symbol()?).is_some(),
            };
            if duplicate {
                return Err(Diagnostic::error(
                    "syntax",
                    format!("`{section}` given twice"),
                    Some(at),
                ));
            }
            self.eat(&Tok::Semi);
        }
        self.keyword("labels")?;
        while matches!(self.peek(), Tok::Ident(_)) && *self.peek2() != Tok::Colon {
            let is_final = self.is_keyword("final");
            if is_final {
                self.bump();
            }
            ast.labels.push((self.ident("label")?, is_final));
            self.eat(&Tok::Comma);
        }
        self.eat(&Tok::Semi);
        while *self.peek() != Tok::Eof {
            ast.stmts.push(self.statement()?);
            self.eat(&Tok::Semi);
        }
        Ok(ast)
    }

    fn statement(&mut self) -> PResult<StmtAst> {
        let label = self.ident("label")?;
        self.expect(Tok::Colon)?;
        if self.is_keyword("if") {
            self.bump();
            let cond = match self.peek().clone() {
                Tok::Nat(tape) => {
                    self.bump();
                    self.keyword("is")?;
                    Ok((tape, self.symbol()?))
                }
                _ => {
                    let f = self.ident("test name")?;
                    Err((f, self.args()?))
                }
            };
            self.keyword("then")?;
            let then = self.ident("label")?;
            self.keyword("else")?;
            let otherwise = self.ident("label")?;
            let body = match cond {
                Ok((tape, c)) => Body::IfSymbol(tape, c, then, otherwise),
                Err((f, args)) => Body::IfTest(f, args, then, otherwise),
            };
            return Ok(StmtAst { label, body });
        }
        enum Pending {
            Right(TapeIndex),
            Left(TapeIndex),
            Write(TapeIndex, char),
            Assign(TapeIndex, Named, Vec<TapeIndex>),
        }
        let pending = match self.peek().clone() {
            Tok::Ident(kw) if kw == "right" => {
                self.bump();
                Pending::Right(self.nat()?)
            }
            Tok::Ident(kw) if kw == "left" => {
                self.bump();
                Pending::Left(self.nat()?)
            }
            Tok::Ident(kw) if kw == "write" => {
                self.bump();
                let tape = self.nat()?;
                Pending::Write(tape, self.symbol()?)
            }
            Tok::Nat(tape) => {
                self.bump();
                self.expect(Tok::Assign)?;
                let f = self.ident("function name")?;
                Pending::Assign(tape, f, self.args()?)
            }
            _ => return self.unexpected("`right`, `left`, `write`, `if`, or an assignment"),
        };
        self.expect(Tok::Arrow)?;
        let next = self.ident("label")?;
        let body = match pending {
            Pending::Right(t) => Body::Right(t, next),
            Pending::Left(t) => Body::Left(t, next),
            Pending::Write(t, c) => Body::Write(t, c, next),
            Pending::Assign(t, f, args) => Body::Assign(t, f, args, next),
        };
        Ok(StmtAst { label, body })
    }
}

fn symbols_used(stmts: &[StmtAst]) -> Vec<char> {
    let mut out = Vec::new();
    for s in stmts {
        if let Body::Write(_, c, _) | Body::IfSymbol(_, c, _, _) = &s.body {
            if !out.contains(c) {
                out.push(*c);
            }
        }
    }
    out
}

/// Parses and validates a machine, resolving subroutine names in `registry`.
pub fn parse(src: &str, registry: &Registry) -> Result<Parsed, Vec<Diagnostic>> {
    let toks = tokenize(src).map_err(|d| vec![d])?;
    let ast = Parser { toks, pos: 0 }.machine().map_err(|d| vec![d])?;
    build(ast, registry)
}

fn build(ast: Ast, registry: &Registry) -> Result<Parsed, Vec<Diagnostic>> {
    let mut errors = Vec::new();

    let mut tapes: BTreeMap<usize, String> = BTreeMap::new();
    for (at, index, carrier) in &ast.tapes {
        if tapes.insert(*index, carrier.clone()).is_some() {
            errors.push(Diagnostic::error(
                "tape-decl",
                format!("tape {index} declared twice"),
                Some(*at),
            ));
        }
    }
    if tapes.is_empty() {
        errors.push(Diagnostic::error("tape-decl", "no tapes declared", None));
    } else if tapes.keys().copied().ne(0..tapes.len()) {
        let at = ast.tapes.first().map(|t| t.0);
        errors.push(Diagnostic::error(
            "tape-decl",
            "tapes must be numbered 0..L without gaps",
            at,
        ));
    }

    let mut ids: HashMap<&str, LabelId> = HashMap::new();
    for (i, (l, _)) in ast.labels.iter().enumerate() {
        if ids.insert(&l.name, i).is_some() {
            errors.push(Diagnostic::error(
                "duplicate-label",
                format!("label `{}` declared twice", l.name),
                Some(l.at),
            ));
        }
    }
    let finals: Vec<_> = ast
        .labels
        .iter()
        .enumerate()
        .filter(|(_, (_, f))| *f)
        .collect();
    if ast.labels.is_empty() {
        errors.push(Diagnostic::error("labels", "no labels declared", None));
    }
    if finals.len() > 1 {
        errors.push(Diagnostic::error(
            "labels",
            "more than one final label",
            Some(finals[1].1 .0.at),
        ));
    }
    let final_label = finals
        .first()
        .map_or(ast.labels.len().saturating_sub(1), |(i, _)| *i);

    let resolve = |l: &Named, errors: &mut Vec<Diagnostic>| match ids.get(l.name.as_str()) {
        Some(id) => *id,
        None => {
            errors.push(Diagnostic::error(
                "unknown-label",
                format!("unknown label `{}`", l.name),
                Some(l.at),
            ));
            0
        }
    };

    let mut statements: Vec<Option<Statement>> = vec![None; ast.labels.len()];
    let mut stmt_at: Vec<Option<Location>> = vec![None; ast.labels.len()];
    let mut subroutines = BTreeMap::new();
    for s in &ast.stmts {
        let before = errors.len();
        let label = resolve(&s.label, &mut errors);
        let mut function = |f: &Named, errors: &mut Vec<Diagnostic>| match registry.get(&f.name) {
            Some(sub) => {
                subroutines.insert(f.name.clone(), sub.clone());
            }
            None => errors.push(Diagnostic::error(
                "unknown-fn",
                format!("unknown fn `{}`", f.name),
                Some(f.at),
            )),
        };
        let stmt = match &s.body {
            Body::Right(tape, next) => Statement::Right {
                tape: *tape,
                next: resolve(next, &mut errors),
            },
            Body::Left(tape, next) => Statement::Left {
                tape: *tape,
                next: resolve(next, &mut errors),
            },
            Body::Write(tape, symbol, next) => Statement::Write {
                tape: *tape,
                symbol: *symbol,
                next: resolve(next, &mut errors),
            },
            Body::IfSymbol(tape, symbol, then, otherwise) => Statement::IfSymbol {
                tape: *tape,
                symbol: *symbol,
                then: resolve(then, &mut errors),
                otherwise: resolve(otherwise, &mut errors),
            },
            Body::Assign(tape, f, args, next) => {
                function(f, &mut errors);
                Statement::Assign {
                    tape: *tape,
                    function: f.name.clone(),
                    args: args.clone(),
                    next: resolve(next, &mut errors),
                }
            }
            Body::IfTest(f, args, then, otherwise) => {
                function(f, &mut errors);
                Statement::IfTest {
                    function: f.name.clone(),
                    args: args.clone(),
                    then: resolve(then, &mut errors),
                    otherwise: resolve(otherwise, &mut errors),
                }
            }
        };
        if errors.len() > before {
            continue;
        }
        if statements[label].is_some() {
            errors.push(Diagnostic::error(
                "duplicate-statement",
                format!("label `{}` already has a statement", s.label.name),
                Some(s.label.at),
            ));
            continue;
        }
        statements[label] = Some(stmt);
        stmt_at[label] = Some(s.label.at);
    }
    if !errors.is_empty() {
        errors.sort_by_key(|d| d.location);
        return Err(errors);
    }

    let blank = ast.blank.unwrap_or('_');
    let gamma = match ast.work {
        Some(work) => work,
        None => std::iter::once(blank)
            .chain(symbols_used(&ast.stmts).into_iter().filter(|c| *c != blank))
            .collect(),
    };
    let machine = Machine {
        name: ast.name,
        labels: ast.labels.iter().map(|(l, _)| l.name.clone()).collect(),
        final_label,
        gamma,
        blank,
        inputs: ast.inputs.unwrap_or(0),
        carriers: tapes.into_values().map(CarrierId::new).collect(),
        statements,
        subroutines,
    };
    let decl_at: Vec<Location> = ast.labels.iter().map(|(l, _)| l.at).collect();
    let mut diagnostics: Vec<Diagnostic> = validate_located(&machine)
        .into_iter()
        .map(|(label, mut d)| {
            d.location = label.map_or(ast.at, |l| Some(stmt_at[l].unwrap_or(decl_at[l])));
            d
        })
        .collect();
    diagnostics.sort_by_key(|d| d.location);
    if diagnostics.iter().any(Diagnostic::is_error) {
        Err(diagnostics)
    } else {
        Ok(Parsed {
            machine,
            warnings: diagnostics,
        })
    }
}
