use super::lexer::{lex, Tok, Token};
use super::{spine, Declaration, ParseError, Sort, Term};
use std::collections::{BTreeMap, HashSet};

/// Parses a full source file into declarations.
///
/// Identifier resolution happens during the parse, in declaration order:
/// a name is a bound variable if some enclosing binder introduces it, a
/// symbol if previously declared, and otherwise a pattern variable when it
/// occurs in a rule left-hand side. Unknown names anywhere else are errors,
/// as are wildcards outside left-hand sides and binders that shadow a
/// symbol, an enclosing binder, or a pattern variable of the same rule.
pub fn parse_file(src: &str) -> Result<Vec<Declaration>, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        symbols: HashSet::new(),
        infix: BTreeMap::new(),
        decls: Vec::new(),
        mode: Mode::SymbolType,
        binders: Vec::new(),
        lhs_vars: HashSet::new(),
        rule_names: HashSet::new(),
        wild: 0,
    };
    p.file()?;
    Ok(p.decls)
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    SymbolType,
    RuleLhs,
    RuleRhs,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    symbols: HashSet<String>,
    infix: BTreeMap<String, String>,
    decls: Vec<Declaration>,
    mode: Mode,
    binders: Vec<String>,
    lhs_vars: HashSet<String>,
    rule_names: HashSet<String>,
    wild: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn file(&mut self) -> Result<(), ParseError> {
        while let Some(tok) = self.peek() {
            match tok {
                Tok::KwSymbol => self.symbol_decl()?,
                Tok::KwRule => self.rule_decl()?,
                Tok::KwInfix => self.infix_decl()?,
                _ => return self.err("expected a declaration (symbol, rule, or infix)"),
            }
        }
        Ok(())
    }

    fn symbol_decl(&mut self) -> Result<(), ParseError> {
        self.bump();
        let name = match self.bump() {
            Some(Tok::Ident(n)) => n,
            _ => return self.err("expected a symbol name"),
        };
        if self.symbols.contains(&name) {
            return self.err(format!("duplicate declaration of symbol '{name}'"));
        }
        self.expect(Tok::Colon, "':'")?;
        self.mode = Mode::SymbolType;
        self.binders.clear();
        self.lhs_vars.clear();
        let ty = self.term(false)?;
        self.expect(Tok::Dot, "'.' after declaration")?;
        self.symbols.insert(name.clone());
        self.decls.push(Declaration::Symbol { name, ty });
        Ok(())
    }

    fn rule_decl(&mut self) -> Result<(), ParseError> {
        let (line, col) = self.here();
        self.bump();
        // Collect every identifier up to the closing dot so fresh wildcard
        // names can avoid all of them.
        self.rule_names.clear();
        let mut j = self.pos;
        while let Some(t) = self.toks.get(j) {
            if t.tok == Tok::Dot {
                break;
            }
            if let Tok::Ident(n) = &t.tok {
                self.rule_names.insert(n.clone());
            }
            j += 1;
        }
        self.lhs_vars.clear();
        self.binders.clear();
        self.wild = 0;
        self.mode = Mode::RuleLhs;
        let lhs = self.term(false)?;
        self.expect(Tok::RuleArrow, "'-->'")?;
        self.mode = Mode::RuleRhs;
        let rhs = self.term(false)?;
        self.expect(Tok::Dot, "'.' after rule")?;
        let (head, _) = spine(&lhs);
        if !matches!(head, Term::Sym(_)) {
            return Err(ParseError {
                line,
                col,
                msg: "rule left-hand side must be headed by a declared symbol".into(),
            });
        }
        self.decls.push(Declaration::Rule { lhs, rhs });
        Ok(())
    }

    fn infix_decl(&mut self) -> Result<(), ParseError> {
        self.bump();
        let op = match self.bump() {
            Some(Tok::Str(s)) => s,
            _ => return self.err("expected a quoted operator"),
        };
        if op.is_empty() || !op.chars().all(|c| "+-*/<>=~&|@#$%^?".contains(c)) {
            return self.err(format!("invalid operator \"{op}\""));
        }
        if op == "->" || op == "-->" {
            return self.err(format!("operator \"{op}\" is reserved"));
        }
        if self.infix.contains_key(&op) {
            return self.err(format!("duplicate infix declaration for \"{op}\""));
        }
        self.expect(Tok::ColonEq, "':='")?;
        let symbol = match self.bump() {
            Some(Tok::Ident(n)) => n,
            _ => return self.err("expected a symbol name"),
        };
        if !self.symbols.contains(&symbol) {
            return self.err(format!("unknown symbol '{symbol}'"));
        }
        self.expect(Tok::Dot, "'.' after declaration")?;
        self.infix.insert(op.clone(), symbol.clone());
        self.decls.push(Declaration::Infix { op, symbol });
        Ok(())
    }

    /// `in_binder` is set while parsing the type of a `!`/`\` binder, where
    /// an identifier followed by `:` starts the next binder rather than
    /// continuing the current application.
    fn term(&mut self, in_binder: bool) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => self.binder_term(true, in_binder),
            Some(Tok::Backslash) => self.binder_term(false, in_binder),
            _ => {
                let t = self.opterm(in_binder)?;
                if self.peek() == Some(&Tok::Arrow) {
                    self.bump();
                    let u = self.term(in_binder)?;
                    Ok(Term::arrow(t, u))
                } else {
                    Ok(t)
                }
            }
        }
    }

    fn binder_term(&mut self, is_prod: bool, in_binder: bool) -> Result<Term, ParseError> {
        self.bump();
        let mut group: Vec<(String, Term)> = Vec::new();
        loop {
            let name = match self.peek() {
                Some(Tok::Ident(n)) => n.clone(),
                _ => {
                    if group.is_empty() {
                        return self.err("expected a binder name");
                    }
                    break;
                }
            };
            if self.peek2() != Some(&Tok::Colon) {
                if group.is_empty() {
                    return self.err("expected ':' after binder name");
                }
                break;
            }
            self.bump();
            self.bump();
            if self.symbols.contains(&name) {
                return self.err(format!("binder '{name}' shadows a symbol"));
            }
            if self.binders.iter().any(|b| b == &name) {
                return self.err(format!("binder '{name}' shadows an enclosing binder"));
            }
            if self.lhs_vars.contains(&name) {
                return self.err(format!("binder '{name}' shadows a pattern variable"));
            }
            let ty = self.term(true)?;
            self.binders.push(name.clone());
            group.push((name, ty));
        }
        self.expect(Tok::Comma, "',' after binders")?;
        let body = self.term(in_binder)?;
        for _ in &group {
            self.binders.pop();
        }
        Ok(group.into_iter().rev().fold(body, |acc, (n, ty)| {
            if is_prod {
                Term::prod(n, ty, acc)
            } else {
                Term::abs(n, ty, acc)
            }
        }))
    }

    fn opterm(&mut self, in_binder: bool) -> Result<Term, ParseError> {
        let mut t = self.appterm(in_binder)?;
        while let Some(Tok::Op(op)) = self.peek() {
            let op = op.clone();
            let Some(sym) = self.infix.get(&op).cloned() else {
                return self.err(format!("undeclared infix operator \"{op}\""));
            };
            self.bump();
            let rhs = self.appterm(in_binder)?;
            t = Term::app(Term::app(Term::sym(sym), t), rhs);
        }
        Ok(t)
    }

    fn appterm(&mut self, in_binder: bool) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        loop {
            let starts_atom = matches!(
                self.peek(),
                Some(Tok::Ident(_) | Tok::Type | Tok::Underscore | Tok::LParen)
            );
            if !starts_atom {
                break;
            }
            if in_binder
                && matches!(self.peek(), Some(Tok::Ident(_)))
                && self.peek2() == Some(&Tok::Colon)
            {
                break;
            }
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.bump();
                self.resolve(name)
            }
            Some(Tok::Type) => {
                self.bump();
                Ok(Term::Sort(Sort::Type))
            }
            Some(Tok::Underscore) => {
                self.bump();
                match self.mode {
                    Mode::RuleLhs => {
                        let name = loop {
                            self.wild += 1;
                            let cand = format!("_{}", self.wild);
                            if !self.rule_names.contains(&cand) && !self.symbols.contains(&cand) {
                                break cand;
                            }
                        };
                        self.lhs_vars.insert(name.clone());
                        Ok(Term::Var(name))
                    }
                    Mode::RuleRhs => self.err("wildcard '_' is not allowed in a right-hand side"),
                    Mode::SymbolType => self.err("wildcard '_' is not allowed in a type"),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let t = self.term(false)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }

    fn resolve(&mut self, name: String) -> Result<Term, ParseError> {
        if self.binders.iter().any(|b| b == &name) {
            return Ok(Term::Var(name));
        }
        if self.symbols.contains(&name) {
            return Ok(Term::Sym(name));
        }
        match self.mode {
            Mode::RuleLhs => {
                self.lhs_vars.insert(name.clone());
                Ok(Term::Var(name))
            }
            Mode::RuleRhs => {
                if self.lhs_vars.contains(&name) {
                    Ok(Term::Var(name))
                } else {
                    self.err(format!(
                        "unknown identifier '{name}' (every right-hand-side variable must occur in the left-hand side)"
                    ))
                }
            }
            Mode::SymbolType => self.err(format!("unknown identifier '{name}'")),
        }
    }
}
