use super::lexer::{tokenize, Token, TokenKind};
use super::{DExpr, Ident, Item, ParseError, RuleDecl, SourceFile, Span, Term};

pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut items = Vec::new();
    while p.peek().kind != TokenKind::Eof {
        items.push(p.item()?);
    }
    Ok(SourceFile { items })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let tok = self.peek();
        Err(ParseError::new(
            tok.span,
            expected.iter().map(|s| s.to_string()).collect(),
            tok.kind.to_string(),
        ))
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Span, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance().span)
        } else {
            self.error(&[&kind.to_string()])
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => self.error(&["an identifier"]),
        }
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        match self.peek().kind {
            TokenKind::Nat(n) => {
                self.advance();
                Ok(n)
            }
            _ => self.error(&["a natural number"]),
        }
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let span = self.peek().span;
        let keyword = match &self.peek().kind {
            TokenKind::Ident(k) if matches!(k.as_str(), "syntax" | "rule" | "thm") => k.clone(),
            _ => return self.error(&["`syntax`", "`rule`", "`thm`"]),
        };
        self.advance();
        match keyword.as_str() {
            "syntax" => {
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let arity = self.nat()?;
                Ok(Item::Syntax { name, arity, span })
            }
            "rule" => Ok(Item::Rule(self.rule_decl(span)?)),
            _ => {
                let decl = self.rule_decl(span)?;
                self.expect(TokenKind::LBrace)?;
                let body = self.dexpr()?;
                self.expect(TokenKind::RBrace)?;
                Ok(Item::Thm { decl, body })
            }
        }
    }

    fn rule_decl(&mut self, span: Span) -> Result<RuleDecl, ParseError> {
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        while self.peek().kind != TokenKind::RParen {
            match self.peek().kind {
                TokenKind::Ident(_) => params.push(self.ident()?),
                _ => return self.error(&["an identifier", "`)`"]),
            }
        }
        self.advance();
        self.expect(TokenKind::Colon)?;
        let hyps = self.ctx()?;
        self.expect(TokenKind::Arrow)?;
        let concs = self.ctx()?;
        Ok(RuleDecl {
            name,
            params,
            hyps,
            concs,
            span,
        })
    }

    fn ctx(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(TokenKind::LBracket)?;
        self.term_list(TokenKind::RBracket)
    }

    /// `(term ("," term)*)? close`
    fn term_list(&mut self, close: TokenKind) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        if self.peek().kind == close {
            self.advance();
            return Ok(terms);
        }
        loop {
            terms.push(self.term()?);
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            } else if self.peek().kind == close {
                self.advance();
                return Ok(terms);
            } else {
                return self.error(&["`,`", &close.to_string()]);
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let head = self.ident()?;
        let args = if self.peek().kind == TokenKind::LParen {
            self.advance();
            Some(self.term_list(TokenKind::RParen)?)
        } else {
            None
        };
        Ok(Term { head, args })
    }

    fn dexpr(&mut self) -> Result<DExpr, ParseError> {
        let mut acc = self.dpar()?;
        while self.peek().kind == TokenKind::Semi {
            self.advance();
            acc = DExpr::Seq(Box::new(acc), Box::new(self.dpar()?));
        }
        Ok(acc)
    }

    fn dpar(&mut self) -> Result<DExpr, ParseError> {
        let mut acc = self.datom()?;
        while self.peek().kind == TokenKind::Star {
            self.advance();
            acc = DExpr::Par(Box::new(acc), Box::new(self.datom()?));
        }
        Ok(acc)
    }

    fn datom(&mut self) -> Result<DExpr, ParseError> {
        let span = self.peek().span;
        match self.peek().kind.clone() {
            TokenKind::LParen => {
                self.advance();
                let inner = self.dexpr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                // `id` is an identity only when a count follows, so a
                // generator may still be called `id`.
                if name == "id" && matches!(self.peek_at(1).kind, TokenKind::Nat(_)) {
                    self.advance();
                    return Ok(DExpr::Id(self.nat()?, span));
                }
                if let Some(n) = name
                    .strip_prefix("id")
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                {
                    self.advance();
                    let n = n.parse().map_err(|_| {
                        ParseError::new(span, vec!["a natural number".into()], name.clone())
                    })?;
                    return Ok(DExpr::Id(n, span));
                }
                match name.as_str() {
                    "sym" => {
                        self.advance();
                        let a = self.nat()?;
                        let b = self.nat()?;
                        Ok(DExpr::Sym(a, b, span))
                    }
                    "dup" => {
                        self.advance();
                        Ok(DExpr::Dup(span))
                    }
                    "drop" => {
                        self.advance();
                        Ok(DExpr::Drop(span))
                    }
                    _ => Ok(DExpr::Name(self.ident()?)),
                }
            }
            _ => self.error(&["a derivation"]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_decl() {
        let file = parse("syntax imp : 2").unwrap();
        match &file.items[..] {
            [Item::Syntax { name, arity: 2, .. }] => assert_eq!(name.name, "imp"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rule_decl() {
        let file =
            parse("rule ax-mp (p q) : [proves(p), proves(imp(p,q))] => [proves(q)]").unwrap();
        let Item::Rule(rule) = &file.items[0] else {
            panic!()
        };
        assert_eq!(rule.name.name, "ax-mp");
        assert_eq!(rule.params.len(), 2);
        assert_eq!(rule.hyps.len(), 2);
        assert_eq!(rule.concs.len(), 1);
        let inner = &rule.hyps[1].args.as_ref().unwrap()[0];
        assert_eq!(inner.head.name, "imp");
        assert_eq!(
            inner.head.span,
            Span {
                line: 1,
                column: 39
            }
        );
    }

    #[test]
    fn unterminated_theorem() {
        let err = parse("thm bad : [").unwrap_err();
        // `thm bad` must be followed by a parameter list
        assert_eq!((err.line, err.column), (1, 9));
        let err = parse("thm bad () : [").unwrap_err();
        assert_eq!((err.line, err.column), (1, 15));
        assert_eq!(err.found, "end of file");
    }

    #[test]
    fn derivation_precedence() {
        let file = parse(
            "thm t () : [] => [] { a * b ; c * (d ; e) ; id 2 * id3 * sym 1 2 ; dup ; drop }",
        )
        .unwrap();
        let Item::Thm { body, .. } = &file.items[0] else {
            panic!()
        };
        // left-assoc `;` at the top
        let DExpr::Seq(rest, last) = body else {
            panic!("{body:?}")
        };
        assert!(matches!(**last, DExpr::Drop(_)));
        let DExpr::Seq(rest, dup) = &**rest else {
            panic!()
        };
        assert!(matches!(**dup, DExpr::Dup(_)));
        let DExpr::Seq(_, ids) = &**rest else {
            panic!()
        };
        let DExpr::Par(left, sym) = &**ids else {
            panic!()
        };
        assert!(matches!(**sym, DExpr::Sym(1, 2, _)));
        assert!(
            matches!(**left, DExpr::Par(ref a, ref b) if matches!(**a, DExpr::Id(2, _)) && matches!(**b, DExpr::Id(3, _)))
        );
    }

    #[test]
    fn id_without_count_is_a_name() {
        let file = parse("thm t () : [] => [] { id ; id 0 }").unwrap();
        let Item::Thm {
            body: DExpr::Seq(a, b),
            ..
        } = &file.items[0]
        else {
            panic!()
        };
        assert!(matches!(&**a, DExpr::Name(i) if i.name == "id"));
        assert!(matches!(**b, DExpr::Id(0, _)));
    }

    #[test]
    fn errors_list_expectations() {
        let err = parse("rule r (p) : [wff(p)] [wff(p)]").unwrap_err();
        assert_eq!(err.expected, vec!["`=>`".to_string()]);
        let err = parse("banana").unwrap_err();
        assert_eq!(err.expected.len(), 3);
        assert!(parse("thm t () : [] => [] { sym 1 }").is_err());
        assert!(parse("thm t () : [] => [] { }").is_err());
        assert!(parse("// only a comment\n").unwrap().items.is_empty());
    }
}
