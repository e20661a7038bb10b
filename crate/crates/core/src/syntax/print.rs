use super::Surface;
use crate::term::{is_hatted, is_tuple_name, Expr, HAT_SUFFIX};

/// How a function symbol is shown: hatted copies get a combining
/// circumflex on their first letter, rt-flagged calls a `^rt` suffix.
pub fn display_symbol(name: &str, rt: bool) -> String {
    let mut out = String::new();
    if is_hatted(name) {
        let base = &name[..name.len() - HAT_SUFFIX.len()];
        let mut chars = base.chars();
        if let Some(first) = chars.next() {
            out.push(first);
            out.push('\u{302}');
            out.extend(chars);
        }
    } else {
        out.push_str(name);
    }
    if rt {
        out.push_str("^rt");
    }
    out
}

fn char_of(name: &str) -> Option<char> {
    let inner = name.strip_prefix('\'')?.strip_suffix('\'')?;
    let mut chars = inner.chars();
    match (chars.next()?, chars.next(), chars.next()) {
        ('\\', Some(e), None) => match e {
            'n' => Some('\n'),
            't' => Some('\t'),
            '\\' => Some('\\'),
            '\'' => Some('\''),
            '"' => Some('"'),
            _ => None,
        },
        (c, None, None) => Some(c),
        _ => None,
    }
}

fn escape_in_string(c: char, out: &mut String) {
    match c {
        '"' => out.push_str("\\\""),
        '\\' => out.push_str("\\\\"),
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        c => out.push(c),
    }
}

fn peano(e: &Expr) -> Option<usize> {
    let mut n = 0;
    let mut cur = e;
    loop {
        match cur {
            Expr::Cons(c, args) if &**c == "z" && args.is_empty() => return Some(n),
            Expr::Cons(c, args) if &**c == "s" && args.len() == 1 => {
                n += 1;
                cur = &args[0];
            }
            _ => return None,
        }
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_args(args: &[Expr], out: &mut String) {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(a, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Var(x) => out.push_str(x),
        Expr::Bottom => out.push_str("_|_"),
        Expr::Let(x, bound, body) => {
            out.push_str("let ");
            out.push_str(x);
            out.push_str(" = ");
            write_expr(bound, out);
            out.push_str(" in ");
            write_expr(body, out);
        }
        Expr::Fun { name, rt, args } => {
            out.push_str(&display_symbol(name, *rt));
            if !args.is_empty() {
                out.push('(');
                write_args(args, out);
                out.push(')');
            }
        }
        Expr::Cons(c, args) => {
            if let Some(n) = peano(e) {
                out.push_str(&n.to_string());
            } else if &**c == "cons" && args.len() == 2 {
                write_list(e, out);
            } else if &**c == "nil" && args.is_empty() {
                out.push_str("[]");
            } else if is_tuple_name(c) {
                out.push('(');
                write_args(args, out);
                out.push(')');
            } else {
                out.push_str(c);
                if !args.is_empty() {
                    out.push('(');
                    write_args(args, out);
                    out.push(')');
                }
            }
        }
    }
}

fn write_list(e: &Expr, out: &mut String) {
    let mut items = Vec::new();
    let mut cur = e;
    while let Expr::Cons(c, args) = cur {
        if &**c != "cons" || args.len() != 2 {
            break;
        }
        items.push(&args[0]);
        cur = &args[1];
    }
    let proper = matches!(cur, Expr::Cons(c, args) if &**c == "nil" && args.is_empty());
    if proper {
        let chars: Option<Vec<char>> = items
            .iter()
            .map(|i| match i {
                Expr::Cons(c, args) if args.is_empty() => char_of(c),
                _ => None,
            })
            .collect();
        if let Some(chars) = chars {
            out.push('"');
            chars.into_iter().for_each(|c| escape_in_string(c, out));
            out.push('"');
            return;
        }
    }
    out.push('[');
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(item, out);
    }
    if !proper {
        out.push_str(" | ");
        write_expr(cur, out);
    }
    out.push(']');
}

/// Prints an annotated goal; annotations are shown as `rt(..)` / `rrt(..)`.
pub fn print_surface(s: &Surface) -> String {
    match s {
        Surface::Rt(inner) => format!("rt({})", print_surface(inner)),
        Surface::Rrt(inner) => format!("rrt({})", print_surface(inner)),
        Surface::Var(x) => x.to_string(),
        Surface::Fun { name, rt, args } if !s.contains_annotation() => print_expr(&Expr::Fun {
            name: name.clone(),
            rt: *rt,
            args: args.iter().map(plain).collect(),
        }),
        Surface::Cons(..) if !s.contains_annotation() => print_expr(&plain(s)),
        Surface::Fun { name, rt, args } => {
            let parts: Vec<String> = args.iter().map(print_surface).collect();
            format!("{}({})", display_symbol(name, *rt), parts.join(", "))
        }
        Surface::Cons(c, args) => {
            let parts: Vec<String> = args.iter().map(print_surface).collect();
            if is_tuple_name(c) {
                format!("({})", parts.join(", "))
            } else {
                format!("{c}({})", parts.join(", "))
            }
        }
    }
}

fn plain(s: &Surface) -> Expr {
    match s {
        Surface::Var(x) => Expr::Var(x.clone()),
        Surface::Cons(c, args) => Expr::Cons(c.clone(), args.iter().map(plain).collect()),
        Surface::Fun { name, rt, args } => Expr::Fun {
            name: name.clone(),
            rt: *rt,
            args: args.iter().map(plain).collect(),
        },
        Surface::Rt(_) | Surface::Rrt(_) => unreachable!("checked by the caller"),
    }
}
