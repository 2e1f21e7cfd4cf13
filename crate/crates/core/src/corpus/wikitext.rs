//! Extraction of corpus records from a small subset of wikitext.
//!
//! Handled: `[[Target]]` / `[[Target|label]]` links, `<ref>…</ref>` citations
//! (the `title=` parameter of a cite template is preferred as the reference
//! title), bulleted entries under reference-list headings, paragraphs and
//! headings. Templates, comments, files, categories and HTML tags are dropped.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{sentence_spans, CorpusRecord, ReferenceRecord, WikilinkRecord};

const REFERENCE_SECTIONS: &[&str] = &[
    "references",
    "bibliography",
    "further reading",
    "sources",
    "notes",
    "citations",
    "works cited",
];

const SKIPPED_NAMESPACES: &[&str] = &["file", "image", "category", "media"];

#[derive(Debug, Clone, PartialEq)]
enum Event {
    Link { target: String, offset: usize },
    Ref { title: String, raw: String, offset: usize },
}

/// Builds a corpus record from one page of wikitext.
pub fn extract_record(title: &str, wikitext: &str) -> CorpusRecord {
    let mut paragraphs: Vec<String> = Vec::new();
    let mut listed_refs: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut in_ref_section = false;

    let flush = |current: &mut String, paragraphs: &mut Vec<String>| {
        if !current.trim().is_empty() {
            paragraphs.push(core::mem::take(current));
        }
        current.clear();
    };

    for line in wikitext.lines() {
        let trimmed = line.trim();
        if let Some(heading) = heading_text(trimmed) {
            flush(&mut current, &mut paragraphs);
            in_ref_section = REFERENCE_SECTIONS.contains(&heading.to_lowercase().as_str());
            continue;
        }
        if trimmed.is_empty() {
            flush(&mut current, &mut paragraphs);
            continue;
        }
        if in_ref_section {
            if let Some(entry) = trimmed.strip_prefix(['*', '#']) {
                listed_refs.push(entry.trim_start_matches(['*', '#']).trim().to_string());
            }
            continue;
        }
        let body = trimmed.trim_start_matches(['*', '#', ':', ';']).trim_start();
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(body);
    }
    flush(&mut current, &mut paragraphs);

    let mut record = CorpusRecord {
        title: title.to_string(),
        summary: String::new(),
        sentences: Vec::new(),
        wikilinks: Vec::new(),
        references: Vec::new(),
    };

    let mut seen_first = false;
    for paragraph in &paragraphs {
        let (plain, events) = scan(paragraph);
        let spans = sentence_spans(&plain);
        if spans.is_empty() && events.is_empty() {
            continue;
        }
        if !seen_first && !spans.is_empty() {
            record.summary = plain.clone();
            seen_first = true;
        }
        let base = record.sentences.len();
        let locate = |offset: usize| -> Option<usize> {
            if spans.is_empty() {
                return None;
            }
            let local = spans.iter().rposition(|&(start, _)| start <= offset).unwrap_or(0);
            Some(base + local)
        };
        for event in events {
            match event {
                Event::Link { target, offset } => record.wikilinks.push(WikilinkRecord {
                    target,
                    sentence: locate(offset),
                }),
                Event::Ref { title, raw, offset } => record.references.push(ReferenceRecord {
                    title,
                    raw,
                    sentence: locate(offset),
                }),
            }
        }
        record
            .sentences
            .extend(spans.iter().map(|&(s, e)| plain[s..e].to_string()));
    }

    for entry in listed_refs {
        let (title, raw) = reference_title(&entry);
        if !title.is_empty() || !raw.is_empty() {
            record.references.push(ReferenceRecord {
                title,
                raw,
                sentence: None,
            });
        }
    }
    record
}

fn heading_text(line: &str) -> Option<&str> {
    if line.len() < 2 || !line.starts_with('=') || !line.ends_with('=') {
        return None;
    }
    let inner = line.trim_matches('=').trim();
    (!inner.is_empty()).then_some(inner)
}

/// Title and raw text for a citation body.
fn reference_title(inner: &str) -> (String, String) {
    let raw = inner.trim().to_string();
    let title = cite_title(inner).unwrap_or_else(|| scan(inner).0);
    (title.trim().to_string(), raw)
}

/// Value of the `title` parameter of the first template in `text`.
fn cite_title(text: &str) -> Option<String> {
    let start = text.find("{{")?;
    let body_len = matching_close(&text[start..], "{{", "}}")?;
    let body = &text[start + 2..start + body_len - 2];
    split_top_level(body).into_iter().skip(1).find_map(|param| {
        let (name, value) = param.split_once('=')?;
        (name.trim().eq_ignore_ascii_case("title")).then(|| scan(value).0.trim().to_string())
    })
}

/// Splits template content on `|` outside nested `{{ }}` / `[[ ]]`.
fn split_top_level(body: &str) -> Vec<&str> {
    let bytes = body.as_bytes();
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'{' | b'[' if bytes.get(i + 1) == Some(&bytes[i]) => {
                depth += 1;
                i += 2;
                continue;
            }
            b'}' | b']' if bytes.get(i + 1) == Some(&bytes[i]) => {
                depth -= 1;
                i += 2;
                continue;
            }
            b'|' if depth == 0 => {
                parts.push(&body[last..i]);
                last = i + 1;
            }
            _ => {}
        }
        i += 1;
    }
    parts.push(&body[last..]);
    parts
}

/// Length of the balanced `open … close` group at the start of `text`.
fn matching_close(text: &str, open: &str, close: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        if rest.starts_with(open) {
            depth += 1;
            i += open.len();
        } else if rest.starts_with(close) {
            depth = depth.checked_sub(1)?;
            i += close.len();
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    None
}

/// Plain text of a fragment plus the link and citation events found in it,
/// with offsets into the plain text.
fn scan(text: &str) -> (String, Vec<Event>) {
    let mut plain = String::with_capacity(text.len());
    let mut events = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        if rest.starts_with("<!--") {
            i += rest.find("-->").map_or(rest.len(), |e| e + 3);
        } else if starts_with_ci(rest, "<ref") && !starts_with_ci(rest, "<references") {
            let Some(tag_end) = rest.find('>') else {
                i = text.len();
                continue;
            };
            if rest[..tag_end].ends_with('/') {
                i += tag_end + 1;
                continue;
            }
            let body_start = tag_end + 1;
            let (inner, consumed) = match find_ci(&rest[body_start..], "</ref>") {
                Some(close) => (&rest[body_start..body_start + close], body_start + close + 6),
                None => (&rest[body_start..], rest.len()),
            };
            let (title, raw) = reference_title(inner);
            events.push(Event::Ref {
                title,
                raw,
                offset: plain.len(),
            });
            i += consumed;
        } else if rest.starts_with("{{") {
            i += matching_close(rest, "{{", "}}").unwrap_or(rest.len());
        } else if rest.starts_with("[[") {
            let len = matching_close(rest, "[[", "]]").unwrap_or(rest.len());
            let inner = rest[2..len.saturating_sub(2).max(2)].trim();
            i += len;
            let (target, label) = match inner.split_once('|') {
                Some((t, l)) => (t.trim(), l.trim()),
                None => (inner, inner),
            };
            if let Some((ns, _)) = target.split_once(':') {
                if SKIPPED_NAMESPACES.contains(&ns.trim().to_lowercase().as_str()) {
                    continue;
                }
            }
            let target = target.split('#').next().unwrap_or("").trim();
            if !target.is_empty() {
                events.push(Event::Link {
                    target: target.to_string(),
                    offset: plain.len(),
                });
            }
            let (label_plain, _) = scan(label);
            plain.push_str(&label_plain);
        } else if rest.starts_with('[') && !rest.starts_with("[[") {
            let close = rest.find(']').unwrap_or(rest.len());
            let inner = &rest[1..close];
            if let Some((_, label)) = inner.split_once(' ') {
                plain.push_str(&scan(label).0);
            }
            i += (close + 1).min(rest.len());
        } else if rest.starts_with("''") {
            i += rest.bytes().take_while(|&b| b == b'\'').count();
        } else if rest.starts_with('<') {
            i += rest.find('>').map_or(rest.len(), |e| e + 1);
        } else {
            let c = rest.chars().next().unwrap_or(' ');
            plain.push(c);
            i += c.len_utf8();
        }
    }
    (plain, events)
}

fn starts_with_ci(text: &str, prefix: &str) -> bool {
    text.len() >= prefix.len()
        && text.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
}

fn find_ci(text: &str, needle: &str) -> Option<usize> {
    (0..text.len())
        .filter(|&i| text.is_char_boundary(i))
        .find(|&i| starts_with_ci(&text[i..], needle))
}
