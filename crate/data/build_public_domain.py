#!/usr/bin/env python3
"""Rebuild data/public_domain.jsonl from Project Gutenberg plain texts.

The texts come from the `shakespeare` 0.6 source distribution on PyPI
(`pip download --no-deps shakespeare==0.6`), which vendors Gutenberg
editions of Shakespeare's poems and Milton's poetical works.

    python3 data/build_public_domain.py /path/to/shakespeare-0.6 > data/public_domain.jsonl

Every record keeps the whitespace of the source edition (indented couplets,
verse-paragraph indents). Editorial line numbers in the right margin and
trailing spaces are removed; nothing else is rewritten.
"""

import json
import re
import sys
from pathlib import Path

ROMAN = re.compile(r"^(?=[MDCLXVI])M*(C[MD]|D?C{0,3})(X[CL]|L?X{0,3})(I[XV]|V?I{0,3})\.?$")
LINE_NUMBER = re.compile(r"\s{3,}\d+\s*$")


def read(path):
    return Path(path).read_text(encoding="latin-1").replace("\r\n", "\n").replace("\r", "\n")


def clean_line(line):
    line = LINE_NUMBER.sub("", line)
    return line.rstrip()


def strip_blank_edges(lines):
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def record(rid, title, poet, born, form, tags, lines):
    body = "\n".join(strip_blank_edges([clean_line(l) for l in lines])) + "\n"
    return {
        "id": rid,
        "title": title,
        "poet": poet,
        "poet_birth_year": born,
        "form": form,
        "tags": sorted(tags),
        "source": "published",
        "body": body,
    }


def numbered_sections(text):
    """Split on lines holding only a roman numeral; yields (numeral, lines)."""
    current, lines = None, []
    for line in text.split("\n"):
        if ROMAN.match(line.strip()) and line.strip():
            if current is not None:
                yield current, lines
            current, lines = line.strip().rstrip("."), []
        elif current is not None:
            lines.append(line)
    if current is not None:
        yield current, lines


def to_roman(n):
    out = ""
    for value, sym in ((100, "C"), (90, "XC"), (50, "L"), (40, "XL"), (10, "X"), (9, "IX"),
                       (5, "V"), (4, "IV"), (1, "I")):
        while n >= value:
            out += sym
            n -= value
    return out


def shakespeare_sonnets(root):
    text = read(root / "shksprdata/texts/sonnets_gut.txt")
    # numbered by position: this edition prints CXXVIII as "CXXXIII"
    for n, (_, lines) in enumerate(numbered_sections(text), start=1):
        yield record(
            f"shakespeare-sonnet-{n}",
            f"Sonnet {to_roman(n)}",
            "William Shakespeare",
            1564,
            "sonnet",
            {"Sonnet", "Verse Forms"},
            lines,
        )


def passionate_pilgrim(root):
    text = read(root / "shksprdata/texts/passionate_pilgrim_gut.txt")
    for numeral, lines in numbered_sections(text):
        lines = strip_blank_edges(lines)
        if not lines:
            continue
        yield record(
            f"passionate-pilgrim-{numeral.lower()}",
            f"The Passionate Pilgrim, {numeral}",
            "William Shakespeare",
            1564,
            None,
            set(),
            lines,
        )


def whole_poem(root, name, rid, title, form, tags):
    text = read(root / f"shksprdata/texts/{name}.txt")
    lines = text.split("\n")
    # drop "TITLE / by William Shakespeare" header
    start = next(i for i, l in enumerate(lines) if l.startswith("by William Shakespeare")) + 1
    yield record(rid, title, "William Shakespeare", 1564, form, tags, lines[start:])


def milton_sonnets(root):
    text = read(root / "miltondata/texts/poems.txt")
    lines = text.split("\n")
    seen = set()
    for start in (i for i, l in enumerate(lines) if l.strip() == "SONNETS."):
        i = start + 1
        # both sonnet sections are shorter than this
        stop = min(len(lines), start + 450)
        while i < stop:
            m = re.match(r"^([XVI]+)\.?( .*)?$", lines[i].strip())
            i += 1
            if not (m and ROMAN.match(m.group(1))):
                continue
            numeral = m.group(1)
            # first 14-line block after the numeral is the sonnet; shorter
            # blocks are titles or editorial notes
            while i < stop:
                while i < stop and not lines[i].strip():
                    i += 1
                block = []
                while i < stop and lines[i].strip():
                    block.append(lines[i])
                    i += 1
                if len(block) == 14 or not block or ROMAN.match(block[0].strip().split(" ")[0]):
                    break
            if len(block) == 14 and numeral not in seen:
                seen.add(numeral)
                yield record(
                    f"milton-sonnet-{numeral.lower()}",
                    f"Sonnet {numeral}",
                    "John Milton",
                    1608,
                    "sonnet",
                    {"Sonnet", "Verse Forms"},
                    block,
                )


ENGLISH_HINT = re.compile(r"\b(the|and|thy|thou|of|to)\b", re.IGNORECASE)


def verse_paragraphs(lines):
    """Split blank verse into verse paragraphs at lines opened by an indent."""
    para = []
    for line in lines:
        if not line.strip():
            continue
        if line.startswith("  ") and para:
            yield para
            para = []
        para.append(line)
    if para:
        yield para


def paradise(root, name, slug, title, book_re, end_re):
    text = read(root / f"miltondata/texts/{name}")
    book, book_lines, books = None, [], []
    for line in text.split("\n"):
        if re.match(book_re, line.strip()):
            if book is not None:
                books.append((book, book_lines))
            book, book_lines = line.strip().rstrip("."), []
        elif re.match(end_re, line.strip()):
            continue
        elif book is not None:
            book_lines.append(line)
    if book is not None:
        books.append((book, book_lines))
    for b, (book, blines) in enumerate(books, start=1):
        for p, para in enumerate(verse_paragraphs(blines), start=1):
            yield record(
                f"{slug}-{b}-{p}",
                f"{title}, {book.title()} ({p})",
                "John Milton",
                1608,
                "blank-verse",
                {"Blank Verse", "Verse Forms", "Excerpt"},
                para,
            )


def main():
    root = Path(sys.argv[1])
    poems = []
    poems += shakespeare_sonnets(root)
    poems += passionate_pilgrim(root)
    poems += whole_poem(root, "lovers_complaint_gut", "lovers-complaint", "A Lover's Complaint",
                        "rhyme-royal", {"Verse Forms"})
    poems += whole_poem(root, "phoenix_and_the_turtle_gut", "phoenix-and-the-turtle",
                        "The Phoenix and the Turtle", None, set())
    poems += [p for p in milton_sonnets(root) if ENGLISH_HINT.search(p["body"])]
    poems += paradise(root, "paradise_lost_(no_introduction)_gut.txt", "paradise-lost",
                      "Paradise Lost", r"^BOOK [IVX]+\.?$", r"^THE END")
    poems += paradise(root, "paradise_regained_gut.txt", "paradise-regained",
                      "Paradise Regained", r"^THE [A-Z]+ BOOK$", r"^THE END")
    ids = set()
    for p in poems:
        assert p["id"] not in ids, p["id"]
        ids.add(p["id"])
        sys.stdout.write(json.dumps(p, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
