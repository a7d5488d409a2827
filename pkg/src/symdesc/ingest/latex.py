"""Strip LaTeX markup from text while keeping math mode verbatim.

The output carries a map from every output character back to the index of
the input character that produced it, so annotations survive the round trip.
"""

from __future__ import annotations

import re
import warnings

import numpy as np

from ..errors import UnbalancedMathWarning

MATH_ENVIRONMENTS = frozenset(
    name + star
    for name in (
        "equation", "align", "alignat", "flalign", "gather", "multline",
        "eqnarray", "math", "displaymath", "split",
    )
    for star in ("", "*")
)

# macro name -> number of mandatory arguments to discard together with it
DISCARD_ARGS = {
    "cite": 1, "citep": 1, "citet": 1, "citealp": 1, "citeauthor": 1, "nocite": 1,
    "ref": 1, "eqref": 1, "autoref": 1, "cref": 1, "Cref": 1, "pageref": 1,
    "label": 1, "url": 1, "includegraphics": 1, "bibliography": 1,
    "bibliographystyle": 1, "input": 1, "include": 1, "vspace": 1, "hspace": 1,
    "usepackage": 1, "documentclass": 1, "newcommand": 2, "renewcommand": 2,
    "setlength": 2, "href": 1,
}

REPLACEMENTS = {
    "ldots": "...", "dots": "...", "LaTeX": "LaTeX", "TeX": "TeX",
    "textbackslash": "\\", "S": "\u00a7", "dag": "\u2020", "ss": "\u00df",
    "quad": " ", "qquad": " ", "newline": "\n", "par": "\n",
}

ESCAPED = set("%$&#_{}")
_CONTROL_WORD = re.compile(r"[A-Za-z@]+\*?")
_ENV_NAME = re.compile(r"\\(begin|end)\s*\{([^{}]*)\}")


def _skip_escaped(text, i):
    return i + 2 if text[i] == "\\" else i + 1


def _find_closer(text, start, closer):
    """Index of ``closer`` at or after ``start``, skipping escaped characters."""
    i = start
    n = len(text)
    while i < n:
        if text.startswith(closer, i):
            return i
        i = _skip_escaped(text, i)
    return -1


def _find_dollar_closer(text, start, double):
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "$":
            if double:
                if text.startswith("$$", i):
                    return i
            elif not text.startswith("$$", i):
                return i
            else:
                # "$$" inside inline math is malformed; treat the first as closer
                return i
        i += 1
    return -1


def _skip_group(text, i):
    """Given ``text[i] == '{'``, return the index just past the matching brace."""
    depth = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            i += 2
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return n


def _skip_optional(text, i):
    n = len(text)
    while i < n and text[i] == "[":
        close = _find_closer(text, i + 1, "]")
        if close < 0:
            return i
        i = close + 1
    return i


def _skip_spaces(text, i):
    n = len(text)
    while i < n and text[i] in " \t":
        i += 1
    return i


def latex_to_text(text: str) -> tuple[str, np.ndarray]:
    """Remove LaTeX commands from text portions of ``text``.

    Returns ``(clean_text, char_map)`` where ``char_map[i]`` is the index into
    ``text`` of the character that produced ``clean_text[i]``. The map is
    monotone non-decreasing. Math segments (``$..$``, ``$$..$$``, ``\\(..\\)``,
    ``\\[..\\]`` and math environments) are copied unchanged. An unbalanced
    opening delimiter emits :class:`UnbalancedMathWarning` and is copied
    through as ordinary text.
    """
    out_chars: list[str] = []
    out_map: list[int] = []

    def emit(s, src):
        for ch in s:
            out_chars.append(ch)
            out_map.append(src)

    def copy(lo, hi):
        out_chars.extend(text[lo:hi])
        out_map.extend(range(lo, hi))

    n = len(text)
    i = 0
    while i < n:
        ch = text[i]

        if ch == "%":
            nl = text.find("\n", i)
            i = n if nl < 0 else nl
            continue

        if ch == "$":
            double = text.startswith("$$", i)
            width = 2 if double else 1
            close = _find_dollar_closer(text, i + width, double)
            if close < 0:
                warnings.warn(f"unbalanced math delimiter at offset {i}",
                              UnbalancedMathWarning, stacklevel=2)
                copy(i, i + width)
                i += width
                continue
            copy(i, close + width)
            i = close + width
            continue

        if ch == "\\" and i + 1 < n:
            nxt = text[i + 1]
            if nxt in "([":
                closer = "\\)" if nxt == "(" else "\\]"
                close = _find_closer(text, i + 2, closer)
                if close < 0:
                    warnings.warn(f"unbalanced math delimiter at offset {i}",
                                  UnbalancedMathWarning, stacklevel=2)
                    copy(i, i + 2)
                    i += 2
                    continue
                copy(i, close + 2)
                i = close + 2
                continue

            env = _ENV_NAME.match(text, i)
            if env:
                kind, name = env.group(1), env.group(2).strip()
                if kind == "begin" and name in MATH_ENVIRONMENTS:
                    end_pat = re.compile(r"\\end\s*\{\s*" + re.escape(name) + r"\s*\}")
                    m_end = end_pat.search(text, env.end())
                    if m_end is None:
                        warnings.warn(f"unbalanced math environment {name!r} at offset {i}",
                                      UnbalancedMathWarning, stacklevel=2)
                        copy(i, env.end())
                        i = env.end()
                        continue
                    copy(i, m_end.end())
                    i = m_end.end()
                    continue
                i = env.end()
                if kind == "begin":
                    i = _skip_optional(text, i)
                    if name in ("tabular", "tabular*", "tabularx", "minipage", "array"):
                        if i < n and text[i] == "{":
                            i = _skip_group(text, i)
                continue

            word = _CONTROL_WORD.match(text, i + 1)
            if word:
                name = word.group(0).rstrip("*")
                j = word.end()
                if name in DISCARD_ARGS:
                    j = _skip_optional(text, _skip_spaces(text, j))
                    for _ in range(DISCARD_ARGS[name]):
                        j = _skip_spaces(text, j)
                        if j < n and text[j] == "{":
                            j = _skip_group(text, j)
                    i = j
                    continue
                if name in REPLACEMENTS:
                    emit(REPLACEMENTS[name], i)
                # TeX swallows spaces after a control word
                j = _skip_spaces(text, j)
                if j < n and text[j] == "[" and name in ("item", "section", "subsection",
                                                         "caption", "footnote"):
                    j = _skip_optional(text, j)
                i = j
                continue

            if nxt in ESCAPED:
                copy(i + 1, i + 2)
            elif nxt == "\\":
                emit("\n", i)
            elif nxt in " ,;:":
                emit(" ", i)
            elif nxt == "\n":
                copy(i + 1, i + 2)
            # accents and other control symbols are dropped
            i += 2
            continue

        if ch in "{}":
            i += 1
            continue
        if ch == "~":
            emit(" ", i)
            i += 1
            continue

        copy(i, i + 1)
        i += 1

    return "".join(out_chars), np.asarray(out_map, dtype=np.int64)


def identity_map(text: str) -> np.ndarray:
    return np.arange(len(text), dtype=np.int64)


def project_span(char_map: np.ndarray, start: int, end: int) -> tuple[int, int] | None:
    """Map an original-text span ``[start, end)`` into clean-text coordinates.

    Returns ``None`` when every character of the span was removed.
    """
    lo = int(np.searchsorted(char_map, start, side="left"))
    hi = int(np.searchsorted(char_map, end, side="left"))
    if lo >= hi:
        return None
    return lo, hi


def unproject_span(char_map: np.ndarray, start: int, end: int) -> tuple[int, int]:
    """Map a clean-text span back to original-text coordinates."""
    return int(char_map[start]), int(char_map[end - 1]) + 1
