"""
Extraction of structured blocks from free-form LLM completions.

Models answer in Python-dict notation, often after restating the task, so
the last matching assignment in a completion wins. Blocks are located by
brace matching that skips string literals and ``#`` comments, then read
with ``ast.literal_eval`` after bare tokens (``GRB.INTEGER``,
``solution_3``) are quoted.
"""

import ast
import io
import logging
import re
import tokenize
from typing import Any, Dict, List, Optional, Pattern, Tuple

from autoform.errors import MalformedGroups, MalformedRank, MalformedResponse

logger = logging.getLogger("autoform.agents.parsing")

_BARE_TYPE = re.compile(r"\bGRB\.[A-Z_]+\b")
_BARE_SOLUTION = re.compile(r"\bsolution_\d+\b")
_FLOAT = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")
_SCORE = re.compile(r"\bscore\s*[:=]\s*([-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)")


def match_braces(text: str, start: int) -> int:
    """
    Index one past the brace closing the ``{`` at ``start``.

    Raises:
        MalformedResponse: The block never closes
    """
    depth = 0
    quote: Optional[str] = None
    i = start
    while i < len(text):
        ch = text[i]
        if quote:
            if ch == "\\":
                i += 2
                continue
            if text.startswith(quote, i):
                i += len(quote)
                quote = None
                continue
        elif ch == "#":
            newline = text.find("\n", i)
            i = len(text) if newline < 0 else newline
            continue
        elif ch in "\"'":
            quote = text[i:i + 3] if text[i:i + 3] in ('"""', "'''") else ch
            i += len(quote)
            continue
        elif ch in "{[(":
            depth += 1
        elif ch in "}])":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    raise MalformedResponse("unterminated block", text[start:start + 200])


def _outside_strings(text: str, pattern: Pattern, replace) -> str:
    """Apply ``pattern.sub`` only to code outside string literals and comments."""
    out: List[str] = []
    segment_start = 0
    quote: Optional[str] = None
    i = 0
    while i < len(text):
        ch = text[i]
        if quote:
            if ch == "\\":
                i += 2
                continue
            if text.startswith(quote, i):
                i += len(quote)
                out.append(text[segment_start:i])
                segment_start = i
                quote = None
                continue
        elif ch == "#":
            out.append(pattern.sub(replace, text[segment_start:i]))
            newline = text.find("\n", i)
            end = len(text) if newline < 0 else newline
            out.append(text[i:end])
            segment_start = i = end
            continue
        elif ch in "\"'":
            out.append(pattern.sub(replace, text[segment_start:i]))
            segment_start = i
            quote = text[i:i + 3] if text[i:i + 3] in ('"""', "'''") else ch
            i += len(quote)
            continue
        i += 1
    tail = text[segment_start:]
    out.append(tail if quote else pattern.sub(replace, tail))
    return "".join(out)


def _quote(match: "re.Match") -> str:
    return f'"{match.group(0)}"'


def literal_block(block: str) -> Any:
    """
    Evaluate a dict-literal block.

    Raises:
        MalformedResponse: The block is not a Python literal
    """
    source = _outside_strings(block, _BARE_TYPE, _quote)
    source = _outside_strings(source, _BARE_SOLUTION, _quote)
    try:
        return ast.literal_eval(source.strip())
    except (ValueError, SyntaxError, MemoryError, RecursionError) as e:
        raise MalformedResponse(f"block is not a Python literal: {e}", block[:200]) from e


def _last_block(text: str, head: Pattern) -> Optional[str]:
    """The last ``{...}`` that follows a match of ``head`` and closes."""
    for match in reversed(list(head.finditer(text))):
        brace = text.find("{", match.end())
        if brace < 0 or text[match.end():brace].strip():
            continue
        try:
            return text[brace:match_braces(text, brace)]
        except MalformedResponse:
            continue
    return None


def _assignment_head(key: str) -> Pattern:
    return re.compile(r"formalization_dict\s*\[\s*[\"']" + re.escape(key) + r"[\"']\s*\]\s*=")


_WHOLE_DICT_HEAD = re.compile(r"formalization_dict\s*=")


def extract_component(text: str, key: str) -> Tuple[Any, str]:
    """
    Find the component ``key`` in a completion.

    Tries ``formalization_dict["key"] = {...}`` first, then a full
    ``formalization_dict = {...}`` restatement containing the key.

    Returns:
        (parsed value, raw block text)

    Raises:
        MalformedResponse: No readable block for ``key``
    """
    if not text or not text.strip():
        raise MalformedResponse("empty response")
    block = _last_block(text, _assignment_head(key))
    if block is not None:
        return literal_block(block), block

    whole = _last_block(text, _WHOLE_DICT_HEAD)
    if whole is not None:
        data = literal_block(whole)
        if isinstance(data, dict) and key in data:
            start = whole.find(f'"{key}"')
            if start < 0:
                start = whole.find(f"'{key}'")
            return data[key], whole[start:] if start >= 0 else whole
    raise MalformedResponse(f"no formalization_dict[{key!r}] assignment found", text[:200])


def parameter_comments(block: str) -> Dict[str, str]:
    """
    Comments attached to top-level keys of a parameters block.

    A trailing comment on the key's line wins over comment lines directly
    above the key.
    """
    comments: Dict[str, str] = {}
    pending: List[str] = []
    depth = 0
    last_key: Optional[str] = None
    last_key_line = -1
    previous = None
    try:
        tokens = list(tokenize.generate_tokens(io.StringIO(block).readline))
    except (tokenize.TokenError, IndentationError, SyntaxError):
        return comments
    for tok in tokens:
        if tok.type == tokenize.OP and tok.string in "{[(":
            depth += 1
        elif tok.type == tokenize.OP and tok.string in "}])":
            depth -= 1
        elif tok.type == tokenize.COMMENT:
            text = tok.string.lstrip("#").strip()
            if last_key is not None and tok.start[0] == last_key_line:
                comments[last_key] = text
            elif depth == 1:
                pending.append(text)
        elif tok.type == tokenize.OP and tok.string == ":" and depth == 1 and previous is not None \
                and previous.type == tokenize.STRING:
            try:
                key = ast.literal_eval(previous.string)
            except (ValueError, SyntaxError):
                key = None
            if isinstance(key, str):
                last_key, last_key_line = key, previous.start[0]
                if pending:
                    comments[key] = " ".join(pending)
            pending = []
        if tok.type not in (tokenize.NL, tokenize.NEWLINE, tokenize.COMMENT):
            previous = tok
    return comments


def _solution_index(value: Any, k: int) -> int:
    if isinstance(value, bool):
        raise ValueError(value)
    if isinstance(value, int):
        index = value - 1
    else:
        match = re.fullmatch(r"\s*solution_(\d+)\s*", str(value))
        if not match:
            raise ValueError(value)
        index = int(match.group(1)) - 1
    if not 0 <= index < k:
        raise ValueError(value)
    return index


_RANK_HEAD = re.compile(r"\brank\s*=")
_GROUPS_HEAD = re.compile(r"\bgroups\s*=")


def parse_rank(text: str, k: int) -> List[int]:
    """
    Candidate indices (0-based) from best to worst.

    Raises:
        MalformedRank: No ``rank = {...}`` block or not a permutation of ``k`` candidates
    """
    block = _last_block(text or "", _RANK_HEAD)
    if block is None:
        raise MalformedRank("no rank block found", (text or "")[:200])
    try:
        data = literal_block(block)
    except MalformedResponse as e:
        raise MalformedRank(str(e), block) from e
    if not isinstance(data, dict):
        raise MalformedRank("rank block is not a dict", block)
    try:
        ordered = sorted(data.items(), key=lambda kv: int(kv[0]))
        order = [_solution_index(v, k) for _, v in ordered]
    except (TypeError, ValueError) as e:
        raise MalformedRank(f"unreadable rank entry {e}", block) from e
    if sorted(order) != list(range(k)) or [int(r) for r, _ in ordered] != list(range(1, k + 1)):
        raise MalformedRank(f"rank is not a permutation of {k} candidates", block)
    return order


def parse_groups(text: str, k: int) -> List[List[int]]:
    """
    Partition of candidate indices, each group sorted, groups ordered by
    their smallest member. Candidates the response leaves out become
    singletons.

    Raises:
        MalformedGroups: No ``groups = {...}`` block, an unknown name, or a candidate in two groups
    """
    block = _last_block(text or "", _GROUPS_HEAD)
    if block is None:
        raise MalformedGroups("no groups block found", (text or "")[:200])
    try:
        data = literal_block(block)
    except MalformedResponse as e:
        raise MalformedGroups(str(e), block) from e
    if not isinstance(data, dict):
        raise MalformedGroups("groups block is not a dict", block)

    seen: Dict[int, int] = {}
    groups: List[List[int]] = []
    for _, members in data.items():
        if not isinstance(members, (list, tuple, set)):
            members = [members]
        group: List[int] = []
        for m in members:
            try:
                index = _solution_index(m, k)
            except ValueError as e:
                raise MalformedGroups(f"unknown solution {e}", block) from e
            if index in seen:
                raise MalformedGroups(f"{m} appears in more than one group", block)
            seen[index] = len(groups)
            group.append(index)
        if group:
            groups.append(sorted(group))
    missing = [i for i in range(k) if i not in seen]
    if missing:
        logger.info(f"Grouping left out {len(missing)} candidate(s); treating them as singletons")
        groups.extend([i] for i in missing)
    return sorted(groups, key=lambda g: g[0])


def parse_score(text: str) -> float:
    """
    Comparative score: the last ``score = x`` line, else the first number.

    Raises:
        MalformedResponse: No number in the response
    """
    text = text or ""
    matches = _SCORE.findall(text)
    if matches:
        return float(matches[-1])
    match = _FLOAT.search(text)
    if match is None:
        raise MalformedResponse("no score in response", text[:200])
    return float(match.group(0))
