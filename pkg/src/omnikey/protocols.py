"""Concrete linear broadcast protocols over small finite fields.

A protocol fixes, for each transmission, a sender and a coefficient row
over the message coordinates; secret key protocols add key rows that every
client must be able to reproduce while an eavesdropper who only hears the
transmissions learns nothing about them.  Synthesis searches structured
rows first (powers of distinct field elements), then seeded random rows,
escalating the field order until the algebraic checks pass.

Vector protocols split every message into a fixed number of components
over a smaller field; coordinate 2*i + c is component c of message i + 1
when the dimension is 2.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from itertools import count
from typing import Iterator, Sequence

from .errors import (
    InfeasibleError,
    InputFormatError,
    SynthesisExhaustedError,
)
from .fields import (
    MAX_ORDER,
    Field,
    Matrix,
    complete_basis,
    field_from_order,
    identity_rows,
    make_field,
    rank,
    solve_combination,
)
from .network import MessageFamily, make_gap, restrict
from .omniscience import min_broadcasts
from .secrecy import min_key_support

__all__ = [
    "LinearProtocol",
    "VectorLinearProtocol",
    "synth_omniscience",
    "synth_sk",
    "synth_chain",
    "split_gap_protocol",
    "algebraic_issues",
    "check_omniscience",
    "check_secret_key",
    "evaluate_rows",
    "decode_messages",
    "compute_key",
    "protocol_to_json",
    "protocol_from_json",
]

_MAX_ATTEMPTS = 64
_TRIES_PER_FIELD = 8

_KINDS = ("omniscience", "secret-key")


def _check_rows(field: Field, rows, width: int, what: str) -> None:
    for r in rows:
        if len(r) != width:
            raise InputFormatError(f"{what} must have {width} coordinates")
        for v in r:
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < field.q:
                raise InputFormatError(f"{what} entries must be field codes below {field.q}")


def _common_validate(p) -> None:
    if p.n < 1 or p.m < 1:
        raise InputFormatError("protocol needs at least one client and one message")
    if p.kind not in _KINDS:
        raise InputFormatError(f"unknown protocol kind {p.kind!r}")
    if len(p.rows) != p.dim * len(p.senders):
        raise InputFormatError("row count must be dimension times transmission count")
    for s in p.senders:
        if not 1 <= s <= p.n:
            raise InputFormatError(f"sender {s} is not a client")
    width = p.m * p.dim
    _check_rows(p.field, p.rows, width, "transmission rows")
    _check_rows(p.field, p.key_rows, width, "key rows")
    if p.kind == "omniscience" and p.key_rows:
        raise InputFormatError("omniscience protocols carry no key rows")
    if p.kind == "secret-key" and not p.key_rows:
        raise InputFormatError("secret key protocols need at least one key row")
    if not p.support:
        object.__setattr__(p, "support", tuple(range(1, p.m + 1)))
    if list(p.support) != sorted(set(p.support)) or not all(
        1 <= s <= p.m for s in p.support
    ):
        raise InputFormatError("support must list distinct message labels in order")


@dataclass(frozen=True)
class LinearProtocol:
    """One field symbol per message; each transmission is a single row."""

    field: Field
    n: int
    m: int
    kind: str
    senders: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    key_rows: tuple[tuple[int, ...], ...] = ()
    support: tuple[int, ...] = dc_field(default=())

    def __post_init__(self) -> None:
        _common_validate(self)

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class VectorLinearProtocol:
    """`dim` field symbols per message; each transmission is `dim` rows."""

    field: Field
    dim: int
    n: int
    m: int
    kind: str
    senders: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    key_rows: tuple[tuple[int, ...], ...] = ()
    support: tuple[int, ...] = dc_field(default=())

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InputFormatError("dimension must be at least 1")
        _common_validate(self)


Protocol = LinearProtocol | VectorLinearProtocol


# ---------------------------------------------------------------------------
# algebraic checks
# ---------------------------------------------------------------------------


def _positions(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _client_cols(fam: MessageFamily, client: int, dim: int) -> list[int]:
    cols = []
    for i in _positions(fam.masks[client - 1]):
        cols.extend(range(i * dim, i * dim + dim))
    return cols


def algebraic_issues(protocol: Protocol, fam: MessageFamily) -> list[str]:
    """Every check failure as a message; an empty list means the protocol
    is sound for this family."""
    if protocol.n != fam.n or protocol.m != fam.m:
        raise InputFormatError("protocol shape does not match the family")
    field = protocol.field
    dim = protocol.dim
    width = protocol.m * dim
    issues: list[str] = []
    for t, sender in enumerate(protocol.senders):
        allowed = set(_client_cols(fam, sender, dim))
        for d in range(dim):
            row = protocol.rows[t * dim + d]
            if any(v and c not in allowed for c, v in enumerate(row)):
                issues.append(
                    f"transmission {t + 1} uses messages its sender {sender} does not hold"
                )
                break
    trans = [list(r) for r in protocol.rows]
    if protocol.kind == "omniscience":
        for j in range(1, fam.n + 1):
            stack = identity_rows(width, _client_cols(fam, j, dim)) + trans
            if rank(Matrix(field, stack)) != width:
                issues.append(f"client {j} cannot decode every message")
    else:
        keys = [list(r) for r in protocol.key_rows]
        if rank(Matrix(field, trans + keys)) != rank(Matrix(field, trans)) + len(keys):
            issues.append("the keys leak through the transmissions")
        for j in range(1, fam.n + 1):
            stack = Matrix(field, identity_rows(width, _client_cols(fam, j, dim)) + trans)
            for i, key in enumerate(keys):
                if solve_combination(stack, key) is None:
                    issues.append(f"client {j} cannot derive key {i + 1}")
    return issues


def check_omniscience(protocol: Protocol, fam: MessageFamily) -> bool:
    """True iff every client can decode every message from own holdings
    plus the transmissions, each sent from messages its sender holds."""
    if protocol.kind != "omniscience":
        raise InputFormatError("not an omniscience protocol")
    return not algebraic_issues(protocol, fam)


def check_secret_key(protocol: Protocol, fam: MessageFamily) -> bool:
    """True iff all clients reproduce all keys and the keys stay jointly
    uniform given everything that was broadcast."""
    if protocol.kind != "secret-key":
        raise InputFormatError("not a secret key protocol")
    return not algebraic_issues(protocol, fam)


# ---------------------------------------------------------------------------
# applying a protocol to concrete values
# ---------------------------------------------------------------------------


def evaluate_rows(field: Field, rows: Sequence[Sequence[int]], values: Sequence[int]) -> list[int]:
    """Row-by-row inner products; `values` holds all message coordinates."""
    out = []
    for row in rows:
        acc = 0
        for c, v in zip(row, values):
            if c:
                acc = field.add(acc, field.mul(c, v))
        out.append(acc)
    return out


def _own_values_stack(protocol: Protocol, fam: MessageFamily, client: int, own, received):
    if not 1 <= client <= fam.n:
        raise InputFormatError(f"client {client} is not in the family")
    cols = _client_cols(fam, client, protocol.dim)
    if len(own) != len(cols):
        raise InputFormatError(
            f"client {client} holds {len(cols)} coordinates, got {len(own)}"
        )
    if len(received) != len(protocol.rows):
        raise InputFormatError("received values must cover every transmission row")
    width = protocol.m * protocol.dim
    stack = identity_rows(width, cols) + [list(r) for r in protocol.rows]
    values = list(own) + list(received)
    return stack, values


def decode_messages(
    protocol: Protocol, fam: MessageFamily, client: int, own, received
) -> tuple[int, ...]:
    """All message coordinates as seen by one client after the protocol."""
    if protocol.kind != "omniscience":
        raise InputFormatError("only omniscience protocols decode every message")
    stack, values = _own_values_stack(protocol, fam, client, own, received)
    field = protocol.field
    width = protocol.m * protocol.dim
    aug = [row + [val] for row, val in zip(stack, values)]
    pivot_of = [-1] * width
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = field.inv(aug[r][c])
        aug[r] = [field.mul(inv, v) for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [field.sub(v, field.mul(f, w)) for v, w in zip(aug[i], aug[r])]
        pivot_of[c] = r
        r += 1
    if any(p < 0 for p in pivot_of):
        raise InfeasibleError(f"client {client} cannot decode from this protocol")
    for row in aug[r:]:
        if row[-1] != 0:
            raise InputFormatError("the given values contradict each other")
    return tuple(aug[pivot_of[c]][-1] for c in range(width))


def compute_key(
    protocol: Protocol, fam: MessageFamily, client: int, own, received
) -> tuple[int, ...]:
    """The key coordinates as computed by one client."""
    if protocol.kind != "secret-key":
        raise InputFormatError("only secret key protocols produce keys")
    stack, values = _own_values_stack(protocol, fam, client, own, received)
    field = protocol.field
    mat = Matrix(field, stack)
    out = []
    for i, key in enumerate(protocol.key_rows):
        coeffs = solve_combination(mat, list(key))
        if coeffs is None:
            raise InfeasibleError(f"client {client} cannot derive key {i + 1}")
        acc = 0
        for c, v in zip(coeffs, values):
            if c:
                acc = field.add(acc, field.mul(c, v))
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------


def _field_ladder() -> Iterator[Field]:
    for q in count(2):
        if q > MAX_ORDER:
            return
        try:
            yield field_from_order(q)
        except InputFormatError:
            continue


def _vander_rows(field: Field, col_sets, width: int) -> list[list[int]] | None:
    if field.q <= len(col_sets):
        return None
    rows = []
    for r, cols in enumerate(col_sets):
        alpha = r + 1
        row = [0] * width
        for c in cols:
            row[c] = field.pow(alpha, c)
        rows.append(row)
    return rows


def _random_rows(field: Field, col_sets, width: int, rng: random.Random) -> list[list[int]]:
    rows = []
    for cols in col_sets:
        row = [0] * width
        for c in cols:
            row[c] = rng.randrange(field.q)
        if all(row[c] == 0 for c in cols):
            row[rng.choice(cols)] = rng.randrange(1, field.q)
        rows.append(row)
    return rows


def _search_rows(col_sets, hold_cols, width, row_rank, seed, fields=None):
    """Coefficient rows letting every client reach full width, found by
    escalating fields (or within `fields` only); returns (field, rows)."""
    rng = random.Random(seed)
    attempts = 0
    for field in fields if fields is not None else _field_ladder():
        candidates = []
        vander = _vander_rows(field, col_sets, width)
        if vander is not None:
            candidates.append(vander)
        candidates.extend(
            _random_rows(field, col_sets, width, rng) for _ in range(_TRIES_PER_FIELD)
        )
        for rows in candidates:
            if attempts >= _MAX_ATTEMPTS:
                raise SynthesisExhaustedError(
                    f"no decodable coefficient rows after {attempts} attempts"
                )
            attempts += 1
            if row_rank is not None and rank(Matrix(field, [list(r) for r in rows])) != row_rank:
                continue
            good = all(
                rank(Matrix(field, identity_rows(width, cols) + [list(r) for r in rows]))
                == width
                for cols in hold_cols
            )
            if good:
                return field, rows
    raise SynthesisExhaustedError(
        f"no decodable coefficient rows after {attempts} attempts"
    )


def _expand_allocation(allocation: Sequence[int]) -> tuple[int, ...]:
    out = []
    for j, a in enumerate(allocation):
        out.extend([j + 1] * a)
    return tuple(out)


def _as_field(field: Field | int) -> Field:
    if isinstance(field, Field):
        return field
    return field_from_order(field)


def synth_omniscience(
    fam: MessageFamily, seed: int = 0, field: Field | int | None = None
) -> LinearProtocol:
    """Protocol meeting the exact minimum broadcast count for the family.

    Coefficients come from the smallest workable field unless `field`
    pins one down."""
    forced = None if field is None else _as_field(field)
    res = min_broadcasts(fam)
    senders = _expand_allocation(res.allocation)
    if not senders:
        got = forced if forced is not None else make_field(2)
        return LinearProtocol(got, fam.n, fam.m, "omniscience", (), ())
    width = fam.m
    col_sets = [_positions(fam.masks[s - 1]) for s in senders]
    hold_cols = [_positions(mask) for mask in fam.masks]
    got, rows = _search_rows(
        col_sets, hold_cols, width, None, seed,
        None if forced is None else [forced],
    )
    proto = LinearProtocol(
        got, fam.n, fam.m, "omniscience", senders, tuple(tuple(r) for r in rows)
    )
    assert check_omniscience(proto, fam)
    return proto


def synth_sk(
    fam: MessageFamily,
    tau: int,
    seed: int = 0,
    field: Field | int | None = None,
) -> LinearProtocol:
    """Minimum-transmission protocol agreeing on tau keys.

    Runs omniscience on the smallest supporting message subset, then
    completes the transmission rows to a basis; the completion rows are
    the keys.  `field` pins the coefficient field instead of escalating
    from GF(2)."""
    if tau < 1:
        raise InputFormatError("tau must be positive")
    forced = None if field is None else _as_field(field)
    support = min_key_support(fam, tau)
    if support is None:
        raise InfeasibleError(f"the family cannot agree on {tau} keys")
    sub = restrict(fam, support)
    res = min_broadcasts(sub)
    assert res.total == sub.m - tau
    senders = _expand_allocation(res.allocation)
    w = sub.m
    sup_pos = fam.label_positions(support)

    def embed(row_w: Sequence[int]) -> tuple[int, ...]:
        row = [0] * fam.m
        for i, c in enumerate(sup_pos):
            row[c] = row_w[i]
        return tuple(row)

    if not senders:
        got = forced if forced is not None else make_field(2)
        rows_w: list[list[int]] = []
    else:
        col_sets = [_positions(sub.masks[s - 1]) for s in senders]
        hold_cols = [_positions(mask) for mask in sub.masks]
        got, rows_w = _search_rows(
            col_sets, hold_cols, w, len(senders), seed,
            None if forced is None else [forced],
        )
    keys_w = complete_basis(Matrix(got, [list(r) for r in rows_w]), tau)
    proto = LinearProtocol(
        got,
        fam.n,
        fam.m,
        "secret-key",
        senders,
        tuple(embed(r) for r in rows_w),
        tuple(embed(r) for r in keys_w),
        support,
    )
    assert check_secret_key(proto, fam)
    return proto


def synth_chain(fam: MessageFamily) -> LinearProtocol:
    """One key from m - 1 binary sums walking the message adjacency.

    Two messages are adjacent when some client holds both; each newly
    reached message is announced as the sum with the message it was
    reached from, sent by a shared holder.  The first message is the key:
    every sum has even weight, so the key stays outside their span."""
    for j, mask in enumerate(fam.masks, start=1):
        if mask == 0:
            raise InfeasibleError(f"client {j} holds nothing and cannot join")
    m = fam.m
    visited = [False] * m
    visited[0] = True
    frontier = [0]
    rows: list[tuple[int, ...]] = []
    senders: list[int] = []
    while frontier:
        nxt: list[int] = []
        for a in frontier:
            bit = 1 << a
            for j in range(fam.n):
                if not fam.masks[j] & bit:
                    continue
                for b in _positions(fam.masks[j]):
                    if not visited[b]:
                        visited[b] = True
                        row = [0] * m
                        row[a] = 1
                        row[b] = 1
                        rows.append(tuple(row))
                        senders.append(j + 1)
                        nxt.append(b)
        frontier = nxt
    if not all(visited):
        raise InfeasibleError("the messages do not form one connected exchange")
    key = tuple(1 if i == 0 else 0 for i in range(m))
    proto = LinearProtocol(
        make_field(2), fam.n, fam.m, "secret-key", tuple(senders), tuple(rows), (key,)
    )
    assert check_secret_key(proto, fam)
    return proto


def split_gap_protocol(m: int) -> VectorLinearProtocol:
    """Half-rate key protocol for the family where one client holds all m
    messages and every pair of messages has a dedicated holder.

    Each message splits into two components; mixing component pairs into
    derived symbols turns the broadcasts into evaluations of one low-degree
    polynomial, so any client holding two messages can interpolate the rest
    and rebuild the key from m/2 - 1 vector transmissions instead of m - 2
    scalar ones."""
    if m < 4 or m % 2:
        raise InputFormatError("the pair-holder family needs an even m of at least 4")
    if m == 4:
        field = make_field(2, 2)
    else:
        q = m - 1
        while True:
            try:
                field = field_from_order(q)
                break
            except InputFormatError:
                q += 1
    n = m * (m - 1) // 2 + 1
    width = 2 * m
    use_inf = field.q == m - 1
    finite = m - 1 if use_inf else m

    def mixed_row(wrow: Sequence[int]) -> tuple[int, ...]:
        # W_i = X_i^(0) + alpha_i * X_i^(1); the last message maps to the
        # evaluation at infinity when the field is one element short.
        row = [0] * width
        for i in range(finite):
            wi = wrow[i]
            if wi:
                row[2 * i] = wi
                row[2 * i + 1] = field.mul(wi, i)
        if use_inf and wrow[m - 1]:
            row[2 * (m - 1) + 1] = wrow[m - 1]
        return tuple(row)

    wrows = []
    for ell in range(m - 2):
        wrow = [field.pow(alpha, ell) for alpha in range(finite)]
        if use_inf:
            wrow.append(1 if ell == m - 3 else 0)
        wrows.append(wrow)
    keys_w = complete_basis(Matrix(field, [list(r) for r in wrows]), 2)
    proto = VectorLinearProtocol(
        field,
        2,
        n,
        m,
        "secret-key",
        (1,) * (m // 2 - 1),
        tuple(mixed_row(r) for r in wrows),
        tuple(mixed_row(r) for r in keys_w),
    )
    assert check_secret_key(proto, make_gap(m))
    return proto


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def protocol_to_json(protocol: Protocol) -> str:
    """Canonical JSON; parsing it back reproduces the exact object."""
    dim = protocol.dim
    groups = [
        protocol.rows[t * dim : (t + 1) * dim] for t in range(len(protocol.senders))
    ]
    data = {
        "kind": protocol.kind,
        "clients": protocol.n,
        "messages": protocol.m,
        "dimension": dim,
        "field": protocol.field.to_dict(),
        "support": list(protocol.support),
        "transmissions": [
            {"sender": s, "rows": [list(r) for r in g]}
            for s, g in zip(protocol.senders, groups)
        ],
        "keys": [list(r) for r in protocol.key_rows],
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def protocol_from_json(text: str) -> Protocol:
    """Inverse of protocol_to_json, with strict validation."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"not valid JSON: {exc}") from exc
    expected = {
        "kind",
        "clients",
        "messages",
        "dimension",
        "field",
        "support",
        "transmissions",
        "keys",
    }
    if not isinstance(data, dict) or set(data) != expected:
        raise InputFormatError(f"protocol object must have exactly the keys {sorted(expected)}")
    if not isinstance(data["field"], dict):
        raise InputFormatError("field must be an object")
    field = Field.from_dict(data["field"])
    for key in ("dimension", "clients", "messages"):
        v = data[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise InputFormatError(f"{key} must be a positive integer")
    dim = data["dimension"]
    if not isinstance(data["transmissions"], list):
        raise InputFormatError("transmissions must be a list")
    senders = []
    rows: list[tuple[int, ...]] = []
    for entry in data["transmissions"]:
        if (
            not isinstance(entry, dict)
            or set(entry) != {"sender", "rows"}
            or not isinstance(entry["rows"], list)
            or not isinstance(entry["sender"], int)
            or isinstance(entry["sender"], bool)
        ):
            raise InputFormatError('each transmission needs "sender" and "rows"')
        if len(entry["rows"]) != dim:
            raise InputFormatError("each transmission needs one row per dimension")
        senders.append(entry["sender"])
        for r in entry["rows"]:
            if not isinstance(r, list):
                raise InputFormatError("rows must be lists")
            rows.append(tuple(r))
    if not isinstance(data["keys"], list) or any(
        not isinstance(r, list) for r in data["keys"]
    ):
        raise InputFormatError("keys must be a list of rows")
    keys = tuple(tuple(r) for r in data["keys"])
    if not isinstance(data["support"], list):
        raise InputFormatError("support must be a list")
    try:
        if dim == 1:
            return LinearProtocol(
                field,
                data["clients"],
                data["messages"],
                data["kind"],
                tuple(senders),
                tuple(rows),
                keys,
                tuple(data["support"]),
            )
        return VectorLinearProtocol(
            field,
            dim,
            data["clients"],
            data["messages"],
            data["kind"],
            tuple(senders),
            tuple(rows),
            keys,
            tuple(data["support"]),
        )
    except TypeError as exc:
        raise InputFormatError(f"malformed protocol: {exc}") from exc
