# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Exact arithmetic for the circuit matrices M1..M5 of the modified Schwarz map.

A GaussianMatrix is a 4x4 matrix F = re + i im with machine-integer parts. The group generated
by M1..M5 consists of the matrices

    i**(-n1 + n2) [[G, 0], [L, J2**(n1 + n2)]]

with G in the Igusa group, integral L whose row sums are congruent to n1 mod 2, and
J2 = [[0, -1], [1, 0]]. Membership reads (n1, n2) off the lower right block.
"""

import json
import logging
import re
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from errors import CapacityError, ConfigError, DomainError, NotMember, SchwarzError

logger = logging.getLogger(__name__)

MAX_BFS_ELEMENTS = 10**6
MAX_WORD_LENGTH = 10
_ENTRY_LIMIT = 2**62

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]

J2 = np.array([[0, -1], [1, 0]], dtype=np.int64)
E2 = np.eye(2, dtype=np.int64)


@dataclass(frozen=True)
class GaussianMatrix:
    """A 4x4 Gaussian integer matrix, stored as flattened real and imaginary parts."""

    re: Tuple[int, ...]
    im: Tuple[int, ...]

    def __post_init__(self):
        if len(self.re) != 16 or len(self.im) != 16:
            raise DomainError("a GaussianMatrix has 16 entries")
        object.__setattr__(self, "re", tuple(int(v) for v in self.re))
        object.__setattr__(self, "im", tuple(int(v) for v in self.im))

    @classmethod
    def from_arrays(cls, re_part, im_part=None) -> "GaussianMatrix":
        re_part = np.asarray(re_part, dtype=np.int64)
        im_part = np.zeros_like(re_part) if im_part is None else np.asarray(im_part, np.int64)
        return cls(tuple(re_part.ravel().tolist()), tuple(im_part.ravel().tolist()))

    @classmethod
    def with_phase(cls, phase: int, integer_part) -> "GaussianMatrix":
        """The matrix i**phase * integer_part."""
        integer_part = np.asarray(integer_part, dtype=np.int64)
        zero = np.zeros_like(integer_part)
        re_part, im_part = {
            0: (integer_part, zero),
            1: (zero, integer_part),
            2: (-integer_part, zero),
            3: (zero, -integer_part),
        }[phase % 4]
        return cls.from_arrays(re_part, im_part)

    @property
    def real(self) -> np.ndarray:
        return np.array(self.re, dtype=np.int64).reshape(4, 4)

    @property
    def imag(self) -> np.ndarray:
        return np.array(self.im, dtype=np.int64).reshape(4, 4)

    def phase_form(self) -> Optional[Tuple[int, np.ndarray]]:
        """(e, X) with self = i**e X, e in {0, 1} and X integral, or None for mixed entries."""
        if not any(self.im):
            return 0, self.real
        if not any(self.re):
            return 1, self.imag
        return None

    def to_complex(self) -> np.ndarray:
        return self.real + 1j * self.imag

    def __matmul__(self, other: "GaussianMatrix") -> "GaussianMatrix":
        a, b, c, d = self.real, self.imag, other.real, other.imag
        bound = 8 * max(1, int(np.abs(np.concatenate([self.re, self.im])).max()))
        bound *= max(1, int(np.abs(np.concatenate([other.re, other.im])).max()))
        if bound >= _ENTRY_LIMIT:
            raise CapacityError("Gaussian matrix product would overflow machine integers")
        return GaussianMatrix.from_arrays(a @ c - b @ d, a @ d + b @ c)

    def __neg__(self) -> "GaussianMatrix":
        return GaussianMatrix.from_arrays(-self.real, -self.imag)

    def inverse(self) -> "GaussianMatrix":
        """Exact inverse; the matrix must be unimodular over the Gaussian integers."""
        a, b = self.real, self.imag
        embedded = np.block([[a, -b], [b, a]]).astype(float)
        try:
            rounded = np.rint(np.linalg.inv(embedded)).astype(np.int64)
        except np.linalg.LinAlgError as e:
            raise DomainError("matrix is singular") from e
        candidate = GaussianMatrix.from_arrays(rounded[:4, :4], rounded[4:, :4])
        if self @ candidate != IDENTITY:
            raise DomainError("matrix has no inverse over the Gaussian integers")
        return candidate

    def sort_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return self.re, self.im


IDENTITY = GaussianMatrix.from_arrays(np.eye(4, dtype=np.int64))
MINUS_IDENTITY = -IDENTITY


def generators() -> Dict[str, GaussianMatrix]:
    """The circuit matrices M1..M5."""
    return {
        "M1": GaussianMatrix.with_phase(
            1, [[0, 1, 0, 0], [-1, 0, 0, 0], [-1, 0, 0, 1], [0, 1, -1, 0]]
        ),
        "M2": GaussianMatrix.with_phase(
            1, [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
        ),
        "M3": GaussianMatrix.from_arrays(
            [[1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        ),
        "M4": GaussianMatrix.from_arrays(
            [[2, 1, 0, 0], [-1, 0, 0, 0], [-1, -1, 1, 0], [0, 0, 0, 1]]
        ),
        "M5": GaussianMatrix.from_arrays(
            [[2, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        ),
    }


GENERATORS = generators()
LETTERS: Dict[str, GaussianMatrix] = {
    **GENERATORS,
    **{f"{name}^-1": g.inverse() for name, g in GENERATORS.items()},
    "-E4": MINUS_IDENTITY,
}


def q_matrix() -> np.ndarray:
    """The matrix Q of the modified Schwarz map f' = Q f."""
    return np.array(
        [
            [-1, -1j, 0, 0],
            [0, 1, 0, 0],
            [0, 0.5, (1 - 1j) / 4, (-1 + 1j) / 4],
            [0, -0.5j, (1 + 1j) / 4, (1 + 1j) / 4],
        ],
        dtype=complex,
    )


def igusa_membership(g) -> bool:
    """g11 g12 and g21 g22 even, for an integral g with determinant 1."""
    g = np.asarray(g, dtype=np.int64)
    if g.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {g.shape}")
    if int(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) != 1:
        raise DomainError(f"{g.tolist()} does not have determinant 1")
    return int(g[0, 0] * g[0, 1]) % 2 == 0 and int(g[1, 0] * g[1, 1]) % 2 == 0


def _sl2_mod2() -> List[Matrix2]:
    elements = []
    for a, b, c, d in product(range(2), repeat=4):
        if (a * d - b * c) % 2 == 1:
            elements.append(((a, b), (c, d)))
    return elements


def congruence_image(predicate: Callable[[Matrix2], bool]) -> List[Matrix2]:
    """Elements of SL2(Z/2) satisfying a level-2 predicate, i.e. a level-2 subgroup's image."""
    return [g for g in _sl2_mod2() if predicate(g)]


def _igusa_mod2(g: Matrix2) -> bool:
    return (g[0][0] * g[0][1]) % 2 == 0 and (g[1][0] * g[1][1]) % 2 == 0


def _principal_mod2(g: Matrix2) -> bool:
    return g == ((1, 0), (0, 1))


def igusa_index() -> int:
    """[SL2(Z) : Igusa group], from the image in SL2(Z/2)."""
    return len(_sl2_mod2()) // len(congruence_image(_igusa_mod2))


def principal_index_in_igusa() -> int:
    """[Igusa group : Gamma(2)]."""
    return len(congruence_image(_igusa_mod2)) // len(congruence_image(_principal_mod2))


@dataclass(frozen=True)
class Membership:
    """Result of the membership test, with the witness (n1, n2, G, L) for members."""

    member: bool
    n1: Optional[int] = None
    n2: Optional[int] = None
    G: Optional[Matrix2] = None
    L: Optional[Matrix2] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.member


def _as_pairs(block: np.ndarray) -> Matrix2:
    return tuple(tuple(int(v) for v in row) for row in block)


def is_in_M(g: GaussianMatrix) -> Membership:
    """Decide membership in the monodromy group."""
    form = g.phase_form()
    if form is None:
        return Membership(False, reason="entries mix real and imaginary parts")
    phase, x = form
    upper_right, lower_right = x[:2, 2:], x[2:, 2:]
    if np.any(upper_right):
        return Membership(False, reason="upper right block is not zero")
    g_block, l_block = x[:2, :2], x[2:, :2]
    if phase == 0 and np.array_equal(lower_right, E2):
        n1, n2 = 0, 0
    elif phase == 0 and np.array_equal(lower_right, -E2):
        n1, n2 = 1, 1
    elif phase == 1 and np.array_equal(lower_right, J2):
        n1, n2 = 0, 1
    elif phase == 1 and np.array_equal(lower_right, -J2):
        n1, n2 = 1, 0
        g_block, l_block = -g_block, -l_block
    else:
        return Membership(False, reason="lower right block is not a power of J2 with its phase")
    if int(round(np.linalg.det(g_block))) != 1 or not igusa_membership(g_block):
        return Membership(False, n1, n2, reason="upper left block is not in the Igusa group")
    if any(int(row.sum()) % 2 != n1 for row in l_block):
        return Membership(False, n1, n2, reason=f"row sums of L are not congruent to {n1} mod 2")
    return Membership(True, n1, n2, _as_pairs(g_block), _as_pairs(l_block))


_LETTER_RE = re.compile(r"-E4|M[1-5](\^-1)?")


def parse_word(text: str) -> List[str]:
    """Parse letters such as "M3 M5^-1 M1" (separated by spaces, commas or '*')."""
    letters = []
    for token in re.split(r"[\s,*]+", text.strip()):
        if not token:
            continue
        if not _LETTER_RE.fullmatch(token):
            raise ConfigError(f"could not parse word letter {token!r} in {text!r}")
        letters.append(token)
    return letters


def format_word(word: Sequence[str]) -> str:
    return " ".join(word) if word else "E4"


def evaluate(word: Sequence[str]) -> GaussianMatrix:
    """The product of the letters, left to right."""
    result = IDENTITY
    for letter in word:
        if letter not in LETTERS:
            raise ConfigError(f"unknown letter {letter!r}")
        result = result @ LETTERS[letter]
    return result


def invert_word(word: Sequence[str]) -> List[str]:
    inverted = []
    for letter in reversed(word):
        if letter == "-E4":
            inverted.append(letter)
        elif letter.endswith("^-1"):
            inverted.append(letter[:-3])
        else:
            inverted.append(f"{letter}^-1")
    return inverted


def _power(word: Sequence[str], k: int) -> List[str]:
    return list(word) * k if k >= 0 else invert_word(word) * (-k)


# Block diagonal diag(X, E2) words: T with X = [[1, 2], [0, 1]] and S with X = J2**-1.
_T = ["M3"]
_S = ["M3", "M5"]
# Unipotent words [[E2, 0], [L, E2]]: L1 = [[-1,-1],[0,0]], L4 = [[-1,1],[0,0]],
# L3 = [[0,0],[-1,1]], L5 = [[0,0],[1,1]].
_H1 = ["M4", "M5^-1"]
_H4 = ["M3", "M5^-1"] + _H1 + ["M5", "M3^-1"]
_H3 = ["M2"] + _H1 + ["M2"]
_H5 = ["M2"] + _H4 + ["M2"]
_PARITY_WORDS = {(0, 0): [], (0, 1): ["M2"], (1, 0): ["M1"], (1, 1): ["M1", "M2"]}


def _reduce_igusa(g: Matrix2) -> List[str]:
    """A word in T, S whose block diagonal evaluation is diag(g, E2)."""
    (a, b), (c, d) = g
    applied: List[str] = []
    while c != 0:
        k = round(a / (2 * c))
        # T**-k then S on the left
        a, b = a - 2 * k * c, b - 2 * k * d
        applied = _S + _power(_T, -k) + applied
        a, b, c, d = c, d, -a, -b
    if a == -1:
        applied = _S + _S + applied
        a, b, d = 1, -b, 1
    if b % 2 != 0:
        raise NotMember(f"{g} is not in the Igusa group")
    applied = _power(_T, -(b // 2)) + applied
    return invert_word(applied)


def decompose(g: GaussianMatrix, extended: bool = False) -> List[str]:
    """Write g as a word in M1..M5 and their inverses.

    With `extended`, an element whose negative is in the group is returned as "-E4" followed by
    the word for -g.
    """
    membership = is_in_M(g)
    if not membership:
        if extended and is_in_M(-g):
            return ["-E4"] + decompose(-g)
        logger.error("decompose: %s", membership.reason)
        raise NotMember(f"matrix is not in the monodromy group: {membership.reason}")
    parity_word = _PARITY_WORDS[(membership.n1, membership.n2)]
    reduced = is_in_M(g @ evaluate(parity_word))
    g_block = np.array(reduced.G, dtype=object)
    l_block = np.array(reduced.L, dtype=object)
    # [[G, 0], [L, E]] = [[E, 0], [L G**-1, E]] diag(G, E); G**-1 = adj(G) since det G = 1
    adjugate = np.array([[g_block[1, 1], -g_block[0, 1]], [-g_block[1, 0], g_block[0, 0]]])
    (a, b), (c, d) = (tuple(int(v) for v in row) for row in l_block.dot(adjugate))
    if (a + b) % 2 or (c + d) % 2:
        raise NotMember("unipotent part has odd row sums")
    word = (
        _power(_H1, -(a + b) // 2)
        + _power(_H4, (b - a) // 2)
        + _power(_H3, (d - c) // 2)
        + _power(_H5, (c + d) // 2)
        + _reduce_igusa(reduced.G)
        + parity_word
    )
    if evaluate(word) != g:
        logger.error("decompose produced %s which does not evaluate back", format_word(word))
        raise SchwarzError("decomposition does not evaluate back to the input")
    logger.debug("decompose: word of length %d", len(word))
    return word


def bfs_closure(max_len: int, cap: int = MAX_BFS_ELEMENTS) -> Set[GaussianMatrix]:
    """All products of at most max_len generators and inverses."""
    if not 0 <= max_len <= MAX_WORD_LENGTH:
        raise DomainError(f"max_len must be in [0, {MAX_WORD_LENGTH}], got {max_len}")
    distinct = {g for name, g in LETTERS.items() if name != "-E4"}
    letters = sorted(distinct, key=GaussianMatrix.sort_key)
    seen = {IDENTITY}
    frontier = deque([IDENTITY])
    for length in range(1, max_len + 1):
        next_frontier = deque()
        for element in frontier:
            for letter in letters:
                candidate = element @ letter
                if candidate in seen:
                    continue
                seen.add(candidate)
                next_frontier.append(candidate)
                if len(seen) > cap:
                    logger.error("bfs_closure: more than %d elements at length %d", cap, length)
                    raise CapacityError(f"closure exceeds {cap} elements")
        frontier = next_frontier
        logger.debug(
            "bfs_closure: length %d, frontier %d, total %d", length, len(frontier), len(seen)
        )
    return seen


def to_json(g: GaussianMatrix) -> str:
    """{"phase": e, "entries": [[[re, im], ...], ...]} with g = i**e entries."""
    form = g.phase_form()
    if form is None:
        phase, re_part, im_part = 0, g.real, g.imag
    else:
        phase, re_part = form
        im_part = np.zeros_like(re_part)
    entries = [
        [[int(re_part[r, c]), int(im_part[r, c])] for c in range(4)] for r in range(4)
    ]
    return json.dumps({"entries": entries, "phase": phase}, sort_keys=True)


def from_json(text: str) -> GaussianMatrix:
    try:
        document = json.loads(text)
        phase = document.get("phase", 0)
        entries = document["entries"]
        if not isinstance(phase, int) or isinstance(phase, bool):
            raise TypeError(f"phase must be an integer, got {phase!r}")
        if len(entries) != 4 or any(len(row) != 4 for row in entries):
            raise ValueError("entries must be a 4x4 array")
        re_part = [[_integer(entry[0]) for entry in row] for row in entries]
        im_part = [[_integer(entry[1]) for entry in row] for row in entries]
        if any(len(entry) != 2 for row in entries for entry in row):
            raise ValueError("each entry must be a [re, im] pair")
    except (AttributeError, IndexError, KeyError, TypeError, ValueError) as e:
        logger.error("Malformed matrix document: %s", e)
        raise ConfigError(f"malformed matrix JSON: {e}") from e
    base = GaussianMatrix.from_arrays(re_part, im_part)
    return GaussianMatrix.with_phase(phase, np.eye(4, dtype=np.int64)) @ base


def _integer(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"matrix entries must be integers, got {value!r}")
    return value
