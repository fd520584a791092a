"""Generators for the named product bases.

Every generator returns a basis that has passed :func:`upb.basis.verify_pb`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import ProductBasis, embed, verify_pb
from .numerics import DEFAULT_TOL, complement, normalize


class MarginViolation(ValueError):
    pass


class OddDimension(ValueError):
    pass


class BadDims(ValueError):
    pass


class NotPrime(ValueError):
    pass


class BadOffset(ValueError):
    pass


class BadPrime(ValueError):
    pass


def _ket(d: int, k: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[k] = 1.0
    return v


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


# -- 3x3 -------------------------------------------------------------------

PYRAMID_H = 0.5 * math.sqrt(1 + math.sqrt(5))
PYRAMID_N = 2 / math.sqrt(5 + math.sqrt(5))


def pyramid_vectors() -> list[np.ndarray]:
    return [
        PYRAMID_N * np.array([math.cos(2 * math.pi * i / 5), math.sin(2 * math.pi * i / 5), PYRAMID_H], dtype=complex)
        for i in range(5)
    ]


def pyramid() -> ProductBasis:
    v = pyramid_vectors()
    return verify_pb((3, 3), [(v[i], v[(2 * i) % 5]) for i in range(5)])


def tiles() -> ProductBasis:
    k = [_ket(3, i) for i in range(3)]
    r = 1 / math.sqrt(2)
    ones = k[0] + k[1] + k[2]
    raw = [
        (k[0], r * (k[0] - k[1])),
        (r * (k[0] - k[1]), k[2]),
        (k[2], r * (k[1] - k[2])),
        (r * (k[1] - k[2]), k[0]),
        (ones / math.sqrt(3), ones / math.sqrt(3)),
    ]
    return verify_pb((3, 3), raw)


@dataclass(frozen=True)
class Family33Params:
    gammaA: float
    thetaA: float
    phiA: float
    gammaB: float
    thetaB: float
    phiB: float

    @classmethod
    def pyramid_point(cls) -> "Family33Params":
        a = math.acos((math.sqrt(5) - 1) / 2)
        return cls(a, a, 0.0, a, a, 0.0)

    @classmethod
    def tiles_point(cls) -> "Family33Params":
        a = 3 * math.pi / 4
        return cls(a, a, 0.0, a, a, 0.0)


def _family_side(gamma: float, theta: float, phi: float, bob: bool) -> list[np.ndarray]:
    k0, k1, k2 = (_ket(3, i) for i in range(3))
    ph = np.exp(1j * phi)
    norm = math.sqrt(math.cos(gamma) ** 2 + math.sin(gamma) ** 2 * math.cos(theta) ** 2)
    plain = math.cos(theta) * k0 + math.sin(theta) * k2
    mixed = (
        math.sin(gamma) * math.sin(theta) * k0 - math.sin(gamma) * math.cos(theta) * k2 + math.cos(gamma) * ph * k1
    )
    last = (math.sin(gamma) * math.cos(theta) * ph * k1 + math.cos(gamma) * k2) / norm
    if bob:
        return [k1, mixed, k0, plain, last]
    return [k0, k1, plain, mixed, last]


def family33(params: Family33Params, margin: float = 1e-3, tol: float = DEFAULT_TOL) -> ProductBasis:
    """Five-state basis on 3x3 from six angles; a UPB whenever the margins hold."""
    for name in ("gammaA", "thetaA", "gammaB", "thetaB"):
        ang = getattr(params, name)
        if margin and min(abs(math.cos(ang)), abs(math.sin(ang))) < margin:
            raise MarginViolation(f"{name}={ang!r}: |cos| and |sin| must be at least {margin}")
    a = _family_side(params.gammaA, params.thetaA, params.phiA, bob=False)
    b = _family_side(params.gammaB, params.thetaB, params.phiB, bob=True)
    return verify_pb((3, 3), list(zip(a, b)), tol)


# -- Pyr34 -----------------------------------------------------------------


def pyr34_bob_vectors() -> list[np.ndarray]:
    n = math.sqrt(2 / math.sqrt(5))
    c1, c2 = math.sqrt(math.cos(math.pi / 5)), math.sqrt(math.cos(2 * math.pi / 5))
    return [
        n
        * np.array(
            [
                c1 * math.cos(2 * j * math.pi / 5),
                c1 * math.sin(2 * j * math.pi / 5),
                c2 * math.cos(4 * j * math.pi / 5),
                c2 * math.sin(4 * j * math.pi / 5),
            ],
            dtype=complex,
        )
        for j in range(5)
    ]


def pyr34_bob_povm() -> list[np.ndarray]:
    """Bob's five POVM directions; each is orthogonal to three of his states."""
    n = 1 / math.sqrt(2)
    return [
        n
        * np.array(
            [
                -math.sin(2 * j * math.pi / 5),
                math.cos(2 * j * math.pi / 5),
                -math.sin(4 * j * math.pi / 5),
                math.cos(4 * j * math.pi / 5),
            ],
            dtype=complex,
        )
        for j in range(5)
    ]


def pyr34() -> ProductBasis:
    v, w = pyramid_vectors(), pyr34_bob_vectors()
    return verify_pb((3, 4), [(v[j], w[j]) for j in range(5)])


def pyr34_plus() -> ProductBasis:
    v, w = pyramid_vectors(), pyr34_bob_vectors()
    extra = complement([w[0], w[1], w[4]], 4)[0]
    return verify_pb((3, 4), [(v[j], w[j]) for j in range(5)] + [(v[0], extra)])


def pyr34_dilation() -> list[np.ndarray]:
    """Bob's POVM directions lifted to orthogonal vectors in five dimensions."""
    out = []
    for u in pyr34_bob_povm():
        x = np.zeros(5, dtype=complex)
        x[:4] = u
        x[4] = 0.5
        out.append(normalize(x))
    return out


def pyr34_completion_35() -> ProductBasis:
    """Pyr34 embedded in 3x5 followed by ten product states completing it."""
    v, w, x = pyramid_vectors(), pyr34_bob_vectors(), pyr34_dilation()
    base = embed(pyr34(), (3, 5))
    raw = [s.locals for s in base.states]
    for i in range(5):
        alice = complement([v[(i + 1) % 5], v[(i - 1) % 5]], 3)[0]
        raw.append((alice, x[i]))
        # the vector of span(x_{i-1}, x_{i+1}) orthogonal to w_i
        a, b = x[(i - 1) % 5], x[(i + 1) % 5]
        wi = np.concatenate([w[i], [0.0]])
        y = np.vdot(wi, b) * a - np.vdot(wi, a) * b
        raw.append((v[i], y))
    return verify_pb((3, 5), raw)


# -- qubits ----------------------------------------------------------------


def shifts() -> ProductBasis:
    k0, k1 = _ket(2, 0), _ket(2, 1)
    plus, minus = (k0 + k1) / math.sqrt(2), (k0 - k1) / math.sqrt(2)
    raw = [(k0, k0, k0), (plus, k1, minus), (k1, minus, plus), (minus, plus, k1)]
    return verify_pb((2, 2, 2), raw)


def genshifts(k: int, angles=None) -> ProductBasis:
    """2k states on 2k-1 qubits: |0...0> and the cyclic right shifts of one string.

    ``angles`` fixes psi_j = cos(a_j)|0> + sin(a_j)|1> for j = 1..k-1; by
    default a_j = j*pi/(4k).
    """
    if k < 2:
        raise ValueError("genshifts needs k >= 2")
    if angles is None:
        angles = [j * math.pi / (4 * k) for j in range(1, k)]
    if len(angles) != k - 1:
        raise ValueError(f"expected {k - 1} angles")
    psi = [np.array([math.cos(a), math.sin(a)], dtype=complex) for a in angles]
    perp = [np.array([-math.sin(a), math.cos(a)], dtype=complex) for a in angles]
    q = 2 * k - 1
    base = [_ket(2, 1)] + psi + perp[::-1]
    raw = [tuple(_ket(2, 0) for _ in range(q))]
    for t in range(q):
        raw.append(tuple(base[(i - t) % q] for i in range(q)))
    return verify_pb((2,) * q, raw)


# -- tiles -----------------------------------------------------------------


def gentiles1(n: int) -> ProductBasis:
    """Vertical and horizontal tiles plus a stopper on n x n, n even."""
    if n % 2 or n < 4:
        raise OddDimension(f"gentiles1 needs an even n >= 4, got {n}")
    omega = np.exp(4j * math.pi / n)

    def tile(m: int, k: int) -> np.ndarray:
        v = np.zeros(n, dtype=complex)
        for j in range(n // 2):
            v[(j + k) % n] += omega ** (j * m)
        return v

    raw = []
    for m in range(1, n // 2):
        for k in range(n):
            raw.append((_ket(n, k), tile(m, k + 1)))
    for m in range(1, n // 2):
        for k in range(n):
            raw.append((tile(m, k), _ket(n, k)))
    ones = np.ones(n, dtype=complex)
    raw.append((ones, ones))
    return verify_pb((n, n), raw)


def gentiles2(m: int, n: int) -> ProductBasis:
    """Short tiles, long tiles and a stopper on m x n."""
    if not (n > 3 and m >= 3 and n >= m):
        raise BadDims(
            f"gentiles2 needs n > 3, m >= 3, n >= m (got m={m}, n={n}); the 3x3 case does not form a UPB"
        )
    omega = np.exp(2j * math.pi / (n - 2))
    raw = []
    for j in range(m):
        raw.append((_ket(m, j) - _ket(m, (j + 1) % m), _ket(n, j)))
    for j in range(m):
        for k in range(1, n - 2):
            bob = np.zeros(n, dtype=complex)
            for i in range(m - 2):
                bob[(i + j + 1) % m] += omega ** (i * k)
            for i in range(m - 2, n - 2):
                bob[i + 2] += omega ** (i * k)
            raw.append((_ket(m, j), bob))
    raw.append((np.ones(m, dtype=complex), np.ones(n, dtype=complex)))
    return verify_pb((m, n), raw)


# -- polygonal pyramids ----------------------------------------------------


@dataclass(frozen=True)
class GenPyramidParams:
    n: int
    p: int
    m: int

    @classmethod
    def default(cls, n: int) -> "GenPyramidParams":
        p = 2 * n + 1
        return cls(n, p, math.ceil(p / 4))

    def validate(self) -> None:
        if self.p != 2 * self.n + 1:
            raise ValueError(f"p must equal 2n+1 (n={self.n}, p={self.p})")
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if not (math.pi / 2 <= 2 * math.pi * self.m / self.p <= math.pi):
            raise BadOffset(f"offset m={self.m} needs pi/2 <= 2*pi*m/p <= pi for p={self.p}")


def polygon_vectors(p: int, m: int) -> list[np.ndarray]:
    c = math.cos(2 * math.pi * m / p)
    h, nrm = math.sqrt(-c), 1 / math.sqrt(1 + abs(c))
    return [
        nrm * np.array([math.cos(2 * math.pi * i / p), math.sin(2 * math.pi * i / p), h], dtype=complex)
        for i in range(p)
    ]


def _cyclic_pb(vecs, n: int, p: int) -> ProductBasis:
    return verify_pb((3,) * n, [tuple(vecs[(k * i) % p] for k in range(1, n + 1)) for i in range(p)])


def genpyramid(params: GenPyramidParams | int) -> ProductBasis:
    if isinstance(params, int):
        params = GenPyramidParams.default(params)
    params.validate()
    return _cyclic_pb(polygon_vectors(params.p, params.m), params.n, params.p)


def sept() -> ProductBasis:
    return genpyramid(GenPyramidParams(3, 7, 2))


SEPT_R = [
    (1, 0, 0),
    (0, 1, 0),
    (1, 0, 1),
    (1, 1, -1),
    (1, -1, 0),
    (1, 1, 1),
    (0, 1, -1),
]


def sept_counterexample_vectors() -> list[np.ndarray]:
    """r_1..r_7 as rows 0..6; consecutive ones (cyclically) are orthogonal."""
    return [np.array(r, dtype=complex) for r in SEPT_R]


def sept_counterexample() -> ProductBasis:
    r = sept_counterexample_vectors()
    # v_{2i mod 7} = r_i, i.e. v_t = r_{4t mod 7} with r_0 = r_7
    v = [r[((4 * t) % 7 - 1) % 7] for t in range(7)]
    return _cyclic_pb(v, 3, 7)


# -- quadratic residues ----------------------------------------------------


@dataclass(frozen=True)
class QuadResParams:
    p: int
    n: int
    residues: tuple[int, ...]
    nonresidue: int
    s_bar: float
    norm: float

    @classmethod
    def for_prime(cls, p: int) -> "QuadResParams":
        if not is_prime(p) or p % 4 != 1:
            raise BadPrime(f"quadres needs a prime p = 1 mod 4, got {p}")
        residues = tuple(sorted({(x * x) % p for x in range(1, p)}))
        x = next(z for z in range(2, p) if z not in residues)
        s = sum(np.exp(2j * math.pi * q / p) for q in residues)
        s_bar = float(s.real)
        n2 = -s_bar if s_bar <= 0 else 1 + s_bar
        return cls(p, (p + 1) // 2, residues, x, s_bar, math.sqrt(n2))


def quadres_vector(params: QuadResParams, a: int) -> np.ndarray:
    v = np.zeros(params.n, dtype=complex)
    v[0] = params.norm
    for pos, q in enumerate(params.residues, start=1):
        v[pos] = np.exp(2j * math.pi * q * a / params.p)
    return v


def quadres(p: int) -> ProductBasis:
    qp = QuadResParams.for_prime(p)
    raw = [(quadres_vector(qp, a), quadres_vector(qp, (qp.nonresidue * a) % p)) for a in range(p)]
    return verify_pb((qp.n, qp.n), raw)


# -- tensor products -------------------------------------------------------


def tensor_upb(a: ProductBasis, b: ProductBasis) -> ProductBasis:
    """Party-wise tensor product of two bipartite bases.

    Orthogonality is checked; unextendibility of the output is not.
    """
    if a.n_parties != 2 or b.n_parties != 2:
        raise ValueError("tensor_upb takes two bipartite bases")
    dims = (a.dims[0] * b.dims[0], a.dims[1] * b.dims[1])
    raw = [
        (np.kron(s.locals[0], t.locals[0]), np.kron(s.locals[1], t.locals[1])) for s in a.states for t in b.states
    ]
    return verify_pb(dims, raw)
