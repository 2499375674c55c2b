"""Period finding and semiprime factoring driven purely by first-register SQPs.

When the multiplicative order r of a mod N is a power of two 2^y, the
post-QFT first register of Shor's circuit is supported on multiples of
2^{2 n_s - y}: the low 2 n_s - y qubits have SQP 0, the top y qubits have
SQP exactly 0.5, and counting the non-zero entries recovers r.  The census
machinery counts, per semiprime, how many bases a have that property and
also yield a non-trivial factor.

The first register is never built gate by gate: the joint state
sum_x |x>|a^x mod N> is periodic in x, so the post-QFT probabilities reduce
to closed-form geometric sums over the r residue classes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .exact import MAX_QUBITS, CapacityError


class UndefinedOrderError(ValueError):
    """Multiplicative order requested for a base not coprime to the modulus."""


def multiplicative_order(a: int, n: int) -> int:
    """Smallest r >= 1 with a^r = 1 mod n, by iterated modular multiplication."""
    if n < 2:
        raise ValueError("modulus must be at least 2")
    if math.gcd(a, n) != 1:
        raise UndefinedOrderError(f"{a} is not coprime to {n}")
    a %= n
    x, r = a, 1
    while x != 1:
        x = x * a % n
        r += 1
    return r


def _is_power_of_two(r: int) -> bool:
    return r >= 2 and (r & (r - 1)) == 0


def _gcd_factor(x: int, n: int) -> int | None:
    """Non-trivial factor of n from gcd(x+1, n) or gcd(x-1, n), if either works.

    This is the standard order-finding post-processing: x = a^{r/2} squares
    to 1 mod n, so both gcds are candidate factors.  The + side alone fails
    on every even semiprime (x = -1 mod 2q for all coprime a), where the
    - side still extracts the factor 2.
    """
    for g in (math.gcd(x + 1, n), math.gcd(x - 1, n)):
        if g not in (1, n):
            return g
    return None


def is_as(a: int, n: int) -> bool:
    """True if a's order mod n is 2^y (y >= 1) and a^{r/2} +- 1 yields a factor of n."""
    if math.gcd(a, n) != 1:
        return False
    r = multiplicative_order(a, n)
    if not _is_power_of_two(r):
        return False
    return _gcd_factor(pow(a, r // 2, n), n) is not None


def _factor_semiprime(n: int) -> tuple[int, int]:
    """Prime factors (p <= q) of a semiprime, by trial division."""
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return p, n // p
    raise ValueError(f"{n} is not a semiprime")


def count_as(n: int) -> int:
    """Number of bases a in [1, n] satisfying is_as(a, n).

    Exhaustive over a, but the order test uses the known factorization: with
    2^v the largest power of two dividing the Carmichael function of n, a's
    order is a power of two iff a^(2^v) = 1 mod n.  Qualifying bases then get
    their exact order by repeated squaring.
    """
    p, q = _factor_semiprime(n)
    lam = math.lcm(p - 1, q - 1) if p != q else p * (p - 1)
    v = (lam & -lam).bit_length() - 1  # 2-adic valuation of lambda(n)
    two_v = 1 << v
    count = 0
    for a in range(2, n):
        if math.gcd(a, n) != 1 or pow(a, two_v, n) != 1:
            continue
        x, y = a, 0
        while x != 1:
            x_half = x
            x = x * x % n
            y += 1
        if y >= 1 and _gcd_factor(x_half, n) is not None:  # x_half = a^{r/2}
            count += 1
    return count


def semiprimes(kind: str, k: int) -> list[tuple[int, int, int]]:
    """First k semiprimes as (n, p, q) ascending; 'squarefree' means p != q."""
    if kind not in ("squarefree", "square"):
        raise ValueError(f"kind must be 'squarefree' or 'square', got {kind!r}")
    if k < 1:
        raise ValueError("k must be positive")
    limit = 64
    while True:
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, math.isqrt(limit) + 1):
            if sieve[i]:
                sieve[i * i :: i] = False
        primes = np.nonzero(sieve)[0]
        found = []
        if kind == "square":
            found = [(int(p * p), int(p), int(p)) for p in primes if p * p <= limit]
        else:
            for i, p in enumerate(primes):
                if p * p > limit:
                    break
                for q in primes[i + 1 :]:
                    n = int(p * q)
                    if n > limit:
                        break
                    found.append((n, int(p), int(q)))
        if len(found) >= k:
            found.sort()
            return found[:k]
        limit *= 4


@dataclass(frozen=True)
class SemiprimeRecord:
    index: int  # 1-based rank in ascending order
    n: int
    p: int
    q: int
    squarefree: bool
    count_as: int

    @property
    def prob_as(self) -> float:
        return self.count_as / self.n


def census(kind: str, k: int) -> list[SemiprimeRecord]:
    """count_as over the first k semiprimes of the given kind."""
    records = []
    for i, (n, p, q) in enumerate(semiprimes(kind, k), start=1):
        records.append(
            SemiprimeRecord(index=i, n=n, p=p, q=q, squarefree=p != q, count_as=count_as(n))
        )
    return records


def write_census_csv(path, records: list[SemiprimeRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "N", "p", "q", "squarefree", "count_as", "prob_as"])
        for r in records:
            writer.writerow(
                [r.index, r.n, r.p, r.q, int(r.squarefree), r.count_as, repr(r.prob_as)]
            )


# ---------------------------------------------------------------------------
# First-register SQP simulation


@dataclass(frozen=True)
class ShorRegisterSpec:
    """Quantum subroutine geometry for order finding of base a mod N.

    n_s is the smallest qubit count with 2^{n_s} >= N; the first register
    holds 2 n_s qubits (qubit 0 least significant).
    """

    modulus: int
    base: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        if not 1 < self.base < self.modulus:
            raise ValueError("base must satisfy 1 < a < N")
        if math.gcd(self.base, self.modulus) != 1:
            raise ValueError(f"base {self.base} is not coprime to {self.modulus}")

    @property
    def n_s(self) -> int:
        return max(1, (self.modulus - 1).bit_length())

    @property
    def register_width(self) -> int:
        return 2 * self.n_s


def shor_first_register_sqp(
    spec: ShorRegisterSpec, max_qubits: int = MAX_QUBITS
) -> np.ndarray:
    """SQP of each first-register qubit after the QFT, qubit 0 first.

    Builds the outcome distribution of the first register analytically: the
    joint state sum_x |x>|a^x mod N> splits into r residue classes of x, and
    the squared QFT amplitude of each class is a geometric sum.
    """
    t = spec.register_width
    if t > max_qubits:
        raise CapacityError(f"first register needs {t} qubits, cap is {max_qubits}")
    big_t = 2**t
    r = multiplicative_order(spec.base, spec.modulus)
    n_long, rem = divmod(big_t, r)  # rem classes have n_long+1 members

    k = np.arange(big_t, dtype=np.int64)
    kr_mod = (k * r) % big_t
    singular = kr_mod == 0
    sin_den_sq = np.sin(np.pi * kr_mod / big_t) ** 2

    probs = np.zeros(big_t)
    for members, n_classes in ((n_long + 1, rem), (n_long, r - rem)):
        if n_classes == 0 or members == 0:
            continue
        num_mod = (k * r * members) % (2 * big_t)
        sin_num_sq = np.sin(np.pi * num_mod / big_t) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            mag_sq = np.where(singular, float(members) ** 2, sin_num_sq / sin_den_sq)
        probs += n_classes * mag_sq
    probs /= float(big_t) ** 2

    sqps = np.empty(t)
    for qubit in range(t):
        view = probs.reshape(2 ** (t - 1 - qubit), 2, 2**qubit)
        sqps[qubit] = view[:, 1, :].sum()
    return sqps


def recover_period_from_sqp(sqps: np.ndarray, zero_tolerance: float = 1e-6) -> int:
    """r = 2^{y0} where y0 counts the qubits with SQP above zero_tolerance."""
    y0 = int(np.sum(np.asarray(sqps) > zero_tolerance))
    return 2**y0


# ---------------------------------------------------------------------------
# Factoring pipeline


@dataclass
class FactorResult:
    n: int
    success: bool
    p: int | None = None
    q: int | None = None
    attempts: int = 0
    method: str | None = None  # square-root | gcd | sqp-period
    trace: list[str] = field(default_factory=list)


def factor_semiprime_sqp(n: int, seed: int = 0, max_attempts: int = 20) -> FactorResult:
    """Factor a semiprime using only first-register SQPs.

    Square semiprimes are caught by the integer-square-root check.  Otherwise
    bases are sampled uniformly from [2, N-1]: a shared factor ends the run
    immediately, else the period is recovered from the SQP vector and used in
    the standard gcd post-processing.  Exhausting max_attempts returns a
    failure result rather than raising.
    """
    if n < 4:
        raise ValueError("need a composite N >= 4")
    result = FactorResult(n=n, success=False)
    root = math.isqrt(n)
    if root * root == n:
        result.success, result.p, result.q = True, root, root
        result.method = "square-root"
        result.trace.append(f"sqrt({n}) = {root} is an integer")
        return result
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        result.attempts = attempt
        a = int(rng.integers(2, n))
        g = math.gcd(a, n)
        if g > 1:
            result.success, result.p, result.q = True, min(g, n // g), max(g, n // g)
            result.method = "gcd"
            result.trace.append(f"attempt {attempt}: a={a} shares gcd {g} with {n}")
            return result
        sqps = shor_first_register_sqp(ShorRegisterSpec(n, a))
        r = recover_period_from_sqp(sqps)
        if r < 2 or pow(a, r, n) != 1:
            result.trace.append(
                f"attempt {attempt}: a={a}, SQP-recovered r={r} is not a valid period"
            )
            continue
        g = _gcd_factor(pow(a, r // 2, n), n)
        if g is None:
            result.trace.append(
                f"attempt {attempt}: a={a}, r={r}, gcd(a^(r/2) +- 1, N) both trivial"
            )
            continue
        result.success, result.p, result.q = True, min(g, n // g), max(g, n // g)
        result.method = "sqp-period"
        result.trace.append(
            f"attempt {attempt}: a={a}, r={r}, gcd(a^(r/2) +- 1, N) gives {g} -> {result.p} x {result.q}"
        )
        return result
    result.trace.append(f"no factor found in {max_attempts} attempts")
    return result
