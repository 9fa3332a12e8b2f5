"""Geometric prime-tuple searches and self-verifying radimichael certificates.

A tuple spec fixes a base a, shift b, and window of exponents; for each n the
scan records which a^l * n + 1 are prime. Products of m such primes are
radimichael numbers, and every certificate built here carries the data needed
to re-verify that claim, the non-Carmichael witness, and the exact Lehmer
index from scratch.
"""

from __future__ import annotations

import json
import logging
import multiprocessing
from dataclasses import dataclass
from itertools import combinations
from math import gcd, prod
from typing import Iterable, TextIO

from .arith import (
    Factorization,
    U64_LIMIT,
    factorize,
    prime_verdict,
    radical,
    valuation,
)
from .classify import is_carmichael, is_k_lehmer

log = logging.getLogger(__name__)


class InsufficientHitsError(ValueError):
    """A tuple hit does not contain enough primes to build the request."""


class CertificateViolationError(RuntimeError):
    """A freshly built certificate failed its own re-verification."""


@dataclass(frozen=True)
class TupleSpec:
    """Search parameters: primes of the form a^l * n + 1 for l in `window`.

    The default window (b+1, b+s) has s slots; index-targeted searches use
    (b, b+s) instead. Both bounds are inclusive.
    """
    a: int
    b: int
    s: int
    m: int
    n_min: int = 1
    n_max: int = 1
    window: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.a < 2 or self.b < 0 or self.s < 1 or self.m < 2:
            raise ValueError("need a >= 2, b >= 0, s >= 1, m >= 2")
        if self.m > self.s + 1:
            raise ValueError(f"m={self.m} exceeds s+1={self.s + 1} window slots")
        if self.window is None:
            object.__setattr__(self, "window", (self.b + 1, self.b + self.s))
        lo, hi = self.window
        if lo > hi:
            raise ValueError(f"empty exponent window {self.window}")
        if self.m > hi - lo + 1:
            raise ValueError(f"m={self.m} exceeds the {hi - lo + 1}-slot window")
        if self.n_min < 1 or self.n_min > self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")


@dataclass(frozen=True)
class TupleHit:
    """Primes found in one scanned tuple: (exponent, prime) pairs, ascending."""
    spec: TupleSpec
    n: int
    hits: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class RadimichaelCertificate:
    """Everything needed to independently re-check one constructed N.

    exponents are the raw window exponents l_1 < ... < l_m with
    p_i = a^{l_i} * n + 1 and N = p_1 * ... * p_m. kappa_N is rad(a*n),
    which equals rad(phi(N)) and divides N-1. The witness pair shows
    N mod (a^{l_2} * n) = p_1 != 1, so p_2 - 1 cannot divide N - 1 and
    Korselt's criterion fails. sufficient_condition_held records whether
    sum(l_i - b) < b, the shortcut that alone forces index <= m+1.
    """
    a: int
    b: int
    n: int
    exponents: tuple[int, ...]
    primes: tuple[int, ...]
    N: int
    kappa_N: int
    lehmer_index: int | None
    non_carmichael_modulus: int
    non_carmichael_residue: int
    sufficient_condition_held: bool
    probable_prime_flag: bool
    gcd_a_n: int


def scan_tuple(spec: TupleSpec, n: int) -> TupleHit:
    """List exactly the window exponents l with a^l * n + 1 prime."""
    if not spec.n_min <= n <= spec.n_max:
        raise ValueError(f"n={n} outside [{spec.n_min}, {spec.n_max}]")
    lo, hi = spec.window
    found = []
    value = spec.a**lo * n
    for l in range(lo, hi + 1):
        if prime_verdict(value + 1).is_prime:
            found.append((l, value + 1))
        value *= spec.a
    return TupleHit(spec, n, tuple(found))


def _certificate_index(a: int, n: int, m: int, exp_sum: int, big_n: int) -> int | None:
    # phi(N) = a^exp_sum * n^m with each selected exponent >= 1; its prime
    # valuations come from factoring a and n only.
    vq: dict[int, int] = {}
    for q, e in factorize(a).factors:
        vq[q] = e * exp_sum
    for q, e in factorize(n).factors:
        vq[q] = vq.get(q, 0) + e * m
    k = 1
    for q, e in vq.items():
        t = valuation(q, big_n - 1)
        if t == 0:
            return None
        k = max(k, -(-e // t))
    return k


def build_radimichael(hit: TupleHit, m: int,
                      subset: tuple[int, ...] | None = None) -> RadimichaelCertificate:
    """Certify the product of m primes from a tuple hit.

    By default the m smallest primes are taken (exponent 0 entries are never
    selectable: the certificate identities need every p_i - 1 divisible by
    a*n). Pass `subset` (exponents) to certify a specific selection. The
    certificate is re-verified before being returned; a failure raises
    CertificateViolationError rather than emitting a bad record.
    """
    spec = hit.spec
    usable = [(l, p) for l, p in hit.hits if l >= 1]
    if subset is None:
        if len(usable) < m:
            raise InsufficientHitsError(
                f"need {m} primes at exponents >= 1, found {len(usable)} for n={hit.n}")
        chosen = usable[:m]
    else:
        if len(subset) != m:
            raise ValueError(f"subset has {len(subset)} exponents, expected m={m}")
        by_exp = dict(usable)
        try:
            chosen = sorted((l, by_exp[l]) for l in subset)
        except KeyError as exc:
            raise InsufficientHitsError(f"exponent {exc} not among usable hits") from exc

    a, n, b = spec.a, hit.n, spec.b
    exponents = tuple(l for l, _ in chosen)
    primes = tuple(p for _, p in chosen)
    for l, p in chosen:
        if p != a**l * n + 1:
            raise CertificateViolationError(f"hit entry {p} != {a}^{l}*{n}+1")
    big_n = prod(primes)
    modulus = a ** exponents[1] * n

    cert = RadimichaelCertificate(
        a=a,
        b=b,
        n=n,
        exponents=exponents,
        primes=primes,
        N=big_n,
        kappa_N=radical(factorize(a * n)),
        lehmer_index=_certificate_index(a, n, m, sum(exponents), big_n),
        non_carmichael_modulus=modulus,
        non_carmichael_residue=big_n % modulus,
        sufficient_condition_held=sum(l - b for l in exponents) < b,
        probable_prime_flag=any(prime_verdict(p).probable for p in primes),
        gcd_a_n=gcd(a, n),
    )
    if not verify_certificate(cert):
        raise CertificateViolationError(f"self-check failed for N={big_n}")
    return cert


def non_carmichael_check(cert: RadimichaelCertificate) -> bool:
    """Confirm the witness that N is not Carmichael.

    True iff N mod (a^{l_2} * n) equals p_1 and p_1 != 1; were N Carmichael,
    Korselt would force that residue to be 1. For N below 2**64 the verdict
    is additionally cross-checked against the Korselt test itself (an
    independent route: lcm of p-1 instead of the residue argument). The
    cross-check uses the certificate's listed primes; verify_certificate
    establishes their primality and product before relying on this.
    """
    try:
        p1 = cert.primes[0]
        if cert.non_carmichael_modulus != cert.a ** cert.exponents[1] * cert.n:
            return False
        if cert.N % cert.non_carmichael_modulus != cert.non_carmichael_residue:
            return False
        if cert.non_carmichael_residue != p1 or p1 == 1:
            return False
        if cert.N < U64_LIMIT:
            f = Factorization(cert.N, tuple((p, 1) for p in cert.primes))
            if is_carmichael(cert.N, f):
                return False
    except (ValueError, TypeError, IndexError):
        return False
    return True


def verify_certificate(cert: RadimichaelCertificate) -> bool:
    """Re-verify a certificate from scratch; False on any discrepancy.

    Checks primality of every component, the product, kappa(N) | N-1, the
    non-Carmichael witness, the recorded bookkeeping fields, and the exact
    Lehmer index via the big-integer divisibility oracle.
    """
    try:
        a, b, n = cert.a, cert.b, cert.n
        m = len(cert.primes)
        if a < 2 or b < 0 or n < 1 or m < 2 or len(cert.exponents) != m:
            return False
        if list(cert.exponents) != sorted(set(cert.exponents)):
            return False
        if cert.exponents[0] < 1:
            return False
        probable = False
        for l, p in zip(cert.exponents, cert.primes):
            if p != a**l * n + 1:
                return False
            verdict = prime_verdict(p)
            if not verdict.is_prime:
                return False
            probable = probable or verdict.probable
        if probable != cert.probable_prime_flag:
            return False
        if cert.N != prod(cert.primes):
            return False
        if cert.gcd_a_n != gcd(a, n):
            return False
        if cert.kappa_N != radical(factorize(a * n)):
            return False
        if (cert.N - 1) % cert.kappa_N != 0:
            return False
        if cert.N % (a * n) != 1:
            return False
        if not non_carmichael_check(cert):
            return False
        if cert.sufficient_condition_held != (sum(l - b for l in cert.exponents) < b):
            return False
        k = cert.lehmer_index
        if not isinstance(k, int) or k < 1:
            return False
        # any true index is at most log2(phi(N)) < bits of N; larger claims
        # are tampered and would make (N-1)**k explode
        if k > cert.N.bit_length():
            return False
        f = Factorization(cert.N, tuple((p, 1) for p in cert.primes))
        if not is_k_lehmer(cert.N, k, f):
            return False
        if k >= 2 and is_k_lehmer(cert.N, k - 1, f):
            return False
    except (ValueError, TypeError):
        return False
    return True


# ---------------------------------------------------------------------------
# searches
# ---------------------------------------------------------------------------

def _eligible_subsets(hit: TupleHit, m: int, all_subsets: bool):
    usable = [l for l, _ in hit.hits if l >= 1]
    if len(usable) < m:
        return
    if all_subsets:
        yield from combinations(usable, m)
    else:
        yield tuple(usable[:m])


def _search_chunk(spec: TupleSpec, n_lo: int, n_hi: int,
                  all_subsets: bool) -> list[RadimichaelCertificate]:
    out = []
    for n in range(n_lo, n_hi + 1):
        hit = scan_tuple(spec, n)
        for subset in _eligible_subsets(hit, spec.m, all_subsets):
            out.append(build_radimichael(hit, spec.m, subset))
    return out


def _chunk_ranges(lo: int, hi: int, pieces: int) -> list[tuple[int, int]]:
    width = hi - lo + 1
    pieces = max(1, min(pieces, width))
    step = -(-width // pieces)
    return [(start, min(start + step - 1, hi))
            for start in range(lo, hi + 1, step)]


def search_radimichael(spec: TupleSpec, *, all_subsets: bool = False,
                       workers: int = 1) -> list[RadimichaelCertificate]:
    """Scan spec's n range and certify every qualifying product.

    Default selection is the m smallest usable primes per hit;
    all_subsets=True certifies every size-m selection instead. Results are
    ordered by n (then by selection), independent of worker count.
    """
    if workers <= 1 or spec.n_max == spec.n_min:
        return _search_chunk(spec, spec.n_min, spec.n_max, all_subsets)
    chunks = _chunk_ranges(spec.n_min, spec.n_max, workers * 4)
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:  # pragma: no cover - non-forking platform
        return _search_chunk(spec, spec.n_min, spec.n_max, all_subsets)
    with ctx.Pool(workers) as pool:
        parts = pool.starmap(
            _search_chunk, [(spec, lo, hi, all_subsets) for lo, hi in chunks])
    return [cert for part in parts for cert in part]


def theorem2_search(a: int, k: int, s: int, n_range: range, *, b: int = 0,
                    workers: int = 1,
                    diagnostics: list[RadimichaelCertificate] | None = None,
                    ) -> list[RadimichaelCertificate]:
    """Hunt members of L_k \\ L_{k-1} with exactly k-1 prime factors.

    Uses the window (b, b+s) and m = k-1, certifying every size-m selection
    of primes per n, and returns only certificates whose exact index is k.
    Certificates where the recorded sufficient condition held but the index
    came out different are appended to `diagnostics` (and logged), never
    silently dropped. k = 2 is rejected: no product of a single tuple prime
    can land in L_2 \\ L_1, and semiprimes never do.
    """
    if k < 3:
        raise ValueError("theorem2_search requires k >= 3")
    if len(n_range) == 0:
        return []
    m = k - 1
    spec = TupleSpec(a=a, b=b, s=s, m=m, n_min=n_range[0], n_max=n_range[-1],
                     window=(b, b + s))
    emitted = []
    for cert in search_radimichael(spec, all_subsets=True, workers=workers):
        if cert.lehmer_index == k:
            emitted.append(cert)
        elif cert.sufficient_condition_held:
            log.warning("sufficient condition held but index=%s != %s for N=%s",
                        cert.lehmer_index, k, cert.N)
            if diagnostics is not None:
                diagnostics.append(cert)
    return emitted


# ---------------------------------------------------------------------------
# certificate wire format: one JSON object per line, integers in decimal
# ---------------------------------------------------------------------------

_CERT_FIELDS = (
    "a", "b", "n", "exponents", "primes", "N", "kappa_N", "lehmer_index",
    "non_carmichael_modulus", "non_carmichael_residue",
    "sufficient_condition_held", "probable_prime_flag", "gcd_a_n",
)


def certificate_to_line(cert: RadimichaelCertificate) -> str:
    record = {name: getattr(cert, name) for name in _CERT_FIELDS}
    record["exponents"] = list(cert.exponents)
    record["primes"] = list(cert.primes)
    return json.dumps(record, separators=(",", ":"))


def certificate_from_line(line: str) -> RadimichaelCertificate:
    """Parse one serialized certificate; malformed input raises ValueError."""
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a JSON record: {exc}") from exc
    if not isinstance(record, dict):
        raise ValueError("certificate record must be a JSON object")
    missing = [name for name in _CERT_FIELDS if name not in record]
    if missing:
        raise ValueError(f"certificate record missing fields: {missing}")
    try:
        return RadimichaelCertificate(
            a=int(record["a"]),
            b=int(record["b"]),
            n=int(record["n"]),
            exponents=tuple(int(x) for x in record["exponents"]),
            primes=tuple(int(x) for x in record["primes"]),
            N=int(record["N"]),
            kappa_N=int(record["kappa_N"]),
            lehmer_index=(None if record["lehmer_index"] is None
                          else int(record["lehmer_index"])),
            non_carmichael_modulus=int(record["non_carmichael_modulus"]),
            non_carmichael_residue=int(record["non_carmichael_residue"]),
            sufficient_condition_held=bool(record["sufficient_condition_held"]),
            probable_prime_flag=bool(record["probable_prime_flag"]),
            gcd_a_n=int(record["gcd_a_n"]),
        )
    except (TypeError, KeyError) as exc:
        raise ValueError(f"bad certificate field: {exc}") from exc


def write_certificates(certs: Iterable[RadimichaelCertificate],
                       stream: TextIO) -> int:
    count = 0
    for cert in certs:
        stream.write(certificate_to_line(cert) + "\n")
        count += 1
    return count


def read_certificates(stream: TextIO) -> list[RadimichaelCertificate]:
    certs = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            certs.append(certificate_from_line(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return certs
