"""Desk-scale key-recovery attacks: exhaustive, DIP-based, hill-climbing, sweep.

All pattern enumeration is bit-parallel and every attack is deterministic
under its seed; budgets are query/iteration counts, never wall-clock.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .netlist import Netlist
from .optimize import eliminate_dead, estimate, propagate_constants
from .simulate import constant_words, exhaustive_pi_words, sampled_pi_words, simulate_words

BRUTE_KEY_LIMIT = 20
BRUTE_PI_LIMIT = 16


class AttackLimitError(Exception):
    """Instance exceeds the attack's declared size or budget limits."""


@dataclass
class AttackResult:
    attack: str
    recovered_key: tuple[int, ...] | None
    per_bit_guess: dict[int, int | None]
    iterations: int
    queries: int
    timed_out: bool
    wall_time: float
    accuracy: float | None = None                 # over guessed bits only
    accuracy_with_unknowns: float | None = None   # unknowns counted as wrong
    extra: dict = field(default_factory=dict)

    def score_against(self, true_key: tuple[int, ...]) -> None:
        guessed = {i: g for i, g in self.per_bit_guess.items() if g is not None}
        hits = sum(1 for i, g in guessed.items() if true_key[i] == g)
        self.accuracy = 100.0 * hits / len(guessed) if guessed else None
        self.accuracy_with_unknowns = 100.0 * hits / len(true_key) if true_key else None

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "schema_version": 1,
            "kind": "attack_result",
            "attack": self.attack,
            "recovered_key": list(self.recovered_key) if self.recovered_key is not None else None,
            "per_bit_guess": {str(i): g for i, g in sorted(self.per_bit_guess.items())},
            "iterations": self.iterations,
            "queries": self.queries,
            "timed_out": self.timed_out,
            "accuracy": self.accuracy,
            "accuracy_with_unknowns": self.accuracy_with_unknowns,
            "extra": self.extra,
        }
        if include_timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


def _key_bits(value: int, k: int) -> tuple[int, ...]:
    return tuple((value >> i) & 1 for i in range(k))


def _signatures(locked: Netlist, pi_words, width: int, keys) -> dict[int, tuple[int, ...]]:
    sigs = {}
    for kv in keys:
        out = simulate_words(locked, pi_words,
                             constant_words(_key_bits(kv, locked.key_size), width), width)
        sigs[kv] = tuple(out)
    return sigs


def _check_ports(locked: Netlist, oracle: Netlist) -> None:
    from .simulate import PortMismatchError

    if locked.pi_names() != oracle.pi_names() or locked.po_names() != oracle.po_names():
        raise PortMismatchError("locked and oracle port lists differ")
    if oracle.key_inputs:
        raise PortMismatchError("oracle must be an unlocked netlist")


def brute_force_keys(locked: Netlist, oracle: Netlist, mode: str = "exhaustive",
                     patterns: int = 1000, seed: int = 0) -> set[int]:
    """Exact set of key values under which locked matches the oracle.

    Keys are returned as integers (bit i = keyinput i). Exhaustive mode is
    ground truth; sampled mode can only over-approximate.
    """
    _check_ports(locked, oracle)
    k = locked.key_size
    n_pi = len(locked.primary_inputs)
    if k > BRUTE_KEY_LIMIT:
        raise AttackLimitError(f"key size {k} exceeds {BRUTE_KEY_LIMIT}")
    if mode == "exhaustive":
        if n_pi > BRUTE_PI_LIMIT:
            raise AttackLimitError(f"{n_pi} primary inputs exceed {BRUTE_PI_LIMIT}")
        width = 1 << n_pi
        pi_words = exhaustive_pi_words(n_pi)
    else:
        width = patterns
        pi_words = sampled_pi_words(n_pi, patterns, seed)
    golden = tuple(simulate_words(oracle, pi_words, [], width))
    good: set[int] = set()
    for kv in range(1 << k):
        out = simulate_words(locked, pi_words, constant_words(_key_bits(kv, k), width), width)
        if tuple(out) == golden:
            good.add(kv)
    return good


def dip_attack(locked: Netlist, oracle: Netlist, max_dips: int | None = None,
               true_key: tuple[int, ...] | None = None) -> AttackResult:
    """Distinguishing-input elimination with an enumerative decision procedure.

    Keeps every key consistent with the oracle on all queried patterns;
    terminates when no input distinguishes two surviving keys, at which
    point the survivors are exactly the functionally correct keys.
    """
    start = time.perf_counter()
    _check_ports(locked, oracle)
    k = locked.key_size
    n_pi = len(locked.primary_inputs)
    if k > BRUTE_KEY_LIMIT:
        raise AttackLimitError(f"key size {k} exceeds {BRUTE_KEY_LIMIT}")
    if n_pi > BRUTE_PI_LIMIT:
        raise AttackLimitError(f"{n_pi} primary inputs exceed {BRUTE_PI_LIMIT}")
    width = 1 << n_pi
    pi_words = exhaustive_pi_words(n_pi)
    sigs = _signatures(locked, pi_words, width, range(1 << k))
    golden = tuple(simulate_words(oracle, pi_words, [], width))
    alive = sorted(sigs)
    dips: list[int] = []
    timed_out = False
    while True:
        ref = sigs[alive[0]]
        diff = 0
        for kv in alive[1:]:
            other = sigs[kv]
            for a, b in zip(ref, other):
                diff |= a ^ b
            if diff:
                break
        if not diff:
            break
        if max_dips is not None and len(dips) >= max_dips:
            timed_out = True
            break
        p = (diff & -diff).bit_length() - 1  # lowest distinguishing pattern
        dips.append(p)
        want = tuple((w >> p) & 1 for w in golden)
        alive = [kv for kv in alive
                 if tuple((w >> p) & 1 for w in sigs[kv]) == want]
    recovered = _key_bits(alive[0], k) if alive else None
    res = AttackResult(
        attack="dip",
        recovered_key=recovered,
        per_bit_guess={i: (recovered[i] if recovered else None) for i in range(k)},
        iterations=len(dips),
        queries=len(dips),
        timed_out=timed_out,
        wall_time=time.perf_counter() - start,
        extra={
            "surviving_keys": len(alive),
            "surviving_key_values": alive if len(alive) <= 64 else alive[:64],
            "dip_patterns": dips,
        },
    )
    if true_key is not None:
        res.score_against(true_key)
    return res


def hill_climb(
    locked: Netlist,
    io_oracle,
    iterations: int = 2000,
    restarts: int = 4,
    patterns: int = 64,
    seed: int = 0,
    true_key: tuple[int, ...] | None = None,
) -> AttackResult:
    """Greedy single-bit climbs on output-match rate over a pattern set.

    `io_oracle` is an unlocked netlist or a list of (pi_bits, out_bits)
    pairs, standing in for golden validation vectors. Always returns the
    best key found; non-convergence is an acceptable outcome.
    """
    start = time.perf_counter()
    if patterns < 1:
        raise AttackLimitError("need a pattern budget of at least 1")
    k = locked.key_size
    rng = random.Random(seed)
    n_pi = len(locked.primary_inputs)
    if isinstance(io_oracle, Netlist):
        _check_ports(locked, io_oracle)
        width = patterns
        pi_words = sampled_pi_words(n_pi, patterns, seed)
        golden = tuple(simulate_words(io_oracle, pi_words, [], width))
    else:
        pairs = list(io_oracle)
        width = len(pairs)
        pi_words = [0] * n_pi
        golden_words = [0] * len(locked.primary_outputs)
        for p, (pi_bits, out_bits) in enumerate(pairs):
            for i, b in enumerate(pi_bits):
                pi_words[i] |= b << p
            for j, b in enumerate(out_bits):
                golden_words[j] |= b << p
        golden = tuple(golden_words)
    total_bits = width * len(locked.primary_outputs)
    mask = (1 << width) - 1

    def match(kv: int) -> float:
        out = simulate_words(locked, pi_words, constant_words(_key_bits(kv, k), width), width)
        wrong = sum(bin(a ^ b).count("1") for a, b in zip(out, golden))
        return 1.0 - wrong / total_bits

    evals = 0
    best_kv, best_match = None, -1.0
    trajectory: list[float] = []
    timed_out = False
    for _ in range(max(1, restarts)):
        kv = rng.getrandbits(k)
        cur = match(kv)
        evals += 1
        run: list[float] = [cur]
        while True:
            if evals >= iterations:
                timed_out = True
                break
            cand_best, cand_match = None, cur
            for bit in range(k):
                if evals >= iterations:
                    break
                flipped = kv ^ (1 << bit)
                m = match(flipped)
                evals += 1
                if m > cand_match:
                    cand_best, cand_match = flipped, m
            if cand_best is None:
                break  # plateau: restart
            kv, cur = cand_best, cand_match
            run.append(cur)
        if cur > best_match:
            best_kv, best_match = kv, cur
            trajectory = run
        if timed_out or best_match == 1.0:
            break
    recovered = _key_bits(best_kv, k)
    res = AttackResult(
        attack="hill",
        recovered_key=recovered,
        per_bit_guess={i: recovered[i] for i in range(k)},
        iterations=evals,
        queries=width,
        timed_out=timed_out,
        wall_time=time.perf_counter() - start,
        extra={"match_rate": best_match, "trajectory": trajectory, "patterns": width},
    )
    if true_key is not None:
        res.score_against(true_key)
    return res


def sweep_attack(
    locked: Netlist,
    true_key: tuple[int, ...] | None = None,
    threshold: float = 0.0,
    patterns: int = 256,
    seed: int = 0,
) -> AttackResult:
    """Per-key-bit constant propagation plus estimate-delta scoring.

    Each bit is fixed to 0 and to 1; after cleanup the variant with the
    smaller area wins (delay, then power break ties) because fixing the
    correct value collapses the key logic hardest; calibrated on XOR/XNOR
    key-gate locks. Identical feature vectors yield 'unknown'.
    """
    start = time.perf_counter()
    if not locked.key_inputs:
        raise AttackLimitError("netlist has no key inputs")
    k = locked.key_size
    guesses: dict[int, int | None] = {}
    features: dict[int, dict] = {}
    for i in range(k):
        name = locked.nets[locked.key_inputs[i]].name
        variants = []
        for b in (0, 1):
            simplified = eliminate_dead(propagate_constants(locked, {name: b}))
            variants.append(estimate(simplified, patterns=patterns, seed=seed))
        e0, e1 = variants
        features[i] = {"fix0": e0.to_json(), "fix1": e1.to_json()}
        guess: int | None = None
        if abs(e1.area - e0.area) > threshold:
            guess = 0 if e0.area < e1.area else 1
        elif abs(e1.delay - e0.delay) > threshold:
            guess = 0 if e0.delay < e1.delay else 1
        elif abs(e1.power - e0.power) > max(threshold, 1e-9):
            guess = 0 if e0.power < e1.power else 1
        guesses[i] = guess
    recovered = tuple(g if g is not None else 0 for g in (guesses[i] for i in range(k)))
    res = AttackResult(
        attack="sweep",
        recovered_key=recovered,
        per_bit_guess=guesses,
        iterations=2 * k,
        queries=0,
        timed_out=False,
        wall_time=time.perf_counter() - start,
        extra={"threshold": threshold,
               "unknown_bits": sorted(i for i, g in guesses.items() if g is None),
               "features": {str(i): features[i] for i in range(k)}},
    )
    if true_key is not None:
        res.score_against(true_key)
    return res
