"""Corpus sweeps: induce orientations from every enumerated block signotope and check them.

Signs do not depend on the block partition, so one enumeration feeds all
partitions at once. Work is split by search-tree prefix; partial results are
merged with commutative operations only (sums, and the smallest certificates
in sign-string order), so the number of jobs never changes the report.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .blocksig import compositions, forward_bits, rf_chi_batch
from .grid import grid_shape, mask_to_subgrid, orientations_from_forward
from .signotope import (
    SIGN_CHARS,
    BudgetExceeded,
    _fixed_vector,
    _run_enum,
    omission_table,
    random_signotopes,
    sign_prefixes,
    superset_lists,
)

DEFAULT_BUDGET = 10**9
DEFAULT_SAMPLES = 2000
MAX_CERTIFICATES = 8
PREFIX_DEPTH = 10
CHECKS = ("non_uso", "cyclic", "rf_not_bijective", "rf_mismatch", "inadmissible")


@dataclass
class Tally:
    """Counts for one block partition; merging is a plain sum plus a bounded min-set."""

    processed: int = 0
    non_uso: int = 0
    cyclic: int = 0
    rf_not_bijective: int = 0
    rf_mismatch: int = 0
    inadmissible: int = 0
    admissible: int = 0
    certificates: list = field(default_factory=list)

    def merge(self, other: "Tally") -> "Tally":
        for name in ("processed", "admissible") + CHECKS:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.certificates = _smallest(self.certificates + other.certificates)
        return self

    def to_json(self) -> dict:
        d = {name: getattr(self, name) for name in ("processed",) + CHECKS + ("admissible",)}
        d["certificates"] = self.certificates
        return d


def _smallest(certs: list) -> list:
    uniq = {(c["reason"], c["signs"]): c for c in certs}
    return [uniq[k] for k in sorted(uniq)][:MAX_CERTIFICATES]


def _sign_string(row) -> str:
    return "".join(SIGN_CHARS[int(s)] for s in row)


def tally_signs(signs: np.ndarray, sizes: Sequence[int]) -> Tally:
    """Check the orientations induced by a batch of sign vectors on one partition."""
    sizes = tuple(sizes)
    sh = grid_shape(sizes)
    t = Tally(processed=int(signs.shape[0]))
    if signs.shape[0] == 0:
        return t
    fw = forward_bits(signs, sizes)
    if fw.shape[1]:
        uniq, inv = np.unique(fw, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
    else:
        uniq, inv = fw[:1], np.zeros(fw.shape[0], np.int64)
    outs = orientations_from_forward(sizes, uniq)
    bad_sub = kernels.first_bad_subgrid(outs, sh.coords, sh.subgrid_masks())
    uso = bad_sub < 0
    acyc = kernels.acyclic(outs, sh.coords, sh.strides)
    bij = kernels.rf_bijective(outs, np.asarray(sizes, np.int64), sh.strides)
    adm = np.zeros(uniq.shape[0], bool)
    viol = np.full(uniq.shape[0], -1, np.int64)
    if uso.any():
        first = kernels.first_inadmissible(outs[uso], sh.coords, sh.strides, sh.subgrid_masks(),
                                           sh.path_requirements())
        adm[uso] = first == -1
        viol[uso] = first
    rf = kernels.popcount(outs)
    mismatch = (rf_chi_batch(signs, sizes) != rf[inv]).any(axis=(1, 2))

    per_row = {
        "non_uso": ~uso[inv],
        "cyclic": ~acyc[inv],
        "rf_not_bijective": ~bij[inv],
        "rf_mismatch": mismatch,
        "inadmissible": (uso & ~adm)[inv],
    }
    t.admissible = int((uso & adm)[inv].sum())
    masks = sh.subgrid_masks()
    for reason, flags in per_row.items():
        setattr(t, reason, int(flags.sum()))
        for m in np.flatnonzero(flags)[:MAX_CERTIFICATES]:
            cert = {"reason": reason, "blocks": list(sizes), "signs": _sign_string(signs[m])}
            u = inv[m]
            if reason == "non_uso":
                cert["subgrid"] = [list(f) for f in mask_to_subgrid(masks[bad_sub[u]])]
            elif reason == "inadmissible":
                cert["subgrid"] = [list(f) for f in mask_to_subgrid(masks[viol[u]])]
                cert["required_paths"] = int(sh.path_requirements()[viol[u]])
            t.certificates.append(cert)
    t.certificates = _smallest(t.certificates)
    return t


def _work(args):
    """Enumerate completions of a group of prefixes and tally them; stops past ``budget`` nodes."""
    n, rank, partitions, prefixes, budget = args
    n_sub = comb(n, rank)
    ptr, lst = superset_lists(n, rank)
    table = omission_table(n, rank)
    tallies = {p: Tally() for p in partitions}
    nodes = 0
    for prefix in prefixes:
        f = _fixed_vector(n_sub, None)
        f[: prefix.size] = prefix
        try:
            chunk, used = _run_enum(n_sub, ptr, lst, table, f, budget - nodes)
        except BudgetExceeded:
            return None, budget + 1
        nodes += used
        for p in partitions:
            tallies[p].merge(tally_signs(chunk, p))
    return tallies, nodes


@dataclass
class SweepReport:
    n: int
    rank: int
    partitions: tuple
    exhaustive: bool
    nodes: int
    budget: int
    seed: int
    samples: int
    tallies: dict

    def total(self, name: str) -> int:
        return sum(getattr(t, name) for t in self.tallies.values())

    @property
    def hard_ok(self) -> bool:
        """USO, acyclicity and the refined-index checks (required in every dimension)."""
        return all(self.total(c) == 0 for c in CHECKS[:4])

    @property
    def ok(self) -> bool:
        """Hard checks, plus admissibility where it is a theorem (at most three blocks)."""
        if not self.hard_ok:
            return False
        return all(t.inadmissible == 0 for p, t in self.tallies.items() if len(p) <= 3)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rank": self.rank,
            "mode": "exhaustive" if self.exhaustive else "sampled",
            "nodes": self.nodes,
            "budget": self.budget,
            "seed": self.seed,
            "samples": self.samples if not self.exhaustive else 0,
            "partitions": [{"blocks": list(p), **self.tallies[p].to_json()} for p in self.partitions],
        }

    def summary(self) -> str:
        mode = "exhaustive" if self.exhaustive else f"budget exceeded; {self.samples} seeded samples (seed {self.seed})"
        lines = [f"sweep n={self.n} rank={self.rank}: {mode}"]
        for p in self.partitions:
            t = self.tallies[p]
            lines.append(
                f"  blocks {','.join(map(str, p))}: processed {t.processed}, non-USO {t.non_uso}, "
                f"cyclic {t.cyclic}, rf not bijective {t.rf_not_bijective}, rf formula mismatch "
                f"{t.rf_mismatch}, admissible {t.admissible}, inadmissible {t.inadmissible}"
            )
        return "\n".join(lines)

    def certificates(self) -> list:
        return [c for p in self.partitions for c in self.tallies[p].certificates]


def _partitions(n: int, rank: int, blocks) -> tuple:
    if blocks is not None:
        blocks = tuple(int(b) for b in blocks)
        if sum(blocks) != n:
            raise ValueError(f"blocks {blocks} do not sum to n={n}")
        if len(blocks) != rank - 1:
            raise ValueError(f"rank {rank} needs {rank - 1} blocks, got {len(blocks)}")
        return (blocks,)
    if rank < 2 or n < rank - 1:
        raise ValueError(f"no block partition of [{n}] into {rank - 1} blocks")
    return tuple(compositions(n, rank - 1))


def sweep(n: int, rank: int, blocks: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET,
          seed: int = 0, samples: int = DEFAULT_SAMPLES, jobs: int = 1) -> SweepReport:
    """Enumerate rank-``rank`` signotopes on ``[n]`` and check every induced orientation.

    ``blocks=None`` covers all partitions into ``rank - 1`` consecutive blocks.
    If the search needs more than ``budget`` nodes the enumeration is discarded
    and ``samples`` seeded random signotopes are checked instead.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    partitions = _partitions(n, rank, blocks)
    prefixes = sign_prefixes(n, rank, PREFIX_DEPTH)
    jobs = max(1, min(int(jobs), len(prefixes)))
    groups = [prefixes[i::jobs] for i in range(jobs)]
    tasks = [(n, rank, partitions, g, budget) for g in groups]
    if jobs == 1:
        results = [_work(tasks[0])]
    else:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_work, tasks))
    nodes = sum(r[1] for r in results)
    if nodes <= budget and all(r[0] is not None for r in results):
        tallies = {p: Tally() for p in partitions}
        for res, _ in results:
            for p in partitions:
                tallies[p].merge(res[p])
        return SweepReport(n, rank, partitions, True, nodes, budget, seed, 0, tallies)
    rows = np.array([chi.signs for chi in random_signotopes(n, rank, samples, seed)], np.int8)
    rows = rows.reshape(samples, comb(n, rank))
    tallies = {p: tally_signs(rows, p) for p in partitions}
    return SweepReport(n, rank, partitions, False, min(nodes, budget + 1), budget, seed, samples, tallies)


def write_certificates(report: SweepReport, path) -> Path | None:
    """Dump the retained counterexamples as JSON; nothing is written when there are none."""
    certs = report.certificates()
    if not certs:
        return None
    path = Path(path)
    payload = {"n": report.n, "rank": report.rank, "certificates": certs}
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    return path
